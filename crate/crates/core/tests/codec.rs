use emitter_core::codec::{
    augment, threshold, to_stack, AugmentConfig, Dataset, Design, MaterialMap, Provenance, Record, RelaxedVector,
    StructureVector,
};
use emitter_core::spectra::Spectrum;
use proptest::prelude::*;

fn structure(len: usize) -> impl Strategy<Value = StructureVector> {
    prop::collection::vec(0u8..=1, len).prop_map(|b| StructureVector::new(b).unwrap())
}

fn seeds(structures: &[StructureVector]) -> Dataset {
    Dataset {
        records: structures
            .iter()
            .enumerate()
            .map(|(id, s)| Record {
                id,
                provenance: Provenance::Seed,
                design: Design::Binary(s.clone()),
                fom: Some(0.1 * id as f64 - 0.3),
                spectrum: None,
            })
            .collect(),
    }
}

proptest! {
    #[test]
    fn noiseless_augmentation_thresholds_back(structures in prop::collection::vec(structure(36), 1..5)) {
        let config = AugmentConfig { factor: 3, jitter_sigma: 0.0, scale_range: (1.0, 1.0), seed: 2, ..Default::default() };
        let variants = augment(&seeds(&structures), &config).unwrap();
        prop_assert_eq!(variants.len(), 3 * structures.len());
        for (i, r) in variants.records.iter().enumerate() {
            let Design::Relaxed(v) = &r.design else { panic!("variant should be relaxed") };
            prop_assert_eq!(v, &structures[i / 3].lift());
            prop_assert_eq!(&threshold(v, 0.5), &structures[i / 3]);
        }
    }

    #[test]
    fn distinct_structures_give_distinct_stacks(a in structure(12), b in structure(12)) {
        let map = MaterialMap::default();
        prop_assert_eq!(a == b, to_stack(&a, &map) == to_stack(&b, &map));
    }

    #[test]
    fn datasets_round_trip_through_disk(
        structures in prop::collection::vec(structure(10), 1..4),
        relaxed in prop::collection::vec(prop::collection::vec(0.0..=1.0f64, 10), 0..4),
        foms in prop::collection::vec(-3.0..1.0f64, 8),
        spectrum in prop::collection::vec(0.0..=1.0f64, 3),
    ) {
        let mut ds = seeds(&structures);
        ds.records[0].spectrum = Some(Spectrum::new(vec![4.0, 4.1 + 1e-9, 7.0], spectrum).unwrap());
        for (k, fom) in ds.records.iter_mut().zip(&foms) {
            k.fom = Some(*fom);
        }
        let n = ds.len();
        for (i, v) in relaxed.into_iter().enumerate() {
            ds.records.push(Record {
                id: n + i,
                provenance: Provenance::Augmented { seed_id: 0 },
                design: Design::Relaxed(RelaxedVector::new(v).unwrap()),
                fom: ds.records[0].fom,
                spectrum: None,
            });
        }
        let dir = tempfile::tempdir().unwrap();
        ds.save(dir.path()).unwrap();
        let back = Dataset::load(dir.path()).unwrap();
        prop_assert_eq!(back.seed_structures(), ds.seed_structures());
        prop_assert_eq!(back.len(), ds.len());
        for (a, b) in ds.records.iter().zip(&back.records) {
            prop_assert_eq!(a.id, b.id);
            prop_assert_eq!(&a.provenance, &b.provenance);
            for (x, y) in a.design.to_values().iter().zip(b.design.to_values()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
            prop_assert!((a.fom.unwrap() - b.fom.unwrap()).abs() <= 1e-12);
            match (&a.spectrum, &b.spectrum) {
                (None, None) => {}
                (Some(x), Some(y)) => {
                    for (p, q) in x.values().iter().zip(y.values()) {
                        prop_assert!((p - q).abs() <= 1e-12);
                    }
                    prop_assert_eq!(x.wavelengths(), y.wavelengths());
                }
                _ => prop_assert!(false, "spectrum lost"),
            }
        }
    }
}
