//! Halton low-discrepancy points with a Cranley–Patterson rotation.

const PRIMES: [u32; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109,
    113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239,
    241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311,
];

pub const MAX_DIM: usize = PRIMES.len();

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    out
}

/// `count` points of the `dim`-dimensional Halton sequence in `[0, 1)^dim`,
/// starting at index 1, each coordinate shifted by `shift` modulo 1.
pub fn halton_points(dim: usize, count: usize, shift: &[f64]) -> Vec<Vec<f64>> {
    assert!(dim <= MAX_DIM, "Halton sequence supports at most {MAX_DIM} dimensions");
    assert_eq!(shift.len(), dim);
    (1..=count as u64)
        .map(|i| {
            (0..dim)
                .map(|d| {
                    let v = radical_inverse(i, PRIMES[d] as u64) + shift[d];
                    v - v.floor()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_two_sequence() {
        let p = halton_points(1, 4, &[0.0]);
        assert_eq!(p, vec![vec![0.5], vec![0.25], vec![0.75], vec![0.125]]);
    }

    #[test]
    fn points_fill_the_square_evenly() {
        let p = halton_points(2, 1024, &[0.3, 0.7]);
        let mut cells = [0usize; 16];
        for q in &p {
            assert!(q.iter().all(|&v| (0.0..1.0).contains(&v)));
            cells[(q[0] * 4.0) as usize * 4 + (q[1] * 4.0) as usize] += 1;
        }
        assert!(cells.iter().all(|&c| (54..=74).contains(&c)), "{cells:?}");
    }
}
