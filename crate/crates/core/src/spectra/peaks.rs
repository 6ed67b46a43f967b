//! Local maxima and their topographic prominence.

/// An interior local maximum. Plateaus are reported once, at their midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub left_edge: usize,
    pub right_edge: usize,
    pub prominence: f64,
}

fn local_maxima(x: &[f64]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    if x.len() < 3 {
        return out;
    }
    let last = x.len() - 1;
    let mut i = 1;
    while i < last {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead < last && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                let right = ahead - 1;
                out.push(((i + right) / 2, i, right));
                i = ahead;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Height of a peak above the higher of the two lowest points reachable on
/// either side before meeting strictly higher ground.
fn prominence(x: &[f64], peak: usize) -> f64 {
    let h = x[peak];
    let mut left_min = h;
    for &v in x[..=peak].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[peak..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// All interior maxima with prominence at least `min_prominence`.
pub fn find_peaks(values: &[f64], min_prominence: f64) -> Vec<Peak> {
    local_maxima(values)
        .into_iter()
        .map(|(index, left_edge, right_edge)| Peak {
            index,
            left_edge,
            right_edge,
            prominence: prominence(values, index),
        })
        .filter(|p| p.prominence >= min_prominence)
        .collect()
}

pub fn count_peaks(values: &[f64], min_prominence: f64) -> usize {
    find_peaks(values, min_prominence).len()
}
