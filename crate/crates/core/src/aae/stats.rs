fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Two-sample energy distance `2E|X-Y| - E|X-X'| - E|Y-Y'|`, with the
/// within-sample means taken over distinct pairs.
pub fn energy_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    assert!(a.len() >= 2 && b.len() >= 2, "need at least two points per sample");
    let mut cross = 0.0;
    for x in a {
        for y in b {
            cross += dist(x, y);
        }
    }
    cross /= (a.len() * b.len()) as f64;
    let within = |s: &[Vec<f64>]| {
        let mut acc = 0.0;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                acc += dist(&s[i], &s[j]);
            }
        }
        acc / (s.len() * (s.len() - 1) / 2) as f64
    };
    2.0 * cross - within(a) - within(b)
}
