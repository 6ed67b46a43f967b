//! Lower-triangular factors stored row-packed: row `i` holds `i + 1`
//! entries starting at `i (i + 1) / 2`, so appending a row is cheap.

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) struct PackedLower {
    n: usize,
    data: Vec<f64>,
}

impl PackedLower {
    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.data[start..start + i + 1]
    }

    /// Appends the row for a new point given its covariances with the
    /// existing points and its own variance. Returns `false`, leaving the
    /// factor unchanged, when the new pivot is not positive.
    pub fn push_row(&mut self, cov: &[f64], var: f64) -> bool {
        debug_assert_eq!(cov.len(), self.n);
        let mut row = Vec::with_capacity(self.n + 1);
        for j in 0..self.n {
            let lj = self.row(j);
            let s = cov[j] - dot(&row[..j], &lj[..j]);
            row.push(s / lj[j]);
        }
        let d = var - dot(&row, &row);
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        row.push(d.sqrt());
        self.data.extend_from_slice(&row);
        self.n += 1;
        true
    }

    /// Solves `L z = b`.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let r = self.row(i);
            let s = b[i] - dot(&r[..i], &z);
            z.push(s / r[i]);
        }
        z
    }

    /// Solves `Lᵀ x = z`.
    pub fn backward(&self, z: &[f64]) -> Vec<f64> {
        let mut w = z.to_vec();
        let mut x = vec![0.0; self.n];
        for i in (0..self.n).rev() {
            let r = self.row(i);
            let xi = w[i] / r[i];
            x[i] = xi;
            for (wj, &lij) in w[..i].iter_mut().zip(&r[..i]) {
                *wj -= lij * xi;
            }
        }
        x
    }

    pub fn log_det_half(&self) -> f64 {
        (0..self.n).map(|i| self.row(i)[i].ln()).sum()
    }
}
