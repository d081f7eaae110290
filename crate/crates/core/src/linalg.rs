//! Dense Gaussian elimination for the small junction systems.

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Rows that lie (numerically) in the span of the rows before them.
    ///
    /// Rows are reduced one at a time against an echelon basis of the
    /// previously accepted rows; a row whose remainder has no entry above
    /// `tol` is reported as dependent.
    pub fn dependent_rows(&self, tol: f64) -> Vec<usize> {
        let n = self.n;
        let mut basis: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut dependent = Vec::new();
        for i in 0..n {
            let mut r = self.row(i).to_vec();
            for (pivot, b) in &basis {
                let factor = r[*pivot] / b[*pivot];
                if factor != 0.0 {
                    for (x, y) in r.iter_mut().zip(b) {
                        *x -= factor * y;
                    }
                }
            }
            let (pivot, max) = r
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.abs()))
                .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if max <= tol {
                dependent.push(i);
            } else {
                basis.push((pivot, r));
            }
        }
        dependent
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    ///
    /// Returns `None` when a pivot falls below `tol`.
    pub fn solve(&self, b: &[f64], tol: f64) -> Option<Vec<f64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let (p, pmax) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold((col, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            if pmax <= tol {
                return None;
            }
            if p != col {
                for j in 0..n {
                    a.swap(col * n + j, p * n + j);
                }
                x.swap(col, p);
            }
            let piv = a[col * n + col];
            for r in col + 1..n {
                let factor = a[r * n + col] / piv;
                if factor == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= factor * a[col * n + j];
                }
                x[r] -= factor * x[col];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= a[i * n + j] * x[j];
            }
            x[i] = s / a[i * n + i];
        }
        Some(x)
    }
}
