//! Small dense linear algebra for the normal equations.

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.row_mut(i).copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ y`
    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            if *yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        out
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = M`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    /// Row-major lower triangle (full square storage for simplicity).
    l: Vec<f64>,
}

const SKIPPED_PIVOT: f64 = 1e128;

impl Cholesky {
    /// Factors the symmetric matrix stored in the lower triangle of `m`
    /// (row-major, `n × n`). Returns `None` if a pivot is not positive.
    pub fn factor(m: Vec<f64>, n: usize) -> Option<Self> {
        Self::factor_skipping(m, n, 0.0)
    }

    /// Like [`Cholesky::factor`], but a pivot no larger than `rel_tol` times
    /// the largest diagonal entry is replaced by a huge value, which zeroes
    /// the matching solution component instead of failing. Clearly negative
    /// pivots still fail.
    pub fn factor_skipping(mut m: Vec<f64>, n: usize, rel_tol: f64) -> Option<Self> {
        debug_assert_eq!(m.len(), n * n);
        let scale = (0..n).map(|i| m[i * n + i].abs()).fold(0.0, f64::max);
        let floor = rel_tol * scale;
        for j in 0..n {
            let (upper, lower) = m.split_at_mut((j + 1) * n);
            let row_j = &mut upper[j * n..j * n + j + 1];
            let mut d = row_j[j] - dot(&row_j[..j], &row_j[..j]);
            if !d.is_finite() {
                return None;
            }
            if d <= floor {
                if rel_tol > 0.0 && d > -floor {
                    d = SKIPPED_PIVOT;
                } else {
                    return None;
                }
            }
            row_j[j] = d.sqrt();
            let row_j = &upper[j * n..j * n + j + 1];
            for i in (j + 1)..n {
                let row_i = &mut lower[(i - j - 1) * n..(i - j) * n];
                row_i[j] = (row_i[j] - dot(&row_i[..j], &row_j[..j])) / row_j[j];
            }
        }
        Some(Self { n, l: m })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `M z = rhs` in place.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&rhs[..i]).map(|(a, b)| a * b).sum();
            rhs[i] = (rhs[i] - s) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * rhs[k];
            }
            rhs[i] = s / self.l[i * n + i];
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut out = rhs.to_vec();
        self.solve_in_place(&mut out);
        out
    }
}
