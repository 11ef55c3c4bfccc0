//! Dense vector helpers, dense and compressed sparse row matrices, and a
//! power-iteration estimate of `‖KᵀK‖`.

use crate::error::{param, Error, Result};
use crate::rng::RngStream;

/// Dense real vector. All library routines work on `&[f64]` and return owned `Vector`s.
pub type Vector = Vec<f64>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `⟨a, b⟩` summed over four interleaved partial sums.
fn dense_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (a4, b4) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail = dot(a4.remainder(), b4.remainder());
    for (u, v) in a4.zip(b4) {
        for l in 0..4 {
            acc[l] += u[l] * v[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

/// `‖a − b‖²`
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vector {
    a.iter().map(|x| s * x).collect()
}

/// `y ← y + s·x`
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return param(format!("dense matrix {rows}x{cols} needs {} entries, got {}", rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Vector {
        assert_eq!(x.len(), self.cols, "dimension mismatch in matvec");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn matvec_transpose(&self, y: &[f64]) -> Vector {
        assert_eq!(y.len(), self.rows, "dimension mismatch in transposed matvec");
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            axpy(yi, self.row(i), &mut out);
        }
        out
    }
}

/// Compressed sparse row matrix. Column indices are strictly increasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from per-row `(column, value)` lists.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for (r, row) in rows.iter().enumerate() {
            let mut last: Option<usize> = None;
            for &(j, v) in row {
                if j >= cols {
                    return param(format!("row {r}: column {j} out of range for {cols} columns"));
                }
                if last.is_some_and(|l| j <= l) {
                    return param(format!("row {r}: column indices must be strictly increasing"));
                }
                last = Some(j);
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Ok(Self { rows: rows.len(), cols, indptr, indices, values })
    }

    /// Keeps every nonzero of a dense matrix.
    pub fn from_dense(d: &DenseMatrix) -> Self {
        let rows = (0..d.rows())
            .map(|i| d.row(i).iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect())
            .collect();
        Self::from_rows(d.cols(), rows).expect("dense rows are well formed")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let rows = d.iter().enumerate().map(|(i, v)| vec![(i, *v)]).collect();
        Self::from_rows(d.len(), rows).expect("diagonal rows are well formed")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_rows(cols, vec![Vec::new(); rows]).expect("empty rows are well formed")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (idx, val) = self.row(i);
        if idx.len() == self.cols {
            return dense_dot(val, x);
        }
        let mut acc = [0.0; 4];
        let (idx4, val4) = (idx.chunks_exact(4), val.chunks_exact(4));
        let tail: f64 = idx4.remainder().iter().zip(val4.remainder()).map(|(&j, v)| v * x[j]).sum();
        for (js, vs) in idx4.zip(val4) {
            for l in 0..4 {
                acc[l] += vs[l] * x[js[l]];
            }
        }
        (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        norm_sq(self.row(i).1)
    }

    /// `Kx`
    pub fn matvec(&self, x: &[f64]) -> Vector {
        assert_eq!(x.len(), self.cols, "dimension mismatch in sparse matvec");
        (0..self.rows).map(|i| self.row_dot(i, x)).collect()
    }

    /// `Kᵀy`
    pub fn matvec_transpose(&self, y: &[f64]) -> Vector {
        assert_eq!(y.len(), self.rows, "dimension mismatch in sparse transposed matvec");
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            let (idx, val) = self.row(i);
            if idx.len() == self.cols {
                axpy(yi, val, &mut out);
                continue;
            }
            for (&j, v) in idx.iter().zip(val) {
                out[j] += yi * v;
            }
        }
        out
    }

    /// Multiplies every entry of row `i` by `s[i]`.
    pub fn scale_rows(&self, s: &[f64]) -> Self {
        assert_eq!(s.len(), self.rows);
        let mut out = self.clone();
        for (i, si) in s.iter().enumerate() {
            for v in &mut out.values[self.indptr[i]..self.indptr[i + 1]] {
                *v *= si;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                d.set(i, j, v);
            }
        }
        d
    }
}

/// Outcome of [`spectral_norm_gram`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    /// Estimate of the largest eigenvalue of `KᵀK`.
    pub value: f64,
    pub iterations: usize,
    /// `false` when `max_iter` was reached before the relative change dropped below `tol`.
    pub converged: bool,
}

const POWER_ITERATION_SEED: u64 = 0x6772_6161_6c5f_706f;

/// Power iteration on `v ↦ Kᵀ(Kv)` without forming the Gram matrix.
///
/// The estimate at each step is the Rayleigh quotient `‖Kv‖²` of the current
/// unit vector; iteration stops once two consecutive estimates differ by at
/// most `tol` relative. The start vector is drawn from a fixed internal seed so
/// the result is reproducible.
pub fn spectral_norm_gram(k: &SparseMatrix, tol: f64, max_iter: usize) -> Result<SpectralEstimate> {
    if !(tol > 0.0) {
        return param("spectral_norm_gram: tol must be positive");
    }
    if k.cols() == 0 || k.values.iter().all(|v| *v == 0.0) {
        return Ok(SpectralEstimate { value: 0.0, iterations: 0, converged: true });
    }
    let mut rng = RngStream::new(POWER_ITERATION_SEED);
    let mut v = rng.normal(0.0, 1.0, k.cols())?;
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut estimate = 0.0_f64;
    for it in 1..=max_iter {
        let kv = k.matvec(&v);
        let next = norm_sq(&kv);
        let w = k.matvec_transpose(&kv);
        let nw = norm(&w);
        if nw == 0.0 {
            // start vector in the null space of K; the Gram operator is nonzero so perturb
            v = rng.normal(0.0, 1.0, k.cols())?;
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            continue;
        }
        let change = (next - estimate).abs();
        estimate = next;
        v = w.into_iter().map(|x| x / nw).collect();
        if it > 1 && change <= tol * estimate {
            return Ok(SpectralEstimate { value: estimate, iterations: it, converged: true });
        }
    }
    if !estimate.is_finite() {
        return Err(Error::Numerical { iteration: max_iter, message: "power iteration diverged".into() });
    }
    Ok(SpectralEstimate { value: estimate, iterations: max_iter, converged: false })
}
