//! Bilinear saddle points and affine test operators.

use crate::error::{param, Result};
use crate::linalg::{spectral_norm_gram, DenseMatrix, SparseMatrix, Vector};
use crate::problem::{MonotonicityClass, VIProblem};
use crate::prox::ProxOp;
use crate::rng::RngStream;

const GRAM_TOL: f64 = 1e-12;
const GRAM_MAX_ITER: usize = 100_000;

fn zero_is_minimizer(g: &ProxOp) -> bool {
    match g {
        ProxOp::Zero | ProxOp::L1 { .. } | ProxOp::NonnegOrthant => true,
        ProxOp::Product(blocks) => blocks.iter().all(|(_, b)| zero_is_minimizer(b)),
        _ => false,
    }
}

/// `min_x max_y g₁(x) + ⟨Kx, y⟩ − g₂(y)` as a VI in `z = (x, y)`.
///
/// `K` is `p×q`, `x ∈ ℝ^q`, `y ∈ ℝ^p`, `F(z) = (Kᵀy, −Kx)` and
/// `g(z) = g₁(x) + g₂(y)`. The Lipschitz constant is `‖K‖`. When both `g₁`
/// and `g₂` are minimized at the origin, `z* = 0` is recorded as the solution.
pub fn make_bilinear_saddle(k: SparseMatrix, g1: ProxOp, g2: ProxOp) -> Result<VIProblem> {
    let (p, q) = (k.rows(), k.cols());
    if g1.fixed_dim().is_some_and(|d| d != q) {
        return param(format!("g1 has dimension {:?}, K has {q} columns", g1.fixed_dim()));
    }
    if g2.fixed_dim().is_some_and(|d| d != p) {
        return param(format!("g2 has dimension {:?}, K has {p} rows", g2.fixed_dim()));
    }
    let gram = spectral_norm_gram(&k, GRAM_TOL, GRAM_MAX_ITER)?;
    let with_solution = zero_is_minimizer(&g1) && zero_is_minimizer(&g2);
    let g = ProxOp::product(vec![(q, g1), (p, g2)]);
    let op = move |z: &[f64]| -> Result<Vector> {
        if z.len() != p + q {
            return param(format!("saddle point has dimension {}, expected {}", z.len(), p + q));
        }
        let (x, y) = z.split_at(q);
        let mut out = k.matvec_transpose(y);
        out.extend(k.matvec(x).into_iter().map(|v| -v));
        Ok(out)
    };
    let mut problem = VIProblem::new(format!("bilinear-saddle-{p}x{q}"), p + q, op, g)
        .with_lipschitz(gram.value.sqrt())
        .with_class(MonotonicityClass::Monotone);
    if with_solution {
        problem = problem.with_solution(vec![0.0; p + q]);
    }
    Ok(problem)
}

/// Square matrix with i.i.d. `N(0,1)` entries.
pub fn random_gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Result<SparseMatrix> {
    let mut rng = RngStream::new(seed);
    let d = DenseMatrix::from_row_major(rows, cols, rng.normal(0.0, 1.0, rows * cols)?)?;
    Ok(SparseMatrix::from_dense(&d))
}

/// Strongly monotone affine VI `F(z) = Az + b` with `A = I + S`, `S` skew-symmetric.
///
/// `S = skew·(R − Rᵀ)/2` for Gaussian `R`; the solution `z*` is drawn first
/// and `b = −Az*`. `g ≡ 0`.
pub fn make_affine_vi(n: usize, skew: f64, seed: u64) -> Result<VIProblem> {
    if n == 0 {
        return param("affine VI needs n >= 1");
    }
    let mut rng = RngStream::new(seed);
    let solution = rng.normal(0.0, 1.0, n)?;
    let r = rng.normal(0.0, 1.0, n * n)?;
    let mut a = DenseMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let s = 0.5 * skew * (r[i * n + j] - r[j * n + i]);
            a.set(i, j, a.get(i, j) + s);
        }
    }
    let b: Vector = a.matvec(&solution).into_iter().map(|v| -v).collect();
    let gram = spectral_norm_gram(&SparseMatrix::from_dense(&a), GRAM_TOL, GRAM_MAX_ITER)?;
    let op = move |z: &[f64]| -> Result<Vector> { Ok(a.matvec(z).iter().zip(&b).map(|(u, v)| u + v).collect()) };
    Ok(VIProblem::new(format!("affine-n{n}"), n, op, ProxOp::Zero)
        .with_lipschitz(gram.value.sqrt())
        .with_solution(solution)
        .with_class(MonotonicityClass::Monotone))
}
