//! Thin wrappers around the dense complex kernels (eigendecomposition and
//! pivoted LU) with ndarray-based call sites.

use faer::linalg::solvers::Solve;
use faer::Mat;
use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) fn to_faer(a: &Array2<Complex64>) -> Mat<Complex64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Full eigendecomposition of a dense complex (non-Hermitian) matrix.
/// Returns eigenvalues and unit-norm right eigenvectors (columns).
pub(crate) fn eigendecompose(
    a: &Array2<Complex64>,
) -> Result<(Vec<Complex64>, Array2<Complex64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::ShapeMismatch("eigendecomposition needs a square matrix".into()));
    }
    let m = to_faer(a);
    let eig = m.eigen().map_err(|_| Error::EigenFailure { layer: usize::MAX })?;
    let values: Vec<Complex64> = (0..n).map(|i| eig.S().column_vector()[i]).collect();
    let u = eig.U();
    let mut vectors = Array2::<Complex64>::default((n, n));
    for j in 0..n {
        let mut norm = 0.0f64;
        for i in 0..n {
            norm += u[(i, j)].norm_sqr();
        }
        let scale = 1.0 / norm.sqrt();
        for i in 0..n {
            vectors[(i, j)] = u[(i, j)] * scale;
        }
    }
    Ok((values, vectors))
}

/// Pivoted LU factorization kept around for repeated solves.
pub(crate) struct LuFactors {
    lu: faer::linalg::solvers::PartialPivLu<Complex64>,
    n: usize,
}

impl LuFactors {
    pub fn new(a: &Array2<Complex64>) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::ShapeMismatch("LU needs a square matrix".into()));
        }
        let lu = to_faer(a).partial_piv_lu();
        Ok(Self { lu, n })
    }

    pub fn solve_vec(&self, b: &Array1<Complex64>) -> Result<Array1<Complex64>> {
        if b.len() != self.n {
            return Err(Error::ShapeMismatch("rhs length mismatch".into()));
        }
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        Ok(Array1::from_iter((0..self.n).map(|i| x[(i, 0)])))
    }

    pub fn solve_adjoint_vec(&self, b: &Array1<Complex64>) -> Result<Array1<Complex64>> {
        if b.len() != self.n {
            return Err(Error::ShapeMismatch("rhs length mismatch".into()));
        }
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let mut out = rhs.clone();
        out.copy_from(&rhs);
        let x = self.lu.solve_adjoint(&rhs);
        let _ = out;
        Ok(Array1::from_iter((0..self.n).map(|i| x[(i, 0)])))
    }

    /// Rough 1-norm condition estimate via a few rounds of Hager's method.
    pub fn condition_estimate(&self, a: &Array2<Complex64>) -> f64 {
        let n = self.n;
        let norm_a = one_norm(a);
        let mut x = Array1::from_elem(n, Complex64::new(1.0 / n as f64, 0.0));
        let mut est = 0.0f64;
        for _ in 0..4 {
            let y = match self.solve_vec(&x) {
                Ok(y) => y,
                Err(_) => return f64::INFINITY,
            };
            let new_est: f64 = y.iter().map(|v| v.norm()).sum();
            if !new_est.is_finite() {
                return f64::INFINITY;
            }
            let xi = Array1::from_iter(y.iter().map(|v| {
                if v.norm() > 0.0 { v / v.norm() } else { Complex64::new(1.0, 0.0) }
            }));
            let z = match self.solve_adjoint_vec(&xi) {
                Ok(z) => z,
                Err(_) => return f64::INFINITY,
            };
            if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return f64::INFINITY;
            }
            let (jmax, _) = z
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap();
            if new_est <= est {
                break;
            }
            est = new_est;
            x.fill(Complex64::default());
            x[jmax] = Complex64::new(1.0, 0.0);
        }
        est.max(1e-300) * norm_a
    }
}

pub(crate) fn one_norm(a: &Array2<Complex64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense inverse through LU; used for the small per-layer permittivity
/// convolution matrices.
pub(crate) fn invert(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    let lu = LuFactors::new(a)?;
    let mut inv = Array2::<Complex64>::default((n, n));
    for j in 0..n {
        let mut e = Array1::<Complex64>::default(n);
        e[j] = Complex64::new(1.0, 0.0);
        let col = lu.solve_vec(&e)?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// a.dot(b) for complex matrices and vectors via ndarray.
pub(crate) fn matvec(a: &Array2<Complex64>, x: &Array1<Complex64>) -> Array1<Complex64> {
    a.dot(x)
}
