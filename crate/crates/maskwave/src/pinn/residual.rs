//! PDE residuals of the governing equations, assembled from exact field
//! derivatives and analytic permittivity gradients.

use num_complex::Complex64;

use super::field::ScalarField2;
use super::problem::PinnProblem;

/// Scalar TE residual R[u] = Lap(u) + k0^2 eps u, the 2D reduction of the
/// coupled system (the lateral coupling terms vanish when nothing varies
/// along y and only E_y is nonzero).
pub fn pde_residual_scalar(
    field: &dyn ScalarField2,
    problem: &PinnProblem,
    x: f64,
    z: f64,
) -> Complex64 {
    let (u, _, _, uxx, uzz) = field.eval_jet(x, z);
    let k0 = problem.k0();
    let eps = problem.eps(x, z);
    uxx + uzz + k0 * k0 * eps * u
}

/// A coupled transverse magnetic-field pair (H_x, H_y) with the derivatives
/// the 3D residuals need.
pub trait HxHyField {
    /// Returns, per component c in {x, y}:
    /// (u_c, du_c/dx, du_c/dy, du_c/dz, Lap u_c).
    fn eval_pair(
        &self,
        x: f64,
        y: f64,
        z: f64,
    ) -> ([Complex64; 5], [Complex64; 5]);
}

/// Coupled residuals of the (H_x, H_y) system:
/// R[u1] = Lap u1 + k0^2 eps u1 + (1/eps)(d eps/dy)(du2/dx - du1/dy)
/// R[u2] = Lap u2 + k0^2 eps u2 + (1/eps)(d eps/dx)(du1/dy - du2/dx)
pub fn pde_residual_coupled(
    field: &dyn HxHyField,
    k0: f64,
    eps: Complex64,
    grad_eps: (Complex64, Complex64),
    x: f64,
    y: f64,
    z: f64,
) -> (Complex64, Complex64) {
    let (u1, u2) = field.eval_pair(x, y, z);
    let [h1, h1x, h1y, _, lap1] = u1;
    let [h2, h2x, h2y, _, lap2] = u2;
    let _ = h1x;
    let k0sq = k0 * k0;
    let curl_mix = h2x - h1y;
    let r1 = lap1 + k0sq * eps * h1 + grad_eps.1 / eps * curl_mix;
    let r2 = lap2 + k0sq * eps * h2 + grad_eps.0 / eps * (-curl_mix);
    let _ = (x, y, z, h2y);
    (r1, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{BenchmarkProblem, BenchmarkVariant};

    /// Wraps an analytic solution as a field (the "hand-built network").
    /// Each region is a sum of plane waves, so every derivative is exact:
    /// u_x = -i kx u, u_xx = -kx^2 u, u_z = i k0 H_x, and the Helmholtz
    /// relation gives u_zz = (kx^2 - k0^2 eps) u.
    struct AnalyticField(BenchmarkProblem);

    impl ScalarField2 for AnalyticField {
        fn eval_jet(
            &self,
            x: f64,
            z: f64,
        ) -> (Complex64, Complex64, Complex64, Complex64, Complex64) {
            let (u, hx) = self.0.exact_ey_hx(x, z);
            let kx = self.0.kx();
            let k0 = self.0.k0();
            let eps = self.0.eps_at(z);
            let i = Complex64::new(0.0, 1.0);
            let ux = -i * kx * u;
            let uxx = -kx * kx * u;
            let uz = i * k0 * hx;
            let uzz = (kx * kx - k0 * k0 * eps) * u;
            (u, ux, uz, uxx, uzz)
        }
    }

    /// An exact plane wave in uniform medium has residual ~0.
    #[test]
    fn plane_wave_residual_vanishes() {
        let problem = BenchmarkProblem::new(BenchmarkVariant::Propagation);
        let field = AnalyticField(problem.clone());
        let p = PinnProblem::Benchmark(problem);
        for (x, z) in [(0.0, 0.5), (1.1, -0.4), (-2.0, 2.0)] {
            let r = pde_residual_scalar(&field, &p, x, z);
            assert!(r.norm() < 1e-8, "residual {:.3e}", r.norm());
        }
    }

    /// All three closed-form solutions satisfy the equation away from
    /// interfaces.
    #[test]
    fn analytic_solutions_have_small_residuals() {
        for variant in [
            BenchmarkVariant::Propagation,
            BenchmarkVariant::Interface,
            BenchmarkVariant::Slab,
        ] {
            let problem = BenchmarkProblem::new(variant);
            let field = AnalyticField(problem.clone());
            let p = PinnProblem::Benchmark(problem);
            for (x, z) in [(0.3, 1.4), (-0.8, -0.9), (1.9, -2.2)] {
                let (_, _, zmin, zmax) = p.domain();
                if z < zmin + 0.1 || z > zmax - 0.1 {
                    continue;
                }
                if p.interface_planes().iter().any(|zi| (z - zi).abs() < 0.05) {
                    continue;
                }
                let r = pde_residual_scalar(&field, &p, x, z);
                assert!(r.norm() < 1e-10, "{variant:?}: residual {:.3e}", r.norm());
            }
        }
    }

    /// The zero field has zero residual.
    #[test]
    fn zero_field_residual_is_zero() {
        struct Zero;
        impl ScalarField2 for Zero {
            fn eval_jet(
                &self,
                _x: f64,
                _z: f64,
            ) -> (Complex64, Complex64, Complex64, Complex64, Complex64) {
                let z = Complex64::new(0.0, 0.0);
                (z, z, z, z, z)
            }
        }
        let p = PinnProblem::Benchmark(BenchmarkProblem::new(BenchmarkVariant::Slab));
        let r = pde_residual_scalar(&Zero, &p, 0.4, -0.3);
        assert_eq!(r, Complex64::new(0.0, 0.0));
    }

    /// Coupled residual against a finite-difference reconstruction on a
    /// random smooth field.
    #[test]
    fn coupled_residual_matches_finite_difference_reconstruction() {
        // Synthetic smooth complex pair.
        let f1 = |x: f64, y: f64, z: f64| {
            Complex64::new((0.9 * x + 0.3 * y).sin() * (0.7 * z).cos(), (0.4 * x - 0.8 * z).cos())
        };
        let f2 = |x: f64, y: f64, z: f64| {
            Complex64::new((0.5 * x * y).cos(), (0.6 * y + 0.2 * z).sin() * (0.3 * x).cos())
        };
        struct Synth<F1, F2>(F1, F2, f64);
        impl<
                F1: Fn(f64, f64, f64) -> Complex64,
                F2: Fn(f64, f64, f64) -> Complex64,
            > HxHyField for Synth<F1, F2>
        {
            fn eval_pair(&self, x: f64, y: f64, z: f64) -> ([Complex64; 5], [Complex64; 5]) {
                let h = self.2;
                let pack = |f: &dyn Fn(f64, f64, f64) -> Complex64| {
                    let u = f(x, y, z);
                    let ux = (f(x + h, y, z) - f(x - h, y, z)) / (2.0 * h);
                    let uy = (f(x, y + h, z) - f(x, y - h, z)) / (2.0 * h);
                    let uz = (f(x, y, z + h) - f(x, y, z - h)) / (2.0 * h);
                    let lap = (f(x + h, y, z) + f(x - h, y, z) + f(x, y + h, z)
                        + f(x, y - h, z)
                        + f(x, y, z + h)
                        + f(x, y, z - h)
                        - 6.0 * u)
                        / (h * h);
                    [u, ux, uy, uz, lap]
                };
                (pack(&self.0), pack(&self.1))
            }
        }
        let field = Synth(f1, f2, 1e-4);
        let k0 = 1.3;
        let eps = Complex64::new(2.0, -0.2);
        let grad = (Complex64::new(0.3, -0.05), Complex64::new(-0.6, 0.1));
        let (x, y, z) = (0.37, -0.51, 0.22);
        let (r1, r2) = pde_residual_coupled(&field, k0, eps, grad, x, y, z);

        // Independent reconstruction straight from the definition.
        let u1 = f1(x, y, z);
        let u2 = f2(x, y, z);
        let h = 1e-4;
        let lap = |f: &dyn Fn(f64, f64, f64) -> Complex64| {
            (f(x + h, y, z) + f(x - h, y, z) + f(x, y + h, z) + f(x, y - h, z)
                + f(x, y, z + h)
                + f(x, y, z - h)
                - 6.0 * f(x, y, z))
                / (h * h)
        };
        let du2dx = (f2(x + h, y, z) - f2(x - h, y, z)) / (2.0 * h);
        let du1dy = (f1(x, y + h, z) - f1(x, y - h, z)) / (2.0 * h);
        let e1 = lap(&f1) + k0 * k0 * eps * u1 + grad.1 / eps * (du2dx - du1dy);
        let e2 = lap(&f2) + k0 * k0 * eps * u2 + grad.0 / eps * (du1dy - du2dx);
        assert!((r1 - e1).norm() / e1.norm() < 1e-5);
        assert!((r2 - e2).norm() / e2.norm() < 1e-5);
    }
}
