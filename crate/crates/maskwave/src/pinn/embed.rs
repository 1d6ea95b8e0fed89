//! Fourier feature embedding of the lateral coordinate. Any network fed
//! these features is exactly periodic in x by construction.

/// [1, cos(kx x), sin(kx x), ..., cos(m kx x), sin(m kx x)], length 2m + 1.
pub fn fourier_embed(x: f64, m: usize, kx: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * m + 1);
    v.push(1.0);
    for j in 1..=m {
        let arg = j as f64 * kx * x;
        v.push(arg.cos());
        v.push(arg.sin());
    }
    v
}

/// Embedding with its first and second derivatives in x.
pub fn fourier_embed_with_derivatives(x: f64, m: usize, kx: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut v = Vec::with_capacity(2 * m + 1);
    let mut d1 = Vec::with_capacity(2 * m + 1);
    let mut d2 = Vec::with_capacity(2 * m + 1);
    v.push(1.0);
    d1.push(0.0);
    d2.push(0.0);
    for j in 1..=m {
        let w = j as f64 * kx;
        let (s, c) = (w * x).sin_cos();
        v.push(c);
        v.push(s);
        d1.push(-w * s);
        d1.push(w * c);
        d2.push(-w * w * c);
        d2.push(-w * w * s);
    }
    (v, d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_order_is_constant() {
        assert_eq!(fourier_embed(1.23, 0, 0.7), vec![1.0]);
    }

    #[test]
    fn embedding_is_periodic_by_construction() {
        let lx = 3.7;
        let kx = 2.0 * std::f64::consts::PI / lx;
        for x in [-1.0, 0.0, 0.4, 2.9] {
            let a = fourier_embed(x, 3, kx);
            let b = fourier_embed(x + lx, 3, kx);
            for (p, q) in a.iter().zip(b.iter()) {
                assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quarter_period_values_match_direct_trig() {
        let lx = 4.0;
        let kx = 2.0 * std::f64::consts::PI / lx;
        let v = fourier_embed(lx / 4.0, 2, kx);
        let expect = [1.0, 0.0, 1.0, -1.0, 0.0];
        for (a, b) in v.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-15, "{v:?}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let (m, kx, x) = (3, 1.7, 0.43);
        let h = 1e-6;
        let (v, d1, d2) = fourier_embed_with_derivatives(x, m, kx);
        let vp = fourier_embed(x + h, m, kx);
        let vm = fourier_embed(x - h, m, kx);
        for i in 0..v.len() {
            let fd1 = (vp[i] - vm[i]) / (2.0 * h);
            let fd2 = (vp[i] - 2.0 * v[i] + vm[i]) / (h * h);
            assert!((d1[i] - fd1).abs() < 1e-8);
            assert!((d2[i] - fd2).abs() < 1e-3);
        }
    }
}
