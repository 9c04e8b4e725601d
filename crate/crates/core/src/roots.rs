//! Polynomial roots and scalar root bracketing.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Evaluates a polynomial given highest-degree coefficient first.
pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_eval_complex(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::default();
    let mut dp = Complex64::default();
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// All complex roots, from the eigenvalues of the companion matrix followed
/// by a few Newton refinements that are kept only when they reduce `|p|`.
///
/// Leading zero coefficients are stripped; a constant polynomial has no roots.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let start = coeffs.iter().position(|&c| c != 0.0).unwrap_or(coeffs.len());
    let coeffs = &coeffs[start..];
    if coeffs.len() < 2 {
        return Vec::new();
    }
    let degree = coeffs.len() - 1;
    let lead = coeffs[0];
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for j in 0..degree {
        companion[(0, j)] = -coeffs[j + 1] / lead;
    }
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    let mut roots: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();
    for z in roots.iter_mut() {
        for _ in 0..8 {
            let (p, dp) = poly_eval_complex(coeffs, *z);
            if dp.norm() == 0.0 {
                break;
            }
            let candidate = *z - p / dp;
            if poly_eval_complex(coeffs, candidate).0.norm() < p.norm() {
                *z = candidate;
            } else {
                break;
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// Brent's method on `[a, b]`, which must bracket a sign change.
pub fn brent<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!(
            "f({a}) = {fa} and f({b}) = {fb} do not bracket a root"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::Bracket("Brent iteration did not converge".into()))
}

/// Sign changes of `f` between consecutive finite samples on `grid`.
/// Samples where `f` is not finite break the chain.
pub fn sign_change_brackets<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> Vec<(f64, f64)> {
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    grid.windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| v[0].is_finite() && v[1].is_finite() && v[0].signum() != v[1].signum())
        .map(|(x, _)| (x[0], x[1]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quartic_with_known_roots() {
        let p = poly_mul(&poly_mul(&[1.0, -1.0], &[1.0, 2.0]), &poly_mul(&[1.0, -0.5], &[1.0, 3.0]));
        let roots = poly_roots(&p);
        let expected = [-3.0, -2.0, 0.5, 1.0];
        for (z, e) in roots.iter().zip(expected) {
            assert!((z.re - e).abs() < 1e-13 && z.im.abs() < 1e-13, "{z} vs {e}");
        }
    }

    #[test]
    fn complex_pair() {
        let roots = poly_roots(&[1.0, 0.0, 1.0]);
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|z| z.re.abs() < 1e-15 && (z.im.abs() - 1.0).abs() < 1e-15));
        assert!(poly_roots(&[0.0, 3.0]).is_empty());
    }

    #[test]
    fn brent_finds_cos_root() {
        let r = brent(f64::cos, 1.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn brackets_skip_undefined_regions() {
        let grid: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect();
        let f = |x: f64| if x.abs() < 0.55 { f64::NAN } else { x * x - 1.0 };
        let b = sign_change_brackets(f, &grid);
        assert_eq!(b.len(), 2);
    }

    proptest! {
        #[test]
        fn cubic_roots_reproduce_factors(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
            prop_assume!((a - b).abs() > 1e-2 && (b - c).abs() > 1e-2 && (a - c).abs() > 1e-2);
            let p = poly_mul(&poly_mul(&[1.0, -a], &[1.0, -b]), &[1.0, -c]);
            let mut expected = [a, b, c];
            expected.sort_by(f64::total_cmp);
            let roots = poly_roots(&p);
            for (z, e) in roots.iter().zip(expected) {
                prop_assert!((z.re - e).abs() < 1e-9 && z.im.abs() < 1e-9);
            }
        }
    }
}
