//! Fixed points of the reduced mean-field flow and how they change with `r`.
//!
//! Stationary points have `y2 = 0`, `z1 = x2 + 2/3` and lie on both the
//! hyperbola `-4 x2 + z2 + (3/r) z2 x2 - 2/3 = 0` and the ellipse
//! `2 (x2 + 1/6)^2 + z2^2 = 1/2`. Eliminating `x2` gives the quartic
//! `(z2 - 2/3)(z2^3 + (2/3)(1 - 4r) z2^2 - 2r(1 - r) z2 + 4r^2/3)`, whose real
//! roots are only candidates: each is mapped back to the ellipse and kept
//! when it also solves the hyperbola.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{Matrix2x4, Matrix4, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::roots::{brent, poly_mul, poly_roots, sign_change_brackets};
use crate::semiclassical::{self, constants_of_motion, ReducedState, SolutionCurve};
use crate::series::uniform_times;

/// Residual bound every reported fixed point satisfies.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// `|det|` of the constrained linearization below which a point is marginal.
pub const MARGINAL_TOL: f64 = 1e-6;
/// Imaginary part below which a quartic root is treated as real.
const IMAG_TOL: f64 = 1e-6;
/// Candidates must solve the hyperbola this well before polishing.
const CANDIDATE_TOL: f64 = 1e-6;
/// Points closer than this are the same fixed point.
const DEDUP_TOL: f64 = 1e-7;
/// Brent tolerance in `r`.
const RATIO_XTOL: f64 = 1e-12;
/// Default integration horizon for localization sweeps.
pub const DEFAULT_HORIZON: f64 = 100.0;
/// Sampling step used when searching a trajectory for its largest `x2`.
pub const SWEEP_DT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    Center,
    Saddle,
    /// Zero eigenvalues of the constrained linearization (a fold).
    Marginal,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Center => "center",
            Stability::Saddle => "saddle",
            Stability::Marginal => "marginal",
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub r: f64,
    pub x2: f64,
    pub z2: f64,
    pub kind: Stability,
    /// Hyperbola residual.
    pub residual_hyperbola: f64,
    /// Ellipse residual.
    pub residual_ellipse: f64,
}

impl FixedPoint {
    pub fn state(&self) -> ReducedState {
        ReducedState::on_branch(self.x2, self.z2)
    }

    pub fn is_point_a(&self) -> bool {
        (self.x2).abs() < DEDUP_TOL && (self.z2 - 2.0 / 3.0).abs() < DEDUP_TOL
    }
}

/// `-4 x2 + z2 + (3/r) z2 x2 - 2/3`
pub fn hyperbola(x2: f64, z2: f64, r: f64) -> f64 {
    -4.0 * x2 + z2 + 3.0 / r * z2 * x2 - 2.0 / 3.0
}

/// `2 (x2 + 1/6)^2 + z2^2 - 1/2`
pub fn ellipse(x2: f64, z2: f64) -> f64 {
    2.0 * (x2 + 1.0 / 6.0).powi(2) + z2 * z2 - 0.5
}

/// Monic cubic factor of the fixed-point quartic, highest degree first.
pub fn cubic_factor(r: f64) -> [f64; 4] {
    [1.0, 2.0 / 3.0 * (1.0 - 4.0 * r), -2.0 * r * (1.0 - r), 4.0 * r * r / 3.0]
}

pub fn fixed_point_quartic(r: f64) -> Vec<f64> {
    poly_mul(&[1.0, -2.0 / 3.0], &cubic_factor(r))
}

/// Discriminant of the cubic factor: positive for three distinct real roots,
/// negative for one.
pub fn cubic_discriminant(r: f64) -> f64 {
    let [_, b, c, d] = cubic_factor(r);
    18.0 * b * c * d - 4.0 * b.powi(3) * d + b * b * c * c - 4.0 * c.powi(3) - 27.0 * d * d
}

fn require_positive(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRatio {
            value: r,
            requirement: "finite and > 0",
        })
    }
}

/// Newton on (hyperbola, ellipse); keeps an iterate only if it lowers the
/// residual, so a tangential contact stays where it started.
fn polish(mut x: f64, mut z: f64, r: f64) -> (f64, f64) {
    let res = |x: f64, z: f64| hyperbola(x, z, r).abs().max(ellipse(x, z).abs());
    for _ in 0..50 {
        let (h, e) = (hyperbola(x, z, r), ellipse(x, z));
        let current = h.abs().max(e.abs());
        if current == 0.0 {
            break;
        }
        let (a, b) = (-4.0 + 3.0 * z / r, 1.0 + 3.0 * x / r);
        let (c, d) = (4.0 * (x + 1.0 / 6.0), 2.0 * z);
        let det = a * d - b * c;
        if det == 0.0 {
            break;
        }
        let dx = (d * h - b * e) / det;
        let dz = (a * e - c * h) / det;
        let (nx, nz) = (x - dx, z - dz);
        if res(nx, nz) < current {
            x = nx;
            z = nz;
        } else {
            break;
        }
    }
    (x, z)
}

fn make_point(x2: f64, z2: f64, r: f64) -> FixedPoint {
    FixedPoint {
        r,
        x2,
        z2,
        kind: classify_at(x2, z2, r).0,
        residual_hyperbola: hyperbola(x2, z2, r),
        residual_ellipse: ellipse(x2, z2),
    }
}

/// Every stationary point of the reduced flow at ratio `r`, sorted by
/// `(x2, z2)`. Point A `(0, 2/3)` is always included.
pub fn fixed_points(r: f64) -> Result<Vec<FixedPoint>> {
    require_positive(r)?;
    let mut found: Vec<(f64, f64)> = vec![(0.0, 2.0 / 3.0)];
    for root in poly_roots(&fixed_point_quartic(r)) {
        if root.im.abs() > IMAG_TOL * root.re.abs().max(1.0) {
            continue;
        }
        let z = root.re;
        let q = 0.5 * (0.5 - z * z);
        if q < -CANDIDATE_TOL {
            continue;
        }
        let half_width = q.max(0.0).sqrt();
        for x in [-1.0 / 6.0 - half_width, -1.0 / 6.0 + half_width] {
            if hyperbola(x, z, r).abs() > CANDIDATE_TOL {
                continue;
            }
            let (px, pz) = polish(x, z, r);
            if hyperbola(px, pz, r).abs() > RESIDUAL_TOL || ellipse(px, pz).abs() > RESIDUAL_TOL {
                continue;
            }
            if found
                .iter()
                .all(|&(fx, fz)| (fx - px).hypot(fz - pz) > DEDUP_TOL)
            {
                found.push((px, pz));
            }
        }
    }
    let mut points: Vec<FixedPoint> = found.into_iter().map(|(x, z)| make_point(x, z, r)).collect();
    points.sort_by(|a, b| a.x2.total_cmp(&b.x2).then(a.z2.total_cmp(&b.z2)));
    Ok(points)
}

/// Jacobian of the scaled flow in `(x2, y2, z1, z2)`.
fn flow_jacobian(s: &ReducedState, r: f64) -> Matrix4<f64> {
    let k = 3.0 / r;
    let ReducedState { x2, y2, z2, .. } = *s;
    Matrix4::new(
        0.0, -2.0, 0.0, 0.0,
        3.0 - k * z2, 0.0, 1.0, -1.0 - k * x2,
        0.0, -2.0, 0.0, 0.0,
        k * y2, 1.0 + k * x2, 0.0, 0.0,
    )
}

/// Linearization restricted to the tangent plane of the two constraints.
/// Returns the kind together with the trace and determinant of the 2x2 block.
fn classify_at(x2: f64, z2: f64, r: f64) -> (Stability, f64, f64) {
    let s = ReducedState::on_branch(x2, z2);
    let grads = Matrix2x4::new(
        -1.0, 0.0, 1.0, 0.0,
        4.0 * (x2 + 1.0 / 6.0), 2.0 * s.y2, 0.0, 2.0 * z2,
    );
    let gram = grads * grads.transpose();
    let gram_inv = gram.try_inverse().expect("constraint gradients are independent");
    let projector = Matrix4::identity() - grads.transpose() * gram_inv * grads;
    let eig = SymmetricEigen::new(projector);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let t0 = eig.eigenvectors.column(order[0]).into_owned();
    let t1 = eig.eigenvectors.column(order[1]).into_owned();
    let jac = flow_jacobian(&s, r);
    let (j0, j1) = (jac * &t0, jac * &t1);
    let m = [[t0.dot(&j0), t0.dot(&j1)], [t1.dot(&j0), t1.dot(&j1)]];
    let trace = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let kind = if det.abs() <= MARGINAL_TOL {
        Stability::Marginal
    } else if det > 0.0 {
        Stability::Center
    } else {
        Stability::Saddle
    };
    (kind, trace, det)
}

/// Center (imaginary pair), saddle (real pair) or marginal (zero pair),
/// judged on the two-dimensional flow inside the constraint surface.
pub fn classify(point: &FixedPoint, r: f64) -> Stability {
    classify_at(point.x2, point.z2, r).0
}

/// Squared eigenvalue pair `lambda^2 = -det` of the constrained linearization.
pub fn eigenvalue_squared(point: &FixedPoint, r: f64) -> f64 {
    -classify_at(point.x2, point.z2, r).2
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

/// Ratio at which the cubic factor acquires a double root, creating a
/// saddle-center pair as `r` decreases through it.
pub fn tangency_r() -> Result<f64> {
    let brackets = sign_change_brackets(cubic_discriminant, &grid(0.05, 3.0, 1e-3));
    // the fold is where the discriminant turns from positive (three roots)
    // below to negative (one root) above
    let (lo, hi) = brackets
        .into_iter()
        .filter(|&(lo, _)| cubic_discriminant(lo) > 0.0)
        .next_back()
        .ok_or_else(|| Error::Bracket("no discriminant sign change in (0.05, 3)".into()))?;
    brent(cubic_discriminant, lo, hi, RATIO_XTOL)
}

/// Candidate `u = x2 + r/3` of the double root of `f`, real only where both
/// square roots are.
fn double_root_u(r: f64) -> Option<f64> {
    let c = SolutionCurve::new(r).ok()?;
    let disc = 4.0 * c.a * c.a - 3.0 * c.b;
    if disc < 0.0 {
        return None;
    }
    let u2 = 4.0 * r / 9.0 * (c.a - disc.sqrt());
    (u2 >= 0.0).then(|| u2.sqrt())
}

/// `f` evaluated at the double-root candidate; zero at the critical ratio.
pub fn double_root_condition(r: f64) -> f64 {
    match double_root_u(r) {
        Some(u) => SolutionCurve::new(r).map(|c| c.f_shifted(u)).unwrap_or(f64::NAN),
        None => f64::NAN,
    }
}

fn analytic_critical_r() -> Result<f64> {
    let brackets = sign_change_brackets(double_root_condition, &grid(0.05, 3.0, 1e-3));
    for (lo, hi) in brackets {
        let r = brent(double_root_condition, lo, hi, RATIO_XTOL)?;
        let c = SolutionCurve::new(r)?;
        let u = double_root_u(r).expect("root lies inside the real domain");
        if c.df_shifted(u).abs() < 1e-6 {
            return Ok(r);
        }
    }
    Err(Error::Bracket("double-root condition has no real solution".into()))
}

fn cached_critical_r() -> Result<f64> {
    static CRITICAL: OnceLock<Result<f64>> = OnceLock::new();
    CRITICAL.get_or_init(analytic_critical_r).clone()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalRatio {
    /// Root of the double-root condition on the solution curve.
    pub analytic: f64,
    /// `x2` at which the double root sits.
    pub x2: f64,
    /// Largest grid ratio whose trajectory stays at `x2 < 0`.
    pub sweep_localized: f64,
    /// Smallest grid ratio whose trajectory crosses into `x2 > 0`.
    pub sweep_delocalized: f64,
}

impl CriticalRatio {
    pub fn value(&self) -> f64 {
        self.analytic
    }
}

/// Ratio below which the condensate started in well 3 stays self-trapped.
///
/// The analytic route solves `f = 0, f' = 0` on the closed-form orbit; the
/// result is cross-checked by integrating trajectories on a `1e-3` grid
/// around it and locating the flip of the localization flag.
pub fn critical_r_localization() -> Result<CriticalRatio> {
    let analytic = cached_critical_r()?;
    let u = double_root_u(analytic).expect("root lies inside the real domain");
    let step = 1e-3;
    let lo = ((analytic - 0.03) / step).floor() * step;
    let ratios = grid(lo, lo + 0.06, step);
    let times = uniform_times(DEFAULT_HORIZON, SWEEP_DT)?;
    let maxima: Vec<Result<f64>> = ratios
        .par_iter()
        .map(|&r| semiclassical::integrate(&ReducedState::localized(), r, &times).map(|t| t.max_x2()))
        .collect();
    let mut sweep_localized = f64::NAN;
    let mut sweep_delocalized = f64::NAN;
    for (w, m) in ratios.windows(2).zip(maxima.windows(2)) {
        let (a, b) = (m[0].clone()?, m[1].clone()?);
        if a < 0.0 && b >= 0.0 {
            sweep_localized = w[0];
            sweep_delocalized = w[1];
            break;
        }
    }
    if !(sweep_localized <= analytic && analytic <= sweep_delocalized) {
        return Err(Error::Bracket(format!(
            "trajectory sweep flips in [{sweep_localized}, {sweep_delocalized}], \
             which does not contain the analytic value {analytic}"
        )));
    }
    Ok(CriticalRatio {
        analytic,
        x2: u - analytic / 3.0,
        sweep_localized,
        sweep_delocalized,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Localization {
    Localized,
    Delocalized,
    /// The initial condition sits on the separatrix.
    Boundary,
}

impl Localization {
    pub fn as_str(self) -> &'static str {
        match self {
            Localization::Localized => "localized",
            Localization::Delocalized => "delocalized",
            Localization::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Localization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ratios within this distance of the critical value report [`Localization::Boundary`].
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub r: f64,
    pub fixed_points: Result<Vec<FixedPoint>>,
    /// Largest `x2` reached from the localized initial condition.
    pub max_x2: Result<f64>,
    pub localization: Result<Localization>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub horizon: f64,
    pub entries: Vec<SweepEntry>,
}

fn sweep_entry(r: f64, times: &[f64], critical: Option<f64>) -> SweepEntry {
    let fixed_points = fixed_points(r);
    let max_x2 = semiclassical::integrate(&ReducedState::localized(), r, times).map(|t| t.max_x2());
    let localization = match (&max_x2, critical) {
        (_, Some(c)) if (r - c).abs() <= BOUNDARY_TOL => Ok(Localization::Boundary),
        (Ok(m), _) if *m < 0.0 => Ok(Localization::Localized),
        (Ok(_), _) => Ok(Localization::Delocalized),
        (Err(e), _) => Err(e.clone()),
    };
    SweepEntry {
        r,
        fixed_points,
        max_x2,
        localization,
    }
}

/// Fixed points and the localized-start excursion for each ratio in the grid.
///
/// Entries are independent and computed in parallel; failures are recorded
/// per entry.
pub fn sweep_r(r_grid: &[f64], horizon: f64) -> Result<SweepResult> {
    let times = uniform_times(horizon, SWEEP_DT)?;
    let critical = cached_critical_r().ok();
    let entries = r_grid
        .par_iter()
        .map(|&r| sweep_entry(r, &times, critical))
        .collect();
    Ok(SweepResult { horizon, entries })
}

/// Energy-like constant of the localized initial condition and of `point`.
pub fn energy_gap_to_initial(point: &FixedPoint, r: f64) -> f64 {
    constants_of_motion(&point.state(), r).energy - constants_of_motion(&ReducedState::localized(), r).energy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiclassical::reduced_rhs;
    use approx::assert_relative_eq;

    fn kinds(points: &[FixedPoint]) -> (usize, usize) {
        let centers = points.iter().filter(|p| p.kind == Stability::Center).count();
        let saddles = points.iter().filter(|p| p.kind == Stability::Saddle).count();
        (centers, saddles)
    }

    #[test]
    fn quartic_factorization() {
        // Eliminating x2 by hand gives 9 z^4 - 24 r z^3 + (18 r^2 - 2 r - 4) z^2 + 12 r z - 8 r^2.
        for r in [0.2, 0.507, 1.7] {
            let q = fixed_point_quartic(r);
            let direct = [9.0, -24.0 * r, 18.0 * r * r - 2.0 * r - 4.0, 12.0 * r, -8.0 * r * r];
            for (a, b) in q.iter().zip(direct) {
                assert_relative_eq!(9.0 * a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn strong_coupling_has_two_centers() {
        let pts = fixed_points(1.0).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(kinds(&pts), (2, 0));
        assert!(pts.iter().any(FixedPoint::is_point_a));
        let other = pts.iter().find(|p| !p.is_point_a()).unwrap();
        assert!(other.x2 < 0.0 && other.z2 < 0.0);
    }

    #[test]
    fn below_fold_has_saddle_center_pair() {
        let pts = fixed_points(0.45).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(kinds(&pts), (3, 1));
        let a = pts.iter().find(|p| p.is_point_a()).unwrap();
        assert_eq!(a.kind, Stability::Center);
    }

    #[test]
    fn degenerate_hyperbola_at_one_half() {
        let pts = fixed_points(0.5).unwrap();
        assert_eq!(pts.len(), 4);
        for p in &pts {
            let on_line = (p.z2 - 2.0 / 3.0).abs() < 1e-9 || (p.x2 + 1.0 / 6.0).abs() < 1e-9;
            assert!(on_line, "{p:?}");
        }
    }

    #[test]
    fn residuals_and_stationarity() {
        for r in [0.12, 0.3, 0.41, 0.45, 0.5, 0.505, 0.6, 1.9] {
            for p in fixed_points(r).unwrap() {
                assert!(p.residual_hyperbola.abs() <= RESIDUAL_TOL);
                assert!(p.residual_ellipse.abs() <= RESIDUAL_TOL);
                let d = reduced_rhs(&p.state(), r).unwrap();
                assert!(d.norm() <= 1e-9, "r={r} {p:?}");
            }
        }
    }

    #[test]
    fn point_a_changes_stability_at_four_ninths() {
        let a_kind = |r: f64| {
            fixed_points(r)
                .unwrap()
                .into_iter()
                .find(FixedPoint::is_point_a)
                .unwrap()
                .kind
        };
        assert_eq!(a_kind(0.40), Stability::Saddle);
        assert_eq!(a_kind(0.46), Stability::Center);
        // h'' along the branch is -27/4 + 3/r at A, so the flip is at r = 4/9
        assert_eq!(a_kind(4.0 / 9.0 - 1e-4), Stability::Saddle);
        assert_eq!(a_kind(4.0 / 9.0 + 1e-4), Stability::Center);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(fixed_points(0.0).is_err());
        assert!(fixed_points(-1.0).is_err());
    }

    #[test]
    fn discriminant_changes_sign_at_fold() {
        let rt = tangency_r().unwrap();
        assert!(cubic_discriminant(rt - 1e-3) > 0.0);
        assert!(cubic_discriminant(rt + 1e-3) < 0.0);
        let real_roots = |r: f64| {
            poly_roots(&cubic_factor(r))
                .iter()
                .filter(|z| z.im.abs() < 1e-9)
                .count()
        };
        assert_eq!(real_roots(rt + 1e-3), 1);
        assert_eq!(real_roots(rt - 1e-3), 3);
    }

    #[test]
    fn fold_point_is_marginal() {
        let rt = tangency_r().unwrap();
        let pts = fixed_points(rt).unwrap();
        assert_eq!(pts.len(), 3, "{pts:?}");
        assert_eq!(pts.iter().filter(|p| p.kind == Stability::Marginal).count(), 1);
    }

    #[test]
    fn critical_ratio_analytic() {
        let c = critical_r_localization().unwrap();
        assert!((c.analytic - 1.0 / 3.0).abs() < 1e-9);
        assert!(c.x2.abs() < 1e-6);
        assert!(c.sweep_localized < c.sweep_delocalized);
    }

    #[test]
    fn empty_sweep() {
        let s = sweep_r(&[], 10.0).unwrap();
        assert!(s.entries.is_empty());
    }

    #[test]
    fn sweep_records_per_entry_errors() {
        let s = sweep_r(&[-0.5, 0.6], 5.0).unwrap();
        assert!(s.entries[0].fixed_points.is_err());
        assert!(s.entries[0].localization.is_err());
        assert!(s.entries[1].fixed_points.is_ok());
    }
}
