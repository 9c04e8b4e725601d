//! Mean-field dynamics on the manifold reached from `|e1>`.
//!
//! Scaled expectation values `x = <X>/N`, `y = <Y>/N`, `z = <Z>/N`. Starting
//! from the condensate in well 3 the dynamics stays symmetric under swapping
//! wells 1 and 2, which forces `x1 = 0`, `y1 = 0`, `y3 = -y2` and `z3 = z2`
//! for all time, leaving the four variables `(x2, y2, z1, z2)`.
//!
//! Time is `tau = Omega t`; dividing by `Omega` leaves the single parameter
//! `r = Omega / (N chi)`, so the atom number never enters this module.

use crate::dynamics::validate_times;
use crate::error::{Error, Result};
use crate::ode::Dop853;
use crate::series::TimeSeries;

/// Tolerance on the two constraints for accepting an initial condition.
pub const CONSTRAINT_TOL: f64 = 1e-9;
/// Allowed relative drift of the constants of motion along a trajectory.
pub const DRIFT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedState {
    pub x2: f64,
    pub y2: f64,
    pub z1: f64,
    pub z2: f64,
}

impl ReducedState {
    pub fn new(x2: f64, y2: f64, z1: f64, z2: f64) -> Self {
        Self { x2, y2, z1, z2 }
    }

    /// All atoms in well 3: `x2 = -2/3`, every coherence zero.
    pub fn localized() -> Self {
        Self::new(-2.0 / 3.0, 0.0, 0.0, 0.0)
    }

    /// Point on the positive `z1` branch with `y2 = 0` and the given `(x2, z2)`.
    pub fn on_branch(x2: f64, z2: f64) -> Self {
        Self::new(x2, 0.0, x2 + 2.0 / 3.0, z2)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x2, self.y2, self.z1, self.z2]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// `z1 - (x2 + 2/3)`, zero on the branch reachable from `|e1>`.
    pub fn branch_residual(&self) -> f64 {
        self.z1 - (self.x2 + 2.0 / 3.0)
    }

    /// `2 (x2 + 1/6)^2 + y2^2 + z2^2 - 1/2`.
    pub fn sphere_residual(&self) -> f64 {
        2.0 * (self.x2 + 1.0 / 6.0).powi(2) + self.y2 * self.y2 + self.z2 * self.z2 - 0.5
    }

    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn require_positive(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRatio {
            value: r,
            requirement: "finite and > 0 (r = 0 needs the unscaled equations)",
        })
    }
}

fn scaled_rhs(s: &[f64; 4], r: f64) -> [f64; 4] {
    let [x2, y2, z1, z2] = *s;
    let k = 3.0 / r;
    [
        -2.0 * y2,
        3.0 * x2 + z1 - z2 - k * z2 * x2,
        -2.0 * y2,
        y2 + k * x2 * y2,
    ]
}

/// Time derivative with respect to `tau = Omega t`.
pub fn reduced_rhs(state: &ReducedState, r: f64) -> Result<ReducedState> {
    require_positive(r)?;
    Ok(ReducedState::from_array(scaled_rhs(&state.to_array(), r)))
}

/// Time derivative with respect to lab time, with the tunnelling rate and
/// the collective interaction `chi N` kept explicit. Valid for `Omega = 0`.
pub fn unscaled_rhs(state: &ReducedState, big_omega: f64, chi_n: f64) -> ReducedState {
    let ReducedState { x2, y2, z1, z2 } = *state;
    ReducedState::new(
        -2.0 * big_omega * y2,
        big_omega * (3.0 * x2 + z1 - z2) - 3.0 * chi_n * z2 * x2,
        -2.0 * big_omega * y2,
        big_omega * y2 + 3.0 * chi_n * x2 * y2,
    )
}

/// Energy-like and number-like invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// `z1 + 2 z2 + 3 x2^2 / (2r)`: the mean-field energy over `Omega N`.
    pub energy: f64,
    /// `3 x2^2 + 2 (y2^2 + z2^2) + z1^2`, equal to 4/3 on physical states.
    pub number: f64,
}

/// Both invariants at `state`; `r` must be positive for the energy to be finite.
pub fn constants_of_motion(state: &ReducedState, r: f64) -> Constants {
    let ReducedState { x2, y2, z1, z2 } = *state;
    Constants {
        energy: z1 + 2.0 * z2 + 1.5 * x2 * x2 / r,
        number: 3.0 * x2 * x2 + 2.0 * (y2 * y2 + z2 * z2) + z1 * z1,
    }
}

fn relative_drift(value: f64, reference: f64) -> f64 {
    let d = (value - reference).abs();
    if reference.abs() > 1e-12 {
        d / reference.abs()
    } else {
        d
    }
}

/// Integrated trajectory plus conservation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub r: f64,
    pub times: Vec<f64>,
    pub states: Vec<ReducedState>,
    pub max_energy_drift: f64,
    pub max_number_drift: f64,
}

impl Trajectory {
    pub fn x2(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.x2).collect()
    }

    pub fn max_x2(&self) -> f64 {
        self.states.iter().map(|s| s.x2).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_x2(&self) -> f64 {
        self.states.iter().map(|s| s.x2).fold(f64::INFINITY, f64::min)
    }

    /// Columns `x2, y2, z1, z2` against `tau`.
    pub fn to_series(&self) -> TimeSeries {
        let rows: Vec<Vec<f64>> = self.states.iter().map(|s| s.to_array().to_vec()).collect();
        TimeSeries::from_rows(
            self.times.clone(),
            ["x2", "y2", "z1", "z2"].map(String::from).to_vec(),
            &rows,
        )
        .expect("trajectory times are validated on construction")
    }
}

fn check_constraints(initial: &ReducedState) -> Result<()> {
    let branch = initial.branch_residual();
    if branch.abs() > CONSTRAINT_TOL {
        return Err(Error::ConstraintViolation {
            constraint: "z1 = x2 + 2/3",
            residual: branch,
        });
    }
    let sphere = initial.sphere_residual();
    if sphere.abs() > CONSTRAINT_TOL {
        return Err(Error::ConstraintViolation {
            constraint: "2(x2 + 1/6)^2 + y2^2 + z2^2 = 1/2",
            residual: sphere,
        });
    }
    Ok(())
}

/// Integrates the scaled system at ratio `r`, sampling at `times` (`tau >= 0`,
/// strictly increasing). Fails if either invariant drifts by more than
/// [`DRIFT_TOL`] relative, naming the first offending time.
pub fn integrate(initial: &ReducedState, r: f64, times: &[f64]) -> Result<Trajectory> {
    integrate_with(initial, r, times, 1.0, &Dop853::default())
}

/// Like [`integrate`] for a tunnelling rate of sign `omega_sign`: the output
/// `tau = |Omega| t` while the equations run in `Omega t = sign * tau`.
pub fn integrate_with(
    initial: &ReducedState,
    r: f64,
    times: &[f64],
    omega_sign: f64,
    solver: &Dop853,
) -> Result<Trajectory> {
    require_positive(r)?;
    check_constraints(initial)?;
    validate_times(times)?;
    let sign = if omega_sign < 0.0 { -1.0 } else { 1.0 };
    let signed: Vec<f64> = times.iter().map(|t| sign * t).collect();
    let raw = solver.integrate(|s| scaled_rhs(s, r), initial.to_array(), &signed)?;
    let states: Vec<ReducedState> = raw.into_iter().map(ReducedState::from_array).collect();

    let c0 = constants_of_motion(initial, r);
    let mut max_energy_drift: f64 = 0.0;
    let mut max_number_drift: f64 = 0.0;
    for (t, s) in times.iter().zip(&states) {
        let c = constants_of_motion(s, r);
        let de = relative_drift(c.energy, c0.energy);
        let dn = relative_drift(c.number, c0.number);
        if de > DRIFT_TOL {
            return Err(Error::ToleranceViolation {
                quantity: "energy",
                time: *t,
                drift: de,
            });
        }
        if dn > DRIFT_TOL {
            return Err(Error::ToleranceViolation {
                quantity: "number",
                time: *t,
                drift: dn,
            });
        }
        max_energy_drift = max_energy_drift.max(de);
        max_number_drift = max_number_drift.max(dn);
    }
    Ok(Trajectory {
        r,
        times: times.to_vec(),
        states,
        max_energy_drift,
        max_number_drift,
    })
}

/// Integrates the unscaled equations in lab time; the only route for `Omega = 0`.
pub fn integrate_unscaled(initial: &ReducedState, big_omega: f64, chi_n: f64, times: &[f64]) -> Result<Vec<ReducedState>> {
    validate_times(times)?;
    let raw = Dop853::default().integrate(
        |s| unscaled_rhs(&ReducedState::from_array(*s), big_omega, chi_n).to_array(),
        initial.to_array(),
        times,
    )?;
    Ok(raw.into_iter().map(ReducedState::from_array).collect())
}

/// `a(r) = -4r/3 + (r - 2)^2 / (12 r)`.
pub fn integration_constant_a(r: f64) -> f64 {
    -4.0 * r / 3.0 + (r - 2.0).powi(2) / (12.0 * r)
}

/// `B(r) = (4r/3)^2 - (2/9)(2r - 1)(r - 2)`.
pub fn integration_constant_b(r: f64) -> f64 {
    (4.0 * r / 3.0).powi(2) - 2.0 / 9.0 * (2.0 * r - 1.0) * (r - 2.0)
}

/// Closed-form orbit through the localized initial condition at ratio `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionCurve {
    pub r: f64,
    pub a: f64,
    pub b: f64,
}

impl SolutionCurve {
    pub fn new(r: f64) -> Result<Self> {
        require_positive(r)?;
        Ok(Self {
            r,
            a: integration_constant_a(r),
            b: integration_constant_b(r),
        })
    }

    pub fn z1(&self, x2: f64) -> f64 {
        x2 + 2.0 / 3.0
    }

    pub fn z2(&self, x2: f64) -> f64 {
        -x2 / 2.0 - 3.0 * x2 * x2 / (4.0 * self.r) + (-1.0 / 3.0 + 1.0 / (3.0 * self.r))
    }

    /// `y2^2` as a function of `x2`.
    pub fn f(&self, x2: f64) -> f64 {
        self.f_shifted(x2 + self.r / 3.0)
    }

    /// `f` in the shifted coordinate `u = x2 + r/3`.
    pub fn f_shifted(&self, u: f64) -> f64 {
        let r = self.r;
        -(self.a - 3.0 * u * u / (4.0 * r)).powi(2) + 2.0 * u / 3.0 * (2.0 * r - 1.0) + self.b
    }

    /// `df/du`.
    pub fn df_shifted(&self, u: f64) -> f64 {
        let r = self.r;
        3.0 * u / r * (self.a - 3.0 * u * u / (4.0 * r)) + 2.0 / 3.0 * (2.0 * r - 1.0)
    }
}
