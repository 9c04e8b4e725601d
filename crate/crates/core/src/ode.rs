//! Dormand–Prince 8(5,3) explicit Runge–Kutta with adaptive step control.
//!
//! Steps are clipped so every requested output time is hit exactly; no dense
//! output is used.

use crate::error::{Error, Result};

// Nodes, unused by the autonomous stepper but kept with the tableau.
#[allow(dead_code)]
const C: [f64; 12] = [
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0,
];

const A: [[f64; 12]; 12] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0],
    [0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0],
    [-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0],
    [2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0],
];

const B: [f64; 12] = [
    0.054293734116568765,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    0.3111643669578199,
    -0.1521609496625161,
    0.20136540080403034,
    0.04471061572777259,
];

const E3: [f64; 12] = [
    -0.18980075407240762,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    -0.4226823213237919,
    -0.1521609496625161,
    0.20136540080403034,
    0.02265179219836082,
];

const E5: [f64; 12] = [
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dop853 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dop853 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

impl Dop853 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// Integrates the autonomous system `dy/dt = rhs(y)` from `y0` at `t = 0`
    /// and returns the state at each entry of `times`.
    ///
    /// `times` must be monotone in one direction away from zero (all
    /// non-negative and increasing, or all non-positive and decreasing).
    pub fn integrate<const D: usize, F>(&self, rhs: F, y0: [f64; D], times: &[f64]) -> Result<Vec<[f64; D]>>
    where
        F: Fn(&[f64; D]) -> [f64; D],
    {
        let Some(&last) = times.last() else {
            return Ok(Vec::new());
        };
        let direction = if last < 0.0 { -1.0 } else { 1.0 };
        if times
            .iter()
            .any(|t| !t.is_finite() || t * direction < 0.0)
            || times.windows(2).any(|w| (w[1] - w[0]) * direction < 0.0)
        {
            return Err(Error::InvalidTimes(
                "output times must be finite and monotone away from t = 0".into(),
            ));
        }

        let mut out = Vec::with_capacity(times.len());
        let mut t = 0.0;
        let mut y = y0;
        let mut f = rhs(&y);
        let mut h_abs = self.initial_step(&rhs, &y, &f, direction);
        let mut steps = 0usize;

        for &target in times {
            while (target - t) * direction > 0.0 {
                steps += 1;
                if steps > self.max_steps {
                    return Err(Error::StepSizeUnderflow { time: t });
                }
                let min_step = 10.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE);
                let mut rejected = false;
                loop {
                    if h_abs < min_step {
                        return Err(Error::StepSizeUnderflow { time: t });
                    }
                    let mut h = h_abs * direction;
                    let clipped = (t + h - target) * direction >= 0.0;
                    if clipped {
                        h = target - t;
                    }
                    let (y_new, f_new, err) = self.step(&rhs, &y, &f, h);
                    if err < 1.0 {
                        let mut factor = if err == 0.0 {
                            MAX_FACTOR
                        } else {
                            (SAFETY * err.powf(ERROR_EXPONENT)).min(MAX_FACTOR)
                        };
                        if rejected {
                            factor = factor.min(1.0);
                        }
                        // A clipped step says nothing about the natural size.
                        if !clipped || h.abs() >= h_abs {
                            h_abs *= factor;
                        }
                        t = if clipped { target } else { t + h };
                        y = y_new;
                        f = f_new;
                        break;
                    }
                    h_abs = h.abs() * (SAFETY * err.powf(ERROR_EXPONENT)).max(MIN_FACTOR);
                    rejected = true;
                }
            }
            out.push(y);
        }
        Ok(out)
    }

    fn initial_step<const D: usize, F>(&self, rhs: &F, y0: &[f64; D], f0: &[f64; D], direction: f64) -> f64
    where
        F: Fn(&[f64; D]) -> [f64; D],
    {
        let scale: Vec<f64> = y0.iter().map(|y| self.atol + y.abs() * self.rtol).collect();
        let rms = |v: &[f64; D]| {
            (v.iter().zip(&scale).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / D as f64).sqrt()
        };
        let d0 = rms(y0);
        let d1 = rms(f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let mut y1 = *y0;
        for i in 0..D {
            y1[i] += h0 * direction * f0[i];
        }
        let f1 = rhs(&y1);
        let mut diff = [0.0; D];
        for i in 0..D {
            diff[i] = f1[i] - f0[i];
        }
        let d2 = rms(&diff) / h0;
        let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
            (1e-6f64).max(h0 * 1e-3)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 8.0)
        };
        (100.0 * h0).min(h1)
    }

    /// One step of size `h`; returns the new state, its derivative and the
    /// scaled error norm.
    fn step<const D: usize, F>(&self, rhs: &F, y: &[f64; D], f: &[f64; D], h: f64) -> ([f64; D], [f64; D], f64)
    where
        F: Fn(&[f64; D]) -> [f64; D],
    {
        let mut k = [[0.0; D]; 12];
        k[0] = *f;
        for s in 1..12 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..D {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = rhs(&ys);
        }
        let mut y_new = *y;
        let mut err5 = [0.0; D];
        let mut err3 = [0.0; D];
        for (s, ks) in k.iter().enumerate() {
            for i in 0..D {
                y_new[i] += h * B[s] * ks[i];
                err5[i] += E5[s] * ks[i];
                err3[i] += E3[s] * ks[i];
            }
        }
        let f_new = rhs(&y_new);
        let (mut e5, mut e3) = (0.0, 0.0);
        for i in 0..D {
            let scale = self.atol + y[i].abs().max(y_new[i].abs()) * self.rtol;
            e5 += (err5[i] / scale).powi(2);
            e3 += (err3[i] / scale).powi(2);
        }
        let err = if e5 == 0.0 && e3 == 0.0 {
            0.0
        } else {
            h.abs() * e5 / ((e5 + 0.01 * e3) * D as f64).sqrt()
        };
        (y_new, f_new, err)
    }
}
