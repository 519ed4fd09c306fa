//! The catalog of fundamental-function candidates.
//!
//! Three analytic families plus a table variant for negative controls:
//! powers `t^a`, the Zygmund-type `log^{-1/p}(e/t)`, and the associate
//! ratio `t/φ(t)`. Derivatives are supplied in closed form per variant;
//! nothing is differentiated numerically.
//!
//! Quasi-concavity (φ increasing, `φ(t)/t` decreasing, `φ(0+) = 0`) is
//! probed on a log grid and reported, never assumed: the log family with
//! `p < 1` genuinely violates the `φ(t)/t` condition near `t = 1` and
//! still participates in every variation computation, which only needs
//! monotonicity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::EndBehavior;

/// Fundamental-function candidate on `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuasiConcave {
    /// `t^a`, `0 < a <= 1`.
    Power { a: f64 },
    /// `log^{-1/p}(e/t)`, `p > 0`.
    Log { p: f64 },
    /// `t / base(t)`, the associate-space ratio.
    Ratio { base: Box<QuasiConcave> },
    /// Piecewise-linear table through `(grid[i], values[i])`; mainly a
    /// vehicle for validation counterexamples.
    Table { grid: Vec<f64>, values: Vec<f64> },
}

impl QuasiConcave {
    pub fn power(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::invalid("power phi: need a in (0,1]"));
        }
        Ok(QuasiConcave::Power { a })
    }

    pub fn log(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::invalid("log phi: need p > 0"));
        }
        Ok(QuasiConcave::Log { p })
    }

    pub fn ratio(base: QuasiConcave) -> Self {
        QuasiConcave::Ratio { base: Box::new(base) }
    }

    pub fn table(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(Error::invalid("table phi: need matching grid/values, len >= 2"));
        }
        if grid[0] != 0.0 || *grid.last().unwrap() != 1.0 {
            return Err(Error::invalid("table phi: grid must span [0,1]"));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("table phi: grid must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("table phi: values must be finite and nonnegative"));
        }
        Ok(QuasiConcave::Table { grid, values })
    }

    pub fn name(&self) -> String {
        match self {
            QuasiConcave::Power { a } => format!("power({a})"),
            QuasiConcave::Log { p } => format!("log({p})"),
            QuasiConcave::Ratio { base } => format!("ratio({})", base.name()),
            QuasiConcave::Table { grid, .. } => format!("table({} pts)", grid.len()),
        }
    }

    /// `φ(t)` for `t in [0,1]`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            QuasiConcave::Power { a } => {
                if t <= 0.0 {
                    0.0
                } else {
                    t.powf(*a)
                }
            }
            QuasiConcave::Log { p } => {
                if t <= 0.0 {
                    0.0
                } else {
                    (std::f64::consts::E / t).ln().powf(-1.0 / p)
                }
            }
            QuasiConcave::Ratio { base } => {
                if t <= 0.0 {
                    // limit of t/φ(t); nonzero only in the degenerate
                    // φ(t) ~ t case
                    let s = 1e-300;
                    let b = base.eval(s);
                    if b > 0.0 {
                        let v = s / b;
                        if v > 0.5 {
                            v
                        } else {
                            0.0
                        }
                    } else {
                        0.0
                    }
                } else {
                    let b = base.eval(t);
                    if b > 0.0 {
                        t / b
                    } else {
                        0.0
                    }
                }
            }
            QuasiConcave::Table { grid, values } => {
                if t <= 0.0 {
                    return values[0];
                }
                if t >= 1.0 {
                    return *values.last().unwrap();
                }
                let i = match grid.binary_search_by(|g| g.partial_cmp(&t).unwrap()) {
                    Ok(i) => return values[i],
                    Err(i) => i - 1,
                };
                let w = (t - grid[i]) / (grid[i + 1] - grid[i]);
                values[i] * (1.0 - w) + values[i + 1] * w
            }
        }
    }

    /// `φ'(t)` in closed form (one-sided limits at kinks; the table
    /// variant returns segment slopes).
    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            QuasiConcave::Power { a } => {
                if t <= 0.0 {
                    f64::INFINITY
                } else {
                    a * t.powf(a - 1.0)
                }
            }
            QuasiConcave::Log { p } => {
                if t <= 0.0 {
                    0.0
                } else {
                    let l = (std::f64::consts::E / t).ln();
                    (1.0 / p) * l.powf(-1.0 / p - 1.0) / t
                }
            }
            QuasiConcave::Ratio { base } => {
                // d/dt [t/φ] = (φ - t φ')/φ^2
                if t <= 0.0 {
                    return f64::INFINITY;
                }
                let b = base.eval(t);
                if b <= 0.0 {
                    return 0.0;
                }
                (b - t * base.deriv(t)) / (b * b)
            }
            QuasiConcave::Table { grid, values } => {
                let t = t.clamp(0.0, 1.0);
                let mut i = grid.partition_point(|g| *g <= t);
                i = i.clamp(1, grid.len() - 1);
                (values[i] - values[i - 1]) / (grid[i] - grid[i - 1])
            }
        }
    }

    /// Leading behavior of `φ` at 0.
    pub fn class0(&self) -> EndBehavior {
        match self {
            QuasiConcave::Power { a } => EndBehavior::PowerLog { exp: *a, logpow: 0.0 },
            QuasiConcave::Log { p } => EndBehavior::PowerLog { exp: 0.0, logpow: -1.0 / p },
            QuasiConcave::Ratio { base } => match base.class0() {
                EndBehavior::PowerLog { exp, logpow } => {
                    EndBehavior::PowerLog { exp: 1.0 - exp, logpow: -logpow }
                }
                _ => EndBehavior::Regular,
            },
            QuasiConcave::Table { values, .. } => {
                if values[0] > 0.0 {
                    EndBehavior::Regular
                } else {
                    EndBehavior::PowerLog { exp: 1.0, logpow: 0.0 }
                }
            }
        }
    }

    /// Leading behavior of `φ'` at 0, with its coefficient:
    /// `φ'(t) ~ c t^exp log^logpow(1/t)`.
    pub fn deriv_leading0(&self) -> (f64, EndBehavior) {
        match self {
            QuasiConcave::Power { a } => {
                (*a, EndBehavior::PowerLog { exp: a - 1.0, logpow: 0.0 })
            }
            QuasiConcave::Log { p } => (
                1.0 / p,
                EndBehavior::PowerLog { exp: -1.0, logpow: -1.0 / p - 1.0 },
            ),
            QuasiConcave::Ratio { base } => match base.class0() {
                EndBehavior::PowerLog { exp, logpow } if exp < 1.0 - 1e-9 => {
                    // φ ~ c t^e L^m  ⟹  ψ' ~ (1-e)/c · t^{-e} L^{-m}
                    let c0 = base.leading_coeff0();
                    ((1.0 - exp) / c0, EndBehavior::PowerLog { exp: -exp, logpow: -logpow })
                }
                // degenerate φ ~ t: the ratio is asymptotically constant
                _ => (0.0, EndBehavior::Zero),
            },
            QuasiConcave::Table { grid, values } => {
                let slope = (values[1] - values[0]) / (grid[1] - grid[0]);
                (slope, EndBehavior::Regular)
            }
        }
    }

    /// Coefficient of the leading term of `φ` at 0 (1 for the analytic
    /// catalog, table slope otherwise).
    fn leading_coeff0(&self) -> f64 {
        match self {
            QuasiConcave::Power { .. } | QuasiConcave::Log { .. } => 1.0,
            QuasiConcave::Ratio { base } => 1.0 / base.leading_coeff0(),
            QuasiConcave::Table { grid, values } => {
                ((values[1] - values[0]) / (grid[1] - grid[0])).max(1e-300)
            }
        }
    }

    /// Structural validation after deserialization.
    pub fn validate_shape(&self) -> Result<()> {
        match self {
            QuasiConcave::Power { a } => Self::power(*a).map(|_| ()),
            QuasiConcave::Log { p } => Self::log(*p).map(|_| ()),
            QuasiConcave::Ratio { base } => base.validate_shape(),
            QuasiConcave::Table { grid, values } => {
                Self::table(grid.clone(), values.clone()).map(|_| ())
            }
        }
    }
}

/// One probe violation: which property broke, and where.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiViolation {
    pub property: String,
    pub t: f64,
    pub detail: String,
}

/// Result of the quasi-concavity probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiReport {
    pub ok: bool,
    pub concave: bool,
    pub violations: Vec<PhiViolation>,
}

const PROBE_POINTS: usize = 256;

fn probe_grid(n: usize, lo: f64) -> Vec<f64> {
    let ratio = (1.0 / lo).powf(1.0 / (n - 1) as f64);
    let mut ts = Vec::with_capacity(n);
    let mut t = lo;
    for _ in 0..n {
        ts.push(t.min(1.0));
        t *= ratio;
    }
    *ts.last_mut().unwrap() = 1.0;
    ts
}

/// Probes `φ` increasing, `φ(t)/t` decreasing and `φ(0+) = 0` on a
/// 256-point log grid, plus concavity via difference quotients. Reports
/// every violation with its location.
pub fn validate_phi(phi: &QuasiConcave) -> PhiReport {
    let ts = probe_grid(PROBE_POINTS, 1e-8);
    let mut violations = Vec::new();
    let slack = 1e-12;

    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let (v0, v1) = (phi.eval(t0), phi.eval(t1));
        if v1 < v0 * (1.0 - 1e-12) - slack {
            violations.push(PhiViolation {
                property: "increasing".into(),
                t: t1,
                detail: format!("phi({t0}) = {v0} > phi({t1}) = {v1}"),
            });
        }
        let (q0, q1) = (v0 / t0, v1 / t1);
        if q1 > q0 * (1.0 + 1e-12) + slack {
            violations.push(PhiViolation {
                property: "phi(t)/t decreasing".into(),
                t: t1,
                detail: format!("phi/t rises from {q0} to {q1}"),
            });
        }
    }

    // φ(0+) = 0 in the limit sense, probed on a decreasing grid. The log
    // family vanishes only logarithmically, so the probe checks for a
    // monotone decay by a solid factor rather than absolute smallness.
    let initial = phi.eval(1e-8);
    let mut vanishes = initial <= 0.0;
    let mut t = 1e-8;
    let mut last = initial;
    if !vanishes {
        for _ in 0..40 {
            t *= 1e-2;
            let v = phi.eval(t);
            if v > last * (1.0 + 1e-9) + slack {
                break;
            }
            last = v;
            if v < 1e-9 || v <= 0.25 * initial {
                vanishes = true;
                break;
            }
        }
    }
    if !vanishes {
        violations.push(PhiViolation {
            property: "phi(0+) = 0".into(),
            t: 0.0,
            detail: format!("phi does not vanish along t -> 0 (reached {last})"),
        });
    }

    // concavity: nonincreasing difference quotients
    let mut concave = true;
    let mut prev_q: Option<f64> = None;
    for w in ts.windows(2) {
        let q = (phi.eval(w[1]) - phi.eval(w[0])) / (w[1] - w[0]);
        if let Some(pq) = prev_q {
            if q > pq * (1.0 + 1e-9) + slack {
                if concave {
                    violations.push(PhiViolation {
                        property: "concavity".into(),
                        t: w[0],
                        detail: format!("difference quotient rises from {pq} to {q}"),
                    });
                }
                concave = false;
            }
        }
        prev_q = Some(q);
    }

    let ok = violations.iter().all(|v| v.property == "concavity");
    PhiReport { ok, concave, violations }
}

/// Lower and upper dilation indices with their estimation spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationIndices {
    pub gamma: f64,
    pub delta: f64,
    /// Spread of the last three slope estimates (max over both indices).
    pub spread: f64,
    /// False when the slopes did not stabilize to within 0.02.
    pub stable: bool,
}

const DILATION_S_POINTS: usize = 200;

fn dilation_ks() -> Vec<u32> {
    let mut ks: Vec<u32> = (4..=20).collect();
    ks.extend_from_slice(&[28, 40, 56, 80, 112, 160, 224, 320, 448, 640, 896]);
    ks
}

/// Estimates `γ_φ` and `δ_φ` from the defining limits: slopes
/// `log(sup_s φ(st)/φ(s)) / log t` along `t = 2^∓k`, extrapolated by the
/// median of the last three values. The limits converge only
/// logarithmically for the log family, hence the deep `k` schedule.
pub fn dilation_indices(phi: &QuasiConcave) -> DilationIndices {
    let ks = dilation_ks();
    let ln2 = std::f64::consts::LN_2;

    let gamma_slope = |k: u32| -> f64 {
        let t = 0.5f64.powi(k as i32);
        let ss = probe_grid(DILATION_S_POINTS, 1e-20);
        let mut sup: f64 = 0.0;
        for s in &ss {
            let denom = phi.eval(*s);
            if denom > 0.0 {
                sup = sup.max(phi.eval(s * t) / denom);
            }
        }
        (sup.ln() / (-(k as f64) * ln2)).clamp(0.0, 1.0)
    };

    let delta_slope = |k: u32| -> f64 {
        // sup over 0 < s <= 2^-k of φ(s·2^k)/φ(s)
        let smax = 0.5f64.powi(k as i32);
        let ss = probe_grid(DILATION_S_POINTS, 1e-18);
        let mut sup: f64 = 0.0;
        for frac in &ss {
            let s = smax * frac;
            let denom = phi.eval(s);
            if denom > 0.0 {
                sup = sup.max(phi.eval(s / smax) / denom);
            }
        }
        (sup.ln() / ((k as f64) * ln2)).clamp(0.0, 1.0)
    };

    let g_slopes: Vec<f64> = crate::par::map(&ks, |k| gamma_slope(*k));
    let d_slopes: Vec<f64> = crate::par::map(&ks, |k| delta_slope(*k));

    let last3 = |xs: &[f64]| -> (f64, f64) {
        let n = xs.len();
        let mut tail = [xs[n - 3], xs[n - 2], xs[n - 1]];
        tail.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (tail[1], tail[2] - tail[0])
    };
    let (gamma, g_spread) = last3(&g_slopes);
    let (delta, d_spread) = last3(&d_slopes);
    let spread = g_spread.max(d_spread);
    let stable = spread <= 0.02;

    // enforce 0 <= gamma <= delta <= 1
    let gamma = gamma.min(delta);
    DilationIndices { gamma, delta, spread, stable }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_phi_validates() {
        let phi = QuasiConcave::power(0.5).unwrap();
        let rep = validate_phi(&phi);
        assert!(rep.ok, "{:?}", rep.violations);
        assert!(rep.concave);
    }

    #[test]
    fn log_phi_p1_validates() {
        let phi = QuasiConcave::log(1.0).unwrap();
        let rep = validate_phi(&phi);
        assert!(rep.ok, "{:?}", rep.violations);
    }

    #[test]
    fn log_phi_small_p_fails_quasiconcavity_near_one() {
        // for p < 1 the ratio phi(t)/t genuinely rises near t = 1
        let phi = QuasiConcave::log(0.5).unwrap();
        let rep = validate_phi(&phi);
        assert!(!rep.ok);
        assert!(rep
            .violations
            .iter()
            .any(|v| v.property == "phi(t)/t decreasing" && v.t > 0.3));
    }

    #[test]
    fn non_monotone_table_is_rejected_at_its_dip() {
        let phi = QuasiConcave::table(
            vec![0.0, 0.25, 0.5, 0.75, 1.0],
            vec![0.0, 0.5, 0.3, 0.8, 1.0],
        )
        .unwrap();
        let rep = validate_phi(&phi);
        assert!(!rep.ok);
        assert!(rep.violations.iter().any(|v| v.property == "increasing"));
    }

    #[test]
    fn ratio_of_sqrt_is_sqrt() {
        let psi = QuasiConcave::ratio(QuasiConcave::power(0.5).unwrap());
        for t in [0.01, 0.1, 0.5, 1.0] {
            assert!((psi.eval(t) - t.sqrt()).abs() < 1e-14);
        }
        // derivative matches t^{1/2} derivative
        for t in [0.01, 0.1, 0.5] {
            assert!((psi.deriv(t) - 0.5 * t.powf(-0.5)).abs() < 1e-10);
        }
    }

    #[test]
    fn double_ratio_recovers_phi() {
        let phi = QuasiConcave::power(0.3).unwrap();
        let back = QuasiConcave::ratio(QuasiConcave::ratio(phi.clone()));
        for t in [0.001, 0.1, 0.7, 1.0] {
            assert!((back.eval(t) - phi.eval(t)).abs() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn dilation_power() {
        for a in [0.25, 0.5, 0.75] {
            let phi = QuasiConcave::power(a).unwrap();
            let di = dilation_indices(&phi);
            assert!(di.stable);
            assert!((di.gamma - a).abs() <= 0.02, "gamma {} vs {a}", di.gamma);
            assert!((di.delta - a).abs() <= 0.02, "delta {} vs {a}", di.delta);
            assert!(di.gamma <= di.delta);
        }
    }

    #[test]
    fn dilation_log_family_is_zero() {
        let phi = QuasiConcave::log(1.0).unwrap();
        let di = dilation_indices(&phi);
        assert!(di.stable, "spread {}", di.spread);
        assert!(di.gamma <= 0.02, "gamma {}", di.gamma);
        assert!(di.delta <= 0.02, "delta {}", di.delta);
    }

    #[test]
    fn dilation_ratio_of_sqrt() {
        let psi = QuasiConcave::ratio(QuasiConcave::power(0.5).unwrap());
        let di = dilation_indices(&psi);
        assert!((di.gamma - 0.5).abs() <= 0.02);
        assert!((di.delta - 0.5).abs() <= 0.02);
    }

    #[test]
    fn deriv_matches_finite_differences() {
        let phis = [
            QuasiConcave::power(0.5).unwrap(),
            QuasiConcave::log(2.0).unwrap(),
            QuasiConcave::ratio(QuasiConcave::log(2.0).unwrap()),
        ];
        for phi in &phis {
            for t in [0.05, 0.2, 0.6, 0.9] {
                let h = 1e-6;
                let fd = (phi.eval(t + h) - phi.eval(t - h)) / (2.0 * h);
                let d = phi.deriv(t);
                assert!(
                    (fd - d).abs() <= 1e-5 * d.abs().max(1.0),
                    "{} at {t}: {fd} vs {d}",
                    phi.name()
                );
            }
        }
    }
}
