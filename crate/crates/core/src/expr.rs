//! A closed algebra of nonnegative measurable functions on `[0,1]`.
//!
//! The catalog covers step functions, power laws `c*t^a`, the logarithmic
//! kernel `c*log(1/t)`, shifted reciprocals `1/(t+y)`, hyperbolic pieces
//! `a + b/x` on a window (the exact image of step functions under Cesaro
//! averaging), mirrored power laws `c*(1-t)^a`, and sums, scalings and
//! restrictions of all of these. `Sampled` is the piecewise-constant
//! fallback for anything the catalog cannot express exactly; it always
//! carries an explicit "approximate" provenance so exact and sampled data
//! are never conflated.
//!
//! Interval conventions: cells and windows are half-open `[lo, hi)`,
//! except that a window ending at 1 includes the right endpoint. All of
//! the measure-theoretic operations are insensitive to this choice; it
//! only pins down pointwise probes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monotonicity tag carried by sampled data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotone {
    #[default]
    Unknown,
    Decreasing,
    Increasing,
}

/// Symbolic-numeric function expression on `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionExpr {
    /// Piecewise constant: `values[k]` on `[breaks[k], breaks[k+1])`.
    Step { breaks: Vec<f64>, values: Vec<f64> },
    /// `c * t^a`. Singular at 0 when `a < 0`.
    Power { c: f64, a: f64 },
    /// `c * log(1/t)`. Singular at 0.
    LogRecip { c: f64 },
    /// `t -> 1/(t+y)` on `[0, 1-y]`, zero beyond.
    ShiftedRecip { y: f64 },
    /// `x -> a + b/x` on `[lo, hi)`, zero elsewhere.
    Hyperbolic { a: f64, b: f64, lo: f64, hi: f64 },
    /// `x -> c · log(top/x)` on `[lo, hi)` with `hi <= top`, zero
    /// elsewhere (the shape of tail integrals of step functions against
    /// `dt/t`).
    LogWindow { c: f64, top: f64, lo: f64, hi: f64 },
    /// `c * (1-t)^a`. Singular at 1 when `a < 0`.
    MirroredPower { c: f64, a: f64 },
    Sum { terms: Vec<FunctionExpr> },
    Scale { k: f64, f: Box<FunctionExpr> },
    Restrict { f: Box<FunctionExpr>, lo: f64, hi: f64 },
    /// Point samples on a grid (`values.len() == breaks.len()`), read as
    /// the piecewise-constant left-value interpolant: `values[k]` on
    /// `[breaks[k], breaks[k+1])` and `values[n]` at the last grid point.
    /// Always approximate by construction; `divergent` marks the
    /// everywhere-infinite result of averaging a non-integrable input.
    Sampled {
        breaks: Vec<f64>,
        values: Vec<f64>,
        #[serde(default)]
        monotone: Monotone,
        #[serde(default)]
        divergent: bool,
    },
}

/// Leading behavior of an expression at a domain endpoint, expressed in
/// the distance `u` to that endpoint: `~ C * u^exp * log(1/u)^logpow`
/// with `C > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndBehavior {
    /// Identically zero on a neighborhood of the endpoint.
    Zero,
    /// Bounded with positive limsup (equivalent to `PowerLog(0,0)` for
    /// integrability purposes).
    Regular,
    PowerLog { exp: f64, logpow: f64 },
    Unknown,
}

/// Domain endpoint selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Zero,
    One,
}

/// Three-valued integrability verdict near an endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tri {
    Yes,
    No,
    Maybe,
}

const EXP_EPS: f64 = 1e-9;

impl EndBehavior {
    /// Is `∫_0 u^exp log^logpow(1/u) du` finite?
    pub fn integrable(&self) -> Tri {
        match self {
            EndBehavior::Zero | EndBehavior::Regular => Tri::Yes,
            EndBehavior::Unknown => Tri::Maybe,
            EndBehavior::PowerLog { exp, logpow } => {
                if *exp > -1.0 + EXP_EPS {
                    Tri::Yes
                } else if *exp < -1.0 - EXP_EPS {
                    Tri::No
                } else if *logpow < -1.0 - EXP_EPS {
                    Tri::Yes
                } else {
                    Tri::No
                }
            }
        }
    }

    /// Is the function unbounded at the endpoint?
    pub fn unbounded(&self) -> Tri {
        match self {
            EndBehavior::Zero | EndBehavior::Regular => Tri::No,
            EndBehavior::Unknown => Tri::Maybe,
            EndBehavior::PowerLog { exp, logpow } => {
                if *exp < -EXP_EPS || (exp.abs() <= EXP_EPS && *logpow > EXP_EPS) {
                    Tri::Yes
                } else {
                    Tri::No
                }
            }
        }
    }

    /// Behavior of a pointwise product. `Regular` factors are assumed to
    /// have positive limit, which holds throughout this crate: classes are
    /// only attached to strictly positive leading terms.
    pub fn product(&self, other: &EndBehavior) -> EndBehavior {
        use EndBehavior::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Unknown, _) | (_, Unknown) => Unknown,
            (Regular, x) | (x, Regular) => *x,
            (PowerLog { exp: e1, logpow: m1 }, PowerLog { exp: e2, logpow: m2 }) => {
                PowerLog { exp: e1 + e2, logpow: m1 + m2 }
            }
        }
    }

    /// Behavior of a sum of nonnegative terms: the more singular side
    /// dominates.
    pub fn sum(&self, other: &EndBehavior) -> EndBehavior {
        use EndBehavior::*;
        match (self, other) {
            (Zero, x) | (x, Zero) => *x,
            // A certified blow-up survives an unknown sibling (terms are
            // nonnegative), anything else does not.
            (Unknown, x) | (x, Unknown) => {
                if x.unbounded() == Tri::Yes && x.integrable() == Tri::No {
                    *x
                } else {
                    Unknown
                }
            }
            (Regular, PowerLog { exp, logpow }) | (PowerLog { exp, logpow }, Regular) => {
                if *exp < -EXP_EPS || (exp.abs() <= EXP_EPS && *logpow > 0.0) {
                    PowerLog { exp: *exp, logpow: *logpow }
                } else {
                    Regular
                }
            }
            (Regular, Regular) => Regular,
            (PowerLog { exp: e1, logpow: m1 }, PowerLog { exp: e2, logpow: m2 }) => {
                if *e1 < e2 - EXP_EPS || ((e1 - e2).abs() <= EXP_EPS && m1 >= m2) {
                    PowerLog { exp: *e1, logpow: *m1 }
                } else {
                    PowerLog { exp: *e2, logpow: *m2 }
                }
            }
        }
    }
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl FunctionExpr {
    // ------------------------------------------------------------------
    // constructors
    // ------------------------------------------------------------------

    pub fn step(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() < 2 || values.len() + 1 != breaks.len() {
            return Err(Error::invalid("step: need n+1 breaks for n cells"));
        }
        if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
            return Err(Error::invalid("step: breaks must start at 0 and end at 1"));
        }
        if !strictly_increasing(&breaks) {
            return Err(Error::invalid("step: breaks must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("step: values must be finite and nonnegative"));
        }
        Ok(FunctionExpr::Step { breaks, values })
    }

    pub fn constant(v: f64) -> Result<Self> {
        Self::step(vec![0.0, 1.0], vec![v])
    }

    /// Indicator of `[lo, hi)` as a step function.
    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
            return Err(Error::invalid("indicator: need 0 <= lo < hi <= 1"));
        }
        let mut breaks = vec![0.0];
        let mut values = vec![];
        if lo > 0.0 {
            breaks.push(lo);
            values.push(0.0);
        }
        values.push(1.0);
        if hi < 1.0 {
            breaks.push(hi);
            values.push(0.0);
        }
        breaks.push(1.0);
        Ok(FunctionExpr::Step { breaks, values })
    }

    pub fn power(c: f64, a: f64) -> Result<Self> {
        if !c.is_finite() || c < 0.0 || !a.is_finite() {
            return Err(Error::invalid("power: need finite c >= 0 and finite a"));
        }
        Ok(FunctionExpr::Power { c, a })
    }

    pub fn log_recip(c: f64) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::invalid("log_recip: need finite c >= 0"));
        }
        Ok(FunctionExpr::LogRecip { c })
    }

    pub fn shifted_recip(y: f64) -> Result<Self> {
        if !(y > 0.0 && y <= 1.0) {
            return Err(Error::invalid("shifted_recip: need y in (0,1]"));
        }
        Ok(FunctionExpr::ShiftedRecip { y })
    }

    pub fn hyperbolic(a: f64, b: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
            return Err(Error::invalid("hyperbolic: need 0 <= lo < hi <= 1"));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid("hyperbolic: coefficients must be finite"));
        }
        // a + b/x >= 0 on [lo,hi): monotone in x, check both window ends.
        let at_hi = a + if b == 0.0 { 0.0 } else { b / hi };
        let at_lo = if lo == 0.0 {
            if b < 0.0 { f64::NEG_INFINITY } else { a.max(at_hi) }
        } else {
            a + b / lo
        };
        if at_lo < -1e-12 || at_hi < -1e-12 {
            return Err(Error::invalid("hyperbolic: a + b/x negative on window"));
        }
        Ok(FunctionExpr::Hyperbolic { a, b, lo, hi })
    }

    pub fn mirrored_power(c: f64, a: f64) -> Result<Self> {
        if !c.is_finite() || c < 0.0 || !a.is_finite() {
            return Err(Error::invalid("mirrored_power: need finite c >= 0 and finite a"));
        }
        Ok(FunctionExpr::MirroredPower { c, a })
    }

    pub fn log_window(c: f64, top: f64, lo: f64, hi: f64) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::invalid("log_window: need finite c >= 0"));
        }
        if !(top > 0.0 && top <= 1.0) || !(0.0..=1.0).contains(&lo) || lo >= hi || hi > top {
            return Err(Error::invalid("log_window: need 0 <= lo < hi <= top <= 1"));
        }
        Ok(FunctionExpr::LogWindow { c, top, lo, hi })
    }

    pub fn sum(terms: Vec<FunctionExpr>) -> Self {
        FunctionExpr::Sum { terms }
    }

    pub fn scale(k: f64, f: FunctionExpr) -> Result<Self> {
        if !k.is_finite() || k < 0.0 {
            return Err(Error::invalid("scale: need finite k >= 0"));
        }
        Ok(FunctionExpr::Scale { k, f: Box::new(f) })
    }

    pub fn restrict(f: FunctionExpr, lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
            return Err(Error::invalid("restrict: need 0 <= lo < hi <= 1"));
        }
        Ok(FunctionExpr::Restrict { f: Box::new(f), lo, hi })
    }

    pub fn sampled(
        breaks: Vec<f64>,
        values: Vec<f64>,
        monotone: Monotone,
    ) -> Result<Self> {
        if breaks.len() < 2 || values.len() != breaks.len() {
            return Err(Error::invalid("sampled: need one value per grid point"));
        }
        if !strictly_increasing(&breaks) {
            return Err(Error::invalid("sampled: breaks must be strictly increasing"));
        }
        if values.iter().any(|v| !(*v >= 0.0) || v.is_nan()) {
            return Err(Error::invalid("sampled: values must be nonnegative"));
        }
        Ok(FunctionExpr::Sampled { breaks, values, monotone, divergent: false })
    }

    /// The everywhere-infinite marker produced by averaging a
    /// non-integrable input.
    pub fn divergent_marker() -> Self {
        FunctionExpr::Sampled {
            breaks: vec![0.0, 1.0],
            values: vec![0.0, 0.0],
            monotone: Monotone::Unknown,
            divergent: true,
        }
    }

    pub fn is_divergent_marker(&self) -> bool {
        matches!(self, FunctionExpr::Sampled { divergent: true, .. })
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, FunctionExpr::Sampled { .. })
    }

    /// True when any subterm is a sampled approximation.
    pub fn approximate(&self) -> bool {
        match self {
            FunctionExpr::Sampled { .. } => true,
            FunctionExpr::Sum { terms } => terms.iter().any(|t| t.approximate()),
            FunctionExpr::Scale { f, .. } | FunctionExpr::Restrict { f, .. } => f.approximate(),
            _ => false,
        }
    }

    /// Structural validation after deserialization: re-runs every
    /// constructor check.
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionExpr::Step { breaks, values } => {
                Self::step(breaks.clone(), values.clone()).map(|_| ())
            }
            FunctionExpr::Power { c, a } => Self::power(*c, *a).map(|_| ()),
            FunctionExpr::LogRecip { c } => Self::log_recip(*c).map(|_| ()),
            FunctionExpr::ShiftedRecip { y } => Self::shifted_recip(*y).map(|_| ()),
            FunctionExpr::Hyperbolic { a, b, lo, hi } => {
                Self::hyperbolic(*a, *b, *lo, *hi).map(|_| ())
            }
            FunctionExpr::MirroredPower { c, a } => Self::mirrored_power(*c, *a).map(|_| ()),
            FunctionExpr::LogWindow { c, top, lo, hi } => {
                Self::log_window(*c, *top, *lo, *hi).map(|_| ())
            }
            FunctionExpr::Sum { terms } => {
                for t in terms {
                    t.validate()?;
                }
                Ok(())
            }
            FunctionExpr::Scale { k, f } => {
                if !k.is_finite() || *k < 0.0 {
                    return Err(Error::invalid("scale: need finite k >= 0"));
                }
                f.validate()
            }
            FunctionExpr::Restrict { f, lo, hi } => {
                if !(0.0..=1.0).contains(lo) || !(0.0..=1.0).contains(hi) || lo >= hi {
                    return Err(Error::invalid("restrict: need 0 <= lo < hi <= 1"));
                }
                f.validate()
            }
            FunctionExpr::Sampled { breaks, values, divergent, .. } => {
                if *divergent {
                    return Ok(());
                }
                Self::sampled(breaks.clone(), values.clone(), Monotone::Unknown).map(|_| ())
            }
        }
    }

    // ------------------------------------------------------------------
    // evaluation
    // ------------------------------------------------------------------

    /// Pointwise value at `x in (0,1]`. Returns `+inf` at declared
    /// singular points (`t=1` for mirrored powers with negative exponent;
    /// the left endpoint 0 is outside the evaluation domain).
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::domain(format!("eval: x = {} outside (0,1]", x)));
        }
        Ok(self.value_at(x))
    }

    /// In a half-open window `[lo, hi)`, with the right endpoint included
    /// when the window ends at 1.
    fn in_window(x: f64, lo: f64, hi: f64) -> bool {
        x >= lo && (x < hi || (hi >= 1.0 && x <= 1.0))
    }

    /// Unchecked evaluation; callers guarantee `x in (0,1]` (quadrature
    /// nodes never touch 0).
    pub(crate) fn value_at(&self, x: f64) -> f64 {
        match self {
            FunctionExpr::Step { breaks, values } => {
                match cell_index(breaks, x) {
                    Some(k) => values[k],
                    None => 0.0,
                }
            }
            FunctionExpr::Power { c, a } => {
                if *c == 0.0 {
                    0.0
                } else {
                    c * x.powf(*a)
                }
            }
            FunctionExpr::LogRecip { c } => {
                if *c == 0.0 {
                    0.0
                } else {
                    c * (1.0 / x).ln()
                }
            }
            FunctionExpr::ShiftedRecip { y } => {
                if x <= 1.0 - y {
                    1.0 / (x + y)
                } else {
                    0.0
                }
            }
            FunctionExpr::Hyperbolic { a, b, lo, hi } => {
                if Self::in_window(x, *lo, *hi) {
                    (a + b / x).max(0.0)
                } else {
                    0.0
                }
            }
            FunctionExpr::LogWindow { c, top, lo, hi } => {
                if *c > 0.0 && Self::in_window(x, *lo, *hi) {
                    (c * (top / x).ln()).max(0.0)
                } else {
                    0.0
                }
            }
            FunctionExpr::MirroredPower { c, a } => {
                if *c == 0.0 {
                    return 0.0;
                }
                let u = 1.0 - x;
                if u <= 0.0 {
                    if *a < 0.0 {
                        f64::INFINITY
                    } else if *a == 0.0 {
                        *c
                    } else {
                        0.0
                    }
                } else {
                    c * u.powf(*a)
                }
            }
            FunctionExpr::Sum { terms } => terms.iter().map(|t| t.value_at(x)).sum(),
            FunctionExpr::Scale { k, f } => {
                if *k == 0.0 {
                    0.0
                } else {
                    k * f.value_at(x)
                }
            }
            FunctionExpr::Restrict { f, lo, hi } => {
                if Self::in_window(x, *lo, *hi) {
                    f.value_at(x)
                } else {
                    0.0
                }
            }
            FunctionExpr::Sampled { breaks, values, divergent, .. } => {
                if *divergent {
                    return f64::INFINITY;
                }
                let n = breaks.len() - 1;
                if x >= breaks[n] {
                    return *values.last().unwrap();
                }
                match cell_index(breaks, x) {
                    Some(k) => values[k],
                    None => 0.0,
                }
            }
        }
    }

    /// Value at `x = 1 - u`, computed without the catastrophic
    /// cancellation of forming `1 - u` for tiny `u`. Needed by quadrature
    /// layers graded toward 1.
    pub(crate) fn value_near_one(&self, u: f64) -> f64 {
        match self {
            FunctionExpr::MirroredPower { c, a } => {
                if *c == 0.0 {
                    0.0
                } else if u <= 0.0 {
                    if *a < 0.0 {
                        f64::INFINITY
                    } else if *a == 0.0 {
                        *c
                    } else {
                        0.0
                    }
                } else {
                    c * u.powf(*a)
                }
            }
            FunctionExpr::LogRecip { c } => {
                // log(1/(1-u)) = -ln(1-u)
                if *c == 0.0 {
                    0.0
                } else {
                    -c * (-u).ln_1p()
                }
            }
            FunctionExpr::ShiftedRecip { y } => {
                if u >= *y {
                    1.0 / (1.0 - u + y)
                } else {
                    0.0
                }
            }
            FunctionExpr::Hyperbolic { a, b, lo, hi } => {
                let inside = u <= 1.0 - lo && (*hi >= 1.0 || u > 1.0 - hi);
                if inside {
                    (a + b / (1.0 - u)).max(0.0)
                } else {
                    0.0
                }
            }
            FunctionExpr::LogWindow { c, top, lo, hi } => {
                let inside = u <= 1.0 - lo && (*hi >= 1.0 || u > 1.0 - hi);
                if *c > 0.0 && inside {
                    if *top >= 1.0 {
                        // log(1/(1-u)) without cancellation
                        -c * (-u).ln_1p()
                    } else {
                        (c * (top / (1.0 - u)).ln()).max(0.0)
                    }
                } else {
                    0.0
                }
            }
            FunctionExpr::Sum { terms } => terms.iter().map(|t| t.value_near_one(u)).sum(),
            FunctionExpr::Scale { k, f } => {
                if *k == 0.0 {
                    0.0
                } else {
                    k * f.value_near_one(u)
                }
            }
            FunctionExpr::Restrict { f, lo, hi } => {
                let inside = u <= 1.0 - lo && (*hi >= 1.0 || u > 1.0 - hi);
                if inside {
                    f.value_near_one(u)
                } else {
                    0.0
                }
            }
            // bounded variants: plain evaluation is stable enough
            _ => self.value_at((1.0 - u).clamp(f64::MIN_POSITIVE, 1.0)),
        }
    }

    // ------------------------------------------------------------------
    // structure probes used by quadrature and rearrangement
    // ------------------------------------------------------------------

    /// Interior points where the expression may jump or kink; quadrature
    /// panels split here.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        self.collect_breakpoints(&mut pts);
        pts.retain(|p| *p > 0.0 && *p < 1.0);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            FunctionExpr::Step { breaks, .. } | FunctionExpr::Sampled { breaks, .. } => {
                out.extend_from_slice(&breaks[1..breaks.len().saturating_sub(1)]);
            }
            FunctionExpr::ShiftedRecip { y } => out.push(1.0 - y),
            FunctionExpr::Hyperbolic { lo, hi, .. }
            | FunctionExpr::LogWindow { lo, hi, .. } => {
                out.push(*lo);
                out.push(*hi);
            }
            FunctionExpr::Sum { terms } => {
                for t in terms {
                    t.collect_breakpoints(out);
                }
            }
            FunctionExpr::Scale { f, .. } => f.collect_breakpoints(out),
            FunctionExpr::Restrict { f, lo, hi } => {
                out.push(*lo);
                out.push(*hi);
                f.collect_breakpoints(out);
            }
            _ => {}
        }
    }

    /// Leading behavior at a domain endpoint.
    pub fn end_behavior(&self, end: Endpoint) -> EndBehavior {
        use EndBehavior::*;
        match self {
            FunctionExpr::Step { breaks, values } => {
                let v = match end {
                    Endpoint::Zero => values[0],
                    Endpoint::One => *values.last().unwrap(),
                };
                let _ = breaks;
                if v == 0.0 {
                    Zero
                } else {
                    Regular
                }
            }
            FunctionExpr::Sampled { values, divergent, .. } => {
                if *divergent {
                    return Unknown;
                }
                let v = match end {
                    Endpoint::Zero => values[0],
                    Endpoint::One => *values.last().unwrap(),
                };
                if v == 0.0 {
                    Zero
                } else {
                    Regular
                }
            }
            FunctionExpr::Power { c, a } => {
                if *c == 0.0 {
                    Zero
                } else {
                    match end {
                        Endpoint::Zero => {
                            if *a == 0.0 {
                                Regular
                            } else {
                                PowerLog { exp: *a, logpow: 0.0 }
                            }
                        }
                        Endpoint::One => Regular,
                    }
                }
            }
            FunctionExpr::MirroredPower { c, a } => {
                if *c == 0.0 {
                    Zero
                } else {
                    match end {
                        Endpoint::One => {
                            if *a == 0.0 {
                                Regular
                            } else {
                                PowerLog { exp: *a, logpow: 0.0 }
                            }
                        }
                        Endpoint::Zero => Regular,
                    }
                }
            }
            FunctionExpr::LogRecip { c } => {
                if *c == 0.0 {
                    Zero
                } else {
                    match end {
                        Endpoint::Zero => PowerLog { exp: 0.0, logpow: 1.0 },
                        Endpoint::One => PowerLog { exp: 1.0, logpow: 0.0 },
                    }
                }
            }
            FunctionExpr::ShiftedRecip { .. } => match end {
                Endpoint::Zero => Regular,
                Endpoint::One => Zero,
            },
            FunctionExpr::Hyperbolic { a, b, lo, hi } => match end {
                Endpoint::Zero => {
                    if *lo > 0.0 {
                        Zero
                    } else if *b > 0.0 {
                        PowerLog { exp: -1.0, logpow: 0.0 }
                    } else if *a > 0.0 {
                        Regular
                    } else {
                        Zero
                    }
                }
                Endpoint::One => {
                    if *hi < 1.0 {
                        Zero
                    } else if *a + *b == 0.0 {
                        Zero
                    } else {
                        Regular
                    }
                }
            },
            FunctionExpr::LogWindow { c, top, lo, hi } => {
                if *c == 0.0 {
                    return Zero;
                }
                match end {
                    Endpoint::Zero => {
                        if *lo > 0.0 {
                            Zero
                        } else {
                            PowerLog { exp: 0.0, logpow: 1.0 }
                        }
                    }
                    Endpoint::One => {
                        if *hi < 1.0 {
                            Zero
                        } else {
                            // hi = top = 1: c·log(1/x) vanishes linearly
                            PowerLog { exp: 1.0, logpow: 0.0 }
                        }
                    }
                }
            }
            FunctionExpr::Sum { terms } => {
                let mut acc = Zero;
                for t in terms {
                    acc = acc.sum(&t.end_behavior(end));
                }
                acc
            }
            FunctionExpr::Scale { k, f } => {
                if *k == 0.0 {
                    Zero
                } else {
                    f.end_behavior(end)
                }
            }
            FunctionExpr::Restrict { f, lo, hi } => {
                let touches = match end {
                    Endpoint::Zero => *lo == 0.0,
                    Endpoint::One => *hi >= 1.0,
                };
                if touches {
                    f.end_behavior(end)
                } else {
                    Zero
                }
            }
        }
    }

    /// Upper bound for the essential sup, when the catalog knows one.
    /// `None` means unbounded or unknown.
    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            FunctionExpr::Step { values, .. } => {
                values.iter().cloned().fold(Some(0.0), |acc, v| acc.map(|m: f64| m.max(v)))
            }
            FunctionExpr::Sampled { values, divergent, .. } => {
                if *divergent {
                    None
                } else {
                    values.iter().cloned().fold(Some(0.0), |acc, v| acc.map(|m: f64| m.max(v)))
                }
            }
            FunctionExpr::Power { c, a } => {
                if *c == 0.0 {
                    Some(0.0)
                } else if *a >= 0.0 {
                    Some(*c)
                } else {
                    None
                }
            }
            FunctionExpr::MirroredPower { c, a } => {
                if *c == 0.0 {
                    Some(0.0)
                } else if *a >= 0.0 {
                    Some(*c)
                } else {
                    None
                }
            }
            FunctionExpr::LogRecip { c } => {
                if *c == 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
            FunctionExpr::ShiftedRecip { y } => Some(1.0 / y),
            FunctionExpr::Hyperbolic { a, b, lo, hi } => {
                if *b > 0.0 {
                    if *lo == 0.0 {
                        None
                    } else {
                        Some(a + b / lo)
                    }
                } else {
                    Some((a + b / hi).max(0.0))
                }
            }
            FunctionExpr::LogWindow { c, top, lo, .. } => {
                if *c == 0.0 {
                    Some(0.0)
                } else if *lo == 0.0 {
                    None
                } else {
                    Some(c * (top / lo).ln())
                }
            }
            FunctionExpr::Sum { terms } => {
                let mut s = 0.0;
                for t in terms {
                    s += t.sup_bound()?;
                }
                Some(s)
            }
            FunctionExpr::Scale { k, f } => {
                if *k == 0.0 {
                    Some(0.0)
                } else {
                    f.sup_bound().map(|b| k * b)
                }
            }
            FunctionExpr::Restrict { f, .. } => f.sup_bound(),
        }
    }

    /// True when the expression is nonincreasing on `(0,1]` by catalog
    /// structure alone (never decided by sampling).
    pub fn known_decreasing(&self) -> bool {
        match self {
            FunctionExpr::Step { values, .. } => values.windows(2).all(|w| w[0] >= w[1]),
            FunctionExpr::Sampled { values, monotone, divergent, .. } => {
                !*divergent
                    && (*monotone == Monotone::Decreasing
                        || values.windows(2).all(|w| w[0] >= w[1]))
            }
            FunctionExpr::Power { c, a } => *c == 0.0 || *a <= 0.0,
            FunctionExpr::MirroredPower { c, a } => *c == 0.0 || *a >= 0.0,
            FunctionExpr::LogRecip { .. } => true,
            FunctionExpr::ShiftedRecip { .. } => true,
            FunctionExpr::Hyperbolic { b, lo, .. } => {
                // support must start at 0 (no upward jump into the window)
                // and the window itself must be nonincreasing; the drop to
                // zero past the window is always downward
                *lo == 0.0 && *b >= 0.0
            }
            FunctionExpr::LogWindow { c, lo, .. } => *c == 0.0 || *lo == 0.0,
            FunctionExpr::Sum { terms } => terms.iter().all(|t| t.known_decreasing()),
            FunctionExpr::Scale { k, f } => *k == 0.0 || f.known_decreasing(),
            FunctionExpr::Restrict { f, lo, .. } => *lo == 0.0 && f.known_decreasing(),
        }
    }

    /// True when the expression is nondecreasing on `(0,1)` by catalog
    /// structure alone.
    pub fn known_increasing(&self) -> bool {
        match self {
            FunctionExpr::Step { values, .. } => values.windows(2).all(|w| w[0] <= w[1]),
            FunctionExpr::Sampled { values, monotone, divergent, .. } => {
                !*divergent
                    && (*monotone == Monotone::Increasing
                        || values.windows(2).all(|w| w[0] <= w[1]))
            }
            FunctionExpr::Power { c, a } => *c == 0.0 || *a >= 0.0,
            FunctionExpr::MirroredPower { c, a } => *c == 0.0 || *a <= 0.0,
            FunctionExpr::LogRecip { c } => *c == 0.0,
            FunctionExpr::ShiftedRecip { .. } => false,
            FunctionExpr::Hyperbolic { a, b, hi, .. } => {
                // upward jump into the window is fine; the window must be
                // nondecreasing and must reach 1 or end at value zero
                *b <= 0.0 && (*hi >= 1.0 || *a + *b / *hi <= 0.0)
            }
            FunctionExpr::LogWindow { c, .. } => *c == 0.0,
            FunctionExpr::Sum { terms } => terms.iter().all(|t| t.known_increasing()),
            FunctionExpr::Scale { k, f } => *k == 0.0 || f.known_increasing(),
            FunctionExpr::Restrict { f, hi, .. } => *hi >= 1.0 && f.known_increasing(),
        }
    }
}

/// Index of the half-open cell containing `x`, with the last cell closed
/// on the right.
pub(crate) fn cell_index(breaks: &[f64], x: f64) -> Option<usize> {
    let n = breaks.len() - 1;
    if x < breaks[0] || x > breaks[n] {
        return None;
    }
    if x >= breaks[n] {
        return Some(n - 1);
    }
    // binary search for the last break <= x
    let mut lo = 0usize;
    let mut hi = n;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if breaks[mid] <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_variant_semantics() {
        let f = FunctionExpr::power(1.0, -0.5).unwrap();
        assert_eq!(f.eval(0.25).unwrap(), 2.0);

        let g = FunctionExpr::shifted_recip(0.5).unwrap();
        assert!((g.eval(0.25).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(g.eval(0.5).unwrap(), 1.0); // support endpoint included
        assert_eq!(g.eval(0.75).unwrap(), 0.0); // past the support

        let h = FunctionExpr::hyperbolic(0.0, 1.0, 0.5, 1.0).unwrap();
        assert!((h.eval(0.75).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(h.eval(0.25).unwrap(), 0.0);
        assert_eq!(h.eval(1.0).unwrap(), 1.0); // window ending at 1 is closed
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let f = FunctionExpr::constant(1.0).unwrap();
        assert!(f.eval(0.0).is_err());
        assert!(f.eval(1.5).is_err());
    }

    #[test]
    fn step_constructor_validates() {
        assert!(FunctionExpr::step(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).is_ok());
        assert!(FunctionExpr::step(vec![0.0, 0.5, 0.5, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(FunctionExpr::step(vec![0.1, 1.0], vec![1.0]).is_err());
        assert!(FunctionExpr::step(vec![0.0, 1.0], vec![-1.0]).is_err());
    }

    #[test]
    fn mirrored_power_is_singular_at_one() {
        let f = FunctionExpr::mirrored_power(0.5, -1.25).unwrap();
        assert!(f.eval(1.0).unwrap().is_infinite());
        let v = f.eval(0.75).unwrap();
        assert!((v - 0.5 * 0.25f64.powf(-1.25)).abs() < 1e-12);
    }

    #[test]
    fn end_behavior_detects_divergence() {
        let f = FunctionExpr::power(1.0, -1.25).unwrap();
        assert_eq!(f.end_behavior(Endpoint::Zero).integrable(), Tri::No);
        let g = FunctionExpr::power(1.0, -0.5).unwrap();
        assert_eq!(g.end_behavior(Endpoint::Zero).integrable(), Tri::Yes);
        let h = FunctionExpr::log_recip(1.0).unwrap();
        assert_eq!(h.end_behavior(Endpoint::Zero).integrable(), Tri::Yes);
        assert_eq!(h.end_behavior(Endpoint::Zero).unbounded(), Tri::Yes);
        // 1/x at 0 diverges
        let k = FunctionExpr::hyperbolic(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(k.end_behavior(Endpoint::Zero).integrable(), Tri::No);
    }

    #[test]
    fn monotonicity_is_structural() {
        assert!(FunctionExpr::shifted_recip(0.3).unwrap().known_decreasing());
        assert!(FunctionExpr::power(1.0, -0.5).unwrap().known_decreasing());
        assert!(FunctionExpr::power(1.0, 2.0).unwrap().known_increasing());
        assert!(FunctionExpr::mirrored_power(1.0, -1.5).unwrap().known_increasing());
        let s = FunctionExpr::step(vec![0.0, 0.5, 1.0], vec![3.0, 1.0]).unwrap();
        assert!(s.known_decreasing());
        assert!(!s.known_increasing());
    }

    #[test]
    fn serde_round_trip() {
        let f = FunctionExpr::sum(vec![
            FunctionExpr::power(1.0, -0.5).unwrap(),
            FunctionExpr::scale(2.0, FunctionExpr::log_recip(1.0).unwrap()).unwrap(),
        ]);
        let js = serde_json::to_string(&f).unwrap();
        let g: FunctionExpr = serde_json::from_str(&js).unwrap();
        assert_eq!(f, g);
    }
}
