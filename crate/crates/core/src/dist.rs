//! Distribution functions and decreasing rearrangements.
//!
//! The distribution function `λ_f(τ) = |{t : f(t) > τ}|` is computed in
//! closed form per catalog variant (each piece is monotone with a known
//! inverse), by bisection when same-direction pieces overlap, and on the
//! grid for sampled data. Monotonicity always comes from the variant
//! catalog, never from sampling.
//!
//! `rearrange` returns an exact expression whenever the catalog knows the
//! rearranged shape (sorted steps, mirrored powers, shifted reciprocals,
//! hyperbolic windows) and otherwise inverts the exact distribution
//! function onto a 512-cell geometrically graded grid, returning a
//! `Sampled` that is explicitly flagged approximate.

use crate::expr::{FunctionExpr, Monotone};

/// Cells of the numeric rearrangement grid.
pub const REARRANGE_CELLS: usize = 512;
/// Smallest positive grid point; the grid is geometric from here to 1.
pub const REARRANGE_T_MIN: f64 = 1e-9;

impl FunctionExpr {
    /// Distribution function `λ_f(τ)`, the Lebesgue measure of
    /// `{t in [0,1] : f(t) > τ}`. Exact on the catalog; grid-exact on
    /// sampled data; falls back to dense sampling only for overlapping
    /// sums with conflicting monotonicity.
    pub fn distribution(&self, tau: f64) -> f64 {
        assert!(tau >= 0.0, "distribution: tau must be nonnegative");
        match self.measure_above(tau, 0.0, 1.0) {
            Some(m) => m.clamp(0.0, 1.0),
            None => self.dense_fallback().distribution(tau),
        }
    }

    /// Measure of `{x in [lo,hi) : f(x) > τ}`; `None` when no exact or
    /// bisection route exists.
    pub(crate) fn measure_above(&self, tau: f64, lo: f64, hi: f64) -> Option<f64> {
        if hi <= lo {
            return Some(0.0);
        }
        match self {
            FunctionExpr::Step { breaks, values } => {
                Some(step_measure(breaks, values, tau, lo, hi))
            }
            FunctionExpr::Sampled { breaks, values, divergent, .. } => {
                if *divergent {
                    return Some(hi - lo);
                }
                Some(step_measure(breaks, &values[..breaks.len() - 1], tau, lo, hi))
            }
            FunctionExpr::Power { c, a } => {
                if *c == 0.0 {
                    return Some(0.0);
                }
                if *a == 0.0 {
                    return Some(if *c > tau { hi - lo } else { 0.0 });
                }
                if tau <= 0.0 {
                    return Some(hi - lo); // positive everywhere on (0,1]
                }
                let s = (tau / c).powf(1.0 / a);
                if *a < 0.0 {
                    // f > τ on (0, s)
                    Some((hi.min(s) - lo).max(0.0))
                } else {
                    // f > τ on (s, 1]
                    Some((hi - lo.max(s)).max(0.0))
                }
            }
            FunctionExpr::MirroredPower { c, a } => {
                // mirror: measure within [lo,hi) equals the Power measure
                // within [1-hi, 1-lo)
                FunctionExpr::Power { c: *c, a: *a }.measure_above(tau, 1.0 - hi, 1.0 - lo)
            }
            FunctionExpr::LogRecip { c } => {
                if *c == 0.0 {
                    return Some(0.0);
                }
                let s = (-tau / c).exp(); // f > τ on (0, s)
                Some((hi.min(s) - lo).max(0.0))
            }
            FunctionExpr::ShiftedRecip { y } => {
                let support_hi = 1.0 - y;
                let s = if tau <= 0.0 {
                    support_hi
                } else {
                    (1.0 / tau - y).min(support_hi)
                };
                Some((hi.min(s) - lo).max(0.0))
            }
            FunctionExpr::Hyperbolic { a, b, lo: wl, hi: wh } => {
                let l = lo.max(*wl);
                let h = hi.min(*wh);
                if h <= l {
                    return Some(0.0);
                }
                if *b > 0.0 {
                    // decreasing on the window
                    if tau <= *a {
                        Some(h - l)
                    } else {
                        let s = b / (tau - a);
                        Some((h.min(s) - l).max(0.0))
                    }
                } else if *b < 0.0 {
                    // increasing on the window
                    if tau >= *a {
                        Some(0.0)
                    } else {
                        let s = -b / (a - tau);
                        Some((h - l.max(s)).max(0.0))
                    }
                } else {
                    Some(if *a > tau { h - l } else { 0.0 })
                }
            }
            FunctionExpr::LogWindow { c, top, lo: wl, hi: wh } => {
                if *c == 0.0 {
                    return Some(0.0);
                }
                let l = lo.max(*wl);
                let h = hi.min(*wh);
                if h <= l {
                    return Some(0.0);
                }
                // decreasing on the window: c·log(top/x) > τ ⟺ x < top·e^{-τ/c}
                let s = top * (-tau / c).exp();
                Some((h.min(s) - l).max(0.0))
            }
            FunctionExpr::Scale { k, f } => {
                if *k == 0.0 {
                    Some(0.0)
                } else {
                    f.measure_above(tau / k, lo, hi)
                }
            }
            FunctionExpr::Restrict { f, lo: rl, hi: rh } => {
                f.measure_above(tau, lo.max(*rl), hi.min(*rh))
            }
            FunctionExpr::Sum { terms } => self.sum_measure_above(terms, tau, lo, hi),
        }
    }

    fn sum_measure_above(
        &self,
        terms: &[FunctionExpr],
        tau: f64,
        lo: f64,
        hi: f64,
    ) -> Option<f64> {
        let live: Vec<&FunctionExpr> = terms.iter().filter(|t| !t.is_zero()).collect();
        match live.len() {
            0 => Some(0.0),
            1 => live[0].measure_above(tau, lo, hi),
            _ => {
                // disjoint supports: sum the per-term measures
                let mut hulls: Vec<(f64, f64, &FunctionExpr)> = live
                    .iter()
                    .map(|t| {
                        let (s, e) = t.support_hull();
                        (s, e, *t)
                    })
                    .collect();
                hulls.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
                let disjoint =
                    hulls.windows(2).all(|w| w[0].1 <= w[1].0 + 1e-15);
                if disjoint {
                    let mut total = 0.0;
                    for (s, e, t) in &hulls {
                        total += t.measure_above(tau, lo.max(*s), hi.min(*e))?;
                    }
                    return Some(total);
                }
                // overlapping but uniformly monotone: one crossing point
                if live.iter().all(|t| t.known_decreasing()) {
                    return Some(self.monotone_measure(tau, lo, hi, true));
                }
                if live.iter().all(|t| t.known_increasing()) {
                    return Some(self.monotone_measure(tau, lo, hi, false));
                }
                None
            }
        }
    }

    /// `{f > τ}` for a globally monotone expression, by bisection on the
    /// crossing point. Decreasing expressions have `{f > τ} = (0, s)`,
    /// increasing ones `(s, 1]`; the result is intersected with `[lo,hi)`.
    fn monotone_measure(&self, tau: f64, lo: f64, hi: f64, decreasing: bool) -> f64 {
        let eps = 1e-300;
        let probe = |x: f64| self.value_at(x) > tau;
        if decreasing {
            if probe(1.0) {
                return hi - lo;
            }
            if !probe(eps) {
                return 0.0;
            }
        } else {
            if !probe(1.0) {
                return 0.0;
            }
            if probe(eps) {
                return hi - lo;
            }
        }
        let mut a = eps;
        let mut b = 1.0;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if probe(m) == decreasing {
                a = m;
            } else {
                b = m;
            }
        }
        let s = 0.5 * (a + b);
        if decreasing {
            (hi.min(s) - lo).max(0.0)
        } else {
            (hi - lo.max(s)).max(0.0)
        }
    }

    /// Conservative hull of the essential support.
    pub(crate) fn support_hull(&self) -> (f64, f64) {
        match self {
            FunctionExpr::Step { breaks, values } => step_hull(breaks, values),
            FunctionExpr::Sampled { breaks, values, divergent, .. } => {
                if *divergent {
                    (0.0, 1.0)
                } else {
                    step_hull(breaks, &values[..breaks.len() - 1])
                }
            }
            FunctionExpr::Power { c, .. }
            | FunctionExpr::MirroredPower { c, .. }
            | FunctionExpr::LogRecip { c } => {
                if *c == 0.0 {
                    (0.0, 0.0)
                } else {
                    (0.0, 1.0)
                }
            }
            FunctionExpr::ShiftedRecip { y } => (0.0, 1.0 - y),
            FunctionExpr::Hyperbolic { lo, hi, .. } => (*lo, *hi),
            FunctionExpr::LogWindow { c, lo, hi, .. } => {
                if *c == 0.0 {
                    (0.0, 0.0)
                } else {
                    (*lo, *hi)
                }
            }
            FunctionExpr::Sum { terms } => {
                let mut s = f64::INFINITY;
                let mut e = 0.0f64;
                for t in terms {
                    if t.is_zero() {
                        continue;
                    }
                    let (ts, te) = t.support_hull();
                    s = s.min(ts);
                    e = e.max(te);
                }
                if s.is_infinite() {
                    (0.0, 0.0)
                } else {
                    (s, e)
                }
            }
            FunctionExpr::Scale { k, f } => {
                if *k == 0.0 {
                    (0.0, 0.0)
                } else {
                    f.support_hull()
                }
            }
            FunctionExpr::Restrict { f, lo, hi } => {
                let (s, e) = f.support_hull();
                (s.max(*lo), e.min(*hi))
            }
        }
    }

    /// Identically zero by structure.
    pub(crate) fn is_zero(&self) -> bool {
        match self {
            FunctionExpr::Step { values, .. } => values.iter().all(|v| *v == 0.0),
            FunctionExpr::Sampled { values, divergent, .. } => {
                !*divergent && values.iter().all(|v| *v == 0.0)
            }
            FunctionExpr::Power { c, .. }
            | FunctionExpr::MirroredPower { c, .. }
            | FunctionExpr::LogRecip { c }
            | FunctionExpr::LogWindow { c, .. } => *c == 0.0,
            FunctionExpr::ShiftedRecip { y } => *y >= 1.0,
            FunctionExpr::Hyperbolic { a, b, .. } => *a == 0.0 && *b == 0.0,
            FunctionExpr::Sum { terms } => terms.iter().all(|t| t.is_zero()),
            FunctionExpr::Scale { k, f } => *k == 0.0 || f.is_zero(),
            FunctionExpr::Restrict { f, .. } => f.is_zero(),
        }
    }

    /// Decreasing rearrangement `f*`: equimeasurable with `f` and
    /// nonincreasing. Exact wherever the catalog knows the shape;
    /// otherwise a numeric inversion of the exact distribution function,
    /// flagged approximate.
    pub fn rearrange(&self) -> FunctionExpr {
        if self.is_divergent_marker() {
            return self.clone();
        }
        if self.is_zero() {
            return FunctionExpr::constant(0.0).unwrap();
        }
        match self {
            FunctionExpr::Step { breaks, values } => sort_cells_exact(breaks, values, false),
            FunctionExpr::Sampled { breaks, values, .. } => {
                sort_cells_exact(breaks, &values[..breaks.len() - 1], true)
            }
            FunctionExpr::Power { c, a } if *a > 0.0 => {
                FunctionExpr::MirroredPower { c: *c, a: *a }
            }
            FunctionExpr::MirroredPower { c, a } if *a < 0.0 => {
                FunctionExpr::Power { c: *c, a: *a }
            }
            FunctionExpr::Hyperbolic { a, b, lo, hi } if *b > 0.0 && *lo > 0.0 => {
                // slide the window to the origin: values a + b/(t+lo)
                let w = hi - lo;
                let mut terms = Vec::new();
                if *a > 0.0 {
                    terms.push(FunctionExpr::indicator(0.0, w).and_then(|i| {
                        FunctionExpr::scale(*a, i)
                    }).unwrap());
                }
                let sr = FunctionExpr::ShiftedRecip { y: *lo };
                let piece = if w < 1.0 - lo {
                    FunctionExpr::restrict(sr, 0.0, w).unwrap()
                } else {
                    sr
                };
                terms.push(FunctionExpr::scale(*b, piece).unwrap());
                if terms.len() == 1 {
                    terms.pop().unwrap()
                } else {
                    FunctionExpr::sum(terms)
                }
            }
            FunctionExpr::Scale { k, f } => {
                FunctionExpr::scale(*k, f.rearrange()).unwrap()
            }
            _ if self.known_decreasing() => self.clone(),
            _ => self.invert_distribution(),
        }
    }

    /// Numeric rearrangement: invert the exact distribution function onto
    /// the graded grid. Point values sit at the grid points, except that
    /// the 0-end value is sampled just inside the head cell (the true
    /// `f*(0+)` may be infinite).
    fn invert_distribution(&self) -> FunctionExpr {
        // if the exact λ route is unavailable, densify first
        if self.measure_above(0.0, 0.0, 1.0).is_none() {
            return self.dense_fallback().rearrange();
        }
        let breaks = graded_grid(REARRANGE_CELLS, REARRANGE_T_MIN);
        let mut values = Vec::with_capacity(breaks.len());
        values.push(self.quantile(0.5 * breaks[1]));
        for b in breaks.iter().skip(1) {
            values.push(self.quantile(*b));
        }
        FunctionExpr::Sampled {
            breaks,
            values,
            monotone: Monotone::Decreasing,
            divergent: false,
        }
    }

    /// `f*(s) = inf{ τ >= 0 : λ_f(τ) <= s }` by bisection; the
    /// distribution is exact, so this is accurate to bisection precision.
    pub(crate) fn quantile(&self, s: f64) -> f64 {
        let lambda = |tau: f64| self.distribution(tau);
        if lambda(0.0) <= s {
            return 0.0;
        }
        let mut hi = self.sup_bound().unwrap_or(1.0).max(1e-12);
        let mut tries = 0;
        while lambda(hi) > s {
            hi *= 2.0;
            tries += 1;
            if tries > 2000 {
                return f64::INFINITY; // not a.e. finite
            }
        }
        let mut lo = 0.0f64;
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if lambda(mid) > s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Dense piecewise-constant resampling, for expressions with no exact
    /// distribution route.
    fn dense_fallback(&self) -> FunctionExpr {
        const N: usize = 8192;
        let mut breaks = Vec::with_capacity(N + 1);
        for i in 0..=N {
            breaks.push(i as f64 / N as f64);
        }
        let values: Vec<f64> = (0..=N)
            .map(|i| {
                let m = ((i as f64 + 0.5) / N as f64).min(1.0);
                let v = self.value_at(m);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            })
            .collect();
        FunctionExpr::Sampled { breaks, values, monotone: Monotone::Unknown, divergent: false }
    }
}

/// Geometric grid: `[0, tmin, tmin·ρ, ..., 1]` with `cells` cells.
pub fn graded_grid(cells: usize, tmin: f64) -> Vec<f64> {
    let geo = cells - 1;
    let rho = (1.0 / tmin).powf(1.0 / geo as f64);
    let mut breaks = Vec::with_capacity(cells + 1);
    breaks.push(0.0);
    let mut t = tmin;
    for _ in 0..geo {
        breaks.push(t);
        t *= rho;
    }
    breaks.push(1.0);
    breaks
}

/// Two-sided graded grid toward 0 and 1, `cells` total.
pub fn graded_grid_two_sided(cells: usize, tmin: f64) -> Vec<f64> {
    let half = cells / 2;
    let left = graded_grid(half, tmin);
    let mut breaks = Vec::with_capacity(cells + 1);
    // left half maps [0,1] -> [0, 0.5]
    for b in &left {
        breaks.push(0.5 * b);
    }
    // right half mirrors it
    for b in left.iter().rev().skip(1) {
        breaks.push(1.0 - 0.5 * b);
    }
    breaks
}

fn step_hull(breaks: &[f64], values: &[f64]) -> (f64, f64) {
    let mut s = f64::INFINITY;
    let mut e = 0.0f64;
    for (i, v) in values.iter().enumerate() {
        if *v > 0.0 {
            s = s.min(breaks[i]);
            e = e.max(breaks[i + 1]);
        }
    }
    if s.is_infinite() {
        (0.0, 0.0)
    } else {
        (s, e)
    }
}

fn step_measure(breaks: &[f64], values: &[f64], tau: f64, lo: f64, hi: f64) -> f64 {
    let mut m = 0.0;
    for (i, v) in values.iter().enumerate() {
        if *v > tau {
            let l = breaks[i].max(lo);
            let h = breaks[i + 1].min(hi);
            if h > l {
                m += h - l;
            }
        }
    }
    m
}

/// Sorts the cells of a step-like function by value, descending; the
/// result is an exact rearrangement of the piecewise-constant function.
/// `cell_values` has one entry per cell.
fn sort_cells_exact(breaks: &[f64], cell_values: &[f64], sampled: bool) -> FunctionExpr {
    let mut cells: Vec<(f64, f64)> = cell_values
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, breaks[i + 1] - breaks[i]))
        .collect();
    // account for any part of [0,1] the grid does not cover
    let covered: f64 = breaks.last().unwrap() - breaks[0];
    if covered < 1.0 - 1e-12 {
        cells.push((0.0, 1.0 - covered));
    }
    cells.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    // merge equal-value neighbors to keep the representation small
    let mut new_breaks = vec![0.0];
    let mut new_values = Vec::new();
    let mut acc = 0.0;
    for (v, w) in cells {
        acc += w;
        if let Some(last) = new_values.last() {
            if *last == v {
                *new_breaks.last_mut().unwrap() = acc;
                continue;
            }
        }
        new_values.push(v);
        new_breaks.push(acc);
    }
    *new_breaks.last_mut().unwrap() = 1.0;
    if sampled {
        // point-value convention: repeat the last cell value at the end
        let mut pts = new_values;
        let last = *pts.last().unwrap();
        pts.push(last);
        FunctionExpr::Sampled {
            breaks: new_breaks,
            values: pts,
            monotone: Monotone::Decreasing,
            divergent: false,
        }
    } else {
        FunctionExpr::Step { breaks: new_breaks, values: new_values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_distribution_and_rearrangement() {
        // 1 on [0,0.8), 3 on [0.8,1]
        let f = FunctionExpr::step(vec![0.0, 0.8, 1.0], vec![1.0, 3.0]).unwrap();
        assert!((f.distribution(2.0) - 0.2).abs() < 1e-15);
        assert!((f.distribution(0.5) - 1.0).abs() < 1e-15);
        let fs = f.rearrange();
        match &fs {
            FunctionExpr::Step { breaks, values } => {
                assert_eq!(values, &vec![3.0, 1.0]);
                assert!((breaks[1] - 0.2).abs() < 1e-15);
            }
            other => panic!("expected step, got {other:?}"),
        }
    }

    #[test]
    fn power_distribution() {
        let f = FunctionExpr::power(1.0, -0.5).unwrap();
        assert!((f.distribution(2.0) - 0.25).abs() < 1e-15);
        assert!((f.distribution(0.5) - 1.0).abs() < 1e-15); // t^{-1/2} > 1/2 everywhere
        assert!((f.distribution(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shifted_recip_is_its_own_rearrangement() {
        let f = FunctionExpr::shifted_recip(0.5).unwrap();
        assert_eq!(f.rearrange(), f);
        // support measure
        assert!((f.distribution(0.0) - 0.5).abs() < 1e-15);
        // 1/(t+1/2) > 1.5 iff t < 1/6
        assert!((f.distribution(1.5) - (1.0 / 1.5 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn increasing_power_mirrors() {
        let f = FunctionExpr::power(2.0, 1.0).unwrap();
        let fs = f.rearrange();
        assert_eq!(fs, FunctionExpr::MirroredPower { c: 2.0, a: 1.0 });
        // equimeasurable
        for tau in [0.0, 0.5, 1.0, 1.9] {
            assert!((f.distribution(tau) - fs.distribution(tau)).abs() < 1e-14);
        }
    }

    #[test]
    fn hyperbolic_window_rearranges_to_shifted_recip() {
        // density-style piece: 1/x on [y,1]
        let y = 0.5;
        let f = FunctionExpr::hyperbolic(0.0, 1.0, y, 1.0).unwrap();
        let fs = f.rearrange();
        // compare pointwise with 1/(t+y) on [0, 1-y]
        let expect = FunctionExpr::shifted_recip(y).unwrap();
        for t in [0.01, 0.1, 0.25, 0.4999, 0.7] {
            let a = fs.value_at(t);
            let b = expect.value_at(t);
            assert!((a - b).abs() < 1e-12, "t={t}: {a} vs {b}");
        }
        for tau in [0.0, 1.1, 1.5, 1.9] {
            assert!((f.distribution(tau) - expect.distribution(tau)).abs() < 1e-14);
        }
    }

    #[test]
    fn cesaro_image_of_step_rearranges_numerically() {
        // pieces of C(χ_[1/2,1]): 0 on [0,1/2), (x-1/2)/x on [1/2,1]
        let f = FunctionExpr::sum(vec![
            FunctionExpr::hyperbolic(1.0, -0.5, 0.5, 1.0).unwrap(),
        ]);
        let fs = f.rearrange();
        // (Cf)* is decreasing from 1/2 to 0 with λ(τ) derived from
        // (x-1/2)/x > τ  ⟺  x > 1/(2(1-τ))
        for tau in [0.05f64, 0.1, 0.2, 0.3, 0.45] {
            let expect = 1.0 - 1.0 / (2.0 * (1.0 - tau));
            assert!(
                (f.distribution(tau) - expect).abs() < 1e-12,
                "tau={tau}"
            );
            // the 512-cell geometric grid resolves mid-interval sets to
            // about one cell width (~2% of t)
            assert!(
                (fs.distribution(tau) - expect).abs() < 0.05,
                "rearranged tau={tau}: {} vs {expect}",
                fs.distribution(tau)
            );
        }
        assert!(fs.is_sampled());
        assert!(fs.known_decreasing());
    }

    #[test]
    fn rearrangement_is_idempotent_on_decreasing_inputs() {
        let g = FunctionExpr::log_recip(2.0).unwrap();
        assert_eq!(g.rearrange(), g);
        let h = FunctionExpr::power(1.0, -0.25).unwrap();
        assert_eq!(h.rearrange(), h);
    }

    #[test]
    fn quantile_inverts_distribution() {
        let f = FunctionExpr::power(1.0, -0.5).unwrap();
        // f*(s) = s^{-1/2}
        for s in [0.01, 0.1, 0.5, 0.9] {
            assert!((f.quantile(s) - s.powf(-0.5)).abs() < 1e-9, "s={s}");
        }
    }

    #[test]
    fn graded_grid_shape() {
        let g = graded_grid(512, 1e-9);
        assert_eq!(g.len(), 513);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 1e-9);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let t = graded_grid_two_sided(512, 1e-9);
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), 1.0);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
    }
}
