//! Threshold bound formulas and the conditional `ε`-bound machinery.
//!
//! For `∅ ≠ A ⊆ B ⊆ 2^X` with `q = q(⟨A⟩)` and `ℓ₀ = ℓ₀(⟨A⟩)`, the bound
//! function is
//!
//! ```text
//! g(p) = 1 - r_{A,B}(p) · (1 - ℓ₀ · 2^{-p / (K q)})
//! ```
//!
//! and `ε > g(p)` certifies `P(X_p ∈ A | X_p ∈ B) > 1 - ε`. The level set
//! `{p : g(p) < ε}` is located on a dense grid and its endpoints refined by
//! bisection. All logarithms are base 2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{SetFamily, UpperSetFamily};
use crate::measure::{bisect_increasing, check_nested, Prob, RatioProfiles};
use crate::threshold::{q_threshold, DEFAULT_Q_TOL};

/// Default Park-Pham constant, matching the `ε`-dependent form.
pub const DEFAULT_K: f64 = 48.0;

/// Default number of grid points on `[δ, 1-δ]`.
pub const DEFAULT_GRID: usize = 10_000;

/// Offset from the endpoints where `r` may be `0/0`.
pub const ENDPOINT_DELTA: f64 = 1e-9;

/// Bisection width for interval endpoints.
pub const ENDPOINT_TOL: f64 = 1e-10;

/// Slack allowed when checking `r ≥ 1` on a grid, for ratios that are
/// identically 1 but evaluated in floating point.
pub const RATIO_SLACK: f64 = 1e-12;

/// `K q log₂ ℓ`.
pub fn pp_bound(q: f64, ell: usize, k: f64) -> f64 {
    k * q * (ell as f64).log2()
}

/// `8 q log₂(2 ℓ₀)`.
pub fn bell_bound(q: f64, ell0: usize) -> f64 {
    8.0 * q * (2.0 * ell0 as f64).log2()
}

/// `48 q log₂(ℓ₀ / ε)`. Non-positive when `ε ≥ ℓ₀`; callers treat that as
/// no constraint on `p`.
pub fn bell_eps_bound(q: f64, ell0: usize, eps: f64) -> f64 {
    48.0 * q * (ell0 as f64 / eps).log2()
}

/// Grid and refinement settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    pub points: usize,
    pub delta: f64,
    pub endpoint_tol: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            points: DEFAULT_GRID,
            delta: ENDPOINT_DELTA,
            endpoint_tol: ENDPOINT_TOL,
        }
    }
}

impl GridOptions {
    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }

    fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let span = 1.0 - 2.0 * self.delta;
        let last = (self.points - 1) as f64;
        (0..self.points).map(move |i| self.delta + span * i as f64 / last)
    }

    fn validate(&self) -> Result<()> {
        if self.points < 3 || !(self.delta > 0.0 && self.delta < 0.5) || !(self.endpoint_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("bad grid options {self:?}")));
        }
        Ok(())
    }
}

/// A nested pair `A ⊆ B` with everything needed to evaluate `r`, `g` and the
/// exact conditional at any `p ∈ (0, 1)`.
#[derive(Debug, Clone)]
pub struct ConditionalSetup {
    a: SetFamily,
    b: SetFamily,
    closure: UpperSetFamily,
    profiles: RatioProfiles,
    q: f64,
    ell0: usize,
    k: f64,
}

impl ConditionalSetup {
    pub fn new(a: &SetFamily, b: &SetFamily, k: f64) -> Result<Self> {
        Self::with_q_tol(a, b, k, DEFAULT_Q_TOL)
    }

    pub fn with_q_tol(a: &SetFamily, b: &SetFamily, k: f64, q_tol: f64) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if !(k > 0.0) {
            return Err(Error::InvalidParameter(format!("K must be positive, got {k}")));
        }
        check_nested(a, b)?;
        let closure = UpperSetFamily::up_closure(a)?;
        closure.require_nontrivial()?;
        let (q, _) = q_threshold(&closure, q_tol)?;
        let profiles = RatioProfiles::new(a, &closure, b)?;
        let ell0 = closure.ell0();
        Ok(Self {
            a: a.clone(),
            b: b.clone(),
            closure,
            profiles,
            q,
            ell0,
            k,
        })
    }

    pub fn a(&self) -> &SetFamily {
        &self.a
    }

    pub fn b(&self) -> &SetFamily {
        &self.b
    }

    pub fn closure(&self) -> &UpperSetFamily {
        &self.closure
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn ell0(&self) -> usize {
        self.ell0
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `K q log₂ ℓ₀`; the conditional bounds carry content when this is < 1.
    pub fn gate(&self) -> f64 {
        self.k * self.q * (self.ell0 as f64).log2()
    }

    pub fn ratio(&self, p: f64) -> f64 {
        self.profiles.ratio(p)
    }

    pub fn conditional(&self, p: f64) -> f64 {
        self.profiles.conditional(p)
    }

    pub fn g(&self, p: f64) -> f64 {
        self.g_with_ratio(p, self.ratio(p))
    }

    fn g_with_ratio(&self, p: f64, r: f64) -> f64 {
        1.0 - r * (1.0 - self.ell0 as f64 * (-p / (self.k * self.q)).exp2())
    }

    /// Minimum of `g` over `(0, 1)`: grid scan, then golden-section search
    /// around the best grid node.
    pub fn epsilon_floor(&self, grid: &GridOptions) -> Result<EpsilonFloor> {
        grid.validate()?;
        let nodes: Vec<f64> = grid.nodes().collect();
        let (best, _) = nodes
            .iter()
            .map(|&p| self.g(p))
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bi, bv), (i, v)| if v < bv { (i, v) } else { (bi, bv) },
            );
        let lo = nodes[best.saturating_sub(1)];
        let hi = nodes[(best + 1).min(nodes.len() - 1)];
        let (mut argmin, mut value) = golden_section_min(|p| self.g(p), lo, hi, 1e-12);
        // keep the grid node if refinement did not improve on it
        if self.g(nodes[best]) < value {
            argmin = nodes[best];
            value = self.g(argmin);
        }
        let edge = nodes[1] - nodes[0];
        let boundary = argmin - nodes[0] < edge || nodes[nodes.len() - 1] - argmin < edge;
        let gate = self.gate();
        let warning = (gate >= 1.0).then(|| format!("gate K*q*log2(ell0) = {gate} >= 1: the floor may be >= 1"));
        Ok(EpsilonFloor {
            value,
            argmin,
            boundary,
            warning,
        })
    }

    /// All maximal open subintervals of `(0, 1)` on which `g < eps`.
    ///
    /// Runs of grid nodes below `eps` give the intervals; interior endpoints
    /// are bisected to `endpoint_tol`, and a run touching the first or last
    /// node is reported as open at 0 or 1. If the grid misses a level set
    /// that the refined floor shows to exist, it is grown from the argmin.
    pub fn admissible_intervals(&self, eps: f64, grid: &GridOptions) -> Result<Vec<Interval>> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
        }
        grid.validate()?;
        let nodes: Vec<f64> = grid.nodes().collect();
        let below: Vec<bool> = nodes.iter().map(|&p| self.g(p) < eps).collect();
        let last = nodes.len() - 1;
        let mut intervals = Vec::new();
        let mut i = 0;
        while i <= last {
            if !below[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i < last && below[i + 1] {
                i += 1;
            }
            let end = i;
            let lo = if start == 0 {
                0.0
            } else {
                self.crossing(nodes[start - 1], nodes[start], eps, grid.endpoint_tol, true)
            };
            let hi = if end == last {
                1.0
            } else {
                self.crossing(nodes[end], nodes[end + 1], eps, grid.endpoint_tol, false)
            };
            intervals.push(Interval { lo, hi });
            i += 1;
        }
        if intervals.is_empty() {
            let floor = self.epsilon_floor(grid)?;
            if floor.value < eps {
                let m = floor.argmin;
                let left = nodes.iter().rev().copied().find(|&p| p < m).unwrap_or(0.0);
                let right = nodes.iter().copied().find(|&p| p > m).unwrap_or(1.0);
                let lo = self.crossing(left.max(grid.delta), m, eps, grid.endpoint_tol, true);
                let hi = self.crossing(m, right.min(1.0 - grid.delta), eps, grid.endpoint_tol, false);
                intervals.push(Interval { lo, hi });
            }
        }
        Ok(intervals)
    }

    /// Where `g - eps` changes sign between `a` and `b`. `entering` means
    /// `g ≥ eps` at `a` and `g < eps` at `b`.
    fn crossing(&self, a: f64, b: f64, eps: f64, tol: f64, entering: bool) -> f64 {
        let bracket = if entering {
            bisect_increasing(|p| self.g(p) < eps, a, b, tol)
        } else {
            bisect_increasing(|p| self.g(p) >= eps, a, b, tol)
        };
        bracket.midpoint()
    }

    /// `(p, r(p), g(p))` at `count` evenly spaced points of `(0, 1)`.
    pub fn samples(&self, count: usize) -> Vec<Sample> {
        (1..=count)
            .map(|i| {
                let p = i as f64 / (count + 1) as f64;
                let r = self.ratio(p);
                Sample {
                    p,
                    r,
                    g: self.g_with_ratio(p, r),
                }
            })
            .collect()
    }

    /// Checks `P(A | B) > r(p) / 2` once `p` exceeds `8 q log₂(2 ℓ₀)`.
    pub fn check_basic_bound(&self, p: f64) -> Result<bool> {
        let threshold = bell_bound(self.q, self.ell0);
        if !(p > threshold) {
            return Err(Error::HypothesisNotMet { p, threshold });
        }
        if !(p < 1.0) {
            return Err(Error::Endpoint(p));
        }
        Ok(self.conditional(p) > self.ratio(p) / 2.0)
    }

    /// When `r ≥ 1` throughout `(0, 1)`, the unconditional `ε` bound for
    /// `⟨A⟩` transfers to `P(A | B)`; returns that bound on `p`.
    pub fn strengthened_upper_case(&self, eps: f64, grid: &GridOptions) -> Result<f64> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
        }
        grid.validate()?;
        for p in grid.nodes() {
            let r = self.ratio(p);
            if r < 1.0 - RATIO_SLACK {
                return Err(Error::RatioBelowOne { p, r });
            }
        }
        Ok(bell_eps_bound(self.q, self.ell0, eps))
    }

    pub fn report(&self, options: &ReportOptions) -> Result<ConditionalReport> {
        let floor = self.epsilon_floor(&options.grid)?;
        let gate = self.gate();
        let mut warnings: Vec<String> = floor.warning.iter().cloned().collect();
        let (intervals, status) = match options.eps {
            None => (Vec::new(), ReportStatus::FloorOnly),
            Some(eps) => {
                let intervals = self.admissible_intervals(eps, &options.grid)?;
                let status = if intervals.is_empty() {
                    ReportStatus::BelowFloor
                } else {
                    ReportStatus::Admissible
                };
                (intervals, status)
            }
        };
        if intervals.len() > 1 {
            warnings.push(format!("level set splits into {} intervals", intervals.len()));
        }
        Ok(ConditionalReport {
            k: self.k,
            q: self.q,
            ell0: self.ell0,
            gate,
            gate_satisfied: gate < 1.0,
            epsilon_floor: floor.value,
            argmin_p: floor.argmin,
            boundary_minimum: floor.boundary,
            eps: options.eps,
            multiple_intervals: intervals.len() > 1,
            intervals,
            status,
            warnings,
            samples: self.samples(options.samples),
        })
    }
}

/// Golden-section search for the minimum of a unimodal function on `[a, b]`.
fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonFloor {
    pub value: f64,
    pub argmin: f64,
    /// The minimum sits at the edge of the grid, i.e. it is a one-sided limit.
    pub boundary: bool,
    pub warning: Option<String>,
}

/// An open interval `(lo, hi) ⊆ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub p: f64,
    pub r: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    /// No `ε` requested; only the floor is reported.
    FloorOnly,
    /// `ε` exceeds the floor and at least one interval was found.
    Admissible,
    /// `ε` does not exceed the floor; nothing is admissible.
    BelowFloor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    /// Used by callers that build the setup from the options.
    pub k: f64,
    pub eps: Option<f64>,
    pub grid: GridOptions,
    pub samples: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            eps: None,
            grid: GridOptions::default(),
            samples: 99,
        }
    }
}

/// Everything the conditional machinery reports for one `(A, B, K, ε)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalReport {
    #[serde(rename = "K")]
    pub k: f64,
    pub q: f64,
    pub ell0: usize,
    pub gate: f64,
    pub gate_satisfied: bool,
    pub epsilon_floor: f64,
    pub argmin_p: f64,
    pub boundary_minimum: bool,
    pub eps: Option<f64>,
    pub intervals: Vec<Interval>,
    pub multiple_intervals: bool,
    pub status: ReportStatus,
    pub warnings: Vec<String>,
    pub samples: Vec<Sample>,
}

impl ConditionalReport {
    /// The samples as CSV with a `p,r,g` header.
    pub fn samples_csv(&self) -> String {
        let mut out = String::from("p,r,g\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{}\n", s.p, s.r, s.g));
        }
        out
    }
}

pub fn g_function(a: &SetFamily, b: &SetFamily, p: Prob, k: f64) -> Result<f64> {
    let p = p.require_interior()?;
    Ok(ConditionalSetup::new(a, b, k)?.g(p.get()))
}

pub fn epsilon_floor(a: &SetFamily, b: &SetFamily, k: f64) -> Result<EpsilonFloor> {
    ConditionalSetup::new(a, b, k)?.epsilon_floor(&GridOptions::default())
}

pub fn admissible_intervals(a: &SetFamily, b: &SetFamily, eps: f64, k: f64) -> Result<Vec<Interval>> {
    ConditionalSetup::new(a, b, k)?.admissible_intervals(eps, &GridOptions::default())
}

pub fn check_basic_bound(a: &SetFamily, b: &SetFamily, p: Prob) -> Result<bool> {
    ConditionalSetup::new(a, b, DEFAULT_K)?.check_basic_bound(p.get())
}

pub fn strengthened_upper_case(a: &SetFamily, b: &SetFamily, eps: f64) -> Result<f64> {
    ConditionalSetup::new(a, b, DEFAULT_K)?.strengthened_upper_case(eps, &GridOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::GroundSet;
    use crate::forge::{worked_example, BVariant};
    use std::sync::Arc;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn bound_formulas() {
        assert!(close(pp_bound(0.25, 2, 48.0), 12.0, 1e-15));
        assert!(close(pp_bound(0.3, 2, 7.0), 2.1, 1e-15));
        assert!(close(pp_bound(0.5, 4, 8.0), 8.0, 1e-15));
        assert!(close(bell_bound(0.5, 1), 4.0, 1e-15));
        assert!(close(bell_bound(0.25, 2), 4.0, 1e-15));
        assert_eq!(bell_bound(0.0, 3), 0.0);
        assert!(close(bell_eps_bound(0.25, 1, 0.99), 0.173995, 1e-6));
        assert_eq!(bell_eps_bound(0.25, 1, 1.0), 0.0);
        assert!(close(bell_eps_bound(0.25, 1, 0.5), 12.0, 1e-14));
    }

    #[test]
    fn setup_quantities_for_worked_example() {
        let ex = worked_example(BVariant::Formula);
        let s = ConditionalSetup::new(&ex.a, &ex.b, 48.0).unwrap();
        assert!(close(s.q(), 0.25, 1e-12));
        assert_eq!(s.ell0(), 1);
        assert_eq!(s.gate(), 0.0);
        // with ℓ₀ = 1 the formula collapses to 1 - (2 - 2/(2-p))(1 - 2^{-p/12})
        for i in 1..100 {
            let p = i as f64 / 100.0;
            let expected = 1.0 - (2.0 - 2.0 / (2.0 - p)) * (1.0 - (-p / 12.0).exp2());
            assert!(close(s.g(p), expected, 1e-10), "p={p}");
        }
    }

    #[test]
    fn g_values_at_published_points() {
        let ex = worked_example(BVariant::Formula);
        let g = |a: &SetFamily, x: f64| g_function(a, &ex.b, Prob::new(x).unwrap(), 48.0).unwrap();
        assert!(close(g(&ex.a, 0.582289), 0.98051, 1e-4));
        assert!(close(g(&ex.a, 0.195217), 0.99, 1e-4));
        assert!(close(g(&ex.a_prime, 1.0 - 1e-9), 0.943874, 1e-6));
        assert!(g_function(&ex.a, &ex.b, Prob::new(1.0).unwrap(), 48.0).is_err());
    }

    #[test]
    fn floors_of_worked_examples() {
        let ex = worked_example(BVariant::Formula);
        let floor = epsilon_floor(&ex.a, &ex.b, 48.0).unwrap();
        assert!(close(floor.value, 0.98051, 1e-4));
        assert!(close(floor.argmin, 0.582289, 1e-4));
        assert!(!floor.boundary && floor.warning.is_none());

        let floor = epsilon_floor(&ex.a_prime, &ex.b, 48.0).unwrap();
        assert!(close(floor.value, 0.943874, 1e-6));
        assert!(floor.boundary);
        assert!(floor.argmin > 1.0 - 1e-6);
    }

    #[test]
    fn floor_below_one_for_self_conditioning() {
        let g = Arc::new(GroundSet::alphabetic(3).unwrap());
        let a = UpperSetFamily::up_closure(&SetFamily::from_labels(g, &[&["a"]]).unwrap())
            .unwrap()
            .to_family()
            .unwrap();
        let s = ConditionalSetup::new(&a, &a, 48.0).unwrap();
        let floor = s.epsilon_floor(&GridOptions::default()).unwrap();
        assert!(floor.value < 1.0);
        // oracle: plain grid scan of g = 1 - (1/p)(1 - 2^{-p/24})
        let scan = (1..100_000)
            .map(|i| i as f64 / 100_000.0)
            .map(|p| 1.0 - (1.0 - (-p / 24.0).exp2()) / p)
            .fold(f64::INFINITY, f64::min);
        assert!(close(floor.value, scan, 1e-8));
    }

    #[test]
    fn intervals_of_worked_examples() {
        let ex = worked_example(BVariant::Formula);
        let iv = admissible_intervals(&ex.a, &ex.b, 0.99, 48.0).unwrap();
        assert_eq!(iv.len(), 1);
        assert!(close(iv[0].lo, 0.195217, 1e-4) && close(iv[0].hi, 0.889027, 1e-4));

        let iv = admissible_intervals(&ex.a_prime, &ex.b, 0.99, 48.0).unwrap();
        assert_eq!(iv.len(), 1);
        assert!(close(iv[0].lo, 0.173995, 1e-4) && iv[0].hi == 1.0);

        assert!(admissible_intervals(&ex.a, &ex.b, 0.5, 48.0).unwrap().is_empty());
        assert!(admissible_intervals(&ex.a, &ex.b, 1.0, 48.0).is_err());
    }

    #[test]
    fn narrow_level_sets_are_not_missed_by_coarse_grids() {
        let ex = worked_example(BVariant::Formula);
        let s = ConditionalSetup::new(&ex.a, &ex.b, 48.0).unwrap();
        let coarse = GridOptions::with_points(3);
        let floor = s.epsilon_floor(&GridOptions::default()).unwrap();
        let eps = floor.value + 1e-7;
        let iv = s.admissible_intervals(eps, &coarse).unwrap();
        assert_eq!(iv.len(), 1);
        assert!(iv[0].lo < floor.argmin && floor.argmin < iv[0].hi);
    }

    #[test]
    fn basic_bound_hypothesis_paths() {
        let ex = worked_example(BVariant::Formula);
        // threshold 8 * (1/4) * log2(2) = 2 exceeds every p in (0, 1)
        assert!(matches!(
            check_basic_bound(&ex.a, &ex.b, Prob::new(0.9).unwrap()),
            Err(Error::HypothesisNotMet { threshold, .. }) if close(threshold, 2.0, 1e-11)
        ));
        let g = Arc::new(GroundSet::alphabetic(3).unwrap());
        let single = UpperSetFamily::up_closure(&SetFamily::from_labels(g, &[&["a"]]).unwrap())
            .unwrap()
            .to_family()
            .unwrap();
        assert!(matches!(
            check_basic_bound(&single, &single, Prob::new(0.99).unwrap()),
            Err(Error::HypothesisNotMet { .. })
        ));
    }

    #[test]
    fn basic_bound_holds_where_hypothesis_is_met() {
        // ⟨A⟩ generated by many singletons has a tiny q, so 8 q log2(2) < 1
        let g = Arc::new(GroundSet::alphabetic(12).unwrap());
        let singles: Vec<Vec<String>> = g.labels().iter().map(|l| vec![l.clone()]).collect();
        let a = SetFamily::from_labels(g.clone(), &singles).unwrap();
        let b = a
            .union(&SetFamily::from_labels(g, &[&[] as &[&str], &["a", "b"]]).unwrap())
            .unwrap();
        let s = ConditionalSetup::new(&a, &b, 48.0).unwrap();
        let threshold = bell_bound(s.q(), s.ell0());
        assert!(threshold < 1.0);
        let mut checked = 0;
        for i in 1..100 {
            let p = i as f64 / 100.0;
            if p > threshold {
                assert!(s.check_basic_bound(p).unwrap(), "p={p}");
                checked += 1;
            }
        }
        assert!(checked > 10);
    }

    #[test]
    fn strengthened_case() {
        let ex = worked_example(BVariant::Formula);
        let p_min = strengthened_upper_case(&ex.a_prime, &ex.b, 0.99).unwrap();
        assert!(close(p_min, 0.173995, 1e-6));
        assert!(matches!(
            strengthened_upper_case(&ex.a, &ex.b, 0.99),
            Err(Error::RatioBelowOne { .. })
        ));
        let near_one = strengthened_upper_case(&ex.a_prime, &ex.b, 1.0 - 1e-9).unwrap();
        assert!(near_one > 0.0 && near_one < 1e-6);
    }

    #[test]
    fn report_fields() {
        let ex = worked_example(BVariant::Formula);
        let s = ConditionalSetup::new(&ex.a, &ex.b, 48.0).unwrap();
        let report = s
            .report(&ReportOptions {
                eps: Some(0.99),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(report.status, ReportStatus::Admissible);
        assert_eq!(report.gate, report.k * report.q * (report.ell0 as f64).log2());
        assert_eq!(report.samples.len(), 99);
        for iv in &report.intervals {
            assert!(0.0 <= iv.lo && iv.lo < iv.hi && iv.hi <= 1.0);
            for t in 1..50 {
                let p = iv.lo + iv.width() * t as f64 / 50.0;
                assert!(s.g(p) < 0.99);
            }
        }
        assert!(report.samples_csv().starts_with("p,r,g\n"));
        let below = s
            .report(&ReportOptions {
                eps: Some(0.5),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(below.status, ReportStatus::BelowFloor);
        assert!(below.intervals.is_empty());
    }

    #[test]
    fn g_dominates_one_minus_r() {
        let ex = worked_example(BVariant::Formula);
        for a in [&ex.a, &ex.a_prime] {
            let s = ConditionalSetup::new(a, &ex.b, 48.0).unwrap();
            for i in 1..1000 {
                let p = i as f64 / 1000.0;
                assert!(s.g(p) >= 1.0 - s.ratio(p) - 1e-15);
            }
        }
    }

    #[test]
    fn trivial_closure_is_rejected() {
        let ex = worked_example(BVariant::Formula);
        assert_eq!(
            ConditionalSetup::new(&ex.b, &ex.b, 48.0).unwrap_err(),
            Error::TrivialUpperSet
        );
        assert_eq!(
            ConditionalSetup::new(&ex.b, &ex.a, 48.0).unwrap_err(),
            Error::NotSubfamily
        );
    }
}
