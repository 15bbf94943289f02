//! Exact evaluation of the product measure `μ_p` on subsets and families.
//!
//! `μ_p(F) = Σ_k N_k p^k (1-p)^{n-k}` depends on `F` only through the counts
//! `N_k` of members of each cardinality, so every family is reduced to a
//! [`CardinalityProfile`] with exact integer counts and the polynomial is
//! evaluated with compensated summation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{GroundSet, SetFamily, SubsetMask, UpperSetFamily};

/// Default bracket width for [`p_critical`].
pub const DEFAULT_BISECTION_TOL: f64 = 1e-12;

/// Iteration ceiling for every bisection in the crate.
pub const MAX_BISECTION_ITERS: usize = 200;

/// Agreement threshold for [`verify_fraction_identity`].
pub const IDENTITY_TOL: f64 = 1e-12;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Prob(f64);

impl Prob {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Prob(value))
        } else {
            Err(Error::InvalidProbability(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Rejects the endpoints 0 and 1.
    pub fn require_interior(self) -> Result<Self> {
        if self.0 > 0.0 && self.0 < 1.0 {
            Ok(self)
        } else {
            Err(Error::Endpoint(self.0))
        }
    }
}

impl TryFrom<f64> for Prob {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Prob::new(value)
    }
}

impl From<Prob> for f64 {
    fn from(p: Prob) -> f64 {
        p.0
    }
}

/// `N_k` for `k = 0..=n`: how many family members have cardinality `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardinalityProfile {
    counts: Vec<u64>,
}

impl CardinalityProfile {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        debug_assert!(!counts.is_empty());
        Self { counts }
    }

    pub fn from_sets<I: IntoIterator<Item = SubsetMask>>(n: usize, sets: I) -> Self {
        let mut counts = vec![0u64; n + 1];
        for s in sets {
            counts[s.len()] += 1;
        }
        Self { counts }
    }

    pub fn n(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `Σ_k N_k p^k (1-p)^{n-k}`, with `0^0 = 1`.
    pub fn eval(&self, p: f64) -> f64 {
        let n = self.n() as i32;
        let q = 1.0 - p;
        let mut sum = NeumaierSum::default();
        for (k, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                let k = k as i32;
                sum.add(c as f64 * p.powi(k) * q.powi(n - k));
            }
        }
        sum.value()
    }
}

/// Kahan-Babuška-Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `μ_p(S) = p^{|S|} (1-p)^{n-|S|}`.
pub fn mu_subset(ground: &GroundSet, s: SubsetMask, p: Prob) -> f64 {
    let k = s.len() as i32;
    let n = ground.len() as i32;
    p.get().powi(k) * (1.0 - p.get()).powi(n - k)
}

pub fn mu_family(family: &SetFamily, p: Prob) -> f64 {
    family.profile().eval(p.get())
}

pub fn mu_upper(upper: &UpperSetFamily, p: Prob) -> Result<f64> {
    Ok(upper.profile()?.eval(p.get()))
}

/// `P(X_p ∈ A | X_p ∈ B)` for `A ⊆ B`.
pub fn conditional(a: &SetFamily, b: &SetFamily, p: Prob) -> Result<f64> {
    check_nested(a, b)?;
    let mb = mu_family(b, p);
    if mb <= 0.0 {
        return Err(Error::NullEvent);
    }
    Ok(mu_family(a, p) / mb)
}

pub(crate) fn check_nested(a: &SetFamily, b: &SetFamily) -> Result<()> {
    a.same_ground(b)?;
    if a.is_subfamily_of(b) {
        Ok(())
    } else {
        Err(Error::NotSubfamily)
    }
}

/// The three profiles that determine `r_{A,B}` and the conditional bounds.
#[derive(Debug, Clone)]
pub struct RatioProfiles {
    pub a: CardinalityProfile,
    pub closure: CardinalityProfile,
    pub b: CardinalityProfile,
}

impl RatioProfiles {
    pub fn new(a: &SetFamily, closure: &UpperSetFamily, b: &SetFamily) -> Result<Self> {
        Ok(Self {
            a: a.profile(),
            closure: closure.profile()?.clone(),
            b: b.profile(),
        })
    }

    /// `r_{A,B}(p) = [μ_p(A) / μ_p(⟨A⟩)] / μ_p(B)`, for `p` in `(0, 1)`.
    pub fn ratio(&self, p: f64) -> f64 {
        self.a.eval(p) / self.closure.eval(p) / self.b.eval(p)
    }

    /// `P(X_p ∈ A | X_p ∈ B)`.
    pub fn conditional(&self, p: f64) -> f64 {
        self.a.eval(p) / self.b.eval(p)
    }
}

/// `r_{A,B}(p)`, the probability of `A` within its up-closure divided by the
/// probability of `B`. Undefined at the endpoints, where it may be `0/0`;
/// callers wanting limits evaluate at `δ` or `1-δ`.
pub fn r_ratio(a: &SetFamily, b: &SetFamily, p: Prob) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let p = p.require_interior()?;
    check_nested(a, b)?;
    let closure = UpperSetFamily::up_closure(a)?;
    Ok(RatioProfiles::new(a, &closure, b)?.ratio(p.get()))
}

/// The unique `p` with `μ_p(F) = 1/2`, by bisection on `[0, 1]` until the
/// bracket is narrower than `tol`.
pub fn p_critical(upper: &UpperSetFamily, tol: f64) -> Result<f64> {
    upper.require_nontrivial()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let profile = upper.profile()?;
    Ok(bisect_increasing(|p| profile.eval(p) >= 0.5, 0.0, 1.0, tol).midpoint())
}

/// Final bracket of a bisection: `pred(lo)` is false, `pred(hi)` is true.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn midpoint(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Bisection for the switch point of a predicate that is false below and true
/// above some point of `[lo, hi]`.
pub(crate) fn bisect_increasing<F: FnMut(f64) -> bool>(mut pred: F, mut lo: f64, mut hi: f64, tol: f64) -> Bracket {
    for _ in 0..MAX_BISECTION_ITERS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Bracket { lo, hi }
}

/// Checks `P(X ∈ ⟨A⟩) = P(X ∈ A | X ∈ B) P(X ∈ B) / P(X ∈ A | X ∈ ⟨A⟩)`
/// to within [`IDENTITY_TOL`] (relative to the magnitude of the sides).
pub fn verify_fraction_identity(a: &SetFamily, b: &SetFamily, p: Prob) -> Result<bool> {
    check_nested(a, b)?;
    let ma = mu_family(a, p);
    if ma <= 0.0 {
        return Err(Error::ZeroMeasure);
    }
    let closure = UpperSetFamily::up_closure(a)?;
    let m_closure = mu_upper(&closure, p)?;
    let mb = mu_family(b, p);
    let cond_b = ma / mb;
    let cond_closure = ma / m_closure;
    let rhs = cond_b * mb / cond_closure;
    Ok((m_closure - rhs).abs() <= IDENTITY_TOL * m_closure.max(1.0))
}
