//! Minimum-cost covers, `p`-smallness and the expectation threshold `q(F)`.
//!
//! A family `G` covers an upper set `F` when `F ⊆ ∪_{S∈G} ⟨S⟩`, at cost
//! `Σ_{S∈G} p^{|S|}`. Two reductions make the exact minimum computable:
//!
//! * `G` covers `F` iff it covers the minimal elements `F₀`, since every member
//!   of `F` contains some minimal element and `⟨S⟩` is up-closed.
//! * If `S ∈ G` covers the group `M ⊆ F₀` (the minimal elements containing
//!   `S`), then `S ⊆ ∩M`, and replacing `S` by `∩M` covers the same group at
//!   cost `p^{|∩M|} ≤ p^{|S|}`.
//!
//! Hence the minimum is taken over partitions of `F₀` into groups, each group
//! `M` paying `p^{|∩M|}`, and a subset DP over `F₀` finds it exactly.
//! Overlapping groups never help because every cost is positive.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{SetFamily, SubsetMask, UpperSetFamily};
use crate::measure::{bisect_increasing, Prob};

/// Default bound on `|F₀|` for the exact cover DP.
pub const DEFAULT_COVER_CAP: usize = 16;

/// Default bracket width for [`q_threshold`].
pub const DEFAULT_Q_TOL: f64 = 1e-12;

/// A cover certificate for an upper set.
#[derive(Debug, Clone)]
pub struct Cover {
    target: UpperSetFamily,
    members: SetFamily,
    evaluated_at: Option<(f64, f64)>,
}

impl Cover {
    /// Wraps `members` as a cover of `target`, checking the covering condition.
    pub fn new(target: UpperSetFamily, members: SetFamily) -> Result<Self> {
        members.same_ground(target.minimal_elements())?;
        let cover = Self {
            target,
            members,
            evaluated_at: None,
        };
        if !cover.is_valid() {
            return Err(Error::InvalidParameter(
                "family does not cover every minimal element".into(),
            ));
        }
        Ok(cover)
    }

    fn with_cost(mut self, p: f64) -> Self {
        self.evaluated_at = Some((p, self.cost(p)));
        self
    }

    pub fn target(&self) -> &UpperSetFamily {
        &self.target
    }

    pub fn members(&self) -> &SetFamily {
        &self.members
    }

    /// The `(p, cost)` pair this certificate was produced for, if any.
    pub fn evaluated_at(&self) -> Option<(f64, f64)> {
        self.evaluated_at
    }

    pub fn cost(&self, p: f64) -> f64 {
        self.members.iter().map(|s| p.powi(s.len() as i32)).sum()
    }

    /// Every minimal element of the target contains some member.
    pub fn is_valid(&self) -> bool {
        self.target
            .minimal_elements()
            .iter()
            .all(|m| self.members.iter().any(|s| s.is_subset_of(m)))
    }

    /// No member can be dropped without uncovering some minimal element.
    pub fn is_irredundant(&self) -> bool {
        let minimal = self.target.minimal_elements();
        self.members.iter().all(|s| {
            minimal
                .iter()
                .any(|m| s.is_subset_of(m) && !self.members.iter().any(|t| t != s && t.is_subset_of(m)))
        })
    }
}

fn check_cover_input(upper: &UpperSetFamily, p: Prob) -> Result<f64> {
    upper.require_nontrivial()?;
    Ok(p.require_interior()?.get())
}

/// Exact minimum of `Σ p^{|∩M|}` over partitions of `F₀`.
struct PartitionDp {
    minimal: Vec<SubsetMask>,
    /// Cardinality of the intersection of each group, indexed by group mask.
    meet_size: Vec<u8>,
}

impl PartitionDp {
    fn new(upper: &UpperSetFamily, cap: usize) -> Result<Self> {
        let minimal: Vec<SubsetMask> = upper.minimal_elements().iter().collect();
        let k = minimal.len();
        if k > cap {
            return Err(Error::CoverCap { count: k, cap });
        }
        let full = upper.ground().full_mask();
        let mut meet = vec![full; 1 << k];
        let mut meet_size = vec![0u8; 1 << k];
        meet_size[0] = full.len() as u8;
        for group in 1usize..(1 << k) {
            let low = group.trailing_zeros() as usize;
            meet[group] = meet[group & (group - 1)].intersection(minimal[low]);
            meet_size[group] = meet[group].len() as u8;
        }
        Ok(Self { minimal, meet_size })
    }

    fn solve(&self, p: f64) -> (f64, Vec<SubsetMask>) {
        let k = self.minimal.len();
        let n_states = 1usize << k;
        let powers: Vec<f64> = (0..=64).map(|j| p.powi(j)).collect();
        let mut best = vec![f64::INFINITY; n_states];
        let mut choice = vec![0usize; n_states];
        best[0] = 0.0;
        for state in 1..n_states {
            // the lowest remaining element must join some group; enumerate it
            let low = state & state.wrapping_neg();
            let rest = state ^ low;
            let mut sub = rest;
            loop {
                let group = sub | low;
                let v = powers[self.meet_size[group] as usize] + best[state ^ group];
                if v < best[state] {
                    best[state] = v;
                    choice[state] = group;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        let mut members = Vec::new();
        let mut state = n_states - 1;
        while state != 0 {
            let group = choice[state];
            members.push(self.meet(group));
            state ^= group;
        }
        (best[n_states - 1], members)
    }

    fn meet(&self, group: usize) -> SubsetMask {
        (0..self.minimal.len())
            .filter(|i| group >> i & 1 == 1)
            .map(|i| self.minimal[i])
            .fold(SubsetMask(u64::MAX), SubsetMask::intersection)
    }
}

fn certificate(upper: &UpperSetFamily, members: Vec<SubsetMask>, p: f64) -> Result<Cover> {
    let members = SetFamily::new(Arc::clone(upper.ground()), members)?;
    Ok(Cover::new(upper.clone(), members)?.with_cost(p))
}

/// Exact minimum cover cost at `p`, with an optimal certificate.
pub fn min_cover_cost(upper: &UpperSetFamily, p: Prob) -> Result<(f64, Cover)> {
    min_cover_cost_capped(upper, p, DEFAULT_COVER_CAP)
}

pub fn min_cover_cost_capped(upper: &UpperSetFamily, p: Prob, cap: usize) -> Result<(f64, Cover)> {
    let p = check_cover_input(upper, p)?;
    let (cost, members) = PartitionDp::new(upper, cap)?.solve(p);
    Ok((cost, certificate(upper, members, p)?))
}

/// Whether some cover has cost at most 1/2.
pub fn is_p_small(upper: &UpperSetFamily, p: Prob) -> Result<bool> {
    Ok(min_cover_cost(upper, p)?.0 <= 0.5)
}

/// The expectation threshold: the largest `p` at which `F` is `p`-small.
///
/// The minimum cover cost is continuous and nondecreasing in `p`, tends to 0
/// as `p → 0` and is at least 1 at `p = 1`, so bisection brackets the switch
/// point. The returned value is the `p`-small end of the final bracket, and
/// the certificate is optimal there (its cost is at most 1/2).
pub fn q_threshold(upper: &UpperSetFamily, tol: f64) -> Result<(f64, Cover)> {
    q_threshold_capped(upper, tol, DEFAULT_COVER_CAP)
}

pub fn q_threshold_capped(upper: &UpperSetFamily, tol: f64, cap: usize) -> Result<(f64, Cover)> {
    upper.require_nontrivial()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let dp = PartitionDp::new(upper, cap)?;
    let bracket = bisect_increasing(|p| dp.solve(p).0 > 0.5, 0.0, 1.0, tol);
    let q = bracket.lo;
    if q <= 0.0 {
        // only reachable when tol >= 1/2; fall back to the bracket midpoint
        let mid = bracket.midpoint();
        let (_, members) = dp.solve(mid);
        return Ok((mid, certificate(upper, members, mid)?));
    }
    let (_, members) = dp.solve(q);
    Ok((q, certificate(upper, members, q)?))
}

/// Greedy upper bound on the minimum cover cost.
///
/// Starts from the cover `F₀` itself and repeatedly merges the pair of groups
/// whose merged intersection saves the most cost, stopping when no merge
/// helps. The result is always a valid cover, so its cost is never below the
/// exact minimum; it can certify `p`-smallness but never its absence.
pub fn greedy_cover_cost(upper: &UpperSetFamily, p: Prob) -> Result<(f64, Cover)> {
    let p = check_cover_input(upper, p)?;
    let mut groups: Vec<SubsetMask> = upper.minimal_elements().iter().collect();
    let cost = |s: SubsetMask| p.powi(s.len() as i32);
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                let merged = groups[i].intersection(groups[j]);
                let saving = cost(groups[i]) + cost(groups[j]) - cost(merged);
                if saving > 0.0 && best.is_none_or(|(s, _, _)| saving > s) {
                    best = Some((saving, i, j));
                }
            }
        }
        match best {
            Some((_, i, j)) => {
                let merged = groups[i].intersection(groups[j]);
                groups.swap_remove(j);
                groups[i] = merged;
            }
            None => break,
        }
    }
    let cover = certificate(upper, groups, p)?;
    Ok((cover.cost(p), cover))
}

/// JSON form of a certificate: the family format plus the cost at `q`.
#[derive(Debug, Clone, Serialize)]
pub struct CoverRecord {
    pub ground: Vec<String>,
    pub sets: Vec<Vec<String>>,
    pub cost_at_q: f64,
}

impl CoverRecord {
    pub fn new(cover: &Cover, q: f64) -> Self {
        Self {
            ground: cover.members().ground().labels().to_vec(),
            sets: cover.members().to_labels(),
            cost_at_q: cover.cost(q),
        }
    }
}
