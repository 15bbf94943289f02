//! Ground sets, subset bitmasks, set families and upper sets in `2^X`.
//!
//! Subsets are stored as 64-bit masks indexed by label position. Families keep
//! their members in canonical order (by cardinality, then lexicographically by
//! member index) so that membership tests are binary searches and serialized
//! output is deterministic.

use std::cmp::{Ordering, Reverse};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::measure::CardinalityProfile;

/// Default bound on `|X|` for operations that enumerate all of `2^X`.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Widest ground set representable by a [`SubsetMask`].
pub const MAX_GROUND: usize = 64;

/// A finite, labelled ground set `X`.
#[derive(Clone)]
pub struct GroundSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    cap: usize,
}

impl GroundSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_cap(labels, DEFAULT_ENUMERATION_CAP)
    }

    /// Builds a ground set with a custom enumeration cap.
    ///
    /// The cap only gates operations that walk all of `2^X`; membership tests
    /// and sampling work for any ground set of up to [`MAX_GROUND`] elements.
    pub fn with_cap<I, S>(labels: I, cap: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyGround);
        }
        if labels.len() > MAX_GROUND {
            return Err(Error::GroundTooWide(labels.len()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self {
            labels,
            index,
            cap: cap.min(MAX_GROUND),
        })
    }

    /// Ground set labelled `a, b, c, ...` (then `x26, x27, ...`).
    pub fn alphabetic(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| {
            if i < 26 {
                char::from(b'a' + i as u8).to_string()
            } else {
                format!("x{i}")
            }
        }))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn enumeration_cap(&self) -> usize {
        self.cap
    }

    /// Fails unless `2^X` may be enumerated under the configured cap.
    pub fn require_enumerable(&self) -> Result<()> {
        if self.len() > self.cap {
            Err(Error::EnumerationCap {
                n: self.len(),
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    pub fn full_mask(&self) -> SubsetMask {
        SubsetMask::full(self.len())
    }

    pub fn mask_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<SubsetMask> {
        labels
            .iter()
            .try_fold(SubsetMask::EMPTY, |acc, l| Ok(acc.with(self.index_of(l.as_ref())?)))
    }

    pub fn labels_of(&self, mask: SubsetMask) -> Vec<&str> {
        mask.iter().map(|i| self.label(i)).collect()
    }

    pub fn check_mask(&self, mask: SubsetMask) -> Result<()> {
        if mask.0 & !self.full_mask().0 != 0 {
            Err(Error::MaskOutOfRange(mask.0))
        } else {
            Ok(())
        }
    }

    /// All `2^n` subsets in increasing bit order.
    pub fn all_subsets(&self) -> Result<impl Iterator<Item = SubsetMask>> {
        self.require_enumerable()?;
        Ok((0..(1u64 << self.len())).map(SubsetMask))
    }
}

impl PartialEq for GroundSet {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for GroundSet {}

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("GroundSet").field(&self.labels).finish()
    }
}

/// A subset of a ground set, as a bitmask over label positions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SubsetMask(pub u64);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            SubsetMask(u64::MAX)
        } else {
            SubsetMask((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        SubsetMask(1u64 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(Self::EMPTY, Self::with)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        SubsetMask(self.0 | 1u64 << i)
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset_of(self, other: SubsetMask) -> bool {
        self != other && self.is_subset_of(other)
    }

    pub fn union(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersection(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 & other.0)
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// Canonical order: by cardinality, then lexicographically by index list.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        (self.len(), Reverse(self.0.reverse_bits())).cmp(&(other.len(), Reverse(other.0.reverse_bits())))
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite family of subsets of one ground set, deduplicated and kept in
/// canonical order.
#[derive(Clone, PartialEq, Eq)]
pub struct SetFamily {
    ground: Arc<GroundSet>,
    sets: Vec<SubsetMask>,
}

impl SetFamily {
    pub fn new<I>(ground: Arc<GroundSet>, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = SubsetMask>,
    {
        let mut sets: Vec<SubsetMask> = sets.into_iter().collect();
        for &s in &sets {
            ground.check_mask(s)?;
        }
        sets.sort_by(SubsetMask::canonical_cmp);
        sets.dedup();
        Ok(Self { ground, sets })
    }

    pub fn empty(ground: Arc<GroundSet>) -> Self {
        Self {
            ground,
            sets: Vec::new(),
        }
    }

    /// Builds a family from label lists, e.g. `[["a"], ["c"]]`.
    pub fn from_labels<L, S>(ground: Arc<GroundSet>, sets: &[L]) -> Result<Self>
    where
        L: AsRef<[S]>,
        S: AsRef<str>,
    {
        let masks = sets
            .iter()
            .map(|s| ground.mask_of(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ground, masks)
    }

    /// The whole power set `2^X`.
    pub fn power_set(ground: Arc<GroundSet>) -> Result<Self> {
        let sets: Vec<_> = ground.all_subsets()?.collect();
        Self::new(ground, sets)
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn sets(&self) -> &[SubsetMask] {
        &self.sets
    }

    pub fn iter(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        self.sets.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, s: SubsetMask) -> bool {
        self.sets.binary_search_by(|m| m.canonical_cmp(&s)).is_ok()
    }

    pub fn same_ground(&self, other: &SetFamily) -> Result<()> {
        if Arc::ptr_eq(&self.ground, &other.ground) || self.ground == other.ground {
            Ok(())
        } else {
            Err(Error::GroundMismatch)
        }
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.sets.iter().all(|&s| other.contains(s))
    }

    pub fn union(&self, other: &SetFamily) -> Result<SetFamily> {
        self.same_ground(other)?;
        SetFamily::new(self.ground.clone(), self.iter().chain(other.iter()))
    }

    pub fn profile(&self) -> CardinalityProfile {
        CardinalityProfile::from_sets(self.ground.len(), self.iter())
    }

    /// Member sets as label lists, in canonical order.
    pub fn to_labels(&self) -> Vec<Vec<String>> {
        self.sets
            .iter()
            .map(|&s| s.iter().map(|i| self.ground.label(i).to_string()).collect())
            .collect()
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.sets.iter().map(|&s| self.ground.labels_of(s)))
            .finish()
    }
}

/// An up-closed family, stored implicitly through its minimal elements.
///
/// Membership of `T` is decided by testing whether some minimal element is a
/// subset of `T`; [`UpperSetFamily::to_family`] materializes the members.
#[derive(Clone)]
pub struct UpperSetFamily {
    minimal: SetFamily,
    ell0: usize,
    profile: OnceLock<CardinalityProfile>,
}

impl UpperSetFamily {
    /// Builds the upper set whose minimal elements are the minimal members of
    /// `generators`.
    pub fn up_closure(generators: &SetFamily) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyGenerator);
        }
        // canonical order visits smaller sets first, so a set is minimal iff
        // no previously kept set is contained in it
        let mut kept: Vec<SubsetMask> = Vec::new();
        for s in generators.iter() {
            if !kept.iter().any(|m| m.is_subset_of(s)) {
                kept.push(s);
            }
        }
        let minimal = SetFamily::new(generators.ground.clone(), kept)?;
        let ell0 = minimal.iter().map(SubsetMask::len).max().unwrap_or(0);
        Ok(Self {
            minimal,
            ell0,
            profile: OnceLock::new(),
        })
    }

    /// Interprets `family` as an upper set, failing unless it is up-closed.
    pub fn from_upper_family(family: &SetFamily) -> Result<Self> {
        let upper = Self::up_closure(family)?;
        let n = upper.ground().len();
        for s in family.iter() {
            for i in 0..n {
                if !s.contains(i) && !family.contains(s.with(i)) {
                    return Err(Error::InvalidParameter(format!(
                        "family is not up-closed: {:?} is missing superset {:?}",
                        family.ground.labels_of(s),
                        family.ground.labels_of(s.with(i)),
                    )));
                }
            }
        }
        Ok(upper)
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        self.minimal.ground()
    }

    /// The minimal elements `F₀`.
    pub fn minimal_elements(&self) -> &SetFamily {
        &self.minimal
    }

    /// `(ℓ₀, ℓ)`: the largest minimal-element size, and `max(ℓ₀, 2)`.
    pub fn ell_stats(&self) -> (usize, usize) {
        (self.ell0, self.ell0.max(2))
    }

    pub fn ell0(&self) -> usize {
        self.ell0
    }

    pub fn contains(&self, s: SubsetMask) -> bool {
        self.minimal.iter().any(|m| m.is_subset_of(s))
    }

    /// True when the family is all of `2^X` (its only minimal element is ∅).
    /// An `UpperSetFamily` is never empty.
    pub fn is_trivial(&self) -> bool {
        self.minimal.sets().first().is_some_and(|m| m.is_empty())
    }

    pub fn require_nontrivial(&self) -> Result<()> {
        if self.is_trivial() {
            Err(Error::TrivialUpperSet)
        } else {
            Ok(())
        }
    }

    pub fn to_family(&self) -> Result<SetFamily> {
        let members: Vec<_> = self.ground().all_subsets()?.filter(|&s| self.contains(s)).collect();
        SetFamily::new(self.ground().clone(), members)
    }

    /// Number of members of each cardinality; requires enumerating `2^X`.
    pub fn profile(&self) -> Result<&CardinalityProfile> {
        self.ground().require_enumerable()?;
        Ok(self.profile.get_or_init(|| {
            let n = self.ground().len();
            let mut counts = vec![0u64; n + 1];
            for s in (0..(1u64 << n)).map(SubsetMask) {
                if self.contains(s) {
                    counts[s.len()] += 1;
                }
            }
            CardinalityProfile::from_counts(counts)
        }))
    }
}

impl PartialEq for UpperSetFamily {
    fn eq(&self, other: &Self) -> bool {
        self.minimal == other.minimal
    }
}

impl fmt::Debug for UpperSetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UpperSetFamily")
            .field("minimal", &self.minimal)
            .finish()
    }
}

/// Whether `sub` is an upper set within `ambient` under containment: every
/// member of `ambient` that contains a member of `sub` is itself in `sub`.
pub fn is_upper_in(sub: &SetFamily, ambient: &SetFamily) -> Result<bool> {
    sub.same_ground(ambient)?;
    if !sub.is_subfamily_of(ambient) {
        return Err(Error::NotSubfamily);
    }
    Ok(ambient
        .iter()
        .filter(|&t| !sub.contains(t))
        .all(|t| !sub.iter().any(|s| s.is_subset_of(t))))
}
