//! Instance generators: the three-element worked example, subnetwork posets of
//! weighted graphs, and seeded random families and posets.

use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{GroundSet, SetFamily, SubsetMask, UpperSetFamily, DEFAULT_ENUMERATION_CAP};
use crate::poset::{FinitePoset, PosetEmbedding, PosetUpperSet, POSET_ELEMENT_CAP};

/// Which conditioning family to use for the worked example on `{a, b, c}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BVariant {
    /// `B = {∅, {a}, {c}, {a,c}}`, the event `b ∉ S`; consistent with both
    /// closed forms `r = 2 - 2/(2-p)` and `r ≡ 1`.
    #[default]
    Formula,
    /// The drawn shading, which also places `{b}` in `B`.
    Diagram,
}

impl std::str::FromStr for BVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formula" => Ok(BVariant::Formula),
            "diagram" => Ok(BVariant::Diagram),
            other => Err(Error::InvalidParameter(format!("unknown B variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WorkedExample {
    pub ground: Arc<GroundSet>,
    pub a: SetFamily,
    pub a_prime: SetFamily,
    pub b: SetFamily,
}

/// `X = {a,b,c}`, `A = {{a},{c}}`, `A′ = {{a},{c},{a,c}}` and `B` per variant.
pub fn worked_example(variant: BVariant) -> WorkedExample {
    let ground = Arc::new(GroundSet::alphabetic(3).expect("three labels"));
    let fam = |sets: &[&[&str]]| SetFamily::from_labels(ground.clone(), sets).expect("known labels");
    let b = match variant {
        BVariant::Formula => fam(&[&[], &["a"], &["c"], &["a", "c"]]),
        BVariant::Diagram => fam(&[&[], &["a"], &["b"], &["c"], &["a", "c"]]),
    };
    WorkedExample {
        a: fam(&[&["a"], &["c"]]),
        a_prime: fam(&[&["a"], &["c"], &["a", "c"]]),
        b,
        ground,
    }
}

/// A simple graph whose edges take weights from a finite set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub weights: Vec<String>,
}

impl WeightedGraphSpec {
    pub fn validate(&self) -> Result<()> {
        let vertices: HashSet<&str> = self.vertices.iter().map(String::as_str).collect();
        if vertices.len() != self.vertices.len() {
            return Err(Error::InvalidGraph("duplicate vertex".into()));
        }
        let mut seen = HashSet::new();
        for (u, v) in &self.edges {
            for w in [u, v] {
                if !vertices.contains(w.as_str()) {
                    return Err(Error::InvalidGraph(format!("edge uses unknown vertex `{w}`")));
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at `{u}`")));
            }
            let key = if u < v { (u, v) } else { (v, u) };
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("duplicate edge {u}-{v}")));
            }
        }
        let weights: HashSet<&str> = self.weights.iter().map(String::as_str).collect();
        if weights.is_empty() || weights.len() != self.weights.len() {
            return Err(Error::InvalidGraph("weights must be nonempty and distinct".into()));
        }
        Ok(())
    }

    /// `(|R| + 1)^{|E|}`, saturating.
    pub fn poset_size(&self) -> u128 {
        (self.weights.len() as u128 + 1).saturating_pow(self.edges.len() as u32)
    }

    fn edge_label(&self, e: usize) -> String {
        let (u, v) = &self.edges[e];
        format!("{u}-{v}")
    }
}

/// Label of a partial weighting: `{}` or `{u-v:r1,v-w:r2}`.
fn weighting_label(spec: &WeightedGraphSpec, assignment: &[Option<usize>]) -> String {
    let parts: Vec<String> = assignment
        .iter()
        .enumerate()
        .filter_map(|(e, w)| w.map(|w| format!("{}:{}", spec.edge_label(e), spec.weights[w])))
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// The poset of all partial weightings of the graph, ordered by containment
/// of their graphs `{(e, w(e))}` inside `E × R`, with the identity embedding
/// into `2^{E×R}`.
pub fn network_poset(spec: &WeightedGraphSpec) -> Result<(Arc<FinitePoset>, PosetEmbedding)> {
    spec.validate()?;
    let size = spec.poset_size();
    if size > 1u128 << DEFAULT_ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            n: (size as f64).log2().ceil() as usize,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    if size > POSET_ELEMENT_CAP as u128 {
        return Err(Error::PosetCap {
            size: size as usize,
            cap: POSET_ELEMENT_CAP,
        });
    }
    let r = spec.weights.len();
    let ground_labels: Vec<String> = (0..spec.edges.len())
        .flat_map(|e| spec.weights.iter().map(move |w| (e, w)))
        .map(|(e, w)| format!("{}:{}", spec.edge_label(e), w))
        .collect();
    let ground = Arc::new(GroundSet::new(ground_labels)?);

    // each edge is absent (digit 0) or carries weight digit-1
    let mut weightings: Vec<(SubsetMask, Vec<Option<usize>>)> = (0..size as usize)
        .map(|mut code| {
            let assignment: Vec<Option<usize>> = (0..spec.edges.len())
                .map(|_| {
                    let digit = code % (r + 1);
                    code /= r + 1;
                    digit.checked_sub(1)
                })
                .collect();
            let mask =
                SubsetMask::from_indices(assignment.iter().enumerate().filter_map(|(e, w)| w.map(|w| e * r + w)));
            (mask, assignment)
        })
        .collect();
    weightings.sort_by(|x, y| x.0.canonical_cmp(&y.0));

    let labels: Vec<String> = weightings.iter().map(|(_, a)| weighting_label(spec, a)).collect();
    let images: Vec<SubsetMask> = weightings.iter().map(|(m, _)| *m).collect();
    let m = images.len();
    let mut leq = vec![false; m * m];
    for i in 0..m {
        for j in 0..m {
            leq[i * m + j] = images[i].is_subset_of(images[j]);
        }
    }
    let poset = Arc::new(FinitePoset::from_matrix(&labels, leq)?);
    let embedding = PosetEmbedding::new(poset.clone(), ground, images)?;
    Ok((poset, embedding))
}

/// The up-closure of the named target elements.
pub fn target_upper_set<S: AsRef<str>>(poset: Arc<FinitePoset>, targets: &[S]) -> Result<PosetUpperSet> {
    let seeds = targets
        .iter()
        .map(|t| poset.index_of(t.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(PosetUpperSet::generated_by(poset, &seeds))
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {x}")))
    }
}

/// Up-closure of a Bernoulli(`density`) sample of nonempty generator sets.
///
/// `∅` is never a generator, so the result is never all of `2^X`; an empty
/// draw is redrawn from the same seeded stream.
pub fn random_upper_set(n: usize, density: f64, seed: u64) -> Result<UpperSetFamily> {
    check_unit("density", density)?;
    let ground = Arc::new(GroundSet::alphabetic(n)?);
    ground.require_enumerable()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let generators: Vec<SubsetMask> = (1u64..(1u64 << n))
            .map(SubsetMask)
            .filter(|_| rng.random_bool(density))
            .collect();
        if !generators.is_empty() {
            let family = SetFamily::new(ground.clone(), generators)?;
            return UpperSetFamily::up_closure(&family);
        }
    }
}

/// Up-closure of exactly `count` distinct nonempty generators drawn uniformly;
/// keeps `|F₀| ≤ count` for cover-DP-sized property tests.
pub fn random_upper_set_with_generators(n: usize, count: usize, seed: u64) -> Result<UpperSetFamily> {
    let ground = Arc::new(GroundSet::alphabetic(n)?);
    let available = (1u64 << n) - 1;
    if count == 0 || count as u64 > available {
        return Err(Error::InvalidParameter(format!(
            "cannot draw {count} generators on n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = HashSet::new();
    while chosen.len() < count {
        chosen.insert(SubsetMask(rng.random_range(1..=available)));
    }
    let mut generators: Vec<_> = chosen.into_iter().collect();
    generators.sort_by(SubsetMask::canonical_cmp);
    UpperSetFamily::up_closure(&SetFamily::new(ground, generators)?)
}

/// A random DAG on `m` elements (edge `i → j` for `i < j` with probability
/// `edge_prob`), closed reflexively and transitively.
pub fn random_poset(m: usize, edge_prob: f64, seed: u64) -> Result<FinitePoset> {
    if m == 0 || m > 24 {
        return Err(Error::InvalidParameter(format!(
            "poset size must be in 1..=24, got {m}"
        )));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParameter(format!(
            "edge_prob must lie in [0, 1], got {edge_prob}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();
    let mut pairs = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            if rng.random_bool(edge_prob) {
                pairs.push((labels[i].clone(), labels[j].clone()));
            }
        }
    }
    FinitePoset::from_pairs(&labels, &pairs, crate::poset::Closure::Covers)
}

/// A uniformly random injection of `poset` into `2^X` with `|X| = n`.
pub fn random_embedding(poset: Arc<FinitePoset>, n: usize, seed: u64) -> Result<PosetEmbedding> {
    let ground = Arc::new(GroundSet::alphabetic(n)?);
    ground.require_enumerable()?;
    if poset.len() as u64 > 1u64 << n {
        return Err(Error::InvalidParameter(format!(
            "cannot inject {} elements into 2^{n}",
            poset.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = HashSet::new();
    let mut images = Vec::with_capacity(poset.len());
    while images.len() < poset.len() {
        let s = SubsetMask(rng.random_range(0..(1u64 << n)));
        if chosen.insert(s) {
            images.push(s);
        }
    }
    PosetEmbedding::new(poset, ground, images)
}

/// A random nested pair `∅ ≠ A ⊆ B ⊆ 2^X` with `∅ ∉ A` and `|A| ≤ max_a`.
pub fn random_nested_pair(n: usize, max_a: usize, seed: u64) -> Result<(SetFamily, SetFamily)> {
    let ground = Arc::new(GroundSet::alphabetic(n)?);
    ground.require_enumerable()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nonempty: Vec<SubsetMask> = (1u64..(1u64 << n)).map(SubsetMask).collect();
    nonempty.shuffle(&mut rng);
    let a_len = rng.random_range(1..=max_a.clamp(1, nonempty.len()));
    let a = SetFamily::new(ground.clone(), nonempty[..a_len].iter().copied())?;
    let extra_prob = rng.random_range(0.05..0.6);
    let extra: Vec<SubsetMask> = (0u64..(1u64 << n))
        .map(SubsetMask)
        .filter(|_| rng.random_bool(extra_prob))
        .collect();
    let b = a.union(&SetFamily::new(ground, extra)?)?;
    Ok((a, b))
}
