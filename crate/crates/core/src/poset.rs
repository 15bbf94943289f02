//! Finite posets, their upper sets, injections into `2^X`, and the induced
//! random variable `Y_p` with distribution proportional to `μ_p ∘ f`.
//!
//! For an injective `f` the σ-algebra generated by `f` is the full power set of
//! `P`, so every subset of `P` is treated as an event.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::bounds::{ConditionalReport, ConditionalSetup, ReportOptions};
use crate::error::{Error, Result};
use crate::family::{GroundSet, SetFamily, SubsetMask};
use crate::measure::{conditional, mu_subset, NeumaierSum, Prob};

/// Largest poset whose order relation is materialized.
pub const POSET_ELEMENT_CAP: usize = 4096;

/// Agreement threshold for [`verify_rv_conversion`].
pub const CONVERSION_TOL: f64 = 1e-12;

/// How the pairs of a relation are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Closure {
    /// Covering (or any generating) pairs; the reflexive-transitive closure
    /// is taken.
    #[default]
    Covers,
    /// The full order; reflexive pairs may be omitted, everything else must
    /// already be transitive.
    Full,
}

/// A finite partial order on labelled elements.
#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoset {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<bool>,
}

impl FinitePoset {
    /// Builds a poset from `(lower, upper)` label pairs.
    pub fn from_pairs<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)], closure: Closure) -> Result<Self> {
        let (elements, index) = index_elements(elements)?;
        let m = elements.len();
        let mut leq = vec![false; m * m];
        for i in 0..m {
            leq[i * m + i] = true;
        }
        for (x, y) in pairs {
            let i = lookup(&index, x.as_ref())?;
            let j = lookup(&index, y.as_ref())?;
            leq[i * m + j] = true;
        }
        if closure == Closure::Covers {
            // Warshall
            for k in 0..m {
                for i in 0..m {
                    if leq[i * m + k] {
                        for j in 0..m {
                            if leq[k * m + j] {
                                leq[i * m + j] = true;
                            }
                        }
                    }
                }
            }
        }
        Self::from_matrix_parts(elements, index, leq)
    }

    /// Builds a poset from a row-major `m × m` relation matrix, checking all
    /// three order axioms.
    pub fn from_matrix<S: AsRef<str>>(elements: &[S], leq: Vec<bool>) -> Result<Self> {
        let (elements, index) = index_elements(elements)?;
        if leq.len() != elements.len() * elements.len() {
            return Err(Error::InvalidParameter("relation matrix has the wrong size".into()));
        }
        Self::from_matrix_parts(elements, index, leq)
    }

    fn from_matrix_parts(elements: Vec<String>, index: HashMap<String, usize>, leq: Vec<bool>) -> Result<Self> {
        let poset = Self { elements, index, leq };
        poset.check_axioms()?;
        Ok(poset)
    }

    fn check_axioms(&self) -> Result<()> {
        let m = self.len();
        for i in 0..m {
            if !self.leq(i, i) {
                return Err(Error::NotReflexive(self.elements[i].clone()));
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if self.leq(i, j) && self.leq(j, i) {
                    return Err(Error::NotAntisymmetric(
                        self.elements[i].clone(),
                        self.elements[j].clone(),
                    ));
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                if i == j || !self.leq(i, j) {
                    continue;
                }
                for k in 0..m {
                    if self.leq(j, k) && !self.leq(i, k) {
                        return Err(Error::NotTransitive(
                            self.elements[i].clone(),
                            self.elements[j].clone(),
                            self.elements[k].clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        lookup(&self.index, label)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.leq(i, j)))
            .collect()
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.leq(j, i)))
            .collect()
    }

    /// The up-closure of `seeds` within the poset.
    pub fn up_closure(&self, seeds: &[usize]) -> Vec<bool> {
        (0..self.len()).map(|y| seeds.iter().any(|&x| self.leq(x, y))).collect()
    }

    /// Whether `x ≤ y` and `y ≤ x` imply isomorphic orders under `map`.
    pub fn is_order_isomorphic_to(&self, other: &FinitePoset, map: &[usize]) -> bool {
        map.len() == self.len()
            && other.len() == self.len()
            && (0..self.len()).all(|i| (0..self.len()).all(|j| self.leq(i, j) == other.leq(map[i], map[j])))
    }
}

impl std::fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pairs: Vec<_> = (0..self.len())
            .flat_map(|i| (0..self.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.leq(i, j))
            .map(|(i, j)| (&self.elements[i], &self.elements[j]))
            .collect();
        f.debug_struct("FinitePoset")
            .field("elements", &self.elements)
            .field("strict", &pairs)
            .finish()
    }
}

fn index_elements<S: AsRef<str>>(elements: &[S]) -> Result<(Vec<String>, HashMap<String, usize>)> {
    if elements.len() > POSET_ELEMENT_CAP {
        return Err(Error::PosetCap {
            size: elements.len(),
            cap: POSET_ELEMENT_CAP,
        });
    }
    let elements: Vec<String> = elements.iter().map(|e| e.as_ref().to_string()).collect();
    let mut index = HashMap::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        if index.insert(e.clone(), i).is_some() {
            return Err(Error::DuplicateElement(e.clone()));
        }
    }
    Ok((elements, index))
}

fn lookup(index: &HashMap<String, usize>, label: &str) -> Result<usize> {
    index
        .get(label)
        .copied()
        .ok_or_else(|| Error::UnknownElement(label.to_string()))
}

/// An upper set of a finite poset.
#[derive(Debug, Clone, PartialEq)]
pub struct PosetUpperSet {
    poset: Arc<FinitePoset>,
    members: Vec<bool>,
}

impl PosetUpperSet {
    pub fn new(poset: Arc<FinitePoset>, members: Vec<bool>) -> Result<Self> {
        if members.len() != poset.len() {
            return Err(Error::InvalidParameter("membership vector has the wrong length".into()));
        }
        for x in (0..poset.len()).filter(|&x| members[x]) {
            if let Some(y) = (0..poset.len()).find(|&y| poset.leq(x, y) && !members[y]) {
                return Err(Error::NotUpperSet {
                    lower: poset.elements[x].clone(),
                    upper: poset.elements[y].clone(),
                });
            }
        }
        Ok(Self { poset, members })
    }

    pub fn from_labels<S: AsRef<str>>(poset: Arc<FinitePoset>, labels: &[S]) -> Result<Self> {
        let mut members = vec![false; poset.len()];
        for l in labels {
            members[poset.index_of(l.as_ref())?] = true;
        }
        Self::new(poset, members)
    }

    /// Up-closure of `seeds` inside the poset.
    pub fn generated_by(poset: Arc<FinitePoset>, seeds: &[usize]) -> Self {
        let members = poset.up_closure(seeds);
        Self { poset, members }
    }

    pub fn poset(&self) -> &Arc<FinitePoset> {
        &self.poset
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members[i]
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| self.members[i]).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.members()
            .into_iter()
            .map(|i| self.poset.elements[i].as_str())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An injection `f: P → 2^X`. Order preservation is not required.
#[derive(Debug, Clone, PartialEq)]
pub struct PosetEmbedding {
    poset: Arc<FinitePoset>,
    ground: Arc<GroundSet>,
    images: Vec<SubsetMask>,
}

impl PosetEmbedding {
    pub fn new(poset: Arc<FinitePoset>, ground: Arc<GroundSet>, images: Vec<SubsetMask>) -> Result<Self> {
        if images.len() != poset.len() {
            return Err(Error::InvalidParameter("one image per element is required".into()));
        }
        let mut seen: HashMap<SubsetMask, usize> = HashMap::new();
        for (i, &img) in images.iter().enumerate() {
            ground.check_mask(img)?;
            if let Some(&j) = seen.get(&img) {
                return Err(Error::NotInjective(
                    poset.elements[j].clone(),
                    poset.elements[i].clone(),
                ));
            }
            seen.insert(img, i);
        }
        Ok(Self { poset, ground, images })
    }

    /// Builds an embedding from `element → labels` pairs.
    pub fn from_label_map(
        poset: Arc<FinitePoset>,
        ground: Arc<GroundSet>,
        map: &HashMap<String, Vec<String>>,
    ) -> Result<Self> {
        for key in map.keys() {
            poset.index_of(key)?;
        }
        let images = poset
            .elements()
            .iter()
            .map(|e| {
                let labels = map.get(e).ok_or_else(|| Error::MissingImage(e.clone()))?;
                ground.mask_of(labels)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(poset, ground, images)
    }

    pub fn poset(&self) -> &Arc<FinitePoset> {
        &self.poset
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn image(&self, i: usize) -> SubsetMask {
        self.images[i]
    }

    pub fn images(&self) -> &[SubsetMask] {
        &self.images
    }

    /// `f(S)` for a set of element indices.
    pub fn image_family<I: IntoIterator<Item = usize>>(&self, elements: I) -> Result<SetFamily> {
        SetFamily::new(self.ground.clone(), elements.into_iter().map(|i| self.images[i]))
    }

    /// `f(P)`.
    pub fn image_of_poset(&self) -> Result<SetFamily> {
        self.image_family(0..self.poset.len())
    }

    pub fn is_order_embedding(&self) -> bool {
        let m = self.poset.len();
        (0..m).all(|i| (0..m).all(|j| self.poset.leq(i, j) == self.images[i].is_subset_of(self.images[j])))
    }
}

/// `f(x) = {y : y ≤ x}` over the ground set `P`; injective by antisymmetry
/// and an order embedding in both directions.
pub fn principal_downset_embedding(poset: Arc<FinitePoset>) -> Result<PosetEmbedding> {
    let ground = Arc::new(GroundSet::new(poset.elements().iter().cloned())?);
    let m = poset.len();
    let images = (0..m)
        .map(|x| SubsetMask::from_indices((0..m).filter(|&y| poset.leq(y, x))))
        .collect();
    PosetEmbedding::new(poset, ground, images)
}

/// The law of `Y_p`: `weight(x) = μ_p(f(x)) / μ_p(f(P))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YpDistribution {
    pub p: f64,
    pub weights: Vec<f64>,
}

impl YpDistribution {
    /// `P(Y_p ∈ S)`.
    pub fn probability<I: IntoIterator<Item = usize>>(&self, event: I) -> f64 {
        event
            .into_iter()
            .map(|i| self.weights[i])
            .collect::<NeumaierSum>()
            .value()
    }
}

pub fn y_p_distribution(f: &PosetEmbedding, p: Prob) -> Result<YpDistribution> {
    let raw: Vec<f64> = f.images.iter().map(|&s| mu_subset(&f.ground, s, p)).collect();
    let total = raw.iter().copied().collect::<NeumaierSum>().value();
    if total <= 0.0 {
        return Err(Error::NullEvent);
    }
    Ok(YpDistribution {
        p: p.get(),
        weights: raw.into_iter().map(|w| w / total).collect(),
    })
}

/// Checks `P(Y_p ∈ S) = P(X_p ∈ f(S) | X_p ∈ f(P))`, the left side from the
/// `Y_p` law and the right side from the product measure on `2^X`.
pub fn verify_rv_conversion(f: &PosetEmbedding, event: &[usize], p: Prob) -> Result<bool> {
    let left = y_p_distribution(f, p)?.probability(event.iter().copied());
    let right = conditional(&f.image_family(event.iter().copied())?, &f.image_of_poset()?, p)?;
    Ok((left - right).abs() <= CONVERSION_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineStatus {
    /// Gate below 1: the floor and intervals carry a guarantee.
    Ok,
    /// Gate at least 1: the quantities are reported without an interval claim.
    HypothesisUnmet,
}

/// `P(Y_p ∈ U)` evaluated exactly at the midpoint of a reported interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpotCheck {
    pub p: f64,
    pub probability: f64,
    pub required: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub status: PipelineStatus,
    pub upper_set: Vec<String>,
    pub a_size: usize,
    pub b_size: usize,
    pub conditional: ConditionalReport,
    pub spot_checks: Vec<SpotCheck>,
}

/// Pushes `U ⊆ P` through `f` and runs the conditional machinery on
/// `A = f(U) ⊆ B = f(P)`, so that `P(A | B)` is `P(Y_p ∈ U)`.
pub fn extension_pipeline(
    upper: &PosetUpperSet,
    f: &PosetEmbedding,
    options: &ReportOptions,
) -> Result<PipelineReport> {
    if upper.poset() != f.poset() {
        return Err(Error::InvalidParameter(
            "upper set and embedding use different posets".into(),
        ));
    }
    let u = upper.members();
    let a = f.image_family(u.iter().copied())?;
    let b = f.image_of_poset()?;
    let setup = ConditionalSetup::new(&a, &b, options.k)?;
    let gate_ok = setup.gate() < 1.0;
    let mut opts = options.clone();
    if !gate_ok {
        opts.eps = None;
    }
    let report = setup.report(&opts)?;
    let mut spot_checks = Vec::new();
    if let Some(eps) = opts.eps {
        for iv in &report.intervals {
            let p = iv.midpoint();
            let probability = y_p_distribution(f, Prob::new(p)?)?.probability(u.iter().copied());
            spot_checks.push(SpotCheck {
                p,
                probability,
                required: 1.0 - eps,
                passed: probability > 1.0 - eps,
            });
        }
    }
    Ok(PipelineReport {
        status: if gate_ok {
            PipelineStatus::Ok
        } else {
            PipelineStatus::HypothesisUnmet
        },
        upper_set: upper.labels().into_iter().map(String::from).collect(),
        a_size: a.len(),
        b_size: b.len(),
        conditional: report,
        spot_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::is_upper_in;

    fn chain3() -> Arc<FinitePoset> {
        Arc::new(FinitePoset::from_pairs(&["a", "b", "c"], &[("a", "b"), ("b", "c")], Closure::Covers).unwrap())
    }

    fn diamond() -> Arc<FinitePoset> {
        Arc::new(
            FinitePoset::from_pairs(
                &["0", "x", "y", "1"],
                &[("0", "x"), ("0", "y"), ("x", "1"), ("y", "1")],
                Closure::Covers,
            )
            .unwrap(),
        )
    }

    /// The family B = {∅, {a}, {c}, {a,c}} as an abstract poset under containment,
    /// identically embedded into 2^{a,b,c}.
    fn b_poset() -> (Arc<FinitePoset>, PosetEmbedding) {
        let poset = Arc::new(
            FinitePoset::from_pairs(
                &["0", "a", "c", "ac"],
                &[("0", "a"), ("0", "c"), ("a", "ac"), ("c", "ac")],
                Closure::Covers,
            )
            .unwrap(),
        );
        let ground = Arc::new(GroundSet::alphabetic(3).unwrap());
        let images = ["", "a", "c", "ac"]
            .iter()
            .map(|s| {
                ground
                    .mask_of(&s.chars().map(|c| c.to_string()).collect::<Vec<_>>())
                    .unwrap()
            })
            .collect();
        let f = PosetEmbedding::new(poset.clone(), ground, images).unwrap();
        (poset, f)
    }

    #[test]
    fn axioms_are_enforced() {
        assert!(matches!(
            FinitePoset::from_pairs(&["x", "y"], &[("x", "y"), ("y", "x")], Closure::Covers),
            Err(Error::NotAntisymmetric(..))
        ));
        assert!(matches!(
            FinitePoset::from_pairs(&["x", "y", "z"], &[("x", "y"), ("y", "z")], Closure::Full),
            Err(Error::NotTransitive(..))
        ));
        assert!(
            FinitePoset::from_pairs(&["x", "y", "z"], &[("x", "y"), ("y", "z"), ("x", "z")], Closure::Full).is_ok()
        );
        assert!(matches!(
            FinitePoset::from_matrix(&["x"], vec![false]),
            Err(Error::NotReflexive(_))
        ));
        assert!(matches!(
            FinitePoset::from_pairs(&["x", "x"], &[], Closure::Covers),
            Err(Error::DuplicateElement(_))
        ));
        assert!(matches!(
            FinitePoset::from_pairs(&["x"], &[("x", "w")], Closure::Covers),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn upper_sets_are_validated() {
        let p = chain3();
        assert!(PosetUpperSet::from_labels(p.clone(), &["b", "c"]).is_ok());
        assert!(matches!(
            PosetUpperSet::from_labels(p.clone(), &["a", "c"]),
            Err(Error::NotUpperSet { .. })
        ));
        assert_eq!(PosetUpperSet::generated_by(p, &[1]).labels(), vec!["b", "c"]);
    }

    #[test]
    fn downset_embedding_of_chain_and_antichain() {
        let f = principal_downset_embedding(chain3()).unwrap();
        let g = f.ground();
        let labels: Vec<_> = f.images().iter().map(|&s| g.labels_of(s)).collect();
        assert_eq!(labels, vec![vec!["a"], vec!["a", "b"], vec!["a", "b", "c"]]);

        let anti = Arc::new(FinitePoset::from_pairs(&["a", "b"], &[], Closure::Covers).unwrap());
        let f = principal_downset_embedding(anti).unwrap();
        let labels: Vec<_> = f.images().iter().map(|&s| f.ground().labels_of(s)).collect();
        assert_eq!(labels, vec![vec!["a"], vec!["b"]]);
    }

    #[test]
    fn downset_embedding_of_diamond_is_order_isomorphism() {
        let poset = diamond();
        let f = principal_downset_embedding(poset.clone()).unwrap();
        assert!(f.is_order_embedding());
        // rebuild the image family as a containment poset and compare
        let names: Vec<String> = (0..4).map(|i| format!("img{i}")).collect();
        let mut leq = vec![false; 16];
        for i in 0..4 {
            for j in 0..4 {
                leq[i * 4 + j] = f.image(i).is_subset_of(f.image(j));
            }
        }
        let image_poset = FinitePoset::from_matrix(&names, leq).unwrap();
        assert!(poset.is_order_isomorphic_to(&image_poset, &[0, 1, 2, 3]));
    }

    #[test]
    fn injectivity_is_required() {
        let poset = chain3();
        let g = Arc::new(GroundSet::alphabetic(2).unwrap());
        let img = vec![SubsetMask(1), SubsetMask(1), SubsetMask(2)];
        assert!(matches!(
            PosetEmbedding::new(poset, g, img),
            Err(Error::NotInjective(..))
        ));
    }

    #[test]
    fn yp_weights() {
        let single = Arc::new(FinitePoset::from_pairs(&["x"], &[], Closure::Covers).unwrap());
        let f = principal_downset_embedding(single).unwrap();
        let d = y_p_distribution(&f, Prob::new(0.4).unwrap()).unwrap();
        assert_eq!(d.weights, vec![1.0]);

        let (_, f) = b_poset();
        let d = y_p_distribution(&f, Prob::new(0.5).unwrap()).unwrap();
        for w in &d.weights {
            assert!((w - 0.25).abs() < 1e-15);
        }

        let anti = Arc::new(FinitePoset::from_pairs(&["a", "b"], &[], Closure::Covers).unwrap());
        let f = principal_downset_embedding(anti).unwrap();
        let d = y_p_distribution(&f, Prob::new(1.0 / 3.0).unwrap()).unwrap();
        assert!((d.weights[0] - 0.5).abs() < 1e-15 && (d.weights[1] - 0.5).abs() < 1e-15);

        // the only image is ∅, which has measure 0 at p = 1
        let g = Arc::new(GroundSet::alphabetic(1).unwrap());
        let single = Arc::new(FinitePoset::from_pairs(&["x"], &[], Closure::Covers).unwrap());
        let f = PosetEmbedding::new(single, g, vec![SubsetMask::EMPTY]).unwrap();
        assert_eq!(
            y_p_distribution(&f, Prob::new(1.0).unwrap()).unwrap_err(),
            Error::NullEvent
        );
    }

    #[test]
    fn rv_conversion_on_b_poset() {
        let (poset, f) = b_poset();
        let all: Vec<usize> = (0..poset.len()).collect();
        assert!(verify_rv_conversion(&f, &all, Prob::new(0.3).unwrap()).unwrap());
        let u = PosetUpperSet::from_labels(poset, &["a", "c", "ac"]).unwrap();
        let half = Prob::new(0.5).unwrap();
        assert!(verify_rv_conversion(&f, &u.members(), half).unwrap());
        let d = y_p_distribution(&f, half).unwrap();
        assert!((d.probability(u.members()) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn pipeline_on_b_poset() {
        let (poset, f) = b_poset();
        let u = PosetUpperSet::from_labels(poset, &["a", "c", "ac"]).unwrap();
        let opts = ReportOptions {
            eps: Some(0.99),
            ..Default::default()
        };
        let report = extension_pipeline(&u, &f, &opts).unwrap();
        assert_eq!(report.status, PipelineStatus::Ok);
        assert_eq!(report.conditional.gate, 0.0);
        assert!((report.conditional.epsilon_floor - 0.943874).abs() < 1e-5);
        assert_eq!(report.conditional.intervals.len(), 1);
        let iv = report.conditional.intervals[0];
        assert!((iv.lo - 0.173995).abs() < 1e-4 && iv.hi == 1.0);
        assert!(report.spot_checks.iter().all(|c| c.passed));
    }

    #[test]
    fn pipeline_with_whole_poset() {
        let poset = diamond();
        let f = principal_downset_embedding(poset.clone()).unwrap();
        let u = PosetUpperSet::from_labels(poset, &["0", "x", "y", "1"]).unwrap();
        let opts = ReportOptions {
            eps: Some(0.5),
            ..Default::default()
        };
        let report = extension_pipeline(&u, &f, &opts).unwrap();
        assert!(report.conditional.epsilon_floor < 1.0);
        assert!(report.spot_checks.iter().all(|c| (c.probability - 1.0).abs() < 1e-15));
    }

    #[test]
    fn downset_images_of_upper_sets_stay_upper() {
        let poset = diamond();
        let f = principal_downset_embedding(poset.clone()).unwrap();
        let fp = f.image_of_poset().unwrap();
        for seeds in [vec![0], vec![1], vec![2], vec![1, 2], vec![3]] {
            let u = PosetUpperSet::generated_by(poset.clone(), &seeds);
            let fu = f.image_family(u.members()).unwrap();
            assert!(is_upper_in(&fu, &fp).unwrap());
        }
    }
}
