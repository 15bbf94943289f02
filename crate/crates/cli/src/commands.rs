use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use threshold_lab_core::bounds::{
    bell_bound, bell_eps_bound, pp_bound, ConditionalReport, ConditionalSetup, GridOptions, ReportOptions,
    ReportStatus, Sample,
};
use threshold_lab_core::family::{GroundSet, SetFamily, SubsetMask, UpperSetFamily};
use threshold_lab_core::forge::{network_poset, target_upper_set, worked_example};
use threshold_lab_core::io::{parse_graph_spec, EmbeddingJson, FamilyJson, PosetJson};
use threshold_lab_core::mc::{McEstimate, MonteCarlo};
use threshold_lab_core::measure::{mu_subset, p_critical, Prob};
use threshold_lab_core::poset::{extension_pipeline, principal_downset_embedding, PipelineReport, PosetUpperSet};
use threshold_lab_core::threshold::{q_threshold, CoverRecord};
use threshold_lab_core::Error;

use crate::args::{split_labels, BVariantArg, ExampleFamily, PosetArgs, RunConfig};
use crate::error::CliError;
use crate::format::{key_values, opt, sig6, Csv};

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn with_path<T>(path: &Path, r: Result<T, Error>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn load_family_json(path: &Path) -> Result<FamilyJson, CliError> {
    with_path(path, FamilyJson::parse(&read(path)?))
}

fn load_family(path: &Path) -> Result<SetFamily, CliError> {
    with_path(path, load_family_json(path)?.to_family())
}

fn load_family_over(path: &Path, ground: Arc<GroundSet>) -> Result<SetFamily, CliError> {
    with_path(path, load_family_json(path)?.to_family_over(ground))
}

fn grid_options(cfg: &RunConfig) -> GridOptions {
    GridOptions {
        points: cfg.grid,
        endpoint_tol: cfg.tol,
        ..GridOptions::default()
    }
}

fn report_options(cfg: &RunConfig, samples: usize) -> ReportOptions {
    ReportOptions {
        k: cfg.k,
        eps: cfg.eps,
        grid: grid_options(cfg),
        samples,
    }
}

fn samples_csv(samples: &[Sample]) -> String {
    let mut csv = Csv::new(&["p", "r", "g"]);
    for s in samples {
        csv.row([sig6(s.p), sig6(s.r), sig6(s.g)]);
    }
    csv.finish()
}

// ---- family ----------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct FamilyResult {
    pub ground: Vec<String>,
    pub minimal_elements: Vec<Vec<String>>,
    pub ell0: usize,
    pub ell: usize,
    /// `N_k`, the number of members of size `k`.
    pub profile: Vec<u64>,
    pub p_c: f64,
    pub q: f64,
    pub cover: CoverRecord,
    /// `8 q log₂(2ℓ₀)`
    pub bell_bound: f64,
    /// `K q log₂ ℓ`
    pub pp_bound: f64,
    /// `48 q log₂(ℓ₀/ε)`, present with `--eps`.
    pub bell_eps_bound: Option<f64>,
}

pub fn cmd_family(path: &Path, cfg: &RunConfig) -> Result<FamilyResult, CliError> {
    let generators = load_family(path)?;
    let upper = with_path(path, UpperSetFamily::up_closure(&generators))?;
    upper.require_nontrivial()?;
    let (q, cover) = q_threshold(&upper, cfg.tol)?;
    let p_c = p_critical(&upper, cfg.tol)?;
    let (ell0, ell) = upper.ell_stats();
    Ok(FamilyResult {
        ground: upper.ground().labels().to_vec(),
        minimal_elements: upper.minimal_elements().to_labels(),
        ell0,
        ell,
        profile: upper.profile()?.counts().to_vec(),
        p_c,
        q,
        cover: CoverRecord::new(&cover, q),
        bell_bound: bell_bound(q, ell0),
        pp_bound: pp_bound(q, ell, cfg.k),
        bell_eps_bound: cfg.eps.map(|eps| bell_eps_bound(q, ell0, eps)),
    })
}

pub fn family_csv(r: &FamilyResult) -> String {
    key_values(&[
        ("n", r.ground.len().to_string()),
        ("minimal_elements", r.minimal_elements.len().to_string()),
        ("ell0", r.ell0.to_string()),
        ("ell", r.ell.to_string()),
        ("p_c", sig6(r.p_c)),
        ("q", sig6(r.q)),
        ("cover_size", r.cover.sets.len().to_string()),
        ("cover_cost_at_q", sig6(r.cover.cost_at_q)),
        ("bell_bound", sig6(r.bell_bound)),
        ("pp_bound", sig6(r.pp_bound)),
        ("bell_eps_bound", opt(r.bell_eps_bound)),
    ])
}

// ---- conditional -----------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct ConditionalResult {
    pub family_a: FamilyJson,
    pub family_b: FamilyJson,
    pub message: String,
    #[serde(flatten)]
    pub report: ConditionalReport,
}

fn status_message(report: &ConditionalReport) -> String {
    match report.status {
        ReportStatus::FloorOnly => format!("epsilon floor {}; pass --eps for intervals", sig6(report.epsilon_floor)),
        ReportStatus::Admissible => format!("eps admissible on {} interval(s)", report.intervals.len()),
        ReportStatus::BelowFloor => format!("eps below floor {}", sig6(report.epsilon_floor)),
    }
}

pub fn cmd_conditional(
    a: Option<&Path>,
    b: Option<&Path>,
    example: Option<ExampleFamily>,
    variant: BVariantArg,
    samples: usize,
    cfg: &RunConfig,
) -> Result<ConditionalResult, CliError> {
    let (a, b) = match (example, a, b) {
        (Some(which), _, _) => {
            let ex = worked_example(variant.into());
            let a = match which {
                ExampleFamily::A => ex.a,
                ExampleFamily::APrime => ex.a_prime,
            };
            (a, ex.b)
        }
        (None, Some(a), Some(b)) => {
            let fa = load_family(a)?;
            let fb = load_family_over(b, fa.ground().clone())?;
            (fa, fb)
        }
        _ => return Err(CliError::Config("give A and B files, or --example".into())),
    };
    let setup = ConditionalSetup::with_q_tol(&a, &b, cfg.k, cfg.tol)?;
    let report = setup.report(&report_options(cfg, samples))?;
    Ok(ConditionalResult {
        family_a: FamilyJson::from_family(&a),
        family_b: FamilyJson::from_family(&b),
        message: status_message(&report),
        report,
    })
}

pub fn conditional_csv(r: &ConditionalResult) -> String {
    samples_csv(&r.report.samples)
}

// ---- poset -----------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct PosetResult {
    pub poset_size: usize,
    pub ground: Vec<String>,
    pub message: String,
    #[serde(flatten)]
    pub pipeline: PipelineReport,
}

pub fn cmd_poset(args: &PosetArgs, cfg: &RunConfig) -> Result<PosetResult, CliError> {
    let (poset, f) = if let Some(path) = &args.network {
        let spec = with_path(path, parse_graph_spec(&read(path)?))?;
        with_path(path, network_poset(&spec))?
    } else {
        let path = args
            .poset
            .as_deref()
            .ok_or_else(|| CliError::Config("--poset or --network is required".into()))?;
        let poset = Arc::new(with_path(
            path,
            PosetJson::parse(&read(path)?).and_then(|p| p.to_poset()),
        )?);
        let f = match (&args.embedding, args.downset) {
            (Some(e), false) => with_path(
                e,
                EmbeddingJson::parse(&read(e)?).and_then(|j| j.to_embedding(poset.clone())),
            )?,
            (None, true) => principal_downset_embedding(poset.clone())?,
            _ => return Err(CliError::Config("give exactly one of --embedding or --downset".into())),
        };
        (poset, f)
    };
    let (members, generators) = (split_labels(&args.upper), split_labels(&args.generated_by));
    let upper = match (members.is_empty(), generators.is_empty()) {
        (false, true) => PosetUpperSet::from_labels(poset.clone(), &members)?,
        (true, false) => target_upper_set(poset.clone(), &generators)?,
        _ => return Err(CliError::Config("give exactly one of --upper or --generated-by".into())),
    };
    let pipeline = extension_pipeline(&upper, &f, &report_options(cfg, args.samples))?;
    let mut message = status_message(&pipeline.conditional);
    if pipeline.conditional.gate >= 1.0 {
        message = format!(
            "gate {} >= 1: hypothesis unmet, no interval claim",
            sig6(pipeline.conditional.gate)
        );
    }
    Ok(PosetResult {
        poset_size: poset.len(),
        ground: f.ground().labels().to_vec(),
        message,
        pipeline,
    })
}

pub fn poset_csv(r: &PosetResult) -> String {
    samples_csv(&r.pipeline.conditional.samples)
}

// ---- repro ----------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub claim: String,
    pub claimed: f64,
    /// `None` when the quantity does not exist for this input, e.g. no interval.
    pub computed: Option<f64>,
    pub abs_diff: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn value(name: &str, claimed: f64, computed: Option<f64>, tolerance: f64) -> Self {
        let abs_diff = computed.map(|c| (c - claimed).abs());
        Self {
            name: name.into(),
            claim: sig6(claimed),
            claimed,
            computed,
            abs_diff,
            pass: abs_diff.is_some_and(|d| d <= tolerance),
            tolerance,
        }
    }

    /// `claimed` is 0 and `computed` the largest deviation over the grid.
    fn identity(name: &str, claim: &str, max_dev: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            claim: claim.into(),
            claimed: 0.0,
            computed: Some(max_dev),
            abs_diff: Some(max_dev),
            tolerance,
            pass: max_dev <= tolerance,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReproResult {
    pub b_variant: &'static str,
    pub family_a: FamilyJson,
    pub family_a_prime: FamilyJson,
    pub family_b: FamilyJson,
    pub checks: Vec<Check>,
    pub all_passed: bool,
    pub note: &'static str,
}

const VALUE_TOL: f64 = 1e-4;
const IDENTITY_TOL: f64 = 1e-12;
const REPRO_EPS: f64 = 0.99;

const VARIANT_NOTE: &str = "Two readings of B are possible on X = {a,b,c}. The closed forms \
r_{A,B}(p) = 2 - 2/(2-p) and r_{A',B}(p) = 1 hold exactly for B = {∅,{a},{c},{a,c}}, the event \
that b is absent (--b-variant formula, the default). Adding {b} to B (--b-variant diagram) gives \
r_{A,B}(p) = 2(1-p)/((2-p)(1+p-p^2)), so the closed-form checks and the derived numbers fail \
for that variant by design.";

pub fn cmd_repro(variant: BVariantArg, cfg: &RunConfig) -> Result<ReproResult, CliError> {
    let ex = worked_example(variant.into());
    let grid = grid_options(cfg);
    let setup = ConditionalSetup::with_q_tol(&ex.a, &ex.b, cfg.k, cfg.tol)?;
    let setup_prime = ConditionalSetup::with_q_tol(&ex.a_prime, &ex.b, cfg.k, cfg.tol)?;
    let points = (1..=99).map(|i| i as f64 / 100.0);

    let r_dev = points
        .clone()
        .map(|p| (setup.ratio(p) - (2.0 - 2.0 / (2.0 - p))).abs())
        .fold(0.0, f64::max);
    let r_prime_dev = points.map(|p| (setup_prime.ratio(p) - 1.0).abs()).fold(0.0, f64::max);
    let floor = setup.epsilon_floor(&grid)?;
    let intervals = setup.admissible_intervals(REPRO_EPS, &grid)?;
    let floor_prime = setup_prime.epsilon_floor(&grid)?;
    let intervals_prime = setup_prime.admissible_intervals(REPRO_EPS, &grid)?;
    // a split level set has no single (lo, hi) to compare
    let single = |ivs: &[threshold_lab_core::Interval]| (ivs.len() == 1).then(|| ivs[0]);

    let checks = vec![
        Check::identity("ratio_a_b", "r_{A,B}(p) = 2 - 2/(2-p)", r_dev, IDENTITY_TOL),
        Check::identity("ratio_a_prime_b", "r_{A',B}(p) = 1", r_prime_dev, IDENTITY_TOL),
        Check::value("argmin_a_b", 0.582289, Some(floor.argmin), VALUE_TOL),
        Check::value("floor_a_b", 0.98051, Some(floor.value), VALUE_TOL),
        Check::value("interval_lo_a_b", 0.195217, single(&intervals).map(|i| i.lo), VALUE_TOL),
        Check::value("interval_hi_a_b", 0.889027, single(&intervals).map(|i| i.hi), VALUE_TOL),
        Check::value("floor_a_prime_b", 0.943874, Some(floor_prime.value), VALUE_TOL),
        Check::value(
            "interval_lo_a_prime_b",
            0.173995,
            single(&intervals_prime).map(|i| i.lo),
            VALUE_TOL,
        ),
    ];
    Ok(ReproResult {
        b_variant: match variant {
            BVariantArg::Formula => "formula",
            BVariantArg::Diagram => "diagram",
        },
        family_a: FamilyJson::from_family(&ex.a),
        family_a_prime: FamilyJson::from_family(&ex.a_prime),
        family_b: FamilyJson::from_family(&ex.b),
        all_passed: checks.iter().all(|c| c.pass),
        checks,
        note: VARIANT_NOTE,
    })
}

pub fn repro_csv(r: &ReproResult) -> String {
    let mut csv = Csv::new(&["check", "claim", "claimed", "computed", "abs_diff", "tolerance", "pass"]);
    for c in &r.checks {
        csv.row([
            c.name.clone(),
            c.claim.clone(),
            sig6(c.claimed),
            opt(c.computed),
            opt(c.abs_diff),
            sig6(c.tolerance),
            c.pass.to_string(),
        ]);
    }
    csv.finish()
}

// ---- mc --------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct McResult {
    pub mode: &'static str,
    pub p: f64,
    pub n: usize,
    #[serde(flatten)]
    pub estimate: McEstimate,
    pub acceptance_rate: f64,
    /// Exact value by enumeration, when the ground set is small enough.
    pub exact: Option<f64>,
    pub exact_in_interval: Option<bool>,
}

/// Exact enumeration is used up to this ground size.
const MC_EXACT_MAX: usize = 20;

enum Membership {
    Listed(SetFamily),
    Upper(UpperSetFamily),
}

impl Membership {
    fn contains(&self, s: SubsetMask) -> bool {
        match self {
            Membership::Listed(f) => f.contains(s),
            Membership::Upper(u) => u.contains(s),
        }
    }
}

pub struct McArgs<'a> {
    pub a: &'a Path,
    pub given: Option<&'a Path>,
    pub p: f64,
    pub samples: u64,
    pub max_draws: u64,
    pub up: bool,
    pub confidence: f64,
}

pub fn cmd_mc(args: &McArgs<'_>, cfg: &RunConfig) -> Result<McResult, CliError> {
    let p = Prob::new(args.p)?;
    let membership = |family: SetFamily, path: &Path| -> Result<Membership, CliError> {
        Ok(if args.up {
            Membership::Upper(with_path(path, UpperSetFamily::up_closure(&family))?)
        } else {
            Membership::Listed(family)
        })
    };
    let fa = load_family(args.a)?;
    let ground = fa.ground().clone();
    let n = ground.len();
    let a = membership(fa, args.a)?;
    let b = match args.given {
        Some(path) => Some(membership(load_family_over(path, ground.clone())?, path)?),
        None => None,
    };
    let mc = MonteCarlo::new(cfg.seed).with_confidence(args.confidence);
    let estimate = match &b {
        None => mc.estimate_family(n, |s| a.contains(s), p, args.samples)?,
        Some(b) => mc.estimate_conditional(n, |s| a.contains(s), |s| b.contains(s), p, args.samples, args.max_draws)?,
    };
    let exact = if n <= MC_EXACT_MAX {
        let (mut hit, mut total) = (0.0, 0.0);
        for s in ground.all_subsets()? {
            if b.as_ref().is_none_or(|b| b.contains(s)) {
                let w = mu_subset(&ground, s, p);
                total += w;
                if a.contains(s) {
                    hit += w;
                }
            }
        }
        (total > 0.0).then(|| hit / total)
    } else {
        None
    };
    Ok(McResult {
        mode: if b.is_some() { "conditional" } else { "family" },
        p: p.get(),
        n,
        acceptance_rate: estimate.acceptance_rate(),
        exact_in_interval: exact.map(|e| estimate.covers(e)),
        exact,
        estimate,
    })
}

pub fn mc_csv(r: &McResult) -> String {
    key_values(&[
        ("mode", r.mode.to_string()),
        ("p", sig6(r.p)),
        ("n", r.n.to_string()),
        ("estimate", sig6(r.estimate.estimate)),
        ("lower", sig6(r.estimate.lower)),
        ("upper", sig6(r.estimate.upper)),
        ("half_width", sig6(r.estimate.half_width)),
        ("successes", r.estimate.successes.to_string()),
        ("n_samples", r.estimate.n_samples.to_string()),
        ("draws", r.estimate.draws.to_string()),
        ("confidence", sig6(r.estimate.confidence)),
        ("seed", r.estimate.seed.to_string()),
        ("acceptance_rate", sig6(r.acceptance_rate)),
        ("exact", opt(r.exact)),
        (
            "exact_in_interval",
            r.exact_in_interval.map(|b| b.to_string()).unwrap_or_default(),
        ),
    ])
}
