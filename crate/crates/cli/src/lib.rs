//! Verification commands behind the `partideal` binary.
//!
//! Each command is a pure function of its configuration and returns a JSON
//! report plus a pass flag. Trials run in parallel with per-trial derived
//! seeds and are collected in trial order, so reports are byte-identical
//! across runs and thread counts.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use partideal::algebra::{
    self, AlgebraError, BlockAlgebra, BlockElement, CentralProjection, ProjectionElement, RankVector,
};
use partideal::commutative::{
    conjugate_subalgebra, ideal_support, one_sided_partial_ideal, CommutativeSubalgebra, Side,
};
use partideal::covering::{self, BlockSummary, CertificateChecks, CoverCertificate, PairWitness};
use partideal::families::{
    self, CheckReport, FamilyError, FamilyRule, FamilyTable, Stage, ViolationWitness, WitnessMethod,
};
use partideal::json::SCHEMA_VERSION;
use partideal::random::derive_seed;
use partideal::{sampling, Tolerance};

/// Random subalgebras sampled per central mask in `theorem`.
pub const THEOREM_SUBALGEBRAS: usize = 8;
/// Random unitaries sampled per central mask in `theorem`.
pub const THEOREM_UNITARIES: usize = 4;

// seed streams, one per kind of sample
const STREAM_SUBALGEBRA: u64 = 1 << 40;
const STREAM_UNITARY: u64 = 2 << 40;
const STREAM_CHAIN: u64 = 3 << 40;
const STREAM_PROJECTION: u64 = 4 << 40;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Family(_) => 2,
            _ => 1,
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Shared knobs of every command.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub dims: Vec<usize>,
    pub master_seed: u64,
    pub trials: usize,
    pub tolerance: Tolerance,
}

impl ExperimentConfig {
    pub fn new(dims: Vec<usize>, master_seed: u64, trials: usize) -> Self {
        Self {
            dims,
            master_seed,
            trials,
            tolerance: Tolerance::default(),
        }
    }

    pub fn algebra(&self) -> Result<BlockAlgebra, CliError> {
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        Ok(BlockAlgebra::new(self.dims.clone())?)
    }
}

/// A finished command: the JSON report and whether every embedded check passed.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub report: serde_json::Value,
    pub passed: bool,
    pub summary: String,
}

impl CommandOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("reports serialize") + "\n"
    }
}

#[derive(Serialize)]
struct Header<'a> {
    schema_version: u32,
    command: &'a str,
    config: &'a ExperimentConfig,
}

fn header<'a>(command: &'a str, config: &'a ExperimentConfig) -> Header<'a> {
    Header {
        schema_version: SCHEMA_VERSION,
        command,
        config,
    }
}

fn parse_ranks(algebra: &BlockAlgebra, ranks: &[usize]) -> Result<(), CliError> {
    if ranks.len() != algebra.num_blocks() {
        return Err(CliError::Usage(format!(
            "--ranks needs {} entries, got {}",
            algebra.num_blocks(),
            ranks.len()
        )));
    }
    if let Some((k, (&r, &n))) = ranks.iter().zip(algebra.dims()).enumerate().find(|(_, (r, n))| r > n) {
        return Err(CliError::Usage(format!("rank {r} exceeds dimension {n} of block {k}")));
    }
    Ok(())
}

fn sample_subalgebras(
    algebra: &BlockAlgebra,
    config: &ExperimentConfig,
    count: usize,
) -> Result<Vec<CommutativeSubalgebra>, CliError> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(config.master_seed, STREAM_SUBALGEBRA + i as u64);
            sampling::random_subalgebra(algebra, seed, i % 2 == 0, config.tolerance)
                .map_err(|e| CliError::Family(e.into()))
        })
        .collect()
}

fn sample_unitaries(algebra: &BlockAlgebra, config: &ExperimentConfig, count: usize) -> Vec<BlockElement> {
    (0..count)
        .map(|i| BlockElement::random_unitary(algebra, derive_seed(config.master_seed, STREAM_UNITARY + i as u64)))
        .collect()
}

// ---------------------------------------------------------------- theorem

#[derive(Debug, Serialize)]
pub struct MaskCase {
    pub mask: CentralProjection,
    pub passed: bool,
    pub recovered: Option<CentralProjection>,
    pub consistency_trials: usize,
    pub invariance_trials: usize,
    pub agreement_trials: usize,
    pub max_distance: f64,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct WitnessCase {
    pub trial: usize,
    pub seed: u64,
    pub ranks: Option<RankVector>,
    pub passed: bool,
    pub method: Option<WitnessMethod>,
    pub gap: Option<f64>,
    pub rechecked_gap: Option<f64>,
    pub error: Option<String>,
}

/// Round-trips every central mask through [`families::verify_theorem`] and
/// finds a violation witness for `trials` random non-central projections.
pub fn cmd_theorem(config: &ExperimentConfig) -> Result<CommandOutcome, CliError> {
    let algebra = config.algebra()?;
    if algebra.num_blocks() > 16 {
        return Err(CliError::Usage(
            "theorem enumerates 2^K masks; use at most 16 blocks".into(),
        ));
    }
    let subalgebras = sample_subalgebras(&algebra, config, THEOREM_SUBALGEBRAS)?;
    let unitaries = sample_unitaries(&algebra, config, THEOREM_UNITARIES);

    let masks: Vec<CentralProjection> = CentralProjection::enumerate(&algebra).collect();
    let mask_cases: Vec<MaskCase> = masks
        .par_iter()
        .map(
            |z| match families::verify_theorem(&FamilyRule::FromCentral(z.clone()), &subalgebras, &unitaries) {
                Ok(r) => MaskCase {
                    mask: z.clone(),
                    passed: r.passed() && r.center == *z,
                    recovered: Some(r.center.clone()),
                    consistency_trials: r.consistency.trials,
                    invariance_trials: r.invariance.trials,
                    agreement_trials: r.agreement.trials,
                    max_distance: r
                        .consistency
                        .max_distance
                        .max(r.invariance.max_distance)
                        .max(r.agreement.max_distance),
                    error: None,
                },
                Err(e) => MaskCase {
                    mask: z.clone(),
                    passed: false,
                    recovered: None,
                    consistency_trials: 0,
                    invariance_trials: 0,
                    agreement_trials: 0,
                    max_distance: f64::NAN,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect();

    let noncentral_exists = !algebra.is_abelian();
    let witness_cases: Vec<WitnessCase> = if noncentral_exists {
        (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let seed = derive_seed(config.master_seed, STREAM_PROJECTION + trial as u64);
                let p = sampling::random_noncentral_projection(&algebra, seed).expect("non-abelian algebra");
                let ranks = algebra::rank_vector(&p, config.tolerance);
                match families::find_invariance_violation(&p, config.tolerance) {
                    Ok(w) => {
                        let rechecked = w.recheck();
                        WitnessCase {
                            trial,
                            seed,
                            ranks: Some(ranks),
                            passed: w.is_valid(),
                            method: Some(w.method),
                            gap: Some(w.gap),
                            rechecked_gap: rechecked,
                            error: None,
                        }
                    }
                    Err(e) => WitnessCase {
                        trial,
                        seed,
                        ranks: Some(ranks),
                        passed: false,
                        method: None,
                        gap: None,
                        rechecked_gap: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let masks_passed = mask_cases.iter().filter(|c| c.passed).count();
    let witnesses_found = witness_cases.iter().filter(|c| c.passed).count();
    let passed = masks_passed == mask_cases.len() && witnesses_found == witness_cases.len();

    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        header: Header<'a>,
        passed: bool,
        masks_total: usize,
        masks_passed: usize,
        noncentral_projections_exist: bool,
        witnesses_requested: usize,
        witnesses_found: usize,
        subalgebra_samples: usize,
        unitary_samples: usize,
        masks: Vec<MaskCase>,
        witnesses: Vec<WitnessCase>,
    }
    let summary = format!(
        "theorem dims={:?}: {}/{} masks round-trip, {}/{} witnesses",
        config.dims,
        masks_passed,
        mask_cases.len(),
        witnesses_found,
        witness_cases.len()
    );
    let report = Report {
        header: header("theorem", config),
        passed,
        masks_total: mask_cases.len(),
        masks_passed,
        noncentral_projections_exist: noncentral_exists,
        witnesses_requested: witness_cases.len(),
        witnesses_found,
        subalgebra_samples: subalgebras.len() + 1,
        unitary_samples: unitaries.len(),
        masks: mask_cases,
        witnesses: witness_cases,
    };
    Ok(CommandOutcome {
        report: serde_json::to_value(report)?,
        passed,
        summary,
    })
}

// ---------------------------------------------------------------- cover

/// Serializable view of a [`CoverCertificate`].
#[derive(Serialize)]
pub struct CertificateView<'a> {
    pub q: &'a ProjectionElement,
    pub family: &'a [ProjectionElement],
    pub sup: &'a ProjectionElement,
    pub remainder: &'a ProjectionElement,
    pub unitary: &'a BlockElement,
    pub pairwise_witnesses: &'a [PairWitness],
    pub blocks: &'a [BlockSummary],
}

impl<'a> From<&'a CoverCertificate> for CertificateView<'a> {
    fn from(c: &'a CoverCertificate) -> Self {
        Self {
            q: &c.q,
            family: &c.family,
            sup: &c.sup,
            remainder: &c.remainder,
            unitary: &c.unitary,
            pairwise_witnesses: &c.witnesses,
            blocks: &c.blocks,
        }
    }
}

/// Builds a random projection with the given ranks, covers its central
/// carrier and validates the certificate.
pub fn cmd_cover(config: &ExperimentConfig, ranks: &[usize]) -> Result<CommandOutcome, CliError> {
    let algebra = config.algebra()?;
    parse_ranks(&algebra, ranks)?;
    if ranks.iter().all(|&r| r == 0) {
        return Err(CliError::Usage(
            "the zero projection has no cover: the remainder bound would be 0 < 0".into(),
        ));
    }
    let q = ProjectionElement::random_with_ranks(&algebra, ranks, config.master_seed)?;
    let certificate = covering::main_lemma_cover(&q, config.tolerance).map_err(|e| CliError::Usage(e.to_string()))?;
    let checks: CertificateChecks = certificate.validate(config.tolerance);
    let passed = checks.all_passed();

    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        header: Header<'a>,
        ranks: &'a [usize],
        passed: bool,
        family_size: usize,
        checks: &'a CertificateChecks,
        certificate: CertificateView<'a>,
    }
    let summary = format!(
        "cover dims={:?} ranks={:?}: |M|={}, remainder ranks {}, {}",
        config.dims,
        ranks,
        certificate.family.len(),
        checks.remainder_ranks,
        if passed {
            "certificate valid"
        } else {
            "certificate INVALID"
        }
    );
    let report = Report {
        header: header("cover", config),
        ranks,
        passed,
        family_size: certificate.family.len(),
        checks: &checks,
        certificate: (&certificate).into(),
    };
    Ok(CommandOutcome {
        report: serde_json::to_value(report)?,
        passed,
        summary,
    })
}

// ---------------------------------------------------------------- partial-ideal

/// Where the projection of a command comes from.
#[derive(Debug, Clone)]
pub enum ProjectionSpec {
    /// Random projection with these block ranks, seeded by the master seed.
    Ranks(Vec<usize>),
    /// An explicit projection (e.g. read from JSON).
    Explicit(ProjectionElement),
}

impl ProjectionSpec {
    fn resolve(&self, algebra: &BlockAlgebra, config: &ExperimentConfig) -> Result<ProjectionElement, CliError> {
        match self {
            ProjectionSpec::Ranks(ranks) => {
                parse_ranks(algebra, ranks)?;
                Ok(ProjectionElement::random_with_ranks(
                    algebra,
                    ranks,
                    derive_seed(config.master_seed, STREAM_PROJECTION),
                )?)
            }
            ProjectionSpec::Explicit(p) => {
                if p.algebra() != algebra {
                    return Err(CliError::Usage(format!(
                        "projection has dims {:?}, expected {:?}",
                        p.algebra().dims(),
                        algebra.dims()
                    )));
                }
                Ok(p.clone())
            }
        }
    }
}

/// Summary of one ideal `I ∩ V`.
#[derive(Debug, Serialize)]
pub struct IdealSample {
    pub atoms: usize,
    pub ideal_atoms: Vec<usize>,
}

/// The partial ideal `V ↦ pA ∩ V` (or `Ap ∩ V`), tabulated on sampled
/// subalgebras and checked for consistency and invariance.
///
/// Invariance is expected to hold exactly when `p` is central; the command
/// passes when consistency holds and invariance matches that expectation.
pub fn cmd_partial_ideal(
    config: &ExperimentConfig,
    spec: &ProjectionSpec,
    side: Side,
) -> Result<CommandOutcome, CliError> {
    let algebra = config.algebra()?;
    let tol = config.tolerance;
    let p = spec.resolve(&algebra, config)?;
    let p_central = algebra::is_central(&p, tol);

    let chains = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(config.master_seed, STREAM_CHAIN + t as u64);
            if t % 2 == 0 {
                sampling::adapted_chain(&p, seed, tol)
            } else {
                sampling::random_chain(&algebra, seed, tol)
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Family(e.into()))?;

    let mut conjugations: Vec<(CommutativeSubalgebra, BlockElement)> =
        sample_subalgebras(&algebra, config, config.trials)?
            .into_iter()
            .zip(sample_unitaries(&algebra, config, config.trials))
            .collect();
    let witness = if p_central {
        None
    } else {
        let w = families::find_invariance_violation(&p, tol)?;
        conjugations.push((w.subalgebra.clone(), w.unitary.clone()));
        Some(w)
    };

    // tabulate the partial ideal on every subalgebra the checks will visit
    let mut keys: Vec<CommutativeSubalgebra> = Vec::new();
    for (v, w) in &chains {
        keys.push(v.clone());
        keys.push(w.clone());
    }
    for (v, u) in &conjugations {
        keys.push(v.clone());
        keys.push(conjugate_subalgebra(v, u).map_err(|e| CliError::Family(e.into()))?);
    }
    let mut table = FamilyTable::new(&algebra);
    let mut ideals = Vec::with_capacity(keys.len());
    for key in keys {
        let ideal = one_sided_partial_ideal(&p, side, &key);
        let support = ideal_support(&ideal);
        ideals.push(IdealSample {
            atoms: key.len(),
            ideal_atoms: ideal.atom_indices().iter().copied().collect(),
        });
        table.insert(key, support)?;
    }
    let rule = FamilyRule::Table(table);

    let consistency = families::check_consistency(&rule, &chains)?;
    let invariance = families::check_invariance(&rule, &conjugations)?;
    let expected_invariant = p_central;
    let passed = consistency.passed() && invariance.passed() == expected_invariant;

    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        header: Header<'a>,
        side: Side,
        projection_ranks: RankVector,
        projection_central: bool,
        passed: bool,
        expected_invariant: bool,
        consistency: &'a CheckReport,
        invariance: &'a CheckReport,
        witness: Option<&'a ViolationWitness>,
        ideals: Vec<IdealSample>,
    }
    let summary = format!(
        "partial-ideal dims={:?} side={}: consistency {}, invariance {} (expected {})",
        config.dims,
        match side {
            Side::Left => "left",
            Side::Right => "right",
        },
        verdict_word(consistency.passed()),
        verdict_word(invariance.passed()),
        verdict_word(expected_invariant)
    );
    let report = Report {
        header: header("partial-ideal", config),
        side,
        projection_ranks: algebra::rank_vector(&p, tol),
        projection_central: p_central,
        passed,
        expected_invariant,
        consistency: &consistency,
        invariance: &invariance,
        witness: witness.as_ref(),
        ideals,
    };
    Ok(CommandOutcome {
        report: serde_json::to_value(report)?,
        passed,
        summary,
    })
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

// ---------------------------------------------------------------- witness

/// Finds `(V, u)` showing that the family of a non-central projection is not invariant.
pub fn cmd_witness(config: &ExperimentConfig, spec: &ProjectionSpec) -> Result<CommandOutcome, CliError> {
    let algebra = config.algebra()?;
    let p = spec.resolve(&algebra, config)?;
    if algebra::is_central(&p, config.tolerance) {
        return Err(CliError::Usage(
            "the projection is central; its family is invariant and has no witness".into(),
        ));
    }
    let w = families::find_invariance_violation(&p, config.tolerance)?;
    let rechecked_gap = w.recheck();
    let passed = w.is_valid();

    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        header: Header<'a>,
        passed: bool,
        rechecked_gap: Option<f64>,
        witness: &'a ViolationWitness,
    }
    let summary = format!(
        "witness dims={:?}: gap {:.6}, {}",
        config.dims,
        w.gap,
        verdict_word(passed)
    );
    let report = Report {
        header: header("witness", config),
        passed,
        rechecked_gap,
        witness: &w,
    };
    Ok(CommandOutcome {
        report: serde_json::to_value(report)?,
        passed,
        summary,
    })
}

// ---------------------------------------------------------------- check

/// Which induced family `check` examines.
#[derive(Debug, Clone)]
pub enum RuleSpec {
    Central(Vec<bool>),
    Projection(ProjectionSpec),
}

/// Runs the consistency and invariance checks for one induced family.
///
/// Passes when consistency holds and invariance holds exactly for central
/// families.
pub fn cmd_check(config: &ExperimentConfig, spec: &RuleSpec) -> Result<CommandOutcome, CliError> {
    let algebra = config.algebra()?;
    let tol = config.tolerance;
    let (rule, anchor) = match spec {
        RuleSpec::Central(mask) => {
            let z = CentralProjection::new(&algebra, mask.clone())?;
            (FamilyRule::FromCentral(z.clone()), z.to_projection())
        }
        RuleSpec::Projection(p) => {
            let p = p.resolve(&algebra, config)?;
            (FamilyRule::FromProjection(p.clone()), p)
        }
    };
    let central = algebra::is_central(&anchor, tol);

    let chains = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(config.master_seed, STREAM_CHAIN + t as u64);
            if t % 2 == 0 {
                sampling::adapted_chain(&anchor, seed, tol)
            } else {
                sampling::random_chain(&algebra, seed, tol)
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Family(e.into()))?;
    let mut samples: Vec<(CommutativeSubalgebra, BlockElement)> = sample_subalgebras(&algebra, config, config.trials)?
        .into_iter()
        .zip(sample_unitaries(&algebra, config, config.trials))
        .collect();
    if !central {
        let w = families::find_invariance_violation(&anchor, tol)?;
        samples.push((w.subalgebra, w.unitary));
    }

    let consistency = families::check_consistency(&rule, &chains)?;
    let invariance = families::check_invariance(&rule, &samples)?;
    let center = families::center_value(&rule)?;
    let passed = consistency.passed() && invariance.passed() == central;

    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        header: Header<'a>,
        central: bool,
        center_value: &'a CentralProjection,
        passed: bool,
        consistency: &'a CheckReport,
        invariance: &'a CheckReport,
    }
    let summary = format!(
        "check dims={:?}: consistency {}, invariance {} (family {})",
        config.dims,
        verdict_word(consistency.passed()),
        verdict_word(invariance.passed()),
        if central { "central" } else { "non-central" }
    );
    let report = Report {
        header: header("check", config),
        central,
        center_value: &center,
        passed,
        consistency: &consistency,
        invariance: &invariance,
    };
    Ok(CommandOutcome {
        report: serde_json::to_value(report)?,
        passed,
        summary,
    })
}

/// Names the failed stage of a theorem precondition, for messages.
pub fn describe_family_error(e: &FamilyError) -> String {
    match e {
        FamilyError::PreconditionFailed {
            stage: Stage::Invariance,
            ..
        } => "family is not invariant".into(),
        FamilyError::PreconditionFailed {
            stage: Stage::Consistency,
            ..
        } => "family is not consistent".into(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_theorem_has_no_witnesses() {
        let out = cmd_theorem(&ExperimentConfig::new(vec![1], 0, 5)).unwrap();
        assert!(out.passed);
        assert_eq!(out.report["masks_passed"], 2);
        assert_eq!(out.report["witnesses_requested"], 0);
    }

    #[test]
    fn theorem_small() {
        let out = cmd_theorem(&ExperimentConfig::new(vec![2], 1, 20)).unwrap();
        assert!(out.passed, "{}", out.summary);
        assert_eq!(out.report["masks_passed"], 2);
        assert_eq!(out.report["witnesses_found"], 20);
        assert_eq!(out.report["schema_version"], 1);
    }

    #[test]
    fn cover_usage_errors() {
        let cfg = ExperimentConfig::new(vec![3], 0, 1);
        assert!(matches!(cmd_cover(&cfg, &[0]), Err(CliError::Usage(_))));
        assert!(matches!(cmd_cover(&cfg, &[4]), Err(CliError::Usage(_))));
        assert!(matches!(cmd_cover(&cfg, &[1, 1]), Err(CliError::Usage(_))));
    }

    #[test]
    fn cover_examples() {
        for (dims, ranks, size, rem) in [
            (vec![3], vec![1], 3, vec![0]),
            (vec![3], vec![2], 1, vec![1]),
            (vec![2, 3], vec![1, 2], 2, vec![0, 1]),
        ] {
            let out = cmd_cover(&ExperimentConfig::new(dims, 5, 1), &ranks).unwrap();
            assert!(out.passed);
            assert_eq!(out.report["family_size"], size);
            assert_eq!(out.report["checks"]["remainder_ranks"], serde_json::json!(rem));
        }
    }

    #[test]
    fn partial_ideal_trivial_projections() {
        let cfg = ExperimentConfig::new(vec![3], 2, 6);
        for ranks in [vec![0], vec![3]] {
            let out = cmd_partial_ideal(&cfg, &ProjectionSpec::Ranks(ranks), Side::Right).unwrap();
            assert!(out.passed);
            assert_eq!(out.report["consistency"]["verdict"], "pass");
            assert_eq!(out.report["invariance"]["verdict"], "pass");
        }
    }

    #[test]
    fn witness_and_check_commands() {
        let cfg = ExperimentConfig::new(vec![2, 2], 3, 8);
        let out = cmd_witness(&cfg, &ProjectionSpec::Ranks(vec![1, 2])).unwrap();
        assert!(out.passed);
        assert!(matches!(
            cmd_witness(&cfg, &ProjectionSpec::Ranks(vec![2, 0])),
            Err(CliError::Usage(_))
        ));
        let out = cmd_check(&cfg, &RuleSpec::Central(vec![true, false])).unwrap();
        assert!(out.passed);
        assert_eq!(out.report["invariance"]["verdict"], "pass");
        let out = cmd_check(&cfg, &RuleSpec::Projection(ProjectionSpec::Ranks(vec![1, 0]))).unwrap();
        assert!(out.passed);
        assert_eq!(out.report["invariance"]["verdict"], "fail");
    }
}
