//! Consistent and invariant families of projections.
//!
//! A family assigns to each commutative subalgebra `V` a projection in `V`.
//! Only evaluable families are representable: the family `Π_p` induced by a
//! projection, the family `Π_z` induced by a central projection, and finite
//! tables. Checks compare two projections per sample and report the first
//! failing sample by index, independent of evaluation order.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{self, AlgebraError, BlockAlgebra, BlockElement, CentralProjection, ProjectionElement};
use crate::commutative::{
    conjugate_subalgebra, generate, includes, largest_projection_below, CommutativeError, CommutativeSubalgebra,
};
use crate::linalg::{self, CMatrix, Tolerance};
use crate::random::derive_seed;

/// Threshold for equality of family values.
pub const FAMILY_TOL: f64 = 1e-7;
/// Minimum distance between the two sides of a violation witness.
pub const WITNESS_GAP: f64 = 1e-4;
/// Random conjugations tried when the swap construction falls short.
pub const FALLBACK_TRIALS: u64 = 1000;
const FALLBACK_SEED: u64 = 0x005e_ed0f_1a77_1ce5;

#[derive(Debug, Error, Clone)]
pub enum FamilyError {
    #[error("table has no entry for the requested subalgebra ({atoms} atoms)")]
    NotInDomain { atoms: usize },
    #[error("table value is not a sum of atoms of its key")]
    ValueOutsideKey,
    #[error("sample {index} is not a chain V ⊆ V'")]
    NotAChain { index: usize },
    #[error("value at the center is not central")]
    NotCentral,
    #[error("the projection is central, so its family is invariant")]
    CentralProjection,
    #[error("no violation with gap >= {WITNESS_GAP} found")]
    NoViolationFound,
    #[error("{stage} check failed at trial {trial}", trial = .report.counterexample.as_ref().map_or(0, |c| c.trial))]
    PreconditionFailed { stage: Stage, report: Box<CheckReport> },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Commutative(#[from] CommutativeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Consistency,
    Invariance,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Consistency => "consistency",
            Stage::Invariance => "invariance",
        })
    }
}

/// A finite map from subalgebras to projections.
#[derive(Debug, Clone)]
pub struct FamilyTable {
    algebra: BlockAlgebra,
    entries: Vec<(CommutativeSubalgebra, ProjectionElement)>,
}

impl FamilyTable {
    pub fn new(algebra: &BlockAlgebra) -> Self {
        Self {
            algebra: algebra.clone(),
            entries: Vec::new(),
        }
    }

    /// Adds or replaces an entry. The value must lie in the key subalgebra.
    pub fn insert(&mut self, key: CommutativeSubalgebra, value: ProjectionElement) -> Result<(), FamilyError> {
        if !key.contains_projection(&value) {
            return Err(FamilyError::ValueOutsideKey);
        }
        match self.entries.iter_mut().find(|(k, _)| k.same_as(&key)) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
        Ok(())
    }

    pub fn get(&self, key: &CommutativeSubalgebra) -> Option<&ProjectionElement> {
        self.entries.iter().find(|(k, _)| k.same_as(key)).map(|(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &CommutativeSubalgebra> {
        self.entries.iter().map(|(k, _)| k)
    }
}

/// An evaluable family of projections.
#[derive(Debug, Clone)]
pub enum FamilyRule {
    /// `V ↦ largest projection of V below p`.
    FromProjection(ProjectionElement),
    /// `V ↦ largest projection of V below z`.
    FromCentral(CentralProjection),
    Table(FamilyTable),
}

impl FamilyRule {
    pub fn algebra(&self) -> &BlockAlgebra {
        match self {
            FamilyRule::FromProjection(p) => p.algebra(),
            FamilyRule::FromCentral(z) => z.algebra(),
            FamilyRule::Table(t) => &t.algebra,
        }
    }
}

pub fn evaluate(rule: &FamilyRule, v: &CommutativeSubalgebra) -> Result<ProjectionElement, FamilyError> {
    match rule {
        FamilyRule::FromProjection(p) => Ok(largest_projection_below(v, p)),
        FamilyRule::FromCentral(z) => Ok(largest_projection_below(v, &z.to_projection())),
        FamilyRule::Table(t) => t.get(v).cloned().ok_or(FamilyError::NotInDomain { atoms: v.len() }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Where a check failed.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sample {
    Chain {
        inner: CommutativeSubalgebra,
        outer: CommutativeSubalgebra,
    },
    Conjugation {
        subalgebra: CommutativeSubalgebra,
        unitary: BlockElement,
    },
    Agreement {
        subalgebra: CommutativeSubalgebra,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub sample: Sample,
    pub lhs: ProjectionElement,
    pub rhs: ProjectionElement,
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub trials: usize,
    /// Largest distance over all trials.
    pub max_distance: f64,
    pub counterexample: Option<Counterexample>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Builds a report from per-trial `(lhs, rhs)` pairs, in trial order.
fn collect_report(
    outcomes: Vec<Result<(ProjectionElement, ProjectionElement), FamilyError>>,
    sample: impl Fn(usize) -> Sample,
) -> Result<CheckReport, FamilyError> {
    let trials = outcomes.len();
    let mut max_distance: f64 = 0.0;
    let mut counterexample = None;
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let (lhs, rhs) = outcome?;
        let distance = lhs.dist(&rhs);
        max_distance = max_distance.max(distance);
        if distance > FAMILY_TOL && counterexample.is_none() {
            counterexample = Some(Counterexample {
                trial,
                sample: sample(trial),
                lhs,
                rhs,
                distance,
            });
        }
    }
    Ok(CheckReport {
        verdict: if counterexample.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        trials,
        max_distance,
        counterexample,
    })
}

/// Checks `Π(V) = largest projection of V below Π(V')` on every chain.
pub fn check_consistency(
    rule: &FamilyRule,
    chains: &[(CommutativeSubalgebra, CommutativeSubalgebra)],
) -> Result<CheckReport, FamilyError> {
    if let Some(index) = chains.iter().position(|(v, w)| !includes(v, w)) {
        return Err(FamilyError::NotAChain { index });
    }
    let outcomes = chains
        .par_iter()
        .map(|(v, w)| {
            let lhs = evaluate(rule, v)?;
            let rhs = largest_projection_below(v, &evaluate(rule, w)?);
            Ok((lhs, rhs))
        })
        .collect();
    collect_report(outcomes, |i| Sample::Chain {
        inner: chains[i].0.clone(),
        outer: chains[i].1.clone(),
    })
}

/// Checks `Π(uVu*) = u Π(V) u*` on every sample.
pub fn check_invariance(
    rule: &FamilyRule,
    samples: &[(CommutativeSubalgebra, BlockElement)],
) -> Result<CheckReport, FamilyError> {
    let outcomes = samples
        .par_iter()
        .map(|(v, u)| {
            let rotated = conjugate_subalgebra(v, u)?;
            let lhs = evaluate(rule, &rotated)?;
            let rhs = evaluate(rule, v)?.conjugate(u)?;
            Ok((lhs, rhs))
        })
        .collect();
    collect_report(outcomes, |i| Sample::Conjugation {
        subalgebra: samples[i].0.clone(),
        unitary: samples[i].1.clone(),
    })
}

/// The value at the center, as a central projection.
pub fn center_value(rule: &FamilyRule) -> Result<CentralProjection, FamilyError> {
    let center = CommutativeSubalgebra::center(rule.algebra());
    let value = evaluate(rule, &center)?;
    algebra::as_central(&value, FAMILY_TOL).ok_or(FamilyError::NotCentral)
}

/// Every check run by [`verify_theorem`].
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    /// `z = Π(Z(A))`.
    pub center: CentralProjection,
    pub consistency: CheckReport,
    pub invariance: CheckReport,
    /// `Π(V) = Π_z(V)` on every sampled `V`.
    pub agreement: CheckReport,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.consistency.passed() && self.invariance.passed() && self.agreement.passed()
    }
}

/// Checks that an invariant family equals `Π_z` for `z` its value at the center.
///
/// The center is added to the samples. Consistency is checked on every
/// included pair of samples and invariance on every (sample, unitary) pair;
/// a failure there is returned as [`FamilyError::PreconditionFailed`].
pub fn verify_theorem(
    rule: &FamilyRule,
    subalgebras: &[CommutativeSubalgebra],
    unitaries: &[BlockElement],
) -> Result<TheoremReport, FamilyError> {
    let mut samples = vec![CommutativeSubalgebra::center(rule.algebra())];
    samples.extend(subalgebras.iter().cloned());

    let mut chains = Vec::new();
    for (i, v) in samples.iter().enumerate() {
        for (j, w) in samples.iter().enumerate() {
            if i != j && includes(v, w) {
                chains.push((v.clone(), w.clone()));
            }
        }
    }
    let consistency = check_consistency(rule, &chains)?;
    if !consistency.passed() {
        return Err(FamilyError::PreconditionFailed {
            stage: Stage::Consistency,
            report: Box::new(consistency),
        });
    }

    let pairs: Vec<(CommutativeSubalgebra, BlockElement)> = samples
        .iter()
        .flat_map(|v| unitaries.iter().map(move |u| (v.clone(), u.clone())))
        .collect();
    let invariance = check_invariance(rule, &pairs)?;
    if !invariance.passed() {
        return Err(FamilyError::PreconditionFailed {
            stage: Stage::Invariance,
            report: Box::new(invariance),
        });
    }

    let center = center_value(rule)?;
    let induced = FamilyRule::FromCentral(center.clone());
    let outcomes = samples
        .par_iter()
        .map(|v| Ok((evaluate(rule, v)?, evaluate(&induced, v)?)))
        .collect();
    let agreement = collect_report(outcomes, |i| Sample::Agreement {
        subalgebra: samples[i].clone(),
    })?;

    Ok(TheoremReport {
        center,
        consistency,
        invariance,
        agreement,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum WitnessMethod {
    /// Rotation swapping a range vector and a kernel vector in one block.
    Swap { block: usize },
    /// Random block unitary found by seeded search.
    RandomSearch { trial: u64 },
}

/// `V` and `u` with `Π_p(uVu*) ≠ u Π_p(V) u*`.
#[derive(Debug, Clone, Serialize)]
pub struct ViolationWitness {
    pub projection: ProjectionElement,
    pub subalgebra: CommutativeSubalgebra,
    pub unitary: BlockElement,
    /// `Π_p(uVu*)`
    pub lhs: ProjectionElement,
    /// `u Π_p(V) u*`
    pub rhs: ProjectionElement,
    pub gap: f64,
    pub method: WitnessMethod,
}

impl ViolationWitness {
    /// Recomputes both sides from `(V, u)` and returns the fresh gap, provided
    /// the recomputed sides match the stored ones.
    pub fn recheck(&self) -> Option<f64> {
        let rule = FamilyRule::FromProjection(self.projection.clone());
        let (lhs, rhs) = violation_sides(&rule, &self.subalgebra, &self.unitary).ok()?;
        (lhs.dist(&self.lhs) <= FAMILY_TOL && rhs.dist(&self.rhs) <= FAMILY_TOL).then(|| lhs.dist(&rhs))
    }

    pub fn is_valid(&self) -> bool {
        self.gap >= WITNESS_GAP && self.recheck().is_some_and(|g| g >= WITNESS_GAP)
    }
}

fn violation_sides(
    rule: &FamilyRule,
    v: &CommutativeSubalgebra,
    u: &BlockElement,
) -> Result<(ProjectionElement, ProjectionElement), FamilyError> {
    let lhs = evaluate(rule, &conjugate_subalgebra(v, u)?)?;
    let rhs = evaluate(rule, v)?.conjugate(u)?;
    Ok((lhs, rhs))
}

/// Shows that `Π_p` is not invariant when `p` is not central.
///
/// Uses `V = V_p` (generated by `p` and the center), so `Π_p(V) = p`, and a
/// unitary swapping a unit vector of `range(p_k)` with one of `ker(p_k)` in
/// the first block where `0 < rank p_k < n_k`. Then `u p u* ≰ p`, while
/// `Π_p(uVu*) ≤ p`.
pub fn find_invariance_violation(p: &ProjectionElement, tol: Tolerance) -> Result<ViolationWitness, FamilyError> {
    if algebra::is_central(p, tol) {
        return Err(FamilyError::CentralProjection);
    }
    let alg = p.algebra();
    let rule = FamilyRule::FromProjection(p.clone());
    let v = generate(alg, &[p.as_element().clone()], true, tol)?;

    let ranks = algebra::rank_vector(p, tol);
    let block = (0..alg.num_blocks())
        .find(|&k| ranks.0[k] > 0 && ranks.0[k] < alg.dims()[k])
        .ok_or(FamilyError::CentralProjection)?;
    let rk = linalg::range_kernel(p.block(block)).map_err(AlgebraError::from)?;
    let n = alg.dims()[block];
    let swap = match (&rk.range, &rk.kernel) {
        (Some(range), Some(kernel)) => {
            let xi = range.column(0);
            let eta = kernel.column(0);
            CMatrix::from_fn(n, n, |i, j| {
                let id = if i == j { linalg::C1 } else { linalg::C0 };
                id - xi[i] * xi[j].conj() - eta[i] * eta[j].conj() + xi[i] * eta[j].conj() + eta[i] * xi[j].conj()
            })
        }
        _ => CMatrix::identity(n),
    };
    let u = BlockElement::from_fn(alg, |k, n| if k == block { swap.clone() } else { CMatrix::identity(n) });

    let (lhs, rhs) = violation_sides(&rule, &v, &u)?;
    let gap = lhs.dist(&rhs);
    if gap >= WITNESS_GAP {
        return Ok(ViolationWitness {
            projection: p.clone(),
            subalgebra: v,
            unitary: u,
            lhs,
            rhs,
            gap,
            method: WitnessMethod::Swap { block },
        });
    }

    for trial in 0..FALLBACK_TRIALS {
        let u = BlockElement::random_unitary(alg, derive_seed(FALLBACK_SEED, trial));
        let (lhs, rhs) = violation_sides(&rule, &v, &u)?;
        let gap = lhs.dist(&rhs);
        if gap >= WITNESS_GAP {
            return Ok(ViolationWitness {
                projection: p.clone(),
                subalgebra: v,
                unitary: u,
                lhs,
                rhs,
                gap,
                method: WitnessMethod::RandomSearch { trial },
            });
        }
    }
    Err(FamilyError::NoViolationFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn alg(dims: &[usize]) -> BlockAlgebra {
        BlockAlgebra::new(dims.to_vec()).unwrap()
    }

    fn proj(a: &BlockAlgebra, blocks: Vec<CMatrix>) -> ProjectionElement {
        ProjectionElement::new(BlockElement::new(a, blocks).unwrap(), tol()).unwrap()
    }

    fn diagonal_subalgebra(a: &BlockAlgebra) -> CommutativeSubalgebra {
        let d = BlockElement::from_fn(a, |_, n| {
            CMatrix::diag_real(&(0..n).map(|i| i as f64).collect::<Vec<_>>())
        });
        generate(a, &[d], true, tol()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let a = alg(&[2]);
        let v = diagonal_subalgebra(&a);
        let id = evaluate(&FamilyRule::FromCentral(CentralProjection::identity(&a)), &v).unwrap();
        assert!(id.dist(&ProjectionElement::identity(&a)) < 1e-12);

        let e11 = proj(&a, vec![CMatrix::unit(2, 0, 0)]);
        let val = evaluate(&FamilyRule::FromProjection(e11.clone()), &v).unwrap();
        assert!(val.dist(&e11) < 1e-12);

        let half = proj(&a, vec![CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])]);
        let val = evaluate(&FamilyRule::FromProjection(half), &v).unwrap();
        assert_eq!(val, ProjectionElement::zero(&a));
    }

    #[test]
    fn table_domain() {
        let a = alg(&[2]);
        let v = diagonal_subalgebra(&a);
        let mut t = FamilyTable::new(&a);
        let half = proj(&a, vec![CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])]);
        assert!(matches!(t.insert(v.clone(), half), Err(FamilyError::ValueOutsideKey)));
        t.insert(v.clone(), v.atoms()[0].clone()).unwrap();
        let rule = FamilyRule::Table(t);
        assert!(evaluate(&rule, &v).is_ok());
        let center = CommutativeSubalgebra::center(&a);
        assert!(matches!(evaluate(&rule, &center), Err(FamilyError::NotInDomain { .. })));
    }

    #[test]
    fn consistency_of_induced_families() {
        let a = alg(&[2, 3]);
        let p = ProjectionElement::random_with_ranks(&a, &[1, 2], 3).unwrap();
        let chains: Vec<_> = (0..40)
            .map(|s| {
                if s % 2 == 0 {
                    sampling::random_chain(&a, s, tol()).unwrap()
                } else {
                    sampling::adapted_chain(&p, s, tol()).unwrap()
                }
            })
            .collect();
        let report = check_consistency(&FamilyRule::FromProjection(p), &chains).unwrap();
        assert!(report.passed(), "{:?}", report.counterexample);
        let z = CentralProjection::new(&a, vec![false, true]).unwrap();
        assert!(check_consistency(&FamilyRule::FromCentral(z), &chains)
            .unwrap()
            .passed());
    }

    #[test]
    fn inconsistent_table_is_caught() {
        let a = alg(&[2, 2]);
        let center = CommutativeSubalgebra::center(&a);
        let bigger = sampling::random_subalgebra(&a, 4, true, tol()).unwrap();
        assert!(includes(&center, &bigger));
        let mut t = FamilyTable::new(&a);
        t.insert(center.clone(), ProjectionElement::identity(&a)).unwrap();
        t.insert(bigger.clone(), ProjectionElement::zero(&a)).unwrap();
        let report = check_consistency(&FamilyRule::Table(t), &[(center, bigger)]).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        let cx = report.counterexample.unwrap();
        assert_eq!(cx.trial, 0);
        assert!(cx.distance >= 1.0 - 1e-12);
    }

    #[test]
    fn non_chain_rejected() {
        let a = alg(&[2]);
        let v = diagonal_subalgebra(&a);
        let err = check_consistency(
            &FamilyRule::FromCentral(CentralProjection::zero(&a)),
            &[(v, CommutativeSubalgebra::center(&a))],
        );
        assert!(matches!(err, Err(FamilyError::NotAChain { index: 0 })));
    }

    #[test]
    fn invariance_examples() {
        let a = alg(&[2, 2]);
        let samples: Vec<_> = (0..20)
            .map(|s| {
                (
                    sampling::random_subalgebra(&a, s, s % 2 == 0, tol()).unwrap(),
                    BlockElement::random_unitary(&a, 100 + s),
                )
            })
            .collect();
        for z in CentralProjection::enumerate(&a) {
            assert!(check_invariance(&FamilyRule::FromCentral(z), &samples)
                .unwrap()
                .passed());
        }
        let p = ProjectionElement::random_with_ranks(&a, &[1, 2], 1).unwrap();
        let v = diagonal_subalgebra(&a);
        let id = check_invariance(
            &FamilyRule::FromProjection(p.clone()),
            &[(v, BlockElement::identity(&a))],
        )
        .unwrap();
        assert!(id.passed());

        let w = find_invariance_violation(&p, tol()).unwrap();
        let report = check_invariance(
            &FamilyRule::FromProjection(p),
            &[(w.subalgebra.clone(), w.unitary.clone())],
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
    }

    #[test]
    fn center_value_examples() {
        let a = alg(&[2, 3]);
        for z in CentralProjection::enumerate(&a) {
            assert_eq!(center_value(&FamilyRule::FromCentral(z.clone())).unwrap(), z);
        }
        let p = proj(&a, vec![CMatrix::identity(2), CMatrix::unit(3, 0, 0)]);
        assert_eq!(
            center_value(&FamilyRule::FromProjection(p)).unwrap().mask(),
            &[true, false]
        );
        let id = ProjectionElement::identity(&a);
        assert_eq!(
            center_value(&FamilyRule::FromProjection(id)).unwrap(),
            CentralProjection::identity(&a)
        );
    }

    #[test]
    fn theorem_round_trip() {
        let a = alg(&[2, 1]);
        let subs: Vec<_> = (0..6)
            .map(|s| sampling::random_subalgebra(&a, s, s % 2 == 0, tol()).unwrap())
            .collect();
        let us: Vec<_> = (0..3).map(|s| BlockElement::random_unitary(&a, 50 + s)).collect();
        for z in CentralProjection::enumerate(&a) {
            let report = verify_theorem(&FamilyRule::FromCentral(z.clone()), &subs, &us).unwrap();
            assert!(report.passed());
            assert_eq!(report.center, z);
            let report = verify_theorem(&FamilyRule::FromProjection(z.to_projection()), &subs, &us).unwrap();
            assert_eq!(report.center, z);
        }
    }

    #[test]
    fn theorem_rejects_non_central() {
        let a = alg(&[3]);
        let p = ProjectionElement::random_with_ranks(&a, &[1], 8).unwrap();
        let w = find_invariance_violation(&p, tol()).unwrap();
        let subs = vec![w.subalgebra.clone()];
        let us = vec![w.unitary.clone()];
        match verify_theorem(&FamilyRule::FromProjection(p), &subs, &us) {
            Err(FamilyError::PreconditionFailed { stage, report }) => {
                assert_eq!(stage, Stage::Invariance);
                assert_eq!(report.verdict, Verdict::Fail);
            }
            other => panic!("expected invariance failure, got {other:?}"),
        }
    }

    #[test]
    fn witness_in_m2() {
        // p = E11, u swaps e1 and e2; V_p is the diagonal algebra, uVu* = V,
        // Π_p(uVu*) = E11 while u p u* = E22.
        let a = alg(&[2]);
        let p = proj(&a, vec![CMatrix::unit(2, 0, 0)]);
        let w = find_invariance_violation(&p, tol()).unwrap();
        assert_eq!(w.method, WitnessMethod::Swap { block: 0 });
        assert!((w.gap - 1.0).abs() < 1e-12);
        assert!(w.rhs.dist(&proj(&a, vec![CMatrix::unit(2, 1, 1)])) < 1e-12);
        assert!(w.is_valid());
    }

    #[test]
    fn witness_confined_to_block() {
        let a = alg(&[2, 2]);
        let p = proj(&a, vec![CMatrix::unit(2, 0, 0), CMatrix::identity(2)]);
        let w = find_invariance_violation(&p, tol()).unwrap();
        assert_eq!(w.method, WitnessMethod::Swap { block: 0 });
        assert_eq!(w.unitary.block(1), &CMatrix::identity(2));
        assert!(w.lhs.block(1).dist(w.rhs.block(1)) < 1e-12);
        assert!(w.is_valid());
    }

    #[test]
    fn witness_rejects_central() {
        let a = alg(&[2, 3]);
        let err = find_invariance_violation(&ProjectionElement::identity(&a), tol());
        assert!(matches!(err, Err(FamilyError::CentralProjection)));
    }

    #[test]
    fn monotone_along_chains() {
        let a = alg(&[3, 2]);
        let p = ProjectionElement::random_with_ranks(&a, &[2, 1], 21).unwrap();
        let rule = FamilyRule::FromProjection(p.clone());
        for s in 0..30 {
            let (v, w) = sampling::adapted_chain(&p, s, tol()).unwrap();
            let lo = evaluate(&rule, &v).unwrap();
            let hi = evaluate(&rule, &w).unwrap();
            assert!(lo.leq(&hi, FAMILY_TOL));
        }
    }

    #[test]
    fn supremum_property_on_cover_families() {
        // Π(V_m) ≥ m for all m in M implies Π(V_s) ≥ s, for s = sup M.
        let a = alg(&[4, 3]);
        let q = ProjectionElement::random_with_ranks(&a, &[1, 1], 2).unwrap();
        let cert = crate::covering::main_lemma_cover(&q, tol()).unwrap();
        let rule = FamilyRule::FromProjection(cert.sup.clone());
        for m in &cert.family {
            let vm = generate(&a, &[m.as_element().clone()], true, tol()).unwrap();
            assert!(m.leq(&evaluate(&rule, &vm).unwrap(), FAMILY_TOL));
        }
        let vs = generate(&a, &[cert.sup.as_element().clone()], true, tol()).unwrap();
        assert!(cert.sup.leq(&evaluate(&rule, &vs).unwrap(), FAMILY_TOL));
    }
}
