//! Partial orthogonality and the covering construction for a projection's
//! central carrier.
//!
//! Two projections are partially orthogonal when some central `z` makes
//! `zp ⊥ zq` and `z⊥p = z⊥q`. The covering construction packs `⌊n_b / r_b⌋`
//! mutually orthogonal copies of `q_b` into every block `b`, assembles them
//! into a partially orthogonal subset `M` of the unitary orbit of `q`, and
//! certifies that the uncovered remainder `C(q) − sup M` sits strictly below
//! a conjugate of `q`.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    self, AlgebraError, BlockAlgebra, BlockElement, CentralProjection, ProjectionElement, RankVector,
};
use crate::linalg::{self, CMatrix, LinalgError, Tolerance};

/// Threshold for every identity checked in this module.
pub const COVER_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("the zero projection has no cover with a strict remainder bound")]
    ZeroProjection,
    #[error("witness precondition failed: `{identity}` (defect {defect:.3e})")]
    Glue { identity: &'static str, defect: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A central projection `z` with `zp ⊥ zq` and `z⊥p = z⊥q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialOrthWitness {
    /// The orthogonal side; its complement is the equal side.
    pub z: CentralProjection,
}

impl PartialOrthWitness {
    /// `(‖(zp)(zq)‖_max, ‖z⊥p − z⊥q‖_max)`.
    pub fn defects(&self, p: &ProjectionElement, q: &ProjectionElement) -> (f64, f64) {
        let zc = self.z.complement();
        (p.cut(&self.z).overlap(&q.cut(&self.z)), p.cut(&zc).dist(&q.cut(&zc)))
    }

    pub fn verify(&self, p: &ProjectionElement, q: &ProjectionElement) -> bool {
        let (orth, eq) = self.defects(p, q);
        orth <= COVER_TOL && eq <= COVER_TOL
    }
}

/// Decides partial orthogonality block by block.
///
/// A block is orthogonal-eligible when `‖p_k q_k‖ ≤ 1e-7` and equal-eligible
/// when `‖p_k − q_k‖ ≤ 1e-7`; orthogonal is preferred when both hold.
///
/// # Panics
/// If `p` and `q` live in different algebras.
pub fn partially_orthogonal(p: &ProjectionElement, q: &ProjectionElement) -> Option<PartialOrthWitness> {
    assert_eq!(p.algebra(), q.algebra(), "projections of different algebras");
    let mut mask = Vec::with_capacity(p.algebra().num_blocks());
    for k in 0..p.algebra().num_blocks() {
        let (pk, qk) = (p.block(k), q.block(k));
        if (pk * qk).max_abs() <= COVER_TOL {
            mask.push(true);
        } else if pk.dist(qk) <= COVER_TOL {
            mask.push(false);
        } else {
            return None;
        }
    }
    Some(PartialOrthWitness {
        z: CentralProjection::new(p.algebra(), mask).expect("mask length matches"),
    })
}

/// Combines witnesses for the two halves cut out by a central `z`.
///
/// `y` and `x` follow the equal-side convention: `yz·p1 = yz·p2`,
/// `y⊥z·p1 ⊥ y⊥z·p2`, and likewise for `x` on `z⊥`. The glued witness has
/// orthogonal side `y⊥z + x⊥z⊥`.
pub fn glue_witnesses(
    p1: &ProjectionElement,
    p2: &ProjectionElement,
    z: &CentralProjection,
    y: &CentralProjection,
    x: &CentralProjection,
) -> Result<PartialOrthWitness, CoverError> {
    let zc = z.complement();
    let equal = |c: &CentralProjection| p1.cut(c).dist(&p2.cut(c));
    let orth = |c: &CentralProjection| p1.cut(c).overlap(&p2.cut(c));
    let checks: [(&'static str, f64); 4] = [
        ("yz p1 = yz p2", equal(&y.meet(z))),
        ("y⊥z p1 ⊥ y⊥z p2", orth(&y.complement().meet(z))),
        ("xz⊥ p1 = xz⊥ p2", equal(&x.meet(&zc))),
        ("x⊥z⊥ p1 ⊥ x⊥z⊥ p2", orth(&x.complement().meet(&zc))),
    ];
    for (identity, defect) in checks {
        if defect > COVER_TOL {
            return Err(CoverError::Glue { identity, defect });
        }
    }
    let w = y.complement().meet(z).join(&x.complement().meet(&zc));
    let glued = PartialOrthWitness { z: w };
    let (o, e) = glued.defects(p1, p2);
    if e > COVER_TOL {
        return Err(CoverError::Glue {
            identity: "(yz + xz⊥) p1 = (yz + xz⊥) p2",
            defect: e,
        });
    }
    if o > COVER_TOL {
        return Err(CoverError::Glue {
            identity: "(y⊥z + x⊥z⊥) p1 ⊥ (y⊥z + x⊥z⊥) p2",
            defect: o,
        });
    }
    Ok(glued)
}

/// Packing of one block: `copies` orthogonal rank-`rank` pieces plus a remainder.
#[derive(Debug, Clone)]
struct BlockPacking {
    rank: usize,
    /// `pieces[0] = q_b`; the rest are spanned by consecutive kernel vectors.
    pieces: Vec<CMatrix>,
    remainder: CMatrix,
    /// Conjugator on this block: carries `q_b` onto a subspace containing the remainder.
    unitary: CMatrix,
}

fn pack_block(q_block: &CMatrix, tol: Tolerance) -> Result<BlockPacking, CoverError> {
    let n = q_block.rows();
    let rank = linalg::numerical_rank(q_block, tol);
    if rank == 0 {
        return Ok(BlockPacking {
            rank,
            pieces: Vec::new(),
            remainder: CMatrix::zeros(n, n),
            unitary: CMatrix::identity(n),
        });
    }
    let rk = linalg::range_kernel(q_block)?;
    if rk.rank != rank {
        return Err(LinalgError::RankMismatch {
            left: rank,
            right: rk.rank,
        }
        .into());
    }
    let basis = rk.basis;
    let copies = n / rank;
    let span = |cols: std::ops::Range<usize>| basis.select_columns(&cols.collect::<Vec<_>>()).column_projection();
    let mut pieces = vec![q_block.clone()];
    for i in 1..copies {
        pieces.push(span(i * rank..(i + 1) * rank));
    }
    let leftover = n - copies * rank;
    let remainder = if leftover == 0 {
        CMatrix::zeros(n, n)
    } else {
        span(copies * rank..n)
    };

    // Target frame: the first `rank` columns span r − ρ range vectors plus the
    // ρ remainder vectors, so `u q u*` contains the remainder. ρ < r always.
    let mut order: Vec<usize> = (0..rank - leftover).collect();
    order.extend(copies * rank..n);
    order.extend(rank..copies * rank);
    order.extend(rank - leftover..rank);
    debug_assert_eq!(order.len(), n);
    let target = basis.select_columns(&order);
    let unitary = &target * &basis.adjoint();

    Ok(BlockPacking {
        rank,
        pieces,
        remainder,
        unitary,
    })
}

fn pack(q: &ProjectionElement, tol: Tolerance) -> Result<Vec<BlockPacking>, CoverError> {
    if algebra::rank_vector(q, tol).total() == 0 {
        return Err(CoverError::ZeroProjection);
    }
    (0..q.algebra().num_blocks())
        .map(|k| pack_block(q.block(k), tol))
        .collect()
}

fn family_from_packing(algebra: &BlockAlgebra, packing: &[BlockPacking]) -> Vec<ProjectionElement> {
    let size = packing.iter().map(|b| b.pieces.len()).max().unwrap_or(0);
    (0..size)
        .map(|i| {
            ProjectionElement::assume(BlockElement::from_fn(algebra, |k, n| {
                let pieces = &packing[k].pieces;
                if pieces.is_empty() {
                    CMatrix::zeros(n, n)
                } else {
                    pieces[i % pieces.len()].clone()
                }
            }))
        })
        .collect()
}

/// A partially orthogonal subset of the unitary orbit of `q` containing `q`.
///
/// Block `b` of the `i`-th member is the `(i mod t_b)`-th packed copy of
/// `q_b`, where `t_b = ⌊n_b / r_b⌋`; the family has `max_b t_b` members.
pub fn maximal_partially_orthogonal_family(
    q: &ProjectionElement,
    tol: Tolerance,
) -> Result<Vec<ProjectionElement>, CoverError> {
    let packing = pack(q, tol)?;
    Ok(family_from_packing(q.algebra(), &packing))
}

/// Witness for the pair `(family[i], family[j])`.
#[derive(Debug, Clone, Serialize)]
pub struct PairWitness {
    pub i: usize,
    pub j: usize,
    pub witness: PartialOrthWitness,
}

/// Packing arithmetic for one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockSummary {
    pub dim: usize,
    pub rank: usize,
    pub copies: usize,
    pub remainder_rank: usize,
}

/// The covering of `C(q)` together with everything needed to re-check it.
#[derive(Debug, Clone)]
pub struct CoverCertificate {
    pub q: ProjectionElement,
    pub family: Vec<ProjectionElement>,
    /// `s = sup family`.
    pub sup: ProjectionElement,
    /// `C(q) − s`.
    pub remainder: ProjectionElement,
    /// `u` with `remainder < u q u*`.
    pub unitary: BlockElement,
    pub witnesses: Vec<PairWitness>,
    pub blocks: Vec<BlockSummary>,
}

/// Builds the cover of `C(q)` and its certificate.
pub fn main_lemma_cover(q: &ProjectionElement, tol: Tolerance) -> Result<CoverCertificate, CoverError> {
    let algebra = q.algebra();
    let packing = pack(q, tol)?;
    let family = family_from_packing(algebra, &packing);

    let sup = ProjectionElement::assume(BlockElement::from_fn(algebra, |k, n| {
        packing[k]
            .pieces
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, piece| &acc + piece)
    }));
    let remainder = ProjectionElement::assume(BlockElement::from_fn(algebra, |k, _| packing[k].remainder.clone()));
    let unitary = BlockElement::from_fn(algebra, |k, _| packing[k].unitary.clone());

    let mut witnesses = Vec::new();
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            // the modular scheme makes every pair partially orthogonal
            let witness = partially_orthogonal(&family[i], &family[j])
                .expect("packed copies are equal or orthogonal in every block");
            witnesses.push(PairWitness { i, j, witness });
        }
    }

    let blocks = algebra
        .dims()
        .iter()
        .zip(&packing)
        .map(|(&dim, b)| BlockSummary {
            dim,
            rank: b.rank,
            copies: b.pieces.len(),
            remainder_rank: if b.rank == 0 { 0 } else { dim % b.rank },
        })
        .collect();

    Ok(CoverCertificate {
        q: q.clone(),
        family,
        sup,
        remainder,
        unitary,
        witnesses,
        blocks,
    })
}

/// Outcome of re-checking a certificate; one flag per condition.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateChecks {
    pub q_in_family: bool,
    pub orbit_membership: bool,
    pub max_commutator: f64,
    pub pairwise_commute: bool,
    pub witnesses_valid: bool,
    pub sup_is_join: bool,
    pub remainder_orthogonal_to_sup: bool,
    pub sup_plus_remainder_is_carrier: bool,
    pub unitary_valid: bool,
    pub remainder_below_conjugate: bool,
    pub strict_rank_gap: bool,
    pub remainder_minimal: bool,
    pub q_ranks: RankVector,
    pub sup_ranks: RankVector,
    pub remainder_ranks: RankVector,
    pub conjugate_ranks: RankVector,
}

impl CertificateChecks {
    pub fn all_passed(&self) -> bool {
        self.q_in_family
            && self.orbit_membership
            && self.pairwise_commute
            && self.witnesses_valid
            && self.sup_is_join
            && self.remainder_orthogonal_to_sup
            && self.sup_plus_remainder_is_carrier
            && self.unitary_valid
            && self.remainder_below_conjugate
            && self.strict_rank_gap
            && self.remainder_minimal
    }
}

impl CoverCertificate {
    /// Re-derives every condition from the stored matrices.
    pub fn validate(&self, tol: Tolerance) -> CertificateChecks {
        let algebra = self.q.algebra();
        let q_ranks = algebra::rank_vector(&self.q, tol);
        let carrier = algebra::central_carrier(&self.q, tol);

        let q_in_family = self.family.iter().any(|m| m.dist(&self.q) <= COVER_TOL);
        let orbit_membership = self.family.iter().all(|m| algebra::rank_vector(m, tol) == q_ranks);

        let mut max_commutator: f64 = 0.0;
        for (i, m) in self.family.iter().enumerate() {
            for n in &self.family[i + 1..] {
                max_commutator = max_commutator.max(m.as_element().commutator_norm(n.as_element()));
            }
        }
        let pairs = self.family.len() * self.family.len().saturating_sub(1) / 2;
        let witnesses_valid = self.witnesses.len() == pairs
            && self.witnesses.iter().all(|w| {
                w.i < w.j && w.j < self.family.len() && w.witness.verify(&self.family[w.i], &self.family[w.j])
            });

        // independent join: distinct members per block must be orthogonal and sum to s
        let sup_is_join = self.family.iter().all(|m| m.leq(&self.sup, COVER_TOL))
            && (0..algebra.num_blocks()).all(|k| {
                let mut distinct: Vec<&CMatrix> = Vec::new();
                for m in &self.family {
                    let b = m.block(k);
                    if b.max_abs() > COVER_TOL && !distinct.iter().any(|d| d.dist(b) <= COVER_TOL) {
                        distinct.push(b);
                    }
                }
                let orthogonal = distinct
                    .iter()
                    .enumerate()
                    .all(|(i, a)| distinct[i + 1..].iter().all(|b| (*a * *b).max_abs() <= COVER_TOL));
                let n = algebra.dims()[k];
                let join = distinct.iter().fold(CMatrix::zeros(n, n), |acc, d| &acc + *d);
                orthogonal && join.dist(self.sup.block(k)) <= COVER_TOL
            });

        let sup_ranks = algebra::rank_vector(&self.sup, tol);
        let remainder_ranks = algebra::rank_vector(&self.remainder, tol);
        let remainder_orthogonal_to_sup = self.remainder.overlap(&self.sup) <= COVER_TOL;
        let carrier_p = carrier.to_projection();
        let sum = ProjectionElement::assume(self.sup.as_element() + self.remainder.as_element());
        let carrier_ranks = algebra::rank_vector(&carrier_p, tol);
        let sup_plus_remainder_is_carrier = sum.dist(&carrier_p) <= COVER_TOL
            && sup_ranks
                .0
                .iter()
                .zip(&remainder_ranks.0)
                .zip(&carrier_ranks.0)
                .all(|((s, r), c)| s + r == *c);

        let unitary_valid = self.unitary.unitarity_defect() <= algebra::UNITARY_TOL;
        let conjugate = ProjectionElement::assume(&(&self.unitary * self.q.as_element()) * &self.unitary.adjoint());
        let conjugate_ranks = algebra::rank_vector(&conjugate, tol);
        let remainder_below_conjugate = self.remainder.leq(&conjugate, COVER_TOL);
        let strict_rank_gap = carrier
            .mask()
            .iter()
            .enumerate()
            .filter(|(_, &inside)| inside)
            .all(|(k, _)| remainder_ranks.0[k] < conjugate_ranks.0[k]);

        let remainder_minimal = (0..algebra.num_blocks()).all(|k| {
            let (n, r) = (algebra.dims()[k], q_ranks.0[k]);
            if r == 0 {
                remainder_ranks.0[k] == 0
            } else {
                remainder_ranks.0[k] == n % r && n % r < r
            }
        });

        CertificateChecks {
            q_in_family,
            orbit_membership,
            max_commutator,
            pairwise_commute: max_commutator <= COVER_TOL,
            witnesses_valid,
            sup_is_join,
            remainder_orthogonal_to_sup,
            sup_plus_remainder_is_carrier,
            unitary_valid,
            remainder_below_conjugate,
            strict_rank_gap,
            remainder_minimal,
            q_ranks,
            sup_ranks,
            remainder_ranks,
            conjugate_ranks,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BlockAlgebra;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn alg(dims: &[usize]) -> BlockAlgebra {
        BlockAlgebra::new(dims.to_vec()).unwrap()
    }

    fn proj(a: &BlockAlgebra, blocks: Vec<CMatrix>) -> ProjectionElement {
        ProjectionElement::new(BlockElement::new(a, blocks).unwrap(), tol()).unwrap()
    }

    fn half_ones() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])
    }

    /// Direct reading of the definition, over all central projections.
    fn brute_force(p: &ProjectionElement, q: &ProjectionElement) -> bool {
        CentralProjection::enumerate(p.algebra()).any(|z| PartialOrthWitness { z }.verify(p, q))
    }

    #[test]
    fn witness_examples() {
        let a = alg(&[2, 2]);
        let p = ProjectionElement::random_with_ranks(&a, &[1, 2], 3).unwrap();
        assert_eq!(partially_orthogonal(&p, &p).unwrap().z, CentralProjection::zero(&a));

        let e11 = CMatrix::unit(2, 0, 0);
        let p = proj(&a, vec![e11.clone(), e11.clone()]);
        let q = proj(&a, vec![CMatrix::unit(2, 1, 1), e11.clone()]);
        let w = partially_orthogonal(&p, &q).unwrap();
        assert_eq!(w.z.mask(), &[true, false]);
        assert!(w.verify(&p, &q));

        let b = alg(&[2]);
        let p = proj(&b, vec![e11]);
        let q = proj(&b, vec![half_ones()]);
        assert!(partially_orthogonal(&p, &q).is_none());
        assert!(!brute_force(&p, &q));
    }

    #[test]
    fn zero_blocks_prefer_orthogonal() {
        let a = alg(&[2, 1]);
        let p = proj(&a, vec![CMatrix::zeros(2, 2), CMatrix::identity(1)]);
        let w = partially_orthogonal(&p, &p).unwrap();
        assert_eq!(w.z.mask(), &[true, false]);
    }

    #[test]
    fn glue_examples() {
        let a = alg(&[2, 2]);
        let e11 = CMatrix::unit(2, 0, 0);
        let p1 = proj(&a, vec![e11.clone(), e11.clone()]);
        let p2 = proj(&a, vec![CMatrix::unit(2, 1, 1), e11.clone()]);
        let z = CentralProjection::new(&a, vec![true, false]).unwrap();
        let y = CentralProjection::zero(&a);
        let x = CentralProjection::identity(&a);
        let w = glue_witnesses(&p1, &p2, &z, &y, &x).unwrap();
        assert_eq!(w.z.mask(), &[true, false]);

        // z = 1: only y matters
        let one = CentralProjection::identity(&a);
        let w = glue_witnesses(
            &p1,
            &p2,
            &one,
            &CentralProjection::new(&a, vec![false, true]).unwrap(),
            &y,
        )
        .unwrap();
        assert_eq!(w.z.mask(), &[true, false]);
        // z = 0: only x matters
        let zero = CentralProjection::zero(&a);
        let w = glue_witnesses(
            &p1,
            &p2,
            &zero,
            &y,
            &CentralProjection::new(&a, vec![false, true]).unwrap(),
        )
        .unwrap();
        assert_eq!(w.z.mask(), &[true, false]);

        let err = glue_witnesses(&p1, &p2, &z, &CentralProjection::identity(&a), &x).unwrap_err();
        assert!(matches!(
            err,
            CoverError::Glue {
                identity: "yz p1 = yz p2",
                ..
            }
        ));
    }

    #[test]
    fn family_sizes() {
        let a = alg(&[3]);
        for (rank, size) in [(1, 3), (2, 1), (3, 1)] {
            let q = ProjectionElement::random_with_ranks(&a, &[rank], 5).unwrap();
            let m = maximal_partially_orthogonal_family(&q, tol()).unwrap();
            assert_eq!(m.len(), size);
            assert_eq!(m[0], q);
        }
        let b = alg(&[2, 3]);
        let q = ProjectionElement::random_with_ranks(&b, &[1, 2], 6).unwrap();
        let m = maximal_partially_orthogonal_family(&q, tol()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(partially_orthogonal(&m[0], &m[1]).unwrap().z.mask(), &[true, false]);
    }

    #[test]
    fn cover_examples() {
        let a = alg(&[3]);
        let q = ProjectionElement::random_with_ranks(&a, &[1], 1).unwrap();
        let cert = main_lemma_cover(&q, tol()).unwrap();
        let checks = cert.validate(tol());
        assert!(checks.all_passed(), "{checks:?}");
        assert_eq!(checks.remainder_ranks, RankVector(vec![0]));
        assert_eq!(cert.family.len(), 3);

        let q = ProjectionElement::random_with_ranks(&a, &[2], 1).unwrap();
        let cert = main_lemma_cover(&q, tol()).unwrap();
        let checks = cert.validate(tol());
        assert!(checks.all_passed(), "{checks:?}");
        assert_eq!(checks.remainder_ranks, RankVector(vec![1]));
        assert_eq!(checks.conjugate_ranks, RankVector(vec![2]));

        let b = alg(&[2, 2]);
        let q = proj(&b, vec![CMatrix::unit(2, 0, 0), CMatrix::identity(2)]);
        let cert = main_lemma_cover(&q, tol()).unwrap();
        let checks = cert.validate(tol());
        assert!(checks.all_passed(), "{checks:?}");
        assert!(cert.sup.dist(&ProjectionElement::identity(&b)) < 1e-10);
        assert_eq!(checks.remainder_ranks, RankVector(vec![0, 0]));
    }

    #[test]
    fn cover_with_zero_block() {
        let a = alg(&[4, 3]);
        let q = ProjectionElement::random_with_ranks(&a, &[3, 0], 2).unwrap();
        let cert = main_lemma_cover(&q, tol()).unwrap();
        let checks = cert.validate(tol());
        assert!(checks.all_passed(), "{checks:?}");
        assert_eq!(checks.remainder_ranks, RankVector(vec![1, 0]));
        assert_eq!(cert.unitary.block(1), &CMatrix::identity(3));
    }

    #[test]
    fn zero_projection_rejected() {
        let a = alg(&[2]);
        let z = ProjectionElement::zero(&a);
        assert_eq!(main_lemma_cover(&z, tol()).unwrap_err(), CoverError::ZeroProjection);
        assert_eq!(
            maximal_partially_orthogonal_family(&z, tol()).unwrap_err(),
            CoverError::ZeroProjection
        );
    }

    #[test]
    fn tampered_certificate_fails() {
        let a = alg(&[3]);
        let q = ProjectionElement::random_with_ranks(&a, &[2], 9).unwrap();
        let mut cert = main_lemma_cover(&q, tol()).unwrap();
        cert.unitary = BlockElement::identity(&a);
        let checks = cert.validate(tol());
        assert!(!checks.remainder_below_conjugate);
        assert!(!checks.all_passed());
    }
}
