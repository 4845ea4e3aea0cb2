//! Commutative unital subalgebras, represented by their atoms.
//!
//! In finite dimension a commutative sub-von-Neumann-algebra is the span of
//! its minimal projections, and every ideal of it is spanned by a subset of
//! those atoms. Ideals are therefore stored as atom-index sets.

use std::collections::BTreeSet;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{AlgebraError, BlockAlgebra, BlockElement, CentralProjection, ProjectionElement};
use crate::linalg::{self, LinalgError, Tolerance};

/// Threshold for deciding `e ≤ p` and atom membership.
pub const MEMBERSHIP_TOL: f64 = 1e-7;
/// Threshold for orthogonality and resolution of the identity.
pub const ATOM_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommutativeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("atoms {first} and {second} are not orthogonal (overlap {overlap:.3e})")]
    NotOrthogonal { first: usize, second: usize, overlap: f64 },
    #[error("atoms do not sum to the identity (defect {defect:.3e})")]
    NotResolution { defect: f64 },
    #[error("atom {index} is zero")]
    ZeroAtom { index: usize },
    #[error("joint eigenspace leaks across blocks (residual {residual:.3e})")]
    OffBlock { residual: f64 },
}

/// A commutative unital subalgebra, given by its atoms.
#[derive(Debug, Clone)]
pub struct CommutativeSubalgebra {
    algebra: BlockAlgebra,
    atoms: Vec<ProjectionElement>,
    contains_center: bool,
}

impl CommutativeSubalgebra {
    /// Validates a list of atoms and records whether the center is contained.
    pub fn from_atoms(algebra: &BlockAlgebra, atoms: Vec<ProjectionElement>) -> Result<Self, CommutativeError> {
        let mut sum = BlockElement::zero(algebra);
        for (i, e) in atoms.iter().enumerate() {
            if e.algebra() != algebra {
                return Err(AlgebraError::AlgebraMismatch {
                    left: algebra.dims().to_vec(),
                    right: e.algebra().dims().to_vec(),
                }
                .into());
            }
            if e.as_element().max_abs() <= MEMBERSHIP_TOL {
                return Err(CommutativeError::ZeroAtom { index: i });
            }
            for (j, f) in atoms.iter().enumerate().skip(i + 1) {
                let overlap = e.overlap(f);
                if overlap > ATOM_TOL {
                    return Err(CommutativeError::NotOrthogonal {
                        first: i,
                        second: j,
                        overlap,
                    });
                }
            }
            sum = &sum + e.as_element();
        }
        let defect = sum.dist(&BlockElement::identity(algebra));
        if defect > ATOM_TOL {
            return Err(CommutativeError::NotResolution { defect });
        }
        let contains_center = atoms.iter().all(|e| support_blocks(e) == 1);
        Ok(Self {
            algebra: algebra.clone(),
            atoms,
            contains_center,
        })
    }

    /// The center `Z(A)`: atoms are the block identities.
    pub fn center(algebra: &BlockAlgebra) -> Self {
        let atoms = (0..algebra.num_blocks())
            .map(|k| CentralProjection::minimal(algebra, k).to_projection())
            .collect();
        Self {
            algebra: algebra.clone(),
            atoms,
            contains_center: true,
        }
    }

    /// The trivial subalgebra `ℂ·1`.
    pub fn trivial(algebra: &BlockAlgebra) -> Self {
        Self {
            algebra: algebra.clone(),
            atoms: vec![ProjectionElement::identity(algebra)],
            contains_center: algebra.num_blocks() == 1,
        }
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn atoms(&self) -> &[ProjectionElement] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains_center(&self) -> bool {
        self.contains_center
    }

    /// Indices of the atoms `e` with `e ≤ p`.
    pub fn atoms_below(&self, p: &ProjectionElement) -> BTreeSet<usize> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, e)| e.leq(p, MEMBERSHIP_TOL))
            .map(|(i, _)| i)
            .collect()
    }

    /// Sum of the selected atoms.
    pub fn sum_of(&self, indices: &BTreeSet<usize>) -> ProjectionElement {
        ProjectionElement::orthogonal_sum(&self.algebra, indices.iter().map(|&i| &self.atoms[i]))
    }

    /// True iff `p` is a sum of atoms, i.e. `p ∈ V`.
    pub fn contains_projection(&self, p: &ProjectionElement) -> bool {
        self.sum_of(&self.atoms_below(p)).dist(p) <= MEMBERSHIP_TOL
    }

    /// Same atom set, in any order.
    pub fn same_as(&self, other: &Self) -> bool {
        self.algebra == other.algebra
            && self.len() == other.len()
            && self
                .atoms
                .iter()
                .all(|e| other.atoms.iter().any(|f| e.dist(f) <= MEMBERSHIP_TOL))
    }
}

fn support_blocks(e: &ProjectionElement) -> usize {
    (0..e.algebra().num_blocks())
        .filter(|&k| e.block(k).max_abs() > MEMBERSHIP_TOL)
        .count()
}

/// The commutative subalgebra generated by `xs`, and by the center when `with_center`.
///
/// With the center included, the first splitting step separates the blocks,
/// so the atoms come out grouped by block.
pub fn generate(
    algebra: &BlockAlgebra,
    xs: &[BlockElement],
    with_center: bool,
    tol: Tolerance,
) -> Result<CommutativeSubalgebra, CommutativeError> {
    let n = algebra.total_dim();
    let mut generators = Vec::with_capacity(xs.len() + 1);
    if with_center && algebra.num_blocks() > 1 {
        let label = BlockElement::from_fn(algebra, |k, n| {
            linalg::CMatrix::identity(n).scale(Complex64::new((k + 1) as f64, 0.0))
        });
        generators.push(label.to_dense());
    }
    for x in xs {
        if x.algebra() != algebra {
            return Err(AlgebraError::AlgebraMismatch {
                left: algebra.dims().to_vec(),
                right: x.algebra().dims().to_vec(),
            }
            .into());
        }
        generators.push(x.to_dense());
    }
    let dense_atoms = linalg::joint_spectral_atoms(&generators, n, tol).map_err(|e| match e {
        // report generator indices relative to `xs`
        LinalgError::NonCommuting { first, second, defect } if with_center && algebra.num_blocks() > 1 => {
            LinalgError::NonCommuting {
                first: first - 1,
                second: second - 1,
                defect,
            }
        }
        LinalgError::NonNormal { index, defect } if with_center && algebra.num_blocks() > 1 => LinalgError::NonNormal {
            index: index - 1,
            defect,
        },
        other => other,
    })?;
    let mut atoms = Vec::with_capacity(dense_atoms.len());
    for a in &dense_atoms {
        let residual = BlockElement::off_block_residual(algebra, a);
        if residual > ATOM_TOL {
            return Err(CommutativeError::OffBlock { residual });
        }
        atoms.push(ProjectionElement::assume(BlockElement::from_dense(algebra, a)));
    }
    CommutativeSubalgebra::from_atoms(algebra, atoms)
}

/// `V ⊆ W`: every atom of `V` is a sum of atoms of `W`.
pub fn includes(v: &CommutativeSubalgebra, w: &CommutativeSubalgebra) -> bool {
    v.algebra == w.algebra && v.atoms.iter().all(|e| w.contains_projection(e))
}

/// `uVu*`, atom by atom.
pub fn conjugate_subalgebra(
    v: &CommutativeSubalgebra,
    u: &BlockElement,
) -> Result<CommutativeSubalgebra, AlgebraError> {
    let atoms = v.atoms.iter().map(|e| e.conjugate(u)).collect::<Result<Vec<_>, _>>()?;
    Ok(CommutativeSubalgebra {
        algebra: v.algebra.clone(),
        atoms,
        contains_center: v.contains_center,
    })
}

/// The largest projection of `V` below `p`: the sum of the atoms under `p`.
pub fn largest_projection_below(v: &CommutativeSubalgebra, p: &ProjectionElement) -> ProjectionElement {
    v.sum_of(&v.atoms_below(p))
}

/// An ideal of a commutative subalgebra, spanned by some of its atoms.
#[derive(Debug, Clone)]
pub struct CommutativeIdeal<'a> {
    subalgebra: &'a CommutativeSubalgebra,
    atoms: BTreeSet<usize>,
}

impl<'a> CommutativeIdeal<'a> {
    /// Returns `None` if an index is out of range.
    pub fn new(subalgebra: &'a CommutativeSubalgebra, atoms: BTreeSet<usize>) -> Option<Self> {
        atoms
            .iter()
            .all(|&i| i < subalgebra.len())
            .then_some(Self { subalgebra, atoms })
    }

    pub fn subalgebra(&self) -> &'a CommutativeSubalgebra {
        self.subalgebra
    }

    pub fn atom_indices(&self) -> &BTreeSet<usize> {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.atoms.len() == self.subalgebra.len()
    }

    pub fn meet(&self, other: &Self) -> Self {
        Self {
            subalgebra: self.subalgebra,
            atoms: self.atoms.intersection(&other.atoms).copied().collect(),
        }
    }

    pub fn join(&self, other: &Self) -> Self {
        Self {
            subalgebra: self.subalgebra,
            atoms: self.atoms.union(&other.atoms).copied().collect(),
        }
    }
}

/// Unit of the ideal: the sum of its atoms.
pub fn ideal_support(ideal: &CommutativeIdeal<'_>) -> ProjectionElement {
    ideal.subalgebra.sum_of(&ideal.atoms)
}

/// `zA ∩ V` for the total ideal `zA`.
pub fn total_partial_ideal<'a>(z: &CentralProjection, v: &'a CommutativeSubalgebra) -> CommutativeIdeal<'a> {
    CommutativeIdeal {
        subalgebra: v,
        atoms: v.atoms_below(&z.to_projection()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `Ap`
    Left,
    /// `pA`
    Right,
}

/// `I ∩ V` for the one-sided ideal `I = pA` (right) or `Ap` (left).
///
/// An atom `e` lies in `pA` iff `pe = e`, and in `Ap` iff `ep = e`.
pub fn one_sided_partial_ideal<'a>(
    p: &ProjectionElement,
    side: Side,
    v: &'a CommutativeSubalgebra,
) -> CommutativeIdeal<'a> {
    let atoms = v
        .atoms
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            let prod = match side {
                Side::Right => p.as_element() * e.as_element(),
                Side::Left => e.as_element() * p.as_element(),
            };
            prod.dist(e.as_element()) <= MEMBERSHIP_TOL
        })
        .map(|(i, _)| i)
        .collect();
    CommutativeIdeal { subalgebra: v, atoms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn alg(dims: &[usize]) -> BlockAlgebra {
        BlockAlgebra::new(dims.to_vec()).unwrap()
    }

    fn el(a: &BlockAlgebra, blocks: Vec<CMatrix>) -> BlockElement {
        BlockElement::new(a, blocks).unwrap()
    }

    fn proj(a: &BlockAlgebra, blocks: Vec<CMatrix>) -> ProjectionElement {
        ProjectionElement::new(el(a, blocks), tol()).unwrap()
    }

    fn diagonal_m(n: usize) -> CommutativeSubalgebra {
        let a = alg(&[n]);
        let d: Vec<f64> = (0..n).map(|i| i as f64).collect();
        generate(&a, &[el(&a, vec![CMatrix::diag_real(&d)])], false, tol()).unwrap()
    }

    fn half_ones() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])
    }

    #[test]
    fn generate_center_only() {
        let a = alg(&[2, 3]);
        let z = generate(&a, &[], true, tol()).unwrap();
        assert!(z.same_as(&CommutativeSubalgebra::center(&a)));
        assert!(z.contains_center());
        assert_eq!(
            z.atoms()[0].dist(&CentralProjection::minimal(&a, 0).to_projection()),
            0.0
        );
    }

    #[test]
    fn generate_projection_with_center() {
        let a = alg(&[2, 2]);
        let p = el(&a, vec![CMatrix::unit(2, 0, 0), CMatrix::zeros(2, 2)]);
        let v = generate(&a, &[p], true, tol()).unwrap();
        let expected = [
            proj(&a, vec![CMatrix::unit(2, 0, 0), CMatrix::zeros(2, 2)]),
            proj(&a, vec![CMatrix::unit(2, 1, 1), CMatrix::zeros(2, 2)]),
            proj(&a, vec![CMatrix::zeros(2, 2), CMatrix::identity(2)]),
        ];
        assert_eq!(v.len(), 3);
        for e in &expected {
            assert!(v.atoms().iter().any(|f| f.dist(e) < 1e-10));
        }
        assert!(v.contains_center());
    }

    #[test]
    fn generate_without_center_can_span_blocks() {
        let a = alg(&[2, 2]);
        let v = generate(&a, &[], false, tol()).unwrap();
        assert_eq!(v.len(), 1);
        assert!(!v.contains_center());
    }

    #[test]
    fn generate_masa() {
        let v = diagonal_m(3);
        assert_eq!(v.len(), 3);
        for (i, e) in v.atoms().iter().enumerate() {
            assert!(e.block(0).dist(&CMatrix::unit(3, i, i)) < 1e-12);
        }
    }

    #[test]
    fn generate_rejects_non_commuting() {
        let a = alg(&[2]);
        let xs = [el(&a, vec![CMatrix::unit(2, 0, 0)]), el(&a, vec![half_ones()])];
        let err = generate(&a, &xs, true, tol()).unwrap_err();
        assert!(matches!(
            err,
            CommutativeError::Linalg(LinalgError::NonCommuting {
                first: 0,
                second: 1,
                ..
            })
        ));
        let b = alg(&[2, 1]);
        let xs = [
            el(&b, vec![CMatrix::unit(2, 0, 0), CMatrix::identity(1)]),
            el(&b, vec![half_ones(), CMatrix::identity(1)]),
        ];
        let err = generate(&b, &xs, true, tol()).unwrap_err();
        assert!(matches!(
            err,
            CommutativeError::Linalg(LinalgError::NonCommuting {
                first: 0,
                second: 1,
                ..
            })
        ));
    }

    #[test]
    fn from_atoms_validation() {
        let a = alg(&[2]);
        let e11 = proj(&a, vec![CMatrix::unit(2, 0, 0)]);
        let p = proj(&a, vec![half_ones()]);
        assert!(matches!(
            CommutativeSubalgebra::from_atoms(&a, vec![e11.clone()]),
            Err(CommutativeError::NotResolution { .. })
        ));
        assert!(matches!(
            CommutativeSubalgebra::from_atoms(&a, vec![e11.clone(), p]),
            Err(CommutativeError::NotOrthogonal { .. })
        ));
        assert!(matches!(
            CommutativeSubalgebra::from_atoms(&a, vec![ProjectionElement::zero(&a), ProjectionElement::identity(&a)]),
            Err(CommutativeError::ZeroAtom { index: 0 })
        ));
    }

    #[test]
    fn includes_examples() {
        let a = alg(&[2, 3]);
        let u = BlockElement::random_unitary(&a, 3);
        let g =
            &(&u * &el(
                &a,
                vec![CMatrix::diag_real(&[1.0, 2.0]), CMatrix::diag_real(&[1.0, 1.0, 3.0])],
            )) * &u.adjoint();
        let v = generate(&a, &[g], true, tol()).unwrap();
        assert!(includes(&v, &v));
        assert!(includes(&CommutativeSubalgebra::center(&a), &v));
        assert!(includes(&CommutativeSubalgebra::trivial(&a), &v));
        assert!(!includes(&v, &CommutativeSubalgebra::center(&a)));
    }

    #[test]
    fn conjugation_examples() {
        let v = diagonal_m(2);
        let a = v.algebra().clone();
        assert!(conjugate_subalgebra(&v, &BlockElement::identity(&a))
            .unwrap()
            .same_as(&v));

        let u = BlockElement::random_unitary(&a, 9);
        let there = conjugate_subalgebra(&v, &u).unwrap();
        let back = conjugate_subalgebra(&there, &u.adjoint()).unwrap();
        for (e, f) in v.atoms().iter().zip(back.atoms()) {
            assert!(e.dist(f) <= 1e-7);
        }

        let swap = el(&a, vec![CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])]);
        let swapped = conjugate_subalgebra(&v, &swap).unwrap();
        assert!(swapped.same_as(&v));
        assert!(swapped.atoms()[0].dist(&v.atoms()[1]) < 1e-14);
    }

    #[test]
    fn largest_projection_below_examples() {
        let v = diagonal_m(2);
        let a = v.algebra().clone();
        let id = ProjectionElement::identity(&a);
        assert!(largest_projection_below(&v, &id).dist(&id) < 1e-12);

        // brute force over the four projections {0, E11, E22, I} of V
        let p = proj(&a, vec![half_ones()]);
        let candidates = [
            ProjectionElement::zero(&a),
            v.atoms()[0].clone(),
            v.atoms()[1].clone(),
            id.clone(),
        ];
        let under: Vec<_> = candidates.iter().filter(|c| c.leq(&p, 1e-7)).collect();
        assert_eq!(under.len(), 1);
        assert!(largest_projection_below(&v, &p).dist(under[0]) < 1e-12);

        let e22 = v.atoms()[1].clone();
        assert!(largest_projection_below(&v, &e22).dist(&e22) < 1e-12);
    }

    #[test]
    fn ideal_support_examples() {
        let v = diagonal_m(3);
        let a = v.algebra().clone();
        let empty = CommutativeIdeal::new(&v, BTreeSet::new()).unwrap();
        assert_eq!(ideal_support(&empty), ProjectionElement::zero(&a));
        let all = CommutativeIdeal::new(&v, (0..3).collect()).unwrap();
        assert!(ideal_support(&all).dist(&ProjectionElement::identity(&a)) < 1e-12);
        let some = CommutativeIdeal::new(&v, [0, 2].into_iter().collect()).unwrap();
        let expected = &CMatrix::unit(3, 0, 0) + &CMatrix::unit(3, 2, 2);
        assert!(ideal_support(&some).block(0).dist(&expected) < 1e-12);
        assert!(CommutativeIdeal::new(&v, [3].into_iter().collect()).is_none());
    }

    #[test]
    fn ideal_lattice_is_set_lattice() {
        let v = diagonal_m(3);
        let i = CommutativeIdeal::new(&v, [0, 1].into_iter().collect()).unwrap();
        let j = CommutativeIdeal::new(&v, [1, 2].into_iter().collect()).unwrap();
        assert_eq!(i.meet(&j).atom_indices(), &[1].into_iter().collect());
        assert!(i.join(&j).is_whole());
    }

    #[test]
    fn total_partial_ideal_examples() {
        let a = alg(&[2, 2]);
        let u = BlockElement::random_unitary(&a, 1);
        let g =
            &(&u * &el(
                &a,
                vec![CMatrix::diag_real(&[1.0, 2.0]), CMatrix::diag_real(&[3.0, 4.0])],
            )) * &u.adjoint();
        let v = generate(&a, &[g], false, tol()).unwrap();
        assert!(total_partial_ideal(&CentralProjection::identity(&a), &v).is_whole());
        assert!(total_partial_ideal(&CentralProjection::zero(&a), &v).is_zero());

        let center = CommutativeSubalgebra::center(&a);
        let z = CentralProjection::new(&a, vec![true, false]).unwrap();
        let ideal = total_partial_ideal(&z, &center);
        assert_eq!(ideal.atom_indices(), &[0].into_iter().collect());

        for v in [&v, &center] {
            for z in CentralProjection::enumerate(&a) {
                let ideal = total_partial_ideal(&z, v);
                assert_eq!(ideal.atom_indices(), &v.atoms_below(&z.to_projection()));
                assert!(ideal_support(&ideal).dist(&largest_projection_below(v, &z.to_projection())) == 0.0);
            }
        }
    }

    #[test]
    fn one_sided_examples() {
        let v = diagonal_m(3);
        let a = v.algebra().clone();
        for side in [Side::Left, Side::Right] {
            assert!(one_sided_partial_ideal(&ProjectionElement::identity(&a), side, &v).is_whole());
            assert!(one_sided_partial_ideal(&ProjectionElement::zero(&a), side, &v).is_zero());
            let e11 = proj(&a, vec![CMatrix::unit(3, 0, 0)]);
            let ideal = one_sided_partial_ideal(&e11, side, &v);
            assert_eq!(ideal.atom_indices(), &[0].into_iter().collect());
        }
    }
}
