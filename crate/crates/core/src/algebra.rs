//! The ambient algebra `M_{n_1}(ℂ) ⊕ … ⊕ M_{n_K}(ℂ)`.
//!
//! Elements are stored block by block. The center is never materialized as
//! matrices: a central projection is a 0/1 mask over blocks, which keeps
//! every statement about the center exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, CMatrix, LinalgError, Tolerance};
use crate::random::derive_seed;

/// Threshold for accepting an element as unitary.
pub const UNITARY_TOL: f64 = 1e-8;
/// Threshold for matching conjugated projections.
pub const CONJUGATION_TOL: f64 = 1e-7;
/// Largest block dimension accepted by the toolkit.
pub const MAX_BLOCK_DIM: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("an algebra needs at least one block")]
    NoBlocks,
    #[error("block {block} has dimension {dim}, expected 1..={MAX_BLOCK_DIM}")]
    BadBlockDim { block: usize, dim: usize },
    #[error("expected {expected} blocks, got {got}")]
    BlockCount { expected: usize, got: usize },
    #[error("block {block} should be {expected}x{expected}, got {rows}x{cols}")]
    BlockShape {
        block: usize,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("elements belong to different algebras: {left:?} vs {right:?}")]
    AlgebraMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("block {block} is not a projection")]
    NotProjection { block: usize },
    #[error("element is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },
    #[error("projections are not unitarily equivalent: ranks {left} vs {right}")]
    NotUnitarilyEquivalent { left: RankVector, right: RankVector },
    #[error("rank {rank} exceeds block dimension {dim} in block {block}")]
    RankOutOfRange { block: usize, rank: usize, dim: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Block dimension vector `[n_1, …, n_K]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockAlgebra {
    dims: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(dims: Vec<usize>) -> Result<Self, AlgebraError> {
        if dims.is_empty() {
            return Err(AlgebraError::NoBlocks);
        }
        if let Some((block, &dim)) = dims.iter().enumerate().find(|(_, &d)| d == 0 || d > MAX_BLOCK_DIM) {
            return Err(AlgebraError::BadBlockDim { block, dim });
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    /// Dimension of the underlying Hilbert space.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Offset of each block along the diagonal of the dense representation.
    pub fn offsets(&self) -> Vec<usize> {
        self.dims
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect()
    }

    /// True when every block is one-dimensional.
    pub fn is_abelian(&self) -> bool {
        self.dims.iter().all(|&d| d == 1)
    }

    fn check_same(&self, other: &Self) -> Result<(), AlgebraError> {
        if self == other {
            Ok(())
        } else {
            Err(AlgebraError::AlgebraMismatch {
                left: self.dims.clone(),
                right: other.dims.clone(),
            })
        }
    }
}

/// A block-diagonal element.
#[derive(Clone, PartialEq)]
pub struct BlockElement {
    algebra: BlockAlgebra,
    blocks: Vec<CMatrix>,
}

impl fmt::Debug for BlockElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockElement")
            .field("dims", &self.algebra.dims)
            .field("blocks", &self.blocks)
            .finish()
    }
}

impl BlockElement {
    pub fn new(algebra: &BlockAlgebra, blocks: Vec<CMatrix>) -> Result<Self, AlgebraError> {
        if blocks.len() != algebra.num_blocks() {
            return Err(AlgebraError::BlockCount {
                expected: algebra.num_blocks(),
                got: blocks.len(),
            });
        }
        for (k, (b, &n)) in blocks.iter().zip(&algebra.dims).enumerate() {
            if b.rows() != n || b.cols() != n {
                return Err(AlgebraError::BlockShape {
                    block: k,
                    expected: n,
                    rows: b.rows(),
                    cols: b.cols(),
                });
            }
        }
        Ok(Self {
            algebra: algebra.clone(),
            blocks,
        })
    }

    pub(crate) fn from_blocks_unchecked(algebra: &BlockAlgebra, blocks: Vec<CMatrix>) -> Self {
        debug_assert!(Self::new(algebra, blocks.clone()).is_ok());
        Self {
            algebra: algebra.clone(),
            blocks,
        }
    }

    pub fn from_fn(algebra: &BlockAlgebra, f: impl FnMut(usize, usize) -> CMatrix) -> Self {
        let mut f = f;
        let blocks = algebra.dims.iter().enumerate().map(|(k, &n)| f(k, n)).collect();
        Self::from_blocks_unchecked(algebra, blocks)
    }

    pub fn identity(algebra: &BlockAlgebra) -> Self {
        Self::from_fn(algebra, |_, n| CMatrix::identity(n))
    }

    pub fn zero(algebra: &BlockAlgebra) -> Self {
        Self::from_fn(algebra, |_, n| CMatrix::zeros(n, n))
    }

    /// Diagonal blocks of a dense `N × N` matrix; off-block entries are dropped.
    pub fn from_dense(algebra: &BlockAlgebra, m: &CMatrix) -> Self {
        let offsets = algebra.offsets();
        Self::from_fn(algebra, |k, n| m.sub_block(offsets[k], n))
    }

    /// Largest entry modulus outside the diagonal blocks of `m`.
    pub fn off_block_residual(algebra: &BlockAlgebra, m: &CMatrix) -> f64 {
        let offsets = algebra.offsets();
        let block_of = |i: usize| offsets.iter().rposition(|&o| o <= i).unwrap_or(0);
        let n = m.rows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if block_of(i) != block_of(j) {
                    worst = worst.max(m[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.algebra.total_dim();
        let mut m = CMatrix::zeros(n, n);
        for (b, o) in self.blocks.iter().zip(self.algebra.offsets()) {
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    m[(o + i, o + j)] = b[(i, j)];
                }
            }
        }
        m
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    pub fn adjoint(&self) -> Self {
        self.map(CMatrix::adjoint)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|b| b.scale(s))
    }

    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        assert_eq!(self.algebra, other.algebra, "elements of different algebras");
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// `‖self − other‖_max` over all blocks.
    pub fn dist(&self, other: &Self) -> f64 {
        assert_eq!(self.algebra, other.algebra, "elements of different algebras");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(CMatrix::max_abs).fold(0.0, f64::max)
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.blocks.iter().map(CMatrix::unitarity_defect).fold(0.0, f64::max)
    }

    pub fn normality_defect(&self) -> f64 {
        self.blocks.iter().map(CMatrix::normality_defect).fold(0.0, f64::max)
    }

    pub fn commutator_norm(&self, other: &Self) -> f64 {
        (self * other).dist(&(other * self))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= UNITARY_TOL
    }

    /// Block-diagonal unitary with block `k` drawn from `random_unitary(n_k, derive_seed(seed, k))`.
    pub fn random_unitary(algebra: &BlockAlgebra, seed: u64) -> Self {
        Self::from_fn(algebra, |k, n| linalg::random_unitary(n, derive_seed(seed, k as u64)))
    }
}

impl Mul for &BlockElement {
    type Output = BlockElement;
    fn mul(self, rhs: &BlockElement) -> BlockElement {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Add for &BlockElement {
    type Output = BlockElement;
    fn add(self, rhs: &BlockElement) -> BlockElement {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &BlockElement {
    type Output = BlockElement;
    fn sub(self, rhs: &BlockElement) -> BlockElement {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// A block element whose every block is a projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionElement(BlockElement);

impl ProjectionElement {
    pub fn new(element: BlockElement, tol: Tolerance) -> Result<Self, AlgebraError> {
        for (k, b) in element.blocks.iter().enumerate() {
            if !linalg::is_projection(b, tol)? {
                return Err(AlgebraError::NotProjection { block: k });
            }
        }
        Ok(Self(element))
    }

    /// Wraps an element already known to be a projection up to round-off.
    pub(crate) fn assume(element: BlockElement) -> Self {
        Self(element)
    }

    pub fn zero(algebra: &BlockAlgebra) -> Self {
        Self(BlockElement::zero(algebra))
    }

    pub fn identity(algebra: &BlockAlgebra) -> Self {
        Self(BlockElement::identity(algebra))
    }

    /// `diag(1^{r_k}, 0^{n_k − r_k})` in every block.
    pub fn diagonal(algebra: &BlockAlgebra, ranks: &[usize]) -> Result<Self, AlgebraError> {
        check_ranks(algebra, ranks)?;
        Ok(Self(BlockElement::from_fn(algebra, |k, n| {
            let v: Vec<f64> = (0..n).map(|i| if i < ranks[k] { 1.0 } else { 0.0 }).collect();
            CMatrix::diag_real(&v)
        })))
    }

    /// Random projection with prescribed block ranks.
    pub fn random_with_ranks(algebra: &BlockAlgebra, ranks: &[usize], seed: u64) -> Result<Self, AlgebraError> {
        check_ranks(algebra, ranks)?;
        let blocks = algebra
            .dims
            .iter()
            .zip(ranks)
            .enumerate()
            .map(|(k, (&n, &r))| linalg::random_projection(n, r, derive_seed(seed, k as u64)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self(BlockElement::from_blocks_unchecked(algebra, blocks)))
    }

    pub fn as_element(&self) -> &BlockElement {
        &self.0
    }

    pub fn into_element(self) -> BlockElement {
        self.0
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.0.algebra
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.0.blocks[k]
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.0.dist(&other.0)
    }

    /// `1 − self`.
    pub fn complement(&self) -> Self {
        Self(&BlockElement::identity(self.algebra()) - &self.0)
    }

    /// Range inclusion `self ≤ other`, decided by `‖other·self − self‖_max ≤ threshold`.
    pub fn leq(&self, other: &Self, threshold: f64) -> bool {
        (&other.0 * &self.0).dist(&self.0) <= threshold
    }

    /// `‖self·other‖_max`; zero iff the projections are orthogonal.
    pub fn overlap(&self, other: &Self) -> f64 {
        (&self.0 * &other.0).max_abs()
    }

    /// Sum of projections that are assumed pairwise orthogonal.
    pub fn orthogonal_sum<'a>(algebra: &BlockAlgebra, parts: impl IntoIterator<Item = &'a Self>) -> Self {
        let mut acc = BlockElement::zero(algebra);
        for p in parts {
            acc = &acc + &p.0;
        }
        Self(acc)
    }

    /// Product with a central projection: keeps the selected blocks.
    pub fn cut(&self, z: &CentralProjection) -> Self {
        assert_eq!(self.algebra(), &z.algebra);
        Self(BlockElement::from_fn(self.algebra(), |k, n| {
            if z.mask[k] {
                self.0.blocks[k].clone()
            } else {
                CMatrix::zeros(n, n)
            }
        }))
    }

    /// `u · self · u*`.
    pub fn conjugate(&self, u: &BlockElement) -> Result<Self, AlgebraError> {
        Ok(Self(unitary_conjugate(&self.0, u)?))
    }
}

fn check_ranks(algebra: &BlockAlgebra, ranks: &[usize]) -> Result<(), AlgebraError> {
    if ranks.len() != algebra.num_blocks() {
        return Err(AlgebraError::BlockCount {
            expected: algebra.num_blocks(),
            got: ranks.len(),
        });
    }
    for (block, (&rank, &dim)) in ranks.iter().zip(&algebra.dims).enumerate() {
        if rank > dim {
            return Err(AlgebraError::RankOutOfRange { block, rank, dim });
        }
    }
    Ok(())
}

/// A central projection, i.e. a choice of `0` or `1` per block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CentralProjection {
    algebra: BlockAlgebra,
    mask: Vec<bool>,
}

impl CentralProjection {
    pub fn new(algebra: &BlockAlgebra, mask: Vec<bool>) -> Result<Self, AlgebraError> {
        if mask.len() != algebra.num_blocks() {
            return Err(AlgebraError::BlockCount {
                expected: algebra.num_blocks(),
                got: mask.len(),
            });
        }
        Ok(Self {
            algebra: algebra.clone(),
            mask,
        })
    }

    pub fn zero(algebra: &BlockAlgebra) -> Self {
        Self {
            algebra: algebra.clone(),
            mask: vec![false; algebra.num_blocks()],
        }
    }

    pub fn identity(algebra: &BlockAlgebra) -> Self {
        Self {
            algebra: algebra.clone(),
            mask: vec![true; algebra.num_blocks()],
        }
    }

    /// The minimal central projection `1_k` (identity of block `k`).
    pub fn minimal(algebra: &BlockAlgebra, k: usize) -> Self {
        let mut z = Self::zero(algebra);
        z.mask[k] = true;
        z
    }

    /// Mask whose bit `k` is bit `k` of `bits`.
    pub fn from_bits(algebra: &BlockAlgebra, bits: u64) -> Self {
        Self {
            algebra: algebra.clone(),
            mask: (0..algebra.num_blocks()).map(|k| bits >> k & 1 == 1).collect(),
        }
    }

    /// All `2^K` central projections, in increasing bit order.
    pub fn enumerate(algebra: &BlockAlgebra) -> impl Iterator<Item = Self> + '_ {
        let k = algebra.num_blocks();
        assert!(k < 64, "too many blocks to enumerate");
        (0..1u64 << k).map(move |bits| Self::from_bits(algebra, bits))
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_zero(&self) -> bool {
        self.mask.iter().all(|b| !b)
    }

    pub fn complement(&self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    pub fn meet(&self, other: &Self) -> Self {
        assert_eq!(self.algebra, other.algebra);
        Self {
            algebra: self.algebra.clone(),
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect(),
        }
    }

    pub fn join(&self, other: &Self) -> Self {
        assert_eq!(self.algebra, other.algebra);
        Self {
            algebra: self.algebra.clone(),
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect(),
        }
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| !a || *b)
    }

    pub fn to_element(&self) -> BlockElement {
        BlockElement::from_fn(&self.algebra, |k, n| {
            if self.mask[k] {
                CMatrix::identity(n)
            } else {
                CMatrix::zeros(n, n)
            }
        })
    }

    pub fn to_projection(&self) -> ProjectionElement {
        ProjectionElement(self.to_element())
    }
}

impl fmt::Display for CentralProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = self.mask.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "[{bits}]")
    }
}

/// Per-block ranks of a projection.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct RankVector(pub Vec<usize>);

impl RankVector {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for RankVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub fn rank_vector(p: &ProjectionElement, tol: Tolerance) -> RankVector {
    RankVector(p.0.blocks.iter().map(|b| linalg::numerical_rank(b, tol)).collect())
}

/// The least central projection `z` with `zq = q`: the blocks where `q` is nonzero.
pub fn central_carrier(q: &ProjectionElement, tol: Tolerance) -> CentralProjection {
    CentralProjection {
        algebra: q.algebra().clone(),
        mask: rank_vector(q, tol).0.iter().map(|&r| r > 0).collect(),
    }
}

/// True iff every block is zero or the identity within `tol.eps`.
pub fn is_central(p: &ProjectionElement, tol: Tolerance) -> bool {
    is_central_within(p, tol.eps)
}

pub fn is_central_within(p: &ProjectionElement, threshold: f64) -> bool {
    p.0.blocks
        .iter()
        .all(|b| b.max_abs() <= threshold || b.dist(&CMatrix::identity(b.rows())) <= threshold)
}

/// The central projection `p` is close to, if it is central within `threshold`.
pub fn as_central(p: &ProjectionElement, threshold: f64) -> Option<CentralProjection> {
    let mut mask = Vec::with_capacity(p.algebra().num_blocks());
    for b in &p.0.blocks {
        if b.max_abs() <= threshold {
            mask.push(false);
        } else if b.dist(&CMatrix::identity(b.rows())) <= threshold {
            mask.push(true);
        } else {
            return None;
        }
    }
    Some(CentralProjection {
        algebra: p.algebra().clone(),
        mask,
    })
}

/// Global Murray–von Neumann verdict derived from the block verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MvnVerdict {
    /// `p ∼ q`
    Equivalent,
    /// `p ≺ q` (below, not equivalent)
    Below,
    /// `p ≻ q` (above, not equivalent)
    Above,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvnReport {
    /// `sign(rank p_k − rank q_k)` for each block.
    pub blocks: Vec<Ordering>,
    pub verdict: MvnVerdict,
}

impl MvnReport {
    /// `p ⪯ q`
    pub fn is_below_or_equivalent(&self) -> bool {
        matches!(self.verdict, MvnVerdict::Below | MvnVerdict::Equivalent)
    }

    /// `p ⪰ q`
    pub fn is_above_or_equivalent(&self) -> bool {
        matches!(self.verdict, MvnVerdict::Above | MvnVerdict::Equivalent)
    }
}

/// Murray–von Neumann comparison, block by block.
pub fn mvn_compare(p: &ProjectionElement, q: &ProjectionElement, tol: Tolerance) -> Result<MvnReport, AlgebraError> {
    p.algebra().check_same(q.algebra())?;
    let rp = rank_vector(p, tol);
    let rq = rank_vector(q, tol);
    let blocks: Vec<Ordering> = rp.0.iter().zip(&rq.0).map(|(a, b)| a.cmp(b)).collect();
    let any_less = blocks.contains(&Ordering::Less);
    let any_greater = blocks.contains(&Ordering::Greater);
    let verdict = match (any_less, any_greater) {
        (false, false) => MvnVerdict::Equivalent,
        (true, false) => MvnVerdict::Below,
        (false, true) => MvnVerdict::Above,
        (true, true) => MvnVerdict::Incomparable,
    };
    Ok(MvnReport { blocks, verdict })
}

/// The comparison-lemma split: `z = {k : rank p_k ≥ rank q_k}`.
///
/// Then `zp ⪰ zq` and `z⊥p ≺ z⊥q` strictly on every block of `z⊥`.
pub fn comparison_split(
    p: &ProjectionElement,
    q: &ProjectionElement,
    tol: Tolerance,
) -> Result<CentralProjection, AlgebraError> {
    let report = mvn_compare(p, q, tol)?;
    Ok(CentralProjection {
        algebra: p.algebra().clone(),
        mask: report.blocks.iter().map(|o| *o != Ordering::Less).collect(),
    })
}

/// `u x u*`, block by block.
pub fn unitary_conjugate(x: &BlockElement, u: &BlockElement) -> Result<BlockElement, AlgebraError> {
    x.algebra.check_same(&u.algebra)?;
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(AlgebraError::NotUnitary { defect });
    }
    Ok(&(u * x) * &u.adjoint())
}

/// A unitary carrying `p` onto `q`; exists iff their rank vectors agree.
pub fn orbit_conjugator(
    p: &ProjectionElement,
    q: &ProjectionElement,
    tol: Tolerance,
) -> Result<BlockElement, AlgebraError> {
    p.algebra().check_same(q.algebra())?;
    let (rp, rq) = (rank_vector(p, tol), rank_vector(q, tol));
    if rp != rq {
        return Err(AlgebraError::NotUnitarilyEquivalent { left: rp, right: rq });
    }
    let blocks =
        p.0.blocks
            .iter()
            .zip(&q.0.blocks)
            .map(|(a, b)| linalg::range_matching_unitary(a, b, tol))
            .collect::<Result<Vec<_>, _>>()?;
    Ok(BlockElement::from_blocks_unchecked(p.algebra(), blocks))
}
