//! Dense complex matrix kernel.
//!
//! Everything here works on small (n <= 32) dense matrices: numerical rank
//! by Gaussian elimination, projection checks, Hermitian eigendecomposition
//! by cyclic Jacobi rotations, joint spectral decomposition of commuting
//! normal families, seeded random unitaries and basis-matching unitaries.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::random::SeededRng;

/// Complex zero.
pub const C0: Complex64 = Complex64::new(0.0, 0.0);
/// Complex one.
pub const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Reconstruction bound for `joint_spectral_atoms` outputs.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;

/// Relative gap below which two eigenvalues are treated as one cluster.
const CLUSTER_GAP: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("shape error: expected {expected}, got {rows}x{cols}")]
    Shape { expected: String, rows: usize, cols: usize },
    #[error("matrices {first} and {second} do not commute (defect {defect:.3e})")]
    NonCommuting { first: usize, second: usize, defect: f64 },
    #[error("matrix {index} is not normal (defect {defect:.3e})")]
    NonNormal { index: usize, defect: f64 },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("requested rank {rank} exceeds dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },
    #[error("reconstruction of matrix {index} failed (error {error:.3e})")]
    Reconstruction { index: usize, error: f64 },
}

/// Absolute comparison thresholds shared by every numerical test.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance {
    pub eps: f64,
    /// Pivot threshold, scaled by `max(1, max |entry|)`.
    pub rank_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps: 1e-9,
            rank_eps: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(eps: f64, rank_eps: f64) -> Option<Self> {
        (eps.is_finite() && rank_eps.is_finite() && eps > 0.0 && rank_eps > 0.0).then_some(Self { eps, rank_eps })
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![C0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C1;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major data. Returns `None` on a length mismatch.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Option<Self> {
        (rows >= 1 && cols >= 1 && data.len() == rows * cols).then_some(Self { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<_> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// Matrix unit `E_{ij}` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = C1;
        m
    }

    /// Rank-one projection onto the span of `v` (normalized internally).
    pub fn rank_one_projection(v: &[Complex64]) -> Self {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let w: Vec<_> = v.iter().map(|z| z / norm).collect();
        Self::from_fn(w.len(), w.len(), |i, j| w[i] * w[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖self − other‖_max`. Panics on shape mismatch.
    pub fn dist(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Columns `cols` of `self`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        })
    }

    /// Square sub-block starting at `(offset, offset)`.
    pub fn sub_block(&self, offset: usize, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| self[(offset + i, offset + j)])
    }

    /// `self · self*` for a matrix with orthonormal columns: the projection onto its span.
    pub fn column_projection(&self) -> Self {
        self * &self.adjoint()
    }

    /// `‖self·other − other·self‖_max`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        (self * other).dist(&(other * self))
    }

    /// `‖self·self* − self*·self‖_max`.
    pub fn normality_defect(&self) -> f64 {
        let a = self.adjoint();
        (self * &a).dist(&(&a * self))
    }

    /// `‖self*·self − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).dist(&Self::identity(self.cols))
    }

    /// `‖self − self*‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.dist(&self.adjoint())
    }

    fn require_square(&self) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::Shape {
                expected: "square matrix".into(),
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Number of pivots of a row-echelon reduction with partial pivoting.
///
/// A pivot counts as zero when its modulus is at most
/// `rank_eps * max(1, max |entry|)`.
pub fn numerical_rank(m: &CMatrix, tol: Tolerance) -> usize {
    let threshold = tol.rank_eps * m.max_abs().max(1.0);
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (pivot_row, pivot_abs) = (rank..rows)
            .map(|r| (r, a[(r, col)].norm()))
            .fold((rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= threshold {
            continue;
        }
        if pivot_row != rank {
            for j in 0..cols {
                a.data.swap(pivot_row * cols + j, rank * cols + j);
            }
        }
        let pivot = a[(rank, col)];
        for r in rank + 1..rows {
            let factor = a[(r, col)] / pivot;
            if factor == C0 {
                continue;
            }
            for j in col..cols {
                let v = a[(rank, j)];
                a[(r, j)] -= factor * v;
            }
        }
        rank += 1;
    }
    rank
}

/// True iff `m` is self-adjoint and idempotent within `tol.eps`.
pub fn is_projection(m: &CMatrix, tol: Tolerance) -> Result<bool, LinalgError> {
    m.require_square()?;
    Ok(m.hermiticity_defect() <= tol.eps && (m * m).dist(m) <= tol.eps)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Only the Hermitian part `(a + a*)/2` is used. Each rotation first removes
/// the phase of the pivot entry, then applies a real plane rotation.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen, LinalgError> {
    const MAX_SWEEPS: usize = 100;
    a.require_square()?;
    let n = a.rows;
    let mut h = CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);

    let frob = h.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = f64::EPSILON * frob.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&h);
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = h[(p, q)];
                let babs = b.norm();
                if babs <= target / (n as f64) {
                    continue;
                }
                let phase = b / babs;
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                let theta = 0.5 * (2.0 * babs).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                // J = D·R with D = diag(1, conj(phase)) on (p, q);
                // columns: j_p = (c, s·conj(phase)), j_q = (-s, c·conj(phase)).
                let jpp = Complex64::new(c, 0.0);
                let jqp = phase.conj() * s;
                let jpq = Complex64::new(-s, 0.0);
                let jqq = phase.conj() * c;
                // h ← h·J
                for i in 0..n {
                    let hip = h[(i, p)];
                    let hiq = h[(i, q)];
                    h[(i, p)] = hip * jpp + hiq * jqp;
                    h[(i, q)] = hip * jpq + hiq * jqq;
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * jpp + viq * jqp;
                    v[(i, q)] = vip * jpq + viq * jqq;
                }
                // h ← J*·h
                for j in 0..n {
                    let hpj = h[(p, j)];
                    let hqj = h[(q, j)];
                    h[(p, j)] = jpp.conj() * hpj + jqp.conj() * hqj;
                    h[(q, j)] = jpq.conj() * hpj + jqq.conj() * hqj;
                }
                h[(p, q)] = C0;
                h[(q, p)] = C0;
                h[(p, p)] = Complex64::new(h[(p, p)].re, 0.0);
                h[(q, q)] = Complex64::new(h[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[(i, i)].re.total_cmp(&h[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| h[(i, i)].re).collect();
    let vectors = v.select_columns(&order);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(h: &CMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..h.rows {
        for j in 0..h.cols {
            if i != j {
                s += h[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Groups ascending eigenvalues into clusters of (numerically) equal values.
fn cluster(values: &[f64]) -> Vec<std::ops::Range<usize>> {
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let gap = CLUSTER_GAP * scale;
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > gap {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Orthonormal bases of the range and kernel of a projection.
#[derive(Debug, Clone)]
pub struct RangeKernel {
    /// `n × r` isometry onto the range (`None` when `r = 0`).
    pub range: Option<CMatrix>,
    /// `n × (n − r)` isometry onto the kernel (`None` when `r = n`).
    pub kernel: Option<CMatrix>,
    /// Unitary `[range | kernel]`.
    pub basis: CMatrix,
    pub rank: usize,
}

/// Splits the space into range and kernel of a projection via its eigenvectors.
pub fn range_kernel(p: &CMatrix) -> Result<RangeKernel, LinalgError> {
    let eig = hermitian_eigen(p)?;
    let n = p.rows;
    // ascending: kernel (≈0) first, range (≈1) last
    let rank = eig.values.iter().filter(|&&v| v > 0.5).count();
    let kernel_cols: Vec<usize> = (0..n - rank).collect();
    let range_cols: Vec<usize> = (n - rank..n).collect();
    let order: Vec<usize> = range_cols.iter().chain(&kernel_cols).copied().collect();
    let basis = eig.vectors.select_columns(&order);
    Ok(RangeKernel {
        range: (rank > 0).then(|| eig.vectors.select_columns(&range_cols)),
        kernel: (rank < n).then(|| eig.vectors.select_columns(&kernel_cols)),
        basis,
        rank,
    })
}

/// Pairwise-orthogonal projections summing to the identity that jointly
/// diagonalize a commuting family of normal matrices.
///
/// Starting from `{I}`, every current atom is split into the eigenspaces of
/// each input compressed to that atom's range; a normal input contributes its
/// Hermitian and skew-Hermitian parts as two successive splitting steps.
/// Atoms come out sorted by their eigenvalue chain.
pub fn joint_spectral_atoms(ms: &[CMatrix], n: usize, tol: Tolerance) -> Result<Vec<CMatrix>, LinalgError> {
    for (i, m) in ms.iter().enumerate() {
        if m.rows != n || m.cols != n {
            return Err(LinalgError::Shape {
                expected: format!("{n}x{n}"),
                rows: m.rows,
                cols: m.cols,
            });
        }
        let defect = m.normality_defect();
        if defect > tol.eps {
            return Err(LinalgError::NonNormal { index: i, defect });
        }
    }
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            let defect = ms[i].commutator_norm(&ms[j]);
            if defect > tol.eps {
                return Err(LinalgError::NonCommuting {
                    first: i,
                    second: j,
                    defect,
                });
            }
        }
    }

    // each atom is tracked by an isometry onto its range
    let mut atoms: Vec<CMatrix> = vec![CMatrix::identity(n)];
    for m in ms {
        let half = Complex64::new(0.5, 0.0);
        let adj = m.adjoint();
        let re = (m + &adj).scale(half);
        let im = (m - &adj).scale(Complex64::new(0.0, -0.5));
        for part in [re, im] {
            let mut next = Vec::with_capacity(atoms.len());
            for basis in &atoms {
                let compressed = &(&basis.adjoint() * &part) * basis;
                let eig = hermitian_eigen(&compressed)?;
                for range in cluster(&eig.values) {
                    let cols: Vec<usize> = range.collect();
                    next.push(basis * &eig.vectors.select_columns(&cols));
                }
            }
            atoms = next;
        }
    }

    let projections: Vec<CMatrix> = atoms.iter().map(CMatrix::column_projection).collect();
    for (index, m) in ms.iter().enumerate() {
        let error = reconstruction_error(m, &projections);
        if error > RECONSTRUCTION_TOL {
            return Err(LinalgError::Reconstruction { index, error });
        }
    }
    Ok(projections)
}

/// `‖m − Σ λᵢ eᵢ‖_max` with `λᵢ = tr(m eᵢ) / tr(eᵢ)`.
pub fn reconstruction_error(m: &CMatrix, atoms: &[CMatrix]) -> f64 {
    let mut rebuilt = CMatrix::zeros(m.rows, m.cols);
    for e in atoms {
        let lambda = (m * e).trace() / e.trace();
        rebuilt = &rebuilt + &e.scale(lambda);
    }
    rebuilt.dist(m)
}

/// Orthonormalizes the columns of a square matrix by modified Gram–Schmidt.
///
/// Columns that collapse numerically are replaced by the first standard
/// basis vector that survives orthogonalization.
pub fn modified_gram_schmidt(a: &CMatrix) -> CMatrix {
    let n = a.rows;
    let mut q = a.clone();
    let mut filled = 0;
    let mut fallback = 0;
    while filled < q.cols {
        let mut col = q.column(filled);
        for _pass in 0..2 {
            for k in 0..filled {
                let dot: Complex64 = (0..n).map(|i| q[(i, k)].conj() * col[i]).sum();
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= dot * q[(i, k)];
                }
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            // degenerate column: try the next standard basis vector instead
            for i in 0..n {
                q[(i, filled)] = if i == fallback { C1 } else { C0 };
            }
            fallback += 1;
            continue;
        }
        for (i, c) in col.iter().enumerate() {
            q[(i, filled)] = c / norm;
        }
        filled += 1;
    }
    q
}

/// An `n × n` unitary from Gram–Schmidt on a matrix of complex Gaussians.
pub fn random_unitary(n: usize, seed: u64) -> CMatrix {
    assert!(n >= 1);
    let mut rng = SeededRng::new(seed);
    let g = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    });
    modified_gram_schmidt(&g)
}

/// `u · diag(1^r, 0^(n−r)) · u*` for `u = random_unitary(n, seed)`.
pub fn random_projection(n: usize, r: usize, seed: u64) -> Result<CMatrix, LinalgError> {
    if r > n {
        return Err(LinalgError::RankOutOfRange { rank: r, dim: n });
    }
    if r == 0 {
        return Ok(CMatrix::zeros(n, n));
    }
    if r == n {
        return Ok(CMatrix::identity(n));
    }
    let u = random_unitary(n, seed);
    let cols: Vec<usize> = (0..r).collect();
    Ok(u.select_columns(&cols).column_projection())
}

/// A unitary `u` with `u p u* = q` for projections of equal rank.
///
/// Built as `B_q · B_p*` where `B_x = [range(x) | ker(x)]`.
pub fn range_matching_unitary(p: &CMatrix, q: &CMatrix, tol: Tolerance) -> Result<CMatrix, LinalgError> {
    p.require_square()?;
    q.require_square()?;
    if p.rows != q.rows {
        return Err(LinalgError::Shape {
            expected: format!("{}x{}", p.rows, p.rows),
            rows: q.rows,
            cols: q.cols,
        });
    }
    let (rp, rq) = (numerical_rank(p, tol), numerical_rank(q, tol));
    if rp != rq {
        return Err(LinalgError::RankMismatch { left: rp, right: rq });
    }
    let bp = range_kernel(p)?;
    let bq = range_kernel(q)?;
    if bp.rank != rp || bq.rank != rq {
        return Err(LinalgError::RankMismatch {
            left: bp.rank,
            right: bq.rank,
        });
    }
    Ok(&bq.basis * &bp.basis.adjoint())
}
