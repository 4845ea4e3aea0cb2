//! Seeded samplers for subalgebras, chains and projections.
//!
//! A random commutative subalgebra is generated by `u·diag(labels)·u*` for a
//! random block unitary `u` and small integer labels, so degenerate
//! eigenspaces (and hence non-maximal subalgebras) occur often.

use crate::algebra::{AlgebraError, BlockAlgebra, BlockElement, ProjectionElement};
use crate::commutative::{generate, CommutativeError, CommutativeSubalgebra};
use crate::linalg::{self, CMatrix, Tolerance};
use crate::random::{derive_seed, SeededRng};

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

/// `u · diag(labels) · u*` block by block.
pub fn labelled_element(algebra: &BlockAlgebra, u: &BlockElement, labels: &[Vec<f64>]) -> BlockElement {
    let d = BlockElement::from_fn(algebra, |k, _| CMatrix::diag_real(&labels[k]));
    &(u * &d) * &u.adjoint()
}

/// Integer labels per basis vector, drawn from one range for all blocks.
fn random_labels(algebra: &BlockAlgebra, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let top = rng.range_inclusive(0, algebra.total_dim().min(6));
    algebra
        .dims()
        .iter()
        .map(|&n| (0..n).map(|_| rng.range_inclusive(0, top) as f64).collect())
        .collect()
}

fn coarsen(labels: &[Vec<f64>], rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let divisor = rng.range_inclusive(1, 3) as f64;
    labels
        .iter()
        .map(|b| b.iter().map(|x| (x / divisor).floor()).collect())
        .collect()
}

/// A random commutative subalgebra.
pub fn random_subalgebra(
    algebra: &BlockAlgebra,
    seed: u64,
    with_center: bool,
    tol: Tolerance,
) -> Result<CommutativeSubalgebra, CommutativeError> {
    let mut rng = SeededRng::new(seed);
    let u = BlockElement::random_unitary(algebra, derive_seed(seed, 1));
    let labels = random_labels(algebra, &mut rng);
    generate(algebra, &[labelled_element(algebra, &u, &labels)], with_center, tol)
}

/// A random pair `V ⊆ V'`.
///
/// Both are generated in one random eigenframe; `V` uses a coarsening of the
/// labels of `V'`, and contains the center only if `V'` does.
pub fn random_chain(
    algebra: &BlockAlgebra,
    seed: u64,
    tol: Tolerance,
) -> Result<(CommutativeSubalgebra, CommutativeSubalgebra), CommutativeError> {
    let mut rng = SeededRng::new(seed);
    let u = BlockElement::random_unitary(algebra, derive_seed(seed, 1));
    let fine = random_labels(algebra, &mut rng);
    let coarse = coarsen(&fine, &mut rng);
    let outer_center = rng.coin();
    let inner_center = outer_center && rng.coin();
    let outer = generate(algebra, &[labelled_element(algebra, &u, &fine)], outer_center, tol)?;
    let inner = generate(algebra, &[labelled_element(algebra, &u, &coarse)], inner_center, tol)?;
    Ok((inner, outer))
}

/// A random pair `V ⊆ V'` with `p ∈ V'`, built in an eigenframe of `p`.
pub fn adapted_chain(
    p: &ProjectionElement,
    seed: u64,
    tol: Tolerance,
) -> Result<(CommutativeSubalgebra, CommutativeSubalgebra), CommutativeError> {
    let algebra = p.algebra();
    let mut rng = SeededRng::new(seed);
    let frame = projection_frame(p, derive_seed(seed, 1))?;
    let fine = random_labels(algebra, &mut rng);
    let coarse = coarsen(&fine, &mut rng);
    let g = labelled_element(algebra, &frame, &fine);
    let outer_center = rng.coin();
    let inner_center = outer_center && rng.coin();
    let outer = generate(algebra, &[p.as_element().clone(), g.clone()], outer_center, tol)?;
    let inner = match rng.range_inclusive(0, 2) {
        0 => generate(algebra, &[p.as_element().clone()], inner_center, tol)?,
        1 => generate(algebra, &[g], inner_center, tol)?,
        _ => generate(
            algebra,
            &[labelled_element(algebra, &frame, &coarse)],
            inner_center,
            tol,
        )?,
    };
    Ok((inner, outer))
}

/// A random unitary whose columns are adapted to `range(p) ⊕ ker(p)` in every block.
pub fn projection_frame(p: &ProjectionElement, seed: u64) -> Result<BlockElement, AlgebraError> {
    let algebra = p.algebra();
    let mut blocks = Vec::with_capacity(algebra.num_blocks());
    for k in 0..algebra.num_blocks() {
        let n = algebra.dims()[k];
        let rk = linalg::range_kernel(p.block(k))?;
        let r = rk.rank;
        let inner_range = (r > 0).then(|| linalg::random_unitary(r, derive_seed(seed, 2 * k as u64)));
        let inner_kernel = (r < n).then(|| linalg::random_unitary(n - r, derive_seed(seed, 2 * k as u64 + 1)));
        let mix = CMatrix::from_fn(n, n, |i, j| match (i < r, j < r) {
            (true, true) => inner_range.as_ref().map_or(linalg::C0, |m| m[(i, j)]),
            (false, false) => inner_kernel.as_ref().map_or(linalg::C0, |m| m[(i - r, j - r)]),
            _ => linalg::C0,
        });
        blocks.push(&rk.basis * &mix);
    }
    BlockElement::new(algebra, blocks)
}

/// A rank vector with at least one block strictly between `0` and `n_k`,
/// or `None` when the algebra is abelian.
pub fn random_noncentral_ranks(algebra: &BlockAlgebra, seed: u64) -> Option<Vec<usize>> {
    let candidates: Vec<usize> = (0..algebra.num_blocks()).filter(|&k| algebra.dims()[k] >= 2).collect();
    if candidates.is_empty() {
        return None;
    }
    let mut rng = SeededRng::new(seed);
    let forced = candidates[rng.range_inclusive(0, candidates.len() - 1)];
    Some(
        algebra
            .dims()
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                if k == forced {
                    rng.range_inclusive(1, n - 1)
                } else {
                    rng.range_inclusive(0, n)
                }
            })
            .collect(),
    )
}

/// A random projection that is not central, or `None` when every projection is central.
pub fn random_noncentral_projection(algebra: &BlockAlgebra, seed: u64) -> Option<ProjectionElement> {
    let ranks = random_noncentral_ranks(algebra, seed)?;
    ProjectionElement::random_with_ranks(algebra, &ranks, derive_seed(seed, 7)).ok()
}

/// `count` commuting normal `n × n` matrices sharing a random eigenframe.
///
/// Eigenvalues are complex with deliberate repeats, so joint eigenspaces of
/// dimension above one are common.
pub fn random_commuting_family(n: usize, count: usize, seed: u64) -> Vec<CMatrix> {
    let mut rng = SeededRng::new(seed);
    let u = linalg::random_unitary(n, derive_seed(seed, 1));
    (0..count)
        .map(|_| {
            let distinct = rng.range_inclusive(1, n);
            let palette: Vec<Complex64> = (0..distinct)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = if rng.coin() {
                        StandardNormal.sample(&mut rng)
                    } else {
                        0.0
                    };
                    Complex64::new(re, im)
                })
                .collect();
            let values: Vec<Complex64> = (0..n).map(|_| palette[rng.range_inclusive(0, distinct - 1)]).collect();
            &(&u * &CMatrix::diag(&values)) * &u.adjoint()
        })
        .collect()
}
