//! Dense complex linear algebra on bipartite spaces.
//!
//! Index convention: on a composite space `d1 ⊗ d2` the basis vector
//! `|i⟩|k⟩` has composite index `i * d2 + k`. Every routine in the crate uses
//! this ordering, including [`kron`], which satisfies
//! `(A ⊗ B)[i*rb + k, j*cb + l] = A[i, j] * B[k, l]`.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::stream_rng;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest matrix side [`kron`] will build.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Relative anti-Hermitian part tolerated by [`herm_spectrum`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Tolerance on the norm of vectors declared to be unit.
pub const UNIT_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = Complex { re: 1.0, im: 0.0 };

pub(crate) fn re(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

/// Local dimensions of a bipartite system `A ⊗ B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Dims {
    pub da: usize,
    pub db: usize,
}

impl Dims {
    pub fn new(da: usize, db: usize) -> Result<Self> {
        if da < 2 || db < 2 {
            return Err(Error::InvalidDims(format!(
                "local dimensions must be at least 2, got ({da}, {db})"
            )));
        }
        Ok(Dims { da, db })
    }

    /// Minimum of the local dimensions, i.e. the maximal Schmidt rank.
    pub fn n(self) -> usize {
        self.da.min(self.db)
    }

    pub fn total(self) -> usize {
        self.da * self.db
    }

    pub fn pair(self) -> (usize, usize) {
        (self.da, self.db)
    }

    pub fn swapped(self) -> Self {
        Dims {
            da: self.db,
            db: self.da,
        }
    }
}

/// A probability vector, e.g. squared Schmidt coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpec("empty probability vector".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidSpec(format!(
                "probability entry {bad} is negative or not finite"
            )));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidSpec(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(ProbVector(values))
    }

    /// Uniform distribution on `n` outcomes.
    pub fn uniform(n: usize) -> Self {
        ProbVector(vec![1.0 / n as f64; n])
    }

    /// Point mass on outcome `k`.
    pub fn vertex(n: usize, k: usize) -> Self {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        ProbVector(v)
    }

    /// Rescales nonnegative weights to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if sum.is_nan() || sum <= 0.0 {
            return Err(Error::InvalidSpec(
                "weights do not have positive sum".into(),
            ));
        }
        ProbVector::new(weights.into_iter().map(|w| w / sum).collect())
    }

    /// Sample from the symmetric Dirichlet(1) distribution (uniform on the simplex).
    pub fn sample_flat<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let weights: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        ProbVector::normalized(weights).expect("exponential weights are positive")
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Which tensor factor of a bipartite operator an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    First,
    Second,
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn basis_vector(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = ONE;
    v
}

/// `|v⟩⟨v|`
pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Elementwise (Hadamard / Schur) product.
pub fn hadamard_product(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!(
            "Hadamard product of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.component_mul(b))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    kron_with_cap(a, b, DEFAULT_DIM_CAP)
}

pub fn kron_with_cap(a: &CMatrix, b: &CMatrix, cap: usize) -> Result<CMatrix> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    for dim in [ra * rb, ca * cb] {
        if dim > cap {
            return Err(Error::ResourceLimit { dim, cap });
        }
    }
    Ok(a.kronecker(b))
}

fn check_square_bipartite(m: &CMatrix, (d1, d2): (usize, usize), what: &str) -> Result<()> {
    let d = d1 * d2;
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{what}: expected a {d}x{d} matrix for dims ({d1}, {d2}), got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Transposes the chosen tensor factor of an operator on `d1 ⊗ d2`.
pub fn partial_transpose(m: &CMatrix, dims: (usize, usize), side: Side) -> Result<CMatrix> {
    check_square_bipartite(m, dims, "partial_transpose")?;
    let (d1, d2) = dims;
    let d = d1 * d2;
    Ok(CMatrix::from_fn(d, d, |r, c| {
        let (i, k) = (r / d2, r % d2);
        let (j, l) = (c / d2, c % d2);
        match side {
            Side::First => m[(j * d2 + k, i * d2 + l)],
            Side::Second => m[(i * d2 + l, j * d2 + k)],
        }
    }))
}

/// Traces out one factor of an operator on `d1 ⊗ d2`, keeping `keep`.
pub fn partial_trace(m: &CMatrix, dims: (usize, usize), keep: Side) -> Result<CMatrix> {
    check_square_bipartite(m, dims, "partial_trace")?;
    let (d1, d2) = dims;
    Ok(match keep {
        Side::First => CMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
        }),
        Side::Second => CMatrix::from_fn(d2, d2, |k, l| {
            (0..d1).map(|i| m[(i * d2 + k, i * d2 + l)]).sum()
        }),
    })
}

/// Reorders the tensor factors of a square operator. Output factor `t` is
/// input factor `perm[t]`, so `perm = [0, 2, 1, 3]` maps an operator on
/// `A A' B B'` to one on `A B A' B'`.
pub fn permute_subsystems(m: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::DimensionMismatch(format!(
            "permute_subsystems: matrix is {}x{}, factors multiply to {total}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len()
        || perm
            .iter()
            .any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true))
    {
        return Err(Error::InvalidSpec(format!("{perm:?} is not a permutation")));
    }
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let index_map: Vec<usize> = (0..total)
        .map(|out| {
            // digits of the output index, most significant first
            let mut rem = out;
            let mut digits = vec![0; dims.len()];
            for t in (0..dims.len()).rev() {
                digits[t] = rem % out_dims[t];
                rem /= out_dims[t];
            }
            let mut input_digits = vec![0; dims.len()];
            for (t, &p) in perm.iter().enumerate() {
                input_digits[p] = digits[t];
            }
            input_digits
                .iter()
                .zip(dims)
                .fold(0, |acc, (&dig, &d)| acc * d + dig)
        })
        .collect();
    Ok(CMatrix::from_fn(total, total, |r, c| {
        m[(index_map[r], index_map[c])]
    }))
}

/// Relative size of the anti-Hermitian part, `max|M - M†| / max|M|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    let mut dev: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            dev = dev.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    dev / scale
}

/// Groups indices into the connected components of the nonzero pattern of
/// `m`. A Hermitian matrix is block diagonal over these components, so its
/// spectrum is the union of the block spectra.
pub fn nonzero_components(m: &CMatrix) -> Vec<Vec<usize>> {
    let d = m.nrows();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for r in 0..d {
        for c in (r + 1)..d {
            if m[(r, c)] != ZERO || m[(c, r)] != ZERO {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; d];
    for i in 0..d {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// The input is symmetrized as `(M + M†)/2` and split into the connected
/// blocks of its nonzero pattern before diagonalization.
pub fn herm_spectrum(m: &CMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "herm_spectrum on a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermiticity_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let mut values = Vec::with_capacity(h.nrows());
    for block in nonzero_components(&h) {
        match block.len() {
            1 => values.push(h[(block[0], block[0])].re),
            k => {
                let sub = CMatrix::from_fn(k, k, |r, c| h[(block[r], block[c])]);
                values.extend(sub.symmetric_eigenvalues().iter().copied());
            }
        }
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(herm_spectrum(m)?.first().copied().unwrap_or(f64::INFINITY))
}

/// Schmidt decomposition `v = Σ_s √λ_s |a_s⟩|b_s⟩` with `λ` descending.
#[derive(Debug, Clone)]
pub struct Schmidt {
    pub coefficients: ProbVector,
    pub left: Vec<CVector>,
    pub right: Vec<CVector>,
}

impl Schmidt {
    pub fn reconstruct(&self) -> CVector {
        let d1 = self.left[0].len();
        let d2 = self.right[0].len();
        let mut v = CVector::zeros(d1 * d2);
        for ((lambda, a), b) in self
            .coefficients
            .as_slice()
            .iter()
            .zip(&self.left)
            .zip(&self.right)
        {
            v += a.kronecker(b).scale(lambda.sqrt());
        }
        v
    }

    /// `n × n` unitary whose columns are the left (resp. right) Schmidt vectors.
    pub fn left_unitary(&self) -> CMatrix {
        CMatrix::from_columns(&self.left)
    }

    pub fn right_unitary(&self) -> CMatrix {
        CMatrix::from_columns(&self.right)
    }
}

pub fn check_unit(v: &CVector) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit(norm));
    }
    Ok(())
}

/// Reshapes a vector on `d1 ⊗ d2` into the `d1 × d2` coefficient matrix.
pub fn coefficient_matrix(v: &CVector, (d1, d2): (usize, usize)) -> Result<CMatrix> {
    if v.len() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} on dims ({d1}, {d2})",
            v.len()
        )));
    }
    Ok(CMatrix::from_fn(d1, d2, |i, k| v[i * d2 + k]))
}

/// Singular values of the coefficient matrix, descending.
pub fn schmidt_singular_values(v: &CVector, dims: (usize, usize)) -> Result<Vec<f64>> {
    let c = coefficient_matrix(v, dims)?;
    let mut s: Vec<f64> = c.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Schmidt decomposition of a unit vector. The first nonzero entry of every
/// left Schmidt vector is made real and positive.
pub fn schmidt(v: &CVector, dims: (usize, usize)) -> Result<Schmidt> {
    check_unit(v)?;
    let c = coefficient_matrix(v, dims)?;
    let svd = c.svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut left = Vec::with_capacity(order.len());
    let mut right = Vec::with_capacity(order.len());
    let mut weights = Vec::with_capacity(order.len());
    for &s in &order {
        let mut a: CVector = u.column(s).into_owned();
        let mut b: CVector = v_t.row(s).transpose();
        if let Some(first) = a.iter().find(|z| z.norm() > 1e-12).copied() {
            let phase = first / first.norm();
            a = a.map(|z| z * phase.conj());
            b = b.map(|z| z * phase);
        }
        left.push(a);
        right.push(b);
        weights.push(svd.singular_values[s].powi(2));
    }
    Ok(Schmidt {
        coefficients: ProbVector::normalized(weights)?,
        left,
        right,
    })
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector: normalized vector of independent standard
/// complex Gaussians.
pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(dim, |_, _| gaussian_complex(rng));
        let norm = v.norm();
        if norm > 0.0 {
            return v.unscale(norm);
        }
    }
}

/// [`random_pure`] on the stream-0 generator of `seed`.
pub fn random_pure_seeded(dim: usize, seed: u64) -> CVector {
    random_pure(dim, &mut stream_rng(seed, 0))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix with
/// the phases of `R`'s diagonal divided out.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Random positive semidefinite matrix `G G†` of the given rank.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, rank, |_, _| gaussian_complex(rng));
    &g * g.adjoint()
}

/// Random full-rank density matrix (Hilbert-Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let p = random_psd(dim, dim, rng);
    let t = trace(&p).re;
    p.unscale(t)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    (&g + g.adjoint()).scale(0.5)
}
