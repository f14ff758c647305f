//! The map family `Φ[α,β,γ] = 1 Tr + α 1_A Tr ⊗ I + β I ⊗ 1_B Tr + γ I`,
//! the single-system family `χ[a,c] = 1 Tr + a D + c I`, depolarizing maps,
//! Hadamard channels and Choi matrices.
//!
//! Choi matrices are state-normalized: `R_φ = (φ ⊗ I)(|E⟩⟨E|)` with
//! `|E⟩ = d^{-1/2} Σ_i |i⟩|i⟩`, output factor first and reference factor
//! second. For bipartite maps the full ordering is `A B A' B'`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hadamard_product, identity, kron, min_eigenvalue, partial_trace, partial_transpose,
    permute_subsystems, projector, re, CMatrix, Dims, Side, ZERO,
};

/// Tolerance below which a composition scale counts as zero.
pub const DEGENERATE_SCALE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub dims: Dims,
}

impl PhiParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, dims: Dims) -> Self {
        PhiParams {
            alpha,
            beta,
            gamma,
            dims,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite() && self.gamma.is_finite()
    }

    pub fn coefficients(&self) -> PhiCoefficients {
        PhiCoefficients {
            trace: 1.0,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            dims: self.dims,
        }
    }

    /// Exchanges the roles of `A` and `B`.
    pub fn swapped(&self) -> Self {
        PhiParams::new(self.beta, self.alpha, self.gamma, self.dims.swapped())
    }
}

/// Unnormalized combination `t 1 Tr + α 1_A Tr ⊗ I + β I ⊗ 1_B Tr + γ I`.
///
/// Compositions with local maps stay in this form; the normalized family is
/// the slice `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiCoefficients {
    pub trace: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub dims: Dims,
}

impl PhiCoefficients {
    pub fn as_array(&self) -> [f64; 4] {
        [self.trace, self.alpha, self.beta, self.gamma]
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let (da, db) = self.dims.pair();
        let tr = linalg::trace(check_square(x, da * db, "phi_apply")?);
        // 1_A ⊗ Tr_A X and Tr_B X ⊗ 1_B
        let reduced_b = partial_trace(x, (da, db), Side::Second)?;
        let reduced_a = partial_trace(x, (da, db), Side::First)?;
        let mut out = x.scale(self.gamma);
        out += identity(da * db) * (tr * self.trace);
        out += kron(&identity(da), &reduced_b)?.scale(self.alpha);
        out += kron(&reduced_a, &identity(db))?.scale(self.beta);
        Ok(out)
    }

    /// Choi matrix from the entry formula
    /// `R[(I,I'),(J,J')] = Φ(|I'⟩⟨J'|)[I,J] / (dA dB)`.
    pub fn choi(&self) -> CMatrix {
        let (da, db) = self.dims.pair();
        let d = da * db;
        let norm = 1.0 / d as f64;
        let mut r = CMatrix::zeros(d * d, d * d);
        // entries are indexed by (a,b,a',b') x (c,e,c',e')
        for a in 0..da {
            for b in 0..db {
                for ap in 0..da {
                    for bp in 0..db {
                        let row = (a * db + b) * d + ap * db + bp;
                        for c in 0..da {
                            for e in 0..db {
                                for cp in 0..da {
                                    for ep in 0..db {
                                        let delta = |x: usize, y: usize| (x == y) as u8 as f64;
                                        let v = self.trace
                                            * delta(ap, cp)
                                            * delta(bp, ep)
                                            * delta(a, c)
                                            * delta(b, e)
                                            + self.alpha
                                                * delta(ap, cp)
                                                * delta(a, c)
                                                * delta(b, bp)
                                                * delta(e, ep)
                                            + self.beta
                                                * delta(bp, ep)
                                                * delta(b, e)
                                                * delta(a, ap)
                                                * delta(c, cp)
                                            + self.gamma
                                                * delta(a, ap)
                                                * delta(b, bp)
                                                * delta(c, cp)
                                                * delta(e, ep);
                                        if v != 0.0 {
                                            let col = (c * db + e) * d + cp * db + ep;
                                            r[(row, col)] = re(v * norm);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        r
    }

    /// The four distinct Choi eigenvalues with multiplicities, in the order
    /// `(base, base + α/dA, base + β/dB, base + α/dA + β/dB + γ)` where
    /// `base = t/(dA dB)`.
    pub fn choi_eigenvalues(&self) -> [(f64, usize); 4] {
        let (da, db) = self.dims.pair();
        let (daf, dbf) = (da as f64, db as f64);
        let base = self.trace / (daf * dbf);
        let (ma, mb) = (da * da - 1, db * db - 1);
        [
            (base, ma * mb),
            (base + self.alpha / daf, ma),
            (base + self.beta / dbf, mb),
            (base + self.alpha / daf + self.beta / dbf + self.gamma, 1),
        ]
    }

    /// Choi spectrum as a sorted list with multiplicities expanded.
    pub fn choi_spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .choi_eigenvalues()
            .iter()
            .flat_map(|&(x, m)| std::iter::repeat_n(x, m))
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Eigenvalues of `dA dB` times the partial transpose (over `A'B'`) of the
    /// Choi matrix: `t ± α ± β ± γ` with an even number of minus signs.
    pub fn choi_pt_eigenvalues(&self) -> [f64; 4] {
        let (t, a, b, g) = (self.trace, self.alpha, self.beta, self.gamma);
        [t + a + b + g, t + a - b - g, t - a + b - g, t - a - b + g]
    }

    /// Rescales to the normalized family, `self = K · Φ[α', β', γ']`.
    pub fn normalized(&self) -> Result<(f64, PhiParams)> {
        let k = self.trace;
        if k.abs() <= DEGENERATE_SCALE_TOL {
            return Err(Error::DegenerateComposition {
                coefficients: self.as_array(),
            });
        }
        Ok((
            k,
            PhiParams::new(self.alpha / k, self.beta / k, self.gamma / k, self.dims),
        ))
    }

    /// Coefficients of `(L ⊗ I)∘self` (side A) or `(I ⊗ L)∘self` (side B)
    /// for the local map `L = u 1 Tr + v I`.
    pub fn compose_local(&self, side: Side, local: LocalMap) -> PhiCoefficients {
        let LocalMap { u, v } = local;
        let (daf, dbf) = (self.dims.da as f64, self.dims.db as f64);
        let (t, a, b, g) = (self.trace, self.alpha, self.beta, self.gamma);
        let (trace, alpha, beta, gamma) = match side {
            Side::First => (
                t * (u * daf + v) + u * b,
                (u * daf + v) * a + u * g,
                v * b,
                v * g,
            ),
            Side::Second => (
                t * (u * dbf + v) + u * a,
                v * a,
                (u * dbf + v) * b + u * g,
                v * g,
            ),
        };
        PhiCoefficients {
            trace,
            alpha,
            beta,
            gamma,
            dims: self.dims,
        }
    }
}

fn check_square<'a>(x: &'a CMatrix, d: usize, what: &str) -> Result<&'a CMatrix> {
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{what}: expected {d}x{d} input, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    Ok(x)
}

/// `Φ(X) = 1 Tr X + α 1_A ⊗ Tr_A X + β Tr_B X ⊗ 1_B + γ X`.
pub fn phi_apply(p: &PhiParams, x: &CMatrix) -> Result<CMatrix> {
    p.coefficients().apply(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiParams {
    pub a: f64,
    pub c: f64,
    pub n: usize,
}

impl ChiParams {
    pub fn new(a: f64, c: f64, n: usize) -> Self {
        ChiParams { a, c, n }
    }
}

/// `χ(X) = 1 Tr X + a diag(X) + c X`.
pub fn chi_apply(p: &ChiParams, x: &CMatrix) -> Result<CMatrix> {
    check_square(x, p.n, "chi_apply")?;
    let mut out = x.scale(p.c);
    let tr = linalg::trace(x);
    for i in 0..p.n {
        out[(i, i)] += tr + x[(i, i)] * p.a;
    }
    Ok(out)
}

/// Normalized Choi matrix of an arbitrary linear map on a `d`-dimensional
/// system, built column by column from the images of `|i⟩⟨j|`.
pub fn choi_of<F>(d: usize, map: F) -> Result<CMatrix>
where
    F: Fn(&CMatrix) -> Result<CMatrix>,
{
    let mut r = CMatrix::zeros(d * d, d * d);
    let norm = 1.0 / d as f64;
    for i in 0..d {
        for j in 0..d {
            let mut unit = CMatrix::zeros(d, d);
            unit[(i, j)] = linalg::ONE;
            let image = map(&unit)?;
            check_square(&image, d, "choi_of")?;
            for a in 0..d {
                for b in 0..d {
                    let z = image[(a, b)];
                    if z != ZERO {
                        r[(a * d + i, b * d + j)] = z * norm;
                    }
                }
            }
        }
    }
    Ok(r)
}

/// A linear map stored as its normalized Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOp {
    pub choi: CMatrix,
    /// Dimension of the space the map acts on.
    pub dim: usize,
    /// Bipartite structure of that space, when there is one.
    pub dims: Option<Dims>,
}

impl SuperOp {
    pub fn from_choi(choi: CMatrix, dim: usize) -> Result<Self> {
        if choi.nrows() != dim * dim || choi.ncols() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix {}x{} for a map on dimension {dim}",
                choi.nrows(),
                choi.ncols()
            )));
        }
        Ok(SuperOp {
            choi,
            dim,
            dims: None,
        })
    }

    /// `φ(X)[a,b] = d Σ_ij R[(a,i),(b,j)] X[i,j]`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let d = self.dim;
        check_square(x, d, "SuperOp::apply")?;
        let scale = d as f64;
        Ok(CMatrix::from_fn(d, d, |a, b| {
            let mut acc = ZERO;
            for i in 0..d {
                for j in 0..d {
                    acc += self.choi[(a * d + i, b * d + j)] * x[(i, j)];
                }
            }
            acc * scale
        }))
    }

    pub fn min_choi_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(&self.choi)
    }

    /// Partial transpose over the reference factor.
    pub fn choi_partial_transpose(&self) -> Result<CMatrix> {
        partial_transpose(&self.choi, (self.dim, self.dim), Side::Second)
    }

    pub fn min_pt_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(&self.choi_partial_transpose()?)
    }
}

/// Choi matrix of `Φ[α,β,γ]`.
pub fn phi_choi(p: &PhiParams) -> SuperOp {
    SuperOp {
        choi: p.coefficients().choi(),
        dim: p.dims.total(),
        dims: Some(p.dims),
    }
}

/// Choi matrix assembled as
/// `1/(dA dB) + α 1_{AA'}/dA ⊗ ε_{BB'} + β ε_{AA'} ⊗ 1_{BB'}/dB + γ ε_{AA'} ⊗ ε_{BB'}`
/// on `A A' B B'` and reordered to `A B A' B'`.
pub fn phi_choi_closed_form(p: &PhiParams) -> Result<CMatrix> {
    let (da, db) = p.dims.pair();
    let (daf, dbf) = (da as f64, db as f64);
    let pa = projector(&crate::states::epsilon(da).vector);
    let pb = projector(&crate::states::epsilon(db).vector);
    let ia = identity(da * da);
    let ib = identity(db * db);
    let on_aabb = kron(&ia, &ib)?.scale(1.0 / (daf * dbf))
        + kron(&ia, &pb)?.scale(p.alpha / daf)
        + kron(&pa, &ib)?.scale(p.beta / dbf)
        + kron(&pa, &pb)?.scale(p.gamma);
    permute_subsystems(&on_aabb, &[da, da, db, db], &[0, 2, 1, 3])
}

/// Coefficients and rescaled parameters of the composition of `Φ` with
/// `u 1 Tr + v I` on one side.
pub fn compose_local(p: &PhiParams, side: Side, u: f64, v: f64) -> Result<(f64, PhiParams)> {
    p.coefficients()
        .compose_local(side, LocalMap::new(u, v))
        .normalized()
}

/// Single-system map `u 1 Tr + v I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalMap {
    pub u: f64,
    pub v: f64,
}

impl LocalMap {
    pub fn new(u: f64, v: f64) -> Self {
        LocalMap { u, v }
    }

    pub fn identity() -> Self {
        LocalMap::new(0.0, 1.0)
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let d = x.nrows();
        check_square(x, d, "LocalMap::apply")?;
        Ok(identity(d) * (linalg::trace(x) * self.u) + x.scale(self.v))
    }

    /// Normalized Choi matrix on `d ⊗ d`: `u 1/d + v |ε⟩⟨ε|`.
    pub fn choi(&self, d: usize) -> CMatrix {
        let eps = projector(&crate::states::epsilon(d).vector);
        identity(d * d).scale(self.u / d as f64) + eps.scale(self.v)
    }
}

/// Applies a local map to one factor of an operator on `dA ⊗ dB`.
pub fn apply_local(local: LocalMap, side: Side, x: &CMatrix, dims: Dims) -> Result<CMatrix> {
    let (da, db) = dims.pair();
    check_square(x, da * db, "apply_local")?;
    let traced = match side {
        Side::First => kron(&identity(da), &partial_trace(x, (da, db), Side::Second)?)?,
        Side::Second => kron(&partial_trace(x, (da, db), Side::First)?, &identity(db))?,
    };
    Ok(traced.scale(local.u) + x.scale(local.v))
}

/// `(L_A ⊗ L_B)(X)`.
pub fn apply_local_product(
    on_a: LocalMap,
    on_b: LocalMap,
    x: &CMatrix,
    dims: Dims,
) -> Result<CMatrix> {
    apply_local(
        on_a,
        Side::First,
        &apply_local(on_b, Side::Second, x, dims)?,
        dims,
    )
}

/// Applies `map ⊗ I` to an operator on `d_map ⊗ d_rest`.
pub fn apply_on_first<F>(map: F, x: &CMatrix, d_map: usize, d_rest: usize) -> Result<CMatrix>
where
    F: Fn(&CMatrix) -> Result<CMatrix>,
{
    check_square(x, d_map * d_rest, "apply_on_first")?;
    let mut out: Option<CMatrix> = None;
    for j in 0..d_rest {
        for l in 0..d_rest {
            let block = CMatrix::from_fn(d_map, d_map, |i, k| x[(i * d_rest + j, k * d_rest + l)]);
            if block.iter().all(|z| *z == ZERO) {
                continue;
            }
            let image = map(&block)?;
            let (r, c) = image.shape();
            let target = out.get_or_insert_with(|| CMatrix::zeros(r * d_rest, c * d_rest));
            for i in 0..r {
                for k in 0..c {
                    target[(i * d_rest + j, k * d_rest + l)] += image[(i, k)];
                }
            }
        }
    }
    Ok(out.unwrap_or_else(|| CMatrix::zeros(d_map * d_rest, d_map * d_rest)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepolParams {
    pub lambda: f64,
    pub d: usize,
}

/// `Δ_λ = λ I + (1-λ) 1/d Tr` on a `d`-dimensional system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Depolarizing {
    pub params: DepolParams,
}

impl Depolarizing {
    pub fn local_map(&self) -> LocalMap {
        let DepolParams { lambda, d } = self.params;
        LocalMap::new((1.0 - lambda) / d as f64, lambda)
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        check_square(x, self.params.d, "Depolarizing::apply")?;
        self.local_map().apply(x)
    }

    pub fn choi(&self) -> SuperOp {
        SuperOp {
            choi: self.local_map().choi(self.params.d),
            dim: self.params.d,
            dims: None,
        }
    }
}

pub fn depolarizing(p: DepolParams) -> Depolarizing {
    Depolarizing { params: p }
}

/// `Δ_{q1} ⊗ Δ_{q2}` written inside the Φ family, when possible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LocalProductForm {
    /// `Δ_{q1} ⊗ Δ_{q2} = scale · Φ[params]`.
    Phi { scale: f64, params: PhiParams },
    /// A factor is the identity channel (`q = 1`); the `1 Tr` coefficient
    /// vanishes and the product has to be applied directly.
    Degenerate,
}

/// Expresses `Δ_{q1} ⊗ Δ_{q2}` on `d ⊗ d` as
/// `(1-q1)(1-q2)/d² · Φ[d q2/(1-q2), d q1/(1-q1), d² q1 q2/((1-q1)(1-q2))]`.
pub fn local_product_as_phi(q1: f64, q2: f64, d: usize) -> Result<LocalProductForm> {
    let dims = Dims::new(d, d)?;
    if q1 == 1.0 || q2 == 1.0 {
        return Ok(LocalProductForm::Degenerate);
    }
    let df = d as f64;
    let (r1, r2) = (1.0 - q1, 1.0 - q2);
    Ok(LocalProductForm::Phi {
        scale: r1 * r2 / (df * df),
        params: PhiParams::new(
            df * q2 / r2,
            df * q1 / r1,
            df * df * q1 * q2 / (r1 * r2),
            dims,
        ),
    })
}

/// Applies `Δ_{q1} ⊗ Δ_{q2}` directly.
pub fn apply_local_depolarizing(q1: f64, q2: f64, x: &CMatrix, d: usize) -> Result<CMatrix> {
    let dims = Dims::new(d, d)?;
    let on = |q: f64| depolarizing(DepolParams { lambda: q, d }).local_map();
    apply_local_product(on(q1), on(q2), x, dims)
}

/// The Hadamard channel `ζ_A(X) = A ∘ X`, completely positive iff `A ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardChannel {
    pub a: CMatrix,
    /// Smallest eigenvalue of `A`; negative values mean the channel is not CP.
    pub psd_margin: f64,
}

impl HadamardChannel {
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        hadamard_product(&self.a, x)
    }

    pub fn is_completely_positive(&self, tol: f64) -> bool {
        self.psd_margin >= -tol
    }
}

pub fn hadamard_channel(a: CMatrix) -> Result<HadamardChannel> {
    let psd_margin = min_eigenvalue(&a)?;
    Ok(HadamardChannel { a, psd_margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::stream_rng;
    use crate::linalg::{
        basis_vector, herm_spectrum, max_abs_diff, random_density, random_hermitian, random_pure,
        random_unitary, ONE,
    };
    use crate::states::epsilon;

    fn dims(da: usize, db: usize) -> Dims {
        Dims::new(da, db).unwrap()
    }

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_fn(values.len(), values.len(), |i, j| {
            if i == j {
                re(values[i])
            } else {
                ZERO
            }
        })
    }

    #[test]
    fn trivial_phi_outputs_identity() {
        let mut rng = stream_rng(1, 0);
        let rho = random_density(6, &mut rng);
        let out = phi_apply(&PhiParams::new(0.0, 0.0, 0.0, dims(2, 3)), &rho).unwrap();
        assert!(max_abs_diff(&out, &identity(6)) < 1e-14);
    }

    #[test]
    fn phi_on_maximally_entangled_state() {
        let (alpha, beta, gamma) = (0.7, -0.4, 1.3);
        for n in [2, 3, 4] {
            let eps = projector(&epsilon(n).vector);
            let out = phi_apply(&PhiParams::new(alpha, beta, gamma, dims(n, n)), &eps).unwrap();
            let expected =
                identity(n * n).scale(1.0 + (alpha + beta) / n as f64) + eps.scale(gamma);
            assert!(max_abs_diff(&out, &expected) < 1e-14);
        }
    }

    #[test]
    fn phi_on_product_basis_state() {
        let e11 = basis_vector(4, 0);
        let out = phi_apply(&PhiParams::new(1.0, 1.0, 1.0, dims(2, 2)), &projector(&e11)).unwrap();
        assert_eq!(out, diag(&[4.0, 2.0, 2.0, 1.0]));
    }

    #[test]
    fn phi_rejects_wrong_size() {
        let p = PhiParams::new(0.0, 0.0, 0.0, dims(2, 3));
        assert!(matches!(
            phi_apply(&p, &identity(5)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn chi_examples() {
        let mut rng = stream_rng(2, 0);
        let rho = random_density(3, &mut rng);
        let out = chi_apply(&ChiParams::new(0.0, 0.0, 3), &rho).unwrap();
        assert!(max_abs_diff(&out, &identity(3)) < 1e-14);

        let plus = CMatrix::from_element(2, 2, re(0.5));
        let out = chi_apply(&ChiParams::new(-2.0, 1.0, 2), &plus).unwrap();
        assert!(max_abs_diff(&out, &plus) < 1e-15);
        let spec = herm_spectrum(&out).unwrap();
        assert!(spec[0].abs() < 1e-15 && (spec[1] - 1.0).abs() < 1e-15);

        // real amplitudes: χ(|ψ⟩⟨ψ|) = 1 + a D_λ + c |ψ⟩⟨ψ|
        let lambda: [f64; 3] = [0.5, 0.3, 0.2];
        let psi = crate::linalg::CVector::from_fn(3, |i, _| re(lambda[i].sqrt()));
        let (a, c) = (1.5, -0.7);
        let out = chi_apply(&ChiParams::new(a, c, 3), &projector(&psi)).unwrap();
        let expected = identity(3) + diag(&lambda).scale(a) + projector(&psi).scale(c);
        assert!(max_abs_diff(&out, &expected) < 1e-15);
    }

    #[test]
    fn choi_routes_agree() {
        let mut rng = stream_rng(3, 0);
        for (da, db) in [(2, 2), (2, 3), (3, 2), (3, 4)] {
            for _ in 0..3 {
                let p = PhiParams::new(
                    rand::Rng::random_range(&mut rng, -2.0..2.0),
                    rand::Rng::random_range(&mut rng, -2.0..2.0),
                    rand::Rng::random_range(&mut rng, -2.0..2.0),
                    dims(da, db),
                );
                let direct = phi_choi(&p).choi;
                let via_apply = choi_of(da * db, |x| phi_apply(&p, x)).unwrap();
                let closed = phi_choi_closed_form(&p).unwrap();
                assert!(max_abs_diff(&direct, &via_apply) < 1e-15);
                assert!(max_abs_diff(&direct, &closed) < 1e-15);
            }
        }
    }

    #[test]
    fn choi_examples() {
        let p = PhiParams::new(0.0, 0.0, 0.0, dims(2, 3));
        assert!(max_abs_diff(&phi_choi(&p).choi, &identity(36).scale(1.0 / 6.0)) < 1e-15);

        let p = PhiParams::new(0.3, -0.2, 0.9, dims(2, 3));
        let t = crate::linalg::trace(&phi_choi(&p).choi).re;
        let expected = 6.0 + 0.3 * 2.0 - 0.2 * 3.0 + 0.9;
        assert!((t - expected).abs() < 1e-14);
    }

    #[test]
    fn choi_spectrum_matches_closed_form() {
        let mut rng = stream_rng(4, 0);
        for (da, db) in [(2, 2), (2, 5), (4, 3)] {
            let p = PhiParams::new(
                rand::Rng::random_range(&mut rng, -1.0..1.0),
                rand::Rng::random_range(&mut rng, -1.0..1.0),
                rand::Rng::random_range(&mut rng, -1.0..1.0),
                dims(da, db),
            );
            let numeric = herm_spectrum(&phi_choi(&p).choi).unwrap();
            let closed = p.coefficients().choi_spectrum();
            for (x, y) in numeric.iter().zip(&closed) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn compose_local_identity_is_noop() {
        let p = PhiParams::new(0.4, -0.3, 1.1, dims(2, 3));
        for side in [Side::First, Side::Second] {
            let (k, q) = compose_local(&p, side, 0.0, 1.0).unwrap();
            assert_eq!(k, 1.0);
            assert_eq!(q, p);
        }
    }

    #[test]
    fn compose_local_matches_direct_composition() {
        let mut rng = stream_rng(5, 0);
        let p = PhiParams::new(0.4, -0.3, 1.1, dims(2, 3));
        let (da, db) = (2.0, 3.0);
        let (k, q) = compose_local(&p, Side::Second, 1.0, -1.0 / da).unwrap();
        let k_expected = db - 1.0 / da + p.alpha;
        assert!((k - k_expected).abs() < 1e-15);
        assert!((q.alpha + p.alpha / (da * k)).abs() < 1e-15);
        assert!((q.beta - ((db - 1.0 / da) * p.beta + p.gamma) / k).abs() < 1e-15);
        assert!((q.gamma + p.gamma / (da * k)).abs() < 1e-15);

        for (side, u, v) in [
            (Side::Second, 1.0, -0.5),
            (Side::First, 0.3, 0.8),
            (Side::First, -1.0, 2.0),
        ] {
            let (k, q) = compose_local(&p, side, u, v).unwrap();
            for _ in 0..4 {
                let x = random_hermitian(6, &mut rng);
                let direct = apply_local(
                    LocalMap::new(u, v),
                    side,
                    &phi_apply(&p, &x).unwrap(),
                    p.dims,
                )
                .unwrap();
                let via_family = phi_apply(&q, &x).unwrap().scale(k);
                assert!(max_abs_diff(&direct, &via_family) < 1e-10);
            }
        }
    }

    #[test]
    fn compose_local_reports_degenerate_scale() {
        // K = u dB + v + u α = 0
        let p = PhiParams::new(-2.0, 0.0, 0.0, dims(2, 2));
        let err = compose_local(&p, Side::Second, 1.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateComposition { .. }));
    }

    #[test]
    fn depolarizing_examples() {
        let mut rng = stream_rng(6, 0);
        let x = random_hermitian(3, &mut rng);
        let id = depolarizing(DepolParams { lambda: 1.0, d: 3 });
        assert!(max_abs_diff(&id.apply(&x).unwrap(), &x) < 1e-15);

        let rho = random_density(3, &mut rng);
        let full = depolarizing(DepolParams { lambda: 0.0, d: 3 });
        assert!(max_abs_diff(&full.apply(&rho).unwrap(), &identity(3).scale(1.0 / 3.0)) < 1e-15);

        for (lambda, d) in [(0.3, 2), (-0.1, 3), (0.9, 4)] {
            let map = depolarizing(DepolParams { lambda, d });
            let spec = herm_spectrum(&map.choi().choi).unwrap();
            let df2 = (d * d) as f64;
            let lo = (1.0 - lambda) / df2;
            let hi = lambda + (1.0 - lambda) / df2;
            let (small, large) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            assert!(spec[..d * d - 1]
                .iter()
                .all(|x| (x - small.min(large)).abs() < 1e-14 || (x - lo).abs() < 1e-14));
            assert!(spec.iter().filter(|x| (*x - hi).abs() < 1e-14).count() >= 1);
            let via_apply = choi_of(d, |x| map.apply(x)).unwrap();
            assert!(max_abs_diff(&via_apply, &map.choi().choi) < 1e-15);
        }
    }

    #[test]
    fn local_product_identity() {
        match local_product_as_phi(0.5, 0.5, 2).unwrap() {
            LocalProductForm::Phi { scale, params } => {
                assert!((scale - 1.0 / 16.0).abs() < 1e-15);
                assert_eq!((params.alpha, params.beta, params.gamma), (2.0, 2.0, 4.0));
            }
            LocalProductForm::Degenerate => panic!("interior point reported degenerate"),
        }
        assert_eq!(
            local_product_as_phi(1.0, 0.3, 3).unwrap(),
            LocalProductForm::Degenerate
        );

        let mut rng = stream_rng(7, 0);
        for (q1, q2, d) in [(0.5, 0.5, 2), (0.2, -0.1, 3), (0.0, 0.7, 2), (-0.3, 0.4, 3)] {
            let LocalProductForm::Phi { scale, params } = local_product_as_phi(q1, q2, d).unwrap()
            else {
                panic!("unexpected degenerate form");
            };
            for _ in 0..3 {
                let psi = random_pure(d * d, &mut rng);
                let rho = projector(&psi);
                let direct = apply_local_depolarizing(q1, q2, &rho, d).unwrap();
                let via_phi = phi_apply(&params, &rho).unwrap().scale(scale);
                assert!(max_abs_diff(&direct, &via_phi) < 1e-10);
            }
        }
    }

    #[test]
    fn hadamard_channel_examples() {
        let mut rng = stream_rng(8, 0);
        let x = random_hermitian(4, &mut rng);
        let ones = hadamard_channel(CMatrix::from_element(4, 4, ONE)).unwrap();
        assert_eq!(ones.apply(&x).unwrap(), x);

        let diag_proj = hadamard_channel(identity(4)).unwrap();
        let out = diag_proj.apply(&x).unwrap();
        let chi = chi_apply(&ChiParams::new(1.0, 0.0, 4), &x).unwrap()
            - identity(4) * crate::linalg::trace(&x);
        assert!(max_abs_diff(&out, &chi) < 1e-15);

        for _ in 0..20 {
            let a = crate::linalg::random_psd(5, 2, &mut rng);
            let rho = crate::linalg::random_psd(5, 3, &mut rng);
            let ch = hadamard_channel(a).unwrap();
            assert!(ch.is_completely_positive(1e-10));
            assert!(min_eigenvalue(&ch.apply(&rho).unwrap()).unwrap() >= -1e-10);
        }
        assert!(hadamard_channel(identity(3))
            .unwrap()
            .apply(&identity(2))
            .is_err());
    }

    #[test]
    fn superop_apply_inverts_choi() {
        let mut rng = stream_rng(9, 0);
        let p = PhiParams::new(0.3, 1.2, -0.5, dims(2, 3));
        let op = phi_choi(&p);
        let x = random_hermitian(6, &mut rng);
        assert!(max_abs_diff(&op.apply(&x).unwrap(), &phi_apply(&p, &x).unwrap()) < 1e-13);
    }

    #[test]
    fn apply_on_first_matches_local_apply() {
        let mut rng = stream_rng(10, 0);
        let d = dims(2, 3);
        let x = random_hermitian(6, &mut rng);
        let local = LocalMap::new(0.7, -0.2);
        let direct = apply_local(local, Side::First, &x, d).unwrap();
        let generic = apply_on_first(|m| local.apply(m), &x, 2, 3).unwrap();
        assert!(max_abs_diff(&direct, &generic) < 1e-15);
    }

    #[test]
    fn commutes_with_local_unitaries() {
        let mut rng = stream_rng(11, 0);
        let d = dims(2, 3);
        let p = PhiParams::new(0.8, -0.6, 1.7, d);
        for _ in 0..10 {
            let u = random_unitary(2, &mut rng);
            let v = random_unitary(3, &mut rng);
            let w = kron(&u, &v).unwrap();
            let x = random_hermitian(6, &mut rng);
            let lhs = phi_apply(&p, &(&w * &x * w.adjoint())).unwrap();
            let rhs = &w * phi_apply(&p, &x).unwrap() * w.adjoint();
            assert!(max_abs_diff(&lhs, &rhs) < 1e-9);
        }
    }

    #[test]
    fn pt_eigenvalues_match_numeric_partial_transpose() {
        let p = PhiParams::new(-1.0 / 6.0, -0.5, 2.0 / 3.0, dims(2, 6));
        let op = phi_choi(&p);
        let numeric = herm_spectrum(&op.choi_partial_transpose().unwrap()).unwrap();
        let scale = 12.0;
        let mut closed: Vec<f64> = p.coefficients().choi_pt_eigenvalues().to_vec();
        closed.sort_by(f64::total_cmp);
        let mut distinct: Vec<f64> = numeric.iter().map(|x| x * scale).collect();
        distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        assert_eq!(distinct.len(), 4);
        for (x, y) in distinct.iter().zip(&closed) {
            assert!((x - y).abs() < 1e-10);
        }
        let _ = basis_vector(2, 0);
    }
}
