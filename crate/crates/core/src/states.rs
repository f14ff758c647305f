//! Named states and separability certificates.
//!
//! Operators on the doubled space are ordered `A B A' B'` unless stated
//! otherwise; the separability cut of Choi matrices is `AB | A'B'`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, basis_vector, hadamard_product, identity, kron, min_eigenvalue, partial_trace,
    permute_subsystems, projector, re, schmidt, CMatrix, CVector, Dims, ProbVector, Side, ZERO,
};
use crate::maps::{LocalMap, PhiCoefficients, PhiParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EntangledKind {
    /// `d^{-1/2} Σ_i |ii⟩` on `d ⊗ d`.
    Epsilon,
    /// `dA^{-1/2} Σ_{i<dA} |ii⟩` on `dA ⊗ dB` with `dA ≤ dB`.
    Tilde,
    /// `|ε⟩_{AA'} |ε⟩_{BB'}` written on `AB ⊗ A'B'`.
    Doubled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntangledVector {
    pub kind: EntangledKind,
    pub dims: (usize, usize),
    pub vector: CVector,
}

pub fn epsilon(d: usize) -> EntangledVector {
    let amp = re(1.0 / (d as f64).sqrt());
    let mut v = CVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = amp;
    }
    EntangledVector {
        kind: EntangledKind::Epsilon,
        dims: (d, d),
        vector: v,
    }
}

pub fn epsilon_tilde(dims: Dims) -> Result<EntangledVector> {
    let (da, db) = dims.pair();
    if da > db {
        return Err(Error::InvalidDims(format!(
            "rectangular maximally entangled vector needs dA <= dB, got ({da}, {db})"
        )));
    }
    let amp = re(1.0 / (da as f64).sqrt());
    let mut v = CVector::zeros(da * db);
    for i in 0..da {
        v[i * db + i] = amp;
    }
    Ok(EntangledVector {
        kind: EntangledKind::Tilde,
        dims: (da, db),
        vector: v,
    })
}

pub fn doubled(dims: Dims) -> EntangledVector {
    let d = dims.total();
    EntangledVector {
        kind: EntangledKind::Doubled,
        dims: (d, d),
        ..epsilon(d)
    }
}

/// `P(X) = |ε⟩⟨ε| X |ε⟩⟨ε| + (1 - |ε⟩⟨ε|) Tr[(1 - |ε⟩⟨ε|) X] / (d² - 1)`,
/// the `U ⊗ U*` twirl on `d ⊗ d`.
pub fn isotropic_twirl(d: usize, x: &CMatrix) -> Result<CMatrix> {
    let size = d * d;
    if x.nrows() != size || x.ncols() != size {
        return Err(Error::DimensionMismatch(format!(
            "twirl on {d}x{d} needs a {size}x{size} input, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let p = projector(&epsilon(d).vector);
    let q = identity(size) - &p;
    let fidelity = pair_trace(&p, x);
    let rest = pair_trace(&q, x);
    Ok(p * fidelity + q * (rest / (size as f64 - 1.0)))
}

/// `Tr[S X]`.
fn pair_trace(s: &CMatrix, x: &CMatrix) -> linalg::C64 {
    s.transpose().component_mul(x).sum()
}

/// `P_{AA'} ⊗ P_{BB'}` on an operator ordered `A A' B B'`.
pub fn twirl_pair(dims: Dims, x: &CMatrix) -> Result<CMatrix> {
    let (da, db) = dims.pair();
    let size = da * da * db * db;
    if x.nrows() != size || x.ncols() != size {
        return Err(Error::DimensionMismatch(format!(
            "twirl pair on ({da}, {db}) needs a {size}x{size} input, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    // dual basis {P, Q} of each invariant plane and its images {P, Q/(d²-1)}
    let basis = |d: usize| {
        let p = projector(&epsilon(d).vector);
        let q = identity(d * d) - &p;
        let q_img = q.scale(1.0 / ((d * d) as f64 - 1.0));
        [(p.clone(), p), (q, q_img)]
    };
    let (on_a, on_b) = (basis(da), basis(db));
    let mut out = CMatrix::zeros(size, size);
    for (sa, img_a) in &on_a {
        for (sb, img_b) in &on_b {
            let coeff = pair_trace(&kron(sa, sb)?, x);
            if coeff != ZERO {
                out += kron(img_a, img_b)? * coeff;
            }
        }
    }
    Ok(out)
}

/// `(P_{AA'} ⊗ P_{BB'})` applied to an operator ordered `A B A' B'`.
pub fn twirl_pair_doubled(dims: Dims, x: &CMatrix) -> Result<CMatrix> {
    let (da, db) = dims.pair();
    let grouped = permute_subsystems(x, &[da, db, da, db], &[0, 2, 1, 3])?;
    let twirled = twirl_pair(dims, &grouped)?;
    permute_subsystems(&twirled, &[da, da, db, db], &[0, 2, 1, 3])
}

/// The PPT entangled state
/// `1 - 1_{AA'} ⊗ |ε⟩⟨ε|_{BB'} - |ε⟩⟨ε|_{AA'} ⊗ 1_{BB'} + (dA dB - dB + dA) |ε⟩⟨ε| ⊗ |ε⟩⟨ε|`
/// on `AB ⊗ A'B'`, unnormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct PptEntangledState {
    pub dims: Dims,
    pub matrix: CMatrix,
    /// False when `dA = dB`: the state is then separable and no map in the
    /// family detects it.
    pub entangled: bool,
}

impl PptEntangledState {
    pub fn coefficient(&self) -> f64 {
        let (da, db) = self.dims.pair();
        (da * db + da) as f64 - db as f64
    }

    pub fn normalized(&self) -> CMatrix {
        let tr = linalg::trace(&self.matrix).re;
        self.matrix.scale(1.0 / tr)
    }

    /// The vertex `(-1/dB, -1/dA, 1 - (dB - dA)/(dA dB))` whose Choi matrix is
    /// this state divided by `dA dB`.
    pub fn vertex(&self) -> PhiParams {
        red_vertex(self.dims)
    }
}

pub fn red_vertex(dims: Dims) -> PhiParams {
    let (da, db) = (dims.da as f64, dims.db as f64);
    PhiParams::new(-1.0 / db, -1.0 / da, 1.0 - (db - da) / (da * db), dims)
}

pub fn ppt_entangled_state(dims: Dims) -> Result<PptEntangledState> {
    let (da, db) = dims.pair();
    if da > db {
        return Err(Error::InvalidDims(format!(
            "PPT entangled state is defined for dA <= dB, got ({da}, {db})"
        )));
    }
    let pa = projector(&epsilon(da).vector);
    let pb = projector(&epsilon(db).vector);
    let ia = identity(da * da);
    let ib = identity(db * db);
    let coeff = (da * db + da - db) as f64;
    let on_aabb =
        kron(&ia, &ib)? - kron(&ia, &pb)? - kron(&pa, &ib)? + kron(&pa, &pb)?.scale(coeff);
    Ok(PptEntangledState {
        dims,
        matrix: permute_subsystems(&on_aabb, &[da, da, db, db], &[0, 2, 1, 3])?,
        entangled: da < db,
    })
}

/// `I_A ⊗ (1 Tr - I/dA)_B`, the positive map detecting the PPT entangled
/// state when `dA < dB`.
pub fn indecomposable_witness(dims: Dims) -> PhiCoefficients {
    PhiCoefficients {
        trace: 0.0,
        alpha: 0.0,
        beta: 1.0,
        gamma: -1.0 / dims.da as f64,
        dims,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PieceKind {
    /// `w · X ⊗ Y` with `X, Y ⪰ 0`.
    Product,
    /// `w · (P_{AA'} ⊗ P_{BB'})(X ⊗ Y)`: a product across `AB | A'B'`
    /// averaged over local unitaries, hence separable across that cut.
    TwirledProduct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub kind: PieceKind,
    pub weight: f64,
    pub left: CMatrix,
    pub right: CMatrix,
}

impl Piece {
    pub fn psd_margin(&self) -> Result<f64> {
        Ok(min_eigenvalue(&self.left)?.min(min_eigenvalue(&self.right)?))
    }
}

/// A target operator written as a nonnegative combination of manifestly
/// separable pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableCertificate {
    pub target: CMatrix,
    /// Dimensions of the two sides of the separability cut.
    pub cut: (usize, usize),
    /// Local dimensions `(dA, dB)` for twirled pieces.
    pub twirl: Option<Dims>,
    pub pieces: Vec<Piece>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceSummary {
    pub kind: PieceKind,
    pub weight: f64,
    pub psd_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSummary {
    pub cut: (usize, usize),
    pub pieces: Vec<PieceSummary>,
    pub residual: f64,
    pub min_weight: f64,
    pub min_psd_margin: f64,
}

impl SeparableCertificate {
    pub fn reconstruct(&self) -> Result<CMatrix> {
        let size = self.cut.0 * self.cut.1;
        let mut out = CMatrix::zeros(size, size);
        for piece in &self.pieces {
            let product = kron(&piece.left, &piece.right)?;
            let term = match piece.kind {
                PieceKind::Product => product,
                PieceKind::TwirledProduct => {
                    let dims = self.twirl.ok_or_else(|| {
                        Error::InvalidSpec("twirled piece without local dimensions".into())
                    })?;
                    twirl_pair_doubled(dims, &product)?
                }
            };
            out += term.scale(piece.weight);
        }
        Ok(out)
    }

    /// Max-norm distance between the reconstruction and the target.
    pub fn residual(&self) -> Result<f64> {
        Ok(linalg::max_abs_diff(&self.reconstruct()?, &self.target))
    }

    pub fn min_weight(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.weight)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_psd_margin(&self) -> Result<f64> {
        self.pieces
            .iter()
            .try_fold(f64::INFINITY, |acc, p| Ok(acc.min(p.psd_margin()?)))
    }

    pub fn verify(&self, tol: f64) -> Result<bool> {
        Ok(self.residual()? <= tol && self.min_weight() >= -tol && self.min_psd_margin()? >= -tol)
    }

    pub fn summary(&self) -> Result<CertificateSummary> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                Ok(PieceSummary {
                    kind: p.kind,
                    weight: p.weight,
                    psd_margin: p.psd_margin()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CertificateSummary {
            cut: self.cut,
            residual: self.residual()?,
            min_weight: self.min_weight(),
            min_psd_margin: pieces
                .iter()
                .map(|p| p.psd_margin)
                .fold(f64::INFINITY, f64::min),
            pieces,
        })
    }
}

/// The five vertices of the entanglement-breaking region for `dA ≤ dB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EbVertex {
    /// `(-1/dB, -1/dB, 1)`
    Twirl,
    /// `(1, -1/dA, -1/dA) = (1 Tr - I/dA) ⊗ (1 Tr + I)`
    ContractA,
    /// `(-1/dB, 1, -1/dB) = (1 Tr + I) ⊗ (1 Tr - I/dB)`
    ContractB,
    /// `(-1/dB, -1/dA, 1/(dA dB)) = (1 Tr - I/dA) ⊗ (1 Tr - I/dB)`
    ContractBoth,
    /// `(1, 1, 1) = (1 Tr + I) ⊗ (1 Tr + I)`
    Apex,
}

impl EbVertex {
    pub const ALL: [EbVertex; 5] = [
        EbVertex::Twirl,
        EbVertex::ContractA,
        EbVertex::ContractB,
        EbVertex::ContractBoth,
        EbVertex::Apex,
    ];

    pub fn params(self, dims: Dims) -> PhiParams {
        let (da, db) = (dims.da as f64, dims.db as f64);
        let (a, b, g) = match self {
            EbVertex::Twirl => (-1.0 / db, -1.0 / db, 1.0),
            EbVertex::ContractA => (1.0, -1.0 / da, -1.0 / da),
            EbVertex::ContractB => (-1.0 / db, 1.0, -1.0 / db),
            EbVertex::ContractBoth => (-1.0 / db, -1.0 / da, 1.0 / (da * db)),
            EbVertex::Apex => (1.0, 1.0, 1.0),
        };
        PhiParams::new(a, b, g, dims)
    }

    /// Local factors `(L_A, L_B)` with `Φ = L_A ⊗ L_B`, if the vertex factorizes.
    pub fn factors(self, dims: Dims) -> Option<(LocalMap, LocalMap)> {
        let plus = LocalMap::new(1.0, 1.0);
        let minus = |d: usize| LocalMap::new(1.0, -1.0 / d as f64);
        match self {
            EbVertex::Twirl => None,
            EbVertex::ContractA => Some((minus(dims.da), plus)),
            EbVertex::ContractB => Some((plus, minus(dims.db))),
            EbVertex::ContractBoth => Some((minus(dims.da), minus(dims.db))),
            EbVertex::Apex => Some((plus, plus)),
        }
    }
}

/// Writes the normalized Choi matrix of `u 1 Tr + v I` (for the two maps
/// `1 Tr + I` and `1 Tr - I/d`) as `w · P(|0⟩|k⟩⟨0|⟨k|)`; returns `(w, k)`.
fn local_twirl_form(local: LocalMap, d: usize) -> Result<(f64, usize)> {
    let df = d as f64;
    if local == LocalMap::new(1.0, 1.0) {
        Ok((df + 1.0, 0))
    } else if local == LocalMap::new(1.0, -1.0 / df) {
        Ok(((df * df - 1.0) / df, 1))
    } else {
        Err(Error::InvalidSpec(format!(
            "no twirl form for local map {local:?} on dimension {d}"
        )))
    }
}

/// Separable decomposition of the Choi matrix at an entanglement-breaking
/// vertex. Every piece is a local twirl of a product across `AB | A'B'`.
pub fn vertex_certificate(vertex: EbVertex, dims: Dims) -> Result<SeparableCertificate> {
    let (da, db) = dims.pair();
    if da > db {
        return Err(Error::InvalidDims(format!(
            "vertex certificates are stated for dA <= dB, got ({da}, {db})"
        )));
    }
    let target = crate::maps::phi_choi(&vertex.params(dims)).choi;
    let piece = match vertex.factors(dims) {
        None => {
            let tilde = projector(&epsilon_tilde(dims)?.vector);
            Piece {
                kind: PieceKind::TwirledProduct,
                weight: da as f64 * (db * db - 1) as f64 / db as f64,
                left: tilde.clone(),
                right: tilde,
            }
        }
        Some((on_a, on_b)) => {
            let (wa, ka) = local_twirl_form(on_a, da)?;
            let (wb, kb) = local_twirl_form(on_b, db)?;
            let left = projector(&basis_vector(da * db, 0));
            let right = projector(&basis_vector(da * db, ka * db + kb));
            Piece {
                kind: PieceKind::TwirledProduct,
                weight: wa * wb,
                left,
                right,
            }
        }
    };
    Ok(SeparableCertificate {
        target,
        cut: (da * db, da * db),
        twirl: Some(dims),
        pieces: vec![piece],
    })
}

/// `F + n|ε⟩⟨ε| = Σ_{i≠j} |ii⟩⟨jj| + Σ_{ij} |ij⟩⟨ij|` on `n ⊗ n`.
pub fn flag_plus_eps(n: usize) -> CMatrix {
    let mut m = identity(n * n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m[(i * n + i, j * n + j)] = linalg::ONE;
            }
        }
    }
    m
}

/// Largest `n` for which the explicit product decomposition of
/// [`flag_plus_eps`] is built (it has `3^(n-1)` terms).
pub const FLAG_DECOMPOSITION_MAX_N: usize = 10;

/// Vectors `u` with `F + n|ε⟩⟨ε| = 3^{-(n-1)} Σ_u |u⟩⟨u| ⊗ |ū⟩⟨ū|`, where
/// `u = Σ_k e^{iθ_k} |k⟩`, `θ_0 = 0` and the other phases range over the
/// cube roots of unity.
pub fn flag_plus_eps_decomposition(n: usize) -> Result<Vec<CVector>> {
    if n > FLAG_DECOMPOSITION_MAX_N {
        return Err(Error::ResourceLimit {
            dim: n,
            cap: FLAG_DECOMPOSITION_MAX_N,
        });
    }
    let roots: Vec<linalg::C64> = (0..3)
        .map(|k| linalg::C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0))
        .collect();
    let count = 3usize.pow(n.saturating_sub(1) as u32);
    Ok((0..count)
        .map(|mut code| {
            let mut u = CVector::from_element(n, linalg::ONE);
            for k in 1..n {
                u[k] = roots[code % 3];
                code /= 3;
            }
            u
        })
        .collect())
}

/// Separable decomposition of
/// `2·1 - 2·1 ⊗ ρ_B - ρ_A ⊗ 1 + |Ψ⟩⟨Ψ| = 2 ((1 Tr - I/2) ⊗ (1 Tr - I))(|Ψ⟩⟨Ψ|)`.
#[derive(Debug, Clone)]
pub struct EaDecomposition {
    pub certificate: SeparableCertificate,
    /// Squared Schmidt coefficients of `Ψ`.
    pub lambda: ProbVector,
    /// `A = 1 - 2 D_λ + |ψ⟩⟨ψ|` with `ψ = Σ_i √λ_i |i⟩`.
    pub a: CMatrix,
    pub a_psd_margin: f64,
    /// `1 - λ_i - λ_j + λ_i δ_ij`.
    pub remainder: Vec<Vec<f64>>,
}

pub fn ea_target(psi: &CVector, n: usize) -> Result<CMatrix> {
    linalg::check_unit(psi)?;
    let rho = projector(psi);
    let rho_a = partial_trace(&rho, (n, n), Side::First)?;
    let rho_b = partial_trace(&rho, (n, n), Side::Second)?;
    let id = identity(n);
    Ok(identity(n * n).scale(2.0) - kron(&id, &rho_b)?.scale(2.0) - kron(&rho_a, &id)? + rho)
}

pub fn ea_decomposition(psi: &CVector, n: usize) -> Result<EaDecomposition> {
    let target = ea_target(psi, n)?;
    let sd = schmidt(psi, (n, n))?;
    let lambda = sd.coefficients.clone();
    let l = lambda.as_slice();
    let ua = sd.left_unitary();
    let ub = sd.right_unitary();

    let sqrt_l = CVector::from_fn(n, |i, _| re(l[i].sqrt()));
    let mut a = identity(n) + projector(&sqrt_l);
    for i in 0..n {
        a[(i, i)] -= re(2.0 * l[i]);
    }
    let a_psd_margin = min_eigenvalue(&a)?;

    let rotate = |u: &CMatrix, m: &CMatrix| u * m * u.adjoint();
    let phases = flag_plus_eps_decomposition(n)?;
    let weight = 1.0 / phases.len() as f64;
    let mut pieces = Vec::with_capacity(phases.len() + n * n);
    for u in &phases {
        let conj = projector(&u.conjugate());
        pieces.push(Piece {
            kind: PieceKind::Product,
            weight,
            left: rotate(&ua, &projector(u)),
            right: rotate(&ub, &hadamard_product(&a, &conj)?),
        });
    }
    let mut remainder = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let c = 1.0 - l[i] - l[j] + if i == j { l[i] } else { 0.0 };
            remainder[i][j] = c;
            pieces.push(Piece {
                kind: PieceKind::Product,
                weight: c,
                left: projector(&ua.column(i).into_owned()),
                right: projector(&ub.column(j).into_owned()),
            });
        }
    }

    Ok(EaDecomposition {
        certificate: SeparableCertificate {
            target,
            cut: (n, n),
            twirl: None,
            pieces,
        },
        lambda,
        a,
        a_psd_margin,
        remainder,
    })
}
