//! Hadamard (Schur) products in the canonical basis: the local stochastic
//! implementation on bipartite states, copositive closure of maps, and
//! Schmidt-rank bookkeeping.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    hadamard_product, kron, permute_subsystems, schmidt_singular_values, CMatrix, CVector, Dims,
    C64,
};
use crate::maps::SuperOp;

/// Relative singular-value cutoff for [`schmidt_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// `Π⁰_{AA'} ⊗ Π⁰_{BB'} (ρ_{AB} ⊗ σ_{A'B'}) Π⁰_{AA'} ⊗ Π⁰_{BB'}` with
/// `Π⁰ = Σ_i |ii⟩⟨ii|`, returned on `A A' B B'`.
pub fn locc_projected(rho: &CMatrix, sigma: &CMatrix, dims: Dims) -> Result<CMatrix> {
    let (da, db) = dims.pair();
    let d = da * db;
    for (name, m) in [("rho", rho), ("sigma", sigma)] {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{name} is {}x{}, expected {d}x{d}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    let joint = permute_subsystems(&kron(rho, sigma)?, &[da, db, da, db], &[0, 2, 1, 3])?;
    // index ((a da + a') db + b) db + b'
    let keep = |idx: usize| {
        let bp = idx % db;
        let b = (idx / db) % db;
        let ap = (idx / (db * db)) % da;
        let a = idx / (db * db * da);
        ap == a && bp == b
    };
    Ok(CMatrix::from_fn(d * d, d * d, |i, j| {
        if keep(i) && keep(j) {
            joint[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// `ρ ∘ σ`, obtained by projecting `ρ ⊗ σ` with local `Π⁰` and compressing
/// `|ii⟩ → |i⟩` on both sides.
pub fn locc_hadamard(rho: &CMatrix, sigma: &CMatrix, dims: Dims) -> Result<CMatrix> {
    let (da, db) = dims.pair();
    let projected = locc_projected(rho, sigma, dims)?;
    let embed = |a: usize, b: usize| ((a * da + a) * db + b) * db + b;
    Ok(CMatrix::from_fn(da * db, da * db, |i, j| {
        projected[(embed(i / db, i % db), embed(j / db, j % db))]
    }))
}

/// Hadamard product of two maps in the canonical operator basis,
/// `(φ1 ∘ φ2)(|i⟩⟨j|) = φ1(|i⟩⟨j|) ∘ φ2(|i⟩⟨j|)`. With normalized Choi
/// matrices, `R = d (R1 ∘ R2)`.
pub fn cocp_hadamard_product(phi1: &SuperOp, phi2: &SuperOp) -> Result<SuperOp> {
    if phi1.dim != phi2.dim {
        return Err(Error::DimensionMismatch(format!(
            "maps on dimensions {} and {}",
            phi1.dim, phi2.dim
        )));
    }
    let choi = hadamard_product(&phi1.choi, &phi2.choi)?.scale(phi1.dim as f64);
    Ok(SuperOp {
        choi,
        dim: phi1.dim,
        dims: phi1.dims,
    })
}

/// Number of Schmidt coefficients above `tol` times the largest one.
pub fn schmidt_rank(v: &CVector, dims: (usize, usize), tol: f64) -> Result<usize> {
    let s = schmidt_singular_values(v, dims)?;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&x| x > tol * top).count())
}

/// Parameters of the Vandermonde construction saturating
/// `SR(ψ ∘ φ) = min(n, r s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VandermondeSpec {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    /// Order of the root of unity, at least `max(n, r s)`.
    pub order: usize,
}

impl VandermondeSpec {
    pub fn new(n: usize, r: usize, s: usize) -> Result<Self> {
        Self::with_order(n, r, s, n.max(r * s))
    }

    pub fn with_order(n: usize, r: usize, s: usize, order: usize) -> Result<Self> {
        if n == 0 || r == 0 || s == 0 || r > n || s > n {
            return Err(Error::InvalidSpec(format!(
                "need 1 <= r, s <= n, got n={n}, r={r}, s={s}"
            )));
        }
        if order < n.max(r * s) {
            return Err(Error::InvalidSpec(format!(
                "root order {order} below max(n, r s) = {}",
                n.max(r * s)
            )));
        }
        Ok(VandermondeSpec { n, r, s, order })
    }
}

/// Normalized `ψ ∝ Σ_{i<r} |α_i⟩|ᾱ_i⟩` and `φ ∝ Σ_{j<s} |β_j⟩|β̄_j⟩` with
/// `|α_i⟩ = Σ_l ω^{il} |l⟩`, `|β_j⟩ = Σ_l ω^{jrl} |l⟩`.
pub fn vandermonde_states(spec: &VandermondeSpec) -> (CVector, CVector) {
    let n = spec.n;
    let omega =
        |k: usize| C64::from_polar(1.0, 2.0 * PI * (k % spec.order) as f64 / spec.order as f64);
    let build = |count: usize, step: usize| {
        let mut v = CVector::zeros(n * n);
        for i in 0..count {
            let local = CVector::from_fn(n, |l, _| omega(i * step * l));
            v += local.kronecker(&local.conjugate());
        }
        let norm = v.norm();
        v / C64::new(norm, 0.0)
    };
    (build(spec.r, 1), build(spec.s, spec.r))
}

/// Elementwise product of two vectors on the same space.
pub fn vector_hadamard(a: &CVector, b: &CVector) -> Result<CVector> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.component_mul(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VandermondeRanks {
    pub psi: usize,
    pub phi: usize,
    pub product: usize,
}

pub fn vandermonde_ranks(spec: &VandermondeSpec) -> Result<VandermondeRanks> {
    let (psi, phi) = vandermonde_states(spec);
    let prod = vector_hadamard(&psi, &phi)?;
    let dims = (spec.n, spec.n);
    Ok(VandermondeRanks {
        psi: schmidt_rank(&psi, dims, DEFAULT_RANK_TOL)?,
        phi: schmidt_rank(&phi, dims, DEFAULT_RANK_TOL)?,
        product: schmidt_rank(&prod, dims, DEFAULT_RANK_TOL)?,
    })
}

/// `½((Σ|z|)² + |Σz|²) - Σ|z|²`, nonnegative for every complex tuple.
pub fn geometric_inequality_slack(z: &[C64]) -> f64 {
    let sum_abs: f64 = z.iter().map(|x| x.norm()).sum();
    let abs_sum = z.iter().sum::<C64>().norm();
    let sum_sq: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    0.5 * (sum_abs * sum_abs + abs_sum * abs_sum) - sum_sq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::stream_rng;
    use crate::linalg::{
        basis_vector, gaussian_complex, identity, max_abs_diff, min_eigenvalue, partial_transpose,
        random_density, random_pure, trace, Side,
    };
    use crate::maps::{chi_apply, choi_of, ChiParams, LocalMap};
    use crate::states::epsilon;
    use rand::Rng;

    fn dims(da: usize, db: usize) -> Dims {
        Dims::new(da, db).unwrap()
    }

    #[test]
    fn locc_identity_on_random_states() {
        let mut rng = stream_rng(30, 0);
        for (da, db) in [(2, 2), (2, 3)] {
            for _ in 0..10 {
                let rho = random_density(da * db, &mut rng);
                let sigma = random_density(da * db, &mut rng);
                let via_locc = locc_hadamard(&rho, &sigma, dims(da, db)).unwrap();
                let direct = hadamard_product(&rho, &sigma).unwrap();
                assert!(max_abs_diff(&via_locc, &direct) < 1e-12);
                assert!(trace(&via_locc).re <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn locc_diagonal_case() {
        let rho = CMatrix::from_diagonal(&CVector::from_vec(
            [0.1, 0.2, 0.3, 0.4].map(|x| C64::new(x, 0.0)).to_vec(),
        ));
        let out = locc_hadamard(&rho, &rho, dims(2, 2)).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(
            [0.01, 0.04, 0.09, 0.16].map(|x| C64::new(x, 0.0)).to_vec(),
        ));
        assert!(max_abs_diff(&out, &expected) < 1e-15);
    }

    #[test]
    fn locc_rejects_mismatched_inputs() {
        assert!(locc_hadamard(&identity(4), &identity(6), dims(2, 2)).is_err());
    }

    #[test]
    fn separable_inputs_give_ppt_products() {
        let mut rng = stream_rng(31, 0);
        let mixture = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut m = CMatrix::zeros(6, 6);
            for _ in 0..4 {
                let a = random_density(2, rng);
                let b = random_density(3, rng);
                m += kron(&a, &b).unwrap().scale(rng.random::<f64>());
            }
            m
        };
        for _ in 0..10 {
            let out = locc_hadamard(&mixture(&mut rng), &mixture(&mut rng), dims(2, 3)).unwrap();
            let pt = partial_transpose(&out, (2, 3), Side::Second).unwrap();
            assert!(min_eigenvalue(&pt).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn hadamard_square_of_trace_minus_identity() {
        for n in 2..=4 {
            let m = SuperOp::from_choi(LocalMap::new(1.0, -1.0).choi(n), n).unwrap();
            let square = cocp_hadamard_product(&m, &m).unwrap();
            let chi = choi_of(n, |x| chi_apply(&ChiParams::new(-2.0, 1.0, n), x)).unwrap();
            assert!(max_abs_diff(&square.choi, &chi) < 1e-14);
        }
    }

    #[test]
    fn trace_map_times_identity_is_diagonal_projection() {
        let n = 3;
        let trace_map = SuperOp::from_choi(LocalMap::new(1.0, 0.0).choi(n), n).unwrap();
        let id = SuperOp::from_choi(LocalMap::identity().choi(n), n).unwrap();
        let out = cocp_hadamard_product(&trace_map, &id).unwrap();
        let diag = choi_of(n, |x| {
            Ok(chi_apply(&ChiParams::new(1.0, 0.0, n), x)? - identity(n) * trace(x))
        })
        .unwrap();
        assert!(max_abs_diff(&out.choi, &diag) < 1e-15);
    }

    #[test]
    fn copositive_closure_on_random_pairs() {
        let mut rng = stream_rng(32, 0);
        let n = 3;
        let random_cocp = |rng: &mut rand_chacha::ChaCha8Rng| {
            let r = random_density(n * n, rng);
            let choi = partial_transpose(&r, (n, n), Side::Second).unwrap();
            SuperOp::from_choi(choi, n).unwrap()
        };
        for _ in 0..10 {
            let out =
                cocp_hadamard_product(&random_cocp(&mut rng), &random_cocp(&mut rng)).unwrap();
            assert!(out.min_pt_eigenvalue().unwrap() >= -1e-10);
        }
    }

    #[test]
    fn schmidt_rank_examples() {
        assert_eq!(
            schmidt_rank(&basis_vector(9, 4), (3, 3), DEFAULT_RANK_TOL).unwrap(),
            1
        );
        for n in 2..=5 {
            let rank = schmidt_rank(&epsilon(n).vector, (n, n), DEFAULT_RANK_TOL).unwrap();
            assert_eq!(rank, n);
        }
    }

    #[test]
    fn vandermonde_examples() {
        let cases = [
            (VandermondeSpec::with_order(6, 2, 3, 12).unwrap(), (2, 3, 6)),
            (VandermondeSpec::new(6, 2, 3).unwrap(), (2, 3, 6)),
            (VandermondeSpec::new(4, 1, 1).unwrap(), (1, 1, 1)),
            (VandermondeSpec::with_order(4, 2, 2, 8).unwrap(), (2, 2, 4)),
            (VandermondeSpec::new(5, 2, 3).unwrap(), (2, 3, 5)),
        ];
        for (spec, (r, s, p)) in cases {
            let ranks = vandermonde_ranks(&spec).unwrap();
            assert_eq!((ranks.psi, ranks.phi, ranks.product), (r, s, p), "{spec:?}");
        }
        assert!(VandermondeSpec::new(3, 4, 1).is_err());
        assert!(VandermondeSpec::with_order(4, 2, 3, 5).is_err());
    }

    #[test]
    fn schmidt_rank_is_submultiplicative() {
        let mut rng = stream_rng(33, 0);
        for n in 2..=4 {
            for _ in 0..10 {
                // low-rank pure states: sum of k random product vectors
                let low_rank = |k: usize, rng: &mut rand_chacha::ChaCha8Rng| {
                    let mut v = CVector::zeros(n * n);
                    for _ in 0..k {
                        v += random_pure(n, rng).kronecker(&random_pure(n, rng));
                    }
                    let norm = v.norm();
                    v / C64::new(norm, 0.0)
                };
                let (k1, k2) = (rng.random_range(1..=n), rng.random_range(1..=n));
                let a = low_rank(k1, &mut rng);
                let b = low_rank(k2, &mut rng);
                let ra = schmidt_rank(&a, (n, n), DEFAULT_RANK_TOL).unwrap();
                let rb = schmidt_rank(&b, (n, n), DEFAULT_RANK_TOL).unwrap();
                let prod = vector_hadamard(&a, &b).unwrap();
                let rp = schmidt_rank(&prod, (n, n), DEFAULT_RANK_TOL).unwrap();
                assert!(rp <= ra * rb);
            }
        }
    }

    #[test]
    fn geometric_inequality_samples() {
        let mut rng = stream_rng(34, 0);
        for _ in 0..10_000 {
            let n = rng.random_range(1..=8);
            let z: Vec<C64> = (0..n).map(|_| gaussian_complex(&mut rng)).collect();
            assert!(geometric_inequality_slack(&z) >= -1e-12);
        }
        let z = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
        assert!(geometric_inequality_slack(&z).abs() < 1e-15);
    }
}
