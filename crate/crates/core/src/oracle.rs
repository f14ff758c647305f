//! Brute-force numerical checks of the analytic regions.
//!
//! Each oracle reports the worst value it found (a minimum eigenvalue) and the
//! input that produced it, so a verdict can be replayed. Sampling loops run
//! through [`Execution`] with one PRNG stream per sample; the reduction keeps
//! the first minimum in index order, so the verdict does not depend on the
//! strategy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{stream_rng, Execution};
use crate::linalg::{
    basis_vector, min_eigenvalue, partial_transpose, projector, random_pure, re, CMatrix, CVector,
    ProbVector, Side, C64,
};
use crate::maps::{apply_local, apply_on_first, choi_of, phi_apply, LocalMap, PhiParams};

/// Verdict tolerance: a property holds if the worst value is at least `-ORACLE_TOL`.
pub const ORACLE_TOL: f64 = 1e-9;

/// Number of Dirichlet samples used when none is specified.
pub const DEFAULT_SAMPLES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Property {
    Positive,
    Cp,
    Cocp,
    Eb,
    PptInducing,
    Ea,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMode {
    /// Output PPT is equivalent to separability (output space 2⊗2 or 2⊗3).
    Exact,
    /// Only a necessary condition is tested.
    NecessaryOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Witness {
    /// Input `Σ_i √λ_i |ii⟩`.
    Schmidt {
        lambda: Vec<f64>,
    },
    ChoiSpectrum,
    PartialTransposeSpectrum,
    /// Which complete-positivity test failed first: 0 for `Φ`, 1 for `TΦ`,
    /// 2 for the composition with `1 Tr - I/n` on the larger factor.
    EbTest {
        index: usize,
    },
    PureState {
        re: Vec<f64>,
        im: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleVerdict {
    pub property: Property,
    pub params: PhiParams,
    pub worst: f64,
    pub witness: Witness,
    pub samples: usize,
    pub seed: u64,
    pub mode: Option<OracleMode>,
    /// For positivity: the same minimum computed from the block reduction
    /// (`1 + α λ_j + β λ_i` off the diagonal, `χ[α+β, γ]` on it).
    pub reduced_minimum: Option<f64>,
}

impl OracleVerdict {
    pub fn holds(&self) -> bool {
        self.worst >= -ORACLE_TOL
    }

    /// Recomputes the worst value from the recorded witness.
    pub fn replay(&self) -> Result<f64> {
        let p = &self.params;
        match (&self.witness, self.property) {
            (Witness::Schmidt { lambda }, _) => {
                positivity_value(p, &ProbVector::new(lambda.clone())?)
            }
            (Witness::ChoiSpectrum, _) => min_eigenvalue(&numeric_choi(p)?),
            (Witness::PartialTransposeSpectrum, _) => {
                let d = p.dims.total();
                min_eigenvalue(&partial_transpose(&numeric_choi(p)?, (d, d), Side::Second)?)
            }
            (Witness::EbTest { index }, _) => {
                let tests = eb_tests(p)?;
                tests.get(*index).copied().ok_or_else(|| {
                    Error::InvalidSpec(format!("no entanglement-breaking test {index}"))
                })
            }
            (Witness::PureState { re, im }, property) => {
                let v = CVector::from_iterator(
                    re.len(),
                    re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)),
                );
                match property {
                    Property::Ea => ea_value(p, &v),
                    _ => ppt_value(p, &v),
                }
            }
        }
    }
}

/// Normalized Choi matrix of `Φ` assembled from [`phi_apply`] on matrix units.
pub fn numeric_choi(p: &PhiParams) -> Result<CMatrix> {
    choi_of(p.dims.total(), |x| phi_apply(p, x))
}

fn schmidt_input(p: &PhiParams, lambda: &ProbVector) -> CVector {
    let (da, db) = p.dims.pair();
    let mut v = CVector::zeros(da * db);
    for (i, l) in lambda.as_slice().iter().enumerate() {
        v[i * db + i] = re(l.sqrt());
    }
    v
}

fn positivity_value(p: &PhiParams, lambda: &ProbVector) -> Result<f64> {
    let psi = schmidt_input(p, lambda);
    min_eigenvalue(&phi_apply(p, &projector(&psi))?)
}

/// Minimum eigenvalue of `Φ(|Ψ_λ⟩⟨Ψ_λ|)` from its block structure.
fn reduced_value(p: &PhiParams, lambda: &ProbVector) -> Result<f64> {
    let (da, db) = p.dims.pair();
    let l = lambda.as_slice();
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let mut worst = f64::INFINITY;
    for i in 0..da {
        for j in 0..db {
            if i != j || i >= l.len() {
                worst = worst.min(1.0 + p.alpha * at(l, j) + p.beta * at(l, i));
            }
        }
    }
    let n = l.len();
    let sqrt_l = CVector::from_fn(n, |i, _| re(l[i].sqrt()));
    let mut chi = CMatrix::identity(n, n) + projector(&sqrt_l).scale(p.gamma);
    for i in 0..n {
        chi[(i, i)] += re((p.alpha + p.beta) * l[i]);
    }
    Ok(worst.min(min_eigenvalue(&chi)?))
}

/// Deterministic probability vectors: uniform, vertices and uniform pairs.
pub fn structured_lambdas(n: usize) -> Vec<ProbVector> {
    let mut out = vec![ProbVector::uniform(n)];
    out.extend((0..n).map(|k| ProbVector::vertex(n, k)));
    for i in 0..n {
        for j in i + 1..n {
            let mut w = vec![0.0; n];
            w[i] = 0.5;
            w[j] = 0.5;
            out.push(ProbVector::new(w).expect("pair weights sum to one"));
        }
    }
    out
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Positivity through Schmidt-form inputs: the structured probability
/// vectors plus `samples` flat-Dirichlet draws.
pub fn oracle_positive(
    p: &PhiParams,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<OracleVerdict> {
    let n = p.dims.n();
    let mut lambdas = structured_lambdas(n);
    let fixed = lambdas.len();
    lambdas.extend(exec.map_indexed(samples, |k| {
        ProbVector::sample_flat(n, &mut stream_rng(seed, k as u64))
    }));
    let values = exec
        .map_indexed(lambdas.len(), |k| positivity_value(p, &lambdas[k]))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let reduced = exec
        .map_indexed(lambdas.len(), |k| reduced_value(p, &lambdas[k]))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let best = argmin(&values);
    Ok(OracleVerdict {
        property: Property::Positive,
        params: *p,
        worst: values[best],
        witness: Witness::Schmidt {
            lambda: lambdas[best].as_slice().to_vec(),
        },
        samples: samples + fixed,
        seed,
        mode: None,
        reduced_minimum: Some(reduced.iter().copied().fold(f64::INFINITY, f64::min)),
    })
}

fn spectral_verdict(
    p: &PhiParams,
    property: Property,
    witness: Witness,
    worst: f64,
) -> OracleVerdict {
    OracleVerdict {
        property,
        params: *p,
        worst,
        witness,
        samples: 1,
        seed: 0,
        mode: None,
        reduced_minimum: None,
    }
}

/// Smallest eigenvalue of the Choi matrix.
pub fn oracle_cp(p: &PhiParams) -> Result<OracleVerdict> {
    let worst = min_eigenvalue(&numeric_choi(p)?)?;
    Ok(spectral_verdict(
        p,
        Property::Cp,
        Witness::ChoiSpectrum,
        worst,
    ))
}

/// Smallest eigenvalue of the partially transposed Choi matrix.
pub fn oracle_cocp(p: &PhiParams) -> Result<OracleVerdict> {
    let d = p.dims.total();
    let pt = partial_transpose(&numeric_choi(p)?, (d, d), Side::Second)?;
    let worst = min_eigenvalue(&pt)?;
    Ok(spectral_verdict(
        p,
        Property::Cocp,
        Witness::PartialTransposeSpectrum,
        worst,
    ))
}

/// Minimum Choi eigenvalues of `Φ`, `TΦ` and, for unequal dimensions, of
/// `Φ` composed with `1 Tr - I/n` on the larger factor.
fn eb_tests(p: &PhiParams) -> Result<Vec<f64>> {
    let d = p.dims.total();
    let choi = numeric_choi(p)?;
    let mut tests = vec![
        min_eigenvalue(&choi)?,
        min_eigenvalue(&partial_transpose(&choi, (d, d), Side::Second)?)?,
    ];
    let (da, db) = p.dims.pair();
    if da != db {
        let n = p.dims.n();
        let side = if da < db { Side::Second } else { Side::First };
        let local = LocalMap::new(1.0, -1.0 / n as f64);
        let composed = choi_of(d, |x| apply_local(local, side, &phi_apply(p, x)?, p.dims))?;
        tests.push(min_eigenvalue(&composed)?);
    }
    Ok(tests)
}

pub fn oracle_eb(p: &PhiParams) -> Result<OracleVerdict> {
    let tests = eb_tests(p)?;
    let index = argmin(&tests);
    Ok(spectral_verdict(
        p,
        Property::Eb,
        Witness::EbTest { index },
        tests[index],
    ))
}

/// CP, coCP and entanglement-breaking verdicts from one Choi matrix.
pub fn oracle_choi_suite(p: &PhiParams) -> Result<[OracleVerdict; 3]> {
    let tests = eb_tests(p)?;
    let index = argmin(&tests);
    Ok([
        spectral_verdict(p, Property::Cp, Witness::ChoiSpectrum, tests[0]),
        spectral_verdict(
            p,
            Property::Cocp,
            Witness::PartialTransposeSpectrum,
            tests[1],
        ),
        spectral_verdict(p, Property::Eb, Witness::EbTest { index }, tests[index]),
    ])
}

fn ppt_value(p: &PhiParams, psi: &CVector) -> Result<f64> {
    let out = phi_apply(p, &projector(psi))?;
    min_eigenvalue(&partial_transpose(&out, p.dims.pair(), Side::Second)?)
}

fn ea_value(p: &PhiParams, psi: &CVector) -> Result<f64> {
    let out = phi_apply(p, &projector(psi))?;
    let pt = partial_transpose(&out, p.dims.pair(), Side::Second)?;
    Ok(min_eigenvalue(&out)?.min(min_eigenvalue(&pt)?))
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn two_term_state(p: &PhiParams) -> CVector {
    let db = p.dims.db;
    let d = p.dims.total();
    (basis_vector(d, 0) + basis_vector(d, db + 1)) * re(std::f64::consts::FRAC_1_SQRT_2)
}

fn pure_witness(v: &CVector) -> Witness {
    Witness::PureState {
        re: v.iter().map(|z| z.re).collect(),
        im: v.iter().map(|z| z.im).collect(),
    }
}

fn pure_state_search<F>(
    p: &PhiParams,
    samples: usize,
    seed: u64,
    exec: Execution,
    value: F,
) -> Result<(f64, CVector, usize)>
where
    F: Fn(&PhiParams, &CVector) -> Result<f64> + Sync + Send,
{
    let d = p.dims.total();
    let mut states = vec![two_term_state(p)];
    states.extend(exec.map_indexed(samples, |k| random_pure(d, &mut stream_rng(seed, k as u64))));
    let values = exec
        .map_indexed(states.len(), |k| value(p, &states[k]))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let best = argmin(&values);
    Ok((values[best], states.swap_remove(best), samples + 1))
}

/// Smallest partial-transpose eigenvalue of `Φ(|Ψ⟩⟨Ψ|)` over Haar samples
/// and the two-term Schmidt state.
pub fn oracle_ppt_inducing(
    p: &PhiParams,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<OracleVerdict> {
    let (worst, state, used) = pure_state_search(p, samples, seed, exec, ppt_value)?;
    Ok(OracleVerdict {
        property: Property::PptInducing,
        params: *p,
        worst,
        witness: pure_witness(&state),
        samples: used,
        seed,
        mode: Some(OracleMode::NecessaryOnly),
        reduced_minimum: None,
    })
}

/// Entanglement annihilation on pure inputs: the worst of the output's
/// smallest eigenvalue and its partial-transpose eigenvalue. Exact on
/// 2⊗2 and 2⊗3, a necessary condition elsewhere.
pub fn oracle_ea_small(
    p: &PhiParams,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<OracleVerdict> {
    let mode = if p.dims.total() <= 6 {
        OracleMode::Exact
    } else {
        OracleMode::NecessaryOnly
    };
    let (worst, state, used) = pure_state_search(p, samples, seed, exec, ea_value)?;
    Ok(OracleVerdict {
        property: Property::Ea,
        params: *p,
        worst,
        witness: pure_witness(&state),
        samples: used,
        seed,
        mode: Some(mode),
        reduced_minimum: None,
    })
}

/// Smallest eigenvalue of `(map ⊗ I)(state)` for a state on `d_map ⊗ d_rest`.
pub fn witness_detect<F>(state: &CMatrix, map: F, d_map: usize, d_rest: usize) -> Result<f64>
where
    F: Fn(&CMatrix) -> Result<CMatrix>,
{
    min_eigenvalue(&apply_on_first(map, state, d_map, d_rest)?)
}

/// `f(λ) = Σ_i λ_i / (1 + a λ_i)`.
pub fn simplex_objective(a: f64, lambda: &[f64]) -> f64 {
    lambda.iter().map(|l| l / (1.0 + a * l)).sum()
}

/// Maximum of [`simplex_objective`] over the probability simplex: exhaustive
/// search on the grid with spacing `1/resolution`, refined by pairwise mass
/// transfers with shrinking steps.
pub fn simplex_fmax(a: f64, n: usize, resolution: usize) -> f64 {
    let resolution = resolution.max(1);
    let mut best = vec![0.0; n];
    best[0] = 1.0;
    let mut best_value = simplex_objective(a, &best);
    let mut counts = vec![0usize; n];
    grid_search(
        a,
        resolution,
        0,
        resolution,
        &mut counts,
        &mut best,
        &mut best_value,
    );

    let mut step = 1.0 / resolution as f64;
    while step > 1e-13 {
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j || best[j] < step {
                        continue;
                    }
                    let mut trial = best.clone();
                    trial[i] += step;
                    trial[j] -= step;
                    let v = simplex_objective(a, &trial);
                    if v > best_value {
                        best = trial;
                        best_value = v;
                        improved = true;
                    }
                }
            }
        }
        step /= 2.0;
    }
    best_value
}

fn grid_search(
    a: f64,
    resolution: usize,
    pos: usize,
    remaining: usize,
    counts: &mut Vec<usize>,
    best: &mut Vec<f64>,
    best_value: &mut f64,
) {
    let n = counts.len();
    if pos == n - 1 {
        counts[pos] = remaining;
        let lambda: Vec<f64> = counts
            .iter()
            .map(|&c| c as f64 / resolution as f64)
            .collect();
        let v = simplex_objective(a, &lambda);
        if v > *best_value {
            *best_value = v;
            *best = lambda;
        }
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        grid_search(
            a,
            resolution,
            pos + 1,
            remaining - c,
            counts,
            best,
            best_value,
        );
    }
}
