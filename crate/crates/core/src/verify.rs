//! Named verification suites. Each suite is a list of checks with a measured
//! value, a tolerance and a pass flag; a run is deterministic for a fixed
//! seed whichever [`Execution`] strategy drives it.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::classify::{
    classify, classify_global_depolarizing, classify_local_product, global_threshold,
    local_symmetric_interval, phi_cocp, phi_cp, phi_ea, phi_eb, phi_positive,
    prior_sufficient_bound, Verdict,
};
use crate::error::{Error, Result};
use crate::exec::{stream_rng, Execution};
use crate::grid::{GridSpec, RegionGrid};
use crate::hadamard::{
    cocp_hadamard_product, geometric_inequality_slack, locc_hadamard, vandermonde_ranks,
    VandermondeSpec,
};
use crate::linalg::{
    gaussian_complex, hadamard_product, herm_spectrum, max_abs_diff, min_eigenvalue,
    partial_transpose, random_density, random_psd, random_pure, trace, Dims, Side, C64,
};
use crate::maps::{PhiParams, SuperOp};
use crate::oracle::{
    numeric_choi, oracle_choi_suite, oracle_ea_small, oracle_positive, simplex_fmax,
    witness_detect, OracleVerdict, DEFAULT_SAMPLES,
};
use crate::states::{
    ea_decomposition, indecomposable_witness, ppt_entangled_state, red_vertex, vertex_certificate,
    EbVertex,
};

/// Slack magnitude below which a grid point is excluded from agreement sweeps.
pub const EXCLUSION_BAND: f64 = 1e-3;

/// Dimension pairs for the analytic/oracle agreement sweeps.
pub const AGREEMENT_DIMS: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 3), (2, 6)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Positivity,
    Cp,
    Eb,
    Ea,
    Hadamard,
    Certificates,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = [
        "all",
        "positivity",
        "cp",
        "eb",
        "ea",
        "hadamard",
        "certificates",
    ];

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Positivity,
                Suite::Cp,
                Suite::Eb,
                Suite::Ea,
                Suite::Hadamard,
                Suite::Certificates,
            ],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            Suite::All => 0,
            Suite::Positivity => 1,
            Suite::Cp => 2,
            Suite::Eb => 3,
            Suite::Ea => 4,
            Suite::Hadamard => 5,
            Suite::Certificates => 6,
        };
        f.write_str(Suite::NAMES[i])
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "positivity" => Ok(Suite::Positivity),
            "cp" => Ok(Suite::Cp),
            "eb" => Ok(Suite::Eb),
            "ea" => Ok(Suite::Ea),
            "hadamard" => Ok(Suite::Hadamard),
            "certificates" => Ok(Suite::Certificates),
            other => Err(Error::InvalidSpec(format!(
                "unknown suite '{other}', expected one of {}",
                Suite::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    /// The quantity compared against `tolerance`; its meaning is given in
    /// `detail`.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn failure_json(&self) -> serde_json::Value {
        serde_json::json!({
            "suite": self.suite,
            "seed": self.seed,
            "failed": self.failures(),
        })
    }
}

pub fn run(suite: Suite, seed: u64, exec: Execution) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    for part in suite.parts() {
        let jobs: Vec<(&str, CheckFn)> = match part {
            Suite::Positivity => vec![
                ("region-lattice", region_lattice),
                ("oracle-agreement:positive", agreement_positive),
                ("geometric-inequality", geometric_inequality),
                ("simplex-maximum", simplex_maximum),
            ],
            Suite::Cp => vec![
                ("choi-spectrum", choi_spectrum),
                ("oracle-agreement:cp,cocp,eb", agreement_spectral),
            ],
            Suite::Eb => vec![
                ("ppt-gap", ppt_gap),
                ("indecomposability", indecomposability),
            ],
            Suite::Ea => vec![
                ("noise-thresholds", noise_thresholds),
                ("ea-oracle-small-dims", ea_oracle_small_dims),
            ],
            Suite::Hadamard => vec![
                ("locc-identity", locc_identity),
                ("cocp-closure", cocp_closure),
                ("vandermonde-ranks", vandermonde),
            ],
            Suite::Certificates => vec![
                ("vertex-certificates", vertex_certificates),
                ("ea-decompositions", ea_decompositions),
            ],
            Suite::All => unreachable!("expanded by Suite::parts"),
        };
        for (name, job) in jobs {
            let start = Instant::now();
            let outcome = job(seed, exec)?;
            checks.push(Check {
                suite: part,
                name: name.to_string(),
                passed: outcome.passed,
                value: outcome.value,
                tolerance: outcome.tolerance,
                detail: outcome.detail,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(VerifyReport {
        suite,
        seed,
        checks,
    })
}

type CheckFn = fn(u64, Execution) -> Result<Outcome>;

struct Outcome {
    passed: bool,
    value: f64,
    tolerance: f64,
    detail: String,
}

/// Passes when `value <= tolerance`.
fn at_most(value: f64, tolerance: f64, detail: String) -> Outcome {
    Outcome {
        passed: value <= tolerance,
        value,
        tolerance,
        detail,
    }
}

/// Passes when `value >= -tolerance`.
fn at_least_neg(value: f64, tolerance: f64, detail: String) -> Outcome {
    Outcome {
        passed: value >= -tolerance,
        value,
        tolerance,
        detail,
    }
}

fn flag(ok: bool, detail: String) -> Outcome {
    Outcome {
        passed: ok,
        value: if ok { 0.0 } else { 1.0 },
        tolerance: 0.0,
        detail,
    }
}

fn dims(da: usize, db: usize) -> Dims {
    Dims { da, db }
}

fn stream(seed: u64, tag: u64, k: usize) -> rand_chacha::ChaCha8Rng {
    stream_rng(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15), k as u64)
}

fn choi_spectrum(seed: u64, exec: Execution) -> Result<Outcome> {
    let diffs = exec
        .map_indexed(1000, |k| -> Result<f64> {
            let mut rng = stream(seed, 1, k);
            let d = dims(rng.random_range(2..=4), rng.random_range(2..=5));
            let p = PhiParams::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                d,
            );
            let numeric = herm_spectrum(&numeric_choi(&p)?)?;
            let closed = p.coefficients().choi_spectrum();
            if numeric.len() != closed.len() {
                return Ok(f64::INFINITY);
            }
            Ok(numeric
                .iter()
                .zip(&closed)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    Ok(at_most(
        worst,
        1e-10,
        "max |numeric - closed-form| over 1000 normalized Choi spectra".into(),
    ))
}

fn region_lattice(seed: u64, exec: Execution) -> Result<Outcome> {
    let violations: usize = exec
        .map_indexed(100_000, |k| {
            let mut rng = stream(seed, 2, k);
            let d = dims(rng.random_range(2..=5), rng.random_range(2..=5));
            let span = if k % 2 == 0 { 1.2 } else { 4.0 };
            let p = PhiParams::new(
                rng.random_range(-span..span),
                rng.random_range(-span..span),
                rng.random_range(-span..span),
                d,
            );
            let r = classify(&p);
            let mut bad = 0;
            if r.eb && !(r.cp && r.cocp) {
                bad += 1;
            }
            if r.cp && !r.positive {
                bad += 1;
            }
            let upper = p.gamma <= p.alpha + p.beta + 2.0 + crate::classify::MEMBERSHIP_TOL;
            if r.ea != (r.positive && upper) {
                bad += 1;
            }
            bad
        })
        .into_iter()
        .sum();
    Ok(at_most(
        violations as f64,
        0.0,
        "lattice violations on 1e5 random points".into(),
    ))
}

fn agreement_grid(d: Dims) -> Result<GridSpec> {
    GridSpec::cube(d, -1.25, 1.75, 11)
}

fn decided(v: &Verdict) -> bool {
    v.slacks.iter().all(|s| s.value.abs() >= EXCLUSION_BAND)
}

struct Agreement {
    compared: usize,
    mismatches: Vec<String>,
}

impl Agreement {
    fn new() -> Self {
        Agreement {
            compared: 0,
            mismatches: Vec::new(),
        }
    }

    fn record(&mut self, analytic: &Verdict, oracle: &OracleVerdict) {
        if !decided(analytic) {
            return;
        }
        self.compared += 1;
        if analytic.holds != oracle.holds() {
            let p = oracle.params;
            self.mismatches.push(format!(
                "{:?} at ({},{}) ({}, {}, {}): analytic {} oracle worst {:.3e}",
                oracle.property,
                p.dims.da,
                p.dims.db,
                p.alpha,
                p.beta,
                p.gamma,
                analytic.holds,
                oracle.worst
            ));
        }
    }

    fn outcome(self, what: &str) -> Outcome {
        let detail = match self.mismatches.first() {
            None => format!("{what}: {} decided points agree", self.compared),
            Some(m) => format!(
                "{what}: {} of {} decided points disagree, first: {m}",
                self.mismatches.len(),
                self.compared
            ),
        };
        at_most(self.mismatches.len() as f64, 0.0, detail)
    }
}

fn agreement_positive(seed: u64, exec: Execution) -> Result<Outcome> {
    let mut agreement = Agreement::new();
    for (da, db) in AGREEMENT_DIMS {
        let spec = agreement_grid(dims(da, db))?;
        let points: Vec<PhiParams> = (0..spec.cell_count()).map(|k| spec.params_at(k)).collect();
        let verdicts = exec
            .map_indexed(points.len(), |k| {
                oracle_positive(&points[k], DEFAULT_SAMPLES, seed, Execution::Sequential)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        for (p, v) in points.iter().zip(&verdicts) {
            agreement.record(&phi_positive(p), v);
        }
    }
    Ok(agreement.outcome("positivity oracle"))
}

fn agreement_spectral(_seed: u64, exec: Execution) -> Result<Outcome> {
    let mut agreement = Agreement::new();
    for (da, db) in AGREEMENT_DIMS {
        let spec = agreement_grid(dims(da, db))?;
        let points: Vec<PhiParams> = (0..spec.cell_count()).map(|k| spec.params_at(k)).collect();
        let verdicts = exec
            .map_indexed(points.len(), |k| oracle_choi_suite(&points[k]))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        for (p, [cp, cocp, eb]) in points.iter().zip(&verdicts) {
            agreement.record(&phi_cp(p), cp);
            agreement.record(&phi_cocp(p), cocp);
            agreement.record(&phi_eb(p), eb);
        }
    }
    Ok(agreement.outcome("spectral oracles"))
}

fn geometric_inequality(seed: u64, exec: Execution) -> Result<Outcome> {
    const CHUNKS: usize = 100;
    const PER_CHUNK: usize = 10_000;
    let worst = exec
        .map_indexed(CHUNKS, |k| {
            let mut rng = stream(seed, 3, k);
            let mut worst = f64::INFINITY;
            for _ in 0..PER_CHUNK {
                let n = rng.random_range(1..=8);
                let z: Vec<C64> = (0..n).map(|_| gaussian_complex(&mut rng)).collect();
                worst = worst.min(geometric_inequality_slack(&z));
            }
            worst
        })
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(at_least_neg(
        worst,
        1e-12,
        "smallest slack over 1e6 complex tuples with n <= 8".into(),
    ))
}

fn simplex_maximum(_seed: u64, _exec: Execution) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for a in [0.5, 1.0, 2.0, 5.0] {
        for n in 2..=4 {
            let expected = 1.0 / (1.0 + a / n as f64);
            worst = worst.max((simplex_fmax(a, n, 24) - expected).abs());
        }
    }
    Ok(at_most(
        worst,
        1e-6,
        "max |simplex_fmax - 1/(1+a/n)| for a in {0.5,1,2,5}, n in {2,3,4}".into(),
    ))
}

fn ppt_gap(_seed: u64, exec: Execution) -> Result<Outcome> {
    let d = dims(2, 6);
    let p = PhiParams::new(-1.0 / 6.0, -0.5, 2.0 / 3.0, d);
    let eb = phi_eb(&p);
    let line3 = eb
        .slack("(dA*dB-1)(dA*beta+1)-(dB-dA)(alpha+dA*gamma)")
        .unwrap_or(f64::NAN);
    let vertex_ok = phi_cp(&p).holds && phi_cocp(&p).holds && !eb.holds;
    let line3_err = (line3 + 14.0 / 3.0).abs();
    let red = red_vertex(d);
    let red_ok = (red.alpha - p.alpha).abs() < 1e-15
        && (red.beta - p.beta).abs() < 1e-15
        && (red.gamma - p.gamma).abs() < 1e-15;
    let spec = GridSpec::cube(dims(2, 2), -1.0, 2.0, 61)?;
    let square = RegionGrid::sweep(spec.clone(), exec).count(|c| c.ppt_not_eb());
    let mut wide = spec;
    wide.dims = d;
    let pyramid = RegionGrid::sweep(wide, exec).count(|c| c.ppt_not_eb());
    let ok = vertex_ok && red_ok && line3_err <= 1e-12 && square == 0 && pyramid > 0;
    Ok(Outcome {
        passed: ok,
        value: line3_err,
        tolerance: 1e-12,
        detail: format!(
            "(2,6) vertex cp&cocp&!eb={vertex_ok}, last EB inequality slack {line3}; \
             PPT-not-EB cells: {square} at (2,2), {pyramid} at (2,6)"
        ),
    })
}

fn indecomposability(_seed: u64, _exec: Execution) -> Result<Outcome> {
    let d = dims(2, 3);
    let state = ppt_entangled_state(d)?;
    let rho = state.normalized();
    let total = d.total();
    let min_eig = min_eigenvalue(&rho)?;
    let min_pt = min_eigenvalue(&partial_transpose(&rho, (total, total), Side::Second)?)?;
    let w = indecomposable_witness(d);
    let detected = witness_detect(&rho, |x| w.apply(x), total, total)?;
    let ok = min_eig >= -1e-12 && min_pt >= -1e-12 && detected < -1e-6;
    Ok(Outcome {
        passed: ok,
        value: detected,
        tolerance: -1e-6,
        detail: format!(
            "(2,3) state: min eigenvalue {min_eig:.3e}, min PT eigenvalue {min_pt:.3e}, \
             witness value {detected:.6e}"
        ),
    })
}

fn noise_thresholds(_seed: u64, _exec: Execution) -> Result<Outcome> {
    const EPS: f64 = 1e-9;
    let mut failures = Vec::new();
    for d in [2usize, 3] {
        let (lo, hi) = local_symmetric_interval(d);
        let ea = |q: f64| classify_local_product(q, q, d).ea;
        if !(ea(hi - EPS) && !ea(hi + EPS) && ea(lo + EPS) && !ea(lo - EPS)) {
            failures.push(format!("local d={d} does not flip at [{lo}, {hi}]"));
        }
    }
    if (local_symmetric_interval(2).1 - 1.0 / 3f64.sqrt()).abs() > 1e-15 {
        failures.push("d=2 upper endpoint is not 1/sqrt(3)".into());
    }
    let q = global_threshold(2);
    let g = |q: f64| classify_global_depolarizing(q, 2).ea;
    if (q - 1.0 / 3.0).abs() > 1e-15 || !g(q - 1e-12) || g(q + 1e-12) {
        failures.push(format!("global d=2 does not flip at {q}"));
    }
    for d in 2..=6 {
        let prior = prior_sufficient_bound(d);
        let hi = local_symmetric_interval(d).1;
        let inside = classify_local_product(prior, prior, d).ea;
        // the two bounds coincide at d = 2
        let gap_ok = if d == 2 {
            (prior - hi).abs() <= 1e-15
        } else {
            prior < hi
        };
        if !inside || !gap_ok {
            failures.push(format!("prior bound {prior} vs endpoint {hi} at d={d}"));
        }
    }
    Ok(flag(
        failures.is_empty(),
        if failures.is_empty() {
            "local and global thresholds flip at their closed forms".into()
        } else {
            failures.join("; ")
        },
    ))
}

fn ea_oracle_small_dims(seed: u64, exec: Execution) -> Result<Outcome> {
    let mut agreement = Agreement::new();
    for (da, db) in [(2, 2), (2, 3)] {
        let spec = agreement_grid(dims(da, db))?;
        let points: Vec<PhiParams> = (0..spec.cell_count())
            .map(|k| spec.params_at(k))
            .filter(|p| {
                let pos = phi_positive(p);
                pos.holds && decided(&pos)
            })
            .collect();
        let verdicts = exec
            .map_indexed(points.len(), |k| {
                oracle_ea_small(&points[k], DEFAULT_SAMPLES, seed, Execution::Sequential)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        for (p, v) in points.iter().zip(&verdicts) {
            agreement.record(&phi_ea(p), v);
        }
    }
    let confirm = oracle_ea_small(
        &PhiParams::new(1.0, 1.0, -2.0, dims(2, 2)),
        DEFAULT_SAMPLES,
        seed,
        exec,
    )?;
    let refute = oracle_ea_small(
        &PhiParams::new(0.0, 0.0, 2.5, dims(2, 3)),
        DEFAULT_SAMPLES,
        seed,
        exec,
    )?;
    if !confirm.holds() {
        agreement
            .mismatches
            .push("Phi[1,1,-2] on (2,2) not confirmed".into());
    }
    if refute.holds() {
        agreement
            .mismatches
            .push("Phi[0,0,2.5] on (2,3) not refuted".into());
    }
    Ok(agreement.outcome("exact EA oracle"))
}

fn locc_identity(seed: u64, exec: Execution) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (i, (da, db)) in [(2, 2), (2, 3)].into_iter().enumerate() {
        let residuals = exec
            .map_indexed(100, |k| -> Result<f64> {
                let mut rng = stream(seed, 4 + i as u64, k);
                let rho = random_density(da * db, &mut rng);
                let sigma = random_density(da * db, &mut rng);
                let via = locc_hadamard(&rho, &sigma, dims(da, db))?;
                Ok(max_abs_diff(&via, &hadamard_product(&rho, &sigma)?))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        worst = residuals.into_iter().fold(worst, f64::max);
    }
    Ok(at_most(
        worst,
        1e-12,
        "max residual of the local implementation over 100 pairs on 2x2 and 2x3".into(),
    ))
}

fn random_cocp<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<SuperOp> {
    let choi = random_psd(dim * dim, dim * dim, rng);
    let t = trace(&choi).re / dim as f64;
    let pt = partial_transpose(&choi.unscale(t), (dim, dim), Side::Second)?;
    SuperOp::from_choi(pt, dim)
}

fn cocp_closure(seed: u64, exec: Execution) -> Result<Outcome> {
    let margins = exec
        .map_indexed(100, |k| -> Result<f64> {
            let mut rng = stream(seed, 6, k);
            let dim = if k % 2 == 0 { 4 } else { 6 };
            let a = random_cocp(dim, &mut rng)?;
            let b = random_cocp(dim, &mut rng)?;
            let prod = cocp_hadamard_product(&a, &b)?;
            min_eigenvalue(&prod.choi_partial_transpose()?)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let worst = margins.into_iter().fold(f64::INFINITY, f64::min);
    Ok(at_least_neg(
        worst,
        1e-10,
        "smallest PT-Choi eigenvalue of 100 products of copositive maps".into(),
    ))
}

fn vandermonde(_seed: u64, _exec: Execution) -> Result<Outcome> {
    let mut failures = Vec::new();
    for ((n, r, s), expected) in [((6, 2, 3), 6), ((4, 2, 2), 4), ((5, 2, 3), 5)] {
        let ranks = vandermonde_ranks(&VandermondeSpec::new(n, r, s)?)?;
        if ranks.psi != r || ranks.phi != s || ranks.product != expected {
            failures.push(format!("(n,r,s)=({n},{r},{s}) gave {ranks:?}"));
        }
    }
    Ok(flag(
        failures.is_empty(),
        if failures.is_empty() {
            "product ranks 6, 4, 5 for (6,2,3), (4,2,2), (5,2,3)".into()
        } else {
            failures.join("; ")
        },
    ))
}

fn vertex_certificates(_seed: u64, _exec: Execution) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut weights_ok = true;
    for (da, db) in [(2, 6), (3, 3)] {
        for v in EbVertex::ALL {
            let cert = vertex_certificate(v, dims(da, db))?;
            let numeric = numeric_choi(&v.params(dims(da, db)))?;
            worst = worst
                .max(max_abs_diff(&cert.reconstruct()?, &numeric))
                .max(cert.residual()?);
            weights_ok &= cert.min_weight() >= 0.0 && cert.min_psd_margin()? >= -1e-12;
        }
    }
    Ok(Outcome {
        passed: worst <= 1e-12 && weights_ok,
        value: worst,
        tolerance: 1e-12,
        detail: format!(
            "max reconstruction error of 10 vertex certificates at (2,6) and (3,3); \
             weights and pieces PSD: {weights_ok}"
        ),
    })
}

fn ea_decompositions(seed: u64, exec: Execution) -> Result<Outcome> {
    let stats = exec
        .map_indexed(100, |k| -> Result<(f64, f64)> {
            let mut rng = stream(seed, 7, k);
            let psi = random_pure(9, &mut rng);
            let dec = ea_decomposition(&psi, 3)?;
            let remainder = dec
                .remainder
                .iter()
                .flatten()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let margin = dec
                .a_psd_margin
                .min(remainder)
                .min(dec.certificate.min_weight())
                .min(dec.certificate.min_psd_margin()?);
            Ok((dec.certificate.residual()?, margin))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let residual = stats.iter().map(|s| s.0).fold(0.0, f64::max);
    let margin = stats.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        passed: residual <= 1e-12 && margin >= -1e-12,
        value: residual,
        tolerance: 1e-12,
        detail: format!(
            "max residual over 100 Haar-random states on 3x3; smallest PSD margin {margin:.3e}"
        ),
    })
}
