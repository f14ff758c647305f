//! Depolarizing noise: the single-system map `Δ_λ = λ I + (1-λ) 1 Tr / d`,
//! local products `Δ_{q1} ⊗ Δ_{q2}` and global noise on `d ⊗ d`.

use serde::Serialize;

use super::{slack, Verdict, MEMBERSHIP_TOL};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepolarizingReport {
    pub lambda: f64,
    pub d: usize,
    pub positive: bool,
    pub cp: bool,
    pub cocp: bool,
    pub eb: bool,
    pub slacks: Vec<super::Slack>,
}

/// Interval tests for `Δ_λ`: positive on `[-1/(d-1), 1]`, CP on
/// `[-1/(d²-1), 1]`, coCP on `[-1/(d-1), 1/(d+1)]`, EB iff CP and coCP.
pub fn classify_depolarizing(lambda: f64, d: usize) -> DepolarizingReport {
    let df = d as f64;
    let lower_pos = slack("lambda+1/(d-1)", lambda + 1.0 / (df - 1.0));
    let lower_cp = slack("lambda+1/(d^2-1)", lambda + 1.0 / (df * df - 1.0));
    let upper = slack("1-lambda", 1.0 - lambda);
    let upper_cocp = slack("1/(d+1)-lambda", 1.0 / (df + 1.0) - lambda);
    let positive = Verdict::from_slacks(vec![lower_pos.clone(), upper.clone()]);
    let cp = Verdict::from_slacks(vec![lower_cp.clone(), upper.clone()]);
    let cocp = Verdict::from_slacks(vec![lower_pos.clone(), upper_cocp.clone()]);
    DepolarizingReport {
        lambda,
        d,
        positive: positive.holds,
        cp: cp.holds,
        cocp: cocp.holds,
        eb: cp.holds && cocp.holds,
        slacks: vec![lower_pos, lower_cp, upper, upper_cocp],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalNoiseReport {
    pub q1: f64,
    pub q2: f64,
    pub d: usize,
    pub positive: bool,
    pub ea: bool,
    pub slacks: Vec<super::Slack>,
}

/// `Δ_{q1} ⊗ Δ_{q2}` on `d ⊗ d`.
///
/// Positive iff both `q` lie in `[-1/(d-1), 1]` and
/// `(d²-1) q1 q2 + 1 ≥ 0`; entanglement annihilating iff in addition
/// `(d²+2d-2) q1 q2 ≤ 2 + (d-2)(q1+q2)`.
pub fn classify_local_product(q1: f64, q2: f64, d: usize) -> LocalNoiseReport {
    let df = d as f64;
    let lo = -1.0 / (df - 1.0);
    let positivity = vec![
        slack("q1+1/(d-1)", q1 - lo),
        slack("1-q1", 1.0 - q1),
        slack("q2+1/(d-1)", q2 - lo),
        slack("1-q2", 1.0 - q2),
        slack("(d^2-1)q1q2+1", (df * df - 1.0) * q1 * q2 + 1.0),
    ];
    let positive = Verdict::from_slacks(positivity.clone());
    let annihilation = slack(
        "2+(d-2)(q1+q2)-(d^2+2d-2)q1q2",
        2.0 + (df - 2.0) * (q1 + q2) - (df * df + 2.0 * df - 2.0) * q1 * q2,
    );
    let ea = positive.holds && annihilation.value >= -MEMBERSHIP_TOL;
    let mut slacks = positivity;
    slacks.push(annihilation);
    LocalNoiseReport {
        q1,
        q2,
        d,
        positive: positive.holds,
        ea,
        slacks,
    }
}

/// Endpoints `(-(√3-1)/(d+1-√3), (1+√3)/(d+1+√3))` of the symmetric
/// annihilation interval `q1 = q2 = q`.
pub fn local_symmetric_interval(d: usize) -> (f64, f64) {
    let df = d as f64;
    let s3 = 3f64.sqrt();
    (-(s3 - 1.0) / (df + 1.0 - s3), (1.0 + s3) / (df + 1.0 + s3))
}

/// Earlier sufficient bound for the symmetric case,
/// `q ≤ (d - 2 + d √(2d/(d+1))) / ((d-1)(d+2))`.
pub fn prior_sufficient_bound(d: usize) -> f64 {
    let df = d as f64;
    (df - 2.0 + df * (2.0 * df / (df + 1.0)).sqrt()) / ((df - 1.0) * (df + 2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalNoiseReport {
    pub q: f64,
    pub d: usize,
    pub positive: bool,
    pub ea: bool,
    pub slacks: Vec<super::Slack>,
}

/// `q = 2/(d²+2)`.
pub fn global_threshold(d: usize) -> f64 {
    2.0 / ((d * d) as f64 + 2.0)
}

/// `Δ^{AB}_q = q I + (1-q) 1 Tr/d²` on `d ⊗ d`, which equals
/// `(1-q)/d² · Φ[0, 0, d² q/(1-q)]` for `q ≠ 1`. Positive on
/// `[-1/(d²-1), 1]`; annihilating iff `2 - (d²+2) q ≥ 0` there.
pub fn classify_global_depolarizing(q: f64, d: usize) -> GlobalNoiseReport {
    let d2 = (d * d) as f64;
    let positivity = vec![
        slack("q+1/(d^2-1)", q + 1.0 / (d2 - 1.0)),
        slack("1-q", 1.0 - q),
    ];
    let positive = Verdict::from_slacks(positivity.clone());
    let annihilation = slack("2-(d^2+2)q", 2.0 - (d2 + 2.0) * q);
    let ea = positive.holds && annihilation.value >= -MEMBERSHIP_TOL;
    let mut slacks = positivity;
    slacks.push(annihilation);
    GlobalNoiseReport {
        q,
        d,
        positive: positive.holds,
        ea,
        slacks,
    }
}
