//! Closed-form region membership with per-inequality slacks.
//!
//! Every region is closed: an inequality holds when its slack is at least
//! `-MEMBERSHIP_TOL`. Slack names spell out the inequality they measure.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::maps::{ChiParams, PhiParams};

mod noise;

pub use noise::{
    classify_depolarizing, classify_global_depolarizing, classify_local_product, global_threshold,
    local_symmetric_interval, prior_sufficient_bound, DepolarizingReport, GlobalNoiseReport,
    LocalNoiseReport,
};

pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Slack {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub slacks: Vec<Slack>,
}

impl Verdict {
    fn from_slacks(slacks: Vec<Slack>) -> Self {
        Verdict {
            holds: slacks.iter().all(|s| s.value >= -MEMBERSHIP_TOL),
            slacks,
        }
    }

    pub fn slack(&self, name: &str) -> Option<f64> {
        self.slacks.iter().find(|s| s.name == name).map(|s| s.value)
    }

    /// Smallest slack, or `+inf` if there are none.
    pub fn margin(&self) -> f64 {
        self.slacks
            .iter()
            .map(|s| s.value)
            .fold(f64::INFINITY, f64::min)
    }
}

fn slack(name: &'static str, value: f64) -> Slack {
    Slack { name, value }
}

/// Positivity of `χ[a,c]`: `a ≥ 0 ∧ 1 + a/n + c ≥ 0`, or
/// `-2 ≤ a < 0 ∧ 1 + a + c ≥ 0`.
pub fn chi_positive(p: &ChiParams) -> Verdict {
    let ChiParams { a, c, n } = *p;
    if a >= 0.0 {
        Verdict::from_slacks(vec![slack("1+a/n+c", 1.0 + a / n as f64 + c)])
    } else {
        Verdict::from_slacks(vec![slack("a+2", a + 2.0), slack("1+a+c", 1.0 + a + c)])
    }
}

/// Positivity of `Φ`: `α, β ≥ -1` and `χ[α+β, γ]` positive on `n = min(dA, dB)`.
pub fn phi_positive(p: &PhiParams) -> Verdict {
    let n = p.dims.n() as f64;
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    let mut slacks = vec![slack("1+alpha", 1.0 + a), slack("1+beta", 1.0 + b)];
    if a + b >= 0.0 {
        slacks.push(slack("1+(alpha+beta)/n+gamma", 1.0 + (a + b) / n + g));
    } else {
        slacks.push(slack("1+alpha+beta+gamma", 1.0 + a + b + g));
    }
    Verdict::from_slacks(slacks)
}

/// Complete positivity: nonnegative Choi spectrum.
pub fn phi_cp(p: &PhiParams) -> Verdict {
    let (da, db) = (p.dims.da as f64, p.dims.db as f64);
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    Verdict::from_slacks(vec![
        slack("alpha+1/dB", a + 1.0 / db),
        slack("beta+1/dA", b + 1.0 / da),
        slack(
            "1+dB*alpha+dA*beta+dA*dB*gamma",
            1.0 + db * a + da * b + da * db * g,
        ),
    ])
}

/// Complete copositivity: nonnegative spectrum of the partially transposed
/// Choi matrix.
pub fn phi_cocp(p: &PhiParams) -> Verdict {
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    Verdict::from_slacks(vec![
        slack("1+alpha+beta+gamma", 1.0 + a + b + g),
        slack("1+alpha-beta-gamma", 1.0 + a - b - g),
        slack("1-alpha+beta-gamma", 1.0 - a + b - g),
        slack("1-alpha-beta+gamma", 1.0 - a - b + g),
    ])
}

/// Entanglement breaking. For `dA ≤ dB`:
///
/// ```text
/// α ≥ -1/dB,  1 + dB α + dA β + dA dB γ ≥ 0,
/// 1 - α + β - γ ≥ 0,  1 + α - β - γ ≥ 0,  1 - α - β + γ ≥ 0,
/// (dA dB - 1)(dA β + 1) - (dB - dA)(α + dA γ) ≥ 0.
/// ```
///
/// For `dA > dB` the roles of `α` and `β` (and of the dimensions) are
/// exchanged in the first and last line. The last inequality is kept at
/// `dA = dB`, where it reduces to `β ≥ -1/d`.
pub fn phi_eb(p: &PhiParams) -> Verdict {
    let (dims, a, b, g) = if p.dims.da <= p.dims.db {
        (p.dims, p.alpha, p.beta, p.gamma)
    } else {
        (p.dims.swapped(), p.beta, p.alpha, p.gamma)
    };
    let (da, db) = (dims.da as f64, dims.db as f64);
    Verdict::from_slacks(vec![
        slack("alpha+1/dB", a + 1.0 / db),
        slack(
            "1+dB*alpha+dA*beta+dA*dB*gamma",
            1.0 + db * a + da * b + da * db * g,
        ),
        slack("1-alpha+beta-gamma", 1.0 - a + b - g),
        slack("1+alpha-beta-gamma", 1.0 + a - b - g),
        slack("1-alpha-beta+gamma", 1.0 - a - b + g),
        slack(
            "(dA*dB-1)(dA*beta+1)-(dB-dA)(alpha+dA*gamma)",
            (da * db - 1.0) * (da * b + 1.0) - (db - da) * (a + da * g),
        ),
    ])
}

/// Entanglement annihilation: positive and `γ ≤ α + β + 2`.
pub fn phi_ea(p: &PhiParams) -> Verdict {
    let mut v = phi_positive(p);
    v.slacks.push(slack(
        "alpha+beta+2-gamma",
        p.alpha + p.beta + 2.0 - p.gamma,
    ));
    Verdict::from_slacks(v.slacks)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub params: PhiParams,
    pub positive: bool,
    pub cp: bool,
    pub cocp: bool,
    pub eb: bool,
    /// Positive and PPT-inducing. This is equivalent to `ea`; PPT-inducing
    /// maps that are not positive are not characterized.
    pub ppt_inducing: bool,
    pub ea: bool,
    /// Slacks keyed by `property:inequality`.
    pub slacks: BTreeMap<String, f64>,
}

impl ClassificationReport {
    /// Verdicts in CSV column order: positive, cp, cocp, eb, ppt_inducing, ea.
    pub fn flags(&self) -> [bool; 6] {
        [
            self.positive,
            self.cp,
            self.cocp,
            self.eb,
            self.ppt_inducing,
            self.ea,
        ]
    }
}

pub fn classify(p: &PhiParams) -> ClassificationReport {
    let positive = phi_positive(p);
    let cp = phi_cp(p);
    let cocp = phi_cocp(p);
    let eb = phi_eb(p);
    let ea = phi_ea(p);
    let mut slacks = BTreeMap::new();
    for (prefix, v) in [
        ("positive", &positive),
        ("cp", &cp),
        ("cocp", &cocp),
        ("eb", &eb),
        ("ea", &ea),
    ] {
        for s in &v.slacks {
            slacks.insert(format!("{prefix}:{}", s.name), s.value);
        }
    }
    ClassificationReport {
        params: *p,
        positive: positive.holds,
        cp: cp.holds,
        cocp: cocp.holds,
        eb: eb.holds,
        ppt_inducing: ea.holds,
        ea: ea.holds,
        slacks,
    }
}
