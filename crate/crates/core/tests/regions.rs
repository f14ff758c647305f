mod common;

use bidepo::classify::{classify, phi_cocp, phi_cp, phi_eb, phi_positive};
use bidepo::linalg::{CMatrix, Side};
use bidepo::maps::compose_local;
use bidepo::{Dims, PhiParams};
use common::*;
use proptest::prelude::*;

fn dims_strategy() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=4, 2usize..=4)
}

fn params() -> impl Strategy<Value = (f64, f64, f64, usize, usize)> {
    (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, dims_strategy())
        .prop_map(|(a, b, g, (da, db))| (a, b, g, da, db))
}

/// Smallest eigenvalue of `Φ(|Ψ⟩⟨Ψ|)` over Schmidt vectors on a fine grid of
/// two-term and uniform coefficient vectors plus all vertices.
fn positivity_floor(a: f64, b: f64, g: f64, da: usize, db: usize) -> f64 {
    let n = da.min(db);
    let mut lambdas: Vec<Vec<f64>> = vec![vec![1.0 / n as f64; n]];
    for k in 0..=20 {
        let t = k as f64 / 20.0;
        let mut l = vec![0.0; n];
        l[0] = t;
        l[1] = 1.0 - t;
        lambdas.push(l);
    }
    let mut worst = f64::INFINITY;
    for l in lambdas {
        let mut psi = bidepo::CVector::zeros(da * db);
        for (i, x) in l.iter().enumerate() {
            psi[i * db + i] = c(x.sqrt());
        }
        worst = worst.min(min_eig(&phi(a, b, g, da, db, &outer(&psi))));
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_choi_matches_definition((a, b, g, da, db) in params()) {
        let p = PhiParams::new(a, b, g, Dims::new(da, db).unwrap());
        let closed = p.coefficients().choi();
        prop_assert!(max_diff(&closed, &phi_choi(a, b, g, da, db)) < 1e-12);
    }

    #[test]
    fn cp_and_cocp_match_brute_force((a, b, g, da, db) in params()) {
        let p = PhiParams::new(a, b, g, Dims::new(da, db).unwrap());
        let r = phi_choi(a, b, g, da, db);
        let d = da * db;
        let cp = phi_cp(&p);
        let cocp = phi_cocp(&p);
        prop_assume!(cp.margin().abs() > 1e-9 && cocp.margin().abs() > 1e-9);
        prop_assert_eq!(cp.holds, min_eig(&r) >= 0.0);
        prop_assert_eq!(cocp.holds, min_eig(&pt_second(&r, d, d)) >= 0.0);
    }

    #[test]
    fn equal_dims_eb_is_cp_and_cocp(a in -1.0f64..1.5, b in -1.0f64..1.5, g in -1.0f64..1.5, d in 2usize..=5) {
        let p = PhiParams::new(a, b, g, Dims::new(d, d).unwrap());
        prop_assert_eq!(phi_eb(&p).holds, phi_cp(&p).holds && phi_cocp(&p).holds);
    }

    #[test]
    fn positive_region_is_detected((a, b, g, da, db) in params()) {
        let p = PhiParams::new(a, b, g, Dims::new(da, db).unwrap());
        let floor = positivity_floor(a, b, g, da, db);
        if phi_positive(&p).holds {
            prop_assert!(floor >= -1e-9, "floor {floor}");
        }
    }

    #[test]
    fn nesting(a in -3.0f64..3.0, b in -3.0f64..3.0, g in -3.0f64..3.0, (da, db) in dims_strategy()) {
        let r = classify(&PhiParams::new(a, b, g, Dims::new(da, db).unwrap()));
        prop_assert!(!r.eb || (r.cp && r.cocp));
        prop_assert!(!r.cp || r.positive);
        prop_assert!(!r.ea || r.positive);
        prop_assert!(!r.eb || r.ea);
    }

    #[test]
    fn local_composition_matches_definition(
        (a, b, g, da, db) in params(),
        u in -1.0f64..1.0,
        v in -1.0f64..1.0,
        second in any::<bool>(),
    ) {
        let side = if second { Side::Second } else { Side::First };
        let p = PhiParams::new(a, b, g, Dims::new(da, db).unwrap());
        let Ok((k, q)) = compose_local(&p, side, u, v) else {
            return Ok(());
        };
        prop_assume!(k.abs() > 1e-6);
        let d = da * db;
        let composed = choi(d, |x| {
            let y = phi(a, b, g, da, db, x);
            let reduced = if second { trace_second(&y, da, db) } else { trace_first(&y, da, db) };
            CMatrix::from_fn(d, d, |i, j| {
                let mut z = y[(i, j)] * v;
                let same = if second { i % db == j % db } else { i / db == j / db };
                if same {
                    z += if second { reduced[(i / db, j / db)] } else { reduced[(i % db, j % db)] } * u;
                }
                z
            })
        });
        let rebuilt = phi_choi(q.alpha, q.beta, q.gamma, da, db) * c(k);
        prop_assert!(max_diff(&composed, &rebuilt) < 1e-10);
    }
}

#[test]
fn named_points() {
    let d = Dims::new(2, 6).unwrap();
    let r = classify(&PhiParams::new(1.0, 1.0, 1.0, d));
    assert!(r.eb);
    let r = classify(&PhiParams::new(-1.0 / 6.0, -0.5, 2.0 / 3.0, d));
    assert!(r.cp && r.cocp && !r.eb);
    // four-digit rounding puts alpha below -1/dB
    let r = classify(&PhiParams::new(-0.1667, -0.5, 0.6667, d));
    assert!(!r.cp && r.cocp && !r.eb);
    let r = classify(&PhiParams::new(0.0, 0.0, 0.0, d));
    assert_eq!(r.flags(), [true; 6]);
}
