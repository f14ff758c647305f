//! Brute-force reference implementations written directly from the
//! definitions, sharing no code with the library beyond the matrix types.

#![allow(dead_code)]

use bidepo::linalg::{CMatrix, CVector, C64};
use nalgebra::DMatrix;

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `Φ[α,β,γ](X)` on `dA ⊗ dB`, index `a db + b`, by explicit loops.
pub fn phi(alpha: f64, beta: f64, gamma: f64, da: usize, db: usize, x: &CMatrix) -> CMatrix {
    let d = da * db;
    let mut tr = c(0.0);
    for i in 0..d {
        tr += x[(i, i)];
    }
    // Tr_A X on B and Tr_B X on A
    let mut on_b = CMatrix::zeros(db, db);
    let mut on_a = CMatrix::zeros(da, da);
    for a in 0..da {
        for b in 0..db {
            for b2 in 0..db {
                on_b[(b, b2)] += x[(a * db + b, a * db + b2)];
            }
        }
    }
    for a in 0..da {
        for a2 in 0..da {
            for b in 0..db {
                on_a[(a, a2)] += x[(a * db + b, a2 * db + b)];
            }
        }
    }
    CMatrix::from_fn(d, d, |i, j| {
        let (a, b) = (i / db, i % db);
        let (a2, b2) = (j / db, j % db);
        let mut v = x[(i, j)] * gamma;
        if i == j {
            v += tr;
        }
        if a == a2 {
            v += on_b[(b, b2)] * alpha;
        }
        if b == b2 {
            v += on_a[(a, a2)] * beta;
        }
        v
    })
}

/// Normalized Choi matrix on `S ⊗ S'` with the reference copy second:
/// `R[(I,I'),(J,J')] = map(|I'⟩⟨J'|)[I,J] / d`.
pub fn choi<F: Fn(&CMatrix) -> CMatrix>(d: usize, map: F) -> CMatrix {
    let mut r = CMatrix::zeros(d * d, d * d);
    for ip in 0..d {
        for jp in 0..d {
            let mut unit = CMatrix::zeros(d, d);
            unit[(ip, jp)] = c(1.0);
            let out = map(&unit);
            for i in 0..d {
                for j in 0..d {
                    r[(i * d + ip, j * d + jp)] = out[(i, j)] / c(d as f64);
                }
            }
        }
    }
    r
}

pub fn phi_choi(alpha: f64, beta: f64, gamma: f64, da: usize, db: usize) -> CMatrix {
    choi(da * db, |x| phi(alpha, beta, gamma, da, db, x))
}

/// Transpose of the second factor of `d1 ⊗ d2`.
pub fn pt_second(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1 * d2, d1 * d2, |i, j| {
        let (a, b) = (i / d2, i % d2);
        let (a2, b2) = (j / d2, j % d2);
        m[(a * d2 + b2, a2 * d2 + b)]
    })
}

pub fn trace_first(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d2, d2, |b, b2| {
        (0..d1).map(|a| m[(a * d2 + b, a * d2 + b2)]).sum()
    })
}

pub fn trace_second(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1, d1, |a, a2| {
        (0..d2).map(|b| m[(a * d2 + b, a2 * d2 + b)]).sum()
    })
}

/// Sorted eigenvalues of a Hermitian matrix through the real symmetric
/// embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `m` doubled.
pub fn dense_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let h = (m + m.adjoint()) * c(0.5);
    let embed = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut v: Vec<f64> = embed.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().step_by(2).collect()
}

/// Sorted eigenvalues, diagonalizing each block of the sparsity pattern
/// separately.
pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in 0..n {
            if m[(i, j)] != c(0.0) {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = root(&mut parent, i);
        blocks.entry(r).or_default().push(i);
    }
    let mut v = Vec::with_capacity(n);
    for idx in blocks.values() {
        let sub = CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
        v.extend(dense_eigenvalues(&sub));
    }
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eig(m: &CMatrix) -> f64 {
    eigenvalues(m)[0]
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Number of singular values of the `d1 × d2` coefficient matrix above
/// `tol` times the largest.
pub fn schmidt_rank(v: &CVector, d1: usize, d2: usize, tol: f64) -> usize {
    let m = CMatrix::from_fn(d1, d2, |i, j| v[i * d2 + j]);
    let s = m.singular_values();
    let top = s.iter().copied().fold(0.0, f64::max);
    s.iter().filter(|&&x| x > tol * top).count()
}
