//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use fell_core::conv::AlgebraElement;
use fell_core::ktheory::{IntMatrix, SnfResult};
use fell_core::spaces::{self, BaseKey, BasePoint, SpaceModel};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Every shipped model, by name.
pub fn models() -> Vec<(&'static str, Arc<SpaceModel>)> {
    vec![
        ("aab-ab", Arc::new(spaces::solenoid_aab_ab(false))),
        (
            "aab-ab with section",
            Arc::new(spaces::solenoid_aab_ab(true)),
        ),
        ("broken heart", Arc::new(spaces::broken_heart())),
        ("broken heart wedge", Arc::new(spaces::broken_heart_wedge())),
        ("twisted sphere", Arc::new(spaces::twisted_sphere(8))),
        (
            "pinch",
            Arc::new(spaces::pinch(&[0.2, 0.5, 0.7], 3).unwrap()),
        ),
    ]
}

/// Determinant by cofactor-free Bareiss elimination in `i128`. Exact for the
/// small matrices used here.
pub fn det_i128(a: &[Vec<i128>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m = a.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

pub fn to_i128(a: &IntMatrix) -> Vec<Vec<i128>> {
    a.to_i64_rows()
        .expect("small entries")
        .into_iter()
        .map(|r| r.into_iter().map(i128::from).collect())
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Determinantal divisors `d_k = gcd of all k×k minors`, for `k = 1..` up
/// to the rank. Invariant factors are `d_k / d_{k-1}`.
pub fn invariant_factors_by_minors(a: &IntMatrix) -> Vec<BigInt> {
    let m = to_i128(a);
    let (r, c) = (a.rows(), a.cols());
    let mut divisors = vec![1i128];
    for k in 1..=r.min(c) {
        let mut g = 0i128;
        'outer: for rows in combinations(r, k) {
            for cols in combinations(c, k) {
                let sub: Vec<Vec<i128>> = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| m[i][j]).collect())
                    .collect();
                g = g.gcd(&det_i128(&sub));
                if g == 1 {
                    break 'outer;
                }
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    divisors
        .windows(2)
        .map(|w| BigInt::from(w[1] / w[0]))
        .collect()
}

fn det_big(a: &IntMatrix) -> BigInt {
    let n = a.rows();
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)].clone()).collect())
        .collect();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// All defining properties of a Smith form, checked exactly.
pub fn snf_postconditions(a: &IntMatrix, r: &SnfResult) -> Result<(), String> {
    if &(&r.u * a) * &r.v != r.s {
        return Err("U A V != S".into());
    }
    if det_big(&r.u).abs() != BigInt::one() || det_big(&r.v).abs() != BigInt::one() {
        return Err("U or V is not unimodular".into());
    }
    if !r.s.is_diagonal() {
        return Err("S is not diagonal".into());
    }
    let d: Vec<BigInt> = (0..a.rows().min(a.cols()))
        .map(|i| r.s[(i, i)].clone())
        .collect();
    let nz = d.iter().take_while(|x| !x.is_zero()).count();
    if d[nz..].iter().any(|x| !x.is_zero()) {
        return Err("zero diagonal entry before a nonzero one".into());
    }
    if d[..nz].iter().any(|x| !x.is_positive()) {
        return Err("negative invariant factor".into());
    }
    if d[..nz].windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
        return Err("divisibility chain broken".into());
    }
    Ok(())
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let entries = (0..rows * cols)
        .map(|_| BigInt::from(rng.random_range(-bound..=bound)))
        .collect();
    IntMatrix::new(rows, cols, entries).unwrap()
}

/// A product of random elementary integer operations.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = BigInt::from(rng.random_range(-3i64..=3));
        for col in 0..n {
            let add = &c * &m[(j, col)];
            m[(i, col)] += add;
        }
        if rng.random_bool(0.3) {
            for col in 0..n {
                m[(i, col)] = -m[(i, col)].clone();
            }
        }
    }
    m
}

/// A random grid element over `points`, together with its raw matrices.
pub fn random_grid(
    model: &Arc<SpaceModel>,
    points: &[BasePoint],
    rng: &mut ChaCha8Rng,
) -> (AlgebraElement, HashMap<BaseKey, DMatrix<Complex64>>) {
    let mut raw = HashMap::new();
    let f = AlgebraElement::grid_from_fn(model.clone(), points, |o| {
        let n = o.len();
        let m = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        raw.insert(o.base.key(), m.clone());
        m
    })
    .unwrap();
    (f, raw)
}

/// `Σ_z f(x, z) g(z, y)` written out entry by entry.
pub fn naive_product(f: &DMatrix<Complex64>, g: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = f.nrows();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                s += f[(i, k)] * g[(k, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// `f*(x, y) = conj f(y, x)` written out entry by entry.
pub fn naive_adjoint(f: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = f.nrows();
    DMatrix::from_fn(n, n, |i, j| f[(j, i)].conj())
}

pub fn max_gap(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
