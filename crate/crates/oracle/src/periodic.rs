//! The resonance relation `U v(n) = (-1)^m v(n+m)` for purely periodic
//! continued fractions, with `U = A_1^{-1} ... A_m^{-1}`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{OracleError, OracleResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceCheck {
    pub period: Vec<u64>,
    pub m: usize,
    /// `U` as `[[a, b], [c, d]]`, entries in decimal.
    pub u: [[String; 2]; 2],
    /// Indices `n = 0 ..= N - m` checked.
    pub checked: usize,
    /// Indices where the relation fails.
    pub failures: Vec<usize>,
    pub passed: bool,
}

type M2 = [[BigInt; 2]; 2];

fn mul(x: &M2, y: &M2) -> M2 {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn periodic_cf_resonance_check(period: &[u64], n_max: usize) -> OracleResult<ResonanceCheck> {
    let m = period.len();
    if m == 0 || period.contains(&0) {
        return Err(OracleError::InvalidInput(
            "period must be a nonempty list of positive quotients".into(),
        ));
    }
    if n_max < m {
        return Err(OracleError::InvalidInput(format!(
            "need N >= m, got N = {n_max}, m = {m}"
        )));
    }
    let mut u: M2 = [[1.into(), 0.into()], [0.into(), 1.into()]];
    for &a in period {
        let inv: M2 = [[0.into(), 1.into()], [1.into(), -BigInt::from(a)]];
        u = mul(&u, &inv);
    }
    // v(n) = (-p_n, q_n) from the recurrences, n = 0 ..= n_max
    let mut v: Vec<[BigInt; 2]> = Vec::with_capacity(n_max + 1);
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::from(0));
    let (mut p1, mut q1) = (BigInt::from(0), BigInt::from(1));
    v.push([-p1.clone(), q1.clone()]);
    for n in 1..=n_max {
        let a = BigInt::from(period[(n - 1) % m]);
        let p = &a * &p1 + &p0;
        let q = &a * &q1 + &q0;
        (p0, q0, p1, q1) = (p1, q1, p, q);
        v.push([-p1.clone(), q1.clone()]);
    }
    let sign = if m % 2 == 0 { BigInt::from(1) } else { BigInt::from(-1) };
    let mut failures = Vec::new();
    for n in 0..=(n_max - m) {
        let x = &v[n];
        let lhs = [&u[0][0] * &x[0] + &u[0][1] * &x[1], &u[1][0] * &x[0] + &u[1][1] * &x[1]];
        let rhs = [&sign * &v[n + m][0], &sign * &v[n + m][1]];
        if lhs != rhs {
            failures.push(n);
        }
    }
    Ok(ResonanceCheck {
        period: period.to_vec(),
        m,
        u: [
            [u[0][0].to_string(), u[0][1].to_string()],
            [u[1][0].to_string(), u[1][1].to_string()],
        ],
        checked: n_max - m + 1,
        passed: failures.is_empty(),
        failures,
    })
}
