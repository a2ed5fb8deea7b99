//! The formal inverse of `Y + Z U(Y)^b` and the calculus around it: the
//! v-recursion, the w-family with its derivative-monomial expansion, the
//! vanishing sum, and the closed form.

use std::collections::BTreeMap;

use num::{One, Zero};
use thiserror::Error;

use crate::algebra::{binomial, factorial, rat_int, MultiPoly, Rational, Var};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum InverseError {
    #[error("parameter range violated: {0}")]
    BadParams(String),
    #[error("U power {0} would be negative; closed form restricted to the polynomial range")]
    NegativeUPower(i64),
}

/// Truncated formal inverse: `I(Y, Z) = sum a_k(Y) Z^k` with
/// `I(Y + Z U(Y)^b, Z) = Y mod Z^{N+1}`.
#[derive(Clone, Debug)]
pub struct InverseSeries {
    pub b: u32,
    pub order: i64,
    pub coeffs: Vec<MultiPoly>,
}

impl InverseSeries {
    pub fn as_poly(&self) -> MultiPoly {
        let table = self.coeffs[0].table();
        let mut out = MultiPoly::zero(table);
        for (k, c) in self.coeffs.iter().enumerate() {
            let zk = MultiPoly::monomial(table, &[(Var::Z, k as i64)], Rational::one()).unwrap();
            out = &out + &(c * &zk);
        }
        out
    }
}

fn assert_y_poly(u: &MultiPoly) {
    assert!(
        !u.uses_var(Var::X) && !u.uses_var(Var::Z),
        "U must be a polynomial in Y over R"
    );
}

/// Z-adic fixed-point iteration `I <- Y - Z U(I)^b`, truncated at `Z^N`;
/// gains one order per pass, so it stabilizes within `N + 1` iterations.
pub fn formal_inverse(u: &MultiPoly, b: u32, order: i64) -> InverseSeries {
    assert!(b >= 1 && order >= 0);
    assert_y_poly(u);
    let table = u.table();
    let y = MultiPoly::var(table, Var::Y);
    let z = MultiPoly::var(table, Var::Z);
    let mut inv = y.clone();
    for _ in 0..=order {
        let ui = u
            .substitute_trunc_z(Var::Y, &inv, order)
            .expect("Y substitution");
        let next = &y - &z.mul_trunc_z(&ui.pow_trunc_z(b as u64, order), order);
        if next == inv {
            break;
        }
        inv = next;
    }
    let coeffs = (0..=order).map(|k| inv.coeff_of(Var::Z, k)).collect();
    InverseSeries { b, order, coeffs }
}

/// `v_0 = U`, `v_m = -sum_{j=1}^m U^{bj}/j! * v_{m-j}^{(j)}`, computed by the
/// recursion (the series route is the independent oracle).
pub fn v_sequence(u: &MultiPoly, b: u32, order: i64) -> Vec<MultiPoly> {
    assert!(b >= 1 && order >= 0);
    assert_y_poly(u);
    let table = u.table();
    let mut u_pow_b: Vec<MultiPoly> = vec![MultiPoly::one(table)];
    let ub = u.pow(b as u64);
    let mut vs = vec![u.clone()];
    for m in 1..=order {
        while (u_pow_b.len() as i64) <= m {
            let next = u_pow_b.last().unwrap() * &ub;
            u_pow_b.push(next);
        }
        let mut sum = MultiPoly::zero(table);
        let mut fact = Rational::one();
        for j in 1..=m {
            fact *= rat_int(j);
            let deriv = vs[(m - j) as usize]
                .nth_derivative(Var::Y, j as u32)
                .expect("Y is not Laurent");
            sum = &sum + &(&u_pow_b[j as usize] * &deriv).scale(&fact.recip());
        }
        vs.push(-&sum);
    }
    vs
}

/// Composes `U` with the inverse series and collects the `Z`-coefficients.
/// Independent oracle for [`v_sequence`].
pub fn u_of_inverse(inv: &InverseSeries, u: &MultiPoly) -> Vec<MultiPoly> {
    assert_y_poly(u);
    let composed = u
        .substitute_trunc_z(Var::Y, &inv.as_poly(), inv.order)
        .expect("Y substitution");
    (0..=inv.order)
        .map(|k| composed.coeff_of(Var::Z, k))
        .collect()
}

/// `w_{0,l} = 1/(l+1)`, `w_{n,l} = (l-n+2) U' w_{n-1,l} + U w_{n-1,l}'`.
pub fn w_recursive(n: u32, lambda: i64, u: &MultiPoly) -> MultiPoly {
    assert_y_poly(u);
    let table = u.table();
    let du = u.derivative(Var::Y).expect("Y is not Laurent");
    let mut w = MultiPoly::constant(table, Rational::new(1.into(), (lambda + 1).into()));
    for step in 1..=n {
        let scale = rat_int(lambda - step as i64 + 2);
        let dw = w.derivative(Var::Y).expect("Y is not Laurent");
        w = &du.scale(&scale).mul_checked(&w).unwrap() + &(u * &dw);
    }
    w
}

/// Coefficient table of the derivative-monomial expansion
/// `w_{n,l} = sum q_(k) prod_j (U^(j))^{k_j}` over multi-indices in `I_n`.
#[derive(Clone, Debug)]
pub struct DerivBasisCoeffs {
    pub n: u32,
    pub lambda: i64,
    pub table: BTreeMap<Vec<u32>, Rational>,
}

impl DerivBasisCoeffs {
    /// Every key satisfies `sum k_j = sum j k_j = n`.
    pub fn keys_in_index_set(&self) -> bool {
        self.table.keys().all(|k| {
            let s: u32 = k.iter().sum();
            let w: u32 = k.iter().enumerate().map(|(j, v)| j as u32 * v).sum();
            s == self.n && w == self.n
        })
    }

    pub fn all_strictly_positive(&self) -> bool {
        self.table.values().all(|q| *q > Rational::zero())
    }

    /// `sum q_(k) prod_j (U^(j))^{k_j}`.
    pub fn expansion(&self, u: &MultiPoly) -> MultiPoly {
        let table = u.table();
        let a = table.a() as usize;
        let mut derivs = vec![u.clone()];
        for _ in 0..a {
            let next = derivs.last().unwrap().derivative(Var::Y).unwrap();
            derivs.push(next);
        }
        let mut out = MultiPoly::zero(table);
        for (key, q) in &self.table {
            let mut prod = MultiPoly::constant(table, q.clone());
            for (j, &k) in key.iter().enumerate() {
                if k > 0 {
                    prod = &prod * &derivs[j].pow(k as u64);
                }
            }
            out = &out + &prod;
        }
        out
    }
}

/// Builds the multi-index table by the shift recursion: each level-(n-1)
/// entry `(k) -> q` contributes `(lambda-n+2) q` at `(k)+e_1` and `k_j q` at
/// `(k)+e_0-e_j+e_{j+1}`. Zero values are kept (the positivity claim only
/// covers `1 <= n <= lambda+1`).
pub fn w_basis(n: u32, lambda: i64, a: u32) -> DerivBasisCoeffs {
    assert!(n >= 1);
    let len = a as usize + 1;
    let mut cur: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    cur.insert(vec![0; len], Rational::new(1.into(), (lambda + 1).into()));
    for step in 1..=n {
        let shift_coeff = rat_int(lambda - step as i64 + 2);
        let mut next: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        let mut bump = |key: Vec<u32>, q: Rational| {
            *next.entry(key).or_insert_with(Rational::zero) += q;
        };
        for (key, q) in &cur {
            let mut k1 = key.clone();
            k1[1] += 1;
            bump(k1, q * &shift_coeff);
            for j in 0..a as usize {
                if key[j] > 0 {
                    let mut kj = key.clone();
                    kj[0] += 1;
                    kj[j] -= 1;
                    kj[j + 1] += 1;
                    bump(kj, q * &rat_int(key[j] as i64));
                }
            }
        }
        cur = next;
    }
    DerivBasisCoeffs {
        n,
        lambda,
        table: cur,
    }
}

/// `S(n,k,m,r) = sum_{j=0}^m (-1)^j C(m,j) w_{k,(m+r-j)b}^{(n)}`; the lemma
/// says this is identically zero.
pub fn lemma_s(
    n: u32,
    k: u32,
    m: u32,
    r: u32,
    u: &MultiPoly,
    b: u32,
) -> Result<MultiPoly, InverseError> {
    if k < 1 || k > m {
        return Err(InverseError::BadParams(format!("need 1 <= k <= m, got k={k}, m={m}")));
    }
    if b < 1 {
        return Err(InverseError::BadParams("need b >= 1".into()));
    }
    let table = u.table();
    let mut sum = MultiPoly::zero(table);
    for j in 0..=m {
        let lambda = ((m + r - j) * b) as i64;
        let w = w_recursive(k, lambda, u)
            .nth_derivative(Var::Y, n)
            .expect("Y is not Laurent");
        let mut coeff = binomial(m as u64, j as u64);
        if j % 2 == 1 {
            coeff = -coeff;
        }
        sum = &sum + &w.scale(&coeff);
    }
    Ok(sum)
}

/// Closed form `v_m^{(n)} = ((-1)^m / m!) U^{bm-m-n+1} w_{m+n,bm}`, rejected
/// outside the polynomial range `bm - m - n + 1 >= 0`.
pub fn v_closed(m: u32, n: u32, u: &MultiPoly, b: u32) -> Result<MultiPoly, InverseError> {
    let e = b as i64 * m as i64 - m as i64 - n as i64 + 1;
    if e < 0 {
        return Err(InverseError::NegativeUPower(e));
    }
    let w = w_recursive(m + n, (b * m) as i64, u);
    let mut prefactor = factorial(m as u64).recip();
    if m % 2 == 1 {
        prefactor = -prefactor;
    }
    Ok((&u.pow(e as u64) * &w).scale(&prefactor))
}
