//! Sparse multivariate polynomial arithmetic over exact rationals.
//!
//! The variable set is fixed per ring: `X, Y, Z, u_a, ..., u_0` where `a` is
//! the degree parameter of `U(Y) = u_0 + u_1 Y + ... + u_a Y^a`. The variable
//! `u_a` is always a Laurent variable (negative exponents allowed); `Z` can be
//! flagged Laurent on top of that. The canonical term order is graded-lex,
//! descending, with priority `X > Y > Z > u_a > ... > u_0`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;
pub type Integer = BigInt;

/// Shorthand for small rational constants.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(Integer::from(n), Integer::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from(Integer::from(n))
}

/// `base^e` for a signed exponent; `base` must be nonzero when `e < 0`.
pub fn rat_pow(base: &Rational, e: i64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    let mut acc = Rational::one();
    let mut b = base.clone();
    let mut n = e.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &b;
        }
        n >>= 1;
        if n > 0 {
            b = &b * &b;
        }
    }
    if e < 0 {
        assert!(!acc.is_zero(), "negative power of zero");
        acc = acc.recip();
    }
    acc
}

pub fn factorial(n: u64) -> Rational {
    let mut f = Integer::one();
    for k in 2..=n {
        f *= Integer::from(k);
    }
    Rational::from(f)
}

pub fn binomial(n: u64, k: u64) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut num = Integer::one();
    let mut den = Integer::one();
    for i in 0..k {
        num *= Integer::from(n - i);
        den *= Integer::from(i + 1);
    }
    Rational::new(num, den)
}

/// Exact rational `m`-th root, if one exists.
pub fn rational_root(r: &Rational, m: u32) -> Option<Rational> {
    assert!(m >= 1);
    if m == 1 {
        return Some(r.clone());
    }
    if r.is_zero() {
        return Some(Rational::zero());
    }
    if r.is_negative() && m % 2 == 0 {
        return None;
    }
    let int_root = |x: &Integer| -> Option<Integer> {
        let mag = x.abs();
        let root = mag.nth_root(m);
        if num::pow::pow(root.clone(), m as usize) == mag {
            Some(if x.is_negative() { -root } else { root })
        } else {
            None
        }
    };
    let n = int_root(r.numer())?;
    let d = int_root(r.denom())?;
    Some(Rational::new(n, d))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Var {
    X,
    Y,
    Z,
    U(u32),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "X"),
            Var::Y => write!(f, "Y"),
            Var::Z => write!(f, "Z"),
            Var::U(j) => write!(f, "u{j}"),
        }
    }
}

/// Fixed, totally ordered variable list with explicit Laurent flags.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VarTable {
    a: u32,
    laurent_z: bool,
}

impl VarTable {
    pub fn new(a: u32) -> Self {
        assert!(a >= 1, "degree parameter a must be >= 1");
        VarTable { a, laurent_z: false }
    }

    pub fn with_laurent_z(mut self) -> Self {
        self.laurent_z = true;
        self
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn laurent_z(&self) -> bool {
        self.laurent_z
    }

    pub fn nvars(&self) -> usize {
        self.a as usize + 4
    }

    /// Slot in the exponent vector; slot 0 is the highest-priority variable.
    pub fn slot(&self, v: Var) -> usize {
        match v {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
            Var::U(j) => {
                assert!(j <= self.a, "variable u{j} not in ring (a = {})", self.a);
                3 + (self.a - j) as usize
            }
        }
    }

    pub fn var_at(&self, slot: usize) -> Var {
        match slot {
            0 => Var::X,
            1 => Var::Y,
            2 => Var::Z,
            s => Var::U(self.a - (s as u32 - 3)),
        }
    }

    pub fn is_laurent(&self, v: Var) -> bool {
        v == Var::U(self.a) || (v == Var::Z && self.laurent_z)
    }
}

/// Exponent vector in table slot order. Graded-lex: compare total degree,
/// then lexicographically (higher exponent on a higher-priority slot wins).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub(crate) Vec<i64>);

impl Mono {
    fn unit(n: usize) -> Self {
        Mono(vec![0; n])
    }

    fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("ring mismatch between operands")]
    RingMismatch,
    #[error("negative exponent on non-Laurent variable {0}")]
    NegativeExponent(String),
    #[error("derivative across a negative exponent of {0}")]
    DerivativeAcrossNegative(String),
    #[error("substitution into a negative exponent of {0}")]
    SubstituteNegative(String),
    #[error("specialization value for {0} must be nonzero")]
    ZeroSpecialization(String),
    #[error("expected {expected} specialization values, got {got}")]
    BadSpecializationLength { expected: usize, got: usize },
}

/// Sparse exact-rational polynomial; zero is the empty term map.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    table: VarTable,
    terms: BTreeMap<Mono, Rational>,
}

impl MultiPoly {
    pub fn zero(table: &VarTable) -> Self {
        MultiPoly {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(table: &VarTable) -> Self {
        Self::constant(table, Rational::one())
    }

    pub fn constant(table: &VarTable, c: Rational) -> Self {
        let mut p = Self::zero(table);
        if !c.is_zero() {
            p.terms.insert(Mono::unit(table.nvars()), c);
        }
        p
    }

    pub fn var(table: &VarTable, v: Var) -> Self {
        Self::monomial(table, &[(v, 1)], Rational::one()).unwrap()
    }

    pub fn monomial(
        table: &VarTable,
        exps: &[(Var, i64)],
        coeff: Rational,
    ) -> Result<Self, AlgebraError> {
        let mut mono = Mono::unit(table.nvars());
        for &(v, e) in exps {
            if e < 0 && !table.is_laurent(v) {
                return Err(AlgebraError::NegativeExponent(v.to_string()));
            }
            mono.0[table.slot(v)] += e;
        }
        let mut p = Self::zero(table);
        if !coeff.is_zero() {
            p.terms.insert(mono, coeff);
        }
        Ok(p)
    }

    /// `U(Y) = u_0 + u_1 Y + ... + u_a Y^a` with symbolic coefficients.
    pub fn u_generic(table: &VarTable) -> Self {
        let mut p = Self::zero(table);
        for j in 0..=table.a() {
            p = &p
                + &Self::monomial(table, &[(Var::U(j), 1), (Var::Y, j as i64)], Rational::one())
                    .unwrap();
        }
        p
    }

    /// Polynomial in `Y` with the given constant coefficients, low degree first.
    pub fn from_y_coeffs(table: &VarTable, coeffs: &[Rational]) -> Self {
        let mut p = Self::zero(table);
        for (j, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                p = &p + &Self::monomial(table, &[(Var::Y, j as i64)], c.clone()).unwrap();
            }
        }
        p
    }

    pub fn table(&self) -> &VarTable {
        &self.table
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_unit() {
                return Some(c.clone());
            }
        }
        None
    }

    fn insert_add(&mut self, mono: Mono, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.table);
        }
        MultiPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, q)| (m.clone(), q * c)).collect(),
        }
    }

    pub fn mul_checked(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.table != other.table {
            return Err(AlgebraError::RingMismatch);
        }
        Ok(self.mul_impl(other, None))
    }

    /// Product with every term of `Z`-exponent above `n` discarded early.
    pub fn mul_trunc_z(&self, other: &Self, n: i64) -> Self {
        assert_eq!(self.table, other.table, "ring mismatch");
        self.mul_impl(other, Some(n))
    }

    fn mul_impl(&self, other: &Self, trunc_z: Option<i64>) -> Self {
        let zslot = self.table.slot(Var::Z);
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: HashMap<Mono, Rational> =
            HashMap::with_capacity(large.terms.len().saturating_mul(2));
        for (m1, c1) in &small.terms {
            for (m2, c2) in &large.terms {
                if let Some(n) = trunc_z {
                    if m1.0[zslot] + m2.0[zslot] > n {
                        continue;
                    }
                }
                let m = m1.mul(m2);
                let prod = c1 * c2;
                match acc.entry(m) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += prod;
                    }
                }
            }
        }
        MultiPoly {
            table: self.table.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Multiply by a single monomial term.
    fn mul_mono(&self, mono: &Mono, coeff: &Rational) -> Self {
        if coeff.is_zero() {
            return Self::zero(&self.table);
        }
        MultiPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(mono), c * coeff))
                .collect(),
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        self.pow_impl(e, None)
    }

    pub fn pow_trunc_z(&self, e: u64, n: i64) -> Self {
        self.pow_impl(e, Some(n))
    }

    fn pow_impl(&self, e: u64, trunc_z: Option<i64>) -> Self {
        let mut acc = Self::one(&self.table);
        for _ in 0..e {
            acc = acc.mul_impl(self, trunc_z);
        }
        acc
    }

    pub fn derivative(&self, var: Var) -> Result<Self, AlgebraError> {
        let slot = self.table.slot(var);
        let mut out = Self::zero(&self.table);
        for (m, c) in &self.terms {
            let e = m.0[slot];
            if e == 0 {
                continue;
            }
            if e < 0 {
                return Err(AlgebraError::DerivativeAcrossNegative(var.to_string()));
            }
            let mut m2 = m.clone();
            m2.0[slot] = e - 1;
            out.insert_add(m2, c * rat_int(e));
        }
        Ok(out)
    }

    pub fn nth_derivative(&self, var: Var, n: u32) -> Result<Self, AlgebraError> {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derivative(var)?;
        }
        Ok(p)
    }

    pub fn substitute(&self, var: Var, q: &Self) -> Result<Self, AlgebraError> {
        self.substitute_impl(var, q, None)
    }

    /// Substitution with all intermediates truncated at `Z^n`.
    pub fn substitute_trunc_z(&self, var: Var, q: &Self, n: i64) -> Result<Self, AlgebraError> {
        self.substitute_impl(var, q, Some(n))
    }

    fn substitute_impl(&self, var: Var, q: &Self, trunc_z: Option<i64>) -> Result<Self, AlgebraError> {
        if self.table != q.table {
            return Err(AlgebraError::RingMismatch);
        }
        let slot = self.table.slot(var);
        let mut groups: BTreeMap<i64, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[slot];
            if e < 0 {
                return Err(AlgebraError::SubstituteNegative(var.to_string()));
            }
            let mut m2 = m.clone();
            m2.0[slot] = 0;
            groups
                .entry(e)
                .or_insert_with(|| Self::zero(&self.table))
                .insert_add(m2, c.clone());
        }
        let mut result = Self::zero(&self.table);
        let mut power = Self::one(&self.table);
        let mut power_exp = 0i64;
        for (e, coef) in groups {
            while power_exp < e {
                power = power.mul_impl(q, trunc_z);
                power_exp += 1;
            }
            result = &result + &coef.mul_impl(&power, trunc_z);
        }
        if let Some(n) = trunc_z {
            result = result.truncate_z(n);
        }
        Ok(result)
    }

    /// Simultaneous substitution `X := fx`, `Y := gy` (plane map composition).
    pub fn substitute_xy(&self, fx: &Self, gy: &Self) -> Result<Self, AlgebraError> {
        if self.table != fx.table || self.table != gy.table {
            return Err(AlgebraError::RingMismatch);
        }
        let sx = self.table.slot(Var::X);
        let sy = self.table.slot(Var::Y);
        let mut pow_x = vec![Self::one(&self.table)];
        let mut pow_y = vec![Self::one(&self.table)];
        let mut cache: HashMap<(i64, i64), MultiPoly> = HashMap::new();
        let mut result = Self::zero(&self.table);
        for (m, c) in &self.terms {
            let ex = m.0[sx];
            let ey = m.0[sy];
            debug_assert!(ex >= 0 && ey >= 0);
            while (pow_x.len() as i64) <= ex {
                let next = pow_x.last().unwrap() * fx;
                pow_x.push(next);
            }
            while (pow_y.len() as i64) <= ey {
                let next = pow_y.last().unwrap() * gy;
                pow_y.push(next);
            }
            let prod = cache
                .entry((ex, ey))
                .or_insert_with(|| &pow_x[ex as usize] * &pow_y[ey as usize]);
            let mut m2 = m.clone();
            m2.0[sx] = 0;
            m2.0[sy] = 0;
            result = &result + &prod.mul_mono(&m2, c);
        }
        Ok(result)
    }

    /// Specialize all `u_j := x_j`; requires `x_a != 0` (Laurent variable).
    pub fn evaluate_u(&self, xs: &[Rational]) -> Result<Self, AlgebraError> {
        let a = self.table.a() as usize;
        if xs.len() != a + 1 {
            return Err(AlgebraError::BadSpecializationLength {
                expected: a + 1,
                got: xs.len(),
            });
        }
        if xs[a].is_zero() {
            return Err(AlgebraError::ZeroSpecialization(format!("u{a}")));
        }
        let mut out = Self::zero(&self.table);
        for (m, c) in &self.terms {
            let mut c2 = c.clone();
            let mut m2 = m.clone();
            for j in 0..=a {
                let slot = self.table.slot(Var::U(j as u32));
                let e = m2.0[slot];
                if e != 0 {
                    if e < 0 && xs[j].is_zero() {
                        return Err(AlgebraError::ZeroSpecialization(format!("u{j}")));
                    }
                    c2 *= rat_pow(&xs[j], e);
                    m2.0[slot] = 0;
                }
            }
            out.insert_add(m2, c2);
        }
        Ok(out)
    }

    /// Evaluate a single variable at a rational point. Negative exponents
    /// require a nonzero value.
    pub fn evaluate_var(&self, var: Var, val: &Rational) -> Result<Self, AlgebraError> {
        let slot = self.table.slot(var);
        let mut out = Self::zero(&self.table);
        for (m, c) in &self.terms {
            let e = m.0[slot];
            if e < 0 && val.is_zero() {
                return Err(AlgebraError::ZeroSpecialization(var.to_string()));
            }
            let mut m2 = m.clone();
            m2.0[slot] = 0;
            out.insert_add(m2, c * rat_pow(val, e));
        }
        Ok(out)
    }

    /// Drop all terms with `Z`-exponent above `n`; negative powers are kept.
    pub fn truncate_z(&self, n: i64) -> Self {
        let slot = self.table.slot(Var::Z);
        MultiPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.0[slot] <= n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficient of `var^k`, as a polynomial with that variable removed.
    pub fn coeff_of(&self, var: Var, k: i64) -> Self {
        let slot = self.table.slot(var);
        let mut out = Self::zero(&self.table);
        for (m, c) in &self.terms {
            if m.0[slot] == k {
                let mut m2 = m.clone();
                m2.0[slot] = 0;
                out.insert_add(m2, c.clone());
            }
        }
        out
    }

    /// Rational coefficient of the exact monomial given by `exps` (all other
    /// variables at exponent zero).
    pub fn coeff_rat(&self, exps: &[(Var, i64)]) -> Rational {
        let mut mono = Mono::unit(self.table.nvars());
        for &(v, e) in exps {
            mono.0[self.table.slot(v)] += e;
        }
        self.terms.get(&mono).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn deg(&self, var: Var) -> Option<i64> {
        let slot = self.table.slot(var);
        self.terms.keys().map(|m| m.0[slot]).max()
    }

    pub fn min_exp(&self, var: Var) -> Option<i64> {
        let slot = self.table.slot(var);
        self.terms.keys().map(|m| m.0[slot]).min()
    }

    pub fn uses_var(&self, var: Var) -> bool {
        let slot = self.table.slot(var);
        self.terms.keys().any(|m| m.0[slot] != 0)
    }

    /// Indices of the `u_j` actually appearing.
    pub fn u_indices(&self) -> Vec<u32> {
        let a = self.table.a();
        (0..=a)
            .filter(|&j| self.uses_var(Var::U(j)))
            .collect()
    }

    /// Total degree in `X` and `Y` jointly; `None` for the zero polynomial.
    pub fn total_degree_xy(&self) -> Option<i64> {
        let sx = self.table.slot(Var::X);
        let sy = self.table.slot(Var::Y);
        self.terms.keys().map(|m| m.0[sx] + m.0[sy]).max()
    }

    /// Sum of the terms of top total `(X, Y)`-degree.
    pub fn leading_form_xy(&self) -> Self {
        let d = match self.total_degree_xy() {
            Some(d) => d,
            None => return Self::zero(&self.table),
        };
        let sx = self.table.slot(Var::X);
        let sy = self.table.slot(Var::Y);
        MultiPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.0[sx] + m.0[sy] == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Leading monomial and coefficient in the canonical order.
    pub fn leading_term(&self) -> Option<(&Mono, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Re-interpret over a table with a different `Z` Laurent flag. Clearing
    /// the flag requires all `Z`-exponents nonnegative.
    pub fn cast_laurent_z(&self, laurent_z: bool) -> Result<Self, AlgebraError> {
        if !laurent_z && self.min_exp(Var::Z).is_some_and(|e| e < 0) {
            return Err(AlgebraError::NegativeExponent("Z".into()));
        }
        let mut table = VarTable::new(self.table.a());
        if laurent_z {
            table = table.with_laurent_z();
        }
        Ok(MultiPoly {
            table,
            terms: self.terms.clone(),
        })
    }
}

impl std::ops::Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.table, other.table, "ring mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.table, other.table, "ring mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl std::ops::Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, other: &MultiPoly) -> MultiPoly {
        self.mul_checked(other).expect("ring mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_poly;

    fn t2() -> VarTable {
        VarTable::new(2)
    }

    fn p(src: &str, table: &VarTable) -> MultiPoly {
        parse_poly(src, table).unwrap()
    }

    #[test]
    fn mul_basic() {
        let t = t2();
        assert_eq!(&p("Y + 1", &t) * &p("Y - 1", &t), p("Y^2 - 1", &t));
    }

    #[test]
    fn mul_laurent_cancellation() {
        let t = t2();
        assert_eq!(&p("u2^-1", &t) * &p("u2", &t), p("1", &t));
    }

    #[test]
    fn mul_derived_expansion() {
        let t = t2();
        let lhs = &p("1 + Y + Y^2", &t).pow(2) * &p("1 + 2*Y", &t);
        assert_eq!(
            lhs,
            p("2*Y^5 + 5*Y^4 + 8*Y^3 + 7*Y^2 + 4*Y + 1", &t)
        );
    }

    #[test]
    fn mul_ring_mismatch() {
        let ta = VarTable::new(2);
        let tb = VarTable::new(3);
        let err = p("Y", &ta).mul_checked(&p("Y", &tb)).unwrap_err();
        assert_eq!(err, AlgebraError::RingMismatch);
    }

    #[test]
    fn derivative_basic() {
        let t = t2();
        let u = MultiPoly::u_generic(&t);
        assert_eq!(u.derivative(Var::Y).unwrap(), p("2*u2*Y + u1", &t));
        assert!(p("5", &t).derivative(Var::Y).unwrap().is_zero());
    }

    #[test]
    fn derivative_product_rule_cross_check() {
        // d/dY (U^2 U') expanded two ways.
        let t = t2();
        let u = MultiPoly::u_generic(&t);
        let du = u.derivative(Var::Y).unwrap();
        let ddu = du.derivative(Var::Y).unwrap();
        let expanded = (&(&u * &u) * &du).derivative(Var::Y).unwrap();
        let product_rule = &(&(&u * &du) * &du).scale(&rat_int(2)) + &(&(&u * &u) * &ddu);
        assert_eq!(expanded, product_rule);
    }

    #[test]
    fn derivative_negative_exponent_rejected() {
        let t = t2();
        let err = p("u2^-1", &t).derivative(Var::U(2)).unwrap_err();
        assert!(matches!(err, AlgebraError::DerivativeAcrossNegative(_)));
    }

    #[test]
    fn substitute_basic() {
        let t = t2();
        let out = p("Y^2 + 1", &t)
            .substitute(Var::Y, &p("Y + Z", &t))
            .unwrap();
        assert_eq!(out, p("Y^2 + 2*Y*Z + Z^2 + 1", &t));
        let u = MultiPoly::u_generic(&t);
        assert_eq!(
            u.substitute(Var::Y, &MultiPoly::zero(&t)).unwrap(),
            p("u0", &t)
        );
    }

    #[test]
    fn substitute_identity_polynomial() {
        let t = t2();
        let u = MultiPoly::u_generic(&t);
        let rhs = &MultiPoly::var(&t, Var::Y) + &(&MultiPoly::var(&t, Var::Z) * &u.pow(2));
        let out = MultiPoly::var(&t, Var::Y).substitute(Var::Y, &rhs).unwrap();
        assert_eq!(out, rhs);
    }

    #[test]
    fn substitute_negative_exponent_rejected() {
        let t = t2();
        let err = p("u2^-1", &t)
            .substitute(Var::U(2), &p("Y", &t))
            .unwrap_err();
        assert!(matches!(err, AlgebraError::SubstituteNegative(_)));
    }

    #[test]
    fn evaluate_u_basic() {
        let t = t2();
        let u = MultiPoly::u_generic(&t);
        let ones = vec![rat_int(1), rat_int(1), rat_int(1)];
        assert_eq!(u.evaluate_u(&ones).unwrap(), p("Y^2 + Y + 1", &t));
        let xs = vec![rat_int(0), rat_int(0), rat_int(2)];
        assert_eq!(p("u2^-1", &t).evaluate_u(&xs).unwrap(), p("1/2", &t));
        let bad = vec![rat_int(1), rat_int(1), rat_int(0)];
        assert!(matches!(
            u.evaluate_u(&bad).unwrap_err(),
            AlgebraError::ZeroSpecialization(_)
        ));
    }

    #[test]
    fn truncate_z_basic() {
        let tz = VarTable::new(2).with_laurent_z();
        let q = parse_poly("1 + Z + Z^2 + Z^3", &tz).unwrap();
        assert_eq!(q.truncate_z(1), parse_poly("1 + Z", &tz).unwrap());
        let lau = parse_poly("Z^-1*X", &tz).unwrap();
        assert_eq!(lau.truncate_z(0), lau);
    }

    #[test]
    fn rational_root_cases() {
        assert_eq!(rational_root(&rat(8, 27), 3), Some(rat(2, 3)));
        assert_eq!(rational_root(&rat(-8, 1), 3), Some(rat_int(-2)));
        assert_eq!(rational_root(&rat_int(2), 2), None);
        assert_eq!(rational_root(&rat_int(-4), 2), None);
        assert_eq!(rational_root(&rat(9, 4), 2), Some(rat(3, 2)));
    }

    #[test]
    fn canonical_order_is_graded_lex_descending() {
        let t = t2();
        let q = p("1 + Y + X*Y + X^2", &t);
        let lead = q.leading_term().unwrap();
        // X^2 beats X*Y at equal total degree.
        assert_eq!(q.coeff_rat(&[(Var::X, 2)]), rat_int(1));
        assert_eq!(lead.0 .0[t.slot(Var::X)], 2);
    }
}
