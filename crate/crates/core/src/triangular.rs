//! Triangular and linear polynomials in `R[Y]` where
//! `R = Q[u_0,...,u_{a-1}][u_a, u_a^-1]`, with the surjectivity solver for
//! their top `a + 1` coefficients.

use num::{Signed, Zero};
use thiserror::Error;

use crate::algebra::{rational_root, rat_pow, MultiPoly, Rational, Var};

/// Successful check: `p_d = q_d u_a^m` and, for the window below,
/// `p_l = q_l u_a^{m-1} u_{a-d+l} + P_l(higher u's)`.
#[derive(Clone, Debug)]
pub struct TriangularWitness {
    pub d: i64,
    pub m: u32,
    /// `q_{d-a}, ..., q_d`, all strictly positive.
    pub q: Vec<Rational>,
    /// `P_{d-a}, ..., P_{d-1}` (the leading coefficient has no residual).
    pub residuals: Vec<MultiPoly>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TriangularFailure {
    #[error("degree {d} is below the parameter a = {a}")]
    DegreeTooSmall { d: i64, a: u32 },
    #[error("leading coefficient at l = {l} is not a positive rational multiple of u_a^m")]
    LeadingNotPositiveMonomial { l: i64 },
    #[error("window coefficient at l = {l} is not a strictly positive rational")]
    CoefficientNotPositiveRational { l: i64 },
    #[error("coefficient at l = {l} involves a forbidden low u-variable")]
    ForbiddenLowVariable { l: i64 },
}

#[derive(Error, Debug, Clone)]
pub enum SolveError {
    #[error("no rational {m}-th root of {radicand}: the step needs an algebraically closed field")]
    NoRationalRoot { m: u32, radicand: Rational },
    #[error("polynomial is not m-triangular: {0}")]
    WitnessMissing(TriangularFailure),
    #[error("invalid solver input: {0}")]
    BadInput(String),
}

/// Checks the `(m, U)`-triangular staircase form; failures are values, not
/// errors, and name the first violated clause.
pub fn check_m_triangular(p: &MultiPoly, m: u32) -> Result<TriangularWitness, TriangularFailure> {
    assert!(m >= 1);
    assert!(
        !p.uses_var(Var::X) && !p.uses_var(Var::Z),
        "polynomial must lie in R[Y]"
    );
    let a = p.table().a();
    let d = p.deg(Var::Y).unwrap_or(-1);
    if d < a as i64 {
        return Err(TriangularFailure::DegreeTooSmall { d, a });
    }
    // Leading coefficient: exactly q_d * u_a^m with q_d > 0.
    let p_d = p.coeff_of(Var::Y, d);
    let q_d = p_d.coeff_rat(&[(Var::U(a), m as i64)]);
    let lead_mono = MultiPoly::monomial(p.table(), &[(Var::U(a), m as i64)], q_d.clone())
        .expect("u_a is Laurent");
    if q_d <= Rational::zero() || p_d != lead_mono {
        return Err(TriangularFailure::LeadingNotPositiveMonomial { l: d });
    }
    // The structural clause (no low u-variables in the residual) is checked
    // across the whole window before positivity, matching the Definition's
    // clause order.
    let mut q = Vec::with_capacity(a as usize + 1);
    let mut residuals = Vec::with_capacity(a as usize);
    for l in (d - a as i64)..d {
        let w = (a as i64 - d + l) as u32; // 0 <= w < a
        let p_l = p.coeff_of(Var::Y, l);
        let window = [(Var::U(a), m as i64 - 1), (Var::U(w), 1)];
        let q_l = p_l.coeff_rat(&window);
        let residual = &p_l
            - &MultiPoly::monomial(p.table(), &window, q_l.clone()).expect("u_a is Laurent");
        // P_l must be an honest polynomial in u_{w+1}, ..., u_a.
        let bad_var = residual.u_indices().iter().any(|&j| j <= w)
            || residual.min_exp(Var::U(a)).is_some_and(|e| e < 0);
        if bad_var {
            return Err(TriangularFailure::ForbiddenLowVariable { l });
        }
        q.push(q_l);
        residuals.push(residual);
    }
    for (idx, q_l) in q.iter().enumerate() {
        if *q_l <= Rational::zero() {
            return Err(TriangularFailure::CoefficientNotPositiveRational {
                l: d - a as i64 + idx as i64,
            });
        }
    }
    q.push(q_d);
    Ok(TriangularWitness { d, m, q, residuals })
}

/// `U`-linear check: degree `d <= a` and every `p_l` a strictly positive
/// rational multiple of `u_{a-d+l}`. Returns the multipliers on success.
pub fn check_linear(p: &MultiPoly) -> Option<Vec<Rational>> {
    assert!(
        !p.uses_var(Var::X) && !p.uses_var(Var::Z),
        "polynomial must lie in R[Y]"
    );
    let a = p.table().a();
    // Positive rational constants are linear by convention.
    if let Some(q) = p.as_constant() {
        return if q.is_positive() { Some(vec![q]) } else { None };
    }
    let d = p.deg(Var::Y)?;
    if d > a as i64 {
        return None;
    }
    let mut qs = Vec::with_capacity(d as usize + 1);
    for l in 0..=d {
        let w = (a as i64 - d + l) as u32;
        let p_l = p.coeff_of(Var::Y, l);
        let q_l = p_l.coeff_rat(&[(Var::U(w), 1)]);
        if q_l <= Rational::zero()
            || p_l != MultiPoly::monomial(p.table(), &[(Var::U(w), 1)], q_l.clone()).unwrap()
        {
            return None;
        }
        qs.push(q_l);
    }
    Some(qs)
}

/// Solves `t_l * p_l(x) = y_l` for the top `a + 1` coefficients of an
/// `m`-triangular polynomial: the exact rational `m`-th root fixes `x_a`,
/// then back-substitution walks the staircase downward. `t` and `y` are
/// indexed `d-a, ..., d`.
pub fn solve_top(
    p: &MultiPoly,
    m: u32,
    t: &[Rational],
    y: &[Rational],
) -> Result<Vec<Rational>, SolveError> {
    let witness = check_m_triangular(p, m).map_err(SolveError::WitnessMissing)?;
    let a = p.table().a() as usize;
    if t.len() != a + 1 || y.len() != a + 1 {
        return Err(SolveError::BadInput(format!(
            "t and y must have length a + 1 = {}",
            a + 1
        )));
    }
    if t.iter().any(|v| v.is_zero()) {
        return Err(SolveError::BadInput("all t_l must be nonzero".into()));
    }
    if y[a].is_zero() {
        return Err(SolveError::BadInput("y_d must be nonzero".into()));
    }
    let radicand = &y[a] / (&t[a] * &witness.q[a]);
    let x_a = rational_root(&radicand, m)
        .ok_or(SolveError::NoRationalRoot { m, radicand })?;
    let d = witness.d;
    let mut xs = vec![Rational::zero(); a + 1];
    xs[a] = x_a.clone();
    let x_a_pow = rat_pow(&x_a, m as i64 - 1);
    for l in ((d - a as i64)..d).rev() {
        let w = (a as i64 - d + l) as usize;
        let idx = (l - (d - a as i64)) as usize;
        // p_l with u_w := 0 and all higher u's at their solved values; the
        // lower u's do not occur, so any placeholder works.
        let p_l = p.coeff_of(Var::Y, l);
        let val = p_l
            .evaluate_u(&xs)
            .expect("x_a is nonzero")
            .as_constant()
            .expect("all u variables specialized");
        let residual_val = val; // u_w is still 0 here
        xs[w] = (&y[idx] / &t[idx] - residual_val) / (&witness.q[idx] * &x_a_pow);
    }
    // Exactness: t_l * p_l(x) = y_l for the whole window.
    for l in (d - a as i64)..=d {
        let idx = (l - (d - a as i64)) as usize;
        let val = p
            .coeff_of(Var::Y, l)
            .evaluate_u(&xs)
            .expect("x_a nonzero")
            .as_constant()
            .unwrap();
        debug_assert_eq!(&val * &t[idx], y[idx], "solver window identity");
    }
    Ok(xs)
}

/// True when every entry is strictly positive (used by property tests).
pub fn all_positive(qs: &[Rational]) -> bool {
    qs.iter().all(|q| q.is_positive() && !q.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat_int, VarTable};
    use crate::expr::parse_poly;

    fn t2() -> VarTable {
        VarTable::new(2)
    }

    #[test]
    fn u_is_one_triangular() {
        let t = t2();
        let u = MultiPoly::u_generic(&t);
        let w = check_m_triangular(&u, 1).unwrap();
        assert_eq!(w.d, 2);
        assert_eq!(w.q, vec![rat_int(1), rat_int(1), rat_int(1)]);
        assert!(w.residuals.iter().all(|r| r.is_zero()));
    }

    #[test]
    fn u_squared_is_two_triangular() {
        let t = t2();
        let u2 = MultiPoly::u_generic(&t).pow(2);
        let w = check_m_triangular(&u2, 2).unwrap();
        assert_eq!(w.d, 4);
        assert_eq!(w.q, vec![rat_int(2), rat_int(2), rat_int(1)]);
        // P_2 = u_1^2 at the bottom of the window.
        assert_eq!(w.residuals[0], parse_poly("u1^2", &t).unwrap());
        assert!(w.residuals[1].is_zero());
    }

    #[test]
    fn sign_violation_fails() {
        let t = t2();
        let p = parse_poly("-1*u2*Y^2", &t).unwrap();
        assert_eq!(
            check_m_triangular(&p, 1).unwrap_err(),
            TriangularFailure::LeadingNotPositiveMonomial { l: 2 }
        );
    }

    #[test]
    fn forbidden_low_variable_fails() {
        let t = t2();
        let p = parse_poly("u2*Y^3 + u0*Y^2", &t).unwrap();
        assert_eq!(
            check_m_triangular(&p, 1).unwrap_err(),
            TriangularFailure::ForbiddenLowVariable { l: 2 }
        );
    }

    #[test]
    fn degree_too_small_fails() {
        let t = t2();
        let p = parse_poly("u2*Y", &t).unwrap();
        assert!(matches!(
            check_m_triangular(&p, 1),
            Err(TriangularFailure::DegreeTooSmall { d: 1, a: 2 })
        ));
    }

    #[test]
    fn linear_examples() {
        let t = t2();
        let u = MultiPoly::u_generic(&t);
        assert!(check_linear(&u).is_some());
        assert!(check_linear(&u.derivative(Var::Y).unwrap()).is_some());
        assert!(check_linear(&parse_poly("3/7", &t).unwrap()).is_some());
        // d = 1 over a = 2 shifts the index rule: p_0 must be in Q_+ u_1.
        assert!(check_linear(&parse_poly("u0 + u1*Y", &t).unwrap()).is_none());
        assert!(check_linear(&parse_poly("u1 + u2*Y", &t).unwrap()).is_some());
        assert!(check_linear(&MultiPoly::zero(&t)).is_none());
    }

    #[test]
    fn solve_top_on_u() {
        let t = t2();
        let u = MultiPoly::u_generic(&t);
        let ones = vec![rat_int(1), rat_int(1), rat_int(1)];
        let y = vec![rat_int(5), rat_int(3), rat_int(2)];
        assert_eq!(solve_top(&u, 1, &ones, &y).unwrap(), y);
    }

    #[test]
    fn solve_top_on_u2_du() {
        // U^2 U' is 3-triangular with top coefficients 2u2^3, 5u1u2^2,
        // 4u1^2u2 + 4u0u2^2.
        let t = t2();
        let u = MultiPoly::u_generic(&t);
        let p = &u.pow(2) * &u.derivative(Var::Y).unwrap();
        let tl = vec![rat_int(-1), rat_int(-1), rat_int(-1)];
        let y = vec![rat_int(-8), rat_int(-5), rat_int(-2)];
        let xs = solve_top(&p, 3, &tl, &y).unwrap();
        assert_eq!(xs, vec![rat_int(1), rat_int(1), rat_int(1)]);
    }

    #[test]
    fn solve_top_irrational_root() {
        let t = t2();
        let u = MultiPoly::u_generic(&t);
        let ones = vec![rat_int(1), rat_int(1), rat_int(1)];
        let y = vec![rat_int(1), rat_int(1), rat_int(2)];
        assert!(matches!(
            solve_top(&u.pow(2), 2, &ones, &y),
            Err(SolveError::NoRationalRoot { .. })
        ));
    }
}
