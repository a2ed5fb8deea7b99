//! Degeneration-family pipeline: from a triangular target of degree
//! `cd + a`, build `sigma_Z = tau3 . pi . tau2 . pi . tau1` over `Q[Z]` and
//! re-verify every claimed identity exactly.

use std::fmt::Write as _;

use num::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::algebra::{factorial, rat_int, MultiPoly, Rational, Var, VarTable};
use crate::expr::{format_poly, parse_poly, ParseError};
use crate::inverse::v_sequence;
use crate::planemap::{decompose, PlaneMap, Polydegree, preceq};
use crate::triangular::{check_m_triangular, solve_top, SolveError};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FamilyParams {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl FamilyParams {
    pub fn new(a: u32, b: u32, c: u32) -> Self {
        assert!(a >= 2 && b >= 2 && c >= 1);
        FamilyParams { a, b, c }
    }

    pub fn d(&self) -> u32 {
        self.a * self.b - 1
    }

    /// Degree of the triangular target, `cd + a`.
    pub fn target_degree(&self) -> u32 {
        self.c * self.d() + self.a
    }

    /// Polydegree of the generic fiber, `(cd - 1, b, a)`.
    pub fn fiber_polydegree(&self) -> Polydegree {
        Polydegree::new(vec![
            (self.c * self.d() - 1) as u64,
            self.b as u64,
            self.a as u64,
        ])
    }
}

/// `tau = (r X + sum y_j Y^j, s Y + t)` of degree `cd + a`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TargetTriangular {
    pub r: Rational,
    pub s: Rational,
    pub t: Rational,
    /// `y_0, ..., y_{cd+a}` with the top entry nonzero.
    pub y: Vec<Rational>,
}

impl TargetTriangular {
    pub fn to_plane_map(&self, table: &VarTable) -> PlaneMap {
        let f = &MultiPoly::var(table, Var::X).scale(&self.r)
            + &MultiPoly::from_y_coeffs(table, &self.y);
        let g = &MultiPoly::var(table, Var::Y).scale(&self.s)
            + &MultiPoly::constant(table, self.t.clone());
        PlaneMap::new(f, g).expect("same table")
    }
}

#[derive(Clone, Debug)]
pub struct FamilyResult {
    pub params: FamilyParams,
    pub x: Vec<Rational>,
    pub ubar: MultiPoly,
    pub v: MultiPoly,
    pub e: MultiPoly,
    pub tau1: PlaneMap,
    pub tau2: PlaneMap,
    pub tau3: PlaneMap,
    pub sigma_z: PlaneMap,
}

#[derive(Error, Debug, Clone)]
pub enum FamilyError {
    #[error("invalid target: {0}")]
    BadTarget(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("internal degree bound violated: deg E = {0} exceeds cd - 1 = {1}")]
    DegreeMismatch(i64, i64),
    #[error("cancellation identity failed; this indicates an implementation bug")]
    CancellationFailed,
}

/// Runs the construction: solve for the specialization point, specialize,
/// truncate, build the three triangular factors, and compose. The
/// composition happens over the Laurent-in-Z ring; polynomiality in `Z` is a
/// verified conclusion, not an assumption.
pub fn build_family(
    params: &FamilyParams,
    tau: &TargetTriangular,
) -> Result<FamilyResult, FamilyError> {
    let a = params.a;
    let b = params.b;
    let c = params.c;
    let cd = c * params.d();
    let top_deg = params.target_degree() as usize;
    if tau.y.len() != top_deg + 1 {
        return Err(FamilyError::BadTarget(format!(
            "need y_0..y_{top_deg}, got {} coefficients",
            tau.y.len()
        )));
    }
    if tau.y[top_deg].is_zero() || tau.r.is_zero() || tau.s.is_zero() {
        return Err(FamilyError::BadTarget(
            "r, s and the top coefficient y_{cd+a} must be nonzero".into(),
        ));
    }

    let table = VarTable::new(a).with_laurent_z();

    // (-1)^c c! v_c is (bc+1)-triangular of degree cd + a; its witness feeds
    // the solver.
    let u = MultiPoly::u_generic(&table);
    let vs_sym = v_sequence(&u, b, c as i64);
    let mut sign_fact = factorial(c as u64);
    if c % 2 == 1 {
        sign_fact = -sign_fact;
    }
    let p = vs_sym[c as usize].scale(&sign_fact);
    let m = b * c + 1;
    debug_assert!(check_m_triangular(&p, m).is_ok());

    // r p_l(x) = y_l for the top window, i.e. t_l = r / ((-1)^c c!).
    let t_l = &tau.r / &sign_fact;
    let t_vec = vec![t_l; a as usize + 1];
    let y_window: Vec<Rational> = tau.y[(cd as usize)..=top_deg].to_vec();
    let x = solve_top(&p, m, &t_vec, &y_window)?;

    let ubar = u.evaluate_u(&x).expect("x_a nonzero");
    let vbars = v_sequence(&ubar, b, c as i64);

    // r vbar_c = sum y_j Y^j + E with deg E <= cd - 1.
    let e = &vbars[c as usize].scale(&tau.r) - &MultiPoly::from_y_coeffs(&table, &tau.y);
    let deg_e = e.deg(Var::Y).unwrap_or(-1);
    if deg_e > cd as i64 - 1 {
        return Err(FamilyError::DegreeMismatch(deg_e, cd as i64 - 1));
    }

    // V(Y, Z) = sum_{k < c} vbar_k Z^k.
    let mut v = MultiPoly::zero(&table);
    for (k, vb) in vbars.iter().take(c as usize).enumerate() {
        let zk = MultiPoly::monomial(&table, &[(Var::Z, k as i64)], Rational::one()).unwrap();
        v = &v + &(vb * &zk);
    }

    // Independent cancellation identity, checked before composing:
    // Ubar(Y) - V(W(Y,Z), Z) = vbar_c(Y) Z^c mod Z^{c+1},
    // with W(Y,Z) = Y + Z (Z^c X + Ubar(Y))^b.
    let zc_x = MultiPoly::monomial(&table, &[(Var::Z, c as i64), (Var::X, 1)], Rational::one())
        .unwrap();
    let z1 = MultiPoly::var(&table, Var::Z);
    let w_full = &MultiPoly::var(&table, Var::Y)
        + &z1.mul_trunc_z(&(&zc_x + &ubar).pow_trunc_z(b as u64, c as i64), c as i64);
    let lhs = (&ubar - &v.substitute_trunc_z(Var::Y, &w_full, c as i64).unwrap()).truncate_z(c as i64);
    let zc = MultiPoly::monomial(&table, &[(Var::Z, c as i64)], Rational::one()).unwrap();
    if lhs != &vbars[c as usize] * &zc {
        return Err(FamilyError::CancellationFailed);
    }

    // tau1 = (Z^c X + Ubar, Y), tau2 = (X + Z Y^b, Y),
    // tau3 = (r Z^-c (X - V) - E + Z Y^{cd-1}, s Y + t).
    let tau1 = PlaneMap::new(&zc_x + &ubar, MultiPoly::var(&table, Var::Y)).unwrap();
    let tau2 = PlaneMap::new(
        &MultiPoly::var(&table, Var::X)
            + &MultiPoly::monomial(&table, &[(Var::Z, 1), (Var::Y, b as i64)], Rational::one())
                .unwrap(),
        MultiPoly::var(&table, Var::Y),
    )
    .unwrap();
    let z_neg_c =
        MultiPoly::monomial(&table, &[(Var::Z, -(c as i64))], tau.r.clone()).unwrap();
    let tau3_f = &(&(&z_neg_c * &(&MultiPoly::var(&table, Var::X) - &v)) - &e)
        + &MultiPoly::monomial(&table, &[(Var::Z, 1), (Var::Y, cd as i64 - 1)], Rational::one())
            .unwrap();
    let tau3 = PlaneMap::new(
        tau3_f,
        &MultiPoly::var(&table, Var::Y).scale(&tau.s) + &MultiPoly::constant(&table, tau.t.clone()),
    )
    .unwrap();

    let sigma_z = compose_family(&tau1, &tau2, &tau3, &table);

    Ok(FamilyResult {
        params: *params,
        x,
        ubar,
        v,
        e,
        tau1,
        tau2,
        tau3,
        sigma_z,
    })
}

fn compose_family(
    tau1: &PlaneMap,
    tau2: &PlaneMap,
    tau3: &PlaneMap,
    table: &VarTable,
) -> PlaneMap {
    let pi = PlaneMap::swap(table);
    let inner = pi
        .compose(tau1)
        .and_then(|m| tau2.compose(&m))
        .and_then(|m| pi.compose(&m))
        .expect("same table");
    tau3.compose(&inner).expect("same table")
}

/// From-x input mode: pick the specialization point directly and synthesize a
/// compatible target, `sum y_j Y^j = r vbar_c - tail` for a chosen tail of
/// degree <= cd - 1.
pub fn synthesize_target(
    params: &FamilyParams,
    x: &[Rational],
    r: Rational,
    s: Rational,
    t: Rational,
    tail: &[Rational],
) -> Result<TargetTriangular, FamilyError> {
    let a = params.a as usize;
    let cd = (params.c * params.d()) as i64;
    if x.len() != a + 1 || x[a].is_zero() {
        return Err(FamilyError::BadTarget(
            "x must have length a + 1 with x_a nonzero".into(),
        ));
    }
    if r.is_zero() || s.is_zero() {
        return Err(FamilyError::BadTarget("r and s must be nonzero".into()));
    }
    if tail.len() as i64 > cd {
        return Err(FamilyError::BadTarget(format!(
            "tail degree must be at most cd - 1 = {}",
            cd - 1
        )));
    }
    let table = VarTable::new(params.a).with_laurent_z();
    let ubar = MultiPoly::from_y_coeffs(&table, x);
    let vbars = v_sequence(&ubar, params.b, params.c as i64);
    let ypoly = &vbars[params.c as usize].scale(&r) - &MultiPoly::from_y_coeffs(&table, tail);
    let top = params.target_degree() as usize;
    let mut y = Vec::with_capacity(top + 1);
    for j in 0..=top {
        y.push(
            ypoly
                .coeff_of(Var::Y, j as i64)
                .as_constant()
                .expect("numeric coefficients"),
        );
    }
    Ok(TargetTriangular { r, s, t, y })
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Human-readable lines followed by a machine-readable key=value block.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                let _ = writeln!(out, "[{tag}] {}", c.name);
            } else {
                let _ = writeln!(out, "[{tag}] {}: {}", c.name, c.detail);
            }
        }
        let _ = writeln!(out, "---");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "check.{}={}",
                c.name,
                if c.pass { "pass" } else { "fail" }
            );
        }
        let _ = writeln!(
            out,
            "overall={}",
            if self.passed() { "pass" } else { "fail" }
        );
        out
    }
}

/// The seven per-instance checks of the construction. `sigma_Z` is
/// recomposed from the stored factors, so tampering with any intermediate is
/// caught. The polydegree of the generic fiber is read off a random nonzero
/// specialization, resampled up to 5 times on degeneracy.
pub fn verify_family(res: &FamilyResult, tau: &TargetTriangular, seed: u64) -> VerifyReport {
    let params = &res.params;
    let a = params.a;
    let b = params.b;
    let cd = params.c * params.d();
    let table = res.ubar.table().clone();
    let plain = VarTable::new(a);
    let mut checks = Vec::new();

    let sigma = compose_family(&res.tau1, &res.tau2, &res.tau3, &table);

    // (i) polynomiality in Z.
    let neg_f = sigma.f.min_exp(Var::Z).unwrap_or(0).min(0);
    let neg_g = sigma.g.min_exp(Var::Z).unwrap_or(0).min(0);
    checks.push(CheckResult {
        name: "sigma_z_polynomial_in_z",
        pass: neg_f == 0 && neg_g == 0,
        detail: if neg_f == 0 && neg_g == 0 {
            String::new()
        } else {
            format!("negative Z exponents down to {}", neg_f.min(neg_g))
        },
    });

    // (ii) Jacobian is the constant r s.
    let jac = sigma.jacobian();
    let rs = &tau.r * &tau.s;
    let jac_ok = jac.as_constant().map(|c| c == rs).unwrap_or(false);
    checks.push(CheckResult {
        name: "jacobian_constant_rs",
        pass: jac_ok,
        detail: if jac_ok {
            String::new()
        } else {
            format!("jacobian = {jac}")
        },
    });

    // (iii) mod-Z limit equals tau componentwise.
    let tau_map = tau.to_plane_map(&plain);
    let (limit_ok, limit_detail) = match sigma.limit_mod_z() {
        Ok(lim) if lim == tau_map => (true, String::new()),
        Ok(lim) => (false, format!("limit = {lim}, target = {tau_map}")),
        Err(e) => (false, e.to_string()),
    };
    checks.push(CheckResult {
        name: "limit_equals_tau",
        pass: limit_ok,
        detail: limit_detail,
    });

    // (iv) factor degrees a, b, cd - 1.
    let degs = (res.tau1.degree(), res.tau2.degree(), res.tau3.degree());
    let expect = (a as i64, b as i64, cd as i64 - 1);
    checks.push(CheckResult {
        name: "factor_degrees",
        pass: degs == expect,
        detail: if degs == expect {
            String::new()
        } else {
            format!("got {degs:?}, expected {expect:?}")
        },
    });

    // (v) total degree ab(cd - 1).
    let deg = sigma.degree();
    let expect_deg = (a * b) as i64 * (cd as i64 - 1);
    checks.push(CheckResult {
        name: "sigma_z_total_degree",
        pass: deg == expect_deg,
        detail: if deg == expect_deg {
            String::new()
        } else {
            format!("got {deg}, expected {expect_deg}")
        },
    });

    // (vi) polydegree of a random nonzero specialization.
    let want = params.fiber_polydegree();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut attempts: Vec<String> = Vec::new();
    let mut pass6 = false;
    let mut saw_degenerate = false;
    for _ in 0..5 {
        let z0 = rat_int(rng.gen_range(1..=40));
        match sigma.specialize_z(&z0) {
            Ok(spec) => match decompose(&spec) {
                Ok(fac) if fac.polydegree == want => {
                    pass6 = true;
                    attempts.push(format!("z0={z0}: polydegree {}", fac.polydegree));
                    break;
                }
                Ok(fac) => {
                    saw_degenerate = true;
                    attempts.push(format!("z0={z0}: degenerate polydegree {}", fac.polydegree));
                }
                Err(e) => attempts.push(format!("z0={z0}: {e}")),
            },
            Err(e) => attempts.push(format!("z0={z0}: {e}")),
        }
    }
    checks.push(CheckResult {
        name: "specialization_polydegree",
        pass: pass6,
        detail: if pass6 {
            attempts.pop().unwrap_or_default()
        } else if saw_degenerate {
            format!("degenerate specializations exhausted: {}", attempts.join("; "))
        } else {
            attempts.join("; ")
        },
    });

    // (vii) polydegree of tau itself.
    let want_tau = Polydegree::new(vec![params.target_degree() as u64]);
    let (pass7, detail7) = match decompose(&tau_map) {
        Ok(fac) if fac.polydegree == want_tau => (true, String::new()),
        Ok(fac) => (false, format!("got {}", fac.polydegree)),
        Err(e) => (false, e.to_string()),
    };
    checks.push(CheckResult {
        name: "tau_polydegree",
        pass: pass7,
        detail: detail7,
    });

    VerifyReport { checks }
}

/// Arithmetic summary for the `b = 2` counterexamples to the order
/// conjecture: the inclusion holds while the `preceq` inequality fails.
#[derive(Clone, Debug)]
pub struct CounterexampleReport {
    pub a: u32,
    pub c: u32,
    pub source: Polydegree,
    pub target: Polydegree,
    pub dim_source: u64,
    pub dim_target: u64,
    pub preceq_holds: bool,
}

pub fn counterexample_report(a: u32, c: u32) -> CounterexampleReport {
    assert!(a >= 2 && c >= 1);
    let params = FamilyParams::new(a, 2, c);
    let source = Polydegree::new(vec![params.target_degree() as u64]);
    let target = params.fiber_polydegree();
    let preceq_holds =
        preceq(params.target_degree() as u64, &target).expect("length 3 target");
    CounterexampleReport {
        a,
        c,
        dim_source: source.dimension(),
        dim_target: target.dimension(),
        source,
        target,
        preceq_holds,
    }
}

impl CounterexampleReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "a={} b=2 c={}", self.a, self.c);
        let _ = writeln!(out, "source={}", self.source);
        let _ = writeln!(out, "target={}", self.target);
        let _ = writeln!(out, "dim_source={}", self.dim_source);
        let _ = writeln!(out, "dim_target={}", self.dim_target);
        let _ = writeln!(out, "preceq={}", self.preceq_holds);
        let _ = writeln!(
            out,
            "conclusion=closure inclusion holds while preceq fails: \
             the order comparison does not capture this degeneration"
        );
        out
    }
}

fn format_rat(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serializes a build result as the key=value block consumed by
/// `verify-family`.
pub fn write_family(res: &FamilyResult, tau: &TargetTriangular) -> String {
    let mut out = String::new();
    let p = &res.params;
    let _ = writeln!(out, "a={}", p.a);
    let _ = writeln!(out, "b={}", p.b);
    let _ = writeln!(out, "c={}", p.c);
    let _ = writeln!(out, "r={}", format_rat(&tau.r));
    let _ = writeln!(out, "s={}", format_rat(&tau.s));
    let _ = writeln!(out, "t={}", format_rat(&tau.t));
    let xs: Vec<String> = res.x.iter().map(format_rat).collect();
    let _ = writeln!(out, "x={}", xs.join(","));
    let ys: Vec<String> = tau.y.iter().map(format_rat).collect();
    let _ = writeln!(out, "y={}", ys.join(","));
    let _ = writeln!(out, "ubar={}", format_poly(&res.ubar));
    let _ = writeln!(out, "v={}", format_poly(&res.v));
    let _ = writeln!(out, "e={}", format_poly(&res.e));
    let _ = writeln!(out, "tau1_f={}", format_poly(&res.tau1.f));
    let _ = writeln!(out, "tau1_g={}", format_poly(&res.tau1.g));
    let _ = writeln!(out, "tau2_f={}", format_poly(&res.tau2.f));
    let _ = writeln!(out, "tau2_g={}", format_poly(&res.tau2.g));
    let _ = writeln!(out, "tau3_f={}", format_poly(&res.tau3.f));
    let _ = writeln!(out, "tau3_g={}", format_poly(&res.tau3.g));
    let _ = writeln!(out, "sigma_f={}", format_poly(&res.sigma_z.f));
    let _ = writeln!(out, "sigma_g={}", format_poly(&res.sigma_z.g));
    out
}

/// Parses a serialized family block back into the verification inputs.
pub fn read_family(text: &str) -> Result<(FamilyResult, TargetTriangular), ParseError> {
    let mut kv = std::collections::BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ParseError {
            line: lineno + 1,
            col: 1,
            msg: "expected key=value".into(),
        })?;
        kv.insert(key.trim().to_string(), value.trim().to_string());
    }
    let get = |key: &str| -> Result<&String, ParseError> {
        kv.get(key).ok_or_else(|| ParseError {
            line: 1,
            col: 1,
            msg: format!("missing key '{key}'"),
        })
    };
    let parse_u32 = |key: &str| -> Result<u32, ParseError> {
        get(key)?.parse().map_err(|_| ParseError {
            line: 1,
            col: 1,
            msg: format!("invalid integer for '{key}'"),
        })
    };
    let parse_rat = |src: &str| -> Result<Rational, ParseError> {
        let err = || ParseError {
            line: 1,
            col: 1,
            msg: format!("invalid rational '{src}'"),
        };
        match src.split_once('/') {
            Some((n, d)) => {
                let n: crate::algebra::Integer = n.trim().parse().map_err(|_| err())?;
                let d: crate::algebra::Integer = d.trim().parse().map_err(|_| err())?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Rational::new(n, d))
            }
            None => {
                let n: crate::algebra::Integer = src.trim().parse().map_err(|_| err())?;
                Ok(Rational::from(n))
            }
        }
    };
    let a = parse_u32("a")?;
    let b = parse_u32("b")?;
    let c = parse_u32("c")?;
    let params = FamilyParams::new(a, b, c);
    let table = VarTable::new(a).with_laurent_z();
    let poly = |key: &str| -> Result<MultiPoly, ParseError> { parse_poly(get(key)?, &table) };
    let rats = |key: &str| -> Result<Vec<Rational>, ParseError> {
        get(key)?
            .split(',')
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<_>, _>>()
    };
    let tau = TargetTriangular {
        r: parse_rat(get("r")?)?,
        s: parse_rat(get("s")?)?,
        t: parse_rat(get("t")?)?,
        y: rats("y")?,
    };
    let map = |fk: &str, gk: &str| -> Result<PlaneMap, ParseError> {
        PlaneMap::new(poly(fk)?, poly(gk)?).map_err(|e| ParseError {
            line: 1,
            col: 1,
            msg: e.to_string(),
        })
    };
    let res = FamilyResult {
        params,
        x: rats("x")?,
        ubar: poly("ubar")?,
        v: poly("v")?,
        e: poly("e")?,
        tau1: map("tau1_f", "tau1_g")?,
        tau2: map("tau2_f", "tau2_g")?,
        tau3: map("tau3_f", "tau3_g")?,
        sigma_z: map("sigma_f", "sigma_g")?,
    };
    Ok((res, tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn worked_instance() -> (FamilyParams, TargetTriangular) {
        let params = FamilyParams::new(2, 2, 1);
        let mut y = vec![Rational::zero(); 6];
        y[3] = rat_int(-8);
        y[4] = rat_int(-5);
        y[5] = rat_int(-2);
        let tau = TargetTriangular {
            r: rat_int(1),
            s: rat_int(1),
            t: Rational::zero(),
            y,
        };
        (params, tau)
    }

    #[test]
    fn worked_instance_intermediates() {
        let (params, tau) = worked_instance();
        let res = build_family(&params, &tau).unwrap();
        assert_eq!(res.x, vec![rat_int(1), rat_int(1), rat_int(1)]);
        let table = res.ubar.table();
        assert_eq!(res.ubar, parse_poly("1 + Y + Y^2", table).unwrap());
        assert_eq!(res.v, parse_poly("1 + Y + Y^2", table).unwrap());
        assert_eq!(res.e, parse_poly("-1 - 4*Y - 7*Y^2", table).unwrap());
        assert_eq!(
            res.tau1.f,
            parse_poly("Z*X + 1 + Y + Y^2", table).unwrap()
        );
        assert_eq!(res.tau2.f, parse_poly("X + Z*Y^2", table).unwrap());
        assert_eq!(
            res.tau3.f,
            parse_poly("Z^-1*(X - 1 - Y - Y^2) + 1 + 4*Y + 7*Y^2 + Z*Y^2", table).unwrap()
        );
    }

    #[test]
    fn worked_instance_verifies() {
        let (params, tau) = worked_instance();
        let res = build_family(&params, &tau).unwrap();
        let report = verify_family(&res, &tau, 7);
        assert!(report.passed(), "{}", report.render());
        // The special fiber is tau itself.
        let plain = VarTable::new(2);
        assert_eq!(res.sigma_z.limit_mod_z().unwrap(), tau.to_plane_map(&plain));
        assert_eq!(res.sigma_z.degree(), 8);
    }

    #[test]
    fn scaled_root_solution_exists() {
        // y_5 = -2 k^3 r forces x_2 = k.
        let (params, _) = worked_instance();
        let k = rat(3, 2);
        let r = rat_int(2);
        let x = vec![rat_int(1), rat_int(-1), k.clone()];
        let tau = synthesize_target(&params, &x, r, rat_int(1), rat_int(0), &[]).unwrap();
        let res = build_family(&params, &tau).unwrap();
        assert_eq!(res.x[2], k);
    }

    #[test]
    fn irrational_root_rejected() {
        let (params, mut tau) = worked_instance();
        // x_2^3 = 2 has no rational solution: y_5 = -2 * 2 = -4 with r = 1.
        tau.y[5] = rat_int(-4);
        assert!(matches!(
            build_family(&params, &tau),
            Err(FamilyError::Solve(SolveError::NoRationalRoot { .. }))
        ));
    }

    #[test]
    fn tamper_is_detected() {
        let (params, tau) = worked_instance();
        let mut res = build_family(&params, &tau).unwrap();
        let table = res.ubar.table().clone();
        res.tau3.f = &res.tau3.f + &MultiPoly::var(&table, Var::Y);
        let report = verify_family(&res, &tau, 7);
        assert!(!report.passed());
        let limit = report
            .checks
            .iter()
            .find(|c| c.name == "limit_equals_tau")
            .unwrap();
        assert!(!limit.pass);
    }

    #[test]
    fn family_block_round_trip() {
        let (params, tau) = worked_instance();
        let res = build_family(&params, &tau).unwrap();
        let text = write_family(&res, &tau);
        let (res2, tau2) = read_family(&text).unwrap();
        assert_eq!(tau2, tau);
        assert_eq!(res2.sigma_z, res.sigma_z);
        assert!(verify_family(&res2, &tau2, 7).passed());
    }

    #[test]
    fn counterexample_small_cases() {
        let rep = counterexample_report(2, 1);
        assert_eq!(rep.source.entries(), &[5]);
        assert_eq!(rep.target.entries(), &[2, 2, 2]);
        assert_eq!((rep.dim_source, rep.dim_target), (11, 12));
        assert!(!rep.preceq_holds);

        let rep = counterexample_report(2, 2);
        assert_eq!(rep.source.entries(), &[8]);
        assert_eq!(rep.target.entries(), &[5, 2, 2]);
        assert_eq!((rep.dim_source, rep.dim_target), (14, 15));
        assert!(!rep.preceq_holds);

        let rep = counterexample_report(3, 1);
        assert_eq!(rep.source.entries(), &[8]);
        assert_eq!(rep.target.entries(), &[4, 2, 3]);
        assert_eq!((rep.dim_source, rep.dim_target), (14, 15));
        assert!(!rep.preceq_holds);
    }
}
