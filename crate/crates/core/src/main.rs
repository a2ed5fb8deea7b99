//! Command-line front end: every library pipeline behind a subcommand, with
//! deterministic output and exit codes 0 (success), 1 (verification
//! failure), 2 (parse error), 3 (domain error).

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num::{One, Zero};

use polyauto::algebra::{factorial, MultiPoly, Rational, Var, VarTable};
use polyauto::expr::{format_poly, parse_map_file, MapFile};
use polyauto::family::{
    build_family, counterexample_report, read_family, synthesize_target, verify_family,
    write_family, FamilyError, FamilyParams, TargetTriangular,
};
use polyauto::inverse::{formal_inverse, lemma_s, v_sequence, w_recursive};
use polyauto::planemap::{decompose, PlaneMap};
use polyauto::triangular::{check_m_triangular, SolveError};

#[derive(Parser)]
#[command(name = "polyauto", version, about = "Exact plane-automorphism calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Formal inverse of Y + Z*U(Y)^b to a given Z-order.
    Inverse {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        order: i64,
        /// Specialize u_0,...,u_a at rational values first.
        #[arg(long, value_delimiter = ',')]
        at: Option<Vec<String>>,
    },
    /// The coefficient sequence v_0, ..., v_order of the formal inverse.
    Vseq {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        order: i64,
    },
    /// The auxiliary polynomial w_{n,lambda} over the generic U.
    Wpoly {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        lambda: i64,
        #[arg(long)]
        a: u32,
    },
    /// The alternating sum S(n,k,m,r); prints 0 when the identity holds.
    Lemma {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
    },
    /// Check the m-triangular staircase form of the F-polynomial in FILE.
    CheckTriangular {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        a: u32,
        #[arg(short = 'f')]
        file: String,
    },
    /// Decompose the map in FILE and print its polydegree.
    Polydegree {
        #[arg(short = 'f')]
        file: String,
    },
    /// Compose the maps in the given files, outermost first.
    Compose {
        #[arg(short = 'f', required = true)]
        files: Vec<String>,
    },
    /// Build the degeneration family sigma_Z for a triangular target.
    BuildFamily {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        c: u32,
        /// Target map file (F: r*X + sum y_j*Y^j, G: s*Y + t).
        #[arg(long, required_unless_present = "from_x")]
        tau: Option<String>,
        /// Choose the specialization point directly and synthesize a target
        /// with r = s = 1, t = 0.
        #[arg(long = "from-x", value_delimiter = ',')]
        from_x: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-verify a build-family block (from FILE or standard input).
    VerifyFamily {
        #[arg(short = 'f')]
        file: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Polydegree arithmetic for the b = 2 order-conjecture counterexamples.
    Counterexample {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        c: u32,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn verify(msg: impl Into<String>) -> Self {
        Failure { code: 1, msg: msg.into() }
    }
    fn parse(msg: impl std::fmt::Display) -> Self {
        Failure { code: 2, msg: msg.to_string() }
    }
    fn domain(msg: impl std::fmt::Display) -> Self {
        Failure { code: 3, msg: msg.to_string() }
    }
}

fn parse_rational(src: &str) -> Result<Rational, Failure> {
    let err = || Failure::parse(format!("invalid rational '{src}'"));
    match src.trim().split_once('/') {
        Some((n, d)) => {
            let n: num::BigInt = n.trim().parse().map_err(|_| err())?;
            let d: num::BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from(
            src.trim().parse::<num::BigInt>().map_err(|_| err())?,
        )),
    }
}

fn parse_rationals(parts: &[String]) -> Result<Vec<Rational>, Failure> {
    parts.iter().map(|s| parse_rational(s)).collect()
}

fn load_map_file(path: &str) -> Result<MapFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::domain(format!("cannot read {path}: {e}")))?;
    parse_map_file(&text).map_err(|e| Failure::parse(format!("{path}: {e}")))
}

fn require_plane_map(mf: &MapFile, path: &str) -> Result<PlaneMap, Failure> {
    let f = mf
        .f
        .clone()
        .ok_or_else(|| Failure::parse(format!("{path}: missing 'F:' line")))?;
    let g = mf
        .g
        .clone()
        .ok_or_else(|| Failure::parse(format!("{path}: missing 'G:' line")))?;
    PlaneMap::new(f, g).map_err(Failure::domain)
}

/// Reads `(r X + sum y_j Y^j, s Y + t)` off a parsed map, rejecting anything
/// outside that shape.
fn extract_target(
    map: &PlaneMap,
    params: &FamilyParams,
) -> Result<TargetTriangular, Failure> {
    let table = map.table();
    let bad = |msg: &str| Failure::domain(format!("target is not triangular: {msg}"));
    for p in [&map.f, &map.g] {
        if p.uses_var(Var::Z) || !p.u_indices().is_empty() {
            return Err(bad("entries must lie in Q[X, Y]"));
        }
    }
    let r = map
        .f
        .coeff_of(Var::X, 1)
        .as_constant()
        .ok_or_else(|| bad("coefficient of X must be a nonzero rational"))?;
    let ypoly = &map.f - &MultiPoly::monomial(table, &[(Var::X, 1)], r.clone()).unwrap();
    if ypoly.uses_var(Var::X) {
        return Err(bad("F must be r*X plus a polynomial in Y"));
    }
    let s = map
        .g
        .coeff_of(Var::Y, 1)
        .as_constant()
        .ok_or_else(|| bad("G must be s*Y + t"))?;
    let t = map
        .g
        .coeff_of(Var::Y, 0)
        .as_constant()
        .ok_or_else(|| bad("G must be s*Y + t"))?;
    let expect_g = &MultiPoly::var(table, Var::Y).scale(&s)
        + &MultiPoly::constant(table, t.clone());
    if map.g != expect_g {
        return Err(bad("G must be s*Y + t"));
    }
    let top = params.target_degree() as i64;
    if ypoly.deg(Var::Y).unwrap_or(-1) != top {
        return Err(bad(&format!("F - r*X must have Y-degree exactly cd + a = {top}")));
    }
    let mut y = Vec::with_capacity(top as usize + 1);
    for j in 0..=top {
        y.push(ypoly.coeff_of(Var::Y, j).as_constant().unwrap());
    }
    Ok(TargetTriangular { r, s, t, y })
}

fn print_map(map: &PlaneMap) {
    println!("A: {}", map.table().a());
    println!("F: {}", format_poly(&map.f));
    println!("G: {}", format_poly(&map.g));
}

/// Leading witness coefficient of `(-1)^c c! v_c`, used to print the exact
/// solvability condition when the rational root does not exist.
fn q_top(a: u32, b: u32, c: u32) -> Rational {
    let table = VarTable::new(a);
    let u = MultiPoly::u_generic(&table);
    let vs = v_sequence(&u, b, c as i64);
    let mut sign_fact = factorial(c as u64);
    if c % 2 == 1 {
        sign_fact = -sign_fact;
    }
    let p = vs[c as usize].scale(&sign_fact);
    let w = check_m_triangular(&p, b * c + 1).expect("v_c scaled is triangular");
    w.q[a as usize].clone()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Inverse { a, b, order, at } => {
            if b < 1 || order < 0 {
                return Err(Failure::domain("need b >= 1 and order >= 0"));
            }
            let table = VarTable::new(a);
            let mut u = MultiPoly::u_generic(&table);
            if let Some(parts) = at {
                let xs = parse_rationals(&parts)?;
                if xs.len() != a as usize + 1 {
                    return Err(Failure::domain(format!(
                        "--at needs a + 1 = {} values",
                        a + 1
                    )));
                }
                u = u
                    .evaluate_u(&xs)
                    .map_err(|e| Failure::domain(format!("invalid --at point: {e}")))?;
            }
            let inv = formal_inverse(&u, b, order);
            for (m, coeff) in inv.coeffs.iter().enumerate() {
                println!("a{m}={}", format_poly(coeff));
            }
            Ok(())
        }
        Command::Vseq { a, b, order } => {
            if b < 1 || order < 0 {
                return Err(Failure::domain("need b >= 1 and order >= 0"));
            }
            let table = VarTable::new(a);
            let u = MultiPoly::u_generic(&table);
            for (m, v) in v_sequence(&u, b, order).iter().enumerate() {
                println!("v{m}={}", format_poly(v));
            }
            Ok(())
        }
        Command::Wpoly { n, lambda, a } => {
            let table = VarTable::new(a);
            let u = MultiPoly::u_generic(&table);
            println!("{}", format_poly(&w_recursive(n, lambda, &u)));
            Ok(())
        }
        Command::Lemma { n, k, m, r, a, b } => {
            let table = VarTable::new(a);
            let u = MultiPoly::u_generic(&table);
            let s = lemma_s(n, k, m, r, &u, b).map_err(Failure::domain)?;
            println!("{}", format_poly(&s));
            if s.is_zero() {
                Ok(())
            } else {
                Err(Failure::verify("lemma sum is nonzero"))
            }
        }
        Command::CheckTriangular { m, a, file } => {
            let mf = load_map_file(&file)?;
            if mf.a != a {
                return Err(Failure::domain(format!(
                    "file declares A: {} but --a is {a}",
                    mf.a
                )));
            }
            let p = mf
                .f
                .ok_or_else(|| Failure::parse(format!("{file}: missing 'F:' line")))?;
            if p.uses_var(Var::X) || p.uses_var(Var::Z) {
                return Err(Failure::domain("polynomial must lie in R[Y]"));
            }
            match check_m_triangular(&p, m) {
                Ok(w) => {
                    println!("triangular=true");
                    println!("d={}", w.d);
                    println!("m={}", w.m);
                    let qs: Vec<String> = w.q.iter().map(|q| q.to_string()).collect();
                    println!("q={}", qs.join(","));
                    for (i, res) in w.residuals.iter().enumerate() {
                        println!("P{}={}", w.d - a as i64 + i as i64, format_poly(res));
                    }
                    Ok(())
                }
                Err(fail) => {
                    println!("triangular=false");
                    println!("reason={fail}");
                    Err(Failure::verify(fail.to_string()))
                }
            }
        }
        Command::Polydegree { file } => {
            let mf = load_map_file(&file)?;
            let map = require_plane_map(&mf, &file)?;
            let fac = decompose(&map).map_err(Failure::verify_from_decompose)?;
            println!("{}", fac.polydegree);
            Ok(())
        }
        Command::Compose { files } => {
            let mut maps = Vec::new();
            for path in &files {
                let mf = load_map_file(path)?;
                maps.push(require_plane_map(&mf, path)?);
            }
            let mut acc = maps[0].clone();
            for inner in &maps[1..] {
                acc = acc.compose(inner).map_err(Failure::domain)?;
            }
            print_map(&acc);
            Ok(())
        }
        Command::BuildFamily { a, b, c, tau, from_x, seed: _ } => {
            if a < 2 || b < 2 || c < 1 {
                return Err(Failure::domain("need a >= 2, b >= 2, c >= 1"));
            }
            let params = FamilyParams::new(a, b, c);
            let tau = match (tau, from_x) {
                (_, Some(parts)) => {
                    let xs = parse_rationals(&parts)?;
                    synthesize_target(
                        &params,
                        &xs,
                        Rational::one(),
                        Rational::one(),
                        Rational::zero(),
                        &[],
                    )
                    .map_err(Failure::domain)?
                }
                (Some(path), None) => {
                    let mf = load_map_file(&path)?;
                    if mf.a != a {
                        return Err(Failure::domain(format!(
                            "{path} declares A: {} but --a is {a}",
                            mf.a
                        )));
                    }
                    let map = require_plane_map(&mf, &path)?;
                    extract_target(&map, &params)?
                }
                (None, None) => unreachable!("clap enforces --tau or --from-x"),
            };
            match build_family(&params, &tau) {
                Ok(res) => {
                    print!("{}", write_family(&res, &tau));
                    Ok(())
                }
                Err(FamilyError::Solve(SolveError::NoRationalRoot { m, radicand })) => {
                    let qt = q_top(a, b, c);
                    let mut sample = &tau.r * &qt / factorial(c as u64);
                    if c % 2 == 1 {
                        sample = -sample;
                    }
                    Err(Failure::domain(format!(
                        "no rational {m}-th root of {radicand}; the construction needs an \
                         algebraically closed field here. Solvability requires \
                         y_{top} = r*q_top*(-1)^c*k^{m}/c! for rational k; \
                         with k = 1 a valid choice is y_{top} = {sample}.",
                        top = params.target_degree(),
                    )))
                }
                Err(e) => Err(Failure::domain(e)),
            }
        }
        Command::VerifyFamily { file, seed } => {
            let text = match file {
                Some(path) => std::fs::read_to_string(&path)
                    .map_err(|e| Failure::domain(format!("cannot read {path}: {e}")))?,
                None => {
                    let mut buf = String::new();
                    std::io::stdin()
                        .read_to_string(&mut buf)
                        .map_err(|e| Failure::domain(format!("cannot read stdin: {e}")))?;
                    buf
                }
            };
            let (res, tau) = read_family(&text).map_err(Failure::parse)?;
            let report = verify_family(&res, &tau, seed);
            print!("{}", report.render());
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::verify("one or more checks failed"))
            }
        }
        Command::Counterexample { a, c } => {
            if a < 2 || c < 1 {
                return Err(Failure::domain("need a >= 2 and c >= 1"));
            }
            print!("{}", counterexample_report(a, c).render());
            Ok(())
        }
    }
}

impl Failure {
    fn verify_from_decompose(e: polyauto::planemap::DecomposeError) -> Self {
        Failure::verify(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
