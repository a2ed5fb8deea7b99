//! Plane polynomial maps: composition, Jacobian, the tame factorization into
//! affine and triangular factors, polydegree, and the mod-Z limit.

use std::fmt;

use num::Zero;
use thiserror::Error;

use crate::algebra::{AlgebraError, MultiPoly, Rational, Var, VarTable};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PlaneMapError {
    #[error("ring mismatch between map components")]
    RingMismatch,
    #[error("negative Z power: the mod-Z limit does not exist")]
    NegativeZPower,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("decomposition requires rational coefficients (no Z or u variables)")]
    NonNumeric,
}

/// Ordered pair `(f, g)` of polynomials in `X, Y` (optionally `Z`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PlaneMap {
    pub f: MultiPoly,
    pub g: MultiPoly,
}

impl PlaneMap {
    pub fn new(f: MultiPoly, g: MultiPoly) -> Result<Self, PlaneMapError> {
        if f.table() != g.table() {
            return Err(PlaneMapError::RingMismatch);
        }
        Ok(PlaneMap { f, g })
    }

    pub fn identity(table: &VarTable) -> Self {
        PlaneMap {
            f: MultiPoly::var(table, Var::X),
            g: MultiPoly::var(table, Var::Y),
        }
    }

    /// The involution `pi = (Y, X)`.
    pub fn swap(table: &VarTable) -> Self {
        PlaneMap {
            f: MultiPoly::var(table, Var::Y),
            g: MultiPoly::var(table, Var::X),
        }
    }

    pub fn table(&self) -> &VarTable {
        self.f.table()
    }

    /// `self` applied after `inner`: components of `inner` are substituted
    /// into `self`. Composition lists act outermost-first.
    pub fn compose(&self, inner: &PlaneMap) -> Result<PlaneMap, PlaneMapError> {
        let f = self.f.substitute_xy(&inner.f, &inner.g)?;
        let g = self.g.substitute_xy(&inner.f, &inner.g)?;
        Ok(PlaneMap { f, g })
    }

    /// `df/dX * dg/dY - df/dY * dg/dX`, exact.
    pub fn jacobian(&self) -> MultiPoly {
        let fx = self.f.derivative(Var::X).expect("X is not Laurent");
        let fy = self.f.derivative(Var::Y).expect("Y is not Laurent");
        let gx = self.g.derivative(Var::X).expect("X is not Laurent");
        let gy = self.g.derivative(Var::Y).expect("Y is not Laurent");
        &(&fx * &gy) - &(&fy * &gx)
    }

    /// Max total `(X, Y)`-degree over both components; 0 for constant maps.
    pub fn degree(&self) -> i64 {
        self.f
            .total_degree_xy()
            .unwrap_or(0)
            .max(self.g.total_degree_xy().unwrap_or(0))
    }

    pub fn is_z_free(&self) -> bool {
        !self.f.uses_var(Var::Z) && !self.g.uses_var(Var::Z)
    }

    /// Image modulo `Z`: errors on negative `Z`-exponents, drops `Z`-positive
    /// terms, and clears the `Z` Laurent flag on the result.
    pub fn limit_mod_z(&self) -> Result<PlaneMap, PlaneMapError> {
        let cut = |p: &MultiPoly| -> Result<MultiPoly, PlaneMapError> {
            if p.min_exp(Var::Z).is_some_and(|e| e < 0) {
                return Err(PlaneMapError::NegativeZPower);
            }
            Ok(p.coeff_of(Var::Z, 0).cast_laurent_z(false)?)
        };
        Ok(PlaneMap {
            f: cut(&self.f)?,
            g: cut(&self.g)?,
        })
    }

    /// Specialize `Z := z0` (nonzero, so negative powers are fine) and clear
    /// the `Z` Laurent flag.
    pub fn specialize_z(&self, z0: &Rational) -> Result<PlaneMap, PlaneMapError> {
        assert!(!z0.is_zero(), "specialization point must be nonzero");
        Ok(PlaneMap {
            f: self.f.evaluate_var(Var::Z, z0)?.cast_laurent_z(false)?,
            g: self.g.evaluate_var(Var::Z, z0)?.cast_laurent_z(false)?,
        })
    }
}

impl fmt::Display for PlaneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.f, self.g)
    }
}

/// Finite sequence of triangular-factor degrees, each >= 2; empty for affine.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polydegree(Vec<u64>);

impl Polydegree {
    pub fn new(entries: Vec<u64>) -> Self {
        assert!(entries.iter().all(|&d| d >= 2), "polydegree entries must be >= 2");
        Polydegree(entries)
    }

    pub fn empty() -> Self {
        Polydegree(Vec::new())
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Friedland-Milnor dimension `d_1 + ... + d_l + 6`.
    pub fn dimension(&self) -> u64 {
        self.0.iter().sum::<u64>() + 6
    }
}

impl fmt::Display for Polydegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("preceq is defined for length-2 and length-3 sequences, got length {0}")]
pub struct PreceqUnsupported(pub usize);

/// Furter's order: `(d) <= (a,b)` iff `d <= a+b-1`; `(d) <= (a,b,c)` iff
/// `d <= a+b+c-2`.
pub fn preceq(d: u64, e: &Polydegree) -> Result<bool, PreceqUnsupported> {
    let s: u64 = e.entries().iter().sum();
    match e.len() {
        2 => Ok(d <= s - 1),
        3 => Ok(d <= s - 2),
        n => Err(PreceqUnsupported(n)),
    }
}

#[derive(Clone, Debug)]
pub enum Factor {
    Affine(PlaneMap),
    Triangular(PlaneMap),
}

impl Factor {
    pub fn map(&self) -> &PlaneMap {
        match self {
            Factor::Affine(m) | Factor::Triangular(m) => m,
        }
    }
}

/// Factorization into affine and triangular factors, outermost first.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub factors: Vec<Factor>,
    pub polydegree: Polydegree,
}

impl Factorization {
    pub fn recompose(&self, table: &VarTable) -> Result<PlaneMap, PlaneMapError> {
        // Fold innermost-first so large intermediate maps are only ever
        // raised to the small exponents of the individual factors.
        let mut acc = PlaneMap::identity(table);
        for factor in self.factors.iter().rev() {
            acc = factor.map().compose(&acc)?;
        }
        Ok(acc)
    }
}

/// `lf == c * lg_pow` for a scalar `c`?
fn scalar_ratio(lf: &MultiPoly, lg_pow: &MultiPoly) -> Option<Rational> {
    let (mono, coeff) = lg_pow.leading_term()?;
    let mono_spec: Vec<(Var, i64)> = (0..lf.table().nvars())
        .map(|s| (lf.table().var_at(s), mono.0[s]))
        .collect();
    let c = lf.coeff_rat(&mono_spec) / coeff;
    if c.is_zero() {
        return None;
    }
    if lf == &lg_pow.scale(&c) {
        Some(c)
    } else {
        None
    }
}

/// Greedy leading-form reduction. Peels the outermost factor repeatedly:
/// monomial subtractions against the same component merge into a single
/// triangular factor, `pi` swaps are recorded, and the residue must end
/// affine. The recorded polydegree lists triangular degrees outermost-first.
pub fn decompose(sigma: &PlaneMap) -> Result<Factorization, DecomposeError> {
    let table = sigma.table().clone();
    for p in [&sigma.f, &sigma.g] {
        if p.uses_var(Var::Z) || !p.u_indices().is_empty() {
            return Err(DecomposeError::NonNumeric);
        }
    }
    match sigma.jacobian().as_constant() {
        Some(c) if !c.is_zero() => {}
        _ => {
            return Err(DecomposeError::NotAutomorphism(
                "Jacobian is not a nonzero constant".into(),
            ))
        }
    }
    let mut f = sigma.f.clone();
    let mut g = sigma.g.clone();
    let mut factors: Vec<Factor> = Vec::new();
    let mut polydeg: Vec<u64> = Vec::new();
    let mut chain: Option<MultiPoly> = None;
    // Powers of g, valid while g is unchanged (cleared on swap).
    let mut gpow: Vec<MultiPoly> = Vec::new();

    let flush = |chain: &mut Option<MultiPoly>,
                 factors: &mut Vec<Factor>,
                 polydeg: &mut Vec<u64>| {
        if let Some(p) = chain.take() {
            let deg = p.deg(Var::Y).unwrap_or(0);
            let map = PlaneMap {
                f: &MultiPoly::var(&table, Var::X) + &p,
                g: MultiPoly::var(&table, Var::Y),
            };
            if deg >= 2 {
                polydeg.push(deg as u64);
                factors.push(Factor::Triangular(map));
            } else {
                factors.push(Factor::Affine(map));
            }
        }
    };

    loop {
        let df = match f.total_degree_xy() {
            Some(d) if d >= 1 => d,
            _ => {
                return Err(DecomposeError::NotAutomorphism(
                    "a component is constant".into(),
                ))
            }
        };
        let dg = match g.total_degree_xy() {
            Some(d) if d >= 1 => d,
            _ => {
                return Err(DecomposeError::NotAutomorphism(
                    "a component is constant".into(),
                ))
            }
        };
        if df <= 1 && dg <= 1 {
            break;
        }
        if df < dg {
            flush(&mut chain, &mut factors, &mut polydeg);
            factors.push(Factor::Affine(PlaneMap::swap(&table)));
            std::mem::swap(&mut f, &mut g);
            gpow.clear();
            continue;
        }
        if df % dg != 0 {
            return Err(DecomposeError::NotAutomorphism(
                "leading degrees fail divisibility".into(),
            ));
        }
        let e = df / dg;
        if gpow.is_empty() {
            gpow.push(MultiPoly::one(&table));
            gpow.push(g.clone());
        }
        while (gpow.len() as i64) <= e {
            let next = gpow.last().unwrap() * &g;
            gpow.push(next);
        }
        let lf = f.leading_form_xy();
        let lg_pow = gpow[e as usize].leading_form_xy();
        let c = scalar_ratio(&lf, &lg_pow).ok_or_else(|| {
            DecomposeError::NotAutomorphism(
                "leading form is not a scalar power of the other component".into(),
            )
        })?;
        f = &f - &gpow[e as usize].scale(&c);
        if f.total_degree_xy().unwrap_or(-1) >= df {
            return Err(DecomposeError::NotAutomorphism("reduction stalls".into()));
        }
        let step = MultiPoly::monomial(&table, &[(Var::Y, e)], c).expect("Y exponent >= 0");
        chain = Some(match chain {
            Some(p) => &p + &step,
            None => step,
        });
    }
    flush(&mut chain, &mut factors, &mut polydeg);
    let affine = PlaneMap { f, g };
    match affine.jacobian().as_constant() {
        Some(c) if !c.is_zero() => {}
        _ => {
            return Err(DecomposeError::NotAutomorphism(
                "affine residue is not invertible".into(),
            ))
        }
    }
    factors.push(Factor::Affine(affine));
    Ok(Factorization {
        factors,
        polydegree: Polydegree::new(polydeg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat_int, VarTable};
    use crate::expr::parse_poly;

    fn t2() -> VarTable {
        VarTable::new(2)
    }

    fn pm(f: &str, g: &str, table: &VarTable) -> PlaneMap {
        PlaneMap::new(
            parse_poly(f, table).unwrap(),
            parse_poly(g, table).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn compose_swap_is_involution() {
        let t = t2();
        let pi = PlaneMap::swap(&t);
        assert_eq!(pi.compose(&pi).unwrap(), PlaneMap::identity(&t));
    }

    #[test]
    fn compose_direct_substitution() {
        let t = t2();
        let inner = PlaneMap::swap(&t)
            .compose(&pm("X + Y^2", "Y", &t))
            .unwrap();
        let sigma = pm("X + Y^3", "Y", &t).compose(&inner).unwrap();
        assert_eq!(sigma, pm("Y + (X + Y^2)^3", "X + Y^2", &t));
    }

    #[test]
    fn compose_affines_stays_affine() {
        let t = t2();
        let a1 = pm("2*X + Y + 1", "X - Y", &t);
        let a2 = pm("X - 3", "X + Y", &t);
        assert_eq!(a1.compose(&a2).unwrap().degree(), 1);
    }

    #[test]
    fn jacobian_cases() {
        let t = t2();
        assert_eq!(
            pm("X + Y^4 - 2*Y", "Y", &t).jacobian().as_constant(),
            Some(rat_int(1))
        );
        assert_eq!(
            PlaneMap::swap(&t).jacobian().as_constant(),
            Some(rat_int(-1))
        );
    }

    #[test]
    fn decompose_already_triangular() {
        let t = t2();
        let fac = decompose(&pm("X + Y^3", "Y", &t)).unwrap();
        assert_eq!(fac.polydegree, Polydegree::new(vec![3]));
        assert_eq!(fac.recompose(&t).unwrap(), pm("X + Y^3", "Y", &t));
    }

    #[test]
    fn decompose_two_factor_word() {
        let t = t2();
        let sigma = pm("Y + (X + Y^2)^3", "X + Y^2", &t);
        let fac = decompose(&sigma).unwrap();
        assert_eq!(fac.polydegree, Polydegree::new(vec![3, 2]));
        assert_eq!(fac.recompose(&t).unwrap(), sigma);
    }

    #[test]
    fn decompose_swapped_triangular() {
        // pi applied outermost to (X + Y^2, Y).
        let t = t2();
        let sigma = PlaneMap::swap(&t)
            .compose(&pm("X + Y^2", "Y", &t))
            .unwrap();
        assert_eq!(sigma, pm("Y", "X + Y^2", &t));
        let fac = decompose(&sigma).unwrap();
        assert_eq!(fac.polydegree, Polydegree::new(vec![2]));
        assert_eq!(fac.recompose(&t).unwrap(), sigma);
    }

    #[test]
    fn decompose_rejects_non_automorphisms() {
        let t = t2();
        // Jacobian 2XY, non-constant.
        assert!(matches!(
            decompose(&pm("X^2", "Y", &t)),
            Err(DecomposeError::NotAutomorphism(_))
        ));
        // Jacobian -2Y, non-constant (not injective).
        assert!(matches!(
            decompose(&pm("X + Y^2", "X", &t)),
            Err(DecomposeError::NotAutomorphism(_))
        ));
    }

    #[test]
    fn decompose_affine_is_empty() {
        let t = t2();
        let fac = decompose(&pm("2*X + Y + 1", "X - Y", &t)).unwrap();
        assert!(fac.polydegree.is_empty());
    }

    #[test]
    fn limit_mod_z_cases() {
        let tz = VarTable::new(2).with_laurent_z();
        let t = VarTable::new(2);
        let sigma = pm("X + Z*Y^3", "Y", &tz);
        assert_eq!(sigma.limit_mod_z().unwrap(), pm("X", "Y", &t));
        let bad = pm("Z^-1*X", "Y", &tz);
        assert_eq!(bad.limit_mod_z().unwrap_err(), PlaneMapError::NegativeZPower);
        // Z-free maps are their own limit.
        let free = pm("X + Y^2", "Y", &t);
        assert_eq!(free.limit_mod_z().unwrap(), free);
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(Polydegree::new(vec![5]).dimension(), 11);
        assert_eq!(Polydegree::new(vec![2, 2, 2]).dimension(), 12);
        assert_eq!(Polydegree::empty().dimension(), 6);
    }

    #[test]
    fn preceq_cases() {
        assert_eq!(preceq(5, &Polydegree::new(vec![2, 2, 2])), Ok(false));
        assert_eq!(preceq(4, &Polydegree::new(vec![2, 2, 2])), Ok(true));
        assert_eq!(preceq(3, &Polydegree::new(vec![2, 2])), Ok(true));
        assert!(preceq(3, &Polydegree::new(vec![2])).is_err());
    }
}
