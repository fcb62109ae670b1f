//! Vertex weights: bracket functions, Mikhalkin multiplicity and the two
//! collinear-cycle functions.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{rat, rat_frac, Laurent, RationalFunction};
use crate::lattice::Point;

pub type SmallRational = Ratio<i64>;

fn z(e: i64) -> Laurent {
    Laurent::z(e)
}

/// `z^a + sign * z^b`.
fn binom(a: i64, sign: i64, b: i64) -> Laurent {
    z(a) + Laurent::monomial(rat(sign), b)
}

fn rf(num: Laurent, den: Laurent) -> RationalFunction {
    RationalFunction::new(num, den).expect("nonzero denominator")
}

/// `(z^mu - z^-mu) / (z - z^-1)`.
pub fn bracket_minus(mu: i64) -> Result<RationalFunction> {
    if mu <= 0 {
        return Err(Error::InvalidInput(format!("[{mu}]^- needs a positive argument")));
    }
    Ok(RationalFunction::from_laurent(Laurent::from_terms(
        (0..mu).map(|k| (mu - 1 - 2 * k, rat(1))),
    )))
}

/// `(z^mu + z^-mu) / (z + z^-1)`.
pub fn bracket_plus(mu: i64) -> Result<RationalFunction> {
    if mu < 0 {
        return Err(Error::InvalidInput(format!("[{mu}]^+ needs a nonnegative argument")));
    }
    Ok(rf(binom(mu, 1, -mu), binom(1, 1, -1)))
}

/// `(1/mu) (z^mu - (-1)^mu z^-mu) / (z - (-1)^mu z^-1)`.
pub fn bracket_star(mu: i64) -> Result<RationalFunction> {
    if mu <= 0 {
        return Err(Error::InvalidInput(format!("[{mu}]^* needs a positive argument")));
    }
    let s = if mu % 2 == 0 { 1 } else { -1 };
    Ok(rf(binom(mu, -s, -mu), binom(1, -s, -1)).scale(&rat_frac(1, mu)))
}

pub fn mikhalkin_vertex_weight(e1: Point, e2: Point) -> u64 {
    e1.cross(e2).unsigned_abs()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FragmentParams {
    pub m: u32,
    pub nu1: SmallRational,
    pub nu2: Option<SmallRational>,
}

impl FragmentParams {
    pub fn unbounded(m: u32, nu: SmallRational) -> Self {
        Self { m, nu1: nu, nu2: None }
    }

    pub fn bounded(m: u32, nu1: SmallRational, nu2: SmallRational) -> Self {
        Self { m, nu1, nu2: Some(nu2) }
    }

    pub fn is_bounded(&self) -> bool {
        self.nu2.is_some()
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidInput("fragment edge weight must be positive".into()));
        }
        let m = SmallRational::from_integer(self.m as i64);
        for nu in std::iter::once(&self.nu1).chain(self.nu2.as_ref()) {
            if *nu <= SmallRational::from_integer(0) {
                return Err(Error::InvalidInput(format!("fragment parameter {nu} is not positive")));
            }
            if !(nu * m).is_integer() {
                return Err(Error::InvalidInput(format!("{nu} * {} is not an integer", self.m)));
            }
        }
        Ok(())
    }
}

/// Exponents are rational multiples of `1/l`; `Z` produces `w`-monomials
/// with `z = w^l`.
struct Root {
    l: i64,
}

impl Root {
    fn for_params(nus: &[SmallRational]) -> Self {
        Self { l: nus.iter().fold(1i64, |acc, nu| acc.lcm(nu.denom())) }
    }

    fn exp(&self, q: SmallRational) -> i64 {
        let e = q * SmallRational::from_integer(self.l);
        debug_assert!(e.is_integer());
        e.to_integer()
    }

    /// `z^q - z^-q`.
    fn sinh(&self, q: SmallRational) -> Laurent {
        let e = self.exp(q);
        binom(e, -1, -e)
    }

    /// `z^q + z^-q`.
    fn cosh(&self, q: SmallRational) -> Laurent {
        let e = self.exp(q);
        binom(e, 1, -e)
    }
}

fn int(n: i64) -> SmallRational {
    SmallRational::from_integer(n)
}

fn psi1_raw(m: u32, nu: SmallRational) -> Result<RationalFunction> {
    let w = Root::for_params(&[nu]);
    let mm = int(m as i64);
    let one = int(1);
    let t1 = rf(w.sinh(nu * mm - one), w.sinh(one));
    let t2 = rf(w.sinh(nu * mm - mm), w.sinh(mm)).scale(&rat(m as i64));
    let t3 = rf(w.sinh(nu * mm - nu), w.sinh(nu));
    let pre = rf(Laurent::constant(rat(2)), &w.sinh(one).pow(2) * &w.cosh(one));
    let body = &(&t1 - &t2) - &t3;
    Ok((&pre * &body).contract_var(w.l)?)
}

fn psi2_raw(m: u32, nu1: SmallRational, nu2: SmallRational) -> Result<RationalFunction> {
    let w = Root::for_params(&[nu1, nu2]);
    let mm = int(m as i64);
    let one = int(1);
    let s2 = w.sinh(nu2 * mm);
    let s1 = w.sinh(nu1 * mm);
    let a = rf(&s2 * &w.sinh(nu1 * mm - one), w.sinh(one)).scale(&rat(2));
    let b = rf(&s2 * &w.sinh(nu1 * mm - mm), w.sinh(mm)).scale(&rat(2 * m as i64));
    let c = RationalFunction::from_laurent(&s1 * &w.cosh(nu2 * mm)).scale(&rat(m as i64 - 1));
    let d = rf(&s2 * &w.sinh(nu1 * mm - nu1), w.sinh(nu1)).scale(&rat(2));
    let e = rf(&s1 * &w.sinh(nu2 * mm - nu2), w.sinh(nu2)).scale(&rat(2));
    let pre = rf(Laurent::one(), &w.sinh(one).pow(3) * &w.cosh(one));
    let body = &(&(&(&a - &b) + &c) - &d) - &e;
    Ok((&pre * &body).contract_var(w.l)?)
}

fn cache() -> &'static RwLock<HashMap<FragmentParams, RationalFunction>> {
    static CACHE: OnceLock<RwLock<HashMap<FragmentParams, RationalFunction>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Collinear-cycle function for a fragment whose cycle edge is an end.
pub fn psi1(m: u32, nu: SmallRational) -> Result<RationalFunction> {
    fragment_weight(&FragmentParams::unbounded(m, nu))
}

/// Collinear-cycle function for a fragment whose cycle edge is bounded.
pub fn psi2(m: u32, nu1: SmallRational, nu2: SmallRational) -> Result<RationalFunction> {
    fragment_weight(&FragmentParams::bounded(m, nu1, nu2))
}

/// Memoized dispatch on the fragment kind.
pub fn fragment_weight(p: &FragmentParams) -> Result<RationalFunction> {
    p.validate()?;
    if let Some(v) = cache().read().unwrap().get(p) {
        return Ok(v.clone());
    }
    let v = match p.nu2 {
        None => psi1_raw(p.m, p.nu1)?,
        Some(nu2) => psi2_raw(p.m, p.nu1, nu2)?,
    };
    cache().write().unwrap().insert(p.clone(), v.clone());
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{Gaussian, Limit, SpecialPoint};

    fn at1(f: &RationalFunction) -> crate::exactmath::Rational {
        match f.limit(SpecialPoint::One) {
            Limit::Finite(g) => {
                assert!(g.is_real());
                g.re
            }
            Limit::Pole(k) => panic!("pole of order {k} at 1"),
        }
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(bracket_minus(1).unwrap(), RationalFunction::one());
        assert_eq!(bracket_minus(2).unwrap().to_laurent().unwrap(), binom(1, 1, -1));
        assert_eq!(at1(&bracket_minus(3).unwrap()), rat(3));
        assert!(bracket_minus(0).is_err());
        assert_eq!(bracket_plus(1).unwrap(), RationalFunction::one());
        assert_eq!(bracket_plus(0).unwrap(), rf(Laurent::constant(rat(2)), binom(1, 1, -1)));
        assert_eq!(bracket_star(1).unwrap(), RationalFunction::one());
        assert_eq!(
            bracket_star(2).unwrap().to_laurent().unwrap(),
            binom(1, 1, -1).scale(&rat_frac(1, 2))
        );
        assert_eq!(at1(&bracket_star(3).unwrap()), rat_frac(1, 3));
        assert!(bracket_star(0).is_err());
        for mu in 0..8 {
            assert_eq!(at1(&bracket_plus(mu).unwrap()), rat(1));
        }
    }

    #[test]
    fn bracket_minus_matches_quotient() {
        for mu in 1..10 {
            assert_eq!(bracket_minus(mu).unwrap(), rf(binom(mu, -1, -mu), binom(1, -1, -1)));
        }
    }

    #[test]
    fn parity() {
        for mu in 1..9i64 {
            let even = mu % 2 == 1;
            for f in [bracket_minus(mu).unwrap(), bracket_star(mu).unwrap(), bracket_plus(mu).unwrap()] {
                let expect = if even { f.clone() } else { -&f };
                assert_eq!(f.reflect(), expect, "mu = {mu}");
            }
        }
    }

    #[test]
    fn mikhalkin() {
        use crate::lattice::pt;
        assert_eq!(mikhalkin_vertex_weight(pt(1, 0), pt(0, 1)), 1);
        assert_eq!(mikhalkin_vertex_weight(pt(2, 0), pt(0, 3)), 6);
        assert_eq!(mikhalkin_vertex_weight(pt(1, 1), pt(2, 2)), 0);
    }

    #[test]
    fn psi_examples() {
        for nu in 1..5 {
            assert!(psi1(1, int(nu)).unwrap().is_zero());
            assert!(psi2(1, int(nu), int(2)).unwrap().is_zero());
        }
        assert_eq!(psi1(2, int(2)).unwrap(), bracket_plus(0).unwrap());
        assert_eq!(at1(&psi1(2, int(2)).unwrap()), rat(1));
    }

    #[test]
    fn psi_limits_at_one() {
        for m in 1..=6i64 {
            for nu in 1..=6i64 {
                let expect = rat_frac(nu * (nu - 1) * m * (m * m - 1), 12);
                assert_eq!(at1(&psi1(m as u32, int(nu)).unwrap()), expect, "m={m} nu={nu}");
            }
        }
        for m in 1..=4i64 {
            for a in 1..=4i64 {
                for b in 1..=4i64 {
                    let expect = rat_frac(a * b * (a + b - 1) * m * m * (m * m - 1), 12);
                    let f = psi2(m as u32, int(a), int(b)).unwrap();
                    assert_eq!(at1(&f), expect);
                    assert_eq!(f, psi2(m as u32, int(b), int(a)).unwrap());
                }
            }
        }
    }

    #[test]
    fn fractional_nu_reduces_to_integral_exponents() {
        let f = psi1(2, SmallRational::new(3, 2)).unwrap();
        assert!(f.num().terms().count() > 0);
        // limit at one still follows the closed form
        let nu = SmallRational::new(3, 2);
        let expect = nu * (nu - int(1)) * int(2) * int(3) / int(12);
        assert_eq!(
            f.limit(SpecialPoint::One),
            Limit::Finite(Gaussian::real(rat_frac(*expect.numer(), *expect.denom())))
        );
    }

    #[test]
    fn invalid_fragments() {
        assert!(psi1(0, int(1)).is_err());
        assert!(psi1(2, SmallRational::new(1, 3)).is_err());
        assert!(psi1(2, int(0)).is_err());
    }
}
