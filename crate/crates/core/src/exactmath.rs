//! Exact Laurent polynomials and rational functions over the rationals.
//!
//! Everything here is exact: coefficients are [`BigRational`]s and rational
//! functions are kept in a reduced normal form so that equality is
//! structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MathError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational function does not reduce to a Laurent polynomial")]
    NotLaurent,
    #[error("odd exponent {0} where an even function was expected")]
    NotEven(i64),
    #[error("exponent {0} is not divisible by {1}")]
    NotDivisible(i64, i64),
    #[error("Laurent polynomial is not symmetric under y -> 1/y")]
    NotSymmetric,
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats integers without a denominator and everything else as `n/d`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, MathError> {
    let err = || MathError::Parse(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(t.parse().map_err(|_| err())?)),
    }
}

/// A Laurent polynomial `sum c_e z^e` with finitely many nonzero terms.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Laurent {
    terms: BTreeMap<i64, Rational>,
}

impl Laurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Rational, e: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// `z^e`.
    pub fn z(e: i64) -> Self {
        Self::monomial(Rational::one(), e)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in it {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, e: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: i64) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `f(-z)`.
    pub fn reflect(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, if e % 2 == 0 { c.clone() } else { -c }))
                .collect(),
        }
    }

    /// `f(1/z)`.
    pub fn invert_var(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Replaces `z^e` by `z^(e/k)`; fails unless every exponent is a multiple of `k`.
    pub fn contract_var(&self, k: i64) -> Result<Self, MathError> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e % k != 0 {
                return Err(MathError::NotDivisible(*e, k));
            }
            terms.insert(e / k, c.clone());
        }
        Ok(Self { terms })
    }

    pub fn eval(&self, z: &Rational) -> Result<Rational, MathError> {
        if z.is_zero() && self.min_exp().is_some_and(|e| e < 0) {
            return Err(MathError::DivisionByZero);
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            acc += c * pow_rational(z, *e);
        }
        Ok(acc)
    }

    pub fn eval_gaussian(&self, z: &Gaussian) -> Result<Gaussian, MathError> {
        let mut acc = Gaussian::zero();
        for (e, c) in &self.terms {
            let p = z.powi(*e)?;
            acc = &acc + &p.scale(c);
        }
        Ok(acc)
    }

    /// Splits off the lowest power: `self = z^shift * dense(z)` with `dense(0) != 0`.
    fn to_dense(&self) -> (i64, Vec<Rational>) {
        let Some(lo) = self.min_exp() else {
            return (0, Vec::new());
        };
        let hi = self.max_exp().unwrap();
        let mut v = vec![Rational::zero(); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            v[(e - lo) as usize] = c.clone();
        }
        (lo, v)
    }

    fn from_dense(shift: i64, v: &[Rational]) -> Self {
        Self::from_terms(v.iter().enumerate().map(|(i, c)| (i as i64 + shift, c.clone())))
    }

    pub fn to_json(&self, var: &str) -> LaurentJson<'_> {
        LaurentJson { var: var.to_string(), poly: self }
    }
}

fn pow_rational(z: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(z.clone(), e as usize)
    } else {
        num_traits::pow(z.recip(), (-e) as usize)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(f, self, "z")
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent({self})")
    }
}

fn fmt_poly(f: &mut fmt::Formatter<'_>, p: &Laurent, var: &str) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for (e, c) in p.terms.iter().rev() {
        let neg = c.is_negative();
        let a = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let coeff = format_rational(&a);
        match *e {
            0 => write!(f, "{coeff}")?,
            _ => {
                if !a.is_one() {
                    write!(f, "{coeff}*")?;
                }
                if *e == 1 {
                    write!(f, "{var}")?;
                } else {
                    write!(f, "{var}^{e}")?;
                }
            }
        }
    }
    Ok(())
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Laurent, Add add, Sub sub, Mul mul);

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        -&self
    }
}

/// JSON view `{"var":..,"terms":{"e":"c",..}}`, exponents descending.
pub struct LaurentJson<'a> {
    var: String,
    poly: &'a Laurent,
}

struct TermsView<'a>(&'a Laurent);

impl Serialize for TermsView<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.0.terms.len()))?;
        for (e, c) in self.0.terms.iter().rev() {
            m.serialize_entry(&e.to_string(), &format_rational(c))?;
        }
        m.end()
    }
}

impl Serialize for LaurentJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Laurent", 2)?;
        st.serialize_field("var", &self.var)?;
        st.serialize_field("terms", &TermsView(self.poly))?;
        st.end()
    }
}

#[derive(Deserialize)]
struct RawLaurent {
    #[serde(default)]
    var: Option<String>,
    terms: BTreeMap<String, serde_json::Value>,
}

fn laurent_from_raw(raw: RawLaurent) -> Result<(Option<String>, Laurent), String> {
    let mut out = Laurent::zero();
    for (k, v) in raw.terms {
        let e: i64 = k.trim().parse().map_err(|_| format!("bad exponent {k:?}"))?;
        let c = match v {
            serde_json::Value::String(s) => parse_rational(&s).map_err(|e| e.to_string())?,
            serde_json::Value::Number(n) => {
                let i = n.as_i64().ok_or_else(|| format!("non-integer coefficient {n}"))?;
                rat(i)
            }
            other => return Err(format!("bad coefficient {other}")),
        };
        out.add_term(e, c);
    }
    Ok((raw.var, out))
}

/// Parses `{"var":..,"terms":{..}}`, returning the variable name if present.
pub fn laurent_from_json(v: &serde_json::Value) -> Result<(Option<String>, Laurent), String> {
    let raw: RawLaurent = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
    laurent_from_raw(raw)
}

impl Serialize for Laurent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json("z").serialize(s)
    }
}

impl<'de> Deserialize<'de> for Laurent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawLaurent::deserialize(d)?;
        laurent_from_raw(raw).map(|(_, p)| p).map_err(de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// dense polynomial helpers, coefficients low to high

fn trim(v: &mut Vec<Rational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = &b[db];
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = &r[r.len() - 1] / lead;
        for (i, bc) in b.iter().enumerate() {
            let t = &r[k + i] - &c * bc;
            r[k + i] = t;
        }
        q[k] = c;
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

fn make_monic(v: &mut [Rational]) {
    if let Some(l) = v.last().cloned() {
        for c in v.iter_mut() {
            *c = &*c / &l;
        }
    }
}

fn poly_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
        make_monic(&mut y);
    }
    make_monic(&mut x);
    x
}

/// Number of times the monic `q` divides `p`, and the cofactor.
fn split_factor(p: &[Rational], q: &[Rational]) -> (u32, Vec<Rational>) {
    let mut cur = p.to_vec();
    let mut k = 0;
    loop {
        let (quo, rem) = poly_divrem(&cur, q);
        if !rem.is_empty() || quo.is_empty() {
            return (k, cur);
        }
        cur = quo;
        k += 1;
    }
}

// ---------------------------------------------------------------------------
// Gaussian rationals

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gaussian {
    pub re: Rational,
    pub im: Rational,
}

impl Gaussian {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self::new(re, Rational::zero())
    }

    pub fn zero() -> Self {
        Self::real(Rational::zero())
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(&self.re * c, &self.im * c)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, MathError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(MathError::DivisionByZero);
        }
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn powi(&self, e: i64) -> Result<Self, MathError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }
}

impl Add for &Gaussian {
    type Output = Gaussian;
    fn add(self, r: &Gaussian) -> Gaussian {
        Gaussian::new(&self.re + &r.re, &self.im + &r.im)
    }
}

impl Mul for &Gaussian {
    type Output = Gaussian;
    fn mul(self, r: &Gaussian) -> Gaussian {
        Gaussian::new(
            &self.re * &r.re - &self.im * &r.im,
            &self.re * &r.im + &self.im * &r.re,
        )
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", format_rational(&self.re))
        } else {
            write!(f, "{} + {}*i", format_rational(&self.re), format_rational(&self.im))
        }
    }
}

// ---------------------------------------------------------------------------
// rational functions

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpecialPoint {
    One,
    MinusOne,
    I,
    MinusI,
}

impl SpecialPoint {
    pub const ALL: [SpecialPoint; 4] = [Self::One, Self::MinusOne, Self::I, Self::MinusI];

    fn value(self) -> Gaussian {
        match self {
            Self::One => Gaussian::one(),
            Self::MinusOne => Gaussian::real(-Rational::one()),
            Self::I => Gaussian::i(),
            Self::MinusI => Gaussian::i().conj(),
        }
    }

    /// Monic minimal polynomial over the rationals.
    fn min_poly(self) -> Vec<Rational> {
        match self {
            Self::One => vec![rat(-1), rat(1)],
            Self::MinusOne => vec![rat(1), rat(1)],
            Self::I | Self::MinusI => vec![rat(1), rat(0), rat(1)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Limit {
    Finite(Gaussian),
    Pole(u32),
}

impl Limit {
    pub fn finite(&self) -> Option<&Gaussian> {
        match self {
            Limit::Finite(g) => Some(g),
            Limit::Pole(_) => None,
        }
    }
}

/// `num / den` in normal form: `gcd(num, den) = 1`, `den` is a polynomial
/// with nonzero constant term and leading coefficient one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Laurent,
    den: Laurent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl RationalFunction {
    pub fn new(num: Laurent, den: Laurent) -> Result<Self, MathError> {
        if den.is_zero() {
            return Err(MathError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (a, mut n) = num.to_dense();
        let (b, mut d) = den.to_dense();
        if d.len() > 1 && n.len() > 1 {
            let g = poly_gcd(&n, &d);
            if g.len() > 1 {
                n = poly_divrem(&n, &g).0;
                d = poly_divrem(&d, &g).0;
            }
        }
        let lead = d.last().unwrap().clone();
        for c in n.iter_mut() {
            *c = &*c / &lead;
        }
        make_monic(&mut d);
        Ok(Self {
            num: Laurent::from_dense(a - b, &n),
            den: Laurent::from_dense(0, &d),
        })
    }

    pub fn zero() -> Self {
        Self { num: Laurent::zero(), den: Laurent::one() }
    }

    pub fn one() -> Self {
        Self::from_laurent(Laurent::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_laurent(Laurent::constant(c))
    }

    pub fn from_laurent(p: Laurent) -> Self {
        Self { num: p, den: Laurent::one() }
    }

    pub fn num(&self) -> &Laurent {
        &self.num
    }

    pub fn den(&self) -> &Laurent {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_laurent(&self) -> bool {
        self.den == Laurent::one()
    }

    pub fn to_laurent(&self) -> Result<Laurent, MathError> {
        if self.is_laurent() {
            Ok(self.num.clone())
        } else {
            Err(MathError::NotLaurent)
        }
    }

    pub fn recip(&self) -> Result<Self, MathError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, MathError> {
        if rhs.is_zero() {
            return Err(MathError::DivisionByZero);
        }
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn reflect(&self) -> Self {
        Self::new(self.num.reflect(), self.den.reflect()).expect("nonzero denominator")
    }

    pub fn contract_var(&self, k: i64) -> Result<Self, MathError> {
        if k == 1 {
            return Ok(self.clone());
        }
        // the normal form is unique, so a function of z^k has num and den in z^k
        Self::new(self.num.contract_var(k)?, self.den.contract_var(k)?)
    }

    pub fn eval(&self, z: &Rational) -> Result<Rational, MathError> {
        let d = self.den.eval(z)?;
        if d.is_zero() {
            return Err(MathError::DivisionByZero);
        }
        Ok(self.num.eval(z)? / d)
    }

    /// Order of vanishing at `p` (negative for a pole).
    pub fn order_at(&self, p: SpecialPoint) -> i64 {
        if self.is_zero() {
            return i64::MAX;
        }
        let q = p.min_poly();
        let (n_ord, _) = split_factor(&self.num.to_dense().1, &q);
        let (d_ord, _) = split_factor(&self.den.to_dense().1, &q);
        n_ord as i64 - d_ord as i64
    }

    pub fn limit(&self, p: SpecialPoint) -> Limit {
        if self.is_zero() {
            return Limit::Finite(Gaussian::zero());
        }
        let q = p.min_poly();
        let (shift, n) = self.num.to_dense();
        let (n_ord, n_rest) = split_factor(&n, &q);
        let (d_ord, d_rest) = split_factor(&self.den.to_dense().1, &q);
        if d_ord > n_ord {
            return Limit::Pole(d_ord - n_ord);
        }
        if n_ord > d_ord {
            return Limit::Finite(Gaussian::zero());
        }
        let pt = p.value();
        let nv = Laurent::from_dense(shift, &n_rest).eval_gaussian(&pt).expect("unit point");
        let dv = Laurent::from_dense(0, &d_rest).eval_gaussian(&pt).expect("unit point");
        Limit::Finite(&nv * &dv.inv().expect("cofactor does not vanish"))
    }
}

pub fn rf_arithmetic(
    op: ArithOp,
    a: &RationalFunction,
    b: &RationalFunction,
) -> Result<RationalFunction, MathError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, r: &RationalFunction) -> RationalFunction {
        if self.den == r.den {
            return RationalFunction::new(&self.num + &r.num, self.den.clone()).unwrap();
        }
        RationalFunction::new(&(&self.num * &r.den) + &(&r.num * &self.den), &self.den * &r.den)
            .unwrap()
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, r: &RationalFunction) -> RationalFunction {
        self + &(-r)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, r: &RationalFunction) -> RationalFunction {
        if self.is_laurent() && r.is_laurent() {
            return RationalFunction::from_laurent(&self.num * &r.num);
        }
        RationalFunction::new(&self.num * &r.num, &self.den * &r.den).unwrap()
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

forward_owned!(RationalFunction, Add add, Sub sub, Mul mul);

impl From<Laurent> for RationalFunction {
    fn from(p: Laurent) -> Self {
        Self::from_laurent(p)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_laurent() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RationalFunction", 2)?;
        st.serialize_field("num", &self.num.to_json("z"))?;
        st.serialize_field("den", &self.den.to_json("z"))?;
        st.end()
    }
}

// ---------------------------------------------------------------------------
// Laurent polynomials in y = z^2

/// A Laurent polynomial in `y`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentY(Laurent);

impl LaurentY {
    pub fn new(p: Laurent) -> Self {
        Self(p)
    }

    pub fn inner(&self) -> &Laurent {
        &self.0
    }

    pub fn at_one(&self) -> Rational {
        self.0.terms().fold(Rational::zero(), |acc, (_, c)| acc + c)
    }

    pub fn at_minus_one(&self) -> Rational {
        self.0
            .terms()
            .fold(Rational::zero(), |acc, (e, c)| if e % 2 == 0 { acc + c } else { acc - c })
    }

    pub fn is_symmetric(&self) -> bool {
        self.0 == self.0.invert_var()
    }

    /// Largest exponent of a symmetric polynomial (0 for the zero polynomial).
    pub fn symmetric_degree(&self) -> Result<i64, MathError> {
        if !self.is_symmetric() {
            return Err(MathError::NotSymmetric);
        }
        Ok(self.0.max_exp().unwrap_or(0))
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.0.terms().all(|(_, c)| c.is_integer())
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.0.terms().all(|(_, c)| !c.is_negative())
    }

    pub fn to_z(&self) -> Laurent {
        Laurent::from_terms(self.0.terms().map(|(e, c)| (2 * e, c.clone())))
    }
}

/// Rewrites an even Laurent polynomial in `z` as a polynomial in `y = z^2`.
pub fn laurent_to_y(p: &Laurent) -> Result<LaurentY, MathError> {
    let mut terms = Vec::new();
    for (e, c) in p.terms() {
        if e % 2 != 0 {
            return Err(MathError::NotEven(e));
        }
        terms.push((e / 2, c.clone()));
    }
    Ok(LaurentY(Laurent::from_terms(terms)))
}

impl fmt::Display for LaurentY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(f, &self.0, "y")
    }
}

impl fmt::Debug for LaurentY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentY({self})")
    }
}

impl Serialize for LaurentY {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.to_json("y").serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentY {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawLaurent::deserialize(d)?;
        let (var, p) = laurent_from_raw(raw).map_err(de::Error::custom)?;
        if var.as_deref().is_some_and(|v| v != "y") {
            return Err(de::Error::custom("expected a polynomial in y"));
        }
        Ok(LaurentY(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lz(terms: &[(i64, i64)]) -> Laurent {
        Laurent::from_terms(terms.iter().map(|&(e, c)| (e, rat(c))))
    }

    #[test]
    fn normal_form_cancels_common_factors() {
        // (z^2 - z^-2) / (z - z^-1) = z + z^-1
        let f = RationalFunction::new(lz(&[(2, 1), (-2, -1)]), lz(&[(1, 1), (-1, -1)])).unwrap();
        assert!(f.is_laurent());
        assert_eq!(f.to_laurent().unwrap(), lz(&[(1, 1), (-1, 1)]));
    }

    #[test]
    fn denominator_is_monic_with_constant_term() {
        let f = RationalFunction::new(lz(&[(0, 3)]), lz(&[(3, 2), (1, 2)])).unwrap();
        assert_eq!(f.den(), &lz(&[(0, 1), (2, 1)]));
        assert_eq!(f.num(), &Laurent::monomial(rat_frac(3, 2), -1));
    }

    #[test]
    fn equal_functions_compare_equal() {
        let a = RationalFunction::new(lz(&[(1, 1)]), lz(&[(2, 1), (0, 1)])).unwrap();
        let b = RationalFunction::new(lz(&[(2, 2), (0, -2)]), lz(&[(3, 2), (1, 0), (2, -2), (0, -2), (1, 2)]))
            .unwrap();
        // b = 2(z^2-1) / (2(z^3 - z^2 + z - 1)) = (z+1)(z-1)/((z-1)(z^2+1))
        assert_eq!(b, RationalFunction::new(lz(&[(1, 1), (0, 1)]), lz(&[(2, 1), (0, 1)])).unwrap());
        assert_ne!(a, b);
    }

    #[test]
    fn limits_at_special_points() {
        let plus2 = RationalFunction::new(lz(&[(0, 2)]), lz(&[(1, 1), (-1, 1)])).unwrap();
        assert_eq!(plus2.limit(SpecialPoint::One), Limit::Finite(Gaussian::one()));
        assert_eq!(plus2.limit(SpecialPoint::MinusOne), Limit::Finite(Gaussian::real(rat(-1))));
        assert_eq!(plus2.limit(SpecialPoint::I), Limit::Pole(1));
        let f = RationalFunction::new(lz(&[(2, 1), (0, 1)]), lz(&[(1, 1), (0, -1)])).unwrap();
        assert_eq!(f.limit(SpecialPoint::I), Limit::Finite(Gaussian::zero()));
        assert_eq!(f.order_at(SpecialPoint::MinusI), 1);
        assert_eq!(f.order_at(SpecialPoint::One), -1);
    }

    #[test]
    fn limit_removes_removable_singularity() {
        // (z^3 - z^-3)/(z - z^-1) has value 3 at z = 1 and 3 at z = -1
        let f = RationalFunction::new(lz(&[(3, 1), (-3, -1)]), lz(&[(1, 1), (-1, -1)])).unwrap();
        assert_eq!(f.limit(SpecialPoint::One).finite().unwrap(), &Gaussian::real(rat(3)));
        assert_eq!(f.limit(SpecialPoint::MinusOne).finite().unwrap(), &Gaussian::real(rat(3)));
        assert_eq!(f.limit(SpecialPoint::I).finite().unwrap(), &Gaussian::real(rat(-1)));
    }

    #[test]
    fn y_conversion() {
        let p = lz(&[(2, 2), (0, 12), (-2, 2)]);
        let y = laurent_to_y(&p).unwrap();
        assert_eq!(y.at_one(), rat(16));
        assert_eq!(y.at_minus_one(), rat(8));
        assert_eq!(y.symmetric_degree().unwrap(), 1);
        assert_eq!(y.to_z(), p);
        assert_eq!(laurent_to_y(&lz(&[(1, 1)])), Err(MathError::NotEven(1)));
    }

    #[test]
    fn json_is_descending_and_round_trips() {
        let y = LaurentY::new(lz(&[(1, 2), (0, 12), (-1, 2)]));
        let s = serde_json::to_string(&y).unwrap();
        assert_eq!(s, r#"{"var":"y","terms":{"1":"2","0":"12","-1":"2"}}"#);
        let back: LaurentY = serde_json::from_str(&s).unwrap();
        assert_eq!(back, y);
        let half: LaurentY = serde_json::from_str(r#"{"var":"y","terms":{"0":"1/2"}}"#).unwrap();
        assert_eq!(half.at_one(), rat_frac(1, 2));
    }

    #[test]
    fn display() {
        assert_eq!(lz(&[(2, 1), (0, -3), (-2, 1)]).to_string(), "z^2 - 3 + z^-2");
        assert_eq!(LaurentY::new(lz(&[(1, 2), (0, 12), (-1, 2)])).to_string(), "2*y + 12 + 2*y^-1");
    }

    #[test]
    fn contract_var() {
        let f = RationalFunction::new(lz(&[(4, 1), (-4, -1)]), lz(&[(2, 1), (-2, -1)])).unwrap();
        assert_eq!(f.contract_var(2).unwrap().to_laurent().unwrap(), lz(&[(1, 1), (-1, 1)]));
        assert!(lz(&[(3, 1)]).contract_var(2).is_err());
    }
}
