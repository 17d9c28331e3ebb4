//! Exact arithmetic in `ℚ(ζ_m) = ℚ[x]/(Φ_m)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Angle, PhaseError};

pub type Rational = BigRational;

pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Dense polynomial over `ℚ`, coefficients from the constant term up.
/// Trailing zeros are always trimmed, so the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c, 1)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_ints(&[1])
    }

    /// `x^k − 1`.
    pub fn x_pow_minus_one(k: usize) -> Self {
        let mut c = vec![Rational::zero(); k + 1];
        c[0] = rat(-1, 1);
        c[k] = rat(1, 1);
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(One::is_one)
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.lead().unwrap().clone();
        let mut r = self.coeffs.clone();
        let Some(dn) = self.degree().filter(|&n| n >= dd) else {
            return (Polynomial::zero(), self.clone());
        };
        let mut q = vec![Rational::zero(); dn - dd + 1];
        for k in (0..=dn - dd).rev() {
            let c = &r[k + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (i, di) in d.coeffs.iter().enumerate() {
                r[k + i] -= &c * di;
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Polynomial::new(q), Polynomial::new(r))
    }

    pub fn eval_int(&self, x: i64) -> Rational {
        let x = rat(x, 1);
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * &x + c)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = Rational::zero();
        Polynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + rhs.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &rhs.scale(&rat(-1, 1))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.coeffs, "x")
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, coeffs: &[Rational], var: &str) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if neg {
            write!(f, "-")?;
        } else if !first {
            write!(f, "+")?;
        }
        first = false;
        match k {
            0 => write!(f, "{mag}")?,
            _ => {
                if !mag.is_one() {
                    write!(f, "{mag}")?;
                }
                write!(f, "{var}")?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

pub fn euler_phi(m: u64) -> u64 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// `Φ_m`, by dividing `x^m − 1` by `Φ_d` for every proper divisor `d` of `m`.
pub fn cyclotomic_polynomial(m: u64) -> Polynomial {
    assert!(m >= 1, "conductor must be positive");
    let mut p = Polynomial::x_pow_minus_one(m as usize);
    for d in 1..m {
        if m.is_multiple_of(d) {
            let (q, r) = p.div_rem(&cyclotomic_polynomial(d));
            debug_assert!(r.is_zero());
            p = q;
        }
    }
    p
}

/// `ℚ(ζ_m)` with the reductions `x^k mod Φ_m` for `0 ≤ k < m` precomputed.
#[derive(Debug)]
pub struct CyclotomicField {
    conductor: u64,
    modulus: Polynomial,
    degree: usize,
    powers: Vec<Vec<Rational>>,
}

/// Fields are determined by their conductor.
impl PartialEq for CyclotomicField {
    fn eq(&self, other: &Self) -> bool {
        self.conductor == other.conductor
    }
}

impl Eq for CyclotomicField {}

impl CyclotomicField {
    pub fn new(conductor: u64) -> Arc<Self> {
        assert!(conductor >= 1, "conductor must be positive");
        let modulus = cyclotomic_polynomial(conductor);
        let degree = modulus.degree().unwrap();
        let mut powers = Vec::with_capacity(conductor as usize);
        for k in 0..conductor as usize {
            let mut c = vec![Rational::zero(); k + 1];
            c[k] = Rational::one();
            let (_, r) = Polynomial::new(c).div_rem(&modulus);
            let mut v = r.coeffs;
            v.resize(degree, Rational::zero());
            powers.push(v);
        }
        Arc::new(Self {
            conductor,
            modulus,
            degree,
            powers,
        })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// `φ(m)`, the length of every coefficient vector.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &Polynomial {
        &self.modulus
    }
}

/// An element of `ℚ(ζ_m)`, stored as its reduced coefficient vector in the
/// power basis `1, ζ, …, ζ^{φ(m)−1}`.
#[derive(Clone)]
pub struct CyclotomicScalar {
    field: Arc<CyclotomicField>,
    coeffs: Vec<Rational>,
}

impl PartialEq for CyclotomicScalar {
    fn eq(&self, other: &Self) -> bool {
        self.field.conductor == other.field.conductor && self.coeffs == other.coeffs
    }
}

impl Eq for CyclotomicScalar {}

impl fmt::Debug for CyclotomicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (m={})", self, self.field.conductor)
    }
}

impl fmt::Display for CyclotomicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.coeffs, "z")
    }
}

impl CyclotomicScalar {
    pub fn zero(field: &Arc<CyclotomicField>) -> Self {
        Self {
            field: field.clone(),
            coeffs: vec![Rational::zero(); field.degree],
        }
    }

    pub fn one(field: &Arc<CyclotomicField>) -> Self {
        Self::rational(field, Rational::one())
    }

    pub fn rational(field: &Arc<CyclotomicField>, q: Rational) -> Self {
        let mut s = Self::zero(field);
        s.coeffs[0] = q;
        s
    }

    pub fn from_int(field: &Arc<CyclotomicField>, n: i64) -> Self {
        Self::rational(field, rat(n, 1))
    }

    /// `ζ_m^k` for any integer `k`.
    pub fn root_power(field: &Arc<CyclotomicField>, k: i64) -> Self {
        let idx = k.rem_euclid(field.conductor as i64) as usize;
        Self {
            field: field.clone(),
            coeffs: field.powers[idx].clone(),
        }
    }

    /// Reduces an arbitrary polynomial in `ζ` into the field.
    pub fn from_poly(field: &Arc<CyclotomicField>, coeffs: &[Rational]) -> Self {
        let mut out = Self::zero(field);
        for (k, c) in coeffs.iter().enumerate() {
            out.add_scaled_power(k, c);
        }
        out
    }

    fn add_scaled_power(&mut self, k: usize, c: &Rational) {
        if c.is_zero() {
            return;
        }
        if k < self.field.degree {
            self.coeffs[k] += c;
            return;
        }
        let m = self.field.conductor as usize;
        let field = self.field.clone();
        for (dst, p) in self.coeffs.iter_mut().zip(&field.powers[k % m]) {
            if !p.is_zero() {
                *dst += c * p;
            }
        }
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn conductor(&self) -> u64 {
        self.field.conductor
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// `Some(q)` when the scalar lies in `ℚ`.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| &self.coeffs[0])
    }

    fn check(&self, other: &Self) -> Result<(), PhaseError> {
        if self.field.conductor == other.field.conductor {
            Ok(())
        } else {
            Err(PhaseError::IncompatibleConductor {
                expected: self.field.conductor,
                found: other.field.conductor,
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PhaseError> {
        self.check(other)?;
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PhaseError> {
        self.check(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    fn as_polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// `Φ_m`; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Self::rational(&self.field, q.recip()));
        }
        // invariant: s·self ≡ r (mod Φ_m)
        let (mut r0, mut r1) = (self.field.modulus.clone(), self.as_polynomial());
        let (mut s0, mut s1) = (Polynomial::zero(), Polynomial::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // Φ_m is irreducible, so the gcd r0 is a nonzero constant
        debug_assert_eq!(r0.degree(), Some(0));
        let c = r0.coeffs[0].recip();
        Some(Self::from_poly(&self.field, s0.scale(&c).coeffs()))
    }

    /// Parses the text syntax `1/2+1/2z^2`, `-z`, `3`, `0`: a signed sum of
    /// terms `c`, `cz`, `cz^k`, `z`, `z^k` with `c` a non-negative
    /// rational, reduced modulo `Φ_m`.
    pub fn parse(field: &Arc<CyclotomicField>, text: &str) -> Result<Self, PhaseError> {
        let bad = || PhaseError::MalformedScalar(text.to_string());
        if text.is_empty() {
            return Err(bad());
        }
        let bytes = text.as_bytes();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                terms.push(&text[start..i]);
                start = i;
            }
        }
        terms.push(&text[start..]);
        let mut out = Self::zero(field);
        for term in terms {
            let (neg, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            if body.is_empty() {
                return Err(bad());
            }
            let (coef_text, power) = match body.find('z') {
                None => (body, 0usize),
                Some(zpos) => {
                    let rest = &body[zpos + 1..];
                    let k = if rest.is_empty() {
                        1
                    } else {
                        let digits = rest.strip_prefix('^').ok_or_else(bad)?;
                        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                            return Err(bad());
                        }
                        digits.parse::<usize>().map_err(|_| bad())?
                    };
                    (&body[..zpos], k)
                }
            };
            let mut c = if coef_text.is_empty() {
                if power == 0 {
                    return Err(bad());
                }
                Rational::one()
            } else {
                parse_rational(coef_text).ok_or_else(bad)?
            };
            if neg {
                c = -c;
            }
            if power > 1 << 20 {
                return Err(bad());
            }
            out.add_scaled_power(power, &c);
        }
        Ok(out)
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let digits = |t: &str| !t.is_empty() && t.len() <= 36 && t.bytes().all(|b| b.is_ascii_digit());
    match s.split_once('/') {
        None => digits(s).then(|| Rational::from_integer(s.parse::<BigInt>().unwrap())),
        Some((p, q)) => {
            if !digits(p) || !digits(q) {
                return None;
            }
            let q: BigInt = q.parse().unwrap();
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p.parse().unwrap(), q))
        }
    }
}

impl Add for &CyclotomicScalar {
    type Output = CyclotomicScalar;
    fn add(self, rhs: &CyclotomicScalar) -> CyclotomicScalar {
        assert_eq!(self.field.conductor, rhs.field.conductor, "conductor mismatch");
        CyclotomicScalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CyclotomicScalar {
    type Output = CyclotomicScalar;
    fn sub(self, rhs: &CyclotomicScalar) -> CyclotomicScalar {
        assert_eq!(self.field.conductor, rhs.field.conductor, "conductor mismatch");
        CyclotomicScalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CyclotomicScalar {
    type Output = CyclotomicScalar;
    fn neg(self) -> CyclotomicScalar {
        CyclotomicScalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &CyclotomicScalar {
    type Output = CyclotomicScalar;
    fn mul(self, rhs: &CyclotomicScalar) -> CyclotomicScalar {
        assert_eq!(self.field.conductor, rhs.field.conductor, "conductor mismatch");
        if self.is_zero() || rhs.is_zero() {
            return CyclotomicScalar::zero(&self.field);
        }
        if let Some(q) = self.as_rational() {
            return rhs.scale(q);
        }
        if let Some(q) = rhs.as_rational() {
            return self.scale(q);
        }
        let d = self.field.degree;
        let mut prod = vec![Rational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        CyclotomicScalar::from_poly(&self.field, &prod)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CyclotomicScalar {
            type Output = CyclotomicScalar;
            fn $m(self, rhs: CyclotomicScalar) -> CyclotomicScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// `Σ aᵢ·bᵢ`, accumulating unreduced products and reducing once.
pub(crate) fn sum_of_products<'a>(
    field: &Arc<CyclotomicField>,
    pairs: impl IntoIterator<Item = (&'a CyclotomicScalar, &'a CyclotomicScalar)>,
) -> CyclotomicScalar {
    let d = field.degree;
    let mut acc = vec![Rational::zero(); 2 * d - 1];
    for (a, b) in pairs {
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    acc[i + j] += x * y;
                }
            }
        }
    }
    CyclotomicScalar::from_poly(field, &acc)
}

/// The root of unity of angle `a` in `ℚ(ζ_m)`: `ζ_m^{m·a}`.
pub fn embed_angle(a: Angle, field: &Arc<CyclotomicField>) -> Result<CyclotomicScalar, PhaseError> {
    let m = field.conductor();
    if !m.is_multiple_of(a.denominator()) {
        return Err(PhaseError::IncompatibleConductor {
            expected: m,
            found: a.denominator(),
        });
    }
    let k = a.numerator() * (m / a.denominator());
    Ok(CyclotomicScalar::root_power(field, k as i64))
}

/// Largest conductor the tool will build a field for.
pub const MAX_CONDUCTOR: u64 = 256;

/// Smallest conductor containing every angle's root of unity, saturating at
/// `u64::MAX`.
pub fn conductor_for<I: IntoIterator<Item = Angle>>(angles: I) -> u64 {
    angles.into_iter().fold(1u64, |m, a| {
        let d = a.denominator();
        (m / m.gcd(&d)).saturating_mul(d)
    })
}
