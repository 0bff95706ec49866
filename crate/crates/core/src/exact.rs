//! Exact scalars: arbitrary-precision rationals, Gaussian rationals, and
//! finite sums of rational multiples of roots of unity.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Complex number with exact rational parts.
pub type ExactComplex = Complex<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {input:?}: expected \"p/q\" or an integer")]
pub struct ParseRationalError {
    pub input: String,
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"-p/q"` or `"p"`; the denominator must be nonzero.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { input: s.to_string() };
    let t = s.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => BigInt::from_str(t).map(Rational::from_integer).map_err(|_| err()),
    }
}

/// Always `"p/q"`, with `q = 1` for integers.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `r − ⌊r⌋ ∈ [0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

pub fn is_integer(r: &Rational) -> bool {
    r.is_integer()
}

/// `e^{2πi·turns}`, exact for multiples of a quarter turn.
pub fn unit_phase(turns: &Rational) -> Complex64 {
    let f = frac(turns);
    if f.is_zero() {
        return Complex64::new(1.0, 0.0);
    }
    let four = &f * integer(4);
    if four.is_integer() {
        return match four.to_integer().to_i64() {
            Some(1) => Complex64::new(0.0, 1.0),
            Some(2) => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let angle = std::f64::consts::TAU * f.to_f64().unwrap_or(0.0);
    let (s, c) = angle.sin_cos();
    Complex64::new(c, s)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn exact_to_complex(z: &ExactComplex) -> Complex64 {
    Complex64::new(to_f64(&z.re), to_f64(&z.im))
}

/// `Σ_k amplitude_k · e^{2πi·phase_k}` with rational amplitudes and phases.
///
/// Phases are kept in `[0, 1/2)`; a phase in `[1/2, 1)` is folded by negating
/// the amplitude, so `z` and `−z` share a key and cancel exactly. Distinct
/// keys are not guaranteed to be linearly independent (cyclotomic relations
/// such as `1 + ω + ω² = 0` are not reduced), so [`PhasorSum::is_zero`] is
/// exact only in the "no terms left" direction; use the numeric value for the
/// rest.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct PhasorSum {
    terms: BTreeMap<Rational, Rational>,
}

impl fmt::Debug for PhasorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, a)| format!("({a})·e(2πi·{p})"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn canonical(phase: &Rational, amplitude: Rational) -> (Rational, Rational) {
    let half = rational(1, 2);
    let p = frac(phase);
    if p >= half {
        (p - half, -amplitude)
    } else {
        (p, amplitude)
    }
}

impl PhasorSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::unit(&Rational::zero())
    }

    /// `e^{2πi·turns}`.
    pub fn unit(turns: &Rational) -> Self {
        Self::term(Rational::one(), turns)
    }

    /// `amplitude · e^{2πi·turns}`.
    pub fn term(amplitude: Rational, turns: &Rational) -> Self {
        let mut s = Self::zero();
        s.push(turns, amplitude);
        s
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::term(r, &Rational::zero())
    }

    /// Lossless conversion of a float pair: `re·1 + im·i`.
    pub fn from_complex(z: Complex64) -> Option<Self> {
        let mut s = Self::zero();
        s.push(&Rational::zero(), from_f64(z.re)?);
        s.push(&rational(1, 4), from_f64(z.im)?);
        Some(s)
    }

    fn push(&mut self, phase: &Rational, amplitude: Rational) {
        if amplitude.is_zero() {
            return;
        }
        let (p, a) = canonical(phase, amplitude);
        let slot = self.terms.entry(p.clone()).or_insert_with(Rational::zero);
        *slot += a;
        if slot.is_zero() {
            self.terms.remove(&p);
        }
    }

    /// True when no terms survive exact cancellation.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, a) in &other.terms {
            out.push(p, a.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(p, a)| (p.clone(), -a)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                out.push(&(p + q), a * b);
            }
        }
        out
    }

    /// Multiplication by `e^{2πi·turns}`.
    pub fn rotate(&self, turns: &Rational) -> Self {
        let mut out = Self::zero();
        for (p, a) in &self.terms {
            out.push(&(p + turns), a.clone());
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::zero();
        for (p, a) in &self.terms {
            out.push(p, a * r);
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (p, a) in &self.terms {
            out.push(&-p, a.clone());
        }
        out
    }

    pub fn to_complex(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(p, a)| unit_phase(p) * to_f64(a))
            .sum()
    }

    pub fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }

    /// `|z|²` as an exact rational, available when every pairwise phase
    /// difference has a rational cosine (a multiple of 1/4 or 1/6 of a turn).
    pub fn norm_sqr_exact(&self) -> Option<Rational> {
        let terms: Vec<(&Rational, &Rational)> = self.terms.iter().collect();
        let mut total = Rational::zero();
        for (i, (p, a)) in terms.iter().enumerate() {
            total += *a * *a;
            for (q, b) in &terms[i + 1..] {
                total += rational_cosine(&(*p - *q))? * integer(2) * *a * *b;
            }
        }
        Some(total)
    }
}

/// `cos(2π·turns)` when it is rational.
fn rational_cosine(turns: &Rational) -> Option<Rational> {
    let twelfths = frac(turns) * integer(12);
    if !twelfths.is_integer() {
        return None;
    }
    match twelfths.to_integer().to_i64()? {
        0 => Some(integer(1)),
        2 | 10 => Some(rational(1, 2)),
        3 | 9 => Some(integer(0)),
        4 | 8 => Some(rational(-1, 2)),
        6 => Some(integer(-1)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("1/2").unwrap(), rational(1, 2));
        assert_eq!(parse_rational(" -6/4 ").unwrap(), rational(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), integer(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("0.5").is_err());
        assert_eq!(format_rational(&rational(-3, 2)), "-3/2");
        assert_eq!(format_rational(&integer(4)), "4/1");
    }

    #[test]
    fn unit_phase_special_values_are_exact() {
        assert_eq!(unit_phase(&integer(3)), Complex64::new(1.0, 0.0));
        assert_eq!(unit_phase(&rational(-1, 2)), Complex64::new(-1.0, 0.0));
        assert_eq!(unit_phase(&rational(5, 4)), Complex64::new(0.0, 1.0));
        assert_eq!(unit_phase(&rational(-1, 4)), Complex64::new(0.0, -1.0));
        let w = unit_phase(&rational(1, 3));
        assert!((w - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn antipodal_terms_cancel_exactly() {
        let c = rational(1, 7);
        let a = PhasorSum::unit(&c).rotate(&rational(1, 2));
        let b = PhasorSum::unit(&c);
        assert!(a.add(&b).is_zero());
        assert_eq!(a, b.neg());
    }

    #[test]
    fn multiplication_adds_phases() {
        let a = PhasorSum::term(integer(2), &rational(1, 3));
        let b = PhasorSum::term(rational(1, 2), &rational(2, 3));
        assert_eq!(a.mul(&b), PhasorSum::one());
        assert_eq!(a.conj().mul(&a).norm_sqr_exact(), Some(integer(16)));
    }

    #[test]
    fn float_conversion_is_lossless() {
        let z = Complex64::new(0.1, -2.5);
        let p = PhasorSum::from_complex(z).unwrap();
        assert_eq!(p.to_complex(), z);
        let n = p.rotate(&rational(3, 7)).norm_sqr_exact().unwrap();
        assert_eq!(n, from_f64(0.1).unwrap().pow(2) + rational(25, 4));
    }

    #[test]
    fn cyclotomic_relation_is_numerically_zero() {
        let s = PhasorSum::one()
            .add(&PhasorSum::unit(&rational(1, 3)))
            .add(&PhasorSum::unit(&rational(2, 3)));
        assert!(!s.is_zero());
        assert!(s.magnitude() < 1e-15);
        assert_eq!(s.norm_sqr_exact(), Some(integer(0)));
        let t = PhasorSum::one().add(&PhasorSum::unit(&rational(1, 5)));
        assert_eq!(t.norm_sqr_exact(), None);
    }
}
