//! Exact rational arithmetic helpers: binomial coefficients, extended
//! rationals with a point at infinity, harmonic sums, and decimal rendering.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for every delay quantity.
pub type Ratio = num_rational::BigRational;

/// Rational from an integer pair; `d` must be nonzero.
pub fn frac(n: i64, d: i64) -> Ratio {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from an integer.
pub fn int(n: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

/// Rational from an unsigned integer.
pub fn uint(n: u64) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

thread_local! {
    static BINOMIAL_CACHE: RefCell<HashMap<(u64, u64), BigInt>> = RefCell::new(HashMap::new());
}

/// Binomial coefficient with the convention C(n, k) = 0 for k < 0 or k > n.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    if k == 0 {
        return BigInt::one();
    }
    BINOMIAL_CACHE.with(|cache| {
        if let Some(v) = cache.borrow().get(&(n, k)) {
            return v.clone();
        }
        let mut acc = BigInt::one();
        for i in 0..k {
            acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        cache.borrow_mut().insert((n, k), acc.clone());
        acc
    })
}

/// Binomial coefficient as a rational.
pub fn binomial_ratio(n: u64, k: i64) -> Ratio {
    Ratio::from_integer(binomial(n, k))
}

/// Σ_{j=from}^{to} 1/j; zero when the range is empty.
pub fn harmonic(from: u64, to: u64) -> Ratio {
    let mut acc = Ratio::zero();
    for j in from.max(1)..=to {
        acc += Ratio::new(BigInt::one(), BigInt::from(j));
    }
    acc
}

/// A delay value: an exact rational or +∞ (no feasible code/schedule).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Delay {
    Finite(Ratio),
    Infinite,
}

impl Delay {
    pub fn zero() -> Self {
        Delay::Finite(Ratio::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Delay::Finite(_))
    }

    pub fn as_ratio(&self) -> Option<&Ratio> {
        match self {
            Delay::Finite(r) => Some(r),
            Delay::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Delay::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            Delay::Infinite => f64::INFINITY,
        }
    }

    /// `self + gamma * map`, the total-delay combination.
    pub fn plus_scaled(&self, gamma: &Ratio, map: &Ratio) -> Delay {
        match self {
            Delay::Finite(r) => Delay::Finite(r + gamma * map),
            Delay::Infinite => Delay::Infinite,
        }
    }

    /// Render with `sig` significant digits; `inf` for the infinite point.
    pub fn to_sig(&self, sig: u32) -> String {
        match self {
            Delay::Finite(r) => to_sig_decimal(r, sig),
            Delay::Infinite => "inf".to_string(),
        }
    }
}

impl From<Ratio> for Delay {
    fn from(r: Ratio) -> Self {
        Delay::Finite(r)
    }
}

impl PartialOrd for Delay {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Delay {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Delay::Finite(a), Delay::Finite(b)) => a.cmp(b),
            (Delay::Finite(_), Delay::Infinite) => Ordering::Less,
            (Delay::Infinite, Delay::Finite(_)) => Ordering::Greater,
            (Delay::Infinite, Delay::Infinite) => Ordering::Equal,
        }
    }
}

impl std::ops::Add for &Delay {
    type Output = Delay;
    fn add(self, rhs: &Delay) -> Delay {
        match (self, rhs) {
            (Delay::Finite(a), Delay::Finite(b)) => Delay::Finite(a + b),
            _ => Delay::Infinite,
        }
    }
}

impl fmt::Display for Delay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sig(12))
    }
}

/// Parse "a/b", an integer, or a decimal (optionally with exponent) into an
/// exact rational.
pub fn parse_ratio(s: &str) -> Result<Ratio, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational".to_string());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Ratio::new(n, d));
    }
    // decimal / integer / scientific
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let e: i64 = e.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            (m, e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!(
        "{}{}",
        if int_part.is_empty() || int_part == "-" || int_part == "+" {
            format!("{int_part}0")
        } else {
            int_part.to_string()
        },
        frac_part
    );
    let n: BigInt = digits
        .parse()
        .map_err(|_| format!("bad decimal {s:?}"))?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Ratio::from_integer(n * ten.pow(shift as u32))
    } else {
        Ratio::new(n, ten.pow((-shift) as u32))
    })
}

/// Exact decimal rendering of a rational with `sig` significant digits
/// (round half up), trailing zeros trimmed. No floating point involved.
pub fn to_sig_decimal(r: &Ratio, sig: u32) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.numer().abs();
    let b = r.denom().abs();
    let ten = BigInt::from(10);

    // Decimal exponent e with 10^e <= a/b < 10^(e+1).
    let mut e = a.to_string().len() as i64 - b.to_string().len() as i64;
    let ge_pow = |e: i64| -> bool {
        // a/b >= 10^e ?
        if e >= 0 {
            a >= &b * ten.pow(e as u32)
        } else {
            &a * ten.pow((-e) as u32) >= b
        }
    };
    while !ge_pow(e) {
        e -= 1;
    }
    while ge_pow(e + 1) {
        e += 1;
    }

    // Round a/b * 10^(sig-1-e) half-up to an integer with `sig` digits.
    let t = sig as i64 - 1 - e;
    let (n2, d2) = if t >= 0 {
        (&a * ten.pow(t as u32), b.clone())
    } else {
        (a.clone(), &b * ten.pow((-t) as u32))
    };
    let mut q = (BigInt::from(2) * n2 + &d2) / (BigInt::from(2) * &d2);
    if q >= ten.pow(sig) {
        // carry, e.g. 0.9999.. -> 1.000
        q = ten.pow(sig - 1);
        e += 1;
    }

    let digits = q.to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if e >= 0 {
        let e = e as usize;
        if e + 1 >= digits.len() {
            out.push_str(&digits);
            out.push_str(&"0".repeat(e + 1 - digits.len()));
        } else {
            out.push_str(&digits[..e + 1]);
            let frac = digits[e + 1..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        }
    } else {
        let zeros = (-e - 1) as usize;
        let frac = digits.trim_end_matches('0');
        out.push_str("0.");
        out.push_str(&"0".repeat(zeros));
        out.push_str(frac);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_convention() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(5, 0), BigInt::one());
        assert_eq!(binomial(5, 5), BigInt::one());
        assert_eq!(binomial(4, 5), BigInt::zero());
        assert_eq!(binomial(4, -1), BigInt::zero());
        assert_eq!(binomial(30, 15), BigInt::from(155117520u64));
    }

    #[test]
    fn harmonic_sums() {
        assert_eq!(harmonic(1, 1), int(1));
        assert_eq!(harmonic(1, 3), frac(11, 6));
        assert_eq!(harmonic(4, 3), Ratio::zero());
        // range form equals difference of prefix sums
        assert_eq!(harmonic(16, 30), harmonic(1, 30) - harmonic(1, 15));
    }

    #[test]
    fn delay_ordering() {
        let fin = Delay::Finite(frac(1, 2));
        assert!(fin < Delay::Infinite);
        assert!(Delay::Infinite > fin);
        assert_eq!(Delay::Infinite, Delay::Infinite);
        assert_eq!(&fin + &Delay::Infinite, Delay::Infinite);
        assert_eq!(&fin + &Delay::Finite(frac(1, 3)), Delay::Finite(frac(5, 6)));
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_ratio("1/2").unwrap(), frac(1, 2));
        assert_eq!(parse_ratio("0.75").unwrap(), frac(3, 4));
        assert_eq!(parse_ratio("0.1").unwrap(), frac(1, 10));
        assert_eq!(parse_ratio("3").unwrap(), int(3));
        assert_eq!(parse_ratio("-2/4").unwrap(), frac(-1, 2));
        assert_eq!(parse_ratio("2.5e-1").unwrap(), frac(1, 4));
        assert_eq!(parse_ratio(".5").unwrap(), frac(1, 2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("abc").is_err());
    }

    #[test]
    fn sig_decimal_rendering() {
        assert_eq!(to_sig_decimal(&frac(1, 2), 12), "0.5");
        assert_eq!(to_sig_decimal(&int(0), 12), "0");
        assert_eq!(to_sig_decimal(&int(600), 12), "600");
        assert_eq!(to_sig_decimal(&frac(-5, 12), 6), "-0.416667");
        assert_eq!(to_sig_decimal(&frac(1, 3), 5), "0.33333");
        assert_eq!(to_sig_decimal(&frac(2, 3), 5), "0.66667");
        assert_eq!(to_sig_decimal(&frac(1, 10000), 3), "0.0001");
        assert_eq!(to_sig_decimal(&frac(9999, 10), 3), "1000");
        assert_eq!(to_sig_decimal(&int(123456), 3), "123000");
    }

    #[test]
    fn sig_decimal_matches_f64_on_random_fractions() {
        // cross-check the exact renderer against floating point at low precision
        for n in 1..200i64 {
            for d in [3i64, 7, 11, 13, 97] {
                let s = to_sig_decimal(&frac(n, d), 9);
                let f: f64 = s.parse().unwrap();
                let expect = n as f64 / d as f64;
                assert!(
                    (f - expect).abs() <= 1e-8 * expect.abs(),
                    "{n}/{d} rendered {s}"
                );
            }
        }
    }
}
