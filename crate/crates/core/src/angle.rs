//! Exact rational angles of the circle `R/Z` under the doubling map.
//!
//! An [`Angle`] is a reduced fraction `num/den` with `0 <= num < den`, plus
//! the distinguished value `1`. The angles `0` and `1` are the same point of
//! the circle but are kept apart as values: the parameter ray at angle `0 = 1`
//! is counted twice so that every ray pairing statement holds without
//! exceptions.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

/// Rational point of the circle, reduced, with `0 <= num/den <= 1`.
///
/// The value `1` (`num == den == 1`) is allowed and distinct from `0`; both
/// describe the same circle point and the same doubling orbit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Angle {
    num: BigUint,
    den: BigUint,
}

/// Exact preperiod and period of an angle under doubling mod 1.
///
/// `preperiod == 0` iff the angle is periodic iff its reduced denominator is
/// odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitType {
    pub preperiod: u64,
    pub period: u64,
}

impl Angle {
    /// The angle `0`.
    pub fn zero() -> Self {
        Angle { num: BigUint::zero(), den: BigUint::one() }
    }

    /// The distinguished angle `1` (same circle point as `0`).
    pub fn one() -> Self {
        Angle { num: BigUint::one(), den: BigUint::one() }
    }

    /// Builds `num/den` reduced. Fails for `den == 0` or `num > den`.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        Self::from_big(BigUint::from(num), BigUint::from(den))
    }

    /// Arbitrary-precision constructor; same contract as [`Angle::new`].
    pub fn from_big(num: BigUint, den: BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num > den {
            return Err(Error::AngleOutOfRange(alloc::format!("{num}/{den}")));
        }
        let g = num.gcd(&den);
        Ok(Angle { num: &num / &g, den: &den / &g })
    }

    pub fn numer(&self) -> &BigUint {
        &self.num
    }

    pub fn denom(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// Numerator of the circle position, i.e. `num mod den`; this maps the
    /// angle `1` onto the position of `0`.
    pub fn position_numer(&self) -> BigUint {
        if self.is_one() {
            BigUint::zero()
        } else {
            self.num.clone()
        }
    }

    /// `(num, den)` as machine integers when they fit.
    pub(crate) fn as_u64_pair(&self) -> Option<(u64, u64)> {
        Some((self.num.to_u64()?, self.den.to_u64()?))
    }

    /// The image `2θ mod 1`, reduced. `1` maps to `1` (its orbit is the orbit
    /// of `0`).
    pub fn double(&self) -> Angle {
        if self.is_one() {
            return self.clone();
        }
        let mut num = &self.num << 1u32;
        if num >= self.den {
            num -= &self.den;
        }
        // Doubling can only introduce a common factor of 2.
        if num.is_even() && self.den.is_even() {
            return Angle { num: num >> 1u32, den: &self.den >> 1u32 };
        }
        Angle { num, den: self.den.clone() }
    }

    /// The two preimages `θ/2` and `(θ+1)/2` under doubling, as circle
    /// positions in `[0, 1)`.
    pub fn halves(&self) -> (Angle, Angle) {
        let num = self.position_numer();
        let den2 = &self.den << 1u32;
        let low = Angle::from_big(num.clone(), den2.clone()).expect("half in range");
        let high = Angle::from_big(num + &self.den, den2).expect("half in range");
        (low, high)
    }

    /// Exact preperiod and period under doubling.
    ///
    /// Writing the reduced denominator as `2^l * m` with `m` odd, the
    /// preperiod is `l` and the period is the multiplicative order of `2`
    /// modulo `m` (1 when `m == 1`).
    pub fn orbit_type(&self) -> OrbitType {
        let mut m = if self.is_one() { BigUint::one() } else { self.den.clone() };
        let mut preperiod = 0u64;
        while m.is_even() {
            m >>= 1u32;
            preperiod += 1;
        }
        if m.is_one() {
            return OrbitType { preperiod, period: 1 };
        }
        let two = BigUint::from(2u32);
        let mut pow = two.clone() % &m;
        let mut period = 1u64;
        while !pow.is_one() {
            pow = (pow * &two) % &m;
            period += 1;
        }
        OrbitType { preperiod, period }
    }

    /// `Some(n)` iff the angle is periodic of exact period `n`.
    pub fn exact_period(&self) -> Option<u64> {
        let t = self.orbit_type();
        (t.preperiod == 0).then_some(t.period)
    }

    /// Value as `f64` (angle `1` gives `1.0`).
    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::INFINITY) / self.den.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Compares circle positions, identifying `1` with `0`.
    pub fn position_cmp(&self, other: &Angle) -> Ordering {
        let ln = self.position_numer() * other.denom();
        let rn = other.position_numer() * self.denom();
        ln.cmp(&rn)
    }

    /// True iff `self` lies strictly inside the open arc from `low` up to
    /// `high` (as positions, `low < high` assumed).
    pub fn in_open_arc(&self, low: &Angle, high: &Angle) -> bool {
        self.position_cmp(low) == Ordering::Greater && self.position_cmp(high) == Ordering::Less
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        // By value in [0, 1]; the angle 1 sorts above everything else.
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else if self.is_one() {
            write!(f, "1")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Angle {
    type Err = Error;

    /// Accepts `p/q` (decimal), binary `0.<bits>:<bits>` with a nonempty
    /// repeating block, and the bare integers `0` and `1`.
    ///
    /// The binary form `0.u:v` denotes `(u*(2^|v|-1) + v) / (2^|u|*(2^|v|-1))`.
    fn from_str(text: &str) -> Result<Self> {
        let s = text.trim();
        if s == "0" {
            return Ok(Angle::zero());
        }
        if s == "1" {
            return Ok(Angle::one());
        }
        if let Some(rest) = s.strip_prefix("0.") {
            let (u_bits, v_bits) = rest
                .split_once(':')
                .ok_or_else(|| Error::MalformedAngle(s.to_string()))?;
            if v_bits.is_empty()
                || !u_bits.bytes().all(|b| b == b'0' || b == b'1')
                || !v_bits.bytes().all(|b| b == b'0' || b == b'1')
            {
                return Err(Error::MalformedAngle(s.to_string()));
            }
            let u = bits_value(u_bits);
            let v = bits_value(v_bits);
            let rep = (BigUint::one() << v_bits.len()) - BigUint::one();
            let num = u * &rep + v;
            let den = rep << u_bits.len();
            return Angle::from_big(num, den);
        }
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| Error::MalformedAngle(s.to_string()))?;
        let num = BigUint::from_str(p.trim()).map_err(|_| Error::MalformedAngle(s.to_string()))?;
        let den = BigUint::from_str(q.trim()).map_err(|_| Error::MalformedAngle(s.to_string()))?;
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num > den {
            return Err(Error::AngleOutOfRange(s.to_string()));
        }
        Angle::from_big(num, den)
    }
}

fn bits_value(bits: &str) -> BigUint {
    let mut v = BigUint::zero();
    for b in bits.bytes() {
        v <<= 1u32;
        if b == b'1' {
            v += 1u32;
        }
    }
    v
}

/// All angles in `[0, 1]` of exact period `n` under doubling, ascending.
///
/// For `n == 1` this is `{0, 1}`: both endpoints describe the period-1 ray,
/// counted twice. The list always has length `2 * s_n` where `s_n` counts
/// parabolic parameters of ray period `n`.
pub fn enumerate_exact_period(n: u32) -> Result<Vec<Angle>> {
    if n == 0 {
        return Err(Error::BoundExceeded { what: "period", limit: 34, got: 0 });
    }
    if n > 34 {
        // 2^34 angles would not fit in memory anyway.
        return Err(Error::BoundExceeded { what: "period", limit: 34, got: n as u64 });
    }
    if n == 1 {
        return Ok(alloc::vec![Angle::zero(), Angle::one()]);
    }
    let den = (1u64 << n) - 1;
    let mut out = Vec::new();
    for a in 1..den {
        if exact_period_mod(a, den) == n as u64 {
            out.push(Angle::from_big(BigUint::from(a), BigUint::from(den))?);
        }
    }
    Ok(out)
}

/// Exact period of `a/den` (den odd, `a < den`) by direct orbit walking.
pub(crate) fn exact_period_mod(a: u64, den: u64) -> u64 {
    let mut x = a;
    let mut k = 0u64;
    loop {
        x = mod_double(x, den);
        k += 1;
        if x == a {
            return k;
        }
    }
}

#[inline]
pub(crate) fn mod_double(a: u64, den: u64) -> u64 {
    let x = (a as u128) << 1;
    let d = den as u128;
    (if x >= d { x - d } else { x }) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn a(s: &str) -> Angle {
        s.parse().unwrap()
    }

    #[test]
    fn parse_decimal_and_binary_agree() {
        assert_eq!(a("9/56"), a("0.001:010"));
        assert_eq!(a("1/3"), a("0.:01"));
        assert_eq!(a("1/2"), a("0.1:0"));
        assert_eq!(a("1/2"), a("0.0:1"));
    }

    #[test]
    fn parse_binary_all_ones_is_one() {
        // 0.repeating(1) sums to 1, returned as the distinguished ONE.
        let one = a("0.:1");
        assert!(one.is_one());
        assert_ne!(one, Angle::zero());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(Angle::from_str("3/0"), Err(Error::ZeroDenominator)));
        assert!(matches!(Angle::from_str("5/4"), Err(Error::AngleOutOfRange(_))));
        assert!(matches!(Angle::from_str("0.01"), Err(Error::MalformedAngle(_))));
        assert!(matches!(Angle::from_str("0.01:"), Err(Error::MalformedAngle(_))));
        assert!(matches!(Angle::from_str("0.0a:1"), Err(Error::MalformedAngle(_))));
        assert!(matches!(Angle::from_str("x"), Err(Error::MalformedAngle(_))));
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "1", "9/56", "1/3", "22/63"] {
            assert_eq!(a(s).to_string(), s);
            assert_eq!(a(&a(s).to_string()), a(s));
        }
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(a("1/3").double(), a("2/3"));
        assert_eq!(a("2/3").double(), a("1/3"));
        assert_eq!(a("9/56").double(), a("9/28"));
        assert_eq!(Angle::one().double(), Angle::one());
        assert_eq!(Angle::zero().double(), Angle::zero());
    }

    #[test]
    fn orbit_type_examples() {
        assert_eq!(a("9/56").orbit_type(), OrbitType { preperiod: 3, period: 3 });
        assert_eq!(a("1/2").orbit_type(), OrbitType { preperiod: 1, period: 1 });
        assert_eq!(Angle::zero().orbit_type(), OrbitType { preperiod: 0, period: 1 });
        assert_eq!(Angle::one().orbit_type(), OrbitType { preperiod: 0, period: 1 });
    }

    #[test]
    fn orbit_type_by_enumeration_oracle() {
        // Walk the orbit of 1/5 explicitly: 1/5 -> 2/5 -> 4/5 -> 3/5 -> 1/5.
        let mut seen = vec![a("1/5")];
        loop {
            let next = seen.last().unwrap().double();
            if next == seen[0] {
                break;
            }
            seen.push(next);
        }
        assert_eq!(seen.len(), 4);
        assert_eq!(a("1/5").orbit_type(), OrbitType { preperiod: 0, period: 4 });
    }

    #[test]
    fn orbit_type_is_minimal() {
        // 2^(l+n) θ = 2^l θ and no smaller pair works.
        for s in ["9/56", "1/2", "1/5", "11/56", "7/12", "5/96"] {
            let theta = a(s);
            let t = theta.orbit_type();
            let iter = |k: u64| {
                let mut x = theta.clone();
                for _ in 0..k {
                    x = x.double();
                }
                x
            };
            assert_eq!(iter(t.preperiod + t.period), iter(t.preperiod), "{s}");
            for l in 0..=t.preperiod {
                for n in 1..=t.period {
                    if l == t.preperiod && n == t.period {
                        continue;
                    }
                    assert_ne!(iter(l + n), iter(l), "{s} has smaller type ({l},{n})");
                }
            }
        }
    }

    #[test]
    fn enumerate_small_periods() {
        assert_eq!(enumerate_exact_period(1).unwrap(), vec![Angle::zero(), Angle::one()]);
        assert_eq!(enumerate_exact_period(2).unwrap(), vec![a("1/3"), a("2/3")]);
        let p3 = enumerate_exact_period(3).unwrap();
        assert_eq!(
            p3,
            vec![a("1/7"), a("2/7"), a("3/7"), a("4/7"), a("5/7"), a("6/7")]
        );
    }

    #[test]
    fn enumerate_matches_period_sieve_oracle() {
        // Independent sieve: all a/(2^n - 1) whose doubling orbit has length n.
        for n in 2..=10u32 {
            let den = (1u64 << n) - 1;
            let mut expect = Vec::new();
            for num in 1..den {
                if exact_period_mod(num, den) == n as u64 {
                    expect.push(Angle::new(num, den).unwrap());
                }
            }
            let got = enumerate_exact_period(n).unwrap();
            assert_eq!(got, expect, "n={n}");
            assert!(got.windows(2).all(|w| w[0] < w[1]), "ascending n={n}");
        }
    }

    #[test]
    fn doubling_is_two_to_one_via_halves() {
        // Each angle has exactly two circle preimages, its halves, both with
        // doubled denominator; doubling permutes each exact-period set.
        for n in 2..=8u32 {
            let angles = enumerate_exact_period(n).unwrap();
            for theta in &angles {
                let (h1, h2) = theta.halves();
                assert_ne!(h1, h2);
                assert_eq!(h1.double().position_cmp(theta), Ordering::Equal);
                assert_eq!(h2.double().position_cmp(theta), Ordering::Equal);
                let in_set: Vec<_> = angles.iter().filter(|x| x.double() == *theta).collect();
                assert_eq!(in_set.len(), 1, "doubling permutes the set, θ={theta}");
            }
            let mut image: Vec<Angle> = angles.iter().map(Angle::double).collect();
            image.sort();
            assert_eq!(image, angles);
        }
    }

    #[test]
    fn binary_form_agrees_with_decimal_for_all_small_angles() {
        // Reconstruct the binary preperiod:period form from the doubling
        // orbit and parse it back.
        for den in 1..=256u64 {
            for num in 0..den {
                let theta = match Angle::new(num, den) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                let t = theta.orbit_type();
                let mut bits = String::from("0.");
                let mut x = theta.clone();
                for i in 0..(t.preperiod + t.period) {
                    if i == t.preperiod {
                        bits.push(':');
                    }
                    let doubled = x.double();
                    // Bit is 1 iff x >= 1/2 as a circle position.
                    let half = Angle::new(1, 2).unwrap();
                    bits.push(if x.position_cmp(&half) != Ordering::Less { '1' } else { '0' });
                    x = doubled;
                }
                let reparsed: Angle = bits.parse().unwrap();
                assert_eq!(
                    reparsed.position_cmp(&theta),
                    Ordering::Equal,
                    "{num}/{den} came back as {reparsed} via {bits}"
                );
            }
        }
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Angle>();
        assert_send_sync::<OrbitType>();
        assert_send_sync::<crate::kneading::KneadingSequence>();
        assert_send_sync::<crate::combinat::RayPair>();
        assert_send_sync::<crate::combinat::PortraitCycle>();
        assert_send_sync::<crate::combinat::MisiurewiczClass>();
        assert_send_sync::<crate::numerics::RayTrace>();
        assert_send_sync::<crate::numerics::NewtonResult>();
    }

    #[test]
    fn ordering_puts_one_last() {
        let mut v = vec![Angle::one(), a("1/2"), Angle::zero(), a("2/3")];
        v.sort();
        assert_eq!(v, vec![Angle::zero(), a("1/2"), a("2/3"), Angle::one()]);
    }

    #[test]
    fn halves_of_endpoint_angles() {
        let (l0, h0) = Angle::zero().halves();
        assert_eq!((l0, h0), (Angle::zero(), a("1/2")));
        let (l1, h1) = Angle::one().halves();
        assert_eq!((l1, h1), (Angle::zero(), a("1/2")));
    }
}
