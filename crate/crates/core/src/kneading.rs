//! Kneading sequences and internal addresses.
//!
//! The circle is split at the two preimages `θ/2`, `(θ+1)/2` of an angle `θ`;
//! the open arc containing `0` is labeled `0`, the other arc `1`, the
//! boundary `*`. The kneading sequence `K(θ)` is the itinerary of `θ` under
//! doubling with respect to its own partition. Printing uses
//! `<preperiodic>|<periodic>`, e.g. `110|1` for `9/56` and `|1*` for `1/3`.

use alloc::vec::Vec;
use core::fmt;

use num_traits::ToPrimitive;

use crate::angle::Angle;
use crate::fast;
use crate::{Error, Result};

/// Partition label. `Star` marks exact hits of the partition boundary, which
/// happens only on the orbits of periodic angles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Star,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::Zero => "0",
            Symbol::One => "1",
            Symbol::Star => "*",
        })
    }
}

/// A preperiodic symbol sequence in canonical form: the periodic word is not
/// a proper power, and no tail of the preperiodic word can be absorbed into
/// the cycle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KneadingSequence {
    pre: Vec<Symbol>,
    per: Vec<Symbol>,
}

impl KneadingSequence {
    /// Canonicalizes a raw `(preperiodic, periodic)` pair.
    pub fn from_raw(mut pre: Vec<Symbol>, mut per: Vec<Symbol>) -> Self {
        assert!(!per.is_empty(), "periodic part must be nonempty");
        // Minimal period divides the given one.
        let n = per.len();
        for p in 1..n {
            if n.is_multiple_of(p) && (p..n).all(|i| per[i] == per[i - p]) {
                per.truncate(p);
                break;
            }
        }
        // Absorb preperiodic symbols that already continue the cycle.
        while let Some(&last) = pre.last() {
            if last == *per.last().unwrap() {
                pre.pop();
                per.rotate_right(1);
            } else {
                break;
            }
        }
        KneadingSequence { pre, per }
    }

    pub fn preperiodic_part(&self) -> &[Symbol] {
        &self.pre
    }

    pub fn periodic_part(&self) -> &[Symbol] {
        &self.per
    }

    /// Length of the preperiodic part.
    pub fn preperiod(&self) -> usize {
        self.pre.len()
    }

    /// Length of the (minimal) periodic part.
    pub fn period(&self) -> usize {
        self.per.len()
    }

    /// 1-based entry of the infinite sequence.
    pub fn symbol_at(&self, pos: usize) -> Symbol {
        assert!(pos >= 1);
        if pos <= self.pre.len() {
            self.pre[pos - 1]
        } else {
            self.per[(pos - 1 - self.pre.len()) % self.per.len()]
        }
    }

    /// First `len` symbols of the infinite sequence.
    pub fn expand(&self, len: usize) -> Vec<Symbol> {
        (1..=len).map(|i| self.symbol_at(i)).collect()
    }

    /// True iff the sequence is the kneading sequence of a periodic angle:
    /// empty preperiodic part and exactly one `*`, at the last position.
    pub fn is_star_periodic(&self) -> bool {
        self.pre.is_empty()
            && self.per.iter().filter(|s| **s == Symbol::Star).count() == 1
            && *self.per.last().unwrap() == Symbol::Star
    }
}

impl fmt::Display for KneadingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.pre {
            write!(f, "{s}")?;
        }
        write!(f, "|")?;
        for s in &self.per {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// The circle partition at the two half-angles of `base_angle`.
#[derive(Clone, Debug)]
pub struct PartitionContext {
    base: Angle,
    low: Angle,
    high: Angle,
}

impl PartitionContext {
    pub fn new(base: Angle) -> Self {
        let (low, high) = base.halves();
        PartitionContext { base, low, high }
    }

    pub fn base_angle(&self) -> &Angle {
        &self.base
    }

    /// The boundary positions `θ/2 < (θ+1)/2`.
    pub fn boundary(&self) -> (&Angle, &Angle) {
        (&self.low, &self.high)
    }

    /// Exact label of a single angle. The arc between the two boundary points
    /// is the `1`-arc; the complementary arc contains `0`.
    pub fn label(&self, alpha: &Angle) -> Symbol {
        // Cross-multiplied comparison of alpha against t/(2d) and (t+d)/(2d),
        // where the base is t/d as a circle position.
        let t = self.base.position_numer();
        let d = self.base.denom();
        let x = (alpha.position_numer() * d) << 1u32;
        let lo = t * alpha.denom();
        let hi = lo.clone() + d * alpha.denom();
        if x == lo || x == hi {
            Symbol::Star
        } else if x > lo && x < hi {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }
}

/// Labels of `α, 2α, 4α, ...` with respect to `ctx`, `length` of them.
pub fn itinerary(alpha: &Angle, ctx: &PartitionContext, length: usize) -> Vec<Symbol> {
    // Shared fast path when both denominators are machine-sized.
    if let (Some((an, ad)), Some((tn, td))) = (
        alpha_pos_u64(alpha),
        alpha_pos_u64(ctx.base_angle()),
    ) {
        if ad <= 1 << 62 && td <= 1 << 62 {
            let lo = (tn as u128) * ad as u128;
            let hi = lo + (td as u128) * ad as u128;
            let mut out = Vec::with_capacity(length);
            let mut a = an;
            for _ in 0..length {
                let x = ((a as u128) * td as u128) << 1;
                out.push(if x == lo || x == hi {
                    Symbol::Star
                } else if x > lo && x < hi {
                    Symbol::One
                } else {
                    Symbol::Zero
                });
                a = fast::mod_double(a, ad);
            }
            return out;
        }
    }
    let mut out = Vec::with_capacity(length);
    let mut a = alpha.clone();
    for _ in 0..length {
        out.push(ctx.label(&a));
        a = a.double();
    }
    out
}

fn alpha_pos_u64(a: &Angle) -> Option<(u64, u64)> {
    let (num, den) = a.as_u64_pair()?;
    Some((if num == den { 0 } else { num }, den))
}

/// The kneading sequence `K(θ)`: the itinerary of `θ` in its own partition,
/// in canonical preperiodic-plus-periodic form.
///
/// `K(0)` and `K(1)` come out as `|*`: the angle `0` lies on its own
/// partition boundary.
pub fn kneading(theta: &Angle) -> KneadingSequence {
    let t = theta.orbit_type();
    let (l, n) = (t.preperiod as usize, t.period as usize);
    let raw = raw_kneading_symbols(theta, l + n);
    let mut pre = raw;
    let per = pre.split_off(l);
    KneadingSequence::from_raw(pre, per)
}

pub(crate) fn raw_kneading_symbols(theta: &Angle, len: usize) -> Vec<Symbol> {
    if let Some((num, den)) = theta.as_u64_pair() {
        let pos = if num == den { 0 } else { num };
        return fast::kneading_symbols(pos, den, len);
    }
    itinerary(theta, &PartitionContext::new(theta.clone()), len)
}

/// One-sided pointwise limits `K−(θ) = lim K(θ')` as `θ' ↗ θ` and
/// `K+(θ) = lim K(θ')` as `θ' ↘ θ`, for periodic `θ`.
///
/// Both agree with `K(θ)` except that the `*` entries are resolved: a small
/// perturbation `±ε` shifts the orbit point at the star position by
/// `2^(n-1)ε` but the boundary only by `ε/2`, so the point exits upward for
/// `K+` and downward for `K−`. Which symbol that yields depends on which
/// boundary half carries the star.
///
/// For `θ = 0` and `θ = 1` both limits are the all-ones sequence (every
/// nearby orbit stays in the `1`-arc of its own partition at any fixed
/// position), so the star is not split there.
pub fn limit_kneadings(theta: &Angle) -> Result<(KneadingSequence, KneadingSequence)> {
    let t = theta.orbit_type();
    if t.preperiod != 0 {
        return Err(Error::NotPeriodic);
    }
    if theta.is_zero() || theta.is_one() {
        let ones = KneadingSequence::from_raw(Vec::new(), alloc::vec![Symbol::One]);
        return Ok((ones.clone(), ones));
    }
    let n = t.period as usize;
    let raw = raw_kneading_symbols(theta, n);
    // The star sits at the unique boundary half that is itself periodic:
    // the orbit point w with 2w = θ.
    let (b_low, _b_high) = theta.halves();
    let mut w = theta.clone();
    for _ in 0..(n - 1) {
        w = w.double();
    }
    let star_is_low = w.position_cmp(&b_low) == core::cmp::Ordering::Equal;
    // Above the lower boundary half lies the 1-arc; above the upper half the
    // 0-arc.
    let (minus_fill, plus_fill) = if star_is_low {
        (Symbol::Zero, Symbol::One)
    } else {
        (Symbol::One, Symbol::Zero)
    };
    let fill = |sym: Symbol| {
        KneadingSequence::from_raw(
            Vec::new(),
            raw.iter()
                .map(|s| if *s == Symbol::Star { sym } else { *s })
                .collect(),
        )
    };
    Ok((fill(minus_fill), fill(plus_fill)))
}

/// Strictly increasing list of periods, starting at 1, encoding the ray-pair
/// walls between the origin and the parameter; printed as `1-3-4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InternalAddress(Vec<u64>);

impl InternalAddress {
    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub(crate) fn from_entries(entries: Vec<u64>) -> Self {
        debug_assert!(entries.first() == Some(&1));
        debug_assert!(entries.windows(2).all(|w| w[0] < w[1]));
        InternalAddress(entries)
    }
}

impl fmt::Display for InternalAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "-")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Internal address of a *-periodic kneading sequence via the gap function
/// `ρ(m) = min{ k > m : K_k ≠ K_{k−m} }`, iterated from 1 until the period
/// is reached. `*` differs from both `0` and `1`.
pub fn internal_address(k: &KneadingSequence) -> Result<InternalAddress> {
    if !k.is_star_periodic() {
        return Err(Error::NotStarPeriodic);
    }
    let n = k.period() as u64;
    let mut entries = alloc::vec![1u64];
    let mut m = 1u64;
    while m < n {
        let mut next = m + 1;
        loop {
            if k.symbol_at(next as usize) != k.symbol_at((next - m) as usize) {
                break;
            }
            next += 1;
            debug_assert!(next <= n, "rho must stop by the star at position n");
        }
        entries.push(next);
        m = next;
    }
    Ok(InternalAddress::from_entries(entries))
}

/// Internal address of a periodic angle: shorthand for
/// `internal_address(&kneading(θ))`.
pub fn internal_address_of_angle(theta: &Angle) -> Result<InternalAddress> {
    internal_address(&kneading(theta))
}

/// Circle position of an angle as machine integers, when they fit.
pub(crate) fn position_u64(theta: &Angle) -> Option<(u64, u64)> {
    let den = theta.denom().to_u64()?;
    let num = theta.position_numer().to_u64()?;
    Some((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::enumerate_exact_period;
    use alloc::string::ToString;
    use alloc::{format, vec};
    use num_bigint::BigUint;
    use num_integer::Integer;

    fn a(s: &str) -> Angle {
        s.parse().unwrap()
    }

    #[test]
    fn paper_kneading_examples() {
        assert_eq!(kneading(&a("9/56")).to_string(), "110|1");
        assert_eq!(kneading(&a("25/56")).to_string(), "100|101");
        assert_eq!(kneading(&a("1/2")).to_string(), "1|0");
    }

    #[test]
    fn kneading_of_endpoints_is_star() {
        assert_eq!(kneading(&Angle::zero()).to_string(), "|*");
        assert_eq!(kneading(&Angle::one()).to_string(), "|*");
    }

    #[test]
    fn small_periodic_kneadings() {
        assert_eq!(kneading(&a("1/3")).to_string(), "|1*");
        assert_eq!(kneading(&a("1/7")).to_string(), "|11*");
        assert_eq!(kneading(&a("1/5")).to_string(), "|110*");
        assert_eq!(kneading(&a("3/7")).to_string(), "|10*");
    }

    #[test]
    fn itinerary_examples() {
        let ctx = PartitionContext::new(a("9/56"));
        assert_eq!(
            itinerary(&a("2/7"), &ctx, 3),
            vec![Symbol::One, Symbol::One, Symbol::One]
        );
        let ctx13 = PartitionContext::new(a("1/3"));
        assert_eq!(itinerary(&a("2/3"), &ctx13, 1), vec![Symbol::Star]);
    }

    #[test]
    fn itinerary_of_theta_is_kneading_prefix() {
        for s in ["9/56", "25/56", "1/2", "1/3", "3/7", "11/56", "5/96"] {
            let theta = a(s);
            let ctx = PartitionContext::new(theta.clone());
            let k = kneading(&theta);
            assert_eq!(itinerary(&theta, &ctx, 12), k.expand(12), "{s}");
        }
    }

    #[test]
    fn itinerary_fast_and_big_paths_agree() {
        // Force the BigUint path by using the generic loop directly.
        for (alpha, base) in [("11/56", "9/56"), ("2/7", "1/3"), ("1/2", "3/7")] {
            let alpha = a(alpha);
            let ctx = PartitionContext::new(a(base));
            let slow: Vec<Symbol> = {
                let mut out = Vec::new();
                let mut x = alpha.clone();
                for _ in 0..20 {
                    out.push(ctx.label(&x));
                    x = x.double();
                }
                out
            };
            assert_eq!(itinerary(&alpha, &ctx, 20), slow);
        }
    }

    #[test]
    fn canonical_form_merges_tails() {
        // 1 0 | 1 0 repeating collapses to |10.
        let ks = KneadingSequence::from_raw(
            vec![Symbol::One, Symbol::Zero],
            vec![Symbol::One, Symbol::Zero],
        );
        assert_eq!(ks.to_string(), "|10");
        // Proper powers reduce.
        let ks = KneadingSequence::from_raw(
            vec![],
            vec![Symbol::One, Symbol::One, Symbol::One],
        );
        assert_eq!(ks.to_string(), "|1");
    }

    #[test]
    fn limit_kneadings_examples() {
        let (minus, plus) = limit_kneadings(&a("1/3")).unwrap();
        // K−(1/3) = repeating 11 (canonically |1), K+(1/3) = repeating 10.
        assert_eq!(minus.expand(6), vec![Symbol::One; 6]);
        assert_eq!(
            plus.expand(4),
            vec![Symbol::One, Symbol::Zero, Symbol::One, Symbol::Zero]
        );
        let (minus, plus) = limit_kneadings(&a("1/7")).unwrap();
        assert_eq!(minus.expand(3), vec![Symbol::One; 3]);
        assert_eq!(plus.expand(3), vec![Symbol::One, Symbol::One, Symbol::Zero]);
    }

    #[test]
    fn limit_kneadings_rejects_preperiodic() {
        assert!(matches!(limit_kneadings(&a("9/56")), Err(Error::NotPeriodic)));
    }

    #[test]
    fn limit_kneadings_match_perturbation_oracle() {
        // Exact-rational perturbation: θ ± 1/(den * 2^(N+3)) keeps the first
        // N labels of the limit sequence.
        let depth = 20usize;
        for n in 1..=6u32 {
            for theta in enumerate_exact_period(n).unwrap() {
                if theta.is_zero() || theta.is_one() {
                    // Perturbations of 0 = 1 wrap around the circle; both
                    // one-sided limits are all ones.
                    let (minus, plus) = limit_kneadings(&theta).unwrap();
                    assert_eq!(minus.expand(depth), vec![Symbol::One; depth]);
                    assert_eq!(plus.expand(depth), vec![Symbol::One; depth]);
                    continue;
                }
                let den = theta.denom();
                let shift = BigUint::from(1u32) << (depth + 3);
                let num = theta.numer() * &shift;
                let big_den = den * &shift;
                let below =
                    Angle::from_big(&num - 1u32, big_den.clone()).unwrap();
                let above = Angle::from_big(&num + 1u32, big_den).unwrap();
                let (minus, plus) = limit_kneadings(&theta).unwrap();
                let oracle_minus = raw_kneading_symbols(&below, depth);
                let oracle_plus = raw_kneading_symbols(&above, depth);
                assert_eq!(minus.expand(depth), oracle_minus, "K−({theta})");
                assert_eq!(plus.expand(depth), oracle_plus, "K+({theta})");
            }
        }
    }

    #[test]
    fn limit_kneadings_agree_off_star_positions() {
        for n in 1..=7u32 {
            for theta in enumerate_exact_period(n).unwrap() {
                let k = kneading(&theta);
                let (minus, plus) = limit_kneadings(&theta).unwrap();
                assert_eq!(n as usize % minus.period(), 0, "period of K− divides n");
                assert_eq!(n as usize % plus.period(), 0, "period of K+ divides n");
                for pos in 1..=(2 * n as usize) {
                    let s = k.symbol_at(pos);
                    if s != Symbol::Star {
                        assert_eq!(minus.symbol_at(pos), s);
                        assert_eq!(plus.symbol_at(pos), s);
                    } else if !(theta.is_zero() || theta.is_one()) {
                        assert_ne!(minus.symbol_at(pos), plus.symbol_at(pos));
                    }
                }
            }
        }
    }

    #[test]
    fn internal_address_examples() {
        let addr = |s: &str| internal_address_of_angle(&a(s)).unwrap().to_string();
        assert_eq!(addr("1/3"), "1-2");
        // The 1/3-limb satellite: its wake is crossed by no lower-period pair.
        assert_eq!(addr("1/7"), "1-3");
        assert_eq!(addr("3/7"), "1-2-3");
        assert_eq!(addr("1/5"), "1-3-4");
        assert_eq!(addr("0"), "1");
        assert_eq!(addr("1"), "1");
    }

    #[test]
    fn internal_address_rejects_non_star_periodic() {
        assert!(matches!(
            internal_address(&kneading(&a("9/56"))),
            Err(Error::NotStarPeriodic)
        ));
    }

    #[test]
    fn first_symbol_is_one_in_open_interval() {
        for n in 1..=8u32 {
            for theta in enumerate_exact_period(n).unwrap() {
                if !theta.is_zero() && !theta.is_one() {
                    assert_eq!(kneading(&theta).symbol_at(1), Symbol::One);
                }
            }
        }
    }

    /// Exhaustive structural invariants for every reduced fraction with
    /// denominator up to 2^12: kneading preperiod equals the angle's
    /// preperiod, the kneading period divides the angle's period, and stars
    /// appear exactly at the multiples of the period of periodic angles.
    #[test]
    fn kneading_structure_exhaustive_to_denominator_4096() {
        let mut checked = 0u64;
        for den in 1..=(1u64 << 12) {
            for num in 0..den {
                if num.gcd(&den) != 1 {
                    continue;
                }
                let (l, n) = orbit_type_u64(den);
                let raw = fast::kneading_symbols(num, den, (l + n) as usize);
                let mut pre: Vec<Symbol> = raw.clone();
                let per = pre.split_off(l as usize);
                let ks = KneadingSequence::from_raw(pre, per);
                assert_eq!(ks.preperiod() as u64, l, "preperiod at {num}/{den}");
                assert_eq!(n % ks.period() as u64, 0, "period at {num}/{den}");
                if l == 0 {
                    for (i, s) in raw.iter().enumerate() {
                        let at_period_end = (i + 1) as u64 == n;
                        assert_eq!(*s == Symbol::Star, at_period_end, "{num}/{den}");
                    }
                } else {
                    assert!(raw.iter().all(|s| *s != Symbol::Star), "{num}/{den}");
                }
                checked += 1;
            }
        }
        assert!(checked > 5_000_000, "swept {checked} angles");
    }

    fn orbit_type_u64(den: u64) -> (u64, u64) {
        let mut m = den;
        let mut l = 0;
        while m % 2 == 0 {
            m /= 2;
            l += 1;
        }
        if m == 1 {
            return (l, 1);
        }
        let mut pow = 2 % m;
        let mut n = 1;
        while pow != 1 {
            pow = (pow * 2) % m;
            n += 1;
        }
        (l, n)
    }

    #[test]
    fn display_format_matches_examples() {
        assert_eq!(format!("{}", kneading(&a("9/56"))), "110|1");
        assert_eq!(format!("{}", kneading(&a("1/3"))), "|1*");
    }
}
