//! Parameter-plane combinatorics: counting parabolic parameters, the pairing
//! of periodic angles whose parameter rays land together, primitive versus
//! satellite classification, orbit portraits with rotation numbers and sector
//! widths, and Misiurewicz ray classes.
//!
//! Pair tables are built period by period (lower-period chords constrain
//! higher periods); the resulting values are immutable and freely shared.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::angle::Angle;
use crate::fast;
use crate::kneading::{kneading, position_u64, KneadingSequence, Symbol};
use crate::{Error, Result};

/// Exact nonnegative rational, used for sector widths.
pub type ExactRatio = Ratio<BigUint>;

/// Largest period/preperiod sums the enumerative operations accept. The cost
/// of each is `O(2^bits)` angles.
pub const MAX_ENUM_BITS: u32 = 24;

/// Number `s_n` of parabolic parameters of exact ray period `n`, from the
/// recursion `Σ_{k|n} s_k = 2^(n-1)`.
///
/// Equals half the number of angles of exact period `n` (counting both `0`
/// and `1` for `n = 1`). Supports `1 <= n <= 127`.
pub fn count_parabolic(n: u32) -> u128 {
    assert!((1..=127).contains(&n), "count_parabolic: n out of range");
    count_parabolic_table(n)[n as usize]
}

/// `s_1 ..= s_n` as a table, index 0 unused.
pub fn count_parabolic_table(n: u32) -> Vec<u128> {
    let mut s = alloc::vec![0u128; n as usize + 1];
    for m in 1..=n as usize {
        let mut v = 1u128 << (m - 1);
        for (k, s_k) in s.iter().enumerate().take(m).skip(1) {
            if m.is_multiple_of(k) {
                v -= s_k;
            }
        }
        s[m] = v;
    }
    s
}

/// Two periodic angles whose parameter rays land at the same parabolic
/// parameter, with `low < high`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayPair {
    low: Angle,
    high: Angle,
    period: u64,
}

impl RayPair {
    pub fn low(&self) -> &Angle {
        &self.low
    }

    pub fn high(&self) -> &Angle {
        &self.high
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// The common kneading sequence of the two member angles.
    pub fn kneading_sequence(&self) -> KneadingSequence {
        kneading(&self.low)
    }

    /// True iff neither forward image of either member enters the open arc
    /// `(low, high)`: the arc is the minimal sector at the landing orbit.
    pub fn has_characteristic_arc(&self) -> bool {
        for start in [&self.low, &self.high] {
            let mut x = start.double();
            for _ in 1..self.period {
                if x.in_open_arc(&self.low, &self.high) {
                    return false;
                }
                x = x.double();
            }
        }
        true
    }
}

/// A chord position pair for crossing tests; degenerate for the pair (0, 1).
#[derive(Clone, Copy)]
struct Chord {
    lo_n: u64,
    lo_d: u64,
    hi_n: u64,
    hi_d: u64,
}

impl Chord {
    fn strictly_inside(&self, pn: u64, pd: u64) -> bool {
        pos_lt(self.lo_n, self.lo_d, pn, pd) && pos_lt(pn, pd, self.hi_n, self.hi_d)
    }

    fn crosses(&self, other: &Chord) -> bool {
        self.strictly_inside(other.lo_n, other.lo_d) != self.strictly_inside(other.hi_n, other.hi_d)
    }
}

#[inline]
fn pos_lt(an: u64, ad: u64, bn: u64, bd: u64) -> bool {
    (an as u128) * (bd as u128) < (bn as u128) * (ad as u128)
}

/// All ray pairs of exact periods `1 ..= n_max`, ordered by `(period, low)`.
///
/// Within each period, the smallest not-yet-paired angle is joined to its
/// immediate unpaired successor whenever the chord between them crosses no
/// chord created so far; angles whose successor chord is blocked are skipped
/// until a later pass frees them. The pairing always completes; a stalled
/// pass reports an internal-consistency error.
pub fn lavaurs_pairs(n_max: u32) -> Result<Vec<RayPair>> {
    if n_max == 0 || n_max > MAX_ENUM_BITS {
        return Err(Error::BoundExceeded {
            what: "pair table period",
            limit: MAX_ENUM_BITS as u64,
            got: n_max as u64,
        });
    }
    let expected = count_parabolic_table(n_max);
    let mut pairs = Vec::new();
    let mut chords = Vec::new();
    for n in 1..=n_max {
        if n == 1 {
            pairs.push(RayPair { low: Angle::zero(), high: Angle::one(), period: 1 });
            chords.push(Chord { lo_n: 0, lo_d: 1, hi_n: 0, hi_d: 1 });
            continue;
        }
        let den = (1u64 << n) - 1;
        let mut unpaired: Vec<u64> = (1..den)
            .filter(|&a| fast::exact_period_mod(a, den) == n as u64)
            .collect();
        let mut made = Vec::new();
        while !unpaired.is_empty() {
            let mut progressed = false;
            let mut i = 0;
            while i + 1 < unpaired.len() {
                let cand = Chord {
                    lo_n: unpaired[i],
                    lo_d: den,
                    hi_n: unpaired[i + 1],
                    hi_d: den,
                };
                if chords.iter().all(|c| !c.crosses(&cand)) {
                    made.push((unpaired[i], unpaired[i + 1]));
                    chords.push(cand);
                    unpaired.drain(i..=i + 1);
                    progressed = true;
                } else {
                    i += 1;
                }
            }
            if !unpaired.is_empty() && !progressed {
                return Err(Error::Internal("lavaurs pairing stalled"));
            }
        }
        made.sort_unstable();
        if made.len() as u128 != expected[n as usize] {
            return Err(Error::Internal("pair count does not match s_n"));
        }
        for (lo, hi) in made {
            pairs.push(RayPair {
                low: Angle::new(lo, den)?,
                high: Angle::new(hi, den)?,
                period: n as u64,
            });
        }
    }
    Ok(pairs)
}

/// The partner of a periodic angle in the ray pairing; `0 <-> 1` (the ray at
/// angle `0 = 1` counts twice).
pub fn conjugate_angle(theta: &Angle) -> Result<Angle> {
    let n = theta.exact_period().ok_or(Error::NotPeriodic)?;
    if theta.is_zero() {
        return Ok(Angle::one());
    }
    if theta.is_one() {
        return Ok(Angle::zero());
    }
    let pair = pair_of(theta, n)?;
    Ok(if pair.low == *theta { pair.high } else { pair.low })
}

fn pair_of(theta: &Angle, n: u64) -> Result<RayPair> {
    let pairs = lavaurs_pairs(n as u32)?;
    pairs
        .into_iter()
        .find(|p| p.period == n && (p.low == *theta || p.high == *theta))
        .ok_or(Error::Internal("periodic angle missing from its pair table"))
}

/// True iff the pair joins two distinct doubling orbits, i.e. the landing
/// parameter is a primitive root (cusp). False for satellite/bifurcation
/// roots, where both angles lie on one orbit.
///
/// The pair `(0, 1)` is primitive: the cusp of the main cardioid.
pub fn is_primitive(pair: &RayPair) -> bool {
    if pair.period == 1 {
        return true;
    }
    let mut x = pair.low.clone();
    for _ in 0..pair.period {
        if x.position_cmp(&pair.high) == Ordering::Equal {
            return false;
        }
        x = x.double();
    }
    true
}

/// The landing pattern of the doubling orbit of a periodic angle: one set of
/// angles per point of the periodic orbit it lands on (stable throughout the
/// wake of the angle's ray pair), with the combinatorial rotation number of
/// the first-return map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortraitCycle {
    point_angles: Vec<Vec<Angle>>,
    rotation: Ratio<u64>,
    ray_period: u64,
}

impl PortraitCycle {
    /// One sorted angle set per orbit point, cyclically ordered by the
    /// dynamics (doubling maps set `i` onto set `i+1`).
    pub fn point_angles(&self) -> &[Vec<Angle>] {
        &self.point_angles
    }

    /// `r/s`: the first-return map advances the `s` rays at a point by `r`
    /// positions in circular order. `0/1` when a single ray lands per point.
    pub fn rotation(&self) -> Ratio<u64> {
        self.rotation
    }

    pub fn ray_period(&self) -> u64 {
        self.ray_period
    }

    /// Orbit period `k = n/s`.
    pub fn orbit_period(&self) -> u64 {
        self.point_angles.len() as u64
    }

    /// Number of rays landing at each orbit point.
    pub fn rays_per_point(&self) -> u64 {
        self.point_angles[0].len() as u64
    }
}

/// Computes the orbit portrait of a periodic angle.
///
/// Angles of the same exact period co-land exactly when their orbits visit
/// the same sides of the partition at the halves of the pair's characteristic
/// angle; the boundary hits on that orbit are resolved by nudging the
/// partition into the characteristic arc (both one-sided nudges must agree).
/// For a primitive pair the stable pattern is one ray per orbit point, so the
/// portrait is the orbit of singletons.
pub fn portrait_cycle(theta: &Angle) -> Result<PortraitCycle> {
    let n = theta.exact_period().ok_or(Error::NotPeriodic)?;
    if n > MAX_ENUM_BITS as u64 {
        return Err(Error::BoundExceeded {
            what: "portrait period",
            limit: MAX_ENUM_BITS as u64,
            got: n,
        });
    }
    if theta.is_zero() || theta.is_one() {
        return Ok(PortraitCycle {
            point_angles: alloc::vec![alloc::vec![theta.clone()]],
            rotation: Ratio::new(0, 1),
            ray_period: 1,
        });
    }
    let pair = pair_of(theta, n)?;
    if is_primitive(&pair) {
        let mut sets = Vec::with_capacity(n as usize);
        let mut x = theta.clone();
        for _ in 0..n {
            sets.push(alloc::vec![x.clone()]);
            x = x.double();
        }
        return Ok(PortraitCycle {
            point_angles: sets,
            rotation: Ratio::new(0, 1),
            ray_period: n,
        });
    }

    let den = (1u64 << n) - 1;
    let scale = |a: &Angle| -> Result<u64> {
        let (num, d) = position_u64(a).ok_or(Error::Internal("portrait angle too large"))?;
        Ok(num * (den / d))
    };
    let t_ref = scale(theta)?;
    let lo_ref = scale(&pair.low)?;
    let hi_ref = scale(&pair.high)?;

    let labels = |start: u64, base: u64, from_low: bool| -> Vec<bool> {
        let mut out = Vec::with_capacity(n as usize);
        let mut a = start;
        for _ in 0..n {
            out.push(if from_low {
                fast::wake_label_from_low(a, base, den)
            } else {
                fast::wake_label_from_high(a, base, den)
            });
            a = fast::mod_double(a, den);
        }
        out
    };
    let reference = labels(t_ref, lo_ref, true);
    let reference_hi = labels(t_ref, hi_ref, false);

    let mut group = Vec::new();
    for a in 1..den {
        if fast::exact_period_mod(a, den) != n {
            continue;
        }
        if labels(a, lo_ref, true) == reference {
            if labels(a, hi_ref, false) != reference_hi {
                return Err(Error::Internal("wake conventions disagree on portrait"));
            }
            group.push(a);
        }
    }
    let s = group.len() as u64;
    if s < 2 || n % s != 0 || !group.contains(&t_ref) {
        return Err(Error::Internal("satellite portrait grouping failed"));
    }
    // Everything in the group must lie on the orbit of the pair.
    {
        let mut orbit = Vec::with_capacity(n as usize);
        let mut a = lo_ref;
        for _ in 0..n {
            orbit.push(a);
            a = fast::mod_double(a, den);
        }
        if !group.iter().all(|g| orbit.contains(g)) {
            return Err(Error::Internal("portrait group left the pair orbit"));
        }
    }
    let k = n / s;

    // Rotation number: the first return map 2^k advances the sorted set by a
    // constant step r with gcd(r, s) = 1.
    group.sort_unstable();
    let first_return = |mut a: u64| {
        for _ in 0..k {
            a = fast::mod_double(a, den);
        }
        a
    };
    let index_of = |a: u64| group.iter().position(|&g| g == a).unwrap();
    let r = {
        let mut advance = None;
        for (i, &a) in group.iter().enumerate() {
            let j = index_of(first_return(a));
            let step = ((j + group.len()) - i) as u64 % s;
            match advance {
                None => advance = Some(step),
                Some(prev) if prev != step => {
                    return Err(Error::Internal("first return is not a rigid rotation"))
                }
                _ => {}
            }
        }
        advance.unwrap()
    };
    if num_integer::gcd(r, s) != 1 {
        return Err(Error::Internal("first return is not transitive"));
    }

    let mut sets = Vec::with_capacity(k as usize);
    let mut current: Vec<u64> = {
        // Start at the set containing θ.
        group.clone()
    };
    // group is the set containing θ by construction.
    for _ in 0..k {
        let mut angles: Vec<Angle> = current
            .iter()
            .map(|&a| Angle::new(a, den))
            .collect::<Result<_>>()?;
        angles.sort();
        sets.push(angles);
        current = current.iter().map(|&a| fast::mod_double(a, den)).collect();
        current.sort_unstable();
    }
    Ok(PortraitCycle {
        point_angles: sets,
        rotation: Ratio::new(r, s),
        ray_period: n,
    })
}

/// The cyclic gaps between the rays landing at one periodic point; exact
/// rationals summing to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorWidths {
    widths: Vec<ExactRatio>,
}

impl SectorWidths {
    /// Gaps between circularly consecutive angles, starting at the smallest.
    pub fn widths(&self) -> &[ExactRatio] {
        &self.widths
    }
}

/// Sector widths of one point's angle set. Requires at least two angles.
pub fn sector_widths(point_angles: &[Angle]) -> Result<SectorWidths> {
    if point_angles.len() < 2 {
        return Err(Error::BoundExceeded {
            what: "sector count",
            limit: u64::MAX,
            got: point_angles.len() as u64,
        });
    }
    let mut pos: Vec<ExactRatio> = point_angles
        .iter()
        .map(|a| Ratio::new(a.position_numer(), a.denom().clone()))
        .collect();
    pos.sort();
    let mut widths = Vec::with_capacity(pos.len());
    for w in pos.windows(2) {
        widths.push(&w[1] - &w[0]);
    }
    widths.push(ExactRatio::one() - pos.last().unwrap() + pos.first().unwrap());
    debug_assert_eq!(
        widths.iter().fold(ExactRatio::zero(), |acc, w| acc + w),
        ExactRatio::one()
    );
    Ok(SectorWidths { widths })
}

/// The full set of preperiodic angles whose parameter rays land at one
/// Misiurewicz point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisiurewiczClass {
    angles: Vec<Angle>,
    preperiod: u64,
    ray_period: u64,
    kneading_period: u64,
}

impl MisiurewiczClass {
    /// Member angles, ascending.
    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    pub fn preperiod(&self) -> u64 {
        self.preperiod
    }

    pub fn ray_period(&self) -> u64 {
        self.ray_period
    }

    /// Period `k` of the common kneading sequence; the class has `n/k`
    /// members whenever `n/k > 1`.
    pub fn kneading_period(&self) -> u64 {
        self.kneading_period
    }

    pub fn count(&self) -> usize {
        self.angles.len()
    }
}

/// The Misiurewicz ray class of a strictly preperiodic angle: all angles of
/// the same exact type whose orbits match `θ`'s itinerary in the partition at
/// the halves of `θ`, position by position.
///
/// No boundary hit can occur: the boundary has preperiod `l + 1` while every
/// orbit point of a type-`(l, n)` angle has preperiod at most `l`.
pub fn misiurewicz_class(theta: &Angle) -> Result<MisiurewiczClass> {
    let (l, n, den, t_num) = misiurewicz_context(theta)?;
    let reference = strict_reference(t_num, den, l, n);
    let mut members = Vec::new();
    for a in fast::exact_type_numerators(l, n) {
        if matches_reference(a, t_num, den, &reference) {
            members.push(Angle::new(a, den_value(l, n))?);
        }
    }
    finish_class(theta, members, l, n)
}

/// Every Misiurewicz class of exact type `(l, n)`, ascending by smallest
/// member. Cheaper than calling [`misiurewicz_class`] per angle when a whole
/// type is wanted.
pub fn misiurewicz_classes_of_type(l: u32, n: u32) -> Result<Vec<MisiurewiczClass>> {
    check_type_bounds(l, n)?;
    let den = den_value(l, n);
    let nums = fast::exact_type_numerators(l, n);
    let mut assigned = alloc::vec![false; nums.len()];
    let mut classes = Vec::new();
    for i in 0..nums.len() {
        if assigned[i] {
            continue;
        }
        let t_num = nums[i];
        let reference = strict_reference(t_num, den, l, n);
        let mut members = Vec::new();
        for (j, &a) in nums.iter().enumerate().skip(i) {
            if !assigned[j] && matches_reference(a, t_num, den, &reference) {
                assigned[j] = true;
                members.push(Angle::new(a, den)?);
            }
        }
        let rep = members[0].clone();
        classes.push(finish_class(&rep, members, l, n)?);
    }
    Ok(classes)
}

fn check_type_bounds(l: u32, n: u32) -> Result<()> {
    if l == 0 {
        return Err(Error::NotPreperiodic);
    }
    if l + n > MAX_ENUM_BITS {
        return Err(Error::BoundExceeded {
            what: "preperiod + period",
            limit: MAX_ENUM_BITS as u64,
            got: (l + n) as u64,
        });
    }
    Ok(())
}

fn den_value(l: u32, n: u32) -> u64 {
    (1u64 << l) * ((1u64 << n) - 1)
}

fn misiurewicz_context(theta: &Angle) -> Result<(u32, u32, u64, u64)> {
    let t = theta.orbit_type();
    if t.preperiod == 0 {
        return Err(Error::NotPreperiodic);
    }
    let (l, n) = (t.preperiod as u32, t.period as u32);
    check_type_bounds(l, n)?;
    let den = den_value(l, n);
    let (num, d) = position_u64(theta).ok_or(Error::Internal("type bounds imply u64"))?;
    Ok((l, n, den, num * (den / d)))
}

/// Itinerary of `θ` with respect to its own partition over `l + 2n` steps
/// (one period of guard beyond the eventual cycle).
fn strict_reference(t_num: u64, den: u64, l: u32, n: u32) -> Vec<Symbol> {
    let len = (l + 2 * n) as usize;
    let mut out = Vec::with_capacity(len);
    let mut a = t_num;
    for _ in 0..len {
        let s = fast::label_same_den(a, t_num, den);
        debug_assert!(s != Symbol::Star, "preperiodic orbits avoid the boundary");
        out.push(s);
        a = fast::mod_double(a, den);
    }
    out
}

fn matches_reference(a: u64, t_num: u64, den: u64, reference: &[Symbol]) -> bool {
    let mut x = a;
    for want in reference {
        if fast::label_same_den(x, t_num, den) != *want {
            return false;
        }
        x = fast::mod_double(x, den);
    }
    true
}

fn finish_class(
    rep: &Angle,
    members: Vec<Angle>,
    l: u32,
    n: u32,
) -> Result<MisiurewiczClass> {
    let k = kneading(rep).period() as u64;
    let n = n as u64;
    let size_ok = if n / k > 1 {
        members.len() as u64 == n / k
    } else {
        members.len() == 1 || members.len() == 2
    };
    if !n.is_multiple_of(k) || !size_ok {
        return Err(Error::Internal("misiurewicz class size differs from n/k"));
    }
    Ok(MisiurewiczClass {
        angles: members,
        preperiod: l as u64,
        ray_period: n,
        kneading_period: k,
    })
}
