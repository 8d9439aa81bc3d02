//! Newton solvers in the parameter plane: superattracting centers, component
//! boundary points via multiplier continuation, and Misiurewicz parameters.
//!
//! Residuals are evaluated in double-double arithmetic at the returned
//! parameter, so the reported figure is the true defect of the double value
//! rather than an optimistic iteration artifact.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float; // float methods in no_std builds

use crate::combinat::count_parabolic;
use crate::{Error, Result};

use super::dd::DdComplex;
use super::{multiplier, NewtonResult, SolveKind, SolverConfig};

const CENTER_PERIOD_CAP: u32 = 20;
const MISIUREWICZ_SPAN_CAP: u32 = 60;
/// Distinct solutions closer than this are treated as duplicates.
const DEDUP_DISTANCE: f64 = 1e-7;
/// A candidate is attributed to a proper divisor period when the shorter
/// iterate is this small.
const DIVISOR_REJECT: f64 = 1e-6;

/// `(p_c^n(0), d/dc p_c^n(0))` by direct recurrence.
fn center_value(c: Complex64, n: u32) -> (Complex64, Complex64) {
    let mut w = Complex64::new(0.0, 0.0);
    let mut dw = Complex64::new(0.0, 0.0);
    for _ in 0..n {
        dw = 2.0 * w * dw + 1.0;
        w = w * w + c;
        if !w.is_finite() {
            break;
        }
    }
    (w, dw)
}

fn center_value_dd(c: DdComplex, n: u32) -> (DdComplex, Complex64) {
    let mut w = DdComplex::zero();
    let mut dw = Complex64::new(0.0, 0.0);
    for _ in 0..n {
        dw = 2.0 * w.to_c64() * dw + 1.0;
        w = w.mul(w).add(c);
    }
    (w, dw)
}

fn newton_center(start: Complex64, n: u32) -> Option<Complex64> {
    let mut c = start;
    for _ in 0..120 {
        let (p, dp) = center_value(c, n);
        if !p.is_finite() || !dp.is_finite() || dp.norm_sqr() == 0.0 {
            return None;
        }
        let delta = p / dp;
        c -= delta;
        if !c.is_finite() || c.norm_sqr() > 64.0 {
            return None;
        }
        if delta.norm() < 1e-13 {
            return Some(c);
        }
    }
    None
}

/// Two double-double Newton steps, then the residual at the rounded value.
fn polish_center(c0: Complex64, n: u32) -> (Complex64, f64) {
    let mut c = DdComplex::from_c64(c0);
    for _ in 0..2 {
        let (p, dp) = center_value_dd(c, n);
        if dp.norm_sqr() == 0.0 {
            break;
        }
        c = c.sub(DdComplex::from_c64(p.to_c64() / dp));
    }
    let rounded = c.to_c64();
    let (p, _) = center_value_dd(DdComplex::from_c64(rounded), n);
    (rounded, p.norm())
}

/// All centers of hyperbolic components of exact period `n`: the roots of
/// `p_c^n(0) = 0` that do not solve any proper-divisor equation. The count
/// always equals `s_n`; an incomplete search reports how many were found.
pub fn find_centers(n: u32, cfg: &SolverConfig) -> Result<Vec<NewtonResult>> {
    cfg.validate()?;
    if n == 0 || n > CENTER_PERIOD_CAP {
        return Err(Error::BoundExceeded {
            what: "center period",
            limit: CENTER_PERIOD_CAP as u64,
            got: n as u64,
        });
    }
    let expected = count_parabolic(n) as usize;
    let divisors: Vec<u32> = (1..n).filter(|k| n.is_multiple_of(*k)).collect();
    let mut found: Vec<Complex64> = Vec::with_capacity(expected);
    let radii = [0.28, 0.62, 1.05, 1.48, 1.9, 2.25];
    'rounds: for round in 0..5u32 {
        let spokes = (expected * 6).max(64) << round;
        for &r in &radii {
            for j in 0..spokes {
                let phi = core::f64::consts::TAU
                    * ((j as f64 + 0.5) / spokes as f64 + 0.083 * round as f64);
                let Some(c) = newton_center(Complex64::from_polar(r, phi), n) else {
                    continue;
                };
                if divisors.iter().any(|&k| center_value(c, k).0.norm() < DIVISOR_REJECT) {
                    continue;
                }
                if found.iter().any(|f| (f - c).norm() < DEDUP_DISTANCE) {
                    continue;
                }
                found.push(c);
                if found.len() == expected {
                    break 'rounds;
                }
            }
        }
    }
    if found.len() != expected {
        return Err(Error::IncompleteRoots { found: found.len(), expected });
    }
    found.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(found
        .into_iter()
        .map(|c| {
            let (c, residual) = polish_center(c, n);
            NewtonResult {
                parameter: c,
                kind: SolveKind::Center,
                residual,
                multiplier: Some(multiplier(c, Complex64::new(0.0, 0.0), n)),
            }
        })
        .collect())
}

/// Orbit values with first and second partials needed for the boundary
/// system: `w = p_c^n(z)`, `u = ∂_z w`, `v = ∂_c w`, `p = ∂_z² w`,
/// `q = ∂_z ∂_c w`.
#[allow(clippy::many_single_char_names)]
fn boundary_orbit(
    c: Complex64,
    z: Complex64,
    n: u32,
) -> (Complex64, Complex64, Complex64, Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (mut w, mut u, mut v, mut p, mut q) = (z, one, zero, zero, zero);
    for _ in 0..n {
        let np = 2.0 * (u * u + w * p);
        let nq = 2.0 * (u * v + w * q);
        let nu = 2.0 * w * u;
        let nv = 2.0 * w * v + 1.0;
        w = w * w + c;
        u = nu;
        v = nv;
        p = np;
        q = nq;
        if !w.is_finite() {
            break;
        }
    }
    (w, u, v, p, q)
}

fn newton_boundary(
    c0: Complex64,
    z0: Complex64,
    n: u32,
    lambda: Complex64,
) -> Option<(Complex64, Complex64)> {
    let mut c = c0;
    let mut z = z0;
    for _ in 0..80 {
        let (w, u, v, p, q) = boundary_orbit(c, z, n);
        if !w.is_finite() {
            return None;
        }
        let f1 = w - z;
        let f2 = u - lambda;
        // Jacobian [[v, u-1], [q, p]] applied to (dc, dz).
        let det = v * p - (u - 1.0) * q;
        if det.norm_sqr() == 0.0 {
            return None;
        }
        let dc = (f1 * p - (u - 1.0) * f2) / det;
        let dz = (v * f2 - q * f1) / det;
        c -= dc;
        z -= dz;
        if !c.is_finite() || !z.is_finite() || c.norm_sqr() > 64.0 {
            return None;
        }
        // Near the root the system degenerates (orbits merge), so the step
        // criterion must tolerate the conditioning.
        if dc.norm() + dz.norm() < 1e-10 * (1.0 + c.norm() + z.norm()) {
            return Some((c, z));
        }
    }
    None
}

/// Boundary point of the component with the given center where the periodic
/// orbit has multiplier `e^(2πit)`, found by Newton continuation from the
/// center outward along the multiplier radius. `t = 0` yields the root,
/// `t = p/q` a bifurcation point.
pub fn component_boundary(
    center: Complex64,
    n: u32,
    t: f64,
    cfg: &SolverConfig,
) -> Result<NewtonResult> {
    cfg.validate()?;
    if n == 0 || n > CENTER_PERIOD_CAP {
        return Err(Error::BoundExceeded {
            what: "boundary period",
            limit: CENTER_PERIOD_CAP as u64,
            got: n as u64,
        });
    }
    let lambda_dir = Complex64::from_polar(1.0, core::f64::consts::TAU * t.fract());
    // At t = 0 the system is singular exactly on the root (periodic orbits
    // merge there), so the radius stops just short; the parameter offset is
    // quadratic in the gap at cusps and at most ~3e-8 at bifurcations.
    let rho_max = if t == 0.0 { 1.0 - 1e-7 } else { 1.0 };
    let mut c = center;
    let mut z = Complex64::new(0.0, 0.0);
    let mut rho = 0.0f64;
    let mut step = 1.0 / 64.0;
    while rho < rho_max {
        let next = (rho + step).min(rho_max);
        match newton_boundary(c, z, n, next * lambda_dir) {
            Some((c2, z2)) => {
                c = c2;
                z = z2;
                rho = next;
                step = (step * 2.0).min(1.0 / 64.0);
            }
            None => {
                step *= 0.5;
                if step < 1e-9 {
                    return Err(Error::ContinuationFailed { at_radius: rho });
                }
            }
        }
    }
    let (w, u, ..) = boundary_orbit(c, z, n);
    let residual = (w - z).norm().max((u - lambda_dir).norm());
    Ok(NewtonResult {
        parameter: c,
        kind: if t == 0.0 { SolveKind::Root } else { SolveKind::Boundary },
        residual,
        multiplier: Some(u),
    })
}

/// Critical orbit `c_0 = 0, c_1 = c, ...` out to index `last`, with
/// `d c_k / dc`.
fn critical_orbit(c: Complex64, last: u32) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut xs = Vec::with_capacity(last as usize + 1);
    let mut ds = Vec::with_capacity(last as usize + 1);
    xs.push(Complex64::new(0.0, 0.0));
    ds.push(Complex64::new(0.0, 0.0));
    for k in 0..last {
        let x = xs[k as usize];
        let d = ds[k as usize];
        ds.push(2.0 * x * d + 1.0);
        xs.push(x * x + c);
    }
    (xs, ds)
}

fn critical_orbit_dd(c: DdComplex, last: u32) -> Vec<DdComplex> {
    let mut xs = Vec::with_capacity(last as usize + 1);
    xs.push(DdComplex::zero());
    for k in 0..last {
        let x = xs[k as usize];
        xs.push(x.mul(x).add(c));
    }
    xs
}

/// Solves `c_{l+n+1} = c_{l+1}` for a Misiurewicz parameter with exact
/// preperiod `l` and exact period `n`, starting from `seed`. Solutions whose
/// preperiod or period is actually smaller are rejected with
/// [`Error::WrongOrbitType`].
pub fn solve_misiurewicz(
    l: u32,
    n: u32,
    seed: Complex64,
    cfg: &SolverConfig,
) -> Result<NewtonResult> {
    cfg.validate()?;
    if l == 0 {
        return Err(Error::NotPreperiodic);
    }
    if l + n > MISIUREWICZ_SPAN_CAP {
        return Err(Error::BoundExceeded {
            what: "preperiod + period",
            limit: MISIUREWICZ_SPAN_CAP as u64,
            got: (l + n) as u64,
        });
    }
    let last = l + n + 1;
    let mut c = seed;
    let mut converged = false;
    for _ in 0..120 {
        let (xs, ds) = critical_orbit(c, last);
        let g = xs[last as usize] - xs[(l + 1) as usize];
        let dg = ds[last as usize] - ds[(l + 1) as usize];
        if !g.is_finite() || !dg.is_finite() || dg.norm_sqr() == 0.0 {
            return Err(Error::NewtonDiverged { context: "misiurewicz" });
        }
        let delta = g / dg;
        c -= delta;
        if !c.is_finite() || c.norm_sqr() > 64.0 {
            return Err(Error::NewtonDiverged { context: "misiurewicz" });
        }
        if delta.norm() < 1e-13 * (1.0 + c.norm()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NewtonDiverged { context: "misiurewicz" });
    }

    // Double-double polish and honest residual at the rounded parameter.
    let mut cd = DdComplex::from_c64(c);
    for _ in 0..2 {
        let xs = critical_orbit_dd(cd, last);
        let (_, ds) = critical_orbit(cd.to_c64(), last);
        let g = xs[last as usize].sub(xs[(l + 1) as usize]);
        let dg = ds[last as usize] - ds[(l + 1) as usize];
        if dg.norm_sqr() == 0.0 {
            break;
        }
        cd = cd.sub(DdComplex::from_c64(g.to_c64() / dg));
    }
    let c = cd.to_c64();
    let xs_dd = critical_orbit_dd(DdComplex::from_c64(c), last);
    let residual = xs_dd[last as usize].sub(xs_dd[(l + 1) as usize]).norm();

    // Exactness check: the preperiod is exactly l, i.e. c_l = -c_{l+n} with
    // the two values distinct. The orbit period may properly divide n (the
    // ray period): several rays landing at one periodic point is the normal
    // case, so no divisor test applies.
    let (xs, _) = critical_orbit(c, last);
    if (xs[l as usize] - xs[(l + n) as usize]).norm() < DIVISOR_REJECT {
        return Err(Error::WrongOrbitType { preperiod: l as u64, period: n as u64 });
    }

    Ok(NewtonResult {
        parameter: c,
        kind: SolveKind::Misiurewicz,
        residual,
        multiplier: Some(multiplier(c, xs[(l + 1) as usize], n)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn centers_of_low_periods() {
        let c1 = find_centers(1, &cfg()).unwrap();
        assert_eq!(c1.len(), 1);
        assert!(c1[0].parameter.norm() < 1e-12);

        let c2 = find_centers(2, &cfg()).unwrap();
        assert_eq!(c2.len(), 1);
        assert!((c2[0].parameter - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn period_three_centers_match_cubic_oracle() {
        // Excluding c = 0, period-3 centers solve c^3 + 2c^2 + c + 1 = 0.
        let centers = find_centers(3, &cfg()).unwrap();
        assert_eq!(centers.len(), 3);
        for r in &centers {
            let c = r.parameter;
            let value = c * c * c + 2.0 * c * c + c + 1.0;
            assert!(value.norm() < 1e-12, "cubic residual {}", value.norm());
            assert!(r.residual < 1e-12);
        }
        assert!(centers
            .iter()
            .any(|r| (r.parameter - Complex64::new(-1.7548776662466927, 0.0)).norm() < 1e-10));
    }

    #[test]
    fn centers_are_simple_roots() {
        for n in 1..=6u32 {
            for r in find_centers(n, &cfg()).unwrap() {
                let (_, dp) = center_value(r.parameter, n);
                assert!(dp.norm() > 1e-6, "derivative at a center must not vanish");
            }
        }
    }

    #[test]
    fn cardioid_boundary_matches_formula() {
        // c(λ) = λ/2 - λ²/4 on the period-1 component.
        for (t, expect) in [
            (0.0, Complex64::new(0.25, 0.0)),
            (0.5, Complex64::new(-0.75, 0.0)),
            (0.25, Complex64::new(0.25, 0.5)),
            (1.0 / 3.0, Complex64::new(-0.125, 0.649519052838329)),
        ] {
            let r = component_boundary(Complex64::new(0.0, 0.0), 1, t, &cfg()).unwrap();
            assert!((r.parameter - expect).norm() < 1e-7, "t={t}: {}", r.parameter);
        }
    }

    #[test]
    fn period_two_root_is_minus_three_quarters() {
        let r = component_boundary(Complex64::new(-1.0, 0.0), 2, 0.0, &cfg()).unwrap();
        assert!((r.parameter - Complex64::new(-0.75, 0.0)).norm() < 1e-7);
        assert_eq!(r.kind, SolveKind::Root);
        assert!((r.multiplier.unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        // The period-2 disk: c = -1 + λ/4.
        let r = component_boundary(Complex64::new(-1.0, 0.0), 2, 0.25, &cfg()).unwrap();
        assert!((r.parameter - Complex64::new(-1.0, 0.25)).norm() < 1e-7);
    }

    #[test]
    fn misiurewicz_i_from_nearby_seed() {
        let r = solve_misiurewicz(1, 2, Complex64::new(0.1, 0.9), &cfg()).unwrap();
        assert!((r.parameter - Complex64::new(0.0, 1.0)).norm() < 1e-10);
        assert!(r.residual < 1e-10);
        assert_eq!(r.kind, SolveKind::Misiurewicz);
        assert!(r.multiplier.unwrap().norm() > 1.0);
    }

    #[test]
    fn misiurewicz_tip_is_minus_two() {
        let r = solve_misiurewicz(1, 1, Complex64::new(-1.9, 0.0), &cfg()).unwrap();
        assert!((r.parameter - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn misiurewicz_rejects_wrong_type() {
        // Around c = -2 there is no (2, 1) point closer than the (1, 1) one;
        // Newton converges back to -2 and the preperiod check fires.
        let err = solve_misiurewicz(2, 1, Complex64::new(-1.999, 0.0), &cfg());
        assert!(matches!(
            err,
            Err(Error::WrongOrbitType { .. }) | Err(Error::NewtonDiverged { .. })
        ));
    }

    #[test]
    fn find_centers_counts_match_s_n() {
        for n in 1..=7u32 {
            let centers = find_centers(n, &cfg()).unwrap();
            assert_eq!(centers.len() as u128, count_parabolic(n), "n={n}");
        }
    }
}
