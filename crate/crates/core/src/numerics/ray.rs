//! External ray tracing by geometric descent of the potential ladder.
//!
//! The point of the ray at potential `τ` and angle `θ` satisfies
//! `p^m(z) = (point at potential 2^m τ, angle 2^m θ)` for the level `m` that
//! lifts `2^m τ` into `[t0, 2 t0)`; at those potentials the Böttcher map is
//! the identity to working precision, so each step solves
//! `p^m(z) = exp(2^m τ + 2πi · 2^m θ)` by Newton iteration seeded from the
//! previous point on the ray.
//!
//! Descent is self-validating: each potential step is computed both in one
//! Newton solve and in two half steps, and the step is recursively refined
//! when the two routes disagree. Without this, rays squeezing through
//! near-parabolic channels (the wake boundaries of real components) can hop
//! onto a neighboring solution branch and silently trace a different ray.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float; // float methods in no_std builds

use crate::angle::Angle;

use super::{potential, Plane, RayTrace, SolverConfig, TraceStatus, LANDING_MIN_POTENTIAL};

/// Traces the dynamic ray at angle `θ` for the polynomial `z^2 + c`.
///
/// For `c` outside the Mandelbrot set the ray may be obstructed by a
/// precritical point; descent then stops with status `Truncated`.
pub fn trace_dynamic_ray(c: Complex64, theta: &Angle, cfg: &SolverConfig) -> RayTrace {
    trace(Plane::Dynamic(c), theta, cfg)
}

/// Traces the parameter ray at angle `θ`: the curve `Φ_M(c) = e^(t + 2πiθ)`
/// descending in `t`, where `Φ_M(c) = φ_c(c)`.
pub fn trace_parameter_ray(theta: &Angle, cfg: &SolverConfig) -> RayTrace {
    trace(Plane::Parameter, theta, cfg)
}

struct Ladder<'a> {
    plane: Plane,
    /// `frac(2^m θ)` per level, exact doubling converted to `f64`.
    effective: Vec<f64>,
    t0: f64,
    cfg: &'a SolverConfig,
}

impl Ladder<'_> {
    /// The descent level whose iterate lifts potential `τ` into `[t0, 2 t0)`.
    fn level_of(&self, tau: f64) -> u32 {
        let m = (self.t0 / tau).log2().ceil();
        (m.max(0.0) as u32).min(self.effective.len() as u32 - 1)
    }

    /// Böttcher target for the lifted point at potential `τ`.
    fn target(&self, tau: f64) -> (u32, Complex64) {
        let m = self.level_of(tau);
        let lifted = (m as f64).exp2() * tau;
        let angle = core::f64::consts::TAU * self.effective[m as usize];
        (m, Complex64::from_polar(lifted.exp(), angle))
    }

    fn solve_at(&self, tau: f64, guess: Complex64) -> Option<Complex64> {
        let (m, target) = self.target(tau);
        let mut z = guess;
        let mut last_resid = f64::INFINITY;
        for _ in 0..self.cfg.newton_steps_per_level {
            let (w, dw) = match self.plane {
                Plane::Dynamic(c) => iterate_with_z_derivative(c, z, m),
                Plane::Parameter => iterate_with_c_derivative(z, m),
            };
            if !w.is_finite() || !dw.is_finite() || dw.norm_sqr() == 0.0 {
                return None;
            }
            last_resid = (w - target).norm();
            let delta = scaled_div(w - target, dw);
            z -= delta;
            if !z.is_finite() || z.norm_sqr() > 1e18 {
                return None;
            }
            if delta.norm() < 1e-13 * (1.0 + z.norm()) {
                return Some(z);
            }
        }
        // Accept a slightly loose level rather than losing the ray outright.
        (last_resid < 1e-6 * (1.0 + target.norm())).then_some(z)
    }

    /// Moves from the ray point at `τ_a` down to `τ_b < τ_a`, bisecting the
    /// step in log-potential until the one-step and two-step routes agree.
    fn advance(&self, z_a: Complex64, tau_a: f64, tau_b: f64, depth: u32) -> Option<Complex64> {
        let tau_mid = (tau_a * tau_b).sqrt();
        let one = self.solve_at(tau_b, z_a);
        let two = self
            .solve_at(tau_mid, z_a)
            .and_then(|zm| self.solve_at(tau_b, zm));
        if let (Some(a), Some(b)) = (one, two) {
            if (a - b).norm() <= 1e-9 * (1.0 + b.norm()) {
                return Some(b);
            }
        }
        if depth == 0 {
            return None;
        }
        let zm = self.advance(z_a, tau_a, tau_mid, depth - 1)?;
        self.advance(zm, tau_mid, tau_b, depth - 1)
    }
}

const REFINE_DEPTH: u32 = 12;

fn trace(plane: Plane, theta: &Angle, cfg: &SolverConfig) -> RayTrace {
    debug_assert!(cfg.validate().is_ok());
    // Exact doubling orbit of the angle, one entry per level.
    let mut effective = Vec::with_capacity(cfg.potential_halvings as usize + 1);
    let mut a = theta.clone();
    for _ in 0..=cfg.potential_halvings {
        effective.push(a.to_f64());
        a = a.double();
    }
    let t0 = cfg.start_potential;
    let ladder = Ladder { plane, effective, t0, cfg };

    let top = Complex64::from_polar(t0.exp(), core::f64::consts::TAU * ladder.effective[0]);
    let mut points = alloc::vec![(t0, top)];
    let mut prev = top;
    let mut stable_levels = 0u32;
    let mut landing = None;
    let mut status = None;

    // The landing rule (three consecutive levels within tolerance) marks the
    // trace as landed, but descent continues to the bottom of the ladder:
    // every further level sharpens the landing point for free.
    for m in 1..=cfg.potential_halvings {
        let t_prev = t0 * (-((m - 1) as f64)).exp2();
        let t_m = t0 * (-(m as f64)).exp2();
        match ladder.advance(prev, t_prev, t_m, REFINE_DEPTH) {
            Some(z) => {
                points.push((t_m, z));
                if (z - prev).norm() < cfg.landing_tolerance {
                    stable_levels += 1;
                } else if stable_levels < 3 {
                    stable_levels = 0;
                }
                prev = z;
            }
            None => {
                if stable_levels >= 3 {
                    // Already converged; the failure is below the landing.
                    break;
                }
                status = Some(match plane {
                    Plane::Dynamic(c) => {
                        // Outside M the ray only exists down to potentials
                        // around the critical value's own potential.
                        let g = potential(c, c, cfg);
                        if g > 0.0 && t_m < 2.0 * g {
                            TraceStatus::Truncated
                        } else {
                            TraceStatus::Lost { level: m }
                        }
                    }
                    Plane::Parameter => TraceStatus::Lost { level: m },
                });
                break;
            }
        }
    }

    let status = status.unwrap_or_else(|| {
        let final_t = points.last().unwrap().0;
        if stable_levels >= 3 {
            landing = Some(prev);
            TraceStatus::Landed
        } else if final_t <= LANDING_MIN_POTENTIAL {
            // The per-level agreement rule never fired, so convergence is
            // slow (parabolic landing): the approach is asymptotic in
            // 1/log(1/t), which the trailing samples extrapolate well.
            landing = Some(extrapolate_landing(&points, theta.orbit_type().period));
            TraceStatus::Landed
        } else {
            TraceStatus::Truncated
        }
    });
    RayTrace { angle: theta.clone(), plane, points, landing, status }
}

/// Extrapolates the ray tail to potential zero when the per-level landing
/// rule never fired.
///
/// Two slow-convergence regimes occur. At parabolic landing points the ray
/// satisfies `c(t) = c* + a₂u² + a₃u³ + ...` with `u = 1/log(1/t)` (the
/// orbit passes a parabolic bottleneck, making the potential exponentially
/// small in the distance), which Neville extrapolation in `u` handles. At
/// barely-repelling landing points the tail is geometric, which Aitken's Δ²
/// handles. Each model is fitted on two windows of the tail; the candidate
/// whose windows agree best wins, with the raw deepest sample as fallback.
/// Levels are sampled `period` apart: each halving advances the angle orbit
/// by one step, giving the tail a period-long modulation.
fn extrapolate_landing(points: &[(f64, Complex64)], period: u64) -> Complex64 {
    let stride = (period as usize).max(1);
    // Deepest first.
    let mut tail: Vec<(f64, Complex64)> = Vec::with_capacity(8);
    let mut idx = points.len();
    while idx >= 1 && tail.len() < 8 {
        let (t, z) = points[idx - 1];
        if t >= 1e-2 {
            break;
        }
        tail.push((t, z));
        if idx <= stride {
            break;
        }
        idx -= stride;
    }
    let last = tail.first().map(|(_, z)| *z).unwrap_or(points.last().unwrap().1);
    if tail.len() < 5 {
        return last;
    }

    // Model selection: each model is fitted without the shallowest tail
    // sample and scored by how well it predicts it, weighted by how much the
    // model amplifies fit error when pushed to potential zero.
    let held = tail.last().unwrap();
    let held_u = (-held.0.ln()).recip();
    let fit = &tail[..tail.len() - 1];

    // Constant model: the ray has converged; its defect is the tail motion.
    let mut candidates = alloc::vec![(last, (last - held.1).norm())];

    // Parabolic model: polynomial in u = 1/log(1/t); Neville evaluation.
    // Lagrange error scales with the node products, so the backtest at the
    // held node converts to the error at zero by Π u_i / Π |u_held - u_i|.
    let neville_at = |pts: &[(f64, Complex64)], x: f64| -> Option<Complex64> {
        let us: Vec<f64> = pts.iter().map(|(t, _)| (-t.ln()).recip()).collect();
        let mut table: Vec<Complex64> = pts.iter().map(|(_, z)| *z).collect();
        let m = table.len();
        for k in 1..m {
            for i in 0..m - k {
                let (ua, ub) = (us[i], us[i + k]);
                if ua == ub {
                    return None;
                }
                table[i] = (table[i] * (ub - x) - table[i + 1] * (ua - x)) / (ub - ua);
            }
        }
        table[0].is_finite().then_some(table[0])
    };
    if let (Some(pred), Some(value)) = (neville_at(fit, held_u), neville_at(&tail, 0.0)) {
        let mut amplification = 1.0f64;
        for (t, _) in fit {
            let u = (-t.ln()).recip();
            amplification *= u / (held_u - u).abs().max(1e-300);
        }
        candidates.push((value, (pred - held.1).norm() * amplification.max(1.0)));
    }

    // Geometric model z_k = α + A ρ^k from the deepest three samples
    // (k counts shallow-ward, |ρ| > 1), for barely-repelling landings. The
    // backtest mismatch scales back by ρ^(m-3) and the limit estimate
    // amplifies fit error by ρ/(ρ-1).
    let geometric = || -> Option<(Complex64, f64)> {
        let (z0, z1, z2) = (tail[0].1, tail[1].1, tail[2].1);
        let (d0, d1) = (z1 - z0, z2 - z1);
        if d0.norm() < 1e3 * f64::EPSILON * (1.0 + z0.norm()) {
            return None;
        }
        let rho = d1 / d0;
        if rho.norm().is_nan() || rho.norm() <= 1.000001 {
            return None;
        }
        let den = rho - 1.0;
        let amp = d0 / den;
        let alpha = z0 - amp;
        let mut pw = Complex64::new(1.0, 0.0);
        for _ in 0..tail.len() - 1 {
            pw *= rho;
        }
        let pred = alpha + amp * pw;
        if !alpha.is_finite() || !pred.is_finite() {
            return None;
        }
        let backtest = (pred - held.1).norm();
        let scale_back = rho.norm().powi(tail.len() as i32 - 3);
        let score = backtest / scale_back * (rho.norm() / den.norm());
        Some((alpha, score))
    };
    if let Some((alpha, score)) = geometric() {
        candidates.push((alpha, score));
    }

    candidates
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal))
        .map(|(z, _)| z)
        .unwrap_or(last)
}

/// `a / b` without overflowing `|b|²` (iterate derivatives reach 1e150+,
/// where the textbook complex division returns NaN).
fn scaled_div(a: Complex64, b: Complex64) -> Complex64 {
    let s = b.re.abs().max(b.im.abs());
    if s == 0.0 || !s.is_finite() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    let bs = Complex64::new(b.re / s, b.im / s);
    let as_ = Complex64::new(a.re / s, a.im / s);
    as_ / bs
}

/// `(p_c^m(z), ∂_z p_c^m(z))`.
fn iterate_with_z_derivative(c: Complex64, z: Complex64, m: u32) -> (Complex64, Complex64) {
    let mut w = z;
    let mut dw = Complex64::new(1.0, 0.0);
    for _ in 0..m {
        dw = 2.0 * w * dw;
        w = w * w + c;
        if !w.is_finite() {
            break;
        }
    }
    (w, dw)
}

/// `(p_c^m(c), d/dc p_c^m(c))`.
fn iterate_with_c_derivative(c: Complex64, m: u32) -> (Complex64, Complex64) {
    let mut w = c;
    let mut dw = Complex64::new(1.0, 0.0);
    for _ in 0..m {
        dw = 2.0 * w * dw + 1.0;
        w = w * w + c;
        if !w.is_finite() {
            break;
        }
    }
    (w, dw)
}
