//! Floating-point engine: Böttcher potentials, dynamic and parameter ray
//! tracing, Newton solvers for centers, component boundary points and
//! Misiurewicz parameters, and the verification harness that checks the ray
//! pairing against actual landing behavior.
//!
//! Everything is double precision. Exact combinatorics feeds in only through
//! [`Angle`] values, whose doubling orbits are computed exactly and converted
//! to `f64` per level, so deep potential levels do not lose the angle.
//!
//! All solvers are pure functions of their inputs and configuration;
//! independent traces and solves can run in parallel.

mod dd;
mod harness;
mod newton;
mod ray;

#[allow(unused_imports)]
use num_traits::Float; // float methods in no_std builds

pub use num_complex::Complex64;

use crate::angle::Angle;
use crate::{Error, Result};

pub use harness::{
    verify_pair, verify_structure, CheckRecord, StructureReport, VerifyReport,
    AGGREGATION_TOLERANCE, MISIUREWICZ_RESIDUAL_BOUND,
};
pub use newton::{component_boundary, find_centers, solve_misiurewicz};
pub use ray::{trace_dynamic_ray, trace_parameter_ray};

/// Which plane a ray lives in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Plane {
    /// Dynamic plane of `z -> z^2 + c`.
    Dynamic(Complex64),
    /// Parameter plane of the Mandelbrot set.
    Parameter,
}

/// Outcome of a ray trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceStatus {
    /// Successive levels stabilized, or the minimum potential was reached.
    Landed,
    /// Descent stopped before the landing rule fired (obstructed ray or not
    /// enough levels configured); the achieved potential is the last point.
    Truncated,
    /// Newton failed to converge at the given descent level.
    Lost { level: u32 },
}

/// A traced external ray: per-level `(potential, position)` samples with
/// strictly decreasing potentials, plus the landing estimate.
#[derive(Clone, Debug)]
pub struct RayTrace {
    pub angle: Angle,
    pub plane: Plane,
    pub points: alloc::vec::Vec<(f64, Complex64)>,
    pub landing: Option<Complex64>,
    pub status: TraceStatus,
}

/// What a Newton solve produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveKind {
    Center,
    Root,
    Boundary,
    Misiurewicz,
}

/// A solved parameter with the residual of its defining equation (evaluated
/// in extended precision at the returned value) and, where meaningful, the
/// multiplier of the associated periodic orbit.
#[derive(Clone, Copy, Debug)]
pub struct NewtonResult {
    pub parameter: Complex64,
    pub kind: SolveKind,
    pub residual: f64,
    pub multiplier: Option<Complex64>,
}

/// Tunables for ray tracing and the solvers.
#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Potential of the first ray point (default 8).
    pub start_potential: f64,
    /// Number of potential halvings; the default 64 descends far enough to
    /// feed the landing extrapolation at slow parabolic approaches.
    pub potential_halvings: u32,
    /// Newton corrections per descent level.
    pub newton_steps_per_level: u32,
    /// Landing rule: three consecutive levels within this distance.
    pub landing_tolerance: f64,
    /// Iteration budget for escape/potential computations.
    pub max_iterations: u32,
    /// Escape radius for iteration counts (at least 2).
    pub escape_radius: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            start_potential: 8.0,
            potential_halvings: 64,
            newton_steps_per_level: 16,
            landing_tolerance: 1e-8,
            max_iterations: 4096,
            escape_radius: 2.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.start_potential.is_nan() || self.start_potential <= 0.0 {
            return Err(Error::BadConfig("start_potential must be positive"));
        }
        if self.potential_halvings == 0 || self.newton_steps_per_level == 0 {
            return Err(Error::BadConfig("descent schedule must be nonempty"));
        }
        if self.landing_tolerance.is_nan() || self.landing_tolerance <= 0.0 {
            return Err(Error::BadConfig("landing_tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::BadConfig("max_iterations must be positive"));
        }
        if self.escape_radius.is_nan() || self.escape_radius < 2.0 {
            return Err(Error::BadConfig("escape_radius must be at least 2"));
        }
        Ok(())
    }
}

/// A ray is declared landed once its potential drops below this, even
/// without level-to-level agreement (slow parabolic landings).
pub const LANDING_MIN_POTENTIAL: f64 = 1e-12;

/// Green's function estimate `lim log|z_N| / 2^N` along the orbit of `z`,
/// truncated at escape or at the iteration budget; `0` for orbits that do
/// not escape within the budget.
pub fn potential(c: Complex64, z: Complex64, cfg: &SolverConfig) -> f64 {
    let mut w = z;
    for k in 0..cfg.max_iterations {
        let n2 = w.norm_sqr();
        // Past 1e75 the limit has converged to double precision; stopping
        // here also keeps the next squaring finite.
        if n2 > 1e150 {
            return 0.5 * n2.ln() * (-(k as f64)).exp2();
        }
        if !n2.is_finite() {
            return w.norm().ln() * (-(k as f64)).exp2();
        }
        w = w * w + c;
    }
    let n2 = w.norm_sqr();
    if n2.is_finite() && n2 > cfg.escape_radius * cfg.escape_radius {
        0.5 * n2.ln() * (-(cfg.max_iterations as f64)).exp2()
    } else {
        0.0
    }
}

/// Multiplier `∂_z p_c^n(z)` of an `n`-periodic point: the product of `2 z_j`
/// over the orbit.
pub fn multiplier(c: Complex64, z: Complex64, n: u32) -> Complex64 {
    let mut w = z;
    let mut d = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        d *= 2.0 * w;
        w = w * w + c;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: SolverConfig = SolverConfig {
        start_potential: 8.0,
        potential_halvings: 44,
        newton_steps_per_level: 16,
        landing_tolerance: 1e-8,
        max_iterations: 4096,
        escape_radius: 2.0,
    };

    #[test]
    fn potential_of_squaring_map_is_log() {
        let g = potential(Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0), &CFG);
        assert!((g - core::f64::consts::LN_2).abs() < 1e-12, "g = {g}");
    }

    #[test]
    fn potential_on_unit_circle_is_zero() {
        // Rounding lets some circle points drift off the Julia set, so the
        // truncated estimate is only zero to machine scale.
        for k in 0..8 {
            let t = core::f64::consts::TAU * (k as f64) / 8.0;
            let z = Complex64::from_polar(1.0, t);
            assert!(potential(Complex64::new(0.0, 0.0), z, &CFG) < 1e-14);
        }
    }

    #[test]
    fn potential_functional_equation() {
        // G(p_c(z)) = 2 G(z) for escaping points.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let c = Complex64::new(4.0 * rng() - 2.0, 4.0 * rng() - 2.0);
            let z = Complex64::from_polar(2.1 + 2.0 * rng(), core::f64::consts::TAU * rng());
            let g = potential(c, z, &CFG);
            let g2 = potential(c, z * z + c, &CFG);
            assert!(g > 0.0, "sampled point must escape");
            assert!((g2 - 2.0 * g).abs() < 1e-9, "|{g2} - 2*{g}|");
        }
    }

    #[test]
    fn multiplier_examples() {
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(multiplier(zero, zero, 1), zero);
        // Parabolic fixed point of c = 1/4 at z = 1/2 has multiplier 1.
        let m = multiplier(Complex64::new(0.25, 0.0), Complex64::new(0.5, 0.0), 1);
        assert!((m - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // Fixed point z = -1/2 of c = -3/4 has multiplier -1.
        let m = multiplier(Complex64::new(-0.75, 0.0), Complex64::new(-0.5, 0.0), 1);
        assert!((m - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(CFG.validate().is_ok());
        let mut bad = CFG;
        bad.escape_radius = 1.5;
        assert!(bad.validate().is_err());
        bad = CFG;
        bad.start_potential = 0.0;
        assert!(bad.validate().is_err());
    }
}
