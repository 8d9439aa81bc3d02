//! Verification harness: traces the rays that the combinatorics says must
//! land together and checks the predictions at desk scale, producing a
//! deterministic line-oriented report.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::angle::Angle;
use crate::combinat::{lavaurs_pairs, misiurewicz_classes_of_type};
use crate::{Error, Result};

use super::newton::{component_boundary, find_centers, solve_misiurewicz};
use super::ray::trace_parameter_ray;
use super::SolverConfig;

/// Distance below which two landing estimates count as the same parameter.
/// Parabolic landings converge slowly in the potential, which caps the
/// agreement achievable at the default descent depth.
pub const AGGREGATION_TOLERANCE: f64 = 1e-4;

/// Residual bound for the Misiurewicz Newton confirmation.
pub const MISIUREWICZ_RESIDUAL_BOUND: f64 = 1e-10;

/// Result of tracing two parameter rays and comparing their landings.
#[derive(Clone, Copy, Debug)]
pub struct VerifyReport {
    /// Both rays landed within [`AGGREGATION_TOLERANCE`] of each other.
    pub agree: bool,
    /// Distance between the landing estimates (infinite if a ray was lost).
    pub distance: f64,
    /// Midpoint of the two landings when both rays landed.
    pub landing: Option<Complex64>,
}

/// Traces the parameter rays at both angles and reports whether they land
/// together.
pub fn verify_pair(theta1: &Angle, theta2: &Angle, cfg: &SolverConfig) -> VerifyReport {
    let r1 = trace_parameter_ray(theta1, cfg);
    let r2 = trace_parameter_ray(theta2, cfg);
    match (r1.landing, r2.landing) {
        (Some(a), Some(b)) => {
            let distance = (a - b).norm();
            VerifyReport {
                agree: distance < AGGREGATION_TOLERANCE,
                distance,
                landing: Some(0.5 * (a + b)),
            }
        }
        _ => VerifyReport { agree: false, distance: f64::INFINITY, landing: None },
    }
}

/// One verification record; formats as a stable whitespace-separated line.
#[derive(Clone, Debug)]
pub struct CheckRecord {
    /// `pair-landing`, `root-match`, `misiurewicz-landing` or
    /// `misiurewicz-newton`.
    pub kind: &'static str,
    /// The inputs of the check, already formatted.
    pub input: String,
    /// Measured distance or residual.
    pub value: f64,
    /// The bound the value was held against.
    pub bound: f64,
    /// Landing/solution estimate, when one exists.
    pub landing: Option<Complex64>,
    pub pass: bool,
}

impl core::fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let (re, im) = match self.landing {
            Some(z) => (z.re, z.im),
            None => (f64::NAN, f64::NAN),
        };
        write!(
            f,
            "{} {} value={:.3e} bound={:.1e} at={:.9} {:.9} {}",
            self.kind,
            self.input,
            self.value,
            self.bound,
            re,
            im,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Full structure check over all ray pairs of period up to `max_pair_period`
/// and all Misiurewicz classes with `preperiod + period` up to
/// `max_misiurewicz_sum`, in deterministic order.
///
/// Per pair: the two rays land together, and the common landing matches the
/// root computed from one of the period-`n` centers by multiplier
/// continuation (each root is consumed at most once). Per class: all member
/// rays land at one point, and the Misiurewicz Newton solve from that point
/// confirms the exact `(l, n)` with a tiny residual.
#[derive(Clone, Debug)]
pub struct StructureReport {
    pub checks: Vec<CheckRecord>,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn verify_structure(
    max_pair_period: u32,
    max_misiurewicz_sum: u32,
    cfg: &SolverConfig,
) -> Result<StructureReport> {
    cfg.validate()?;
    let mut checks = Vec::new();

    let pairs = lavaurs_pairs(max_pair_period)?;
    for n in 1..=max_pair_period {
        // Roots of every period-n component, to be matched against landings.
        let centers = find_centers(n, cfg)?;
        let mut roots = Vec::with_capacity(centers.len());
        for center in &centers {
            roots.push(component_boundary(center.parameter, n, 0.0, cfg)?.parameter);
        }
        let mut used = alloc::vec![false; roots.len()];
        for pair in pairs.iter().filter(|p| p.period() == n as u64) {
            let input = format!("{} {} {}", n, pair.low(), pair.high());
            let report = verify_pair(pair.low(), pair.high(), cfg);
            checks.push(CheckRecord {
                kind: "pair-landing",
                input: input.clone(),
                value: report.distance,
                bound: AGGREGATION_TOLERANCE,
                landing: report.landing,
                pass: report.agree,
            });
            let (value, landing, pass) = match report.landing {
                Some(land) => {
                    let mut best: Option<(usize, f64)> = None;
                    for (i, root) in roots.iter().enumerate() {
                        if used[i] {
                            continue;
                        }
                        let d = (root - land).norm();
                        if best.is_none_or(|(_, bd)| d < bd) {
                            best = Some((i, d));
                        }
                    }
                    match best {
                        Some((i, d)) => {
                            let ok = d < AGGREGATION_TOLERANCE;
                            if ok {
                                used[i] = true;
                            }
                            (d, Some(roots[i]), ok)
                        }
                        None => (f64::INFINITY, None, false),
                    }
                }
                None => (f64::INFINITY, None, false),
            };
            checks.push(CheckRecord {
                kind: "root-match",
                input,
                value,
                bound: AGGREGATION_TOLERANCE,
                landing,
                pass,
            });
        }
    }

    for total in 2..=max_misiurewicz_sum {
        for l in 1..total {
            let n = total - l;
            for class in misiurewicz_classes_of_type(l, n)? {
                let mut input = format!("{l} {n}");
                for a in class.angles() {
                    input.push(' ');
                    input.push_str(&format!("{a}"));
                }
                let mut landings = Vec::with_capacity(class.count());
                for a in class.angles() {
                    if let Some(z) = trace_parameter_ray(a, cfg).landing {
                        landings.push(z);
                    }
                }
                let all_landed = landings.len() == class.count();
                let mean = landings.iter().sum::<Complex64>() / landings.len().max(1) as f64;
                let spread = landings
                    .iter()
                    .map(|z| (z - mean).norm())
                    .fold(0.0f64, f64::max);
                checks.push(CheckRecord {
                    kind: "misiurewicz-landing",
                    input: input.clone(),
                    value: if all_landed { spread } else { f64::INFINITY },
                    bound: AGGREGATION_TOLERANCE,
                    landing: all_landed.then_some(mean),
                    pass: all_landed && spread < AGGREGATION_TOLERANCE,
                });
                let (value, landing, pass) = if all_landed {
                    match solve_misiurewicz(l, n, mean, cfg) {
                        Ok(r) => (
                            r.residual,
                            Some(r.parameter),
                            r.residual < MISIUREWICZ_RESIDUAL_BOUND
                                && (r.parameter - mean).norm() < AGGREGATION_TOLERANCE,
                        ),
                        Err(Error::WrongOrbitType { .. }) => (f64::INFINITY, None, false),
                        Err(e) => return Err(e),
                    }
                } else {
                    (f64::INFINITY, None, false)
                };
                checks.push(CheckRecord {
                    kind: "misiurewicz-newton",
                    input,
                    value,
                    bound: MISIUREWICZ_RESIDUAL_BOUND,
                    landing,
                    pass,
                });
            }
        }
    }

    Ok(StructureReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn angle(s: &str) -> Angle {
        s.parse().unwrap()
    }

    #[test]
    fn paired_angles_agree() {
        let cfg = SolverConfig::default();
        let r = verify_pair(&angle("3/15"), &angle("4/15"), &cfg);
        assert!(r.agree, "distance {}", r.distance);
        let r = verify_pair(&angle("1/3"), &angle("2/3"), &cfg);
        assert!(r.agree);
        assert!((r.landing.unwrap() - Complex64::new(-0.75, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn unpaired_angles_disagree() {
        let cfg = SolverConfig::default();
        // 1/7 pairs with 2/7, not with 3/7.
        let r = verify_pair(&angle("1/7"), &angle("3/7"), &cfg);
        assert!(!r.agree);
        assert!(r.distance > AGGREGATION_TOLERANCE);
    }

    #[test]
    fn worked_misiurewicz_class_lands_and_solves() {
        // The three rays of the class of 9/56 land together, and the solver
        // seeded from their common landing confirms type (3, 3).
        let cfg = SolverConfig::default();
        let landings: Vec<Complex64> = ["9/56", "11/56", "15/56"]
            .iter()
            .map(|s| trace_parameter_ray(&angle(s), &cfg).landing.unwrap())
            .collect();
        for w in landings.windows(2) {
            assert!((w[0] - w[1]).norm() < 1e-5, "rays disagree: {:?}", landings);
        }
        let mean = landings.iter().sum::<Complex64>() / 3.0;
        let solved = solve_misiurewicz(3, 3, mean, &cfg).unwrap();
        assert!(solved.residual < 1e-10);
        assert!((solved.parameter - mean).norm() < 1e-5);
    }

    #[test]
    fn structure_report_small() {
        let cfg = SolverConfig::default();
        let report = verify_structure(3, 3, &cfg).unwrap();
        assert!(report.all_pass(), "failing checks: {:#?}", report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .collect::<Vec<_>>());
        // 1 + 1 + 3 pairs, two checks each, plus the (1,1), (1,2), (2,1)
        // Misiurewicz classes, two checks each.
        let pair_checks = report.checks.iter().filter(|c| c.kind == "pair-landing").count();
        assert_eq!(pair_checks, 5);
    }
}
