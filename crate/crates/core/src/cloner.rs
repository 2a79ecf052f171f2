//! Minimum average failure probability for arbitrary priors.
//!
//! The optimal operating point is where the cost line
//! `Q = eta1 q1 + eta2 q2` touches the lower half of the `alpha = 1` curve.
//! Every parameter value `t` in `[t_{-1}, t_0]` is such a contact point for
//! exactly one prior, `eta1(t) = q2' / (q2' - q1')`, which falls from 1/2 to 0.
//! [`solve`] inverts that map by bisection. [`brute_force_oracle`] reaches the
//! same minimum by scanning the curve directly and shares no code with it.

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{self, CloningProblem, CurvePoint, FlagOverlap, Segment};
use crate::error::{CloneError, Result};
use crate::roots;

const SOLVE_MAX_ITER: usize = 200;
pub const MIN_ORACLE_GRID: usize = 1000;

/// Preparation probabilities of the two states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriorWeights {
    pub eta1: f64,
    pub eta2: f64,
}

impl PriorWeights {
    pub fn new(eta1: f64) -> Result<Self> {
        if !eta1.is_finite() || !(0.0..=1.0).contains(&eta1) {
            return Err(CloneError::InvalidArgument(format!(
                "prior eta1 = {eta1} must lie in [0, 1]"
            )));
        }
        Ok(PriorWeights {
            eta1,
            eta2: 1.0 - eta1,
        })
    }

    pub fn equal() -> Self {
        PriorWeights {
            eta1: 0.5,
            eta2: 0.5,
        }
    }

    pub fn swapped(self) -> Self {
        PriorWeights {
            eta1: self.eta2,
            eta2: self.eta1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalSolution {
    pub t_star: f64,
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
    pub q_min: f64,
    /// Set when `eta1 > 1/2` and the state labels were exchanged to solve.
    pub swapped: bool,
}

impl OptimalSolution {
    fn from_point(point: &CurvePoint, q_min: f64) -> Self {
        OptimalSolution {
            t_star: point.t,
            q1: point.q1,
            q2: point.q2,
            p1: 1.0 - point.q1,
            p2: 1.0 - point.q2,
            q_min,
            swapped: false,
        }
    }

    fn mirrored(self) -> Self {
        OptimalSolution {
            q1: self.q2,
            q2: self.q1,
            p1: self.p2,
            p2: self.p1,
            swapped: !self.swapped,
            ..self
        }
    }
}

/// Closed-form failure probabilities at the two ends of the prior range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndpointFailures {
    /// `eta1 -> 0`: `(s^2m - s^2n) / (1 - s^2n)`.
    pub q_0: f64,
    /// `eta1 = 1/2`: `(s^m - s^n) / (1 - s^n)`.
    pub q_minus1: f64,
}

pub fn endpoint_failures(problem: &CloningProblem) -> EndpointFailures {
    let a = problem.input_overlap();
    let p = problem.output_overlap();
    EndpointFailures {
        q_0: (a * a - p * p) / (1.0 - p * p),
        q_minus1: (a - p) / (1.0 - p),
    }
}

/// The prior `eta1` whose cost line is tangent to the curve at `t`.
///
/// Evaluated from the slopes rescaled by `sqrt(1 - y^2)`, so `t = t_{-1}`
/// (where both slopes diverge) gives exactly 1/2.
pub fn prior_of_t(problem: &CloningProblem, t: f64) -> Result<f64> {
    if problem.is_orthogonal() {
        // Every prior touches the single point (0, 0).
        curve::point_at(problem, t)?;
        return Ok(0.5);
    }
    let seg = Segment::new(problem);
    let d = seg.displacement_in_range(t)?;
    Ok(prior_at(&seg, d))
}

fn prior_at(seg: &Segment, d: f64) -> f64 {
    if d <= 0.0 {
        return 0.5;
    }
    if d >= seg.d_tangent_end {
        return 0.0;
    }
    let (d1, d2) = seg.rescaled_slopes(d);
    (d2 / (d2 - d1)).clamp(0.0, 0.5)
}

fn cost_at(seg: &Segment, d: f64) -> (CurvePoint, f64, f64) {
    let eta1 = prior_at(seg, d);
    let pt = seg.point(d);
    (pt, eta1, eta1 * pt.q1 + (1.0 - eta1) * pt.q2)
}

/// Optimal operating point and minimum average failure for the given priors.
pub fn solve(problem: &CloningProblem, priors: PriorWeights) -> Result<OptimalSolution> {
    if priors.eta1 > 0.5 {
        return solve(problem, priors.swapped()).map(OptimalSolution::mirrored);
    }
    if problem.is_orthogonal() {
        let origin = curve::point_at(problem, 1.0)?;
        return Ok(OptimalSolution::from_point(&origin, 0.0));
    }
    let seg = Segment::new(problem);
    let ends = endpoint_failures(problem);
    if priors.eta1 == 0.5 {
        return Ok(OptimalSolution::from_point(&seg.point(0.0), ends.q_minus1));
    }
    if priors.eta1 == 0.0 {
        return Ok(OptimalSolution::from_point(
            &seg.point(seg.d_tangent_end),
            ends.q_0,
        ));
    }

    // prior_at is decreasing in d.
    let (mut lo, mut hi) = (0.0, seg.d_tangent_end);
    let mut converged = false;
    for _ in 0..SOLVE_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            converged = true;
            break;
        }
        if prior_at(&seg, mid) > priors.eta1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !converged {
        return Err(CloneError::NoConvergence {
            iterations: SOLVE_MAX_ITER,
            lo: seg.t_of(lo),
            hi: seg.t_of(hi),
        });
    }
    let pt = seg.point(0.5 * (lo + hi));
    let q_min = priors.eta1 * pt.q1 + priors.eta2 * pt.q2;
    Ok(OptimalSolution::from_point(&pt, q_min))
}

/// One sample of the optimality curve `Q_min(eta1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub t: f64,
    pub eta1: f64,
    pub q_min: f64,
}

/// `num_points` samples of `Q_min(eta1)` on `eta1` in `[0, 1/2]`, from `t`
/// spaced uniformly over `[t_{-1}, t_0]`, ordered by ascending `eta1`.
pub fn sweep(problem: &CloningProblem, num_points: usize) -> Result<Vec<SweepPoint>> {
    if num_points < 2 {
        return Err(CloneError::InvalidArgument(format!(
            "a sweep needs at least 2 points, got {num_points}"
        )));
    }
    let last = (num_points - 1) as f64;
    if problem.is_orthogonal() {
        return Ok((0..num_points)
            .map(|k| SweepPoint {
                t: 1.0,
                eta1: 0.5 * k as f64 / last,
                q_min: 0.0,
            })
            .collect());
    }
    let seg = Segment::new(problem);
    let ends = endpoint_failures(problem);
    // k = 0 is t_0 (eta1 = 0), k = last is t_{-1} (eta1 = 1/2).
    let points = (0..num_points)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                return SweepPoint {
                    t: seg.t_0,
                    eta1: 0.0,
                    q_min: ends.q_0,
                };
            }
            if k + 1 == num_points {
                return SweepPoint {
                    t: seg.t_minus1,
                    eta1: 0.5,
                    q_min: ends.q_minus1,
                };
            }
            let d = seg.d_tangent_end * (1.0 - k as f64 / last);
            let (pt, eta1, q_min) = cost_at(&seg, d);
            SweepPoint {
                t: pt.t,
                eta1,
                q_min,
            }
        })
        .collect();
    Ok(points)
}

/// Minimum of `eta1 q1 + eta2 q2` over the `alpha = 1` curve by dense
/// sampling of its lower boundary followed by golden-section refinement.
///
/// Uses only the residual inversion [`curve::q2_on_curve`], never the
/// parametrization, so it serves as an independent check on [`solve`].
pub fn brute_force_oracle(
    problem: &CloningProblem,
    priors: PriorWeights,
    grid_size: usize,
) -> Result<f64> {
    if grid_size < MIN_ORACLE_GRID {
        return Err(CloneError::InvalidArgument(format!(
            "oracle grid needs at least {MIN_ORACLE_GRID} points, got {grid_size}"
        )));
    }
    if problem.is_orthogonal() {
        return Ok(0.0);
    }
    let alpha = FlagOverlap::CLONING;
    let lo = curve::feasible_q1_min(problem, alpha);
    let step = (1.0 - lo) / (grid_size - 1) as f64;
    let q1_at = |k: usize| {
        if k + 1 == grid_size {
            1.0
        } else {
            lo + step * k as f64
        }
    };
    let cost = |q1: f64| -> f64 {
        match curve::q2_on_curve(problem, alpha, q1) {
            Ok(q2) => priors.eta1 * q1 + priors.eta2 * q2,
            Err(_) => f64::INFINITY,
        }
    };

    let (best_k, best) =
        (0..grid_size)
            .map(|k| (k, cost(q1_at(k))))
            .fold(
                (0, f64::INFINITY),
                |acc, (k, c)| if c < acc.1 { (k, c) } else { acc },
            );
    if !best.is_finite() {
        return Err(CloneError::Numeric(
            "oracle found no feasible grid point".into(),
        ));
    }
    let a = q1_at(best_k.saturating_sub(1));
    let b = q1_at((best_k + 1).min(grid_size - 1));
    let (_, refined) = roots::golden_section_min(cost, a, b, 1e-13, 500);
    Ok(refined.min(best))
}
