//! The unitarity constraint on the failure pair `(q1, q2)`, the feasible sets
//! it bounds, and the parametrization that straightens the `alpha = 1` curve
//! into a line segment.
//!
//! With `sqrt(q_i) = sin(theta_i)`, `x = cos(theta1 + theta2)` and
//! `y = cos(theta1 - theta2)`, the constraint becomes the segment
//! `(1 + s^n) y - (1 - s^n) x = 2 s^m`, `|x| <= y <= 1`, walked by the
//! parameter `t`. Internally the segment is addressed by the displacement
//! from its `y = 1` end rather than by `t` itself: for small `s` the map
//! `t -> (x, y)` amplifies rounding by `s^-(n-m)`, whereas the displacement
//! form keeps `x`, `y` and `1 - y` accurate to a few ulps.

use serde::Serialize;

use crate::error::{CloneError, Result};
use crate::roots;

/// Slack allowed when a caller hands in `t` exactly at a computed bound.
const T_SLACK: f64 = 1e-12;
/// Rounding band below zero treated as zero under square roots.
const SQRT_GUARD: f64 = 1e-14;
pub(crate) const Q2_TOL: f64 = 1e-12;
pub(crate) const Q2_MAX_ITER: usize = 200;

/// Two candidate states with real overlap `s`, `m` input copies and `n`
/// requested clones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CloningProblem {
    s: f64,
    m: u32,
    n: u32,
}

impl CloningProblem {
    pub fn new(s: f64, m: u32, n: u32) -> Result<Self> {
        if !s.is_finite() || !(0.0..1.0).contains(&s) {
            return Err(CloneError::InvalidProblem(format!(
                "overlap s = {s} must satisfy 0 <= s < 1"
            )));
        }
        if m < 1 {
            return Err(CloneError::InvalidProblem(
                "need at least one input copy (m >= 1)".into(),
            ));
        }
        if n <= m {
            return Err(CloneError::InvalidProblem(format!(
                "need more clones than inputs, got m = {m}, n = {n}"
            )));
        }
        Ok(CloningProblem { s, m, n })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `s^m`, the overlap of the two input states.
    pub fn input_overlap(&self) -> f64 {
        self.s.powi(self.m as i32)
    }

    /// `s^n`, the overlap of the two perfect-clone states.
    pub fn output_overlap(&self) -> f64 {
        self.s.powi(self.n as i32)
    }

    pub(crate) fn is_orthogonal(&self) -> bool {
        self.s == 0.0
    }
}

/// Overlap `<alpha_1|alpha_2>` of the two success flags.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct FlagOverlap(f64);

impl FlagOverlap {
    /// Identical success flags: optimal cloning.
    pub const CLONING: FlagOverlap = FlagOverlap(1.0);
    /// Orthogonal success flags: cloning by discrimination.
    pub const DISCRIMINATION: FlagOverlap = FlagOverlap(0.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
            return Err(CloneError::InvalidArgument(format!(
                "flag overlap alpha = {alpha} must lie in [0, 1]"
            )));
        }
        Ok(FlagOverlap(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A point on the lower half (`q1 >= q2`) of the `alpha = 1` unitarity curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub q1: f64,
    pub q2: f64,
}

impl CurvePoint {
    /// The same point on the upper half of the curve.
    pub fn mirrored(&self) -> (f64, f64) {
        (self.q2, self.q1)
    }
}

/// Left-hand side minus right-hand side of the unitarity condition,
/// `sqrt((1-q1)(1-q2)) s^n alpha + sqrt(q1 q2) - s^m`.
///
/// Zero on the curve, positive inside `S_alpha`. NaN outside the unit square.
pub fn constraint_residual(problem: &CloningProblem, alpha: FlagOverlap, q1: f64, q2: f64) -> f64 {
    ((1.0 - q1) * (1.0 - q2)).sqrt() * problem.output_overlap() * alpha.0 + (q1 * q2).sqrt()
        - problem.input_overlap()
}

/// Membership of `(q1, q2)` in the feasible set `S_alpha`.
pub fn s_alpha_contains(problem: &CloningProblem, alpha: FlagOverlap, q1: f64, q2: f64) -> bool {
    constraint_residual(problem, alpha, q1, q2) >= 0.0
}

/// Parameter values `(t_{-1}, t_0)` where the slope of the lower half of the
/// curve is `-1` and `0`.
pub fn t_bounds(problem: &CloningProblem) -> (f64, f64) {
    let s = problem.s;
    let (m, n) = (problem.m as i32, problem.n as i32);
    let t_minus1 = (1.0 - s.powi(n - m)) / (1.0 - s.powi(n));
    let t_0 = (1.0 - s.powi(2 * (n - m))) / (1.0 - s.powi(2 * n));
    (t_minus1, t_0)
}

/// The curve point at parameter `t`, `t` in `[t_{-1}, t_0]`.
pub fn point_at(problem: &CloningProblem, t: f64) -> Result<CurvePoint> {
    if problem.is_orthogonal() {
        check_t(problem, t)?;
        return Ok(CurvePoint {
            t: 1.0,
            x: 1.0,
            y: 1.0,
            q1: 0.0,
            q2: 0.0,
        });
    }
    let seg = Segment::new(problem);
    let d = seg.displacement_in_range(t)?;
    Ok(seg.point(d))
}

/// `(dq1/dt, dq2/dt)` on the lower half of the curve.
///
/// Both derivatives diverge like `1/sqrt(1 - y^2)` at `t_{-1}`, which is
/// reported as [`CloneError::Singular`].
pub fn derivatives_at(problem: &CloningProblem, t: f64) -> Result<(f64, f64)> {
    if problem.is_orthogonal() {
        // The curve collapses to a single point.
        return Err(CloneError::Singular { t });
    }
    let seg = Segment::new(problem);
    let d = seg.displacement_in_range(t)?;
    let c = seg.coords(d);
    if c.sqrt_1my2 <= 0.0 || c.sqrt_1mx2 <= 0.0 {
        return Err(CloneError::Singular { t });
    }
    let p = seg.clone_overlap;
    let (a, b) = (1.0 + p, 1.0 - p);
    let (q1, q2) = c.failures();
    let r1 = (q1 * (1.0 - q1)).max(0.0).sqrt();
    let r2 = (q2 * (1.0 - q2)).max(0.0).sqrt();
    let dq1 = r1 / seg.gap_overlap * (a / c.sqrt_1mx2 + b / c.sqrt_1my2);
    let dq2 = r2 / seg.gap_overlap * (a / c.sqrt_1mx2 - b / c.sqrt_1my2);
    Ok((dq1, dq2))
}

/// Smallest `q1` for which the vertical line through `q1` meets the curve of
/// flag overlap `alpha`: `(s^2m - s^2n alpha^2) / (1 - s^2n alpha^2)`.
///
/// Follows from maximizing the residual over `q2`, whose maximum is
/// `sqrt(q1 + (1 - q1) s^2n alpha^2) - s^m`.
pub fn feasible_q1_min(problem: &CloningProblem, alpha: FlagOverlap) -> f64 {
    let k2 = (problem.output_overlap() * alpha.0).powi(2);
    let a2 = problem.input_overlap().powi(2);
    (a2 - k2) / (1.0 - k2)
}

/// The lower-boundary `q2` of the curve with flag overlap `alpha` above `q1`.
///
/// For fixed `q1` the residual is concave in `q2` and negative at `q2 = 0`,
/// so the lower boundary is its first root, found by bisection between 0 and
/// the residual's maximizer. For `alpha = 0` this is the hyperbola
/// `q2 = s^2m / q1`.
pub fn q2_on_curve(problem: &CloningProblem, alpha: FlagOverlap, q1: f64) -> Result<f64> {
    let q1_min = feasible_q1_min(problem, alpha);
    if !q1.is_finite() || q1 < q1_min || q1 > 1.0 {
        return Err(CloneError::Domain {
            what: "q1",
            value: q1,
            lo: q1_min,
            hi: 1.0,
        });
    }
    if problem.is_orthogonal() {
        return Ok(0.0);
    }
    let a2 = problem.input_overlap().powi(2);
    if alpha.0 == 0.0 {
        return Ok(a2 / q1);
    }
    let k = (1.0 - q1).sqrt() * problem.output_overlap() * alpha.0;
    let peak = q1 / (q1 + k * k);
    let residual = |q2: f64| constraint_residual(problem, alpha, q1, q2);
    let r_peak = residual(peak);
    if r_peak <= 0.0 {
        // Tangent at the left edge of the feasible band.
        if r_peak > -SQRT_GUARD {
            return Ok(peak);
        }
        return Err(CloneError::Domain {
            what: "q1",
            value: q1,
            lo: q1_min,
            hi: 1.0,
        });
    }
    roots::bisect(residual, 0.0, peak, Q2_TOL, Q2_MAX_ITER)
}

/// One sample of a full unitarity curve. `t` is the linearizing parameter
/// and is only defined for `alpha = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub t: Option<f64>,
    pub q1: f64,
    pub q2: f64,
}

/// The whole curve for flag overlap `alpha`, from `(s^2m, 1)` through the
/// diagonal to `(1, s^2m)`, with `points_per_half` samples on each mirror
/// half (the diagonal point is shared).
///
/// For `alpha = 1` and `s > 0` the lower half is sampled uniformly in `t`
/// over `[t_{-1}, 1]`; otherwise uniformly in `q1` between the diagonal and 1.
pub fn trace_curve(
    problem: &CloningProblem,
    alpha: FlagOverlap,
    points_per_half: usize,
) -> Result<Vec<CurveSample>> {
    if points_per_half < 2 {
        return Err(CloneError::InvalidArgument(format!(
            "need at least 2 points per half curve, got {points_per_half}"
        )));
    }
    let last = (points_per_half - 1) as f64;
    let lower: Vec<CurveSample> = if alpha.0 == 1.0 && !problem.is_orthogonal() {
        let seg = Segment::new(problem);
        (0..points_per_half)
            .map(|k| {
                let pt = seg.point_extended(seg.d_full * k as f64 / last);
                CurveSample {
                    t: Some(pt.t),
                    q1: pt.q1,
                    q2: pt.q2,
                }
            })
            .collect()
    } else {
        let k0 = problem.output_overlap() * alpha.0;
        let diag = (problem.input_overlap() - k0) / (1.0 - k0);
        (0..points_per_half)
            .map(|k| {
                let q1 = if k + 1 == points_per_half {
                    1.0
                } else {
                    diag + (1.0 - diag) * k as f64 / last
                };
                let q2 = q2_on_curve(problem, alpha, q1)?.min(q1);
                Ok(CurveSample { t: None, q1, q2 })
            })
            .collect::<Result<_>>()?
    };
    let upper = lower.iter().rev().map(|p| CurveSample {
        t: p.t,
        q1: p.q2,
        q2: p.q1,
    });
    Ok(upper.chain(lower.iter().copied().skip(1)).collect())
}

fn check_t(problem: &CloningProblem, t: f64) -> Result<()> {
    let (lo, hi) = t_bounds(problem);
    if !t.is_finite() || t < lo - T_SLACK || t > hi + T_SLACK {
        return Err(CloneError::Domain {
            what: "t",
            value: t,
            lo,
            hi,
        });
    }
    Ok(())
}

fn guarded_sqrt(v: f64) -> f64 {
    if (-SQRT_GUARD..0.0).contains(&v) {
        0.0
    } else {
        v.max(0.0).sqrt()
    }
}

/// `(x, y)` on the linearized segment together with the two square roots the
/// failure probabilities and slopes need.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LineCoords {
    pub x: f64,
    pub y: f64,
    pub sqrt_1mx2: f64,
    pub sqrt_1my2: f64,
}

impl LineCoords {
    /// `(q1, q2)` with `q1 >= q2`. `q2` comes from `q1 q2 = (y - x)^2 / 4`,
    /// which avoids the cancellation in `1 - xy - sqrt(..)sqrt(..)`.
    pub fn failures(&self) -> (f64, f64) {
        let q1 = 0.5 * (1.0 - self.x * self.y + self.sqrt_1mx2 * self.sqrt_1my2);
        let q2 = if q1 > 0.0 {
            (self.y - self.x).powi(2) / (4.0 * q1)
        } else {
            0.0
        };
        (q1.clamp(0.0, 1.0), q2.clamp(0.0, 1.0))
    }
}

/// The `alpha = 1` segment of a problem with `s > 0`, addressed by the
/// displacement `d = (t - t_{-1}) / s^(n-m)` from its `y = 1` end.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    /// `s^(n-m)`
    pub gap_overlap: f64,
    /// `s^n`
    pub clone_overlap: f64,
    pub t_minus1: f64,
    pub t_0: f64,
    x_start: f64,
    /// Displacement at `t_0`.
    pub d_tangent_end: f64,
    /// Displacement at `t = 1`, where `x = -y` and the curve reaches `(1, s^2m)`.
    pub d_full: f64,
}

impl Segment {
    pub fn new(problem: &CloningProblem) -> Self {
        debug_assert!(problem.s > 0.0);
        let a = problem.input_overlap();
        let b = problem.s.powi((problem.n - problem.m) as i32);
        let p = problem.output_overlap();
        let (t_minus1, t_0) = t_bounds(problem);
        Segment {
            gap_overlap: b,
            clone_overlap: p,
            t_minus1,
            t_0,
            x_start: (1.0 + p - 2.0 * a) / (1.0 - p),
            d_tangent_end: (1.0 - a) * (1.0 - b) / (1.0 - p * p),
            d_full: (1.0 - a) / (1.0 - p),
        }
    }

    pub fn t_of(&self, d: f64) -> f64 {
        if d <= 0.0 {
            self.t_minus1
        } else if d >= self.d_tangent_end {
            self.t_0
        } else {
            self.t_minus1 + self.gap_overlap * d
        }
    }

    /// Displacement for a caller-supplied `t` in `[t_{-1}, t_0]`, snapped
    /// onto the bounds when within rounding slack.
    pub fn displacement_in_range(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < self.t_minus1 - T_SLACK || t > self.t_0 + T_SLACK {
            return Err(CloneError::Domain {
                what: "t",
                value: t,
                lo: self.t_minus1,
                hi: self.t_0,
            });
        }
        if t <= self.t_minus1 {
            return Ok(0.0);
        }
        if t >= self.t_0 {
            return Ok(self.d_tangent_end);
        }
        Ok(((t - self.t_minus1) / self.gap_overlap).clamp(0.0, self.d_tangent_end))
    }

    pub fn coords(&self, d: f64) -> LineCoords {
        let p = self.clone_overlap;
        let x = self.x_start - (1.0 + p) * d;
        let one_minus_y = (1.0 - p) * d;
        let y = 1.0 - one_minus_y;
        LineCoords {
            x,
            y,
            sqrt_1mx2: guarded_sqrt((1.0 - x) * (1.0 + x)),
            sqrt_1my2: guarded_sqrt(one_minus_y * (1.0 + y)),
        }
    }

    pub fn point(&self, d: f64) -> CurvePoint {
        let c = self.coords(d);
        let (q1, q2) = c.failures();
        CurvePoint {
            t: self.t_of(d),
            x: c.x,
            y: c.y,
            q1,
            q2,
        }
    }

    /// Point on the full lower half, `d` in `[0, d_full]`.
    pub fn point_extended(&self, d: f64) -> CurvePoint {
        let mut pt = self.point(d);
        pt.t = self.t_minus1 + self.gap_overlap * d;
        pt
    }

    /// Both slopes multiplied by `s^(n-m) sqrt(1 - y^2)`. The common factor
    /// is positive inside the range and removes the divergence at `t_{-1}`.
    pub fn rescaled_slopes(&self, d: f64) -> (f64, f64) {
        let c = self.coords(d);
        let p = self.clone_overlap;
        let (q1, q2) = c.failures();
        let r1 = (q1 * (1.0 - q1)).max(0.0).sqrt();
        let r2 = (q2 * (1.0 - q2)).max(0.0).sqrt();
        let ratio = if c.sqrt_1mx2 > 0.0 {
            (1.0 + p) * c.sqrt_1my2 / c.sqrt_1mx2
        } else {
            f64::INFINITY
        };
        (r1 * (ratio + (1.0 - p)), r2 * (ratio - (1.0 - p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prob(s: f64, m: u32, n: u32) -> CloningProblem {
        CloningProblem::new(s, m, n).unwrap()
    }

    const ONE: FlagOverlap = FlagOverlap::CLONING;

    #[test]
    fn rejects_bad_problems() {
        assert!(CloningProblem::new(1.0, 1, 2).is_err());
        assert!(CloningProblem::new(-0.1, 1, 2).is_err());
        assert!(CloningProblem::new(f64::NAN, 1, 2).is_err());
        assert!(CloningProblem::new(0.5, 0, 2).is_err());
        assert!(CloningProblem::new(0.5, 2, 2).is_err());
        assert!(CloningProblem::new(0.5, 3, 2).is_err());
        assert!(CloningProblem::new(0.0, 1, 2).is_ok());
        assert!(FlagOverlap::new(1.5).is_err());
        assert!(FlagOverlap::new(-0.0).is_ok());
    }

    #[test]
    fn residual_examples() {
        let p = prob(0.5, 1, 2);
        assert!(constraint_residual(&p, ONE, 1.0, 0.25).abs() < 1e-15);
        assert!(constraint_residual(&p, ONE, 0.8, 0.2).abs() < 1e-15);
        assert_eq!(constraint_residual(&prob(0.0, 1, 2), ONE, 0.0, 0.0), 0.0);
    }

    #[test]
    fn membership_examples() {
        let p = prob(0.5, 1, 2);
        let half = FlagOverlap::new(0.5).unwrap();
        for alpha in [FlagOverlap::DISCRIMINATION, half, ONE] {
            assert!(s_alpha_contains(&p, alpha, 1.0, 1.0));
        }
        assert!(!s_alpha_contains(&p, ONE, 0.0, 0.0));
        // alpha = 0: q1 q2 >= s^2m = 0.25
        assert!(!s_alpha_contains(&p, FlagOverlap::DISCRIMINATION, 0.3, 0.3));
        assert!(s_alpha_contains(&p, FlagOverlap::DISCRIMINATION, 0.5, 0.5));
        assert!(s_alpha_contains(&p, FlagOverlap::DISCRIMINATION, 0.6, 0.6));
    }

    #[test]
    fn t_bounds_examples() {
        let (a, b) = t_bounds(&prob(0.5, 1, 2));
        assert!((a - 2.0 / 3.0).abs() < 1e-15);
        assert!((b - 0.8).abs() < 1e-15);
        assert_eq!(t_bounds(&prob(0.0, 1, 2)), (1.0, 1.0));
        // Extended-precision evaluation.
        let (a, b) = t_bounds(&prob(0.9, 1, 5));
        assert!((a - 0.839_784_132_255_622_5).abs() < 1e-14);
        assert!((b - 0.874_426_435_518_951).abs() < 1e-14);
    }

    #[test]
    fn point_at_examples() {
        let p = prob(0.5, 1, 2);
        let pt = point_at(&p, 2.0 / 3.0).unwrap();
        assert!((pt.x - 1.0 / 3.0).abs() < 1e-15);
        assert!((pt.y - 1.0).abs() < 1e-15);
        assert!((pt.q1 - 1.0 / 3.0).abs() < 1e-15);
        assert!((pt.q2 - 1.0 / 3.0).abs() < 1e-15);

        let pt = point_at(&p, 0.8).unwrap();
        assert!(pt.x.abs() < 1e-15);
        assert!((pt.y - 0.8).abs() < 1e-15);
        assert!((pt.q1 - 0.8).abs() < 1e-15);
        assert!((pt.q2 - 0.2).abs() < 1e-15);

        let p = prob(0.3, 1, 3);
        let (lo, hi) = t_bounds(&p);
        let pt = point_at(&p, 0.5 * (lo + hi)).unwrap();
        assert!(constraint_residual(&p, ONE, pt.q1, pt.q2).abs() <= 1e-12);
    }

    #[test]
    fn point_at_rejects_out_of_range() {
        let p = prob(0.5, 1, 2);
        assert!(matches!(point_at(&p, 0.5), Err(CloneError::Domain { .. })));
        assert!(matches!(point_at(&p, 0.81), Err(CloneError::Domain { .. })));
        assert!(point_at(&p, f64::NAN).is_err());
    }

    #[test]
    fn orthogonal_states_collapse_to_origin() {
        let p = prob(0.0, 2, 3);
        let pt = point_at(&p, 1.0).unwrap();
        assert_eq!((pt.q1, pt.q2), (0.0, 0.0));
        assert!(derivatives_at(&p, 1.0).is_err());
        assert_eq!(q2_on_curve(&p, ONE, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn derivative_vanishes_at_t0() {
        let p = prob(0.5, 1, 2);
        let (dq1, dq2) = derivatives_at(&p, 0.8).unwrap();
        assert!(dq2.abs() < 1e-14, "dq2 = {dq2}");
        assert!(dq1 > 0.0);
    }

    #[test]
    fn slope_tends_to_minus_one_at_diagonal() {
        let p = prob(0.5, 1, 2);
        let (lo, _) = t_bounds(&p);
        assert!(matches!(
            derivatives_at(&p, lo),
            Err(CloneError::Singular { .. })
        ));
        let (dq1, dq2) = derivatives_at(&p, lo + 1e-10).unwrap();
        assert!((dq2 / dq1 + 1.0).abs() < 1e-4, "slope {}", dq2 / dq1);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = prob(0.4, 1, 4);
        let (lo, hi) = t_bounds(&p);
        let h = 1e-7;
        for k in 1..10 {
            let t = lo + (hi - lo) * k as f64 / 10.0;
            let (dq1, dq2) = derivatives_at(&p, t).unwrap();
            let a = point_at(&p, t + h).unwrap();
            let b = point_at(&p, t - h).unwrap();
            let fd1 = (a.q1 - b.q1) / (2.0 * h);
            let fd2 = (a.q2 - b.q2) / (2.0 * h);
            let scale = dq1.abs().max(dq2.abs());
            assert!((fd1 - dq1).abs() <= 1e-6 * scale, "t={t} {fd1} vs {dq1}");
            assert!((fd2 - dq2).abs() <= 1e-6 * scale, "t={t} {fd2} vs {dq2}");
        }
    }

    #[test]
    fn q2_on_curve_examples() {
        let p = prob(0.5, 1, 2);
        let v = q2_on_curve(&p, FlagOverlap::DISCRIMINATION, 0.5).unwrap();
        assert_eq!(v, 0.5);
        for alpha in [0.0, 0.3, 0.5, 1.0] {
            let a = FlagOverlap::new(alpha).unwrap();
            let v = q2_on_curve(&p, a, 1.0).unwrap();
            assert!((v - 0.25).abs() < 1e-12, "alpha {alpha}: {v}");
        }
        // Extended-precision root of the residual.
        let v = q2_on_curve(&p, FlagOverlap::new(0.5).unwrap(), 0.6).unwrap();
        assert!((v - 0.314_731_400_031_707_9).abs() < 1e-12, "{v}");
    }

    #[test]
    fn q2_on_curve_rejects_outside_band() {
        let p = prob(0.5, 1, 2);
        assert!(matches!(
            q2_on_curve(&p, FlagOverlap::DISCRIMINATION, 0.2),
            Err(CloneError::Domain { .. })
        ));
        assert!(q2_on_curve(&p, ONE, 1.2).is_err());
        // Below Q_0 = 0.2 nothing on the alpha = 1 curve.
        assert!(q2_on_curve(&p, ONE, 0.19).is_err());
        assert!(q2_on_curve(&p, ONE, 0.2).is_ok());
    }

    #[test]
    fn q2_on_curve_reaches_below_s2m_for_close_states() {
        // With s = 0.9 the equal-failure point 9/19 sits below s^2m = 0.81.
        let p = prob(0.9, 1, 2);
        let q = 9.0 / 19.0;
        let v = q2_on_curve(&p, ONE, q).unwrap();
        assert!((v - q).abs() < 1e-9, "{v}");
    }

    #[test]
    fn lower_half_reaches_curve_endpoint() {
        let p = prob(0.5, 1, 3);
        let seg = Segment::new(&p);
        let end = seg.point_extended(seg.d_full);
        assert!((end.q1 - 1.0).abs() < 1e-14);
        assert!((end.q2 - 0.25).abs() < 1e-14);
        assert!((end.t - 1.0).abs() < 1e-14);
    }

    #[test]
    fn traced_curves_join_the_shared_endpoints() {
        let p = prob(0.5, 1, 2);
        for alpha in [0.0, 0.5, 1.0] {
            let a = FlagOverlap::new(alpha).unwrap();
            let pts = trace_curve(&p, a, 50).unwrap();
            assert_eq!(pts.len(), 99);
            let (first, last) = (pts[0], pts[98]);
            assert!((first.q1 - 0.25).abs() < 1e-12 && (first.q2 - 1.0).abs() < 1e-12);
            assert!((last.q1 - 1.0).abs() < 1e-12 && (last.q2 - 0.25).abs() < 1e-12);
            assert!((pts[49].q1 - pts[49].q2).abs() < 1e-9);
            for s in &pts {
                assert!(
                    constraint_residual(&p, a, s.q1, s.q2).abs() < 1e-9,
                    "alpha {alpha}: {s:?}"
                );
            }
            assert_eq!(pts[10].t.is_some(), alpha == 1.0);
        }
        assert!(trace_curve(&p, ONE, 1).is_err());
    }

    proptest! {
        #[test]
        fn parametrization_stays_on_curve(s in 0.05f64..0.99, m in 1u32..3, extra in 1u32..5, frac in 0.0f64..=1.0) {
            let p = prob(s, m, m + extra);
            let (lo, hi) = t_bounds(&p);
            let pt = point_at(&p, lo + frac * (hi - lo)).unwrap();
            prop_assert!(constraint_residual(&p, ONE, pt.q1, pt.q2).abs() <= 1e-12);
            prop_assert!(pt.x.abs() <= pt.y + 1e-15 && pt.y <= 1.0);
            prop_assert!(pt.q1 >= pt.q2);
        }

        #[test]
        fn hyperbola_for_alpha_zero(s in 0.01f64..0.99, m in 1u32..3, frac in 0.0f64..=1.0) {
            let p = prob(s, m, m + 1);
            let s2m = p.input_overlap().powi(2);
            let q1 = s2m + frac * (1.0 - s2m);
            let q2 = q2_on_curve(&p, FlagOverlap::DISCRIMINATION, q1).unwrap();
            prop_assert!((q1 * q2 - s2m).abs() <= 1e-14);
        }

        #[test]
        fn residual_is_mirror_symmetric(s in 0.0f64..0.99, alpha in 0.0f64..=1.0, q1 in 0.0f64..=1.0, q2 in 0.0f64..=1.0) {
            let p = prob(s, 1, 3);
            let a = FlagOverlap::new(alpha).unwrap();
            prop_assert_eq!(constraint_residual(&p, a, q1, q2), constraint_residual(&p, a, q2, q1));
        }
    }
}
