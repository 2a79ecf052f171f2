//! Unambiguous discrimination (UD) and the two composite protocols that
//! link it to cloning, plus the large-`n` limit where optimal cloning
//! turns into UD.

use rayon::prelude::*;
use serde::Serialize;

use crate::cloner::{self, PriorWeights};
use crate::curve::CloningProblem;
use crate::error::{CloneError, Result};

/// Default finite-difference step in `eta1`.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Half-width of the scan window around the critical prior, in steps.
pub const SCAN_HALF_WIDTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UdRegime {
    /// Three outcomes: identify state 1, identify state 2, or fail.
    Generalized3Outcome,
    /// Two outcomes: identify the likelier state or fail (`p1 = 0`).
    Projective2Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UdSolution {
    pub q_ud: f64,
    pub regime: UdRegime,
}

/// Failure of a two-stage protocol: `total = q_cloning + (1 - q_cloning) q_second`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompositeResult {
    pub q_cloning: f64,
    pub q_second: f64,
    pub total: f64,
}

impl CompositeResult {
    fn new(q_cloning: f64, q_second: f64) -> Self {
        CompositeResult {
            q_cloning,
            q_second,
            total: q_cloning + (1.0 - q_cloning) * q_second,
        }
    }
}

/// Prior at which optimal UD switches from the projective to the generalized
/// measurement, `c^2 / (1 + c^2)` for state overlap `c`.
pub fn ud_threshold(overlap: f64) -> f64 {
    let c2 = overlap * overlap;
    c2 / (1.0 + c2)
}

/// Optimal UD failure probability for `copies` copies of two states with
/// single-copy overlap `s_eff`.
pub fn ud_failure(s_eff: f64, copies: u32, priors: PriorWeights) -> Result<UdSolution> {
    if !s_eff.is_finite() || !(0.0..1.0).contains(&s_eff) {
        return Err(CloneError::InvalidArgument(format!(
            "overlap {s_eff} must satisfy 0 <= s < 1"
        )));
    }
    if copies < 1 {
        return Err(CloneError::InvalidArgument(
            "UD needs at least one copy".into(),
        ));
    }
    let priors = if priors.eta1 > 0.5 {
        priors.swapped()
    } else {
        priors
    };
    let c = s_eff.powi(copies as i32);
    if priors.eta1 >= ud_threshold(c) {
        Ok(UdSolution {
            q_ud: 2.0 * (priors.eta1 * priors.eta2).sqrt() * c,
            regime: UdRegime::Generalized3Outcome,
        })
    } else {
        Ok(UdSolution {
            q_ud: priors.eta1 + c * c * priors.eta2,
            regime: UdRegime::Projective2Outcome,
        })
    }
}

/// Measure-and-prepare: UD on the inputs, then fabricate clones of the
/// identified state. Fails exactly when UD fails.
pub fn cloning_by_discrimination(
    problem: &CloningProblem,
    priors: PriorWeights,
) -> Result<CompositeResult> {
    let ud = ud_failure(problem.s(), problem.m(), priors)?;
    Ok(CompositeResult::new(ud.q_ud, 0.0))
}

/// Prepare-and-measure: optimal cloning at the actual priors, then optimal
/// UD of the `n` clones.
///
/// The second stage sees the states with overlap `s^n`, weighted by the
/// Bayes posterior over cloning success, `eta'_i ∝ eta_i p_i`. For unequal
/// nonzero priors this composite is this crate's construction: only the
/// `eta1 = 1/2` and `eta1 = 0` cases reduce to the optimal UD rate.
pub fn discrimination_by_cloning(
    problem: &CloningProblem,
    priors: PriorWeights,
) -> Result<CompositeResult> {
    let first = cloner::solve(problem, priors)?;
    let q_c = first.q_min;
    let success = 1.0 - q_c;
    if success <= 0.0 {
        return Err(CloneError::Numeric(format!(
            "cloning stage never succeeds (Q_C = {q_c})"
        )));
    }
    let eta1_post = if priors.eta1 == 0.0 || first.p1 <= 0.0 {
        0.0
    } else {
        (priors.eta1 * first.p1 / success).clamp(0.0, 1.0)
    };
    let second = ud_failure(problem.output_overlap(), 1, PriorWeights::new(eta1_post)?)?;
    Ok(CompositeResult::new(q_c, second.q_ud))
}

/// `Q_UD - Q_min`: how much optimal cloning beats cloning by discrimination.
pub fn convergence_gap(problem: &CloningProblem, priors: PriorWeights) -> Result<f64> {
    let ud = ud_failure(problem.s(), problem.m(), priors)?;
    let sol = cloner::solve(problem, priors)?;
    Ok(ud.q_ud - sol.q_min)
}

/// One-sided second derivatives of `Q_UD(eta1)` at the critical prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UdCurvature {
    /// Below the threshold `Q_UD` is linear in `eta1`.
    pub projective_side: f64,
    /// Above the threshold, `-(1 + s^2m)^3 / (2 s^2m)`.
    pub generalized_side: f64,
}

impl UdCurvature {
    pub fn jump(&self) -> f64 {
        (self.generalized_side - self.projective_side).abs()
    }
}

/// Analytic one-sided second derivatives of `Q_UD` at `eta* = s^2m / (1 + s^2m)`.
pub fn ud_curvature_limits(s: f64, m: u32) -> UdCurvature {
    let c2 = s.powi(2 * m as i32);
    UdCurvature {
        projective_side: 0.0,
        generalized_side: -(1.0 + c2).powi(3) / (2.0 * c2),
    }
}

/// One-sided finite-difference second derivatives of `Q_UD` at the
/// threshold, using the second-order stencil `(2f0 - 5f1 + 4f2 - f3) / h^2`
/// on each side so that no stencil straddles the kink.
pub fn ud_curvature_fd(s: f64, m: u32, step: f64) -> Result<UdCurvature> {
    let eta_star = ud_threshold(s.powi(m as i32));
    check_window(eta_star, step, 3)?;
    let f = |eta: f64| -> Result<f64> { Ok(ud_failure(s, m, PriorWeights::new(eta)?)?.q_ud) };
    let side = |dir: f64| -> Result<f64> {
        let v: Vec<f64> = (0..4)
            .map(|k| f(eta_star + dir * step * k as f64))
            .collect::<Result<_>>()?;
        Ok((2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (step * step))
    };
    Ok(UdCurvature {
        projective_side: side(-1.0)?,
        generalized_side: side(1.0)?,
    })
}

fn check_window(eta_star: f64, step: f64, reach: usize) -> Result<()> {
    let span = step * reach as f64;
    if !step.is_finite() || step <= 0.0 || eta_star - span <= 0.0 || eta_star + span >= 0.5 {
        return Err(CloneError::Domain {
            what: "fd_step",
            value: step,
            lo: 0.0,
            hi: (eta_star.min(0.5 - eta_star) / reach as f64).max(0.0),
        });
    }
    Ok(())
}

/// Peak curvature of `Q_min(eta1)` near the critical prior for one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionRow {
    pub n: u32,
    /// `max |d^2 Q_min / d eta1^2|` over `eta* ± 10 h`.
    pub peak_d2: f64,
    pub eta_at_peak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionScan {
    pub s: f64,
    pub m: u32,
    pub fd_step: f64,
    pub n_values: Vec<u32>,
    pub eta_star: f64,
    pub peak_d2: Vec<f64>,
    pub rows: Vec<TransitionRow>,
    /// `|jump|` of the second derivative of the `n -> infinity` limit `Q_UD`.
    pub jump_limit: f64,
    pub limit: UdCurvature,
    /// The same one-sided values from finite differences.
    pub limit_fd: UdCurvature,
}

/// Centered second differences of `Q_min(eta1)` on `eta* + k h`,
/// `|k| <= 10`, for each `n`, alongside the limiting UD curvature jump.
pub fn transition_scan(s: f64, m: u32, n_values: &[u32], fd_step: f64) -> Result<TransitionScan> {
    if n_values.is_empty() {
        return Err(CloneError::InvalidArgument("no n values to scan".into()));
    }
    for &n in n_values {
        CloningProblem::new(s, m, n)?;
    }
    let eta_star = ud_threshold(s.powi(m as i32));
    check_window(eta_star, fd_step, SCAN_HALF_WIDTH + 1)?;

    let reach = SCAN_HALF_WIDTH as i64 + 1;
    let rows = n_values
        .par_iter()
        .map(|&n| -> Result<TransitionRow> {
            let problem = CloningProblem::new(s, m, n)?;
            let q: Vec<f64> = (-reach..=reach)
                .map(|k| {
                    let eta = eta_star + fd_step * k as f64;
                    Ok(cloner::solve(&problem, PriorWeights::new(eta)?)?.q_min)
                })
                .collect::<Result<_>>()?;
            let (peak_d2, eta_at_peak) = (1..q.len() - 1)
                .map(|i| {
                    let d2 = (q[i + 1] - 2.0 * q[i] + q[i - 1]) / (fd_step * fd_step);
                    (d2.abs(), eta_star + fd_step * (i as i64 - reach) as f64)
                })
                .fold((0.0, eta_star), |acc, v| if v.0 > acc.0 { v } else { acc });
            Ok(TransitionRow {
                n,
                peak_d2,
                eta_at_peak,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let limit = ud_curvature_limits(s, m);
    Ok(TransitionScan {
        s,
        m,
        fd_step,
        n_values: n_values.to_vec(),
        eta_star,
        peak_d2: rows.iter().map(|r| r.peak_d2).collect(),
        rows,
        jump_limit: limit.jump(),
        limit,
        limit_fd: ud_curvature_fd(s, m, fd_step)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prob(s: f64, m: u32, n: u32) -> CloningProblem {
        CloningProblem::new(s, m, n).unwrap()
    }

    fn prior(eta1: f64) -> PriorWeights {
        PriorWeights::new(eta1).unwrap()
    }

    #[test]
    fn ud_examples() {
        let u = ud_failure(0.5, 1, prior(0.5)).unwrap();
        assert!((u.q_ud - 0.5).abs() < 1e-16);
        assert_eq!(u.regime, UdRegime::Generalized3Outcome);
        let u = ud_failure(0.5, 1, prior(0.1)).unwrap();
        assert!((u.q_ud - 0.325).abs() < 1e-16);
        assert_eq!(u.regime, UdRegime::Projective2Outcome);
        for eta in [0.0, 0.3, 0.9] {
            assert_eq!(ud_failure(0.0, 2, prior(eta)).unwrap().q_ud, 0.0);
        }
        assert!(ud_failure(1.0, 1, prior(0.5)).is_err());
    }

    #[test]
    fn ud_is_label_symmetric() {
        for eta in [0.05, 0.2, 0.4] {
            let a = ud_failure(0.6, 2, prior(eta)).unwrap();
            let b = ud_failure(0.6, 2, prior(1.0 - eta)).unwrap();
            assert!((a.q_ud - b.q_ud).abs() < 1e-15);
            assert_eq!(a.regime, b.regime);
        }
    }

    #[test]
    fn ud_branches_meet_at_threshold() {
        for s in [0.1, 0.5, 0.9] {
            for m in [1, 2, 3] {
                let c = f64::powi(s, m);
                let e = ud_threshold(c);
                let gen = 2.0 * (e * (1.0 - e)).sqrt() * c;
                let proj = e + c * c * (1.0 - e);
                assert!((gen - proj).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cloning_by_discrimination_is_ud() {
        let r = cloning_by_discrimination(&prob(0.5, 1, 7), prior(0.5)).unwrap();
        assert!((r.total - 0.5).abs() < 1e-16);
        assert_eq!(r.q_second, 0.0);
        assert_eq!(
            cloning_by_discrimination(&prob(0.0, 1, 2), prior(0.2))
                .unwrap()
                .total,
            0.0
        );
        let p = prob(0.5, 1, 2);
        let r = cloning_by_discrimination(&p, prior(0.3)).unwrap();
        assert_eq!(r.total, ud_failure(0.5, 1, prior(0.3)).unwrap().q_ud);
        assert!(r.total > cloner::solve(&p, prior(0.3)).unwrap().q_min);
    }

    #[test]
    fn discrimination_by_cloning_identities() {
        let p = prob(0.5, 1, 2);
        let r = discrimination_by_cloning(&p, prior(0.5)).unwrap();
        assert!((r.total - 0.5).abs() < 1e-15);
        assert!((r.q_cloning - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.q_second - 0.25).abs() < 1e-15);
        let r = discrimination_by_cloning(&p, prior(0.0)).unwrap();
        assert!((r.total - 0.25).abs() < 1e-15);
        assert!((r.q_cloning - 0.2).abs() < 1e-15);
        assert!((r.q_second - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn discrimination_by_cloning_suboptimal_elsewhere() {
        let p = prob(0.5, 1, 2);
        let r = discrimination_by_cloning(&p, prior(0.3)).unwrap();
        let ud = ud_failure(0.5, 1, prior(0.3)).unwrap().q_ud;
        assert!(r.total > ud, "{} vs {}", r.total, ud);
        assert!((r.total - (r.q_cloning + (1.0 - r.q_cloning) * r.q_second)).abs() < 1e-16);
    }

    #[test]
    fn gap_examples() {
        let g = convergence_gap(&prob(0.5, 1, 2), prior(0.5)).unwrap();
        assert!((g - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(convergence_gap(&prob(0.0, 1, 2), prior(0.3)).unwrap(), 0.0);
        let g = convergence_gap(&prob(0.5, 1, 20), prior(0.35)).unwrap();
        assert!(g > 0.0 && g < 1e-5, "{g}");
    }

    #[test]
    fn gap_shrinks_with_n() {
        for eta in [0.1, 0.2, 0.35, 0.5] {
            let mut prev = f64::INFINITY;
            for n in [2, 3, 5, 10, 20] {
                let g = convergence_gap(&prob(0.5, 1, n), prior(eta)).unwrap();
                assert!(g > 0.0 && g < prev, "eta {eta} n {n}: {g}");
                prev = g;
            }
        }
    }

    #[test]
    fn limiting_jump_value() {
        let c = ud_curvature_limits(0.5, 1);
        assert_eq!(c.projective_side, 0.0);
        assert!((c.jump() - 3.90625).abs() < 1e-14);
    }

    #[test]
    fn fd_curvature_matches_limits() {
        for (s, m) in [(0.5, 1), (0.7, 1), (0.6, 2)] {
            let exact = ud_curvature_limits(s, m);
            let fd = ud_curvature_fd(s, m, 1e-4).unwrap();
            assert!((fd.projective_side - exact.projective_side).abs() < 1e-3);
            assert!((fd.generalized_side - exact.generalized_side).abs() < 1e-3);
        }
    }

    #[test]
    fn transition_scan_peaks_grow() {
        let scan = transition_scan(0.5, 1, &[3, 5, 10, 20], 1e-4).unwrap();
        assert!((scan.eta_star - 0.2).abs() < 1e-16);
        assert!(
            scan.peak_d2.windows(2).all(|w| w[1] > w[0]),
            "{:?}",
            scan.peak_d2
        );
        assert!(scan
            .peak_d2
            .iter()
            .all(|v| v.is_finite() && *v < scan.jump_limit));
    }

    #[test]
    fn finite_n_curvature_has_no_jump() {
        // Second differences on a coarse grid change by a bounded amount
        // between neighbours: no discontinuity at finite n.
        let p = prob(0.5, 1, 5);
        let h = 1e-3;
        let q: Vec<f64> = (1..499)
            .map(|k| cloner::solve(&p, prior(k as f64 * h)).unwrap().q_min)
            .collect();
        let d2: Vec<f64> = q
            .windows(3)
            .map(|w| (w[2] - 2.0 * w[1] + w[0]) / (h * h))
            .collect();
        let max_step = d2
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        assert!(max_step < 0.2, "{max_step}");
        assert!(d2.iter().all(|v| *v <= 1e-6), "Q_min is concave in eta1");
    }

    #[test]
    fn transition_scan_rejects_wide_step() {
        assert!(matches!(
            transition_scan(0.5, 1, &[3], 0.05),
            Err(CloneError::Domain { .. })
        ));
        assert!(transition_scan(0.5, 1, &[], 1e-4).is_err());
        assert!(transition_scan(0.0, 1, &[3], 1e-4).is_err());
    }
}
