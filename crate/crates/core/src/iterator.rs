//! Picard-type orbits `x_{n+1} ∈ T x_n` and the diagnostics run on them.
//!
//! A trace records every iterate with its side, the one- and two-step
//! distances, the telescoped geometric bound
//! `K1^{n-1} d(x2, x1) + (1 - K1^{n-1}) / (1 - K1) * K2 omega D`,
//! and the running sum of step distances.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certifier::within_slack;
use crate::error::{Error, Result};
use crate::mapping::{image, Instance, Side, SidedPoint};
use crate::metric::{distance, point_to_set_distance, Point};
use crate::params::DerivedConstants;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// How `x_{n+1}` is picked from a multivalued image.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionPolicy {
    /// Closest image point, ties broken lexicographically.
    #[default]
    Nearest,
    FirstListed,
    SeededRandom(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Outcome {
    FixedPoint { z: Point },
    BestProximityPair { z_a: Point, z_b: Point },
    NotConverged { reason: String },
}

impl Outcome {
    pub fn is_converged(&self) -> bool {
        !matches!(self, Outcome::NotConverged { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub points: Vec<Point>,
    pub sides: Vec<Side>,
    /// `d(x_n, x_{n+1})`, one entry per step.
    pub step_dist: Vec<f64>,
    /// `d(x_n, x_{n+2})`.
    pub two_step_dist: Vec<f64>,
    /// Telescoped bound for the matching entry of `step_dist`.
    pub bound_rhs: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Whether the stopping rule fired before `max_iter`.
    pub stopped: bool,
    #[serde(rename = "D")]
    pub d: f64,
    pub omega: f64,
    pub outcome: Option<Outcome>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iterations(&self) -> usize {
        self.step_dist.len()
    }
}

fn select<'a>(
    from: &Point,
    candidates: &'a [Point],
    policy: SelectionPolicy,
    rng: &mut Option<ChaCha8Rng>,
) -> Result<&'a Point> {
    Ok(match policy {
        SelectionPolicy::FirstListed => &candidates[0],
        SelectionPolicy::SeededRandom(_) => {
            let rng = rng.as_mut().expect("rng seeded for random policy");
            &candidates[rng.gen_range(0..candidates.len())]
        }
        SelectionPolicy::Nearest => {
            let mut best = &candidates[0];
            let mut best_d = distance(from, best)?;
            for c in &candidates[1..] {
                let d = distance(from, c)?;
                if d < best_d || (d == best_d && c.lex_cmp(best) == Ordering::Less) {
                    best = c;
                    best_d = d;
                }
            }
            best
        }
    })
}

/// Telescoped bound for step `n` (1-based): the distance `d(x_n, x_{n+1})`.
pub fn telescoped_bound(n: usize, first_step: f64, k1: f64, k2: f64, omega: f64, d: f64) -> f64 {
    let p = k1.powi(n as i32 - 1);
    let geometric = if k1 == 1.0 {
        (n - 1) as f64
    } else {
        (1.0 - p) / (1.0 - k1)
    };
    p * first_step + geometric * k2 * omega * d
}

/// Generates an orbit from `x1`, which is located on A if it belongs to A,
/// otherwise on B.
pub fn iterate(
    inst: &Instance,
    x1: &Point,
    policy: SelectionPolicy,
    max_iter: usize,
    tol: f64,
) -> Result<IterationTrace> {
    let side = inst
        .locate(x1)
        .ok_or_else(|| Error::Domain(format!("start point {x1} is in neither A nor B")))?;
    iterate_from(inst, &SidedPoint::new(x1.clone(), side), policy, max_iter, tol)
}

/// Generates an orbit from a start point with an explicit side.
///
/// Stops once `|d(x_n, x_{n+1}) - D| <= tol` and `d(x_{n-1}, x_{n+1}) <= tol`,
/// or after `max_iter` steps.
pub fn iterate_from(
    inst: &Instance,
    x1: &SidedPoint,
    policy: SelectionPolicy,
    max_iter: usize,
    tol: f64,
) -> Result<IterationTrace> {
    if max_iter < 2 {
        return Err(Error::Parameter(format!("max_iter = {max_iter} must be >= 2")));
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::Parameter(format!("tol = {tol} must be finite and >= 0")));
    }
    if !inst.domain(x1.side).contains(&x1.point) {
        return Err(Error::Domain(format!(
            "start point {} is not in set {}",
            x1.point, x1.side
        )));
    }
    let c = inst.constants()?;
    let omega = inst.omega()?;
    let d_set = inst.set_distance();
    let mut rng = match policy {
        SelectionPolicy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };

    let mut trace = IterationTrace {
        points: vec![x1.point.clone()],
        sides: vec![x1.side],
        step_dist: Vec::new(),
        two_step_dist: Vec::new(),
        bound_rhs: Vec::new(),
        partial_sums: Vec::new(),
        stopped: false,
        d: d_set,
        omega,
        outcome: None,
    };

    for _ in 0..max_iter {
        let n = trace.points.len() - 1;
        let (x, side) = (&trace.points[n], trace.sides[n]);
        let img = image(x, side, inst)?;
        let next = select(x, img.points(), policy, &mut rng)?.clone();
        let next_side = side.opposite();
        if !inst.domain(next_side).contains(&next) {
            return Err(Error::Domain(format!(
                "T maps {x} (side {side}) to {next}, which is outside set {next_side}"
            )));
        }
        let step = distance(x, &next)?;
        let first = *trace.step_dist.first().unwrap_or(&step);
        let steps_done = trace.step_dist.len() + 1;
        trace
            .bound_rhs
            .push(telescoped_bound(steps_done, first, c.k1, c.k2, omega, d_set));
        trace
            .partial_sums
            .push(trace.partial_sums.last().copied().unwrap_or(0.0) + step);
        trace.step_dist.push(step);
        if n >= 1 {
            trace.two_step_dist.push(distance(&trace.points[n - 1], &next)?);
        }
        trace.points.push(next);
        trace.sides.push(next_side);

        if let Some(&two) = trace.two_step_dist.last() {
            if (step - d_set).abs() <= tol && two <= tol {
                trace.stopped = true;
                break;
            }
        }
    }
    Ok(trace)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCheck {
    /// 1-based step index: the distance `d(x_n, x_{n+1})`.
    pub n: usize,
    pub step: f64,
    pub lower_ok: bool,
    /// `K1 d_{n-1} + K2 omega D`; `None` for the first step.
    pub recursive_rhs: Option<f64>,
    pub recursive_ok: bool,
    pub telescoped_rhs: f64,
    pub telescoped_ok: bool,
}

impl StepCheck {
    pub fn passed(&self) -> bool {
        self.lower_ok && self.recursive_ok && self.telescoped_ok
    }
}

/// Per-step lower bound `D <= d_n`, recursive bound
/// `d_n <= K1 d_{n-1} + K2 omega D` and its telescoped form.
pub fn check_step_bound(trace: &IterationTrace, c: &DerivedConstants) -> Vec<StepCheck> {
    let k2wd = c.k2 * trace.omega * trace.d;
    let first = trace.step_dist.first().copied().unwrap_or(0.0);
    trace
        .step_dist
        .iter()
        .enumerate()
        .map(|(i, &step)| {
            let n = i + 1;
            let recursive_rhs = (i > 0).then(|| c.k1 * trace.step_dist[i - 1] + k2wd);
            let telescoped_rhs = telescoped_bound(n, first, c.k1, c.k2, trace.omega, trace.d);
            StepCheck {
                n,
                step,
                lower_ok: within_slack(trace.d, step),
                recursive_rhs,
                recursive_ok: recursive_rhs.is_none_or(|r| within_slack(step, r)),
                telescoped_rhs,
                telescoped_ok: within_slack(step, telescoped_rhs),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub total: f64,
    /// `d(x2, x1) / (1 - K1)`
    pub bound: f64,
    pub sum_ok: bool,
    /// `sup_{m > n} d(x_m, x_n)` over the recorded trace.
    pub tail_diameters: Vec<f64>,
    /// Tail diameters never grow by more than `tol`.
    pub cauchy_monotone: bool,
    /// The last tail diameter is within `tol`.
    pub cauchy_final_ok: bool,
}

impl SummabilityReport {
    pub fn passed(&self) -> bool {
        self.sum_ok && self.cauchy_monotone && self.cauchy_final_ok
    }
}

/// Summability of the step distances and the Cauchy property, for the
/// intersecting case `D <= tol`.
pub fn check_summability(
    trace: &IterationTrace,
    c: &DerivedConstants,
    tol: f64,
) -> Result<SummabilityReport> {
    if trace.d > tol {
        return Err(Error::Precondition(format!(
            "summability requires intersecting sets, D = {} > tol = {tol}",
            trace.d
        )));
    }
    let total = trace.partial_sums.last().copied().unwrap_or(0.0);
    let first = trace.step_dist.first().copied().unwrap_or(0.0);
    let bound = first / (1.0 - c.k1);
    let mut tail_diameters = Vec::with_capacity(trace.len().saturating_sub(1));
    for n in 0..trace.len().saturating_sub(1) {
        let mut sup = 0.0_f64;
        for m in n + 1..trace.len() {
            sup = sup.max(distance(&trace.points[m], &trace.points[n])?);
        }
        tail_diameters.push(sup);
    }
    let cauchy_monotone = tail_diameters.windows(2).all(|w| w[1] <= w[0] + tol);
    let cauchy_final_ok = tail_diameters.last().is_none_or(|&t| t <= tol);
    Ok(SummabilityReport {
        total,
        bound,
        sum_ok: within_slack(total, bound),
        tail_diameters,
        cauchy_monotone,
        cauchy_final_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    /// 1-based index `n` of the distance being bounded.
    pub n: usize,
    pub value: f64,
    pub rhs: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvenOddReport {
    /// Steps `d(x_{n+1}, x_n)` with `n` odd, i.e. leaving the start side.
    pub odd_steps: Vec<EnvelopeCheck>,
    /// Steps with `n` even, returning to the start side.
    pub even_steps: Vec<EnvelopeCheck>,
    /// `d(x_{n+2}, x_n)` for odd `n`: distances within the start side.
    pub odd_two_step: Vec<EnvelopeCheck>,
    /// Median ratio of consecutive entries of `odd_two_step` (nonzero ones).
    pub odd_two_step_ratio: Option<f64>,
    pub omega_is_star: bool,
    pub limit_odd_step: Option<f64>,
    pub limit_even_step: Option<f64>,
    pub limit_two_step: Option<f64>,
}

impl EvenOddReport {
    pub fn passed(&self) -> bool {
        self.odd_steps
            .iter()
            .chain(&self.even_steps)
            .chain(&self.odd_two_step)
            .all(|e| e.ok)
    }
}

/// Even/odd split of the step envelope, and the two-step envelope
/// `d(x_{n+2}, x_n) <= K1^{n-1} d(x3, x1) + (1 - K1^{n-1}) / (1 - K1) K2 omega D`
/// for odd `n`.
pub fn even_odd_analysis(
    trace: &IterationTrace,
    c: &DerivedConstants,
) -> Result<EvenOddReport> {
    if trace.len() < 5 {
        return Err(Error::Precondition(format!(
            "even/odd analysis needs at least 5 iterates, trace has {}",
            trace.len()
        )));
    }
    let first = trace.step_dist[0];
    let mut odd_steps = Vec::new();
    let mut even_steps = Vec::new();
    for (i, &v) in trace.step_dist.iter().enumerate() {
        let n = i + 1;
        let rhs = telescoped_bound(n, first, c.k1, c.k2, trace.omega, trace.d);
        let check = EnvelopeCheck {
            n,
            value: v,
            rhs,
            ok: within_slack(trace.d, v) && within_slack(v, rhs),
        };
        if n % 2 == 1 {
            odd_steps.push(check);
        } else {
            even_steps.push(check);
        }
    }
    let first_two = trace.two_step_dist[0];
    let odd_two_step: Vec<EnvelopeCheck> = trace
        .two_step_dist
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 2 == 0)
        .map(|(i, &v)| {
            let n = i + 1;
            let rhs = telescoped_bound(n, first_two, c.k1, c.k2, trace.omega, trace.d);
            EnvelopeCheck {
                n,
                value: v,
                rhs,
                ok: v >= 0.0 && within_slack(v, rhs),
            }
        })
        .collect();
    let mut ratios: Vec<f64> = odd_two_step
        .windows(2)
        .filter(|w| w[0].value > 0.0 && w[1].value > 0.0)
        .map(|w| w[1].value / w[0].value)
        .collect();
    ratios.sort_by(f64::total_cmp);
    let odd_two_step_ratio = (!ratios.is_empty()).then(|| ratios[ratios.len() / 2]);

    let omega_is_star = (trace.omega - c.omega_star).abs() <= 1e-12 * c.omega_star.max(1.0);
    let (limit_odd_step, limit_even_step, limit_two_step) = if omega_is_star {
        (
            odd_steps.last().map(|e| e.value),
            even_steps.last().map(|e| e.value),
            trace.two_step_dist.last().copied(),
        )
    } else {
        (None, None, None)
    };
    Ok(EvenOddReport {
        odd_steps,
        even_steps,
        odd_two_step,
        odd_two_step_ratio,
        omega_is_star,
        limit_odd_step,
        limit_even_step,
        limit_two_step,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub d_z_tz: f64,
    pub d_z_a: f64,
    pub d_z_b: f64,
    pub passed: bool,
}

/// `z ∈ Tz ∩ A ∩ B`, up to `tol`.
pub fn verify_fixed_point(z: &Point, inst: &Instance, tol: f64) -> Result<FixedPointReport> {
    let d_z_a = point_to_set_distance(z, inst.domain(Side::A).cloud())?;
    let d_z_b = point_to_set_distance(z, inst.domain(Side::B).cloud())?;
    // The image is taken from whichever side contains z; a point that is in
    // neither cannot be a fixed point.
    let d_z_tz = match inst.locate(z) {
        Some(side) => point_to_set_distance(z, &image(z, side, inst)?)?,
        None => f64::INFINITY,
    };
    Ok(FixedPointReport {
        d_z_tz,
        d_z_a,
        d_z_b,
        passed: d_z_tz <= tol && d_z_a <= tol && d_z_b <= tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestProximityReport {
    pub d_za_zb: f64,
    pub d_zb_tza: f64,
    pub d_za_tzb: f64,
    pub d_za_b: f64,
    pub passed: bool,
}

/// `d(z_A, z_B) = D`, `z_B ∈ T z_A`, `z_A ∈ T z_B` and `d(z_A, B) = D`, up to `tol`.
pub fn verify_best_proximity(
    z_a: &Point,
    z_b: &Point,
    inst: &Instance,
    tol: f64,
) -> Result<BestProximityReport> {
    let d = inst.set_distance();
    let d_za_zb = distance(z_a, z_b)?;
    let d_zb_tza = point_to_set_distance(z_b, &image(z_a, Side::A, inst)?)?;
    let d_za_tzb = point_to_set_distance(z_a, &image(z_b, Side::B, inst)?)?;
    let d_za_b = point_to_set_distance(z_a, inst.domain(Side::B).cloud())?;
    Ok(BestProximityReport {
        d_za_zb,
        d_zb_tza,
        d_za_tzb,
        d_za_b,
        passed: (d_za_zb - d).abs() <= tol
            && d_zb_tza <= tol
            && d_za_tzb <= tol
            && (d_za_b - d).abs() <= tol,
    })
}

/// Reads the limit object off a finished trace.
pub fn detect_limit(trace: &IterationTrace, inst: &Instance, tol: f64) -> Result<Outcome> {
    let last = trace
        .points
        .last()
        .ok_or_else(|| Error::Precondition("empty trace".into()))?;
    if inst.set_distance() <= tol {
        let report = verify_fixed_point(last, inst, tol)?;
        return Ok(if report.passed {
            Outcome::FixedPoint { z: last.clone() }
        } else {
            Outcome::NotConverged {
                reason: format!(
                    "fixed-point check failed: d(z,Tz)={} d(z,A)={} d(z,B)={}",
                    report.d_z_tz, report.d_z_a, report.d_z_b
                ),
            }
        });
    }
    let last_on = |side: Side| {
        trace
            .points
            .iter()
            .zip(&trace.sides)
            .rev()
            .find(|(_, s)| **s == side)
            .map(|(p, _)| p)
    };
    let (Some(z_a), Some(z_b)) = (last_on(Side::A), last_on(Side::B)) else {
        return Ok(Outcome::NotConverged {
            reason: "trace does not visit both sides".into(),
        });
    };
    let report = verify_best_proximity(z_a, z_b, inst, tol)?;
    Ok(if report.passed {
        Outcome::BestProximityPair {
            z_a: z_a.clone(),
            z_b: z_b.clone(),
        }
    } else {
        Outcome::NotConverged {
            reason: format!(
                "best-proximity check failed: d(zA,zB)={} d(zB,TzA)={} d(zA,TzB)={} d(zA,B)={}",
                report.d_za_zb, report.d_zb_tza, report.d_za_tzb, report.d_za_b
            ),
        }
    })
}

/// Iterates and attaches the detected outcome to the trace.
pub fn run(
    inst: &Instance,
    x1: &Point,
    policy: SelectionPolicy,
    max_iter: usize,
    tol: f64,
) -> Result<IterationTrace> {
    let mut trace = iterate(inst, x1, policy, max_iter, tol)?;
    trace.outcome = Some(detect_limit(&trace, inst, tol)?);
    Ok(trace)
}
