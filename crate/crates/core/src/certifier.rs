//! Checks the contractive implication
//!
//! ```text
//! phi(x, y) d(x, Tx) <= d(x, y)   ==>   H(Tx, Ty) <= M(x, y) + omega D
//! ```
//!
//! over a pair sample, and the one-step rate corollary
//! `d(y, Ty) <= K1 d(x, y) + K2 omega D` for `y ∈ Tx`.
//!
//! Table instances are checked exhaustively; parametric instances are
//! checked on image pairs, the full cross grid, and seeded random pairs, and
//! the resulting certificate is labeled `sampled`.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mapping::{image, Instance, Side, SidedPoint};
use crate::metric::{distance, hausdorff, point_to_set_distance, Point, PointSet};
use crate::params::{classify_region, m_value, phi, DistanceBundle, RegionLabel};

/// Relative slack for `lhs <= rhs` comparisons, scaled by `max(1, |rhs|)`.
pub const COMPARISON_SLACK: f64 = 1e-9;

pub fn within_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + COMPARISON_SLACK * rhs.abs().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PremiseCheck {
    pub holds: bool,
    pub phi: f64,
    pub region: RegionLabel,
    pub bundle: DistanceBundle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub x: SidedPoint,
    pub y: SidedPoint,
    pub premise_holds: bool,
    pub phi: f64,
    /// `H(Tx, Ty)`
    pub lhs: f64,
    /// `M + omega D`
    pub rhs: f64,
    pub satisfied: bool,
    pub bundle: DistanceBundle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedVerdict {
    pub x: SidedPoint,
    pub y: SidedPoint,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Which pairs `certify` evaluates on parametric instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub image_pairs: bool,
    pub cross_grid: bool,
    pub random_pairs: usize,
    pub seed: u64,
    /// Also evaluate the two-argument form `d(x, Tx) <= K1 d(x, y) + K2 omega D`
    /// and report its failures (informational, never affects `certified`).
    pub literal_derived: bool,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            image_pairs: true,
            cross_grid: true,
            random_pairs: 10_000,
            seed: 0,
            literal_derived: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub mode: CertificateMode,
    pub pairs_checked: usize,
    pub derived_pairs_checked: usize,
    pub omega: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub k1: f64,
    pub k2: f64,
    pub violations: Vec<PairVerdict>,
    pub derived_violations: Vec<DerivedVerdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub literal_derived_failures: Vec<DerivedVerdict>,
    pub certified: bool,
}

struct Images {
    tx: PointSet,
    ty: PointSet,
}

fn images(x: &SidedPoint, y: &SidedPoint, inst: &Instance) -> Result<Images> {
    Ok(Images {
        tx: image(&x.point, x.side, inst)?,
        ty: image(&y.point, y.side, inst)?,
    })
}

fn bundle_for(x: &Point, y: &Point, imgs: &Images) -> Result<DistanceBundle> {
    Ok(DistanceBundle::new(
        distance(x, y)?,
        point_to_set_distance(x, &imgs.tx)?,
        point_to_set_distance(y, &imgs.ty)?,
        point_to_set_distance(x, &imgs.ty)?,
        point_to_set_distance(y, &imgs.tx)?,
    ))
}

fn premise(bundle: DistanceBundle, inst: &Instance) -> Result<PremiseCheck> {
    let params = inst.params();
    let region = classify_region(params.alpha, params.beta);
    let phi = phi(&bundle, params, region)?;
    Ok(PremiseCheck {
        holds: phi * bundle.d_x_tx <= bundle.d_xy,
        phi,
        region,
        bundle,
    })
}

/// Left side of the implication: `phi * d(x, Tx) <= d(x, y)`.
pub fn check_premise(x: &SidedPoint, y: &SidedPoint, inst: &Instance) -> Result<PremiseCheck> {
    let imgs = images(x, y, inst)?;
    premise(bundle_for(&x.point, &y.point, &imgs)?, inst)
}

pub fn check_contraction_pair(
    x: &SidedPoint,
    y: &SidedPoint,
    inst: &Instance,
) -> Result<PairVerdict> {
    let imgs = images(x, y, inst)?;
    let bundle = bundle_for(&x.point, &y.point, &imgs)?;
    let prem = premise(bundle, inst)?;
    let lhs = hausdorff(&imgs.tx, &imgs.ty)?;
    let rhs = m_value(&bundle, inst.params()) + inst.omega()? * inst.set_distance();
    Ok(PairVerdict {
        x: x.clone(),
        y: y.clone(),
        premise_holds: prem.holds,
        phi: prem.phi,
        lhs,
        rhs,
        satisfied: !prem.holds || within_slack(lhs, rhs),
        bundle,
    })
}

/// One-step rate bound along an orbit: for `y ∈ Tx`,
/// `d(y, Ty) <= K1 d(x, y) + K2 omega D`.
pub fn check_derived_inequality(
    x: &SidedPoint,
    y: &SidedPoint,
    inst: &Instance,
) -> Result<DerivedVerdict> {
    let c = inst.constants()?;
    let ty = image(&y.point, y.side, inst)?;
    let lhs = point_to_set_distance(&y.point, &ty)?;
    let rhs = c.k1 * distance(&x.point, &y.point)? + c.k2 * inst.omega()? * inst.set_distance();
    Ok(DerivedVerdict {
        x: x.clone(),
        y: y.clone(),
        lhs,
        rhs,
        satisfied: within_slack(lhs, rhs),
    })
}

/// Two-argument form `d(x, Tx) <= K1 d(x, y) + K2 omega D`, kept as a
/// diagnostic. It is not implied by the contractive condition for `y ∈ Tx`.
pub fn check_derived_literal(
    x: &SidedPoint,
    y: &SidedPoint,
    inst: &Instance,
) -> Result<DerivedVerdict> {
    let c = inst.constants()?;
    let tx = image(&x.point, x.side, inst)?;
    let lhs = point_to_set_distance(&x.point, &tx)?;
    let rhs = c.k1 * distance(&x.point, &y.point)? + c.k2 * inst.omega()? * inst.set_distance();
    Ok(DerivedVerdict {
        x: x.clone(),
        y: y.clone(),
        lhs,
        rhs,
        satisfied: within_slack(lhs, rhs),
    })
}

fn witness_cmp(a: &SidedPoint, b: &SidedPoint) -> Ordering {
    a.side.cmp(&b.side).then_with(|| a.point.lex_cmp(&b.point))
}

fn pair_cmp(a: (&SidedPoint, &SidedPoint), b: (&SidedPoint, &SidedPoint)) -> Ordering {
    witness_cmp(a.0, b.0).then_with(|| witness_cmp(a.1, b.1))
}

/// All `(x, y)` with `y ∈ Tx`, `x` ranging over both clouds.
fn image_pairs(inst: &Instance) -> Result<Vec<(SidedPoint, SidedPoint)>> {
    let mut out = Vec::new();
    for x in inst.domain_points() {
        let img = image(&x.point, x.side, inst)?;
        for y in img.points() {
            out.push((x.clone(), SidedPoint::new(y.clone(), x.side.opposite())));
        }
    }
    Ok(out)
}

fn contraction_pairs(inst: &Instance, plan: &SamplingPlan) -> Result<Vec<(SidedPoint, SidedPoint)>> {
    let all: Vec<SidedPoint> = inst.domain_points().collect();
    if inst.is_table() {
        let mut out = Vec::with_capacity(all.len() * all.len());
        for x in &all {
            for y in &all {
                out.push((x.clone(), y.clone()));
            }
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    if plan.image_pairs {
        out.extend(image_pairs(inst)?);
    }
    if plan.cross_grid {
        for x in &all {
            for y in all.iter().filter(|y| y.side != x.side) {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    for _ in 0..plan.random_pairs {
        let sx = if rand::Rng::gen_bool(&mut rng, 0.5) { Side::A } else { Side::B };
        let sy = if rand::Rng::gen_bool(&mut rng, 0.5) { Side::A } else { Side::B };
        let px = inst.domain(sx).sample(&mut rng);
        let py = inst.domain(sy).sample(&mut rng);
        out.push((SidedPoint::new(px, sx), SidedPoint::new(py, sy)));
    }
    Ok(out)
}

/// Evaluates the contractive condition and the one-step rate bound over the
/// pairs selected by `plan` (or every pair, for table instances).
pub fn certify(inst: &Instance, plan: &SamplingPlan) -> Result<Certificate> {
    let c = inst.constants()?;
    let omega = inst.omega()?;
    let pairs = contraction_pairs(inst, plan)?;
    let verdicts = pairs
        .par_iter()
        .map(|(x, y)| check_contraction_pair(x, y, inst))
        .collect::<Result<Vec<_>>>()?;
    let mut violations: Vec<PairVerdict> = verdicts.into_iter().filter(|v| !v.satisfied).collect();
    violations.sort_by(|a, b| pair_cmp((&a.x, &a.y), (&b.x, &b.y)));

    let steps = image_pairs(inst)?;
    let derived = steps
        .par_iter()
        .map(|(x, y)| check_derived_inequality(x, y, inst))
        .collect::<Result<Vec<_>>>()?;
    let mut derived_violations: Vec<DerivedVerdict> =
        derived.into_iter().filter(|v| !v.satisfied).collect();
    derived_violations.sort_by(|a, b| pair_cmp((&a.x, &a.y), (&b.x, &b.y)));

    let mut literal_derived_failures = Vec::new();
    if plan.literal_derived {
        literal_derived_failures = steps
            .par_iter()
            .map(|(x, y)| check_derived_literal(x, y, inst))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|v| !v.satisfied)
            .collect();
        literal_derived_failures.sort_by(|a, b| pair_cmp((&a.x, &a.y), (&b.x, &b.y)));
    }

    let certified = violations.is_empty() && derived_violations.is_empty();
    Ok(Certificate {
        mode: if inst.is_table() {
            CertificateMode::Exhaustive
        } else {
            CertificateMode::Sampled
        },
        pairs_checked: pairs.len(),
        derived_pairs_checked: steps.len(),
        omega,
        d: inst.set_distance(),
        k1: c.k1,
        k2: c.k2,
        violations,
        derived_violations,
        literal_derived_failures,
        certified,
    })
}
