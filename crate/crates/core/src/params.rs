//! Contraction parameters `(K, alpha, beta, omega)` and the functions built
//! from them: the region classification of `(alpha, beta)`, the derived rate
//! constants `K1`, `K2`, `omega*`, and the bound `M = max(M1, M2)` together
//! with the premise factor `phi`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// User-facing contraction constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionParams {
    #[serde(rename = "K")]
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Additive gap coefficient; `None` means "use omega*".
    #[serde(default)]
    pub omega: Option<f64>,
}

impl ContractionParams {
    pub fn new(k: f64, alpha: f64, beta: f64, omega: Option<f64>) -> Result<Self> {
        let p = ContractionParams {
            k,
            alpha,
            beta,
            omega,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && (0.0..1.0).contains(&self.k)) {
            return Err(Error::Parameter(format!("K = {} is not in [0, 1)", self.k)));
        }
        if !in_delta(self.alpha, self.beta) {
            return Err(Error::Parameter(format!(
                "(alpha, beta) = ({}, {}) is outside the admissible triangle",
                self.alpha, self.beta
            )));
        }
        if let Some(w) = self.omega {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Parameter(format!("omega = {w} must be positive")));
            }
        }
        Ok(())
    }

    /// Explicit omega if given, otherwise `omega* = (1 - K1) / K2`.
    pub fn resolved_omega(&self) -> Result<f64> {
        match self.omega {
            Some(w) => Ok(w),
            None => Ok(derived_constants(self)?.omega_star),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub k1: f64,
    pub k2: f64,
    pub omega_star: f64,
}

/// Region of the `(alpha, beta)` plane selecting the branch of `phi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionLabel {
    Delta1,
    Delta2,
    Delta3,
    Delta4,
    DeltaOnly,
    Outside,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegionLabel::Delta1 => "Delta1",
            RegionLabel::Delta2 => "Delta2",
            RegionLabel::Delta3 => "Delta3",
            RegionLabel::Delta4 => "Delta4",
            RegionLabel::DeltaOnly => "DeltaOnly",
            RegionLabel::Outside => "Outside",
        };
        f.write_str(s)
    }
}

/// The five distances entering `M1` and `M2` for a pair `(x, y)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DistanceBundle {
    pub d_xy: f64,
    pub d_x_tx: f64,
    pub d_y_ty: f64,
    pub d_x_ty: f64,
    pub d_y_tx: f64,
}

impl DistanceBundle {
    pub fn new(d_xy: f64, d_x_tx: f64, d_y_ty: f64, d_x_ty: f64, d_y_tx: f64) -> Self {
        DistanceBundle {
            d_xy,
            d_x_tx,
            d_y_ty,
            d_x_ty,
            d_y_tx,
        }
    }
}

fn in_delta(alpha: f64, beta: f64) -> bool {
    alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0
}

fn in_delta1(a: f64, b: f64) -> bool {
    a <= b && a * (1.0 + a) + b < 1.0
}

fn in_delta2(a: f64, b: f64) -> bool {
    a >= b && b * (1.0 + b) + a < 1.0
}

fn in_delta3(a: f64, b: f64) -> bool {
    a > 0.0 && a < 0.5 && (1.0 - a) / 2.0 > b && b >= 1.0 - a * (1.0 + a)
}

fn in_delta4(a: f64, b: f64) -> bool {
    (0.0..=0.5).contains(&a)
        && (1.0 - a) / 2.0 <= b
        && b < 1.0 - a * (1.0 + a)
        && a * (1.0 + a) + b * (2.0 - b) < 1.0
}

/// Every sub-region whose defining inequalities hold, evaluated independently.
///
/// The four sub-regions are not disjoint as written: `(0, 0.5)` lies in both
/// the first and the fourth.
pub fn raw_region_membership(alpha: f64, beta: f64) -> Result<Vec<RegionLabel>> {
    if !in_delta(alpha, beta) {
        return Err(Error::Domain(format!(
            "(alpha, beta) = ({alpha}, {beta}) is outside the admissible triangle"
        )));
    }
    let mut out = Vec::new();
    if in_delta1(alpha, beta) {
        out.push(RegionLabel::Delta1);
    }
    if in_delta2(alpha, beta) {
        out.push(RegionLabel::Delta2);
    }
    if in_delta3(alpha, beta) {
        out.push(RegionLabel::Delta3);
    }
    if in_delta4(alpha, beta) {
        out.push(RegionLabel::Delta4);
    }
    Ok(out)
}

/// Classification with precedence Delta1, Delta2, Delta3, Delta4.
pub fn classify_region(alpha: f64, beta: f64) -> RegionLabel {
    if !in_delta(alpha, beta) {
        return RegionLabel::Outside;
    }
    if in_delta1(alpha, beta) {
        RegionLabel::Delta1
    } else if in_delta2(alpha, beta) {
        RegionLabel::Delta2
    } else if in_delta3(alpha, beta) {
        RegionLabel::Delta3
    } else if in_delta4(alpha, beta) {
        RegionLabel::Delta4
    } else {
        RegionLabel::DeltaOnly
    }
}

pub fn derived_constants(params: &ContractionParams) -> Result<DerivedConstants> {
    params.validate()?;
    let (k, a, b) = (params.k, params.alpha, params.beta);
    let k1 = k.max(b / (1.0 - a)).max(a / (1.0 - b));
    let k2 = (1.0 / (1.0 - a)).max(1.0 / (1.0 - b));
    if k1 >= 1.0 {
        // alpha + beta < 1 forces both ratios below one; only reachable through
        // rounding right at the boundary of the triangle.
        return Err(Error::Parameter(format!(
            "K1 = {k1} is not below 1 for {params:?}"
        )));
    }
    Ok(DerivedConstants {
        k1,
        k2,
        omega_star: (1.0 - k1) / k2,
    })
}

/// `K * max{d(x,y), d(x,Tx), d(y,Ty), (d(x,Ty) + d(y,Tx)) / 2}`.
pub fn m1(b: &DistanceBundle, k: f64) -> f64 {
    let cross = 0.5 * (b.d_x_ty + b.d_y_tx);
    k * b.d_xy.max(b.d_x_tx).max(b.d_y_ty).max(cross)
}

/// `alpha * d(x,Tx) + beta * d(y,Ty)`.
pub fn m2(b: &DistanceBundle, alpha: f64, beta: f64) -> f64 {
    alpha * b.d_x_tx + beta * b.d_y_ty
}

pub fn m_value(b: &DistanceBundle, params: &ContractionParams) -> f64 {
    m1(b, params.k).max(m2(b, params.alpha, params.beta))
}

/// Premise factor `phi` in `(0, 1]`.
///
/// Fails with [`Error::ParamsUnsupported`] when `M2 > M1` in a region where no
/// branch is defined, and with [`Error::Domain`] outside the triangle.
pub fn phi(b: &DistanceBundle, params: &ContractionParams, region: RegionLabel) -> Result<f64> {
    if region == RegionLabel::Outside {
        return Err(Error::Domain("phi is undefined outside the admissible triangle".into()));
    }
    let (k, a, be) = (params.k, params.alpha, params.beta);
    if m2(b, a, be) > m1(b, k) {
        match region {
            RegionLabel::Delta1 | RegionLabel::Delta2 => Ok(1.0),
            RegionLabel::Delta3 => Ok(1.0 - be),
            RegionLabel::Delta4 => Ok((1.0 - be) / (1.0 - be + a)),
            RegionLabel::DeltaOnly => Err(Error::ParamsUnsupported(format!(
                "no phi branch for (alpha, beta) = ({a}, {be}) when M2 > M1"
            ))),
            RegionLabel::Outside => unreachable!(),
        }
    } else if k < 0.5 {
        Ok(1.0)
    } else {
        Ok(1.0 - k)
    }
}

/// Counts over the grid `alpha = i / n`, `beta = j / n`, `0 <= i, j < n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionAudit {
    pub grid: usize,
    pub in_delta: usize,
    pub raw_counts: BTreeMap<RegionLabel, usize>,
    pub classified_counts: BTreeMap<RegionLabel, usize>,
    /// Points with more than one raw membership.
    pub overlapping: usize,
    pub delta3: usize,
    /// Raw Delta4 members that are in neither Delta1 nor Delta2.
    pub delta4_only: usize,
}

pub fn audit_grid_point(grid: usize, i: usize, j: usize) -> (f64, f64) {
    (i as f64 / grid as f64, j as f64 / grid as f64)
}

pub fn region_audit(grid: usize) -> Result<RegionAudit> {
    if grid < 10 {
        return Err(Error::Parameter(format!("audit grid {grid} must be >= 10")));
    }
    let mut audit = RegionAudit {
        grid,
        in_delta: 0,
        raw_counts: BTreeMap::new(),
        classified_counts: BTreeMap::new(),
        overlapping: 0,
        delta3: 0,
        delta4_only: 0,
    };
    for i in 0..grid {
        for j in 0..grid {
            let (a, b) = audit_grid_point(grid, i, j);
            *audit.classified_counts.entry(classify_region(a, b)).or_default() += 1;
            let Ok(raw) = raw_region_membership(a, b) else {
                continue;
            };
            audit.in_delta += 1;
            for label in &raw {
                *audit.raw_counts.entry(*label).or_default() += 1;
            }
            if raw.len() > 1 {
                audit.overlapping += 1;
            }
            if raw.contains(&RegionLabel::Delta3) {
                audit.delta3 += 1;
            }
            if raw.contains(&RegionLabel::Delta4)
                && !raw.contains(&RegionLabel::Delta1)
                && !raw.contains(&RegionLabel::Delta2)
            {
                audit.delta4_only += 1;
            }
        }
    }
    Ok(audit)
}
