//! Cyclic multivalued maps `T: A ∪ B -> A ∪ B` on finite representations of
//! closed sets, together with the [`Instance`] type and its JSON form.
//!
//! Every image `Tx` is a finite nonempty point set. Parametric sets (boxes)
//! are discretized to grids when an instance is loaded; the grid is the
//! iteration domain, while the box is the closed set used for membership.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{self, Point, PointSet, SetLabel};
use crate::params::{derived_constants, ContractionParams, DerivedConstants};

/// One of the two sets of a cyclic instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }

    fn label(self) -> SetLabel {
        match self {
            Side::A => SetLabel::A,
            Side::B => SetLabel::B,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// A point tagged with the set it is taken from. Needed because the sets may
/// intersect, and the map may act differently on each side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidedPoint {
    pub point: Point,
    pub side: Side,
}

impl SidedPoint {
    pub fn new(point: Point, side: Side) -> Self {
        SidedPoint { point, side }
    }
}

/// JSON description of a closed set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Points {
        points: Vec<Point>,
    },
    /// Axis-aligned box `[low, high]`, discretized with `points_per_axis`
    /// grid points along every axis (endpoints included).
    GridInterval {
        low: Vec<f64>,
        high: Vec<f64>,
        points_per_axis: usize,
    },
}

impl SetSpec {
    pub fn dim(&self) -> Option<usize> {
        match self {
            SetSpec::Points { points } => points.first().map(Point::dim),
            SetSpec::GridInterval { low, .. } => Some(low.len()),
        }
    }

    /// Finite point cloud for this set.
    pub fn discretize(&self, label: SetLabel) -> Result<PointSet> {
        match self {
            SetSpec::Points { points } => PointSet::new(points.clone(), label),
            SetSpec::GridInterval {
                low,
                high,
                points_per_axis,
            } => {
                if low.is_empty() || low.len() != high.len() {
                    return Err(Error::InstanceFormat(format!(
                        "grid bounds have lengths {} and {}",
                        low.len(),
                        high.len()
                    )));
                }
                if low.iter().chain(high).any(|v| !v.is_finite()) {
                    return Err(Error::InstanceFormat("grid bounds must be finite".into()));
                }
                if low.iter().zip(high).any(|(l, h)| l > h) {
                    return Err(Error::InstanceFormat("grid has low > high".into()));
                }
                if *points_per_axis == 0 {
                    return Err(Error::InstanceFormat("points_per_axis must be >= 1".into()));
                }
                let axes: Vec<Vec<f64>> = low
                    .iter()
                    .zip(high)
                    .map(|(&l, &h)| grid_axis(l, h, *points_per_axis))
                    .collect();
                let mut points = vec![Vec::new()];
                for axis in &axes {
                    points = points
                        .into_iter()
                        .flat_map(|prefix| {
                            axis.iter().map(move |&v| {
                                let mut p = prefix.clone();
                                p.push(v);
                                p
                            })
                        })
                        .collect();
                }
                let points = points.into_iter().map(Point::new).collect::<Result<_>>()?;
                PointSet::new(points, label)
            }
        }
    }
}

fn grid_axis(low: f64, high: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![low];
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                high
            } else {
                low + (high - low) * (i as f64 / last)
            }
        })
        .collect()
}

/// A discretized set: its declared form plus the point cloud.
#[derive(Clone, Debug)]
pub struct Domain {
    spec: SetSpec,
    cloud: PointSet,
}

impl Domain {
    fn new(spec: SetSpec, side: Side) -> Result<Self> {
        let cloud = spec.discretize(side.label())?;
        Ok(Domain { spec, cloud })
    }

    pub fn cloud(&self) -> &PointSet {
        &self.cloud
    }

    pub fn spec(&self) -> &SetSpec {
        &self.spec
    }

    /// Membership in the closed set itself: the box for grid sets, the cloud
    /// for explicit point sets. Exact comparisons.
    pub fn contains(&self, p: &Point) -> bool {
        match &self.spec {
            SetSpec::Points { .. } => self.cloud.contains(p),
            SetSpec::GridInterval { low, high, .. } => {
                p.dim() == low.len()
                    && p.coords()
                        .iter()
                        .zip(low.iter().zip(high))
                        .all(|(x, (l, h))| l <= x && x <= h)
            }
        }
    }

    /// Uniformly sampled point of the closed set.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> Point {
        match &self.spec {
            SetSpec::Points { .. } => {
                let pts = self.cloud.points();
                pts[rng.gen_range(0..pts.len())].clone()
            }
            SetSpec::GridInterval { low, high, .. } => {
                let coords = low
                    .iter()
                    .zip(high)
                    .map(|(&l, &h)| if l == h { l } else { rng.gen_range(l..=h) })
                    .collect();
                Point::new(coords).expect("box samples are finite")
            }
        }
    }
}

/// `x -> matrix * x + offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineMap {
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn new(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Self {
        AffineMap { matrix, offset }
    }

    /// One-dimensional `x -> slope * x + offset`.
    pub fn scalar(slope: f64, offset: f64) -> Self {
        AffineMap::new(vec![vec![slope]], vec![offset])
    }

    fn check(&self, dim: usize) -> Result<()> {
        let ok = self.offset.len() == dim
            && self.matrix.len() == dim
            && self.matrix.iter().all(|row| row.len() == dim);
        if !ok {
            return Err(Error::InstanceFormat(format!(
                "affine map is not {dim}x{dim} with a length-{dim} offset"
            )));
        }
        if self
            .matrix
            .iter()
            .flatten()
            .chain(&self.offset)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InstanceFormat("affine map has non-finite entries".into()));
        }
        Ok(())
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        let coords = self
            .matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, c)| row.iter().zip(x.coords()).map(|(m, v)| m * v).sum::<f64>() + c)
            .collect();
        Point::new(coords)
    }
}

/// Target of a table entry: a bare index into the opposite side's cloud, or
/// an explicit reference to either side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableTarget {
    Opposite(usize),
    Explicit { side: Side, index: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapDefinition {
    /// Image lists per point, in cloud order.
    Table {
        a_to_b: Vec<Vec<TableTarget>>,
        b_to_a: Vec<Vec<TableTarget>>,
    },
    /// Single-valued affine map per side. With `snap`, each image point is
    /// replaced by the nearest point of the opposite cloud.
    Affine {
        a_side: AffineMap,
        b_side: AffineMap,
        #[serde(default)]
        snap: bool,
    },
    /// Affine center plus a symmetric sample set of the given radius,
    /// clipped to the opposite set.
    AffineBall {
        a_side: AffineMap,
        b_side: AffineMap,
        radius: f64,
        samples: usize,
        #[serde(default)]
        snap: bool,
    },
}

/// Analytic reference values shipped with an instance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<Point>,
    #[serde(rename = "z_A", default, skip_serializing_if = "Option::is_none")]
    pub z_a: Option<Point>,
    #[serde(rename = "z_B", default, skip_serializing_if = "Option::is_none")]
    pub z_b: Option<Point>,
}

/// On-disk instance document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dimension: usize,
    #[serde(default = "default_metric")]
    pub metric: String,
    #[serde(rename = "A")]
    pub a: SetSpec,
    #[serde(rename = "B")]
    pub b: SetSpec,
    pub map: MapDefinition,
    pub params: ContractionParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruth>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

fn default_metric() -> String {
    "euclidean".into()
}

/// A loaded and structurally validated problem instance.
#[derive(Clone, Debug)]
pub struct Instance {
    file: InstanceFile,
    a: Domain,
    b: Domain,
    set_distance: f64,
}

impl Instance {
    pub fn from_file(file: InstanceFile) -> Result<Self> {
        if file.dimension == 0 {
            return Err(Error::InstanceFormat("dimension must be >= 1".into()));
        }
        if file.metric != "euclidean" {
            return Err(Error::InstanceFormat(format!(
                "unsupported metric {:?}; only \"euclidean\" is available",
                file.metric
            )));
        }
        file.params
            .validate()
            .map_err(|e| Error::InstanceFormat(e.to_string()))?;
        let a = Domain::new(file.a.clone(), Side::A)?;
        let b = Domain::new(file.b.clone(), Side::B)?;
        for (side, dom) in [(Side::A, &a), (Side::B, &b)] {
            if dom.cloud.dim() != file.dimension {
                return Err(Error::InstanceFormat(format!(
                    "set {side} has dimension {}, instance declares {}",
                    dom.cloud.dim(),
                    file.dimension
                )));
            }
        }
        match &file.map {
            MapDefinition::Table { a_to_b, b_to_a } => {
                for (side, rows, dom) in [(Side::A, a_to_b, &a), (Side::B, b_to_a, &b)] {
                    if rows.len() != dom.cloud.len() {
                        return Err(Error::InstanceFormat(format!(
                            "table for side {side} has {} rows, set has {} points",
                            rows.len(),
                            dom.cloud.len()
                        )));
                    }
                    for (i, row) in rows.iter().enumerate() {
                        if row.is_empty() {
                            return Err(Error::InstanceFormat(format!(
                                "table row {i} of side {side} is empty"
                            )));
                        }
                        for t in row {
                            let (tside, idx) = resolve_target(*t, side);
                            let len = if tside == Side::A { a.cloud.len() } else { b.cloud.len() };
                            if idx >= len {
                                return Err(Error::InstanceFormat(format!(
                                    "table row {i} of side {side} references {tside}[{idx}], \
                                     which has only {len} points"
                                )));
                            }
                        }
                    }
                }
            }
            MapDefinition::Affine { a_side, b_side, .. } => {
                a_side.check(file.dimension)?;
                b_side.check(file.dimension)?;
            }
            MapDefinition::AffineBall {
                a_side,
                b_side,
                radius,
                samples,
                ..
            } => {
                a_side.check(file.dimension)?;
                b_side.check(file.dimension)?;
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::InstanceFormat(format!("ball radius {radius} must be >= 0")));
                }
                if *samples == 0 {
                    return Err(Error::InstanceFormat("ball sample count must be >= 1".into()));
                }
            }
        }
        let set_distance = metric::set_distance(a.cloud(), b.cloud())?;
        Ok(Instance {
            file,
            a,
            b,
            set_distance,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::InstanceFormat(e.to_string()))?;
        Instance::from_file(file)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.file)?)
    }

    pub fn file(&self) -> &InstanceFile {
        &self.file
    }

    pub fn dim(&self) -> usize {
        self.file.dimension
    }

    pub fn domain(&self, side: Side) -> &Domain {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn map(&self) -> &MapDefinition {
        &self.file.map
    }

    pub fn params(&self) -> &ContractionParams {
        &self.file.params
    }

    pub fn constants(&self) -> Result<DerivedConstants> {
        derived_constants(&self.file.params)
    }

    pub fn omega(&self) -> Result<f64> {
        self.file.params.resolved_omega()
    }

    /// `D = dist(A, B)` over the discretized clouds.
    pub fn set_distance(&self) -> f64 {
        self.set_distance
    }

    pub fn ground_truth(&self) -> Option<&GroundTruth> {
        self.file.ground_truth.as_ref()
    }

    pub fn metadata(&self) -> &BTreeMap<String, serde_json::Value> {
        &self.file.metadata
    }

    pub fn is_table(&self) -> bool {
        matches!(self.file.map, MapDefinition::Table { .. })
    }

    /// Same instance with different contraction parameters.
    pub fn with_params(&self, params: ContractionParams) -> Result<Self> {
        params.validate()?;
        let mut next = self.clone();
        next.file.params = params;
        Ok(next)
    }

    /// Side(s) of the instance whose closed set contains `p`, A first.
    pub fn locate(&self, p: &Point) -> Option<Side> {
        [Side::A, Side::B]
            .into_iter()
            .find(|&s| self.domain(s).contains(p))
    }

    /// Every point of both clouds, tagged with its side, A first.
    pub fn domain_points(&self) -> impl Iterator<Item = SidedPoint> + '_ {
        [Side::A, Side::B].into_iter().flat_map(move |s| {
            self.domain(s)
                .cloud()
                .points()
                .iter()
                .map(move |p| SidedPoint::new(p.clone(), s))
        })
    }
}

fn resolve_target(t: TableTarget, from: Side) -> (Side, usize) {
    match t {
        TableTarget::Opposite(i) => (from.opposite(), i),
        TableTarget::Explicit { side, index } => (side, index),
    }
}

/// Symmetric offsets of the given radius: a uniform lattice on `[-r, r]` in
/// one dimension, the center plus uniformly spaced directions otherwise.
fn ball_offsets(dim: usize, radius: f64, samples: usize) -> Vec<Vec<f64>> {
    if samples == 1 {
        return vec![vec![0.0; dim]];
    }
    if dim == 1 {
        let last = (samples - 1) as f64;
        return (0..samples)
            .map(|i| vec![radius * (-1.0 + 2.0 * i as f64 / last)])
            .collect();
    }
    let mut out = vec![vec![0.0; dim]];
    let directions = samples - 1;
    if dim == 2 {
        for k in 0..directions {
            let theta = std::f64::consts::TAU * k as f64 / directions as f64;
            out.push(vec![radius * theta.cos(), radius * theta.sin()]);
        }
    } else {
        for k in 0..directions {
            let mut v = vec![0.0; dim];
            let axis = (k / 2) % dim;
            v[axis] = if k % 2 == 0 { radius } else { -radius };
            out.push(v);
        }
    }
    out
}

fn sort_dedup(points: &mut Vec<Point>) {
    points.sort_by(|p, q| p.lex_cmp(q));
    points.dedup();
}

/// The image set `Tx` of a point taken from `side`.
pub fn image(x: &Point, side: Side, inst: &Instance) -> Result<PointSet> {
    let dom = inst.domain(side);
    if !dom.contains(x) {
        return Err(Error::Domain(format!("{x} is not a point of set {side}")));
    }
    let target = inst.domain(side.opposite());
    let points = match inst.map() {
        MapDefinition::Table { a_to_b, b_to_a } => {
            let idx = dom.cloud().index_of(x).ok_or_else(|| {
                Error::Domain(format!("{x} is not a tabulated point of set {side}"))
            })?;
            let row = match side {
                Side::A => &a_to_b[idx],
                Side::B => &b_to_a[idx],
            };
            row.iter()
                .map(|&t| {
                    let (s, i) = resolve_target(t, side);
                    inst.domain(s).cloud().points()[i].clone()
                })
                .collect()
        }
        MapDefinition::Affine {
            a_side,
            b_side,
            snap,
        } => {
            let f = if side == Side::A { a_side } else { b_side };
            let y = f.apply(x)?;
            let y = if *snap { target.cloud().nearest(&y)?.clone() } else { y };
            vec![y]
        }
        MapDefinition::AffineBall {
            a_side,
            b_side,
            radius,
            samples,
            snap,
        } => {
            let f = if side == Side::A { a_side } else { b_side };
            let center = f.apply(x)?;
            let mut pts = Vec::with_capacity(*samples);
            for off in ball_offsets(inst.dim(), *radius, *samples) {
                let p = Point::new(
                    center
                        .coords()
                        .iter()
                        .zip(&off)
                        .map(|(c, o)| c + o)
                        .collect(),
                )?;
                if target.contains(&p) {
                    pts.push(if *snap { target.cloud().nearest(&p)?.clone() } else { p });
                }
            }
            sort_dedup(&mut pts);
            pts
        }
    };
    if points.is_empty() {
        return Err(Error::InstanceFormat(format!(
            "image of {x} (side {side}) is empty after clipping"
        )));
    }
    PointSet::new(points, SetLabel::Image)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyclicViolation {
    pub point: Point,
    pub side: Side,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyclicityReport {
    pub points_checked: usize,
    pub violations: Vec<CyclicViolation>,
}

impl CyclicityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `T(A) ⊆ B` and `T(B) ⊆ A` on every domain point.
pub fn validate_cyclic(inst: &Instance) -> CyclicityReport {
    let mut report = CyclicityReport {
        points_checked: 0,
        violations: Vec::new(),
    };
    for sp in inst.domain_points() {
        report.points_checked += 1;
        let target = inst.domain(sp.side.opposite());
        match image(&sp.point, sp.side, inst) {
            Ok(img) => {
                let outside: Vec<String> = img
                    .points()
                    .iter()
                    .filter(|q| !target.contains(q))
                    .map(|q| q.to_string())
                    .collect();
                if !outside.is_empty() {
                    report.violations.push(CyclicViolation {
                        point: sp.point.clone(),
                        side: sp.side,
                        reason: format!(
                            "image points {} are not in set {}",
                            outside.join(", "),
                            sp.side.opposite()
                        ),
                    });
                }
            }
            Err(e) => report.violations.push(CyclicViolation {
                point: sp.point.clone(),
                side: sp.side,
                reason: e.to_string(),
            }),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[f64]) -> Vec<Point> {
        v.iter().map(|&x| Point::scalar(x).unwrap()).collect()
    }

    fn table_instance(a_to_b: Vec<Vec<TableTarget>>) -> Instance {
        Instance::from_file(InstanceFile {
            dimension: 1,
            metric: "euclidean".into(),
            a: SetSpec::Points { points: pts(&[1.0, 2.0]) },
            b: SetSpec::Points { points: pts(&[-1.0, -2.0, -3.0]) },
            map: MapDefinition::Table {
                a_to_b,
                b_to_a: vec![
                    vec![TableTarget::Opposite(0)],
                    vec![TableTarget::Opposite(0)],
                    vec![TableTarget::Opposite(1)],
                ],
            },
            params: ContractionParams::new(0.5, 0.0, 0.0, None).unwrap(),
            ground_truth: None,
            metadata: BTreeMap::new(),
        })
        .unwrap()
    }

    fn affine_instance(res: usize, radius: Option<(f64, usize)>) -> Instance {
        let a_side = AffineMap::scalar(-0.5, -0.5);
        let b_side = AffineMap::scalar(-0.5, 0.5);
        let map = match radius {
            None => MapDefinition::Affine {
                a_side,
                b_side,
                snap: false,
            },
            Some((radius, samples)) => MapDefinition::AffineBall {
                a_side,
                b_side,
                radius,
                samples,
                snap: false,
            },
        };
        Instance::from_file(InstanceFile {
            dimension: 1,
            metric: "euclidean".into(),
            a: SetSpec::GridInterval {
                low: vec![1.0],
                high: vec![2.0],
                points_per_axis: res,
            },
            b: SetSpec::GridInterval {
                low: vec![-2.0],
                high: vec![-1.0],
                points_per_axis: res,
            },
            map,
            params: ContractionParams::new(0.5, 0.0, 0.0, None).unwrap(),
            ground_truth: None,
            metadata: BTreeMap::new(),
        })
        .unwrap()
    }

    #[test]
    fn grid_includes_endpoints_in_order() {
        let spec = SetSpec::GridInterval {
            low: vec![0.0, 10.0],
            high: vec![1.0, 11.0],
            points_per_axis: 3,
        };
        let cloud = spec.discretize(SetLabel::A).unwrap();
        assert_eq!(cloud.len(), 9);
        assert_eq!(cloud.points()[0].coords(), &[0.0, 10.0]);
        assert_eq!(cloud.points()[1].coords(), &[0.0, 10.5]);
        assert_eq!(cloud.points()[8].coords(), &[1.0, 11.0]);
    }

    #[test]
    fn affine_image_matches_formula() {
        let inst = affine_instance(11, None);
        let img = image(&Point::scalar(2.0).unwrap(), Side::A, &inst).unwrap();
        assert_eq!(img.points(), pts(&[-1.5]).as_slice());
        for x in inst.domain(Side::A).cloud().points() {
            let img = image(x, Side::A, &inst).unwrap();
            let v = x.coords()[0];
            assert_eq!(img.points()[0].coords()[0], -(1.0 + (v - 1.0) / 2.0));
        }
    }

    #[test]
    fn table_image_lookup() {
        let inst = table_instance(vec![
            vec![TableTarget::Opposite(1), TableTarget::Opposite(2)],
            vec![TableTarget::Opposite(0)],
        ]);
        let img = image(&Point::scalar(1.0).unwrap(), Side::A, &inst).unwrap();
        assert_eq!(img.points(), pts(&[-2.0, -3.0]).as_slice());
        assert!(validate_cyclic(&inst).is_valid());
    }

    #[test]
    fn image_rejects_points_outside_domain() {
        let inst = table_instance(vec![vec![TableTarget::Opposite(0)]; 2]);
        assert!(matches!(
            image(&Point::scalar(1.5).unwrap(), Side::A, &inst),
            Err(Error::Domain(_))
        ));
        let inst = affine_instance(5, None);
        assert!(matches!(
            image(&Point::scalar(0.0).unwrap(), Side::A, &inst),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn misdirected_table_entry_is_reported() {
        let inst = table_instance(vec![
            vec![TableTarget::Explicit {
                side: Side::A,
                index: 1,
            }],
            vec![TableTarget::Opposite(0)],
        ]);
        let report = validate_cyclic(&inst);
        assert_eq!(report.points_checked, 5);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].point, Point::scalar(1.0).unwrap());
        assert_eq!(report.violations[0].side, Side::A);
    }

    #[test]
    fn table_indices_checked_at_load() {
        let file = table_instance(vec![vec![TableTarget::Opposite(0)]; 2]).file().clone();
        let mut bad = file.clone();
        bad.map = MapDefinition::Table {
            a_to_b: vec![vec![TableTarget::Opposite(7)], vec![TableTarget::Opposite(0)]],
            b_to_a: vec![vec![TableTarget::Opposite(0)]; 3],
        };
        assert!(matches!(Instance::from_file(bad), Err(Error::InstanceFormat(_))));
        let mut empty_row = file;
        empty_row.map = MapDefinition::Table {
            a_to_b: vec![vec![], vec![TableTarget::Opposite(0)]],
            b_to_a: vec![vec![TableTarget::Opposite(0)]; 3],
        };
        assert!(Instance::from_file(empty_row).is_err());
    }

    #[test]
    fn ball_image_is_clipped_and_sorted() {
        let inst = affine_instance(11, Some((0.05, 3)));
        let img = image(&Point::scalar(2.0).unwrap(), Side::A, &inst).unwrap();
        assert_eq!(img.points(), pts(&[-1.55, -1.5, -1.45]).as_slice());
        // center -1 is the right end of B, so -0.95 falls outside and is clipped
        let img = image(&Point::scalar(1.0).unwrap(), Side::A, &inst).unwrap();
        assert_eq!(img.points(), pts(&[-1.05, -1.0]).as_slice());
        assert!(validate_cyclic(&inst).is_valid());
    }

    #[test]
    fn ball_image_can_be_emptied() {
        let inst = affine_instance(3, Some((0.6, 2)));
        let err = image(&Point::scalar(2.0).unwrap(), Side::A, &inst).unwrap_err();
        assert!(matches!(err, Error::InstanceFormat(_)));
        assert!(!validate_cyclic(&inst).is_valid());
    }

    #[test]
    fn ball_offsets_are_symmetric() {
        for dim in 1..=3 {
            for samples in [1, 3, 5, 7] {
                let offs = ball_offsets(dim, 0.1, samples);
                assert_eq!(offs.len(), samples);
                for o in &offs {
                    let norm: f64 = o.iter().map(|v| v * v).sum::<f64>().sqrt();
                    assert!(norm <= 0.1 + 1e-15);
                }
                let sum: Vec<f64> = (0..dim)
                    .map(|i| offs.iter().map(|o| o[i]).sum::<f64>())
                    .collect();
                assert!(sum.iter().all(|s| s.abs() < 1e-12), "dim {dim} samples {samples}");
            }
        }
    }

    #[test]
    fn instance_json_rejects_unknown_fields() {
        let inst = affine_instance(3, None);
        let text = inst.to_json().unwrap();
        assert!(Instance::from_json(&text).is_ok());
        let bad = text.replacen("\"dimension\"", "\"Omega\": 1, \"dimension\"", 1);
        assert!(matches!(Instance::from_json(&bad), Err(Error::InstanceFormat(_))));
        let bad = text.replacen("\"points_per_axis\"", "\"resolution\": 2, \"points_per_axis\"", 1);
        assert!(Instance::from_json(&bad).is_err());
    }

    #[test]
    fn instance_rejects_dimension_mismatch_and_metric() {
        let mut file = affine_instance(3, None).file().clone();
        file.dimension = 2;
        assert!(matches!(Instance::from_file(file.clone()), Err(Error::InstanceFormat(_))));
        file.dimension = 1;
        file.metric = "discrete".into();
        assert!(Instance::from_file(file).is_err());
    }

    #[test]
    fn locate_prefers_a() {
        let inst = affine_instance(3, None);
        assert_eq!(inst.locate(&Point::scalar(1.3).unwrap()), Some(Side::A));
        assert_eq!(inst.locate(&Point::scalar(-1.3).unwrap()), Some(Side::B));
        assert_eq!(inst.locate(&Point::scalar(0.0).unwrap()), None);
        assert_eq!(inst.set_distance(), 2.0);
    }
}
