//! Instance families with known answers.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::certifier::{certify, SamplingPlan};
use crate::error::{Error, Result};
use crate::mapping::{
    validate_cyclic, AffineMap, GroundTruth, Instance, InstanceFile, MapDefinition, SetSpec,
    TableTarget,
};
use crate::metric::Point;
use crate::params::ContractionParams;

pub const DEFAULT_RESOLUTION: usize = 101;

/// Omega scan for the multivalued family: `OMEGA_SCAN_START + j * OMEGA_SCAN_STEP`
/// for `j = 0..=OMEGA_SCAN_STEPS`.
pub const OMEGA_SCAN_START: f64 = 0.5;
pub const OMEGA_SCAN_STEP: f64 = 0.005;
pub const OMEGA_SCAN_STEPS: usize = 300;

fn interval(low: f64, high: f64, resolution: usize) -> SetSpec {
    SetSpec::GridInterval {
        low: vec![low],
        high: vec![high],
        points_per_axis: resolution,
    }
}

fn scalar_point(x: f64) -> Point {
    Point::scalar(x).expect("finite literal")
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::Parameter(format!("resolution {resolution} must be >= 2")));
    }
    Ok(())
}

fn midpoint_file(resolution: usize, map: MapDefinition, params: ContractionParams) -> InstanceFile {
    InstanceFile {
        dimension: 1,
        metric: "euclidean".into(),
        a: interval(1.0, 2.0, resolution),
        b: interval(-2.0, -1.0, resolution),
        map,
        params,
        ground_truth: Some(GroundTruth {
            d: Some(2.0),
            fixed_point: None,
            z_a: Some(scalar_point(1.0)),
            z_b: Some(scalar_point(-1.0)),
        }),
        metadata: BTreeMap::new(),
    }
}

/// `A = [1, 2]`, `B = [-2, -1]`, `Tx = -(1 + (x - 1) / 2)` on A and
/// `Tx = 1 + (-x - 1) / 2` on B. Best proximity pair `(1, -1)`, `D = 2`.
pub fn make_midpoint_cyclic(resolution: usize) -> Result<Instance> {
    check_resolution(resolution)?;
    let map = MapDefinition::Affine {
        a_side: AffineMap::scalar(-0.5, -0.5),
        b_side: AffineMap::scalar(-0.5, 0.5),
        snap: false,
    };
    let params = ContractionParams::new(0.5, 0.0, 0.0, Some(0.5))?;
    let mut file = midpoint_file(resolution, map, params);
    file.metadata.insert("family".into(), json!("midpoint"));
    Instance::from_file(file)
}

/// `A = [0, 1]`, `B = [-1, 0]`, `Tx = -k x`. Fixed point 0.
pub fn make_intersecting(k: f64, resolution: usize) -> Result<Instance> {
    check_resolution(resolution)?;
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Parameter(format!("contraction factor {k} is not in (0, 1)")));
    }
    let f = AffineMap::scalar(-k, 0.0);
    let file = InstanceFile {
        dimension: 1,
        metric: "euclidean".into(),
        a: interval(0.0, 1.0, resolution),
        b: interval(-1.0, 0.0, resolution),
        map: MapDefinition::Affine {
            a_side: f.clone(),
            b_side: f,
            snap: false,
        },
        params: ContractionParams::new(k, 0.0, 0.0, None)?,
        ground_truth: Some(GroundTruth {
            d: Some(0.0),
            fixed_point: Some(scalar_point(0.0)),
            z_a: None,
            z_b: None,
        }),
        metadata: BTreeMap::from([("family".into(), json!("intersecting"))]),
    };
    Instance::from_file(file)
}

/// The midpoint map with every image replaced by `samples` points spread
/// symmetrically over `[c - eps, c + eps]` and clipped to the opposite set.
///
/// `K = 0.5`, and omega is the first value of the documented scan for which
/// the default certification passes; the scan is recorded in the metadata.
pub fn make_multivalued_ball(eps: f64, samples: usize, resolution: usize) -> Result<Instance> {
    check_resolution(resolution)?;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::Parameter(format!("ball radius {eps} must be >= 0")));
    }
    if samples == 0 {
        return Err(Error::Parameter("sample count must be >= 1".into()));
    }
    let map = MapDefinition::AffineBall {
        a_side: AffineMap::scalar(-0.5, -0.5),
        b_side: AffineMap::scalar(-0.5, 0.5),
        radius: eps,
        samples,
        snap: false,
    };
    let base = ContractionParams::new(0.5, 0.0, 0.0, Some(OMEGA_SCAN_START))?;
    let mut inst = Instance::from_file(midpoint_file(resolution, map, base))?;
    let report = validate_cyclic(&inst);
    if !report.is_valid() {
        return Err(Error::Parameter(format!(
            "radius {eps} is too large: {}",
            report.violations[0].reason
        )));
    }

    let plan = SamplingPlan::default();
    let mut found = None;
    for j in 0..=OMEGA_SCAN_STEPS {
        let omega = OMEGA_SCAN_START + j as f64 * OMEGA_SCAN_STEP;
        let candidate = inst.with_params(ContractionParams::new(0.5, 0.0, 0.0, Some(omega))?)?;
        if certify(&candidate, &plan)?.certified {
            found = Some((j, omega));
            inst = candidate;
            break;
        }
    }
    let (j, omega) = found.ok_or_else(|| {
        Error::Parameter(format!(
            "no omega in the scan certifies radius {eps} with {samples} samples"
        ))
    })?;
    let mut file = inst.file().clone();
    file.metadata.insert("family".into(), json!("multivalued_ball"));
    file.metadata.insert("omega".into(), json!(omega));
    file.metadata.insert(
        "omega_scan".into(),
        json!({
            "start": OMEGA_SCAN_START,
            "step": OMEGA_SCAN_STEP,
            "max_steps": OMEGA_SCAN_STEPS,
            "steps_taken": j,
            "plan": { "random_pairs": plan.random_pairs, "seed": plan.seed },
        }),
    );
    Instance::from_file(file)
}

/// `Tx = -x` between `[1, 2]` and `[-2, -1]`: cyclic, isometric, and not
/// contractive for `K = 0.5`, `omega = 0.5`.
pub fn make_expansive_counterexample() -> Result<Instance> {
    let f = AffineMap::scalar(-1.0, 0.0);
    let mut file = midpoint_file(
        DEFAULT_RESOLUTION,
        MapDefinition::Affine {
            a_side: f.clone(),
            b_side: f,
            snap: false,
        },
        ContractionParams::new(0.5, 0.0, 0.0, Some(0.5))?,
    );
    file.ground_truth = Some(GroundTruth {
        d: Some(2.0),
        ..GroundTruth::default()
    });
    file.metadata.insert("family".into(), json!("expansive"));
    Instance::from_file(file)
}

/// Random planar clouds with a random cyclic table map (one to three targets
/// per point). Deterministic in `seed`; no certification promise.
pub fn make_finite_random(seed: u64, size_a: usize, size_b: usize) -> Result<Instance> {
    if size_a == 0 || size_b == 0 {
        return Err(Error::Parameter("set sizes must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cloud = |n: usize, x0: f64, rng: &mut ChaCha8Rng| -> Vec<Point> {
        (0..n)
            .map(|_| {
                Point::new(vec![x0 + rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
                    .expect("finite")
            })
            .collect()
    };
    let a = cloud(size_a, 0.0, &mut rng);
    let b = cloud(size_b, 1.5, &mut rng);
    let rows = |from: usize, to: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<TableTarget>> {
        (0..from)
            .map(|_| {
                let k = rng.gen_range(1..=to.min(3));
                sample(rng, to, k)
                    .into_iter()
                    .map(TableTarget::Opposite)
                    .collect()
            })
            .collect()
    };
    let a_to_b = rows(size_a, size_b, &mut rng);
    let b_to_a = rows(size_b, size_a, &mut rng);
    let file = InstanceFile {
        dimension: 2,
        metric: "euclidean".into(),
        a: SetSpec::Points { points: a },
        b: SetSpec::Points { points: b },
        map: MapDefinition::Table { a_to_b, b_to_a },
        params: ContractionParams::new(0.5, 0.1, 0.2, None)?,
        ground_truth: None,
        metadata: BTreeMap::from([
            ("family".into(), json!("finite_random")),
            ("seed".into(), json!(seed)),
        ]),
    };
    Instance::from_file(file)
}
