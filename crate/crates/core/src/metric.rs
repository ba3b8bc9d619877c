//! Euclidean metric primitives over finite point sets.
//!
//! Closed sets are represented by finite point clouds, so every infimum and
//! supremum in the set distance and the Hausdorff metric is an attained
//! minimum or maximum and is computed by brute force. Comparisons here are
//! exact; tolerances belong to the convergence and verification layers.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the ambient Euclidean space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InstanceFormat("point has no coordinates".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InstanceFormat(format!(
                "point coordinate {c} is not finite"
            )));
        }
        Ok(Point(coords))
    }

    /// One-dimensional convenience constructor.
    pub fn scalar(x: f64) -> Result<Self> {
        Point::new(vec![x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total lexicographic order on coordinates, used for tie-breaking and
    /// for sorting witness lists.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Which role a point set plays in an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SetLabel {
    A,
    B,
    Image,
}

/// A finite, nonempty set of points of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
    label: SetLabel,
}

impl PointSet {
    pub fn new(points: Vec<Point>, label: SetLabel) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InstanceFormat(format!("point set {label:?} is empty")))?;
        let dim = first.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::InstanceFormat(format!(
                "point set {label:?} mixes dimensions {dim} and {}",
                p.dim()
            )));
        }
        Ok(PointSet { points, label })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn label(&self) -> SetLabel {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact (bitwise coordinate) membership.
    pub fn contains(&self, p: &Point) -> bool {
        self.points.iter().any(|q| q == p)
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    /// The point of the set nearest to `p`, ties broken lexicographically.
    pub fn nearest(&self, p: &Point) -> Result<&Point> {
        let mut best: Option<(f64, &Point)> = None;
        for q in &self.points {
            let d = distance(p, q)?;
            best = match best {
                Some((bd, bq)) if d > bd || (d == bd && q.lex_cmp(bq) != Ordering::Less) => {
                    Some((bd, bq))
                }
                _ => Some((d, q)),
            };
        }
        Ok(best.expect("point sets are nonempty").1)
    }
}

fn check_dims(p: &Point, q: &Point) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::InstanceFormat(format!(
            "dimension mismatch: {} vs {}",
            p.dim(),
            q.dim()
        )));
    }
    Ok(())
}

/// Euclidean distance.
pub fn distance(p: &Point, q: &Point) -> Result<f64> {
    check_dims(p, q)?;
    let sq: f64 = p
        .coords()
        .iter()
        .zip(q.coords())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sq.sqrt())
}

/// `d(p, S) = min_{s in S} d(p, s)`.
pub fn point_to_set_distance(p: &Point, set: &PointSet) -> Result<f64> {
    let mut best = f64::INFINITY;
    for q in set.points() {
        best = best.min(distance(p, q)?);
    }
    Ok(best)
}

/// `sup_{a in A} d(a, B)`, one half of the Hausdorff metric.
pub fn directed_hausdorff(a: &PointSet, b: &PointSet) -> Result<f64> {
    let mut worst = 0.0_f64;
    for p in a.points() {
        worst = worst.max(point_to_set_distance(p, b)?);
    }
    Ok(worst)
}

/// `dist(A, B)`: the smallest pairwise distance between the two sets.
pub fn set_distance(a: &PointSet, b: &PointSet) -> Result<f64> {
    let mut best = f64::INFINITY;
    for p in a.points() {
        best = best.min(point_to_set_distance(p, b)?);
    }
    Ok(best)
}

/// Hausdorff distance between two finite sets.
pub fn hausdorff(a: &PointSet, b: &PointSet) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(coords: &[&[f64]]) -> PointSet {
        PointSet::new(
            coords.iter().map(|c| Point::new(c.to_vec()).unwrap()).collect(),
            SetLabel::A,
        )
        .unwrap()
    }

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&pt(&[0.0, 0.0]), &pt(&[3.0, 4.0])).unwrap(), 5.0);
        assert_eq!(distance(&pt(&[1.5, -2.0]), &pt(&[1.5, -2.0])).unwrap(), 0.0);
        assert_eq!(distance(&pt(&[1.0]), &pt(&[-1.5])).unwrap(), 2.5);
    }

    #[test]
    fn distance_rejects_dimension_mismatch() {
        let err = distance(&pt(&[1.0]), &pt(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(err, Error::InstanceFormat(_)));
    }

    #[test]
    fn point_rejects_bad_coordinates() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![f64::NAN]).is_err());
        assert!(Point::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn point_set_rejects_empty_and_mixed() {
        assert!(matches!(
            PointSet::new(vec![], SetLabel::B),
            Err(Error::InstanceFormat(_))
        ));
        assert!(PointSet::new(vec![pt(&[0.0]), pt(&[0.0, 1.0])], SetLabel::A).is_err());
    }

    #[test]
    fn point_to_set_examples() {
        assert_eq!(
            point_to_set_distance(&pt(&[0.0]), &set(&[&[1.0], &[3.0]])).unwrap(),
            1.0
        );
        assert_eq!(
            point_to_set_distance(&pt(&[3.0]), &set(&[&[1.0], &[3.0]])).unwrap(),
            0.0
        );
        assert_eq!(
            point_to_set_distance(&pt(&[0.0, 0.0]), &set(&[&[0.0, 2.0]])).unwrap(),
            2.0
        );
    }

    #[test]
    fn set_distance_examples() {
        let a = set(&[&[1.0], &[2.0]]);
        let b = set(&[&[-2.0], &[-1.0]]);
        assert_eq!(set_distance(&a, &b).unwrap(), 2.0);
        assert_eq!(set_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(
            set_distance(&set(&[&[0.0, 0.0]]), &set(&[&[3.0, 4.0]])).unwrap(),
            5.0
        );
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(
            hausdorff(&set(&[&[0.0]]), &set(&[&[1.0], &[3.0]])).unwrap(),
            3.0
        );
        let a = set(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        let h = hausdorff(&a, &set(&[&[0.0, 2.0]])).unwrap();
        assert_eq!(h, 5.0_f64.sqrt());
        assert!((h - 2.2360680).abs() < 1e-7);
    }

    #[test]
    fn nearest_breaks_ties_lexicographically() {
        let s = set(&[&[1.0], &[-1.0]]);
        assert_eq!(s.nearest(&pt(&[0.0])).unwrap(), &pt(&[-1.0]));
        let s = set(&[&[-1.0], &[1.0]]);
        assert_eq!(s.nearest(&pt(&[0.0])).unwrap(), &pt(&[-1.0]));
        assert_eq!(s.nearest(&pt(&[0.9])).unwrap(), &pt(&[1.0]));
    }

    #[test]
    fn point_serde_round_trip_and_validation() {
        let p: Point = serde_json::from_str("[1.0, -2.5]").unwrap();
        assert_eq!(p.coords(), &[1.0, -2.5]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.0,-2.5]");
        assert!(serde_json::from_str::<Point>("[]").is_err());
    }
}
