//! Region predicates, derived constants and the bound functions.

use proptest::prelude::*;
use proxcycle::params::{
    classify_region, derived_constants, m1, m2, m_value, phi, raw_region_membership,
    region_audit, DistanceBundle,
};
use proxcycle::{ContractionParams, Error, RegionLabel};

fn params(k: f64, a: f64, b: f64) -> ContractionParams {
    ContractionParams::new(k, a, b, None).unwrap()
}

/// Region memberships written out directly from the inequalities.
fn oracle_raw(a: f64, b: f64) -> Vec<RegionLabel> {
    let mut out = Vec::new();
    if a <= b && a * (1.0 + a) + b < 1.0 {
        out.push(RegionLabel::Delta1);
    }
    if a >= b && b * (1.0 + b) + a < 1.0 {
        out.push(RegionLabel::Delta2);
    }
    let edge = 1.0 - a * (1.0 + a);
    if a > 0.0 && a < 0.5 && b < (1.0 - a) / 2.0 && b >= edge {
        out.push(RegionLabel::Delta3);
    }
    if a <= 0.5 && b >= (1.0 - a) / 2.0 && b < edge && a * (1.0 + a) + b * (2.0 - b) < 1.0 {
        out.push(RegionLabel::Delta4);
    }
    out
}

#[test]
fn audit_matches_integer_count() {
    for n in [10usize, 37, 100] {
        let audit = region_audit(n).unwrap();
        let expected = (0..n).flat_map(|i| (0..n).map(move |j| i + j)).filter(|s| *s < n).count();
        assert_eq!(audit.in_delta, expected, "grid {n}");
        assert_eq!(audit.delta3, 0);
        assert_eq!(audit.delta4_only, 0);
    }
}

#[test]
fn spot_values() {
    assert_eq!(classify_region(0.3, 0.2), RegionLabel::Delta2);
    assert_eq!(classify_region(0.7, 0.25), RegionLabel::DeltaOnly);
    assert!(raw_region_membership(0.7, 0.25).unwrap().is_empty());
    assert!(matches!(raw_region_membership(0.6, 0.4), Err(Error::Domain(_))));

    let c = derived_constants(&params(0.9, 0.0, 0.0)).unwrap();
    assert_eq!((c.k1, c.k2), (0.9, 1.0));
    assert!((c.omega_star - 0.1).abs() < 1e-15);
    let c = derived_constants(&params(0.0, 0.0, 0.0)).unwrap();
    assert_eq!((c.k1, c.k2, c.omega_star), (0.0, 1.0, 1.0));

    let b = DistanceBundle::new(3.5, 3.5, 2.75, 0.75, 0.0);
    assert_eq!(m1(&b, 0.5), 1.75);
    assert_eq!(m_value(&b, &params(0.5, 0.0, 0.0)), 1.75);
    let b = DistanceBundle::new(1.0, 2.0, 4.0, 0.0, 0.0);
    assert!((m2(&b, 0.2, 0.3) - 1.6).abs() < 1e-15);
}

#[test]
fn phi_branches_when_m2_dominates() {
    let b = DistanceBundle::new(1.0, 1.0, 1.0, 0.0, 0.0);
    let p = params(0.1, 0.1, 0.2);
    assert_eq!(phi(&b, &p, RegionLabel::Delta1).unwrap(), 1.0);
    assert_eq!(phi(&b, &p, RegionLabel::Delta3).unwrap(), 0.8);
    assert!((phi(&b, &p, RegionLabel::Delta4).unwrap() - 0.8 / 0.9).abs() < 1e-15);
    assert!(matches!(
        phi(&b, &params(0.1, 0.7, 0.25), RegionLabel::DeltaOnly),
        Err(Error::ParamsUnsupported(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn raw_membership_matches_oracle(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        prop_assume!(a + b < 1.0);
        prop_assert_eq!(raw_region_membership(a, b).unwrap(), oracle_raw(a, b));
    }

    #[test]
    fn classification_is_total_with_precedence(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let label = classify_region(a, b);
        match raw_region_membership(a, b) {
            Err(_) => prop_assert_eq!(label, RegionLabel::Outside),
            Ok(raw) if raw.is_empty() => prop_assert_eq!(label, RegionLabel::DeltaOnly),
            Ok(raw) => prop_assert_eq!(label, raw[0]),
        }
    }

    #[test]
    fn delta3_empty_and_delta4_covered(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        prop_assume!(a + b < 1.0);
        let raw = raw_region_membership(a, b).unwrap();
        prop_assert!(!raw.contains(&RegionLabel::Delta3));
        if raw.contains(&RegionLabel::Delta4) {
            prop_assert!(raw.contains(&RegionLabel::Delta1) || raw.contains(&RegionLabel::Delta2));
        }
    }

    #[test]
    fn constants_follow_formula(k in 0.0f64..0.999, a in 0.0f64..1.0, t in 0.0f64..0.999) {
        let b = (1.0 - a) * t;
        prop_assume!(a + b < 1.0);
        let c = derived_constants(&params(k, a, b)).unwrap();
        let k1 = k.max(b / (1.0 - a)).max(a / (1.0 - b));
        let k2 = (1.0 / (1.0 - a)).max(1.0 / (1.0 - b));
        prop_assert_eq!(c.k1, k1);
        prop_assert_eq!(c.k2, k2);
        prop_assert_eq!(c.omega_star, (1.0 - k1) / k2);
    }

    #[test]
    fn m_is_max_of_parts(
        d in proptest::array::uniform5(0.0f64..10.0),
        k in 0.0f64..0.999,
        a in 0.0f64..0.5,
        b in 0.0f64..0.5,
    ) {
        let bundle = DistanceBundle::new(d[0], d[1], d[2], d[3], d[4]);
        let p = params(k, a, b);
        let m = m_value(&bundle, &p);
        prop_assert_eq!(m, m1(&bundle, k).max(m2(&bundle, a, b)));
        prop_assert!(m >= 0.0);
    }
}
