use std::sync::OnceLock;

use epw_core::correspondences::{threefold_cycle_check, z_fiber, CURVE_TABLE};
use epw_core::fibers::{splitting_section, Exclusion, Rationality};
use epw_core::field::PrimeField;
use epw_core::fixtures::{threefold_data, threefold_fixture, FixtureOptions, ThreefoldFixture};
use epw_core::Error;

fn fixture() -> &'static ThreefoldFixture<PrimeField> {
    static FX: OnceLock<ThreefoldFixture<PrimeField>> = OnceLock::new();
    FX.get_or_init(|| threefold_fixture(&PrimeField::new(5).unwrap(), 0, &FixtureOptions::default()).unwrap())
}

#[test]
fn excluded_points_are_rejected() {
    let fx = fixture();
    assert!(fx.boundary.len() >= 10);
    let meets: Vec<_> = fx
        .excluded
        .iter()
        .filter(|(_, e)| *e == Exclusion::LineMeetsBase)
        .collect();
    assert!(!meets.is_empty(), "fixture should contain a line meeting L0");
    for (v, e) in &fx.excluded {
        let err = splitting_section(&fx.gm, &fx.l0, &fx.base_point, v).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)), "{e}: {err}");
        assert!(threefold_cycle_check(&fx.gm, &fx.l0, &fx.base_point, v).is_err());
    }
}

#[test]
fn boundary_points_pass() {
    let fx = fixture();
    for v in &fx.boundary {
        let s = splitting_section(&fx.gm, &fx.l0, &fx.base_point, v).unwrap();
        assert_eq!(s.dim(), 5);
        let r = threefold_cycle_check(&fx.gm, &fx.l0, &fx.base_point, v).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.scroll_table[..5], [1, 5, 12, 22, 35]);
        assert_eq!(r.meet_table[1..], [2, 2, 2, 2]);
    }
}

#[test]
fn data_from_a_given_variety_matches_the_search() {
    let fx = fixture();
    let again = threefold_data(&fx.gm, Some(&fx.base_point), 8).unwrap();
    assert_eq!(again.l0, fx.l0);
    assert_eq!(again.boundary, fx.boundary);
    let other = [1u64, 0, 0, 0, 0, 0];
    assert!(threefold_data(&fx.gm, Some(&other), 8).is_err());
}

#[test]
fn curve_fibers_over_both_kinds_of_points() {
    let fx = fixture();
    let mut seen = Vec::new();
    for v in fx.off_hyperplane.iter().take(6) {
        for sheet in 0..2 {
            let z = z_fiber(&fx.gm, &fx.l0, v, sheet).unwrap();
            assert_eq!(z.table, CURVE_TABLE);
            assert!(z.contains_base);
            seen.push(z.rationality);
        }
    }
    assert!(seen.contains(&Rationality::Split) || seen.contains(&Rationality::Inert));
    assert!(z_fiber(&fx.gm, &fx.l0, &fx.off_hyperplane[0], 2).is_err());
}
