//! The inequality batch on the remaining builtin warps (the acceptance
//! suite covers cigar and the two Bryant models): flat warps in two and
//! three dimensions, exactly admissible, and the round-sphere warp, whose
//! Q sits on the boundary K = 1 to rounding.

use isolab_core::experiments::check_inequality;
use isolab_core::warp::WarpModel;

#[test]
fn flat_models_have_no_violations() {
    for model in [
        WarpModel::euclidean(2).unwrap(),
        WarpModel::euclidean(3).unwrap(),
    ] {
        let cond = model.check_condition(1.0, 2048).unwrap();
        assert!(cond.admissible);
        let rep = check_inequality(&model, 100, 1e-9, 0, 8, 0.1).unwrap();
        assert_eq!(
            rep.violations,
            0,
            "n={} min deficit {:.3e}",
            model.n(),
            rep.min_deficit
        );
        assert!(rep.min_deficit >= -1e-9);
    }
}

#[test]
fn sphere_warp_has_no_violations() {
    // boundary case Q = 1: the inequality still holds; strict rigidity
    // does not (off-center geodesic balls), so equality cases are not
    // constrained to level sets here.
    let model = WarpModel::sphere_warp(3).unwrap();
    let rep = check_inequality(&model, 100, 1e-9, 0, 8, 0.1).unwrap();
    assert_eq!(rep.violations, 0, "min deficit {:.3e}", rep.min_deficit);
}
