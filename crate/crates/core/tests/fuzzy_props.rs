mod common;

use fuzzmap::fuzzy::{default_system, parse_fcl, DEFAULT_FCL};
use proptest::prelude::*;

fn grid(step: f64) -> impl Iterator<Item = f64> {
    let count = (1.0 / step).round() as usize;
    (0..=count).map(move |i| i as f64 / count as f64)
}

#[test]
fn matches_high_resolution_integration() {
    let sys = default_system();
    for x in [0.1, 0.25, 0.75] {
        let expected = common::default_centroid(x, 1_000_000);
        let got = sys.evaluate(x).unwrap();
        assert!((got - expected).abs() < 1e-4, "x={x}: {got} vs {expected}");
    }
}

#[test]
fn monotone_and_symmetric_on_grid() {
    let sys = default_system();
    let values: Vec<f64> = grid(0.001).map(|x| sys.evaluate(x).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
    for (i, x) in grid(0.001).enumerate() {
        let mirrored = values[values.len() - 1 - i];
        assert!((values[i] + mirrored - 1.0).abs() < 1e-6, "x={x}");
    }
}

#[test]
fn doubling_resolution_barely_moves_output() {
    let coarse = default_system();
    let fine = default_system().with_resolution(2 * coarse.resolution() - 1).unwrap();
    for x in grid(0.01) {
        let delta = (coarse.evaluate(x).unwrap() - fine.evaluate(x).unwrap()).abs();
        assert!(delta < 1e-3, "x={x}: {delta}");
    }
}

#[test]
fn serialized_default_reevaluates_identically() {
    let sys = default_system();
    let reparsed = parse_fcl(&sys.to_fcl()).unwrap();
    let shipped = parse_fcl(DEFAULT_FCL).unwrap();
    for x in grid(0.001) {
        let a = sys.evaluate(x).unwrap();
        assert!((a - reparsed.evaluate(x).unwrap()).abs() <= 1e-9);
        assert!((a - shipped.evaluate(x).unwrap()).abs() <= 1e-9);
    }
}

proptest! {
    #[test]
    fn output_in_unit_interval(x in 0.0f64..=1.0) {
        let y = default_system().evaluate(x).unwrap();
        prop_assert!((0.0..=1.0).contains(&y));
    }

    #[test]
    fn custom_system_round_trips(
        a in 0.05f64..0.45,
        b in 0.55f64..0.95,
        peak in 0.1f64..1.0,
        x in 0.0f64..=1.0,
    ) {
        let src = DEFAULT_FCL
            .replace("TERM close_to_r := (0, 0) (1, 1);", &format!("TERM close_to_r := (0, 0) ({a}, {peak}) (1, 1);"))
            .replace("TERM adjacent := (0, 0) (1, 1);", &format!("TERM adjacent := ({a}, 0) ({b}, {peak}) (1, 1);"));
        let sys = parse_fcl(&src).unwrap();
        let again = parse_fcl(&sys.to_fcl()).unwrap();
        prop_assert_eq!(&sys, &again);
        prop_assert_eq!(sys.evaluate(x).unwrap(), again.evaluate(x).unwrap());
    }
}
