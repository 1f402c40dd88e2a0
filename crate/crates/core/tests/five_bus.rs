//! End-to-end checks on the bundled 16-state 5-bus power-grid fixture.

use ssco_core::codesign::codesign;
use ssco_core::cost::{CostMatrix, CostSpec};
use ssco_core::pattern::{lambda_pattern, PencilPattern, SelectivePattern};
use ssco_core::placement::{
    optimal_alternatives, resilient_actuators, resilient_sensors, sssc_check, CertStatus,
    PlacementContext, SolutionKind,
};
use ssco_core::stair::{enumerate_pivot_choices, StairMode};

fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {path}: {e}"))
}

fn five_bus() -> PencilPattern {
    let e = SelectivePattern::parse(&fixture("five_bus_e.txt")).unwrap();
    let a = SelectivePattern::parse(&fixture("five_bus_a.txt")).unwrap();
    PencilPattern::new(e, a).unwrap()
}

fn wb_monotone() -> CostSpec<f64> {
    CostSpec::Matrix(CostMatrix::parse_csv(&fixture("five_bus_wb_monotone.csv")).unwrap())
}

fn wc_distinct() -> CostSpec<f64> {
    CostSpec::Matrix(CostMatrix::parse_csv(&fixture("five_bus_wc.csv")).unwrap())
}

fn wk_uniform() -> CostSpec<f64> {
    CostSpec::Matrix(CostMatrix::parse_csv(&fixture("five_bus_wk_uniform.csv")).unwrap())
}

#[test]
fn stair_has_thirteen_certified_steps_and_pivots() {
    let pencil = five_bus();
    let ctx = PlacementContext::new(&pencil, StairMode::Auto).unwrap();
    assert!(ctx.stair.maximality_certified);
    assert!(ctx.stair.is_valid());
    assert_eq!(ctx.stair.n_steps(), 13, "steps: {:?}", ctx.stair.steps);
    assert_eq!(ctx.pivot_count(), 13);
    let lengths: Vec<usize> = ctx.stair.steps.iter().map(|s| s.length).collect();
    assert_eq!(lengths, vec![2, 3, 4, 6, 7, 8, 10, 11, 12, 13, 14, 15, 16]);
    let heights: Vec<usize> = ctx.stair.steps.iter().map(|s| s.height).collect();
    assert_eq!(heights.iter().sum::<usize>(), 16);
    assert_eq!(heights, vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 1, 2, 2]);
}

#[test]
fn four_dedicated_actuator_alternatives() {
    let pencil = five_bus();
    let ctx = PlacementContext::new(&pencil, StairMode::Auto).unwrap();
    assert_eq!(enumerate_pivot_choices(&ctx.stair).cardinality(), 4);
    let alts = optimal_alternatives(&pencil, SolutionKind::Actuation, &CostSpec::<f64>::Uniform(1.0)).unwrap();
    assert_eq!(
        alts,
        vec![
            vec![12, 14, 16],
            vec![12, 15, 16],
            vec![13, 14, 16],
            vec![13, 15, 16],
        ]
    );
}

#[test]
fn sensor_solution_unique() {
    let pencil = five_bus();
    let sol = resilient_sensors::<f64>(&pencil, 0, &CostSpec::Uniform(1.0)).unwrap();
    assert_eq!(sol.base, vec![2, 5, 8]);
    assert!(sol.unique);
    let alts = optimal_alternatives(&pencil, SolutionKind::Sensing, &CostSpec::<f64>::Uniform(1.0)).unwrap();
    assert_eq!(alts, vec![vec![2, 5, 8]]);
}

#[test]
fn monotone_cost_selects_cheapest_states_twice() {
    let pencil = five_bus();
    let act = resilient_actuators(&pencil, 1, &wb_monotone()).unwrap();
    assert_eq!(act.indices, vec![12, 14, 16, 12, 14, 16]);
    let sens = resilient_sensors(&pencil, 1, &wc_distinct()).unwrap();
    assert_eq!(sens.indices, vec![2, 5, 8, 2, 5, 8]);
    let b = act.materialize();
    assert_eq!(sssc_check(&pencil, &b).unwrap(), CertStatus::Certified);
}

#[test]
fn codesign_reproduces_index_mates() {
    let pencil = five_bus();
    let r = codesign(&pencil, 1, &wb_monotone(), &wc_distinct(), &wk_uniform()).unwrap();
    assert_eq!(r.actuation.indices, vec![12, 14, 16, 12, 14, 16]);
    assert_eq!(r.sensing.indices, vec![2, 5, 8, 2, 5, 8]);
    assert_eq!(
        r.info.channels,
        vec![(1, 2), (4, 5), (2, 3), (5, 6), (3, 1), (6, 4)]
    );
    // Total: actuation 2*(12+14+16), sensing 2*(102+105+108), channels 6.
    assert_eq!(r.actuation.cost, 84.0);
    assert_eq!(r.sensing.cost, 630.0);
    assert_eq!(r.total_cost, 84.0 + 630.0 + 6.0);
}

#[test]
fn lambda_pattern_has_free_diagonal_only() {
    let pencil = five_bus();
    let lam = lambda_pattern(&pencil);
    for r in 0..16 {
        for c in 0..16 {
            use ssco_core::PatternEntry::*;
            let cell = lam.get(r, c);
            if r == c {
                assert_eq!(cell, Free);
            } else {
                assert_ne!(cell, Free);
            }
        }
    }
}
