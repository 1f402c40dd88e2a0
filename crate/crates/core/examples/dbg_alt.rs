use ssco_core::*;
use ssco_core::placement::{sssc_check, ssso_check, CertStatus};
use ssco_core::oracle::{falsify_sssc, OracleConfig, OracleOutcome};

fn dedicated_b(n: usize, states: &[usize]) -> SelectivePattern {
    SelectivePattern::from_fn(n, states.len(), |r, c| {
        if states[c] - 1 == r { PatternEntry::Nonzero } else { PatternEntry::Zero }
    })
}

fn main() {
    let e = SelectivePattern::parse(&std::fs::read_to_string("fixtures/five_bus_e.txt").unwrap()).unwrap();
    let a = SelectivePattern::parse(&std::fs::read_to_string("fixtures/five_bus_a.txt").unwrap()).unwrap();
    let pencil = PencilPattern::new(e, a).unwrap();
    // Numeric spot-check of an off-family certified solution.
    let b = dedicated_b(16, &[3, 12, 13]);
    assert_eq!(sssc_check(&pencil, &b).unwrap(), CertStatus::Certified);
    let v = falsify_sssc(&pencil, &b, &OracleConfig::<f64>::default().with_trials(2000)).unwrap();
    println!("{{3,12,13}} falsification: {:?} over {} trials", matches!(v.outcome, OracleOutcome::BudgetExhausted), v.trials_run);
    // Sensor side: which dedicated 3-subsets certify observability?
    let mut certified = Vec::new();
    for i in 1..=16usize { for j in (i+1)..=16 { for k in (j+1)..=16 {
        let c = dedicated_b(16, &[i, j, k]).transpose();
        if ssso_check(&pencil, &c).unwrap() == CertStatus::Certified { certified.push([i, j, k]); }
    }}}
    println!("certified sensor 3-subsets: {certified:?}");
}
