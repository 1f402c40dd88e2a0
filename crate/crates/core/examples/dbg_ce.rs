use ssco_core::*;
use ssco_core::oracle::*;

fn dedicated_b(n: usize, states: &[usize]) -> SelectivePattern {
    SelectivePattern::from_fn(n, states.len(), |r, c| {
        if states[c] - 1 == r { PatternEntry::Nonzero } else { PatternEntry::Zero }
    })
}

fn main() {
    let e = SelectivePattern::parse(&std::fs::read_to_string("fixtures/five_bus_e.txt").unwrap()).unwrap();
    let a = SelectivePattern::parse(&std::fs::read_to_string("fixtures/five_bus_a.txt").unwrap()).unwrap();
    let pencil = PencilPattern::new(e, a).unwrap();
    let b = dedicated_b(16, &[3, 12, 13]);
    let v = falsify_sssc(&pencil, &b, &OracleConfig::<f64>::default().with_trials(2000)).unwrap();
    if let OracleOutcome::CounterexampleFound(ce) = &v.outcome {
        println!("context: {}", ce.context);
        println!("lambda: {} + {}i (|l| = {})", ce.lambda.re, ce.lambda.im, ce.lambda.norm());
        println!("deficiency: {}", ce.deficiency);
        let eigs = pencil_eigenvalues(&ce.e_mat, &ce.a_mat).unwrap();
        println!("eigenvalue magnitudes: {:?}", eigs.iter().map(|l| l.norm()).collect::<Vec<_>>());
        // recompute rank at the reported lambda with different tolerances
        let n = 16;
        let bm = ce.b_mat.clone().unwrap();
        let make = |lam: nalgebra::Complex<f64>| {
            let mut m = nalgebra::DMatrix::<nalgebra::Complex<f64>>::zeros(n, n + bm.ncols());
            let ec = ce.e_mat.map(|x| nalgebra::Complex::new(x, 0.0));
            let ac = ce.a_mat.map(|x| nalgebra::Complex::new(x, 0.0));
            let bc = bm.map(|x| nalgebra::Complex::new(x, 0.0));
            m.view_mut((0,0),(n,n)).copy_from(&(&ac - &ec * lam));
            m.view_mut((0,n),(n,bm.ncols())).copy_from(&bc);
            m
        };
        let m = make(ce.lambda);
        let sv = m.clone().svd(false, false).singular_values;
        let mut svs: Vec<f64> = sv.iter().copied().collect();
        svs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        println!("singular values: first {:?} ... last {:?}", &svs[..3], &svs[svs.len()-3..]);
    } else {
        println!("no counterexample: {:?}", v.outcome);
    }
}
