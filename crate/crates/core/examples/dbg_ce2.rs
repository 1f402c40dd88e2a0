use nalgebra::{Complex, DMatrix};
use ssco_core::oracle::*;
use ssco_core::stair::is_ramp;
use ssco_core::*;

fn dedicated_b(n: usize, states: &[usize]) -> SelectivePattern {
    SelectivePattern::from_fn(n, states.len(), |r, c| {
        if states[c] - 1 == r { PatternEntry::Nonzero } else { PatternEntry::Zero }
    })
}

fn main() {
    let e = SelectivePattern::parse(&std::fs::read_to_string("fixtures/five_bus_e.txt").unwrap()).unwrap();
    let a = SelectivePattern::parse(&std::fs::read_to_string("fixtures/five_bus_a.txt").unwrap()).unwrap();
    let pencil = PencilPattern::new(e, a).unwrap();
    let bpat = dedicated_b(16, &[3, 12, 13]);
    let v = falsify_sssc(&pencil, &bpat, &OracleConfig::<f64>::default().with_trials(2000)).unwrap();
    let OracleOutcome::CounterexampleFound(ce) = &v.outcome else { println!("clean"); return };
    let n = 16;
    let bm = ce.b_mat.clone().unwrap();
    let lam = ce.lambda;
    let scale = 1.0 / lam.norm().max(1.0);
    let mut m = DMatrix::<Complex<f64>>::zeros(n, n + bm.ncols());
    let ec = ce.e_mat.map(|x| Complex::new(x, 0.0));
    let ac = ce.a_mat.map(|x| Complex::new(x, 0.0));
    m.view_mut((0, 0), (n, n)).copy_from(&((&ac - &ec * lam) * Complex::new(scale, 0.0)));
    m.view_mut((0, n), (n, bm.ncols())).copy_from(&bm.map(|x| Complex::new(x, 0.0)));
    let sv = m.clone().svd(false, false).singular_values;
    let mut svs: Vec<f64> = sv.iter().copied().collect();
    svs.sort_by(|x, y| y.partial_cmp(x).unwrap());
    println!("scaled svs head {:?} tail {:?}", &svs[..2], &svs[13..]);
    // Real embedding cross-check: [Re -Im; Im Re]
    let mr = DMatrix::<f64>::from_fn(2 * n, 2 * (n + 3), |r, c| {
        let (rr, cc) = (r % n, c % (n + 3));
        let v = m[(rr, cc)];
        match (r / n, c / (n + 3)) {
            (0, 0) | (1, 1) => v.re,
            (0, 1) => -v.im,
            _ => v.im,
        }
    });
    let svr = mr.svd(false, false).singular_values;
    let mut svrs: Vec<f64> = svr.iter().copied().collect();
    svrs.sort_by(|x, y| y.partial_cmp(x).unwrap());
    println!("real-embed svs tail {:?}", &svrs[28..]);
    // Triangular witness determinant
    let lambda_pat = lambda_pattern(&pencil);
    let stacked = lambda_pat.hstack(&bpat).unwrap();
    let w = is_ramp(&stacked).unwrap();
    let mut prod = 1.0f64;
    for &(r, c) in &w.diag {
        let val = if c < 16 { ce.a_mat[(r, c)] } else { bm[(r, c - 16)] };
        prod *= val;
    }
    println!("witness diag product = {prod:e}");
    // Is lambda actually an eigenvalue? residual of pencil det
    let det = (&ce.a_mat - &ce.e_mat * lam.re).lu().determinant();
    println!("det(A - lambda E) = {det:e}");
}
