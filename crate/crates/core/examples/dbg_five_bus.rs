fn main() {
    let e = ssco_core::SelectivePattern::parse(&std::fs::read_to_string("fixtures/five_bus_e.txt").unwrap()).unwrap();
    let a = ssco_core::SelectivePattern::parse(&std::fs::read_to_string("fixtures/five_bus_a.txt").unwrap()).unwrap();
    let pencil = ssco_core::PencilPattern::new(e, a).unwrap();
    let lam = ssco_core::lambda_pattern(&pencil);
    let stair = ssco_core::stair::stair_decompose(&lam, ssco_core::stair::StairMode::Auto);
    println!("certified: {}", stair.maximality_certified);
    println!("steps: {:?}", stair.steps);
    println!("row_perm (1-based): {:?}", stair.row_perm.iter().map(|r| r + 1).collect::<Vec<_>>());
    println!("col_perm (1-based): {:?}", stair.col_perm.iter().map(|c| c + 1).collect::<Vec<_>>());
    for (i, d) in ssco_core::stair::step_differences(&stair).iter().enumerate() {
        print!("delta {}: rows ", i + 1);
        for r in d.row_start..d.row_start + d.height { print!("{} ", stair.row_perm[r] + 1); }
        print!("cols ");
        for c in d.col_start..d.col_start + d.width { print!("{} ", stair.col_perm[c] + 1); }
        println!();
    }
    let cands = ssco_core::stair::pivot_candidates(&stair);
    for (i, c) in cands.iter().enumerate() {
        println!("delta {} candidates: {:?}", i + 1, c.iter().map(|&(r, col)| (r + 1, col + 1)).collect::<Vec<_>>());
    }
}
