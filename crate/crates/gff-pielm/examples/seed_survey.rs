//! Surveys seed-to-seed variance of the 1D reference problem: accuracy of
//! the direct solve and behavior of the frequency-interval refinement.
//!
//! Run with `cargo run --release --example seed_survey`.

use gff_pielm::cases::{evaluation_grid, get_case};
use gff_pielm::diagnostics::{refine_and_resolve, GffConfig, RefineOptions};
use gff_pielm::runner::{predict, run_case, RunConfig};
use gff_pielm::sampling::SamplingPlan;

fn main() {
    let case = get_case("poisson1d_demo").unwrap();
    let exact = case.problem.exact_solution.clone().unwrap();
    let grid = evaluation_grid(&case.problem.domain);
    let exact_vals: Vec<f64> = grid.iter().map(|p| exact.eval(p)).collect();

    println!("direct solve at registry defaults (delta in [1, 400], M = 200):");
    for seed in 0..16u64 {
        let mut config = RunConfig::for_case("poisson1d_demo");
        config.seed = seed;
        let report = run_case(&config).unwrap();
        let m = &report.methods[0];
        println!(
            "  seed {seed:2}: l2 = {:9.3e}  mse = {:9.3e}",
            m.relative_l2.unwrap(),
            m.mse
        );
    }

    println!("refinement from delta in [1, 1000] (random interior, 400 points):");
    for seed in 0..16u64 {
        let plan = SamplingPlan::new(400, 1, 0, seed);
        let trail = refine_and_resolve(
            &case.problem,
            GffConfig {
                neurons: 200,
                delta1: 1.0,
                delta_m: 1000.0,
                seed,
            },
            &plan,
            &RefineOptions::default(),
            2,
            |layer, beta| {
                gff_pielm::diagnostics::relative_l2(&exact_vals, &predict(layer, beta, &grid)).ok()
            },
        )
        .unwrap();
        let first = &trail[0];
        let last = trail.last().unwrap();
        println!(
            "  seed {seed:2}: wide l2 = {:9.3e}  suggested dM = {:7.1} ({:?})  final l2 = {:9.3e}  ratio = {:.1e}",
            first.relative_l2.unwrap(),
            first.suggested_delta_m,
            first.flag,
            last.relative_l2.unwrap(),
            last.relative_l2.unwrap() / first.relative_l2.unwrap()
        );
    }
}
