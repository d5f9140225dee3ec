//! Staged systems: decay diagnostics, element comparison in the
//! limit, and the alternating ladder search.
//!
//! Run with: cargo run --example intertwining

use kkcalc::algebra::validate_algebra;
use kkcalc::intertwine::{
    ladder_search, limit_compare, system_report, InductiveSystem, LimitVerdict, SearchBounds,
    SearchOutcome, TotalKElement,
};
use kkcalc::pl::PlPath;
use kkcalc::spectral::{HomomorphismData, PairData};

fn main() {
    // a tower of classical blocks with diagonal doubling embeddings
    let stages: Vec<_> = [2u64, 4, 8, 16]
        .iter()
        .map(|&p| validate_algebra(&[(1, 1, p, 1)]).unwrap())
        .collect();
    let connecting: Vec<_> = (0..3)
        .map(|i| {
            HomomorphismData::new(
                stages[i].clone(),
                stages[i + 1].clone(),
                vec![vec![PairData {
                    s0: 0,
                    s1: 0,
                    paths: vec![PlPath::identity(), PlPath::identity()],
                }]],
            )
            .unwrap()
        })
        .collect();
    let tower = InductiveSystem::new(stages.clone(), connecting.clone()).unwrap();

    let report = system_report(&tower, 0, 3).unwrap();
    println!("tower diagnostics out of stage 0:");
    for row in &report.rows {
        println!(
            "  to stage {}: spv = {}, proximity to finite spectrum = {}",
            row.stage, row.spv, row.finite_spectrum_proximity
        );
    }

    // the K1 generator survives the doubling tower up to the horizon
    let x = TotalKElement::k1_generator(&tower, 0, 0, &[2]);
    let zero = TotalKElement::zero(&tower, 0, &[2]);
    match limit_compare(&tower, &x, &zero).unwrap() {
        LimitVerdict::DistinctUpTo(h) => println!("K1 generator nonzero up to stage {h}"),
        LimitVerdict::EqualInLimitByStage(k) => println!("K1 generator dies at stage {k}"),
    }

    // ladder between the tower and its one-stage shift
    let shifted = InductiveSystem::new(stages[1..].to_vec(), connecting[1..].to_vec()).unwrap();
    let seed: Vec<_> = (0..3).map(|t| connecting[t].induced_class()).collect();
    match ladder_search(&tower, &shifted, &seed, &SearchBounds::new(3, 10)).unwrap() {
        SearchOutcome::Found(ladder) => {
            println!(
                "ladder found: source stages {:?}, target stages {:?}, all rungs certified",
                ladder.source_stages, ladder.target_stages
            );
        }
        SearchOutcome::NoLadder { rung, reason } => {
            println!("no ladder at rung {rung}: {reason}");
        }
    }
}
