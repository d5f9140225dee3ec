//! Corner/finite splittings of homomorphism data, and multiplicity
//! matching of finite-dimensional representations.
//!
//! Run with: cargo run --example decomposition

use kkcalc::algebra::{validate_algebra, DimDropBlock};
use kkcalc::pl::{rat, PlPath};
use kkcalc::spectral::{decompose, finite_rep_match, FiniteDimRep, HomomorphismData, PairData};

fn main() {
    let interval = validate_algebra(&[(1, 1, 1, 1)]).unwrap();

    // ninety-nine near-constant paths and one sweep: the finite part
    // dominates fifty corners
    let mut paths: Vec<PlPath> = (0..99).map(|k| PlPath::constant(rat(k, 200))).collect();
    paths.push(PlPath::identity());
    let h = HomomorphismData::new(
        interval.clone(),
        interval.clone(),
        vec![vec![PairData {
            s0: 0,
            s1: 0,
            paths,
        }]],
    )
    .unwrap();
    let tol = rat(1, 100);
    match decompose(&h, &tol, 50) {
        Some(d) => {
            println!(
                "decomposed: finite rank {}, corner rank {}, snap displacement {}",
                d.finite_part.fiber_ranks()[0],
                d.corner.fiber_ranks()[0],
                d.snap_displacement
            );
        }
        None => unreachable!(),
    }

    // the sweep alone admits no decomposition at L = 1
    let wild = HomomorphismData::new(
        interval.clone(),
        interval.clone(),
        vec![vec![PairData {
            s0: 0,
            s1: 0,
            paths: vec![PlPath::identity()],
        }]],
    )
    .unwrap();
    println!("single sweep decomposes: {}", decompose(&wild, &tol, 1).is_some());

    // multiplicity bookkeeping across the endpoint types
    let b = DimDropBlock::classical(2).unwrap();
    let rep = |k1, k2| FiniteDimRep {
        k1,
        k2,
        unital: true,
    };
    let report = finite_rep_match(&rep(3, 1), &rep(1, 3), &b, &b).unwrap();
    println!("(3,1) vs (1,3) over the classical 2-block: {report:?}");
    let report = finite_rep_match(&rep(3, 3), &rep(1, 1), &b, &b).unwrap();
    println!("(3,3) vs (1,1): {report:?}");
}
