//! Spectra of standard-form data: snapshots, spectral variation, and
//! the weak-variation bounds for a profile family.
//!
//! Run with: cargo run --example spectra

use kkcalc::algebra::validate_algebra;
use kkcalc::pl::{rat, rat_int, PlPath};
use kkcalc::spectral::{compose_hom_data, omega_bounds, spectrum_at, spv, HomomorphismData, PairData};

fn main() {
    let interval = validate_algebra(&[(1, 1, 1, 1)]).unwrap();

    // one tent path peaking at 2/5
    let tent = PlPath::new(vec![
        (rat_int(0), rat_int(0)),
        (rat(1, 2), rat(2, 5)),
        (rat_int(1), rat_int(0)),
    ])
    .unwrap();
    let h = HomomorphismData::new(
        interval.clone(),
        interval.clone(),
        vec![vec![PairData {
            s0: 0,
            s1: 0,
            paths: vec![tent, PlPath::constant(rat(3, 4))],
        }]],
    )
    .unwrap();

    for t in [rat_int(0), rat(1, 2), rat_int(1)] {
        let snap = &spectrum_at(&h, &t).unwrap()[0][0];
        let pts: Vec<String> = snap.interior_points.iter().map(|p| p.to_string()).collect();
        println!("spectrum at t = {t}: interior {pts:?}");
    }
    println!("spv = {}", spv(&h, 16));

    // profiles x and 1 - x: both 1-Lipschitz, so the spread bound is
    // the spectral variation itself
    let profiles = [PlPath::identity(), PlPath::line(rat_int(1), rat_int(0))];
    let (lower, upper) = omega_bounds(&profiles, &h);
    println!("weak variation bounds: lower = {lower}, upper = {upper}");

    // composing with a contraction halves the variation
    let contraction = HomomorphismData::new(
        interval.clone(),
        interval.clone(),
        vec![vec![PairData {
            s0: 0,
            s1: 0,
            paths: vec![PlPath::line(rat_int(0), rat(1, 2))],
        }]],
    )
    .unwrap();
    let composed = compose_hom_data(&contraction, &h).unwrap();
    println!("spv after composing with t -> t/2: {}", spv(&composed, 16));
}
