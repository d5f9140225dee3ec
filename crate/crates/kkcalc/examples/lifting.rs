//! Deciding which classes lift to homomorphisms, and realizing the
//! liftable ones as standard-form data.
//!
//! Run with: cargo run --example lifting

use kkcalc::algebra::validate_algebra;
use kkcalc::kk::{canonicalize, DiagramEntry, KKDiagram};
use kkcalc::lift::{
    induced_kk, is_l_large, local_existence, stably_liftable, try_certificate, unital_lift_exists,
    LocalExistence,
};

fn main() {
    let a = validate_algebra(&[(1, 1, 2, 1)]).unwrap();
    let diagram = |e: (i64, i64, i64, i64, i64)| {
        KKDiagram::new(
            a.clone(),
            a.clone(),
            vec![vec![DiagramEntry::from_i64(e.0, e.1, e.2, e.3, e.4)]],
        )
        .unwrap()
    };

    // the identity lifts unitally
    let id = canonicalize(&KKDiagram::identity(&a));
    let cert = unital_lift_exists(&id).unwrap();
    println!("identity class: liftable, unital = {}", cert.unital);

    // the documented obstructed class: the shift interval is empty
    let bad = canonicalize(&diagram((-1, 1, 0, 0, -1)));
    match try_certificate(&bad) {
        Err(o) => println!("(-1,1,0,0,-1): not liftable ({})", o.reason),
        Ok(_) => unreachable!(),
    }

    // multiples of the identity overflow the unit but stay stably
    // liftable and become large
    let five = id.scale(5);
    println!(
        "5 * id: stably liftable = {}, unital lift = {}, 5-large = {}, strictly 4-large = {}",
        stably_liftable(&five).is_some(),
        unital_lift_exists(&five).is_some(),
        is_l_large(&five, 5),
        kkcalc::lift::is_strictly_l_large(&five, 4),
    );

    // realization: a liftable unital class becomes eigenvalue-path
    // data whose induced class is the input
    match local_existence(&id) {
        LocalExistence::Realized(data) => {
            println!("realized identity class as data:");
            for (j, row) in data.blocks().iter().enumerate() {
                for (i, pd) in row.iter().enumerate() {
                    println!(
                        "  pair ({j},{i}): s0 = {}, s1 = {}, {} paths",
                        pd.s0,
                        pd.s1,
                        pd.paths.len()
                    );
                }
            }
            assert_eq!(induced_kk(&data), id);
            println!("round trip: induced class equals the input");
        }
        LocalExistence::Infeasible { condition } => unreachable!("{condition}"),
    }
}
