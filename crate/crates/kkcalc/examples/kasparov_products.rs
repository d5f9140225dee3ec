//! Canonical forms and the Kasparov product as ladder composition.
//!
//! Run with: cargo run --example kasparov_products

use kkcalc::algebra::validate_algebra;
use kkcalc::kk::{canonicalize, compose, DiagramEntry, KKDiagram};

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

    // two representatives of the same coset
    let x = canonicalize(&diagram((-1, 1, 0, 0, -1)));
    let y = canonicalize(&diagram((1, -1, 0, 0, 1)));
    println!("(-1,1,0,0,-1) canonical: {:?}", x.canonical());
    println!("(1,-1,0,0,1)  canonical: {:?}", y.canonical());
    println!("same class: {}", x == y);
    assert_eq!(x, y);

    // diagonal-sublattice elements die in the quotient
    let m = canonicalize(&diagram((2, -2, 0, 0, 2)));
    println!("(2,-2,0,0,2) is zero: {}", m.is_zero());

    // the product respects identities and addition
    let id = canonicalize(&KKDiagram::identity(&a));
    assert_eq!(compose(&id, &x).unwrap(), x);
    assert_eq!(compose(&x, &id).unwrap(), x);
    let sum = x.add(&y).unwrap();
    println!("x + y canonical: {:?}", sum.canonical());
    let product = compose(&x, &y).unwrap();
    println!("y . x canonical: {:?}", product.canonical());
}
