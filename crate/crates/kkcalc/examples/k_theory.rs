//! K-theory of dimension drop blocks: K0 with its generator and
//! scale, and the cyclic K1.
//!
//! Run with: cargo run --example k_theory

use kkcalc::algebra::{k_theory, validate_algebra};

fn main() {
    let cases = [
        (1, 1, 2, 1),   // the classical 2-block
        (1, 2, 12, 3),  // asymmetric endpoints
        (1, 2, 4, 2),   // unit sits twice above the generator
        (3, 2, 8, 4),   // amplified block
    ];
    for (r, m0, m, m1) in cases {
        let algebra = validate_algebra(&[(r, m0, m, m1)]).unwrap();
        let kt = k_theory(&algebra);
        let b = &kt.blocks[0];
        println!("M_{r}(I[{m0},{m},{m1}]):");
        println!(
            "  K0 = Z, generator endpoint ranks ({}, {})",
            b.k0_generator_endpoint_ranks.0, b.k0_generator_endpoint_ranks.1
        );
        println!("  [1] = {} * generator, scale [0, {}]", b.unit_coefficient, b.unit_coefficient);
        println!("  K1 = Z_{}", b.k1_order);
    }

    // rejected inputs carry the violated divisibility
    match validate_algebra(&[(1, 2, 3, 1)]) {
        Err(e) => println!("\nrejected (1,2,3,1): {e}"),
        Ok(_) => unreachable!(),
    }
}
