//! The exact integer substrate: Smith normal forms, presented
//! abelian groups, and integer linear systems.
//!
//! Run with: cargo run --example integer_lattices

use kkcalc::group::{group_invariants, hom_check_and_induce, FgGroup};
use kkcalc::matrix::{solve_integer, vec_from_i64, IntMatrix};

fn main() {
    // Smith normal form with the transforms
    let m = IntMatrix::from_rows(&[vec![2, -2, 0], vec![0, 0, 2]]);
    let snf = m.smith_normal_form();
    println!("diagonal of the Smith form: {:?}", snf.diagonal());
    assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.d);

    // the group presented by those relations in Z^3
    let g = group_invariants(3, m);
    println!(
        "Z^3 / <(2,-2,0), (0,0,2)>: free rank {}, torsion factors {:?}",
        g.free_rank(),
        g.torsion_factors()
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
    );

    // integer solvability with a kernel basis
    let system = IntMatrix::from_rows(&[vec![6, -4]]);
    match solve_integer(&system, &vec_from_i64(&[2])) {
        Some(sol) => {
            println!(
                "6x - 4y = 2: particular {:?}, kernel basis {:?}",
                sol.particular
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>(),
                sol.kernel_basis
            );
        }
        None => unreachable!(),
    }
    assert!(solve_integer(&IntMatrix::from_rows(&[vec![2]]), &vec_from_i64(&[3])).is_none());

    // induced maps between presented groups, with kernel and cokernel
    let z = FgGroup::free(1);
    let doubling = hom_check_and_induce(&z, &z, IntMatrix::from_rows(&[vec![2]])).unwrap();
    println!(
        "x2 on Z: kernel trivial = {}, cokernel factors {:?}",
        doubling.kernel.is_trivial(),
        doubling
            .cokernel
            .invariant_factors()
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
    );
    // maps that fail to respect the relations are refused
    let z2 = FgGroup::cyclic(2);
    let z3 = FgGroup::cyclic(3);
    assert!(hom_check_and_induce(&z2, &z3, IntMatrix::from_rows(&[vec![1]])).is_none());
    println!("x1 from Z_2 to Z_3: not a homomorphism (refused)");
}
