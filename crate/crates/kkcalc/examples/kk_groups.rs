//! KK-groups as explicit finitely generated abelian groups, with the
//! independent graded-hom crosscheck.
//!
//! Run with: cargo run --example kk_groups

use kkcalc::algebra::validate_algebra;
use kkcalc::kk::{kk_group, uct_crosscheck};

fn main() {
    let pairs = [
        ((1, 1, 2, 1), (1, 1, 2, 1)),
        ((1, 1, 2, 1), (1, 1, 1, 1)),
        ((1, 2, 12, 3), (1, 1, 2, 1)),
        ((1, 1, 6, 1), (1, 1, 4, 1)),
    ];
    for (s, t) in pairs {
        let a = validate_algebra(&[s]).unwrap();
        let b = validate_algebra(&[t]).unwrap();
        let g = kk_group(&a, &b);
        let torsion: Vec<String> = g
            .invariant_factors()
            .iter()
            .filter(|f| !num_traits::Zero::is_zero(*f))
            .map(|f| f.to_string())
            .collect();
        println!(
            "KK(I[{},{},{}], I[{},{},{}]): free rank {}, torsion factors {:?}",
            s.1, s.2, s.3, t.1, t.2, t.3,
            g.free_rank(),
            torsion
        );
        let report = uct_crosscheck(&a, &b);
        println!(
            "  crosscheck: predicted torsion order {}, graded homs give {}, consistent: {}",
            report.torsion_order,
            report.hom_lambda.torsion_order(),
            report.gamma_consistent
        );
        assert!(report.gamma_consistent);
    }
}
