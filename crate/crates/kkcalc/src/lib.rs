//! Exact K-theoretic calculus for generalized dimension drop interval
//! algebras.
//!
//! The crate computes, over exact integer and rational arithmetic:
//!
//! * K-theory and total K-theory (with cyclic coefficients and
//!   Bockstein operations) of finite direct sums of blocks
//!   `M_r(I[m0,m,m1])`;
//! * KK-groups between such algebras, presented as explicit finitely
//!   generated abelian groups via the commutative-ladder picture, with
//!   canonical forms, addition, and the Kasparov product as diagram
//!   composition;
//! * liftability of KK classes to *-homomorphisms (stable, subunital,
//!   unital), largeness, and explicit standard-form homomorphism data
//!   realizing liftable classes;
//! * spectral data of standard-form homomorphisms: spectra, spectral
//!   variation, weak-variation bounds, corner/finite decompositions,
//!   and finite-dimensional multiplicity matching;
//! * inductive systems: composite diagnostics, element comparison in
//!   the limit, and the intertwining-ladder search between two systems.
//!
//! The `examples/` directory exercises each capability; the `kkcalc`
//! binary exposes the same operations on JSON inputs.

pub mod algebra;
pub mod cli;
pub mod group;
pub mod intertwine;
pub mod kk;
pub mod lift;
pub mod matrix;
pub mod pl;
pub mod spectral;
pub mod wire;

pub use algebra::{
    default_coefficient_set, k_theory, total_k, validate_algebra, DimDropBlock, DirectSumAlgebra,
};
pub use group::{group_invariants, hom_check_and_induce, FgGroup, GroupHom};
pub use kk::{canonicalize, compose, kk_group, uct_crosscheck, KKClass, KKDiagram, KKGroup};
pub use lift::{induced_kk, is_l_large, local_existence, stably_liftable, unital_lift_exists};
pub use matrix::{smith_normal_form, solve_integer, IntMatrix};
pub use spectral::{
    compose_hom_data, decompose, finite_rep_match, omega_bounds, spectrum_at, spv,
    FiniteDimRep, HomomorphismData,
};
