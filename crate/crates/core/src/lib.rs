//! Exact computation with free differential graded Lie algebras over
//! subrings of the rationals.
//!
//! The crate is organized in layers:
//!
//! * [`ring`] — the coefficient ring `R = Z[S^{-1}]`, exact scalars, dense
//!   matrices, Smith normal form and finitely generated module
//!   classification over `R`.
//! * [`group`] — symbolic descriptions of the groups the library computes
//!   (unit groups, general linear groups, automorphism groups of modules,
//!   products and extensions).
//! * [`freelie`] — free graded Lie algebras on a finite graded generator
//!   set: the graded Lyndon basis, bracket normal forms, and an independent
//!   tensor-algebra embedding used as an oracle.
//! * [`dgl`] — free DG Lie algebras `(L(V), d)`: presentation validation,
//!   derivation extension, truncations, homology, morphisms.
//! * [`homotopy`] — the cylinder object `(L(V, sV, V'), D)`, the degree +1
//!   derivation `S`, the automorphism `e^theta`, and homotopy verification.
//! * [`selfeq`] — the self-equivalence machinery: the attaching-class map
//!   `B`, the compatible-pair groups, kernel modules, constructive lifts,
//!   exact-sequence resolution, and infiniteness detectors.
//! * [`models`] — builders for standard families: sphere products, Moore
//!   spaces and wedges, skeletal chains, and seeded random small models.
//!
//! The crate is `no_std` (with `alloc`); everything is exact arithmetic,
//! deterministic, and free of IO. The companion CLI crate carries parsing,
//! reports and file formats.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dgl;
pub mod freelie;
pub mod group;
pub mod homotopy;
pub mod models;
pub mod ring;
pub mod selfeq;
