//! Exact-diagonalization workbench for the random XXZ spin-½ chain in the
//! Ising phase.
//!
//! The chain is studied sector by sector: for a finite region `Λ ⊂ ℤ` and a
//! particle number `N`, every operator is a dense matrix over the
//! `N`-particle configurations of `Λ`. On top of that sit the localization
//! diagnostics: Green-function fractional moments, eigencorrelators,
//! Combes-Thomas and Lieb-Robinson checks, filter-function locality, and
//! brute-force oracles used to cross-check all of it.
//!
//! ```
//! use xxz_workbench::prelude::*;
//!
//! let region = Region::interval(0, 7).unwrap();
//! let params = ModelParams::new(2.0, 1.0).unwrap();
//! let omega = DisorderSample::sample(&region, Distribution::Uniform01, 7).unwrap();
//! let h = assemble_hamiltonian(&region, 2, &params, &omega).unwrap();
//! let spectrum = eig_sym(h.matrix()).unwrap();
//! assert!(spectrum.values[0] >= params.gap() - 1e-10);
//! ```

pub mod cli;
pub mod config_space;
pub mod disorder;
pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod numerics;
pub mod operators;
pub mod oracles;
pub mod report;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::config_space::{
        cluster_count, dist_d1, dist_hausdorff, dist_hausdorff_mod, enumerate_bounded_clusters,
        enumerate_sector, hop_neighbors, Configuration, DistanceKind, ExtDist, Region,
        SectorBasis,
    };
    pub use crate::disorder::{monte_carlo, DisorderSample, Distribution, MCEstimate, MonteCarlo};
    pub use crate::error::{Error, Result};
    pub use crate::numerics::{eig_sym, matrix_function, solve_shifted, EigenDecomposition, C64};
    pub use crate::operators::{
        assemble_hamiltonian, assemble_parts, boundary_operator, lifted_hamiltonian, projection,
        EnergyWindow, HalfInt, ModelParams, Projection, SectorOperator,
    };
}
