//! Combinatorial Q-modulus of chain families and the estimates built on it.

mod annulus;
mod barrier;
mod compare;
mod fcr2;
mod solver;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use annulus::{annulus_modulus, annulus_vertex_sets, telescope_weight, TelescopeReport};
pub use compare::{ferrand_cr_graph, neighborhood_comparison, transported_weight, FerrandEstimate, NeighborhoodComparison};
pub use fcr2::{fcr2_weight, fcr2_weight_strict, Fcr2Certificate};
pub use solver::{is_admissible, min_chain_sum, mod_q, mod_q_with, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    /// Duality gap within tolerance.
    Optimal,
    /// Admissible weights found, optimality not certified.
    UpperBoundOnly,
    /// No chain joins the two sets; the zero weight is admissible.
    NoChains,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusResult {
    /// `sum w(v)^Q` of the returned weights.
    pub value: f64,
    /// Admissible vertex weights.
    pub weights: Vec<f64>,
    /// Chains whose weight is at most `1 + tol`.
    pub active_chains: Vec<Vec<usize>>,
    pub status: Status,
    pub q: f64,
    /// Dual lower bound on the modulus.
    pub lower_bound: f64,
    /// Number of chains generated.
    pub iterations: usize,
}

/// `sum w^Q`.
pub fn mass(w: &[f64], q: f64) -> f64 {
    w.iter().map(|&x| libm::pow(x, q)).sum()
}
