//! Constructions, certificates and exact counts for the Zarankiewicz problem
//! on r-partite r-graphs.
//!
//! * [`gf`] and [`mpoly`]: finite fields and bounded-degree multivariate
//!   polynomials over them.
//! * [`hypergraph`]: the r-partite r-graph model and the `zng` text format.
//! * [`construct`]: random algebraic graphs free of ordered
//!   `K_{s_1,...,s_{r-1},t}`, with exhaustive freeness certificates.
//! * [`count`]: exact ordered-copy counts and the Jensen lower-bound chain.
//! * [`oracle`]: exact Zarankiewicz numbers for tiny parameters.

pub mod construct;
pub mod count;
pub mod gf;
pub mod hypergraph;
pub mod mpoly;
pub mod oracle;
pub mod pattern;
pub mod seed;
pub mod serde_text;

pub use construct::{
    build, derive_params, sequential_select, verify_freeness, BuildOptions, Construction, ConstructError,
    ConstructionParams, FreenessCertificate, PolyFamily, Verdict,
};
pub use count::{count_ordered, count_report, gen_binom, jensen_lower_bound, supersaturation_check, CountError, CountReport};
pub use gf::{make_field, Elem, Field, FieldElement, FieldSpec, GfError};
pub use hypergraph::{GraphError, LinkHypergraph, RPartiteHypergraph};
pub use mpoly::{agreement_set, monomial_basis, random_poly, sub_poly, MonomialBasis, MultiPoly, PolyError};
pub use oracle::{bound_table, exact_z, OracleError, ZQuery, ZResult};
