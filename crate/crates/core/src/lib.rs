//! Complete colourings of rook's graphs `K_p □ K_q`.
//!
//! A colouring is stored as a `p x q` matrix; it is proper when no colour
//! repeats in a row or column and complete when every pair of colours meets
//! along some row or column. The crate verifies membership, canonicalizes
//! under the symmetry group, derives counting bounds, encodes the structural
//! cuts for the `6 x 7`, 19-colour instance, and searches for witnesses or
//! refutations.

pub mod bounds;
pub mod error;
pub mod lemmas;
pub mod model;
pub mod search;
pub mod symmetry;

pub use error::{Error, Result};
pub use model::{
    ColorMatrix, Colour, FrequencyProfile, Membership, PairLedger, TypeSignature, UNASSIGNED,
};
pub use search::{SearchConfig, SearchOutcome, SearchStatus};
