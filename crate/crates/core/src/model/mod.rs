//! Matrix model of colourings of `K_p □ K_q`.

pub mod format;
pub mod ledger;
pub mod matrix;
pub mod profile;
pub mod signature;

pub use format::{parse_matrix, write_matrix};
pub use ledger::PairLedger;
pub use matrix::{ColorMatrix, Colour, Membership, UNASSIGNED};
pub use profile::FrequencyProfile;
pub use signature::TypeSignature;
