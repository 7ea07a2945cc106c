//! Photonic cat-state synthesis in a truncated Fock basis.
//!
//! The crate builds single- and two-mode states, propagates them through
//! beam splitters and loss, heralds on photon counts and evaluates the
//! closed-form fidelities and probabilities of the heralding protocols.

pub mod analytic;
pub mod error;
pub mod fock;
pub mod io;
pub mod modes;
pub mod optimize;
pub mod protocols;
pub mod special;

pub use error::{CatsimError, Result};
pub use fock::{
    fidelity_pure, inner_product, make_cat, make_coherent, make_fock, make_squeezed_vacuum, make_vacuum, normalize,
    required_cutoff, truncation_tail, truncation_tail_with_tolerance, CatSign, FockSpace, Parity, PureState,
    StateFamily, TruncationReport,
};
pub use modes::{
    beam_splitter, project_fock, tensor, BeamSplitterSpec, HeraldResult, MixedState, Mode, TwoModePureState,
};
pub use num_complex::Complex64;
pub use protocols::{HeraldedState, Precision, ProtocolConfig};
