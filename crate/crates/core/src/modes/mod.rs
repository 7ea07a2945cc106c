//! Operators, two-mode composition, measurement and channels.

pub mod beam_splitter;
pub mod channel;
pub mod eigen;
pub mod mixed;
pub mod ops;
pub mod phase_space;
pub mod two_mode;

pub use beam_splitter::{beam_splitter, BeamSplitterSpec};
pub use channel::{herald_with_efficiency, loss_branches, loss_channel, loss_kraus, project_on_off, StateRef};
pub use mixed::{partial_trace, partial_trace_pure, project_fock_mixed, trace_distance, trace_distance_ensembles, MixedState};
pub use ops::{annihilate, attenuate, create, phase_rotate};
pub use phase_space::{linspace, quadrature_pdf, quadrature_pdf_mixed, trapezoid, wigner, PhaseSpaceGrid};
pub use two_mode::{project_fock, tensor, HeraldResult, Mode, TwoModePureState};
