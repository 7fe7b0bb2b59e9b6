//! Capacity analysis toolkit for (bi-)orthogonal signaling.
//!
//! The crate computes coded-modulation (CM) and bit-interleaved coded
//! modulation (BICM) capacities of M-ary pulse-position modulation (M-PPM)
//! and its biorthogonal extension (M-biPPM), with coherent detection as
//! well as two noncoherent front ends (energy detection of PPM,
//! differential detection of BPSK).
//!
//! Two complementary tools are provided:
//!
//! * **Wideband analysis** — exact second-order Taylor coefficients of the
//!   capacity at vanishing SNR, from which the minimum energy per bit
//!   (Eb/N0 limit) and the wideband slope follow in closed form
//!   ([`wideband`]).
//! * **Monte-Carlo integration** — seeded, reproducible estimation of CM,
//!   per-bit-level, and BICM capacities over Es/N0 sweeps, including CSV
//!   emission and minimum-Eb/N0 search ([`mi`], [`sweep`]).

pub mod channel;
pub mod constellation;
pub mod mi;
pub mod moments;
pub mod quad;
pub mod sweep;
pub mod wideband;

pub use channel::{ChannelModel, Detection, NoiseConfig};
pub use constellation::{ConstrainedSubset, Labeling, SignalSet, SignalSetKind};
pub use mi::{MiEstimate, SamplingPlan};
pub use moments::MomentSummary;
pub use wideband::{CodingScheme, TaylorCoefficients, WidebandSummary};
