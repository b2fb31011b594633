//! Time-domain spin dynamics under RF drive.
//!
//! One- and two-qubit gates are driven by resonant RF pulses: an electron
//! flip conditioned on the nuclear state implements CNOT, and the
//! electron–nuclear flip-flop implements SWAP. Gate-voltage control enters
//! through the A-gate curve ([`agate`]), which shifts a donor in and out of
//! resonance; shaped and composite pulses ([`optimize`], [`twolevel`])
//! suppress the detuning errors that gate-bias fluctuations cause.

pub mod agate;
pub mod evolve;
pub mod gates;
pub mod jramp;
pub mod optimize;
pub mod pulse;
pub mod twolevel;

pub use agate::AGateCurve;
pub use evolve::{evolve, Drive, EvolveOptions, FrameMode, Propagator};
pub use gates::{gate_cnot_en, gate_swap_en, rabi_frequency, GateReport};
pub use jramp::{evolve_exchange_ramp, TrapezoidalRamp};
pub use optimize::{optimize_pulse, NelderMead, OptimizeOptions, OptimizedPulse, SineEnvelopeFamily};
pub use pulse::{PulseSample, PulseShape};
pub use twolevel::{pulse_infidelity, Rotation};
