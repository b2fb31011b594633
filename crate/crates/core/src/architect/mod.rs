//! Shuttling-architecture device model.
//!
//! A 2D grid of cells holds logic donors, measurement/refrigeration donors,
//! and CCD-style shuttle gates that carry single electrons between them.
//! Quantum information moves by swapping a nuclear spin onto its donor
//! electron, shuttling that electron along gate cells, and interacting or
//! measuring at the destination. Because a shuttled electron loses its
//! quantum state if it exchange-couples to another, occupancy is exclusive
//! with a one-cell guard ring, and defective cells are simply routed
//! around — not every gate or donor needs to work.

pub mod grid;
pub mod route;
pub mod schedule;

pub use grid::{Cell, CellKind, DeviceGrid};
pub use route::{route_electron, route_electron_with_radius};
pub use schedule::{
    compile_circuit, compile_circuit_with, error_budget, validate_schedule, Action, Circuit,
    CircuitOp, ErrorRates, Schedule, ScheduleMetrics, Step, TimingModel, TwoQubitStrategy,
    Violation,
};
