//! Circuit compilation onto the shuttling grid, schedule validation, and
//! first-order error budgeting.
//!
//! A two-qubit operation follows the shuttle protocol: swap the source
//! nucleus onto its electron, ionize and move the electron along shuttle
//! gates to the target donor, apply the resonant two-spin pulse there,
//! return, and swap back. Measurements route the information-carrying
//! electron to a measurement donor; initializations fetch a polarized
//! electron from one. The compiler is a greedy list scheduler: each action
//! claims the earliest step after its dependencies where the occupancy
//! constraints hold. Makespan optimality is not attempted; route length is
//! (see the routing tests).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::grid::{Cell, CellKind, DeviceGrid};
use super::route::route_electron;

/// One logical circuit operation. Qubit ids index logic-donor cells in
/// row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum CircuitOp {
    Rotate { qubit: usize, pulse_ref: String },
    TwoQubit { a: usize, b: usize, pulse_ref: String },
    Measure { qubit: usize },
    Init { qubit: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn validate(&self, grid: &DeviceGrid) -> Result<()> {
        let n = grid.qubit_cells().len();
        for (idx, op) in self.ops.iter().enumerate() {
            let qubits: Vec<usize> = match op {
                CircuitOp::Rotate { qubit, .. }
                | CircuitOp::Measure { qubit }
                | CircuitOp::Init { qubit } => vec![*qubit],
                CircuitOp::TwoQubit { a, b, .. } => vec![*a, *b],
            };
            for q in qubits {
                if q >= n {
                    return Err(Error::Uncompilable {
                        op_index: idx,
                        details: format!("qubit {q} not placed (grid has {n} logic donors)"),
                    });
                }
            }
            if let CircuitOp::TwoQubit { a, b, .. } = op {
                if a == b {
                    return Err(Error::Uncompilable {
                        op_index: idx,
                        details: "two-qubit op needs distinct qubits".to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// One scheduled primitive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    /// Shuttle electron `electron` one cell.
    Move { electron: usize, from: Cell, to: Cell },
    /// Swap a nuclear spin with its donor electron.
    SwapEn { at: Cell },
    /// RF pulse at a donor (single- or two-spin, by pulse_ref).
    Pulse { at: Cell, pulse_ref: String },
    /// Singlet/triplet readout at a measurement donor.
    Readout { at: Cell },
    /// Produce a polarized electron at a measurement donor.
    Init { at: Cell },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedAction {
    #[serde(flatten)]
    pub action: Action,
    pub duration_s: f64,
}

/// Simultaneous actions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub actions: Vec<TimedAction>,
}

impl Step {
    pub fn duration_s(&self) -> f64 {
        self.actions.iter().map(|a| a.duration_s).fold(0.0, f64::max)
    }
}

/// A compiled, timed schedule. `electron_origins[e]` is where mobile
/// electron `e` first appears.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub steps: Vec<Step>,
    pub electron_origins: Vec<Cell>,
    /// Number of logical circuit ops this schedule realizes.
    pub logical_op_count: usize,
}

impl Schedule {
    pub fn makespan_s(&self) -> f64 {
        self.steps.iter().map(|s| s.duration_s()).sum()
    }
}

/// How a two-qubit op acts once the mediating electron reaches the target
/// donor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TwoQubitStrategy {
    /// A resonant two-spin RF pulse couples the arrived electron to the
    /// target nucleus directly.
    #[default]
    MediatedPulse,
    /// Swap the target nucleus onto its own electron first, compute, swap
    /// back.
    SwapInOut,
}

/// Durations per primitive action (s).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TimingModel {
    pub t_move_s: f64,
    pub t_swap_en_s: f64,
    pub t_pulse_s: f64,
    pub t_readout_s: f64,
    pub t_init_s: f64,
}

impl Default for TimingModel {
    fn default() -> Self {
        // Single-spin operations run at 10–100 kHz; readout is
        // microsecond-scale; shuttling is fast gate clocking.
        TimingModel {
            t_move_s: 1e-7,
            t_swap_en_s: 2e-5,
            t_pulse_s: 2e-5,
            t_readout_s: 1e-5,
            t_init_s: 1e-5,
        }
    }
}

impl TimingModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_move_s", self.t_move_s),
            ("t_swap_en_s", self.t_swap_en_s),
            ("t_pulse_s", self.t_pulse_s),
            ("t_readout_s", self.t_readout_s),
            ("t_init_s", self.t_init_s),
        ] {
            if !(v > 0.0) {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn duration(&self, action: &Action) -> f64 {
        match action {
            Action::Move { .. } => self.t_move_s,
            Action::SwapEn { .. } => self.t_swap_en_s,
            Action::Pulse { .. } => self.t_pulse_s,
            Action::Readout { .. } => self.t_readout_s,
            Action::Init { .. } => self.t_init_s,
        }
    }
}

/// Per-action error rates for the first-order budget.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ErrorRates {
    pub per_move: f64,
    pub per_swap_en: f64,
    pub per_pulse: f64,
    pub per_readout: f64,
    pub per_init: f64,
    /// Idle dephasing charged on the schedule wall time (Hz).
    pub dephasing_per_s: f64,
}

impl Default for ErrorRates {
    fn default() -> Self {
        ErrorRates {
            per_move: 1e-6,
            per_swap_en: 1e-5,
            per_pulse: 1e-5,
            per_readout: 1e-4,
            per_init: 1e-4,
            dephasing_per_s: 0.1,
        }
    }
}

/// Summary metrics of a schedule.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScheduleMetrics {
    pub makespan_s: f64,
    pub move_count: usize,
    pub pulse_count: usize,
    pub swap_en_count: usize,
    pub readout_count: usize,
    pub init_count: usize,
    /// Additive first-order error budget.
    pub error_budget: f64,
    /// Budget divided by the logical op count.
    pub budget_per_logical_op: f64,
    /// True when the per-op budget exceeds the 1e-4 error-correction
    /// threshold.
    pub exceeds_threshold: bool,
}

/// Violations found by [`validate_schedule`]. Violations are data, not
/// errors.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub step: usize,
    pub kind: &'static str,
    pub detail: String,
}

struct OccupancyTracker {
    /// Position of each mobile electron after the last processed step;
    /// `None` before it first moves and after it is absorbed (bound at a
    /// donor by a swap, or consumed by readout).
    positions: Vec<Option<Cell>>,
}

/// Check every schedule invariant; returns all violations with step indices.
pub fn validate_schedule(schedule: &Schedule, grid: &DeviceGrid) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut tracker = OccupancyTracker {
        positions: vec![None; schedule.electron_origins.len()],
    };
    let mut seen: Vec<bool> = vec![false; schedule.electron_origins.len()];
    // A swap or readout absorbs a mobile electron only once its worldline
    // has no further moves (mid-protocol swaps at a visited donor leave the
    // mediator in place).
    let mut last_move_step: Vec<usize> = vec![0; schedule.electron_origins.len()];
    for (si, step) in schedule.steps.iter().enumerate() {
        for a in &step.actions {
            if let Action::Move { electron, .. } = &a.action {
                if *electron < last_move_step.len() {
                    last_move_step[*electron] = si;
                }
            }
        }
    }

    for (si, step) in schedule.steps.iter().enumerate() {
        // Durations.
        for a in &step.actions {
            if !(a.duration_s > 0.0) {
                violations.push(Violation {
                    step: si,
                    kind: "nonpositive-duration",
                    detail: format!("{:?}", a.action),
                });
            }
        }
        // Moves: connectivity, traversability, source consistency.
        let mut claimed: Vec<(usize, Cell)> = Vec::new();
        for a in &step.actions {
            if let Action::Move { electron, from, to } = &a.action {
                let e = *electron;
                if e >= tracker.positions.len() {
                    violations.push(Violation {
                        step: si,
                        kind: "unknown-electron",
                        detail: format!("electron {e}"),
                    });
                    continue;
                }
                let current = if seen[e] {
                    tracker.positions[e]
                } else {
                    seen[e] = true;
                    tracker.positions[e] = Some(schedule.electron_origins[e]);
                    tracker.positions[e]
                };
                match current {
                    Some(cur) if cur == *from => {}
                    Some(cur) => violations.push(Violation {
                        step: si,
                        kind: "discontinuous-worldline",
                        detail: format!("electron {e} is at {cur}, move starts at {from}"),
                    }),
                    None => violations.push(Violation {
                        step: si,
                        kind: "parked-electron-moved",
                        detail: format!("electron {e}"),
                    }),
                }
                let adjacent = from.row.abs_diff(to.row) + from.col.abs_diff(to.col) == 1;
                if !adjacent {
                    violations.push(Violation {
                        step: si,
                        kind: "teleport",
                        detail: format!("move {from} → {to} is not 4-connected"),
                    });
                }
                let interior_ok = matches!(
                    grid.kind(*to),
                    CellKind::ShuttleGate | CellKind::LogicDonor | CellKind::MeasureDonor
                );
                if !interior_ok {
                    violations.push(Violation {
                        step: si,
                        kind: "bad-terrain",
                        detail: format!("move onto {} at {to}", grid.kind(*to).to_char()),
                    });
                }
                claimed.push((e, *from));
                claimed.push((e, *to));
                tracker.positions[e] = Some(*to);
            }
        }
        // Static electrons claim their cells too.
        for (e, p) in tracker.positions.iter().enumerate() {
            if let Some(c) = *p {
                if !claimed.iter().any(|(ce, _)| *ce == e) {
                    claimed.push((e, c));
                }
            }
        }
        // Exclusion: one electron per cell, no two electrons adjacent.
        for i in 0..claimed.len() {
            for j in (i + 1)..claimed.len() {
                let (ea, ca) = claimed[i];
                let (eb, cb) = claimed[j];
                if ea == eb {
                    continue;
                }
                if ca == cb {
                    violations.push(Violation {
                        step: si,
                        kind: "cell-conflict",
                        detail: format!("electrons {ea} and {eb} both claim {ca}"),
                    });
                } else if ca.row.abs_diff(cb.row) + ca.col.abs_diff(cb.col) == 1 {
                    violations.push(Violation {
                        step: si,
                        kind: "adjacency",
                        detail: format!(
                            "electrons {ea} at {ca} and {eb} at {cb} touch in step {si}"
                        ),
                    });
                }
            }
        }
        // Site actions must land on donors of the right kind; a swap or
        // readout at a mobile electron's cell absorbs it.
        for a in &step.actions {
            match &a.action {
                Action::SwapEn { at } | Action::Pulse { at, .. } => {
                    if !matches!(
                        grid.kind(*at),
                        CellKind::LogicDonor | CellKind::MeasureDonor
                    ) {
                        violations.push(Violation {
                            step: si,
                            kind: "bad-site",
                            detail: format!("spin action at non-donor cell {at}"),
                        });
                    }
                }
                Action::Readout { at } | Action::Init { at } => {
                    if grid.kind(*at) != CellKind::MeasureDonor {
                        violations.push(Violation {
                            step: si,
                            kind: "bad-site",
                            detail: format!("measure/init at non-measurement cell {at}"),
                        });
                    }
                }
                Action::Move { .. } => {}
            }
            if let Action::SwapEn { at } | Action::Readout { at } = &a.action {
                for (e, p) in tracker.positions.iter_mut().enumerate() {
                    if *p == Some(*at) && si >= last_move_step[e] {
                        *p = None;
                    }
                }
            }
        }
    }
    violations
}

/// Additive first-order error budget and counters.
pub fn error_budget(schedule: &Schedule, rates: &ErrorRates) -> ScheduleMetrics {
    let mut m = ScheduleMetrics {
        makespan_s: schedule.makespan_s(),
        move_count: 0,
        pulse_count: 0,
        swap_en_count: 0,
        readout_count: 0,
        init_count: 0,
        error_budget: 0.0,
        budget_per_logical_op: 0.0,
        exceeds_threshold: false,
    };
    for step in &schedule.steps {
        for a in &step.actions {
            match a.action {
                Action::Move { .. } => {
                    m.move_count += 1;
                    m.error_budget += rates.per_move;
                }
                Action::SwapEn { .. } => {
                    m.swap_en_count += 1;
                    m.error_budget += rates.per_swap_en;
                }
                Action::Pulse { .. } => {
                    m.pulse_count += 1;
                    m.error_budget += rates.per_pulse;
                }
                Action::Readout { .. } => {
                    m.readout_count += 1;
                    m.error_budget += rates.per_readout;
                }
                Action::Init { .. } => {
                    m.init_count += 1;
                    m.error_budget += rates.per_init;
                }
            }
        }
    }
    m.error_budget += rates.dephasing_per_s * m.makespan_s;
    m.budget_per_logical_op = m.error_budget / schedule.logical_op_count.max(1) as f64;
    m.exceeds_threshold = m.budget_per_logical_op > 1e-4;
    m
}

/// Compile a circuit onto the grid with the default (mediated-pulse)
/// two-qubit strategy. Deterministic: same inputs, same schedule.
pub fn compile_circuit(
    circuit: &Circuit,
    grid: &DeviceGrid,
    timing: &TimingModel,
) -> Result<Schedule> {
    compile_circuit_with(circuit, grid, timing, TwoQubitStrategy::default())
}

/// [`compile_circuit`] with an explicit two-qubit strategy.
pub fn compile_circuit_with(
    circuit: &Circuit,
    grid: &DeviceGrid,
    timing: &TimingModel,
    strategy: TwoQubitStrategy,
) -> Result<Schedule> {
    timing.validate()?;
    circuit.validate(grid)?;
    let qubits = grid.qubit_cells();
    let measures = grid.measure_cells();
    let mut builder = Builder {
        timing,
        schedule: Schedule {
            steps: Vec::new(),
            electron_origins: Vec::new(),
            logical_op_count: circuit.ops.len(),
        },
    };

    for (idx, op) in circuit.ops.iter().enumerate() {
        match op {
            CircuitOp::Rotate { qubit, pulse_ref } => {
                let at = qubits[*qubit];
                builder.push(Action::Pulse {
                    at,
                    pulse_ref: pulse_ref.clone(),
                });
            }
            CircuitOp::TwoQubit { a, b, pulse_ref } => {
                let src = qubits[*a];
                let dst = qubits[*b];
                let path = route_electron(grid, src, dst, &BTreeSet::new())
                    .map_err(|e| at_op(idx, e))?;
                let e = builder.new_electron(src);
                builder.push(Action::SwapEn { at: src });
                builder.push_moves(e, &path);
                match strategy {
                    TwoQubitStrategy::MediatedPulse => builder.push(Action::Pulse {
                        at: dst,
                        pulse_ref: pulse_ref.clone(),
                    }),
                    TwoQubitStrategy::SwapInOut => {
                        builder.push(Action::SwapEn { at: dst });
                        builder.push(Action::Pulse {
                            at: dst,
                            pulse_ref: pulse_ref.clone(),
                        });
                        builder.push(Action::SwapEn { at: dst });
                    }
                }
                let back: Vec<Cell> = path.iter().rev().cloned().collect();
                builder.push_moves(e, &back);
                builder.push(Action::SwapEn { at: src });
            }
            CircuitOp::Measure { qubit } => {
                let src = qubits[*qubit];
                let (m, path) = nearest_measure_site(grid, src, &measures)
                    .map_err(|e| at_op(idx, e))?;
                let e = builder.new_electron(src);
                builder.push(Action::SwapEn { at: src });
                builder.push_moves(e, &path);
                builder.push(Action::Readout { at: m });
            }
            CircuitOp::Init { qubit } => {
                let dst = qubits[*qubit];
                let (m, path_from_dst) = nearest_measure_site(grid, dst, &measures)
                    .map_err(|e| at_op(idx, e))?;
                let e = builder.new_electron(m);
                builder.push(Action::Init { at: m });
                let path: Vec<Cell> = path_from_dst.iter().rev().cloned().collect();
                builder.push_moves(e, &path);
                builder.push(Action::SwapEn { at: dst });
            }
        }
    }
    Ok(builder.schedule)
}

fn at_op(op_index: usize, e: Error) -> Error {
    match e {
        Error::Unroutable { from, to, cut } => Error::Uncompilable {
            op_index,
            details: format!("no route from {from} to {to}; blocking cut: {cut}"),
        },
        other => Error::Uncompilable {
            op_index,
            details: other.to_string(),
        },
    }
}

/// Closest measurement donor by legal route length, ties broken by cell
/// order. Returns the site and the path from `src` to it.
fn nearest_measure_site(
    grid: &DeviceGrid,
    src: Cell,
    measures: &[Cell],
) -> Result<(Cell, Vec<Cell>)> {
    let mut best: Option<(usize, Cell, Vec<Cell>)> = None;
    for &m in measures {
        if let Ok(path) = route_electron(grid, src, m, &BTreeSet::new()) {
            let better = match &best {
                None => true,
                Some((len, cell, _)) => path.len() < *len || (path.len() == *len && m < *cell),
            };
            if better {
                best = Some((path.len(), m, path));
            }
        }
    }
    match best {
        Some((_, m, path)) => Ok((m, path)),
        None => Err(Error::Unroutable {
            from: src.to_string(),
            to: "any measurement site".to_string(),
            cut: String::new(),
        }),
    }
}

struct Builder<'a> {
    timing: &'a TimingModel,
    schedule: Schedule,
}

impl Builder<'_> {
    fn new_electron(&mut self, origin: Cell) -> usize {
        self.schedule.electron_origins.push(origin);
        self.schedule.electron_origins.len() - 1
    }

    /// List scheduling in circuit order: every action depends on its
    /// predecessor within the op, and ops touching the same donor serialize
    /// through their swap steps, so each action opens a new step.
    fn push(&mut self, action: Action) {
        let duration_s = self.timing.duration(&action);
        self.schedule.steps.push(Step {
            actions: vec![TimedAction { action, duration_s }],
        });
    }

    fn push_moves(&mut self, electron: usize, path: &[Cell]) {
        for w in path.windows(2) {
            self.push(Action::Move {
                electron,
                from: w[0],
                to: w[1],
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_fig10_style() -> DeviceGrid {
        // Five logic donors with measurement sites nearby, gates elsewhere.
        DeviceGrid::parse(
            "GGGGGGGGG\n\
             GDGGDGGDG\n\
             GGGGGGGGG\n\
             GMGGGGGMG\n\
             GGGGGGGGG\n\
             GDGGGGDGG\n\
             GGGGGGGGG",
        )
        .unwrap()
    }

    #[test]
    fn empty_circuit_compiles_empty() {
        let g = grid_fig10_style();
        let s = compile_circuit(&Circuit::default(), &g, &TimingModel::default()).unwrap();
        assert!(s.steps.is_empty());
        assert_eq!(s.makespan_s(), 0.0);
        assert!(validate_schedule(&s, &g).is_empty());
    }

    #[test]
    fn two_qubit_op_expands_to_protocol() {
        let g = grid_fig10_style();
        let circuit = Circuit {
            ops: vec![CircuitOp::TwoQubit {
                a: 0,
                b: 1,
                pulse_ref: "cz".to_string(),
            }],
        };
        let s = compile_circuit(&circuit, &g, &TimingModel::default()).unwrap();
        let swaps = s
            .steps
            .iter()
            .flat_map(|st| &st.actions)
            .filter(|a| matches!(a.action, Action::SwapEn { .. }))
            .count();
        let moves = s
            .steps
            .iter()
            .flat_map(|st| &st.actions)
            .filter(|a| matches!(a.action, Action::Move { .. }))
            .count();
        assert_eq!(swaps, 2);
        assert!(moves >= 2, "moves = {moves}");
        assert!(validate_schedule(&s, &g).is_empty());
    }

    #[test]
    fn defect_reroute_increases_makespan() {
        let mut g = grid_fig10_style();
        let circuit = Circuit {
            ops: vec![CircuitOp::TwoQubit {
                a: 0,
                b: 1,
                pulse_ref: "cz".to_string(),
            }],
        };
        let base = compile_circuit(&circuit, &g, &TimingModel::default()).unwrap();
        // Break a gate on the straight route between donors (1,1) → (1,4).
        g.set_kind(Cell::new(1, 2), CellKind::Defect);
        let rerouted = compile_circuit(&circuit, &g, &TimingModel::default()).unwrap();
        assert!(validate_schedule(&rerouted, &g).is_empty());
        assert!(rerouted.makespan_s() >= base.makespan_s());
        assert!(rerouted.makespan_s() > 0.0);
    }

    #[test]
    fn measure_routes_to_measure_site() {
        let g = grid_fig10_style();
        let circuit = Circuit {
            ops: vec![CircuitOp::Measure { qubit: 0 }],
        };
        let s = compile_circuit(&circuit, &g, &TimingModel::default()).unwrap();
        let readouts: Vec<&TimedAction> = s
            .steps
            .iter()
            .flat_map(|st| &st.actions)
            .filter(|a| matches!(a.action, Action::Readout { .. }))
            .collect();
        assert_eq!(readouts.len(), 1);
        if let Action::Readout { at } = readouts[0].action {
            assert_eq!(g.kind(at), CellKind::MeasureDonor);
        }
        assert!(validate_schedule(&s, &g).is_empty());
    }

    #[test]
    fn init_fetches_polarized_electron() {
        let g = grid_fig10_style();
        let circuit = Circuit {
            ops: vec![CircuitOp::Init { qubit: 2 }],
        };
        let s = compile_circuit(&circuit, &g, &TimingModel::default()).unwrap();
        assert!(matches!(
            s.steps[0].actions[0].action,
            Action::Init { .. }
        ));
        assert!(matches!(
            s.steps.last().unwrap().actions[0].action,
            Action::SwapEn { .. }
        ));
        assert!(validate_schedule(&s, &g).is_empty());
    }

    #[test]
    fn unroutable_op_is_reported_with_index() {
        let g = DeviceGrid::parse("DGXGD\nGGXGG").unwrap();
        let circuit = Circuit {
            ops: vec![
                CircuitOp::Rotate {
                    qubit: 0,
                    pulse_ref: "x".to_string(),
                },
                CircuitOp::TwoQubit {
                    a: 0,
                    b: 1,
                    pulse_ref: "cz".to_string(),
                },
            ],
        };
        match compile_circuit(&circuit, &g, &TimingModel::default()) {
            Err(Error::Uncompilable { op_index, details }) => {
                assert_eq!(op_index, 1);
                assert!(details.contains("blocking cut"), "{details}");
            }
            other => panic!("expected uncompilable, got {other:?}"),
        }
    }

    #[test]
    fn validator_catches_adjacency() {
        let g = DeviceGrid::parse("GGGG").unwrap();
        let s = Schedule {
            steps: vec![Step {
                actions: vec![
                    TimedAction {
                        action: Action::Move {
                            electron: 0,
                            from: Cell::new(0, 0),
                            to: Cell::new(0, 1),
                        },
                        duration_s: 1e-7,
                    },
                    TimedAction {
                        action: Action::Move {
                            electron: 1,
                            from: Cell::new(0, 3),
                            to: Cell::new(0, 2),
                        },
                        duration_s: 1e-7,
                    },
                ],
            }],
            electron_origins: vec![Cell::new(0, 0), Cell::new(0, 3)],
            logical_op_count: 0,
        };
        let v = validate_schedule(&s, &g);
        assert!(v.iter().any(|v| v.kind == "adjacency"), "{v:?}");
    }

    #[test]
    fn validator_catches_teleport() {
        let g = DeviceGrid::parse("GGGG").unwrap();
        let s = Schedule {
            steps: vec![Step {
                actions: vec![TimedAction {
                    action: Action::Move {
                        electron: 0,
                        from: Cell::new(0, 0),
                        to: Cell::new(0, 2),
                    },
                    duration_s: 1e-7,
                }],
            }],
            electron_origins: vec![Cell::new(0, 0)],
            logical_op_count: 0,
        };
        let v = validate_schedule(&s, &g);
        assert!(v.iter().any(|v| v.kind == "teleport"), "{v:?}");
    }

    #[test]
    fn validator_accepts_hand_built_legal_schedule() {
        let g = DeviceGrid::parse("DGGM").unwrap();
        let s = Schedule {
            steps: vec![
                Step {
                    actions: vec![TimedAction {
                        action: Action::SwapEn {
                            at: Cell::new(0, 0),
                        },
                        duration_s: 2e-5,
                    }],
                },
                Step {
                    actions: vec![TimedAction {
                        action: Action::Move {
                            electron: 0,
                            from: Cell::new(0, 0),
                            to: Cell::new(0, 1),
                        },
                        duration_s: 1e-7,
                    }],
                },
            ],
            electron_origins: vec![Cell::new(0, 0)],
            logical_op_count: 1,
        };
        assert!(validate_schedule(&s, &g).is_empty());
    }

    #[test]
    fn budget_zero_rates_and_linearity() {
        let g = grid_fig10_style();
        let circuit = Circuit {
            ops: vec![CircuitOp::TwoQubit {
                a: 0,
                b: 1,
                pulse_ref: "cz".to_string(),
            }],
        };
        let s = compile_circuit(&circuit, &g, &TimingModel::default()).unwrap();
        let zero = ErrorRates {
            per_move: 0.0,
            per_swap_en: 0.0,
            per_pulse: 0.0,
            per_readout: 0.0,
            per_init: 0.0,
            dephasing_per_s: 0.0,
        };
        assert_eq!(error_budget(&s, &zero).error_budget, 0.0);

        // Doubling durations doubles exactly the dephasing contribution.
        let rates = ErrorRates::default();
        let m1 = error_budget(&s, &rates);
        let timing2 = TimingModel {
            t_move_s: 2e-7,
            t_swap_en_s: 4e-5,
            t_pulse_s: 4e-5,
            t_readout_s: 2e-5,
            t_init_s: 2e-5,
        };
        let s2 = compile_circuit(&circuit, &g, &timing2).unwrap();
        let m2 = error_budget(&s2, &rates);
        let static1 = m1.error_budget - rates.dephasing_per_s * m1.makespan_s;
        let static2 = m2.error_budget - rates.dephasing_per_s * m2.makespan_s;
        assert!((static1 - static2).abs() < 1e-15);
        assert!((m2.makespan_s - 2.0 * m1.makespan_s).abs() < 1e-12);
    }

    #[test]
    fn budget_additive_under_concatenation() {
        let g = grid_fig10_style();
        let one = Circuit {
            ops: vec![CircuitOp::Rotate {
                qubit: 0,
                pulse_ref: "x".to_string(),
            }],
        };
        let two = Circuit {
            ops: vec![
                CircuitOp::Rotate {
                    qubit: 0,
                    pulse_ref: "x".to_string(),
                },
                CircuitOp::Rotate {
                    qubit: 0,
                    pulse_ref: "x".to_string(),
                },
            ],
        };
        let rates = ErrorRates::default();
        let b1 = error_budget(
            &compile_circuit(&one, &g, &TimingModel::default()).unwrap(),
            &rates,
        );
        let b2 = error_budget(
            &compile_circuit(&two, &g, &TimingModel::default()).unwrap(),
            &rates,
        );
        assert!((b2.error_budget - 2.0 * b1.error_budget).abs() < 1e-15);
    }

    #[test]
    fn swap_in_out_strategy_selectable() {
        let g = grid_fig10_style();
        let circuit = Circuit {
            ops: vec![CircuitOp::TwoQubit {
                a: 0,
                b: 1,
                pulse_ref: "cz".to_string(),
            }],
        };
        let timing = TimingModel::default();
        let mediated =
            compile_circuit_with(&circuit, &g, &timing, TwoQubitStrategy::MediatedPulse).unwrap();
        let swapped =
            compile_circuit_with(&circuit, &g, &timing, TwoQubitStrategy::SwapInOut).unwrap();
        let count = |s: &Schedule| {
            s.steps
                .iter()
                .flat_map(|st| &st.actions)
                .filter(|a| matches!(a.action, Action::SwapEn { .. }))
                .count()
        };
        assert_eq!(count(&mediated), 2);
        assert_eq!(count(&swapped), 4);
        assert!(validate_schedule(&swapped, &g).is_empty());
        assert!(swapped.makespan_s() > mediated.makespan_s());
    }

    #[test]
    fn compile_is_deterministic() {
        let g = grid_fig10_style();
        let circuit = Circuit {
            ops: vec![
                CircuitOp::Init { qubit: 0 },
                CircuitOp::TwoQubit {
                    a: 0,
                    b: 3,
                    pulse_ref: "cz".to_string(),
                },
                CircuitOp::Measure { qubit: 3 },
            ],
        };
        let a = compile_circuit(&circuit, &g, &TimingModel::default()).unwrap();
        let b = compile_circuit(&circuit, &g, &TimingModel::default()).unwrap();
        assert_eq!(a, b);
        assert!(validate_schedule(&a, &g).is_empty());
    }
}
