//! Property tests for the structural invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;

use donorsim_core::architect::{
    compile_circuit, route_electron, validate_schedule, Cell, CellKind, Circuit, CircuitOp,
    DeviceGrid, TimingModel,
};
use donorsim_core::constants::{MU_B_HZ_PER_T, MU_N_HZ_PER_T};
use donorsim_core::coupling::exchange_j;
use donorsim_core::spin::build_single_donor_hamiltonian;
use donorsim_core::thermo::fridge_stage;
use donorsim_core::{eigensystem, DonorSpecies};

fn closed_form_levels(a_hz: f64, g_n: f64, b: f64) -> [f64; 4] {
    let e = MU_B_HZ_PER_T * b;
    let n = g_n * MU_N_HZ_PER_T * b;
    let s = ((e + n) * (e + n) + 4.0 * a_hz * a_hz).sqrt();
    let mut lv = [e - n + a_hz, -e + n + a_hz, -a_hz + s, -a_hz - s];
    lv.sort_by(|x, y| x.partial_cmp(y).unwrap());
    lv
}

proptest! {
    #[test]
    fn hamiltonian_hermitian_and_oracle_equivalent(
        a_hz in 1e6f64..1e8,
        g_n in 0.1f64..5.0,
        strain in 0.1f64..1.0,
        b in 0.0f64..10.0,
    ) {
        let mut sp = DonorSpecies::si_p();
        sp.hyperfine_hz = a_hz;
        sp.g_n = g_n;
        sp.strain_factor = strain;
        let h = build_single_donor_hamiltonian(&sp, b).unwrap();
        prop_assert!(h.hermiticity_defect() < 1e-12);
        let spec = eigensystem(&h).unwrap();
        prop_assert!(spec.trace_defect(&h) < 1e-9);
        let oracle = closed_form_levels(sp.effective_hyperfine_hz(), g_n, b);
        let scale = oracle.iter().fold(0.0f64, |m, l| m.max(l.abs())).max(a_hz);
        for (got, want) in spec.levels.iter().zip(&oracle) {
            prop_assert!((got - want).abs() / scale < 1e-10);
        }
    }

    #[test]
    fn exchange_positive_and_decreasing_past_stationary_point(
        e_b in 0.01f64..0.05,
        a_b_angstrom in 15.0f64..30.0,
        x1 in 1.25f64..20.0,
        dx in 0.01f64..5.0,
    ) {
        let a_b = a_b_angstrom * 1e-10;
        let j1 = exchange_j(x1 * a_b, e_b, a_b).unwrap();
        let j2 = exchange_j((x1 + dx) * a_b, e_b, a_b).unwrap();
        prop_assert!(j1 > 0.0 && j2 > 0.0);
        prop_assert!(j2 < j1, "J must decrease beyond r = 5a_B/4");
    }

    #[test]
    fn fridge_map_improves_and_is_odd(p in -1.0f64..1.0) {
        let r = fridge_stage(p).unwrap();
        prop_assert!(r.p_out.abs() <= 1.0 + 1e-12);
        prop_assert!((r.pass_fraction + r.rejected_fraction - 1.0).abs() < 1e-12);
        prop_assert!((r.magnetization_in - r.magnetization_out_plus_sink).abs() < 1e-12);
        if p > 0.0 && p < 1.0 {
            prop_assert!(r.p_out > p, "monotone improvement");
        }
        if p.abs() < 1e-12 || (p.abs() - 1.0).abs() < 1e-12 {
            prop_assert!((r.p_out - p).abs() < 1e-9, "fixed points at 0, ±1");
        }
        let odd = fridge_stage(-p).unwrap();
        prop_assert!((r.p_out + odd.p_out).abs() < 1e-12);
    }
}

/// Independent flood-fill shortest-path oracle under the router's
/// traversability rule (interior cells must be gates).
fn bfs_oracle(grid: &DeviceGrid, src: Cell, dst: Cell) -> Option<usize> {
    let mut dist = std::collections::BTreeMap::new();
    let mut queue = std::collections::VecDeque::new();
    dist.insert(src, 0usize);
    queue.push_back(src);
    while let Some(cur) = queue.pop_front() {
        if cur == dst {
            return Some(dist[&cur]);
        }
        let d = dist[&cur];
        for n in grid.neighbors(cur) {
            let ok = n == dst || grid.kind(n) == CellKind::ShuttleGate;
            if ok && !dist.contains_key(&n) {
                dist.insert(n, d + 1);
                queue.push_back(n);
            }
        }
    }
    None
}

/// Deterministic grid from a byte pattern: mostly gates with scattered
/// defects and holes.
fn grid_from_bytes(width: usize, height: usize, bytes: &[u8]) -> DeviceGrid {
    let mut text = String::new();
    for r in 0..height {
        for c in 0..width {
            let b = bytes[(r * width + c) % bytes.len()];
            text.push(match b % 10 {
                0 => 'X',
                1 => '.',
                _ => 'G',
            });
        }
        text.push('\n');
    }
    DeviceGrid::parse(&text).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn routing_is_bfs_optimal(
        width in 3usize..12,
        height in 3usize..12,
        bytes in proptest::collection::vec(0u8..255, 16..64),
        src_pick in 0usize..1000,
        dst_pick in 0usize..1000,
    ) {
        let grid = grid_from_bytes(width, height, &bytes);
        let gates: Vec<Cell> = grid.cells_of_kind(CellKind::ShuttleGate).collect();
        prop_assume!(gates.len() >= 2);
        let src = gates[src_pick % gates.len()];
        let dst = gates[dst_pick % gates.len()];
        prop_assume!(src != dst);
        let oracle = bfs_oracle(&grid, src, dst);
        match route_electron(&grid, src, dst, &BTreeSet::new()) {
            Ok(path) => {
                prop_assert_eq!(Some(path.len() - 1), oracle);
                // Path is connected and on gates.
                for w in path.windows(2) {
                    let d = w[0].row.abs_diff(w[1].row) + w[0].col.abs_diff(w[1].col);
                    prop_assert_eq!(d, 1);
                }
            }
            Err(_) => prop_assert!(oracle.is_none(), "router failed but oracle found a path"),
        }
    }

    #[test]
    fn compiled_schedules_always_validate(
        ops_seed in proptest::collection::vec((0usize..4, 0usize..5, 0usize..5), 1..6),
    ) {
        let grid = DeviceGrid::parse(
            "GGGGGGGGG\n\
             GDGGDGGDG\n\
             GGGGGGGGG\n\
             GMGGGGGMG\n\
             GGGGGGGGG\n\
             GDGGGGDGG\n\
             GGGGGGGGG",
        ).unwrap();
        let n_qubits = grid.qubit_cells().len();
        let ops: Vec<CircuitOp> = ops_seed.iter().map(|(kind, qa, qb)| {
            let a = qa % n_qubits;
            let b = qb % n_qubits;
            match kind {
                0 => CircuitOp::Rotate { qubit: a, pulse_ref: "r".to_string() },
                1 => CircuitOp::TwoQubit {
                    a,
                    b: if a == b { (a + 1) % n_qubits } else { b },
                    pulse_ref: "cz".to_string(),
                },
                2 => CircuitOp::Measure { qubit: a },
                _ => CircuitOp::Init { qubit: a },
            }
        }).collect();
        let circuit = Circuit { ops };
        let schedule = compile_circuit(&circuit, &grid, &TimingModel::default()).unwrap();
        let violations = validate_schedule(&schedule, &grid);
        prop_assert!(violations.is_empty(), "violations: {violations:?}");
        prop_assert!(schedule.makespan_s() > 0.0);
    }
}

#[test]
fn defect_monotonicity_exhaustive_small_grid() {
    // Adding any single defect never shortens the optimal route.
    let base = DeviceGrid::parse("GGGGG\nGGGGG\nGGGGG\nGGGGG\nGGGGG").unwrap();
    let src = Cell::new(0, 0);
    let dst = Cell::new(4, 4);
    let baseline = bfs_oracle(&base, src, dst).unwrap();
    for r in 0..5 {
        for c in 0..5 {
            let cell = Cell::new(r, c);
            if cell == src || cell == dst {
                continue;
            }
            let mut g = base.clone();
            g.set_kind(cell, CellKind::Defect);
            match route_electron(&g, src, dst, &BTreeSet::new()) {
                Ok(path) => assert!(
                    path.len() > baseline,
                    "defect at {cell} shortened the route"
                ),
                Err(_) => panic!("single defect cannot disconnect this grid"),
            }
        }
    }
}
