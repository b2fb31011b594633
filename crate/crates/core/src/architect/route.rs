//! Single-electron routing over shuttle gates.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::grid::{Cell, CellKind, DeviceGrid};

/// Shortest 4-connected path from `src` to `dst` whose interior runs on
/// shuttle-gate cells, avoiding defects, occupied cells and every neighbor
/// of an occupied cell (exchange-contact exclusion, radius 1). Endpoints
/// may be donor cells. Ties break lexicographically by (row, col) through
/// the BFS expansion order, so routes are deterministic.
///
/// On failure the error lists the blocking cut: the blocked cells fencing
/// the region reachable from `src`.
pub fn route_electron(
    grid: &DeviceGrid,
    src: Cell,
    dst: Cell,
    occupied: &BTreeSet<Cell>,
) -> Result<Vec<Cell>> {
    route_electron_with_radius(grid, src, dst, occupied, 1)
}

/// [`route_electron`] with a configurable exclusion radius (Manhattan
/// distance an occupied cell poisons around itself; 0 excludes only the
/// occupied cells).
pub fn route_electron_with_radius(
    grid: &DeviceGrid,
    src: Cell,
    dst: Cell,
    occupied: &BTreeSet<Cell>,
    exclusion_radius: usize,
) -> Result<Vec<Cell>> {
    if occupied.contains(&src) {
        return Err(Error::config(format!(
            "source {src} is listed as occupied"
        )));
    }
    for &cell in [src, dst].iter() {
        let kind = grid.kind(cell);
        let on_or_adjacent = kind == CellKind::ShuttleGate
            || grid
                .neighbors(cell)
                .any(|n| grid.kind(n) == CellKind::ShuttleGate);
        if !on_or_adjacent {
            return Err(Error::config(format!(
                "cell {cell} is neither on nor adjacent to a shuttle gate"
            )));
        }
        if kind == CellKind::Defect {
            return Err(Error::config(format!("cell {cell} is a defect")));
        }
    }

    let blocked = |cell: Cell| -> bool {
        grid.kind(cell) == CellKind::Defect
            || occupied.iter().any(|o| {
                o.row.abs_diff(cell.row) + o.col.abs_diff(cell.col) <= exclusion_radius
            })
    };
    let traversable = |cell: Cell| -> bool {
        cell == dst || (grid.kind(cell) == CellKind::ShuttleGate && !blocked(cell))
    };

    if blocked(src) {
        return Err(unroutable(grid, src, dst, &[src]));
    }
    if blocked(dst) {
        return Err(unroutable(grid, src, dst, &[dst]));
    }
    if src == dst {
        return Ok(vec![src]);
    }

    let mut parent: std::collections::BTreeMap<Cell, Cell> = std::collections::BTreeMap::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(src);
    parent.insert(src, src);
    while let Some(cur) = queue.pop_front() {
        if cur == dst {
            let mut path = vec![dst];
            let mut c = dst;
            while c != src {
                c = parent[&c];
                path.push(c);
            }
            path.reverse();
            return Ok(path);
        }
        for n in grid.neighbors(cur) {
            if !parent.contains_key(&n) && traversable(n) {
                parent.insert(n, cur);
                queue.push_back(n);
            }
        }
    }

    // Collect the blocking cut: blocked or non-gate cells adjacent to the
    // reached region.
    let mut cut = BTreeSet::new();
    for &cell in parent.keys() {
        for n in grid.neighbors(cell) {
            if !parent.contains_key(&n) && !traversable(n) {
                cut.insert(n);
            }
        }
    }
    let cut: Vec<Cell> = cut.into_iter().collect();
    Err(unroutable(grid, src, dst, &cut))
}

fn unroutable(_grid: &DeviceGrid, src: Cell, dst: Cell, cut: &[Cell]) -> Error {
    Error::Unroutable {
        from: src.to_string(),
        to: dst.to_string(),
        cut: cut
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    }
}
