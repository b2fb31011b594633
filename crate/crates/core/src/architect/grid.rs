//! Device grid: cell map and adjacency.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What occupies one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellKind {
    /// Donor used for logic (qubit site). Text map: `D`.
    LogicDonor,
    /// Donor under a measurement/refrigeration device. Text map: `M`.
    MeasureDonor,
    /// Electron shuttle gate. Text map: `G`.
    ShuttleGate,
    /// Known-bad cell, never traversed. Text map: `X`.
    Defect,
    /// Nothing here. Text map: `.`.
    Empty,
}

impl CellKind {
    fn from_char(c: char) -> Option<CellKind> {
        match c {
            'D' => Some(CellKind::LogicDonor),
            'M' => Some(CellKind::MeasureDonor),
            'G' => Some(CellKind::ShuttleGate),
            'X' => Some(CellKind::Defect),
            '.' => Some(CellKind::Empty),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            CellKind::LogicDonor => 'D',
            CellKind::MeasureDonor => 'M',
            CellKind::ShuttleGate => 'G',
            CellKind::Defect => 'X',
            CellKind::Empty => '.',
        }
    }
}

/// Grid coordinate, row-major. Ordering is lexicographic (row, col), which
/// fixes all routing tie-breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Rectangular cell map with 4-connected adjacency. Defects are fixed for
/// the lifetime of the grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceGrid {
    pub width: usize,
    pub height: usize,
    cells: Vec<CellKind>,
}

impl DeviceGrid {
    /// Parse the one-char-per-cell text map (rows separated by newlines).
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if rows.is_empty() {
            return Err(Error::config("grid map is empty".to_string()));
        }
        let width = rows[0].chars().count();
        let height = rows.len();
        let mut cells = Vec::with_capacity(width * height);
        for (r, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(Error::config(format!(
                    "grid row {r} has {} cells, expected {width}",
                    row.chars().count()
                )));
            }
            for (c, ch) in row.chars().enumerate() {
                cells.push(CellKind::from_char(ch).ok_or_else(|| {
                    Error::config(format!("unknown cell character '{ch}' at ({r},{c})"))
                })?);
            }
        }
        let grid = DeviceGrid {
            width,
            height,
            cells,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Every logic donor needs at least one adjacent shuttle gate, or it
    /// can never exchange information with the rest of the device.
    pub fn validate(&self) -> Result<()> {
        for cell in self.cells_of_kind(CellKind::LogicDonor) {
            let ok = self
                .neighbors(cell)
                .any(|n| self.kind(n) == CellKind::ShuttleGate);
            if !ok {
                return Err(Error::config(format!(
                    "logic donor at {cell} has no adjacent shuttle gate"
                )));
            }
        }
        Ok(())
    }

    pub fn in_bounds(&self, row: isize, col: isize) -> bool {
        row >= 0 && col >= 0 && (row as usize) < self.height && (col as usize) < self.width
    }

    pub fn kind(&self, cell: Cell) -> CellKind {
        self.cells[cell.row * self.width + cell.col]
    }

    pub fn set_kind(&mut self, cell: Cell, kind: CellKind) {
        self.cells[cell.row * self.width + cell.col] = kind;
    }

    /// 4-connected in-bounds neighbors in lexicographic order.
    pub fn neighbors(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        const OFFS: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
        OFFS.iter().filter_map(move |(dr, dc)| {
            let (r, c) = (cell.row as isize + dr, cell.col as isize + dc);
            self.in_bounds(r, c)
                .then(|| Cell::new(r as usize, c as usize))
        })
    }

    pub fn cells_of_kind(&self, kind: CellKind) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height)
            .flat_map(move |r| (0..self.width).map(move |c| Cell::new(r, c)))
            .filter(move |&cell| self.kind(cell) == kind)
    }

    /// Logic-donor cells in row-major order; the index is the qubit id.
    pub fn qubit_cells(&self) -> Vec<Cell> {
        self.cells_of_kind(CellKind::LogicDonor).collect()
    }

    pub fn measure_cells(&self) -> Vec<Cell> {
        self.cells_of_kind(CellKind::MeasureDonor).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in 0..self.height {
            for c in 0..self.width {
                out.push(self.kind(Cell::new(r, c)).to_char());
            }
            out.push('\n');
        }
        out
    }
}
