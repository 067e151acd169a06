use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[−L, L]` with an odd number of nodes and `x = 0` a node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub half_width: f64,
    pub h: f64,
    /// Number of cells on each half-line; `nodes = 2·half_cells + 1`.
    half_cells: usize,
}

impl Grid {
    /// The spacing is shrunk (never grown) to the nearest value that puts
    /// a node exactly on `±half_width`.
    pub fn new(half_width: f64, h: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing {h} must be positive")));
        }
        if h > half_width {
            return Err(Error::InvalidGrid(format!("spacing {h} exceeds half width {half_width}")));
        }
        let half_cells = (half_width / h - 1e-9).ceil().max(1.0) as usize;
        Ok(Grid { half_width, h: half_width / half_cells as f64, half_cells })
    }

    pub fn nodes(&self) -> usize {
        2 * self.half_cells + 1
    }

    pub fn half_cells(&self) -> usize {
        self.half_cells
    }

    /// Index of the node at `x = 0`.
    pub fn center(&self) -> usize {
        self.half_cells
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.half_cells as f64) * self.h
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.nodes()).map(|i| self.x(i)).collect()
    }

    /// Nearest node index to `x`, clamped to the grid.
    pub fn index_of(&self, x: f64) -> usize {
        let i = (x / self.h).round() + self.half_cells as f64;
        i.clamp(0.0, (self.nodes() - 1) as f64) as usize
    }
}

/// Node values on a [`Grid`], vanishing at both ends.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.nodes()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite value at node {i}")));
        }
        let n = values.len();
        if values[0] != 0.0 || values[n - 1] != 0.0 {
            return Err(Error::InvalidGrid("boundary values must vanish".into()));
        }
        Ok(GridFunction { grid, values })
    }

    /// Samples `f` at the interior nodes; the end values are set to zero.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let n = grid.nodes();
        let values = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.0 } else { f(grid.x(i)) })
            .collect();
        GridFunction { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction { grid, values: vec![0.0; grid.nodes()] }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, &b| a.max(b.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        GridFunction { grid: self.grid, values: self.values.iter().map(|v| s * v).collect() }
    }

    /// Linear interpolation between nodes; zero outside the grid.
    pub fn interpolate(&self, x: f64) -> f64 {
        let y = x / self.grid.h + self.grid.half_cells() as f64;
        if y < 0.0 || y > (self.grid.nodes() - 1) as f64 {
            return 0.0;
        }
        let i = (y.floor() as usize).min(self.grid.nodes() - 2);
        let t = y - i as f64;
        (1.0 - t) * self.values[i] + t * self.values[i + 1]
    }

    /// `∫ x u² / ∫ u²`.
    pub fn center_of_mass(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (i, v) in self.values.iter().enumerate() {
            num += self.grid.x(i) * v * v;
            den += v * v;
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }
}
