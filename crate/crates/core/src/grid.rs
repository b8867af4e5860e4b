use crate::error::{invalid, Result};

/// Uniform 1D lattice with a fixed time step.
///
/// Node positions are always computed from the index, never accumulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    nx: usize,
    dx: f64,
    dt: f64,
}

pub const MIN_NODES: usize = 8;

impl Grid {
    /// Builds a grid from its extent, node count and time step.
    pub fn new(x_min: f64, x_max: f64, nx: usize, dt: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(invalid(format!(
                "grid extent [{x_min}, {x_max}] must be finite with x_max > x_min"
            )));
        }
        if nx < MIN_NODES {
            return Err(invalid(format!("nx = {nx} must be at least {MIN_NODES}")));
        }
        let dx = (x_max - x_min) / (nx - 1) as f64;
        let cfl = dt / dx;
        if !(cfl > 0.0 && cfl <= 1.0 + 1e-12) {
            return Err(invalid(format!(
                "cfl = dt/dx = {cfl} must lie in (0, 1]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            nx,
            dx,
            dt,
        })
    }

    /// Builds a grid whose time step is `cfl * dx`.
    pub fn with_cfl(x_min: f64, x_max: f64, nx: usize, cfl: f64) -> Result<Self> {
        if nx < MIN_NODES {
            return Err(invalid(format!("nx = {nx} must be at least {MIN_NODES}")));
        }
        let dx = (x_max - x_min) / (nx - 1) as f64;
        Self::new(x_min, x_max, nx, cfl * dx)
    }

    /// Builds a grid with spacing as close as possible to `dx` (rounded to a
    /// whole number of cells).
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64, cfl: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(invalid(format!("dx = {dx} must be positive")));
        }
        let cells = ((x_max - x_min) / dx).round().max(1.0) as usize;
        Self::with_cfl(x_min, x_max, cells + 1, cfl)
    }

    /// Same extent with every cell split in two (dx → dx/2), at the same cfl.
    pub fn refined(&self) -> Self {
        Self::with_cfl(self.x_min, self.x_max, 2 * self.nx - 1, self.cfl())
            .expect("refinement of a valid grid is valid")
    }

    /// Same lattice shifted by `k` nodes.
    pub fn shifted(&self, k: isize) -> Self {
        let off = k as f64 * self.dx;
        Self {
            x_min: self.x_min + off,
            x_max: self.x_max + off,
            ..*self
        }
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn cfl(&self) -> f64 {
        self.dt / self.dx
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nx).map(move |i| self.x(i))
    }

    pub fn same_lattice(&self, other: &Grid) -> bool {
        self.nx == other.nx
            && (self.x_min - other.x_min).abs() <= 1e-12 * self.dx
            && (self.dx - other.dx).abs() <= 1e-12 * self.dx
    }

    pub(crate) fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.nx {
            return Err(invalid(format!(
                "{what} has length {len}, grid has {} nodes",
                self.nx
            )));
        }
        Ok(())
    }
}
