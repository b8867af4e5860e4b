use crate::error::{invalid, PcfError, Result};
use crate::grid::Grid;

/// Samples of (Λ̃, ∂tΛ̃, φ, ∂tφ) at one time level around the constant
/// background λ, with Λ = λ + Λ̃.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub lambda_bg: f64,
    pub ltil: Vec<f64>,
    pub ltil_t: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_t: Vec<f64>,
}

/// Which of the two evolved fields an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSelector {
    Ltil,
    Phi,
}

impl FieldState {
    pub fn new(
        t: f64,
        lambda_bg: f64,
        ltil: Vec<f64>,
        ltil_t: Vec<f64>,
        phi: Vec<f64>,
        phi_t: Vec<f64>,
    ) -> Result<Self> {
        let s = Self {
            t,
            lambda_bg,
            ltil,
            ltil_t,
            phi,
            phi_t,
        };
        s.validate()?;
        Ok(s)
    }

    /// Background state: Λ ≡ λ, φ ≡ phi0, all velocities zero.
    pub fn background(grid: &Grid, lambda_bg: f64, phi0: f64, t: f64) -> Result<Self> {
        let n = grid.nx();
        Self::new(
            t,
            lambda_bg,
            vec![0.0; n],
            vec![0.0; n],
            vec![phi0; n],
            vec![0.0; n],
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_bg.is_finite() && self.lambda_bg > 0.0) {
            return Err(invalid(format!(
                "background lambda = {} must be finite and positive",
                self.lambda_bg
            )));
        }
        if !self.t.is_finite() {
            return Err(invalid("time must be finite"));
        }
        let n = self.ltil.len();
        for (name, arr) in self.arrays() {
            if arr.len() != n {
                return Err(invalid(format!(
                    "array {name} has length {}, expected {n}",
                    arr.len()
                )));
            }
            if let Some(i) = arr.iter().position(|v| !v.is_finite()) {
                return Err(PcfError::NumericalOverflow { node: i, what: name });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ltil.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ltil.is_empty()
    }

    pub(crate) fn arrays(&self) -> [(&'static str, &[f64]); 4] {
        [
            ("ltil", &self.ltil),
            ("ltil_t", &self.ltil_t),
            ("phi", &self.phi),
            ("phi_t", &self.phi_t),
        ]
    }

    /// Total field Λ = λ + Λ̃ at node `i`.
    #[inline]
    pub fn lambda_total(&self, i: usize) -> f64 {
        self.lambda_bg + self.ltil[i]
    }

    pub fn lambda_total_vec(&self) -> Vec<f64> {
        self.ltil.iter().map(|l| self.lambda_bg + l).collect()
    }

    /// Minimum of Λ over the grid, with its node.
    pub fn min_lambda(&self) -> (usize, f64) {
        (0..self.len())
            .map(|i| (i, self.lambda_total(i)))
            .fold((0, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc })
    }

    pub fn sup_ltil(&self) -> f64 {
        self.ltil.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Λ must stay on the positive side of the floor. Since λ > 0 and Λ
    /// is continuous, reaching Λ ≤ −floor requires crossing the floor first,
    /// so a signed check is used.
    pub fn check_regular(&self, floor: f64) -> Result<()> {
        let (node, value) = self.min_lambda();
        if value < floor {
            return Err(PcfError::SingularityApproach { node, value, floor });
        }
        Ok(())
    }

    pub fn is_regular(&self, floor: f64) -> bool {
        self.check_regular(floor).is_ok()
    }

    pub fn field(&self, which: FieldSelector) -> (&[f64], &[f64]) {
        match which {
            FieldSelector::Ltil => (&self.ltil, &self.ltil_t),
            FieldSelector::Phi => (&self.phi, &self.phi_t),
        }
    }

    /// Copy with the data shifted by `k` nodes; vacated nodes take the edge value.
    pub fn shifted(&self, k: isize) -> Self {
        let shift = |a: &[f64]| -> Vec<f64> {
            let n = a.len() as isize;
            (0..n)
                .map(|i| a[(i - k).clamp(0, n - 1) as usize])
                .collect()
        };
        Self {
            t: self.t,
            lambda_bg: self.lambda_bg,
            ltil: shift(&self.ltil),
            ltil_t: shift(&self.ltil_t),
            phi: shift(&self.phi),
            phi_t: shift(&self.phi_t),
        }
    }

    /// Copy with both time derivatives negated.
    pub fn time_reversed(&self) -> Self {
        let mut s = self.clone();
        s.ltil_t.iter_mut().for_each(|v| *v = -*v);
        s.phi_t.iter_mut().for_each(|v| *v = -*v);
        s
    }

    /// Largest absolute nodal difference over all four arrays.
    pub fn max_abs_diff(&self, other: &FieldState) -> f64 {
        self.arrays()
            .iter()
            .zip(other.arrays().iter())
            .flat_map(|((_, a), (_, b))| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}
