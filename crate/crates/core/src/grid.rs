//! Rasterized classification over boxes and slices of `(α, β, γ)` space.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::classify::classify;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::Dims;
use crate::maps::PhiParams;

/// Upper bound on the number of cells in one grid.
pub const MAX_CELLS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Alpha,
    Beta,
    Gamma,
}

impl Param {
    pub const ALL: [Param; 3] = [Param::Alpha, Param::Beta, Param::Gamma];

    pub fn index(self) -> usize {
        match self {
            Param::Alpha => 0,
            Param::Beta => 1,
            Param::Gamma => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::Gamma => "gamma",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" | "a" => Ok(Param::Alpha),
            "beta" | "b" => Ok(Param::Beta),
            "gamma" | "g" | "c" => Ok(Param::Gamma),
            other => Err(Error::InvalidSpec(format!("unknown parameter '{other}'"))),
        }
    }
}

/// `steps` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(param: Param, min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidSpec(format!("axis {param} has zero steps")));
        }
        if !min.is_finite() || !max.is_finite() || min > max {
            return Err(Error::InvalidSpec(format!(
                "axis {param} has invalid range [{min}, {max}]"
            )));
        }
        if steps == 1 && min != max {
            return Err(Error::InvalidSpec(format!(
                "axis {param} has one step but a nonzero range"
            )));
        }
        Ok(Axis {
            param,
            min,
            max,
            steps,
        })
    }

    pub fn value(&self, k: usize) -> f64 {
        if self.steps == 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * k as f64 / (self.steps - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub dims: Dims,
    /// Values of the parameters not swept by any axis.
    pub fixed: [f64; 3],
    /// The first axis varies slowest.
    pub axes: Vec<Axis>,
}

impl GridSpec {
    pub fn new(dims: Dims, fixed: [f64; 3], axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::InvalidSpec(format!(
                "need 1 to 3 axes, got {}",
                axes.len()
            )));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.param == a.param) {
                return Err(Error::InvalidSpec(format!("axis {} repeated", a.param)));
            }
        }
        if fixed.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("fixed parameters must be finite".into()));
        }
        let spec = GridSpec { dims, fixed, axes };
        let count = spec
            .axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.steps));
        match count {
            Some(c) if c <= MAX_CELLS => Ok(spec),
            _ => Err(Error::InvalidSpec(format!(
                "grid exceeds {MAX_CELLS} cells"
            ))),
        }
    }

    /// The cube `[min, max]³` with `steps` values per axis.
    pub fn cube(dims: Dims, min: f64, max: f64, steps: usize) -> Result<Self> {
        let axes = Param::ALL
            .iter()
            .map(|&p| Axis::new(p, min, max, steps))
            .collect::<Result<Vec<_>>>()?;
        GridSpec::new(dims, [0.0; 3], axes)
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }

    pub fn params_at(&self, index: usize) -> PhiParams {
        let mut v = self.fixed;
        let mut rest = index;
        for axis in self.axes.iter().rev() {
            v[axis.param.index()] = axis.value(rest % axis.steps);
            rest /= axis.steps;
        }
        PhiParams::new(v[0], v[1], v[2], self.dims)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCell {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub positive: bool,
    pub cp: bool,
    pub cocp: bool,
    pub eb: bool,
    pub ppt_inducing: bool,
    pub ea: bool,
}

impl GridCell {
    pub fn classify(p: &PhiParams) -> Self {
        let r = classify(p);
        GridCell {
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            positive: r.positive,
            cp: r.cp,
            cocp: r.cocp,
            eb: r.eb,
            ppt_inducing: r.ppt_inducing,
            ea: r.ea,
        }
    }

    /// Completely positive and copositive but not entanglement breaking.
    pub fn ppt_not_eb(&self) -> bool {
        self.cp && self.cocp && !self.eb
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionGrid {
    pub spec: GridSpec,
    /// Row-major in the axis order of `spec`.
    pub cells: Vec<GridCell>,
}

impl RegionGrid {
    pub fn sweep(spec: GridSpec, exec: Execution) -> Self {
        let cells = exec.map_indexed(spec.cell_count(), |k| {
            GridCell::classify(&spec.params_at(k))
        });
        RegionGrid { spec, cells }
    }

    pub fn count<F: Fn(&GridCell) -> bool>(&self, pred: F) -> usize {
        self.cells.iter().filter(|c| pred(c)).count()
    }
}

/// Named grids for the three standard region plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigurePreset {
    /// Positivity region at `n = 4`.
    Positivity,
    /// Entanglement-breaking solid and PPT pyramid at `2 ⊗ 6`.
    Eb,
    /// Entanglement-annihilating region at `n = 4`.
    Ea,
}

impl FigurePreset {
    pub fn default_dims(self) -> Dims {
        match self {
            FigurePreset::Eb => Dims { da: 2, db: 6 },
            _ => Dims { da: 4, db: 4 },
        }
    }

    pub fn spec(self, dims: Dims) -> Result<GridSpec> {
        match self {
            FigurePreset::Positivity | FigurePreset::Ea => GridSpec::cube(dims, -2.0, 3.0, 51),
            FigurePreset::Eb => GridSpec::cube(dims, -1.0, 2.0, 61),
        }
    }
}

impl FromStr for FigurePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positivity" => Ok(FigurePreset::Positivity),
            "eb" => Ok(FigurePreset::Eb),
            "ea" => Ok(FigurePreset::Ea),
            other => Err(Error::InvalidSpec(format!("unknown figure '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(da: usize, db: usize) -> Dims {
        Dims::new(da, db).unwrap()
    }

    #[test]
    fn axis_endpoints_are_exact() {
        let a = Axis::new(Param::Alpha, -1.0, 2.0, 61).unwrap();
        assert_eq!(a.value(0), -1.0);
        assert_eq!(a.value(60), 2.0);
        assert_eq!(a.value(20), 0.0);
        assert!(Axis::new(Param::Beta, 0.0, 1.0, 0).is_err());
        assert!(Axis::new(Param::Beta, 1.0, 0.0, 3).is_err());
    }

    #[test]
    fn row_major_order() {
        let spec = GridSpec::new(
            dims(2, 2),
            [0.0, 0.5, 0.0],
            vec![
                Axis::new(Param::Gamma, 0.0, 1.0, 2).unwrap(),
                Axis::new(Param::Alpha, 0.0, 2.0, 3).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(spec.cell_count(), 6);
        let p = spec.params_at(4);
        assert_eq!((p.alpha, p.beta, p.gamma), (1.0, 0.5, 1.0));
        let p = spec.params_at(2);
        assert_eq!((p.alpha, p.beta, p.gamma), (2.0, 0.5, 0.0));
    }

    #[test]
    fn rejects_repeated_axes() {
        let a = Axis::new(Param::Alpha, 0.0, 1.0, 2).unwrap();
        assert!(GridSpec::new(dims(2, 2), [0.0; 3], vec![a, a]).is_err());
        assert!(GridSpec::new(dims(2, 2), [0.0; 3], vec![]).is_err());
    }

    #[test]
    fn strategies_agree() {
        let spec = GridSpec::cube(dims(2, 3), -1.0, 2.0, 9).unwrap();
        let seq = RegionGrid::sweep(spec.clone(), Execution::Sequential);
        let par = RegionGrid::sweep(spec, Execution::Parallel);
        assert_eq!(seq, par);
    }

    #[test]
    fn single_cell_matches_classify() {
        let spec = GridSpec::new(
            dims(2, 6),
            [-1.0 / 6.0, -0.5, 2.0 / 3.0],
            vec![Axis::new(Param::Alpha, -1.0 / 6.0, -1.0 / 6.0, 1).unwrap()],
        )
        .unwrap();
        let grid = RegionGrid::sweep(spec, Execution::Sequential);
        assert_eq!(grid.cells.len(), 1);
        let r = classify(&PhiParams::new(-1.0 / 6.0, -0.5, 2.0 / 3.0, dims(2, 6)));
        let c = grid.cells[0];
        assert_eq!(
            [c.positive, c.cp, c.cocp, c.eb, c.ppt_inducing, c.ea],
            r.flags()
        );
        assert!(c.ppt_not_eb());
    }
}
