//! Peak location on a sampled curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Vertex of the parabola through the grid maximum and its neighbours.
    pub location: f64,
    /// Parabola value at the vertex.
    pub height: f64,
    /// Index of the grid maximum.
    pub index: usize,
}

/// Locate the maximum of `y(x)` and refine it with a three-point parabola.
/// A maximum on the first or last sample is an error: the grid does not
/// bracket the peak.
pub fn locate_peak(x: &[f64], y: &[f64]) -> Result<Peak> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::InvalidArgument("peak search needs at least three samples".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("peak search needs finite samples".into()));
    }
    let index = (0..y.len())
        .max_by(|&a, &b| y[a].total_cmp(&y[b]))
        .expect("non-empty");
    if index == 0 || index == y.len() - 1 {
        return Err(Error::InvalidArgument(format!(
            "maximum at grid boundary x={}; widen the grid so it brackets the peak",
            x[index]
        )));
    }
    let (x0, x1, x2) = (x[index - 1], x[index], x[index + 1]);
    let (y0, y1, y2) = (y[index - 1], y[index], y[index + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if !(curvature < 0.0) {
        return Ok(Peak {
            location: x1,
            height: y1,
            index,
        });
    }
    // y = y1 + d·(x − x1) + c·(x − x1)², with d the derivative at x1.
    let slope = d01 + curvature * (x1 - x0);
    let shift = -slope / (2.0 * curvature);
    Ok(Peak {
        location: x1 + shift,
        height: y1 + slope * shift + curvature * shift * shift,
        index,
    })
}
