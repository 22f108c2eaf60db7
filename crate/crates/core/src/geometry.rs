//! Base-station array construction and random terminal placement.
//!
//! All positions are 3-D in meters. Arrays are horizontal: the circular
//! array lies on a circle at the base-station height, linear and rectangular
//! arrays lie in the horizontal plane at the same height. Terminals are
//! placed uniformly over the cell disc at a fixed terminal height.

use rand::Rng;
use serde::Serialize;

use crate::channel::SPEED_OF_LIGHT;
use crate::error::Error;

/// Shape of the antenna array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrayShape {
    Circular,
    Linear,
    Rectangular,
}

impl ArrayShape {
    pub fn name(self) -> &'static str {
        match self {
            ArrayShape::Circular => "circular",
            ArrayShape::Linear => "linear",
            ArrayShape::Rectangular => "rectangular",
        }
    }
}

/// Element positions of one base-station array.
#[derive(Clone, Debug)]
pub struct ArrayLayout {
    pub elements: Vec<[f64; 3]>,
    pub shape: ArrayShape,
    pub carrier_wavelength: f64,
    pub center: [f64; 3],
}

impl ArrayLayout {
    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    /// Aperture of the circular array: d = M·λ/(2π).
    pub fn circular_diameter(m: usize, wavelength: f64) -> f64 {
        m as f64 * wavelength / (2.0 * std::f64::consts::PI)
    }
}

/// Random terminal positions plus the serving-cell index of each.
#[derive(Clone, Debug)]
pub struct TerminalPlacement {
    pub positions: Vec<[f64; 3]>,
    pub cell_index: Vec<usize>,
}

impl TerminalPlacement {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Concatenate placements of several cells, preserving order.
    pub fn concat(parts: &[TerminalPlacement]) -> TerminalPlacement {
        let mut positions = Vec::new();
        let mut cell_index = Vec::new();
        for p in parts {
            positions.extend_from_slice(&p.positions);
            cell_index.extend_from_slice(&p.cell_index);
        }
        TerminalPlacement { positions, cell_index }
    }
}

/// Cell centers (2-D, meters) and the common cell radius.
#[derive(Clone, Debug)]
pub struct CellLayout {
    pub centers: Vec<[f64; 2]>,
    pub radius: f64,
}

impl CellLayout {
    /// One cell centered at the origin.
    pub fn single(radius: f64) -> CellLayout {
        CellLayout { centers: vec![[0.0, 0.0]], radius }
    }
}

/// Build an array of `m` elements for carrier frequency `f_c` (Hz), centered
/// at `center` (horizontal coordinates) and height `height`.
///
/// Circular: elements on a circle of diameter M·λ/(2π), so the arc between
/// neighbors is exactly λ/2. Linear: λ/2 spacing along the x axis.
/// Rectangular: λ/2 grid; M is factored as rows×cols with `rows` the
/// smallest divisor ≥ 2 (a wide, almost-linear panel). A prime M ≥ 3 cannot
/// form a rectangle and is rejected.
pub fn build_array(
    shape: ArrayShape,
    m: usize,
    f_c: f64,
    center: [f64; 2],
    height: f64,
) -> Result<ArrayLayout, Error> {
    if m < 1 {
        return Err(Error::Config("array needs at least one element".into()));
    }
    if f_c <= 0.0 {
        return Err(Error::Config(format!("carrier frequency must be positive, got {f_c}")));
    }
    let lambda = SPEED_OF_LIGHT / f_c;
    let half = lambda / 2.0;
    let c3 = [center[0], center[1], height];

    let elements = match shape {
        ArrayShape::Circular => {
            let radius = m as f64 * lambda / (4.0 * std::f64::consts::PI);
            (0..m)
                .map(|i| {
                    let theta = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                    [center[0] + radius * theta.cos(), center[1] + radius * theta.sin(), height]
                })
                .collect()
        }
        ArrayShape::Linear => {
            let mid = (m as f64 - 1.0) / 2.0;
            (0..m)
                .map(|i| [center[0] + (i as f64 - mid) * half, center[1], height])
                .collect()
        }
        ArrayShape::Rectangular => {
            let (rows, cols) = rectangle_factors(m)?;
            let mid_r = (rows as f64 - 1.0) / 2.0;
            let mid_c = (cols as f64 - 1.0) / 2.0;
            let mut v = Vec::with_capacity(m);
            for r in 0..rows {
                for c in 0..cols {
                    v.push([
                        center[0] + (c as f64 - mid_c) * half,
                        center[1] + (r as f64 - mid_r) * half,
                        height,
                    ]);
                }
            }
            v
        }
    };

    Ok(ArrayLayout { elements, shape, carrier_wavelength: lambda, center: c3 })
}

/// rows×cols factorization for the rectangular panel: rows is the smallest
/// divisor ≥ 2, which keeps the long side comparable to the linear array of
/// the same M while still giving the panel two dimensions.
fn rectangle_factors(m: usize) -> Result<(usize, usize), Error> {
    if m == 1 {
        return Ok((1, 1));
    }
    for rows in 2..=m {
        if rows * rows > m {
            break;
        }
        if m % rows == 0 {
            return Ok((rows, m / rows));
        }
    }
    Err(Error::Config(format!(
        "rectangular array needs a composite element count, got prime M = {m}"
    )))
}

/// Draw `k` terminals uniformly over the disc of radius `r` around
/// `cell_center`, at height `h_t`, tagged with `cell`.
///
/// Radial inversion sampling: radius = r·√u with u ~ U[0,1), angle uniform.
/// u < 1 keeps every terminal strictly inside the disc.
pub fn place_terminals<R: Rng>(
    rng: &mut R,
    k: usize,
    cell: usize,
    cell_center: [f64; 2],
    r: f64,
    h_t: f64,
) -> TerminalPlacement {
    let mut positions = Vec::with_capacity(k);
    for _ in 0..k {
        let radius = r * rng.gen::<f64>().sqrt();
        let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        positions.push([
            cell_center[0] + radius * theta.cos(),
            cell_center[1] + radius * theta.sin(),
            h_t,
        ]);
    }
    TerminalPlacement { positions, cell_index: vec![cell; k] }
}

/// Hexagonal seven-cell layout: one cell at the origin and six neighbors at
/// distance `intersite`, at 60° increments.
pub fn build_seven_cells(radius: f64, intersite: f64) -> Result<CellLayout, Error> {
    if intersite <= 0.0 {
        return Err(Error::Config(format!("intersite distance must be positive, got {intersite}")));
    }
    let mut centers = vec![[0.0, 0.0]];
    for i in 0..6 {
        let theta = std::f64::consts::PI / 3.0 * i as f64;
        centers.push([intersite * theta.cos(), intersite * theta.sin()]);
    }
    Ok(CellLayout { centers, radius })
}

pub fn horizontal_distance(a: [f64; 3], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub fn distance_3d(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
