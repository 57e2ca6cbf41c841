//! Planar loop geometry via Newell's method.
//!
//! The Newell vector of a closed loop is twice its vector area; its magnitude
//! gives the area and its direction the outward normal implied by the winding
//! (counter-clockwise seen from the normal side).

use super::model::Vertex;

/// Loops whose area is below this fraction of diameter² are degenerate.
const DEGENERATE_AREA_RATIO: f64 = 1e-12;
/// Out-of-plane deviation allowed, as a fraction of the loop diameter.
pub const PLANARITY_TOLERANCE: f64 = 1e-6;
/// A unit normal with horizontal component at or below this has no azimuth.
const HORIZONTAL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("DegenerateLoop: {0}")]
    DegenerateLoop(String),
    #[error("HorizontalSurface: azimuth is undefined for a horizontal surface")]
    HorizontalSurface,
}

/// Derived properties of a vertex loop, in the loop's own length units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopGeometry {
    pub area: f64,
    pub unit_normal: [f64; 3],
    pub diameter: f64,
    /// Largest distance of any vertex from the best-fit plane through the
    /// centroid with the Newell normal.
    pub max_deviation: f64,
}

impl LoopGeometry {
    pub fn is_planar(&self) -> bool {
        self.max_deviation <= PLANARITY_TOLERANCE * self.diameter
    }

    /// Angle between the outward normal and +Z, degrees in [0, 180].
    pub fn tilt_deg(&self) -> f64 {
        let [nx, ny, nz] = self.unit_normal;
        nx.hypot(ny).atan2(nz).to_degrees()
    }

    /// Clockwise angle from +Y of the normal's horizontal projection, degrees
    /// in [0, 360).
    pub fn azimuth_deg(&self) -> Result<f64, GeometryError> {
        let [nx, ny, _] = self.unit_normal;
        if nx.hypot(ny) <= HORIZONTAL_EPS {
            return Err(GeometryError::HorizontalSurface);
        }
        let mut az = nx.atan2(ny).to_degrees();
        if az < 0.0 {
            az += 360.0;
        }
        if az >= 360.0 {
            az -= 360.0;
        }
        Ok(az)
    }
}

/// Drops a repeated closing vertex and consecutive duplicates.
pub fn clean_loop(vertices: &[Vertex]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if out.last() != Some(v) {
            out.push(*v);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// Newell vector (twice the vector area) of a closed loop, accumulated
/// relative to the first vertex.
pub fn newell_vector(vertices: &[Vertex]) -> [f64; 3] {
    let Some(origin) = vertices.first() else {
        return [0.0; 3];
    };
    let rel = |v: &Vertex| [v.x - origin.x, v.y - origin.y, v.z - origin.z];
    let mut n = [0.0f64; 3];
    for (i, v) in vertices.iter().enumerate() {
        let a = rel(v);
        let b = rel(&vertices[(i + 1) % vertices.len()]);
        n[0] += (a[1] - b[1]) * (a[2] + b[2]);
        n[1] += (a[2] - b[2]) * (a[0] + b[0]);
        n[2] += (a[0] - b[0]) * (a[1] + b[1]);
    }
    n
}

pub fn analyze_loop(vertices: &[Vertex]) -> Result<LoopGeometry, GeometryError> {
    if let Some(v) = vertices.iter().find(|v| !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite())) {
        return Err(GeometryError::DegenerateLoop(format!(
            "non-finite coordinate ({}, {}, {})",
            v.x, v.y, v.z
        )));
    }
    let pts = clean_loop(vertices);
    let mut distinct: Vec<Vertex> = Vec::new();
    for p in &pts {
        if !distinct.contains(p) {
            distinct.push(*p);
        }
    }
    if distinct.len() < 3 {
        return Err(GeometryError::DegenerateLoop(format!(
            "{} distinct vertices, need at least 3",
            distinct.len()
        )));
    }

    let mut diameter = 0.0f64;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            diameter = diameter.max(dist(a, b));
        }
    }

    let n = newell_vector(&pts);
    let mag = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let area = 0.5 * mag;
    // Negated so a NaN area is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(area > DEGENERATE_AREA_RATIO * diameter * diameter) {
        return Err(GeometryError::DegenerateLoop("vertices are collinear".into()));
    }
    let unit_normal = [n[0] / mag, n[1] / mag, n[2] / mag];

    let count = pts.len() as f64;
    let c = pts.iter().fold([0.0; 3], |acc, p| [acc[0] + p.x, acc[1] + p.y, acc[2] + p.z]);
    let c = [c[0] / count, c[1] / count, c[2] / count];
    let max_deviation = pts
        .iter()
        .map(|p| {
            (unit_normal[0] * (p.x - c[0]) + unit_normal[1] * (p.y - c[1]) + unit_normal[2] * (p.z - c[2])).abs()
        })
        .fold(0.0, f64::max);

    Ok(LoopGeometry {
        area,
        unit_normal,
        diameter,
        max_deviation,
    })
}

fn dist(a: &Vertex, b: &Vertex) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2)).sqrt()
}
