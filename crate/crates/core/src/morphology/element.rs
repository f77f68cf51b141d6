//! Flat structuring elements and line direction sets.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Offset = [i32; 3];

/// How a structuring element was generated.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Sphere { diameter: u32 },
    Line { length: u32, direction: [f64; 3] },
    Custom,
}

/// A flat, origin-containing, negation-symmetric set of voxel offsets.
///
/// Offsets are kept sorted (z, y, x lexicographic) and unique, so two
/// elements with the same footprint compare equal on [`offsets`](Self::offsets).
#[derive(Clone, Debug, PartialEq)]
pub struct StructuringElement {
    offsets: Vec<Offset>,
    shape: Shape,
}

fn canonical(mut offsets: Vec<Offset>) -> Vec<Offset> {
    offsets.sort_unstable_by_key(|&[x, y, z]| (z, y, x));
    offsets.dedup();
    offsets
}

impl StructuringElement {
    /// Builds an element from arbitrary offsets, which must contain the
    /// origin and be closed under negation.
    pub fn from_offsets(offsets: impl IntoIterator<Item = Offset>) -> Result<Self> {
        let offsets = canonical(offsets.into_iter().collect());
        if offsets.binary_search_by_key(&(0, 0, 0), |&[x, y, z]| (z, y, x)).is_err() {
            return Err(Error::invalid("structuring element", "must contain the origin"));
        }
        for &[x, y, z] in &offsets {
            if offsets.binary_search_by_key(&(-z, -y, -x), |&[x, y, z]| (z, y, x)).is_err() {
                return Err(Error::invalid(
                    "structuring element",
                    format!("offset {:?} has no mirror", [x, y, z]),
                ));
            }
        }
        Ok(StructuringElement {
            offsets,
            shape: Shape::Custom,
        })
    }

    /// The single-voxel element `{origin}`.
    pub fn point() -> Self {
        StructuringElement {
            offsets: vec![[0, 0, 0]],
            shape: Shape::Custom,
        }
    }

    pub fn offsets(&self) -> &[Offset] {
        &self.offsets
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Largest absolute offset along any axis.
    pub fn reach(&self) -> i32 {
        self.offsets
            .iter()
            .flat_map(|o| o.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }
}

pub(crate) fn check_odd_diameter(name: &'static str, d: u32) -> Result<()> {
    if d == 0 || d.is_multiple_of(2) {
        Err(Error::invalid(name, format!("must be odd and positive, got {d}")))
    } else {
        Ok(())
    }
}

/// Closed Euclidean ball of diameter `d`: all offsets with norm ≤ d/2.
pub fn make_sphere_se(d: u32) -> Result<StructuringElement> {
    check_odd_diameter("sphere diameter", d)?;
    let r = (d / 2) as i32;
    let d2 = i64::from(d) * i64::from(d);
    let mut offsets = Vec::new();
    for z in -r..=r {
        for y in -r..=r {
            for x in -r..=r {
                // |o|² ≤ (d/2)²  ⇔  4|o|² ≤ d², exact in integers
                let n2 = i64::from(x * x + y * y + z * z);
                if 4 * n2 <= d2 {
                    offsets.push([x, y, z]);
                }
            }
        }
    }
    Ok(StructuringElement {
        offsets: canonical(offsets),
        shape: Shape::Sphere { diameter: d },
    })
}

/// Digital line of `d` samples centred on the origin along `direction`.
///
/// Samples sit at `t·v` for `t = -(d-1)/2, …, (d-1)/2` and are rounded half
/// away from zero per component. The origin is always included; rounding is
/// odd-symmetric so `v` and `-v` give the same element.
pub fn make_line_se(d: u32, direction: [f64; 3]) -> Result<StructuringElement> {
    if d == 0 {
        return Err(Error::invalid("line length", "must be positive"));
    }
    let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::invalid(
            "line direction",
            format!("must be a non-zero finite vector, got {direction:?}"),
        ));
    }
    let v = direction.map(|c| c / norm);
    let half = f64::from(d - 1) / 2.0;
    let mut offsets = vec![[0, 0, 0]];
    for i in 0..d {
        let t = f64::from(i) - half;
        offsets.push(v.map(|c| (t * c).round() as i32));
    }
    Ok(StructuringElement {
        offsets: canonical(offsets),
        shape: Shape::Line {
            length: d,
            direction: v,
        },
    })
}

/// Unit line orientations on the upper hemisphere.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet {
    vectors: Vec<[f64; 3]>,
    /// (polar θ, azimuth φ) per direction, radians.
    angles: Vec<(f64, f64)>,
}

impl DirectionSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[[f64; 3]] {
        &self.vectors
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        &self.angles
    }

    /// Smallest angle in degrees between any two of the (unoriented) lines.
    pub fn min_line_angle_deg(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.vectors.iter().enumerate() {
            for b in &self.vectors[i + 1..] {
                let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).abs().min(1.0);
                best = best.min(dot.acos().to_degrees());
            }
        }
        best
    }
}

/// `n` directions from a golden-angle spiral on the upper hemisphere.
///
/// Point `k` has `z = 1 - k/n` (equal-area bands, anchored at the pole) and
/// azimuth `k` times the golden angle. Every `z` is positive, so no two
/// directions are antipodal.
pub fn make_direction_set(n: usize) -> Result<DirectionSet> {
    if n == 0 {
        return Err(Error::invalid("direction count", "must be at least 1"));
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut vectors = Vec::with_capacity(n);
    let mut angles = Vec::with_capacity(n);
    for k in 0..n {
        let z = 1.0 - k as f64 / n as f64;
        let theta = z.acos();
        let phi = (k as f64 * golden).rem_euclid(2.0 * PI);
        let r = (1.0 - z * z).max(0.0).sqrt();
        vectors.push([r * phi.cos(), r * phi.sin(), z]);
        angles.push((theta, phi));
    }
    Ok(DirectionSet { vectors, angles })
}
