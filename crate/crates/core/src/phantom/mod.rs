//! Synthetic ground-truthed volumes and corruption models.
//!
//! A phantom is a union of solid tubes (capsules around a medial segment)
//! and balls. A voxel is foreground iff its centre lies within `diameter/2`
//! of a medial axis.

mod noise;
pub mod presets;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::gaussian_blur;
use crate::scalar::Scalar;
use crate::volume::{Dims, Volume};

pub use noise::{add_illumination_ramp, add_noise, NoiseModel, NoiseSpec};

pub type Point = [f64; 3];

/// Geometry of a phantom structure. Serialized with a `"type"` tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Structure {
    Tube {
        p0: Point,
        p1: Point,
        diameter: f64,
    },
    /// Branches of equal `length` leaving `center` along `branches`.
    YJunction {
        center: Point,
        branches: Vec<Point>,
        length: f64,
        diameter: f64,
    },
    /// Two full tubes of total `length` crossing at `center`.
    XCrossing {
        center: Point,
        axes: [Point; 2],
        length: f64,
        diameter: f64,
    },
    Ball {
        center: Point,
        diameter: f64,
    },
    Composite {
        parts: Vec<Structure>,
    },
}

fn default_foreground() -> f64 {
    1.0
}

/// Full description of a phantom volume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhantomSpec {
    pub dims: Dims,
    pub structure: Structure,
    #[serde(default = "default_foreground")]
    pub foreground: f64,
    #[serde(default)]
    pub background: f64,
    /// Gaussian sigma applied to the rendered volume; 0 keeps hard edges.
    #[serde(default)]
    pub softness: f64,
}

impl PhantomSpec {
    pub fn new(dims: Dims, structure: Structure) -> Self {
        PhantomSpec {
            dims,
            structure,
            foreground: 1.0,
            background: 0.0,
            softness: 0.0,
        }
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// A rendered phantom and its binary ground truth.
#[derive(Clone, Debug)]
pub struct Phantom<T: Scalar = f32> {
    pub volume: Volume<T>,
    pub truth: Volume<T>,
}

/// Medial segment with a radius; a ball is a zero-length segment.
#[derive(Clone, Copy, Debug)]
struct Capsule {
    a: Point,
    b: Point,
    radius: f64,
}

impl Capsule {
    fn dist2(&self, p: Point) -> f64 {
        let ab = sub(self.b, self.a);
        let ap = sub(p, self.a);
        let len2 = dot(ab, ab);
        let t = if len2 > 0.0 {
            (dot(ap, ab) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let q = [ap[0] - t * ab[0], ap[1] - t * ab[1], ap[2] - t * ab[2]];
        dot(q, q)
    }

    /// Inclusive voxel range `(lo, hi)` per axis that can be inside.
    fn bounds(&self, dims: Dims) -> [(usize, usize); 3] {
        let n = dims.as_array();
        [0, 1, 2].map(|k| {
            let lo = (self.a[k].min(self.b[k]) - self.radius).floor().max(0.0) as usize;
            let hi = (self.a[k].max(self.b[k]) + self.radius)
                .ceil()
                .min((n[k] - 1) as f64) as usize;
            (lo, hi)
        })
    }
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(v: Point) -> Result<Point> {
    let n = dot(v, v).sqrt();
    if n.is_finite() && n > 0.0 {
        Ok(v.map(|c| c / n))
    } else {
        Err(Error::invalid("direction", format!("{v:?} is not a usable direction")))
    }
}

fn check_diameter(d: f64) -> Result<f64> {
    if d.is_finite() && d >= 1.0 {
        Ok(d / 2.0)
    } else {
        Err(Error::invalid("diameter", format!("must be at least 1, got {d}")))
    }
}

fn check_inside(p: Point, dims: Dims, what: &str) -> Result<()> {
    let n = dims.as_array();
    let ok = (0..3).all(|k| p[k].is_finite() && p[k] >= 0.0 && p[k] <= (n[k] - 1) as f64);
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfBounds(format!("{what} {p:?} lies outside {dims}")))
    }
}

fn along(c: Point, dir: Point, t: f64) -> Point {
    [c[0] + t * dir[0], c[1] + t * dir[1], c[2] + t * dir[2]]
}

fn collect(s: &Structure, dims: Dims, out: &mut Vec<Capsule>) -> Result<()> {
    let mut push = |a: Point, b: Point, radius: f64, what: &str| -> Result<()> {
        check_inside(a, dims, what)?;
        check_inside(b, dims, what)?;
        out.push(Capsule { a, b, radius });
        Ok(())
    };
    match s {
        Structure::Tube { p0, p1, diameter } => {
            push(*p0, *p1, check_diameter(*diameter)?, "tube endpoint")?;
        }
        Structure::YJunction {
            center,
            branches,
            length,
            diameter,
        } => {
            let r = check_diameter(*diameter)?;
            if branches.is_empty() || !(*length > 0.0) {
                return Err(Error::invalid("y-junction", "needs branches and a positive length"));
            }
            for b in branches {
                let tip = along(*center, unit(*b)?, *length);
                push(*center, tip, r, "branch tip")?;
            }
        }
        Structure::XCrossing {
            center,
            axes,
            length,
            diameter,
        } => {
            let r = check_diameter(*diameter)?;
            if !(*length > 0.0) {
                return Err(Error::invalid("x-crossing", "needs a positive length"));
            }
            for a in axes {
                let u = unit(*a)?;
                let half = length / 2.0;
                push(along(*center, u, -half), along(*center, u, half), r, "crossing end")?;
            }
        }
        Structure::Ball { center, diameter } => {
            push(*center, *center, check_diameter(*diameter)?, "ball centre")?;
        }
        Structure::Composite { parts } => {
            for p in parts {
                collect(p, dims, out)?;
            }
        }
    }
    Ok(())
}

/// Renders `spec` and its binary ground truth (taken before any softening).
pub fn generate_phantom<T: Scalar>(spec: &PhantomSpec) -> Result<Phantom<T>> {
    let dims = spec.dims;
    if dims.is_empty() {
        return Err(Error::NonPositiveDims(
            dims.as_array().iter().map(|&n| n as i64).collect(),
        ));
    }
    if !(spec.softness >= 0.0 && spec.softness.is_finite()) {
        return Err(Error::invalid("softness", "must be a non-negative sigma"));
    }
    let mut capsules = Vec::new();
    collect(&spec.structure, dims, &mut capsules)?;

    let mut mask = vec![false; dims.len()];
    for c in &capsules {
        let r2 = c.radius * c.radius;
        let [(x0, x1), (y0, y1), (z0, z1)] = c.bounds(dims);
        for z in z0..=z1 {
            for y in y0..=y1 {
                for x in x0..=x1 {
                    if c.dist2([x as f64, y as f64, z as f64]) <= r2 {
                        mask[dims.index(x, y, z)] = true;
                    }
                }
            }
        }
    }

    let truth = Volume::new(dims, mask.iter().map(|&m| if m { T::one() } else { T::zero() }).collect())?;
    let (fg, bg) = (T::of(spec.foreground), T::of(spec.background));
    let volume = Volume::new(dims, mask.iter().map(|&m| if m { fg } else { bg }).collect())?;
    let volume = if spec.softness > 0.0 {
        gaussian_blur(&volume, spec.softness)?
    } else {
        volume
    };
    Ok(Phantom { volume, truth })
}

impl Structure {
    /// The structure with every ball removed, or `None` if nothing is left.
    pub fn without_balls(&self) -> Option<Structure> {
        match self {
            Structure::Ball { .. } => None,
            Structure::Composite { parts } => {
                let parts: Vec<_> = parts.iter().filter_map(Structure::without_balls).collect();
                (!parts.is_empty()).then_some(Structure::Composite { parts })
            }
            other => Some(other.clone()),
        }
    }
}

/// Ground truth of the tubular parts of `spec` only. Balls are blob
/// distractors and count as background.
pub fn vessel_truth<T: Scalar>(spec: &PhantomSpec) -> Result<Volume<T>> {
    // validates the full geometry, balls included
    let full = generate_phantom::<T>(spec)?;
    match spec.structure.without_balls() {
        None => Ok(Volume::zeros(spec.dims)),
        Some(structure) if structure == spec.structure => Ok(full.truth),
        Some(structure) => {
            let vessels = PhantomSpec {
                structure,
                softness: 0.0,
                ..spec.clone()
            };
            Ok(generate_phantom(&vessels)?.truth)
        }
    }
}
