use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::volume::Volume;

/// Intensities sampled along a segment.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    /// Distance from `p0` in voxels, strictly increasing.
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
    pub p0: [f64; 3],
    pub p1: [f64; 3],
    pub provenance: String,
}

impl Profile {
    /// Builds a profile from explicit samples.
    pub fn from_samples(positions: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if positions.len() != values.len() || positions.len() < 2 {
            return Err(Error::invalid("profile", "needs at least two matching positions and values"));
        }
        if positions.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("profile", "positions must be strictly increasing"));
        }
        let (a, b) = (positions[0], positions[positions.len() - 1]);
        Ok(Profile {
            positions,
            values,
            p0: [a, 0.0, 0.0],
            p1: [b, 0.0, 0.0],
            provenance: String::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Position of the maximum; for a run of tied maxima, the midpoint
    /// between the first and last of them.
    pub fn argmax(&self) -> f64 {
        let max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let first = self.values.iter().position(|&v| v == max).unwrap_or(0);
        let last = self.values.iter().rposition(|&v| v == max).unwrap_or(0);
        (self.positions[first] + self.positions[last]) / 2.0
    }

    /// `position,intensity` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["position", "intensity"])?;
        for (p, v) in self.positions.iter().zip(&self.values) {
            csv.serialize((p, v))?;
        }
        csv.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.write_csv(std::fs::File::create(path).map_err(|e| Error::io(path, e))?)
    }
}

fn trilinear<T: Scalar>(v: &Volume<T>, p: [f64; 3]) -> f64 {
    let n = v.dims().as_array();
    let mut base = [0usize; 3];
    let mut frac = [0.0; 3];
    for k in 0..3 {
        if n[k] == 1 {
            continue;
        }
        let i = (p[k].floor() as usize).min(n[k] - 2);
        base[k] = i;
        frac[k] = p[k] - i as f64;
    }
    let mut acc = 0.0;
    for corner in 0..8 {
        let mut w = 1.0;
        let mut at = base;
        for k in 0..3 {
            if corner >> k & 1 == 1 {
                if frac[k] == 0.0 {
                    w = 0.0;
                    break;
                }
                w *= frac[k];
                at[k] += 1;
            } else {
                w *= 1.0 - frac[k];
            }
        }
        if w != 0.0 {
            acc += w * v.get(at[0], at[1], at[2]).as_f64();
        }
    }
    acc
}

/// Samples `v` by trilinear interpolation at `n_samples` evenly spaced points
/// from `p0` to `p1` (both inclusive, in voxel coordinates).
pub fn extract_profile<T: Scalar>(v: &Volume<T>, p0: [f64; 3], p1: [f64; 3], n_samples: usize) -> Result<Profile> {
    if n_samples < 2 {
        return Err(Error::invalid("samples", format!("need at least 2, got {n_samples}")));
    }
    let n = v.dims().as_array();
    for p in [p0, p1] {
        if (0..3).any(|k| !(p[k] >= 0.0 && p[k] <= (n[k] - 1) as f64)) {
            return Err(Error::OutOfBounds(format!("probe endpoint {p:?} outside {}", v.dims())));
        }
    }
    let delta = [p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]];
    let length = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
    if length == 0.0 {
        return Err(Error::invalid("probe", "endpoints coincide"));
    }
    let last = (n_samples - 1) as f64;
    let (positions, values) = (0..n_samples)
        .map(|i| {
            let t = i as f64 / last;
            let p = [p0[0] + t * delta[0], p0[1] + t * delta[1], p0[2] + t * delta[2]];
            (t * length, trilinear(v, p))
        })
        .unzip();
    Ok(Profile {
        positions,
        values,
        p0,
        p1,
        provenance: v.provenance().to_string(),
    })
}

/// Full width at half maximum, measured from the mean of the two endpoint
/// values and linearly interpolated between samples.
pub fn fwhm(profile: &Profile) -> Result<f64> {
    let (pos, val) = (&profile.positions, &profile.values);
    let n = val.len();
    if n < 2 {
        return Err(Error::NoPeak);
    }
    let baseline = (val[0] + val[n - 1]) / 2.0;
    let peak = (0..n).reduce(|b, i| if val[i] > val[b] { i } else { b }).unwrap();
    if !(val[peak] > baseline) {
        return Err(Error::NoPeak);
    }
    let half = baseline + (val[peak] - baseline) / 2.0;
    let crossing = |j: usize, k: usize| pos[j] + (half - val[j]) / (val[k] - val[j]) * (pos[k] - pos[j]);

    let left = (0..peak)
        .rev()
        .find(|&j| val[j] <= half)
        .map(|j| crossing(j, j + 1))
        .ok_or(Error::UnboundedPeak("left"))?;
    let right = (peak + 1..n)
        .find(|&j| val[j] <= half)
        .map(|j| crossing(j, j - 1))
        .ok_or(Error::UnboundedPeak("right"))?;
    Ok(right - left)
}
