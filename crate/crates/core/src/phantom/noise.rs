//! Noise and illumination corruption.
//!
//! Intensities are on the 8-bit scale: noise levels are in 0–255 units and
//! noisy outputs are clamped to `[0, 255]`. Randomness comes from ChaCha8
//! seeded with `seed_from_u64(seed)`, drawn in flat-index order, so a spec
//! reproduces its output bit-for-bit.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::volume::Volume;

pub const PEAK: f64 = 255.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum NoiseModel {
    /// `v + n`, `n ~ N(0, σ²)`.
    Gaussian { sigma: f64 },
    /// `v + v·n`, `n ~ N(0, (σ/255)²)`.
    Speckle { sigma: f64 },
    /// A fraction `rho` of voxels, chosen without replacement, set to 0 or
    /// 255 with equal probability.
    SaltPepper { rho: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub model: NoiseModel,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(model: NoiseModel, seed: u64) -> Self {
        NoiseSpec { model, seed }
    }

    pub fn validate(&self) -> Result<()> {
        match self.model {
            NoiseModel::Gaussian { sigma } | NoiseModel::Speckle { sigma } => {
                if !(sigma.is_finite() && sigma >= 0.0) {
                    return Err(Error::invalid("sigma", format!("must be non-negative, got {sigma}")));
                }
            }
            NoiseModel::SaltPepper { rho } => {
                if !(0.0..=1.0).contains(&rho) {
                    return Err(Error::invalid("rho", format!("must lie in [0, 1], got {rho}")));
                }
            }
        }
        Ok(())
    }
}

fn clamp_peak(x: f64) -> f64 {
    x.clamp(0.0, PEAK)
}

/// Corrupts `v` according to `spec`. A zero noise level is the identity.
pub fn add_noise<T: Scalar>(v: &Volume<T>, spec: &NoiseSpec) -> Result<Volume<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let data: Vec<T> = match spec.model {
        NoiseModel::Gaussian { sigma } | NoiseModel::Speckle { sigma } if sigma == 0.0 => {
            return Ok(v.clone())
        }
        NoiseModel::SaltPepper { rho } if rho == 0.0 => return Ok(v.clone()),
        NoiseModel::Gaussian { sigma } => {
            let normal = Normal::new(0.0, sigma).expect("validated sigma");
            v.data()
                .iter()
                .map(|&x| T::of(clamp_peak(x.as_f64() + normal.sample(&mut rng))))
                .collect()
        }
        NoiseModel::Speckle { sigma } => {
            let normal = Normal::new(0.0, sigma / PEAK).expect("validated sigma");
            v.data()
                .iter()
                .map(|&x| {
                    let x = x.as_f64();
                    T::of(clamp_peak(x + x * normal.sample(&mut rng)))
                })
                .collect()
        }
        NoiseModel::SaltPepper { rho } => {
            let n = v.len();
            let k = ((rho * n as f64).round() as usize).min(n);
            let mut chosen = index::sample(&mut rng, n, k).into_vec();
            chosen.sort_unstable();
            let mut out: Vec<T> = v.data().iter().map(|&x| T::of(clamp_peak(x.as_f64()))).collect();
            for i in chosen {
                out[i] = if rng.random_bool(0.5) { T::of(PEAK) } else { T::zero() };
            }
            out
        }
    };
    Ok(Volume::new(v.dims(), data)?.with_provenance(v.provenance()))
}

/// Adds the linear ramp `amplitude · (g · p̂)`, where `p̂` maps each voxel
/// coordinate onto `[0, 1]` along its axis.
pub fn add_illumination_ramp<T: Scalar>(v: &Volume<T>, gradient: [f64; 3], amplitude: f64) -> Result<Volume<T>> {
    let dims = v.dims();
    let n = dims.as_array();
    let unitize = |i: usize, k: usize| if n[k] > 1 { i as f64 / (n[k] - 1) as f64 } else { 0.0 };
    let data = v
        .data()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let [px, py, pz] = dims.coords(i);
            let ramp = gradient[0] * unitize(px, 0) + gradient[1] * unitize(py, 1) + gradient[2] * unitize(pz, 2);
            T::of(x.as_f64() + amplitude * ramp)
        })
        .collect();
    Ok(Volume::new(dims, data)?.with_provenance(v.provenance()))
}
