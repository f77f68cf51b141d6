use rayon::prelude::*;

use super::{gaussian_hessian, Scales};
use crate::error::{Error, Result};
use crate::filter::check_sigma;
use crate::scalar::Scalar;
use crate::volume::Volume;

/// Default Gaussian scales, in voxels.
pub const DEFAULT_SCALES: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 4.0];

/// Default neuriteness mixing parameter.
pub const NEURITENESS_ALPHA: f64 = -1.0 / 3.0;

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive, got {v}")))
    }
}

/// Frangi vesselness parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct VesselnessParams {
    /// Plate-vs-line sensitivity (weights `R_α`).
    pub alpha: f64,
    /// Blob sensitivity (weights `R_β`).
    pub beta: f64,
    /// Structureness threshold; `None` uses half the largest `S` in the
    /// volume, recomputed per scale.
    pub c: Option<f64>,
    pub scales: Scales,
}

impl Default for VesselnessParams {
    fn default() -> Self {
        VesselnessParams {
            alpha: 0.5,
            beta: 0.5,
            c: None,
            scales: Scales::default(),
        }
    }
}

impl VesselnessParams {
    pub fn validate(&self) -> Result<()> {
        positive("alpha", self.alpha)?;
        positive("beta", self.beta)?;
        if let Some(c) = self.c {
            positive("c", c)?;
        }
        Ok(())
    }
}

/// Regularised volume ratio parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeRatioParams {
    /// Cut-off in `(0, 1]` applied to the per-scale maximum of `λ3`.
    pub tau: f64,
    pub scales: Scales,
}

impl Default for VolumeRatioParams {
    fn default() -> Self {
        VolumeRatioParams {
            tau: 0.5,
            scales: Scales::default(),
        }
    }
}

impl VolumeRatioParams {
    pub fn validate(&self) -> Result<()> {
        if self.tau > 0.0 && self.tau <= 1.0 {
            Ok(())
        } else {
            Err(Error::invalid("tau", format!("must lie in (0, 1], got {}", self.tau)))
        }
    }
}

/// Frangi's three-factor response for magnitude-sorted eigenvalues.
///
/// Zero unless both `λ2` and `λ3` are strictly negative (bright tube).
pub fn frangi_response<F: Scalar>(l: [F; 3], alpha: F, beta: F, c: F) -> F {
    let [l1, l2, l3] = l;
    let zero = F::zero();
    if !(l2 < zero && l3 < zero) {
        return zero;
    }
    let two = F::of(2.0);
    let rb2 = l1 * l1 / (l2 * l3).abs();
    let ra2 = l2 * l2 / (l3 * l3);
    let s2 = l1 * l1 + l2 * l2 + l3 * l3;
    let blob = (-rb2 / (two * beta * beta)).exp();
    let plate = F::one() - (-ra2 / (two * alpha * alpha)).exp();
    let structure = if c > zero {
        F::one() - (-s2 / (two * c * c)).exp()
    } else {
        F::one()
    };
    blob * plate * structure
}

fn par_map_voxels<T: Scalar>(len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..len).into_par_iter().map(f).collect()
}

fn running_max<T: Scalar>(acc: &mut Option<Vec<T>>, next: Vec<T>) {
    match acc {
        None => *acc = Some(next),
        Some(a) => a.iter_mut().zip(next).for_each(|(a, n)| {
            if n > *a {
                *a = n
            }
        }),
    }
}

/// Multiscale Frangi vesselness: the per-voxel maximum over scales of the
/// single-scale response on `σ²`-normalised eigenvalues.
pub fn vesselness<T: Scalar>(v: &Volume<T>, p: &VesselnessParams) -> Result<Volume<T>> {
    p.validate()?;
    let (alpha, beta) = (T::of(p.alpha), T::of(p.beta));
    let mut acc = None;
    for &s in p.scales.as_slice() {
        let h = gaussian_hessian(v, s)?;
        let norm = T::of(s * s);
        let eig = |i: usize| h.eigen_at(i).map(|l| l * norm);
        let c = match p.c {
            Some(c) => T::of(c),
            None => {
                let max_s = (0..v.len())
                    .into_par_iter()
                    .map(|i| {
                        let l = eig(i);
                        (l[0] * l[0] + l[1] * l[1] + l[2] * l[2]).sqrt()
                    })
                    .reduce(T::zero, T::max);
                max_s / T::of(2.0)
            }
        };
        let out = if c > T::zero() {
            par_map_voxels(v.len(), |i| frangi_response(eig(i), alpha, beta, c))
        } else {
            vec![T::zero(); v.len()]
        };
        running_max(&mut acc, out);
    }
    let data = acc.expect("scales are non-empty");
    Ok(Volume::from_parts(v.dims(), data).with_provenance(v.provenance()))
}

/// Single-scale neuriteness output.
#[derive(Clone, Debug)]
pub struct Neuriteness<T: Scalar> {
    pub volume: Volume<T>,
    /// No voxel had a negative dominant modified eigenvalue (e.g. a constant
    /// image); the output is all zeros.
    pub degenerate: bool,
}

/// Neuriteness at scale `sigma` with mixing parameter `alpha`.
///
/// Modified eigenvalues are `λ'_i = λ_i + α·(λ_j + λ_k)`. The dominant one,
/// `λmax`, is the signed `λ'_i` of largest magnitude, and the output is
/// `λmax / λmin` where `λmax < 0`, with `λmin` the most negative `λmax` over
/// the volume. The result lies in `[0, 1]` and peaks at exactly 1.
pub fn neuriteness<T: Scalar>(v: &Volume<T>, sigma: f64, alpha: f64) -> Result<Neuriteness<T>> {
    check_sigma(sigma)?;
    if !alpha.is_finite() {
        return Err(Error::invalid("alpha", "must be finite"));
    }
    let h = gaussian_hessian(v, sigma)?;
    let a = T::of(alpha);
    let dominant: Vec<T> = par_map_voxels(v.len(), |i| {
        let [l1, l2, l3] = h.eigen_at(i);
        let m = [l1 + a * (l2 + l3), l2 + a * (l1 + l3), l3 + a * (l1 + l2)];
        m.into_iter()
            .fold(T::zero(), |best, x| if x.abs() > best.abs() { x } else { best })
    });
    let lambda_min = dominant.iter().copied().fold(T::infinity(), T::min);
    let degenerate = !(lambda_min < T::zero());
    let data = if degenerate {
        vec![T::zero(); v.len()]
    } else {
        dominant
            .iter()
            .map(|&m| if m < T::zero() { m / lambda_min } else { T::zero() })
            .collect()
    };
    Ok(Neuriteness {
        volume: Volume::from_parts(v.dims(), data).with_provenance(v.provenance()),
        degenerate,
    })
}

/// Maximum of single-scale neuriteness over `scales`.
pub fn neuriteness_multiscale<T: Scalar>(
    v: &Volume<T>,
    scales: &Scales,
    alpha: f64,
) -> Result<Volume<T>> {
    let mut acc = None;
    for &s in scales.as_slice() {
        running_max(&mut acc, neuriteness(v, s, alpha)?.volume.into_data());
    }
    Ok(Volume::from_parts(v.dims(), acc.expect("scales are non-empty")).with_provenance(v.provenance()))
}

/// `λρ`: `λ3` regularised against `cutoff = τ·max λ3`.
pub fn regularized_lambda<F: Scalar>(l3: F, cutoff: F) -> F {
    if l3 > cutoff {
        l3
    } else if l3 > F::zero() {
        cutoff
    } else {
        F::zero()
    }
}

/// The regularised volume ratio `V_P(λ2, λρ)`, in `[0, 1]`.
pub fn volume_ratio_response<F: Scalar>(l2: F, l_rho: F) -> F {
    let zero = F::zero();
    if l2 <= zero || l_rho <= zero {
        zero
    } else if l2 >= l_rho / F::of(2.0) {
        F::one()
    } else {
        let k = F::of(3.0) / (l2 + l_rho);
        l2 * l2 * (l_rho - l2) * k * k * k
    }
}

/// Multiscale regularised volume ratio.
///
/// The published response fires on positive eigenvalues; eigenvalues are
/// negated first so that bright tubes (`λ2, λ3 < 0`) activate it.
pub fn volume_ratio<T: Scalar>(v: &Volume<T>, p: &VolumeRatioParams) -> Result<Volume<T>> {
    p.validate()?;
    let tau = T::of(p.tau);
    let mut acc = None;
    for &s in p.scales.as_slice() {
        let h = gaussian_hessian(v, s)?;
        let [_, l2, l3] = h.eigenvalues();
        let max_l3 = l3
            .data()
            .par_iter()
            .map(|&x| -x)
            .reduce(T::neg_infinity, T::max);
        let cutoff = tau * max_l3;
        let out = par_map_voxels(v.len(), |i| {
            let rho = regularized_lambda(-l3.data()[i], cutoff);
            volume_ratio_response(-l2.data()[i], rho)
        });
        running_max(&mut acc, out);
    }
    Ok(Volume::from_parts(v.dims(), acc.expect("scales are non-empty")).with_provenance(v.provenance()))
}
