//! Separable Gaussian and Gaussian-derivative filtering.
//!
//! Kernels are sampled analytically and truncated at `ceil(4σ)`. The
//! smoothing kernel is renormalised to unit sum; the second-derivative kernel
//! is brought to zero sum by adding the truncated tail mass back onto its two
//! end taps, so constant regions give an exactly-cancelling response.
//! Boundaries use half-sample symmetric reflection (`… c b a | a b c …`). Accumulation is in `f64` with a fixed tap order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::volume::Volume;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Derivative order of a sampled Gaussian kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Smooth,
    First,
    Second,
}

pub fn kernel_radius(sigma: f64) -> usize {
    (4.0 * sigma).ceil().max(1.0) as usize
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("sigma", format!("must be positive, got {sigma}")))
    }
}

/// Sampled 1D Gaussian (derivative) kernel, taps `-r..=r`.
pub fn gaussian_kernel(sigma: f64, order: Order) -> Result<Vec<f64>> {
    check_sigma(sigma)?;
    let r = kernel_radius(sigma) as isize;
    let s2 = sigma * sigma;
    let g: Vec<f64> = (-r..=r)
        .map(|i| (-(i * i) as f64 / (2.0 * s2)).exp())
        .collect();
    let total: f64 = g.iter().sum();
    let g: Vec<f64> = g.iter().map(|v| v / total).collect();
    let taps = (-r..=r).map(|i| i as f64);
    Ok(match order {
        Order::Smooth => g,
        // correlation taps: w(t) = g'(-t)
        Order::First => taps.zip(&g).map(|(x, g)| x / s2 * g).collect(),
        Order::Second => {
            let k: Vec<f64> = taps
                .zip(&g)
                .map(|(x, g)| (x * x / (s2 * s2) - 1.0 / s2) * g)
                .collect();
            // the deficit is the tail cut off beyond the last tap; return it there
            let mut k = k;
            let half = k.iter().sum::<f64>() / 2.0;
            let last = k.len() - 1;
            k[0] -= half;
            k[last] -= half;
            k
        }
    })
}

/// Half-sample symmetric reflection into `0..n`.
#[inline]
pub fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Correlates `v` with `kernel` (odd length, centred) along `axis`.
///
/// The first-derivative kernel from [`gaussian_kernel`] is stored mirrored,
/// so correlating with it differentiates.
pub fn convolve_axis<T: Scalar>(v: &Volume<T>, kernel: &[f64], axis: Axis) -> Volume<T> {
    assert!(kernel.len() % 2 == 1, "kernel length must be odd");
    let dims = v.dims();
    let (nx, ny, nz) = (dims.nx, dims.ny, dims.nz);
    let r = (kernel.len() / 2) as isize;
    let src = v.data();
    let mut out = vec![T::zero(); dims.len()];

    out.par_chunks_mut(dims.plane())
        .enumerate()
        .for_each(|(z, plane)| {
            let mut acc = vec![0.0f64; nx];
            for y in 0..ny {
                acc.iter_mut().for_each(|a| *a = 0.0);
                match axis {
                    Axis::X => {
                        let row = &src[(z * ny + y) * nx..][..nx];
                        for (x, a) in acc.iter_mut().enumerate() {
                            for (k, &w) in kernel.iter().enumerate() {
                                let sx = reflect(x as isize + k as isize - r, nx);
                                *a += w * row[sx].as_f64();
                            }
                        }
                    }
                    Axis::Y | Axis::Z => {
                        for (k, &w) in kernel.iter().enumerate() {
                            let start = if axis == Axis::Y {
                                let sy = reflect(y as isize + k as isize - r, ny);
                                (z * ny + sy) * nx
                            } else {
                                let sz = reflect(z as isize + k as isize - r, nz);
                                (sz * ny + y) * nx
                            };
                            let row = &src[start..start + nx];
                            for (a, s) in acc.iter_mut().zip(row) {
                                *a += w * s.as_f64();
                            }
                        }
                    }
                }
                for (o, a) in plane[y * nx..(y + 1) * nx].iter_mut().zip(&acc) {
                    *o = T::of(*a);
                }
            }
        });

    Volume::from_parts(dims, out)
}

/// Applies one kernel per axis, z first, then y, then x.
pub fn separable<T: Scalar>(v: &Volume<T>, kx: &[f64], ky: &[f64], kz: &[f64]) -> Volume<T> {
    let t = convolve_axis(v, kz, Axis::Z);
    let t = convolve_axis(&t, ky, Axis::Y);
    convolve_axis(&t, kx, Axis::X)
}

/// Isotropic Gaussian smoothing.
pub fn gaussian_blur<T: Scalar>(v: &Volume<T>, sigma: f64) -> Result<Volume<T>> {
    let g = gaussian_kernel(sigma, Order::Smooth)?;
    Ok(separable(v, &g, &g, &g).with_provenance(v.provenance()))
}
