//! Gaussian scale-space Hessian and the eigenvalue-based baseline
//! enhancers: Frangi vesselness, neuriteness and the regularised volume
//! ratio.
//!
//! All three target bright structures on a dark background, so a bright
//! tube has `λ2, λ3 < 0` with eigenvalues ordered `|λ1| ≤ |λ2| ≤ |λ3|`.

mod eigen;
mod enhance;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filter::{check_sigma, convolve_axis, gaussian_kernel, Axis, Order};
use crate::scalar::Scalar;
use crate::volume::Volume;

pub use eigen::{eig_sym3, eigh_sym3, SymMat3};
pub use enhance::{
    frangi_response, neuriteness, neuriteness_multiscale, regularized_lambda, vesselness,
    volume_ratio, volume_ratio_response, Neuriteness, VesselnessParams, VolumeRatioParams,
    DEFAULT_SCALES, NEURITENESS_ALPHA,
};

/// Strictly increasing set of positive Gaussian scales (σ, in voxels).
#[derive(Clone, Debug, PartialEq)]
pub struct Scales(Vec<f64>);

impl Scales {
    pub fn new(scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::invalid("scales", "need at least one scale"));
        }
        for &s in &scales {
            check_sigma(s)?;
        }
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("scales", "must be strictly increasing"));
        }
        Ok(Scales(scales))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Default for Scales {
    fn default() -> Self {
        Scales(DEFAULT_SCALES.to_vec())
    }
}

/// Second derivatives of a volume at one Gaussian scale, with per-voxel
/// eigenvalues sorted by magnitude.
#[derive(Clone, Debug)]
pub struct HessianField<T: Scalar = f32> {
    sigma: f64,
    components: [Volume<T>; 6],
    eigenvalues: [Volume<T>; 3],
}

impl<T: Scalar> HessianField<T> {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `[xx, yy, zz, xy, xz, yz]`.
    pub fn components(&self) -> &[Volume<T>; 6] {
        &self.components
    }

    /// `[λ1, λ2, λ3]` volumes, `|λ1| ≤ |λ2| ≤ |λ3|` at every voxel.
    pub fn eigenvalues(&self) -> &[Volume<T>; 3] {
        &self.eigenvalues
    }

    pub fn matrix_at(&self, i: usize) -> SymMat3<T> {
        let c = &self.components;
        SymMat3 {
            xx: c[0].data()[i],
            yy: c[1].data()[i],
            zz: c[2].data()[i],
            xy: c[3].data()[i],
            xz: c[4].data()[i],
            yz: c[5].data()[i],
        }
    }

    pub fn eigen_at(&self, i: usize) -> [T; 3] {
        let e = &self.eigenvalues;
        [e[0].data()[i], e[1].data()[i], e[2].data()[i]]
    }
}

/// Hessian of `v` smoothed at scale `sigma`, by separable convolution with
/// sampled Gaussian-derivative kernels.
pub fn gaussian_hessian<T: Scalar>(v: &Volume<T>, sigma: f64) -> Result<HessianField<T>> {
    let g0 = gaussian_kernel(sigma, Order::Smooth)?;
    let g1 = gaussian_kernel(sigma, Order::First)?;
    let g2 = gaussian_kernel(sigma, Order::Second)?;

    // z pass, then y, then x; shared intermediates cut 18 passes to 15
    let z0 = convolve_axis(v, &g0, Axis::Z);
    let z1 = convolve_axis(v, &g1, Axis::Z);
    let z2 = convolve_axis(v, &g2, Axis::Z);
    let y0z0 = convolve_axis(&z0, &g0, Axis::Y);
    let y1z0 = convolve_axis(&z0, &g1, Axis::Y);
    let y2z0 = convolve_axis(&z0, &g2, Axis::Y);
    let y0z1 = convolve_axis(&z1, &g0, Axis::Y);
    let y1z1 = convolve_axis(&z1, &g1, Axis::Y);
    let y0z2 = convolve_axis(&z2, &g0, Axis::Y);
    drop((z0, z1, z2));

    // Entries below the rounding bound of the three passes are zero in
    // exact arithmetic (e.g. every voxel of a constant volume).
    let l1 = |k: &[f64]| k.iter().map(|w| w.abs()).sum::<f64>();
    let (n0, n1, n2) = (l1(&g0), l1(&g1), l1(&g2));
    let peak = v.data().iter().fold(0.0f64, |m, x| m.max(x.as_f64().abs()));
    let unit = 8.0 * T::epsilon().as_f64() * peak;
    let floors = [n2 * n0 * n0, n2 * n0 * n0, n2 * n0 * n0, n1 * n1 * n0, n1 * n1 * n0, n1 * n1 * n0];

    let components = [
        convolve_axis(&y0z0, &g2, Axis::X),
        convolve_axis(&y2z0, &g0, Axis::X),
        convolve_axis(&y0z2, &g0, Axis::X),
        convolve_axis(&y1z0, &g1, Axis::X),
        convolve_axis(&y0z1, &g1, Axis::X),
        convolve_axis(&y1z1, &g0, Axis::X),
    ];
    let components = components.into_iter().zip(floors).map(|(c, f)| {
        let floor = T::of(unit * f);
        let data = c.data().iter().map(|&h| if h.abs() <= floor { T::zero() } else { h }).collect();
        Volume::from_parts(c.dims(), data)
    });
    let components: [Volume<T>; 6] = components.collect::<Vec<_>>().try_into().expect("six components");

    let dims = v.dims();
    let mut eig = vec![[T::zero(); 3]; dims.len()];
    eig.par_chunks_mut(dims.plane())
        .enumerate()
        .for_each(|(z, plane)| {
            let base = z * dims.plane();
            for (j, out) in plane.iter_mut().enumerate() {
                let i = base + j;
                let c = &components;
                *out = eig_sym3(&SymMat3 {
                    xx: c[0].data()[i],
                    yy: c[1].data()[i],
                    zz: c[2].data()[i],
                    xy: c[3].data()[i],
                    xz: c[4].data()[i],
                    yz: c[5].data()[i],
                });
            }
        });
    let eigenvalues =
        [0, 1, 2].map(|k| Volume::from_parts(dims, eig.iter().map(|l| l[k]).collect()));

    Ok(HessianField {
        sigma,
        components,
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::gaussian_blur;
    use crate::volume::Dims;

    fn blob(n: usize, sigma0: f64) -> (Volume<f64>, f64) {
        let c = (n / 2) as f64;
        let v = Volume::from_fn(Dims::cube(n), |x, y, z| {
            let r2 = (x as f64 - c).powi(2) + (y as f64 - c).powi(2) + (z as f64 - c).powi(2);
            (-r2 / (2.0 * sigma0 * sigma0)).exp()
        })
        .unwrap();
        (v, c)
    }

    #[test]
    fn constant_volume_has_zero_hessian() {
        let v = Volume::filled(Dims::new(12, 10, 9), 42.0f32);
        let h = gaussian_hessian(&v, 1.5).unwrap();
        for comp in h.components() {
            assert!(comp.data().iter().all(|x| x.abs() < 1e-6));
        }
        assert!(gaussian_hessian(&v, 0.0).is_err());
    }

    #[test]
    fn gaussian_on_gaussian_centre_value() {
        // blob exp(-r²/2σ0²) smoothed by G_s is A·exp(-r²/2σ²) with
        // σ² = σ0² + s² and A = (σ0/σ)³; ∂²/∂x² at the centre is -A/σ².
        let (sigma0, s) = (3.0, 2.0);
        let (v, c) = blob(33, sigma0);
        let h = gaussian_hessian(&v, s).unwrap();
        let var = sigma0 * sigma0 + s * s;
        let expected = -(sigma0 / var.sqrt()).powi(3) / var;
        let i = v.dims().index(c as usize, c as usize, c as usize);
        for comp in &h.components()[..3] {
            let got = comp.data()[i];
            assert!(((got - expected) / expected).abs() < 0.02, "{got} vs {expected}");
        }
        for comp in &h.components()[3..] {
            assert!(comp.data()[i].abs() < 1e-9);
        }
    }

    #[test]
    fn eigenvalues_reconstruct_components() {
        let (v, _) = blob(21, 2.5);
        let v = Volume::from_fn(v.dims(), |x, y, z| v.get(x, y, z) + 0.01 * (x * y + z) as f64).unwrap();
        let h = gaussian_hessian(&v, 1.5).unwrap();
        for i in (0..v.len()).step_by(97) {
            let m = h.matrix_at(i);
            let (l, q) = eigh_sym3(&m);
            let a = m.to_array();
            let mut err = 0.0f64;
            for r in 0..3 {
                for c in 0..3 {
                    let rec: f64 = (0..3).map(|k| q[r][k] * l[k] * q[c][k]).sum();
                    err += (rec - a[r][c]).powi(2);
                }
            }
            assert!(err.sqrt() <= 1e-5 * m.frobenius().max(1e-300));
            let stored = h.eigen_at(i);
            assert!(stored[0].abs() <= stored[1].abs() && stored[1].abs() <= stored[2].abs());
        }
    }

    #[test]
    fn matches_fourth_order_finite_differences() {
        let (v, c) = blob(41, 6.0);
        let s = 1.5;
        let h = gaussian_hessian(&v, s).unwrap();
        let smooth = gaussian_blur(&v, s).unwrap();
        let f = |x: isize, y: isize, z: isize| smooth.get(x as usize, y as usize, z as usize);
        // 5-point stencils, O(h⁴)
        let d2 = |g: &dyn Fn(isize) -> f64| {
            (-g(2) + 16.0 * g(1) - 30.0 * g(0) + 16.0 * g(-1) - g(-2)) / 12.0
        };
        let d1 = |g: &dyn Fn(isize) -> f64| (-g(2) + 8.0 * g(1) - 8.0 * g(-1) + g(-2)) / 12.0;

        let c = c as isize;
        let mut max_err = [0.0f64; 6];
        let mut max_val = [0.0f64; 6];
        for z in c - 8..=c + 8 {
            for y in c - 8..=c + 8 {
                for x in c - 8..=c + 8 {
                    let fd = [
                        d2(&|k| f(x + k, y, z)),
                        d2(&|k| f(x, y + k, z)),
                        d2(&|k| f(x, y, z + k)),
                        d1(&|a| d1(&|b| f(x + a, y + b, z))),
                        d1(&|a| d1(&|b| f(x + a, y, z + b))),
                        d1(&|a| d1(&|b| f(x, y + a, z + b))),
                    ];
                    let i = v.dims().index(x as usize, y as usize, z as usize);
                    for k in 0..6 {
                        max_err[k] = max_err[k].max((h.components()[k].data()[i] - fd[k]).abs());
                        max_val[k] = max_val[k].max(fd[k].abs());
                    }
                }
            }
        }
        for k in 0..6 {
            assert!(max_err[k] / max_val[k] < 1e-3, "component {k}: {}", max_err[k] / max_val[k]);
        }
    }

    #[test]
    fn scales_validation() {
        assert!(Scales::new(vec![]).is_err());
        assert!(Scales::new(vec![1.0, 1.0]).is_err());
        assert!(Scales::new(vec![2.0, 1.0]).is_err());
        assert!(Scales::new(vec![-1.0]).is_err());
        assert_eq!(Scales::default().as_slice(), &[1.0, 1.5, 2.0, 3.0, 4.0]);
    }
}
