//! Dense 3D scalar grids.
//!
//! Voxels are stored x-fastest: `(x, y, z)` lives at `x + nx * (y + ny * z)`.
//! Voxels are isotropic; every length in this crate is in voxel units.

mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use io::{load_volume, save_volume, Dtype, VolumeHeader};

/// Voxel counts along x, y and z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 3]", from = "[usize; 3]")]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub const fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Dims { nx, ny, nz }
    }

    pub const fn cube(n: usize) -> Self {
        Dims::new(n, n, n)
    }

    pub const fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub const fn as_array(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    /// Voxels in one z-plane.
    pub const fn plane(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        debug_assert!(x < self.nx && y < self.ny && z < self.nz);
        x + self.nx * (y + self.ny * z)
    }

    #[inline]
    pub fn coords(&self, i: usize) -> [usize; 3] {
        let x = i % self.nx;
        let yz = i / self.nx;
        [x, yz % self.ny, yz / self.ny]
    }

    /// Index of a signed coordinate, or `None` outside the grid.
    #[inline]
    pub fn checked_index(&self, x: isize, y: isize, z: isize) -> Option<usize> {
        let inside = (0..self.nx as isize).contains(&x)
            && (0..self.ny as isize).contains(&y)
            && (0..self.nz as isize).contains(&z);
        inside.then(|| self.index(x as usize, y as usize, z as usize))
    }
}

impl From<[usize; 3]> for Dims {
    fn from([nx, ny, nz]: [usize; 3]) -> Self {
        Dims::new(nx, ny, nz)
    }
}

impl From<Dims> for [usize; 3] {
    fn from(d: Dims) -> Self {
        d.as_array()
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

/// A dense volume of finite intensities.
///
/// Volumes are immutable once built; operations return new volumes.
#[derive(Clone, Debug, PartialEq)]
pub struct Volume<T: Scalar = f32> {
    dims: Dims,
    data: Vec<T>,
    provenance: String,
}

impl<T: Scalar> Volume<T> {
    /// Wraps `data`, checking its length and that every value is finite.
    pub fn new(dims: Dims, data: Vec<T>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::NonPositiveDims(
                dims.as_array().iter().map(|&n| n as i64).collect(),
            ));
        }
        if data.len() != dims.len() {
            return Err(Error::DataLength {
                dims,
                expected: dims.len(),
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Volume {
            dims,
            data,
            provenance: String::new(),
        })
    }

    /// Kernels that can only produce finite values from finite inputs build
    /// their results through here.
    pub(crate) fn from_parts(dims: Dims, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), dims.len());
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Volume {
            dims,
            data,
            provenance: String::new(),
        }
    }

    pub fn filled(dims: Dims, value: T) -> Self {
        assert!(value.is_finite(), "fill value must be finite");
        assert!(!dims.is_empty(), "dims must be positive");
        Self::from_parts(dims, vec![value; dims.len()])
    }

    pub fn zeros(dims: Dims) -> Self {
        Self::filled(dims, T::zero())
    }

    /// Builds a volume by evaluating `f` at every voxel.
    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(dims.len());
        for z in 0..dims.nz {
            for y in 0..dims.ny {
                for x in 0..dims.nx {
                    data.push(f(x, y, z));
                }
            }
        }
        Self::new(dims, data)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> T {
        self.data[self.dims.index(x, y, z)]
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn min(&self) -> T {
        self.data.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.data.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Converts every voxel to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Volume<U> {
        let data = self.data.iter().map(|&v| U::of(v.as_f64())).collect();
        Volume::new(self.dims, data)
            .expect("finite values stay finite across f32/f64")
            .with_provenance(self.provenance.clone())
    }

    /// Applies `f` voxel-wise. Fails if `f` produces a non-finite value.
    pub fn try_map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Volume::new(self.dims, self.data.iter().map(|&v| f(v)).collect())
    }

    pub(crate) fn ensure_same_dims<U: Scalar>(&self, other: &Volume<U>) -> Result<()> {
        if self.dims == other.dims {
            Ok(())
        } else {
            Err(Error::DimsMismatch(self.dims, other.dims))
        }
    }
}

/// Affinely rescales `v` onto `[0, 1]` via `(x - min) / (max - min)`.
///
/// A constant volume maps to all zeros.
pub fn normalize<T: Scalar>(v: &Volume<T>) -> Volume<T> {
    let lo = v.min();
    let range = v.max() - lo;
    let data = if range > T::zero() && range.is_finite() {
        v.data().iter().map(|&x| (x - lo) / range).collect()
    } else if range > T::zero() {
        // max - min overflowed; halve both terms first
        let two = T::of(2.0);
        let half_range = v.max() / two - lo / two;
        v.data()
            .iter()
            .map(|&x| ((x / two - lo / two) / half_range).min(T::one()))
            .collect()
    } else {
        vec![T::zero(); v.len()]
    };
    Volume::from_parts(v.dims(), data).with_provenance(v.provenance())
}
