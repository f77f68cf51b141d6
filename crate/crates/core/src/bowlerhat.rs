//! Multiscale 3D bowler-hat transform.
//!
//! For every odd diameter `d ≤ d_max` the input is opened twice: once with a
//! ball of diameter `d`, and once with lines of length `d` in every direction
//! of a hemisphere set, keeping the per-voxel maximum over directions. A
//! voxel on a vessel narrower than `d` loses its intensity under the ball but
//! keeps it under the line laid along the vessel, so the per-scale
//! difference `line − ball` is large there. Background stays dark (openings
//! never brighten) and blobs that admit the ball score near zero. The output
//! is the maximum difference over scales, clamped at zero.

use crate::error::{Error, Result};
use crate::morphology::{
    check_odd_diameter, make_direction_set, make_line_se, make_sphere_se, opening, DirectionSet,
    StructuringElement,
};
use crate::scalar::Scalar;
use crate::volume::Volume;

pub const DEFAULT_D_MAX: u32 = 9;
pub const DEFAULT_DIRECTIONS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BowlerHatParams {
    /// Largest element size in voxels, odd. Roughly the widest vessel to
    /// enhance.
    pub d_max: u32,
    /// Number of line orientations.
    pub n_directions: usize,
}

impl Default for BowlerHatParams {
    fn default() -> Self {
        BowlerHatParams {
            d_max: DEFAULT_D_MAX,
            n_directions: DEFAULT_DIRECTIONS,
        }
    }
}

impl BowlerHatParams {
    pub fn new(d_max: u32, n_directions: usize) -> Result<Self> {
        let p = BowlerHatParams { d_max, n_directions };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_odd_diameter("d_max", self.d_max)?;
        if self.n_directions == 0 {
            return Err(Error::invalid("directions", "must be at least 1"));
        }
        Ok(())
    }

    /// Element sizes `1, 3, …, d_max`.
    pub fn diameters(&self) -> Vec<u32> {
        (1..=self.d_max).step_by(2).collect()
    }
}

/// One opened volume per element size.
#[derive(Clone, Debug)]
pub struct ScaleBank<T: Scalar = f32> {
    params: BowlerHatParams,
    diameters: Vec<u32>,
    volumes: Vec<Volume<T>>,
}

impl<T: Scalar> ScaleBank<T> {
    pub fn params(&self) -> &BowlerHatParams {
        &self.params
    }

    pub fn diameters(&self) -> &[u32] {
        &self.diameters
    }

    pub fn volumes(&self) -> &[Volume<T>] {
        &self.volumes
    }

    pub fn get(&self, d: u32) -> Option<&Volume<T>> {
        self.diameters.iter().position(|&x| x == d).map(|i| &self.volumes[i])
    }
}

/// Distinct line elements of length `d` over `dirs`. Short lines in nearby
/// directions often digitise identically; their openings would coincide.
fn line_elements(d: u32, dirs: &DirectionSet) -> Vec<StructuringElement> {
    let mut out: Vec<StructuringElement> = Vec::with_capacity(dirs.len());
    for v in dirs.vectors() {
        let se = make_line_se(d, *v).expect("direction set vectors are unit");
        if !out.iter().any(|s| s.offsets() == se.offsets()) {
            out.push(se);
        }
    }
    out
}

fn line_opening_max<T: Scalar>(v: &Volume<T>, d: u32, dirs: &DirectionSet) -> Volume<T> {
    if d == 1 {
        return v.clone();
    }
    let mut acc: Option<Vec<T>> = None;
    for se in line_elements(d, dirs) {
        let o = opening(v, &se).into_data();
        match &mut acc {
            None => acc = Some(o),
            Some(a) => a.iter_mut().zip(o).for_each(|(a, o)| {
                if o > *a {
                    *a = o
                }
            }),
        }
    }
    Volume::from_parts(v.dims(), acc.expect("direction set is non-empty"))
}

fn sphere_opening<T: Scalar>(v: &Volume<T>, d: u32) -> Volume<T> {
    if d == 1 {
        return v.clone();
    }
    opening(v, &make_sphere_se(d).expect("odd diameter"))
}

/// Ball openings of `v` for every size.
pub fn sphere_bank<T: Scalar>(v: &Volume<T>, p: &BowlerHatParams) -> Result<ScaleBank<T>> {
    p.validate()?;
    let diameters = p.diameters();
    let volumes = diameters.iter().map(|&d| sphere_opening(v, d)).collect();
    Ok(ScaleBank {
        params: *p,
        diameters,
        volumes,
    })
}

/// Direction-maximised line openings of `v` for every size.
pub fn line_bank<T: Scalar>(v: &Volume<T>, p: &BowlerHatParams) -> Result<ScaleBank<T>> {
    p.validate()?;
    let dirs = make_direction_set(p.n_directions)?;
    let diameters = p.diameters();
    let volumes = diameters.iter().map(|&d| line_opening_max(v, d, &dirs)).collect();
    Ok(ScaleBank {
        params: *p,
        diameters,
        volumes,
    })
}

fn fold_difference<T: Scalar>(acc: &mut [T], line: &Volume<T>, sphere: &Volume<T>) {
    for ((a, &l), &s) in acc.iter_mut().zip(line.data()).zip(sphere.data()) {
        let diff = l - s;
        if diff > *a {
            *a = diff;
        }
    }
}

/// Combines precomputed banks: `max_d (line[d] − sphere[d])`, floored at 0.
pub fn bowler_hat_from_banks<T: Scalar>(sphere: &ScaleBank<T>, line: &ScaleBank<T>) -> Result<Volume<T>> {
    if sphere.diameters != line.diameters || sphere.volumes.is_empty() {
        return Err(Error::invalid(
            "scale banks",
            format!("size lists differ: {:?} vs {:?}", sphere.diameters, line.diameters),
        ));
    }
    let dims = sphere.volumes[0].dims();
    for v in sphere.volumes.iter().chain(&line.volumes) {
        if v.dims() != dims {
            return Err(Error::DimsMismatch(dims, v.dims()));
        }
    }
    let mut acc = vec![T::zero(); dims.len()];
    for (l, s) in line.volumes.iter().zip(&sphere.volumes) {
        fold_difference(&mut acc, l, s);
    }
    Ok(Volume::from_parts(dims, acc).with_provenance(sphere.volumes[0].provenance()))
}

/// The bowler-hat transform of `v`.
///
/// Streams over sizes so at most three volumes are alive at once; the
/// result is identical to [`bowler_hat_from_banks`] on the full banks.
pub fn bowler_hat<T: Scalar>(v: &Volume<T>, p: &BowlerHatParams) -> Result<Volume<T>> {
    p.validate()?;
    let dirs = make_direction_set(p.n_directions)?;
    let mut acc = vec![T::zero(); v.len()];
    // d = 1 opens to the identity on both sides and contributes nothing
    for d in p.diameters().into_iter().filter(|&d| d > 1) {
        let sphere = sphere_opening(v, d);
        let line = line_opening_max(v, d, &dirs);
        fold_difference(&mut acc, &line, &sphere);
    }
    Ok(Volume::from_parts(v.dims(), acc).with_provenance(v.provenance()))
}
