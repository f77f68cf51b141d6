//! Flat grey-scale morphology on volumes.
//!
//! Offsets that fall outside the volume are ignored: erosion is the minimum
//! over the in-bounds part of the element, dilation the maximum. Since every
//! element contains the origin that set is never empty.

mod element;

use rayon::prelude::*;

use crate::scalar::Scalar;
use crate::volume::Volume;

pub use element::{
    make_direction_set, make_line_se, make_sphere_se, DirectionSet, Offset, Shape,
    StructuringElement,
};
pub(crate) use element::check_odd_diameter;

#[derive(Clone, Copy)]
enum Rank {
    Min,
    Max,
}

/// Scans the element offset by offset, folding whole row segments so the
/// inner loop is a contiguous element-wise min/max.
fn rank_filter<T: Scalar>(v: &Volume<T>, se: &StructuringElement, rank: Rank) -> Volume<T> {
    let dims = v.dims();
    let (nx, ny, nz) = (dims.nx as isize, dims.ny as isize, dims.nz as isize);
    let src = v.data();
    let mut out = src.to_vec();

    let offsets: Vec<Offset> = se
        .offsets()
        .iter()
        .copied()
        .filter(|&o| o != [0, 0, 0])
        .collect();

    out.par_chunks_mut(dims.plane())
        .enumerate()
        .for_each(|(z, plane)| {
            let z = z as isize;
            for &[dx, dy, dz] in &offsets {
                let (dx, dy, dz) = (dx as isize, dy as isize, dz as isize);
                let sz = z + dz;
                let x0 = (-dx).max(0);
                let x1 = (nx - dx).min(nx);
                if !(0..nz).contains(&sz) || x0 >= x1 {
                    continue;
                }
                let (x0, x1) = (x0 as usize, x1 as usize);
                let y0 = (-dy).max(0);
                let y1 = (ny - dy).min(ny);
                for y in y0..y1 {
                    let sy = y + dy;
                    let dst_row = y as usize * nx as usize;
                    let src_row = ((sz * ny + sy) * nx) as usize;
                    let dst = &mut plane[dst_row + x0..dst_row + x1];
                    let sx0 = (x0 as isize + dx) as usize;
                    let s = &src[src_row + sx0..src_row + sx0 + (x1 - x0)];
                    match rank {
                        Rank::Min => {
                            for (d, &s) in dst.iter_mut().zip(s) {
                                if s < *d {
                                    *d = s;
                                }
                            }
                        }
                        Rank::Max => {
                            for (d, &s) in dst.iter_mut().zip(s) {
                                if s > *d {
                                    *d = s;
                                }
                            }
                        }
                    }
                }
            }
        });

    Volume::from_parts(dims, out)
}

/// Minimum of `v` over the element placed at each voxel.
pub fn erode<T: Scalar>(v: &Volume<T>, se: &StructuringElement) -> Volume<T> {
    rank_filter(v, se, Rank::Min)
}

/// Maximum of `v` over the element placed at each voxel.
pub fn dilate<T: Scalar>(v: &Volume<T>, se: &StructuringElement) -> Volume<T> {
    rank_filter(v, se, Rank::Max)
}

/// Erosion followed by dilation. Never increases a voxel; idempotent.
pub fn opening<T: Scalar>(v: &Volume<T>, se: &StructuringElement) -> Volume<T> {
    dilate(&erode(v, se), se)
}

/// Dilation followed by erosion. Never decreases a voxel.
pub fn closing<T: Scalar>(v: &Volume<T>, se: &StructuringElement) -> Volume<T> {
    erode(&dilate(v, se), se)
}

fn difference<T: Scalar>(a: &Volume<T>, b: &Volume<T>) -> Volume<T> {
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| x - y).collect();
    Volume::from_parts(a.dims(), data)
}

/// `v - opening(v)`: bright details smaller than the element. Non-negative.
pub fn top_hat<T: Scalar>(v: &Volume<T>, se: &StructuringElement) -> Volume<T> {
    difference(v, &opening(v, se))
}

/// `v - closing(v)`: dark details smaller than the element. Non-positive.
pub fn bottom_hat<T: Scalar>(v: &Volume<T>, se: &StructuringElement) -> Volume<T> {
    difference(v, &closing(v, se))
}
