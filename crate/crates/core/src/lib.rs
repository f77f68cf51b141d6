//! Volumetric vessel enhancement.
//!
//! The centre of the crate is the multiscale [`bowlerhat`] transform: a bank
//! of sphere openings and a bank of direction-maximised line openings whose
//! scale-wise difference lights up elongated bright structures while leaving
//! background and blobs dark. Around it sit the flat grey-scale
//! [`morphology`] operators it is built from, the Hessian-based baselines in
//! [`hessian`] (vesselness, neuriteness, regularised volume ratio), synthetic
//! ground-truthed [`phantom`]s with the usual noise models, and the ROC/AUC,
//! PSNR and profile tools in [`eval`].
//!
//! Every kernel is generic over the voxel scalar ([`Scalar`], implemented for
//! `f32` and `f64`). The on-disk format is always `u8`, `u16` or `f32`.
//!
//! All parallel kernels run on the ambient rayon pool and produce
//! bit-identical output for any worker count.

pub mod bowlerhat;
pub mod error;
pub mod eval;
pub mod filter;
pub mod hessian;
pub mod morphology;
pub mod phantom;
pub mod scalar;
pub mod volume;

pub use bowlerhat::{bowler_hat, BowlerHatParams};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use volume::{Dims, Dtype, Volume};

/// Single-precision volume, the type the file format and CLI work in.
pub type Volume32 = Volume<f32>;
/// Double-precision volume.
pub type Volume64 = Volume<f64>;
