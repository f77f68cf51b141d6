//! Scoring enhancer outputs: ROC/AUC against a binary ground truth, PSNR,
//! and line profiles.

mod profile;

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::volume::{normalize, Volume};

pub use profile::{extract_profile, fwhm, Profile};

pub const DEFAULT_THRESHOLDS: usize = 1024;

/// Threshold sweep on normalized scores.
#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    /// `1.0` down to `0.0`, evenly spaced.
    pub thresholds: Vec<f64>,
    /// `(fpr, tpr)` for each threshold.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

fn threshold(k: usize, n: usize) -> f64 {
    1.0 - k as f64 / n as f64
}

/// Index of the first (largest) threshold a score reaches, or `n + 1` if it
/// reaches none. Agrees exactly with `score >= threshold(k, n)`.
fn first_reached(s: f64, n: usize) -> usize {
    if s.is_nan() || s < 0.0 {
        return n + 1;
    }
    let mut k = ((1.0 - s) * n as f64).ceil().clamp(0.0, n as f64) as usize;
    while k <= n && s < threshold(k, n) {
        k += 1;
    }
    while k > 0 && s >= threshold(k - 1, n) {
        k -= 1;
    }
    k
}

fn check_truth<T: Scalar>(truth: &Volume<T>) -> Result<(u64, u64)> {
    let mut pos = 0u64;
    for (i, &t) in truth.data().iter().enumerate() {
        if t == T::one() {
            pos += 1;
        } else if t != T::zero() {
            return Err(Error::NonBinaryTruth { index: i, value: t.as_f64() });
        }
    }
    let neg = truth.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateTruth {
            positives: pos,
            negatives: neg,
        });
    }
    Ok((pos, neg))
}

/// ROC curve of `scores` (expected in `[0, 1]`) against the binary `truth`.
///
/// A voxel is called positive at threshold `t` when `score >= t`. The AUC is
/// the trapezoidal area under the points, starting from `(0, 0)`.
pub fn roc<T: Scalar, U: Scalar>(scores: &Volume<T>, truth: &Volume<U>, n_thresholds: usize) -> Result<RocCurve> {
    scores.ensure_same_dims(truth)?;
    if n_thresholds == 0 {
        return Err(Error::invalid("thresholds", "must be at least 1"));
    }
    let n = n_thresholds;
    let (pos, neg) = check_truth(truth)?;

    let plane = scores.dims().plane();
    let empty = || (vec![0u64; n + 2], vec![0u64; n + 2]);
    let (hist_pos, hist_neg) = scores
        .data()
        .par_chunks(plane)
        .zip(truth.data().par_chunks(plane))
        .fold(empty, |(mut hp, mut hn), (s, t)| {
            for (&s, &t) in s.iter().zip(t) {
                let k = first_reached(s.as_f64(), n);
                if t == U::one() {
                    hp[k] += 1;
                } else {
                    hn[k] += 1;
                }
            }
            (hp, hn)
        })
        .reduce(empty, |(mut ap, mut an), (bp, bn)| {
            ap.iter_mut().zip(bp).for_each(|(a, b)| *a += b);
            an.iter_mut().zip(bn).for_each(|(a, b)| *a += b);
            (ap, an)
        });

    let mut thresholds = Vec::with_capacity(n + 1);
    let mut points = Vec::with_capacity(n + 1);
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut auc = 0.0;
    let mut prev = (0.0, 0.0);
    for k in 0..=n {
        tp += hist_pos[k];
        fp += hist_neg[k];
        let pt = (fp as f64 / neg as f64, tp as f64 / pos as f64);
        auc += (pt.0 - prev.0) * (pt.1 + prev.1) / 2.0;
        prev = pt;
        thresholds.push(threshold(k, n));
        points.push(pt);
    }
    Ok(RocCurve { thresholds, points, auc })
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

impl RocCurve {
    /// `threshold,fpr,tpr` rows followed by a `# auc=<value>` line.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["threshold", "fpr", "tpr"])?;
        for (t, (f, p)) in self.thresholds.iter().zip(&self.points) {
            csv.serialize((t, f, p))?;
        }
        csv.flush().map_err(csv::Error::from)?;
        let mut w = csv.into_inner().map_err(|e| csv::Error::from(io::Error::other(e.to_string())))?;
        writeln!(w, "# auc={}", self.auc).map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(create(path.as_ref())?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AucRow {
    pub method: String,
    pub auc: f64,
}

/// Per-method AUCs, best first.
#[derive(Clone, Debug, PartialEq)]
pub struct AucTable {
    pub rows: Vec<AucRow>,
}

impl AucTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        for row in &self.rows {
            csv.serialize(row)?;
        }
        csv.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(create(path.as_ref())?)
    }

    pub fn get(&self, method: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.method == method).map(|r| r.auc)
    }
}

/// Normalizes each output onto `[0, 1]`, scores it against `truth`, and
/// sorts the rows by descending AUC (ties keep input order).
pub fn auc_table<T: Scalar, U: Scalar, S: AsRef<str>>(
    methods: &[(S, &Volume<T>)],
    truth: &Volume<U>,
    n_thresholds: usize,
) -> Result<AucTable> {
    if methods.is_empty() {
        return Err(Error::EmptyMethodList);
    }
    let mut rows = methods
        .iter()
        .map(|(name, v)| {
            Ok(AucRow {
                method: name.as_ref().to_string(),
                auc: roc(&normalize(v), truth, n_thresholds)?.auc,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.auc.total_cmp(&a.auc));
    Ok(AucTable { rows })
}

/// Peak signal-to-noise ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Psnr {
    Decibels(f64),
    /// Zero mean squared error.
    Identical,
}

impl Psnr {
    /// Decibels, with `Identical` as `+∞`.
    pub fn value(self) -> f64 {
        match self {
            Psnr::Decibels(db) => db,
            Psnr::Identical => f64::INFINITY,
        }
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Decibels(db) => write!(f, "{db}"),
            Psnr::Identical => f.write_str("inf"),
        }
    }
}

/// `10·log10(peak² / MSE)` between two volumes.
pub fn psnr<T: Scalar, U: Scalar>(reference: &Volume<T>, test: &Volume<U>, peak: f64) -> Result<Psnr> {
    reference.ensure_same_dims(test)?;
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::invalid("peak", format!("must be positive, got {peak}")));
    }
    let sse: f64 = reference
        .data()
        .iter()
        .zip(test.data())
        .map(|(&a, &b)| (a.as_f64() - b.as_f64()).powi(2))
        .sum();
    if sse == 0.0 {
        return Ok(Psnr::Identical);
    }
    let mse = sse / reference.len() as f64;
    Ok(Psnr::Decibels(10.0 * (peak * peak / mse).log10()))
}
