//! Stock phantoms used by the examples, tests and acceptance runs.
//!
//! All presets have unit foreground on a zero background; callers rescale
//! `foreground` before adding 8-bit-scale noise.

use super::{PhantomSpec, Point, Structure};
use crate::volume::Dims;

fn centre(n: usize) -> f64 {
    (n / 2) as f64
}

/// Straight tube along x through the volume centre, ending `n/8` voxels
/// short of each face.
pub fn tube(n: usize, diameter: f64) -> PhantomSpec {
    let c = centre(n);
    let margin = (n / 8) as f64;
    PhantomSpec::new(
        Dims::cube(n),
        Structure::Tube {
            p0: [margin, c, c],
            p1: [(n - 1) as f64 - margin, c, c],
            diameter,
        },
    )
}

/// Unit directions of the three in-plane (z = const) branches, 120° apart,
/// the first along +x.
pub fn y_branches() -> Vec<Point> {
    (0..3)
        .map(|k| {
            let a = (k as f64 * 120.0).to_radians();
            [a.cos(), a.sin(), 0.0]
        })
        .collect()
}

/// Three-branch junction at the volume centre with branches `3n/8` long.
pub fn y_junction(n: usize, diameter: f64) -> PhantomSpec {
    let c = centre(n);
    PhantomSpec::new(
        Dims::cube(n),
        Structure::YJunction {
            center: [c, c, c],
            branches: y_branches(),
            length: (3 * n / 8) as f64,
            diameter,
        },
    )
}

/// Three tubes of diameter 3, 5 and 7, a diameter-5 Y-junction and a
/// diameter-9 ball, laid out without overlap in a 96³ frame and scaled to
/// `n³`.
pub fn composite(n: usize) -> PhantomSpec {
    let s = n as f64 / 96.0;
    let p = |x: f64, y: f64, z: f64| [x * s, y * s, z * s];
    let parts = vec![
        Structure::Tube {
            p0: p(8.0, 16.0, 16.0),
            p1: p(88.0, 28.0, 20.0),
            diameter: 3.0,
        },
        Structure::Tube {
            p0: p(16.0, 8.0, 70.0),
            p1: p(24.0, 88.0, 60.0),
            diameter: 5.0,
        },
        Structure::Tube {
            p0: p(8.0, 84.0, 84.0),
            p1: p(88.0, 70.0, 44.0),
            diameter: 7.0,
        },
        Structure::YJunction {
            center: p(60.0, 50.0, 40.0),
            branches: y_branches(),
            length: 22.0 * s,
            diameter: 5.0,
        },
        Structure::Ball {
            center: p(22.0, 58.0, 28.0),
            diameter: 9.0,
        },
    ];
    PhantomSpec::new(Dims::cube(n), Structure::Composite { parts })
}

/// Thin (diameter 3) bent fibres, a stand-in for neurite or projection-fibre
/// images.
pub fn fibers(n: usize) -> PhantomSpec {
    let s = n as f64 / 64.0;
    let p = |x: f64, y: f64, z: f64| [x * s, y * s, z * s];
    let polylines: [&[Point]; 3] = [
        &[p(4.0, 10.0, 32.0), p(30.0, 30.0, 28.0), p(60.0, 24.0, 36.0)],
        &[p(10.0, 56.0, 20.0), p(34.0, 42.0, 42.0), p(58.0, 54.0, 46.0)],
        &[p(44.0, 4.0, 10.0), p(40.0, 34.0, 14.0), p(46.0, 60.0, 54.0)],
    ];
    let parts = polylines
        .iter()
        .flat_map(|line| {
            line.windows(2).map(|w| Structure::Tube {
                p0: w[0],
                p1: w[1],
                diameter: 3.0,
            })
        })
        .collect();
    PhantomSpec::new(Dims::cube(n), Structure::Composite { parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::generate_phantom;

    #[test]
    fn presets_render_inside_their_frames() {
        for spec in [tube(32, 5.0), y_junction(64, 5.0), composite(96), fibers(64)] {
            let p = generate_phantom::<f32>(&spec).unwrap();
            let fg = p.truth.data().iter().filter(|&&v| v > 0.5).count();
            assert!(fg > 0 && fg < p.truth.len() / 4);
        }
    }
}
