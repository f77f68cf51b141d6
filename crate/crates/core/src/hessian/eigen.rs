//! Eigen-decomposition of symmetric 3×3 matrices.
//!
//! Eigenvalues use the closed-form trigonometric solution of the
//! characteristic cubic. When two eigenvalues nearly coincide the `acos`
//! argument sits at ±1, where it is ill-conditioned, and we fall back to
//! cyclic Jacobi rotations.

use crate::scalar::Scalar;

/// Upper triangle of a symmetric 3×3 matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymMat3<F> {
    pub xx: F,
    pub yy: F,
    pub zz: F,
    pub xy: F,
    pub xz: F,
    pub yz: F,
}

impl<F: Scalar> SymMat3<F> {
    pub fn diag(a: F, b: F, c: F) -> Self {
        SymMat3 {
            xx: a,
            yy: b,
            zz: c,
            xy: F::zero(),
            xz: F::zero(),
            yz: F::zero(),
        }
    }

    pub fn to_array(&self) -> [[F; 3]; 3] {
        [
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz],
        ]
    }

    pub fn trace(&self) -> F {
        self.xx + self.yy + self.zz
    }

    pub fn det(&self) -> F {
        self.xx * (self.yy * self.zz - self.yz * self.yz)
            - self.xy * (self.xy * self.zz - self.yz * self.xz)
            + self.xz * (self.xy * self.yz - self.yy * self.xz)
    }

    pub fn frobenius(&self) -> F {
        let two = F::of(2.0);
        (self.xx * self.xx
            + self.yy * self.yy
            + self.zz * self.zz
            + two * (self.xy * self.xy + self.xz * self.xz + self.yz * self.yz))
            .sqrt()
    }
}

fn sort_by_magnitude<F: Scalar>(mut v: [F; 3]) -> [F; 3] {
    v.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).expect("finite eigenvalues"));
    v
}

/// Eigenvalues ordered `|λ1| ≤ |λ2| ≤ |λ3|`.
pub fn eig_sym3<F: Scalar>(m: &SymMat3<F>) -> [F; 3] {
    let zero = F::zero();
    let p1 = m.xy * m.xy + m.xz * m.xz + m.yz * m.yz;
    if p1 == zero {
        return sort_by_magnitude([m.xx, m.yy, m.zz]);
    }
    let three = F::of(3.0);
    let q = m.trace() / three;
    let (a, b, c) = (m.xx - q, m.yy - q, m.zz - q);
    let p = ((a * a + b * b + c * c + F::of(2.0) * p1) / F::of(6.0)).sqrt();
    if p == zero {
        return [q, q, q];
    }
    let shifted = SymMat3 {
        xx: a / p,
        yy: b / p,
        zz: c / p,
        xy: m.xy / p,
        xz: m.xz / p,
        yz: m.yz / p,
    };
    let r = shifted.det() / F::of(2.0);
    let tol = F::of(1e-12).max(F::of(16.0) * F::epsilon());
    if r.abs() >= F::one() - tol {
        return jacobi(m).0;
    }
    let phi = r.acos() / three;
    let largest = q + F::of(2.0) * p * phi.cos();
    let smallest = q + F::of(2.0) * p * (phi + F::of(2.0) * F::PI() / three).cos();
    let middle = three * q - largest - smallest;
    sort_by_magnitude([largest, middle, smallest])
}

/// Eigenvalues (ordered by magnitude) and matching unit eigenvectors, the
/// latter as the columns of the returned matrix.
pub fn eigh_sym3<F: Scalar>(m: &SymMat3<F>) -> ([F; 3], [[F; 3]; 3]) {
    jacobi(m)
}

fn jacobi<F: Scalar>(m: &SymMat3<F>) -> ([F; 3], [[F; 3]; 3]) {
    let zero = F::zero();
    let one = F::one();
    let mut a = m.to_array();
    let mut v = [[one, zero, zero], [zero, one, zero], [zero, zero, one]];
    let scale = m.frobenius();
    if scale > zero {
        for _sweep in 0..64 {
            let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
            if off.sqrt() <= F::epsilon() * scale * F::of(1e-2) {
                break;
            }
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                if a[p][q] == zero {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (F::of(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + one).sqrt());
                let c = one / (t * t + one).sqrt();
                let s = t * c;
                // A ← Jᵀ A J with J the (p, q) rotation
                for k in 0..3 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..3 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[i][i].abs().partial_cmp(&a[j][j].abs()).expect("finite"));
    let values = order.map(|i| a[i][i]);
    let mut vectors = [[zero; 3]; 3];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..3 {
            vectors[row][col] = v[row][src];
        }
    }
    (values, vectors)
}
