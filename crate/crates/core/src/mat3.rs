//! 3×3 matrices and 3-vectors over ℚ(√2).
//!
//! All comparisons are structural equality of canonical scalars; there is
//! no tolerance anywhere.

use std::array;
use std::fmt;
use std::ops::{Index, Mul};

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::scalar::QSqrt2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("matrix is singular")]
pub struct SingularMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Vec3(pub [QSqrt2; 3]);

impl Vec3 {
    pub fn new(x: QSqrt2, y: QSqrt2, z: QSqrt2) -> Self {
        Vec3([x, y, z])
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        Vec3([x.into(), y.into(), z.into()])
    }

    /// The base point `(0, 1, 0)`.
    pub fn unit_y() -> Self {
        Vec3::from_ints(0, 1, 0)
    }

    pub fn dot(&self, other: &Vec3) -> QSqrt2 {
        let [a, b, c] = &self.0;
        let [x, y, z] = &other.0;
        QSqrt2::dot3([a, b, c], [x, y, z])
    }

    /// `x² + y² + z²`.
    pub fn norm_sq(&self) -> QSqrt2 {
        self.dot(self)
    }
}

impl Index<usize> for Vec3 {
    type Output = QSqrt2;
    fn index(&self, i: usize) -> &QSqrt2 {
        &self.0[i]
    }
}

impl Serialize for Vec3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Row-major 3×3 matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat3([[QSqrt2; 3]; 3]);

impl Mat3 {
    pub fn from_rows(rows: [[QSqrt2; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> QSqrt2) -> Self {
        Mat3(array::from_fn(|i| array::from_fn(|j| f(i, j))))
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { QSqrt2::one() } else { QSqrt2::zero() })
    }

    pub fn diag(a: QSqrt2, b: QSqrt2, c: QSqrt2) -> Self {
        let d = [a, b, c];
        Self::from_fn(|i, j| if i == j { d[i].clone() } else { QSqrt2::zero() })
    }

    pub fn rows(&self) -> &[[QSqrt2; 3]; 3] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| if i == j { self.0[i][j].is_one() } else { self.0[i][j].is_zero() }))
    }

    pub fn column(&self, j: usize) -> Vec3 {
        Vec3(array::from_fn(|i| self.0[i][j].clone()))
    }

    pub fn mul(&self, rhs: &Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| {
            let row = &self.0[i];
            QSqrt2::dot3([&row[0], &row[1], &row[2]], [&rhs.0[0][j], &rhs.0[1][j], &rhs.0[2][j]])
        })
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        Vec3(array::from_fn(|i| {
            let row = &self.0[i];
            QSqrt2::dot3([&row[0], &row[1], &row[2]], [&v.0[0], &v.0[1], &v.0[2]])
        }))
    }

    pub fn transpose(&self) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[j][i].clone())
    }

    /// Cofactor expansion along the first row.
    pub fn det(&self) -> QSqrt2 {
        let m = &self.0;
        let minor = |r1: usize, c1: usize, r2: usize, c2: usize| {
            &(&m[r1][c1] * &m[r2][c2]) - &(&m[r1][c2] * &m[r2][c1])
        };
        let t0 = &m[0][0] * &minor(1, 1, 2, 2);
        let t1 = &m[0][1] * &minor(1, 0, 2, 2);
        let t2 = &m[0][2] * &minor(1, 0, 2, 1);
        &(&t0 - &t1) + &t2
    }

    /// Transpose of the cofactor matrix.
    pub fn adjugate(&self) -> Mat3 {
        let m = &self.0;
        // cofactor (i, j) lands at (j, i)
        Mat3::from_fn(|i, j| {
            let (r1, r2) = others(j);
            let (c1, c2) = others(i);
            let minor = &(&m[r1][c1] * &m[r2][c2]) - &(&m[r1][c2] * &m[r2][c1]);
            if (i + j) % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
    }

    /// `adjugate / det`.
    pub fn inverse(&self) -> Result<Mat3, SingularMatrix> {
        let det_inv = self.det().inv().map_err(|_| SingularMatrix)?;
        let adj = self.adjugate();
        Ok(Mat3::from_fn(|i, j| &adj.0[i][j] * &det_inv))
    }

    /// `det = 1` and `MᵀM = I`.
    pub fn is_rotation(&self) -> bool {
        self.det().is_one() && self.transpose().mul(self).is_identity()
    }

    /// Aligned multi-line rendering with entries in compact `p/q+r/s√2` form.
    pub fn pretty(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .0
            .iter()
            .map(|row| row.iter().map(QSqrt2::compact).collect())
            .collect();
        let widths: Vec<usize> = (0..3)
            .map(|j| cells.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &cells {
            out.push('[');
            for (j, cell) in row.iter().enumerate() {
                let pad = widths[j] - cell.chars().count();
                out.push(' ');
                out.extend(std::iter::repeat_n(' ', pad));
                out.push_str(cell);
            }
            out.push_str(" ]\n");
        }
        out
    }
}

fn others(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = QSqrt2;
    fn index(&self, (i, j): (usize, usize)) -> &QSqrt2 {
        &self.0[i][j]
    }
}

impl<'a> Mul<&'a Mat3> for &'a Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: &Mat3) -> Mat3 {
        Mat3::mul(self, rhs)
    }
}

impl<'a> Mul<&'a Vec3> for &'a Mat3 {
    type Output = Vec3;
    fn mul(self, rhs: &Vec3) -> Vec3 {
        self.apply(rhs)
    }
}

/// JSON form: row-major array of nine scalars.
impl Serialize for Mat3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(9))?;
        for row in &self.0 {
            for e in row {
                seq.serialize_element(e)?;
            }
        }
        seq.end()
    }
}

impl fmt::Display for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}
