//! Complex scalars stored as explicit `(re, im)` pairs.
//!
//! Products go through the constant matrices
//!
//! ```text
//! M_R = [[1, 0], [0, -1]]      M_I = [[0, 1], [1, 0]]
//! ```
//!
//! so that `hat(a * b) = (hat(a)^T M_R hat(b), hat(a)^T M_I hat(b))`. The
//! bilinear forms are evaluated literally instead of falling back to the
//! schoolbook formula; the equivalence is checked by the tests.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// 2×2 real matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[0.0; 2]; 2]);

    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2([[m11, m12], [m21, m22]])
    }

    /// `self * v`
    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Rows exchanged.
    pub fn row_swap(&self) -> Self {
        Mat2([self.0[1], self.0[0]])
    }

    /// Bilinear form `u^T self v`.
    pub fn bilinear(&self, u: [f64; 2], v: [f64; 2]) -> f64 {
        let mv = self.mul_vec(v);
        u[0] * mv[0] + u[1] * mv[1]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().flatten().all(|&x| x >= 0.0)
    }

    pub fn entry_max(&self, other: &Mat2) -> Mat2 {
        let mut out = *self;
        for (row, orow) in out.0.iter_mut().zip(other.0.iter()) {
            for (x, &y) in row.iter_mut().zip(orow.iter()) {
                *x = x.max(y);
            }
        }
        out
    }
}

/// Real part of the product rule.
pub const M_R: Mat2 = Mat2([[1.0, 0.0], [0.0, -1.0]]);
/// Imaginary part of the product rule.
pub const M_I: Mat2 = Mat2([[0.0, 1.0], [1.0, 0.0]]);

/// The pair `(M_R, M_I)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MMatrices {
    pub m_r: Mat2,
    pub m_i: Mat2,
}

impl MMatrices {
    pub const fn get() -> Self {
        MMatrices { m_r: M_R, m_i: M_I }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct SplitComplex {
    pub re: f64,
    pub im: f64,
}

impl From<[f64; 2]> for SplitComplex {
    fn from(v: [f64; 2]) -> Self {
        SplitComplex { re: v[0], im: v[1] }
    }
}

impl From<SplitComplex> for [f64; 2] {
    fn from(v: SplitComplex) -> Self {
        [v.re, v.im]
    }
}

impl SplitComplex {
    pub const ZERO: SplitComplex = SplitComplex { re: 0.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        SplitComplex { re, im }
    }

    /// Checked constructor; rejects NaN and infinities.
    pub fn try_new(re: f64, im: f64) -> Option<Self> {
        (re.is_finite() && im.is_finite()).then_some(SplitComplex { re, im })
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn hat(&self) -> [f64; 2] {
        [self.re, self.im]
    }

    pub fn abs_pair(&self) -> [f64; 2] {
        [self.re.abs(), self.im.abs()]
    }

    pub fn scale(&self, s: f64) -> Self {
        SplitComplex::new(self.re * s, self.im * s)
    }

    /// Largest of `|re|`, `|im|`.
    pub fn max_abs_component(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

pub fn hat(a: SplitComplex) -> [f64; 2] {
    a.hat()
}

pub fn abs_pair(a: SplitComplex) -> [f64; 2] {
    a.abs_pair()
}

/// `max(0, a)`
pub fn pos_part(a: f64) -> f64 {
    a.max(0.0)
}

/// Complex product through the `M_R`/`M_I` bilinear forms.
pub fn product_split(a: SplitComplex, b: SplitComplex) -> SplitComplex {
    let (ah, bh) = (a.hat(), b.hat());
    SplitComplex::new(M_R.bilinear(ah, bh), M_I.bilinear(ah, bh))
}

impl Add for SplitComplex {
    type Output = SplitComplex;
    fn add(self, rhs: Self) -> Self {
        SplitComplex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for SplitComplex {
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for SplitComplex {
    type Output = SplitComplex;
    fn sub(self, rhs: Self) -> Self {
        SplitComplex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for SplitComplex {
    type Output = SplitComplex;
    fn neg(self) -> Self {
        SplitComplex::new(-self.re, -self.im)
    }
}

impl Mul for SplitComplex {
    type Output = SplitComplex;
    fn mul(self, rhs: Self) -> Self {
        product_split(self, rhs)
    }
}

/// Square matrix of split-complex entries, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitMatrix {
    n: usize,
    data: Vec<SplitComplex>,
}

impl SplitMatrix {
    pub fn zeros(n: usize) -> Self {
        SplitMatrix {
            n,
            data: vec![SplitComplex::ZERO; n * n],
        }
    }

    /// Builds from nested rows. Returns `None` unless the rows form a square.
    pub fn from_rows(rows: &[Vec<SplitComplex>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(SplitMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<SplitComplex>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).take(self.n).collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> SplitComplex {
        self.data[j * self.n + k]
    }

    pub fn set(&mut self, j: usize, k: usize, v: SplitComplex) {
        self.data[j * self.n + k] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = &SplitComplex> {
        self.data.iter()
    }
}
