//! Rectangular lattices and the two five-point stencil reductions.
//!
//! Cells are addressed `(j, k)` with `j` the column (horizontal, `0..width`)
//! and `k` the row (vertical, `0..height`), stored row-major. Every lattice
//! map in the crate reads the center cell and the four cells at distance
//! `offset` along each axis; [`mean5`] averages them and [`max5`] takes their
//! maximum (the max-plus image of the average).

use crate::error::{Error, Result};

/// Largest magnitude an integer cell may hold. Keeps `2·M − M − F` style
/// arithmetic far away from `i64` wraparound.
pub const INT_GUARD: i64 = 1 << 40;

/// Per-cell validity rule for a field's value type.
pub trait CellValue: Copy + PartialEq + std::fmt::Debug {
    fn check(self) -> Result<()>;
}

impl CellValue for f64 {
    fn check(self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("non-finite cell value {self}")))
        }
    }
}

impl CellValue for i64 {
    fn check(self) -> Result<()> {
        check_guard(self).map(|_| ())
    }
}

/// Returns `value` if it lies inside the integer guard band.
#[inline]
pub fn check_guard(value: i64) -> Result<i64> {
    if value.abs() <= INT_GUARD {
        Ok(value)
    } else {
        Err(Error::Overflow { value })
    }
}

/// How neighbor reads outside the lattice are resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary<T> {
    /// Indices wrap modulo the lattice dimensions.
    Periodic,
    /// Every out-of-range read returns the constant.
    Fixed(T),
}

impl<T: CellValue> Boundary<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            Boundary::Periodic => Ok(()),
            Boundary::Fixed(c) => c.check(),
        }
    }
}

/// A `width × height` lattice of cell values.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D<T> {
    width: usize,
    height: usize,
    values: Vec<T>,
}

/// Concentration lattice (u or v).
pub type RealField2D = Field2D<f64>;
/// Ultradiscrete state lattice (U, V, W or Y).
pub type IntField2D = Field2D<i64>;

impl<T: CellValue> Field2D<T> {
    /// Builds a field from row-major values, checking shape and every cell.
    pub fn new(width: usize, height: usize, values: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::validation(format!(
                "field dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::validation(format!(
                "expected {} values for a {width}x{height} field, got {}",
                width * height,
                values.len()
            )));
        }
        for v in &values {
            v.check()?;
        }
        Ok(Field2D {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds a field by evaluating `f(j, k)` at every cell.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for k in 0..height {
            for j in 0..width {
                values.push(f(j, k));
            }
        }
        Self::new(width, height, values)
    }

    /// Overwrites one cell, keeping the field invariant.
    pub fn set(&mut self, j: usize, k: usize, value: T) -> Result<()> {
        value.check()?;
        if j >= self.width || k >= self.height {
            return Err(Error::validation(format!(
                "cell ({j}, {k}) outside {}x{} field",
                self.width, self.height
            )));
        }
        let idx = k * self.width + j;
        self.values[idx] = value;
        Ok(())
    }
}

impl<T: Copy> Field2D<T> {
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major cell values.
    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> T {
        self.values[k * self.width + j]
    }

    pub fn same_shape<U>(&self, other: &Field2D<U>) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Reads cell `(j, k)` with possibly out-of-range signed indices.
    #[inline]
    pub fn sample(&self, j: isize, k: isize, boundary: &Boundary<T>) -> T {
        let (w, h) = (self.width as isize, self.height as isize);
        if (0..w).contains(&j) && (0..h).contains(&k) {
            return self.values[(k * w + j) as usize];
        }
        match boundary {
            Boundary::Periodic => {
                let jj = j.rem_euclid(w);
                let kk = k.rem_euclid(h);
                self.values[(kk * w + jj) as usize]
            }
            Boundary::Fixed(c) => *c,
        }
    }

    /// The five stencil samples at `(j, k)`: center, left, right, up, down.
    #[inline]
    pub fn stencil(&self, j: usize, k: usize, offset: usize, boundary: &Boundary<T>) -> [T; 5] {
        let (j, k, a) = (j as isize, k as isize, offset as isize);
        [
            self.get(j as usize, k as usize),
            self.sample(j - a, k, boundary),
            self.sample(j + a, k, boundary),
            self.sample(j, k - a, boundary),
            self.sample(j, k + a, boundary),
        ]
    }

    fn stencil_map(&self, offset: usize, boundary: &Boundary<T>, reduce: impl Fn([T; 5]) -> T) -> Field2D<T> {
        // reads go through a copy with one extra slot holding the fixed
        // constant; off-grid neighbors index that slot
        let len = self.values.len();
        let mut buf = Vec::with_capacity(len + 1);
        buf.extend_from_slice(&self.values);
        buf.push(match boundary {
            Boundary::Fixed(c) => *c,
            Boundary::Periodic => self.values[0],
        });
        let table = |n: usize, shift: isize| -> Vec<Option<usize>> {
            (0..n as isize)
                .map(|i| {
                    let x = i + shift;
                    if (0..n as isize).contains(&x) {
                        Some(x as usize)
                    } else {
                        match boundary {
                            Boundary::Periodic => Some(x.rem_euclid(n as isize) as usize),
                            Boundary::Fixed(_) => None,
                        }
                    }
                })
                .collect()
        };
        let a = offset as isize;
        let w = self.width;
        let col = |t: Vec<Option<usize>>| -> Vec<(bool, usize)> { t.into_iter().map(|x| (x.is_some(), x.unwrap_or(0))).collect() };
        let (left, right) = (col(table(w, -a)), col(table(w, a)));
        let row_start = |t: Vec<Option<usize>>| -> Vec<Option<usize>> { t.into_iter().map(|x| x.map(|kk| kk * w)).collect() };
        let (up, down) = (row_start(table(self.height, -a)), row_start(table(self.height, a)));
        let mut values = Vec::with_capacity(len);
        for k in 0..self.height {
            let row = k * w;
            let up_row = up[k];
            let down_row = down[k];
            for j in 0..w {
                let (lj_in, lj) = left[j];
                let (rj_in, rj) = right[j];
                values.push(reduce([
                    buf[row + j],
                    buf[if lj_in { row + lj } else { len }],
                    buf[if rj_in { row + rj } else { len }],
                    buf[up_row.map_or(len, |r| r + j)],
                    buf[down_row.map_or(len, |r| r + j)],
                ]));
            }
        }
        Field2D {
            width: self.width,
            height: self.height,
            values,
        }
    }
}

impl IntField2D {
    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0)
    }

    /// Checked cellwise combination of two integer fields of equal shape.
    pub fn zip_with(&self, other: &IntField2D, f: impl Fn(i64, i64) -> i64) -> Result<IntField2D> {
        if !self.same_shape(other) {
            return Err(shape_mismatch(self, other));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| check_guard(f(a, b)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Field2D {
            width: self.width,
            height: self.height,
            values,
        })
    }

    /// Largest absolute cell value.
    pub fn max_abs(&self) -> i64 {
        self.values.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0 || v == 1)
    }

    /// Errors on the first cell outside {0, 1}.
    pub fn require_binary(&self) -> Result<()> {
        match self.values.iter().position(|&v| v != 0 && v != 1) {
            None => Ok(()),
            Some(idx) => Err(Error::NonBinary {
                j: idx % self.width,
                k: idx / self.width,
                value: self.values[idx],
            }),
        }
    }

    /// Cyclic translation: `out[j, k] = self[j − dj, k − dk]` (indices wrap).
    pub fn translate(&self, dj: isize, dk: isize) -> IntField2D {
        let mut out = self.clone();
        let (w, h) = (self.width as isize, self.height as isize);
        for k in 0..h {
            for j in 0..w {
                let src = ((k - dk).rem_euclid(h) * w + (j - dj).rem_euclid(w)) as usize;
                out.values[(k * w + j) as usize] = self.values[src];
            }
        }
        out
    }
}

impl RealField2D {
    pub fn all_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// Errors on the first cell that is not strictly positive.
    pub fn require_positive(&self, name: &str) -> Result<()> {
        match self.values.iter().position(|&v| v.is_nan() || v <= 0.0) {
            None => Ok(()),
            Some(idx) => Err(Error::domain(format!(
                "{name} must be positive, found {} at (j={}, k={})",
                self.values[idx],
                idx % self.width,
                idx / self.width
            ))),
        }
    }
}

pub(crate) fn shape_mismatch<A, B>(a: &Field2D<A>, b: &Field2D<B>) -> Error {
    Error::validation(format!(
        "layer shapes differ: {}x{} vs {}x{}",
        a.width, a.height, b.width, b.height
    ))
}

/// Five-point arithmetic mean: center plus the four cells at distance
/// `offset`, divided by 5. Offset 0 returns the input unchanged (no
/// `5x/5` rounding).
pub fn mean5(field: &RealField2D, offset: usize, boundary: &Boundary<f64>) -> Result<RealField2D> {
    boundary.validate()?;
    if offset == 0 {
        return Ok(field.clone());
    }
    Ok(field.stencil_map(offset, boundary, |s| (s[0] + s[1] + s[2] + s[3] + s[4]) / 5.0))
}

/// Five-point maximum over the same samples as [`mean5`].
pub fn max5(field: &IntField2D, offset: usize, boundary: &Boundary<i64>) -> Result<IntField2D> {
    boundary.validate()?;
    Ok(field.stencil_map(offset, boundary, |s| s.into_iter().max().unwrap_or(s[0])))
}

/// Sum of all cells (compensated summation).
pub fn field_sum(field: &RealField2D) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &x in field.values() {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
