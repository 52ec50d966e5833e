//! Column-major dense storage and lightweight matrix views.
//!
//! [`DenseMatrix`] owns its buffer with leading dimension equal to its row
//! count. [`MatRef`] / [`MatMut`] are borrowed rectangular windows with an
//! explicit leading dimension; sub-views alias the parent without copying.
//! Element `(i, j)` of a view lives at offset `j * ld + i`.

use num_complex::Complex64;
use std::fmt;
use std::marker::PhantomData;

use crate::util::abs_c;

/// Owned column-major matrix of double-precision complex numbers.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds a matrix from a row-major nested array literal; test-friendly.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn as_ref(&self) -> MatRef<'_> {
        MatRef {
            data: &self.data,
            rows: self.rows,
            cols: self.cols,
            ld: self.rows,
        }
    }

    pub fn as_mut(&mut self) -> MatMut<'_> {
        let (rows, cols) = (self.rows, self.cols);
        MatMut::from_slice(&mut self.data, rows, cols, rows)
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> MatRef<'_> {
        self.as_ref().submatrix(r0, r1, c0, c1)
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).collect()
    }

    /// Conjugate transpose as a new owned matrix.
    pub fn adjoint(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Max row sum of moduli.
    pub fn norm_inf(&self) -> f64 {
        self.as_ref().norm_inf()
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.as_ref().norm_frobenius()
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, " {:>10.3e}{:+.3e}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Borrowed read-only window into column-major storage.
#[derive(Clone, Copy)]
pub struct MatRef<'a> {
    data: &'a [Complex64],
    rows: usize,
    cols: usize,
    ld: usize,
}

impl<'a> MatRef<'a> {
    pub fn from_slice(data: &'a [Complex64], rows: usize, cols: usize, ld: usize) -> Self {
        assert!(ld >= rows);
        if cols > 0 {
            assert!(data.len() >= (cols - 1) * ld + rows);
        }
        MatRef { data, rows, cols, ld }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ld(&self) -> usize {
        self.ld
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.ld + i]
    }

    /// Column `j` as a contiguous slice of length `rows`.
    #[inline]
    pub fn col(&self, j: usize) -> &'a [Complex64] {
        debug_assert!(j < self.cols);
        &self.data[j * self.ld..j * self.ld + self.rows]
    }

    /// Half-open row and column ranges; aliases the parent storage.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> MatRef<'a> {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        let offset = c0 * self.ld + r0;
        MatRef {
            data: &self.data[offset.min(self.data.len())..],
            rows: r1 - r0,
            cols: c1 - c0,
            ld: self.ld,
        }
    }

    pub fn to_owned(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            out.col_mut(j).copy_from_slice(self.col(j));
        }
        out
    }

    pub fn norm_inf(&self) -> f64 {
        // row sums accumulated column by column to keep reads contiguous
        let mut sums = vec![0.0f64; self.rows];
        for j in 0..self.cols {
            for (s, z) in sums.iter_mut().zip(self.col(j)) {
                *s += abs_c(*z);
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        // scaled accumulation; robust to entries near the overflow threshold
        let mut scale = 0.0f64;
        let mut sumsq = 1.0f64;
        for j in 0..self.cols {
            for z in self.col(j) {
                for part in [z.re.abs(), z.im.abs()] {
                    if part == 0.0 {
                        continue;
                    }
                    if scale < part {
                        sumsq = 1.0 + sumsq * (scale / part) * (scale / part);
                        scale = part;
                    } else {
                        sumsq += (part / scale) * (part / scale);
                    }
                }
            }
        }
        scale * sumsq.sqrt()
    }

    pub fn is_upper_triangular(&self) -> bool {
        for j in 0..self.cols {
            for (i, z) in self.col(j).iter().enumerate() {
                if i > j && *z != Complex64::ZERO {
                    return false;
                }
            }
        }
        true
    }
}

/// Borrowed mutable window into column-major storage.
///
/// Holds a raw pointer so that it can be split into disjoint row/column
/// panels (the element sets never overlap even though the backing ranges
/// interleave). All public accessors stay within `rows x cols`.
pub struct MatMut<'a> {
    ptr: *mut Complex64,
    rows: usize,
    cols: usize,
    ld: usize,
    _marker: PhantomData<&'a mut Complex64>,
}

unsafe impl Send for MatMut<'_> {}
unsafe impl Sync for MatMut<'_> {}

impl<'a> MatMut<'a> {
    pub fn from_slice(data: &'a mut [Complex64], rows: usize, cols: usize, ld: usize) -> Self {
        assert!(ld >= rows);
        if cols > 0 {
            assert!(data.len() >= (cols - 1) * ld + rows);
        }
        MatMut {
            ptr: data.as_mut_ptr(),
            rows,
            cols,
            ld,
            _marker: PhantomData,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Read-only view of the same window.
    #[inline]
    pub fn rb(&self) -> MatRef<'_> {
        let len = if self.cols == 0 { 0 } else { (self.cols - 1) * self.ld + self.rows };
        MatRef {
            data: unsafe { std::slice::from_raw_parts(self.ptr, len) },
            rows: self.rows,
            cols: self.cols,
            ld: self.ld,
        }
    }

    /// Reborrow with a shorter lifetime, so the original stays usable.
    #[inline]
    pub fn rb_mut(&mut self) -> MatMut<'_> {
        MatMut {
            ptr: self.ptr,
            rows: self.rows,
            cols: self.cols,
            ld: self.ld,
            _marker: PhantomData,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        unsafe { *self.ptr.add(j * self.ld + i) }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        unsafe { *self.ptr.add(j * self.ld + i) = v }
    }

    /// Column `j` as a contiguous mutable slice.
    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        debug_assert!(j < self.cols);
        unsafe { std::slice::from_raw_parts_mut(self.ptr.add(j * self.ld), self.rows) }
    }

    pub fn submatrix_mut(self, r0: usize, r1: usize, c0: usize, c1: usize) -> MatMut<'a> {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        MatMut {
            ptr: unsafe { self.ptr.add(c0 * self.ld + r0) },
            rows: r1 - r0,
            cols: c1 - c0,
            ld: self.ld,
            _marker: PhantomData,
        }
    }

    /// Splits into rows `..i` and rows `i..`; the two windows are disjoint.
    pub fn split_at_row(self, i: usize) -> (MatMut<'a>, MatMut<'a>) {
        assert!(i <= self.rows);
        let top = MatMut {
            ptr: self.ptr,
            rows: i,
            cols: self.cols,
            ld: self.ld,
            _marker: PhantomData,
        };
        let bottom = MatMut {
            ptr: unsafe { self.ptr.add(i) },
            rows: self.rows - i,
            cols: self.cols,
            ld: self.ld,
            _marker: PhantomData,
        };
        (top, bottom)
    }

    pub fn fill(&mut self, v: Complex64) {
        for j in 0..self.cols {
            self.col_mut(j).fill(v);
        }
    }

    pub fn copy_from(&mut self, src: MatRef<'_>) {
        assert_eq!(self.rows, src.rows());
        assert_eq!(self.cols, src.cols());
        for j in 0..self.cols {
            self.col_mut(j).copy_from_slice(src.col(j));
        }
    }
}

/// Which triangle of a square matrix an operation reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Uplo {
    Upper,
    Lower,
}

/// A square matrix viewed as triangular: only the referenced triangle is
/// ever read, the opposite strict triangle is treated as zero regardless of
/// what the backing storage holds.
#[derive(Clone, Copy)]
pub struct TriangularRef<'a> {
    pub mat: MatRef<'a>,
    pub uplo: Uplo,
}

impl<'a> TriangularRef<'a> {
    pub fn upper(mat: MatRef<'a>) -> Self {
        assert_eq!(mat.rows(), mat.cols(), "triangular view must be square");
        TriangularRef { mat, uplo: Uplo::Upper }
    }

    pub fn lower(mat: MatRef<'a>) -> Self {
        assert_eq!(mat.rows(), mat.cols(), "triangular view must be square");
        TriangularRef { mat, uplo: Uplo::Lower }
    }

    pub fn order(&self) -> usize {
        self.mat.rows()
    }

    /// Max row sum of moduli over the referenced triangle only.
    pub fn norm_inf(&self) -> f64 {
        let n = self.order();
        let mut sums = vec![0.0f64; n];
        for j in 0..n {
            let col = self.mat.col(j);
            match self.uplo {
                Uplo::Upper => {
                    for (i, z) in col[..=j].iter().enumerate() {
                        sums[i] += abs_c(*z);
                    }
                }
                Uplo::Lower => {
                    for (i, z) in col[j..].iter().enumerate() {
                        sums[j + i] += abs_c(*z);
                    }
                }
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }
}

/// Infinity norms of the off-diagonal column segments of a triangular
/// matrix: entry `k` is `max |U(i, k)|` over `i < k` for an upper view.
/// Entry 0 is always zero. The data is shift-independent, so one instance
/// serves every right-hand side and every diagonal shift.
#[derive(Clone, Debug)]
pub struct ColumnNorms(Vec<f64>);

impl ColumnNorms {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn from_vec(v: Vec<f64>) -> Self {
        ColumnNorms(v)
    }
}

/// Off-diagonal column infinity norms of an upper triangular view.
pub fn offdiag_column_norms(u: TriangularRef<'_>) -> ColumnNorms {
    assert_eq!(u.uplo, Uplo::Upper, "offdiag_column_norms expects an upper view");
    let n = u.order();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let col = u.mat.col(k);
        let mut mx = 0.0f64;
        for z in &col[..k] {
            let a = abs_c(*z);
            if a > mx {
                mx = a;
            }
        }
        out.push(mx);
    }
    crate::flops::add_other((n * n.saturating_sub(1) / 2) as u64);
    ColumnNorms(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn column_major_layout() {
        let m = DenseMatrix::from_fn(3, 2, |i, j| c((i + 10 * j) as f64, 0.0));
        assert_eq!(m.data()[0], c(0.0, 0.0));
        assert_eq!(m.data()[1], c(1.0, 0.0));
        assert_eq!(m.data()[3], c(10.0, 0.0)); // (0,1) at offset 1*ld+0
        assert_eq!(m[(2, 1)], c(12.0, 0.0));
    }

    #[test]
    fn subview_aliases_parent() {
        let m = DenseMatrix::from_fn(4, 4, |i, j| c(i as f64, j as f64));
        let v = m.submatrix(1, 3, 2, 4);
        assert_eq!(v.rows(), 2);
        assert_eq!(v.cols(), 2);
        assert_eq!(v.get(0, 0), m[(1, 2)]);
        assert_eq!(v.get(1, 1), m[(2, 3)]);
        // nested sub-view
        let vv = v.submatrix(1, 2, 0, 1);
        assert_eq!(vv.get(0, 0), m[(2, 2)]);
    }

    #[test]
    fn split_rows_disjoint() {
        let mut m = DenseMatrix::zeros(4, 3);
        let (mut top, mut bottom) = m.as_mut().split_at_row(2);
        top.fill(c(1.0, 0.0));
        bottom.fill(c(2.0, 0.0));
        for j in 0..3 {
            assert_eq!(m[(0, j)], c(1.0, 0.0));
            assert_eq!(m[(1, j)], c(1.0, 0.0));
            assert_eq!(m[(2, j)], c(2.0, 0.0));
            assert_eq!(m[(3, j)], c(2.0, 0.0));
        }
    }

    #[test]
    fn offdiag_norms_examples() {
        // identity: all zero
        let i3 = DenseMatrix::identity(3);
        let n = offdiag_column_norms(TriangularRef::upper(i3.as_ref()));
        assert_eq!(n.values(), &[0.0, 0.0, 0.0]);

        // [[2,1],[0,4]] -> [0, 1]
        let u = DenseMatrix::from_rows(&[vec![c(2., 0.), c(1., 0.)], vec![c(0., 0.), c(4., 0.)]]);
        let n = offdiag_column_norms(TriangularRef::upper(u.as_ref()));
        assert_eq!(n.values(), &[0.0, 1.0]);

        // [[1,-3,2],[0,1,5],[0,0,1]] -> [0,3,5]
        let u = DenseMatrix::from_rows(&[
            vec![c(1., 0.), c(-3., 0.), c(2., 0.)],
            vec![c(0., 0.), c(1., 0.), c(5., 0.)],
            vec![c(0., 0.), c(0., 0.), c(1., 0.)],
        ]);
        let n = offdiag_column_norms(TriangularRef::upper(u.as_ref()));
        assert_eq!(n.values(), &[0.0, 3.0, 5.0]);
    }

    #[test]
    fn offdiag_norms_ignore_lower_triangle() {
        let mut u = DenseMatrix::from_fn(5, 5, |i, j| {
            if i <= j {
                c((i + j) as f64, 1.0)
            } else {
                C::ZERO
            }
        });
        let before = offdiag_column_norms(TriangularRef::upper(u.as_ref()));
        // poison the strictly lower triangle
        for j in 0..5 {
            for i in j + 1..5 {
                u[(i, j)] = c(1e30, -4e12);
            }
        }
        let after = offdiag_column_norms(TriangularRef::upper(u.as_ref()));
        assert_eq!(before.values(), after.values());
    }

    #[test]
    fn inf_norm_reads_one_triangle() {
        let mut m = DenseMatrix::identity(3);
        m[(2, 0)] = c(100.0, 0.0);
        let upper = TriangularRef::upper(m.as_ref());
        assert_eq!(upper.norm_inf(), 1.0);
        let lower = TriangularRef::lower(m.as_ref());
        assert_eq!(lower.norm_inf(), 101.0);
    }
}
