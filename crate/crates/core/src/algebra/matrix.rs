use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::{rat, Rational};
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: RatMatrix,
    pub pivots: Vec<usize>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from small integer rows. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
        .expect("rectangular input")
    }

    pub fn column(v: &[Rational]) -> Self {
        RatMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
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

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("subtraction of unequal shapes".into()));
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Submatrix with the listed rows and columns deleted.
    pub fn minor(&self, drop_rows: &[usize], drop_cols: &[usize]) -> RatMatrix {
        let keep_r: Vec<usize> = (0..self.rows).filter(|i| !drop_rows.contains(i)).collect();
        let keep_c: Vec<usize> = (0..self.cols).filter(|j| !drop_cols.contains(j)).collect();
        self.select(&keep_r, &keep_c)
    }

    /// Submatrix keeping exactly the listed rows and columns, in order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out[(i, j)] = self[(r, c)].clone();
            }
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack of unequal widths".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(RatMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Appends `v` as an extra column.
    pub fn augment(&self, v: &[Rational]) -> Result<RatMatrix> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!(
                "augmenting {} rows with {} values",
                self.rows,
                v.len()
            )));
        }
        let mut out = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            out[(i, self.cols)] = v[i].clone();
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Gauss-Jordan elimination; the pivot is the first nonzero entry in
    /// column order, so results are deterministic.
    pub fn rref(&self) -> Rref {
        self.rref_limited(self.cols)
    }

    /// Eliminates only in the first `limit` columns (used for augmented
    /// systems, whose right-hand side must never be chosen as a pivot).
    fn rref_limited(&self, limit: usize) -> Rref {
        let mut m = self.clone();
        let cols = m.cols;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..limit {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, row);
            let inv = m[(row, col)].recip();
            for j in col..cols {
                if !m[(row, j)].is_zero() {
                    m[(row, j)] *= &inv;
                }
            }
            let pivot_row: Vec<Rational> = m.row(row).to_vec();
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for j in col..cols {
                    if !pivot_row[j].is_zero() {
                        let delta = &factor * &pivot_row[j];
                        m[(r, j)] -= delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        self.rref().kernel()
    }

    /// Exact solution of the square system `self · x = b`; a singular matrix
    /// is an error carrying its rank.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "solve needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let rank = self.augment(b)?.rref_limited(self.cols).pivots.len();
        if rank < self.rows {
            return Err(Error::Singular {
                dim: self.rows,
                rank,
            });
        }
        let (x, _) = self.solve_consistent(b)?;
        Ok(x)
    }

    /// Particular solution of a consistent (possibly rectangular or rank
    /// deficient) system, with free variables set to zero, plus a kernel
    /// basis. Residual-checked.
    pub fn solve_consistent(&self, b: &[Rational]) -> Result<(Vec<Rational>, Vec<Vec<Rational>>)> {
        let aug = self.augment(b)?;
        let reduced = aug.rref_limited(self.cols);
        let m = &reduced.matrix;
        let rank = reduced.pivots.len();
        if (rank..m.rows).any(|r| !m[(r, self.cols)].is_zero()) {
            return Err(Error::Inconsistent);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in reduced.pivots.iter().enumerate() {
            x[p] = m[(i, self.cols)].clone();
        }
        if self.mul_vec(&x)? != b {
            return Err(Error::Residual("linear solve"));
        }
        let kernel = Rref {
            matrix: m.minor(&[], &[self.cols]),
            pivots: reduced.pivots,
        }
        .kernel();
        Ok((x, kernel))
    }

    /// The unique solution of a consistent system that is orthogonal to the
    /// null space of `self` (its minimum-norm solution).
    pub fn solve_orthogonal_to_kernel(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        let mut out = self.solve_orthogonal_to_kernel_many(&[b.to_vec()])?;
        Ok(out.pop().expect("one right-hand side"))
    }

    /// [`solve_orthogonal_to_kernel`](Self::solve_orthogonal_to_kernel) for
    /// several right-hand sides sharing one elimination.
    pub fn solve_orthogonal_to_kernel_many(&self, rhs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
        if let Some(b) = rhs.iter().find(|b| b.len() != self.rows) {
            return Err(Error::Dimension(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let n = self.cols;
        let direct = self.augment_many(rhs).rref_limited(n);
        let kernel = direct.kernel_within(n);
        let reduced = if kernel.is_empty() {
            direct
        } else {
            let stacked = self.vstack(&RatMatrix::from_rows(kernel)?)?;
            let mut aug = RatMatrix::zeros(stacked.rows, n + rhs.len());
            for i in 0..stacked.rows {
                for j in 0..n {
                    aug[(i, j)] = stacked[(i, j)].clone();
                }
                if i < self.rows {
                    for (c, b) in rhs.iter().enumerate() {
                        aug[(i, n + c)] = b[i].clone();
                    }
                }
            }
            aug.rref_limited(n)
        };
        let rank = reduced.pivots.len();
        if rank < n {
            return Err(Error::Singular { dim: n, rank });
        }
        let m = &reduced.matrix;
        let mut out = Vec::with_capacity(rhs.len());
        for (c, b) in rhs.iter().enumerate() {
            if (rank..m.rows).any(|r| !m[(r, n + c)].is_zero()) {
                return Err(Error::Inconsistent);
            }
            let mut x = vec![Rational::zero(); n];
            for (i, &p) in reduced.pivots.iter().enumerate() {
                x[p] = m[(i, n + c)].clone();
            }
            if self.mul_vec(&x)? != *b {
                return Err(Error::Residual("kernel-orthogonal solve"));
            }
            out.push(x);
        }
        Ok(out)
    }

    fn augment_many(&self, rhs: &[Vec<Rational>]) -> RatMatrix {
        let n = self.cols;
        let mut aug = RatMatrix::zeros(self.rows, n + rhs.len());
        for i in 0..self.rows {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for (c, b) in rhs.iter().enumerate() {
                aug[(i, n + c)] = b[i].clone();
            }
        }
        aug
    }

    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(bareiss_det(self))
    }
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        self.kernel_within(self.matrix.cols)
    }

    /// Kernel of the first `cols` columns, for an elimination that never
    /// pivoted past them.
    fn kernel_within(&self, cols: usize) -> Vec<Vec<Rational>> {
        let free: Vec<usize> = (0..cols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); cols];
                v[f] = Rational::one();
                for (i, &p) in self.pivots.iter().enumerate() {
                    v[p] = -self.matrix[(i, f)].clone();
                }
                v
            })
            .collect()
    }
}

/// Fraction-free determinant: each row is scaled to integers, Bareiss
/// elimination runs over big integers, and the scaling is divided back out.
fn bareiss_det(m: &RatMatrix) -> Rational {
    let k = m.rows;
    if k == 0 {
        return Rational::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            let row = m.row(i);
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &l;
            row.iter()
                .map(|x| x.numer() * (&l / x.denom()))
                .collect()
        })
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            sign = -sign;
        }
        for i in c + 1..k {
            for j in c + 1..k {
                let v = (&a[i][j] * &a[c][c] - &a[i][c] * &a[c][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[c][c].clone();
    }
    Rational::new(sign * &a[k - 1][k - 1], scale)
}

/// Exact solution of a square nonsingular system.
pub fn solve(m: &RatMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    m.solve(b)
}

/// Exact determinant of a square matrix.
pub fn det(m: &RatMatrix) -> Result<Rational> {
    m.det()
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;
    use proptest::prelude::*;

    #[test]
    fn identity_solve_returns_rhs() {
        let b = vec![ratio(1, 2), rat(0), rat(-3)];
        assert_eq!(solve(&RatMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn small_system() {
        let m = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.solve(&[rat(3), rat(2)]).unwrap(), vec![rat(1), rat(1)]);
    }

    #[test]
    fn singular_reports_rank() {
        let m = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(
            m.solve(&[rat(1), rat(2)]),
            Err(Error::Singular { dim: 2, rank: 1 })
        );
        assert_eq!(m.solve_consistent(&[rat(1), rat(3)]), Err(Error::Inconsistent));
    }

    #[test]
    fn two_by_two_det() {
        assert_eq!(RatMatrix::from_i64(&[&[1, 2], &[3, 4]]).det().unwrap(), rat(-2));
        assert_eq!(RatMatrix::zeros(0, 0).det().unwrap(), rat(1));
        let r = RatMatrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(2, 5), rat(7)],
        ])
        .unwrap();
        assert_eq!(r.det().unwrap(), ratio(7, 2) - ratio(2, 15));
    }

    #[test]
    fn det_needs_row_swap() {
        let m = RatMatrix::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 5]]);
        assert_eq!(m.det().unwrap(), rat(-5));
    }

    #[test]
    fn min_norm_solution_is_orthogonal_to_kernel() {
        // x + y = 2 has kernel (1,-1); the orthogonal solution is (1,1).
        let m = RatMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        let x = m.solve_orthogonal_to_kernel(&[rat(2), rat(2)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(1)]);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = RatMatrix::from_i64(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let ker = m.kernel();
        assert_eq!(ker.len(), 2);
        for v in ker {
            assert!(m.mul_vec(&v).unwrap().iter().all(Zero::is_zero));
        }
    }

    /// Cofactor expansion, used as an independent determinant oracle.
    fn cofactor_det(m: &RatMatrix) -> Rational {
        let k = m.rows();
        if k == 0 {
            return Rational::one();
        }
        (0..k)
            .map(|j| {
                let term = &m[(0, j)] * cofactor_det(&m.minor(&[0], &[j]));
                if j % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum()
    }

    fn small_matrix(k: usize) -> impl Strategy<Value = RatMatrix> {
        prop::collection::vec(-4i64..=4, k * k).prop_map(move |v| {
            let rows: Vec<&[i64]> = v.chunks(k).collect();
            RatMatrix::from_i64(&rows)
        })
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-50i64..=50, 1i64..=20).prop_map(|(p, q)| ratio(p, q))
    }

    proptest! {
        #[test]
        fn addition_is_exact(a in small_rational(), b in small_rational()) {
            prop_assert_eq!(&(&a + &b) - &b, a);
        }

        #[test]
        fn solve_round_trip(m in (1usize..=8).prop_flat_map(small_matrix),
                            seed in prop::collection::vec(-9i64..=9, 8)) {
            let k = m.rows();
            let b: Vec<Rational> = seed[..k].iter().map(|&x| rat(x)).collect();
            match m.solve(&b) {
                Ok(x) => prop_assert_eq!(m.mul_vec(&x).unwrap(), b),
                Err(Error::Singular { .. }) => prop_assert!(m.det().unwrap().is_zero()),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }

        #[test]
        fn det_matches_cofactor_expansion(m in (1usize..=5).prop_flat_map(small_matrix)) {
            prop_assert_eq!(m.det().unwrap(), cofactor_det(&m));
        }

        #[test]
        fn det_is_multiplicative((a, b) in (1usize..=5).prop_flat_map(|k| (small_matrix(k), small_matrix(k)))) {
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(ab.det().unwrap(), a.det().unwrap() * b.det().unwrap());
        }
    }
}
