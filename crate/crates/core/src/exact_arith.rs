//! Exact integer and rational linear algebra.
//!
//! Integers and rationals are `num-bigint` / `num-rational` values. Matrices
//! are small and dense; every routine here is deterministic for a fixed
//! input (first nonzero pivot in a row-major scan).

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use num_bigint::BigInt;
pub use num_rational::BigRational as Rat;

pub type IntVector = Vec<BigInt>;
pub type RatVector = Vec<Rat>;
pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<Rat>;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    /// Panics when `data.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    /// Builds a matrix from rows of equal length. `cols` is needed for the
    /// zero-row case.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Matrix { rows: n, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.row_iter().map(|r| r.to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let rows = self.row_iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect();
        Matrix::from_rows(rows, cols.len())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Matrix::from_rows(rows.iter().map(|&i| self.row(i).to_vec()).collect(), self.cols)
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + for<'a> std::ops::Mul<&'a T, Output = T>,
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
{
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in matrix-vector product");
        self.row_iter()
            .map(|r| r.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn int_to_rat_matrix(m: &IntMatrix) -> RatMatrix {
    m.map(|x| Rat::from_integer(x.clone()))
}

pub fn small_to_int_matrix(m: &Matrix<i64>) -> IntMatrix {
    m.map(|&x| BigInt::from(x))
}

/// Reduced row echelon form. Returns the reduced matrix and the pivot
/// column of each nonzero row.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = a.get(r, c).recip();
        for j in c..a.cols {
            let v = a.get(r, j) * &inv;
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for j in c..a.cols {
                let v = a.get(i, j) - &f * a.get(r, j);
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &RatMatrix) -> usize {
    rref(m).1.len()
}

/// Basis of the rational null space: one vector per free column, with a 1
/// in that column.
pub fn rat_kernel_basis(m: &RatMatrix) -> Vec<RatVector> {
    let (r, pivots) = rref(m);
    let n = m.cols;
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Rat::zero(); n];
            v[f] = Rat::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, f).clone();
            }
            v
        })
        .collect()
}

/// Scales a rational vector to a primitive integer vector (content 1).
pub fn primitive_integer_vector(v: &[Rat]) -> IntVector {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    make_primitive(ints)
}

/// Divides an integer vector by the gcd of its entries.
pub fn make_primitive(v: IntVector) -> IntVector {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

/// Integer vectors spanning a finite-index sublattice of `ker_Z(m)`: the
/// rational kernel basis with denominators cleared and content removed.
pub fn integer_kernel_lattice(m: &IntMatrix) -> IntMatrix {
    let basis = rat_kernel_basis(&int_to_rat_matrix(m));
    let rows = basis.iter().map(|v| primitive_integer_vector(v)).collect();
    Matrix::from_rows(rows, m.cols)
}

/// Row operations over the integers bringing `rows` into echelon form on
/// the first `ncols` columns. Every operation is unimodular. Returns the
/// pivot columns; rows past the last pivot are zero on those columns.
fn integer_echelon(rows: &mut [Vec<BigInt>], ncols: usize, reduce_above: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        loop {
            let best = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&i, &j| rows[i][c].abs().cmp(&rows[j][c].abs()).then(i.cmp(&j)));
            let Some(best) = best else { break };
            rows.swap(r, best);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let (head, tail) = rows.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[r]) {
                    *x -= &q * y;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            if reduce_above {
                for i in 0..r {
                    let q = rows[i][c].div_floor(&rows[r][c]);
                    if q.is_zero() {
                        continue;
                    }
                    let (head, tail) = rows.split_at_mut(r);
                    for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                        *x -= &q * y;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    pivots
}

/// Hermite normal form of the row lattice of `l` (zero rows dropped).
pub fn hermite_normal_form(l: &IntMatrix) -> IntMatrix {
    let mut rows = l.to_rows();
    let pivots = integer_echelon(&mut rows, l.cols, true);
    rows.truncate(pivots.len());
    Matrix::from_rows(rows, l.cols)
}

/// A Z-basis of the full integer kernel `ker_Z(m)` (a saturated lattice),
/// in Hermite normal form.
pub fn saturated_integer_kernel(m: &IntMatrix) -> IntMatrix {
    let d = m.rows;
    let n = m.cols;
    // Rows of [m^T | I_n]; eliminating the left block leaves kernel vectors
    // on the right.
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut r: Vec<BigInt> = (0..d).map(|i| m.get(i, j).clone()).collect();
            r.extend((0..n).map(|k| if k == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let pivots = integer_echelon(&mut rows, d, false);
    let kernel: Vec<Vec<BigInt>> = rows[pivots.len()..].iter().map(|r| r[d..].to_vec()).collect();
    if kernel.is_empty() {
        return Matrix::from_rows(Vec::new(), n);
    }
    hermite_normal_form(&Matrix::from_rows(kernel, n))
}

/// Whether `v` lies in the integer row span of `l`, decided on the Hermite
/// normal form of `l`.
pub fn smith_lattice_member(v: &[BigInt], l: &IntMatrix) -> bool {
    assert_eq!(v.len(), l.cols, "dimension mismatch in lattice membership");
    let hnf = hermite_normal_form(l);
    let mut rest = v.to_vec();
    let mut next = 0;
    for c in 0..l.cols {
        let pivot_row = (next < hnf.rows && !hnf.get(next, c).is_zero()).then_some(next);
        match pivot_row {
            Some(k) => {
                let (q, r) = rest[c].div_rem(hnf.get(k, c));
                if !r.is_zero() {
                    return false;
                }
                for (x, y) in rest.iter_mut().zip(hnf.row(k)) {
                    *x -= &q * y;
                }
                next += 1;
            }
            None => {
                if !rest[c].is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Nearest `f64`, also when numerator and denominator overflow separately.
pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = (n.max(d) - 1000).max(0) as u64;
        let nn = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let dd = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        nn / dd
    })
}
