//! Exact arithmetic of unimodular symmetric integer bilinear forms.
//!
//! The form is the intersection pairing on the free part of `H^2(X, Z)`;
//! everything here is integer or rational arithmetic, never floating point.
//! Inertia (the counts of positive and negative squares over `R`) is computed
//! by symmetric Gaussian reduction over exact rationals with hyperbolic pivot
//! escapes, so unimodular forms built from `E8`-like blocks classify exactly.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("form is not unimodular: |det| = {det}")]
    NonUnimodular { det: String },
    #[error("dimension mismatch: form rank {rank}, vector length {len}")]
    DimensionMismatch { rank: usize, len: usize },
    #[error("integer overflow in pairing arithmetic")]
    Overflow,
}

/// A cohomology class in the basis of the ambient form, integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CohomologyClass {
    coords: Vec<i64>,
}

impl CohomologyClass {
    pub fn new(coords: Vec<i64>) -> Self {
        Self { coords }
    }

    pub fn zero(rank: usize) -> Self {
        Self { coords: vec![0; rank] }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn negated(&self) -> Self {
        Self { coords: self.coords.iter().map(|&c| -c).collect() }
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self { coords: self.coords.iter().map(|&c| c * k).collect() }
    }

    /// Coordinate-wise difference; lengths must agree.
    pub fn sub(&self, other: &Self) -> Option<Self> {
        if self.len() != other.len() {
            return None;
        }
        Some(Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

impl fmt::Display for CohomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Signature bookkeeping of a nondegenerate form: `sigma = b2_plus - b2_minus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureData {
    pub b2_plus: usize,
    pub b2_minus: usize,
    pub sigma: i64,
}

/// A unimodular symmetric integer bilinear form on a free lattice.
///
/// Symmetry and `|det| = 1` are checked at construction; rank 0 is allowed
/// (the four-sphere has no second cohomology).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntersectionForm {
    rank: usize,
    /// Row-major `rank * rank` entries.
    entries: Vec<i64>,
}

impl IntersectionForm {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let rank = rows.len();
        let mut entries = Vec::with_capacity(rank * rank);
        for row in &rows {
            if row.len() != rank {
                return Err(LatticeError::DimensionMismatch { rank, len: row.len() });
            }
            entries.extend_from_slice(row);
        }
        let form = Self { rank, entries };
        for i in 0..rank {
            for j in (i + 1)..rank {
                if form.entry(i, j) != form.entry(j, i) {
                    return Err(LatticeError::NotSymmetric { row: i, col: j });
                }
            }
        }
        let det = form.determinant();
        if det.abs() != BigInt::one() && rank > 0 {
            return Err(LatticeError::NonUnimodular { det: det.to_string() });
        }
        Ok(form)
    }

    /// Diagonal form with the given entries (each must be a unit).
    pub fn diagonal(diag: &[i64]) -> Result<Self, LatticeError> {
        let rank = diag.len();
        let mut rows = vec![vec![0; rank]; rank];
        for (i, &d) in diag.iter().enumerate() {
            rows[i][i] = d;
        }
        Self::new(rows)
    }

    /// The hyperbolic plane `H = [[0,1],[1,0]]`.
    pub fn hyperbolic() -> Self {
        Self::new(vec![vec![0, 1], vec![1, 0]]).expect("H is unimodular")
    }

    /// The positive definite even form `E8` (Cartan matrix, Bourbaki node order).
    pub fn e8() -> Self {
        let mut rows = vec![vec![0i64; 8]; 8];
        for i in 0..8 {
            rows[i][i] = 2;
        }
        // Dynkin diagram edges: 1-3, 3-4, 4-5, 5-6, 6-7, 7-8 and 2-4.
        for &(a, b) in &[(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)] {
            rows[a][b] = -1;
            rows[b][a] = -1;
        }
        Self::new(rows).expect("E8 is unimodular")
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(blocks: &[IntersectionForm]) -> Self {
        let rank: usize = blocks.iter().map(|b| b.rank).sum();
        let mut entries = vec![0i64; rank * rank];
        let mut offset = 0;
        for block in blocks {
            for i in 0..block.rank {
                for j in 0..block.rank {
                    entries[(offset + i) * rank + (offset + j)] = block.entry(i, j);
                }
            }
            offset += block.rank;
        }
        Self { rank, entries }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.rank + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.rank)
            .map(|i| (0..self.rank).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// The form of the orientation-reversed manifold: `-Q`.
    pub fn reverse_orientation(&self) -> Self {
        Self {
            rank: self.rank,
            entries: self.entries.iter().map(|&e| -e).collect(),
        }
    }

    /// Exact determinant over `BigInt` (rational Gaussian elimination).
    fn determinant(&self) -> BigInt {
        let n = self.rank;
        if n == 0 {
            return BigInt::one();
        }
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| BigRational::from_integer(self.entry(i, j).into())).collect())
            .collect();
        let mut det = BigRational::one();
        for k in 0..n {
            let pivot_row = match (k..n).find(|&i| !m[i][k].is_zero()) {
                Some(r) => r,
                None => return BigInt::zero(),
            };
            if pivot_row != k {
                m.swap(k, pivot_row);
                det = -det;
            }
            let pivot = m[k][k].clone();
            det *= pivot.clone();
            for i in (k + 1)..n {
                let factor = &m[i][k] / &pivot;
                for j in k..n {
                    let delta = &factor * &m[k][j];
                    m[i][j] -= delta;
                }
            }
        }
        debug_assert!(det.is_integer());
        det.to_integer()
    }

    /// Exact inertia by symmetric Gaussian reduction (congruence preserves
    /// signature). Zero diagonals are escaped by a diagonal swap when
    /// possible, otherwise by the hyperbolic trick of adding a row and
    /// column carrying a nonzero off-diagonal entry.
    pub fn signature_data(&self) -> SignatureData {
        let n = self.rank;
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| BigRational::from_integer(self.entry(i, j).into())).collect())
            .collect();
        let mut plus = 0usize;
        let mut minus = 0usize;
        for k in 0..n {
            if m[k][k].is_zero() {
                if let Some(i) = ((k + 1)..n).find(|&i| !m[i][i].is_zero()) {
                    // congruence by the permutation swapping basis vectors k, i
                    m.swap(k, i);
                    for row in m.iter_mut() {
                        row.swap(k, i);
                    }
                } else if let Some(j) = ((k + 1)..n).find(|&j| !m[k][j].is_zero()) {
                    // e_k := e_k + e_j; new square is 2*m[k][j] since both
                    // diagonals vanish on this branch
                    for col in 0..n {
                        let add = m[j][col].clone();
                        m[k][col] += add;
                    }
                    for row in 0..n {
                        let add = m[row][j].clone();
                        m[row][k] += add;
                    }
                } else {
                    // zero row in the active block: degenerate direction,
                    // unreachable for unimodular forms
                    continue;
                }
            }
            let pivot = m[k][k].clone();
            if pivot.is_positive() {
                plus += 1;
            } else {
                minus += 1;
            }
            // Schur complement: symmetric congruence killing row/col k
            for i in (k + 1)..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let factor = &m[i][k] / &pivot;
                for j in (k + 1)..n {
                    let delta = &factor * &m[k][j];
                    m[i][j] -= delta;
                }
            }
            for i in (k + 1)..n {
                m[i][k] = BigRational::zero();
                m[k][i] = BigRational::zero();
            }
        }
        SignatureData {
            b2_plus: plus,
            b2_minus: minus,
            sigma: plus as i64 - minus as i64,
        }
    }

    /// `x^T Q y`, exact; symmetric in its arguments.
    pub fn pair(&self, x: &CohomologyClass, y: &CohomologyClass) -> Result<i64, LatticeError> {
        self.check_len(x)?;
        self.check_len(y)?;
        let mut acc: i128 = 0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                let term = (x.coords[i] as i128)
                    .checked_mul(self.entry(i, j) as i128)
                    .and_then(|t| t.checked_mul(y.coords[j] as i128))
                    .ok_or(LatticeError::Overflow)?;
                acc = acc.checked_add(term).ok_or(LatticeError::Overflow)?;
            }
        }
        i64::try_from(acc).map_err(|_| LatticeError::Overflow)
    }

    /// The integer square `Q(c, c)`.
    pub fn square(&self, c: &CohomologyClass) -> Result<i64, LatticeError> {
        self.pair(c, c)
    }

    /// `c` is characteristic iff `Q(c, x) = Q(x, x) mod 2` for all `x`;
    /// by bilinearity it suffices to test the basis vectors.
    pub fn is_characteristic(&self, c: &CohomologyClass) -> Result<bool, LatticeError> {
        self.check_len(c)?;
        for i in 0..self.rank {
            let mut pairing: i128 = 0;
            for j in 0..self.rank {
                pairing += self.entry(i, j) as i128 * c.coords[j] as i128;
            }
            if (pairing - self.entry(i, i) as i128).rem_euclid(2) != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The unique mod-2 residue class of characteristic vectors.
    ///
    /// Characteristic vectors solve `Q c = diag(Q) (mod 2)`; unimodularity
    /// makes `Q` invertible over `GF(2)`, so the solution is unique in
    /// `{0,1}^n` and every characteristic vector is congruent to it mod 2.
    pub fn characteristic_residue(&self) -> Vec<u8> {
        let n = self.rank;
        let mut a: Vec<Vec<u8>> = (0..n)
            .map(|i| (0..n).map(|j| (self.entry(i, j).rem_euclid(2)) as u8).collect())
            .collect();
        let mut b: Vec<u8> = (0..n).map(|i| (self.entry(i, i).rem_euclid(2)) as u8).collect();
        // Gauss-Jordan over GF(2)
        let mut pivot_cols = Vec::with_capacity(n);
        let mut row = 0;
        for col in 0..n {
            if let Some(r) = (row..n).find(|&r| a[r][col] == 1) {
                a.swap(row, r);
                b.swap(row, r);
                for r2 in 0..n {
                    if r2 != row && a[r2][col] == 1 {
                        for c2 in 0..n {
                            a[r2][c2] ^= a[row][c2];
                        }
                        b[r2] ^= b[row];
                    }
                }
                pivot_cols.push(col);
                row += 1;
            }
        }
        debug_assert_eq!(row, n, "unimodular forms are invertible mod 2");
        let mut solution = vec![0u8; n];
        for (r, &col) in pivot_cols.iter().enumerate() {
            solution[col] = b[r];
        }
        solution
    }

    /// All characteristic classes with sup-norm at most `bound`, optionally
    /// restricted to a fixed square, in lexicographic coordinate order.
    ///
    /// This is a bounded search; completeness within the bound is exact but
    /// existence outside it is the caller's concern. Rank 0 returns the empty
    /// class exactly when no square is requested or the requested square is 0.
    pub fn enumerate_characteristic(
        &self,
        bound: i64,
        square: Option<i64>,
    ) -> Result<Vec<CohomologyClass>, LatticeError> {
        let n = self.rank;
        if n == 0 {
            return Ok(match square {
                None | Some(0) => vec![CohomologyClass::zero(0)],
                Some(_) => vec![],
            });
        }
        if bound < 0 {
            return Ok(vec![]);
        }
        let residue = self.characteristic_residue();
        // admissible values per coordinate, ascending
        let choices: Vec<Vec<i64>> = residue
            .iter()
            .map(|&r| (-bound..=bound).filter(|v| v.rem_euclid(2) == r as i64).collect())
            .collect();
        if choices.iter().any(|c| c.is_empty()) {
            return Ok(vec![]);
        }
        let mut result = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let coords: Vec<i64> = idx.iter().enumerate().map(|(i, &k)| choices[i][k]).collect();
            let class = CohomologyClass::new(coords);
            let keep = match square {
                Some(s) => self.square(&class)? == s,
                None => true,
            };
            if keep {
                debug_assert!(self.is_characteristic(&class)?);
                result.push(class);
            }
            // odometer increment, last coordinate fastest: lexicographic output
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(result);
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    /// Diagonal of the exact inverse; entries are integers for unimodular
    /// forms. Used for the definite-form witness bound.
    pub fn inverse_diagonal(&self) -> Vec<i64> {
        let n = self.rank;
        let mut aug: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..2 * n)
                    .map(|j| {
                        if j < n {
                            BigRational::from_integer(self.entry(i, j).into())
                        } else if j - n == i {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for k in 0..n {
            let pivot_row = (k..n)
                .find(|&i| !aug[i][k].is_zero())
                .expect("unimodular form is invertible");
            aug.swap(k, pivot_row);
            let pivot = aug[k][k].clone();
            for j in 0..2 * n {
                aug[k][j] /= pivot.clone();
            }
            for i in 0..n {
                if i == k || aug[i][k].is_zero() {
                    continue;
                }
                let factor = aug[i][k].clone();
                for j in 0..2 * n {
                    let delta = &factor * &aug[k][j];
                    aug[i][j] -= delta;
                }
            }
        }
        (0..n)
            .map(|i| {
                let v = &aug[i][n + i];
                debug_assert!(v.is_integer());
                i64::try_from(v.to_integer()).expect("inverse diagonal fits i64")
            })
            .collect()
    }

    /// Validate that a class lives in this form's basis.
    pub fn check_class(&self, c: &CohomologyClass) -> Result<(), LatticeError> {
        self.check_len(c)
    }

    fn check_len(&self, c: &CohomologyClass) -> Result<(), LatticeError> {
        if c.len() != self.rank {
            Err(LatticeError::DimensionMismatch { rank: self.rank, len: c.len() })
        } else {
            Ok(())
        }
    }
}
