use std::fmt;
use std::sync::Arc;

use super::cyclotomic::{sum_of_products, CyclotomicField, CyclotomicScalar};
use super::PhaseError;

/// Dense matrix over `ℚ(ζ_m)`, row-major.
#[derive(Clone)]
pub struct CycloMatrix {
    field: Arc<CyclotomicField>,
    rows: usize,
    cols: usize,
    entries: Vec<CyclotomicScalar>,
}

impl PartialEq for CycloMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl Eq for CycloMatrix {}

impl fmt::Debug for CycloMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "CycloMatrix {}x{} (m={})",
            self.rows,
            self.cols,
            self.field.conductor()
        )?;
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Output of [`CycloMatrix::rref`].
#[derive(Debug, Clone)]
pub struct RowEchelon {
    pub matrix: CycloMatrix,
    pub pivots: Vec<usize>,
}

impl CycloMatrix {
    pub fn zeros(field: &Arc<CyclotomicField>, rows: usize, cols: usize) -> Self {
        Self {
            field: field.clone(),
            rows,
            cols,
            entries: vec![CyclotomicScalar::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &Arc<CyclotomicField>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, CyclotomicScalar::one(field));
        }
        m
    }

    pub fn from_rows(field: &Arc<CyclotomicField>, rows: Vec<Vec<CyclotomicScalar>>) -> Result<Self, PhaseError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(PhaseError::ShapeMismatch(format!("ragged rows in {r}-row matrix")));
        }
        if let Some(bad) = rows.iter().flatten().find(|s| s.conductor() != field.conductor()) {
            return Err(PhaseError::IncompatibleConductor {
                expected: field.conductor(),
                found: bad.conductor(),
            });
        }
        Ok(Self {
            field: field.clone(),
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Permutation-style matrix with a 1 at `(image[j], j)` for each column `j`.
    pub fn from_column_images(field: &Arc<CyclotomicField>, n: usize, image: impl Fn(usize) -> usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for j in 0..n {
            m.set(image(j), j, CyclotomicScalar::one(field));
        }
        m
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
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

    pub fn get(&self, r: usize, c: usize) -> &CyclotomicScalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: CyclotomicScalar) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[CyclotomicScalar] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<CyclotomicScalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CyclotomicScalar::is_zero)
    }

    /// `Some(c)` when the matrix equals `c·I`.
    pub fn as_scalar(&self) -> Option<CyclotomicScalar> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let c = self.get(0, 0).clone();
        for r in 0..self.rows {
            for k in 0..self.cols {
                let ok = if r == k {
                    *self.get(r, k) == c
                } else {
                    self.get(r, k).is_zero()
                };
                if !ok {
                    return None;
                }
            }
        }
        Some(c)
    }

    fn same_field(&self, other: &Self) -> Result<(), PhaseError> {
        if self.field.conductor() != other.field.conductor() {
            return Err(PhaseError::IncompatibleConductor {
                expected: self.field.conductor(),
                found: other.field.conductor(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PhaseError> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(PhaseError::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PhaseError> {
        self.add(&other.scale(&CyclotomicScalar::from_int(&self.field, -1)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PhaseError> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(PhaseError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            for j in 0..other.cols {
                let terms = row
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| !a.is_zero())
                    .map(|(k, a)| (a, other.get(k, j)));
                entries.push(sum_of_products(&self.field, terms));
            }
        }
        let out = Self {
            field: self.field.clone(),
            rows: self.rows,
            cols: other.cols,
            entries,
        };
        Ok(out)
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[CyclotomicScalar]) -> Result<Vec<CyclotomicScalar>, PhaseError> {
        if v.len() != self.cols {
            return Err(PhaseError::ShapeMismatch(format!(
                "cannot apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(CyclotomicScalar::zero(&self.field), |acc, (a, b)| &acc + &(a * b))
            })
            .collect())
    }

    pub fn scale(&self, c: &CyclotomicScalar) -> Self {
        Self {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Reduced row echelon form, taking the first nonzero entry in each
    /// column as pivot.
    pub fn rref(&self) -> RowEchelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead_row = 0;
        for col in 0..m.cols {
            if lead_row == m.rows {
                break;
            }
            let Some(p) = (lead_row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(p, lead_row);
            let inv = m.get(lead_row, col).inverse().expect("pivot is nonzero");
            for c in col..m.cols {
                let v = m.get(lead_row, c) * &inv;
                m.set(lead_row, c, v);
            }
            for r in 0..m.rows {
                if r == lead_row {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let pv = m.get(lead_row, c);
                    if pv.is_zero() {
                        continue;
                    }
                    let v = m.get(r, c) - &(&factor * pv);
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            lead_row += 1;
        }
        RowEchelon { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of `{ v : M v = 0 }`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<CyclotomicScalar>> {
        let RowEchelon { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![CyclotomicScalar::zero(&self.field); self.cols];
                v[f] = CyclotomicScalar::one(&self.field);
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -matrix.get(row, f);
                }
                v
            })
            .collect()
    }

    /// Basis of the column space, in reduced echelon form.
    pub fn column_space_basis(&self) -> Vec<Vec<CyclotomicScalar>> {
        let RowEchelon { matrix, pivots } = self.transpose().rref();
        (0..pivots.len()).map(|r| matrix.row(r).to_vec()).collect()
    }

    pub fn inverse(&self) -> Result<Self, PhaseError> {
        if !self.is_square() {
            return Err(PhaseError::ShapeMismatch(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = Self::zeros(&self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, CyclotomicScalar::one(&self.field));
        }
        let RowEchelon { matrix, pivots } = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(PhaseError::SingularMatrix);
        }
        let mut out = Self::zeros(&self.field, n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, matrix.get(r, n + c).clone());
            }
        }
        Ok(out)
    }
}
