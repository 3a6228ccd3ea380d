//! Dense vectors, matrices and subspaces over GF(q).
//!
//! Vectors are rows and matrices act on the right, `v -> vT`.
//!
//! Every matrix also has an integer key: its row-major entries read as
//! base-`q` digits with the first entry most significant. For a fixed shape,
//! ascending key order is the lexicographic order of the entry list.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfq::{Felt, Field};

fn key_of(q: u32, entries: &[Felt]) -> Option<u128> {
    entries.iter().try_fold(0u128, |acc, e| {
        acc.checked_mul(q as u128)?.checked_add(e.0 as u128)
    })
}

fn check_entries(field: &Field, entries: &[Felt]) -> Result<()> {
    match entries.iter().find(|e| !field.contains(**e)) {
        Some(e) => Err(Error::ElementOutOfRange { value: e.0 as u64, order: field.q() as u64 }),
        None => Ok(()),
    }
}

/// A row vector in F_q^n.
#[derive(Clone)]
pub struct VecF {
    field: Field,
    entries: Vec<Felt>,
}

impl VecF {
    pub fn new(field: &Field, entries: Vec<Felt>) -> Result<VecF> {
        check_entries(field, &entries)?;
        Ok(VecF { field: field.clone(), entries })
    }

    pub fn from_values(field: &Field, values: &[u32]) -> Result<VecF> {
        VecF::new(field, values.iter().map(|&v| Felt(v)).collect())
    }

    pub fn zero(field: &Field, len: usize) -> VecF {
        VecF { field: field.clone(), entries: vec![Felt::ZERO; len] }
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn unit(field: &Field, len: usize, i: usize) -> VecF {
        let mut v = VecF::zero(field, len);
        v.entries[i] = Felt::ONE;
        v
    }

    /// Decodes a vector from its base-`q` key.
    pub fn from_key(field: &Field, len: usize, mut key: u128) -> VecF {
        let q = field.q() as u128;
        let mut entries = vec![Felt::ZERO; len];
        for e in entries.iter_mut().rev() {
            *e = Felt((key % q) as u32);
            key /= q;
        }
        VecF { field: field.clone(), entries }
    }

    /// All `q^len` vectors in ascending key order.
    pub fn all(field: &Field, len: usize) -> impl Iterator<Item = VecF> + '_ {
        let count = (field.q() as u128).pow(len as u32);
        (0..count).map(move |k| VecF::from_key(field, len, k))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Felt] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn key(&self) -> Option<u128> {
        key_of(self.field.q(), &self.entries)
    }

    pub fn values(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.0).collect()
    }

    /// The row-vector action `v -> vT`.
    pub fn mul_mat(&self, t: &MatF) -> Result<VecF> {
        if self.field != t.field {
            return Err(Error::FieldMismatch);
        }
        if self.len() != t.rows {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} times {}x{} matrix",
                self.len(),
                t.rows,
                t.cols
            )));
        }
        let f = &self.field;
        let mut out = vec![Felt::ZERO; t.cols];
        for (i, &a) in self.entries.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(t.row(i)) {
                *o = f.add(*o, f.mul(a, b));
            }
        }
        Ok(VecF { field: f.clone(), entries: out })
    }
}

/// `vec_mat(v, T) = vT`.
pub fn vec_mat(v: &VecF, t: &MatF) -> Result<VecF> {
    v.mul_mat(t)
}

impl PartialEq for VecF {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries && self.field == other.field
    }
}

impl Eq for VecF {}

impl Hash for VecF {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.entries.hash(state);
    }
}

impl fmt::Debug for VecF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.values())
    }
}

/// A dense `rows x cols` matrix, row-major.
#[derive(Clone)]
pub struct MatF {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Felt>,
}

/// Output of row reduction: `reduced = transform * input`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: MatF,
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub transform: MatF,
}

impl MatF {
    pub fn new(field: &Field, rows: usize, cols: usize, entries: Vec<Felt>) -> Result<MatF> {
        if rows.checked_mul(cols) != Some(entries.len()) {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        check_entries(field, &entries)?;
        Ok(MatF { field: field.clone(), rows, cols, entries })
    }

    pub fn from_values(field: &Field, rows: usize, cols: usize, values: &[u32]) -> Result<MatF> {
        MatF::new(field, rows, cols, values.iter().map(|&v| Felt(v)).collect())
    }

    /// Builds a square matrix from nested rows, e.g. `[[1, 0], [1, 1]]`.
    pub fn from_rows<R: AsRef<[u32]>>(field: &Field, rows: &[R]) -> Result<MatF> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let values: Vec<u32> = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        MatF::from_values(field, rows.len(), cols, &values)
    }

    pub fn from_row_vecs(field: &Field, rows: &[VecF], cols: usize) -> Result<MatF> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch("row length differs from column count".into()));
            }
            if r.field != *field {
                return Err(Error::FieldMismatch);
            }
            entries.extend_from_slice(&r.entries);
        }
        Ok(MatF { field: field.clone(), rows: rows.len(), cols, entries })
    }

    pub fn zero(field: &Field, rows: usize, cols: usize) -> MatF {
        MatF { field: field.clone(), rows, cols, entries: vec![Felt::ZERO; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> MatF {
        let mut m = MatF::zero(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = Felt::ONE;
        }
        m
    }

    /// Decodes a matrix from its base-`q` key.
    pub fn from_key(field: &Field, rows: usize, cols: usize, key: u128) -> Result<MatF> {
        let v = VecF::from_key(field, rows * cols, key);
        let limit = (field.q() as u128).checked_pow((rows * cols) as u32);
        if limit.is_some_and(|l| key >= l) {
            return Err(Error::ShapeMismatch(format!("key {key} too large for a {rows}x{cols} matrix")));
        }
        Ok(MatF { field: field.clone(), rows, cols, entries: v.entries })
    }

    pub fn field(&self) -> &Field {
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

    pub fn entries(&self) -> &[Felt] {
        &self.entries
    }

    pub fn values(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.0).collect()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Felt {
        self.entries[i * self.cols + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: Felt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Felt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> VecF {
        VecF { field: self.field.clone(), entries: self.row(i).to_vec() }
    }

    pub fn key(&self) -> Option<u128> {
        key_of(self.field.q(), &self.entries)
    }

    pub fn transpose(&self) -> MatF {
        let mut t = MatF::zero(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    fn check_same_shape(&self, other: &MatF) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &MatF) -> Result<MatF> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(MatF { field: f.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &MatF) -> Result<MatF> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(MatF { field: f.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, c: Felt) -> MatF {
        let f = &self.field;
        let entries = self.entries.iter().map(|&a| f.mul(c, a)).collect();
        MatF { field: f.clone(), rows: self.rows, cols: self.cols, entries }
    }

    pub fn mul(&self, other: &MatF) -> Result<MatF> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = MatF::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, f.mul(a, other.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &MatF) -> Result<MatF> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch("hstack needs equal row counts".into()));
        }
        let mut entries = Vec::with_capacity(self.rows * (self.cols + other.cols));
        for i in 0..self.rows {
            entries.extend_from_slice(self.row(i));
            entries.extend_from_slice(other.row(i));
        }
        Ok(MatF { field: self.field.clone(), rows: self.rows, cols: self.cols + other.cols, entries })
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &MatF) -> Result<MatF> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch("vstack needs equal column counts".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(MatF { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, entries })
    }

    /// Columns `start..end` of every row.
    pub fn column_block(&self, start: usize, end: usize) -> MatF {
        let mut entries = Vec::with_capacity(self.rows * (end - start));
        for i in 0..self.rows {
            entries.extend_from_slice(&self.row(i)[start..end]);
        }
        MatF { field: self.field.clone(), rows: self.rows, cols: end - start, entries }
    }

    /// Reduced row echelon form together with the row operations applied.
    pub fn rref(&self) -> Rref {
        let f = &self.field;
        let (r, c) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut t = MatF::identity(f, r);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..c {
            if row == r {
                break;
            }
            let Some(p) = (row..r).find(|&i| !a.get(i, col).is_zero()) else {
                continue;
            };
            a.swap_rows(p, row);
            t.swap_rows(p, row);
            let inv = f.inv(a.get(row, col)).expect("pivot is non-zero");
            a.scale_row(row, inv);
            t.scale_row(row, inv);
            for i in 0..r {
                if i == row {
                    continue;
                }
                let factor = a.get(i, col);
                if factor.is_zero() {
                    continue;
                }
                let neg = f.neg(factor);
                a.add_row_multiple(i, row, neg);
                t.add_row_multiple(i, row, neg);
            }
            pivots.push(col);
            row += 1;
        }
        Rref { reduced: a, rank: row, pivots, transform: t }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.entries.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    fn scale_row(&mut self, i: usize, c: Felt) {
        for k in 0..self.cols {
            let v = self.get(i, k);
            self.set(i, k, self.field.mul(c, v));
        }
    }

    // row_i += c * row_j
    fn add_row_multiple(&mut self, i: usize, j: usize, c: Felt) {
        for k in 0..self.cols {
            let v = self.field.add(self.get(i, k), self.field.mul(c, self.get(j, k)));
            self.set(i, k, v);
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon_rank()
    }

    // Forward elimination only; cheaper than a full rref.
    fn echelon_rank(&self) -> usize {
        let f = &self.field;
        let mut a = self.entries.clone();
        let (r, c) = (self.rows, self.cols);
        let mut row = 0;
        for col in 0..c {
            if row == r {
                break;
            }
            let Some(p) = (row..r).find(|&i| !a[i * c + col].is_zero()) else {
                continue;
            };
            if p != row {
                for k in 0..c {
                    a.swap(p * c + k, row * c + k);
                }
            }
            let inv = f.inv(a[row * c + col]).expect("pivot is non-zero");
            for i in row + 1..r {
                let factor = a[i * c + col];
                if factor.is_zero() {
                    continue;
                }
                let m = f.neg(f.mul(factor, inv));
                for k in col..c {
                    a[i * c + k] = f.add(a[i * c + k], f.mul(m, a[row * c + k]));
                }
            }
            row += 1;
        }
        row
    }

    /// Determinant by Gaussian elimination, tracking row swaps and pivots.
    pub fn det(&self) -> Result<Felt> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(det_square(&self.field, self.entries.clone(), self.rows))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && !det_square(&self.field, self.entries.clone(), self.rows).is_zero()
    }

    pub fn inverse(&self) -> Result<MatF> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let r = self.rref();
        if r.rank < self.rows {
            return Err(Error::SingularMatrix);
        }
        Ok(r.transform)
    }

    /// Canonical basis of the left kernel `{a : aM = 0}`, in RREF.
    pub fn left_kernel(&self) -> Subspace {
        let rr = self.rref();
        let basis = if rr.rank == self.rows {
            MatF::zero(&self.field, 0, self.rows)
        } else {
            // rows of the transform that hit zero rows of the reduced form
            let zero_rows: Vec<VecF> = (rr.rank..self.rows).map(|i| rr.transform.row_vec(i)).collect();
            MatF::from_row_vecs(&self.field, &zero_rows, self.rows).expect("shapes agree")
        };
        Subspace::from_rows(&basis)
    }
}

fn det_square(f: &Field, mut a: Vec<Felt>, n: usize) -> Felt {
    let mut det = Felt::ONE;
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i * n + col].is_zero()) else {
            return Felt::ZERO;
        };
        if p != col {
            for k in 0..n {
                a.swap(p * n + k, col * n + k);
            }
            det = f.neg(det);
        }
        let pivot = a[col * n + col];
        det = f.mul(det, pivot);
        let inv = f.inv(pivot).expect("pivot is non-zero");
        for i in col + 1..n {
            let factor = a[i * n + col];
            if factor.is_zero() {
                continue;
            }
            let m = f.neg(f.mul(factor, inv));
            for k in col..n {
                a[i * n + k] = f.add(a[i * n + k], f.mul(m, a[col * n + k]));
            }
        }
    }
    det
}

pub fn mat_mul(a: &MatF, b: &MatF) -> Result<MatF> {
    a.mul(b)
}

impl PartialEq for MatF {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.entries == other.entries
            && self.field == other.field
    }
}

impl Eq for MatF {}

impl Hash for MatF {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.entries.hash(state);
    }
}

impl PartialOrd for MatF {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shape first, then ascending key.
impl Ord for MatF {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rows, self.cols, &self.entries).cmp(&(other.rows, other.cols, &other.entries))
    }
}

impl fmt::Debug for MatF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            let row: Vec<u32> = self.row(i).iter().map(|e| e.0).collect();
            write!(f, "{row:?}")?;
        }
        write!(f, "]")
    }
}

/// Serialized matrix: `{rows, cols, entries, key}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<u128>,
}

impl MatF {
    pub fn record(&self) -> MatrixRecord {
        MatrixRecord { rows: self.rows, cols: self.cols, entries: self.values(), key: self.key() }
    }

    /// Decodes a record, rejecting entries outside the field and keys that
    /// disagree with the entries.
    pub fn from_record(field: &Field, record: &MatrixRecord) -> Result<MatF> {
        let m = MatF::from_values(field, record.rows, record.cols, &record.entries)?;
        if record.key.is_some() && record.key != m.key() {
            return Err(Error::InvalidCertificate("matrix key does not match entries".into()));
        }
        Ok(m)
    }
}

/// A subspace of F_q^l, stored as its reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    basis: MatF,
}

impl Subspace {
    /// The row space of `a`.
    pub fn from_rows(a: &MatF) -> Subspace {
        let rr = a.rref();
        let rows: Vec<VecF> = (0..rr.rank).map(|i| rr.reduced.row_vec(i)).collect();
        let basis = MatF::from_row_vecs(a.field(), &rows, a.cols()).expect("shapes agree");
        Subspace { basis }
    }

    pub fn full(field: &Field, l: usize) -> Subspace {
        Subspace { basis: MatF::identity(field, l) }
    }

    pub fn basis(&self) -> &MatF {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    pub fn field(&self) -> &Field {
        &self.basis.field
    }

    fn check_ambient(&self, l: usize) -> Result<()> {
        if self.ambient() != l {
            return Err(Error::AmbientMismatch(self.ambient(), l));
        }
        Ok(())
    }

    /// Whether `v` lies in the subspace, i.e. `rank [P; v] = rank P`.
    pub fn contains(&self, v: &VecF) -> Result<bool> {
        self.check_ambient(v.len())?;
        if *v.field() != *self.field() {
            return Err(Error::FieldMismatch);
        }
        // Reducing v against the RREF basis is the rank test done in place.
        let f = self.field();
        let mut w = v.entries.clone();
        let rr_pivots = self.pivots();
        for (i, &pc) in rr_pivots.iter().enumerate() {
            let c = w[pc];
            if c.is_zero() {
                continue;
            }
            for (x, &b) in w.iter_mut().zip(self.basis.row(i)) {
                *x = f.sub(*x, f.mul(c, b));
            }
        }
        Ok(w.iter().all(|x| x.is_zero()))
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| self.basis.row(i).iter().position(|e| !e.is_zero()).expect("no zero rows"))
            .collect()
    }

    pub fn sum_dim(&self, other: &Subspace) -> Result<usize> {
        self.check_ambient(other.ambient())?;
        Ok(self.basis.vstack(&other.basis)?.rank())
    }

    /// `dim P + dim Q - rank [P; Q]`.
    pub fn intersection_dim(&self, other: &Subspace) -> Result<usize> {
        Ok(self.dim() + other.dim() - self.sum_dim(other)?)
    }

    /// The image `{wG : w in W}`.
    pub fn transform(&self, g: &MatF) -> Result<Subspace> {
        Ok(Subspace::from_rows(&self.basis.mul(g)?))
    }

    /// All `q^dim` vectors of the subspace.
    pub fn vectors(&self) -> impl Iterator<Item = VecF> + '_ {
        VecF::all(self.field(), self.dim())
            .map(move |coeffs| coeffs.mul_mat(&self.basis).expect("shapes agree"))
    }
}

pub fn subspace_from_rows(a: &MatF) -> Subspace {
    Subspace::from_rows(a)
}

pub fn subspace_eq(p: &Subspace, q: &Subspace) -> Result<bool> {
    p.check_ambient(q.ambient())?;
    Ok(p == q)
}

pub fn subspace_contains(p: &Subspace, v: &VecF) -> Result<bool> {
    p.contains(v)
}

pub fn subspace_intersection_dim(p: &Subspace, q: &Subspace) -> Result<usize> {
    p.intersection_dim(q)
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}>", self.basis)
    }
}
