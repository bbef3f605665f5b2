//! Exact integer and rational linear algebra: Hermite and Smith normal forms,
//! torsion-free quotients of finite presentations, sublattice indices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{MmsError, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct MatZ {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for MatZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatZ {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl MatZ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatZ {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows*cols");
        MatZ { rows, cols, data }
    }

    /// Builds from small-integer rows. All rows must have length `cols`.
    pub fn from_i64(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        MatZ {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r);
        }
        MatZ { rows: n, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> MatZ {
        let mut t = MatZ::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &MatZ) -> MatZ {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = MatZ::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = BigInt::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == MatZ::identity(self.rows)
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> MatZ {
        let rows = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        MatZ::from_rows(rows, self.cols)
    }

    pub fn rank(&self) -> usize {
        let (h, _) = hnf_rows(self.to_rows(), self.cols, false);
        h.len()
    }

    pub fn to_q(&self) -> MatQ {
        MatQ {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }
}

// row[dst] -= q * row[src], touching only columns from `start`.
fn row_submul(rows: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt, start: usize) {
    if q.is_zero() {
        return;
    }
    let (d, s) = if dst < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for k in start..s.len() {
        if !s[k].is_zero() {
            d[k] -= q * &s[k];
        }
    }
}

fn negate_row(row: &mut [BigInt]) {
    for x in row.iter_mut() {
        if !x.is_zero() {
            *x = -std::mem::take(x);
        }
    }
}

/// Row Hermite reduction of `rows` on their first `width` columns; any further
/// columns ride along (used for transforms). Returns the nonzero-pivot rows
/// count and leaves rows in echelon order, zero rows (on `width`) last.
fn hnf_in_place(rows: &mut [Vec<BigInt>], width: usize) -> Vec<usize> {
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..width {
        if r == m {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                let v = &rows[i][j];
                if v.is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) => {
                        if v.abs() < rows[b][j].abs() {
                            best = Some(i)
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            if rows[r][j].is_negative() {
                negate_row(&mut rows[r]);
            }
            let mut clean = true;
            for i in r + 1..m {
                if rows[i][j].is_zero() {
                    continue;
                }
                let q = rows[i][j].div_floor(&rows[r][j]);
                row_submul(rows, i, r, &q, j);
                if !rows[i][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                for i in 0..r {
                    let q = rows[i][j].div_floor(&rows[r][j]);
                    row_submul(rows, i, r, &q, j);
                }
                pivots.push(j);
                r += 1;
                break;
            }
        }
    }
    pivots
}

/// Echelon rows (nonzero part only) and pivot columns.
fn hnf_rows(mut rows: Vec<Vec<BigInt>>, width: usize, keep_zero: bool) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let piv = hnf_in_place(&mut rows, width);
    if !keep_zero {
        rows.truncate(piv.len());
    }
    (rows, piv)
}

/// Row Hermite normal form: returns `(H, U)` with `H = U·A`, `U` unimodular.
/// Pivots are positive, entries above a pivot are reduced into `[0, pivot)`.
pub fn hnf(a: &MatZ) -> (MatZ, MatZ) {
    let m = a.rows;
    let n = a.cols;
    let mut rows: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.extend((0..m).map(|k| if k == i { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    hnf_in_place(&mut rows, n);
    let mut h = Vec::with_capacity(m);
    let mut u = Vec::with_capacity(m);
    for mut r in rows {
        let tail = r.split_off(n);
        h.push(r);
        u.push(tail);
    }
    (MatZ::from_rows(h, n), MatZ::from_rows(u, m))
}

/// Smith normal form `A = U·D·V`.
#[derive(Clone, Debug)]
pub struct SNFResult {
    pub u: MatZ,
    pub d: MatZ,
    pub v: MatZ,
}

impl SNFResult {
    /// Diagonal entries of `D`, including trailing zeros up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows.min(self.d.cols);
        (0..k).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct SnfWork {
    d: Vec<Vec<BigInt>>,
    ncols: usize,
    // Tracked so that A = U·D·V stays true.
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
}

impl SnfWork {
    // row_i += k * row_j
    fn row_add(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        row_submul(&mut self.d, i, j, &-k, 0);
        if let Some(u) = &mut self.u {
            for r in u.iter_mut() {
                if !r[i].is_zero() {
                    let t = &r[i] * k;
                    r[j] -= t;
                }
            }
        }
    }

    // col_j += k * col_i
    fn col_add(&mut self, j: usize, i: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in self.d.iter_mut() {
            if !r[i].is_zero() {
                let t = &r[i] * k;
                r[j] += t;
            }
        }
        if let Some(v) = &mut self.v {
            row_submul(v, i, j, k, 0);
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.d.swap(i, j);
        if let Some(u) = &mut self.u {
            for r in u.iter_mut() {
                r.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in self.d.iter_mut() {
            r.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            v.swap(i, j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        negate_row(&mut self.d[i]);
        if let Some(u) = &mut self.u {
            for r in u.iter_mut() {
                if !r[i].is_zero() {
                    r[i] = -std::mem::take(&mut r[i]);
                }
            }
        }
    }

    fn smallest_from(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.d.len() {
            for j in t..self.ncols {
                let v = &self.d[i][j];
                if v.is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => v.abs() < self.d[bi][bj].abs(),
                };
                if better {
                    best = Some((i, j));
                    if v.abs().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn run(&mut self) {
        let m = self.d.len();
        let n = self.ncols;
        let mut t = 0;
        while t < m.min(n) {
            let Some((pi, pj)) = self.smallest_from(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..m {
                    if self.d[i][t].is_zero() {
                        continue;
                    }
                    let q = self.d[i][t].div_floor(&self.d[t][t]);
                    self.row_add(i, t, &-q);
                    if !self.d[i][t].is_zero() {
                        dirty = true;
                    }
                }
                for j in t + 1..n {
                    if self.d[t][j].is_zero() {
                        continue;
                    }
                    let q = self.d[t][j].div_floor(&self.d[t][t]);
                    self.col_add(j, t, &-q);
                    if !self.d[t][j].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    // Move the smallest leftover in row/column t to the pivot.
                    let mut best = (t, t);
                    for i in t + 1..m {
                        if !self.d[i][t].is_zero() && self.d[i][t].abs() < self.d[best.0][best.1].abs() {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..n {
                        if !self.d[t][j].is_zero() && self.d[t][j].abs() < self.d[best.0][best.1].abs() {
                            best = (t, j);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                // Divisibility: fold a bad row into row t and go again.
                let p = self.d[t][t].clone();
                let mut bad = None;
                'scan: for i in t + 1..m {
                    for j in t + 1..n {
                        if !self.d[i][j].is_multiple_of(&p) {
                            bad = Some(i);
                            break 'scan;
                        }
                    }
                }
                match bad {
                    Some(i) => {
                        self.row_add(t, i, &BigInt::one());
                    }
                    None => break,
                }
            }
            if self.d[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
    }
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Smith normal form with transforms.
pub fn snf(a: &MatZ) -> SNFResult {
    let mut w = SnfWork {
        d: a.to_rows(),
        ncols: a.cols,
        u: Some(identity_rows(a.rows)),
        v: Some(identity_rows(a.cols)),
    };
    w.run();
    SNFResult {
        u: MatZ::from_rows(w.u.unwrap(), a.rows),
        d: MatZ::from_rows(w.d, a.cols),
        v: MatZ::from_rows(w.v.unwrap(), a.cols),
    }
}

/// Nonzero elementary divisors of the row lattice of `rows` (width `width`),
/// in divisibility order.
fn elementary_divisors_rows(rows: Vec<Vec<BigInt>>, width: usize) -> Vec<BigInt> {
    let (h, piv) = hnf_rows(rows, width, false);
    // Rows whose pivot is 1 have a column that is zero elsewhere; they split
    // off as a trivial factor.
    let mut keep_rows = Vec::new();
    let mut unit_cols = vec![false; width];
    let mut ones = 0usize;
    for (r, &j) in h.iter().zip(&piv) {
        if r[j].is_one() {
            unit_cols[j] = true;
            ones += 1;
        } else {
            keep_rows.push(r);
        }
    }
    let keep_cols: Vec<usize> = (0..width).filter(|&j| !unit_cols[j]).collect();
    let sub: Vec<Vec<BigInt>> = keep_rows
        .iter()
        .map(|r| keep_cols.iter().map(|&j| r[j].clone()).collect())
        .collect();
    let mut w = SnfWork {
        d: sub,
        ncols: keep_cols.len(),
        u: None,
        v: None,
    };
    w.run();
    let mut out = vec![BigInt::one(); ones];
    for i in 0..w.d.len().min(w.ncols) {
        if !w.d[i][i].is_zero() {
            out.push(w.d[i][i].clone());
        }
    }
    out
}

/// Nonzero elementary divisors of `a`, in divisibility order.
pub fn elementary_divisors(a: &MatZ) -> Vec<BigInt> {
    elementary_divisors_rows(a.to_rows(), a.cols)
}

/// Torsion-free quotient of `Z^ambient` by the row span of a relation matrix.
#[derive(Clone, Debug)]
pub struct LatticeQuotient {
    pub ambient_rank: usize,
    pub relations: MatZ,
    pub basis_rank: usize,
    /// `basis_rank × ambient_rank`; kills every relation.
    pub project: MatZ,
    /// `ambient_rank × basis_rank`; `project·lift = Id`.
    pub lift: MatZ,
    pub torsion: Vec<BigInt>,
}

/// Computes the largest torsion-free quotient of `Z^ambient / rowspan(relations)`.
///
/// `project` is the Hermite basis of the annihilator of the relations, so it
/// does not depend on elimination order.
pub fn torsion_free_quotient(relations: &MatZ, ambient_rank: usize) -> Result<LatticeQuotient> {
    if relations.cols != ambient_rank {
        return Err(MmsError::InvalidInput(format!(
            "relation matrix has {} columns, expected {}",
            relations.cols, ambient_rank
        )));
    }
    let n = ambient_rank;
    let m = relations.rows;
    let rt = relations.transpose();
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut r = rt.row(i).to_vec();
            r.extend((0..n).map(|k| if k == i { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let piv = hnf_in_place(&mut rows, m);
    let rank = piv.len();

    let echelon: Vec<Vec<BigInt>> = rows[..rank].iter().map(|r| r[..m].to_vec()).collect();
    let torsion: Vec<BigInt> = elementary_divisors_rows(echelon, m)
        .into_iter()
        .filter(|d| !d.is_one())
        .collect();

    let kernel: Vec<Vec<BigInt>> = rows[rank..].iter().map(|r| r[m..].to_vec()).collect();
    let r = kernel.len();
    let (p_rows, _) = hnf_rows(kernel, n, false);
    if p_rows.len() != r {
        return Err(MmsError::Internal("kernel basis lost rank".into()));
    }
    let project = MatZ::from_rows(p_rows, n);
    let lift = right_inverse(&project)?;

    let q = LatticeQuotient {
        ambient_rank: n,
        relations: relations.clone(),
        basis_rank: r,
        project,
        lift,
        torsion,
    };
    if !q.project.mul(&q.lift).is_identity() {
        return Err(MmsError::Internal("project·lift is not the identity".into()));
    }
    if !q.project.mul(&rt).is_zero() {
        return Err(MmsError::Internal("project does not kill the relations".into()));
    }
    Ok(q)
}

/// Integral right inverse of a surjective `P: Z^n → Z^r`.
fn right_inverse(p: &MatZ) -> Result<MatZ> {
    let r = p.rows;
    let n = p.cols;
    if r == 0 {
        return Ok(MatZ::zeros(n, 0));
    }
    let (h, u) = hnf(&p.transpose());
    for i in 0..r {
        for j in 0..r {
            let want = if i == j { BigInt::one() } else { BigInt::zero() };
            if *h.get(i, j) != want {
                return Err(MmsError::Internal("projection is not surjective".into()));
            }
        }
    }
    let x = u.select_rows(&(0..r).collect::<Vec<_>>());
    Ok(x.transpose())
}

/// Index of a sublattice: finite value or infinite (rank drop).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeIndex::Finite(n) => write!(f, "{n}"),
            LatticeIndex::Infinite => write!(f, "infinite"),
        }
    }
}

/// Coordinates of each row of `b` in the echelon basis `basis` (pivots `piv`).
fn echelon_coords(basis: &[Vec<BigInt>], piv: &[usize], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = b.to_vec();
    let mut x = Vec::with_capacity(basis.len());
    for (row, &j) in basis.iter().zip(piv) {
        let (q, r) = rest[j].div_rem(&row[j]);
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for k in j..rest.len() {
                if !row[k].is_zero() {
                    rest[k] -= &q * &row[k];
                }
            }
        }
        x.push(q);
    }
    if rest.iter().all(|v| v.is_zero()) {
        Some(x)
    } else {
        None
    }
}

/// Index of the row span of `b` inside the row span of `a`.
pub fn sublattice_index(a: &MatZ, b: &MatZ) -> Result<LatticeIndex> {
    if a.cols != b.cols {
        return Err(MmsError::InvalidInput("column counts differ".into()));
    }
    let (basis, piv) = hnf_rows(a.to_rows(), a.cols, false);
    let k = basis.len();
    let mut coords = Vec::with_capacity(b.rows);
    for i in 0..b.rows {
        let x = echelon_coords(&basis, &piv, b.row(i)).ok_or(MmsError::Containment)?;
        coords.push(x);
    }
    let divs = elementary_divisors_rows(coords, k);
    if divs.len() < k {
        return Ok(LatticeIndex::Infinite);
    }
    Ok(LatticeIndex::Finite(divs.iter().product()))
}

/// Integer basis of `{x : A·x = 0}`, as rows in Hermite form.
pub fn integer_kernel(a: &MatZ) -> MatZ {
    let n = a.cols;
    let at = a.transpose();
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut r = at.row(i).to_vec();
            r.extend((0..n).map(|k| if k == i { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let piv = hnf_in_place(&mut rows, a.rows);
    let kernel: Vec<Vec<BigInt>> = rows[piv.len()..].iter().map(|r| r[a.rows..].to_vec()).collect();
    let (p, _) = hnf_rows(kernel, n, false);
    MatZ::from_rows(p, n)
}

/// Hermite basis (nonzero rows) of the row span.
pub fn row_basis(a: &MatZ) -> MatZ {
    let (h, _) = hnf_rows(a.to_rows(), a.cols, false);
    MatZ::from_rows(h, a.cols)
}

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct MatQ {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl fmt::Debug for MatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatQ {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl MatQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatQ {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r);
        }
        MatQ { rows: n, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<BigRational>], rows: usize) -> Self {
        let mut m = MatQ::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.data
    }

    pub fn transpose(&self) -> MatQ {
        let mut t = MatQ::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &MatQ) -> MatQ {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = MatQ::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = BigRational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, other: &MatQ) -> MatQ {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatQ {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &MatQ) -> MatQ {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatQ {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> MatQ {
        MatQ {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MatQ {
        let mut out = MatQ::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Least common multiple of entry denominators (1 for the empty matrix).
    pub fn denominator(&self) -> BigInt {
        self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// `D·self` as an integer matrix where `D = denominator()`.
    pub fn scaled_integral(&self) -> (BigInt, MatZ) {
        let d = self.denominator();
        let dq = BigRational::from_integer(d.clone());
        let data = self.data.iter().map(|x| (x * &dq).to_integer()).collect();
        (d, MatZ::from_vec(self.rows, self.cols, data))
    }

    /// Reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        rref_rows(&mut self.data, self.rows, self.cols, self.cols)
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = BigRational::one();
        for j in 0..n {
            let Some(p) = (j..n).find(|&i| !a[i * n + j].is_zero()) else {
                return BigRational::zero();
            };
            if p != j {
                for k in 0..n {
                    a.swap(p * n + k, j * n + k);
                }
                det = -det;
            }
            let piv = a[j * n + j].clone();
            det *= &piv;
            for i in j + 1..n {
                if a[i * n + j].is_zero() {
                    continue;
                }
                let f = &a[i * n + j] / &piv;
                for k in j..n {
                    if !a[j * n + k].is_zero() {
                        let t = &f * &a[j * n + k];
                        a[i * n + k] -= t;
                    }
                }
            }
        }
        det
    }

    /// Basis of the right kernel `{x : self·x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let mut a = self.clone();
        let piv = a.rref();
        let free: Vec<usize> = (0..self.cols).filter(|j| !piv.contains(j)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (r, &pc) in piv.iter().enumerate() {
                    v[pc] = -a.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    /// Characteristic polynomial `det(x·I − A)`, coefficients from degree 0 up.
    pub fn charpoly(&self) -> Vec<BigRational> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        // Faddeev–LeVerrier.
        let mut c = vec![BigRational::zero(); n + 1];
        c[n] = BigRational::one();
        let mut mk = MatQ::zeros(n, n);
        for k in 1..=n {
            let mut next = self.mul(&mk);
            for i in 0..n {
                let v = next.get(i, i) + &c[n - k + 1];
                next.set(i, i, v);
            }
            let am = self.mul(&next);
            let tr: BigRational = (0..n).map(|i| am.get(i, i).clone()).sum();
            c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
            mk = next;
        }
        c
    }

    pub fn to_matz(&self) -> Option<MatZ> {
        if !self.is_integral() {
            return None;
        }
        Some(MatZ::from_vec(
            self.rows,
            self.cols,
            self.data.iter().map(|x| x.to_integer()).collect(),
        ))
    }
}

fn rref_rows(a: &mut [BigRational], rows: usize, stride: usize, width: usize) -> Vec<usize> {
    let mut piv = Vec::new();
    let mut r = 0;
    for j in 0..width {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i * stride + j].is_zero()) else {
            continue;
        };
        if p != r {
            for k in 0..stride {
                a.swap(p * stride + k, r * stride + k);
            }
        }
        let inv = a[r * stride + j].recip();
        for k in j..stride {
            if !a[r * stride + k].is_zero() {
                a[r * stride + k] *= &inv;
            }
        }
        for i in 0..rows {
            if i == r || a[i * stride + j].is_zero() {
                continue;
            }
            let f = a[i * stride + j].clone();
            for k in j..stride {
                if !a[r * stride + k].is_zero() {
                    let t = &f * &a[r * stride + k];
                    a[i * stride + k] -= t;
                }
            }
        }
        piv.push(j);
        r += 1;
    }
    piv
}

/// Evaluates a polynomial given by ascending coefficients.
pub fn poly_eval(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Solves `A·x = b` exactly. Among solutions, free variables are set to zero.
pub fn solve_rational(a: &MatQ, b: &[BigRational]) -> Result<Vec<BigRational>> {
    if b.len() != a.rows {
        return Err(MmsError::InvalidInput("right-hand side has wrong length".into()));
    }
    let stride = a.cols + 1;
    let mut aug = Vec::with_capacity(a.rows * stride);
    for (i, bi) in b.iter().enumerate() {
        aug.extend(a.row(i).iter().cloned());
        aug.push(bi.clone());
    }
    let piv = rref_rows(&mut aug, a.rows, stride, a.cols);
    for i in piv.len()..a.rows {
        if !aug[i * stride + a.cols].is_zero() {
            return Err(MmsError::NoSolution);
        }
    }
    let mut x = vec![BigRational::zero(); a.cols];
    for (r, &j) in piv.iter().enumerate() {
        x[j] = aug[r * stride + a.cols].clone();
    }
    Ok(x)
}
