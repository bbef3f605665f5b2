//! The lattice of mixed modular symbols {g, g'} for a congruence subgroup,
//! presented by Manin generators {r, rS} and cusp generators {g_c, g_c T}.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{MmsError, Result};
use crate::lattice::{integer_kernel, sublattice_index, torsion_free_quotient, LatticeIndex, LatticeQuotient, MatZ};
use crate::sl2::{
    complete_first_column, cusp_table, enumerate_cosets, genus, reduce_fraction, stword_decompose, CosetTable,
    CuspTable, Family, Gen, GroupSpec, Letter, Mat2,
};

/// Generator of the presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// {rep, rep·S} for a coset index.
    Manin(usize),
    /// {g_c, g_c·T} for a cusp class.
    Cusp(usize),
}

/// Integral element in basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MSymElement {
    pub coords: Vec<BigInt>,
}

/// Rational element in basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSymElement {
    pub coords: Vec<BigRational>,
}

impl MSymElement {
    pub fn zero(r: usize) -> Self {
        MSymElement {
            coords: vec![BigInt::zero(); r],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &MSymElement) -> MSymElement {
        MSymElement {
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> MSymElement {
        MSymElement {
            coords: self.coords.iter().map(|a| a * k).collect(),
        }
    }

    pub fn to_q(&self) -> QSymElement {
        QSymElement {
            coords: self
                .coords
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        }
    }
}

impl QSymElement {
    pub fn zero(r: usize) -> Self {
        QSymElement {
            coords: vec![BigRational::zero(); r],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &QSymElement) -> QSymElement {
        QSymElement {
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> QSymElement {
        QSymElement {
            coords: self.coords.iter().map(|a| a * k).collect(),
        }
    }
}

/// The finitely presented lattice of mixed modular symbols for one group.
#[derive(Clone, Debug)]
pub struct SymbolSpace {
    pub spec: GroupSpec,
    pub cosets: CosetTable,
    pub cusps: CuspTable,
    pub genus: usize,
    pub generators: Vec<Generator>,
    pub quotient: LatticeQuotient,
    /// Classical modular symbols: Manin generators modulo x + xS and x + xU + xU².
    pub classical: LatticeQuotient,
    /// Basis coordinates → classical basis coordinates.
    pub pi: MatZ,
    /// Basis coordinates → cusp-class coordinates (degree zero image).
    pub boundary: MatZ,
    project_cols: Vec<Vec<BigInt>>,
    classical_cols: Vec<Vec<BigInt>>,
    cusp_mats: Vec<Mat2>,
}

fn add_at(v: &mut [i64], j: usize, k: i64) {
    v[j] += k;
}

impl SymbolSpace {
    pub fn rank(&self) -> usize {
        self.quotient.basis_rank
    }

    pub fn classical_rank(&self) -> usize {
        self.classical.basis_rank
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn manin_gen(&self, idx: usize) -> usize {
        idx
    }

    pub fn cusp_gen(&self, c: usize) -> usize {
        self.cosets.len() + c
    }

    /// Expected rank 2g + 2(c − 1).
    pub fn expected_rank(&self) -> usize {
        2 * self.genus + 2 * (self.cusps.len() - 1)
    }

    /// The pair of matrices a generator stands for.
    pub fn generator_pair(&self, j: usize) -> (Mat2, Mat2) {
        match self.generators[j] {
            Generator::Manin(idx) => {
                let r = self.cosets.rep(idx).clone();
                let rs = r.mul(&Mat2::s());
                (r, rs)
            }
            Generator::Cusp(c) => {
                let g = self.cusp_mats[c].clone();
                let gt = g.mul(&Mat2::t());
                (g, gt)
            }
        }
    }

    /// A matrix g with g·∞ in cusp class `c`.
    pub fn cusp_matrix(&self, c: usize) -> &Mat2 {
        &self.cusp_mats[c]
    }

    /// Image of generator `j` in basis coordinates.
    pub fn generator_image(&self, j: usize) -> MSymElement {
        MSymElement {
            coords: self.project_cols[j].clone(),
        }
    }

    /// Generator coordinates → basis coordinates.
    pub fn project_vec(&self, v: &[BigInt]) -> MSymElement {
        let mut out = vec![BigInt::zero(); self.rank()];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&self.project_cols[j]) {
                if !p.is_zero() {
                    *o += x * p;
                }
            }
        }
        MSymElement { coords: out }
    }

    pub fn project_vec_q(&self, v: &[BigRational]) -> QSymElement {
        let mut out = vec![BigRational::zero(); self.rank()];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&self.project_cols[j]) {
                if !p.is_zero() {
                    *o += x * BigRational::from_integer(p.clone());
                }
            }
        }
        QSymElement { coords: out }
    }

    /// {g, g'} in generator coordinates, by telescoping the S/T word of g⁻¹g'.
    pub fn reduce_pair_generators(&self, g: &Mat2, g2: &Mat2) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.num_generators()];
        self.accumulate_pair(g, g2, &BigInt::one(), &mut v);
        v
    }

    fn accumulate_pair(&self, g: &Mat2, g2: &Mat2, weight: &BigInt, v: &mut [BigInt]) {
        let h = g.inverse().mul(g2);
        let (_, word) = stword_decompose(&h);
        let mut cur = self.cosets.index_of(g);
        for letter in &word {
            match letter {
                Letter::S => {
                    v[self.manin_gen(cur)] += weight;
                    cur = self.cosets.act(cur, Gen::S);
                }
                Letter::T(k) => {
                    v[self.cusp_gen(self.cusps.cusp_of[cur])] += weight * k;
                    cur = self.cusps.shift(cur, k);
                }
            }
        }
    }

    /// {g, g'} in basis coordinates.
    pub fn reduce_pair(&self, g: &Mat2, g2: &Mat2) -> MSymElement {
        self.project_vec(&self.reduce_pair_generators(g, g2))
    }

    /// {m, m'}_Q in generator coordinates for integer matrices of positive
    /// determinant (rational matrices reduce to this after clearing denominators).
    pub fn reduce_pair_rational_generators(&self, m: &Mat2, m2: &Mat2) -> Result<Vec<BigRational>> {
        let mut v = vec![BigRational::zero(); self.num_generators()];
        self.accumulate_rational(m, m2, &BigRational::one(), &mut v)?;
        Ok(v)
    }

    pub(crate) fn accumulate_rational(
        &self,
        m: &Mat2,
        m2: &Mat2,
        weight: &BigRational,
        v: &mut [BigRational],
    ) -> Result<()> {
        let (alpha, ratio) = split_upper(m)?;
        let (alpha2, ratio2) = split_upper(m2)?;
        // {αu, α'u'} = {αu, α} + {α, α'} + {α', α'u'}.
        let c1 = self.cusp_gen(self.cusps.class_of_matrix(&self.cosets, &alpha));
        let c2 = self.cusp_gen(self.cusps.class_of_matrix(&self.cosets, &alpha2));
        v[c1] -= weight * ratio;
        v[c2] += weight * ratio2;
        let mid = self.reduce_pair_generators(&alpha, &alpha2);
        for (o, x) in v.iter_mut().zip(mid) {
            if !x.is_zero() {
                *o += weight * BigRational::from_integer(x);
            }
        }
        Ok(())
    }

    /// {m, m'}_Q in basis coordinates.
    pub fn reduce_pair_rational(&self, m: &Mat2, m2: &Mat2) -> Result<QSymElement> {
        Ok(self.project_vec_q(&self.reduce_pair_rational_generators(m, m2)?))
    }

    /// Version taking matrices with rational entries, row-major `[a, b, c, d]`.
    pub fn reduce_pair_rational_q(&self, m: &[BigRational; 4], m2: &[BigRational; 4]) -> Result<QSymElement> {
        self.reduce_pair_rational(&clear_denominators(m), &clear_denominators(m2))
    }

    /// Index of the span of all Manin generator images in the full lattice.
    pub fn manin_index(&self) -> LatticeIndex {
        let r = self.rank();
        if r == 0 {
            return LatticeIndex::Finite(BigInt::one());
        }
        let rows: Vec<Vec<BigInt>> = (0..self.cosets.len())
            .map(|i| self.project_cols[self.manin_gen(i)].clone())
            .collect();
        let b = MatZ::from_rows(rows, r);
        sublattice_index(&MatZ::identity(r), &b).expect("Manin images lie in the lattice")
    }

    /// Boundary of an element, as coordinates over cusp classes.
    pub fn boundary_of(&self, x: &MSymElement) -> Vec<BigInt> {
        self.boundary.mul_vec(&x.coords)
    }

    /// Projection to classical modular symbols.
    pub fn pi_classical(&self, x: &MSymElement) -> Vec<BigInt> {
        self.pi.mul_vec(&x.coords)
    }

    /// Rows spanning the cusp sublattice (images of cusp generators).
    pub fn cusp_sublattice(&self) -> MatZ {
        let rows = (0..self.cusps.len())
            .map(|c| self.project_cols[self.cusp_gen(c)].clone())
            .collect();
        MatZ::from_rows(rows, self.rank())
    }

    /// Integer basis of ker ∂, as rows.
    pub fn boundary_kernel(&self) -> MatZ {
        integer_kernel(&self.boundary)
    }

    /// Image of H₁(Y_Γ, Z): {1, γ} over Schreier generators γ of Γ, as rows.
    pub fn homology_sublattice(&self) -> MatZ {
        let r = self.rank();
        let mut rows = Vec::new();
        let one = Mat2::identity();
        for idx in 0..self.cosets.len() {
            for g in [Gen::S, Gen::T] {
                let im = self.cosets.act_right(idx, g);
                let x = self.reduce_pair(&one, &im.gamma);
                if !x.is_zero() {
                    rows.push(x.coords);
                }
            }
        }
        MatZ::from_rows(rows, r)
    }

    /// Index of the homology image inside ker ∂.
    pub fn homology_index(&self) -> Result<LatticeIndex> {
        sublattice_index(&self.boundary_kernel(), &self.homology_sublattice())
    }

    /// Classical basis coordinates of the classical Manin generator of a coset,
    /// i.e. the symbol {rep·∞, rep·0}.
    pub fn classical_manin(&self, idx: usize) -> &[BigInt] {
        &self.classical_cols[idx]
    }

    /// Classical symbol {α, β} between cusps given as reduced `(num, den)`
    /// (`den = 0` for ∞), by continued fractions.
    pub fn classical_symbol(&self, alpha: &(BigInt, BigInt), beta: &(BigInt, BigInt)) -> Vec<BigInt> {
        let mut gens = vec![BigInt::zero(); self.cosets.len()];
        self.infinity_path(beta, &BigInt::one(), &mut gens);
        self.infinity_path(alpha, &-BigInt::one(), &mut gens);
        self.classical.project.mul_vec(&gens)
    }

    // Adds weight·{∞, a/b} in classical Manin-generator coordinates.
    fn infinity_path(&self, x: &(BigInt, BigInt), weight: &BigInt, gens: &mut [BigInt]) {
        let (a, b) = reduce_fraction(&x.0, &x.1);
        if b.is_zero() {
            return;
        }
        let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
        let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
        let (mut num, mut den) = (a, b);
        let mut k: u64 = 0;
        while !den.is_zero() {
            let (quot, rem) = num.div_mod_floor(&den);
            let p_next = &quot * &p + &p_prev;
            let q_next = &quot * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            // g_k = ((ε p_k, p_{k-1}), (ε q_k, q_{k-1})), ε = (-1)^{k-1}; its
            // symbol {g0, g∞} is the step p_{k-1}/q_{k-1} → p_k/q_k.
            let eps = if k.is_multiple_of(2) {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            let g = Mat2::new(&eps * &p, p_prev.clone(), &eps * &q, q_prev.clone());
            debug_assert!(g.det().is_one());
            gens[self.cosets.index_of(&g)] -= weight;
            num = den;
            den = rem;
            k += 1;
        }
    }
}

/// m = α·((x, y), (0, z)) with α ∈ SL₂(Z); returns α and y/z.
fn split_upper(m: &Mat2) -> Result<(Mat2, BigRational)> {
    let det = m.det();
    if !det.is_positive() {
        return Err(MmsError::InvalidInput(format!("{m:?} has non-positive determinant")));
    }
    let g = m.a.gcd(&m.c);
    let alpha = complete_first_column(&(&m.a / &g), &(&m.c / &g));
    let u = alpha.inverse().mul(m);
    debug_assert!(u.c.is_zero());
    Ok((alpha, BigRational::new(u.b, u.d)))
}

fn clear_denominators(m: &[BigRational; 4]) -> Mat2 {
    let d = m.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let dq = BigRational::from_integer(d);
    let e: Vec<BigInt> = m.iter().map(|x| (x * &dq).to_integer()).collect();
    Mat2::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone())
}

/// Builds the lattice of mixed modular symbols for `spec`.
///
/// Fails with [`MmsError::PresentationInvalid`] if the rank of the presented
/// lattice differs from 2g + 2(c − 1).
pub fn build_space(spec: GroupSpec) -> Result<SymbolSpace> {
    let cosets = enumerate_cosets(spec)?;
    let cusps = cusp_table(&cosets);
    let g = genus(&cosets, &cusps)?;
    let mu = cosets.len();
    let nc = cusps.len();
    let n = mu + nc;

    let mut rels: Vec<Vec<i64>> = Vec::with_capacity(2 * mu + 1);
    for idx in 0..mu {
        let mut r = vec![0i64; n];
        add_at(&mut r, idx, 1);
        add_at(&mut r, cosets.act(idx, Gen::S), 1);
        rels.push(r);
    }
    for idx in 0..mu {
        let mut r = vec![0i64; n];
        let orbit = [idx, cosets.act(idx, Gen::U), cosets.act(idx, Gen::U2)];
        for &k in &orbit {
            add_at(&mut r, k, 1);
            add_at(&mut r, mu + cusps.cusp_of[k], -1);
        }
        rels.push(r);
    }
    let mut r3 = vec![0i64; n];
    for (c, cl) in cusps.classes.iter().enumerate() {
        r3[mu + c] = (cl.width / cusps.d_gamma) as i64;
    }
    rels.push(r3);
    let quotient = torsion_free_quotient(&MatZ::from_i64(&rels, n), n)?;

    let expected = 2 * g + 2 * (nc - 1);
    if quotient.basis_rank != expected {
        return Err(MmsError::PresentationInvalid {
            group: spec.to_string(),
            expected,
            got: quotient.basis_rank,
        });
    }

    let mut crels: Vec<Vec<i64>> = Vec::with_capacity(2 * mu);
    for idx in 0..mu {
        let mut r = vec![0i64; mu];
        add_at(&mut r, idx, 1);
        add_at(&mut r, cosets.act(idx, Gen::S), 1);
        crels.push(r);
        let mut r = vec![0i64; mu];
        for k in [idx, cosets.act(idx, Gen::U), cosets.act(idx, Gen::U2)] {
            add_at(&mut r, k, 1);
        }
        crels.push(r);
    }
    let classical = torsion_free_quotient(&MatZ::from_i64(&crels, mu), mu)?;
    let expected_cl = 2 * g + nc - 1;
    if classical.basis_rank != expected_cl {
        return Err(MmsError::PresentationInvalid {
            group: format!("{spec} (classical)"),
            expected: expected_cl,
            got: classical.basis_rank,
        });
    }

    let r = quotient.basis_rank;
    let lift_manin = quotient.lift.select_rows(&(0..mu).collect::<Vec<_>>());
    let pi = classical.project.mul(&lift_manin);

    let mut dgen = MatZ::zeros(nc, n);
    for idx in 0..mu {
        let to = cusps.cusp_of[cosets.act(idx, Gen::S)];
        let from = cusps.cusp_of[idx];
        let v = dgen.get(to, idx) + 1;
        dgen.set(to, idx, v);
        let v = dgen.get(from, idx) - 1;
        dgen.set(from, idx, v);
    }
    let boundary = dgen.mul(&quotient.lift);

    let project_cols = (0..n).map(|j| quotient.project.col(j)).collect();
    let classical_cols = (0..mu).map(|j| classical.project.col(j)).collect();
    let cusp_mats = cusps
        .classes
        .iter()
        .map(|c| {
            if c.is_infinity() {
                Mat2::identity()
            } else {
                complete_first_column(&c.num, &c.den)
            }
        })
        .collect();
    let generators = (0..mu)
        .map(Generator::Manin)
        .chain((0..nc).map(Generator::Cusp))
        .collect();

    let space = SymbolSpace {
        spec: cosets.spec,
        cosets,
        cusps,
        genus: g,
        generators,
        quotient,
        classical,
        pi,
        boundary,
        project_cols,
        classical_cols,
        cusp_mats,
    };
    check_cusp_sublattice(&space, r)?;
    Ok(space)
}

// The cusp generators must span exactly ker π, with rank c − 1.
fn check_cusp_sublattice(space: &SymbolSpace, r: usize) -> Result<()> {
    let nc = space.cusps.len();
    let cusp_rows = space.cusp_sublattice();
    if cusp_rows.rank() != nc - 1 {
        return Err(MmsError::Internal(format!(
            "cusp sublattice of {} has rank {}, expected {}",
            space.spec,
            cusp_rows.rank(),
            nc - 1
        )));
    }
    if r == 0 {
        return Ok(());
    }
    let ker = integer_kernel(&space.pi);
    match sublattice_index(&ker, &cusp_rows) {
        Ok(LatticeIndex::Finite(i)) if i.is_one() => Ok(()),
        other => Err(MmsError::Internal(format!(
            "cusp sublattice of {} is not ker π ({other:?})",
            space.spec
        ))),
    }
}

/// Exact serialized form of a space. All integers are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDocument {
    pub family: String,
    pub level: String,
    pub cosets: Vec<[String; 4]>,
    pub cusps: Vec<CuspRecord>,
    pub basis_rank: String,
    pub project: Vec<Vec<String>>,
    pub lift: Vec<Vec<String>>,
    pub pi: Vec<Vec<String>>,
    pub boundary: Vec<Vec<String>>,
    pub torsion: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspRecord {
    pub rep: String,
    pub width: String,
}

fn mat_strings(m: &MatZ) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.to_string()).collect())
        .collect()
}

impl SymbolSpace {
    pub fn to_document(&self) -> SpaceDocument {
        SpaceDocument {
            family: self.spec.family.to_string(),
            level: self.spec.level.to_string(),
            cosets: self
                .cosets
                .reps
                .iter()
                .map(|g| [g.a.to_string(), g.b.to_string(), g.c.to_string(), g.d.to_string()])
                .collect(),
            cusps: self
                .cusps
                .classes
                .iter()
                .map(|c| CuspRecord {
                    rep: c.to_string(),
                    width: c.width.to_string(),
                })
                .collect(),
            basis_rank: self.rank().to_string(),
            project: mat_strings(&self.quotient.project),
            lift: mat_strings(&self.quotient.lift),
            pi: mat_strings(&self.pi),
            boundary: mat_strings(&self.boundary),
            torsion: self.quotient.torsion.iter().map(|x| x.to_string()).collect(),
        }
    }

    /// Rebuilds the space named by a document and checks that every stored
    /// matrix agrees with the rebuilt one.
    pub fn from_document(doc: &SpaceDocument) -> Result<SymbolSpace> {
        let family: Family = doc.family.parse()?;
        let level: u64 = doc
            .level
            .parse()
            .map_err(|_| MmsError::InvalidInput(format!("bad level {:?}", doc.level)))?;
        let space = build_space(GroupSpec::new(family, level)?)?;
        if space.to_document() != *doc {
            return Err(MmsError::InvalidInput(
                "document does not match the space rebuilt from its group".into(),
            ));
        }
        Ok(space)
    }
}
