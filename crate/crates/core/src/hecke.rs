//! Hecke, diamond, Atkin–Lehner and conjugation operators on a symbol space.
//!
//! Matrices act on basis coordinate columns: the image of `x` is `mat · x`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{MmsError, Result};
use crate::lattice::{sublattice_index, MatQ, MatZ};
use crate::report::CheckItem;
use crate::sl2::{ext_gcd, reduce_fraction, Family, Mat2};
use crate::symbols::SymbolSpace;

/// An exact operator on the basis of a symbol space.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub name: String,
    pub mat: MatQ,
    /// Least positive `D` with `D·mat` integral.
    pub denominator: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDocument {
    pub name: String,
    pub denominator: String,
    pub matrix: Vec<Vec<String>>,
}

impl OperatorMatrix {
    pub fn new(name: impl Into<String>, mat: MatQ) -> Self {
        assert_eq!(mat.rows(), mat.cols(), "operator matrix must be square");
        let denominator = mat.denominator();
        OperatorMatrix {
            name: name.into(),
            mat,
            denominator,
        }
    }

    pub fn identity(name: impl Into<String>, r: usize) -> Self {
        Self::new(name, MatQ::identity(r))
    }

    pub fn size(&self) -> usize {
        self.mat.rows()
    }

    pub fn is_integral(&self) -> bool {
        self.denominator.is_one()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &OperatorMatrix, name: impl Into<String>) -> OperatorMatrix {
        Self::new(name, self.mat.mul(&other.mat))
    }

    pub fn apply(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.mat.mul_vec(x)
    }

    pub fn to_document(&self) -> OperatorDocument {
        OperatorDocument {
            name: self.name.clone(),
            denominator: self.denominator.to_string(),
            matrix: (0..self.mat.rows())
                .map(|i| self.mat.row(i).iter().map(|x| x.to_string()).collect())
                .collect(),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorisation as `(prime, exponent)` pairs in increasing order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn level(space: &SymbolSpace) -> BigInt {
    BigInt::from(space.spec.level)
}

/// Assembles an operator from the images of the generators, given in basis
/// coordinates. Only generators in the support of `lift` are evaluated.
fn from_generator_images<F>(space: &SymbolSpace, name: String, mut image: F) -> Result<OperatorMatrix>
where
    F: FnMut(usize) -> Result<Vec<BigRational>>,
{
    let r = space.rank();
    let lift = &space.quotient.lift;
    let mut mat = MatQ::zeros(r, r);
    for j in 0..space.num_generators() {
        let row = lift.row(j);
        if row.iter().all(|x| x.is_zero()) {
            continue;
        }
        let im = image(j)?;
        for (k, w) in row.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let wq = BigRational::from_integer(w.clone());
            for (i, x) in im.iter().enumerate() {
                if !x.is_zero() {
                    let v = mat.get(i, k) + &wq * x;
                    mat.set(i, k, v);
                }
            }
        }
    }
    Ok(OperatorMatrix::new(name, mat))
}

fn int_image(space: &SymbolSpace, gens: &[BigInt]) -> Vec<BigRational> {
    space
        .project_vec(gens)
        .coords
        .into_iter()
        .map(BigRational::from_integer)
        .collect()
}

/// A matrix `((a, b), (N, d'))` of determinant one with `d' ≡ d (mod N)`.
pub fn diamond_matrix(n: &BigInt, d: &BigInt) -> Result<Mat2> {
    if n.is_one() {
        return Ok(Mat2::identity());
    }
    let dd = d.mod_floor(n);
    let (g, x, y) = ext_gcd(&dd, n);
    if !g.is_one() {
        return Err(MmsError::InvalidInput(format!("{d} is not coprime to {n}")));
    }
    // x·d + y·N = 1.
    Ok(Mat2::new(x, -y, n.clone(), dd))
}

fn hecke_name(space: &SymbolSpace, q: u64) -> String {
    if space.spec.level.is_multiple_of(q) {
        format!("U{q}")
    } else {
        format!("T{q}")
    }
}

/// Right coset representatives of the double coset of `diag(1, q)` under the
/// group: `(1 i; 0 q)` for `0 ≤ i < q`, plus `δ_q·(q 0; 0 1)` when `q ∤ N`.
pub fn hecke_representatives(space: &SymbolSpace, q: u64) -> Result<Vec<Mat2>> {
    let qb = BigInt::from(q);
    let mut reps: Vec<Mat2> = (0..q)
        .map(|i| Mat2::new(BigInt::one(), BigInt::from(i), BigInt::zero(), qb.clone()))
        .collect();
    if !space.spec.level.is_multiple_of(q) {
        let delta = diamond_matrix(&level(space), &qb)?;
        reps.push(delta.mul(&Mat2::new(qb.clone(), BigInt::zero(), BigInt::zero(), BigInt::one())));
    }
    Ok(reps)
}

/// `T_q` (or `U_q`) through the rational symbols, for any prime `q`.
pub fn hecke_operator_rational(space: &SymbolSpace, q: u64) -> Result<OperatorMatrix> {
    if !is_prime(q) {
        return Err(MmsError::InvalidInput(format!("{q} is not prime")));
    }
    let reps = hecke_representatives(space, q)?;
    let one = BigRational::one();
    from_generator_images(space, hecke_name(space, q), |j| {
        let (g, g2) = space.generator_pair(j);
        let mut v = vec![BigRational::zero(); space.num_generators()];
        for h in &reps {
            space.accumulate_rational(&h.mul(&g), &h.mul(&g2), &one, &mut v)?;
        }
        Ok(space.project_vec_q(&v).coords)
    })
}

// Index of the coset SL₂(Z)·g_j containing `m`: `None` stands for g_∞.
fn locate(m: &Mat2, q: &BigInt, half: &BigInt) -> Option<BigInt> {
    let (x, y) = if !(m.c.mod_floor(q).is_zero() && m.d.mod_floor(q).is_zero()) {
        (&m.c, &m.d)
    } else {
        (&m.a, &m.b)
    };
    let x = x.mod_floor(q);
    if x.is_zero() {
        return None;
    }
    let (_, inv, _) = ext_gcd(&x, q);
    let mut j = (y * inv).mod_floor(q);
    if &j > half {
        j -= q;
    }
    Some(j)
}

// `m · h⁻¹` for `h` of determinant `q`; exact by construction.
fn div_right(m: &Mat2, h: &Mat2, q: &BigInt) -> Mat2 {
    let p = m.mul(&h.adj());
    let e = [&p.a, &p.b, &p.c, &p.d];
    debug_assert!(e.iter().all(|x| x.mod_floor(q).is_zero()));
    Mat2::new(&p.a / q, &p.b / q, &p.c / q, &p.d / q)
}

/// `T_q` for a prime `q ∤ 2N`, computed in the integral lattice:
/// `T_q{g, g'} = ⟨q⟩{t_∞(g), t_∞(g')} + Σ_i {t_i(g), t_i(g')}` with
/// `g_i·g = t_i(g)·g_{σ_g(i)}`, `i ∈ {−(q−1)/2, …, (q−1)/2}`.
pub fn hecke_operator_integral(space: &SymbolSpace, q: u64) -> Result<OperatorMatrix> {
    if !is_prime(q) {
        return Err(MmsError::InvalidInput(format!("{q} is not prime")));
    }
    if q == 2 || space.spec.level.is_multiple_of(q) {
        return Err(MmsError::Unsupported(format!(
            "integral T_{q} needs q ∤ 2N (N = {})",
            space.spec.level
        )));
    }
    let qb = BigInt::from(q);
    let half = BigInt::from((q - 1) / 2);
    let delta = diamond_matrix(&level(space), &qb)?;
    let g_inf = Mat2::new(qb.clone(), BigInt::zero(), BigInt::zero(), BigInt::one());
    let g_of = |j: &Option<BigInt>| match j {
        None => g_inf.clone(),
        Some(i) => Mat2::new(BigInt::one(), i.clone(), BigInt::zero(), qb.clone()),
    };
    let t_of = |gi: &Mat2, g: &Mat2| {
        let m = gi.mul(g);
        let j = locate(&m, &qb, &half);
        div_right(&m, &g_of(&j), &qb)
    };
    let index: Vec<Option<BigInt>> = (-(((q - 1) / 2) as i64)..=((q - 1) / 2) as i64)
        .map(|i| Some(BigInt::from(i)))
        .chain(std::iter::once(None))
        .collect();
    from_generator_images(space, hecke_name(space, q), |j| {
        let (g, g2) = space.generator_pair(j);
        let mut v = vec![BigInt::zero(); space.num_generators()];
        for i in &index {
            let gi = g_of(i);
            let (mut t, mut t2) = (t_of(&gi, &g), t_of(&gi, &g2));
            if i.is_none() {
                t = delta.mul(&t);
                t2 = delta.mul(&t2);
            }
            for (o, x) in v.iter_mut().zip(space.reduce_pair_generators(&t, &t2)) {
                *o += x;
            }
        }
        Ok(int_image(space, &v))
    })
}

/// `T_q` for `q ∤ N` or `U_q` for `q | N`. Uses the integral formula when
/// `q ∤ 2N` and the rational symbols otherwise.
pub fn hecke_operator(space: &SymbolSpace, q: u64) -> Result<OperatorMatrix> {
    if q != 2 && is_prime(q) && !space.spec.level.is_multiple_of(q) {
        hecke_operator_integral(space, q)
    } else {
        hecke_operator_rational(space, q)
    }
}

/// The diamond operator `⟨d⟩`: left multiplication by an element of Γ₀(N)
/// with lower-right entry `≡ d (mod N)`.
pub fn diamond(space: &SymbolSpace, d: i64) -> Result<OperatorMatrix> {
    let delta = diamond_matrix(&level(space), &BigInt::from(d))?;
    from_generator_images(space, format!("diamond({d})"), |j| {
        let (g, g2) = space.generator_pair(j);
        Ok(int_image(
            space,
            &space.reduce_pair_generators(&delta.mul(&g), &delta.mul(&g2)),
        ))
    })
}

/// The Atkin–Lehner operator `{g, g'} ↦ {W g, W g'}_Q`, `W = ((0, −1), (N, 0))`.
pub fn atkin_lehner(space: &SymbolSpace) -> Result<OperatorMatrix> {
    let n = level(space);
    let w = Mat2::new(BigInt::zero(), -BigInt::one(), n, BigInt::zero());
    let one = BigRational::one();
    from_generator_images(space, format!("W{}", space.spec.level), |j| {
        let (g, g2) = space.generator_pair(j);
        let mut v = vec![BigRational::zero(); space.num_generators()];
        space.accumulate_rational(&w.mul(&g), &w.mul(&g2), &one, &mut v)?;
        Ok(space.project_vec_q(&v).coords)
    })
}

/// Complex conjugation `{g, g'} ↦ {ḡ, ḡ'}` where `ḡ` negates the off-diagonal.
pub fn complex_conjugation(space: &SymbolSpace) -> Result<OperatorMatrix> {
    from_generator_images(space, "conj".to_string(), |j| {
        let (g, g2) = space.generator_pair(j);
        Ok(int_image(space, &space.reduce_pair_generators(&g.conj(), &g2.conj())))
    })
}

/// Permutation of cusp classes induced by `a/c ↦ −a/c`, as a matrix on
/// cusp-class coordinates.
pub fn cusp_conjugation(space: &SymbolSpace) -> MatZ {
    let nc = space.cusps.len();
    let mut m = MatZ::zeros(nc, nc);
    for (c, cl) in space.cusps.classes.iter().enumerate() {
        let to = space.cusps.class_of_fraction(&space.cosets, &-&cl.num, &cl.den);
        m.set(to, c, BigInt::one());
    }
    m
}

/// `T_n` from the prime operators: multiplicative on coprime factors,
/// `T_{q^{k+1}} = T_q T_{q^k} − q⟨q⟩T_{q^{k−1}}` for `q ∤ N` and
/// `U_q^k` for `q | N`.
pub fn hecke_composite(space: &SymbolSpace, n: u64) -> Result<OperatorMatrix> {
    if n == 0 {
        return Err(MmsError::InvalidInput("T_0 is undefined".into()));
    }
    let r = space.rank();
    let mut acc = MatQ::identity(r);
    for (q, e) in factor(n) {
        let tq = hecke_operator(space, q)?.mat;
        let power = if space.spec.level.is_multiple_of(q) {
            tq.pow(e)
        } else {
            let dq = diamond(space, q as i64)?.mat.scale(&qi(q as i64));
            let mut prev = MatQ::identity(r);
            let mut cur = tq.clone();
            for _ in 1..e {
                let next = tq.mul(&cur).sub(&dq.mul(&prev));
                prev = cur;
                cur = next;
            }
            cur
        };
        acc = acc.mul(&power);
    }
    Ok(OperatorMatrix::new(format!("T{n}"), acc))
}

fn act_cusp(h: &Mat2, x: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    let num = &h.a * &x.0 + &h.b * &x.1;
    let den = &h.c * &x.0 + &h.d * &x.1;
    reduce_fraction(&num, &den)
}

/// `T_q` on the classical modular symbols, `{α, β} ↦ Σ_h {hα, hβ}`, in the
/// classical basis.
pub fn classical_hecke(space: &SymbolSpace, q: u64) -> Result<MatQ> {
    if !is_prime(q) {
        return Err(MmsError::InvalidInput(format!("{q} is not prime")));
    }
    let reps = hecke_representatives(space, q)?;
    let rc = space.classical_rank();
    let lift = &space.classical.lift;
    let mut mat = MatQ::zeros(rc, rc);
    for idx in 0..space.cosets.len() {
        let row = lift.row(idx);
        if row.iter().all(|x| x.is_zero()) {
            continue;
        }
        let r = space.cosets.rep(idx);
        let (inf, zero) = (r.act_infinity(), r.act_zero());
        let mut im = vec![BigInt::zero(); rc];
        for h in &reps {
            let s = space.classical_symbol(&act_cusp(h, &inf), &act_cusp(h, &zero));
            for (o, x) in im.iter_mut().zip(s) {
                *o += x;
            }
        }
        for (k, w) in row.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (i, x) in im.iter().enumerate() {
                let v = mat.get(i, k) + BigRational::from_integer(w * x);
                mat.set(i, k, v);
            }
        }
    }
    Ok(mat)
}

fn commutes(a: &MatQ, b: &MatQ) -> bool {
    a.mul(b) == b.mul(a)
}

/// Runs the Hecke consistency checks for the given primes.
pub fn verify_hecke_laws(space: &SymbolSpace, primes: &[u64]) -> Result<Vec<CheckItem>> {
    let n = space.spec.level;
    let tag = space.spec.to_string();
    let mut items = Vec::new();
    let conj = complex_conjugation(space)?;
    let pi = space.pi.to_q();
    let kernel = space.boundary_kernel().to_q();
    let homology = space.homology_sublattice();
    let cusp_rows = space.cusp_sublattice().to_q();
    let eisenstein_level = space.spec.family == Family::Gamma0 && is_prime(n);
    let mut ops: Vec<OperatorMatrix> = Vec::new();
    for &q in primes {
        if !is_prime(q) {
            return Err(MmsError::InvalidInput(format!("{q} is not prime")));
        }
        let t = hecke_operator(space, q)?;
        let id = format!("{tag}:{}", t.name);
        if q != 2 && !n.is_multiple_of(q) {
            items.push(CheckItem::check(
                format!("{id}:integral"),
                t.is_integral(),
                format!("denominator {}", t.denominator),
            ));
            let rat = hecke_operator_rational(space, q)?;
            items.push(CheckItem::check(
                format!("{id}:routes"),
                rat.mat == t.mat,
                "integral and rational constructions agree",
            ));
            let image = MatZ::from_rows(
                (0..homology.rows())
                    .map(|i| {
                        let v: Vec<BigRational> = homology
                            .row(i)
                            .iter()
                            .map(|x| BigRational::from_integer(x.clone()))
                            .collect();
                        t.apply(&v).into_iter().map(|x| x.to_integer()).collect()
                    })
                    .collect(),
                space.rank(),
            );
            let stable = homology.rows() == 0 || sublattice_index(&homology, &image).is_ok();
            items.push(CheckItem::check(
                format!("{id}:homology"),
                stable,
                "maps the homology image into itself",
            ));
        } else {
            items.push(CheckItem::check(
                format!("{id}:denominator"),
                BigInt::from(q).is_multiple_of(&t.denominator),
                format!("denominator {} divides {q}", t.denominator),
            ));
        }
        let tcl = classical_hecke(space, q)?;
        items.push(CheckItem::check(
            format!("{id}:pi-equivariance"),
            pi.mul(&t.mat) == tcl.mul(&pi),
            "pi∘T = T_classical∘pi",
        ));
        items.push(CheckItem::check(
            format!("{id}:conj"),
            commutes(&t.mat, &conj.mat),
            "commutes with complex conjugation",
        ));
        let kb = space.boundary.to_q().mul(&t.mat).mul(&kernel.transpose());
        items.push(CheckItem::check(
            format!("{id}:ker-boundary"),
            kb.is_zero(),
            "preserves ker ∂",
        ));
        if eisenstein_level && q != n {
            let eig = qi(q as i64 + 1);
            let ok = (0..cusp_rows.rows()).all(|i| {
                let v = cusp_rows.row(i);
                t.apply(v) == v.iter().map(|x| x * &eig).collect::<Vec<_>>()
            });
            items.push(CheckItem::check(
                format!("{id}:eisenstein"),
                ok,
                format!("acts as {} on ker π", q + 1),
            ));
        }
        ops.push(t);
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            items.push(CheckItem::check(
                format!("{tag}:[{},{}]", ops[i].name, ops[j].name),
                commutes(&ops[i].mat, &ops[j].mat),
                "operators commute",
            ));
        }
    }
    Ok(items)
}

/// `(+1, −1)` eigenspace dimensions of complex conjugation over Q.
pub fn conjugation_eigenranks(conj: &OperatorMatrix) -> (usize, usize) {
    let r = conj.size();
    let id = MatQ::identity(r);
    let plus = r - conj.mat.sub(&id).rank();
    let minus = r - conj.mat.add(&id).rank();
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::GroupSpec;
    use crate::symbols::build_space;

    fn sp(f: Family, n: u64) -> SymbolSpace {
        build_space(GroupSpec::new(f, n).unwrap()).unwrap()
    }

    #[test]
    fn factorisation() {
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor(1), vec![]);
        assert!(is_prime(13) && !is_prime(1) && !is_prime(91));
    }

    #[test]
    fn diamond_matrix_in_gamma0() {
        let m = diamond_matrix(&BigInt::from(11), &BigInt::from(3)).unwrap();
        assert!(m.det().is_one());
        assert_eq!(m.c, BigInt::from(11));
        assert_eq!(m.d, BigInt::from(3));
        assert!(diamond_matrix(&BigInt::from(12), &BigInt::from(3)).is_err());
    }

    #[test]
    fn t3_on_cusp_line_gamma0_11() {
        let s = sp(Family::Gamma0, 11);
        let t3 = hecke_operator(&s, 3).unwrap();
        assert!(t3.is_integral());
        let rows = s.cusp_sublattice().to_q();
        for i in 0..rows.rows() {
            let v = rows.row(i);
            let four = qi(4);
            assert_eq!(t3.apply(v), v.iter().map(|x| x * &four).collect::<Vec<_>>());
        }
    }

    #[test]
    fn routes_agree() {
        for (f, n) in [(Family::Gamma0, 11), (Family::Gamma1, 5), (Family::Gamma0, 9)] {
            let s = sp(f, n);
            for q in [3, 5, 7] {
                if n % q == 0 {
                    continue;
                }
                assert_eq!(
                    hecke_operator_integral(&s, q).unwrap().mat,
                    hecke_operator_rational(&s, q).unwrap().mat,
                    "{f:?}({n}) q={q}"
                );
            }
        }
    }

    #[test]
    fn denominators() {
        let s = sp(Family::Gamma0, 11);
        let u = hecke_operator(&s, 11).unwrap();
        assert_eq!(u.name, "U11");
        assert!(BigInt::from(11).is_multiple_of(&u.denominator));
        let t2 = hecke_operator(&s, 2).unwrap();
        assert!(BigInt::from(2).is_multiple_of(&t2.denominator));
    }

    #[test]
    fn diamond_examples() {
        let s = sp(Family::Gamma0, 11);
        assert_eq!(diamond(&s, 2).unwrap().mat, MatQ::identity(s.rank()));
        let s = sp(Family::Gamma1, 5);
        assert_eq!(diamond(&s, 1).unwrap().mat, MatQ::identity(s.rank()));
        let d2 = diamond(&s, 2).unwrap();
        assert!(d2.is_integral());
        assert_eq!(d2.mat.pow(4), MatQ::identity(s.rank()));
        assert!(diamond(&s, 5).is_err());
    }

    #[test]
    fn atkin_lehner_examples() {
        let s = sp(Family::Gamma0, 11);
        let w = atkin_lehner(&s).unwrap();
        assert_eq!(w.mat.pow(2), MatQ::identity(s.rank()));
        // ∂∘W swaps the classes of ∞ and 0.
        let b = s.boundary.to_q();
        let swap = MatQ::from_rows(vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]], 2);
        assert_eq!(b.mul(&w.mat), swap.mul(&b));
        let full = sp(Family::FullSL2, 1);
        assert_eq!(atkin_lehner(&full).unwrap().size(), 0);
    }

    #[test]
    fn conjugation_examples() {
        let s = sp(Family::Gamma0, 11);
        let c = complex_conjugation(&s).unwrap();
        assert!(c.is_integral());
        assert_eq!(c.mat.pow(2), MatQ::identity(s.rank()));
        let cinf = s.generator_image(s.cusp_gen(0)).to_q().coords;
        let neg: Vec<BigRational> = cinf.iter().map(|x| -x).collect();
        assert_eq!(c.apply(&cinf), neg);
        assert_eq!(conjugation_eigenranks(&c), (2, 2));
    }

    #[test]
    fn boundary_of_conjugation() {
        for (f, n) in [(Family::Gamma0, 11), (Family::Gamma1, 7), (Family::Gamma0, 25)] {
            let s = sp(f, n);
            let c = complex_conjugation(&s).unwrap();
            let b = s.boundary.to_q();
            let cc = cusp_conjugation(&s).to_q();
            assert_eq!(b.mul(&c.mat), cc.mul(&b), "{f:?}({n})");
            for cl in 0..s.cusps.len() {
                let x = s.generator_image(s.cusp_gen(cl)).to_q().coords;
                let to = (0..s.cusps.len()).find(|&k| !cc.get(k, cl).is_zero()).unwrap();
                let y: Vec<BigRational> = s
                    .generator_image(s.cusp_gen(to))
                    .to_q()
                    .coords
                    .iter()
                    .map(|v| -v)
                    .collect();
                assert_eq!(c.apply(&x), y);
            }
        }
    }

    #[test]
    fn composite_operators() {
        let s = sp(Family::Gamma0, 11);
        let t2 = hecke_operator(&s, 2).unwrap();
        let t3 = hecke_operator(&s, 3).unwrap();
        assert_eq!(hecke_composite(&s, 6).unwrap().mat, t2.mat.mul(&t3.mat));
        let t9 = hecke_composite(&s, 9).unwrap();
        assert_eq!(t9.mat, t3.mat.mul(&t3.mat).sub(&MatQ::identity(s.rank()).scale(&qi(3))));
        assert_eq!(hecke_composite(&s, 1).unwrap().mat, MatQ::identity(s.rank()));
    }

    #[test]
    fn laws_gamma0_11() {
        let s = sp(Family::Gamma0, 11);
        let items = verify_hecke_laws(&s, &[2, 3, 5, 7, 11]).unwrap();
        for it in &items {
            assert!(it.passed(), "{it:?}");
        }
    }

    #[test]
    fn json_shape() {
        let s = sp(Family::Gamma0, 11);
        let doc = hecke_operator(&s, 11).unwrap().to_document();
        assert_eq!(doc.name, "U11");
        assert_eq!(doc.matrix.len(), 4);
    }
}
