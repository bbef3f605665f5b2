//! The antisymmetric pairing on the dual of a symbol space, the induced map
//! G, and the λ-coordinate description of G on classical functionals.
//!
//! Dual vectors are coordinate vectors against the space basis; an operator
//! with matrix `M` acts on them by precomposition, `φ ↦ Mᵀφ`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{MmsError, Result};
use crate::hecke::{atkin_lehner, factor, hecke_operator, is_prime};
use crate::lattice::{elementary_divisors, solve_rational, MatQ, MatZ};
use crate::sl2::{Gen, Mat2};
use crate::symbols::{QSymElement, SymbolSpace};

/// `⟨e_i, e_j⟩` on the dual basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingMatrix {
    pub mat: MatQ,
    /// `6·mat`.
    pub six_times: MatZ,
    /// Number of cosets of Γ over each coset of ±Γ.
    pub multiplicity: u32,
}

/// Coordinates `λ_g` over the coset table.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaCycle {
    pub coords: Vec<BigRational>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn dot(a: &[BigRational], b: &[BigInt]) -> BigRational {
    a.iter()
        .zip(b)
        .filter(|(_, y)| !y.is_zero())
        .map(|(x, y)| x * BigRational::from_integer(y.clone()))
        .sum()
}

/// The four symbols attached to a coset representative `g`:
/// `{gS, g}`, `{gTS, gT}`, `{g, gT}`, `{g, gS}`.
fn coset_symbols(space: &SymbolSpace, g: &Mat2) -> [Vec<BigInt>; 4] {
    let s = Mat2::s();
    let t = Mat2::t();
    let gs = g.mul(&s);
    let gt = g.mul(&t);
    let gts = gt.mul(&s);
    [
        space.reduce_pair(&gs, g).coords,
        space.reduce_pair(&gts, &gt).coords,
        space.reduce_pair(g, &gt).coords,
        space.reduce_pair(g, &gs).coords,
    ]
}

/// The pairing matrix
/// `⟨φ₁, φ₂⟩ = (1/6) Σ_g φ₁(A)φ₂(B) − φ₁(B)φ₂(A) − 4φ₁(C)φ₂(D) + 4φ₁(D)φ₂(C)`
/// with `A = {gS, g}`, `B = {gTS, gT}`, `C = {g, gT}`, `D = {g, gS}`, summed
/// over Γ\SL₂(Z).
pub fn pairing_matrix(space: &SymbolSpace) -> PairingMatrix {
    let r = space.rank();
    let m: u32 = if space.spec.contains_minus_one() { 1 } else { 2 };
    let mut six = vec![BigInt::zero(); r * r];
    for idx in 0..space.cosets.len() {
        let [a, b, c, d] = coset_symbols(space, space.cosets.rep(idx));
        for i in 0..r {
            for j in 0..r {
                let four: BigInt = &d[i] * &c[j] - &c[i] * &d[j];
                let v: BigInt = &a[i] * &b[j] - &b[i] * &a[j] + four * 4;
                if !v.is_zero() {
                    six[i * r + j] += v;
                }
            }
        }
    }
    let six_times = MatZ::from_vec(r, r, six.into_iter().map(|x| x * m).collect());
    let mat = six_times
        .to_q()
        .scale(&BigRational::new(BigInt::one(), BigInt::from(6)));
    PairingMatrix {
        mat,
        six_times,
        multiplicity: m,
    }
}

impl PairingMatrix {
    pub fn eval(&self, phi: &[BigRational], psi: &[BigRational]) -> BigRational {
        let p = self.mat.mul_vec(psi);
        phi.iter().zip(&p).map(|(x, y)| x * y).sum()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.mat.add(&self.mat.transpose()).is_zero()
    }

    pub fn det(&self) -> BigRational {
        self.mat.det()
    }

    /// `|Pf(mat)| = √|det|`; the determinant of an antisymmetric matrix is a
    /// square, so this is exact.
    pub fn abs_pfaffian(&self) -> BigRational {
        let d = self.det().abs();
        let (n, m) = (d.numer().sqrt(), d.denom().sqrt());
        debug_assert_eq!(&n * &n, *d.numer());
        BigRational::new(n, m)
    }
}

/// `(1/d_Γ)·Π e_c`.
pub fn expected_det(space: &SymbolSpace) -> BigInt {
    let prod: BigInt = space.cusps.classes.iter().map(|c| BigInt::from(c.width)).product();
    prod / BigInt::from(space.cusps.d_gamma)
}

fn width_lcm(space: &SymbolSpace) -> BigInt {
    space
        .cusps
        .classes
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(&BigInt::from(c.width)))
}

fn prime_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut n = n.abs();
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            while n.is_multiple_of(&d) {
                n /= &d;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectnessReport {
    /// Whether every pairing value is an integer.
    pub integral: bool,
    /// Elementary divisors of `6·mat`.
    pub elementary_divisors: Vec<String>,
    /// Least squarefree `m` such that the pairing is perfect over `Z[1/m]`;
    /// `None` if degenerate.
    pub perfect_over: Option<String>,
    /// `2·lcm(e_c)`.
    pub allowed: String,
    /// Whether `perfect_over` only involves primes of `2·lcm(e_c)`.
    pub perfect_after_inverting_allowed: bool,
}

/// Integrality and perfectness of the pairing. The pairing is perfect over a
/// ring `R` iff `mat` has entries in `R` and is invertible over `R`, i.e. iff
/// each elementary divisor of `mat` is a unit of `R`.
pub fn perfectness_report(space: &SymbolSpace, p: &PairingMatrix) -> PerfectnessReport {
    let (den, scaled) = p.mat.scaled_integral();
    let divisors = elementary_divisors(&scaled);
    let allowed: BigInt = width_lcm(space) * 2u32;
    let r = space.rank();
    let degenerate = divisors.len() < r || divisors.iter().any(|d| d.is_zero());
    let (perfect_over, ok) = if degenerate {
        (None, false)
    } else {
        let mut primes: Vec<BigInt> = prime_divisors(&den);
        for d in &divisors {
            primes.extend(prime_divisors(d));
        }
        primes.sort();
        primes.dedup();
        let ok = primes.iter().all(|p| allowed.is_multiple_of(p));
        let m: BigInt = primes.iter().product();
        let name = if m.is_one() {
            "Z".to_string()
        } else {
            format!("Z[1/{m}]")
        };
        (Some(name), ok)
    };
    PerfectnessReport {
        integral: den.is_one(),
        elementary_divisors: elementary_divisors(&p.six_times)
            .iter()
            .map(|d| d.to_string())
            .collect(),
        perfect_over,
        allowed: allowed.to_string(),
        perfect_after_inverting_allowed: ok,
    }
}

fn is_prime_power(n: u64) -> bool {
    factor(n).len() == 1
}

/// Checks `⟨T φ₁, φ₂⟩ = ⟨φ₁, W T W⁻¹ φ₂⟩` for `T = T_q`, i.e. `M·P = P·(W M W⁻¹)ᵀ`.
pub fn adjointness_check(space: &SymbolSpace, p: &PairingMatrix, q: u64) -> Result<bool> {
    let n = space.spec.level;
    if !is_prime_power(n) {
        return Err(MmsError::Unsupported(format!(
            "adjointness needs a prime-power level, got {n}"
        )));
    }
    if !is_prime(q) || q == 2 || n.is_multiple_of(q) {
        return Err(MmsError::InvalidInput(format!("need a prime q ∤ 2N, got {q}")));
    }
    let t = hecke_operator(space, q)?;
    let w = atkin_lehner(space)?;
    Ok(adjoint_matrices(p, &t.mat, &w.mat))
}

/// `M·P = P·(W M W⁻¹)ᵀ` for explicit matrices (`W² = Id`).
pub fn adjoint_matrices(p: &PairingMatrix, m: &MatQ, w: &MatQ) -> bool {
    let conj = w.mul(m).mul(w);
    m.mul(&p.mat) == p.mat.mul(&conj.transpose())
}

/// `⟨φ∘c, ψ⟩ = −⟨φ, ψ∘c⟩` for the conjugation matrix `c`.
pub fn conjugation_anti_invariant(p: &PairingMatrix, conj: &MatQ) -> bool {
    conj.mul(&p.mat) == p.mat.mul(&conj.transpose()).scale(&q(-1))
}

/// `G(φ)`: the element `x` with `ψ(x) = ⟨φ, ψ⟩` for every dual vector `ψ`.
pub fn g_map(p: &PairingMatrix, phi: &[BigRational]) -> Result<QSymElement> {
    let r = p.mat.rows();
    if phi.len() != r {
        return Err(MmsError::InvalidInput(format!(
            "dual vector has length {}, expected {r}",
            phi.len()
        )));
    }
    if p.det().is_zero() {
        return Err(MmsError::Degenerate { kernel: p.mat.kernel() });
    }
    let rhs = p.mat.transpose().mul_vec(phi);
    let coords = solve_rational(&MatQ::identity(r), &rhs)?;
    Ok(QSymElement { coords })
}

/// Dual vectors spanning the functionals that factor through the classical
/// projection (the rows of `pi`).
pub fn classical_dual_basis(space: &SymbolSpace) -> Vec<Vec<BigRational>> {
    let pq = space.pi.to_q();
    (0..pq.rows()).map(|i| pq.row(i).to_vec()).collect()
}

/// `λ_g = φ({g0, g∞})`, evaluated as `φ({gS, g})`. `φ` must vanish on the
/// cusp generators.
pub fn lambda_from_dual(space: &SymbolSpace, phi: &[BigRational]) -> Result<LambdaCycle> {
    if phi.len() != space.rank() {
        return Err(MmsError::InvalidInput("dual vector has the wrong length".into()));
    }
    for c in 0..space.cusps.len() {
        if !dot(phi, &space.generator_image(space.cusp_gen(c)).coords).is_zero() {
            return Err(MmsError::InvalidInput(
                "functional does not factor through the classical projection".into(),
            ));
        }
    }
    let coords = (0..space.cosets.len())
        .map(|idx| -dot(phi, &space.generator_image(space.manin_gen(idx)).coords))
        .collect();
    Ok(LambdaCycle { coords })
}

fn tau_index(space: &SymbolSpace, idx: usize) -> usize {
    space.cosets.act(space.cosets.act(idx, Gen::S), Gen::T)
}

/// Whether `λ_g + λ_{gS} = 0` and `λ_g + λ_{gτ} + λ_{gτ²} = 0` for all cosets.
pub fn satisfies_cycle_conditions(space: &SymbolSpace, lambda: &LambdaCycle) -> bool {
    let l = &lambda.coords;
    (0..space.cosets.len()).all(|idx| {
        let s = space.cosets.act(idx, Gen::S);
        let t1 = tau_index(space, idx);
        let t2 = tau_index(space, t1);
        (&l[idx] + &l[s]).is_zero() && (&l[idx] + &l[t1] + &l[t2]).is_zero()
    })
}

/// `Σ_g (1/6)λ_{gτ}{gS, g} − (1/6)λ_{gτ}{gτ²S, gτ²} − (2/3)λ_g{g, gT}`
/// over Γ\SL₂(Z).
pub fn lambda_to_mms(space: &SymbolSpace, lambda: &LambdaCycle) -> Result<QSymElement> {
    if lambda.coords.len() != space.cosets.len() {
        return Err(MmsError::InvalidInput("λ has the wrong length".into()));
    }
    if !satisfies_cycle_conditions(space, lambda) {
        return Err(MmsError::InvalidInput("λ violates the cycle conditions".into()));
    }
    let m = if space.spec.contains_minus_one() { q(1) } else { q(2) };
    let sixth = BigRational::new(BigInt::one(), BigInt::from(6));
    let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
    let s = Mat2::s();
    let t = Mat2::t();
    let tau2 = Mat2::tau().mul(&Mat2::tau());
    let mut gens = vec![BigRational::zero(); space.num_generators()];
    let mut add = |w: &BigRational, h: &Mat2, h2: &Mat2| {
        if w.is_zero() {
            return;
        }
        for (o, x) in gens.iter_mut().zip(space.reduce_pair_generators(h, h2)) {
            if !x.is_zero() {
                *o += w * BigRational::from_integer(x);
            }
        }
    };
    for idx in 0..space.cosets.len() {
        let g = space.cosets.rep(idx);
        let lt = &lambda.coords[tau_index(space, idx)] * &sixth * &m;
        let lg = &lambda.coords[idx] * &two_thirds * &m;
        add(&lt, &g.mul(&s), g);
        let gt2 = g.mul(&tau2);
        add(&-&lt, &gt2.mul(&s), &gt2);
        add(&-lg, g, &g.mul(&t));
    }
    Ok(space.project_vec_q(&gens))
}

/// `x • y = Σ_g λ_g μ_g` for `x = Σ μ_g{g0, g∞}` and `y` with λ-coordinates.
pub fn merel_intersection(mu: &[BigRational], lambda: &LambdaCycle) -> BigRational {
    mu.iter().zip(&lambda.coords).map(|(a, b)| a * b).sum()
}

/// `lambda_to_mms(lambda_from_dual(φ)) = G(φ)` for every classical dual
/// basis vector.
pub fn verify_g_identity(space: &SymbolSpace, p: &PairingMatrix) -> Result<bool> {
    for phi in classical_dual_basis(space) {
        let g = g_map(p, &phi)?;
        let l = lambda_to_mms(space, &lambda_from_dual(space, &phi)?)?;
        if g != l {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::complex_conjugation;
    use crate::sl2::{Family, GroupSpec};
    use crate::symbols::build_space;

    fn sp(f: Family, n: u64) -> SymbolSpace {
        build_space(GroupSpec::new(f, n).unwrap()).unwrap()
    }

    #[test]
    fn gamma0_11() {
        let s = sp(Family::Gamma0, 11);
        let p = pairing_matrix(&s);
        assert!(p.is_antisymmetric());
        assert_eq!(expected_det(&s), BigInt::from(11));
        // A 4×4 antisymmetric determinant is a square: 11² here.
        assert_eq!(p.det(), q(121));
        assert_eq!(p.abs_pfaffian(), q(11));
        let rep = perfectness_report(&s, &p);
        assert!(rep.perfect_after_inverting_allowed, "{rep:?}");
        assert!(verify_g_identity(&s, &p).unwrap());
        assert!(adjointness_check(&s, &p, 3).unwrap());
        let c = complex_conjugation(&s).unwrap();
        assert!(conjugation_anti_invariant(&p, &c.mat));
    }

    #[test]
    fn full_group() {
        let s = sp(Family::FullSL2, 1);
        let p = pairing_matrix(&s);
        assert_eq!(p.mat.rows(), 0);
        assert!(verify_g_identity(&s, &p).unwrap());
        assert_eq!(perfectness_report(&s, &p).perfect_over.as_deref(), Some("Z"));
    }

    #[test]
    fn g_map_basics() {
        let s = sp(Family::Gamma0, 11);
        let p = pairing_matrix(&s);
        let zero = vec![q(0); 4];
        assert!(g_map(&p, &zero).unwrap().is_zero());
        let a = vec![q(1), q(-2), q(0), q(3)];
        let b = vec![q(5), q(1), q(-1), q(2)];
        let sum: Vec<BigRational> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        assert_eq!(
            g_map(&p, &sum).unwrap(),
            g_map(&p, &a).unwrap().add(&g_map(&p, &b).unwrap())
        );
        for phi in classical_dual_basis(&s) {
            let g = g_map(&p, &phi).unwrap();
            assert!(s.boundary.to_q().mul_vec(&g.coords).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn lambda_rejections() {
        let s = sp(Family::Gamma0, 11);
        let c = s.generator_image(s.cusp_gen(0)).to_q().coords;
        // A functional that does not kill the cusp line.
        assert!(c.iter().any(|x| !x.is_zero()));
        assert!(lambda_from_dual(&s, &c).is_err());
        let mut bad = vec![q(0); s.cosets.len()];
        bad[0] = q(1);
        assert!(lambda_to_mms(&s, &LambdaCycle { coords: bad }).is_err());
        let zero = LambdaCycle {
            coords: vec![q(0); s.cosets.len()],
        };
        assert!(lambda_to_mms(&s, &zero).unwrap().is_zero());
    }

    #[test]
    fn non_prime_power_adjointness_unsupported() {
        let s = sp(Family::Gamma0, 15);
        let p = pairing_matrix(&s);
        assert!(matches!(adjointness_check(&s, &p, 7), Err(MmsError::Unsupported(_))));
    }
}
