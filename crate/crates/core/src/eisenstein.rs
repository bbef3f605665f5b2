//! Floating-point Eisenstein checks: Dirichlet characters of odd prime-power
//! modulus, Gauss sums, `L(χ, 1)` for even characters, the log-cyclotomic
//! determinant identities and the Γ₀(p) Eisenstein constants.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use crate::error::{MmsError, Result};
use crate::hecke::factor;
use crate::sl2::Mat2;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

/// A Dirichlet character with values `χ(a) = exp(2πi·e(a)/order)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletCharacter {
    pub modulus: u64,
    /// Exponents indexed by `a mod modulus`; `None` off the unit group.
    exponents: Vec<Option<u64>>,
    /// Common denominator of the exponents.
    pub order: u64,
    pub conductor: u64,
    pub even: bool,
}

fn root_of_unity(k: u64, n: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

impl DirichletCharacter {
    pub fn value(&self, a: i64) -> Complex64 {
        let m = self.modulus as i64;
        match self.exponents[a.rem_euclid(m) as usize] {
            Some(e) => root_of_unity(e, self.order),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Exponent of `χ(a)` over `order`, or `None` if `gcd(a, m) > 1`.
    pub fn exponent(&self, a: i64) -> Option<u64> {
        self.exponents[a.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().flatten().all(|&e| e % self.order == 0)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    /// The primitive character mod the conductor inducing this one.
    pub fn primitive(&self) -> DirichletCharacter {
        let f = self.conductor;
        let exponents = (0..f)
            .map(|a| {
                if f == 1 {
                    Some(0)
                } else if a.gcd(&f) == 1 {
                    self.exponents[a as usize]
                } else {
                    None
                }
            })
            .collect();
        DirichletCharacter {
            modulus: f,
            exponents,
            order: self.order,
            conductor: f,
            even: self.even,
        }
    }
}

fn odd_prime_power(m: u64) -> Result<(u64, u32)> {
    match factor(m).as_slice() {
        [(p, e)] if *p != 2 => Ok((*p, *e)),
        _ => Err(MmsError::Unsupported(format!("{m} is not a power of an odd prime"))),
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn primitive_root(m: u64, phi: u64) -> u64 {
    let primes: Vec<u64> = factor(phi).into_iter().map(|(q, _)| q).collect();
    (2..m)
        .find(|&g| g.gcd(&m) == 1 && primes.iter().all(|&q| pow_mod(g, phi / q, m) != 1))
        .expect("odd prime powers have primitive roots")
}

/// All `φ(m)` characters modulo an odd prime power `m`, indexed by `j` with
/// `χ_j(g^k) = exp(2πi·jk/φ(m))` for the least primitive root `g`.
pub fn characters_mod(m: u64) -> Result<Vec<DirichletCharacter>> {
    let (p, e) = odd_prime_power(m)?;
    let phi = m / p * (p - 1);
    let g = primitive_root(m, phi);
    let mut log = vec![None; m as usize];
    let mut x = 1u64;
    for k in 0..phi {
        log[x as usize] = Some(k);
        x = x * g % m;
    }
    let divisors: Vec<u64> = (0..=e).map(|i| p.pow(i)).collect();
    let chars = (0..phi)
        .map(|j| {
            let exponents: Vec<Option<u64>> = log.iter().map(|l| l.map(|k| j * k % phi)).collect();
            let conductor = *divisors
                .iter()
                .find(|&&f| {
                    (1..m)
                        .step_by(f as usize)
                        .all(|a| exponents[a as usize].is_none_or(|x| x == 0))
                })
                .expect("the modulus is a period");
            DirichletCharacter {
                modulus: m,
                exponents,
                order: phi,
                conductor,
                even: j % 2 == 0,
            }
        })
        .collect();
    Ok(chars)
}

/// `τ(χ) = Σ_a χ(a)·e^{2πia/f}` for a primitive character.
pub fn gauss_sum(chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive() {
        return Err(MmsError::InvalidInput(format!(
            "character mod {} has conductor {}",
            chi.modulus, chi.conductor
        )));
    }
    let f = chi.modulus;
    Ok((0..f).map(|a| chi.value(a as i64) * root_of_unity(a, f)).sum())
}

fn check_even_primitive(chi: &DirichletCharacter) -> Result<()> {
    if !chi.even || !chi.is_primitive() || chi.is_trivial() {
        return Err(MmsError::InvalidInput(
            "need an even, primitive, non-trivial character".into(),
        ));
    }
    Ok(())
}

fn log_abs_one_minus(a: u64, f: u64) -> f64 {
    // |1 − e^{2πia/f}| = 2|sin(πa/f)|.
    (2.0 * (PI * a as f64 / f as f64).sin().abs()).ln()
}

/// `L(χ, 1) = −(τ(χ)/f)·Σ_a χ̄(a)·log|1 − e^{2πia/f}|`.
pub fn l_even_char_at_1(chi: &DirichletCharacter) -> Result<Complex64> {
    check_even_primitive(chi)?;
    let f = chi.modulus;
    let tau = gauss_sum(chi)?;
    let s: Complex64 = (1..f)
        .map(|a| chi.value(a as i64).conj() * log_abs_one_minus(a, f))
        .sum();
    Ok(-tau / f as f64 * s)
}

/// `L(χ, 1)` from the Dirichlet series: `K` full periods summed directly,
/// the rest by `Σ_{k≥K} Σ_a χ(a)/(fk + a) = −(1/f)·Σ_a χ(a)·ψ(K + a/f)`.
pub fn l_value_series(chi: &DirichletCharacter, max_terms: usize) -> Result<Complex64> {
    if chi.is_trivial() {
        return Err(MmsError::InvalidInput("the trivial character has a pole at 1".into()));
    }
    let f = chi.modulus as usize;
    let blocks = (max_terms / f).max(1);
    let values: Vec<Complex64> = (0..f).map(|a| chi.value(a as i64)).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..blocks {
        let mut block = Complex64::new(0.0, 0.0);
        for (a, v) in values.iter().enumerate().skip(1) {
            block += v / (k * f + a) as f64;
        }
        sum += block;
    }
    let kf = blocks as f64;
    let tail: Complex64 = values
        .iter()
        .enumerate()
        .skip(1)
        .map(|(a, v)| v * digamma(kf + a as f64 / f as f64))
        .sum();
    Ok(sum - tail / f as f64)
}

/// A two-sided numeric comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericReport {
    pub identity: String,
    pub pn: u64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericDocument {
    pub identity: String,
    pub pn: u64,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub rel_error: f64,
    pub pass: bool,
}

impl NumericReport {
    pub fn new(identity: impl Into<String>, pn: u64, lhs: Complex64, rhs: Complex64, tolerance: f64) -> Self {
        let scale = rhs.norm().max(f64::MIN_POSITIVE);
        let rel_error = (lhs - rhs).norm() / scale;
        NumericReport {
            identity: identity.into(),
            pn,
            lhs,
            rhs,
            rel_error,
            tolerance,
            pass: rel_error <= tolerance,
        }
    }

    pub fn to_document(&self) -> NumericDocument {
        NumericDocument {
            identity: self.identity.clone(),
            pn: self.pn,
            lhs: [self.lhs.re, self.lhs.im],
            rhs: [self.rhs.re, self.rhs.im],
            rel_error: self.rel_error,
            pass: self.pass,
        }
    }
}

/// `(Z/pⁿ)^×/±1` as representatives in `[1, pⁿ/2]`.
pub fn units_mod_sign(pn: u64) -> Vec<u64> {
    (1..=pn / 2).filter(|a| a.gcd(&pn) == 1).collect()
}

fn inverse_mod(a: u64, m: u64) -> u64 {
    let e = (a as i64).extended_gcd(&(m as i64));
    e.x.rem_euclid(m as i64) as u64
}

/// `F(x) = −log|1 − e^{2πix/pⁿ}|`.
fn f_log(x: u64, pn: u64) -> f64 {
    -log_abs_one_minus(x % pn, pn)
}

/// `M′[x, y] = F(x⁻¹y)` over `(Z/pⁿ)^×/±1`.
pub fn m_prime(pn: u64) -> DMatrix<f64> {
    let xs = units_mod_sign(pn);
    DMatrix::from_fn(xs.len(), xs.len(), |i, j| f_log(inverse_mod(xs[i], pn) * xs[j], pn))
}

/// `M″[x, y] = F(x⁻¹y) − F(x⁻¹)` for `x, y ≠ ±1`.
pub fn m_double_prime(pn: u64) -> DMatrix<f64> {
    let xs: Vec<u64> = units_mod_sign(pn).into_iter().filter(|&x| x != 1).collect();
    DMatrix::from_fn(xs.len(), xs.len(), |i, j| {
        let xi = inverse_mod(xs[i], pn);
        f_log(xi * xs[j], pn) - f_log(xi, pn)
    })
}

/// Results of [`logdet_identity`].
#[derive(Clone, Debug, PartialEq)]
pub struct LogdetReports {
    /// `det M′ = (−½·log p)·Π_{χ≠1} (f_χ/(2τ(χ)))·L(χ, 1)`.
    pub m_prime: NumericReport,
    /// `det M″ = Π_{χ≠1} (f_χ/(2τ(χ)))·L(χ, 1)`.
    pub m_double_prime: NumericReport,
    /// `det M′` against the factor `p/2` in place of `−½·log p`.
    pub m_prime_literal: NumericReport,
}

/// Compares `det M′` and `det M″` with products of `L(χ, 1)` over the
/// non-trivial even characters mod `pⁿ`. L-values come from the Dirichlet
/// series, independently of the logarithms in the matrices.
pub fn logdet_identity(pn: u64, tolerance: f64, max_terms: usize) -> Result<LogdetReports> {
    let (p, _) = odd_prime_power(pn)?;
    let mut product = Complex64::new(1.0, 0.0);
    for chi in characters_mod(pn)? {
        if !chi.even || chi.is_trivial() {
            continue;
        }
        let prim = chi.primitive();
        let tau = gauss_sum(&prim)?;
        let l = l_value_series(&prim, max_terms)?;
        product *= prim.modulus as f64 / (2.0 * tau) * l;
    }
    let det1 = Complex64::new(m_prime(pn).determinant(), 0.0);
    let det2 = Complex64::new(m_double_prime(pn).determinant(), 0.0);
    let trivial = -0.5 * (p as f64).ln();
    if det1.norm() == 0.0 || det2.norm() == 0.0 {
        return Err(MmsError::Internal(format!("singular log-cyclotomic matrix at {pn}")));
    }
    Ok(LogdetReports {
        m_prime: NumericReport::new("detM'", pn, det1, product * trivial, tolerance),
        m_double_prime: NumericReport::new("detM''", pn, det2, product, tolerance),
        m_prime_literal: NumericReport::new("detM'(p/2)", pn, det1, product * (p as f64 / 2.0), tolerance),
    })
}

/// `B₂(x) = {x}² − {x} + 1/6`.
pub fn bernoulli2(x: &BigRational) -> BigRational {
    let frac = x - x.floor();
    &frac * &frac - &frac + BigRational::new(BigInt::one(), BigInt::from(6))
}

fn eis_f(a: &BigInt, b: &BigInt, pn: &BigInt) -> f64 {
    if !a.mod_floor(pn).is_zero() {
        return 0.0;
    }
    let b = b.mod_floor(pn);
    let bb: u64 = b.try_into().expect("residue fits in u64");
    let n: u64 = pn.try_into().expect("modulus fits in u64");
    -log_abs_one_minus(bb, n)
}

fn row_times(a: &BigInt, b: &BigInt, g: &Mat2) -> (BigInt, BigInt) {
    (a * &g.a + b * &g.c, a * &g.b + b * &g.d)
}

/// Value of `{g, g'}` on `2iπ·φ_{(a/pⁿ, b/pⁿ)}`: the real part
/// `F((a,b)g') − F((a,b)g)` with `F(a, b) = −δ_a·log|1 − e^{2πib/pⁿ}|`, and the
/// exact constant-term difference `½B₂(x') − ½B₂(x)` with `x = first((a,b)g)/pⁿ`.
pub fn eis_component(g: &Mat2, g2: &Mat2, a: i64, b: i64, pn: u64) -> Result<(f64, BigRational)> {
    let (p, _) = odd_prime_power(pn)?;
    let (a, b) = (BigInt::from(a), BigInt::from(b));
    let pb = BigInt::from(p);
    if a.mod_floor(&pb).is_zero() && b.mod_floor(&pb).is_zero() {
        return Err(MmsError::InvalidInput(format!("({a}, {b}) vanishes mod {p}")));
    }
    let n = BigInt::from(pn);
    let (x1, y1) = row_times(&a, &b, g);
    let (x2, y2) = row_times(&a, &b, g2);
    let real = eis_f(&x2, &y2, &n) - eis_f(&x1, &y1, &n);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let res = (bernoulli2(&BigRational::new(x2, n.clone())) - bernoulli2(&BigRational::new(x1, n))) * half;
    Ok((real, res))
}

/// Eisenstein data for Γ₀(p).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gamma0pConstants {
    pub p: u64,
    /// `gcd(p − 1, 12)`.
    pub d: u64,
    /// `(p − 1)/d`.
    pub n: u64,
    /// `a_0, …, a_bound` of `E = n + (24/d)·Σ_k (Σ_{m|k, p∤m} m) q^k`.
    pub coefficients: Vec<u64>,
    /// `−12/d`, the coefficient of `log p` in `L(E, 1)`.
    pub l_coefficient: String,
    /// `−(12/d)·log p`.
    pub l_value: f64,
}

pub fn gamma0p_constants(p: u64, bound: usize) -> Result<Gamma0pConstants> {
    if p == 2 || !crate::hecke::is_prime(p) {
        return Err(MmsError::InvalidInput(format!("{p} is not an odd prime")));
    }
    let d = (p - 1).gcd(&12);
    let n = (p - 1) / d;
    let mut coefficients = vec![n];
    for k in 1..=bound as u64 {
        let s: u64 = (1..=k).filter(|m| k % m == 0 && m % p != 0).sum();
        coefficients.push(24 / d * s);
    }
    let l = BigRational::new(BigInt::from(-12), BigInt::from(d));
    Ok(Gamma0pConstants {
        p,
        d,
        n,
        coefficients,
        l_coefficient: l.to_string(),
        l_value: -(12.0 / d as f64) * (p as f64).ln(),
    })
}

impl Gamma0pConstants {
    /// `(L(E, 1), 2π·a₀(E))`.
    pub fn period_pair(&self) -> (f64, f64) {
        (self.l_value, 2.0 * PI * self.coefficients[0] as f64)
    }
}
