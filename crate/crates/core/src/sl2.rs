//! SL₂(Z) combinatorics: cosets of Γ₀(N), Γ₁(N) in PSL₂(Z), cusps and widths,
//! and S/T word decomposition.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{big, MmsError, Result};

/// 2×2 integer matrix. Elements of SL₂(Z) are the ones with determinant 1;
/// the Hecke code also uses this type for positive-determinant matrices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

/// Elements of SL₂(Z).
pub type UnimodularMatrix = Mat2;

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({},{}),({},{}))", self.a, self.b, self.c, self.d)
    }
}

impl Mat2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(big(a), big(b), big(c), big(d))
    }

    /// Checked constructor for SL₂(Z).
    pub fn unimodular(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let m = Mat2::new(a, b, c, d);
        if m.det().is_one() {
            Ok(m)
        } else {
            Err(MmsError::InvalidInput(format!("{m:?} has determinant {}", m.det())))
        }
    }

    pub fn identity() -> Self {
        Mat2::from_i64(1, 0, 0, 1)
    }

    pub fn s() -> Self {
        Mat2::from_i64(0, -1, 1, 0)
    }

    pub fn t() -> Self {
        Mat2::from_i64(1, 1, 0, 1)
    }

    pub fn t_inv() -> Self {
        Mat2::from_i64(1, -1, 0, 1)
    }

    pub fn t_pow(k: &BigInt) -> Self {
        Mat2::new(BigInt::one(), k.clone(), BigInt::zero(), BigInt::one())
    }

    pub fn u() -> Self {
        Mat2::from_i64(1, -1, 1, 0)
    }

    pub fn u2() -> Self {
        Mat2::from_i64(0, -1, 1, -1)
    }

    /// τ = S·T.
    pub fn tau() -> Self {
        Mat2::from_i64(0, -1, 1, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    /// Adjugate; the inverse when the determinant is 1.
    pub fn adj(&self) -> Mat2 {
        Mat2 {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn inverse(&self) -> Mat2 {
        debug_assert!(self.det().is_one());
        self.adj()
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    /// Complex-conjugation twist: negate the off-diagonal entries.
    pub fn conj(&self) -> Mat2 {
        Mat2 {
            a: self.a.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.d.clone(),
        }
    }

    pub fn is_pm_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d && self.a.abs().is_one()
    }

    /// Image of ∞, as a reduced fraction `(num, den)` with `den ≥ 0`; ∞ is `(1, 0)`.
    pub fn act_infinity(&self) -> (BigInt, BigInt) {
        reduce_fraction(&self.a, &self.c)
    }

    /// Image of 0, same encoding as [`Mat2::act_infinity`].
    pub fn act_zero(&self) -> (BigInt, BigInt) {
        reduce_fraction(&self.b, &self.d)
    }
}

/// Reduced `(num, den)` with `den ≥ 0`; `(±x, 0)` becomes `(1, 0)`.
pub fn reduce_fraction(num: &BigInt, den: &BigInt) -> (BigInt, BigInt) {
    if den.is_zero() {
        return (BigInt::one(), BigInt::zero());
    }
    let g = num.gcd(den);
    let (mut n, mut d) = (num / &g, den / &g);
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    (n, d)
}

/// Extended gcd: `(g, x, y)` with `x·a + y·b = g ≥ 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// An SL₂(Z) matrix with first column `(a, c)`; requires `gcd(a, c) = 1`.
pub fn complete_first_column(a: &BigInt, c: &BigInt) -> Mat2 {
    let (g, x, y) = ext_gcd(a, c);
    assert!(g.is_one(), "column ({a}, {c}) is not primitive");
    // a·x + c·y = 1 so ((a, -y), (c, x)) has determinant 1.
    Mat2::new(a.clone(), -y, c.clone(), x)
}

/// An SL₂(Z) matrix with bottom row `(c, d)`; requires `gcd(c, d) = 1`.
pub fn complete_bottom_row(c: &BigInt, d: &BigInt) -> Mat2 {
    let (g, x, y) = ext_gcd(d, c);
    assert!(g.is_one(), "row ({c}, {d}) is not primitive");
    // x·d + y·c = 1 so ((x, -y), (c, d)) has determinant 1.
    Mat2::new(x, -y, c.clone(), d.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Gamma0,
    Gamma1,
    FullSL2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Gamma0 => "gamma0",
            Family::Gamma1 => "gamma1",
            Family::FullSL2 => "sl2",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = MmsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gamma0" | "g0" => Ok(Family::Gamma0),
            "gamma1" | "g1" => Ok(Family::Gamma1),
            "sl2" | "fullsl2" => Ok(Family::FullSL2),
            _ => Err(MmsError::InvalidSpec(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    pub family: Family,
    pub level: u64,
}

impl GroupSpec {
    pub fn new(family: Family, level: u64) -> Result<Self> {
        if level == 0 {
            return Err(MmsError::InvalidSpec("level must be positive".into()));
        }
        if family == Family::FullSL2 && level != 1 {
            return Err(MmsError::InvalidSpec("full SL2 has level 1".into()));
        }
        Ok(GroupSpec { family, level })
    }

    pub fn gamma0(n: u64) -> Result<Self> {
        Self::new(Family::Gamma0, n)
    }

    pub fn gamma1(n: u64) -> Result<Self> {
        Self::new(Family::Gamma1, n)
    }

    pub fn full() -> Self {
        GroupSpec {
            family: Family::FullSL2,
            level: 1,
        }
    }

    /// True when -1 lies in the group.
    pub fn contains_minus_one(&self) -> bool {
        match self.family {
            Family::Gamma0 | Family::FullSL2 => true,
            Family::Gamma1 => self.level <= 2,
        }
    }

    fn reduce(&self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.level)).to_u64().unwrap()
    }

    /// Membership test by congruences.
    pub fn contains(&self, g: &Mat2) -> bool {
        if !g.det().is_one() {
            return false;
        }
        let n = self.level;
        match self.family {
            Family::FullSL2 => true,
            Family::Gamma0 => self.reduce(&g.c) == 0,
            Family::Gamma1 => self.reduce(&g.c) == 0 && self.reduce(&g.a) == 1 % n && self.reduce(&g.d) == 1 % n,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Gamma0 => write!(f, "Gamma0({})", self.level),
            Family::Gamma1 => write!(f, "Gamma1({})", self.level),
            Family::FullSL2 => write!(f, "SL2(Z)"),
        }
    }
}

/// Right action generators stored in the coset table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    S,
    T,
    TInv,
    U,
    U2,
}

impl Gen {
    pub const ALL: [Gen; 5] = [Gen::S, Gen::T, Gen::TInv, Gen::U, Gen::U2];

    pub fn matrix(self) -> Mat2 {
        match self {
            Gen::S => Mat2::s(),
            Gen::T => Mat2::t(),
            Gen::TInv => Mat2::t_inv(),
            Gen::U => Mat2::u(),
            Gen::U2 => Mat2::u2(),
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// Image of a coset under right multiplication: `rep(idx)·g = sign·γ·rep(image)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetImage {
    pub index: usize,
    pub gamma: Mat2,
    pub sign: i8,
}

/// Cosets Γ̄\PSL₂(Z), indexed by normalized bottom rows mod N.
#[derive(Clone, Debug)]
pub struct CosetTable {
    pub spec: GroupSpec,
    pub reps: Vec<Mat2>,
    /// Normalized bottom row `(c, d) mod N` of each representative.
    pub classes: Vec<(u64, u64)>,
    lookup: HashMap<(u64, u64), usize>,
    unit_mult: Vec<u64>,
    actions: [Vec<CosetImage>; 5],
}

fn gcd_u(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

impl CosetTable {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, idx: usize) -> &Mat2 {
        &self.reps[idx]
    }

    fn normalize(&self, c: u64, d: u64) -> (u64, u64) {
        let n = self.spec.level;
        match self.spec.family {
            Family::FullSL2 => (0, 0),
            Family::Gamma1 => {
                let neg = ((n - c) % n, (n - d) % n);
                (c, d).min(neg)
            }
            Family::Gamma0 => self.unit_mult.iter().map(|&u| (u * c % n, u * d % n)).min().unwrap(),
        }
    }

    /// Index of the coset containing `g`, ignoring membership witnesses.
    pub fn index_of(&self, g: &Mat2) -> usize {
        let c = self.spec.reduce(&g.c);
        let d = self.spec.reduce(&g.d);
        let key = self.normalize(c, d);
        *self
            .lookup
            .get(&key)
            .unwrap_or_else(|| panic!("bottom row of {g:?} has no coset class"))
    }

    /// `g = sign·γ·rep(index)` with γ ∈ Γ. When both ±γ lie in Γ the sign is
    /// chosen so that γ has a positive bottom row.
    pub fn coset_of(&self, g: &Mat2) -> CosetImage {
        let index = self.index_of(g);
        let h = g.mul(&self.reps[index].inverse());
        let plus = self.spec.contains(&h);
        let minus_h = h.neg();
        let minus = self.spec.contains(&minus_h);
        let positive = h.d.is_positive() || (h.d.is_zero() && h.c.is_positive());
        let sign = match (plus, minus) {
            (true, true) => {
                if positive {
                    1
                } else {
                    -1
                }
            }
            (true, false) => 1,
            (false, true) => -1,
            (false, false) => panic!("{g:?} is not in the coset of its representative"),
        };
        let gamma = if sign == 1 { h } else { minus_h };
        CosetImage { index, gamma, sign }
    }

    pub fn act_right(&self, idx: usize, g: Gen) -> &CosetImage {
        &self.actions[g.slot()][idx]
    }

    pub fn act(&self, idx: usize, g: Gen) -> usize {
        self.actions[g.slot()][idx].index
    }
}

/// Units mod n (all residues coprime to n; for n = 1 just 0).
fn units(n: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|&u| gcd_u(u, n) == 1).collect()
}

/// Lifts a bottom row mod N to a primitive integer pair and completes it.
fn lift_bottom_row(c: u64, d: u64, n: u64) -> Mat2 {
    if n == 1 {
        return Mat2::identity();
    }
    let n_big = BigInt::from(n);
    let mut c = BigInt::from(c);
    let mut d = BigInt::from(d);
    if !c.gcd(&d).is_one() {
        if c.is_zero() {
            c = n_big.clone();
        }
        while !c.gcd(&d).is_one() {
            d += &n_big;
        }
    }
    complete_bottom_row(&c, &d)
}

/// Enumerates Γ̄\PSL₂(Z) with its right-action tables.
pub fn enumerate_cosets(spec: GroupSpec) -> Result<CosetTable> {
    let spec = GroupSpec::new(spec.family, spec.level)?;
    let n = spec.level;
    let mut table = CosetTable {
        spec,
        reps: Vec::new(),
        classes: Vec::new(),
        lookup: HashMap::new(),
        unit_mult: units(n),
        actions: Default::default(),
    };
    let mut classes: Vec<(u64, u64)> = Vec::new();
    if spec.family == Family::FullSL2 || n == 1 {
        classes.push((0, 0));
    } else {
        let mut seen = std::collections::BTreeSet::new();
        for c in 0..n {
            for d in 0..n {
                if gcd_u(gcd_u(c, d), n) != 1 {
                    continue;
                }
                seen.insert(table.normalize(c, d));
            }
        }
        classes.extend(seen);
    }
    for (i, &(c, d)) in classes.iter().enumerate() {
        table.lookup.insert((c, d), i);
        table.reps.push(lift_bottom_row(c, d, n));
    }
    table.classes = classes;
    for g in Gen::ALL {
        let m = g.matrix();
        let images: Vec<CosetImage> = table.reps.iter().map(|r| table.coset_of(&r.mul(&m))).collect();
        table.actions[g.slot()] = images;
    }
    check_table(&table)?;
    Ok(table)
}

fn check_table(t: &CosetTable) -> Result<()> {
    for idx in 0..t.len() {
        if t.index_of(&t.reps[idx]) != idx {
            return Err(MmsError::Internal(format!("rep {idx} not in its own class")));
        }
        for g in Gen::ALL {
            let im = t.act_right(idx, g);
            if !t.spec.contains(&im.gamma) {
                return Err(MmsError::Internal("witness not in the group".into()));
            }
            let lhs = t.reps[idx].mul(&g.matrix());
            let mut rhs = im.gamma.mul(&t.reps[im.index]);
            if im.sign < 0 {
                rhs = rhs.neg();
            }
            if lhs != rhs {
                return Err(MmsError::Internal("action witness does not reassemble".into()));
            }
        }
        // U is stored on its own; cross-check against T then S.
        let via_ts = t.act(t.act(idx, Gen::T), Gen::S);
        if via_ts != t.act(idx, Gen::U) {
            return Err(MmsError::Internal("U action disagrees with T·S".into()));
        }
        if t.act(t.act(idx, Gen::U), Gen::U) != t.act(idx, Gen::U2) {
            return Err(MmsError::Internal("U² action disagrees with U·U".into()));
        }
    }
    Ok(())
}

/// A cusp class: representative `num/den` (`den = 0` for ∞) and width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cusp {
    pub num: BigInt,
    pub den: BigInt,
    pub width: u64,
}

impl Cusp {
    pub fn is_infinity(&self) -> bool {
        self.den.is_zero()
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "1/0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Cusp classes as T-orbits on cosets.
#[derive(Clone, Debug)]
pub struct CuspTable {
    pub classes: Vec<Cusp>,
    pub d_gamma: u64,
    /// Cusp class of Γ·rep(idx)·∞.
    pub cusp_of: Vec<usize>,
    orbits: Vec<Vec<usize>>,
    /// Position of each coset inside the T-orbit of its cusp.
    position: Vec<usize>,
}

impl CuspTable {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn widths(&self) -> Vec<u64> {
        self.classes.iter().map(|c| c.width).collect()
    }

    /// Coset reached from `idx` by right multiplication with T^k.
    pub fn shift(&self, idx: usize, k: &BigInt) -> usize {
        let orbit = &self.orbits[self.cusp_of[idx]];
        let len = BigInt::from(orbit.len());
        let step = k.mod_floor(&len).to_usize().unwrap();
        orbit[(self.position[idx] + step) % orbit.len()]
    }

    /// Cosets of the orbit belonging to cusp class `c`, in T-order.
    pub fn orbit(&self, c: usize) -> &[usize] {
        &self.orbits[c]
    }

    /// Class of the cusp `num/den` (`den = 0` for ∞).
    pub fn class_of_fraction(&self, table: &CosetTable, num: &BigInt, den: &BigInt) -> usize {
        let (n, d) = reduce_fraction(num, den);
        let g = if d.is_zero() {
            Mat2::identity()
        } else {
            complete_first_column(&n, &d)
        };
        self.cusp_of[table.index_of(&g)]
    }

    /// Class of the cusp g·∞.
    pub fn class_of_matrix(&self, table: &CosetTable, g: &Mat2) -> usize {
        self.cusp_of[table.index_of(g)]
    }
}

/// Cusp classes, widths and the orbit structure of T on the coset table.
pub fn cusp_table(table: &CosetTable) -> CuspTable {
    let mu = table.len();
    let mut orbit_of = vec![usize::MAX; mu];
    let mut position = vec![0usize; mu];
    let mut raw_orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..mu {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = raw_orbits.len();
        let mut orbit = Vec::new();
        let mut cur = start;
        loop {
            orbit_of[cur] = id;
            position[cur] = orbit.len();
            orbit.push(cur);
            cur = table.act(cur, Gen::T);
            if cur == start {
                break;
            }
        }
        raw_orbits.push(orbit);
    }

    // Assign representatives: ∞ first, then by increasing denominator.
    let mut order: Vec<usize> = Vec::new();
    let mut reps: Vec<(BigInt, BigInt)> = Vec::new();
    let mut assigned = vec![false; raw_orbits.len()];
    let mut visit = |orbit: usize, num: BigInt, den: BigInt, order: &mut Vec<usize>| {
        if !assigned[orbit] {
            assigned[orbit] = true;
            order.push(orbit);
            reps.push((num, den));
        }
    };
    visit(
        orbit_of[table.index_of(&Mat2::identity())],
        BigInt::one(),
        BigInt::zero(),
        &mut order,
    );
    let mut den: u64 = 1;
    while order.len() < raw_orbits.len() {
        for num in 0..den {
            if gcd_u(num, den) != 1 {
                continue;
            }
            let g = complete_first_column(&BigInt::from(num), &BigInt::from(den));
            visit(
                orbit_of[table.index_of(&g)],
                BigInt::from(num),
                BigInt::from(den),
                &mut order,
            );
        }
        den += 1;
    }

    let mut class_of_orbit = vec![0usize; raw_orbits.len()];
    for (cls, &o) in order.iter().enumerate() {
        class_of_orbit[o] = cls;
    }
    let classes: Vec<Cusp> = order
        .iter()
        .zip(reps)
        .map(|(&o, (num, den))| Cusp {
            num,
            den,
            width: raw_orbits[o].len() as u64,
        })
        .collect();
    let orbits: Vec<Vec<usize>> = order.iter().map(|&o| raw_orbits[o].clone()).collect();
    let cusp_of = (0..mu).map(|i| class_of_orbit[orbit_of[i]]).collect();
    let d_gamma = classes.iter().fold(0u64, |g, c| gcd_u(g, c.width));
    CuspTable {
        classes,
        d_gamma,
        cusp_of,
        orbits,
        position,
    }
}

/// Counts of cosets fixed by S and by U (elliptic points of order 2 and 3).
pub fn elliptic_counts(table: &CosetTable) -> (usize, usize) {
    let nu2 = (0..table.len()).filter(|&i| table.act(i, Gen::S) == i).count();
    let nu3 = (0..table.len()).filter(|&i| table.act(i, Gen::U) == i).count();
    (nu2, nu3)
}

/// Genus of X_Γ from the index, elliptic counts and cusp count.
pub fn genus(table: &CosetTable, cusps: &CuspTable) -> Result<usize> {
    let mu = table.len() as i64;
    let (nu2, nu3) = elliptic_counts(table);
    let twelve_g = 12 + mu - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * cusps.len() as i64;
    if twelve_g < 0 || twelve_g % 12 != 0 {
        return Err(MmsError::Internal(format!("genus formula gives {twelve_g}/12")));
    }
    Ok((twelve_g / 12) as usize)
}

/// A letter of an S/T word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Letter {
    S,
    T(BigInt),
}

impl Letter {
    pub fn matrix(&self) -> Mat2 {
        match self {
            Letter::S => Mat2::s(),
            Letter::T(k) => Mat2::t_pow(k),
        }
    }
}

/// Writes `g = sign · w₁ ⋯ w_k` with letters S and T^k, by Euclid on the
/// first column.
pub fn stword_decompose(g: &Mat2) -> (i8, Vec<Letter>) {
    debug_assert!(g.det().is_one());
    let mut word = Vec::new();
    let mut m = g.clone();
    while !m.c.is_zero() {
        let q = m.a.div_floor(&m.c);
        // m = T^q · S · m'' with m'' = S⁻¹ · T^{-q} · m.
        let top_a = &m.a - &q * &m.c;
        let top_b = &m.b - &q * &m.d;
        m = Mat2::new(m.c.clone(), m.d.clone(), -top_a, -top_b);
        if !q.is_zero() {
            word.push(Letter::T(q));
        }
        word.push(Letter::S);
    }
    // m = ((a, b), (0, a)) with a = ±1, which is a·T^{ab}.
    let sign: i8 = if m.a.is_positive() { 1 } else { -1 };
    let k = &m.a * &m.b;
    if !k.is_zero() {
        word.push(Letter::T(k));
    }
    (sign, word)
}

/// Product of a word times a sign.
pub fn word_product(sign: i8, word: &[Letter]) -> Mat2 {
    let p = word.iter().fold(Mat2::identity(), |acc, l| acc.mul(&l.matrix()));
    if sign < 0 {
        p.neg()
    } else {
        p
    }
}
