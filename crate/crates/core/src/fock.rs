//! Bosonic Fock representation.
//!
//! The Weyl algebra has generators `a(n), a*(n)` with `[a(n), a*(m)] = -δ_{n+m,0}`
//! (note the sign). The vacuum is killed by `a(n), n > 0` and `a*(m), m >= 0`;
//! the Fock space is spanned by monomials in the creation operators `a(n), n <= 0`
//! and `a*(m), m < 0` applied to the vacuum.
//!
//! The quadratic operators
//!
//! ```text
//! f(m, n) = Σ_i (-i)^n :a(m - i) a*(i):
//! ```
//!
//! use the ordering `:a(p)a*(q): = a(p)a*(q)` if `p <= q`, else `a*(q)a(p)`.
//! On a monomial only finitely many `i` contribute; see [`contributing_indices`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{split_terms, write_terms, AlgebraElement, BasisSymbol, Grade};
use crate::error::{Error, ParseError, Result};
use crate::scalar::Scalar;
use crate::Mutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WeylKind {
    A,
    AStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylSymbol {
    pub kind: WeylKind,
    pub index: i64,
}

impl WeylSymbol {
    pub fn a(index: i64) -> Self {
        WeylSymbol { kind: WeylKind::A, index }
    }

    pub fn a_star(index: i64) -> Self {
        WeylSymbol { kind: WeylKind::AStar, index }
    }

    /// `a(n), n <= 0` and `a*(m), m < 0`.
    pub fn is_creation(&self) -> bool {
        match self.kind {
            WeylKind::A => self.index <= 0,
            WeylKind::AStar => self.index < 0,
        }
    }

    pub fn is_annihilation(&self) -> bool {
        !self.is_creation()
    }
}

impl fmt::Display for WeylSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WeylKind::A => write!(f, "a({})", self.index),
            WeylKind::AStar => write!(f, "a*({})", self.index),
        }
    }
}

/// A product of creation operators applied to the vacuum. Both parts are
/// kept sorted non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct FockMonomial {
    a: Vec<i64>,
    a_star: Vec<i64>,
}

impl FockMonomial {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Returns `None` if an index is not a creation index.
    pub fn new(mut a: Vec<i64>, mut a_star: Vec<i64>) -> Option<Self> {
        if a.iter().any(|&n| n > 0) || a_star.iter().any(|&m| m >= 0) {
            return None;
        }
        a.sort_unstable();
        a_star.sort_unstable();
        Some(FockMonomial { a, a_star })
    }

    pub fn a_part(&self) -> &[i64] {
        &self.a
    }

    pub fn a_star_part(&self) -> &[i64] {
        &self.a_star
    }

    pub fn degree(&self) -> usize {
        self.a.len() + self.a_star.len()
    }

    /// Number of `a` factors minus number of `a*` factors.
    pub fn t_degree(&self) -> i64 {
        self.a.len() as i64 - self.a_star.len() as i64
    }

    fn with_inserted(&self, sym: WeylSymbol) -> FockMonomial {
        let mut out = self.clone();
        let part = match sym.kind {
            WeylKind::A => &mut out.a,
            WeylKind::AStar => &mut out.a_star,
        };
        let pos = part.partition_point(|&x| x <= sym.index);
        part.insert(pos, sym.index);
        out
    }

    /// Removes one factor with the given index, reporting its multiplicity
    /// before removal.
    fn with_removed(&self, kind: WeylKind, index: i64) -> Option<(FockMonomial, i64)> {
        let part = match kind {
            WeylKind::A => &self.a,
            WeylKind::AStar => &self.a_star,
        };
        let lo = part.partition_point(|&x| x < index);
        let hi = part.partition_point(|&x| x <= index);
        if lo == hi {
            return None;
        }
        let mut out = self.clone();
        match kind {
            WeylKind::A => out.a.remove(lo),
            WeylKind::AStar => out.a_star.remove(lo),
        };
        Some((out, (hi - lo) as i64))
    }

    /// All monomials of degree `<= max_degree` whose factor indices are `>= -depth`.
    pub fn enumerate(depth: i64, max_degree: usize) -> Vec<FockMonomial> {
        let symbols: Vec<WeylSymbol> = (-depth..=0)
            .map(WeylSymbol::a)
            .chain((-depth..0).map(WeylSymbol::a_star))
            .collect();
        let mut out = vec![FockMonomial::vacuum()];
        let mut frontier: Vec<(usize, FockMonomial)> = vec![(0, FockMonomial::vacuum())];
        for _ in 0..max_degree {
            let mut next = Vec::new();
            for (start, mono) in &frontier {
                for (k, sym) in symbols.iter().enumerate().skip(*start) {
                    let grown = mono.with_inserted(*sym);
                    out.push(grown.clone());
                    next.push((k, grown));
                }
            }
            frontier = next;
        }
        out.sort();
        out
    }
}

impl fmt::Display for FockMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for n in &self.a {
            write!(f, "a({})", n)?;
        }
        f.write_str("|")?;
        for m in &self.a_star {
            write!(f, "a*({})", m)?;
        }
        f.write_str("]")
    }
}

impl FromStr for FockMonomial {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = || ParseError::Fock(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let (left, right) = inner.split_once('|').ok_or_else(bad)?;
        let read = |part: &str, prefix: &str| -> std::result::Result<Vec<i64>, ParseError> {
            let mut rest = part.trim();
            let mut out = Vec::new();
            while !rest.is_empty() {
                let body = rest.strip_prefix(prefix).ok_or_else(bad)?;
                let close = body.find(')').ok_or_else(bad)?;
                out.push(body[..close].trim().parse().map_err(|_| bad())?);
                rest = body[close + 1..].trim_start();
            }
            Ok(out)
        };
        FockMonomial::new(read(left, "a(")?, read(right, "a*(")?).ok_or_else(bad)
    }
}

/// A finite rational combination of Fock monomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FockVector {
    terms: BTreeMap<FockMonomial, Scalar>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::from(FockMonomial::vacuum())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &FockMonomial) -> Scalar {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, mono: FockMonomial, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector, by: &Scalar) {
        if by.is_zero() {
            return;
        }
        for (mono, c) in &other.terms {
            self.add_term(mono.clone(), &(c * by));
        }
    }

    pub fn scaled(&self, by: &Scalar) -> FockVector {
        let mut out = FockVector::zero();
        out.add_scaled(self, by);
        out
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.values().all(|c| !c.is_zero() && c.is_canonical())
            && self.terms.keys().all(|m| {
                m.a.windows(2).all(|w| w[0] <= w[1])
                    && m.a_star.windows(2).all(|w| w[0] <= w[1])
                    && m.a.iter().all(|&n| n <= 0)
                    && m.a_star.iter().all(|&n| n < 0)
            })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let records: Vec<FockRecord> = self
            .terms
            .iter()
            .map(|(m, c)| FockRecord {
                a: m.a.clone(),
                a_star: m.a_star.clone(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect();
        serde_json::to_value(records).expect("fock records serialize")
    }

    pub fn from_json(value: &serde_json::Value) -> std::result::Result<Self, ParseError> {
        let bad = || ParseError::Fock(value.to_string());
        let records: Vec<FockRecord> = serde_json::from_value(value.clone()).map_err(|_| bad())?;
        let mut out = FockVector::zero();
        for r in records {
            let mono = FockMonomial::new(r.a, r.a_star).ok_or_else(bad)?;
            let coeff: Scalar = format!("{}/{}", r.num, r.den).parse()?;
            out.add_term(mono, &coeff);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct FockRecord {
    a: Vec<i64>,
    a_star: Vec<i64>,
    num: String,
    den: String,
}

impl From<FockMonomial> for FockVector {
    fn from(mono: FockMonomial) -> Self {
        let mut out = FockVector::zero();
        out.add_term(mono, &Scalar::one());
        out
    }
}

impl std::ops::Sub for &FockVector {
    type Output = FockVector;
    fn sub(self, rhs: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::one());
        out
    }
}

/// `3/2*[a(-2)a(-1)|a*(-1)] + 1*[|]`; the zero vector prints as `0`.
impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter().map(|(m, c)| (c, m.to_string())))
    }
}

impl FromStr for FockVector {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = || ParseError::Fock(s.to_string());
        if s.trim() == "0" {
            return Ok(FockVector::zero());
        }
        let mut out = FockVector::zero();
        for (negative, piece) in split_terms(s).ok_or_else(bad)? {
            let (coeff, mono) = piece.split_once('*').ok_or_else(bad)?;
            let mut coeff: Scalar = coeff.parse()?;
            if negative {
                coeff = -coeff;
            }
            out.add_term(mono.parse()?, &coeff);
        }
        Ok(out)
    }
}

fn apply_generator_to(g: WeylSymbol, mono: &FockMonomial, coeff: &Scalar, out: &mut FockVector) {
    if g.is_creation() {
        out.add_term(mono.with_inserted(g), coeff);
        return;
    }
    // An annihilator moves right through the creation factors; only the
    // contractions survive since it kills the vacuum.
    // a(n) a*(m) = a*(m) a(n) - δ_{n+m,0};  a*(m) a(n) = a(n) a*(m) + δ_{n+m,0}.
    let (partner, sign) = match g.kind {
        WeylKind::A => (WeylKind::AStar, -1),
        WeylKind::AStar => (WeylKind::A, 1),
    };
    if let Some((rest, mult)) = mono.with_removed(partner, -g.index) {
        out.add_term(rest, &(coeff * &Scalar::from_int(sign * mult)));
    }
}

pub fn apply_generator(g: WeylSymbol, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (mono, c) in v.terms() {
        apply_generator_to(g, mono, c, &mut out);
    }
    out
}

/// The summation indices `i` for which `:a(m-i)a*(i):` can act nonzero on `mono`.
///
/// Outside `[min(m,0), max(m,0)]` exactly one of the two factors is a
/// creator and the normal order puts the annihilator rightmost, so it must
/// contract with an existing factor:
/// - `i >= max(m,0)`: `a*(i)` contracts an `a(-i)` factor, so `i = -n` for `n` in the `a`-part;
/// - `i < min(m,0)`: `a(m-i)` contracts an `a*(i-m)` factor, so `i = m + k` for `k` in the `a*`-part.
pub fn contributing_indices(m: i64, mono: &FockMonomial) -> BTreeSet<i64> {
    let mut out: BTreeSet<i64> = (m.min(0)..=m.max(0)).collect();
    out.extend(mono.a.iter().map(|&n| -n));
    out.extend(mono.a_star.iter().map(|&k| m + k));
    out
}

/// `:a(m-i)a*(i):` applied to a single monomial.
pub fn apply_normal_ordered_pair(m: i64, i: i64, mono: &FockMonomial, coeff: &Scalar, out: &mut FockVector) {
    let (p, q) = (m - i, i);
    let first_q = p <= q;
    let (inner, outer) = if first_q {
        (WeylSymbol::a_star(q), WeylSymbol::a(p))
    } else {
        (WeylSymbol::a(p), WeylSymbol::a_star(q))
    };
    let mut tmp = FockVector::zero();
    apply_generator_to(inner, mono, coeff, &mut tmp);
    for (mid, c) in tmp.terms() {
        apply_generator_to(outer, mid, c, out);
    }
}

/// `(-i)^n` with `0^0 = 1`.
fn weight(i: i64, n: u32) -> Scalar {
    Scalar::from_int(-i).pow(n)
}

/// `f(m, n) v`.
pub fn apply_f(m: i64, n: u32, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (mono, c) in v.terms() {
        for i in contributing_indices(m, mono) {
            let w = weight(i, n);
            if w.is_zero() {
                continue;
            }
            apply_normal_ordered_pair(m, i, mono, &(c * &w), &mut out);
        }
    }
    out
}

/// The anomaly of `[f(m1, n1), f(m2, n2)]`.
///
/// For `m1 > 0` this is `(-1)^{n1+1} Σ_{i=1}^{m1} (m1-i)^{n1} i^{n2}`. For
/// `m1 < 0` the sum runs over `i = m1+1 ..= 0`, which is what antisymmetry
/// `phi(x, y) = -phi(y, x)` forces; it coincides with the range `m1 ..= -1`
/// of [`phi_as_printed`] whenever `n1, n2 >= 1`.
pub fn phi(m1: i64, n1: u32, m2: i64, n2: u32) -> Scalar {
    if m1 == 0 || m1 + m2 != 0 {
        return Scalar::zero();
    }
    let term = |i: i64| Scalar::from_int(m1 - i).pow(n1) * Scalar::from_int(i).pow(n2);
    if m1 > 0 {
        let s: Scalar = (1..=m1).map(term).sum();
        if n1 % 2 == 0 { -s } else { s }
    } else {
        let s: Scalar = (m1 + 1..=0).map(term).sum();
        if n1 % 2 == 0 { s } else { -s }
    }
}

/// The piecewise formula with the `m1 < 0` branch summed over `m1 ..= -1`.
/// Kept for the discrepancy report; it breaks antisymmetry when `n1 = 0` or
/// `n2 = 0`.
pub fn phi_as_printed(m1: i64, n1: u32, m2: i64, n2: u32) -> Scalar {
    if m1 >= 0 || m1 + m2 != 0 {
        return phi(m1, n1, m2, n2);
    }
    let s: Scalar = (m1..=-1)
        .map(|i| Scalar::from_int(m1 - i).pow(n1) * Scalar::from_int(i).pow(n2))
        .sum();
    if n1 % 2 == 0 { s } else { -s }
}

fn binomial(n: u32, k: u32) -> Scalar {
    (0..k).fold(Scalar::one(), |acc, j| {
        acc * Scalar::from_int((n - j) as i64) / Scalar::from_int((j + 1) as i64)
    })
}

/// Right-hand side of the `[f(m1,n1), f(m2,n2)]` commutator formula applied to `v`.
pub fn commutator_formula(m1: i64, n1: u32, m2: i64, n2: u32, v: &FockVector, mutation: Mutation) -> FockVector {
    let mut out = FockVector::zero();
    let m = m1 + m2;
    for i in 0..=n1 {
        let c = binomial(n1, i) * Scalar::from_int(m2).pow(i);
        out.add_scaled(&apply_f(m, n1 + n2 - i, v), &c);
    }
    for j in 0..=n2 {
        let c = binomial(n2, j) * Scalar::from_int(m1).pow(j);
        out.add_scaled(&apply_f(m, n1 + n2 - j, v), &-c);
    }
    let mut anomaly = phi(m1, n1, m2, n2);
    if mutation.is_active() {
        anomaly = -anomaly;
    }
    out.add_scaled(v, &anomaly);
    out
}

/// `(f(m1,n1) f(m2,n2) - f(m2,n2) f(m1,n1)) v` minus the commutator formula.
pub fn commutator_residual_f(m1: i64, n1: u32, m2: i64, n2: u32, v: &FockVector) -> FockVector {
    commutator_residual_f_with(m1, n1, m2, n2, v, Mutation::None)
}

pub fn commutator_residual_f_with(
    m1: i64,
    n1: u32,
    m2: i64,
    n2: u32,
    v: &FockVector,
    mutation: Mutation,
) -> FockVector {
    let lhs = &apply_f(m1, n1, &apply_f(m2, n2, v)) - &apply_f(m2, n2, &apply_f(m1, n1, v));
    &lhs - &commutator_formula(m1, n1, m2, n2, v, mutation)
}

/// Scalars by which `C_L, C_I, C_LI` act.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralCharges {
    pub c_l: Scalar,
    pub c_i: Scalar,
    pub c_li: Scalar,
}

impl CentralCharges {
    /// The values in the assignment of `pi`: `C_L -> 2, C_LI -> 1/2, C_I -> 1`.
    pub fn assigned() -> Self {
        CentralCharges {
            c_l: Scalar::from_int(2),
            c_i: Scalar::one(),
            c_li: Scalar::new(1, 2),
        }
    }

    /// The triple written in the theorem statement: `C_I = 2, C_LI = 1/2, C_L = 1`.
    pub fn as_stated() -> Self {
        CentralCharges {
            c_l: Scalar::one(),
            c_i: Scalar::from_int(2),
            c_li: Scalar::new(1, 2),
        }
    }
}

impl fmt::Display for CentralCharges {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C_L={}, C_I={}, C_LI={}", self.c_l, self.c_i, self.c_li)
    }
}

/// `pi(x) v` with `L(m) -> f(m,1)`, `I(m) -> f(m,0)` and the assigned central charges.
pub fn pi_apply(x: &AlgebraElement, v: &FockVector) -> FockVector {
    pi_apply_with(x, v, &CentralCharges::assigned())
}

pub fn pi_apply_with(x: &AlgebraElement, v: &FockVector, charges: &CentralCharges) -> FockVector {
    let mut out = FockVector::zero();
    for (sym, c) in x.terms() {
        match *sym {
            BasisSymbol::L(m) => out.add_scaled(&apply_f(m, 1, v), c),
            BasisSymbol::I(m) => out.add_scaled(&apply_f(m, 0, v), c),
            BasisSymbol::CL => out.add_scaled(v, &(c * &charges.c_l)),
            BasisSymbol::CI => out.add_scaled(v, &(c * &charges.c_i)),
            BasisSymbol::CLI => out.add_scaled(v, &(c * &charges.c_li)),
        }
    }
    out
}

pub fn t_degree(v: &FockVector) -> Result<Grade> {
    let mut degrees = v.terms.keys().map(FockMonomial::t_degree);
    let first = degrees.next().ok_or(Error::ZeroVector)?;
    if degrees.all(|d| d == first) {
        Ok(Grade::Homogeneous(first))
    } else {
        Ok(Grade::Mixed)
    }
}

/// Reads the central charges off the vacuum.
///
/// With the non-central parts of the brackets removed, `[pi(L(2)), pi(L(-2))]`,
/// `[pi(I(1)), pi(I(-1))]` and `[pi(L(2)), pi(I(-2))]` act on the vacuum by
/// `C_L/2`, `-C_I` and `2 C_LI` respectively.
pub fn central_charges_from_vacuum() -> CentralCharges {
    let v0 = FockVector::vacuum();
    let comm = |x: BasisSymbol, y: BasisSymbol| {
        let (x, y) = (AlgebraElement::from(x), AlgebraElement::from(y));
        &pi_apply_with(&x, &pi_apply_with(&y, &v0, &CentralCharges::assigned()), &CentralCharges::assigned())
            - &pi_apply_with(&y, &pi_apply_with(&x, &v0, &CentralCharges::assigned()), &CentralCharges::assigned())
    };
    let zero = CentralCharges {
        c_l: Scalar::zero(),
        c_i: Scalar::zero(),
        c_li: Scalar::zero(),
    };
    let noncentral = |x: BasisSymbol, y: BasisSymbol| {
        let br = crate::algebra::bracket(&x.into(), &y.into());
        pi_apply_with(&br, &v0, &zero)
    };
    let read = |x: BasisSymbol, y: BasisSymbol| {
        let anomaly = &comm(x, y) - &noncentral(x, y);
        anomaly.coeff(&FockMonomial::vacuum())
    };
    CentralCharges {
        c_l: read(BasisSymbol::L(2), BasisSymbol::L(-2)) * Scalar::from_int(2),
        c_i: -read(BasisSymbol::I(1), BasisSymbol::I(-1)),
        c_li: read(BasisSymbol::L(2), BasisSymbol::I(-2)) / Scalar::from_int(2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qr};

    fn fv(s: &str) -> FockVector {
        s.parse().unwrap()
    }

    /// Direct scan over a wide window of summation indices; independent of
    /// the contraction bookkeeping in `contributing_indices`.
    fn apply_f_scan(m: i64, n: u32, v: &FockVector, radius: i64) -> FockVector {
        let mut out = FockVector::zero();
        for (mono, c) in v.terms() {
            for i in -radius..=radius {
                apply_normal_ordered_pair(m, i, mono, &(c * &weight(i, n)), &mut out);
            }
        }
        out
    }

    #[test]
    fn generator_examples() {
        let v0 = FockVector::vacuum();
        assert!(apply_generator(WeylSymbol::a(1), &v0).is_zero());
        assert_eq!(apply_generator(WeylSymbol::a(1), &fv("1*[|a*(-1)]")), fv("-1*[|]"));
        assert_eq!(apply_generator(WeylSymbol::a_star(-2), &v0), fv("1*[|a*(-2)]"));
        assert!(apply_generator(WeylSymbol::a_star(0), &fv("1*[a(-1)|]")).is_zero());
        assert_eq!(apply_generator(WeylSymbol::a_star(0), &fv("1*[a(0)|]")), fv("1*[|]"));
        assert_eq!(apply_generator(WeylSymbol::a_star(1), &fv("1*[a(-1)a(-1)|]")), fv("2*[a(-1)|]"));
    }

    #[test]
    fn creation_sets() {
        assert!(WeylSymbol::a(0).is_creation());
        assert!(WeylSymbol::a_star(0).is_annihilation());
        assert!(WeylSymbol::a(1).is_annihilation());
        assert!(WeylSymbol::a_star(-1).is_creation());
        assert!(FockMonomial::new(vec![1], vec![]).is_none());
        assert!(FockMonomial::new(vec![], vec![0]).is_none());
    }

    #[test]
    fn apply_f_examples() {
        let v0 = FockVector::vacuum();
        assert!(apply_f(0, 0, &v0).is_zero());
        assert_eq!(apply_f(0, 0, &fv("1*[a(-1)|]")), fv("1*[a(-1)|]"));
        assert!(apply_f(3, 1, &v0).is_zero());
        assert_eq!(apply_f(0, 0, &fv("1*[|a*(-2)]")), fv("-1*[|a*(-2)]"));
    }

    #[test]
    fn f_on_vacuum_with_negative_mode() {
        // f(-2, 1) v0 = Σ_{i=-2}^{-1} (-i) a(-2-i) a*(i) v0
        assert_eq!(apply_f(-2, 1, &FockVector::vacuum()), fv("2*[a(0)|a*(-2)] + 1*[a(-1)|a*(-1)]"));
    }

    #[test]
    fn contributing_indices_match_full_scan() {
        let monos = FockMonomial::enumerate(3, 3);
        for m in -5..=5 {
            for n in 0..=2 {
                for mono in &monos {
                    let v = FockVector::from(mono.clone());
                    assert_eq!(apply_f(m, n, &v), apply_f_scan(m, n, &v, 20), "m={m} n={n} {mono}");
                }
            }
        }
    }

    #[test]
    fn normal_ordering_identity() {
        // a(n)a*(m) = :a(n)a*(m): - δ_{n+m,0} θ(n-m)
        let theta = |k: i64| if k > 0 { 1 } else { 0 };
        for mono in FockMonomial::enumerate(2, 2) {
            let w = FockVector::from(mono);
            for n in -3..=3 {
                for m in -3..=3 {
                    let plain = apply_generator(WeylSymbol::a(n), &apply_generator(WeylSymbol::a_star(m), &w));
                    let mut normal = FockVector::zero();
                    for (mono, c) in w.terms() {
                        apply_normal_ordered_pair(n + m, m, mono, c, &mut normal);
                    }
                    let delta = if n + m == 0 { theta(n - m) } else { 0 };
                    normal.add_scaled(&w, &q(-delta));
                    assert_eq!(plain, normal, "n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0, 1, 5, 1), q(0));
        assert_eq!(phi(2, 1, -2, 1), q(1));
        assert_eq!(phi(3, 1, -3, 0), q(3));
        assert_eq!(phi(1, 0, -1, 0), q(-1));
        assert_eq!(phi(2, 1, -3, 1), q(0));
    }

    #[test]
    fn phi_closed_forms() {
        for m in 1..=10 {
            let s = q(m);
            assert_eq!(phi(m, 1, -m, 1), (&s.pow(3) - &s) / q(6));
            assert_eq!(phi(m, 1, -m, 0), &s * &(&s - &q(1)) / q(2));
            assert_eq!(phi(m, 0, -m, 0), -s);
        }
    }

    #[test]
    fn phi_is_antisymmetric() {
        for m in -6..=6 {
            for n1 in 0..=3 {
                for n2 in 0..=3 {
                    assert_eq!(phi(m, n1, -m, n2), -phi(-m, n2, m, n1), "m={m} n1={n1} n2={n2}");
                }
            }
        }
    }

    #[test]
    fn printed_negative_branch_disagrees_with_operators() {
        // vacuum expectation of [f(-2,1), f(2,0)] is 3; the printed branch gives 1
        assert_eq!(phi_as_printed(-2, 1, 2, 0), q(1));
        assert_eq!(phi(-2, 1, 2, 0), q(3));
        let r = commutator_residual_f(-2, 1, 2, 0, &FockVector::vacuum());
        assert!(r.is_zero(), "{r}");
        assert_eq!(phi_as_printed(-3, 1, 3, 1), phi(-3, 1, 3, 1));
    }

    #[test]
    fn commutator_examples() {
        assert!(commutator_residual_f(1, 1, -1, 1, &FockVector::vacuum()).is_zero());
        assert!(commutator_residual_f(2, 1, -2, 1, &fv("1*[a(-1)|]")).is_zero());
        assert!(commutator_residual_f(2, 0, -2, 0, &fv("1*[|a*(-1)]")).is_zero());
        assert!(!commutator_residual_f_with(2, 0, -2, 0, &fv("1*[|a*(-1)]"), Mutation::SignFlip).is_zero());
    }

    #[test]
    fn pi_examples() {
        let w = fv("3*[a(-1)|a*(-2)] - 1/3*[|]");
        assert_eq!(pi_apply(&BasisSymbol::CL.into(), &w), w.scaled(&q(2)));
        assert_eq!(pi_apply(&BasisSymbol::CLI.into(), &w), w.scaled(&qr(1, 2)));
        let v = fv("1*[a(-2)a(-1)|]");
        assert_eq!(pi_apply(&BasisSymbol::I(0).into(), &v), v.scaled(&q(2)));
        // f(0,1) a(-1) v0: the only contribution is i = 1 with weight -1,
        // a(-1) a*(1) a(-1) v0 = a(-1) v0.
        assert_eq!(pi_apply(&BasisSymbol::L(0).into(), &fv("1*[a(-1)|]")), fv("-1*[a(-1)|]"));
    }

    #[test]
    fn central_charges_read_from_vacuum() {
        assert_eq!(central_charges_from_vacuum(), CentralCharges::assigned());
    }

    #[test]
    fn t_degree_examples() {
        assert_eq!(t_degree(&FockVector::vacuum()).unwrap(), Grade::Homogeneous(0));
        assert_eq!(t_degree(&fv("1*[a(-1)a(-3)|a*(-2)]")).unwrap(), Grade::Homogeneous(1));
        assert_eq!(t_degree(&fv("1*[a(-1)|] + 1*[|a*(-1)]")).unwrap(), Grade::Mixed);
        assert_eq!(t_degree(&FockVector::zero()), Err(Error::ZeroVector));
    }

    #[test]
    fn text_and_json_forms() {
        let v = fv("3/2*[a(-1)a(-2)|a*(-1)] + 1*[|]");
        assert_eq!(v.to_string(), "1*[|] + 3/2*[a(-2)a(-1)|a*(-1)]");
        assert_eq!(v.to_string().parse::<FockVector>().unwrap(), v);
        assert_eq!(FockVector::from_json(&v.to_json()).unwrap(), v);
        assert!("1*[a(1)|]".parse::<FockVector>().is_err());
        assert!("1*[|a*(0)]".parse::<FockVector>().is_err());
        assert!("1*[a(-1)]".parse::<FockVector>().is_err());
    }

    #[test]
    fn enumerate_counts_multisets() {
        // 9 creation symbols with indices >= -4; multisets of size <= 3
        assert_eq!(FockMonomial::enumerate(4, 3).len(), 1 + 9 + 45 + 165);
    }
}
