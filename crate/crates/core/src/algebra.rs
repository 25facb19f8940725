//! The twisted Heisenberg-Virasoro algebra over the rationals.
//!
//! Basis `L(m), I(m)` for `m` in the integers plus the central elements
//! `C_L, C_I, C_LI`. The bracket is
//!
//! ```text
//! [L(m), L(n)] = (n - m) L(m+n) + δ_{m+n,0} (m^3 - m)/12 C_L
//! [I(m), I(n)] = n δ_{m+n,0} C_I
//! [L(m), I(n)] = n I(m+n) + δ_{m+n,0} (m^2 - m) C_LI
//! ```
//!
//! with the central elements commuting with everything.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::scalar::Scalar;
use crate::Mutation;

/// A basis vector. The derived order (tag, then index) is the canonical
/// term order of [`AlgebraElement`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisSymbol {
    L(i64),
    I(i64),
    CL,
    CI,
    CLI,
}

impl BasisSymbol {
    pub fn tag(&self) -> &'static str {
        match self {
            BasisSymbol::L(_) => "L",
            BasisSymbol::I(_) => "I",
            BasisSymbol::CL => "CL",
            BasisSymbol::CI => "CI",
            BasisSymbol::CLI => "CLI",
        }
    }

    pub fn index(&self) -> Option<i64> {
        match *self {
            BasisSymbol::L(m) | BasisSymbol::I(m) => Some(m),
            _ => None,
        }
    }

    /// Degree in the Z-grading; central symbols sit in degree 0.
    pub fn degree(&self) -> i64 {
        self.index().unwrap_or(0)
    }

    pub fn is_central(&self) -> bool {
        self.index().is_none()
    }

    pub fn from_parts(tag: &str, index: Option<i64>) -> Option<Self> {
        match (tag, index) {
            ("L", Some(m)) => Some(BasisSymbol::L(m)),
            ("I", Some(m)) => Some(BasisSymbol::I(m)),
            ("CL", None) => Some(BasisSymbol::CL),
            ("CI", None) => Some(BasisSymbol::CI),
            ("CLI", None) => Some(BasisSymbol::CLI),
            _ => None,
        }
    }

    /// All symbols with `|index| <= bound`, central symbols last.
    pub fn all_up_to(bound: i64) -> Vec<BasisSymbol> {
        let mut out: Vec<_> = (-bound..=bound).map(BasisSymbol::L).collect();
        out.extend((-bound..=bound).map(BasisSymbol::I));
        out.extend([BasisSymbol::CL, BasisSymbol::CI, BasisSymbol::CLI]);
        out
    }
}

impl fmt::Display for BasisSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index() {
            Some(m) => write!(f, "{}({})", self.tag(), m),
            None => f.write_str(self.tag()),
        }
    }
}

impl FromStr for BasisSymbol {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParseError::Symbol(s.to_string());
        if let Some(open) = s.find('(') {
            let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
            let index: i64 = inner.trim().parse().map_err(|_| bad())?;
            BasisSymbol::from_parts(&s[..open], Some(index)).ok_or_else(bad)
        } else {
            BasisSymbol::from_parts(s, None).ok_or_else(bad)
        }
    }
}

/// A finite rational combination of basis symbols. Zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<BasisSymbol, Scalar>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(sym: BasisSymbol) -> Self {
        Self::term(sym, Scalar::one())
    }

    pub fn term(sym: BasisSymbol, coeff: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(sym, &coeff);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, sym: &BasisSymbol) -> Scalar {
        self.terms.get(sym).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisSymbol, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, sym: BasisSymbol, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(sym).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&sym);
        }
    }

    pub fn add_scaled(&mut self, other: &AlgebraElement, by: &Scalar) {
        if by.is_zero() {
            return;
        }
        for (sym, c) in &other.terms {
            self.add_term(*sym, &(c * by));
        }
    }

    pub fn scaled(&self, by: &Scalar) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        out.add_scaled(self, by);
        out
    }

    /// No stored zeros and every coefficient in lowest terms.
    pub fn is_canonical(&self) -> bool {
        self.terms.values().all(|c| !c.is_zero() && c.is_canonical())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(sym, c)| TermRecord {
                tag: sym.tag().to_string(),
                index: sym.index(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect();
        serde_json::to_value(records).expect("term records serialize")
    }

    pub fn from_json(value: &serde_json::Value) -> std::result::Result<Self, ParseError> {
        let bad = || ParseError::Element(value.to_string());
        let records: Vec<TermRecord> =
            serde_json::from_value(value.clone()).map_err(|_| bad())?;
        let mut out = AlgebraElement::zero();
        for r in records {
            let sym = BasisSymbol::from_parts(&r.tag, r.index).ok_or_else(bad)?;
            let coeff: Scalar = format!("{}/{}", r.num, r.den).parse()?;
            out.add_term(sym, &coeff);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<i64>,
    num: String,
    den: String,
}

impl From<BasisSymbol> for AlgebraElement {
    fn from(sym: BasisSymbol) -> Self {
        AlgebraElement::basis(sym)
    }
}

impl std::ops::Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

impl std::ops::Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::one());
        out
    }
}

/// `-4*L(0) + 1/2*CL`; the zero element prints as `0`.
impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter().map(|(s, c)| (c, s.to_string())))
    }
}

pub(crate) fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a Scalar, String)>,
) -> fmt::Result {
    let mut first = true;
    for (c, body) in terms {
        if first {
            write!(f, "{}*{}", c, body)?;
            first = false;
        } else if c < &Scalar::zero() {
            write!(f, " - {}*{}", c.abs(), body)?;
        } else {
            write!(f, " + {}*{}", c, body)?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Splits `t1 + t2 - t3` into signed `coeff*body` pieces. Signs inside
/// parentheses or brackets, or directly after `*`, `/` or another sign, are
/// part of a coefficient or index.
pub(crate) fn split_terms(s: &str) -> Option<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut negative = false;
    let mut current = String::new();
    for ch in s.trim().chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        let separator = matches!(ch, '+' | '-') && depth == 0 && {
            let prev = current.trim_end();
            !prev.is_empty() && !prev.ends_with(['*', '/', '+', '-'])
        };
        if separator {
            out.push((negative, current.trim().to_string()));
            current.clear();
            negative = ch == '-';
        } else {
            current.push(ch);
        }
    }
    if depth != 0 || current.trim().is_empty() {
        return None;
    }
    out.push((negative, current.trim().to_string()));
    Some(out)
}

impl FromStr for AlgebraElement {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = || ParseError::Element(s.to_string());
        if s.trim() == "0" {
            return Ok(AlgebraElement::zero());
        }
        let mut out = AlgebraElement::zero();
        for (negative, piece) in split_terms(s).ok_or_else(bad)? {
            let (coeff, sym) = piece.split_once('*').ok_or_else(bad)?;
            let mut coeff: Scalar = coeff.parse()?;
            if negative {
                coeff = -coeff;
            }
            let sym: BasisSymbol = sym.parse()?;
            out.add_term(sym, &coeff);
        }
        Ok(out)
    }
}

/// Grade of a nonzero element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Grade {
    Homogeneous(i64),
    Mixed,
}

pub fn grade(x: &AlgebraElement) -> Result<Grade> {
    let mut degrees = x.terms.keys().map(BasisSymbol::degree);
    let first = degrees.next().ok_or(Error::ZeroElement)?;
    if degrees.all(|d| d == first) {
        Ok(Grade::Homogeneous(first))
    } else {
        Ok(Grade::Mixed)
    }
}

/// `[x, y]` on basis symbols.
pub fn bracket_basis(x: BasisSymbol, y: BasisSymbol, mutation: Mutation) -> AlgebraElement {
    use BasisSymbol::*;
    match (x, y) {
        (L(m), L(n)) if m <= n => {
            let mut out = AlgebraElement::term(L(m + n), Scalar::from_int(n - m));
            if m + n == 0 {
                let m = Scalar::from_int(m);
                out.add_term(CL, &(&(&m.pow(3) - &m) / &Scalar::from_int(12)));
            }
            out
        }
        (I(m), I(n)) if m <= n => {
            if m + n == 0 {
                AlgebraElement::term(CI, Scalar::from_int(n))
            } else {
                AlgebraElement::zero()
            }
        }
        (L(m), I(n)) => {
            let mut out = AlgebraElement::term(I(m + n), Scalar::from_int(n));
            if m + n == 0 {
                let m = Scalar::from_int(m);
                out.add_term(CLI, &(&m.pow(2) - &m));
            }
            if mutation.is_active() {
                out = out.scaled(&-Scalar::one());
            }
            out
        }
        (L(_), L(_)) | (I(_), I(_)) | (I(_), L(_)) => {
            bracket_basis(y, x, mutation).scaled(&-Scalar::one())
        }
        _ => AlgebraElement::zero(),
    }
}

/// Bilinear extension of [`bracket_basis`].
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    bracket_with(x, y, Mutation::None)
}

pub fn bracket_with(x: &AlgebraElement, y: &AlgebraElement, mutation: Mutation) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for (sx, cx) in x.terms() {
        for (sy, cy) in y.terms() {
            out.add_scaled(&bracket_basis(*sx, *sy, mutation), &(cx * cy));
        }
    }
    out
}

/// `[x,[y,z]] + [y,[z,x]] + [z,[x,y]]`.
pub fn jacobi_residual(x: BasisSymbol, y: BasisSymbol, z: BasisSymbol) -> AlgebraElement {
    jacobi_residual_with(x, y, z, Mutation::None)
}

pub fn jacobi_residual_with(
    x: BasisSymbol,
    y: BasisSymbol,
    z: BasisSymbol,
    mutation: Mutation,
) -> AlgebraElement {
    let br = |a: &AlgebraElement, b: &AlgebraElement| bracket_with(a, b, mutation);
    let (x, y, z) = (x.into(), y.into(), z.into());
    let mut out = br(&x, &br(&y, &z));
    out.add_scaled(&br(&y, &br(&z, &x)), &Scalar::one());
    out.add_scaled(&br(&z, &br(&x, &y)), &Scalar::one());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qr};
    use BasisSymbol::*;

    fn el(s: &str) -> AlgebraElement {
        s.parse().unwrap()
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(bracket(&L(2).into(), &L(3).into()), el("1*L(5)"));
        assert_eq!(bracket(&L(2).into(), &L(-2).into()), el("-4*L(0) + 1/2*CL"));
        assert_eq!(bracket(&I(5).into(), &I(-5).into()), el("-5*CI"));
        assert_eq!(bracket(&L(3).into(), &I(-3).into()), el("-3*I(0) + 6*CLI"));
        assert!(bracket(&CL.into(), &L(7).into()).is_zero());
    }

    #[test]
    fn reversed_pair_is_negated() {
        assert_eq!(bracket(&I(-3).into(), &L(3).into()), el("3*I(0) - 6*CLI"));
        assert_eq!(bracket(&L(-2).into(), &L(2).into()), el("4*L(0) - 1/2*CL"));
    }

    #[test]
    fn jacobi_examples() {
        assert!(jacobi_residual(L(1), L(-1), L(0)).is_zero());
        assert!(jacobi_residual(L(2), L(-1), I(-1)).is_zero());
        assert!(jacobi_residual(L(1), I(2), I(-3)).is_zero());
    }

    #[test]
    fn mutated_bracket_breaks_jacobi() {
        let r = jacobi_residual_with(L(1), L(2), I(-1), Mutation::SignFlip);
        assert!(!r.is_zero());
    }

    #[test]
    fn grade_examples() {
        assert_eq!(grade(&el("1*L(3) + 2*I(3)")).unwrap(), Grade::Homogeneous(3));
        assert_eq!(grade(&el("1*CL")).unwrap(), Grade::Homogeneous(0));
        assert_eq!(grade(&el("1*L(1) + 1*I(2)")).unwrap(), Grade::Mixed);
        assert_eq!(grade(&AlgebraElement::zero()), Err(Error::ZeroElement));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut x = AlgebraElement::term(L(1), q(2));
        x.add_term(L(1), &q(-2));
        assert!(x.is_zero());
        x.add_term(I(0), &Scalar::zero());
        assert!(x.is_zero());
    }

    #[test]
    fn text_form() {
        let x = el("-4*L(0) + 1/2*CL");
        assert_eq!(x.to_string(), "-4*L(0) + 1/2*CL");
        assert_eq!(x.coeff(&CL), qr(1, 2));
        assert_eq!(AlgebraElement::zero().to_string(), "0");
        assert_eq!(el("2*I(-3) - -1*L(-1)").coeff(&L(-1)), q(1));
        assert!("2*Q(1)".parse::<AlgebraElement>().is_err());
        assert!("L(1)".parse::<AlgebraElement>().is_err());
        assert!("2*CL(1)".parse::<AlgebraElement>().is_err());
        assert!("2*L(1) +".parse::<AlgebraElement>().is_err());
    }

    #[test]
    fn json_form() {
        let x = el("-4*L(0) + 1/2*CL");
        let v = x.to_json();
        assert_eq!(
            v.to_string(),
            r#"[{"tag":"L","index":0,"num":"-4","den":"1"},{"tag":"CL","num":"1","den":"2"}]"#
        );
        assert_eq!(AlgebraElement::from_json(&v).unwrap(), x);
    }
}
