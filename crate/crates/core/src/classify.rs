//! Finite-window classification of the `I`-action on a fixed Virasoro module.
//!
//! With `I(n) v_t = f(n,t) v_{n+t}` and all central charges zero, the
//! relation `[L(n), I(m)] = m I(n+m)` gives the linear equations
//!
//! ```text
//! f(m,t) l(n,m+t) - l(n,t) f(m,n+t) = m f(n+m,t)
//! ```
//!
//! and `[I(m), I(n)] = 0` gives the quadratic equations
//!
//! ```text
//! f(n,t) f(m,n+t) = f(m,t) f(n,m+t)
//! ```
//!
//! where `l(n,t)` is the known `L(n) v_t` coefficient. The linear part is
//! solved exactly; the quadratic part is checked on probes drawn from the
//! linear solution space.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::BasisSymbol;
use crate::error::{Error, ParseError, Result};
use crate::families::{generators, rep_residual, ActionCoefficient, FamilyTag, ModuleSpec, WeightModule};
use crate::linalg::{RowReducer, SparseRow};
use crate::sampling::Sampler;
use crate::scalar::Scalar;

pub const DEFAULT_SEED: u64 = 0x5eed;

/// The Virasoro module the `I`-action is built on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VirCase {
    /// `L(n) v_t = (a+t+bn) v_{n+t}`.
    CaseI { a: Scalar, b: Scalar },
    /// `L(n) v_t = (t+n) v_{n+t}` for `t != 0`, `L(n) v_0 = n(n+a) v_n`.
    CaseII { a: Scalar },
    /// `L(n) v_t = t v_{n+t}` for `t != -n`, `L(n) v_{-n} = -n(n+a) v_0`.
    CaseIII { a: Scalar },
    /// `L(n) v_t = t v_{n+t}` for `n+t != 0`, `L(n) v_{-n} = 0`.
    CaseIV,
}

impl VirCase {
    pub fn tag(&self) -> &'static str {
        match self {
            VirCase::CaseI { .. } => "I",
            VirCase::CaseII { .. } => "II",
            VirCase::CaseIII { .. } => "III",
            VirCase::CaseIV => "IV",
        }
    }

    pub fn params(&self) -> BTreeMap<String, Scalar> {
        match self {
            VirCase::CaseI { a, b } => [("a".to_string(), a.clone()), ("b".to_string(), b.clone())].into(),
            VirCase::CaseII { a } | VirCase::CaseIII { a } => [("a".to_string(), a.clone())].into(),
            VirCase::CaseIV => BTreeMap::new(),
        }
    }

    /// Builds a case from its tag and the optional `a`, `b`.
    pub fn from_parts(tag: &str, a: Option<Scalar>, b: Option<Scalar>) -> Result<Self> {
        let bad = || Error::Parse(ParseError::Case(format!("{tag} a={a:?} b={b:?}")));
        match (tag, a.clone(), b.clone()) {
            ("I", Some(a), Some(b)) => Ok(VirCase::CaseI { a, b }),
            ("II", Some(a), None) => Ok(VirCase::CaseII { a }),
            ("III", Some(a), None) => Ok(VirCase::CaseIII { a }),
            ("IV", None, None) => Ok(VirCase::CaseIV),
            _ => Err(bad()),
        }
    }

    /// `L(n) v_t` coefficient.
    pub fn l_coeff(&self, n: i64, t: i64) -> Scalar {
        match self {
            VirCase::CaseI { a, b } => ModuleSpec::VirA { a: a.clone(), b: b.clone() }.l_coeff(n, t),
            VirCase::CaseII { a } => ModuleSpec::VirAa { a: a.clone() }.l_coeff(n, t),
            VirCase::CaseIII { a } => ModuleSpec::VirBa { a: a.clone() }.l_coeff(n, t),
            VirCase::CaseIV => {
                if n + t != 0 {
                    Scalar::from_int(t)
                } else {
                    Scalar::zero()
                }
            }
        }
    }
}

impl fmt::Display for VirCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "Case{}({})", self.tag(), p.join(","))
    }
}

impl FromStr for VirCase {
    type Err = Error;

    /// `CaseI(a=1/3,b=5)`, `CaseIV()`, `IV`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(ParseError::Case(s.to_string()));
        let s = s.trim();
        let (head, body) = match s.find('(') {
            Some(i) => (&s[..i], s[i + 1..].strip_suffix(')').ok_or_else(bad)?),
            None => (s, ""),
        };
        let tag = head.trim().strip_prefix("Case").unwrap_or(head.trim());
        let mut a = None;
        let mut b = None;
        for item in body.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(bad)?;
            let v: Scalar = v.trim().parse()?;
            match k.trim() {
                "a" if a.is_none() => a = Some(v),
                "b" if b.is_none() => b = Some(v),
                _ => return Err(bad()),
            }
        }
        VirCase::from_parts(tag, a, b).map_err(|_| bad())
    }
}

/// Window of unknowns: `f(n,t)` with `|n| <= G` and `t`, `n+t` in `[-N, N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "G")]
    pub g: i64,
}

impl Window {
    pub fn new(n: i64, g: i64) -> Result<Self> {
        if g < 1 || n < 3 * g {
            return Err(Error::Window(format!("need N >= 3G and G >= 1, got N={n}, G={g}")));
        }
        Ok(Window { n, g })
    }

    pub fn contains(&self, n: i64, t: i64) -> bool {
        n.abs() <= self.g && t.abs() <= self.n && (n + t).abs() <= self.n
    }

    pub fn unknowns(&self) -> Vec<(i64, i64)> {
        (-self.g..=self.g)
            .flat_map(|n| (-self.n..=self.n).map(move |t| (n, t)))
            .filter(|&(n, t)| self.contains(n, t))
            .collect()
    }
}

/// Values of `f(n,t)` on a window; absent entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FAssignment {
    pub window: Window,
    values: BTreeMap<(i64, i64), Scalar>,
}

impl FAssignment {
    pub fn zero(window: Window) -> Self {
        FAssignment { window, values: BTreeMap::new() }
    }

    /// Tabulates `rule` on every unknown of the window.
    pub fn from_fn(window: Window, rule: impl Fn(i64, i64) -> Scalar) -> Self {
        let values = window
            .unknowns()
            .into_iter()
            .map(|(n, t)| ((n, t), rule(n, t)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        FAssignment { window, values }
    }

    /// `f(n,t)`; `None` off the window.
    pub fn get(&self, n: i64, t: i64) -> Option<Scalar> {
        self.window
            .contains(n, t)
            .then(|| self.values.get(&(n, t)).cloned().unwrap_or_default())
    }

    /// `f(n,t)`, panicking off the window.
    pub fn at(&self, n: i64, t: i64) -> Scalar {
        self.get(n, t).unwrap_or_else(|| panic!("f({n},{t}) is outside the window"))
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&(i64, i64), &Scalar)> {
        self.values.iter()
    }

    pub fn linear_combination(window: Window, terms: &[(&FAssignment, Scalar)]) -> Self {
        FAssignment::from_fn(window, |n, t| terms.iter().map(|(f, c)| c * &f.at(n, t)).sum())
    }

    /// Sparse `[n, t, num, den]` entries.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.values
                .iter()
                .map(|((n, t), v)| json!([n, t, v.numer().to_string(), v.denom().to_string()]))
                .collect(),
        )
    }
}

/// `L(n) I(m) - I(m) L(n) = m I(n+m)` at `v_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearEquation {
    pub n: i64,
    pub m: i64,
    pub t: i64,
    pub row: SparseRow,
}

/// `f(n,t) f(m,n+t) = f(m,t) f(n,m+t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticEquation {
    pub m: i64,
    pub n: i64,
    pub t: i64,
}

#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub case: VirCase,
    pub window: Window,
    pub unknowns: Vec<(i64, i64)>,
    pub columns: BTreeMap<(i64, i64), usize>,
    pub linear: Vec<LinearEquation>,
    pub quadratic: Vec<QuadraticEquation>,
}

/// Equations whose unknowns all lie in the window; `L(n)` ranges over `|n| <= 2G`.
pub fn build_constraints(case: &VirCase, n_window: i64, g: i64) -> Result<ConstraintSystem> {
    let window = Window::new(n_window, g)?;
    let unknowns = window.unknowns();
    let columns: BTreeMap<(i64, i64), usize> = unknowns.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut linear = Vec::new();
    for m in -g..=g {
        for n in -2 * g..=2 * g {
            for t in -n_window..=n_window {
                let cells = [(m, t), (m, n + t), (n + m, t)];
                if !cells.iter().all(|&(x, y)| window.contains(x, y)) {
                    continue;
                }
                let mut row = SparseRow::new();
                let mut add = |cell: (i64, i64), c: Scalar| {
                    let slot = row.entry(columns[&cell]).or_default();
                    *slot += &c;
                };
                add((m, t), case.l_coeff(n, m + t));
                add((m, n + t), -case.l_coeff(n, t));
                add((n + m, t), -Scalar::from_int(m));
                row.retain(|_, c| !c.is_zero());
                if !row.is_empty() {
                    linear.push(LinearEquation { n, m, t, row });
                }
            }
        }
    }
    let mut quadratic = Vec::new();
    for m in -g..=g {
        for n in -g..=g {
            for t in -n_window..=n_window {
                let cells = [(n, t), (m, n + t), (m, t), (n, m + t)];
                if cells.iter().all(|&(x, y)| window.contains(x, y)) {
                    quadratic.push(QuadraticEquation { m, n, t });
                }
            }
        }
    }
    Ok(ConstraintSystem { case: case.clone(), window, unknowns, columns, linear, quadratic })
}

impl ConstraintSystem {
    pub fn linear_row(&self, n: i64, m: i64, t: i64) -> Option<&SparseRow> {
        self.linear.iter().find(|e| (e.n, e.m, e.t) == (n, m, t)).map(|e| &e.row)
    }

    fn to_vector(&self, f: &FAssignment) -> Vec<Scalar> {
        self.unknowns.iter().map(|&(n, t)| f.at(n, t)).collect()
    }

    /// First linear equation `f` violates, as `(n, m, t)`.
    pub fn linear_violation(&self, f: &FAssignment) -> Option<(i64, i64, i64)> {
        let v = self.to_vector(f);
        self.linear
            .iter()
            .find(|e| !crate::linalg::row_dot(&e.row, &v).is_zero())
            .map(|e| (e.n, e.m, e.t))
    }

    pub fn heisenberg_residual(&self, f: &FAssignment) -> QuadraticReport {
        heisenberg_residual_on(&self.quadratic, f)
    }
}

/// Exact solution space of the linear part.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub dim: usize,
    pub basis: Vec<FAssignment>,
}

/// Kernel of the linear part, reduced with pivots in unknown order.
pub fn solve_affine(sys: &ConstraintSystem) -> LinearSolution {
    let mut red = RowReducer::new(sys.unknowns.len());
    for e in &sys.linear {
        red.insert(&e.row);
    }
    let basis: Vec<FAssignment> = red
        .kernel()
        .into_iter()
        .map(|v| {
            let values = sys
                .unknowns
                .iter()
                .zip(v)
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (*k, c))
                .collect();
            FAssignment { window: sys.window, values }
        })
        .collect();
    LinearSolution { dim: basis.len(), basis }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadraticViolation {
    pub m: i64,
    pub n: i64,
    pub t: i64,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadraticReport {
    pub checked: usize,
    pub max_abs_residual: Scalar,
    pub witness: Option<QuadraticViolation>,
}

impl QuadraticReport {
    pub fn is_zero(&self) -> bool {
        self.witness.is_none()
    }
}

fn heisenberg_residual_on(eqs: &[QuadraticEquation], f: &FAssignment) -> QuadraticReport {
    let mut report = QuadraticReport { checked: 0, max_abs_residual: Scalar::zero(), witness: None };
    for &QuadraticEquation { m, n, t } in eqs {
        let lhs = f.at(n, t) * f.at(m, n + t);
        let rhs = f.at(m, t) * f.at(n, m + t);
        report.checked += 1;
        let r = (&lhs - &rhs).abs();
        if r > report.max_abs_residual {
            report.max_abs_residual = r;
            report.witness = Some(QuadraticViolation { m, n, t, lhs, rhs });
        }
    }
    report
}

/// Every in-window instance of the commuting-currents equation.
pub fn heisenberg_residual(f: &FAssignment) -> QuadraticReport {
    let w = f.window;
    let mut eqs = Vec::new();
    for m in -w.g..=w.g {
        for n in -w.g..=w.g {
            for t in -w.n..=w.n {
                if [(n, t), (m, n + t), (m, t), (n, m + t)].iter().all(|&(x, y)| w.contains(x, y)) {
                    eqs.push(QuadraticEquation { m, n, t });
                }
            }
        }
    }
    heisenberg_residual_on(&eqs, f)
}

/// A catalogued family recognised in an assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyMatch {
    pub family: String,
    pub params: BTreeMap<String, Scalar>,
    /// How the assignment relates to the family's own `I`-table.
    pub via: &'static str,
}

impl FamilyMatch {
    pub fn spec(&self) -> Result<ModuleSpec> {
        crate::families::make_module(&self.family, &self.params)
    }
}

/// One closed-form `I`-pattern available in a case.
#[derive(Debug, Clone)]
struct Pattern {
    tag: FamilyTag,
    via: &'static str,
    /// Parameter name and the entry it is read from.
    read_at: (i64, i64),
    param: &'static str,
    /// Pattern value at unit parameter; linear in the parameter.
    unit: fn(&VirCase, i64, i64) -> Scalar,
    /// The parameter must be nonzero.
    nonzero: bool,
}

fn case_a(case: &VirCase) -> Scalar {
    match case {
        VirCase::CaseI { a, .. } | VirCase::CaseII { a } | VirCase::CaseIII { a } => a.clone(),
        VirCase::CaseIV => Scalar::zero(),
    }
}

fn unit_const(_: &VirCase, _: i64, _: i64) -> Scalar {
    Scalar::one()
}

fn unit_lowered(case: &VirCase, n: i64, t: i64) -> Scalar {
    let a = case_a(case);
    (&a + &Scalar::from_int(t)) / (&a + &Scalar::from_int(n + t))
}

fn unit_raised(case: &VirCase, n: i64, t: i64) -> Scalar {
    let a = case_a(case);
    (&a + &Scalar::from_int(n + t)) / (&a + &Scalar::from_int(t))
}

fn unit_source(case: &VirCase, n: i64, t: i64) -> Scalar {
    let s = case_a(case).to_i64().unwrap_or(0);
    if t == -s {
        Scalar::from_int(n)
    } else {
        Scalar::zero()
    }
}

fn unit_sink(case: &VirCase, n: i64, t: i64) -> Scalar {
    let s = case_a(case).to_i64().unwrap_or(0);
    if n + t == -s {
        Scalar::from_int(n)
    } else {
        Scalar::zero()
    }
}

fn unit_zero_source(_: &VirCase, n: i64, t: i64) -> Scalar {
    if t == 0 {
        Scalar::from_int(n)
    } else {
        Scalar::zero()
    }
}

fn unit_zero_sink(_: &VirCase, n: i64, t: i64) -> Scalar {
    if n + t == 0 {
        Scalar::from_int(n)
    } else {
        Scalar::zero()
    }
}

fn unit_emit(_: &VirCase, n: i64, t: i64) -> Scalar {
    if t == 0 && n != 0 {
        Scalar::one()
    } else {
        Scalar::zero()
    }
}

fn patterns(case: &VirCase) -> Vec<Pattern> {
    type Unit = fn(&VirCase, i64, i64) -> Scalar;
    let p = |tag: FamilyTag, via: &'static str, read_at: (i64, i64), param: &'static str, unit: Unit, nonzero: bool| Pattern {
        tag,
        via,
        read_at,
        param,
        unit,
        nonzero,
    };
    match case {
        VirCase::CaseI { a, b } => {
            let mut out = vec![p(FamilyTag::A, "direct", (1, 1), "c", unit_const, false)];
            if !a.is_integer() && b.is_zero() {
                out.push(p(FamilyTag::A, "rescaled v_t/(a+t)", (1, 1), "c", unit_lowered, true));
            }
            if !a.is_integer() && *b == Scalar::one() {
                out.push(p(FamilyTag::A, "rescaled (a+t)v_t", (1, 1), "c", unit_raised, true));
            }
            if a.is_integer() && b.is_zero() {
                let s = a.to_i64().unwrap_or(0);
                out.push(p(FamilyTag::U, "relabeled", (1, -1 - s), "d", unit_sink, true));
            }
            if a.is_integer() && *b == Scalar::one() {
                let s = a.to_i64().unwrap_or(0);
                out.push(p(FamilyTag::V, "relabeled", (1, -s), "d", unit_source, true));
            }
            out
        }
        VirCase::CaseII { .. } => vec![p(FamilyTag::Ad, "direct", (1, 0), "d", unit_zero_source, false)],
        VirCase::CaseIII { .. } => vec![p(FamilyTag::Bd, "direct", (1, -1), "d", unit_zero_sink, false)],
        VirCase::CaseIV => vec![
            p(FamilyTag::UTilde, "direct", (1, -1), "d", unit_zero_sink, true),
            p(FamilyTag::VTilde, "direct", (1, 0), "c", unit_emit, true),
        ],
    }
}

impl Pattern {
    fn assignment(&self, case: &VirCase, window: Window, value: &Scalar) -> FAssignment {
        FAssignment::from_fn(window, |n, t| value * &(self.unit)(case, n, t))
    }

    /// The family and parameters this pattern stands for at `value`.
    fn family(&self, case: &VirCase, value: &Scalar) -> FamilyMatch {
        let a = case_a(case);
        let mut params = BTreeMap::new();
        match (self.tag, self.via) {
            (FamilyTag::A, "direct") => {
                let VirCase::CaseI { b, .. } = case else { unreachable!() };
                params.insert("a".into(), a);
                params.insert("b".into(), b.clone());
            }
            (FamilyTag::A, "rescaled v_t/(a+t)") => {
                params.insert("a".into(), a);
                params.insert("b".into(), Scalar::one());
            }
            (FamilyTag::A, _) => {
                params.insert("a".into(), a);
                params.insert("b".into(), Scalar::zero());
            }
            (FamilyTag::Ad | FamilyTag::Bd, _) => {
                params.insert("a".into(), a);
            }
            _ => {}
        }
        params.insert(self.param.into(), value.clone());
        FamilyMatch { family: self.tag.name().to_string(), params, via: self.via }
    }
}

/// Every catalogued family whose closed form reproduces `f` exactly, in
/// family order.
pub fn match_family(f: &FAssignment, case: &VirCase) -> Vec<FamilyMatch> {
    let mut pats = patterns(case);
    pats.sort_by_key(|p| p.tag);
    pats.into_iter()
        .filter_map(|p| {
            let (n, t) = p.read_at;
            let scale = (p.unit)(case, n, t);
            let value = f.get(n, t)? / scale;
            if p.nonzero && value.is_zero() {
                return None;
            }
            (p.assignment(case, f.window, &value) == *f).then(|| p.family(case, &value))
        })
        .collect()
}

/// A closed-form consequence of the linear equations spot-checked on solutions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub instances: usize,
    /// First failing instance, as the free indices.
    pub failure: Option<Vec<i64>>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

fn check<I>(identity: &'static str, instances: I) -> IdentityCheck
where
    I: IntoIterator<Item = Option<(Vec<i64>, bool)>>,
{
    let mut out = IdentityCheck { identity, instances: 0, failure: None };
    for (idx, ok) in instances.into_iter().flatten() {
        out.instances += 1;
        if !ok && out.failure.is_none() {
            out.failure = Some(idx);
        }
    }
    out
}

fn range2(w: Window) -> impl Iterator<Item = (i64, i64)> + Clone {
    (-w.n..=w.n).flat_map(move |x| (-w.n..=w.n).map(move |y| (x, y)))
}

/// Identities derived along the way in the classification argument, checked
/// on a linear-space solution `f` of `case`. Instances with an index off the
/// window are skipped.
pub fn identity_checks(case: &VirCase, f: &FAssignment) -> Vec<IdentityCheck> {
    let w = f.window;
    let g = |n: i64, t: i64| f.get(n, t);
    let s = Scalar::from_int;
    let mut out = Vec::new();
    let f00 = f.at(0, 0);
    match case {
        VirCase::CaseI { a, b } => {
            out.push(check(
                "f(0,t) = f(0,n+t)",
                range2(w).map(|(n, t)| Some((vec![n, t], g(0, t)? == g(0, n + t)?))),
            ));
            let b_generic = !b.is_zero() && *b != Scalar::one();
            if b_generic {
                out.push(check("f(m,0) = f(0,0)", (-w.g..=w.g).map(|m| Some((vec![m], g(m, 0)? == f00)))));
            }
            if !a.is_integer() && b.is_zero() {
                out.push(check(
                    "(km+a) f(km,0) = k(m+a) f(m,0) - (k-1) a f(0,0)",
                    range2(w).map(|(k, m)| {
                        let lhs = (s(k * m) + a) * g(k * m, 0)?;
                        let rhs = s(k) * (s(m) + a) * g(m, 0)? - s(k - 1) * a * &f00;
                        Some((vec![k, m], lhs == rhs))
                    }),
                ));
            }
            if a.is_zero() && *b == Scalar::one() {
                out.push(check(
                    "f(n+m,0) = f(n,0) + f(m,0) - f(0,0)",
                    range2(w).map(|(n, m)| Some((vec![n, m], g(n + m, 0)? == g(n, 0)? + g(m, 0)? - &f00))),
                ));
                let d = f.at(1, 0) - &f00;
                out.push(check(
                    "f(m,0) = dm + f(0,0)",
                    (-w.g..=w.g).map(|m| Some((vec![m], g(m, 0)? == &d * &s(m) + &f00))),
                ));
            }
            if a.is_zero() && b.is_zero() {
                out.push(check(
                    "f(m,-m) + f(-m,m) = 2f(0,0)",
                    (-w.g..=w.g).map(|m| Some((vec![m], g(m, -m)? + g(-m, m)? == s(2) * &f00))),
                ));
                out.push(check(
                    "f(m,-n-m) = f(m-n,-m), m != 0",
                    range2(w).filter(|&(m, _)| m != 0).map(|(m, n)| Some((vec![m, n], g(m, -n - m)? == g(m - n, -m)?))),
                ));
            }
        }
        VirCase::CaseIV => {
            let ts = -w.n..=w.n;
            out.push(check("f(-2t,t) = 0", ts.clone().map(|t| Some((vec![t], g(-2 * t, t)?.is_zero())))));
            out.push(check(
                "f(-kt,t) = 0, k >= 2",
                range2(w).filter(|&(k, _)| k >= 2).map(|(k, t)| Some((vec![k, t], g(-k * t, t)?.is_zero()))),
            ));
            out.push(check(
                "f(m,0) = f(n,0), m,n != 0",
                range2(w).filter(|&(m, n)| m != 0 && n != 0).map(|(m, n)| Some((vec![m, n], g(m, 0)? == g(n, 0)?))),
            ));
            out.push(check(
                "f(-t,n+t) = f(n-t,t), t != 0, n+t != 0",
                range2(w)
                    .filter(|&(n, t)| t != 0 && n + t != 0)
                    .map(|(n, t)| Some((vec![n, t], g(-t, n + t)? == g(n - t, t)?))),
            ));
            out.push(check(
                "f(t,kt) = 0, k >= 1",
                range2(w).filter(|&(k, _)| k >= 1).map(|(k, t)| Some((vec![k, t], g(t, k * t)?.is_zero()))),
            ));
            out.push(check(
                "f(kt,t) = f(t,kt) = 0, k != -1, 0",
                range2(w)
                    .filter(|&(k, _)| k != -1 && k != 0)
                    .map(|(k, t)| Some((vec![k, t], g(k * t, t)?.is_zero() && g(t, k * t)?.is_zero()))),
            ));
            out.push(check("f(0,t) = 0, t != 0", ts.filter(|&t| t != 0).map(|t| Some((vec![t], g(0, t)?.is_zero())))));
            out.push(check(
                "f(n,t) = 0, n+t != 0, t != 0",
                range2(w)
                    .filter(|&(n, t)| n + t != 0 && t != 0)
                    .map(|(n, t)| Some((vec![n, t], g(n, t)?.is_zero()))),
            ));
        }
        VirCase::CaseII { .. } | VirCase::CaseIII { .. } => {}
    }
    out
}

/// The weight module defined by a case and an `I`-table, on the window.
pub struct TableModule<'a> {
    pub case: &'a VirCase,
    pub f: &'a FAssignment,
}

impl WeightModule for TableModule<'_> {
    fn act(&self, g: BasisSymbol, t: i64) -> ActionCoefficient {
        match g {
            BasisSymbol::L(n) => ActionCoefficient { coefficient: self.case.l_coeff(n, t), target: n + t },
            BasisSymbol::I(n) => ActionCoefficient { coefficient: self.f.get(n, t).unwrap_or_default(), target: n + t },
            _ => ActionCoefficient { coefficient: Scalar::zero(), target: t },
        }
    }

    fn label(&self) -> String {
        format!("table over {}", self.case)
    }
}

/// One probe of the linear space and what was found about it.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub label: String,
    pub passes_quadratic: bool,
    pub matches: Vec<FamilyMatch>,
    pub violation: Option<QuadraticViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixedProbe {
    pub families: (String, String),
    pub passes_quadratic: bool,
    pub violation: Option<QuadraticViolation>,
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub case: VirCase,
    pub window: Window,
    pub linear_equations: usize,
    pub quadratic_equations: usize,
    pub linear_dim: usize,
    pub basis: Vec<FAssignment>,
    pub matches: Vec<FamilyMatch>,
    pub probes: Vec<ProbeResult>,
    /// Sums of two catalogued lines with both parameters nonzero.
    pub mixed: Vec<MixedProbe>,
    pub identities: Vec<IdentityCheck>,
}

impl ClassificationReport {
    /// Distinct matched family names.
    pub fn inventory(&self) -> BTreeSet<String> {
        self.matches.iter().map(|m| m.family.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        let violations: Vec<&QuadraticViolation> = self
            .probes
            .iter()
            .filter_map(|p| p.violation.as_ref())
            .chain(self.mixed.iter().filter_map(|p| p.violation.as_ref()))
            .collect();
        json!({
            "case": self.case.tag(),
            "params": self.case.params(),
            "window": self.window,
            "linear_dim": self.linear_dim,
            "basis": self.basis.iter().map(FAssignment::to_json).collect::<Vec<_>>(),
            "matches": self.matches,
            "violations": violations,
            "equations": {"linear": self.linear_equations, "quadratic": self.quadratic_equations},
            "probes": self.probes,
            "mixed_probes": self.mixed,
            "identities": self.identities,
        })
    }
}

fn mismatch(case: &VirCase, detail: String) -> Error {
    Error::ClassificationMismatch { case: case.to_string(), detail }
}

pub fn classify(case: &VirCase, n_window: i64, g: i64) -> Result<ClassificationReport> {
    classify_seeded(case, n_window, g, DEFAULT_SEED)
}

/// Solves the linear part, then probes it.
///
/// Asserts that every catalogued pattern for the case solves the whole
/// system, that a probe passes the quadratic check exactly when it matches a
/// catalogued family, that sums of two catalogued lines fail, and that the
/// intermediate identities hold on every probe.
pub fn classify_seeded(case: &VirCase, n_window: i64, g: i64, seed: u64) -> Result<ClassificationReport> {
    let sys = build_constraints(case, n_window, g)?;
    let sol = solve_affine(&sys);
    let mut rng = Sampler::new(seed);
    let w = sys.window;

    let pats = patterns(case);
    let mut lines = Vec::new();
    for p in &pats {
        for value in [Scalar::one(), rng.generic()] {
            let f = p.assignment(case, w, &value);
            if let Some((n, m, t)) = sys.linear_violation(&f) {
                return Err(mismatch(case, format!("{} pattern violates linear equation n={n} m={m} t={t}", p.tag.name())));
            }
            let q = sys.heisenberg_residual(&f);
            if let Some(v) = q.witness {
                return Err(mismatch(case, format!("{} pattern violates quadratic equation at {v:?}", p.tag.name())));
            }
            lines.push((p.tag.name().to_string(), f));
        }
    }

    let mut probes: Vec<(String, FAssignment)> = Vec::new();
    for (i, b) in sol.basis.iter().enumerate() {
        probes.push((format!("basis[{i}]"), b.clone()));
    }
    for i in 0..sol.basis.len() {
        for j in i + 1..sol.basis.len() {
            let f = FAssignment::linear_combination(w, &[(&sol.basis[i], Scalar::one()), (&sol.basis[j], Scalar::one())]);
            probes.push((format!("basis[{i}]+basis[{j}]"), f));
        }
    }
    for k in 0..8 {
        let coeffs = rng.generic_vec(sol.basis.len());
        let terms: Vec<(&FAssignment, Scalar)> = sol.basis.iter().zip(coeffs).collect();
        probes.push((format!("random[{k}]"), FAssignment::linear_combination(w, &terms)));
    }

    let mut results = Vec::new();
    let mut matches: Vec<FamilyMatch> = Vec::new();
    let mut identities: BTreeMap<&'static str, IdentityCheck> = BTreeMap::new();
    for (label, f) in probes.into_iter().filter(|(_, f)| !f.is_zero()) {
        let q = sys.heisenberg_residual(&f);
        let found = match_family(&f, case);
        if q.is_zero() != !found.is_empty() {
            return Err(mismatch(
                case,
                format!(
                    "probe {label}: quadratic check {} but {} catalogued family",
                    if q.is_zero() { "passes" } else { "fails" },
                    if found.is_empty() { "matches no" } else { "matches a" }
                ),
            ));
        }
        for m in &found {
            let spec = m.spec()?;
            for x in generators(g) {
                for y in generators(g) {
                    if !rep_residual(&spec, x, y, 0).is_empty() {
                        return Err(mismatch(case, format!("matched {spec} fails the module axioms at {x},{y}")));
                    }
                }
            }
            if !matches.iter().any(|k| k.family == m.family && k.via == m.via) {
                matches.push(m.clone());
            }
        }
        for c in identity_checks(case, &f) {
            if let Some(idx) = &c.failure {
                return Err(mismatch(case, format!("identity `{}` fails on probe {label} at {idx:?}", c.identity)));
            }
            let slot = identities.entry(c.identity).or_insert(IdentityCheck { identity: c.identity, instances: 0, failure: None });
            slot.instances += c.instances;
        }
        results.push(ProbeResult { label, passes_quadratic: q.is_zero(), matches: found, violation: q.witness });
    }

    let mut mixed = Vec::new();
    for (i, p) in pats.iter().enumerate() {
        for r in &pats[i + 1..] {
            let (x, y) = (rng.generic(), rng.generic());
            let f = FAssignment::linear_combination(w, &[(&p.assignment(case, w, &Scalar::one()), x), (&r.assignment(case, w, &Scalar::one()), y)]);
            let q = sys.heisenberg_residual(&f);
            if q.is_zero() {
                return Err(mismatch(case, format!("sum of {} and {} lines passes the quadratic check", p.tag.name(), r.tag.name())));
            }
            mixed.push(MixedProbe {
                families: (p.tag.name().to_string(), r.tag.name().to_string()),
                passes_quadratic: false,
                violation: q.witness,
            });
        }
    }

    Ok(ClassificationReport {
        case: case.clone(),
        window: w,
        linear_equations: sys.linear.len(),
        quadratic_equations: sys.quadratic.len(),
        linear_dim: sol.dim,
        basis: sol.basis,
        matches,
        probes: results,
        mixed,
        identities: identities.into_values().collect(),
    })
}

/// One cell of the case grid.
#[derive(Debug, Clone)]
pub struct CaseCell {
    pub name: &'static str,
    pub case: VirCase,
}

/// Every parameter regime of the classification, with generic values drawn
/// from `seed`.
pub fn case_grid(seed: u64) -> Vec<CaseCell> {
    let mut rng = Sampler::new(seed);
    let mut cells = Vec::new();
    let mut cell = |name, case| cells.push(CaseCell { name, case });
    let i = |a: Scalar, b: Scalar| VirCase::CaseI { a, b };
    let s = Scalar::from_int;

    cell("I a!∈Z b generic", i(Scalar::new(1, 3), s(5)));
    cell("I a!∈Z b generic", i(rng.generic(), rng.generic()));
    cell("I a!∈Z b=0", i(Scalar::new(1, 3), s(0)));
    cell("I a!∈Z b=0", i(rng.generic(), s(0)));
    cell("I a!∈Z b=1", i(Scalar::new(-2, 7), s(1)));
    cell("I a!∈Z b=1", i(rng.generic(), s(1)));
    for p in [1, -1, 2, -2] {
        let a = rng.generic();
        let b = &a / &s(p);
        cell("I a!∈Z a=bp", i(a, b));
    }
    cell("I a∈Z b generic", i(s(0), rng.generic()));
    cell("I a∈Z b generic", i(s(3), s(2)));
    cell("I a=0 b=1", i(s(0), s(1)));
    cell("I a=0 b=0", i(s(0), s(0)));
    cell("II", VirCase::CaseII { a: s(4) });
    cell("II", VirCase::CaseII { a: rng.generic() });
    cell("III", VirCase::CaseIII { a: s(2) });
    cell("III", VirCase::CaseIII { a: rng.generic() });
    cell("IV", VirCase::CaseIV);
    cells
}
