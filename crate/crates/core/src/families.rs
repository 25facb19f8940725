//! Intermediate-series module families.
//!
//! Every module here has basis `v_t`, `t` in the integers (or a subset for
//! subquotients), and a degree-`n` generator sends `v_t` to a multiple of
//! `v_{n+t}`. Central elements act by zero in all families.
//!
//! | tag | `L(n) v_t` | `I(n) v_t` |
//! |---|---|---|
//! | `VirA[a,b]` | `(a+t+bn)` | 0 |
//! | `VirA[a]` | `(t+n)`, `t=0`: `n(n+a)` | 0 |
//! | `VirB[a]` | `t`, `t=-n`: `-n(n+a)` | 0 |
//! | `A[a,b,c]` | `(a+t+bn)` | `c` |
//! | `A[a,d]` | as `VirA[a]` | `dn` at `t=0`, else 0 |
//! | `B[a,d]` | as `VirB[a]` | `dn` at `t=-n`, else 0 |
//! | `U[d]` | `t` | `dn` at `t=-n`, else 0 |
//! | `V[d]` | `t+n` | `dn` at `t=0`, else 0 |
//! | `Utilde[d]` | `t`, `t=-n`: 0 | `dn` at `t=-n`, else 0 |
//! | `Vtilde[c]` | `t`, `t=-n`: 0 | `c` at `t=0, n!=0`, else 0 |

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::{bracket_with, AlgebraElement, BasisSymbol};
use crate::error::{Error, ParseError, Result};
use crate::scalar::Scalar;
use crate::Mutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FamilyTag {
    VirA,
    VirAa,
    VirBa,
    A,
    Ad,
    Bd,
    U,
    V,
    UTilde,
    VTilde,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 10] = [
        FamilyTag::VirA,
        FamilyTag::VirAa,
        FamilyTag::VirBa,
        FamilyTag::A,
        FamilyTag::Ad,
        FamilyTag::Bd,
        FamilyTag::U,
        FamilyTag::V,
        FamilyTag::UTilde,
        FamilyTag::VTilde,
    ];

    /// Name used in the text form; `VirA` and `A` are shared between two
    /// tags and disambiguated by the parameter names.
    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::VirA | FamilyTag::VirAa => "VirA",
            FamilyTag::VirBa => "VirB",
            FamilyTag::A | FamilyTag::Ad => "A",
            FamilyTag::Bd => "B",
            FamilyTag::U => "U",
            FamilyTag::V => "V",
            FamilyTag::UTilde => "Utilde",
            FamilyTag::VTilde => "Vtilde",
        }
    }

    pub fn params(self) -> &'static [&'static str] {
        match self {
            FamilyTag::VirA => &["a", "b"],
            FamilyTag::VirAa | FamilyTag::VirBa => &["a"],
            FamilyTag::A => &["a", "b", "c"],
            FamilyTag::Ad | FamilyTag::Bd => &["a", "d"],
            FamilyTag::U | FamilyTag::V | FamilyTag::UTilde => &["d"],
            FamilyTag::VTilde => &["c"],
        }
    }

    fn resolve(name: &str, keys: &BTreeSet<&str>) -> Option<FamilyTag> {
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.name() == name && t.params().iter().copied().collect::<BTreeSet<_>>() == *keys)
    }
}

/// A validated family with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModuleSpec {
    VirA { a: Scalar, b: Scalar },
    VirAa { a: Scalar },
    VirBa { a: Scalar },
    A { a: Scalar, b: Scalar, c: Scalar },
    Ad { a: Scalar, d: Scalar },
    Bd { a: Scalar, d: Scalar },
    U { d: Scalar },
    V { d: Scalar },
    UTilde { d: Scalar },
    VTilde { c: Scalar },
}

/// Builds a family from its text name and named parameters.
pub fn make_module(name: &str, params: &BTreeMap<String, Scalar>) -> Result<ModuleSpec> {
    let keys: BTreeSet<&str> = params.keys().map(String::as_str).collect();
    let tag = FamilyTag::resolve(name, &keys).ok_or_else(|| {
        let expected: Vec<String> = FamilyTag::ALL
            .iter()
            .filter(|t| t.name() == name)
            .map(|t| t.params().join(","))
            .collect();
        Error::Arity {
            family: name.to_string(),
            expected: if expected.is_empty() { "unknown family".into() } else { expected.join(" | ") },
            got: keys.iter().copied().collect::<Vec<_>>().join(","),
        }
    })?;
    let p = |k: &str| params[k].clone();
    let spec = match tag {
        FamilyTag::VirA => ModuleSpec::VirA { a: p("a"), b: p("b") },
        FamilyTag::VirAa => ModuleSpec::VirAa { a: p("a") },
        FamilyTag::VirBa => ModuleSpec::VirBa { a: p("a") },
        FamilyTag::A => ModuleSpec::A { a: p("a"), b: p("b"), c: p("c") },
        FamilyTag::Ad => ModuleSpec::Ad { a: p("a"), d: p("d") },
        FamilyTag::Bd => ModuleSpec::Bd { a: p("a"), d: p("d") },
        FamilyTag::U => ModuleSpec::U { d: p("d") },
        FamilyTag::V => ModuleSpec::V { d: p("d") },
        FamilyTag::UTilde => ModuleSpec::UTilde { d: p("d") },
        FamilyTag::VTilde => ModuleSpec::VTilde { c: p("c") },
    };
    spec.validate()?;
    Ok(spec)
}

impl ModuleSpec {
    pub fn tag(&self) -> FamilyTag {
        match self {
            ModuleSpec::VirA { .. } => FamilyTag::VirA,
            ModuleSpec::VirAa { .. } => FamilyTag::VirAa,
            ModuleSpec::VirBa { .. } => FamilyTag::VirBa,
            ModuleSpec::A { .. } => FamilyTag::A,
            ModuleSpec::Ad { .. } => FamilyTag::Ad,
            ModuleSpec::Bd { .. } => FamilyTag::Bd,
            ModuleSpec::U { .. } => FamilyTag::U,
            ModuleSpec::V { .. } => FamilyTag::V,
            ModuleSpec::UTilde { .. } => FamilyTag::UTilde,
            ModuleSpec::VTilde { .. } => FamilyTag::VTilde,
        }
    }

    /// Parameters in the tag's canonical order.
    pub fn params(&self) -> Vec<(&'static str, &Scalar)> {
        match self {
            ModuleSpec::VirA { a, b } => vec![("a", a), ("b", b)],
            ModuleSpec::VirAa { a } | ModuleSpec::VirBa { a } => vec![("a", a)],
            ModuleSpec::A { a, b, c } => vec![("a", a), ("b", b), ("c", c)],
            ModuleSpec::Ad { a, d } | ModuleSpec::Bd { a, d } => vec![("a", a), ("d", d)],
            ModuleSpec::U { d } | ModuleSpec::V { d } | ModuleSpec::UTilde { d } => vec![("d", d)],
            ModuleSpec::VTilde { c } => vec![("c", c)],
        }
    }

    pub fn params_map(&self) -> BTreeMap<String, Scalar> {
        self.params().into_iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    fn validate(&self) -> Result<()> {
        match self {
            ModuleSpec::UTilde { d } if d.is_zero() => Err(Error::ParameterDomain {
                family: "Utilde".into(),
                param: "d",
            }),
            ModuleSpec::VTilde { c } if c.is_zero() => Err(Error::ParameterDomain {
                family: "Vtilde".into(),
                param: "c",
            }),
            _ => Ok(()),
        }
    }

    /// Coefficient of `L(n) v_t` (always landing on `v_{n+t}`).
    pub fn l_coeff(&self, n: i64, t: i64) -> Scalar {
        let s = Scalar::from_int;
        match self {
            ModuleSpec::VirA { a, b } | ModuleSpec::A { a, b, .. } => a + &s(t) + b * &s(n),
            ModuleSpec::VirAa { a } | ModuleSpec::Ad { a, .. } => {
                if t != 0 {
                    s(t + n)
                } else {
                    s(n) * (s(n) + a)
                }
            }
            ModuleSpec::VirBa { a } | ModuleSpec::Bd { a, .. } => {
                if t != -n {
                    s(t)
                } else {
                    -(s(n) * (s(n) + a))
                }
            }
            ModuleSpec::U { .. } => s(t),
            ModuleSpec::V { .. } => s(t + n),
            ModuleSpec::UTilde { .. } | ModuleSpec::VTilde { .. } => {
                if n + t != 0 {
                    s(t)
                } else {
                    Scalar::zero()
                }
            }
        }
    }

    /// Coefficient of `I(n) v_t`.
    pub fn i_coeff(&self, n: i64, t: i64) -> Scalar {
        let dn = |d: &Scalar| d * &Scalar::from_int(n);
        match self {
            ModuleSpec::VirA { .. } | ModuleSpec::VirAa { .. } | ModuleSpec::VirBa { .. } => Scalar::zero(),
            ModuleSpec::A { c, .. } => c.clone(),
            ModuleSpec::Ad { d, .. } | ModuleSpec::V { d } if t == 0 => dn(d),
            ModuleSpec::Bd { d, .. } | ModuleSpec::U { d } | ModuleSpec::UTilde { d } if n + t == 0 => dn(d),
            ModuleSpec::VTilde { c } if t == 0 && n != 0 => c.clone(),
            _ => Scalar::zero(),
        }
    }
}

impl fmt::Display for ModuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}[{}]", self.tag().name(), params.join(","))
    }
}

impl FromStr for ModuleSpec {
    type Err = Error;

    /// `A[a=1/3,b=2,c=5]`, `Utilde[d=3]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(ParseError::Family(s.to_string()));
        let s = s.trim();
        let open = s.find('[').ok_or_else(bad)?;
        let body = s[open + 1..].strip_suffix(']').ok_or_else(bad)?;
        let mut params = BTreeMap::new();
        for item in body.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(bad)?;
            let value: Scalar = v.parse()?;
            if params.insert(k.trim().to_string(), value).is_some() {
                return Err(bad());
            }
        }
        make_module(s[..open].trim(), &params)
    }
}

/// Result of acting with one generator on `v_t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionCoefficient {
    pub coefficient: Scalar,
    pub target: i64,
}

/// A module with one-dimensional weight spaces `C v_t`, `t` in [`domain`](WeightModule::in_domain).
pub trait WeightModule {
    fn act(&self, g: BasisSymbol, t: i64) -> ActionCoefficient;

    fn in_domain(&self, _t: i64) -> bool {
        true
    }

    fn label(&self) -> String;
}

impl WeightModule for ModuleSpec {
    fn act(&self, g: BasisSymbol, t: i64) -> ActionCoefficient {
        let (coefficient, target) = match g {
            BasisSymbol::L(n) => (self.l_coeff(n, t), n + t),
            BasisSymbol::I(n) => (self.i_coeff(n, t), n + t),
            _ => (Scalar::zero(), t),
        };
        ActionCoefficient { coefficient, target }
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

pub fn act(spec: &ModuleSpec, g: BasisSymbol, t: i64) -> ActionCoefficient {
    spec.act(g, t)
}

/// The module on `C[t, t^-1]`-type basis with `L(n) v_t = (a+t) v_{n+t}` and
/// `I(n) v_t = c (t+a)/(n+t+a) v_{n+t}`; the second solution branch for
/// `b = 0`, `a` not an integer. Rescaling `v_t -> v_t/(a+t)` turns it into
/// `A[a,1,c]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledCurrent {
    pub a: Scalar,
    pub c: Scalar,
}

impl WeightModule for ScaledCurrent {
    fn act(&self, g: BasisSymbol, t: i64) -> ActionCoefficient {
        let at = &self.a + &Scalar::from_int(t);
        match g {
            BasisSymbol::L(n) => ActionCoefficient { coefficient: at, target: n + t },
            BasisSymbol::I(n) => {
                let den = &at + &Scalar::from_int(n);
                let coefficient = if den.is_zero() { Scalar::zero() } else { &self.c * &at / den };
                ActionCoefficient { coefficient, target: n + t }
            }
            _ => ActionCoefficient { coefficient: Scalar::zero(), target: t },
        }
    }

    fn label(&self) -> String {
        format!("ScaledCurrent[a={},c={}]", self.a, self.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SubquotientKind {
    /// The kept indices span a submodule.
    Submodule,
    /// The removed indices span a submodule and we keep the quotient.
    Quotient,
}

/// A module restricted to the complement of a finite index set.
#[derive(Debug, Clone)]
pub struct Subquotient {
    base: ModuleSpec,
    removed: BTreeSet<i64>,
    kind: SubquotientKind,
}

impl Subquotient {
    /// Decides on `[-window, window]` with moves `|n| <= gen_bound` whether
    /// the removed set or its complement is invariant.
    pub fn new(base: ModuleSpec, removed: BTreeSet<i64>, window: i64, gen_bound: i64) -> Result<Self> {
        let leaks = |from_removed: bool| {
            (-window..=window)
                .filter(|t| removed.contains(t) == from_removed)
                .any(|t| {
                    generators(gen_bound).into_iter().any(|g| {
                        let ac = base.act(g, t);
                        !ac.coefficient.is_zero()
                            && ac.target.abs() <= window
                            && removed.contains(&ac.target) != from_removed
                    })
                })
        };
        let kind = if !leaks(true) {
            SubquotientKind::Quotient
        } else if !leaks(false) {
            SubquotientKind::Submodule
        } else {
            return Err(Error::InvalidSubquotient(format!("{base} without {removed:?}")));
        };
        Ok(Subquotient { base, removed, kind })
    }

    pub fn kind(&self) -> SubquotientKind {
        self.kind
    }
}

impl WeightModule for Subquotient {
    fn act(&self, g: BasisSymbol, t: i64) -> ActionCoefficient {
        let mut ac = self.base.act(g, t);
        if self.removed.contains(&t) || self.removed.contains(&ac.target) {
            ac.coefficient = Scalar::zero();
        }
        ac
    }

    fn in_domain(&self, t: i64) -> bool {
        !self.removed.contains(&t)
    }

    fn label(&self) -> String {
        let kind = match self.kind {
            SubquotientKind::Submodule => "sub",
            SubquotientKind::Quotient => "quot",
        };
        format!("{}'({kind} {:?})", self.base, self.removed)
    }
}

/// `L(n), I(n)` for `|n| <= bound`.
pub fn generators(bound: i64) -> Vec<BasisSymbol> {
    (-bound..=bound)
        .map(BasisSymbol::L)
        .chain((-bound..=bound).map(BasisSymbol::I))
        .collect()
}

/// A finite combination of the `v_t`.
pub type ModuleVector = BTreeMap<i64, Scalar>;

fn add_to(v: &mut ModuleVector, t: i64, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = v.entry(t).or_default();
    *slot += c;
    if slot.is_zero() {
        v.remove(&t);
    }
}

/// `x v` for an algebra element `x`.
pub fn apply_element<M: WeightModule + ?Sized>(module: &M, x: &AlgebraElement, v: &ModuleVector) -> ModuleVector {
    let mut out = ModuleVector::new();
    for (sym, cx) in x.terms() {
        if sym.is_central() {
            continue;
        }
        for (t, cv) in v {
            let ac = module.act(*sym, *t);
            add_to(&mut out, ac.target, &(&ac.coefficient * &(cx * cv)));
        }
    }
    out
}

/// Coefficients of `([x,y] - x y + y x) v_t`; zero for a genuine module.
pub fn rep_residual<M: WeightModule + ?Sized>(module: &M, x: BasisSymbol, y: BasisSymbol, t: i64) -> ModuleVector {
    rep_residual_with(module, x, y, t, Mutation::None)
}

pub fn rep_residual_with<M: WeightModule + ?Sized>(
    module: &M,
    x: BasisSymbol,
    y: BasisSymbol,
    t: i64,
    mutation: Mutation,
) -> ModuleVector {
    let (xe, ye) = (AlgebraElement::from(x), AlgebraElement::from(y));
    let vt: ModuleVector = [(t, Scalar::one())].into();
    let mut out = apply_element(module, &bracket_with(&xe, &ye, mutation), &vt);
    for (t, c) in apply_element(module, &xe, &apply_element(module, &ye, &vt)) {
        add_to(&mut out, t, &-c);
    }
    for (t, c) in apply_element(module, &ye, &apply_element(module, &xe, &vt)) {
        add_to(&mut out, t, &c);
    }
    out
}

/// Proper invariant index sets found on a finite window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub family: String,
    pub params: BTreeMap<String, Scalar>,
    pub window: i64,
    pub generator_bound: i64,
    pub core: (i64, i64),
    pub invariant_sets: Vec<Vec<i64>>,
    pub boundary_flags: Vec<bool>,
}

impl ScanReport {
    /// No unflagged proper invariant set was found.
    pub fn looks_simple(&self) -> bool {
        self.boundary_flags.iter().all(|&f| f)
    }
}

fn closure<M: WeightModule + ?Sized>(module: &M, start: i64, window: i64, gens: &[BasisSymbol]) -> BTreeSet<i64> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for g in gens {
            let ac = module.act(*g, t);
            if ac.target.abs() <= window
                && module.in_domain(ac.target)
                && !ac.coefficient.is_zero()
                && seen.insert(ac.target)
            {
                queue.push_back(ac.target);
            }
        }
    }
    seen
}

/// Closures of the singletons `{t}` of the core window `[-N+G, N-G]` under
/// generator moves `|n| <= G` with nonzero coefficient.
///
/// Closures are grown on the full window `[-N, N]` and then cut down to the
/// core. A closure is boundary-flagged when growing it on the doubled window
/// `[-2N, 2N]` gives a different core set, i.e. the truncation changed it.
pub fn submodule_scan<M: WeightModule + ?Sized>(module: &M, window: i64, gen_bound: i64) -> Result<Vec<(BTreeSet<i64>, bool)>> {
    if gen_bound < 2 || window <= gen_bound {
        return Err(Error::Window(format!("need N > G >= 2, got N={window}, G={gen_bound}")));
    }
    let gens = generators(gen_bound);
    let (lo, hi) = (-window + gen_bound, window - gen_bound);
    let core: BTreeSet<i64> = (lo..=hi).filter(|t| module.in_domain(*t)).collect();
    let cut = |s: BTreeSet<i64>| -> BTreeSet<i64> { s.intersection(&core).copied().collect() };
    let mut found: Vec<(BTreeSet<i64>, bool)> = Vec::new();
    for &t in &core {
        let set = cut(closure(module, t, window, &gens));
        if set == core || found.iter().any(|(s, _)| *s == set) {
            continue;
        }
        let wide = cut(closure(module, t, 2 * window, &gens));
        let flagged = wide != set;
        found.push((set, flagged));
    }
    found.sort();
    Ok(found)
}

/// [`submodule_scan`] for a family, packaged for reporting.
pub fn scan_family(spec: &ModuleSpec, window: i64, gen_bound: i64) -> Result<ScanReport> {
    let found = submodule_scan(spec, window, gen_bound)?;
    Ok(ScanReport {
        family: spec.tag().name().to_string(),
        params: spec.params_map(),
        window,
        generator_bound: gen_bound,
        core: (-window + gen_bound, window - gen_bound),
        boundary_flags: found.iter().map(|(_, f)| *f).collect(),
        invariant_sets: found.into_iter().map(|(s, _)| s.into_iter().collect()).collect(),
    })
}

/// `A[a,b,c]` is simple iff `a` is not an integer, or `b` is not 0 or 1, or `c != 0`.
pub fn simplicity_predicate(spec: &ModuleSpec) -> Result<bool> {
    match spec {
        ModuleSpec::A { a, b, c } => {
            let b_generic = !b.is_zero() && *b != Scalar::one();
            Ok(!a.is_integer() || b_generic || !c.is_zero())
        }
        other => Err(Error::UnsupportedFamily(other.to_string())),
    }
}

/// Largest residual of a diagonal map between two modules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntertwinerReport {
    pub src: String,
    pub dst: String,
    pub checked: usize,
    pub nonzero: usize,
    pub max_abs_residual: Scalar,
    /// `(generator, t, residual)` at the largest residual.
    pub witness: Option<(String, i64, Scalar)>,
}

impl IntertwinerReport {
    pub fn is_zero(&self) -> bool {
        self.nonzero == 0
    }
}

/// Residual of `phi ∘ act_src - act_dst ∘ phi` for `phi(v_t) = scale(t) w_{t+shift}`,
/// over generators `|n| <= gen_bound` and `|t|, |t+n| <= window`.
pub fn intertwiner_residual<S, D, F>(
    src: &S,
    dst: &D,
    scale: F,
    shift: i64,
    window: i64,
    gen_bound: i64,
) -> Result<IntertwinerReport>
where
    S: WeightModule + ?Sized,
    D: WeightModule + ?Sized,
    F: Fn(i64) -> Scalar,
{
    let domain: Vec<i64> = (-window..=window).filter(|t| src.in_domain(*t)).collect();
    let scales: BTreeMap<i64, Scalar> = domain.iter().map(|&t| (t, scale(t))).collect();
    if let Some((t, _)) = scales.iter().find(|(_, s)| s.is_zero()) {
        return Err(Error::VanishingScale(*t));
    }
    let mut report = IntertwinerReport {
        src: src.label(),
        dst: dst.label(),
        checked: 0,
        nonzero: 0,
        max_abs_residual: Scalar::zero(),
        witness: None,
    };
    for g in generators(gen_bound) {
        for &t in &domain {
            let a_src = src.act(g, t);
            if a_src.target.abs() > window {
                continue;
            }
            let lhs = match scales.get(&a_src.target) {
                Some(s) => &a_src.coefficient * s,
                None => Scalar::zero(),
            };
            let a_dst = dst.act(g, t + shift);
            debug_assert_eq!(a_dst.target, a_src.target + shift);
            let rhs = if dst.in_domain(a_dst.target) {
                &scales[&t] * &a_dst.coefficient
            } else {
                Scalar::zero()
            };
            let r = lhs - rhs;
            report.checked += 1;
            if !r.is_zero() {
                report.nonzero += 1;
                if r.abs() > report.max_abs_residual {
                    report.max_abs_residual = r.abs();
                    report.witness = Some((g.to_string(), t, r));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qr};
    use BasisSymbol::*;

    fn spec(s: &str) -> ModuleSpec {
        s.parse().unwrap()
    }

    fn set(v: &[i64]) -> BTreeSet<i64> {
        v.iter().copied().collect()
    }

    #[test]
    fn construction() {
        assert!("A[a=1/3,b=2,c=5]".parse::<ModuleSpec>().is_ok());
        assert!(matches!("Utilde[d=0]".parse::<ModuleSpec>(), Err(Error::ParameterDomain { .. })));
        assert!(matches!("Vtilde[c=0]".parse::<ModuleSpec>(), Err(Error::ParameterDomain { .. })));
        assert!("Vtilde[c=3]".parse::<ModuleSpec>().is_ok());
        assert!(matches!("A[a=1,b=2]".parse::<ModuleSpec>(), Err(Error::Arity { .. })));
        assert!(matches!("U[d=1,c=2]".parse::<ModuleSpec>(), Err(Error::Arity { .. })));
        assert!(matches!("Q[d=1]".parse::<ModuleSpec>(), Err(Error::Arity { .. })));
        assert!(matches!("A[a=1.5,d=2]".parse::<ModuleSpec>(), Err(Error::Parse(_))));
        assert_eq!(spec("A[a=4,d=7]").tag(), FamilyTag::Ad);
        assert_eq!(spec("VirA[a=4]").tag(), FamilyTag::VirAa);
        assert_eq!(spec("VirA[b=0,a=4]").tag(), FamilyTag::VirA);
        assert_eq!(spec("A[ c=5, a=1/3,b=2 ]").to_string(), "A[a=1/3,b=2,c=5]");
    }

    #[test]
    fn act_examples() {
        let ac = act(&spec("A[a=1/3,b=2,c=5]"), L(2), 1);
        assert_eq!(ac, ActionCoefficient { coefficient: qr(16, 3), target: 3 });
        assert_eq!(act(&spec("A[a=4,d=7]"), L(3), 0), ActionCoefficient { coefficient: q(21), target: 3 });
        assert_eq!(act(&spec("B[a=1,d=2]"), L(2), -2), ActionCoefficient { coefficient: q(-6), target: 0 });
        assert_eq!(act(&spec("Utilde[d=3]"), I(2), -2), ActionCoefficient { coefficient: q(6), target: 0 });
        assert_eq!(act(&spec("Vtilde[c=3]"), I(0), 0), ActionCoefficient { coefficient: q(0), target: 0 });
        assert_eq!(act(&spec("Vtilde[c=3]"), I(-2), 0), ActionCoefficient { coefficient: q(3), target: -2 });
        assert!(act(&spec("U[d=3]"), CLI, 4).coefficient.is_zero());
    }

    #[test]
    fn act_is_graded() {
        for s in ["A[a=1/3,b=2,c=5]", "B[a=1,d=2]", "Vtilde[c=3]", "VirA[a=2]"] {
            let m = spec(s);
            for g in generators(4) {
                for t in -5..=5 {
                    assert_eq!(m.act(g, t).target - t, g.degree());
                }
            }
        }
    }

    #[test]
    fn rep_residual_examples() {
        let a = spec("A[a=3/7,b=-2/5,c=11/3]");
        for m in -3..=3 {
            for n in -3..=3 {
                assert!(rep_residual(&a, L(m), I(n), 2).is_empty());
                assert!(rep_residual(&spec("B[a=1,d=2]"), I(m), I(n), 1).is_empty());
            }
        }
        assert!(rep_residual(&spec("V[d=2]"), L(1), I(-1), 0).is_empty());
    }

    #[test]
    fn mutated_bracket_is_detected() {
        let r = rep_residual_with(&spec("A[a=1/2,b=0,c=1]"), L(1), I(1), 0, Mutation::SignFlip);
        assert_eq!(r, [(2, q(-2))].into());
    }

    #[test]
    fn scan_examples() {
        let r = scan_family(&spec("A[a=2,b=0,c=0]"), 10, 3).unwrap();
        assert_eq!(r.invariant_sets, vec![vec![-2]]);
        assert_eq!(r.boundary_flags, vec![false]);

        let r = scan_family(&spec("A[a=2,b=1,c=0]"), 10, 3).unwrap();
        let expected: Vec<i64> = (-7..=7).filter(|&t| t != -2).collect();
        assert_eq!(r.invariant_sets, vec![expected]);
        assert!(!r.looks_simple());

        let r = scan_family(&spec("A[a=1/2,b=0,c=1]"), 10, 3).unwrap();
        assert!(r.invariant_sets.is_empty());
        assert!(r.looks_simple());

        assert!(matches!(submodule_scan(&spec("U[d=1]"), 3, 3), Err(Error::Window(_))));
    }

    #[test]
    fn scan_agrees_with_simplicity_on_grid() {
        for a in ["2", "-3", "1/2", "7/3"] {
            for b in ["0", "1", "2", "-1/2"] {
                for c in ["0", "1"] {
                    let m = spec(&format!("A[a={a},b={b},c={c}]"));
                    let r = scan_family(&m, 12, 3).unwrap();
                    assert_eq!(r.boundary_flags.iter().filter(|f| **f).count(), 0, "{m}");
                    assert_eq!(r.invariant_sets.is_empty(), simplicity_predicate(&m).unwrap(), "{m}");
                }
            }
        }
    }

    #[test]
    fn simplicity_examples() {
        assert!(simplicity_predicate(&spec("A[a=1/3,b=0,c=0]")).unwrap());
        assert!(!simplicity_predicate(&spec("A[a=2,b=1,c=0]")).unwrap());
        assert!(simplicity_predicate(&spec("A[a=2,b=1,c=5]")).unwrap());
        assert!(matches!(simplicity_predicate(&spec("U[d=1]")), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn rescaling_witness() {
        // A[a,1,c] -> ScaledCurrent(a,c), w_t -> v_t/(a+t)
        let a = qr(1, 2);
        let src = spec("A[a=1/2,b=1,c=3]");
        let dst = ScaledCurrent { a: a.clone(), c: q(3) };
        let r = intertwiner_residual(&src, &dst, |t| (&a + &q(t)).recip().unwrap(), 0, 12, 3).unwrap();
        assert!(r.is_zero(), "{r:?}");
    }

    #[test]
    fn constant_current_is_not_rescaled() {
        let a = qr(1, 2);
        let src = spec("A[a=1/2,b=0,c=3]");
        let dst = spec("A[a=1/2,b=1,c=3]");
        let r = intertwiner_residual(&src, &dst, |t| (&a + &q(t)).recip().unwrap(), 0, 12, 3).unwrap();
        assert!(!r.is_zero());
    }

    #[test]
    fn relabel_witness() {
        let r = intertwiner_residual(&spec("A[a=1/3,b=5,c=2]"), &spec("A[a=4/3,b=5,c=2]"), |_| q(1), -1, 12, 3).unwrap();
        assert!(r.is_zero());
        assert!(r.checked > 0);
    }

    #[test]
    fn mismatched_b_has_residual() {
        let r = intertwiner_residual(&spec("A[a=1/2,b=0,c=0]"), &spec("A[a=1/2,b=2,c=0]"), |_| q(1), 0, 12, 3).unwrap();
        assert!(!r.is_zero());
        assert!(r.witness.is_some());
    }

    #[test]
    fn vanishing_scale_is_rejected() {
        let m = spec("A[a=0,b=1,c=0]");
        let err = intertwiner_residual(&m, &m, |t| q(t), 0, 5, 2).unwrap_err();
        assert_eq!(err, Error::VanishingScale(0));
    }

    #[test]
    fn subquotient_kinds() {
        let a_prime = Subquotient::new(spec("VirA[a=5/2]"), set(&[0]), 12, 3).unwrap();
        assert_eq!(a_prime.kind(), SubquotientKind::Submodule);
        let b_prime = Subquotient::new(spec("VirB[a=5/2]"), set(&[0]), 12, 3).unwrap();
        assert_eq!(b_prime.kind(), SubquotientKind::Quotient);
        let a00 = Subquotient::new(spec("VirA[a=0,b=0]"), set(&[0]), 12, 3).unwrap();
        assert_eq!(a00.kind(), SubquotientKind::Quotient);
        assert!(Subquotient::new(spec("A[a=1/2,b=3,c=1]"), set(&[0]), 12, 3).is_err());
    }

    #[test]
    fn tilde_families_restrict_to_decomposable_vir_module() {
        for m in [spec("Utilde[d=3]"), spec("Vtilde[c=-2/7]")] {
            for n in -5..=5 {
                for t in -8..=8 {
                    let expected = if n + t != 0 { q(t) } else { q(0) };
                    assert_eq!(m.l_coeff(n, t), expected);
                }
            }
        }
    }
}
