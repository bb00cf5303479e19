//! Uniform interpolation by rewriting quantified sequents: expressions with
//! quantified-sequent leaves, the rank order, the interpolant assignment for
//! G4iLL and normalization.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::calculus::{instances_of, RuleInstance, RuleTag};
use crate::error::{Error, Result};
use crate::prover::G4Prover;
use crate::sequent::{conjoin, sequent_less, Sequent};
use crate::simplify::compact;
use crate::syntax::{Formula, Name, Notation};

pub const DEFAULT_CEILING: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    Forall,
    Exists,
}

impl FromStr for Quantifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Quantifier> {
        match s {
            "forall" | "all" | "A" => Ok(Quantifier::Forall),
            "exists" | "ex" | "E" => Ok(Quantifier::Exists),
            _ => Err(Error::Config(format!("unknown quantifier {s}"))),
        }
    }
}

/// A quantified sequent ∀pS or ∃pS.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QSeq {
    pub quantifier: Quantifier,
    pub atom: Name,
    pub seq: Sequent,
}

/// Formulas whose leaves may be quantified sequents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum UExpr {
    Bot,
    Atom(Name),
    And(Box<UExpr>, Box<UExpr>),
    Or(Box<UExpr>, Box<UExpr>),
    Imp(Box<UExpr>, Box<UExpr>),
    Circle(Box<UExpr>),
    Quant(QSeq),
}

impl From<&Formula> for UExpr {
    fn from(f: &Formula) -> UExpr {
        match f {
            Formula::Bot => UExpr::Bot,
            Formula::Atom(a) => UExpr::Atom(a.clone()),
            Formula::And(a, b) => UExpr::and((&**a).into(), (&**b).into()),
            Formula::Or(a, b) => UExpr::or((&**a).into(), (&**b).into()),
            Formula::Imp(a, b) => UExpr::imp((&**a).into(), (&**b).into()),
            Formula::Circle(a) => UExpr::circle((&**a).into()),
        }
    }
}

impl From<Formula> for UExpr {
    fn from(f: Formula) -> UExpr {
        UExpr::from(&f)
    }
}

impl UExpr {
    /// The leaf QSeq(q, p, s); the empty sequent resolves at once to ⊤ for
    /// ∃ and ⊥ for ∀.
    pub fn qseq(quantifier: Quantifier, atom: &str, seq: Sequent) -> UExpr {
        if seq.is_empty() {
            return match quantifier {
                Quantifier::Exists => UExpr::top(),
                Quantifier::Forall => UExpr::Bot,
            };
        }
        UExpr::Quant(QSeq {
            quantifier,
            atom: Arc::from(atom),
            seq,
        })
    }

    pub fn and(a: UExpr, b: UExpr) -> UExpr {
        UExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: UExpr, b: UExpr) -> UExpr {
        UExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: UExpr, b: UExpr) -> UExpr {
        UExpr::Imp(Box::new(a), Box::new(b))
    }

    pub fn circle(a: UExpr) -> UExpr {
        UExpr::Circle(Box::new(a))
    }

    pub fn top() -> UExpr {
        UExpr::imp(UExpr::Bot, UExpr::Bot)
    }

    /// The quantified leaves, left to right.
    pub fn leaves(&self) -> Vec<&QSeq> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a QSeq>) {
        match self {
            UExpr::Bot | UExpr::Atom(_) => {}
            UExpr::And(a, b) | UExpr::Or(a, b) | UExpr::Imp(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
            UExpr::Circle(a) => a.collect_leaves(out),
            UExpr::Quant(q) => out.push(q),
        }
    }

    pub fn is_plain(&self) -> bool {
        self.leaves().is_empty()
    }

    pub fn to_formula(&self) -> Option<Formula> {
        self.substitute(&mut |_| None)
    }

    /// Replaces every leaf via `leaf`; `None` if some leaf stays unresolved.
    fn substitute(&self, leaf: &mut dyn FnMut(&QSeq) -> Option<Formula>) -> Option<Formula> {
        Some(match self {
            UExpr::Bot => Formula::Bot,
            UExpr::Atom(a) => Formula::Atom(a.clone()),
            UExpr::And(a, b) => Formula::and(a.substitute(leaf)?, b.substitute(leaf)?),
            UExpr::Or(a, b) => Formula::or(a.substitute(leaf)?, b.substitute(leaf)?),
            UExpr::Imp(a, b) => Formula::imp(a.substitute(leaf)?, b.substitute(leaf)?),
            UExpr::Circle(a) => Formula::circle(a.substitute(leaf)?),
            UExpr::Quant(q) => leaf(q)?,
        })
    }

    /// Replaces the `index`-th leaf (left to right) by `with`.
    fn replace_leaf(&self, index: &mut usize, with: &UExpr) -> UExpr {
        let mut go = |e: &UExpr| e.replace_leaf(index, with);
        match self {
            UExpr::Bot | UExpr::Atom(_) => self.clone(),
            UExpr::And(a, b) => {
                let a = go(a);
                UExpr::and(a, go(b))
            }
            UExpr::Or(a, b) => {
                let a = go(a);
                UExpr::or(a, go(b))
            }
            UExpr::Imp(a, b) => {
                let a = go(a);
                UExpr::imp(a, go(b))
            }
            UExpr::Circle(a) => UExpr::circle(go(a)),
            UExpr::Quant(_) => {
                if *index == 0 {
                    *index = usize::MAX;
                    with.clone()
                } else {
                    *index = index.wrapping_sub(1);
                    self.clone()
                }
            }
        }
    }

    pub fn render(&self, notation: Notation) -> String {
        let mut next = 0usize;
        let mut names = Vec::new();
        let skeleton = self
            .substitute(&mut |q| {
                let name = format!("@{next}");
                next += 1;
                names.push(q.clone());
                Some(Formula::atom(&name))
            })
            .expect("every leaf is named");
        let mut text = skeleton.render(notation);
        for (i, q) in names.iter().enumerate().rev() {
            let quant = match (q.quantifier, notation) {
                (Quantifier::Forall, Notation::Ascii) => "forall ",
                (Quantifier::Exists, Notation::Ascii) => "exists ",
                (Quantifier::Forall, Notation::Unicode) => "∀",
                (Quantifier::Exists, Notation::Unicode) => "∃",
                (Quantifier::Forall, Notation::Latex) => "\\forall ",
                (Quantifier::Exists, Notation::Latex) => "\\exists ",
            };
            let leaf = format!("{quant}{}({})", q.atom, q.seq.render(notation));
            text = text.replace(&format!("@{i}"), &leaf);
        }
        text
    }
}

impl fmt::Display for UExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Notation::Ascii))
    }
}

fn fold_and(items: Vec<UExpr>) -> UExpr {
    items.into_iter().reduce(UExpr::and).unwrap_or_else(UExpr::top)
}

fn fold_or(items: Vec<UExpr>) -> UExpr {
    items.into_iter().reduce(UExpr::or).unwrap_or(UExpr::Bot)
}

/// The rank order: plain formulas by ≪ on (⇒φ), plain below quantified,
/// and otherwise the multiset extension of ≪ to the quantified leaves.
pub fn rank_less(a: &UExpr, b: &UExpr) -> bool {
    match (a.to_formula(), b.to_formula()) {
        (Some(x), Some(y)) => sequent_less(&Sequent::goal(x), &Sequent::goal(y)),
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => {
            let xs: Vec<&Sequent> = a.leaves().into_iter().map(|q| &q.seq).collect();
            let ys: Vec<&Sequent> = b.leaves().into_iter().map(|q| &q.seq).collect();
            nested_multiset_less(xs, ys)
        }
    }
}

/// Multiset extension of the sequent order to multisets of sequents.
fn nested_multiset_less(mut xs: Vec<&Sequent>, mut ys: Vec<&Sequent>) -> bool {
    let mut i = 0;
    while i < xs.len() {
        if let Some(j) = ys.iter().position(|y| *y == xs[i]) {
            ys.swap_remove(j);
            xs.swap_remove(i);
        } else {
            i += 1;
        }
    }
    !ys.is_empty() && xs.iter().all(|x| ys.iter().any(|y| sequent_less(x, y)))
}

/// Rule subsets over which rewriting may be run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CalculusHandle {
    /// All rules of G4iLL.
    Full,
    LandOnly,
    RorOnly,
}

impl CalculusHandle {
    pub fn rules(self) -> &'static [RuleTag] {
        match self {
            CalculusHandle::Full => crate::calculus::Calculus::G4iLL.rules(),
            CalculusHandle::LandOnly => &[RuleTag::LAnd],
            CalculusHandle::RorOnly => &[RuleTag::ROr0, RuleTag::ROr1],
        }
    }
}

impl FromStr for CalculusHandle {
    type Err = Error;

    fn from_str(s: &str) -> Result<CalculusHandle> {
        match s.to_ascii_lowercase().as_str() {
            "full" | "g4" | "g4ill" => Ok(CalculusHandle::Full),
            "land-only" | "land" => Ok(CalculusHandle::LandOnly),
            "ror-only" | "ror" => Ok(CalculusHandle::RorOnly),
            _ => Err(Error::Config(format!("unknown calculus {s}"))),
        }
    }
}

impl fmt::Display for CalculusHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CalculusHandle::Full => "full",
            CalculusHandle::LandOnly => "Land-only",
            CalculusHandle::RorOnly => "Ror-only",
        })
    }
}

/// A pair (∃ part, ∀ part).
pub type Parts = (UExpr, UExpr);

fn pick(q: Quantifier, (e, a): Parts) -> UExpr {
    match q {
        Quantifier::Exists => e,
        Quantifier::Forall => a,
    }
}

/// The interpolant assignment.
pub struct Assignment;

impl Assignment {
    /// Parts assigned to an instance with conclusion S.
    pub fn principal(p: &str, inst: &RuleInstance) -> Parts {
        let e = |i: usize| UExpr::qseq(Quantifier::Exists, p, inst.premises[i].clone());
        let a = |i: usize| UExpr::qseq(Quantifier::Forall, p, inst.premises[i].clone());
        match inst.rule {
            RuleTag::Ax => (UExpr::top(), UExpr::top()),
            RuleTag::LBot => (UExpr::Bot, UExpr::top()),
            RuleTag::RAnd => (UExpr::and(e(0), e(1)), UExpr::and(a(0), a(1))),
            RuleTag::LOr => (
                UExpr::or(e(0), e(1)),
                UExpr::and(UExpr::imp(e(0), a(0)), UExpr::imp(e(1), a(1))),
            ),
            RuleTag::RImp => (UExpr::top(), UExpr::imp(e(0), a(0))),
            RuleTag::LImp | RuleTag::LImpImp | RuleTag::RCircleImp => (
                UExpr::and(e(0), UExpr::imp(a(0), e(1))),
                UExpr::and(a(0), a(1)),
            ),
            RuleTag::RCircle | RuleTag::LCircle => (UExpr::circle(e(0)), UExpr::circle(a(0))),
            RuleTag::LCircleImp => (
                UExpr::and(UExpr::circle(e(0)), UExpr::imp(UExpr::circle(a(0)), e(1))),
                UExpr::and(UExpr::circle(a(0)), a(1)),
            ),
            RuleTag::LAnd
            | RuleTag::ROr0
            | RuleTag::ROr1
            | RuleTag::LAtomImp
            | RuleTag::LAndImp
            | RuleTag::LOrImp => (e(0), a(0)),
            RuleTag::Cut => unreachable!("cut is never enumerated"),
        }
    }

    /// Whether `s` is nonprincipal for at least one instance of `rule`.
    pub fn nonprincipal_applies(rule: RuleTag, s: &Sequent) -> bool {
        match rule {
            RuleTag::Ax => match &s.suc {
                None => true,
                Some(f) => f.is_atom() && !s.ant.contains(f),
            },
            RuleTag::LBot => !s.ant.contains(&Formula::Bot),
            RuleTag::LCircle => s.suc.as_ref().is_none_or(Formula::is_circle),
            RuleTag::Cut => false,
            r if r.is_right() => s.suc.is_none(),
            _ => true,
        }
    }

    /// Nonprincipal parts of `rule` at `s`.
    pub fn nonprincipal(rule: RuleTag, p: &str, s: &Sequent) -> Parts {
        let antecedent = || UExpr::qseq(Quantifier::Exists, p, s.antecedent());
        match rule {
            RuleTag::RCircleImp => {
                let e = if s.suc.is_none() { UExpr::top() } else { antecedent() };
                (e, UExpr::Bot)
            }
            RuleTag::LCircleImp => {
                let mut ex = Vec::new();
                let mut all = Vec::new();
                for f in s.ant.distinct() {
                    if let Formula::Circle(body) = f {
                        let seq = Sequent::from_parts(s.ant.without(f).with((**body).clone()), None);
                        ex.push(UExpr::circle(UExpr::qseq(Quantifier::Exists, p, seq)));
                    }
                }
                for g in s.ant.distinct() {
                    let Formula::Imp(lhs, rhs) = g else { continue };
                    if !lhs.is_circle() {
                        continue;
                    }
                    let rest = s.ant.without(g);
                    let s0 = Sequent::from_parts(rest.clone(), Some((**lhs).clone()));
                    let s1 = Sequent::from_parts(rest.with((**rhs).clone()), s.suc.clone());
                    let box0 = UExpr::circle(UExpr::qseq(Quantifier::Forall, p, s0.clone()));
                    ex.push(UExpr::and(
                        UExpr::qseq(Quantifier::Exists, p, s0),
                        UExpr::imp(box0.clone(), UExpr::qseq(Quantifier::Exists, p, s1.clone())),
                    ));
                    all.push(UExpr::and(box0, UExpr::qseq(Quantifier::Forall, p, s1)));
                }
                let gamma = fold_and(ex);
                let e = if s.suc.is_none() {
                    gamma
                } else {
                    UExpr::and(antecedent(), gamma)
                };
                (e, fold_or(all))
            }
            _ => (UExpr::top(), UExpr::Bot),
        }
    }

    /// The atom clause ∀ᵃᵗ or ∃ᵃᵗ.
    pub fn atomic(q: Quantifier, p: &str, s: &Sequent) -> UExpr {
        let mut items = Vec::new();
        let free_atom = |f: &Formula| matches!(f, Formula::Atom(a) if &**a != p);
        match q {
            Quantifier::Forall => {
                if let Some(f) = &s.suc {
                    if free_atom(f) || f.is_top() {
                        items.push(UExpr::from(f));
                    }
                }
            }
            Quantifier::Exists => {
                for f in s.ant.distinct() {
                    if free_atom(f) || *f == Formula::Bot {
                        items.push(UExpr::from(f));
                    }
                }
            }
        }
        for f in s.ant.distinct() {
            let Formula::Imp(lhs, rhs) = f else { continue };
            if !free_atom(lhs) {
                continue;
            }
            let seq = Sequent::from_parts(s.ant.without(f).with((**rhs).clone()), s.suc.clone());
            let inner = UExpr::qseq(q, p, seq);
            items.push(match q {
                Quantifier::Forall => UExpr::and(UExpr::from(&**lhs), inner),
                Quantifier::Exists => UExpr::imp(UExpr::from(&**lhs), inner),
            });
        }
        match q {
            Quantifier::Forall => fold_or(items),
            Quantifier::Exists => fold_and(items),
        }
    }
}

/// The one-step expansion of a leaf: ∀⁺ ∨ ∀⁻ ∨ ∀ᵃᵗ or ∃⁺ ∧ ∃⁻ ∧ ∃ᵃᵗ, where
/// each principal part is its own operand and the remaining two are single
/// operands.
pub fn expand(leaf: &QSeq, calc: CalculusHandle) -> UExpr {
    let (q, p, s) = (leaf.quantifier, &*leaf.atom, &leaf.seq);
    let mut items: Vec<UExpr> = instances_of(calc.rules(), s)
        .iter()
        .map(|inst| pick(q, Assignment::principal(p, inst)))
        .collect();
    let nonprincipal: Vec<UExpr> = calc
        .rules()
        .iter()
        .filter(|r| Assignment::nonprincipal_applies(**r, s))
        .map(|r| pick(q, Assignment::nonprincipal(*r, p, s)))
        .collect();
    let out = match q {
        Quantifier::Forall => {
            items.push(fold_or(nonprincipal));
            items.push(Assignment::atomic(q, p, s));
            fold_or(items)
        }
        Quantifier::Exists => {
            items.push(fold_and(nonprincipal));
            items.push(Assignment::atomic(q, p, s));
            fold_and(items)
        }
    };
    assert!(
        rank_less(&out, &UExpr::Quant(leaf.clone())),
        "assignment for {} is not of lower rank",
        UExpr::Quant(leaf.clone())
    );
    out
}

/// Order in which quantified leaves are rewritten.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// Rewrites one leaf of `e`, chosen by `strategy`.
pub fn rewrite_step_with(e: &UExpr, calc: CalculusHandle, strategy: Strategy) -> Result<UExpr> {
    let leaves = e.leaves();
    if leaves.is_empty() {
        return Err(Error::NormalForm);
    }
    let index = match strategy {
        Strategy::Leftmost => 0,
        Strategy::Rightmost => leaves.len() - 1,
    };
    let with = expand(leaves[index], calc);
    let mut counter = index;
    Ok(e.replace_leaf(&mut counter, &with))
}

pub fn rewrite_step(e: &UExpr, calc: CalculusHandle) -> Result<UExpr> {
    rewrite_step_with(e, calc, Strategy::Leftmost)
}

/// Normalizes by memoized rewriting. Each memo miss is one rewrite step.
pub struct Normalizer {
    calc: CalculusHandle,
    strategy: Strategy,
    simplified: bool,
    ceiling: u64,
    steps: u64,
    memo: HashMap<QSeq, Formula>,
}

impl Normalizer {
    pub fn new(calc: CalculusHandle) -> Normalizer {
        Normalizer {
            calc,
            strategy: Strategy::Leftmost,
            simplified: false,
            ceiling: DEFAULT_CEILING,
            steps: 0,
            memo: HashMap::new(),
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Normalizer {
        self.strategy = strategy;
        self
    }

    /// Compact each leaf's normal form before it is reused.
    pub fn simplifying(mut self) -> Normalizer {
        self.simplified = true;
        self
    }

    pub fn with_ceiling(mut self, ceiling: u64) -> Normalizer {
        self.ceiling = ceiling;
        self
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn normalize(&mut self, e: &UExpr) -> Result<Formula> {
        let mut leaves: Vec<QSeq> = e.leaves().into_iter().cloned().collect();
        if self.strategy == Strategy::Rightmost {
            leaves.reverse();
        }
        for leaf in &leaves {
            self.leaf(leaf)?;
        }
        let memo = &self.memo;
        Ok(e.substitute(&mut |q| memo.get(q).cloned()).expect("all leaves resolved"))
    }

    fn leaf(&mut self, q: &QSeq) -> Result<Formula> {
        if let Some(f) = self.memo.get(q) {
            return Ok(f.clone());
        }
        self.steps += 1;
        if self.steps > self.ceiling {
            return Err(Error::StepCeiling(format!(
                "{} steps while normalizing {}",
                self.ceiling,
                UExpr::Quant(q.clone())
            )));
        }
        let mut f = self.normalize(&expand(q, self.calc))?;
        if self.simplified {
            f = compact(&f);
        }
        self.memo.insert(q.clone(), f.clone());
        Ok(f)
    }

    pub fn quantify(&mut self, q: Quantifier, s: &Sequent, p: &str) -> Result<Formula> {
        let f = self.normalize(&UExpr::qseq(q, p, s.clone()))?;
        Ok(if self.simplified { compact(&f) } else { f })
    }

    pub fn forall(&mut self, s: &Sequent, p: &str) -> Result<Formula> {
        self.quantify(Quantifier::Forall, s, p)
    }

    pub fn exists(&mut self, s: &Sequent, p: &str) -> Result<Formula> {
        self.quantify(Quantifier::Exists, s, p)
    }
}

/// Normal form of `e` without simplification, leftmost leaves first.
pub fn normalize(e: &UExpr, calc: CalculusHandle) -> Result<Formula> {
    Normalizer::new(calc).normalize(e)
}

pub fn normalize_with(e: &UExpr, calc: CalculusHandle, strategy: Strategy) -> Result<Formula> {
    Normalizer::new(calc).with_strategy(strategy).normalize(e)
}

/// ∀pS over G4iLL, compacted.
pub fn forall_p(s: &Sequent, p: &str) -> Result<Formula> {
    Normalizer::new(CalculusHandle::Full).simplifying().forall(s, p)
}

/// ∃pS over G4iLL, compacted.
pub fn exists_p(s: &Sequent, p: &str) -> Result<Formula> {
    Normalizer::new(CalculusHandle::Full).simplifying().exists(s, p)
}

/// Quantifies the atoms of `ps` one after another, starting from `s` and
/// continuing on the formula obtained so far (as (⇒φ) for ∀, (φ⇒) for ∃).
/// With no atoms, ∀ gives the interpretation of `s` and ∃ the conjunction
/// of its antecedent.
pub fn quantify_multi(s: &Sequent, ps: &[&str], q: Quantifier) -> Result<Formula> {
    let mut norm = Normalizer::new(CalculusHandle::Full).simplifying();
    let Some((first, rest)) = ps.split_first() else {
        return Ok(compact(&match q {
            Quantifier::Forall => s.interpret(),
            Quantifier::Exists => conjoin(s.ant.iter().cloned()),
        }));
    };
    let mut f = norm.quantify(q, s, first)?;
    for p in rest {
        let seq = match q {
            Quantifier::Forall => Sequent::goal(f),
            Quantifier::Exists => Sequent::new([f], None),
        };
        f = norm.quantify(q, &seq, p)?;
    }
    Ok(f)
}

/// Outcome of checking (∀l), (∃r) and (∀∃) at one sequent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyReport {
    pub sequent: String,
    pub atom: String,
    pub forall: Formula,
    pub exists: Formula,
    pub forall_left: bool,
    pub exists_right: bool,
    pub derivable: bool,
    pub partitions: usize,
    pub forall_exists: bool,
    pub p_free: bool,
    pub failures: Vec<String>,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.forall_left && self.exists_right && self.forall_exists && self.p_free
    }
}

/// Checks the interpolant properties with a shared memo and prover.
pub struct PropertyChecker {
    norm: Normalizer,
    prover: G4Prover,
}

impl Default for PropertyChecker {
    fn default() -> Self {
        PropertyChecker::new()
    }
}

impl PropertyChecker {
    pub fn new() -> PropertyChecker {
        PropertyChecker {
            norm: Normalizer::new(CalculusHandle::Full).simplifying(),
            prover: G4Prover::new(),
        }
    }

    pub fn normalizer(&mut self) -> &mut Normalizer {
        &mut self.norm
    }

    pub fn prover(&mut self) -> &mut G4Prover {
        &mut self.prover
    }

    pub fn check(&mut self, s: &Sequent, p: &str) -> Result<PropertyReport> {
        let forall = self.norm.forall(s, p)?;
        let exists = self.norm.exists(s, p)?;
        let mut failures = Vec::new();
        let p_free = !forall.contains_atom(p) && !exists.contains_atom(p);
        if !p_free {
            failures.push(format!("{p} occurs in an interpolant"));
        }
        let forall_left = self.prover.decide(&s.with_ant(forall.clone()));
        if !forall_left {
            failures.push("(forall-l)".into());
        }
        let exists_right = self.prover.decide(&s.antecedent().with_suc(Some(exists.clone())));
        if !exists_right {
            failures.push("(exists-r)".into());
        }
        let derivable = self.prover.decide(s);
        let mut partitions = 0;
        let mut forall_exists = true;
        if derivable {
            for part in s.p_partitions(p) {
                partitions += 1;
                let e = self.norm.exists(&part.interp, p)?;
                let a = self.norm.forall(&part.interp, p)?;
                let suc = match (&part.rest.suc, &s.suc) {
                    (Some(f), _) => Some(f.clone()),
                    (None, Some(_)) => Some(a),
                    (None, None) => None,
                };
                let goal = Sequent::from_parts(part.rest.ant.with(e), suc);
                if !self.prover.decide(&goal) {
                    forall_exists = false;
                    failures.push(format!("(forall-exists) at {} | {}", part.rest, part.interp));
                }
            }
        }
        Ok(PropertyReport {
            sequent: s.to_string(),
            atom: p.to_string(),
            forall,
            exists,
            forall_left,
            exists_right,
            derivable,
            partitions,
            forall_exists,
            p_free,
            failures,
        })
    }
}

pub fn check_interpolant_properties(s: &Sequent, p: &str) -> Result<PropertyReport> {
    PropertyChecker::new().check(s, p)
}

/// Structural equality that visits each pair of shared subterms once.
pub fn same_formula(a: &Formula, b: &Formula) -> bool {
    fn go(a: &Formula, b: &Formula, seen: &mut HashSet<(usize, usize)>) -> bool {
        let key = (a as *const Formula as usize, b as *const Formula as usize);
        if key.0 == key.1 || seen.contains(&key) {
            return true;
        }
        let ok = match (a, b) {
            (Formula::Bot, Formula::Bot) => true,
            (Formula::Atom(x), Formula::Atom(y)) => x == y,
            (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::Or(a1, a2), Formula::Or(b1, b2))
            | (Formula::Imp(a1, a2), Formula::Imp(b1, b2)) => go(a1, b1, seen) && go(a2, b2, seen),
            (Formula::Circle(x), Formula::Circle(y)) => go(x, y, seen),
            _ => false,
        };
        if ok {
            seen.insert(key);
        }
        ok
    }
    go(a, b, &mut HashSet::new())
}

/// Number of nodes of the formula read as a tree, saturating.
pub fn tree_size(f: &Formula) -> u64 {
    fn go(f: &Formula, memo: &mut HashMap<usize, u64>) -> u64 {
        let key = f as *const Formula as usize;
        if let Some(n) = memo.get(&key) {
            return *n;
        }
        let n = match f {
            Formula::Bot | Formula::Atom(_) => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                1u64.saturating_add(go(a, memo)).saturating_add(go(b, memo))
            }
            Formula::Circle(a) => 1u64.saturating_add(go(a, memo)),
        };
        memo.insert(key, n);
        n
    }
    go(f, &mut HashMap::new())
}

/// Operands of a maximal left-nested ∧ (or ∨) chain.
pub fn chain(f: &Formula, conj: bool) -> Vec<Formula> {
    match (f, conj) {
        (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
            let mut out = chain(a, conj);
            out.extend(chain(b, conj));
            out
        }
        _ => vec![f.clone()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequent::parse_sequent;
    use crate::syntax::parse;

    fn seq(text: &str) -> Sequent {
        parse_sequent(text).unwrap()
    }

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    fn q(quant: Quantifier, text: &str) -> UExpr {
        UExpr::qseq(quant, "p", seq(text))
    }

    #[test]
    fn rank_examples() {
        let plain = UExpr::from(f("p & q"));
        assert!(rank_less(&plain, &q(Quantifier::Exists, "r =>")));
        assert!(rank_less(
            &q(Quantifier::Exists, "p, q =>"),
            &q(Quantifier::Forall, "p & q =>")
        ));
        let s = q(Quantifier::Exists, "p & q, r => s");
        assert!(!rank_less(&s, &s));
        assert!(!rank_less(&s, &plain));
        assert!(rank_less(&UExpr::from(f("p")), &UExpr::from(f("p & q"))));
    }

    #[test]
    fn empty_sequent_leaves_resolve() {
        assert_eq!(UExpr::qseq(Quantifier::Exists, "p", Sequent::empty()).to_formula(), Some(Formula::top()));
        assert_eq!(UExpr::qseq(Quantifier::Forall, "p", Sequent::empty()).to_formula(), Some(Formula::Bot));
    }

    #[test]
    fn land_step() {
        let e = q(Quantifier::Forall, "p & q, r, s => t");
        let step = rewrite_step(&e, CalculusHandle::LandOnly).unwrap();
        assert_eq!(step.to_string(), "forall p(p, q, r, s => t) | false | t");
        let e = q(Quantifier::Exists, "p & q, r, s => t");
        let step = rewrite_step(&e, CalculusHandle::LandOnly).unwrap();
        assert_eq!(step.to_string(), "exists p(p, q, r, s => t) & true & (r & s)");
        assert!(matches!(
            rewrite_step(&UExpr::from(f("p")), CalculusHandle::Full),
            Err(Error::NormalForm)
        ));
    }

    #[test]
    fn stepwise_agrees_with_memo() {
        for (text, calc) in [
            ("p & q, r, s => t", CalculusHandle::LandOnly),
            ("r => p | q", CalculusHandle::RorOnly),
            ("p -> q, O p => O q", CalculusHandle::Full),
        ] {
            for quant in [Quantifier::Forall, Quantifier::Exists] {
                let mut e = q(quant, text);
                let mut steps = 0;
                while !e.is_plain() {
                    e = rewrite_step(&e, calc).unwrap();
                    steps += 1;
                    assert!(steps < 10_000);
                }
                let memo = normalize(&q(quant, text), calc).unwrap();
                assert_eq!(e.to_formula().unwrap(), memo);
            }
        }
    }

    #[test]
    fn small_values() {
        assert_eq!(exists_p(&seq("p =>"), "p").unwrap(), Formula::top());
        assert_eq!(forall_p(&seq("=> p"), "p").unwrap(), Formula::Bot);
        assert_eq!(forall_p(&seq("q => q"), "p").unwrap(), Formula::top());
        assert_eq!(exists_p(&seq("p & q =>"), "p").unwrap(), f("q"));
    }

    #[test]
    fn properties_on_samples() {
        for text in ["=> O O p -> O p", "q => q", "=> p", "p -> q, O p => O q", "O (p -> r), O p => O r"] {
            for atom in ["p", "q"] {
                let r = check_interpolant_properties(&seq(text), atom).unwrap();
                assert!(r.holds(), "{text} {atom}: {:?}", r.failures);
            }
        }
    }

    #[test]
    fn dag_helpers() {
        let a = f("(p & q) | r");
        let b = f("(p & q) | r");
        assert!(same_formula(&a, &b));
        assert!(!same_formula(&a, &f("(p & q) | s")));
        assert_eq!(tree_size(&a), 5);
        assert_eq!(chain(&f("a | b | c"), false).len(), 3);
    }
}
