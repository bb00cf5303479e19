//! Single-conclusion sequents over multisets of formulas, composition,
//! interpretation as a formula, partitions and the multiset ordering that
//! makes backward search in the contraction-free calculus terminate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{Formula, Notation, Parser, Token};

/// Finite multiset of formulas, stored as a sorted association list so that
/// equality is multiset equality and iteration order is canonical.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset {
    counts: BTreeMap<Formula, usize>,
}

impl Multiset {
    pub fn new() -> Multiset {
        Multiset::default()
    }

    pub fn insert(&mut self, f: Formula) {
        *self.counts.entry(f).or_insert(0) += 1;
    }

    pub fn insert_n(&mut self, f: Formula, n: usize) {
        if n > 0 {
            *self.counts.entry(f).or_insert(0) += n;
        }
    }

    /// Removes one copy; returns false if there was none.
    pub fn remove(&mut self, f: &Formula) -> bool {
        match self.counts.get_mut(f) {
            Some(c) if *c > 1 => {
                *c -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(f);
                true
            }
            None => false,
        }
    }

    pub fn with(&self, f: Formula) -> Multiset {
        let mut m = self.clone();
        m.insert(f);
        m
    }

    /// A copy with one occurrence of `f` removed. Panics if absent.
    pub fn without(&self, f: &Formula) -> Multiset {
        let mut m = self.clone();
        assert!(m.remove(f), "{f} not in multiset");
        m
    }

    pub fn count(&self, f: &Formula) -> usize {
        self.counts.get(f).copied().unwrap_or(0)
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.counts.contains_key(f)
    }

    pub fn len(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct members with their multiplicities, in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&Formula, usize)> + '_ {
        self.counts.iter().map(|(f, c)| (f, *c))
    }

    /// Distinct members in canonical order.
    pub fn distinct(&self) -> impl Iterator<Item = &Formula> + '_ {
        self.counts.keys()
    }

    /// All occurrences, copies repeated, in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Formula> + '_ {
        self.counts
            .iter()
            .flat_map(|(f, c)| std::iter::repeat(f).take(*c))
    }

    pub fn union(&self, other: &Multiset) -> Multiset {
        let mut m = self.clone();
        for (f, c) in other.entries() {
            m.insert_n(f.clone(), c);
        }
        m
    }

    /// Multiset difference, truncated at zero.
    pub fn difference(&self, other: &Multiset) -> Multiset {
        let mut m = Multiset::new();
        for (f, c) in self.entries() {
            let d = c.saturating_sub(other.count(f));
            m.insert_n(f.clone(), d);
        }
        m
    }

    pub fn is_submultiset(&self, other: &Multiset) -> bool {
        self.entries().all(|(f, c)| other.count(f) >= c)
    }

    /// Distinct members as a multiset with every count set to one.
    pub fn support(&self) -> Multiset {
        Multiset {
            counts: self.counts.keys().map(|f| (f.clone(), 1)).collect(),
        }
    }
}

impl FromIterator<Formula> for Multiset {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for f in iter {
            m.insert(f);
        }
        m
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

/// Dershowitz–Manna extension of the weight order: `d` is below `g` iff `d`
/// arises from `g` by replacing at least one member by finitely many members
/// of strictly smaller weight each.
pub fn multiset_less(d: &Multiset, g: &Multiset) -> bool {
    let removed = g.difference(d);
    if removed.is_empty() {
        return false;
    }
    let heaviest = removed.distinct().map(Formula::weight).max().unwrap_or(0);
    d.difference(g).distinct().all(|f| f.weight() < heaviest)
}

/// A sequent Γ ⇒ Δ with at most one succedent formula.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "SequentJson", try_from = "SequentJson")]
pub struct Sequent {
    pub ant: Multiset,
    pub suc: Option<Formula>,
}

impl Sequent {
    pub fn new(ant: impl IntoIterator<Item = Formula>, suc: Option<Formula>) -> Sequent {
        Sequent {
            ant: ant.into_iter().collect(),
            suc,
        }
    }

    pub fn empty() -> Sequent {
        Sequent {
            ant: Multiset::new(),
            suc: None,
        }
    }

    /// ( ⇒ f )
    pub fn goal(f: Formula) -> Sequent {
        Sequent {
            ant: Multiset::new(),
            suc: Some(f),
        }
    }

    pub fn from_parts(ant: Multiset, suc: Option<Formula>) -> Sequent {
        Sequent { ant, suc }
    }

    pub fn is_empty(&self) -> bool {
        self.ant.is_empty() && self.suc.is_none()
    }

    /// Antecedent only: ( Γ ⇒ ).
    pub fn antecedent(&self) -> Sequent {
        Sequent::from_parts(self.ant.clone(), None)
    }

    /// Succedent only: ( ⇒ Δ ).
    pub fn succedent(&self) -> Sequent {
        Sequent::from_parts(Multiset::new(), self.suc.clone())
    }

    pub fn with_ant(&self, f: Formula) -> Sequent {
        Sequent::from_parts(self.ant.with(f), self.suc.clone())
    }

    pub fn with_suc(&self, suc: Option<Formula>) -> Sequent {
        Sequent::from_parts(self.ant.clone(), suc)
    }

    /// All formula occurrences, antecedent and succedent together.
    pub fn all(&self) -> Multiset {
        let mut m = self.ant.clone();
        if let Some(s) = &self.suc {
            m.insert(s.clone());
        }
        m
    }

    pub fn contains_atom(&self, p: &str) -> bool {
        self.ant.distinct().any(|f| f.contains_atom(p))
            || self.suc.as_ref().is_some_and(|f| f.contains_atom(p))
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<crate::syntax::Name> {
        let mut out = std::collections::BTreeSet::new();
        for f in self.all().distinct() {
            f.collect_atoms(&mut out);
        }
        out
    }

    /// Sum of weights over all occurrences.
    pub fn weight(&self) -> usize {
        self.all().iter().map(Formula::weight).sum()
    }

    /// The sequent composition (Γ⇒Δ)·(Π⇒Σ) = (Γ,Π ⇒ Δ,Σ).
    pub fn compose(&self, other: &Sequent) -> Result<Sequent> {
        let suc = match (&self.suc, &other.suc) {
            (Some(_), Some(_)) => return Err(Error::Composition),
            (Some(s), None) | (None, Some(s)) => Some(s.clone()),
            (None, None) => None,
        };
        Ok(Sequent::from_parts(self.ant.union(&other.ant), suc))
    }

    /// Whether `part` is a sub-sequent, i.e. self = S'·part for some S'.
    pub fn has_part(&self, part: &Sequent) -> bool {
        part.ant.is_submultiset(&self.ant)
            && (part.suc.is_none() || part.suc == self.suc)
    }

    /// The complement S' with self = S'·part.
    pub fn remove_part(&self, part: &Sequent) -> Result<Sequent> {
        if !self.has_part(part) {
            return Err(Error::Decomposition(part.to_string()));
        }
        let suc = if part.suc.is_some() { None } else { self.suc.clone() };
        Ok(Sequent::from_parts(self.ant.difference(&part.ant), suc))
    }

    /// I(Γ⇒Δ) = ⋀Γ → ⋁Δ with ⋀∅ = ⊤ and ⋁∅ = ⊥; the conjunction is a left
    /// fold over the canonical order.
    pub fn interpret(&self) -> Formula {
        let lhs = conjoin(self.ant.iter().cloned());
        let rhs = self.suc.clone().unwrap_or(Formula::Bot);
        Formula::imp(lhs, rhs)
    }

    /// All p-partitions: each antecedent occurrence and the succedent go to
    /// the rest or the interpolation side, and p does not occur in the rest.
    /// Partitions are listed with larger rests first.
    pub fn p_partitions(&self, p: &str) -> Vec<Partition> {
        let entries: Vec<(&Formula, usize)> = self.ant.entries().collect();
        let mut out = Vec::new();
        let suc_choices: Vec<bool> = match &self.suc {
            None => vec![false],
            Some(f) if f.contains_atom(p) => vec![false],
            Some(_) => vec![true, false],
        };
        let mut rest_counts = vec![0usize; entries.len()];
        fn go(
            i: usize,
            entries: &[(&Formula, usize)],
            rest_counts: &mut Vec<usize>,
            p: &str,
            emit: &mut dyn FnMut(&[usize]),
        ) {
            if i == entries.len() {
                emit(rest_counts);
                return;
            }
            let (f, c) = entries[i];
            let max = if f.contains_atom(p) { 0 } else { c };
            for k in (0..=max).rev() {
                rest_counts[i] = k;
                go(i + 1, entries, rest_counts, p, emit);
            }
        }
        for suc_in_rest in suc_choices {
            go(0, &entries, &mut rest_counts, p, &mut |counts| {
                let mut rest = Multiset::new();
                let mut interp = Multiset::new();
                for ((f, c), k) in entries.iter().zip(counts) {
                    rest.insert_n((*f).clone(), *k);
                    interp.insert_n((*f).clone(), c - k);
                }
                let (rs, is) = if suc_in_rest {
                    (self.suc.clone(), None)
                } else {
                    (None, self.suc.clone())
                };
                out.push(Partition {
                    rest: Sequent::from_parts(rest, rs),
                    interp: Sequent::from_parts(interp, is),
                });
            });
        }
        out
    }

    pub fn render(&self, notation: Notation) -> String {
        let arrow = match notation {
            Notation::Ascii => "=>",
            Notation::Unicode => "⇒",
            Notation::Latex => "\\Rightarrow",
        };
        let ant: Vec<String> = self.ant.iter().map(|f| f.render(notation)).collect();
        let mut out = ant.join(", ");
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(arrow);
        if let Some(s) = &self.suc {
            out.push(' ');
            out.push_str(&s.render(notation));
        }
        out
    }
}

/// Left-folded conjunction; ⊤ when empty.
pub fn conjoin(items: impl IntoIterator<Item = Formula>) -> Formula {
    items
        .into_iter()
        .reduce(Formula::and)
        .unwrap_or_else(Formula::top)
}

/// Left-folded disjunction; ⊥ when empty.
pub fn disjoin(items: impl IntoIterator<Item = Formula>) -> Formula {
    items.into_iter().reduce(Formula::or).unwrap_or(Formula::Bot)
}

/// sequent_less(s0, s1): the multiset order on all occurrences.
pub fn sequent_less(s0: &Sequent, s1: &Sequent) -> bool {
    multiset_less(&s0.all(), &s1.all())
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Notation::Ascii))
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Notation::Unicode))
    }
}

/// A split S = rest · interp.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    pub rest: Sequent,
    pub interp: Sequent,
}

/// Parses `f1, f2, ... => g` or `f1, ... =>`. Text without `=>` is read as
/// a single succedent formula.
pub fn parse_sequent(text: &str) -> Result<Sequent> {
    let mut parser = Parser::new(text)?;
    let has_turnstile = text.contains("=>") || text.contains('⇒');
    if !has_turnstile {
        let f = parser.formula()?;
        parser.expect_end()?;
        return Ok(Sequent::goal(f));
    }
    let mut ant = Vec::new();
    if parser.peek() != Some(&Token::Turnstile) {
        loop {
            ant.push(parser.formula()?);
            match parser.peek() {
                Some(Token::Comma) => {
                    parser.bump();
                }
                Some(Token::Turnstile) => break,
                _ => return parser.error("expected ',' or '=>'"),
            }
        }
    }
    parser.bump();
    let suc = if parser.peek().is_some() {
        Some(parser.formula()?)
    } else {
        None
    };
    parser.expect_end()?;
    Ok(Sequent::new(ant, suc))
}

impl std::str::FromStr for Sequent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Sequent> {
        parse_sequent(s)
    }
}

#[derive(Serialize, Deserialize)]
struct SequentJson {
    ant: Vec<Formula>,
    suc: Vec<Formula>,
}

impl From<Sequent> for SequentJson {
    fn from(s: Sequent) -> Self {
        SequentJson {
            ant: s.ant.iter().cloned().collect(),
            suc: s.suc.into_iter().collect(),
        }
    }
}

impl TryFrom<SequentJson> for Sequent {
    type Error = Error;

    fn try_from(j: SequentJson) -> Result<Sequent> {
        if j.suc.len() > 1 {
            return Err(Error::Json("succedent holds more than one formula".into()));
        }
        Ok(Sequent::new(j.ant, j.suc.into_iter().next()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use proptest::prelude::*;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn seq(s: &str) -> Sequent {
        parse_sequent(s).unwrap()
    }

    fn ms(items: &[&str]) -> Multiset {
        items.iter().map(|s| f(s)).collect()
    }

    /// Reference implementation: search over all ways of choosing a nonempty
    /// sub-multiset X of g to remove and assigning every formula of d − (g − X)
    /// to a removed member of strictly greater weight.
    fn brute_less(d: &Multiset, g: &Multiset) -> bool {
        let g_items: Vec<Formula> = g.iter().cloned().collect();
        let n = g_items.len();
        for mask in 1u32..(1 << n) {
            let removed: Multiset = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| g_items[i].clone())
                .collect();
            let kept = g.difference(&removed);
            if !kept.is_submultiset(d) {
                continue;
            }
            let added = d.difference(&kept);
            let ok = added
                .iter()
                .all(|a| removed.iter().any(|r| r.weight() > a.weight()));
            if ok {
                return true;
            }
        }
        false
    }

    #[test]
    fn multiset_order_examples() {
        assert!(multiset_less(&ms(&["p", "q"]), &ms(&["p & q"])));
        assert!(!multiset_less(&ms(&["p"]), &ms(&["p"])));
        assert!(multiset_less(&ms(&["p", "p", "p"]), &ms(&["p | p"])));
        assert!(brute_less(&ms(&["p", "p", "p"]), &ms(&["p | p"])));
        assert!(multiset_less(&ms(&[]), &ms(&["p"])));
        assert!(!multiset_less(&ms(&["p", "q"]), &ms(&["p"])));
    }

    #[test]
    fn sequent_order_examples() {
        assert!(sequent_less(&seq("p, q, r, s => t"), &seq("p & q, r, s => t")));
        let s = seq("p & q, r, s => t");
        assert!(!sequent_less(&s, &s));
        assert!(sequent_less(&seq("r, O p => s"), &seq("r, q -> O p => s")));
    }

    #[test]
    fn interpretation() {
        assert_eq!(seq("p, q => r").interpret(), f("p & q -> r"));
        assert_eq!(seq("=>").interpret(), f("true -> false"));
        assert_eq!(seq("p =>").interpret(), f("p -> false"));
    }

    #[test]
    fn composition() {
        assert_eq!(seq("p =>").compose(&seq("q => r")).unwrap(), seq("p, q => r"));
        let s = seq("a, b => c");
        assert_eq!(seq("=>").compose(&s).unwrap(), s);
        assert_eq!(seq("p => q").compose(&seq("=> q")), Err(Error::Composition));
    }

    #[test]
    fn partitions() {
        let parts = seq("p =>").p_partitions("p");
        assert_eq!(parts, vec![Partition { rest: seq("=>"), interp: seq("p =>") }]);
        let parts = seq("q =>").p_partitions("p");
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].rest, seq("q =>"));
        assert_eq!(parts[1].rest, seq("=>"));
        assert_eq!(seq("q => r").p_partitions("p").len(), 4);
        // copies are interchangeable, so q,q splits three ways
        assert_eq!(seq("q, q =>").p_partitions("p").len(), 3);
    }

    #[test]
    fn partitions_match_bitmask_enumeration() {
        let s = seq("q, q & p, r, q => O r");
        let items: Vec<Formula> = s.ant.iter().cloned().collect();
        let mut expected = std::collections::HashSet::new();
        for mask in 0u32..(1 << items.len()) {
            for suc_rest in [false, true] {
                let mut rest = Multiset::new();
                let mut interp = Multiset::new();
                for (i, it) in items.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        rest.insert(it.clone());
                    } else {
                        interp.insert(it.clone());
                    }
                }
                let (rs, is) = if suc_rest { (s.suc.clone(), None) } else { (None, s.suc.clone()) };
                let rest = Sequent::from_parts(rest, rs);
                if rest.contains_atom("p") {
                    continue;
                }
                expected.insert(Partition { rest, interp: Sequent::from_parts(interp, is) });
            }
        }
        let got: std::collections::HashSet<Partition> = s.p_partitions("p").into_iter().collect();
        assert_eq!(got, expected);
        assert_eq!(s.p_partitions("p").len(), expected.len());
    }

    #[test]
    fn sequent_syntax() {
        let s = seq("p, O q => r");
        assert_eq!(s.ant.len(), 2);
        assert_eq!(s.suc, Some(f("r")));
        assert_eq!(seq("p, p =>").ant.count(&f("p")), 2);
        assert_eq!(seq("O p -> p"), Sequent::goal(f("O p -> p")));
        assert_eq!(parse_sequent(&s.to_string()).unwrap(), s);
        assert!(parse_sequent("p, => q").is_err());
        assert!(parse_sequent("p => q, r").is_err());
        let json = serde_json::to_string(&s).unwrap();
        let back: Sequent = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parts() {
        let s = seq("p, q => r");
        assert!(s.has_part(&seq("q => r")));
        assert!(!s.has_part(&seq("q, q =>")));
        assert_eq!(s.remove_part(&seq("q => r")).unwrap(), seq("p =>"));
        assert!(s.remove_part(&seq("=> p")).is_err());
    }

    fn small_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::Bot),
            Just(Formula::atom("p")),
            Just(Formula::atom("q")),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
                inner.prop_map(Formula::circle),
            ]
        })
    }

    fn small_multiset() -> impl Strategy<Value = Multiset> {
        prop::collection::vec(small_formula(), 0..4).prop_map(|v| v.into_iter().collect())
    }

    proptest! {
        #[test]
        fn multiset_order_matches_brute_force(d in small_multiset(), g in small_multiset()) {
            prop_assert_eq!(multiset_less(&d, &g), brute_less(&d, &g));
        }

        #[test]
        fn multiset_order_is_strict(a in small_multiset(), b in small_multiset(), c in small_multiset()) {
            prop_assert!(!multiset_less(&a, &a));
            if multiset_less(&a, &b) && multiset_less(&b, &c) {
                prop_assert!(multiset_less(&a, &c));
            }
            if multiset_less(&a, &b) {
                prop_assert!(!multiset_less(&b, &a));
            }
        }

        #[test]
        fn implication_unpacking_is_smaller(g in small_multiset(), phi in small_formula(), q in "[a-n]") {
            let q = Formula::atom(&q);
            let lo = Sequent::from_parts(g.with(phi.clone()), None);
            let hi = Sequent::from_parts(g.with(Formula::imp(q, phi)), None);
            prop_assert!(sequent_less(&lo, &hi));
        }
    }
}
