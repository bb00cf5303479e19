//! ⊤/⊥ simplification that preserves intuitionistic equivalence.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::syntax::Formula;

/// Rewrites to a fixpoint with ⊤∧φ ≡ φ, ⊥∧φ ≡ ⊥, ⊥∨φ ≡ φ, ⊤∨φ ≡ ⊤,
/// ⊤→φ ≡ φ, ⊥→φ ≡ ⊤, φ→⊤ ≡ ⊤, φ→φ ≡ ⊤, ○⊤ ≡ ⊤ and removal of repeated
/// conjuncts and disjuncts. Shared subterms are simplified once.
pub fn simplify(f: &Formula) -> Formula {
    let mut cur = f.clone();
    loop {
        let next = Simplifier::default().run(&cur);
        if next == cur {
            return next;
        }
        cur = next;
    }
}

#[derive(Default)]
struct Simplifier {
    cache: HashMap<usize, Formula>,
}

impl Simplifier {
    fn child(&mut self, a: &Arc<Formula>) -> Formula {
        let key = Arc::as_ptr(a) as usize;
        if let Some(done) = self.cache.get(&key) {
            return done.clone();
        }
        let out = self.run(a);
        self.cache.insert(key, out.clone());
        out
    }

    fn run(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Bot | Formula::Atom(_) => f.clone(),
            Formula::And(..) => {
                let mut items = Vec::new();
                self.flatten(f, true, &mut items);
                if items.contains(&Formula::Bot) {
                    return Formula::Bot;
                }
                items.retain(|x| !x.is_top());
                rebuild(dedup(items), true)
            }
            Formula::Or(..) => {
                let mut items = Vec::new();
                self.flatten(f, false, &mut items);
                if items.iter().any(Formula::is_top) {
                    return Formula::top();
                }
                items.retain(|x| *x != Formula::Bot);
                rebuild(dedup(items), false)
            }
            Formula::Imp(a, b) => {
                let a = self.child(a);
                let b = self.child(b);
                if a.is_top() {
                    b
                } else if a == Formula::Bot || b.is_top() || a == b {
                    Formula::top()
                } else {
                    Formula::imp(a, b)
                }
            }
            Formula::Circle(a) => {
                let a = self.child(a);
                if a.is_top() {
                    a
                } else {
                    Formula::circle(a)
                }
            }
        }
    }

    /// Simplified operands of a maximal ∧-chain (or ∨-chain), with nested
    /// chains produced by simplification spliced in.
    fn flatten(&mut self, f: &Formula, conj: bool, out: &mut Vec<Formula>) {
        let parts = match (f, conj) {
            (Formula::And(a, b), true) | (Formula::Or(a, b), false) => [a, b],
            _ => {
                out.push(f.clone());
                return;
            }
        };
        for part in parts {
            if matches!((&**part, conj), (Formula::And(..), true) | (Formula::Or(..), false)) {
                self.flatten(part, conj, out);
            } else {
                let s = self.child(part);
                splice(s, conj, out);
            }
        }
    }
}

fn splice(f: Formula, conj: bool, out: &mut Vec<Formula>) {
    match (&f, conj) {
        (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
            splice((**a).clone(), conj, out);
            splice((**b).clone(), conj, out);
        }
        _ => out.push(f),
    }
}

fn dedup(items: Vec<Formula>) -> Vec<Formula> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|x| seen.insert(x.clone())).collect()
}

fn rebuild(items: Vec<Formula>, conj: bool) -> Formula {
    let folded = if conj {
        items.into_iter().reduce(Formula::and)
    } else {
        items.into_iter().reduce(Formula::or)
    };
    folded.unwrap_or_else(|| if conj { Formula::top() } else { Formula::Bot })
}

/// `simplify` followed by further rewrites that preserve equivalence in
/// lax logic: a formula known from a surrounding conjunction or implication
/// antecedent is replaced by ⊤ (and one known refuted by ⊥), a disjunct
/// that implies another disjunct is dropped, and ○○φ becomes ○φ.
pub fn compact(f: &Formula) -> Formula {
    let mut cur = simplify(f);
    loop {
        let next = simplify(&tidy(&in_context(&cur, &Known::default())));
        if next == cur {
            return next;
        }
        cur = next;
    }
}

#[derive(Clone, Default)]
struct Known {
    holds: Vec<Formula>,
    fails: Vec<Formula>,
}

impl Known {
    fn assume(&mut self, f: &Formula) {
        for item in conjuncts(f) {
            match &item {
                Formula::Imp(a, b) if **b == Formula::Bot => self.fails.push((**a).clone()),
                _ => {}
            }
            self.holds.push(item);
        }
    }
}

fn conjuncts(f: &Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    splice(f.clone(), true, &mut out);
    out
}

fn disjuncts(f: &Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    splice(f.clone(), false, &mut out);
    out
}

fn in_context(f: &Formula, known: &Known) -> Formula {
    if known.holds.contains(f) {
        return Formula::top();
    }
    if known.fails.contains(f) {
        return Formula::Bot;
    }
    match f {
        Formula::Bot | Formula::Atom(_) => f.clone(),
        Formula::And(..) => {
            let mut items = conjuncts(f);
            for i in 0..items.len() {
                let mut k = known.clone();
                for (j, other) in items.iter().enumerate() {
                    if j != i {
                        k.assume(other);
                    }
                }
                items[i] = in_context(&items[i], &k);
            }
            rebuild(items, true)
        }
        Formula::Or(..) => rebuild(disjuncts(f).iter().map(|x| in_context(x, known)).collect(), false),
        Formula::Imp(a, b) => {
            let a = in_context(a, known);
            let mut k = known.clone();
            k.assume(&a);
            Formula::imp(a, in_context(b, &k))
        }
        Formula::Circle(a) => Formula::circle(in_context(a, known)),
    }
}

/// Whether `weaker` follows from `f` by a conjunct or ○ step.
fn obviously_implies(f: &Formula, weaker: &Formula) -> bool {
    let parts = conjuncts(f);
    parts.contains(weaker)
        || matches!(weaker, Formula::Circle(w) if **w == *f || parts.contains(w))
}

fn tidy(f: &Formula) -> Formula {
    match f {
        Formula::Bot | Formula::Atom(_) => f.clone(),
        Formula::And(a, b) => Formula::and(tidy(a), tidy(b)),
        Formula::Imp(a, b) => Formula::imp(tidy(a), tidy(b)),
        Formula::Circle(a) => match tidy(a) {
            inner @ Formula::Circle(_) => inner,
            inner => Formula::circle(inner),
        },
        Formula::Or(..) => {
            let items: Vec<Formula> = disjuncts(f).iter().map(tidy).collect();
            let mut keep = vec![true; items.len()];
            for i in 0..items.len() {
                keep[i] = !items
                    .iter()
                    .enumerate()
                    .any(|(j, y)| j != i && keep[j] && *y != items[i] && obviously_implies(&items[i], y));
            }
            let kept = items.into_iter().zip(keep).filter(|(_, k)| *k).map(|(x, _)| x).collect();
            rebuild(kept, false)
        }
    }
}
