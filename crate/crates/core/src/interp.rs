//! Craig and sequent interpolation by recursion over cut-free G3iLL
//! derivations.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calculus::{Calculus, Principal, RuleTag};
use crate::error::{Error, Result};
use crate::prover::{prove_g3, validate, Derivation, G4Prover, ProofNode};
use crate::sequent::{Multiset, Sequent};
use crate::simplify::simplify;
use crate::syntax::{Formula, Name};

/// A sequent Γ;Γ′ ⇒ Δ with its antecedent split in two.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitSequent {
    pub left: Multiset,
    pub right: Multiset,
    pub succedent: Option<Formula>,
}

impl SplitSequent {
    pub fn new(
        left: impl IntoIterator<Item = Formula>,
        right: impl IntoIterator<Item = Formula>,
        succedent: Option<Formula>,
    ) -> SplitSequent {
        SplitSequent {
            left: left.into_iter().collect(),
            right: right.into_iter().collect(),
            succedent,
        }
    }

    pub fn underlying(&self) -> Sequent {
        Sequent::from_parts(self.left.union(&self.right), self.succedent.clone())
    }

    /// Atoms an interpolant may use.
    pub fn shared_atoms(&self) -> BTreeSet<Name> {
        let left = Sequent::from_parts(self.left.clone(), None).atoms();
        let right = Sequent::from_parts(self.right.clone(), self.succedent.clone()).atoms();
        left.intersection(&right).cloned().collect()
    }

    /// Checks that χ interpolates: Γ ⇒ χ, Γ′,χ ⇒ Δ and the atom condition.
    pub fn verify(&self, chi: &Formula, prover: &mut G4Prover) -> Verification {
        let left_derivable =
            prover.decide(&Sequent::from_parts(self.left.clone(), Some(chi.clone())));
        let right_derivable = prover.decide(&Sequent::from_parts(
            self.right.with(chi.clone()),
            self.succedent.clone(),
        ));
        let shared = self.shared_atoms();
        let stray: Vec<String> = chi
            .atoms()
            .into_iter()
            .filter(|a| !shared.contains(a))
            .map(|a| a.to_string())
            .collect();
        Verification {
            left_derivable,
            right_derivable,
            atoms_shared: stray.is_empty(),
            stray_atoms: stray,
        }
    }
}

impl fmt::Display for SplitSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |m: &Multiset| m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        write!(f, "{} ; {} =>", join(&self.left), join(&self.right))?;
        if let Some(s) = &self.succedent {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub left_derivable: bool,
    pub right_derivable: bool,
    pub atoms_shared: bool,
    pub stray_atoms: Vec<String>,
}

impl Verification {
    pub fn holds(&self) -> bool {
        self.left_derivable && self.right_derivable && self.atoms_shared
    }
}

/// Interpolant of `split` read off the cut-free G3iLL derivation `d`.
pub fn maehara(d: &Derivation, split: &SplitSequent) -> Result<Formula> {
    if d.calculus != Calculus::G3iLL || !d.is_cut_free() {
        return Err(Error::Precondition("expected a cut-free G3iLL derivation".into()));
    }
    validate(d)?;
    if split.underlying() != *d.conclusion() {
        return Err(Error::SplitMismatch(format!(
            "{split} does not split {}",
            d.conclusion()
        )));
    }
    Ok(walk(&d.root, &split.left, &split.right))
}

fn walk(node: &ProofNode, left: &Multiset, right: &Multiset) -> Formula {
    let inst = &node.inst;
    let child = |i: usize, l: &Multiset, r: &Multiset| walk(&node.children[i], l, r);
    let on_left = |f: &Formula| left.contains(f);
    // moves the principal formula out of its side and adds the premise's new formulas
    let reshape = |side: &Multiset, principal: &Formula, premise: &Sequent, conclusion: &Sequent| {
        let mut out = side.without(principal);
        for (f, n) in premise.ant.difference(&conclusion.ant.without(principal)).entries() {
            out.insert_n(f.clone(), n);
        }
        out
    };
    match inst.rule {
        RuleTag::Ax => {
            let p = inst.conclusion.suc.as_ref().expect("axiom has a succedent");
            if on_left(p) {
                p.clone()
            } else {
                Formula::top()
            }
        }
        RuleTag::LBot => {
            if on_left(&Formula::Bot) {
                Formula::Bot
            } else {
                Formula::top()
            }
        }
        RuleTag::RAnd => Formula::and(child(0, left, right), child(1, left, right)),
        RuleTag::ROr0 | RuleTag::ROr1 | RuleTag::RCircle => child(0, left, right),
        RuleTag::RImp => {
            let Some(Formula::Imp(a, _)) = &inst.conclusion.suc else {
                unreachable!("R-> concludes an implication")
            };
            child(0, left, &right.with((**a).clone()))
        }
        RuleTag::LAnd | RuleTag::LOr | RuleTag::LCircle | RuleTag::LImp => {
            let Some(Principal::Antecedent(pf)) = &inst.principal else {
                unreachable!("left rule without antecedent principal")
            };
            let here = on_left(pf);
            let split_of = |i: usize| {
                let premise = &inst.premises[i];
                if here {
                    (reshape(left, pf, premise, &inst.conclusion), right.clone())
                } else {
                    (left.clone(), reshape(right, pf, premise, &inst.conclusion))
                }
            };
            match inst.rule {
                RuleTag::LAnd => {
                    let (l, r) = split_of(0);
                    child(0, &l, &r)
                }
                RuleTag::LOr => {
                    let (l0, r0) = split_of(0);
                    let (l1, r1) = split_of(1);
                    let (a, b) = (child(0, &l0, &r0), child(1, &l1, &r1));
                    if here {
                        Formula::or(a, b)
                    } else {
                        Formula::and(a, b)
                    }
                }
                RuleTag::LCircle => {
                    let (l, r) = split_of(0);
                    let chi = child(0, &l, &r);
                    if !here || chi.is_circle() {
                        chi
                    } else {
                        Formula::circle(chi)
                    }
                }
                _ => {
                    // the first premise keeps the whole antecedent
                    let (l1, r1) = split_of(1);
                    let second = child(1, &l1, &r1);
                    if here {
                        Formula::imp(child(0, right, left), second)
                    } else {
                        Formula::and(child(0, left, right), second)
                    }
                }
            }
        }
        other => unreachable!("{other} does not occur in validated G3iLL derivations"),
    }
}

/// Interpolant for a derivable split sequent, found via a G3iLL derivation
/// and simplified.
pub fn interpolate(split: &SplitSequent, budget: Option<u64>) -> Result<Formula> {
    let goal = split.underlying();
    if !G4Prover::new().decide(&goal) {
        return Err(Error::NotATheorem(goal.to_string()));
    }
    let d = prove_g3(&goal, budget)?.ok_or_else(|| Error::NotATheorem(goal.to_string()))?;
    Ok(simplify(&maehara(&d, split)?))
}

/// χ with ⊢φ→χ, ⊢χ→ψ over the shared atoms.
pub fn craig(phi: &Formula, psi: &Formula) -> Result<Formula> {
    craig_with_budget(phi, psi, None)
}

pub fn craig_with_budget(phi: &Formula, psi: &Formula, budget: Option<u64>) -> Result<Formula> {
    interpolate(&SplitSequent::new([phi.clone()], [], Some(psi.clone())), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequent::parse_sequent;
    use crate::syntax::parse;

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    fn g3(text: &str) -> Derivation {
        prove_g3(&parse_sequent(text).unwrap(), None).unwrap().unwrap()
    }

    #[test]
    fn axiom_on_the_left() {
        let d = g3("p, q => p");
        let split = SplitSequent::new([f("p")], [f("q")], Some(f("p")));
        assert_eq!(maehara(&d, &split).unwrap(), f("p"));
    }

    #[test]
    fn bot_on_the_left() {
        let d = g3("false, p => q");
        let split = SplitSequent::new([Formula::Bot], [f("p")], Some(f("q")));
        assert_eq!(maehara(&d, &split).unwrap(), Formula::Bot);
    }

    #[test]
    fn split_mismatch() {
        let d = g3("p, q => p");
        let split = SplitSequent::new([f("p")], [], Some(f("p")));
        assert!(matches!(maehara(&d, &split), Err(Error::SplitMismatch(_))));
    }

    #[test]
    fn craig_examples() {
        let mut prover = G4Prover::new();
        for (a, b) in [("p & q", "q | r"), ("O p", "O p"), ("p & q", "O (q | r)"), ("O (p -> q) & O p", "O (q | r)")] {
            let chi = craig(&f(a), &f(b)).unwrap();
            let split = SplitSequent::new([f(a)], [], Some(f(b)));
            assert!(split.verify(&chi, &mut prover).holds(), "{a} / {b}: {chi}");
        }
        assert_eq!(craig(&f("p & q"), &f("q | r")).unwrap(), f("q"));
        assert!(matches!(craig(&f("p"), &f("q")), Err(Error::NotATheorem(_))));
    }

    #[test]
    fn implication_on_both_sides() {
        let mut prover = G4Prover::new();
        let cases = [
            (vec!["p -> q", "p"], vec![], "q"),
            (vec!["p"], vec!["p -> q"], "q"),
            (vec!["O p"], vec!["p -> O q"], "O q"),
            (vec!["p | r"], vec!["p -> s", "r -> s"], "s"),
            (vec!["p -> s", "r -> s"], vec!["p | r"], "s"),
        ];
        for (l, r, s) in cases {
            let split = SplitSequent::new(l.iter().map(|x| f(x)), r.iter().map(|x| f(x)), Some(f(s)));
            let chi = interpolate(&split, None).unwrap();
            assert!(split.verify(&chi, &mut prover).holds(), "{split}: {chi}");
        }
    }
}
