//! Rule schemas of the cut-free calculus G3iLL and the contraction-free
//! calculus G4iLL, and enumeration of all rule instances with a given
//! conclusion.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequent::{sequent_less, Sequent};
use crate::syntax::{Formula, Notation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleTag {
    Ax,
    LBot,
    RAnd,
    LAnd,
    ROr0,
    ROr1,
    LOr,
    RImp,
    LImp,
    LAtomImp,
    LAndImp,
    LOrImp,
    LImpImp,
    RCircle,
    LCircle,
    RCircleImp,
    LCircleImp,
    Cut,
}

impl RuleTag {
    pub const ALL: [RuleTag; 18] = [
        RuleTag::Ax,
        RuleTag::LBot,
        RuleTag::RAnd,
        RuleTag::LAnd,
        RuleTag::ROr0,
        RuleTag::ROr1,
        RuleTag::LOr,
        RuleTag::RImp,
        RuleTag::LImp,
        RuleTag::LAtomImp,
        RuleTag::LAndImp,
        RuleTag::LOrImp,
        RuleTag::LImpImp,
        RuleTag::RCircle,
        RuleTag::LCircle,
        RuleTag::RCircleImp,
        RuleTag::LCircleImp,
        RuleTag::Cut,
    ];

    /// Rules acting on the succedent.
    pub fn is_right(self) -> bool {
        matches!(
            self,
            RuleTag::RAnd | RuleTag::ROr0 | RuleTag::ROr1 | RuleTag::RImp | RuleTag::RCircle
        )
    }

    pub fn label(self, notation: Notation) -> &'static str {
        use RuleTag::*;
        match notation {
            Notation::Ascii => match self {
                Ax => "Ax",
                LBot => "Lfalse",
                RAnd => "R&",
                LAnd => "L&",
                ROr0 => "R|0",
                ROr1 => "R|1",
                LOr => "L|",
                RImp => "R->",
                LImp => "L->",
                LAtomImp => "Lp->",
                LAndImp => "L&->",
                LOrImp => "L|->",
                LImpImp => "L->->",
                RCircle => "RO",
                LCircle => "LO",
                RCircleImp => "RO->",
                LCircleImp => "LO->",
                Cut => "Cut",
            },
            Notation::Unicode => match self {
                Ax => "Ax",
                LBot => "L⊥",
                RAnd => "R∧",
                LAnd => "L∧",
                ROr0 => "R∨₀",
                ROr1 => "R∨₁",
                LOr => "L∨",
                RImp => "R→",
                LImp => "L→",
                LAtomImp => "Lp→",
                LAndImp => "L∧→",
                LOrImp => "L∨→",
                LImpImp => "L→→",
                RCircle => "R○",
                LCircle => "L○",
                RCircleImp => "R○→",
                LCircleImp => "L○→",
                Cut => "Cut",
            },
            Notation::Latex => match self {
                Ax => "\\mathit{Ax}",
                LBot => "L\\bot",
                RAnd => "R\\land",
                LAnd => "L\\land",
                ROr0 => "R\\lor_0",
                ROr1 => "R\\lor_1",
                LOr => "L\\lor",
                RImp => "R\\to",
                LImp => "L\\to",
                LAtomImp => "Lp\\to",
                LAndImp => "L\\land\\to",
                LOrImp => "L\\lor\\to",
                LImpImp => "L\\to\\to",
                RCircle => "R\\bigcirc",
                LCircle => "L\\bigcirc",
                RCircleImp => "R\\bigcirc^\\to",
                LCircleImp => "L\\bigcirc^\\to",
                Cut => "\\mathit{Cut}",
            },
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label(Notation::Unicode))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Calculus {
    G3iLL,
    G4iLL,
    /// G3iLL with the cut rule; only ever an input to cut elimination.
    G3iLLCut,
}

const G3_RULES: &[RuleTag] = &[
    RuleTag::Ax,
    RuleTag::LBot,
    RuleTag::RAnd,
    RuleTag::LAnd,
    RuleTag::ROr0,
    RuleTag::ROr1,
    RuleTag::LOr,
    RuleTag::RImp,
    RuleTag::LImp,
    RuleTag::RCircle,
    RuleTag::LCircle,
];

const G4_RULES: &[RuleTag] = &[
    RuleTag::Ax,
    RuleTag::LBot,
    RuleTag::RAnd,
    RuleTag::LAnd,
    RuleTag::ROr0,
    RuleTag::ROr1,
    RuleTag::LOr,
    RuleTag::RImp,
    RuleTag::LAtomImp,
    RuleTag::LAndImp,
    RuleTag::LOrImp,
    RuleTag::LImpImp,
    RuleTag::RCircle,
    RuleTag::LCircle,
    RuleTag::RCircleImp,
    RuleTag::LCircleImp,
];

impl Calculus {
    /// Rules whose instances `instances` enumerates; the cut rule is never
    /// enumerated.
    pub fn rules(self) -> &'static [RuleTag] {
        match self {
            Calculus::G3iLL | Calculus::G3iLLCut => G3_RULES,
            Calculus::G4iLL => G4_RULES,
        }
    }

    pub fn admits(self, tag: RuleTag) -> bool {
        self.rules().contains(&tag) || (self == Calculus::G3iLLCut && tag == RuleTag::Cut)
    }
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Calculus::G3iLL => "G3iLL",
            Calculus::G4iLL => "G4iLL",
            Calculus::G3iLLCut => "G3iLL+Cut",
        })
    }
}

/// The principal formula occurrence of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Principal {
    Antecedent(Formula),
    Succedent,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleInstance {
    pub rule: RuleTag,
    pub conclusion: Sequent,
    pub premises: Vec<Sequent>,
    /// `None` for Ax, L⊥ and Cut.
    pub principal: Option<Principal>,
    /// The contextual ○χ of L○→.
    pub aux: Option<Formula>,
}

impl RuleInstance {
    fn new(
        rule: RuleTag,
        conclusion: &Sequent,
        premises: Vec<Sequent>,
        principal: Option<Principal>,
    ) -> RuleInstance {
        RuleInstance {
            rule,
            conclusion: conclusion.clone(),
            premises,
            principal,
            aux: None,
        }
    }

    /// The cut rule with conclusion Γ1,Γ2 ⇒ Δ from Γ1 ⇒ φ and Γ2,φ ⇒ Δ.
    pub fn cut(left: Sequent, right: Sequent) -> Result<RuleInstance> {
        let phi = left
            .suc
            .clone()
            .ok_or_else(|| Error::IllFormedDerivation("left cut premise has no succedent".into()))?;
        if !right.ant.contains(&phi) {
            return Err(Error::IllFormedDerivation(format!(
                "cut formula {phi} missing from the right premise"
            )));
        }
        let conclusion =
            Sequent::from_parts(left.ant.union(&right.ant.without(&phi)), right.suc.clone());
        Ok(RuleInstance {
            rule: RuleTag::Cut,
            conclusion,
            premises: vec![left, right],
            principal: None,
            aux: None,
        })
    }

    pub fn cut_formula(&self) -> Option<&Formula> {
        match self.rule {
            RuleTag::Cut => self.premises[0].suc.as_ref(),
            _ => None,
        }
    }

    /// The principal formula itself, wherever it sits.
    pub fn principal_formula(&self) -> Option<&Formula> {
        match &self.principal {
            Some(Principal::Antecedent(f)) => Some(f),
            Some(Principal::Succedent) => self.conclusion.suc.as_ref(),
            None => None,
        }
    }

    /// Whether the principal occurrence lies inside `part`, given that the
    /// conclusion decomposes as S'·part. For Ax the principal occurrences
    /// are the succedent atom together with an antecedent copy of it; for
    /// L⊥ it is the ⊥ occurrence.
    pub fn is_principal(&self, part: &Sequent) -> Result<bool> {
        if !self.conclusion.has_part(part) {
            return Err(Error::Decomposition(part.to_string()));
        }
        Ok(match self.rule {
            RuleTag::Ax => match &part.suc {
                Some(p) => part.ant.contains(p),
                None => false,
            },
            RuleTag::LBot => part.ant.contains(&Formula::Bot),
            RuleTag::Cut => false,
            _ => match &self.principal {
                Some(Principal::Antecedent(f)) => part.ant.contains(f),
                Some(Principal::Succedent) => part.suc.is_some(),
                None => false,
            },
        })
    }
}

/// All instances of `calc` with conclusion `goal`, ordered by rule tag and
/// then by the canonical position of the principal occurrence.
pub fn instances(calc: Calculus, goal: &Sequent) -> Vec<RuleInstance> {
    instances_of(calc.rules(), goal)
}

/// Like `instances`, restricted to an arbitrary rule set.
pub fn instances_of(rules: &[RuleTag], goal: &Sequent) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    for &tag in RuleTag::ALL.iter() {
        if rules.contains(&tag) {
            instances_for(tag, goal, &mut out);
        }
    }
    out
}

fn instances_for(tag: RuleTag, goal: &Sequent, out: &mut Vec<RuleInstance>) {
    use Formula::*;
    let ant = &goal.ant;
    let suc = goal.suc.as_ref();
    let rest = |f: &Formula| ant.without(f);
    let with = |m: &crate::sequent::Multiset, fs: &[Formula], d: Option<Formula>| {
        let mut m = m.clone();
        for f in fs {
            m.insert(f.clone());
        }
        Sequent::from_parts(m, d)
    };
    let d = goal.suc.clone();
    match tag {
        RuleTag::Ax => {
            if let Some(p @ Atom(_)) = suc {
                if ant.contains(p) {
                    out.push(RuleInstance::new(tag, goal, vec![], None));
                }
            }
        }
        RuleTag::LBot => {
            if ant.contains(&Bot) {
                out.push(RuleInstance::new(tag, goal, vec![], None));
            }
        }
        RuleTag::RAnd => {
            if let Some(And(a, b)) = suc {
                let prem = vec![
                    goal.with_suc(Some((**a).clone())),
                    goal.with_suc(Some((**b).clone())),
                ];
                out.push(RuleInstance::new(tag, goal, prem, Some(Principal::Succedent)));
            }
        }
        RuleTag::ROr0 | RuleTag::ROr1 => {
            if let Some(Or(a, b)) = suc {
                let side = if tag == RuleTag::ROr0 { a } else { b };
                let prem = vec![goal.with_suc(Some((**side).clone()))];
                out.push(RuleInstance::new(tag, goal, prem, Some(Principal::Succedent)));
            }
        }
        RuleTag::RImp => {
            if let Some(Imp(a, b)) = suc {
                let prem = vec![Sequent::from_parts(ant.with((**a).clone()), Some((**b).clone()))];
                out.push(RuleInstance::new(tag, goal, prem, Some(Principal::Succedent)));
            }
        }
        RuleTag::RCircle => {
            if let Some(Circle(a)) = suc {
                let prem = vec![goal.with_suc(Some((**a).clone()))];
                out.push(RuleInstance::new(tag, goal, prem, Some(Principal::Succedent)));
            }
        }
        _ => {
            for f in ant.distinct() {
                let prem: Option<Vec<Sequent>> = match (tag, f) {
                    (RuleTag::LAnd, And(a, b)) => {
                        Some(vec![with(&rest(f), &[(**a).clone(), (**b).clone()], d.clone())])
                    }
                    (RuleTag::LOr, Or(a, b)) => Some(vec![
                        with(&rest(f), &[(**a).clone()], d.clone()),
                        with(&rest(f), &[(**b).clone()], d.clone()),
                    ]),
                    (RuleTag::LImp, Imp(a, b)) => Some(vec![
                        goal.with_suc(Some((**a).clone())),
                        with(&rest(f), &[(**b).clone()], d.clone()),
                    ]),
                    (RuleTag::LAtomImp, Imp(a, b)) if a.is_atom() && ant.contains(a) => {
                        Some(vec![with(&rest(f), &[(**b).clone()], d.clone())])
                    }
                    (RuleTag::LAndImp, Imp(a, g)) => match &**a {
                        And(x, y) => Some(vec![with(
                            &rest(f),
                            &[Formula::imp((**x).clone(), Formula::imp((**y).clone(), (**g).clone()))],
                            d.clone(),
                        )]),
                        _ => None,
                    },
                    (RuleTag::LOrImp, Imp(a, g)) => match &**a {
                        Or(x, y) => Some(vec![with(
                            &rest(f),
                            &[
                                Formula::imp((**x).clone(), (**g).clone()),
                                Formula::imp((**y).clone(), (**g).clone()),
                            ],
                            d.clone(),
                        )]),
                        _ => None,
                    },
                    (RuleTag::LImpImp, Imp(a, g)) => match &**a {
                        Imp(_, y) => Some(vec![
                            with(
                                &rest(f),
                                &[Formula::imp((**y).clone(), (**g).clone())],
                                Some((**a).clone()),
                            ),
                            with(&rest(f), &[(**g).clone()], d.clone()),
                        ]),
                        _ => None,
                    },
                    (RuleTag::LCircle, Circle(a)) if suc.is_some_and(Formula::is_circle) => {
                        Some(vec![with(&rest(f), &[(**a).clone()], d.clone())])
                    }
                    (RuleTag::RCircleImp, Imp(a, b)) => match &**a {
                        Circle(x) => Some(vec![
                            Sequent::from_parts(rest(f), Some((**x).clone())),
                            with(&rest(f), &[(**b).clone()], d.clone()),
                        ]),
                        _ => None,
                    },
                    (RuleTag::LCircleImp, Imp(a, b)) => {
                        if let Circle(_) = &**a {
                            let others = rest(f);
                            for chi in others.distinct() {
                                if let Circle(inner) = chi {
                                    let ctx = others.without(chi);
                                    let prem = vec![
                                        with(&ctx, &[(**inner).clone()], Some((**a).clone())),
                                        with(&ctx, &[chi.clone(), (**b).clone()], d.clone()),
                                    ];
                                    let mut inst = RuleInstance::new(
                                        tag,
                                        goal,
                                        prem,
                                        Some(Principal::Antecedent(f.clone())),
                                    );
                                    inst.aux = Some(chi.clone());
                                    out.push(inst);
                                }
                            }
                        }
                        None
                    }
                    _ => None,
                };
                if let Some(premises) = prem {
                    out.push(RuleInstance::new(
                        tag,
                        goal,
                        premises,
                        Some(Principal::Antecedent(f.clone())),
                    ));
                }
            }
        }
    }
}

/// Whether every premise lies strictly below the conclusion in the multiset
/// order.
pub fn is_reductive(inst: &RuleInstance) -> bool {
    inst.premises.iter().all(|p| sequent_less(p, &inst.conclusion))
}
