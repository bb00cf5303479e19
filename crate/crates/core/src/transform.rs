//! Transformations of cut-free G3iLL derivations: weakening, contraction,
//! the inversion lemmas they rest on, lifting a proof of Γ ⇒ ⊥ to any
//! succedent, and cut elimination.

use crate::calculus::{instances_of, Calculus, Principal, RuleInstance, RuleTag};
use crate::error::{Error, Result};
use crate::prover::{validate, Derivation, ProofNode};
use crate::sequent::{Multiset, Sequent};
use crate::syntax::Formula;

/// Rebuilds a node of rule `rule` with the given principal on `conclusion`
/// from `children`, whose conclusions must be the schema's premises.
fn rebuild(
    rule: RuleTag,
    principal: &Option<Principal>,
    conclusion: Sequent,
    children: Vec<ProofNode>,
) -> ProofNode {
    let premises: Vec<&Sequent> = children.iter().map(ProofNode::conclusion).collect();
    let inst = instances_of(&[rule], &conclusion)
        .into_iter()
        .find(|i| &i.principal == principal && i.premises.iter().eq(premises.iter().copied()))
        .unwrap_or_else(|| {
            panic!("no {rule} instance concludes {conclusion} from {premises:?}")
        });
    ProofNode::new(inst, children)
}

/// A zero-premise node (Ax or L⊥) on `conclusion`.
fn leaf(conclusion: Sequent) -> ProofNode {
    let inst = instances_of(&[RuleTag::Ax, RuleTag::LBot], &conclusion)
        .into_iter()
        .next()
        .unwrap_or_else(|| panic!("{conclusion} is not an axiom"));
    ProofNode::new(inst, vec![])
}

/// Whether premise `idx` of a left rule shares the conclusion's succedent.
fn follows_succedent(node: &ProofNode, idx: usize) -> bool {
    match node.rule() {
        RuleTag::LImp => idx == 1,
        RuleTag::LAnd | RuleTag::LOr | RuleTag::LCircle => true,
        _ => false,
    }
}

fn require_g3(node: &ProofNode) -> Result<()> {
    if node.is_cut_free() {
        Ok(())
    } else {
        Err(Error::Precondition("derivation contains cuts".into()))
    }
}

// ---------------------------------------------------------------------------
// Weakening

/// A derivation of conclusion(d)·addition. Height does not increase.
pub fn weaken(d: &ProofNode, addition: &Sequent) -> Result<ProofNode> {
    require_g3(d)?;
    if d.conclusion().suc.is_some() && addition.suc.is_some() {
        return Err(Error::Composition);
    }
    Ok(weaken_node(d, &addition.ant, addition.suc.as_ref()))
}

fn weaken_node(node: &ProofNode, extra: &Multiset, suc: Option<&Formula>) -> ProofNode {
    let c = node.conclusion();
    let new_suc = c.suc.clone().or_else(|| suc.cloned());
    let conclusion = Sequent::from_parts(c.ant.union(extra), new_suc);
    if node.children.is_empty() {
        return leaf(conclusion);
    }
    let children = node
        .children
        .iter()
        .enumerate()
        .map(|(i, child)| {
            let pass = if follows_succedent(node, i) { suc } else { None };
            weaken_node(child, extra, pass)
        })
        .collect();
    rebuild(node.rule(), &node.inst.principal, conclusion, children)
}

// ---------------------------------------------------------------------------
// Inversion

fn principal_is(node: &ProofNode, rule: RuleTag, f: &Formula) -> bool {
    node.rule() == rule && node.inst.principal == Some(Principal::Antecedent(f.clone()))
}

/// Replaces one antecedent occurrence of `target` in every node by
/// `replacement`, cutting the recursion short where `target` is principal
/// for `rule` by picking that node's child at `pick`.
fn invert_left(
    node: &ProofNode,
    target: &Formula,
    replacement: &[Formula],
    rule: RuleTag,
    pick: usize,
) -> ProofNode {
    if principal_is(node, rule, target) {
        return node.children[pick].clone();
    }
    let c = node.conclusion();
    let mut ant = c.ant.without(target);
    for r in replacement {
        ant.insert(r.clone());
    }
    let conclusion = Sequent::from_parts(ant, c.suc.clone());
    if node.children.is_empty() {
        return leaf(conclusion);
    }
    let children = node
        .children
        .iter()
        .map(|ch| invert_left(ch, target, replacement, rule, pick))
        .collect();
    rebuild(node.rule(), &node.inst.principal, conclusion, children)
}

/// Γ, a∧b ⇒ Δ  to  Γ, a, b ⇒ Δ.
fn inv_land(node: &ProofNode, f: &Formula) -> ProofNode {
    let Formula::And(a, b) = f else { unreachable!() };
    invert_left(node, f, &[(**a).clone(), (**b).clone()], RuleTag::LAnd, 0)
}

/// Γ, a₀∨a₁ ⇒ Δ  to  Γ, aᵢ ⇒ Δ.
fn inv_lor(node: &ProofNode, f: &Formula, side: usize) -> ProofNode {
    let Formula::Or(a, b) = f else { unreachable!() };
    let part = if side == 0 { a } else { b };
    invert_left(node, f, &[(**part).clone()], RuleTag::LOr, side)
}

/// Γ, a→b ⇒ Δ  to  Γ, b ⇒ Δ.
fn inv_limp_right(node: &ProofNode, f: &Formula) -> ProofNode {
    let Formula::Imp(_, b) = f else { unreachable!() };
    invert_left(node, f, &[(**b).clone()], RuleTag::LImp, 1)
}

/// Γ, ○a ⇒ Δ  to  Γ, a ⇒ Δ.
fn replace_circle(node: &ProofNode, f: &Formula) -> ProofNode {
    let Formula::Circle(a) = f else { unreachable!() };
    invert_left(node, f, &[(**a).clone()], RuleTag::LCircle, 0)
}

// ---------------------------------------------------------------------------
// Contraction

/// A derivation of the conclusion with one of at least two copies of
/// `target` removed. Height does not increase.
pub fn contract(d: &ProofNode, target: &Formula) -> Result<ProofNode> {
    require_g3(d)?;
    let n = d.conclusion().ant.count(target);
    if n < 2 {
        return Err(Error::Precondition(format!(
            "{target} occurs {n} time(s) in the antecedent, contraction needs two"
        )));
    }
    Ok(contract_node(d, target))
}

fn contract_node(node: &ProofNode, f: &Formula) -> ProofNode {
    let c = node.conclusion();
    let conclusion = Sequent::from_parts(c.ant.without(f), c.suc.clone());
    if node.children.is_empty() {
        return leaf(conclusion);
    }
    let principal = node.inst.principal.clone();
    if principal != Some(Principal::Antecedent(f.clone())) {
        let children = node.children.iter().map(|ch| contract_node(ch, f)).collect();
        return rebuild(node.rule(), &principal, conclusion, children);
    }
    let children = match (node.rule(), f) {
        (RuleTag::LAnd, Formula::And(a, b)) => {
            let inv = inv_land(&node.children[0], f);
            vec![contract_node(&contract_node(&inv, a), b)]
        }
        (RuleTag::LOr, Formula::Or(a, b)) => vec![
            contract_node(&inv_lor(&node.children[0], f, 0), a),
            contract_node(&inv_lor(&node.children[1], f, 1), b),
        ],
        (RuleTag::LImp, Formula::Imp(_, b)) => vec![
            contract_node(&node.children[0], f),
            contract_node(&inv_limp_right(&node.children[1], f), b),
        ],
        (RuleTag::LCircle, Formula::Circle(a)) => {
            vec![contract_node(&replace_circle(&node.children[0], f), a)]
        }
        (rule, _) => panic!("unexpected principal {f} for {rule}"),
    };
    rebuild(node.rule(), &principal, conclusion, children)
}

/// Contracts one copy of every occurrence in `dup`.
fn contract_all(node: ProofNode, dup: &Multiset) -> ProofNode {
    dup.iter().fold(node, |acc, f| contract_node(&acc, f))
}

// ---------------------------------------------------------------------------
// Ex falso

/// From a derivation of Γ ⇒ ⊥ one of Γ ⇒ Δ for the given Δ.
pub fn ex_falso_lift(d: &ProofNode, new_suc: Option<Formula>) -> Result<ProofNode> {
    require_g3(d)?;
    if d.conclusion().suc != Some(Formula::Bot) {
        return Err(Error::Precondition(format!(
            "succedent of {} is not {}",
            d.conclusion(),
            Formula::Bot
        )));
    }
    Ok(lift_node(d, &new_suc))
}

fn lift_node(node: &ProofNode, new_suc: &Option<Formula>) -> ProofNode {
    let c = node.conclusion();
    let conclusion = Sequent::from_parts(c.ant.clone(), new_suc.clone());
    if node.children.is_empty() {
        return leaf(conclusion);
    }
    let children = node
        .children
        .iter()
        .enumerate()
        .map(|(i, ch)| {
            if follows_succedent(node, i) {
                lift_node(ch, new_suc)
            } else {
                ch.clone()
            }
        })
        .collect();
    rebuild(node.rule(), &node.inst.principal, conclusion, children)
}

// ---------------------------------------------------------------------------
// Cut elimination

#[derive(Debug, Clone, Default)]
pub struct CutReport {
    /// Reduction steps taken.
    pub steps: u64,
    /// Cuts present in the input.
    pub cuts: usize,
}

/// A cut-free G3iLL derivation of the same endsequent.
pub fn eliminate_cut(d: &Derivation) -> Result<(Derivation, CutReport)> {
    if d.calculus == Calculus::G4iLL {
        return Err(Error::IllFormedDerivation("cut elimination works on G3iLL".into()));
    }
    validate(&Derivation::new(Calculus::G3iLLCut, d.root.clone()))?;
    let mut report = CutReport {
        steps: 0,
        cuts: d.root.count_cuts(),
    };
    let root = eliminate_node(&d.root, &mut report.steps);
    Ok((Derivation::new(Calculus::G3iLL, root), report))
}

fn eliminate_node(node: &ProofNode, steps: &mut u64) -> ProofNode {
    let children: Vec<ProofNode> = node
        .children
        .iter()
        .map(|ch| eliminate_node(ch, steps))
        .collect();
    if node.rule() == RuleTag::Cut {
        let mut it = children.into_iter();
        let (d1, d2) = (it.next().unwrap(), it.next().unwrap());
        return cut(&d1, &d2, None, steps);
    }
    ProofNode::new(node.inst.clone(), children)
}

/// The cut of d1 : Γ1 ⇒ φ against d2 : Γ2, φ ⇒ Δ, both cut-free.
fn cut(d1: &ProofNode, d2: &ProofNode, bound: Option<(usize, usize)>, steps: &mut u64) -> ProofNode {
    *steps += 1;
    let phi = d1.conclusion().suc.clone().expect("left cut premise has a succedent");
    let measure = (phi.degree(), d1.height() + d2.height());
    if let Some(b) = bound {
        assert!(measure < b, "cut measure {measure:?} does not decrease below {b:?}");
    }
    let g1 = &d1.conclusion().ant;
    let g2 = d2.conclusion().ant.without(&phi);
    let delta = d2.conclusion().suc.clone();
    let conclusion = Sequent::from_parts(g1.union(&g2), delta.clone());
    let recur = |a: &ProofNode, b: &ProofNode, steps: &mut u64| cut(a, b, Some(measure), steps);

    // axioms
    match d1.rule() {
        RuleTag::LBot => return leaf(conclusion),
        RuleTag::Ax => {
            return weaken_node(d2, &g1.without(&phi), None);
        }
        _ => {}
    }
    match d2.rule() {
        RuleTag::LBot => {
            if g2.contains(&Formula::Bot) {
                return leaf(conclusion);
            }
            let lifted = lift_node(d1, &delta);
            return weaken_node(&lifted, &g2, None);
        }
        RuleTag::Ax => {
            if g2.contains(delta.as_ref().unwrap()) {
                return leaf(conclusion);
            }
            return weaken_node(d1, &g2, None);
        }
        _ => {}
    }

    let principal_in_d1 = d1.inst.principal == Some(Principal::Succedent);
    let principal_in_d2 = d2.inst.principal == Some(Principal::Antecedent(phi.clone()));

    // cut formula not principal on the left
    if !principal_in_d1 {
        let delta_is_circle = delta.as_ref().is_some_and(Formula::is_circle);
        if d1.rule() != RuleTag::LCircle || delta_is_circle {
            let principal = d1.inst.principal.clone();
            let children = d1
                .children
                .iter()
                .enumerate()
                .map(|(i, ch)| {
                    if follows_succedent(d1, i) {
                        recur(ch, d2, steps)
                    } else {
                        weaken_node(ch, &g2, None)
                    }
                })
                .collect();
            return rebuild(d1.rule(), &principal, conclusion, children);
        }
    }

    // cut formula not principal on the right
    if !principal_in_d2 {
        let principal = d2.inst.principal.clone();
        let children = d2.children.iter().map(|ch| recur(d1, ch, steps)).collect();
        return rebuild(d2.rule(), &principal, conclusion, children);
    }

    // principal on both sides: reduce the degree
    assert!(principal_in_d1, "left premise of a principal cut is a left rule");
    match (&phi, d1.rule(), d2.rule()) {
        (Formula::And(..), RuleTag::RAnd, RuleTag::LAnd) => {
            let with_a = recur(&d1.children[1], &d2.children[0], steps);
            let both = recur(&d1.children[0], &with_a, steps);
            contract_all(both, g1)
        }
        (Formula::Or(..), RuleTag::ROr0 | RuleTag::ROr1, RuleTag::LOr) => {
            let side = usize::from(d1.rule() == RuleTag::ROr1);
            recur(&d1.children[0], &d2.children[side], steps)
        }
        (Formula::Imp(..), RuleTag::RImp, RuleTag::LImp) => {
            let to_a = recur(d1, &d2.children[0], steps);
            let to_b = recur(&to_a, &d1.children[0], steps);
            let done = recur(&to_b, &d2.children[1], steps);
            contract_all(done, &g1.union(&g2))
        }
        (Formula::Circle(..), RuleTag::RCircle, RuleTag::LCircle) => {
            recur(&d1.children[0], &d2.children[0], steps)
        }
        (f, r1, r2) => panic!("no principal reduction for {f} between {r1} and {r2}"),
    }
}

/// A cut node over two derivations.
pub fn make_cut(left: ProofNode, right: ProofNode) -> Result<ProofNode> {
    let inst = RuleInstance::cut(left.conclusion().clone(), right.conclusion().clone())?;
    Ok(ProofNode::new(inst, vec![left, right]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::{check, prove_g3};
    use crate::sequent::parse_sequent;
    use crate::syntax::parse;

    fn seq(s: &str) -> Sequent {
        parse_sequent(s).unwrap()
    }

    fn proof(s: &str) -> ProofNode {
        prove_g3(&seq(s), None).unwrap().unwrap().root
    }

    fn g3(node: ProofNode) -> Derivation {
        Derivation::new(Calculus::G3iLL, node)
    }

    #[test]
    fn weakening() {
        let w = weaken(&proof("p => p"), &seq("q =>")).unwrap();
        assert_eq!(w.conclusion(), &seq("p, q => p"));
        assert!(check(&g3(w)));
        let d = proof("=> O p -> O p");
        let w = weaken(&d, &seq("r =>")).unwrap();
        assert_eq!(w.conclusion(), &seq("r => O p -> O p"));
        assert!(w.height() <= d.height());
        assert!(check(&g3(w)));
        let w = weaken(&proof("false =>"), &seq("=> q")).unwrap();
        assert_eq!(w.conclusion(), &seq("false => q"));
        assert!(weaken(&proof("p => p"), &seq("=> q")).is_err());
    }

    #[test]
    fn weakening_empty_succedent() {
        let d = proof("p & ~p =>");
        let w = weaken(&d, &seq("r => O s")).unwrap();
        assert_eq!(w.conclusion(), &seq("r, p & ~p => O s"));
        assert!(check(&g3(w)));
    }

    #[test]
    fn contraction() {
        let c = contract(&proof("p, p => p"), &parse("p").unwrap()).unwrap();
        assert_eq!(c.conclusion(), &seq("p => p"));
        let d = proof("O q, O q => O q");
        let c = contract(&d, &parse("O q").unwrap()).unwrap();
        assert_eq!(c.conclusion(), &seq("O q => O q"));
        assert!(check(&g3(c)));
        assert!(matches!(contract(&proof("p => p"), &parse("p").unwrap()), Err(Error::Precondition(_))));
    }

    #[test]
    fn contraction_on_principal_formulas() {
        for (s, f) in [
            ("a & b, a & b => b & a", "a & b"),
            ("a | b, a | b => b | a", "a | b"),
            ("a -> b, a -> b, a => b", "a -> b"),
            ("(a -> b) -> c, (a -> b) -> c, b => c", "(a -> b) -> c"),
            ("O a, O a => O (a & a)", "O a"),
        ] {
            let d = proof(s);
            let c = contract(&d, &parse(f).unwrap()).unwrap();
            let mut expected = seq(s);
            expected.ant.remove(&parse(f).unwrap());
            assert_eq!(c.conclusion(), &expected);
            assert!(c.height() <= d.height());
            assert!(check(&g3(c)), "{s}");
        }
    }

    #[test]
    fn ex_falso() {
        let l = ex_falso_lift(&proof("false => false"), Some(parse("q").unwrap())).unwrap();
        assert_eq!(l.conclusion(), &seq("false => q"));
        let d = proof("p, p -> false => false");
        let l = ex_falso_lift(&d, Some(parse("r").unwrap())).unwrap();
        assert_eq!(l.conclusion(), &seq("p, p -> false => r"));
        assert!(check(&g3(l)));
        assert!(ex_falso_lift(&proof("=> p -> p"), None).is_err());
    }

    fn eliminate(left: &str, right: &str) -> (Derivation, CutReport) {
        let c = make_cut(proof(left), proof(right)).unwrap();
        let input = Derivation::new(Calculus::G3iLLCut, c);
        assert!(check(&input));
        let (out, report) = eliminate_cut(&input).unwrap();
        assert!(out.is_cut_free());
        assert!(check(&out), "{}", out.render_text(crate::syntax::Notation::Unicode));
        assert_eq!(out.conclusion(), input.conclusion());
        (out, report)
    }

    #[test]
    fn cut_free_input_unchanged() {
        let d = g3(proof("=> O O p -> O p"));
        let (out, report) = eliminate_cut(&d).unwrap();
        assert_eq!(out, d);
        assert_eq!(report.steps, 0);
    }

    #[test]
    fn cut_on_conjunction() {
        let (out, _) = eliminate("p, q => p & q", "p & q => p");
        assert_eq!(out.conclusion(), &seq("p, q => p"));
    }

    #[test]
    fn circle_cut_reduces_degree() {
        let left = ProofNode::new(
            instances_of(&[RuleTag::RCircle], &seq("a => O a")).remove(0),
            vec![proof("a => a")],
        );
        let right = ProofNode::new(
            instances_of(&[RuleTag::LCircle], &seq("b, O a => O (a & b)")).remove(0),
            vec![proof("b, a => O (a & b)")],
        );
        let c = make_cut(left, right).unwrap();
        let (out, report) = eliminate_cut(&Derivation::new(Calculus::G3iLLCut, c)).unwrap();
        assert_eq!(out.conclusion(), &seq("a, b => O (a & b)"));
        assert!(check(&out));
        assert!(report.steps >= 2);
    }

    #[test]
    fn assorted_cuts() {
        eliminate("=> p -> O p", "p -> O p, p => O p");
        eliminate("a -> b, b -> c => a -> c", "a -> c, a => c");
        eliminate("a | b => b | a", "b | a, ~a, ~b => false");
        eliminate("O a, O b => O (a & b)", "O (a & b) => O a");
        eliminate("false => O q", "O q, r => O (q | r)");
        eliminate("a => a", "a, a -> b => b");
        eliminate("p & ~p => false", "false => q");
        eliminate("O O a => O a", "O a, (O a -> b) => b");
    }

    #[test]
    fn nested_cuts() {
        let inner = make_cut(proof("a & b => b & a"), proof("b & a => a")).unwrap();
        let outer = make_cut(inner, proof("a, a -> c => c")).unwrap();
        let d = Derivation::new(Calculus::G3iLLCut, outer);
        assert!(check(&d));
        let (out, report) = eliminate_cut(&d).unwrap();
        assert_eq!(report.cuts, 2);
        assert!(out.is_cut_free() && check(&out));
        assert_eq!(out.conclusion(), &seq("a & b, a -> c => c"));
    }

    #[test]
    fn rejects_ill_formed_input() {
        let mut c = make_cut(proof("a => a"), proof("a, b => a")).unwrap();
        c.children[1].inst.conclusion = seq("a, c => a");
        let d = Derivation::new(Calculus::G3iLLCut, c);
        assert!(matches!(eliminate_cut(&d), Err(Error::IllFormedDerivation(_))));
    }
}
