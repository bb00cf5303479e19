//! Backward proof search. G4iLL search terminates on its own and is the
//! decision procedure; G3iLL search uses a branch-history loop check and a
//! node budget. Both produce derivation trees that `check` can verify.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::calculus::{instances, instances_of, is_reductive, Calculus, Principal, RuleInstance, RuleTag};
use crate::error::{Error, Result};
use crate::sequent::Sequent;
use crate::syntax::{Formula, Notation};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// A node of a derivation tree: a rule instance whose children derive its
/// premises, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub inst: RuleInstance,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    pub fn new(inst: RuleInstance, children: Vec<ProofNode>) -> ProofNode {
        ProofNode { inst, children }
    }

    pub fn conclusion(&self) -> &Sequent {
        &self.inst.conclusion
    }

    pub fn rule(&self) -> RuleTag {
        self.inst.rule
    }

    /// Length of the longest branch; a single node has height 1.
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(ProofNode::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofNode::size).sum::<usize>()
    }

    pub fn is_cut_free(&self) -> bool {
        self.inst.rule != RuleTag::Cut && self.children.iter().all(ProofNode::is_cut_free)
    }

    pub fn count_cuts(&self) -> usize {
        usize::from(self.inst.rule == RuleTag::Cut)
            + self.children.iter().map(ProofNode::count_cuts).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub calculus: Calculus,
    pub root: ProofNode,
}

impl Derivation {
    pub fn new(calculus: Calculus, root: ProofNode) -> Derivation {
        Derivation { calculus, root }
    }

    pub fn conclusion(&self) -> &Sequent {
        self.root.conclusion()
    }

    pub fn height(&self) -> usize {
        self.root.height()
    }

    pub fn is_cut_free(&self) -> bool {
        self.root.is_cut_free()
    }

    pub fn render_text(&self, notation: Notation) -> String {
        let mut out = String::new();
        text_node(&self.root, 0, notation, &mut out);
        out
    }

    /// A `bussproofs` proof tree.
    pub fn render_latex(&self) -> String {
        let mut out = String::from("\\begin{prooftree}\n");
        latex_node(&self.root, &mut out);
        out.push_str("\\end{prooftree}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DerivationJson::from(self)).expect("derivations serialize")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Derivation> {
        let raw: DerivationJson = serde_json::from_value(value)?;
        raw.try_into()
    }
}

fn text_node(node: &ProofNode, depth: usize, notation: Notation, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    out.push_str(&node.inst.conclusion.render(notation));
    out.push_str("   [");
    out.push_str(node.inst.rule.label(notation));
    out.push_str("]\n");
    for c in &node.children {
        text_node(c, depth + 1, notation, out);
    }
}

fn latex_node(node: &ProofNode, out: &mut String) {
    for c in &node.children {
        latex_node(c, out);
    }
    let label = node.inst.rule.label(Notation::Latex);
    let seq = node.inst.conclusion.render(Notation::Latex);
    let infer = match node.children.len() {
        0 => {
            out.push_str("\\AxiomC{}\n");
            "UnaryInfC"
        }
        1 => "UnaryInfC",
        2 => "BinaryInfC",
        _ => "TrinaryInfC",
    };
    out.push_str(&format!("\\RightLabel{{${label}$}}\n\\{infer}{{${seq}$}}\n"));
}

// ---------------------------------------------------------------------------
// Checking

/// Whether every node is a legal instance of the declared calculus and every
/// child derives the corresponding premise.
pub fn check(d: &Derivation) -> bool {
    validate(d).is_ok()
}

/// Like `check`, reporting the first offending node.
pub fn validate(d: &Derivation) -> Result<()> {
    validate_node(d.calculus, &d.root)
}

fn validate_node(calc: Calculus, node: &ProofNode) -> Result<()> {
    let inst = &node.inst;
    let bad = |msg: String| Err(Error::IllFormedDerivation(msg));
    if !calc.admits(inst.rule) {
        return bad(format!("{} is not a rule of {calc}", inst.rule));
    }
    if inst.rule == RuleTag::Cut {
        if inst.premises.len() != 2 {
            return bad("cut needs two premises".into());
        }
        let rebuilt = RuleInstance::cut(inst.premises[0].clone(), inst.premises[1].clone())?;
        if rebuilt.conclusion != inst.conclusion {
            return bad(format!("cut conclusion mismatch at {}", inst.conclusion));
        }
    } else if !instances_of(&[inst.rule], &inst.conclusion).contains(inst) {
        return bad(format!("no {} instance matches at {}", inst.rule, inst.conclusion));
    }
    if node.children.len() != inst.premises.len() {
        return bad(format!("wrong number of subderivations at {}", inst.conclusion));
    }
    for (child, premise) in node.children.iter().zip(&inst.premises) {
        if child.conclusion() != premise {
            return bad(format!("premise {premise} derived as {}", child.conclusion()));
        }
        validate_node(calc, child)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// G4iLL

/// Rules whose premises are derivable whenever the conclusion is, so a goal
/// that admits one of them is decided by that instance alone.
fn is_invertible(tag: RuleTag) -> bool {
    matches!(
        tag,
        RuleTag::RAnd
            | RuleTag::LAnd
            | RuleTag::LOr
            | RuleTag::RImp
            | RuleTag::LAtomImp
            | RuleTag::LAndImp
            | RuleTag::LOrImp
            | RuleTag::LCircle
    )
}

/// Terminating search in G4iLL with a verdict cache.
#[derive(Default)]
pub struct G4Prover {
    memo: HashMap<Sequent, bool>,
    /// Premise-below-conclusion assertions evaluated so far.
    pub reductive_checks: u64,
    /// Goals expanded (cache misses).
    pub expanded: u64,
}

impl G4Prover {
    pub fn new() -> G4Prover {
        G4Prover::default()
    }

    /// Whether `goal` is derivable.
    pub fn decide(&mut self, goal: &Sequent) -> bool {
        if let Some(&v) = self.memo.get(goal) {
            return v;
        }
        self.expanded += 1;
        let insts = instances(Calculus::G4iLL, goal);
        for inst in &insts {
            self.reductive_checks += inst.premises.len() as u64;
            assert!(
                is_reductive(inst),
                "premise not below conclusion in {} at {}",
                inst.rule,
                inst.conclusion
            );
        }
        let verdict = if insts.iter().any(|i| i.premises.is_empty()) {
            true
        } else if let Some(inv) = insts.iter().find(|i| is_invertible(i.rule)) {
            inv.premises.iter().all(|p| self.decide(p))
        } else {
            insts
                .iter()
                .any(|i| i.premises.iter().all(|p| self.decide(p)))
        };
        self.memo.insert(goal.clone(), verdict);
        verdict
    }

    pub fn is_theorem(&mut self, f: &Formula) -> bool {
        self.decide(&Sequent::goal(f.clone()))
    }

    /// A G4iLL derivation of `goal`, built from the first instance in
    /// canonical order whose premises are all derivable.
    pub fn prove(&mut self, goal: &Sequent) -> Option<Derivation> {
        if !self.decide(goal) {
            return None;
        }
        Some(Derivation::new(Calculus::G4iLL, self.build(goal)))
    }

    fn build(&mut self, goal: &Sequent) -> ProofNode {
        for inst in instances(Calculus::G4iLL, goal) {
            if inst.premises.iter().all(|p| self.decide(p)) {
                let children = inst.premises.iter().map(|p| self.build(p)).collect();
                return ProofNode::new(inst, children);
            }
        }
        unreachable!("derivable goal {goal} without a derivable instance")
    }
}

/// One-shot convenience wrapper.
pub fn prove_g4(goal: &Sequent) -> Option<Derivation> {
    G4Prover::new().prove(goal)
}

// ---------------------------------------------------------------------------
// G3iLL

enum Outcome {
    Proved(ProofNode),
    /// Failure; `floor` is the shallowest ancestor depth some loop-check
    /// prune in the subtree relied on.
    Failed { floor: usize },
}

/// Cut-free search in G3iLL with a loop check against ancestor goals.
pub struct G3Prover {
    budget: u64,
    deadline: Option<Instant>,
    pub nodes: u64,
    proved: HashMap<Sequent, ProofNode>,
    refuted: HashSet<Sequent>,
    branch: Vec<(Sequent, HashSet<Formula>)>,
}

impl Default for G3Prover {
    fn default() -> Self {
        G3Prover::new(DEFAULT_BUDGET)
    }
}

impl G3Prover {
    pub fn new(budget: u64) -> G3Prover {
        G3Prover {
            budget,
            deadline: None,
            nodes: 0,
            proved: HashMap::new(),
            refuted: HashSet::new(),
            branch: Vec::new(),
        }
    }

    pub fn with_deadline(mut self, deadline: Instant) -> G3Prover {
        self.deadline = Some(deadline);
        self
    }

    /// Searches for a cut-free derivation; the budget counts goal
    /// expansions of this query.
    pub fn prove(&mut self, goal: &Sequent) -> Result<Option<Derivation>> {
        self.nodes = 0;
        self.branch.clear();
        match self.search(goal)? {
            Outcome::Proved(node) => Ok(Some(Derivation::new(Calculus::G3iLL, node))),
            Outcome::Failed { .. } => Ok(None),
        }
    }

    pub fn decide(&mut self, goal: &Sequent) -> Result<bool> {
        Ok(self.prove(goal)?.is_some())
    }

    fn search(&mut self, goal: &Sequent) -> Result<Outcome> {
        if let Some(node) = self.proved.get(goal) {
            return Ok(Outcome::Proved(node.clone()));
        }
        if self.refuted.contains(goal) {
            return Ok(Outcome::Failed { floor: usize::MAX });
        }
        let depth = self.branch.len();
        let support: HashSet<Formula> = goal.ant.distinct().cloned().collect();
        let subsumed_by = self
            .branch
            .iter()
            .rposition(|(anc, anc_set)| anc.suc == goal.suc && support.is_subset(anc_set));
        if let Some(at) = subsumed_by {
            return Ok(Outcome::Failed { floor: at });
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        if self.nodes % 1024 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() > deadline {
                    return Err(Error::Timeout);
                }
            }
        }
        let insts = instances(Calculus::G3iLL, goal);
        if let Some(leaf) = insts.iter().find(|i| i.premises.is_empty()) {
            let node = ProofNode::new(leaf.clone(), vec![]);
            self.proved.insert(goal.clone(), node.clone());
            return Ok(Outcome::Proved(node));
        }
        self.branch.push((goal.clone(), support));
        let mut floor = usize::MAX;
        let mut found = None;
        'outer: for inst in &insts {
            let mut children = Vec::with_capacity(inst.premises.len());
            for p in &inst.premises {
                match self.search(p) {
                    Ok(Outcome::Proved(n)) => children.push(n),
                    Ok(Outcome::Failed { floor: f }) => {
                        floor = floor.min(f);
                        continue 'outer;
                    }
                    Err(e) => {
                        self.branch.pop();
                        return Err(e);
                    }
                }
            }
            found = Some(ProofNode::new(inst.clone(), children));
            break;
        }
        self.branch.pop();
        match found {
            Some(node) => {
                self.proved.insert(goal.clone(), node.clone());
                Ok(Outcome::Proved(node))
            }
            None => {
                if floor >= depth {
                    self.refuted.insert(goal.clone());
                }
                Ok(Outcome::Failed { floor })
            }
        }
    }
}

/// One-shot convenience wrapper with the given node budget.
pub fn prove_g3(goal: &Sequent, budget: Option<u64>) -> Result<Option<Derivation>> {
    G3Prover::new(budget.unwrap_or(DEFAULT_BUDGET)).prove(goal)
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
struct DerivationJson {
    calculus: CalculusJson,
    root: NodeJson,
}

#[derive(Serialize, Deserialize)]
enum CalculusJson {
    G3iLL,
    G4iLL,
    #[serde(rename = "G3iLL+Cut")]
    G3iLLCut,
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    rule: RuleTag,
    conclusion: Sequent,
    premises: Vec<Sequent>,
    principal: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aux: Option<usize>,
    children: Vec<NodeJson>,
}

fn occurrence_index(s: &Sequent, p: &Principal) -> usize {
    match p {
        Principal::Antecedent(f) => s.ant.iter().position(|g| g == f).expect("principal occurs"),
        Principal::Succedent => s.ant.len(),
    }
}

fn occurrence_at(s: &Sequent, i: usize) -> Result<Principal> {
    if let Some(f) = s.ant.iter().nth(i) {
        Ok(Principal::Antecedent(f.clone()))
    } else if i == s.ant.len() && s.suc.is_some() {
        Ok(Principal::Succedent)
    } else {
        Err(Error::Json(format!("occurrence index {i} out of range for {s}")))
    }
}

impl From<&ProofNode> for NodeJson {
    fn from(n: &ProofNode) -> Self {
        let s = &n.inst.conclusion;
        NodeJson {
            rule: n.inst.rule,
            conclusion: s.clone(),
            premises: n.inst.premises.clone(),
            principal: n.inst.principal.as_ref().map(|p| occurrence_index(s, p)),
            aux: n
                .inst
                .aux
                .as_ref()
                .map(|f| occurrence_index(s, &Principal::Antecedent(f.clone()))),
            children: n.children.iter().map(NodeJson::from).collect(),
        }
    }
}

impl TryFrom<NodeJson> for ProofNode {
    type Error = Error;

    fn try_from(j: NodeJson) -> Result<ProofNode> {
        let principal = j.principal.map(|i| occurrence_at(&j.conclusion, i)).transpose()?;
        let aux = match j.aux.map(|i| occurrence_at(&j.conclusion, i)).transpose()? {
            Some(Principal::Antecedent(f)) => Some(f),
            Some(Principal::Succedent) => {
                return Err(Error::Json("aux occurrence must be in the antecedent".into()))
            }
            None => None,
        };
        let children = j
            .children
            .into_iter()
            .map(ProofNode::try_from)
            .collect::<Result<Vec<_>>>()?;
        Ok(ProofNode::new(
            RuleInstance {
                rule: j.rule,
                conclusion: j.conclusion,
                premises: j.premises,
                principal,
                aux,
            },
            children,
        ))
    }
}

impl From<&Derivation> for DerivationJson {
    fn from(d: &Derivation) -> Self {
        DerivationJson {
            calculus: match d.calculus {
                Calculus::G3iLL => CalculusJson::G3iLL,
                Calculus::G4iLL => CalculusJson::G4iLL,
                Calculus::G3iLLCut => CalculusJson::G3iLLCut,
            },
            root: NodeJson::from(&d.root),
        }
    }
}

impl TryFrom<DerivationJson> for Derivation {
    type Error = Error;

    fn try_from(j: DerivationJson) -> Result<Derivation> {
        let calculus = match j.calculus {
            CalculusJson::G3iLL => Calculus::G3iLL,
            CalculusJson::G4iLL => Calculus::G4iLL,
            CalculusJson::G3iLLCut => Calculus::G3iLLCut,
        };
        Ok(Derivation::new(calculus, j.root.try_into()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequent::parse_sequent;

    fn seq(s: &str) -> Sequent {
        parse_sequent(s).unwrap()
    }

    fn both(s: &str) -> (bool, bool) {
        let goal = seq(s);
        let g4 = G4Prover::new().prove(&goal);
        let g3 = prove_g3(&goal, None).unwrap();
        for d in g4.iter().chain(g3.iter()) {
            assert!(check(d), "{}", d.render_text(Notation::Unicode));
            assert_eq!(d.conclusion(), &goal);
        }
        (g4.is_some(), g3.is_some())
    }

    #[test]
    fn lax_axioms() {
        assert_eq!(both("=> p -> O p"), (true, true));
        assert_eq!(both("=> O O p -> O p"), (true, true));
        assert_eq!(both("=> O p & O q -> O (p & q)"), (true, true));
        assert_eq!(both("=> O (p -> q) -> (O p -> O q)"), (true, true));
    }

    #[test]
    fn non_theorems() {
        assert_eq!(both("=> O p -> p"), (false, false));
        assert_eq!(both("=> ((p -> q) -> p) -> p"), (false, false));
        assert_eq!(both("=> p | ~p"), (false, false));
        assert_eq!(both("=> ~~p -> p"), (false, false));
        assert_eq!(both("=> O false"), (false, false));
    }

    #[test]
    fn bot_leaf() {
        let d = prove_g3(&seq("false => q"), None).unwrap().unwrap();
        assert_eq!(d.root.rule(), RuleTag::LBot);
        assert_eq!(d.height(), 1);
    }

    #[test]
    fn check_rejects_mismatch() {
        let mut d = prove_g4(&seq("p & q => q & p")).unwrap();
        assert!(check(&d));
        d.root.children[0].inst.conclusion = seq("p, q => p");
        assert!(!check(&d));
        let mut e = prove_g4(&seq("p & q => q & p")).unwrap();
        e.calculus = Calculus::G3iLL;
        assert!(check(&e));
        let f = prove_g4(&seq("p, p -> q => q")).unwrap();
        let g = Derivation::new(Calculus::G3iLL, f.root.clone());
        assert!(!check(&g));
    }

    #[test]
    fn budget_is_enforced() {
        let goal = seq("=> ((p -> q) -> r) -> ((q -> p) -> r) -> r");
        assert!(matches!(prove_g3(&goal, Some(3)), Err(Error::BudgetExceeded(3))));
    }

    #[test]
    fn json_round_trip() {
        let d = prove_g4(&seq("O c, O a -> b => O (b | c)")).unwrap();
        let v = d.to_json();
        assert_eq!(v["calculus"], "G4iLL");
        let back = Derivation::from_json(v).unwrap();
        assert_eq!(back, d);
        assert!(check(&back));
    }

    #[test]
    fn renderers_mention_every_node() {
        let d = prove_g4(&seq("=> O O p -> O p")).unwrap();
        let text = d.render_text(Notation::Ascii);
        assert_eq!(text.lines().count(), d.root.size());
        assert!(text.starts_with("=> O O p -> O p"));
        let latex = d.render_latex();
        assert_eq!(latex.matches("InfC").count(), d.root.size());
    }
}
