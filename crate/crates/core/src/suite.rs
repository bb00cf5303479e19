//! Randomized property suites. Sample `i` draws from its own generator
//! seeded by (seed, i), so results do not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen::{shrink, FormulaStream, GenConfig};
use crate::interp::{interpolate, SplitSequent};
use crate::prover::{check, prove_g3, Derivation, G3Prover, G4Prover};
use crate::sequent::Sequent;
use crate::syntax::Formula;
use crate::transform::{eliminate_cut, make_cut};
use crate::uniform::{same_formula, CalculusHandle, Normalizer, PropertyChecker, Quantifier, Strategy, UExpr};

const MAX_TRIES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Equivalence,
    Cut,
    Craig,
    Uniform,
    Adjunction,
    Confluence,
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<SuiteKind> {
        Ok(match s {
            "equivalence" => SuiteKind::Equivalence,
            "cut" => SuiteKind::Cut,
            "craig" => SuiteKind::Craig,
            "uniform" => SuiteKind::Uniform,
            "adjunction" => SuiteKind::Adjunction,
            "confluence" => SuiteKind::Confluence,
            _ => return Err(Error::Config(format!("unknown suite {s}"))),
        })
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteKind::Equivalence => "equivalence",
            SuiteKind::Cut => "cut",
            SuiteKind::Craig => "craig",
            SuiteKind::Uniform => "uniform",
            SuiteKind::Adjunction => "adjunction",
            SuiteKind::Confluence => "confluence",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub count: usize,
    pub seed: u64,
    /// Generator depth of sampled formulas.
    pub max_depth: usize,
    pub atoms: Vec<String>,
    /// Node budget for G3iLL searches.
    pub budget: Option<u64>,
}

impl SuiteConfig {
    pub fn new(count: usize, seed: u64, max_depth: usize) -> SuiteConfig {
        SuiteConfig {
            count,
            seed,
            max_depth,
            atoms: vec!["p".into(), "q".into(), "r".into()],
            budget: None,
        }
    }

    pub fn with_atoms(mut self, atoms: &[&str]) -> SuiteConfig {
        self.atoms = atoms.iter().map(|a| a.to_string()).collect();
        self
    }

    fn stream(&self, index: usize) -> Result<FormulaStream> {
        let mut cfg = GenConfig::new(self.max_depth, &[], sample_seed(self.seed, index));
        cfg.atom_pool = self.atoms.clone();
        cfg.stream()
    }

    fn atom_formulas(&self) -> Vec<Formula> {
        self.atoms.iter().map(|a| Formula::atom(a)).collect()
    }
}

fn sample_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub index: usize,
    pub input: String,
    pub shrunk: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub kind: SuiteKind,
    pub total: usize,
    pub passed: usize,
    pub failures: Vec<Counterexample>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.total
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verb = match self.kind {
            SuiteKind::Equivalence => "agree",
            _ => "pass",
        };
        writeln!(f, "{}: {}/{} {verb}", self.kind, self.passed, self.total)?;
        for c in &self.failures {
            writeln!(f, "  #{} {}", c.index, c.detail)?;
            writeln!(f, "    input:  {}", c.input)?;
            writeln!(f, "    shrunk: {}", c.shrunk)?;
        }
        Ok(())
    }
}

enum Outcome {
    Pass,
    Fail(Counterexample),
}

pub fn run_suite(kind: SuiteKind, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.atoms.is_empty() {
        return Err(Error::Config("atom pool is empty".into()));
    }
    let psis = match kind {
        SuiteKind::Adjunction => comparison_set(cfg, cfg.max_depth),
        _ => Vec::new(),
    };
    let outcomes: Vec<Result<Outcome>> = (0..cfg.count)
        .into_par_iter()
        .map(|i| match kind {
            SuiteKind::Equivalence => equivalence_sample(cfg, i),
            SuiteKind::Cut => cut_sample(cfg, i),
            SuiteKind::Craig => craig_sample(cfg, i),
            SuiteKind::Uniform => uniform_sample(cfg, i),
            SuiteKind::Adjunction => adjunction_sample(cfg, i, &psis),
            SuiteKind::Confluence => confluence_sample(cfg, i),
        })
        .collect();
    let mut report = SuiteReport {
        kind,
        total: cfg.count,
        passed: 0,
        failures: Vec::new(),
    };
    for o in outcomes {
        match o? {
            Outcome::Pass => report.passed += 1,
            Outcome::Fail(c) => report.failures.push(c),
        }
    }
    Ok(report)
}

/// G3iLL verdict, with an exhausted budget reported as an error string.
fn g3_verdict(goal: &Sequent, budget: Option<u64>) -> std::result::Result<bool, String> {
    let mut prover = budget.map(G3Prover::new).unwrap_or_default();
    prover.decide(goal).map_err(|e| e.to_string())
}

fn equivalence_disagrees(goal: &Sequent, budget: Option<u64>) -> Option<String> {
    let g4 = G4Prover::new().decide(goal);
    match g3_verdict(goal, budget) {
        Ok(g3) if g3 == g4 => None,
        Ok(g3) => Some(format!("G3iLL says {g3}, G4iLL says {g4}")),
        Err(e) => Some(format!("G3iLL failed: {e}")),
    }
}

fn equivalence_sample(cfg: &SuiteConfig, i: usize) -> Result<Outcome> {
    let phi = cfg.stream(i)?.next().expect("streams are infinite");
    let Some(detail) = equivalence_disagrees(&Sequent::goal(phi.clone()), cfg.budget) else {
        return Ok(Outcome::Pass);
    };
    let shrunk = shrink(&phi, &cfg.atom_formulas(), |f| {
        equivalence_disagrees(&Sequent::goal(f.clone()), cfg.budget).is_some()
    });
    Ok(Outcome::Fail(Counterexample {
        index: i,
        input: format!("=> {phi}"),
        shrunk: format!("=> {shrunk}"),
        detail,
    }))
}

/// Draws sequents until one is derivable.
fn derivable(
    stream: &mut FormulaStream,
    prover: &mut G4Prover,
    mut draw: impl FnMut(&mut FormulaStream) -> Sequent,
) -> Result<Sequent> {
    for _ in 0..MAX_TRIES {
        let s = draw(stream);
        if prover.decide(&s) {
            return Ok(s);
        }
    }
    Err(Error::Config("no derivable sample found".into()))
}

fn draw_formulas(stream: &mut FormulaStream, max: usize) -> Vec<Formula> {
    let n = stream.below(max + 1);
    (0..n).map(|_| stream.next().expect("streams are infinite")).collect()
}

/// Replaces one antecedent or succedent formula at a time by a smaller one
/// while `fails` keeps holding.
pub fn shrink_sequent(s: &Sequent, atoms: &[Formula], mut fails: impl FnMut(&Sequent) -> bool) -> Sequent {
    let mut cur = s.clone();
    loop {
        let before = cur.clone();
        let ant: Vec<Formula> = cur.ant.iter().cloned().collect();
        for k in 0..ant.len() {
            let rebuild = |f: &Formula| {
                let mut a = ant.clone();
                a[k] = f.clone();
                Sequent::new(a, cur.suc.clone())
            };
            let small = shrink(&ant[k], atoms, |f| fails(&rebuild(f)));
            if small != ant[k] {
                cur = rebuild(&small);
                break;
            }
        }
        if cur == before {
            if let Some(g) = cur.suc.clone() {
                let small = shrink(&g, atoms, |f| fails(&cur.with_suc(Some(f.clone()))));
                cur = cur.with_suc(Some(small));
            }
        }
        if cur == before {
            return cur;
        }
    }
}

fn cut_sample(cfg: &SuiteConfig, i: usize) -> Result<Outcome> {
    let mut stream = cfg.stream(i)?;
    let mut prover = G4Prover::new();
    let left = derivable(&mut stream, &mut prover, |st| {
        let ant = draw_formulas(st, 2);
        Sequent::new(ant, st.next())
    })?;
    let phi = left.suc.clone().expect("left premise has a succedent");
    let right = derivable(&mut stream, &mut prover, |st| {
        let ant = draw_formulas(st, 1);
        let suc = (st.below(4) > 0).then(|| st.next().expect("streams are infinite"));
        Sequent::new(ant, suc).with_ant(phi.clone())
    })?;
    let fail = |detail: String| {
        Ok(Outcome::Fail(Counterexample {
            index: i,
            input: format!("{left}  |  {right}"),
            shrunk: format!("{left}  |  {right}"),
            detail,
        }))
    };
    let (Some(d1), Some(d2)) = (prove_g3(&left, cfg.budget)?, prove_g3(&right, cfg.budget)?) else {
        return fail("G3iLL failed on a G4iLL theorem".into());
    };
    let cut = make_cut(d1.root, d2.root)?;
    let end = cut.conclusion().clone();
    let input = Derivation::new(crate::calculus::Calculus::G3iLLCut, cut);
    let (out, _) = eliminate_cut(&input)?;
    if !out.is_cut_free() || !check(&out) || *out.conclusion() != end {
        return fail(format!("cut elimination returned a bad derivation of {}", out.conclusion()));
    }
    match g3_verdict(&end, cfg.budget) {
        Ok(true) => Ok(Outcome::Pass),
        Ok(false) => fail(format!("{end} not derivable in G3iLL")),
        Err(e) => fail(e),
    }
}

fn random_split(stream: &mut FormulaStream, s: &Sequent) -> SplitSequent {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for f in s.ant.iter() {
        if stream.below(2) == 0 {
            left.push(f.clone());
        } else {
            right.push(f.clone());
        }
    }
    SplitSequent::new(left, right, s.suc.clone())
}

fn craig_fails(split: &SplitSequent, budget: Option<u64>) -> Option<String> {
    match interpolate(split, budget) {
        Ok(chi) => {
            let v = split.verify(&chi, &mut G4Prover::new());
            (!v.holds()).then(|| format!("interpolant {chi} fails: {v:?}"))
        }
        Err(Error::NotATheorem(_)) => None,
        Err(e) => Some(e.to_string()),
    }
}

fn craig_sample(cfg: &SuiteConfig, i: usize) -> Result<Outcome> {
    let mut stream = cfg.stream(i)?;
    let mut prover = G4Prover::new();
    let s = derivable(&mut stream, &mut prover, |st| {
        let mut ant = draw_formulas(st, 2);
        ant.push(st.next().expect("streams are infinite"));
        Sequent::new(ant, (st.below(4) > 0).then(|| st.next().expect("streams are infinite")))
    })?;
    let split = random_split(&mut stream, &s);
    let Some(detail) = craig_fails(&split, cfg.budget) else {
        return Ok(Outcome::Pass);
    };
    Ok(Outcome::Fail(Counterexample {
        index: i,
        input: split.to_string(),
        shrunk: split.to_string(),
        detail,
    }))
}

fn uniform_fails(s: &Sequent, atoms: &[String]) -> Result<Option<String>> {
    let mut checker = PropertyChecker::new();
    for p in atoms {
        let r = checker.check(s, p)?;
        if !r.holds() {
            return Ok(Some(format!("atom {p}: {}", r.failures.join("; "))));
        }
    }
    Ok(None)
}

fn uniform_sample(cfg: &SuiteConfig, i: usize) -> Result<Outcome> {
    let s = cfg.stream(i)?.sequent(2);
    let Some(detail) = uniform_fails(&s, &cfg.atoms)? else {
        return Ok(Outcome::Pass);
    };
    let shrunk = shrink_sequent(&s, &cfg.atom_formulas(), |t| {
        matches!(uniform_fails(t, &cfg.atoms), Ok(Some(_)))
    });
    Ok(Outcome::Fail(Counterexample {
        index: i,
        input: s.to_string(),
        shrunk: shrunk.to_string(),
        detail,
    }))
}

/// p-free comparison formulas: formulas over the atoms other than the
/// first, one representative per provable-equivalence class.
pub fn comparison_set(cfg: &SuiteConfig, depth: usize) -> Vec<Formula> {
    let others: Vec<&str> = cfg.atoms.iter().skip(1).map(String::as_str).collect();
    let mut prover = G4Prover::new();
    let mut reps: Vec<Formula> = Vec::new();
    for f in crate::gen::enumerate(&others, depth) {
        let dup = reps.iter().any(|g| {
            prover.decide(&Sequent::new([f.clone()], Some(g.clone())))
                && prover.decide(&Sequent::new([g.clone()], Some(f.clone())))
        });
        if !dup {
            reps.push(f);
        }
    }
    reps
}

fn adjunction_fails(phi: &Formula, p: &str, psis: &[Formula]) -> Result<Option<String>> {
    let mut norm = Normalizer::new(CalculusHandle::Full).simplifying();
    let all = norm.forall(&Sequent::goal(phi.clone()), p)?;
    let ex = norm.exists(&Sequent::new([phi.clone()], None), p)?;
    let mut prover = G4Prover::new();
    let mut entails = |a: &Formula, b: &Formula| prover.decide(&Sequent::new([a.clone()], Some(b.clone())));
    for psi in psis {
        if entails(psi, phi) != entails(psi, &all) {
            return Ok(Some(format!("forall: psi = {psi}, forall p = {all}")));
        }
        if entails(phi, psi) != entails(&ex, psi) {
            return Ok(Some(format!("exists: psi = {psi}, exists p = {ex}")));
        }
    }
    Ok(None)
}

fn adjunction_sample(cfg: &SuiteConfig, i: usize, psis: &[Formula]) -> Result<Outcome> {
    let p = cfg.atoms[0].as_str();
    let phi = cfg.stream(i)?.next().expect("streams are infinite");
    let Some(detail) = adjunction_fails(&phi, p, psis)? else {
        return Ok(Outcome::Pass);
    };
    let shrunk = shrink(&phi, &cfg.atom_formulas(), |f| {
        matches!(adjunction_fails(f, p, psis), Ok(Some(_)))
    });
    Ok(Outcome::Fail(Counterexample {
        index: i,
        input: phi.to_string(),
        shrunk: shrunk.to_string(),
        detail,
    }))
}

fn confluence_fails(leaf: &UExpr) -> Result<Option<String>> {
    let a = Normalizer::new(CalculusHandle::Full).with_strategy(Strategy::Leftmost).normalize(leaf);
    let b = Normalizer::new(CalculusHandle::Full).with_strategy(Strategy::Rightmost).normalize(leaf);
    Ok(match (a, b) {
        (Ok(a), Ok(b)) if same_formula(&a, &b) => None,
        (Ok(_), Ok(_)) => Some("strategies disagree".into()),
        (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
    })
}

fn confluence_sample(cfg: &SuiteConfig, i: usize) -> Result<Outcome> {
    let mut stream = cfg.stream(i)?;
    let s = stream.sequent(2);
    let quantifier = if stream.below(2) == 0 { Quantifier::Forall } else { Quantifier::Exists };
    let p = cfg.atoms[stream.below(cfg.atoms.len())].clone();
    let leaf = UExpr::qseq(quantifier, &p, s);
    let Some(detail) = confluence_fails(&leaf)? else {
        return Ok(Outcome::Pass);
    };
    Ok(Outcome::Fail(Counterexample {
        index: i,
        input: leaf.to_string(),
        shrunk: leaf.to_string(),
        detail,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_spread() {
        assert_ne!(sample_seed(7, 0), sample_seed(7, 1));
        assert_ne!(sample_seed(7, 0), sample_seed(8, 0));
    }

    #[test]
    fn small_suites_pass_and_are_deterministic() {
        for kind in [
            SuiteKind::Equivalence,
            SuiteKind::Cut,
            SuiteKind::Craig,
            SuiteKind::Uniform,
            SuiteKind::Confluence,
        ] {
            let cfg = SuiteConfig::new(8, 3, 2);
            let a = run_suite(kind, &cfg).unwrap();
            assert!(a.ok(), "{a}");
            assert_eq!(a, run_suite(kind, &cfg).unwrap());
        }
    }

    #[test]
    fn shrinking_sequents() {
        let s = Sequent::new([Formula::and(Formula::atom("p"), Formula::atom("q"))], Some(Formula::atom("r")));
        let atoms = [Formula::atom("p"), Formula::atom("q"), Formula::atom("r")];
        let small = shrink_sequent(&s, &atoms, |t| !G4Prover::new().decide(t));
        assert_eq!(small.to_string(), "p => false");
    }
}
