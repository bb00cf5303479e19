//! Seeded random formula streams, exhaustive enumeration of small formulas,
//! and counterexample shrinking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequent::Sequent;
use crate::syntax::Formula;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Maximum nesting of connectives; 0 yields only atoms and ⊥.
    pub max_depth: usize,
    pub atom_pool: Vec<String>,
    pub circle_probability: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 3,
            atom_pool: vec!["p".into(), "q".into(), "r".into()],
            circle_probability: 0.15,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn new(max_depth: usize, atoms: &[&str], seed: u64) -> GenConfig {
        GenConfig {
            max_depth,
            atom_pool: atoms.iter().map(|s| s.to_string()).collect(),
            seed,
            ..GenConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.atom_pool.is_empty() {
            return Err(Error::Config("atom pool is empty".into()));
        }
        if !(0.0..=1.0).contains(&self.circle_probability) {
            return Err(Error::Config("circle probability outside [0, 1]".into()));
        }
        Ok(())
    }

    pub fn stream(&self) -> Result<FormulaStream> {
        self.validate()?;
        Ok(FormulaStream {
            atoms: self.atom_pool.iter().map(|a| Formula::atom(a)).collect(),
            max_depth: self.max_depth,
            circle: self.circle_probability,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
        })
    }
}

/// Infinite reproducible stream of formulas.
pub struct FormulaStream {
    atoms: Vec<Formula>,
    max_depth: usize,
    circle: f64,
    rng: ChaCha8Rng,
}

impl FormulaStream {
    fn leaf(&mut self) -> Formula {
        let i = self.rng.gen_range(0..=self.atoms.len());
        self.atoms.get(i).cloned().unwrap_or(Formula::Bot)
    }

    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 {
            return self.leaf();
        }
        if self.rng.gen_bool(self.circle) {
            return Formula::circle(self.formula(depth - 1));
        }
        match self.rng.gen_range(0..4) {
            0 => self.leaf(),
            1 => Formula::and(self.formula(depth - 1), self.formula(depth - 1)),
            2 => Formula::or(self.formula(depth - 1), self.formula(depth - 1)),
            _ => Formula::imp(self.formula(depth - 1), self.formula(depth - 1)),
        }
    }

    /// A sequent with up to `max_ant` antecedent formulas and a succedent
    /// present with probability 3/4.
    pub fn sequent(&mut self, max_ant: usize) -> Sequent {
        let n = self.rng.gen_range(0..=max_ant);
        let ant: Vec<Formula> = (0..n).map(|_| self.formula(self.max_depth)).collect();
        let suc = self.rng.gen_bool(0.75).then(|| self.formula(self.max_depth));
        Sequent::new(ant, suc)
    }

    pub fn below(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }
}

impl Iterator for FormulaStream {
    type Item = Formula;

    fn next(&mut self) -> Option<Formula> {
        Some(self.formula(self.max_depth))
    }
}

/// Every formula over `atoms` and ⊥ with at most `max_depth` nested
/// connectives, shallow formulas first.
pub fn enumerate(atoms: &[&str], max_depth: usize) -> Vec<Formula> {
    let mut upto: Vec<Formula> = std::iter::once(Formula::Bot)
        .chain(atoms.iter().map(|a| Formula::atom(a)))
        .collect();
    for _ in 0..max_depth {
        let mut next = upto.clone();
        for a in &upto {
            for b in &upto {
                next.push(Formula::and(a.clone(), b.clone()));
                next.push(Formula::or(a.clone(), b.clone()));
                next.push(Formula::imp(a.clone(), b.clone()));
            }
            next.push(Formula::circle(a.clone()));
        }
        next.sort();
        next.dedup();
        upto = next;
    }
    upto.sort_by_key(|f| (f.depth(), f.clone()));
    upto
}

/// Candidate replacements for `f`, simplest first: ⊥, the atoms, the
/// immediate subformulas, then `f` with one immediate subformula shrunk.
fn candidates(f: &Formula, atoms: &[Formula]) -> Vec<Formula> {
    let mut out = vec![Formula::Bot];
    out.extend(atoms.iter().cloned());
    match f {
        Formula::Bot | Formula::Atom(_) => {}
        Formula::Circle(a) => {
            out.push((**a).clone());
            for c in candidates(a, atoms) {
                out.push(Formula::circle(c));
            }
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            out.push((**a).clone());
            out.push((**b).clone());
            let rebuild = |x: Formula, y: Formula| match f {
                Formula::And(..) => Formula::and(x, y),
                Formula::Or(..) => Formula::or(x, y),
                _ => Formula::imp(x, y),
            };
            for c in candidates(a, atoms) {
                out.push(rebuild(c, (**b).clone()));
            }
            for c in candidates(b, atoms) {
                out.push(rebuild((**a).clone(), c));
            }
        }
    }
    out.retain(|c| (c.size(), c) < (f.size(), f));
    out
}

/// Greedily replaces subformulas by smaller ones while `fails` keeps
/// holding. Deterministic.
pub fn shrink(f: &Formula, atoms: &[Formula], mut fails: impl FnMut(&Formula) -> bool) -> Formula {
    let mut cur = f.clone();
    'progress: loop {
        for c in candidates(&cur, atoms) {
            if fails(&c) {
                cur = c;
                continue 'progress;
            }
        }
        return cur;
    }
}
