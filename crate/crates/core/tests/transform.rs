use pll_core::gen::GenConfig;
use pll_core::transform::{contract, eliminate_cut, make_cut, weaken};
use pll_core::{check, parse, parse_sequent, prove_g3, Calculus, Derivation, Error, G4Prover, ProofNode, Sequent};
use proptest::prelude::*;

fn g3(text: &str) -> ProofNode {
    prove_g3(&parse_sequent(text).unwrap(), None).unwrap().unwrap().root
}

fn checked(node: ProofNode) -> Derivation {
    let d = Derivation::new(Calculus::G3iLL, node);
    assert!(check(&d), "derivation of {} does not check", d.conclusion());
    d
}

#[test]
fn weakening_examples() {
    let d = weaken(&g3("p => p"), &parse_sequent("q =>").unwrap()).unwrap();
    assert_eq!(*d.conclusion(), parse_sequent("p, q => p").unwrap());
    checked(d);

    let base = g3("=> O p -> O p");
    let d = weaken(&base, &parse_sequent("r =>").unwrap()).unwrap();
    assert_eq!(*d.conclusion(), parse_sequent("r => O p -> O p").unwrap());
    assert!(d.height() <= base.height());
    checked(d);

    let d = weaken(&g3("false =>"), &parse_sequent("=> q").unwrap()).unwrap();
    assert_eq!(*d.conclusion(), parse_sequent("false => q").unwrap());
    checked(d);

    let clash = weaken(&g3("p => p"), &parse_sequent("=> q").unwrap());
    assert!(matches!(clash, Err(Error::Composition)), "{clash:?}");
}

#[test]
fn contraction_examples() {
    let d = contract(&g3("p, p => p"), &parse("p").unwrap()).unwrap();
    assert_eq!(*d.conclusion(), parse_sequent("p => p").unwrap());
    checked(d);

    let d = contract(&g3("O q, O q => O q"), &parse("O q").unwrap()).unwrap();
    assert_eq!(*d.conclusion(), parse_sequent("O q => O q").unwrap());
    checked(d);

    assert!(matches!(contract(&g3("p => p"), &parse("p").unwrap()), Err(Error::Precondition(_))));
}

#[test]
fn cut_on_a_circle() {
    let left = g3("O p => O (p | q)");
    let right = g3("O (p | q) => O (q | p)");
    let d = Derivation::new(Calculus::G3iLL, make_cut(left, right).unwrap());
    assert!(!d.is_cut_free());
    let (out, report) = eliminate_cut(&d).unwrap();
    assert!(out.is_cut_free());
    assert_eq!(report.cuts, 1);
    assert_eq!(out.conclusion(), d.conclusion());
    assert!(check(&out));
}

/// A derivable sequent drawn from the stream seeded with `seed`.
fn derivable(seed: u64) -> Option<Sequent> {
    let mut stream = GenConfig::new(2, &["p", "q", "r"], seed).stream().unwrap();
    let mut prover = G4Prover::new();
    (0..200).map(|_| stream.sequent(2)).find(|s| prover.decide(s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weakening_preserves_derivations(seed in any::<u64>(), extra in 0u64..1000) {
        let Some(s) = derivable(seed) else { return Ok(()) };
        let d = prove_g3(&s, None).unwrap().unwrap();
        let addition = GenConfig::new(2, &["p", "q", "r", "s"], extra).stream().unwrap().sequent(2).antecedent();
        let w = weaken(&d.root, &addition).unwrap();
        prop_assert_eq!(w.conclusion(), &s.compose(&addition).unwrap());
        prop_assert!(w.height() <= d.height());
        checked(w);
    }

    #[test]
    fn contraction_preserves_derivations(seed in any::<u64>()) {
        let Some(s) = derivable(seed) else { return Ok(()) };
        let Some(dup) = s.ant.iter().next().cloned() else { return Ok(()) };
        let doubled = s.with_ant(dup.clone());
        let d = prove_g3(&doubled, None).unwrap().unwrap();
        let c = contract(&d.root, &dup).unwrap();
        prop_assert_eq!(c.conclusion(), &s);
        prop_assert!(c.height() <= d.height());
        checked(c);
    }
}
