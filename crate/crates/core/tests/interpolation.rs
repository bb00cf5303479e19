use std::collections::BTreeSet;

use pll_core::gen::{enumerate, GenConfig};
use pll_core::interp::interpolate;
use pll_core::{craig, maehara, parse, parse_sequent, prove_g3, Error, Formula, G4Prover, Sequent, SplitSequent};
use proptest::prelude::*;

fn f(text: &str) -> Formula {
    parse(text).unwrap()
}

fn implies(prover: &mut G4Prover, a: &Formula, b: &Formula) -> bool {
    prover.decide(&Sequent::new([a.clone()], Some(b.clone())))
}

fn atoms(f: &Formula) -> BTreeSet<String> {
    f.atoms().into_iter().map(|a| a.to_string()).collect()
}

#[test]
fn craig_matches_a_brute_force_candidate() {
    let (phi, psi) = (f("p & q"), f("q | r"));
    let chi = craig(&phi, &psi).unwrap();
    let mut prover = G4Prover::new();
    assert!(implies(&mut prover, &phi, &chi) && implies(&mut prover, &chi, &psi));
    assert!(atoms(&chi).is_subset(&BTreeSet::from(["q".to_string()])));
    // every candidate over {q} that interpolates is below or equal to q here
    let candidates: Vec<Formula> = enumerate(&["q"], 1)
        .into_iter()
        .filter(|c| implies(&mut prover, &phi, c) && implies(&mut prover, c, &psi))
        .collect();
    assert!(!candidates.is_empty());
    assert!(candidates.iter().any(|c| implies(&mut prover, c, &chi) && implies(&mut prover, &chi, c)));
}

#[test]
fn craig_examples() {
    let mut prover = G4Prover::new();
    let chi = craig(&f("O p"), &f("O p")).unwrap();
    assert!(atoms(&chi).is_subset(&BTreeSet::from(["p".to_string()])));
    assert!(implies(&mut prover, &f("O p"), &chi) && implies(&mut prover, &chi, &f("O p")));
    assert!(matches!(craig(&f("p"), &f("q")), Err(Error::NotATheorem(_))));
}

#[test]
fn split_examples() {
    let d = prove_g3(&parse_sequent("p & q => O (q | r)").unwrap(), None).unwrap().unwrap();
    let split = SplitSequent::new([f("p & q")], [], Some(f("O (q | r)")));
    let chi = maehara(&d, &split).unwrap();
    assert!(split.verify(&chi, &mut G4Prover::new()).holds(), "{chi}");
    assert!(atoms(&chi).is_subset(&BTreeSet::from(["q".to_string()])));

    let d = prove_g3(&parse_sequent("false, p => q").unwrap(), None).unwrap().unwrap();
    let split = SplitSequent::new([Formula::Bot], [f("p")], Some(f("q")));
    assert_eq!(maehara(&d, &split).unwrap(), Formula::Bot);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn split_interpolants_satisfy_all_conditions(seed in any::<u64>(), mask in any::<u8>()) {
        let mut stream = GenConfig::new(2, &["p", "q", "r"], seed).stream().unwrap();
        let mut prover = G4Prover::new();
        let Some(s) = (0..200).map(|_| stream.sequent(3)).find(|s| prover.decide(s)) else {
            return Ok(());
        };
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for (i, x) in s.ant.iter().enumerate() {
            if mask >> i & 1 == 1 { left.push(x.clone()) } else { right.push(x.clone()) }
        }
        let split = SplitSequent::new(left.clone(), right.clone(), s.suc.clone());
        let chi = interpolate(&split, None).unwrap();
        prop_assert!(prover.decide(&Sequent::new(left.clone(), Some(chi.clone()))));
        let mut with_chi = right.clone();
        with_chi.push(chi.clone());
        prop_assert!(prover.decide(&Sequent::new(with_chi, s.suc.clone())));
        let left_atoms: BTreeSet<String> = left.iter().flat_map(atoms).collect();
        let right_atoms: BTreeSet<String> =
            right.iter().chain(s.suc.iter()).flat_map(atoms).collect();
        for a in atoms(&chi) {
            prop_assert!(left_atoms.contains(&a) && right_atoms.contains(&a), "stray {} in {}", a, chi);
        }
    }
}
