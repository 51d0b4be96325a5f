mod common;

use common::*;
use csynth::bdd::{Bdd, BddManager};
use csynth::game::*;
use csynth::ltl::{eval_trace, PastLtl, PropTable, Trace};
use csynth::pipeline::{synthesize, SynthesisOptions};
use csynth::Error;
use rand::Rng;
use std::collections::{BTreeSet, HashMap};

const VARS: u32 = 5;

/// Truth table over `VARS` variables: entry `a` is the value under assignment `a`.
type Table = Vec<bool>;

fn table(f: impl Fn(u32) -> bool) -> Table {
    (0..1u32 << VARS).map(f).collect()
}

fn random_fn(rng: &mut impl Rng, mgr: &mut BddManager, depth: u32) -> (Bdd, Table) {
    if depth == 0 || rng.gen_bool(0.25) {
        let v = rng.gen_range(0..VARS);
        return match rng.gen_range(0..6) {
            0 => (Bdd::TRUE, table(|_| true)),
            1 => (Bdd::FALSE, table(|_| false)),
            _ => (mgr.var(v), table(|a| a >> v & 1 == 1)),
        };
    }
    let (f, tf) = random_fn(rng, mgr, depth - 1);
    let (g, tg) = random_fn(rng, mgr, depth - 1);
    match rng.gen_range(0..8) {
        0 => (mgr.not(f), tf.iter().map(|b| !b).collect()),
        1 => (mgr.and(f, g), tf.iter().zip(&tg).map(|(a, b)| *a && *b).collect()),
        2 => (mgr.or(f, g), tf.iter().zip(&tg).map(|(a, b)| *a || *b).collect()),
        3 => (mgr.xor(f, g), tf.iter().zip(&tg).map(|(a, b)| a != b).collect()),
        4 => {
            let (h, th) = random_fn(rng, mgr, depth - 1);
            let r = mgr.ite(f, g, h);
            (r, (0..tf.len()).map(|a| if tf[a] { tg[a] } else { th[a] }).collect())
        }
        5 => {
            let v = rng.gen_range(0..VARS);
            let r = mgr.exists(f, &[v]);
            (r, table(|a| tf[(a & !(1 << v)) as usize] || tf[(a | 1 << v) as usize]))
        }
        6 => {
            let v = rng.gen_range(0..VARS);
            let r = mgr.forall(f, &[v]);
            (r, table(|a| tf[(a & !(1 << v)) as usize] && tf[(a | 1 << v) as usize]))
        }
        _ => {
            // f with variable v replaced by g.
            let v = rng.gen_range(0..VARS);
            let r = mgr.compose(f, &HashMap::from([(v, g)]));
            (r, table(|a| {
                let bit = if tg[a as usize] { 1 << v } else { 0 };
                tf[((a & !(1 << v)) | bit) as usize]
            }))
        }
    }
}

fn eval_table(mgr: &BddManager, f: Bdd) -> Table {
    table(|a| mgr.eval(f, |v| a >> v & 1 == 1))
}

#[test]
fn diagrams_agree_with_truth_tables() {
    let mut rng = rng(2);
    let mut mgr = BddManager::new(VARS);
    let mut seen: Vec<(Bdd, Table)> = Vec::new();
    for _ in 0..400 {
        let (f, tf) = random_fn(&mut rng, &mut mgr, 4);
        assert_eq!(eval_table(&mgr, f), tf);
        let count = tf.iter().filter(|b| **b).count();
        assert_eq!(mgr.sat_count(f, VARS) as usize, count);
        seen.push((f, tf));
    }
    for (f, tf) in &seen {
        for (g, tg) in &seen {
            assert_eq!(f == g, tf == tg, "canonicity");
        }
    }
}

#[test]
fn restrict_and_support() {
    let mut mgr = BddManager::new(3);
    let x = mgr.var(0);
    let z = mgr.var(2);
    let f = mgr.and(x, z);
    assert_eq!(mgr.support(f), vec![0, 2]);
    assert_eq!(mgr.restrict(f, &[(0, true)]), z);
    assert_eq!(mgr.restrict(f, &[(0, false)]), Bdd::FALSE);
    let ys = mgr.sat_assignments(f, &[0, 1, 2]);
    assert_eq!(ys.into_iter().collect::<BTreeSet<_>>(), BTreeSet::from([0b101, 0b111]));
    assert!(mgr.dump().starts_with("vars 3"));
}

fn plain_game(f: &PastLtl, inputs: usize, outputs: usize) -> SymbolicSafetyGame {
    build_game_from(f, &PastLtl::True, &PropTable::plain(inputs, outputs), &GameConfig::default())
        .unwrap()
}

fn reachable(game: &SymbolicSafetyGame, bits: usize) -> BTreeSet<u64> {
    let mut seen = BTreeSet::from([game.initial_state()]);
    let mut stack = vec![game.initial_state()];
    while let Some(s) = stack.pop() {
        for l in 0..1u64 << bits {
            let t = game.successor(s, l);
            if seen.insert(t) {
                stack.push(t);
            }
        }
    }
    seen
}

#[test]
fn historically_not_has_one_state_variable() {
    let f = PastLtl::Historically(Box::new(PastLtl::not(PastLtl::prop(0))));
    let game = plain_game(&f, 0, 1);
    assert_eq!(game.num_state_vars(), 1);
    assert_eq!(reachable(&game, 1).len(), 2);
}

#[test]
fn propositional_formula_gives_one_state() {
    let f = PastLtl::implies(PastLtl::prop(0), PastLtl::prop(1));
    let mut game = plain_game(&f, 1, 1);
    assert_eq!(game.num_state_vars(), 0);
    let region = winning_region(&mut game);
    let ex = extract_machine(&mut game, &region, &GameConfig::default()).unwrap();
    assert_eq!(ex.machine.num_states, 1);
}

#[test]
fn false_guarantee_is_unrealizable() {
    let mut game = plain_game(&PastLtl::False, 0, 1);
    let region = winning_region(&mut game);
    assert!(!region.initial_winning);
    assert_eq!(region.winning, Bdd::FALSE);
    let e = synthesize(&spec_text("unrealizable.spec"), &SynthesisOptions::default()).unwrap_err();
    assert!(matches!(e, Error::Unrealizable));
}

#[test]
fn satisfiable_guarantee_wins_everywhere() {
    // b -> Y a: the system can always choose !b.
    let f = PastLtl::implies(PastLtl::prop(1), PastLtl::Yesterday(Box::new(PastLtl::prop(0))));
    let mut game = plain_game(&f, 1, 1);
    let region = winning_region(&mut game);
    let ex = extract_machine(&mut game, &region, &GameConfig::default()).unwrap();
    assert_eq!(ex.machine.num_states, reachable(&game, 2).len());
}

#[test]
fn empty_guarantee_self_loops() {
    let s = synthesize("#input_props a\n#assume\nG(a || !a)\n", &SynthesisOptions::default()).unwrap();
    assert_eq!(s.machine.num_states, 1);
    assert_eq!(s.machine.transitions.len(), 2);
    assert!(s.machine.transitions.iter().all(|t| t.from == 0 && t.to == 0));
}

#[test]
fn transition_relation_is_functional() {
    let mut rng = rng(3);
    for _ in 0..30 {
        let f = random_formula(&mut rng, 3, 5);
        let mut game = plain_game(&f, 3, 0);
        assert!(game.is_functional());
    }
    for name in ["voting.spec", "erc20_extended.spec"] {
        let s = synth(name);
        let mut game = build_game(&s.approximation, &GameConfig::default()).unwrap();
        assert!(game.is_functional(), "{name}");
    }
}

#[test]
fn game_prefixes_match_trace_oracle() {
    let mut rng = rng(4);
    for _ in 0..150 {
        let f = random_formula(&mut rng, 4, 5);
        let game = plain_game(&f, 4, 0);
        for _ in 0..20 {
            let len = rng.gen_range(1..=8);
            let letters: Vec<u64> = (0..len).map(|_| rng.gen_range(0..16)).collect();
            let t = Trace::from_letters(&letters);
            let mut state = game.initial_state();
            for (i, &l) in letters.iter().enumerate() {
                assert_eq!(game.is_safe_step(state, l), eval_trace(&f, &t, i).unwrap());
                state = game.successor(state, l);
            }
        }
    }
}

#[test]
fn winning_regions_are_closed() {
    for name in ["fig1.spec", "voting.spec", "param_voting.spec", "erc20_extended.spec"] {
        assert!(synth(name).closure_violations.is_empty(), "{name}");
    }
}

#[test]
fn fig1_region_minimizes_to_three_states() {
    let s = synth("fig1.spec");
    assert_eq!(s.machine.num_states, 3);
    assert_eq!(synth("voting.spec").machine.num_states, 2);
    assert_eq!(synth("erc20_extended.spec").machine.num_states, 4);
}

#[test]
fn variable_budget_is_enforced() {
    let f = PastLtl::Yesterday(Box::new(PastLtl::prop(0)));
    let cfg = GameConfig { var_cap: 2, ..Default::default() };
    let e = build_game_from(&f, &PastLtl::True, &PropTable::plain(1, 0), &cfg).unwrap_err();
    assert!(matches!(e, GameError::VariableBudget { needed: 3, cap: 2 }));
}

#[test]
fn explicit_state_cap_is_enforced() {
    let s = synth("erc20_extended.spec");
    let cfg = GameConfig { state_cap: 2, ..Default::default() };
    let mut game = build_game(&s.approximation, &cfg).unwrap();
    let region = winning_region(&mut game);
    assert!(matches!(extract_machine(&mut game, &region, &cfg), Err(GameError::StateCap { cap: 2 })));
}
