//! Symbolic safety game of a pastLTL formula and strategy extraction.
//!
//! The game state is the value of every temporal subformula one step
//! back. `O a` is read as `true S a` and `H a` as `!(true S !a)`, so the
//! state variables are exactly the `Y`, `WY` and `S` subformulas.

use crate::bdd::{Bdd, BddManager};
use crate::ltl::{Approximation, PastLtl, PropTable};
use crate::machine::{Alphabet, Letter, MealyMachine, Transition};
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("specification needs {needed} decision variables, more than the cap of {cap}")]
    VariableBudget { needed: usize, cap: usize },
    #[error("explicit state space exceeds the cap of {cap} states")]
    StateCap { cap: usize },
    #[error("{0} propositions exceed the 64 supported in explicit letters")]
    TooManyPropositions(usize),
    #[error("{0} temporal subformulas exceed the 64 supported in explicit states")]
    TooManyStateVariables(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameConfig {
    pub var_cap: usize,
    pub state_cap: usize,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig { var_cap: 512, state_cap: 100_000 }
    }
}

fn neg(f: PastLtl) -> PastLtl {
    match f {
        PastLtl::Not(a) => *a,
        PastLtl::True => PastLtl::False,
        PastLtl::False => PastLtl::True,
        other => PastLtl::not(other),
    }
}

/// Rewrites `O` and `H` into `S`, removing double negations they introduce.
pub fn normalize(f: &PastLtl) -> PastLtl {
    use PastLtl::*;
    let b = |g: &PastLtl| Box::new(normalize(g));
    match f {
        True | False | Prop(_) => f.clone(),
        Not(a) => neg(normalize(a)),
        And(x, y) => And(b(x), b(y)),
        Or(x, y) => Or(b(x), b(y)),
        Implies(x, y) => Implies(b(x), b(y)),
        Iff(x, y) => Iff(b(x), b(y)),
        Yesterday(a) => Yesterday(b(a)),
        WeakYesterday(a) => WeakYesterday(b(a)),
        Since(x, y) => Since(b(x), b(y)),
        Once(a) => Since(Box::new(True), b(a)),
        Historically(a) => neg(Since(Box::new(True), Box::new(neg(normalize(a))))),
    }
}

fn collect_temporals(f: &PastLtl, index: &mut HashMap<PastLtl, usize>, out: &mut Vec<PastLtl>) {
    for c in f.children() {
        collect_temporals(c, index, out);
    }
    if f.is_temporal() && !index.contains_key(f) {
        index.insert(f.clone(), out.len());
        out.push(f.clone());
    }
}

#[derive(Debug, Clone)]
pub struct SymbolicSafetyGame {
    pub mgr: BddManager,
    pub alphabet: Alphabet,
    /// Temporal subformulas in post-order; entry `k` owns state variable `k`.
    pub temporals: Vec<PastLtl>,
    num_props: usize,
    next: Vec<Bdd>,
    init: Vec<bool>,
    /// Top-level formula evaluated at the current step.
    pub safe: Bdd,
    /// Antecedent evaluated at the current step.
    pub env: Bdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WinningRegion {
    pub winning: Bdd,
    pub losing: Bdd,
    pub initial_winning: bool,
    pub iterations: usize,
}

/// A machine read off the winning region together with the valuation of
/// the temporal subformulas in every machine state.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub machine: MealyMachine,
    pub valuations: Vec<u64>,
}

pub fn build_game(approx: &Approximation, cfg: &GameConfig) -> Result<SymbolicSafetyGame, GameError> {
    build_game_from(&approx.formula, &approx.antecedent, &approx.table, cfg)
}

/// Builds the game of `formula`; `env` restricts which steps the
/// environment may take.
pub fn build_game_from(
    formula: &PastLtl,
    env: &PastLtl,
    table: &PropTable,
    cfg: &GameConfig,
) -> Result<SymbolicSafetyGame, GameError> {
    let nf = normalize(formula);
    let ne = normalize(env);
    let mut index = HashMap::new();
    let mut temporals = Vec::new();
    collect_temporals(&nf, &mut index, &mut temporals);
    collect_temporals(&ne, &mut index, &mut temporals);
    let num_props = table.len();
    let needed = num_props + 2 * temporals.len();
    if needed > cfg.var_cap {
        return Err(GameError::VariableBudget { needed, cap: cfg.var_cap });
    }
    let mut mgr = BddManager::new(needed as u32);
    let mut memo: HashMap<PastLtl, Bdd> = HashMap::new();
    let mut builder = CurBuilder { mgr: &mut mgr, index: &index, num_props, memo: &mut memo };
    let safe = builder.cur(&nf);
    let env_bdd = builder.cur(&ne);
    let mut next = Vec::with_capacity(temporals.len());
    for t in &temporals {
        let n = match t {
            PastLtl::Yesterday(a) | PastLtl::WeakYesterday(a) => builder.cur(a),
            _ => builder.cur(t),
        };
        next.push(n);
    }
    let init = temporals.iter().map(|t| matches!(t, PastLtl::WeakYesterday(_))).collect();
    Ok(SymbolicSafetyGame {
        mgr,
        alphabet: Alphabet::from_table(table),
        temporals,
        num_props,
        next,
        init,
        safe,
        env: env_bdd,
    })
}

struct CurBuilder<'a> {
    mgr: &'a mut BddManager,
    index: &'a HashMap<PastLtl, usize>,
    num_props: usize,
    memo: &'a mut HashMap<PastLtl, Bdd>,
}

impl CurBuilder<'_> {
    fn state_var(&mut self, f: &PastLtl) -> Bdd {
        let k = self.index[f];
        self.mgr.var((self.num_props + 2 * k) as u32)
    }

    /// Value of `f` at the current step over (state, inputs, outputs).
    fn cur(&mut self, f: &PastLtl) -> Bdd {
        if let Some(&b) = self.memo.get(f) {
            return b;
        }
        use PastLtl::*;
        let r = match f {
            True => Bdd::TRUE,
            False => Bdd::FALSE,
            Prop(p) => self.mgr.var(p.0 as u32),
            Not(a) => {
                let x = self.cur(a);
                self.mgr.not(x)
            }
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                let x = self.cur(a);
                let y = self.cur(b);
                match f {
                    And(..) => self.mgr.and(x, y),
                    Or(..) => self.mgr.or(x, y),
                    Implies(..) => self.mgr.implies(x, y),
                    _ => self.mgr.iff(x, y),
                }
            }
            Yesterday(_) | WeakYesterday(_) => self.state_var(f),
            Since(a, b) => {
                let x = self.cur(a);
                let y = self.cur(b);
                let s = self.state_var(f);
                let keep = self.mgr.and(x, s);
                self.mgr.or(y, keep)
            }
            Once(_) | Historically(_) => unreachable!("formula is normalized"),
        };
        self.memo.insert(f.clone(), r);
        r
    }
}

impl SymbolicSafetyGame {
    pub fn num_state_vars(&self) -> usize {
        self.temporals.len()
    }

    pub fn num_props(&self) -> usize {
        self.num_props
    }

    pub fn state_var(&self, k: usize) -> u32 {
        (self.num_props + 2 * k) as u32
    }

    pub fn primed_var(&self, k: usize) -> u32 {
        (self.num_props + 2 * k + 1) as u32
    }

    pub fn state_vars(&self) -> Vec<u32> {
        (0..self.temporals.len()).map(|k| self.state_var(k)).collect()
    }

    pub fn primed_vars(&self) -> Vec<u32> {
        (0..self.temporals.len()).map(|k| self.primed_var(k)).collect()
    }

    fn vars_with_role(&self, role: crate::ltl::Role) -> Vec<u32> {
        self.alphabet
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.role == role)
            .map(|(k, _)| k as u32)
            .collect()
    }

    pub fn input_vars(&self) -> Vec<u32> {
        self.vars_with_role(crate::ltl::Role::Input)
    }

    pub fn output_vars(&self) -> Vec<u32> {
        self.vars_with_role(crate::ltl::Role::Output)
    }

    pub fn initial_state(&self) -> u64 {
        self.init.iter().enumerate().fold(0, |m, (k, &b)| if b { m | 1 << k } else { m })
    }

    pub fn initial_bdd(&mut self) -> Bdd {
        let lits: Vec<(u32, bool)> =
            self.init.iter().enumerate().map(|(k, &b)| (self.state_var(k), b)).collect();
        let mut acc = Bdd::TRUE;
        for (v, b) in lits {
            let l = self.mgr.literal(v, b);
            acc = self.mgr.and(acc, l);
        }
        acc
    }

    /// Next-state function of state variable `k` over (state, inputs, outputs).
    pub fn next_function(&self, k: usize) -> Bdd {
        self.next[k]
    }

    /// `AND_k (s'_k <-> next_k)`.
    pub fn transition_relation(&mut self) -> Bdd {
        let mut acc = Bdd::TRUE;
        for k in 0..self.temporals.len() {
            let p = self.mgr.var(self.primed_var(k));
            let eq = self.mgr.iff(p, self.next[k]);
            acc = self.mgr.and(acc, eq);
        }
        acc
    }

    /// Whether every (state, inputs, outputs) has exactly one successor.
    pub fn is_functional(&mut self) -> bool {
        let t = self.transition_relation();
        let primed = self.primed_vars();
        let some = self.mgr.exists(t, &primed);
        let n = self.mgr.num_vars();
        let expected = 2f64.powi((n as usize - self.temporals.len()) as i32);
        some == Bdd::TRUE && self.mgr.sat_count(t, n) == expected
    }

    fn next_subst(&mut self) -> HashMap<u32, Bdd> {
        (0..self.temporals.len()).map(|k| (self.state_var(k), self.next[k])).collect()
    }

    fn state_assignment(&self, state: u64) -> Vec<(u32, bool)> {
        (0..self.temporals.len()).map(|k| (self.state_var(k), state >> k & 1 == 1)).collect()
    }

    fn holds_in(&self, f: Bdd, state: u64) -> bool {
        let base = self.num_props as u32;
        self.mgr.eval(f, |v| v >= base && (v - base) % 2 == 0 && state >> ((v - base) / 2) & 1 == 1)
    }

    /// Value of `f` at state `state` and letter `letter`.
    fn eval_at(&self, f: Bdd, state: u64, letter: Letter) -> bool {
        let base = self.num_props as u32;
        self.mgr.eval(f, |v| {
            if v < base {
                letter >> v & 1 == 1
            } else {
                (v - base) % 2 == 0 && state >> ((v - base) / 2) & 1 == 1
            }
        })
    }

    pub fn successor(&self, state: u64, letter: Letter) -> u64 {
        (0..self.temporals.len())
            .filter(|&k| self.eval_at(self.next[k], state, letter))
            .fold(0, |m, k| m | 1 << k)
    }

    pub fn is_safe_step(&self, state: u64, letter: Letter) -> bool {
        self.eval_at(self.safe, state, letter)
    }

    pub fn env_allows(&self, state: u64, letter: Letter) -> bool {
        self.eval_at(self.env, state, letter)
    }

    /// Text dump of the decision-diagram store.
    pub fn debug_dump(&self) -> String {
        self.mgr.dump()
    }
}

/// Greatest set of states from which the system can keep the formula true
/// forever, computed as the complement of the environment's attractor
/// to unsafe steps.
pub fn winning_region(game: &mut SymbolicSafetyGame) -> WinningRegion {
    let subst = game.next_subst();
    let ins = game.input_vars();
    let outs = game.output_vars();
    let bad = game.mgr.not(game.safe);
    let init = game.initial_state();
    let mut losing = Bdd::FALSE;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let pre = game.mgr.compose(losing, &subst);
        let step = game.mgr.or(bad, pre);
        let forced = game.mgr.forall(step, &outs);
        let attract = game.mgr.exists(forced, &ins);
        let grown = game.mgr.or(losing, attract);
        if grown == losing {
            break;
        }
        losing = grown;
        if game.holds_in(losing, init) {
            break;
        }
    }
    let winning = game.mgr.not(losing);
    let initial_winning = !game.holds_in(losing, init);
    WinningRegion {
        winning: if initial_winning { winning } else { Bdd::FALSE },
        losing,
        initial_winning,
        iterations,
    }
}

/// Enumerates the reachable part of the winning region. Every transition
/// keeps the formula true, leads back into the region, and is allowed by
/// the environment; all winning outputs are kept.
pub fn extract_machine(
    game: &mut SymbolicSafetyGame,
    region: &WinningRegion,
    cfg: &GameConfig,
) -> Result<Extraction, GameError> {
    if game.num_props > 64 {
        return Err(GameError::TooManyPropositions(game.num_props));
    }
    if game.temporals.len() > 64 {
        return Err(GameError::TooManyStateVariables(game.temporals.len()));
    }
    let alphabet = game.alphabet.clone();
    if !region.initial_winning {
        return Ok(Extraction { machine: MealyMachine::new(alphabet, 0, 0, []), valuations: vec![] });
    }
    let subst = game.next_subst();
    let win_next = game.mgr.compose(region.winning, &subst);
    let ok = game.mgr.and(game.safe, win_next);
    let good = game.mgr.and(ok, game.env);
    let prop_vars: Vec<u32> = (0..game.num_props as u32).collect();

    let init = game.initial_state();
    let mut ids: HashMap<u64, usize> = HashMap::from([(init, 0)]);
    let mut valuations = vec![init];
    let mut queue = VecDeque::from([init]);
    let mut transitions = Vec::new();
    while let Some(state) = queue.pop_front() {
        let from = ids[&state];
        let assignment = game.state_assignment(state);
        let allowed = game.mgr.restrict(good, &assignment);
        for letter in game.mgr.sat_assignments(allowed, &prop_vars) {
            let succ = game.successor(state, letter);
            let to = match ids.get(&succ) {
                Some(&id) => id,
                None => {
                    if valuations.len() >= cfg.state_cap {
                        return Err(GameError::StateCap { cap: cfg.state_cap });
                    }
                    let id = valuations.len();
                    ids.insert(succ, id);
                    valuations.push(succ);
                    queue.push_back(succ);
                    id
                }
            };
            transitions.push(Transition { from, letter, to });
        }
    }
    let n = valuations.len();
    let (machine, mapping) = MealyMachine::new_mapped(alphabet, n, 0, transitions);
    let mut ordered = vec![0u64; machine.num_states];
    for (old, new) in mapping.iter().enumerate() {
        if let Some(new) = new {
            ordered[*new] = valuations[old];
        }
    }
    Ok(Extraction { machine, valuations: ordered })
}

/// States of an extracted machine lacking a transition for some input the
/// environment may choose, with that input.
pub fn closure_violations(game: &mut SymbolicSafetyGame, ex: &Extraction) -> Vec<(usize, Letter)> {
    let outs = game.output_vars();
    let ins = game.input_vars();
    let m = &ex.machine;
    let mut out = Vec::new();
    for (s, &state) in ex.valuations.iter().enumerate() {
        let assignment = game.state_assignment(state);
        let env_here = game.mgr.restrict(game.env, &assignment);
        let env_inputs = game.mgr.exists(env_here, &outs);
        let present: std::collections::BTreeSet<Letter> =
            m.outgoing(s).iter().map(|t| m.input_part(t.letter)).collect();
        for input in game.mgr.sat_assignments(env_inputs, &ins) {
            let letter = ins
                .iter()
                .enumerate()
                .filter(|(j, _)| input >> j & 1 == 1)
                .fold(0u64, |l, (_, &v)| l | 1 << v);
            if !present.contains(&letter) {
                out.push((s, letter));
            }
        }
    }
    out
}

/// Explicit safety automaton over the letters of a chosen set of
/// propositions; the others are fixed to false.
#[derive(Debug, Clone)]
pub struct ExplicitAutomaton {
    /// `table[state][letter] = (safe, successor)`.
    pub table: Vec<Vec<(bool, usize)>>,
    pub initial: usize,
}

impl ExplicitAutomaton {
    pub fn build(game: &SymbolicSafetyGame, props: &[u32], cfg: &GameConfig) -> Result<Self, GameError> {
        let nletters = 1usize << props.len();
        let to_letter = |l: usize| {
            props
                .iter()
                .enumerate()
                .filter(|(j, _)| l >> j & 1 == 1)
                .fold(0u64, |m, (_, &p)| m | 1 << p)
        };
        let init = game.initial_state();
        let mut ids: HashMap<u64, usize> = HashMap::from([(init, 0)]);
        let mut states = vec![init];
        let mut table: Vec<Vec<(bool, usize)>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let state = states[i];
            let mut row = Vec::with_capacity(nletters);
            for l in 0..nletters {
                let letter = to_letter(l);
                let safe = game.is_safe_step(state, letter);
                let succ = game.successor(state, letter);
                let id = match ids.get(&succ) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= cfg.state_cap {
                            return Err(GameError::StateCap { cap: cfg.state_cap });
                        }
                        ids.insert(succ, states.len());
                        states.push(succ);
                        states.len() - 1
                    }
                };
                row.push((safe, id));
            }
            table.push(row);
            i += 1;
        }
        Ok(ExplicitAutomaton { table, initial: 0 })
    }

    pub fn num_states(&self) -> usize {
        self.table.len()
    }
}
