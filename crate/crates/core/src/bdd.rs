//! Reduced ordered binary decision diagrams with a fixed variable order.
//!
//! Variable `v` is tested at level `v`; smaller indices are closer to the
//! root. Nodes live in a single arena hashed through a unique table, so two
//! diagrams denote the same function iff their handles are equal.

use std::collections::HashMap;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bdd(u32);

impl Bdd {
    pub const FALSE: Bdd = Bdd(0);
    pub const TRUE: Bdd = Bdd(1);

    pub fn is_const(self) -> bool {
        self.0 < 2
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

const TERMINAL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    lo: Bdd,
    hi: Bdd,
}

#[derive(Debug, Clone)]
pub struct BddManager {
    nodes: Vec<Node>,
    unique: HashMap<Node, Bdd>,
    ite_cache: HashMap<(Bdd, Bdd, Bdd), Bdd>,
    num_vars: u32,
}

impl Default for BddManager {
    fn default() -> Self {
        Self::new(0)
    }
}

impl BddManager {
    pub fn new(num_vars: u32) -> Self {
        let terminal = |b| Node { var: TERMINAL, lo: b, hi: b };
        BddManager {
            nodes: vec![terminal(Bdd::FALSE), terminal(Bdd::TRUE)],
            unique: HashMap::new(),
            ite_cache: HashMap::new(),
            num_vars,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Total number of nodes in the arena, terminals included.
    pub fn arena_size(&self) -> usize {
        self.nodes.len()
    }

    pub fn constant(&self, value: bool) -> Bdd {
        if value {
            Bdd::TRUE
        } else {
            Bdd::FALSE
        }
    }

    fn var_of(&self, f: Bdd) -> u32 {
        self.nodes[f.0 as usize].var
    }

    fn lo(&self, f: Bdd) -> Bdd {
        self.nodes[f.0 as usize].lo
    }

    fn hi(&self, f: Bdd) -> Bdd {
        self.nodes[f.0 as usize].hi
    }

    /// Top variable of a non-terminal diagram.
    pub fn top_var(&self, f: Bdd) -> Option<u32> {
        (!f.is_const()).then(|| self.var_of(f))
    }

    fn mk(&mut self, var: u32, lo: Bdd, hi: Bdd) -> Bdd {
        if lo == hi {
            return lo;
        }
        let node = Node { var, lo, hi };
        if let Some(&b) = self.unique.get(&node) {
            return b;
        }
        let b = Bdd(self.nodes.len() as u32);
        self.nodes.push(node);
        self.unique.insert(node, b);
        b
    }

    pub fn var(&mut self, v: u32) -> Bdd {
        assert!(v < self.num_vars, "variable {v} out of range");
        self.mk(v, Bdd::FALSE, Bdd::TRUE)
    }

    pub fn nvar(&mut self, v: u32) -> Bdd {
        assert!(v < self.num_vars, "variable {v} out of range");
        self.mk(v, Bdd::TRUE, Bdd::FALSE)
    }

    pub fn literal(&mut self, v: u32, positive: bool) -> Bdd {
        if positive {
            self.var(v)
        } else {
            self.nvar(v)
        }
    }

    fn cofactors(&self, f: Bdd, v: u32) -> (Bdd, Bdd) {
        if !f.is_const() && self.var_of(f) == v {
            (self.lo(f), self.hi(f))
        } else {
            (f, f)
        }
    }

    pub fn ite(&mut self, f: Bdd, g: Bdd, h: Bdd) -> Bdd {
        if f == Bdd::TRUE {
            return g;
        }
        if f == Bdd::FALSE {
            return h;
        }
        if g == h {
            return g;
        }
        if g == Bdd::TRUE && h == Bdd::FALSE {
            return f;
        }
        if let Some(&r) = self.ite_cache.get(&(f, g, h)) {
            return r;
        }
        let top = [f, g, h]
            .iter()
            .filter(|b| !b.is_const())
            .map(|b| self.var_of(*b))
            .min()
            .expect("f is not constant");
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let (h0, h1) = self.cofactors(h, top);
        let lo = self.ite(f0, g0, h0);
        let hi = self.ite(f1, g1, h1);
        let r = self.mk(top, lo, hi);
        self.ite_cache.insert((f, g, h), r);
        r
    }

    pub fn not(&mut self, f: Bdd) -> Bdd {
        self.ite(f, Bdd::FALSE, Bdd::TRUE)
    }

    pub fn and(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.ite(f, g, Bdd::FALSE)
    }

    pub fn or(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.ite(f, Bdd::TRUE, g)
    }

    pub fn implies(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.ite(f, g, Bdd::TRUE)
    }

    pub fn xor(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let ng = self.not(g);
        self.ite(f, ng, g)
    }

    pub fn iff(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let ng = self.not(g);
        self.ite(f, g, ng)
    }

    pub fn and_all(&mut self, items: impl IntoIterator<Item = Bdd>) -> Bdd {
        items.into_iter().fold(Bdd::TRUE, |acc, b| self.and(acc, b))
    }

    pub fn or_all(&mut self, items: impl IntoIterator<Item = Bdd>) -> Bdd {
        items.into_iter().fold(Bdd::FALSE, |acc, b| self.or(acc, b))
    }

    fn var_mask(&self, vars: &[u32]) -> Vec<bool> {
        let mut mask = vec![false; self.num_vars as usize];
        for &v in vars {
            mask[v as usize] = true;
        }
        mask
    }

    /// Existential quantification over `vars`.
    pub fn exists(&mut self, f: Bdd, vars: &[u32]) -> Bdd {
        let mask = self.var_mask(vars);
        let mut memo = HashMap::new();
        self.exists_rec(f, &mask, &mut memo)
    }

    fn exists_rec(&mut self, f: Bdd, mask: &[bool], memo: &mut HashMap<Bdd, Bdd>) -> Bdd {
        if f.is_const() {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let (v, lo, hi) = (self.var_of(f), self.lo(f), self.hi(f));
        let l = self.exists_rec(lo, mask, memo);
        let r = if mask[v as usize] {
            if l == Bdd::TRUE {
                Bdd::TRUE
            } else {
                let h = self.exists_rec(hi, mask, memo);
                self.or(l, h)
            }
        } else {
            let h = self.exists_rec(hi, mask, memo);
            self.mk(v, l, h)
        };
        memo.insert(f, r);
        r
    }

    /// Universal quantification over `vars`.
    pub fn forall(&mut self, f: Bdd, vars: &[u32]) -> Bdd {
        let nf = self.not(f);
        let e = self.exists(nf, vars);
        self.not(e)
    }

    /// `exists vars. f && g` without building the conjunction first.
    pub fn and_exists(&mut self, f: Bdd, g: Bdd, vars: &[u32]) -> Bdd {
        let mask = self.var_mask(vars);
        let mut memo = HashMap::new();
        self.and_exists_rec(f, g, &mask, &mut memo)
    }

    fn and_exists_rec(
        &mut self,
        f: Bdd,
        g: Bdd,
        mask: &[bool],
        memo: &mut HashMap<(Bdd, Bdd), Bdd>,
    ) -> Bdd {
        if f == Bdd::FALSE || g == Bdd::FALSE {
            return Bdd::FALSE;
        }
        if f == Bdd::TRUE && g == Bdd::TRUE {
            return Bdd::TRUE;
        }
        let key = if f <= g { (f, g) } else { (g, f) };
        if let Some(&r) = memo.get(&key) {
            return r;
        }
        let top = [f, g]
            .iter()
            .filter(|b| !b.is_const())
            .map(|b| self.var_of(*b))
            .min()
            .expect("non-constant operand");
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let l = self.and_exists_rec(f0, g0, mask, memo);
        let r = if mask[top as usize] {
            if l == Bdd::TRUE {
                Bdd::TRUE
            } else {
                let h = self.and_exists_rec(f1, g1, mask, memo);
                self.or(l, h)
            }
        } else {
            let h = self.and_exists_rec(f1, g1, mask, memo);
            self.mk(top, l, h)
        };
        memo.insert(key, r);
        r
    }

    /// Fixes the variables in `assignment` to the given values.
    pub fn restrict(&mut self, f: Bdd, assignment: &[(u32, bool)]) -> Bdd {
        let mut values = vec![None; self.num_vars as usize];
        for &(v, b) in assignment {
            values[v as usize] = Some(b);
        }
        let mut memo = HashMap::new();
        self.restrict_rec(f, &values, &mut memo)
    }

    fn restrict_rec(
        &mut self,
        f: Bdd,
        values: &[Option<bool>],
        memo: &mut HashMap<Bdd, Bdd>,
    ) -> Bdd {
        if f.is_const() {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let (v, lo, hi) = (self.var_of(f), self.lo(f), self.hi(f));
        let r = match values[v as usize] {
            Some(false) => self.restrict_rec(lo, values, memo),
            Some(true) => self.restrict_rec(hi, values, memo),
            None => {
                let l = self.restrict_rec(lo, values, memo);
                let h = self.restrict_rec(hi, values, memo);
                self.mk(v, l, h)
            }
        };
        memo.insert(f, r);
        r
    }

    /// Simultaneous substitution of diagrams for variables.
    pub fn compose(&mut self, f: Bdd, subst: &HashMap<u32, Bdd>) -> Bdd {
        let mut memo = HashMap::new();
        self.compose_rec(f, subst, &mut memo)
    }

    fn compose_rec(
        &mut self,
        f: Bdd,
        subst: &HashMap<u32, Bdd>,
        memo: &mut HashMap<Bdd, Bdd>,
    ) -> Bdd {
        if f.is_const() {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let (v, lo, hi) = (self.var_of(f), self.lo(f), self.hi(f));
        let l = self.compose_rec(lo, subst, memo);
        let h = self.compose_rec(hi, subst, memo);
        let test = match subst.get(&v) {
            Some(&g) => g,
            None => self.var(v),
        };
        let r = self.ite(test, h, l);
        memo.insert(f, r);
        r
    }

    /// Renames variables according to `map`.
    pub fn rename(&mut self, f: Bdd, map: &HashMap<u32, u32>) -> Bdd {
        let subst: HashMap<u32, Bdd> = map.iter().map(|(&a, &b)| (a, self.var(b))).collect();
        self.compose(f, &subst)
    }

    pub fn eval(&self, f: Bdd, value: impl Fn(u32) -> bool) -> bool {
        let mut cur = f;
        while !cur.is_const() {
            cur = if value(self.var_of(cur)) { self.hi(cur) } else { self.lo(cur) };
        }
        cur == Bdd::TRUE
    }

    /// Disjoint cubes covering the satisfying assignments; each cube lists
    /// the fixed variables in order.
    pub fn cubes(&self, f: Bdd) -> Vec<Vec<(u32, bool)>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.cubes_rec(f, &mut path, &mut out);
        out
    }

    fn cubes_rec(&self, f: Bdd, path: &mut Vec<(u32, bool)>, out: &mut Vec<Vec<(u32, bool)>>) {
        if f == Bdd::FALSE {
            return;
        }
        if f == Bdd::TRUE {
            out.push(path.clone());
            return;
        }
        let v = self.var_of(f);
        path.push((v, false));
        self.cubes_rec(self.lo(f), path, out);
        path.pop();
        path.push((v, true));
        self.cubes_rec(self.hi(f), path, out);
        path.pop();
    }

    /// All satisfying assignments over `vars` (which must include the
    /// support of `f`), as bitmasks indexed by position in `vars`.
    pub fn sat_assignments(&self, f: Bdd, vars: &[u32]) -> Vec<u64> {
        assert!(vars.len() <= 64, "too many variables to enumerate");
        let pos: HashMap<u32, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut out = Vec::new();
        for cube in self.cubes(f) {
            let mut fixed = 0u64;
            let mut base = 0u64;
            for (v, b) in cube {
                let k = *pos.get(&v).expect("support variable missing from enumeration set");
                fixed |= 1 << k;
                if b {
                    base |= 1 << k;
                }
            }
            let free: Vec<usize> = (0..vars.len()).filter(|k| fixed >> k & 1 == 0).collect();
            for combo in 0u64..(1u64 << free.len()) {
                let mut a = base;
                for (j, &k) in free.iter().enumerate() {
                    if combo >> j & 1 == 1 {
                        a |= 1 << k;
                    }
                }
                out.push(a);
            }
        }
        out.sort_unstable();
        out
    }

    /// Number of satisfying assignments over the first `nvars` variables.
    pub fn sat_count(&self, f: Bdd, nvars: u32) -> f64 {
        let mut memo = HashMap::new();
        self.sat_count_rec(f, 0, nvars, &mut memo)
    }

    fn sat_count_rec(&self, f: Bdd, level: u32, nvars: u32, memo: &mut HashMap<Bdd, f64>) -> f64 {
        if f == Bdd::FALSE {
            return 0.0;
        }
        if f == Bdd::TRUE {
            return 2f64.powi((nvars - level) as i32);
        }
        let v = self.var_of(f);
        let below = match memo.get(&f) {
            Some(&c) => c,
            None => {
                let c = self.sat_count_rec(self.lo(f), v + 1, nvars, memo)
                    + self.sat_count_rec(self.hi(f), v + 1, nvars, memo);
                memo.insert(f, c);
                c
            }
        };
        below * 2f64.powi((v - level) as i32)
    }

    pub fn support(&self, f: Bdd) -> Vec<u32> {
        let mut seen = std::collections::HashSet::new();
        let mut vars = std::collections::BTreeSet::new();
        let mut stack = vec![f];
        while let Some(g) = stack.pop() {
            if g.is_const() || !seen.insert(g) {
                continue;
            }
            vars.insert(self.var_of(g));
            stack.push(self.lo(g));
            stack.push(self.hi(g));
        }
        vars.into_iter().collect()
    }

    /// Number of distinct nodes reachable from `f`, terminals included.
    pub fn node_count(&self, f: Bdd) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![f];
        while let Some(g) = stack.pop() {
            if !seen.insert(g) || g.is_const() {
                continue;
            }
            stack.push(self.lo(g));
            stack.push(self.hi(g));
        }
        seen.len()
    }

    /// Text dump of the unique table, one node per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vars {} nodes {}", self.num_vars, self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate().skip(2) {
            let _ = writeln!(out, "{i}: var {} lo {} hi {}", n.var, n.lo.0, n.hi.0);
        }
        out
    }
}
