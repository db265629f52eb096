//! Normalized bar complex in degrees ≤ 3, and a rewriting of 2-chains onto
//! the much smaller coordinate space spanned by `(s|y)` with `s` a
//! generator, which is congruent to the identity modulo boundaries.

use std::collections::BTreeMap;

use crate::group::FiniteGroup;

/// Integer 2-chain `Σ c·(a|b)` on pairs of non-identity elements.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Cycle2 {
    terms: BTreeMap<(usize, usize), i64>,
}

impl Cycle2 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((usize, usize), i64)>) -> Self {
        let mut c = Cycle2::new();
        for ((a, b), v) in terms {
            c.add_term(a, b, v);
        }
        c
    }

    /// `(a|b) - (b|a)`.
    pub fn toral(a: usize, b: usize) -> Self {
        Cycle2::from_terms([((a, b), 1), ((b, a), -1)])
    }

    /// Adds `v·(a|b)`; pairs containing the identity are dropped.
    pub fn add_term(&mut self, a: usize, b: usize, v: i64) {
        if a == 0 || b == 0 || v == 0 {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert(0);
        *e += v;
        if *e == 0 {
            self.terms.remove(&(a, b));
        }
    }

    pub fn add(&mut self, other: &Cycle2, scale: i64) {
        for (&(a, b), &v) in &other.terms {
            self.add_term(a, b, v * scale);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn coefficient(&self, a: usize, b: usize) -> i64 {
        self.terms.get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Chain with every element index replaced by `map[x]`.
    pub fn relabeled(&self, map: &[usize]) -> Cycle2 {
        Cycle2::from_terms(self.terms().map(|((a, b), v)| ((map[a], map[b]), v)))
    }
}

/// `d2(a|b) = (b) - (ab) + (a)`, identity terms dropped.
pub fn d2(g: &FiniteGroup, a: usize, b: usize) -> Vec<(usize, i64)> {
    let mut out: Vec<(usize, i64)> = Vec::with_capacity(3);
    for (x, v) in [(b, 1), (g.mul(a, b), -1), (a, 1)] {
        if x == 0 {
            continue;
        }
        match out.iter_mut().find(|t| t.0 == x) {
            Some(t) => t.1 += v,
            None => out.push((x, v)),
        }
    }
    out.retain(|t| t.1 != 0);
    out
}

/// `d3(a|b|c) = (b|c) - (ab|c) + (a|bc) - (a|b)`, identity terms dropped.
pub fn d3(g: &FiniteGroup, a: usize, b: usize, c: usize) -> Cycle2 {
    if a == 0 || b == 0 || c == 0 {
        return Cycle2::new();
    }
    Cycle2::from_terms([
        ((b, c), 1),
        ((g.mul(a, b), c), -1),
        ((a, g.mul(b, c)), 1),
        ((a, b), -1),
    ])
}

/// `d2` applied to a chain.
pub fn boundary2(g: &FiniteGroup, chain: &Cycle2) -> BTreeMap<usize, i64> {
    let mut out = BTreeMap::new();
    for ((a, b), v) in chain.terms() {
        for (x, w) in d2(g, a, b) {
            *out.entry(x).or_insert(0) += v * w;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

pub fn cycle_check(g: &FiniteGroup, chain: &Cycle2) -> bool {
    boundary2(g, chain).is_empty()
}

/// As [`cycle_check`] with coefficients reduced mod `q`.
pub fn cycle_check_mod(g: &FiniteGroup, chain: &Cycle2, q: i64) -> bool {
    boundary2(g, chain).values().all(|v| v.rem_euclid(q) == 0)
}

/// Rewrites 2-chains onto coordinates `(s|y)`, `s` ranging over the distinct
/// non-identity generators and `y ≠ e`. Along a breadth-first tree
/// `x = s·x'` it applies `(x|y) ≡ (x'|y) + (s|x'y) - (s|x')`, the relation
/// `d3(s|x'|y)`, until the first entry is a generator.
#[derive(Debug, Clone)]
pub struct BarRewriter {
    order: usize,
    gens: Vec<usize>,
    // tree: x = gens[via[x]] * parent[x]
    parent: Vec<u32>,
    via: Vec<u32>,
}

impl BarRewriter {
    pub fn new(g: &FiniteGroup) -> Self {
        let n = g.order();
        let mut gens: Vec<usize> = Vec::new();
        for gen in g.generators() {
            if gen.element != 0 && !gens.contains(&gen.element) {
                gens.push(gen.element);
            }
        }
        let mut parent = vec![u32::MAX; n];
        let mut via = vec![u32::MAX; n];
        parent[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (i, &s) in gens.iter().enumerate() {
                let y = g.mul(s, x);
                if parent[y] == u32::MAX {
                    parent[y] = x as u32;
                    via[y] = i as u32;
                    queue.push_back(y);
                }
            }
        }
        debug_assert!(parent.iter().all(|&p| p != u32::MAX));
        BarRewriter {
            order: n,
            gens,
            parent,
            via,
        }
    }

    /// Number of rewritten coordinates.
    pub fn dim(&self) -> usize {
        self.gens.len() * (self.order - 1)
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    fn coord(&self, s: usize, y: usize) -> usize {
        s * (self.order - 1) + (y - 1)
    }

    /// Appends the rewrite of `v·(x|y)`.
    pub fn rewrite_pair(&self, g: &FiniteGroup, x: usize, y: usize, v: i64, out: &mut Vec<(usize, i64)>) {
        if y == 0 {
            return;
        }
        let mut x = x;
        while x != 0 {
            let s = self.via[x] as usize;
            let xp = self.parent[x] as usize;
            let xpy = g.mul(xp, y);
            if xpy != 0 {
                out.push((self.coord(s, xpy), v));
            }
            if xp != 0 {
                out.push((self.coord(s, xp), -v));
            }
            x = xp;
        }
    }

    /// Sorts, merges and drops zero entries.
    pub fn compress(out: &mut Vec<(usize, i64)>) {
        out.sort_unstable_by_key(|t| t.0);
        let mut w = 0;
        for r in 0..out.len() {
            if w > 0 && out[w - 1].0 == out[r].0 {
                out[w - 1].1 += out[r].1;
            } else {
                out[w] = out[r];
                w += 1;
            }
        }
        out.truncate(w);
        out.retain(|t| t.1 != 0);
    }

    pub fn rewrite(&self, g: &FiniteGroup, chain: &Cycle2) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for ((a, b), v) in chain.terms() {
            self.rewrite_pair(g, a, b, v, &mut out);
        }
        Self::compress(&mut out);
        out
    }

    /// Number of boundary columns `d3(s|b|c)`, which together span the
    /// rewritten image of all boundaries.
    pub fn boundary_count(&self) -> usize {
        self.gens.len() * (self.order - 1) * (self.order - 1)
    }

    /// Rewritten `d3(s|b|c)` for the `index`-th triple, in lexicographic
    /// order of `(s, b, c)`.
    pub fn boundary_column(&self, g: &FiniteGroup, index: usize, out: &mut Vec<(usize, i64)>) {
        out.clear();
        let m = self.order - 1;
        let si = index / (m * m);
        let b = (index / m) % m + 1;
        let c = index % m + 1;
        let s = self.gens[si];
        // (b|c) - (sb|c) + (s|bc) - (s|b)
        self.rewrite_pair(g, b, c, 1, out);
        self.rewrite_pair(g, g.mul(s, b), c, -1, out);
        let bc = g.mul(b, c);
        if bc != 0 {
            out.push((self.coord(si, bc), 1));
        }
        out.push((self.coord(si, b), -1));
        Self::compress(out);
    }
}
