//! Finite groups as dense multiplication tables.
//!
//! Elements are indices `0..order` with the identity fixed at `0`. Every group
//! carries a list of labelled generators, and each element is named by a
//! shortest word in those generators (breadth-first over right multiplication).

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Hard cap on the order of any group built by this crate.
pub const DEFAULT_ORDER_CAP: usize = 20_000;

/// Groups up to this order get exhaustive axiom checks on untrusted input.
pub const AXIOM_CHECK_LIMIT: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub element: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    generators: Vec<Generator>,
    names: Vec<String>,
}

/// Set of elements of a parent group, closed under products and inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupHandle {
    elements: Vec<usize>,
    bits: Vec<u64>,
}

/// Element-indexed map between two groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMap {
    pub image: Vec<usize>,
}

/// Shapes singled out by the adjacent-family classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SpecialShape {
    /// Cyclic of the given order (order 1 is the trivial group).
    Cyclic(usize),
    /// Dihedral of order `2k` with rotation subgroup of order `k`.
    Dihedral(usize),
    A4,
    S4,
    A5,
    Other,
}

impl std::fmt::Display for SpecialShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpecialShape::Cyclic(k) => write!(f, "C{k}"),
            SpecialShape::Dihedral(k) => write!(f, "D{}", 2 * k),
            SpecialShape::A4 => write!(f, "A4"),
            SpecialShape::S4 => write!(f, "S4"),
            SpecialShape::A5 => write!(f, "A5"),
            SpecialShape::Other => write!(f, "other"),
        }
    }
}

impl SubgroupHandle {
    fn from_sorted(parent_order: usize, elements: Vec<usize>) -> Self {
        let mut bits = vec![0u64; parent_order.div_ceil(64)];
        for &x in &elements {
            bits[x / 64] |= 1 << (x % 64);
        }
        SubgroupHandle { elements, bits }
    }

    fn from_bits(bits: Vec<u64>) -> Self {
        let mut elements = Vec::new();
        for (w, &word) in bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let t = word.trailing_zeros() as usize;
                elements.push(w * 64 + t);
                word &= word - 1;
            }
        }
        SubgroupHandle { elements, bits }
    }

    pub fn contains(&self, x: usize) -> bool {
        self.bits
            .get(x / 64)
            .is_some_and(|w| (w >> (x % 64)) & 1 == 1)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn bits(&self) -> &[u64] {
        &self.bits
    }

    pub fn is_subset_of(&self, other: &SubgroupHandle) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

impl GroupMap {
    pub fn identity(order: usize) -> Self {
        GroupMap {
            image: (0..order).collect(),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn is_homomorphism(&self, source: &FiniteGroup, target: &FiniteGroup) -> bool {
        if self.image.len() != source.order() || self.image[0] != 0 {
            return false;
        }
        if self.image.iter().any(|&y| y >= target.order()) {
            return false;
        }
        (0..source.order()).all(|a| {
            (0..source.order())
                .all(|b| self.image[source.mul(a, b)] == target.mul(self.image[a], self.image[b]))
        })
    }
}

/// Breadth-first enumeration of a group given by generators in some ambient
/// representation. Element 0 is the identity; `parent[x] = (y, g)` means
/// `x = y * gens[g]` with `y` earlier in the order.
struct Closure<T> {
    elements: Vec<T>,
    right: Vec<Vec<usize>>,
    parent: Vec<Option<(usize, usize)>>,
}

fn enumerate_closure<T, F>(identity: T, gens: &[T], mul: F, cap: usize) -> Result<Closure<T>>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let mut index: HashMap<T, usize> = HashMap::new();
    let mut elements = vec![identity.clone()];
    let mut parent = vec![None];
    let mut right: Vec<Vec<usize>> = Vec::new();
    index.insert(identity, 0);
    let mut i = 0;
    while i < elements.len() {
        let mut row = Vec::with_capacity(gens.len());
        for (g, s) in gens.iter().enumerate() {
            let y = mul(&elements[i], s);
            let next = elements.len();
            let idx = *index.entry(y.clone()).or_insert(next);
            if idx == next {
                if next >= cap {
                    return Err(Error::Resource(format!("group order exceeds cap {cap}")));
                }
                elements.push(y);
                parent.push(Some((i, g)));
            }
            row.push(idx);
        }
        right.push(row);
        i += 1;
    }
    Ok(Closure {
        elements,
        right,
        parent,
    })
}

fn is_identifier(label: &str) -> bool {
    let mut chars = label.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    label != "e" && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_labels(labels: &[String]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if !is_identifier(l) {
            return Err(Error::Input(format!("invalid generator label `{l}`")));
        }
        if labels[..i].contains(l) {
            return Err(Error::Input(format!("duplicate generator label `{l}`")));
        }
    }
    Ok(())
}

/// `a, b, c, d, f, ...` skipping `e`, then `g1, g2, ...`.
pub fn default_labels(count: usize) -> Vec<String> {
    let letters: Vec<char> = ('a'..='z').filter(|&c| c != 'e').collect();
    (0..count)
        .map(|i| {
            if count <= letters.len() {
                letters[i].to_string()
            } else {
                format!("g{}", i + 1)
            }
        })
        .collect()
}

fn format_word(word: &[usize], labels: &[String]) -> String {
    if word.is_empty() {
        return "e".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < word.len() {
        let mut j = i;
        while j < word.len() && word[j] == word[i] {
            j += 1;
        }
        let run = j - i;
        if run == 1 {
            parts.push(labels[word[i]].clone());
        } else {
            parts.push(format!("{}^{}", labels[word[i]], run));
        }
        i = j;
    }
    parts.join("*")
}

impl FiniteGroup {
    /// Builds the group from a right-multiplication table by generators,
    /// already in breadth-first order (`parent[x].0 < x`).
    fn from_right_table(
        right: &[Vec<usize>],
        parent: &[Option<(usize, usize)>],
        labels: Vec<String>,
        gen_elements: Vec<usize>,
    ) -> FiniteGroup {
        let n = right.len();
        let mut table = vec![0u32; n * n];
        for i in 0..n {
            table[i * n] = i as u32;
        }
        for j in 1..n {
            let (pj, g) = parent[j].expect("non-identity element has a parent");
            for i in 0..n {
                let ip = table[i * n + pj] as usize;
                table[i * n + j] = right[ip][g] as u32;
            }
        }
        let mut inverse = vec![0u32; n];
        for i in 0..n {
            let row = &table[i * n..(i + 1) * n];
            inverse[i] = row.iter().position(|&x| x == 0).expect("inverse exists") as u32;
        }
        let mut words: Vec<Vec<usize>> = vec![Vec::new(); n];
        for j in 1..n {
            let (pj, g) = parent[j].unwrap();
            let mut w = words[pj].clone();
            w.push(g);
            words[j] = w;
        }
        let names = words.iter().map(|w| format_word(w, &labels)).collect();
        let generators = labels
            .into_iter()
            .zip(gen_elements)
            .map(|(label, element)| Generator { label, element })
            .collect();
        FiniteGroup {
            order: n,
            table,
            inverse,
            generators,
            names,
        }
    }

    /// Rebuilds a group from any multiplication function on `0..n` (identity
    /// at 0) and a generating list. Returns the group together with the map
    /// from old indices to new ones.
    fn from_mul_with_generators<F>(
        n: usize,
        mul: F,
        gens: Vec<(String, usize)>,
    ) -> Result<(FiniteGroup, Vec<usize>)>
    where
        F: Fn(usize, usize) -> usize,
    {
        let gen_elems: Vec<usize> = gens.iter().map(|g| g.1).collect();
        let closure = enumerate_closure(0usize, &gen_elems, |&a, &b| mul(a, b), n.max(1))?;
        if closure.elements.len() != n {
            return Err(Error::Input(format!(
                "generators span {} of {} elements",
                closure.elements.len(),
                n
            )));
        }
        let mut old_to_new = vec![0usize; n];
        for (new, &old) in closure.elements.iter().enumerate() {
            old_to_new[old] = new;
        }
        let labels: Vec<String> = gens.iter().map(|g| g.0.clone()).collect();
        let new_gen_elems: Vec<usize> = gen_elems.iter().map(|&x| old_to_new[x]).collect();
        let group =
            FiniteGroup::from_right_table(&closure.right, &closure.parent, labels, new_gen_elems);
        Ok((group, old_to_new))
    }

    /// Builds a group from its right regular action: `right[x][g]` is the
    /// point reached from `x` under generator `g`, with point 0 the identity.
    /// Every point must be reachable from 0.
    pub fn from_regular_action(right: &[Vec<usize>], labels: Vec<String>) -> Result<FiniteGroup> {
        check_labels(&labels)?;
        let n = right.len();
        if n == 0 {
            return Err(Error::Input("empty action".into()));
        }
        if n > DEFAULT_ORDER_CAP {
            return Err(Error::Resource(format!("group order exceeds cap {DEFAULT_ORDER_CAP}")));
        }
        let ngens = labels.len();
        let mut old_to_new = vec![usize::MAX; n];
        let mut order = vec![0usize];
        let mut parent = vec![None];
        old_to_new[0] = 0;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for g in 0..ngens {
                let y = right[x][g];
                if old_to_new[y] == usize::MAX {
                    old_to_new[y] = order.len();
                    parent.push(Some((i, g)));
                    order.push(y);
                }
            }
            i += 1;
        }
        if order.len() != n {
            return Err(Error::Input("action is not transitive".into()));
        }
        let new_right: Vec<Vec<usize>> = order
            .iter()
            .map(|&x| (0..ngens).map(|g| old_to_new[right[x][g]]).collect())
            .collect();
        let gen_elems = (0..ngens).map(|g| new_right[0][g]).collect();
        let group = FiniteGroup::from_right_table(&new_right, &parent, labels, gen_elems);
        // the right action is regular iff the rebuilt table reproduces it
        for (x, row) in new_right.iter().enumerate() {
            for (g, &y) in row.iter().enumerate() {
                if group.mul(x, group.generators[g].element) != y {
                    return Err(Error::Input("action is not regular".into()));
                }
            }
        }
        Ok(group)
    }

    /// The trivial group.
    pub fn trivial() -> FiniteGroup {
        FiniteGroup {
            order: 1,
            table: vec![0],
            inverse: vec![0],
            generators: Vec::new(),
            names: vec!["e".to_string()],
        }
    }

    /// Closure of a set of permutations of `0..degree` (one-line notation).
    /// Products compose left to right: `(p*q)(i) = q(p(i))`.
    pub fn from_permutations(
        degree: usize,
        generators: &[Vec<usize>],
        labels: Option<Vec<String>>,
        cap: usize,
    ) -> Result<FiniteGroup> {
        for p in generators {
            if p.len() != degree {
                return Err(Error::Input(format!(
                    "permutation of length {} on {} points",
                    p.len(),
                    degree
                )));
            }
            let mut seen = vec![false; degree];
            for &x in p {
                if x >= degree || seen[x] {
                    return Err(Error::Input("generator is not a bijection".into()));
                }
                seen[x] = true;
            }
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != generators.len() {
                    return Err(Error::Input("label count differs from generator count".into()));
                }
                l
            }
            None => default_labels(generators.len()),
        };
        check_labels(&labels)?;
        let identity: Vec<usize> = (0..degree).collect();
        let closure = enumerate_closure(
            identity,
            generators,
            |p, q| p.iter().map(|&i| q[i]).collect::<Vec<usize>>(),
            cap,
        )?;
        let index: HashMap<&Vec<usize>, usize> = closure
            .elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let gen_elems = generators.iter().map(|p| index[p]).collect();
        Ok(FiniteGroup::from_right_table(
            &closure.right,
            &closure.parent,
            labels,
            gen_elems,
        ))
    }

    /// Builds a group from a full Cayley table (`table[a][b] = a*b`). The
    /// identity is moved to index 0 and a generating set is chosen greedily.
    pub fn from_cayley(table: &[Vec<usize>]) -> Result<FiniteGroup> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Input("empty Cayley table".into()));
        }
        if n > DEFAULT_ORDER_CAP {
            return Err(Error::Resource(format!("group order exceeds cap {DEFAULT_ORDER_CAP}")));
        }
        for row in table {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(Error::Input("Cayley table is not square over 0..n".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::Input("no two-sided identity".into()))?;
        // swap identity into slot 0
        let relabel = |x: usize| {
            if x == identity {
                0
            } else if x == 0 {
                identity
            } else {
                x
            }
        };
        let mut flat = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                flat[relabel(a) * n + relabel(b)] = relabel(table[a][b]) as u32;
            }
        }
        let raw = FiniteGroup {
            order: n,
            table: flat,
            inverse: vec![0; n],
            generators: Vec::new(),
            names: Vec::new(),
        };
        for a in 0..n {
            let row = &raw.table[a * n..(a + 1) * n];
            let mut seen = vec![false; n];
            for &x in row {
                if seen[x as usize] {
                    return Err(Error::Input("Cayley table row is not a permutation".into()));
                }
                seen[x as usize] = true;
            }
        }
        if n <= AXIOM_CHECK_LIMIT {
            raw.check_associative()?;
        }
        let all = SubgroupHandle::from_sorted(n, (0..n).collect());
        let gens = raw.greedy_generators(&all);
        let labels = default_labels(gens.len());
        let (group, _) = FiniteGroup::from_mul_with_generators(
            n,
            |a, b| raw.mul(a, b),
            labels.into_iter().zip(gens).collect(),
        )?;
        Ok(group)
    }

    /// Semidirect product `N ⋊ H` on pairs `(n, h)` with
    /// `(n1,h1)(n2,h2) = (n1 * action[h1](n2), h1 h2)`.
    pub fn semidirect_product(
        n_group: &FiniteGroup,
        h_group: &FiniteGroup,
        action: &[Vec<usize>],
    ) -> Result<FiniteGroup> {
        let nn = n_group.order();
        let nh = h_group.order();
        if action.len() != nh {
            return Err(Error::InvalidAction(format!(
                "{} automorphisms given for a group of order {}",
                action.len(),
                nh
            )));
        }
        for (h, phi) in action.iter().enumerate() {
            if !n_group.is_automorphism(phi) {
                return Err(Error::InvalidAction(format!(
                    "image of `{}` is not an automorphism",
                    h_group.name(h)
                )));
            }
        }
        for h1 in 0..nh {
            for h2 in 0..nh {
                let h12 = h_group.mul(h1, h2);
                if (0..nn).any(|x| action[h12][x] != action[h1][action[h2][x]]) {
                    return Err(Error::InvalidAction(
                        "action is not a homomorphism into Aut(N)".into(),
                    ));
                }
            }
        }
        if nn * nh > DEFAULT_ORDER_CAP {
            return Err(Error::Resource(format!("group order exceeds cap {DEFAULT_ORDER_CAP}")));
        }
        let mut gens: Vec<(usize, usize)> = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        for g in n_group.generators() {
            gens.push((g.element, 0));
            labels.push(g.label.clone());
        }
        for g in h_group.generators() {
            gens.push((0, g.element));
            labels.push(g.label.clone());
        }
        if check_labels(&labels).is_err() {
            labels = default_labels(gens.len());
        }
        let closure = enumerate_closure(
            (0usize, 0usize),
            &gens,
            |&(n1, h1), &(n2, h2)| (n_group.mul(n1, action[h1][n2]), h_group.mul(h1, h2)),
            DEFAULT_ORDER_CAP,
        )?;
        debug_assert_eq!(closure.elements.len(), nn * nh);
        let index: HashMap<(usize, usize), usize> = closure
            .elements
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect();
        let gen_elems = gens.iter().map(|p| index[p]).collect();
        Ok(FiniteGroup::from_right_table(
            &closure.right,
            &closure.parent,
            labels,
            gen_elems,
        ))
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<FiniteGroup> {
        let action = vec![(0..a.order()).collect::<Vec<_>>(); b.order()];
        FiniteGroup::semidirect_product(a, b, &action)
    }

    /// Extends images of the generators to an element map, and checks that
    /// the result is an automorphism.
    pub fn automorphism_from_generator_images(&self, images: &[usize]) -> Result<Vec<usize>> {
        let map = self.extend_generator_images(self, images)?;
        if !self.is_automorphism(&map) {
            return Err(Error::InvalidAction(
                "generator images do not define an automorphism".into(),
            ));
        }
        Ok(map)
    }

    /// Extends generator images along the naming tree to a map into
    /// `target`, checking the homomorphism property.
    pub fn extend_generator_images(
        &self,
        target: &FiniteGroup,
        images: &[usize],
    ) -> Result<Vec<usize>> {
        if images.len() != self.generators.len() {
            return Err(Error::Input("one image per generator is required".into()));
        }
        let tree = self.spanning_tree();
        let mut map = vec![usize::MAX; self.order];
        map[0] = 0;
        for &(x, parent, g) in &tree {
            map[x] = target.mul(map[parent], images[g]);
        }
        let hom = GroupMap { image: map };
        if !hom.is_homomorphism(self, target) {
            return Err(Error::InvalidAction(
                "generator images do not extend to a homomorphism".into(),
            ));
        }
        Ok(hom.image)
    }

    /// Breadth-first spanning tree over right multiplication by generators,
    /// as `(element, parent, generator index)` in discovery order.
    pub fn spanning_tree(&self) -> Vec<(usize, usize, usize)> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut out = Vec::with_capacity(self.order.saturating_sub(1));
        while let Some(x) = queue.pop_front() {
            for (g, gen) in self.generators.iter().enumerate() {
                let y = self.mul(x, gen.element);
                if !seen[y] {
                    seen[y] = true;
                    out.push((y, x, g));
                    queue.push_back(y);
                }
            }
        }
        out
    }

    pub fn is_automorphism(&self, map: &[usize]) -> bool {
        if map.len() != self.order || map[0] != 0 {
            return false;
        }
        let mut seen = vec![false; self.order];
        for &y in map {
            if y >= self.order || seen[y] {
                return false;
            }
            seen[y] = true;
        }
        // checking on generators in the second slot suffices for a bijection
        // that is multiplicative on all (x, gen) pairs
        (0..self.order).all(|x| {
            self.generators
                .iter()
                .all(|g| map[self.mul(x, g.element)] == self.mul(map[x], map[g.element]))
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    /// `a b a^-1 b^-1`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ai = self.inv(a);
        let bi = self.inv(b);
        self.mul(self.mul(ab, ai), bi)
    }

    /// `g x g^-1`.
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn pow(&self, a: usize, e: i64) -> usize {
        let base = if e < 0 { self.inv(a) } else { a };
        let mut acc = 0;
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator_by_label(&self, label: &str) -> Option<usize> {
        self.generators
            .iter()
            .find(|g| g.label == label)
            .map(|g| g.element)
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        (0..self.order).fold(1, |acc, x| lcm(acc, self.element_order(x)))
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|a| {
            self.generators
                .iter()
                .all(|b| self.mul(a.element, b.element) == self.mul(b.element, a.element))
        })
    }

    /// Orders of all elements, counted: `hist[k]` = number of elements of order `k`.
    pub fn order_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0usize; self.order + 1];
        for x in 0..self.order {
            hist[self.element_order(x)] += 1;
        }
        hist
    }

    /// Exhaustive check of associativity, identity and inverses.
    pub fn verify_axioms(&self) -> Result<()> {
        for x in 0..self.order {
            if self.mul(0, x) != x || self.mul(x, 0) != x {
                return Err(Error::Input("identity is not neutral".into()));
            }
            if self.mul(x, self.inv(x)) != 0 || self.mul(self.inv(x), x) != 0 {
                return Err(Error::Input("inverse table is wrong".into()));
            }
        }
        self.check_associative()
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.order;
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::Input("multiplication is not associative".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn whole(&self) -> SubgroupHandle {
        SubgroupHandle::from_sorted(self.order, (0..self.order).collect())
    }

    pub fn trivial_subgroup(&self) -> SubgroupHandle {
        SubgroupHandle::from_sorted(self.order, vec![0])
    }

    /// Subgroup generated by the given elements.
    pub fn generate(&self, elements: &[usize]) -> SubgroupHandle {
        let mut bits = vec![0u64; self.order.div_ceil(64)];
        bits[0] |= 1;
        let mut members = vec![0usize];
        let gens: Vec<usize> = elements.iter().copied().filter(|&x| x != 0).collect();
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for &s in &gens {
                let y = self.mul(x, s);
                if (bits[y / 64] >> (y % 64)) & 1 == 0 {
                    bits[y / 64] |= 1 << (y % 64);
                    members.push(y);
                }
            }
            i += 1;
        }
        SubgroupHandle::from_bits(bits)
    }

    /// `⟨H, x⟩`, grown from an existing subgroup.
    pub fn extend(&self, h: &SubgroupHandle, x: usize) -> SubgroupHandle {
        if h.contains(x) {
            return h.clone();
        }
        let mut gens = self.subgroup_generators(h);
        gens.push(x);
        self.generate(&gens)
    }

    /// Validates an element set as a subgroup.
    pub fn subgroup_from_elements(&self, elements: &[usize]) -> Result<SubgroupHandle> {
        let mut sorted: Vec<usize> = elements.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.iter().any(|&x| x >= self.order) {
            return Err(Error::Input("element index out of range".into()));
        }
        let h = SubgroupHandle::from_sorted(self.order, sorted);
        if !h.contains(0) {
            return Err(Error::Input("subset lacks the identity".into()));
        }
        for &a in h.elements() {
            if !h.contains(self.inv(a)) {
                return Err(Error::Input("subset is not closed under inverses".into()));
            }
            for &b in h.elements() {
                if !h.contains(self.mul(a, b)) {
                    return Err(Error::Input("subset is not closed under products".into()));
                }
            }
        }
        if !self.order.is_multiple_of(h.order()) {
            return Err(Error::Internal("Lagrange check failed".into()));
        }
        Ok(h)
    }

    /// A small generating set of `h`, picking elements of largest order first.
    pub fn subgroup_generators(&self, h: &SubgroupHandle) -> Vec<usize> {
        self.greedy_generators(h)
    }

    fn greedy_generators(&self, h: &SubgroupHandle) -> Vec<usize> {
        let mut by_order: Vec<(usize, usize)> = h
            .elements()
            .iter()
            .filter(|&&x| x != 0)
            .map(|&x| (self.element_order(x), x))
            .collect();
        by_order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut gens = Vec::new();
        let mut span = self.trivial_subgroup();
        for (_, x) in by_order {
            if span.order() == h.order() {
                break;
            }
            if !span.contains(x) {
                gens.push(x);
                span = self.generate(&gens);
            }
        }
        gens
    }

    pub fn normalizer(&self, k: &SubgroupHandle) -> SubgroupHandle {
        let kg = self.subgroup_generators(k);
        let elements: Vec<usize> = (0..self.order)
            .filter(|&g| kg.iter().all(|&x| k.contains(self.conjugate(g, x))))
            .collect();
        SubgroupHandle::from_sorted(self.order, elements)
    }

    pub fn centralizer(&self, k: &SubgroupHandle) -> SubgroupHandle {
        let kg = self.subgroup_generators(k);
        let elements: Vec<usize> = (0..self.order)
            .filter(|&g| kg.iter().all(|&x| self.mul(g, x) == self.mul(x, g)))
            .collect();
        SubgroupHandle::from_sorted(self.order, elements)
    }

    pub fn centralizer_of_element(&self, x: usize) -> SubgroupHandle {
        let elements: Vec<usize> = (0..self.order)
            .filter(|&g| self.mul(g, x) == self.mul(x, g))
            .collect();
        SubgroupHandle::from_sorted(self.order, elements)
    }

    pub fn center(&self) -> SubgroupHandle {
        let elements: Vec<usize> = (0..self.order)
            .filter(|&g| {
                self.generators
                    .iter()
                    .all(|s| self.mul(g, s.element) == self.mul(s.element, g))
            })
            .collect();
        SubgroupHandle::from_sorted(self.order, elements)
    }

    pub fn is_normal(&self, k: &SubgroupHandle) -> bool {
        let kg = self.subgroup_generators(k);
        self.generators
            .iter()
            .all(|g| kg.iter().all(|&x| k.contains(self.conjugate(g.element, x))))
    }

    /// `g K g^-1`.
    pub fn conjugate_subgroup(&self, g: usize, k: &SubgroupHandle) -> SubgroupHandle {
        let mut elements: Vec<usize> = k.elements().iter().map(|&x| self.conjugate(g, x)).collect();
        elements.sort_unstable();
        SubgroupHandle::from_sorted(self.order, elements)
    }

    /// Derived subgroup `[G, G]`.
    pub fn commutator_subgroup(&self) -> SubgroupHandle {
        let mut comms: Vec<usize> = Vec::new();
        let mut seen = vec![false; self.order];
        for a in 0..self.order {
            for g in &self.generators {
                let c = self.commutator(a, g.element);
                if !seen[c] {
                    seen[c] = true;
                    comms.push(c);
                }
            }
        }
        // normal closure of commutators of elements with generators
        let mut h = self.generate(&comms);
        loop {
            let mut extra = Vec::new();
            for &x in h.elements() {
                for g in &self.generators {
                    let y = self.conjugate(g.element, x);
                    if !h.contains(y) {
                        extra.push(y);
                    }
                }
            }
            if extra.is_empty() {
                return h;
            }
            let mut gens = self.subgroup_generators(&h);
            gens.extend(extra);
            h = self.generate(&gens);
        }
    }

    /// The subgroup `h` as a group in its own right, with generators
    /// labelled `{prefix}1, {prefix}2, ...`, plus the embedding (new index to
    /// parent index).
    pub fn subgroup_as_group(
        &self,
        h: &SubgroupHandle,
        prefix: &str,
    ) -> Result<(FiniteGroup, Vec<usize>)> {
        let elems = h.elements();
        let mut local = vec![usize::MAX; self.order];
        for (i, &x) in elems.iter().enumerate() {
            local[x] = i;
        }
        let gens = self.subgroup_generators(h);
        let labelled: Vec<(String, usize)> = gens
            .iter()
            .enumerate()
            .map(|(i, &g)| (format!("{prefix}{}", i + 1), local[g]))
            .collect();
        let (group, old_to_new) = FiniteGroup::from_mul_with_generators(
            elems.len(),
            |a, b| local[self.mul(elems[a], elems[b])],
            labelled,
        )?;
        let mut embedding = vec![0usize; elems.len()];
        for (old, &new) in old_to_new.iter().enumerate() {
            embedding[new] = elems[old];
        }
        Ok((group, embedding))
    }

    /// Quotient by a normal subgroup, with the projection map.
    pub fn quotient(&self, k: &SubgroupHandle) -> Result<(FiniteGroup, GroupMap)> {
        if !self.is_normal(k) {
            return Err(Error::NotNormal);
        }
        let mut coset = vec![usize::MAX; self.order];
        let mut reps: Vec<usize> = Vec::new();
        for g in 0..self.order {
            if coset[g] == usize::MAX {
                let id = reps.len();
                reps.push(g);
                for &x in k.elements() {
                    coset[self.mul(g, x)] = id;
                }
            }
        }
        let m = reps.len();
        let mut gens: Vec<(String, usize)> = Vec::new();
        for g in &self.generators {
            let c = coset[g.element];
            if c != 0 && !gens.iter().any(|(_, e)| *e == c) {
                gens.push((g.label.clone(), c));
            }
        }
        let (group, old_to_new) = FiniteGroup::from_mul_with_generators(
            m,
            |a, b| coset[self.mul(reps[a], reps[b])],
            gens,
        )?;
        let image = (0..self.order).map(|g| old_to_new[coset[g]]).collect();
        Ok((group, GroupMap { image }))
    }

    /// Isomorphic copy with element `x` moved to `perm[x]` (`perm[0]` must be 0).
    pub fn relabel(&self, perm: &[usize]) -> Result<FiniteGroup> {
        let n = self.order;
        if perm.len() != n || perm[0] != 0 {
            return Err(Error::Input("relabeling must fix the identity".into()));
        }
        let mut inv_perm = vec![usize::MAX; n];
        for (old, &new) in perm.iter().enumerate() {
            if new >= n || inv_perm[new] != usize::MAX {
                return Err(Error::Input("relabeling is not a bijection".into()));
            }
            inv_perm[new] = old;
        }
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[perm[a] * n + perm[b]] = perm[self.mul(a, b)] as u32;
            }
        }
        let inverse = (0..n).map(|x| perm[self.inv(inv_perm[x])] as u32).collect();
        let names = (0..n).map(|x| self.names[inv_perm[x]].clone()).collect();
        let generators = self
            .generators
            .iter()
            .map(|g| Generator {
                label: g.label.clone(),
                element: perm[g.element],
            })
            .collect();
        Ok(FiniteGroup {
            order: n,
            table,
            inverse,
            generators,
            names,
        })
    }

    /// Unordered pairs `{a, b}` of distinct non-identity commuting elements,
    /// as `(a, b)` with `a < b`.
    pub fn commuting_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.order).flat_map(move |a| {
            (a + 1..self.order)
                .filter(move |&b| self.mul(a, b) == self.mul(b, a))
                .map(move |b| (a, b))
        })
    }

    /// Cache key: SHA-256 over the table after sorting elements by
    /// (element order, centralizer size, index). Deterministic for a given
    /// table; not an isomorphism invariant.
    pub fn fingerprint(&self) -> String {
        let n = self.order;
        let mut keyed: Vec<(usize, usize, usize)> = (0..n)
            .map(|x| {
                let cent = (0..n).filter(|&g| self.mul(g, x) == self.mul(x, g)).count();
                (self.element_order(x), cent, x)
            })
            .collect();
        keyed.sort_unstable();
        let mut perm = vec![0usize; n];
        for (new, &(_, _, old)) in keyed.iter().enumerate() {
            perm[old] = new;
        }
        let mut hasher = Sha256::new();
        hasher.update((n as u64).to_le_bytes());
        let mut row = vec![0u32; n];
        for new_a in 0..n {
            let a = keyed[new_a].2;
            for b in 0..n {
                row[perm[b]] = perm[self.mul(a, b)] as u32;
            }
            for v in &row {
                hasher.update(v.to_le_bytes());
            }
        }
        let digest = hasher.finalize();
        digest[..16].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Classification into the shapes used by the adjacent-family tables.
    pub fn classify_special(&self) -> SpecialShape {
        let n = self.order;
        let hist = self.order_histogram();
        if hist[n] > 0 {
            return SpecialShape::Cyclic(n);
        }
        let matches = |pairs: &[(usize, usize)]| {
            let total: usize = pairs.iter().map(|p| p.1).sum();
            total == n && pairs.iter().all(|&(o, c)| hist.get(o) == Some(&c))
        };
        match n {
            12 if matches(&[(1, 1), (2, 3), (3, 8)]) => return SpecialShape::A4,
            24 if matches(&[(1, 1), (2, 9), (3, 8), (4, 6)]) => return SpecialShape::S4,
            60 if matches(&[(1, 1), (2, 15), (3, 20), (5, 24)]) => return SpecialShape::A5,
            _ => {}
        }
        if n.is_multiple_of(2) && n >= 4 {
            let k = n / 2;
            for c in 0..n {
                if self.element_order(c) != k {
                    continue;
                }
                let rot = self.generate(&[c]);
                let c_inv = self.inv(c);
                let reflected = (0..n).any(|x| {
                    !rot.contains(x) && self.mul(x, x) == 0 && self.conjugate(x, c) == c_inv
                });
                if reflected {
                    return SpecialShape::Dihedral(k);
                }
            }
        }
        SpecialShape::Other
    }

    /// Image of `N_G(K)` in `Aut(K) ≅ (Z/k)^×` for cyclic `K`, as the sorted
    /// list of exponents `u` with `n g n^-1 = g^u`, where `g` is the least
    /// index generator of `K`.
    pub fn conj_action_on_cyclic(&self, k: &SubgroupHandle) -> Result<Vec<u64>> {
        let order = k.order();
        let g = k
            .elements()
            .iter()
            .copied()
            .find(|&x| self.element_order(x) == order)
            .ok_or(Error::NotCyclic)?;
        self.conj_action_with_generator(k, g)
    }

    /// As [`Self::conj_action_on_cyclic`] with an explicit generator of `K`.
    pub fn conj_action_with_generator(&self, k: &SubgroupHandle, g: usize) -> Result<Vec<u64>> {
        let order = k.order();
        if !k.contains(g) || self.element_order(g) != order {
            return Err(Error::NotCyclic);
        }
        if order == 1 {
            return Ok(vec![0]);
        }
        let mut exponent_of = HashMap::new();
        let mut x = 0;
        for u in 0..order {
            exponent_of.insert(x, u as u64);
            x = self.mul(x, g);
        }
        let norm = self.normalizer(k);
        let mut units: Vec<u64> = norm
            .elements()
            .iter()
            .map(|&n| exponent_of[&self.conjugate(n, g)])
            .collect();
        units.sort_unstable();
        units.dedup();
        Ok(units)
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
