//! Subgroups up to conjugacy, each with its normalizer and Weyl group.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupMap, SubgroupHandle};

pub const BRUTE_FORCE_LIMIT: usize = 192;

#[derive(Debug, Clone)]
pub struct SubgroupClass {
    pub representative: SubgroupHandle,
    pub class_size: usize,
    pub normalizer: SubgroupHandle,
    pub weyl: FiniteGroup,
    /// Normalizer element (by its index in `normalizer_embedding`) to Weyl
    /// group element.
    pub weyl_projection: GroupMap,
    /// Normalizer as a group: local index to element of the ambient group.
    pub normalizer_embedding: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Lattice {
    pub group: FiniteGroup,
    pub classes: Vec<SubgroupClass>,
}

/// Serializable digest of one class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub order: usize,
    pub class_size: usize,
    pub normalizer_order: usize,
    pub weyl_order: usize,
    pub representative: Vec<usize>,
}

impl Lattice {
    pub fn subgroup_count(&self) -> usize {
        self.classes.iter().map(|c| c.class_size).sum()
    }

    pub fn summary(&self) -> Vec<ClassSummary> {
        self.classes
            .iter()
            .map(|c| ClassSummary {
                order: c.representative.order(),
                class_size: c.class_size,
                normalizer_order: c.normalizer.order(),
                weyl_order: c.weyl.order(),
                representative: c.representative.elements().to_vec(),
            })
            .collect()
    }

    /// Sorted `(order, class_size, normalizer order)` triples, which do not
    /// depend on how the group is labelled.
    pub fn invariants(&self) -> Vec<(usize, usize, usize)> {
        let mut v: Vec<_> = self
            .classes
            .iter()
            .map(|c| (c.representative.order(), c.class_size, c.normalizer.order()))
            .collect();
        v.sort_unstable();
        v
    }
}

/// `W_K = N_G(K) / K`, with the normalizer as a group (and its embedding)
/// and the projection onto the quotient.
pub fn weyl(g: &FiniteGroup, k: &SubgroupHandle) -> Result<(FiniteGroup, GroupMap, Vec<usize>)> {
    let n = g.normalizer(k);
    let (ngroup, embedding) = g.subgroup_as_group(&n, "n")?;
    let mut local = HashMap::with_capacity(embedding.len());
    for (i, &x) in embedding.iter().enumerate() {
        local.insert(x, i);
    }
    let k_local: Vec<usize> = k.elements().iter().map(|x| local[x]).collect();
    let k_in_n = ngroup.subgroup_from_elements(&k_local)?;
    let (w, proj) = ngroup.quotient(&k_in_n)?;
    Ok((w, proj, embedding))
}

/// All conjugates of `k`, deduplicated, in order of first appearance.
fn conjugates(g: &FiniteGroup, k: &SubgroupHandle) -> Vec<SubgroupHandle> {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut out = Vec::new();
    for x in 0..g.order() {
        let c = g.conjugate_subgroup(x, k);
        if seen.insert(c.bits().to_vec()) {
            out.push(c);
        }
    }
    out
}

/// Enumerates subgroups up to conjugacy by cyclic extension: starting from
/// the trivial subgroup, each new class representative `H` is extended to
/// `<H, x>` for every `x` outside it.
pub fn subgroup_classes(g: &FiniteGroup) -> Result<Lattice> {
    let n = g.order();
    // every conjugate's bitset -> class id
    let mut class_of: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut found: Vec<(SubgroupHandle, usize)> = Vec::new();
    let mut queue = VecDeque::new();

    let register = |h: SubgroupHandle,
                        class_of: &mut HashMap<Vec<u64>, usize>,
                        found: &mut Vec<(SubgroupHandle, usize)>,
                        queue: &mut VecDeque<usize>| {
        if class_of.contains_key(h.bits()) {
            return;
        }
        let id = found.len();
        let conj = conjugates(g, &h);
        let size = conj.len();
        // canonical representative: lexicographically least element list
        let rep = conj
            .into_iter()
            .inspect(|c| {
                class_of.insert(c.bits().to_vec(), id);
            })
            .min_by(|a, b| a.elements().cmp(b.elements()))
            .expect("a subgroup has at least one conjugate");
        found.push((rep, size));
        queue.push_back(id);
    };

    register(g.trivial_subgroup(), &mut class_of, &mut found, &mut queue);
    while let Some(id) = queue.pop_front() {
        let h = found[id].0.clone();
        if h.order() == n {
            continue;
        }
        let mut tried: HashSet<Vec<u64>> = HashSet::new();
        for x in 0..n {
            if h.contains(x) {
                continue;
            }
            let k = g.extend(&h, x);
            if !tried.insert(k.bits().to_vec()) {
                continue;
            }
            register(k, &mut class_of, &mut found, &mut queue);
        }
    }

    found.sort_by(|a, b| {
        (a.0.order(), a.0.elements()).cmp(&(b.0.order(), b.0.elements()))
    });
    let mut classes = Vec::with_capacity(found.len());
    for (rep, class_size) in found {
        let (w, proj, embedding) = weyl(g, &rep)?;
        let normalizer = g.normalizer(&rep);
        if class_size * normalizer.order() != n {
            return Err(Error::Internal("class size disagrees with the normalizer index".into()));
        }
        classes.push(SubgroupClass {
            representative: rep,
            class_size,
            normalizer,
            weyl: w,
            weyl_projection: proj,
            normalizer_embedding: embedding,
        });
    }
    Ok(Lattice {
        group: g.clone(),
        classes,
    })
}

fn naive_closure(g: &FiniteGroup, seed: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut set = seed.clone();
    set.insert(0);
    loop {
        let snapshot: Vec<usize> = set.iter().copied().collect();
        let before = set.len();
        for &a in &snapshot {
            for &b in &snapshot {
                set.insert(g.mul(a, b));
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

/// Every subgroup, by joining cyclic subgroups with single elements until
/// nothing new appears. Independent of [`subgroup_classes`]; used as a check.
pub fn brute_force_subgroups(g: &FiniteGroup) -> Result<Vec<SubgroupHandle>> {
    let n = g.order();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::Resource(format!(
            "brute-force enumeration is limited to order {BRUTE_FORCE_LIMIT}"
        )));
    }
    let mut all: BTreeSet<BTreeSet<usize>> = (0..n)
        .map(|x| naive_closure(g, &BTreeSet::from([x])))
        .collect();
    let mut frontier: Vec<BTreeSet<usize>> = all.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for h in &frontier {
            for x in 0..n {
                if h.contains(&x) {
                    continue;
                }
                let mut s = h.clone();
                s.insert(x);
                let k = naive_closure(g, &s);
                if all.insert(k.clone()) {
                    next.push(k);
                }
            }
        }
        frontier = next;
    }
    all.into_iter()
        .map(|s| g.subgroup_from_elements(&s.into_iter().collect::<Vec<_>>()))
        .collect()
}

/// Groups subgroups into conjugacy classes, as sorted `(order, class size)`.
pub fn conjugacy_profile(g: &FiniteGroup, subgroups: &[SubgroupHandle]) -> Vec<(usize, usize)> {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut out = Vec::new();
    for h in subgroups {
        if seen.contains(h.bits()) {
            continue;
        }
        let conj = conjugates(g, h);
        for c in &conj {
            seen.insert(c.bits().to_vec());
        }
        out.push((h.order(), conj.len()));
    }
    out.sort_unstable();
    out
}
