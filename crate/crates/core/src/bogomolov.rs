//! Bogomolov multiplier `B̃0(G) = H_2(G, Z) / M_0(G)`, where `M_0` is spanned
//! by toral classes; surface-group witnesses for nontrivial classes; and a
//! first-cohomology cross-check for split extensions.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::AbelianGroupDescriptor;
use crate::bar::{cycle_check, BarRewriter, Cycle2};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::homology::{
    h1, h2_with, local_cokernel, log_len, p_group_prime, quotient_classes, ClassEvaluator,
    HomologyOptions, Ring,
};
use crate::local::PrimePower;
use crate::snf::smith_with_transforms;

/// Groups above this order get conjugacy-reduced toral generators.
pub const TORAL_REDUCTION_THRESHOLD: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Integral,
    OrderModular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BogomolovOptions {
    pub method: Method,
    pub homology: HomologyOptions,
    /// Reduce commuting pairs by simultaneous conjugacy; `None` applies the
    /// order threshold.
    pub reduce_torals: Option<bool>,
}

impl BogomolovOptions {
    pub fn new(method: Method) -> Self {
        BogomolovOptions {
            method,
            homology: HomologyOptions::default(),
            reduce_torals: None,
        }
    }
}

/// `(a|b) - (b|a)` for every unordered pair of distinct commuting
/// non-identity elements, ordered by `(a, b)` with `a < b`.
pub fn toral_cycles(g: &FiniteGroup) -> Vec<Cycle2> {
    g.commuting_pairs()
        .filter(|&(a, b)| a != 0 && b != 0 && a < b)
        .map(|(a, b)| Cycle2::toral(a, b))
        .collect()
}

/// As [`toral_cycles`], one pair per orbit under simultaneous conjugacy.
/// Conjugation acts trivially on homology, so the span is unchanged.
pub fn toral_cycles_reduced(g: &FiniteGroup) -> Vec<Cycle2> {
    let n = g.order();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut out = Vec::new();
    for (a, b) in g.commuting_pairs() {
        if a == 0 || b == 0 || a >= b || seen.contains(&(a, b)) {
            continue;
        }
        out.push(Cycle2::toral(a, b));
        for x in 0..n {
            let (ca, cb) = (g.conjugate(x, a), g.conjugate(x, b));
            seen.insert((ca.min(cb), ca.max(cb)));
        }
    }
    out
}

fn torals_for(g: &FiniteGroup, reduce: Option<bool>) -> Vec<Cycle2> {
    if reduce.unwrap_or(g.order() > TORAL_REDUCTION_THRESHOLD) {
        toral_cycles_reduced(g)
    } else {
        toral_cycles(g)
    }
}

#[derive(Debug, Clone)]
pub struct BogomolovResult {
    pub method: Method,
    pub order: u128,
    /// Exact structure; with the order method only when the order forces it.
    pub descriptor: Option<AbelianGroupDescriptor>,
    /// Class evaluator. For the order method it works over `Z/p^k` with
    /// `p^k ≥ |G|^2`, which still separates integral classes.
    pub evaluator: ClassEvaluator,
    pub notes: Vec<String>,
}

pub fn bogomolov(g: &FiniteGroup, method: Method) -> Result<BogomolovResult> {
    bogomolov_with(g, &BogomolovOptions::new(method))
}

pub fn bogomolov_with(g: &FiniteGroup, opts: &BogomolovOptions) -> Result<BogomolovResult> {
    let torals = torals_for(g, opts.reduce_torals);
    match opts.method {
        Method::Integral => {
            let h = h2_with(g, Ring::Integers, &opts.homology)?;
            let (d, evaluator) = quotient_classes(&h, &torals)?;
            Ok(BogomolovResult {
                method: Method::Integral,
                order: d.torsion_order(),
                notes: vec![format!("H_2 = {}", h.descriptor)],
                descriptor: Some(d),
                evaluator,
            })
        }
        Method::OrderModular => order_modular(g, &torals),
    }
}

fn order_modular(g: &FiniteGroup, torals: &[Cycle2]) -> Result<BogomolovResult> {
    let n = g.order();
    let rewriter = BarRewriter::new(g);
    if n == 1 {
        let evaluator = ClassEvaluator::assemble(g, rewriter, Vec::new());
        return Ok(BogomolovResult {
            method: Method::OrderModular,
            order: 1,
            descriptor: Some(AbelianGroupDescriptor::trivial()),
            evaluator,
            notes: Vec::new(),
        });
    }
    let p = p_group_prime(g).ok_or_else(|| {
        Error::Precondition(format!("order method needs a p-group (order {n})"))
    })?;
    let v = log_len(&AbelianGroupDescriptor::cyclic(n as u64), p) as u32;
    let ring = PrimePower::new(p, 2 * v)?;
    let cols: Vec<Vec<(usize, i64)>> = torals.iter().map(|z| rewriter.rewrite(g, z)).collect();
    let lq = local_cokernel(g, &rewriter, ring, &cols)?;
    // |H_2(C ⊗ Z/p^k) / torals| = |B̃0| · |H_1(G)_(p)|
    let h1_len = log_len(&h1(g)?, p);
    let mod_len = lq.length() + h1_len - (n as u64 - 1) * ring.k as u64;
    let b0_len = mod_len.checked_sub(h1_len).ok_or_else(|| {
        Error::Internal("modular homology smaller than its H_1 contribution".into())
    })?;
    let order = (p as u128).pow(b0_len as u32);
    let evaluator = ClassEvaluator::assemble(g, rewriter, vec![lq]);
    if evaluator.descriptor().torsion_order() != order {
        return Err(Error::Internal(
            "order count disagrees with the local cokernel".into(),
        ));
    }
    let mut notes = vec![
        format!("modulus {p}^{}", ring.k),
        format!("|H_2(C;Z/{}) / M_0| = {p}^{mod_len}", ring.q),
        format!("|H_1(G)_({p})| = {p}^{h1_len}"),
    ];
    let descriptor = if b0_len <= 1 {
        Some(AbelianGroupDescriptor::from_cyclic_orders(0, &[order as u64]))
    } else {
        notes.push("structure not determined by the order alone".into());
        None
    };
    Ok(BogomolovResult {
        method: Method::OrderModular,
        order,
        descriptor,
        evaluator,
        notes,
    })
}

/// Elements `x1, y1, ..., xg, yg` of a genus-`g` surface group image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceTuple {
    pub elements: Vec<usize>,
}

impl SurfaceTuple {
    pub fn new(elements: Vec<usize>) -> Result<Self> {
        if elements.is_empty() || !elements.len().is_multiple_of(2) {
            return Err(Error::Input(format!(
                "a surface tuple needs 2g ≥ 2 entries, got {}",
                elements.len()
            )));
        }
        Ok(SurfaceTuple { elements })
    }

    pub fn genus(&self) -> usize {
        self.elements.len() / 2
    }

    /// `Π [x_i, y_i]`.
    pub fn relator(&self, g: &FiniteGroup) -> usize {
        self.elements
            .chunks(2)
            .fold(0, |acc, p| g.mul(acc, g.commutator(p[0], p[1])))
    }
}

/// Bar 2-cycle carrying the image of the fundamental class.
pub fn surface_cycle(g: &FiniteGroup, t: &SurfaceTuple) -> Result<Cycle2> {
    if t.relator(g) != 0 {
        return Err(Error::RelatorViolated);
    }
    let mut letters = Vec::with_capacity(4 * t.genus());
    for p in t.elements.chunks(2) {
        let (x, y) = (p[0], p[1]);
        letters.extend([x, y, g.inv(x), g.inv(y)]);
    }
    let mut z = Cycle2::new();
    let mut prefix = letters[0];
    for &l in &letters[1..] {
        z.add_term(prefix, l, 1);
        prefix = g.mul(prefix, l);
    }
    // each letter u occurs with its inverse; d(u|u^-1) = (u) + (u^-1)
    for &u in &t.elements {
        z.add_term(u, g.inv(u), -1);
    }
    if !cycle_check(g, &z) {
        return Err(Error::Internal("surface chain is not a cycle".into()));
    }
    Ok(z)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub tuple: SurfaceTuple,
    pub relator_ok: bool,
    pub class_coordinates: Option<Vec<u64>>,
    pub nontrivial: bool,
    pub generates_group: bool,
}

pub fn witness_verify(g: &FiniteGroup, t: &SurfaceTuple, b0: &ClassEvaluator) -> Result<WitnessReport> {
    if t.elements.iter().any(|&x| x >= g.order()) {
        return Err(Error::Input("tuple entry outside the group".into()));
    }
    let relator_ok = t.relator(g) == 0;
    let generates_group = g.generate(&t.elements).order() == g.order();
    let class_coordinates = if relator_ok {
        Some(b0.evaluate(&surface_cycle(g, t)?)?)
    } else {
        None
    };
    let nontrivial = class_coordinates
        .as_ref()
        .is_some_and(|c| c.iter().any(|&x| x != 0));
    Ok(WitnessReport {
        tuple: t.clone(),
        relator_ok,
        class_coordinates,
        nontrivial,
        generates_group,
    })
}

/// Random search for a tuple with nontrivial class: the first `2g - 1`
/// entries are sampled, the last one is found by scanning for a solution of
/// the surface relator. `budget` bounds the number of evaluated tuples.
pub fn witness_search(
    g: &FiniteGroup,
    genus: usize,
    budget: u64,
    seed: u64,
    b0: &ClassEvaluator,
) -> Result<Option<SurfaceTuple>> {
    if genus == 0 {
        return Err(Error::Input("genus must be at least 1".into()));
    }
    if b0.descriptor().is_trivial() {
        return Ok(None);
    }
    let n = g.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluated = 0u64;
    let mut draws = 0u64;
    while evaluated < budget && draws < budget.saturating_mul(4).max(64) {
        draws += 1;
        let mut elems: Vec<usize> = (0..2 * genus - 1).map(|_| rng.gen_range(0..n)).collect();
        let head = elems[..2 * genus - 2]
            .chunks(2)
            .fold(0, |acc, p| g.mul(acc, g.commutator(p[0], p[1])));
        let z = elems[2 * genus - 2];
        // need [z, w] = head^-1
        let target = g.inv(head);
        let start = rng.gen_range(0..n);
        let Some(w) = (0..n).map(|i| (start + i) % n).find(|&w| g.commutator(z, w) == target) else {
            continue;
        };
        elems.push(w);
        let t = SurfaceTuple { elements: elems };
        evaluated += 1;
        if !b0.is_trivial_class(&surface_cycle(g, &t)?)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Finite abelian group `⊕ Z/m_i` with a left action: `action[s]` is the
/// matrix of the `s`-th generator of the acting group on the standard
/// generators (column `j` is the image of `e_j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionModule {
    pub moduli: Vec<u64>,
    pub action: Vec<Vec<Vec<i64>>>,
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>], moduli: &[u64]) -> Vec<Vec<i64>> {
    let r = moduli.len();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let s: i128 = (0..r).map(|l| a[i][l] as i128 * b[l][j] as i128).sum();
                    s.rem_euclid(moduli[i] as i128) as i64
                })
                .collect()
        })
        .collect()
}

/// `H^1(Q, M) = Z^1 / B^1` by integer linear algebra on the cocycle
/// conditions `f(x s) = f(x) + x·f(s)` over all elements `x` and generators
/// `s`.
pub fn lhs_h1_crosscheck(q: &FiniteGroup, m: &ActionModule) -> Result<AbelianGroupDescriptor> {
    let r = m.moduli.len();
    let gens = q.generators();
    if m.action.len() != gens.len() {
        return Err(Error::InvalidAction("one matrix per generator is required".into()));
    }
    if m.moduli.contains(&0) {
        return Err(Error::InvalidAction("moduli must be positive".into()));
    }
    for a in &m.action {
        if a.len() != r || a.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidAction("action matrix has the wrong shape".into()));
        }
        for j in 0..r {
            for i in 0..r {
                if (m.moduli[j] as i128 * a[i][j] as i128) % m.moduli[i] as i128 != 0 {
                    return Err(Error::InvalidAction(
                        "action is not well defined modulo the invariant factors".into(),
                    ));
                }
            }
        }
    }
    // action matrix of every element, along the naming tree x = parent * s
    let n = q.order();
    let ident: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
    let mut act: Vec<Option<Vec<Vec<i64>>>> = vec![None; n];
    act[0] = Some(ident);
    for (x, parent, s) in q.spanning_tree() {
        act[x] = Some(mat_mul(act[parent].as_ref().unwrap(), &m.action[s], &m.moduli));
    }
    let act: Vec<Vec<Vec<i64>>> = act.into_iter().map(Option::unwrap).collect();
    for x in 0..n {
        for (s, gen) in gens.iter().enumerate() {
            if act[q.mul(x, gen.element)] != mat_mul(&act[x], &m.action[s], &m.moduli) {
                return Err(Error::InvalidAction("matrices do not define a group action".into()));
            }
        }
    }
    // unknowns f(x)_i at index x*r + i; equations (x, s, i)
    let unknowns = n * r;
    let mut rows: Vec<Vec<i128>> = Vec::new();
    let mut row_mod: Vec<u64> = Vec::new();
    for x in 0..n {
        for gen in gens {
            let xs = q.mul(x, gen.element);
            for i in 0..r {
                let mut row = vec![0i128; unknowns];
                row[xs * r + i] += 1;
                row[x * r + i] -= 1;
                for j in 0..r {
                    row[gen.element * r + j] -= act[x][i][j] as i128;
                }
                rows.push(row);
                row_mod.push(m.moduli[i]);
            }
        }
    }
    // L = {f : rows·f ≡ 0}: kernel of [rows | diag(mod)], projected
    let e = rows.len();
    let wide: Vec<Vec<i128>> = rows
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let mut w = row.clone();
            w.extend((0..e).map(|l| if l == k { row_mod[k] as i128 } else { 0 }));
            w
        })
        .collect();
    let total = unknowns + e;
    let kernel_gens: Vec<Vec<i128>> = if e == 0 {
        (0..unknowns)
            .map(|j| (0..unknowns).map(|i| i128::from(i == j)).collect())
            .collect()
    } else {
        let sd = smith_with_transforms(&wide)?;
        (sd.diagonal.len()..total)
            .map(|c| (0..unknowns).map(|i| sd.v[i][c]).collect())
            .collect()
    };
    // basis of L from the Smith form of its generators (columns)
    let k_mat: Vec<Vec<i128>> = (0..unknowns)
        .map(|i| kernel_gens.iter().map(|g| g[i]).collect())
        .collect();
    let sk = smith_with_transforms(&k_mat)?;
    if sk.diagonal.len() != unknowns {
        return Err(Error::Internal("cocycle lattice is not of full rank".into()));
    }
    // B^1 + D Z^N, in coordinates of that basis: c = diag^-1 U b
    let mut b_gens: Vec<Vec<i128>> = Vec::new();
    for j in 0..r {
        let mut b = vec![0i128; unknowns];
        for x in 0..n {
            for i in 0..r {
                b[x * r + i] = act[x][i][j] as i128 - i128::from(i == j);
            }
        }
        b_gens.push(b);
    }
    for x in 0..n {
        for i in 0..r {
            let mut b = vec![0i128; unknowns];
            b[x * r + i] = m.moduli[i] as i128;
            b_gens.push(b);
        }
    }
    let mut coords: Vec<Vec<i128>> = vec![Vec::with_capacity(b_gens.len()); unknowns];
    for b in &b_gens {
        for i in 0..unknowns {
            let ub: i128 = (0..unknowns).map(|l| sk.u[i][l] * b[l]).sum();
            let d = sk.diagonal[i] as i128;
            if ub % d != 0 {
                return Err(Error::Internal("coboundary outside the cocycle lattice".into()));
            }
            coords[i].push(ub / d);
        }
    }
    let quotient = smith_with_transforms(&coords)?;
    let free = unknowns - quotient.diagonal.len();
    let factors: Vec<u64> = quotient
        .diagonal
        .iter()
        .filter(|&&d| d > 1)
        .map(|&d| d as u64)
        .collect();
    Ok(AbelianGroupDescriptor::from_cyclic_orders(free, &factors))
}
