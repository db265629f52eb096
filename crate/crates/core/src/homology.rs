//! `H_1` and `H_2` of finite groups with integer coefficients.
//!
//! `H_2(G, Z)` is the torsion of `C_2 / im d_3` in the normalized bar
//! complex. Its order only involves primes dividing `|G|`, and `|G|` kills
//! it, so it is computed one prime at a time over `Z/p^k` with
//! `p^k ≥ (p-part of |G|)^2`; at that precision torsion and free summands
//! separate and integral cycles are evaluated faithfully.

use serde::{Deserialize, Serialize};

use crate::abelian::{factorize, AbelianGroupDescriptor};
use crate::bar::{cycle_check, BarRewriter, Cycle2};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::local::{inv_mod, LocalEliminator, LocalQuotient, PrimePower};

/// Largest order accepted by the integral method unless raised explicitly.
pub const DEFAULT_MAX_INTEGRAL_ORDER: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ring {
    Integers,
    ModPrimePower { p: u64, k: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomologyOptions {
    pub max_integral_order: usize,
}

impl Default for HomologyOptions {
    fn default() -> Self {
        HomologyOptions {
            max_integral_order: DEFAULT_MAX_INTEGRAL_ORDER,
        }
    }
}

/// Abelianization `G / [G, G]`.
pub fn h1(g: &FiniteGroup) -> Result<AbelianGroupDescriptor> {
    let (ab, _) = g.quotient(&g.commutator_subgroup())?;
    AbelianGroupDescriptor::from_abelian_group(&ab)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && factorize(p) == vec![(p, 1)]
}

/// The single prime of a nontrivial `p`-group.
pub fn p_group_prime(g: &FiniteGroup) -> Option<u64> {
    match factorize(g.order() as u64).as_slice() {
        [(p, _)] => Some(*p),
        _ => None,
    }
}

/// Local rings the computation runs over.
fn plan(g: &FiniteGroup, ring: Ring, opts: &HomologyOptions) -> Result<Vec<PrimePower>> {
    let n = g.order() as u64;
    match ring {
        Ring::Integers => {
            if g.order() > opts.max_integral_order {
                return Err(Error::Precondition(format!(
                    "integral method is limited to order {} (group has order {n}); \
                     use a prime-power modulus for p-groups",
                    opts.max_integral_order
                )));
            }
            factorize(n)
                .into_iter()
                .map(|(p, e)| PrimePower::new(p, 2 * e))
                .collect()
        }
        Ring::ModPrimePower { p, k } => {
            if !is_prime(p) {
                return Err(Error::Precondition(format!("{p} is not prime")));
            }
            if n > 1 && p_group_prime(g) != Some(p) {
                return Err(Error::Precondition(format!(
                    "modular method needs a {p}-group (order {n})"
                )));
            }
            let ring = PrimePower::new(p, k)?;
            if (ring.q as u128) < (n as u128) * (n as u128) {
                return Err(Error::Precondition(format!(
                    "modulus {p}^{k} is below |G|^2 = {}",
                    n * n
                )));
            }
            Ok(if n > 1 { vec![ring] } else { Vec::new() })
        }
    }
}

/// Cokernel of `d_3` plus `extra` (already rewritten) over one local ring.
pub(crate) fn local_cokernel(
    g: &FiniteGroup,
    rw: &BarRewriter,
    ring: PrimePower,
    extra: &[Vec<(usize, i64)>],
) -> Result<LocalQuotient> {
    let mut el = LocalEliminator::new(ring, rw.dim());
    let mut col = Vec::new();
    let count = rw.boundary_count();
    for i in 0..count {
        rw.boundary_column(g, i, &mut col);
        el.absorb_unit(&col);
    }
    for c in extra {
        el.absorb_unit(c);
    }
    el.begin_residuals();
    for i in 0..count {
        rw.boundary_column(g, i, &mut col);
        el.absorb_residual(&col)?;
    }
    for c in extra {
        el.absorb_residual(c)?;
    }
    let lq = el.finish();
    if lq.free_rank() != g.order() - 1 {
        return Err(Error::Internal(format!(
            "cokernel has {} free summands, expected {}",
            lq.free_rank(),
            g.order() - 1
        )));
    }
    if lq.torsion_exponents().iter().any(|&e| 2 * e > ring.k) {
        return Err(Error::Internal(
            "torsion exponent exceeds the group-order bound".into(),
        ));
    }
    Ok(lq)
}

/// Maps 2-cycles to coordinates of a finite quotient of `H_2`, one
/// coordinate per invariant factor of the descriptor.
#[derive(Debug, Clone)]
pub struct ClassEvaluator {
    group: FiniteGroup,
    rewriter: BarRewriter,
    parts: Vec<LocalQuotient>,
    descriptor: AbelianGroupDescriptor,
    // for each invariant factor: (part, torsion index) pairs, at most one per prime
    layout: Vec<Vec<(usize, usize)>>,
}

impl ClassEvaluator {
    pub(crate) fn assemble(group: &FiniteGroup, rewriter: BarRewriter, parts: Vec<LocalQuotient>) -> Self {
        let exps: Vec<Vec<u32>> = parts.iter().map(LocalQuotient::torsion_exponents).collect();
        let r = exps.iter().map(Vec::len).max().unwrap_or(0);
        let mut layout = vec![Vec::new(); r];
        let mut factors = vec![1u64; r];
        for (pi, e) in exps.iter().enumerate() {
            let offset = r - e.len();
            for (i, &ei) in e.iter().enumerate() {
                layout[offset + i].push((pi, i));
                factors[offset + i] *= parts[pi].ring().pow_p(ei);
            }
        }
        ClassEvaluator {
            group: group.clone(),
            rewriter,
            parts,
            descriptor: AbelianGroupDescriptor {
                free_rank: 0,
                invariant_factors: factors,
            },
            layout,
        }
    }

    pub fn descriptor(&self) -> &AbelianGroupDescriptor {
        &self.descriptor
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// Class coordinates of a cycle; the `i`-th lies in `Z/d_i`.
    pub fn evaluate(&self, z: &Cycle2) -> Result<Vec<u64>> {
        if !cycle_check(&self.group, z) {
            return Err(Error::NotACycle);
        }
        let col = self.rewriter.rewrite(&self.group, z);
        let local: Vec<Vec<u64>> = self.parts.iter().map(|lq| lq.evaluate(&col)).collect();
        Ok(self
            .layout
            .iter()
            .map(|slots| {
                let residues: Vec<(u64, u64)> = slots
                    .iter()
                    .map(|&(pi, i)| {
                        let e = self.parts[pi].torsion_exponents()[i];
                        (local[pi][i], self.parts[pi].ring().pow_p(e))
                    })
                    .collect();
                crt(&residues)
            })
            .collect())
    }

    pub fn is_trivial_class(&self, z: &Cycle2) -> Result<bool> {
        Ok(self.evaluate(z)?.iter().all(|&c| c == 0))
    }
}

fn crt(residues: &[(u64, u64)]) -> u64 {
    let mut x: u128 = 0;
    let mut m: u128 = 1;
    for &(a, n) in residues {
        let (a, n) = (a as u128, n as u128);
        // x + m t ≡ a (mod n)
        let inv = inv_mod((m % n) as u64, n as u64) as u128;
        let t = ((a + n - x % n) % n) * inv % n;
        x += m * t;
        m *= n;
    }
    x as u64
}

/// `H_2(G, Z)` (or its `p`-primary part over `Z/p^k`) with a class evaluator.
#[derive(Debug, Clone)]
pub struct H2Presentation {
    pub group: FiniteGroup,
    pub ring: Ring,
    pub descriptor: AbelianGroupDescriptor,
    pub evaluator: ClassEvaluator,
    locals: Vec<PrimePower>,
}

pub fn h2(g: &FiniteGroup, ring: Ring) -> Result<H2Presentation> {
    h2_with(g, ring, &HomologyOptions::default())
}

pub fn h2_with(g: &FiniteGroup, ring: Ring, opts: &HomologyOptions) -> Result<H2Presentation> {
    let locals = plan(g, ring, opts)?;
    let rewriter = BarRewriter::new(g);
    let parts = locals
        .iter()
        .map(|&r| local_cokernel(g, &rewriter, r, &[]))
        .collect::<Result<Vec<_>>>()?;
    let evaluator = ClassEvaluator::assemble(g, rewriter, parts);
    Ok(H2Presentation {
        group: g.clone(),
        ring,
        descriptor: evaluator.descriptor().clone(),
        evaluator,
        locals,
    })
}

/// `ker d_2 / (im d_3 + span extra)`, over the ring of `h`.
pub fn quotient_classes(
    h: &H2Presentation,
    extra: &[Cycle2],
) -> Result<(AbelianGroupDescriptor, ClassEvaluator)> {
    if extra.is_empty() {
        return Ok((h.descriptor.clone(), h.evaluator.clone()));
    }
    let g = &h.group;
    if extra.iter().any(|z| !cycle_check(g, z)) {
        return Err(Error::NotACycle);
    }
    let rewriter = BarRewriter::new(g);
    let cols: Vec<Vec<(usize, i64)>> = extra.iter().map(|z| rewriter.rewrite(g, z)).collect();
    let parts = h
        .locals
        .iter()
        .map(|&r| local_cokernel(g, &rewriter, r, &cols))
        .collect::<Result<Vec<_>>>()?;
    let ev = ClassEvaluator::assemble(g, rewriter, parts);
    Ok((ev.descriptor().clone(), ev))
}

/// `log_p` of the order of `H_2(C ⊗ Z/p^k) / span extra`, through the
/// universal coefficient count: the cokernel of `d_3` on `C_2 ⊗ Z/p^k` has
/// length `len H_2(G)_(p) + (|G|-1)k`, and `H_2(C ⊗ Z/p^k)` adds
/// `len H_1(G)_(p)` to `len H_2(G)_(p)`.
pub fn modular_homology_length(
    g: &FiniteGroup,
    p: u64,
    k: u32,
    extra: &[Cycle2],
) -> Result<u64> {
    let locals = plan(g, Ring::ModPrimePower { p, k }, &HomologyOptions::default())?;
    let Some(&ring) = locals.first() else {
        return Ok(0);
    };
    if extra.iter().any(|z| !cycle_check(g, z)) {
        return Err(Error::NotACycle);
    }
    let rewriter = BarRewriter::new(g);
    let cols: Vec<Vec<(usize, i64)>> = extra.iter().map(|z| rewriter.rewrite(g, z)).collect();
    let lq = local_cokernel(g, &rewriter, ring, &cols)?;
    let h1_len = log_len(&h1(g)?, p);
    Ok(lq.length() - (g.order() as u64 - 1) * k as u64 + h1_len)
}

/// `log_p` of the `p`-part order.
pub fn log_len(d: &AbelianGroupDescriptor, p: u64) -> u64 {
    d.primary_part(p)
        .iter()
        .map(|&q| {
            let mut q = q;
            let mut e = 0;
            while q > 1 {
                q /= p;
                e += 1;
            }
            e
        })
        .sum()
}
