//! Equivariant bordism of surfaces: `Ω_2^{U,G}` and `Ω_2^{SO,G}` assembled
//! class by class from the subgroup lattice, the adjacent-family tables in
//! dimensions 2 and 3, and the SK-group corollaries.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::abelian::AbelianGroupDescriptor;
use crate::bogomolov::{bogomolov_with, BogomolovOptions, Method};
use crate::error::{Error, Result};
use crate::group::{gcd, FiniteGroup, SpecialShape};
use crate::homology::{p_group_prime, HomologyOptions};
use crate::lattice::{subgroup_classes, Lattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    U,
    SO,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::U => "U",
            Flavor::SO => "SO",
        })
    }
}

pub fn euler_phi(k: u64) -> u64 {
    (1..=k).filter(|&u| gcd(u as usize, k as usize) == 1).count() as u64
}

fn units(k: u64) -> Vec<u64> {
    (1..k).filter(|&u| gcd(u as usize, k as usize) == 1).collect()
}

fn orbit_count(k: u64, acting: &BTreeSet<u64>) -> u64 {
    let mut seen = BTreeSet::new();
    let mut orbits = 0;
    for u in units(k) {
        if seen.insert(u) {
            orbits += 1;
            for &a in acting {
                seen.insert(a * u % k);
            }
        }
    }
    orbits
}

/// Orbits of `A ≤ (Z/k)^×` on the faithful characters of `Z/k`
/// (`u_count`), and of `<A, -1>` (`so_count`, which ignores `k ≤ 2`).
pub fn hominj_orbit_counts(k: u64, a: &[u64]) -> Result<(u64, u64)> {
    if k == 0 {
        return Err(Error::Input("cyclic order must be positive".into()));
    }
    if k == 1 {
        return Ok((0, 0));
    }
    let set: BTreeSet<u64> = a.iter().map(|&x| x % k).collect();
    let closed = set.contains(&1)
        && set.iter().all(|&x| gcd(x as usize, k as usize) == 1)
        && set.iter().all(|&x| set.iter().all(|&y| set.contains(&(x * y % k))));
    if !closed {
        return Err(Error::Input(format!("{a:?} is not a subgroup of (Z/{k})^x")));
    }
    let u_count = orbit_count(k, &set);
    if k == 2 {
        return Ok((u_count, 0));
    }
    let mut with_neg = set.clone();
    with_neg.extend(set.iter().map(|&x| (k - x) % k));
    Ok((u_count, orbit_count(k, &with_neg)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassContribution {
    /// Position in the lattice's class list.
    pub class_index: usize,
    pub order: usize,
    pub class_size: usize,
    pub weyl_order: usize,
    pub shape: SpecialShape,
    pub u_free: u64,
    pub so_free: u64,
    /// `B̃0(W_K)`.
    pub torsion: AbelianGroupDescriptor,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BordismReport {
    pub flavor: Flavor,
    pub group_fingerprint: String,
    pub total: AbelianGroupDescriptor,
    pub contributions: Vec<ClassContribution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BordismOptions {
    pub homology: HomologyOptions,
}

/// `B̃0` with the exact method where allowed and the order method on larger
/// p-groups.
pub fn b0_auto(w: &FiniteGroup, homology: &HomologyOptions) -> Result<(AbelianGroupDescriptor, String)> {
    if w.is_abelian() {
        return Ok((AbelianGroupDescriptor::trivial(), "abelian".into()));
    }
    let method = if w.order() <= homology.max_integral_order {
        Method::Integral
    } else if p_group_prime(w).is_some() {
        Method::OrderModular
    } else {
        return Err(Error::Resource(format!(
            "order {} is above the exact-homology limit and not a prime power",
            w.order()
        )));
    };
    let mut opts = BogomolovOptions::new(method);
    opts.homology = *homology;
    let r = bogomolov_with(w, &opts)?;
    let d = r.descriptor.ok_or_else(|| {
        Error::Resource(format!(
            "B0 of a Weyl group of order {} has order {} but undetermined structure",
            w.order(),
            r.order
        ))
    })?;
    let how = match method {
        Method::Integral => "integral",
        Method::OrderModular => "order-modular",
    };
    Ok((d, how.into()))
}

/// Per-class data for both flavors, in lattice order.
pub fn contributions(lattice: &Lattice, opts: &BordismOptions) -> Result<Vec<ClassContribution>> {
    let g = &lattice.group;
    // Weyl groups repeat; key by fingerprint
    let mut b0_cache: HashMap<String, (AbelianGroupDescriptor, String)> = HashMap::new();
    let mut out = Vec::with_capacity(lattice.classes.len());
    for (i, c) in lattice.classes.iter().enumerate() {
        let k = c.representative.order();
        let sub = g.subgroup_as_group(&c.representative, "k")?.0;
        let shape = sub.classify_special();
        let mut notes = vec!["Omega_2^U".to_string()];
        let (mut u_free, mut so_free) = (1u64, 0u64);
        if matches!(shape, SpecialShape::Cyclic(_)) && k > 1 {
            let a = g.conj_action_on_cyclic(&c.representative)?;
            let (u, s) = hominj_orbit_counts(k as u64, &a)?;
            u_free += u;
            so_free = s;
            notes.push(format!("Hominj(Z/{k}, U(1)) / W_K: {u} orbits, image of W_K of order {}", a.len()));
            if s > 0 {
                notes.push(format!("tau-orbits: {s}"));
            }
        }
        let fp = c.weyl.fingerprint();
        let (torsion, how) = match b0_cache.get(&fp) {
            Some(v) => v.clone(),
            None => {
                let v = b0_auto(&c.weyl, &opts.homology)?;
                b0_cache.insert(fp, v.clone());
                v
            }
        };
        notes.push(format!("B0(W_K) = {torsion} ({how})"));
        out.push(ClassContribution {
            class_index: i,
            order: k,
            class_size: c.class_size,
            weyl_order: c.weyl.order(),
            shape,
            u_free,
            so_free,
            torsion,
            notes,
        });
    }
    Ok(out)
}

pub fn assemble(
    g: &FiniteGroup,
    flavor: Flavor,
    contributions: Vec<ClassContribution>,
) -> BordismReport {
    let free: u64 = contributions
        .iter()
        .map(|c| match flavor {
            Flavor::U => c.u_free,
            Flavor::SO => c.so_free,
        })
        .sum();
    let torsion = contributions
        .iter()
        .fold(AbelianGroupDescriptor::trivial(), |acc, c| acc.direct_sum(&c.torsion));
    BordismReport {
        flavor,
        group_fingerprint: g.fingerprint(),
        total: AbelianGroupDescriptor {
            free_rank: free as usize,
            invariant_factors: torsion.invariant_factors,
        },
        contributions,
    }
}

pub fn omega2(g: &FiniteGroup, flavor: Flavor) -> Result<BordismReport> {
    omega2_with(g, flavor, &BordismOptions::default())
}

pub fn omega2_with(g: &FiniteGroup, flavor: Flavor, opts: &BordismOptions) -> Result<BordismReport> {
    let lattice = subgroup_classes(g)?;
    Ok(assemble(g, flavor, contributions(&lattice, opts)?))
}

/// `⊕_(K) B̃0(W_K)`, the torsion of either flavor.
pub fn torsion_omega2(g: &FiniteGroup) -> Result<AbelianGroupDescriptor> {
    Ok(omega2(g, Flavor::SO)?.total.torsion())
}

/// Faithful characters of `Z/k` up to complex conjugation (none for `k = 1`).
fn tau_classes(k: usize) -> usize {
    match k {
        0 | 1 => 0,
        2 => 1,
        _ => euler_phi(k as u64) as usize / 2,
    }
}

pub fn adjacent_table_dim2(k: &FiniteGroup, flavor: Flavor) -> AbelianGroupDescriptor {
    let shape = k.classify_special();
    match (flavor, shape) {
        (Flavor::SO, SpecialShape::Cyclic(2)) => AbelianGroupDescriptor::cyclic(2),
        (Flavor::SO, SpecialShape::Cyclic(n)) if n > 2 => AbelianGroupDescriptor::free(tau_classes(n)),
        (Flavor::SO, _) => AbelianGroupDescriptor::trivial(),
        (Flavor::U, SpecialShape::Cyclic(n)) if n > 1 => {
            AbelianGroupDescriptor::free(1 + euler_phi(n as u64) as usize)
        }
        (Flavor::U, _) => AbelianGroupDescriptor::free(1),
    }
}

pub fn adjacent_table_dim3(k: &FiniteGroup, flavor: Flavor) -> AbelianGroupDescriptor {
    if flavor == Flavor::U {
        return AbelianGroupDescriptor::trivial();
    }
    match k.classify_special() {
        SpecialShape::Dihedral(n) => AbelianGroupDescriptor::from_cyclic_orders(0, &vec![2; tau_classes(n)]),
        SpecialShape::A4 | SpecialShape::S4 | SpecialShape::A5 => AbelianGroupDescriptor::cyclic(2),
        _ => AbelianGroupDescriptor::trivial(),
    }
}

/// `(SK_2(BG), reduced SK_2(BG)) = (Z ⊕ B̃0(G), B̃0(G))`.
pub fn sk2(g: &FiniteGroup) -> Result<(AbelianGroupDescriptor, AbelianGroupDescriptor)> {
    let (b0, _) = b0_auto(g, &HomologyOptions::default())?;
    Ok((AbelianGroupDescriptor::free(1).direct_sum(&b0), b0))
}

/// `(SK_n(*), reduced SK_n(*))`; `None` in degree 0, which the closed
/// formulas do not cover.
pub fn sk_point(n: i64) -> Result<Option<(AbelianGroupDescriptor, AbelianGroupDescriptor)>> {
    if n < 0 {
        return Err(Error::Input("degree must be nonnegative".into()));
    }
    Ok(match n % 4 {
        _ if n == 0 => None,
        1 | 3 => Some((AbelianGroupDescriptor::trivial(), AbelianGroupDescriptor::trivial())),
        2 => Some((AbelianGroupDescriptor::free(1), AbelianGroupDescriptor::trivial())),
        _ => Some((AbelianGroupDescriptor::free(2), AbelianGroupDescriptor::free(1))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;

    #[test]
    fn orbit_counts() {
        assert_eq!(hominj_orbit_counts(8, &[1, 3, 5, 7]).unwrap(), (1, 1));
        assert_eq!(hominj_orbit_counts(3, &[1]).unwrap(), (2, 1));
        assert_eq!(hominj_orbit_counts(1, &[0]).unwrap(), (0, 0));
        assert_eq!(hominj_orbit_counts(2, &[1]).unwrap(), (1, 0));
        assert!(hominj_orbit_counts(8, &[1, 3, 5]).is_err());
        assert!(hominj_orbit_counts(8, &[1, 2]).is_err());
    }

    #[test]
    fn small_groups() {
        let c1 = builtin("C1").unwrap();
        assert_eq!(omega2(&c1, Flavor::U).unwrap().total, AbelianGroupDescriptor::free(1));
        assert!(omega2(&c1, Flavor::SO).unwrap().total.is_trivial());
        let s3 = builtin("S3").unwrap();
        assert_eq!(omega2(&s3, Flavor::U).unwrap().total, AbelianGroupDescriptor::free(6));
        assert_eq!(omega2(&s3, Flavor::SO).unwrap().total, AbelianGroupDescriptor::free(1));
        let c2 = builtin("C2").unwrap();
        assert_eq!(omega2(&c2, Flavor::U).unwrap().total, AbelianGroupDescriptor::free(3));
    }

    #[test]
    fn cyclic_ranks() {
        for n in 1..=12usize {
            let g = builtin(&format!("C{n}")).unwrap();
            let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
            let so: u64 = divisors.iter().filter(|&&d| d > 2).map(|&d| euler_phi(d as u64) / 2).sum();
            assert_eq!(omega2(&g, Flavor::U).unwrap().total.free_rank, divisors.len() + n - 1);
            assert_eq!(omega2(&g, Flavor::SO).unwrap().total.free_rank as u64, so);
        }
    }

    #[test]
    fn tables() {
        let c2 = builtin("C2").unwrap();
        assert_eq!(adjacent_table_dim2(&c2, Flavor::SO), AbelianGroupDescriptor::cyclic(2));
        let c5 = builtin("C5").unwrap();
        assert_eq!(adjacent_table_dim2(&c5, Flavor::SO), AbelianGroupDescriptor::free(2));
        assert_eq!(adjacent_table_dim2(&c5, Flavor::U), AbelianGroupDescriptor::free(5));
        let q8 = builtin("Q8").unwrap();
        assert_eq!(adjacent_table_dim2(&q8, Flavor::U), AbelianGroupDescriptor::free(1));
        assert_eq!(adjacent_table_dim2(&builtin("C1").unwrap(), Flavor::U), AbelianGroupDescriptor::free(1));
        let s4 = builtin("S4").unwrap();
        assert_eq!(adjacent_table_dim3(&s4, Flavor::SO), AbelianGroupDescriptor::cyclic(2));
        assert!(adjacent_table_dim3(&s4, Flavor::U).is_trivial());
        let d10 = builtin("D10").unwrap();
        assert_eq!(
            adjacent_table_dim3(&d10, Flavor::SO),
            AbelianGroupDescriptor::from_cyclic_orders(0, &[2, 2])
        );
        assert!(adjacent_table_dim3(&q8, Flavor::SO).is_trivial());
    }

    #[test]
    fn sk_groups() {
        let (sk, skbar) = sk2(&builtin("C4xC2").unwrap()).unwrap();
        assert_eq!(sk, AbelianGroupDescriptor::free(1));
        assert!(skbar.is_trivial());
        assert_eq!(sk_point(5).unwrap(), Some((AbelianGroupDescriptor::trivial(), AbelianGroupDescriptor::trivial())));
        assert_eq!(sk_point(6).unwrap(), Some((AbelianGroupDescriptor::free(1), AbelianGroupDescriptor::trivial())));
        assert_eq!(sk_point(8).unwrap(), Some((AbelianGroupDescriptor::free(2), AbelianGroupDescriptor::free(1))));
        assert_eq!(sk_point(0).unwrap(), None);
        assert!(sk_point(-1).is_err());
    }
}
