use std::collections::BTreeSet;

use bordcalc_core::abelian::AbelianGroupDescriptor;
use bordcalc_core::bordism::{omega2, sk2, torsion_omega2, Flavor};
use bordcalc_core::builtins::{builtin, g243, g64};
use bordcalc_core::lattice::brute_force_subgroups;
use bordcalc_core::FiniteGroup;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Free ranks straight from the definition: conjugacy classes of subgroups
/// from the brute-force list, and for cyclic `K = <x>` of order `k` the
/// orbits of the normalizer on primitive `k`-th roots (with complex
/// conjugation added for SO).
fn free_rank_oracle(g: &FiniteGroup) -> (usize, usize) {
    let subs = brute_force_subgroups(g).unwrap();
    let n = g.order();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let (mut u, mut so) = (0, 0);
    for h in &subs {
        if seen.contains(h.elements()) {
            continue;
        }
        for x in 0..n {
            let mut c: Vec<usize> = h.elements().iter().map(|&y| g.mul(g.mul(x, y), g.inv(x))).collect();
            c.sort_unstable();
            seen.insert(c);
        }
        u += 1;
        let k = h.order();
        let Some(&gen) = h.elements().iter().find(|&&y| g.element_order(y) == k) else { continue };
        if k < 2 {
            continue;
        }
        let power = |e: usize| (0..e).fold(0, |acc, _| g.mul(acc, gen));
        let mut acting: BTreeSet<usize> = BTreeSet::new();
        for x in 0..n {
            let c = g.mul(g.mul(x, gen), g.inv(x));
            if let Some(e) = (1..k).find(|&e| power(e) == c) {
                acting.insert(e);
            }
        }
        let roots: Vec<usize> = (1..k).filter(|&e| gcd(e, k) == 1).collect();
        let orbits = |with_conj: bool| {
            let mut done = BTreeSet::new();
            let mut count = 0;
            for &r in &roots {
                if done.insert(r) {
                    count += 1;
                    for &a in &acting {
                        done.insert(a * r % k);
                        if with_conj {
                            done.insert((k - a * r % k) % k);
                        }
                    }
                }
            }
            count
        };
        u += orbits(false);
        if k > 2 {
            so += orbits(true);
        }
    }
    (u, so)
}

#[test]
fn free_ranks_match_the_oracle() {
    for name in ["C1", "C2", "C6", "C12", "S3", "D8", "Q8", "A4", "S4", "D10", "C2xC4", "C3xS3", "C2xQ8"] {
        let g = builtin(name).unwrap();
        let (u, so) = free_rank_oracle(&g);
        assert_eq!(omega2(&g, Flavor::U).unwrap().total.free_rank, u, "{name} U");
        assert_eq!(omega2(&g, Flavor::SO).unwrap().total.free_rank, so, "{name} SO");
    }
}

#[test]
fn hand_evaluated_examples() {
    let s3 = builtin("S3").unwrap();
    assert_eq!(omega2(&s3, Flavor::U).unwrap().total, AbelianGroupDescriptor::free(6));
    assert_eq!(omega2(&s3, Flavor::SO).unwrap().total, AbelianGroupDescriptor::free(1));
    let c1 = builtin("C1").unwrap();
    assert_eq!(omega2(&c1, Flavor::U).unwrap().total, AbelianGroupDescriptor::free(1));
    assert_eq!(omega2(&c1, Flavor::SO).unwrap().total, AbelianGroupDescriptor::trivial());
    assert_eq!(omega2(&builtin("C2").unwrap(), Flavor::U).unwrap().total, AbelianGroupDescriptor::free(3));
}

#[test]
fn g64_torsion_comes_from_the_trivial_class() {
    let g = g64().unwrap();
    assert_eq!(torsion_omega2(&g).unwrap(), AbelianGroupDescriptor::cyclic(2));
    for flavor in [Flavor::U, Flavor::SO] {
        let r = omega2(&g, flavor).unwrap();
        assert_eq!(r.total.torsion(), AbelianGroupDescriptor::cyclic(2));
        for c in &r.contributions {
            assert_eq!(c.torsion.is_trivial(), c.order != 1, "class {}", c.class_index);
        }
    }
    let (sk, skbar) = sk2(&g).unwrap();
    assert_eq!(sk, AbelianGroupDescriptor::from_cyclic_orders(1, &[2]));
    assert_eq!(skbar, AbelianGroupDescriptor::cyclic(2));
}

#[test]
fn g243_torsion_has_order_three() {
    let g = g243().unwrap();
    assert_eq!(torsion_omega2(&g).unwrap().torsion_order(), 3);
}

#[test]
fn torsion_is_flavor_independent() {
    for name in ["S3", "D8", "Q8", "A4", "S4", "C2xQ8", "C4xC4"] {
        let g = builtin(name).unwrap();
        assert_eq!(
            omega2(&g, Flavor::U).unwrap().total.torsion(),
            omega2(&g, Flavor::SO).unwrap().total.torsion(),
            "{name}"
        );
    }
    for name in ["C4xC4", "C2xC2xC2", "C6"] {
        assert!(torsion_omega2(&builtin(name).unwrap()).unwrap().is_trivial());
    }
}
