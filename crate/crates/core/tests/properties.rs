use std::sync::OnceLock;

use bordcalc_core::bar::{cycle_check, d3, Cycle2};
use bordcalc_core::bogomolov::{bogomolov, surface_cycle, Method, SurfaceTuple};
use bordcalc_core::bordism::{euler_phi, hominj_orbit_counts, omega2, Flavor};
use bordcalc_core::builtins::builtin;
use bordcalc_core::homology::{h2, Ring};
use bordcalc_core::lattice::subgroup_classes;
use bordcalc_core::FiniteGroup;
use proptest::prelude::*;

const POOL: &[&str] = &["S3", "Q8", "D8", "C2xC4", "C3xC3", "A4", "D10", "C2xC2xC2", "S4", "C2xQ8"];

fn pool() -> &'static [FiniteGroup] {
    static P: OnceLock<Vec<FiniteGroup>> = OnceLock::new();
    P.get_or_init(|| POOL.iter().map(|n| builtin(n).unwrap()).collect())
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(256)
}

/// A group from the pool and a uniformly random relabeling fixing the identity.
fn relabeled_group(max_order: usize) -> impl Strategy<Value = (usize, Vec<usize>)> {
    let idx: Vec<usize> = (0..POOL.len()).filter(|&i| pool()[i].order() <= max_order).collect();
    prop::sample::select(idx).prop_flat_map(|i| {
        let n = pool()[i].order();
        (Just(i), Just((1..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|(i, rest)| (i, std::iter::once(0).chain(rest).collect()))
    })
}

fn commutator_product(g: &FiniteGroup, elems: &[usize]) -> usize {
    elems.chunks(2).fold(0, |acc, p| g.mul(acc, g.commutator(p[0], p[1])))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn boundary_of_boundary_vanishes(i in 0..POOL.len(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let g = &pool()[i];
        let n = g.order() as u32;
        let z = d3(g, (a % n) as usize, (b % n) as usize, (c % n) as usize);
        prop_assert!(cycle_check(g, &z));
    }

    #[test]
    fn toral_chains_are_cycles(i in 0..POOL.len(), a in any::<u32>(), b in any::<u32>()) {
        let g = &pool()[i];
        let n = g.order();
        let x = a as usize % n;
        // walk to the next element commuting with x
        let y = (0..n).map(|k| (b as usize + k) % n).find(|&y| g.mul(x, y) == g.mul(y, x)).unwrap();
        prop_assert!(cycle_check(g, &Cycle2::toral(x, y)));
    }

    #[test]
    fn surface_cycles_are_cycles(i in 0..POOL.len(), genus in 1usize..=3, seeds in prop::collection::vec(any::<u32>(), 6)) {
        let g = &pool()[i];
        let n = g.order();
        let mut elems: Vec<usize> = seeds[..2 * genus - 2].iter().map(|&s| s as usize % n).collect();
        let head = commutator_product(g, &elems);
        let target = g.inv(head);
        let start = seeds[5] as usize % (n * n);
        let found = (0..n * n)
            .map(|k| (start + k) % (n * n))
            .map(|k| (k / n, k % n))
            .find(|&(z, w)| g.commutator(z, w) == target);
        prop_assume!(found.is_some());
        let (z, w) = found.unwrap();
        elems.extend([z, w]);
        let t = SurfaceTuple::new(elems).unwrap();
        prop_assert!(cycle_check(g, &surface_cycle(g, &t).unwrap()));
    }

    #[test]
    fn genus_one_class_is_toral(use_q8 in any::<bool>(), a in any::<u32>(), b in any::<u32>()) {
        static H: OnceLock<Vec<(FiniteGroup, bordcalc_core::homology::H2Presentation)>> = OnceLock::new();
        let hs = H.get_or_init(|| {
            ["C3xC3", "Q8"].iter().map(|n| {
                let g = builtin(n).unwrap();
                let h = h2(&g, Ring::Integers).unwrap();
                (g, h)
            }).collect()
        });
        let (g, h) = &hs[usize::from(use_q8)];
        let n = g.order();
        let x = a as usize % n;
        let y = (0..n).map(|k| (b as usize + k) % n).find(|&y| g.mul(x, y) == g.mul(y, x)).unwrap();
        let surface = surface_cycle(g, &SurfaceTuple::new(vec![x, y]).unwrap()).unwrap();
        prop_assert_eq!(
            h.evaluator.evaluate(&surface).unwrap(),
            h.evaluator.evaluate(&Cycle2::toral(x, y)).unwrap()
        );
    }

    #[test]
    fn h2_and_b0_survive_relabeling((i, perm) in relabeled_group(24)) {
        let g = &pool()[i];
        let r = g.relabel(&perm).unwrap();
        prop_assert_eq!(
            h2(g, Ring::Integers).unwrap().descriptor,
            h2(&r, Ring::Integers).unwrap().descriptor
        );
        prop_assert_eq!(
            bogomolov(g, Method::Integral).unwrap().descriptor,
            bogomolov(&r, Method::Integral).unwrap().descriptor
        );
    }

    #[test]
    fn omega2_and_lattice_survive_relabeling((i, perm) in relabeled_group(24), so in any::<bool>()) {
        let g = &pool()[i];
        let r = g.relabel(&perm).unwrap();
        let flavor = if so { Flavor::SO } else { Flavor::U };
        prop_assert_eq!(omega2(g, flavor).unwrap().total, omega2(&r, flavor).unwrap().total);
        prop_assert_eq!(
            subgroup_classes(g).unwrap().invariants(),
            subgroup_classes(&r).unwrap().invariants()
        );
    }

    #[test]
    fn orbit_count_times_stabilizer_is_phi(k in 1u64..=100, picks in prop::collection::vec(any::<u64>(), 0..3)) {
        let units: Vec<u64> = (1..=k.max(1)).filter(|&u| gcd(u, k) == 1).map(|u| u % k.max(1)).collect();
        // subgroup generated by a few random units
        let gens: Vec<u64> = picks.iter().map(|p| units[(*p % units.len() as u64) as usize]).collect();
        let mut a = vec![1 % k];
        loop {
            let mut next = a.clone();
            for &x in &a {
                for &s in &gens {
                    let y = x * s % k;
                    if !next.contains(&y) {
                        next.push(y);
                    }
                }
            }
            if next.len() == a.len() {
                break;
            }
            a = next;
        }
        let (u, _) = hominj_orbit_counts(k, &a).unwrap();
        if k >= 2 {
            prop_assert_eq!(u * a.len() as u64, euler_phi(k));
        } else {
            prop_assert_eq!(u, 0);
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}
