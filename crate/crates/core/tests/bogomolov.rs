use bordcalc_core::abelian::AbelianGroupDescriptor;
use bordcalc_core::bar::cycle_check;
use bordcalc_core::bogomolov::{
    bogomolov, lhs_h1_crosscheck, surface_cycle, toral_cycles, witness_search, witness_verify, ActionModule, Method,
    SurfaceTuple,
};
use bordcalc_core::builtins::{builtin, g243, g64};
use bordcalc_core::presentation::word_eval;
use bordcalc_core::FiniteGroup;

fn tuple(g: &FiniteGroup, words: &[&str]) -> SurfaceTuple {
    SurfaceTuple::new(words.iter().map(|w| word_eval(g, w).unwrap()).collect()).unwrap()
}

#[test]
fn g64_multiplier_and_witness() {
    let g = g64().unwrap();
    let r = bogomolov(&g, Method::Integral).unwrap();
    assert_eq!(r.descriptor, Some(AbelianGroupDescriptor::cyclic(2)));
    let t = tuple(&g, &["a", "c", "a*b", "c"]);
    assert!(cycle_check(&g, &surface_cycle(&g, &t).unwrap()));
    let w = witness_verify(&g, &t, &r.evaluator).unwrap();
    assert!(w.relator_ok && w.generates_group && w.nontrivial);
    // a tuple of commuting pairs only carries toral classes
    let c = word_eval(&g, "c").unwrap();
    let w = witness_verify(&g, &SurfaceTuple::new(vec![c, c, c, c]).unwrap(), &r.evaluator).unwrap();
    assert!(w.relator_ok && !w.nontrivial && !w.generates_group);
}

#[test]
fn g243_multiplier_has_order_three() {
    let g = g243().unwrap();
    let r = bogomolov(&g, Method::OrderModular).unwrap();
    assert_eq!(r.order, 3);
    assert_eq!(r.descriptor, Some(AbelianGroupDescriptor::cyclic(3)));
    let w = witness_verify(&g, &tuple(&g, &["a", "b^6", "c", "b"]), &r.evaluator).unwrap();
    assert!(w.relator_ok && w.generates_group && w.nontrivial);
}

#[test]
fn witness_search_is_deterministic() {
    let g = g64().unwrap();
    let r = bogomolov(&g, Method::Integral).unwrap();
    let a = witness_search(&g, 2, 5_000, 11, &r.evaluator).unwrap().unwrap();
    let b = witness_search(&g, 2, 5_000, 11, &r.evaluator).unwrap().unwrap();
    assert_eq!(a, b);
    assert!(witness_verify(&g, &a, &r.evaluator).unwrap().nontrivial);
    // genus one only reaches toral classes
    assert_eq!(witness_search(&g, 1, 500, 0, &r.evaluator).unwrap(), None);
    let s4 = builtin("S4").unwrap();
    let r = bogomolov(&s4, Method::Integral).unwrap();
    assert_eq!(witness_search(&s4, 2, 100, 0, &r.evaluator).unwrap(), None);
}

#[test]
fn relator_violation_is_reported() {
    let g = builtin("S3").unwrap();
    let r = bogomolov(&g, Method::Integral).unwrap();
    let t = tuple(&g, &["a", "b"]);
    let w = witness_verify(&g, &t, &r.evaluator).unwrap();
    assert!(!w.relator_ok && !w.nontrivial && w.class_coordinates.is_none());
}

#[test]
fn multiplier_vanishes_on_classical_families() {
    let mut names: Vec<String> = (1..=16).map(|n| format!("C{n}")).collect();
    for m in 1..=36 {
        for n in m..=36 {
            if m * n <= 36 {
                names.push(format!("C{m}xC{n}"));
            }
        }
    }
    names.extend((1..=8).map(|k| format!("D{}", 2 * k)));
    names.extend(["Q8", "A4", "S4", "A5"].map(String::from));
    for name in &names {
        let r = bogomolov(&builtin(name).unwrap(), Method::Integral).unwrap();
        assert_eq!(r.order, 1, "{name}");
    }
}

#[test]
fn toral_generators() {
    let g = builtin("Q8").unwrap();
    let t = toral_cycles(&g);
    assert!(t.iter().all(|z| cycle_check(&g, z)));
    // commuting unordered pairs of distinct non-identity elements in Q8
    let expect = (1..8)
        .flat_map(|a| (a + 1..8).map(move |b| (a, b)))
        .filter(|&(a, b)| g.mul(a, b) == g.mul(b, a))
        .count();
    assert_eq!(t.len(), expect);
}

#[test]
fn first_cohomology_of_split_extensions() {
    // action of Q8 on the normal Z/8 of the order-64 example
    let q8 = builtin("Q8").unwrap();
    let m = ActionModule { moduli: vec![8], action: vec![vec![vec![3]], vec![vec![5]]] };
    assert_eq!(lhs_h1_crosscheck(&q8, &m).unwrap(), AbelianGroupDescriptor::cyclic(2));
    // trivial action on Z/2 + Z/4 gives Hom(Q8^ab, Z/2 + Z/4) = (Z/2)^4
    let m = ActionModule {
        moduli: vec![2, 4],
        action: vec![vec![vec![1, 0], vec![0, 1]]; 2],
    };
    assert_eq!(
        lhs_h1_crosscheck(&q8, &m).unwrap(),
        AbelianGroupDescriptor::from_cyclic_orders(0, &[2, 2, 2, 2])
    );
}
