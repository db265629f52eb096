//! Acceptance suite. Each criterion is one test and prints a single
//! `criterion NN: PASS|FAIL` line with the measured value and its limit
//! (visible with `--nocapture`; a failing criterion also fails the test).

use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use bordcalc_core::abelian::AbelianGroupDescriptor;
use bordcalc_core::bar::{cycle_check, d3, Cycle2};
use bordcalc_core::bogomolov::{bogomolov, surface_cycle, witness_verify, Method, SurfaceTuple};
use bordcalc_core::bordism::{euler_phi, hominj_orbit_counts, omega2, torsion_omega2, Flavor};
use bordcalc_core::builtins::{builtin, g243, g64};
use bordcalc_core::homology::{h2, Ring};
use bordcalc_core::lattice::{brute_force_subgroups, conjugacy_profile, subgroup_classes};
use bordcalc_core::presentation::word_eval;
use bordcalc_core::FiniteGroup;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const G64_TIME_LIMIT: Duration = Duration::from_secs(5 * 60);
const G243_TIME_LIMIT: Duration = Duration::from_secs(60 * 60);
const G243_MEMORY_LIMIT_KB: u64 = 8 * 1024 * 1024;
const H2_TIME_LIMIT: Duration = Duration::from_secs(10);
const PROPERTY_CASES: u32 = 256;
const LATTICE_ORDER_LIMIT: usize = 48;

fn report(id: u32, ok: bool, detail: &str) {
    println!("criterion {id:02}: {} - {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id:02} failed: {detail}");
}

/// Peak resident set size of this process, in kB (Linux only).
fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn tuple(g: &FiniteGroup, words: &[&str]) -> SurfaceTuple {
    SurfaceTuple::new(words.iter().map(|w| word_eval(g, w).unwrap()).collect()).unwrap()
}

#[test]
fn criterion_01_g64_multiplier() {
    let start = Instant::now();
    let g = g64().unwrap();
    // the defining action: a c a^-1 = c^3
    let action_ok = word_eval(&g, "a*c*a^-1").unwrap() == word_eval(&g, "c^3").unwrap();
    let r = bogomolov(&g, Method::Integral).unwrap();
    let t = start.elapsed();
    let ok = action_ok && r.descriptor == Some(AbelianGroupDescriptor::cyclic(2)) && t <= G64_TIME_LIMIT;
    report(
        1,
        ok,
        &format!(
            "B0(G64) = {} via integral in {:.2}s (limit {}s)",
            r.descriptor.map_or("?".into(), |d| d.to_string()),
            t.as_secs_f64(),
            G64_TIME_LIMIT.as_secs()
        ),
    );
}

#[test]
fn criterion_02_g243_multiplier() {
    let start = Instant::now();
    let g = g243().unwrap();
    let r = bogomolov(&g, Method::OrderModular).unwrap();
    let t = start.elapsed();
    let rss = peak_rss_kb();
    let mem_ok = rss.is_none_or(|kb| kb <= G243_MEMORY_LIMIT_KB);
    let ok = g.order() == 243 && r.order == 3 && t <= G243_TIME_LIMIT && mem_ok;
    report(
        2,
        ok,
        &format!(
            "|B0(G243)| = {} via order-modular in {:.2}s (limit {}s), peak RSS {} (limit {} kB)",
            r.order,
            t.as_secs_f64(),
            G243_TIME_LIMIT.as_secs(),
            rss.map_or("unavailable".into(), |kb| format!("{kb} kB")),
            G243_MEMORY_LIMIT_KB
        ),
    );
}

#[test]
fn criterion_03_vanishing_suite() {
    let mut names: Vec<String> = (1..=16).map(|n| format!("C{n}")).collect();
    for m in 1..=36usize {
        for n in m..=36 {
            if m * n <= 36 {
                names.push(format!("C{m}xC{n}"));
            }
        }
    }
    names.extend((1..=8).map(|k| format!("D{}", 2 * k)));
    names.extend(["Q8", "A4", "S4", "A5"].map(String::from));
    let failures: Vec<&String> = names
        .iter()
        .filter(|n| bogomolov(&builtin(n).unwrap(), Method::Integral).unwrap().order != 1)
        .collect();
    report(3, failures.is_empty(), &format!("{} groups, failures {:?} (allowed 0)", names.len(), failures));
}

#[test]
fn criterion_04_witness_fixtures() {
    let g = g64().unwrap();
    let b0 = bogomolov(&g, Method::Integral).unwrap();
    let w64 = witness_verify(&g, &tuple(&g, &["a", "c", "a*b", "c"]), &b0.evaluator).unwrap();
    let h = g243().unwrap();
    // classes of G243 are read through the mod 3^10 evaluator of the order method
    let b0 = bogomolov(&h, Method::OrderModular).unwrap();
    let w243 = witness_verify(&h, &tuple(&h, &["a", "b^6", "c", "b"]), &b0.evaluator).unwrap();
    let flags = |w: &bordcalc_core::bogomolov::WitnessReport| (w.relator_ok, w.generates_group, w.nontrivial);
    let ok = flags(&w64) == (true, true, true) && flags(&w243) == (true, true, true);
    report(
        4,
        ok,
        &format!(
            "G64 (relator_ok, generates, nontrivial) = {:?}; G243 = {:?} via mod-3 evaluator",
            flags(&w64),
            flags(&w243)
        ),
    );
}

#[test]
fn criterion_05_torsion_theorem() {
    let g = g64().unwrap();
    let torsion = torsion_omega2(&g).unwrap();
    let so = omega2(&g, Flavor::SO).unwrap();
    let proper_trivial = so.contributions.iter().filter(|c| c.order > 1).all(|c| c.torsion.is_trivial());
    let mut mismatched = Vec::new();
    for name in ["C1", "C2", "S3", "D8", "Q8", "A4", "S4", "C2xQ8", "C4xC4", "G64"] {
        let g = builtin(name).unwrap();
        if omega2(&g, Flavor::U).unwrap().total.torsion() != omega2(&g, Flavor::SO).unwrap().total.torsion() {
            mismatched.push(name);
        }
    }
    let ok = torsion == AbelianGroupDescriptor::cyclic(2) && proper_trivial && mismatched.is_empty();
    report(
        5,
        ok,
        &format!(
            "torsion(G64) = {torsion}; proper-class Weyl contributions trivial: {proper_trivial}; \
             U/SO torsion mismatches {mismatched:?}"
        ),
    );
}

#[test]
fn criterion_06_rank_formulas() {
    let cases = [
        ("S3", Flavor::U, AbelianGroupDescriptor::free(6)),
        ("S3", Flavor::SO, AbelianGroupDescriptor::free(1)),
        ("C1", Flavor::U, AbelianGroupDescriptor::free(1)),
        ("C1", Flavor::SO, AbelianGroupDescriptor::trivial()),
        ("C2", Flavor::U, AbelianGroupDescriptor::free(3)),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, flavor, expect) in cases {
        let got = omega2(&builtin(name).unwrap(), flavor).unwrap().total;
        ok &= got == expect;
        lines.push(format!("{name}/{flavor} = {got}"));
    }
    report(6, ok, &lines.join(", "));
}

#[test]
fn criterion_07_homology_oracles() {
    let gcd = |a: u64, b: u64| (1..=a.min(b)).rev().find(|d| a.is_multiple_of(*d) && b.is_multiple_of(*d)).unwrap();
    let mut cases: Vec<(String, AbelianGroupDescriptor)> =
        (2..=9).map(|n| (format!("C{n}"), AbelianGroupDescriptor::trivial())).collect();
    for (m, n) in [(2, 2), (2, 4), (3, 3), (4, 4), (6, 4)] {
        cases.push((format!("C{m}xC{n}"), AbelianGroupDescriptor::cyclic(gcd(m, n))));
    }
    cases.push(("Q8".into(), AbelianGroupDescriptor::trivial()));
    let mut worst = Duration::ZERO;
    let mut wrong = Vec::new();
    for (name, expect) in &cases {
        let g = builtin(name).unwrap();
        let start = Instant::now();
        let d = h2(&g, Ring::Integers).unwrap().descriptor;
        worst = worst.max(start.elapsed());
        if &d != expect {
            wrong.push(format!("{name}: {d}"));
        }
    }
    report(
        7,
        wrong.is_empty() && worst <= H2_TIME_LIMIT,
        &format!(
            "{} cases, wrong {wrong:?}, slowest {:.3}s (limit {}s each)",
            cases.len(),
            worst.as_secs_f64(),
            H2_TIME_LIMIT.as_secs()
        ),
    );
}

fn property_pool() -> &'static [FiniteGroup] {
    static P: OnceLock<Vec<FiniteGroup>> = OnceLock::new();
    P.get_or_init(|| {
        ["S3", "Q8", "D8", "C2xC4", "C3xC3", "A4", "D10", "S4"]
            .iter()
            .map(|n| builtin(n).unwrap())
            .collect()
    })
}

fn commuting_partner(g: &FiniteGroup, x: usize, from: usize) -> usize {
    let n = g.order();
    (0..n).map(|k| (from + k) % n).find(|&y| g.mul(x, y) == g.mul(y, x)).unwrap()
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

#[test]
fn criterion_08_property_suites() {
    let pool = property_pool();
    let np = pool.len();
    let mut failures = Vec::new();
    let mut record = |r: Result<(), String>| {
        if let Err(e) = r {
            failures.push(e);
        }
    };

    record(run_property("d2 d3 = 0", (0..np, any::<u16>(), any::<u16>(), any::<u16>()), |(i, a, b, c)| {
        let g = &pool[i];
        let n = g.order();
        prop_assert!(cycle_check(g, &d3(g, a as usize % n, b as usize % n, c as usize % n)));
        Ok(())
    }));

    record(run_property("toral chains", (0..np, any::<u16>(), any::<u16>()), |(i, a, b)| {
        let g = &pool[i];
        let x = a as usize % g.order();
        let y = commuting_partner(g, x, b as usize);
        prop_assert!(cycle_check(g, &Cycle2::toral(x, y)));
        Ok(())
    }));

    record(run_property(
        "surface cycles",
        (0..np, any::<u16>(), any::<u16>(), any::<u32>()),
        |(i, a, b, s)| {
            let g = &pool[i];
            let n = g.order();
            let (x, y) = (a as usize % n, b as usize % n);
            let target = g.inv(g.commutator(x, y));
            let start = s as usize % (n * n);
            let (z, w) = (0..n * n)
                .map(|k| ((start + k) % (n * n) / n, (start + k) % n))
                .find(|&(z, w)| g.commutator(z, w) == target)
                .expect("[y, x] always solves the relator");
            let t = SurfaceTuple::new(vec![x, y, z, w]).unwrap();
            prop_assert!(cycle_check(g, &surface_cycle(g, &t).unwrap()));
            Ok(())
        },
    ));

    let genus_one: Vec<_> = ["C3xC3", "Q8"]
        .iter()
        .map(|n| {
            let g = builtin(n).unwrap();
            let h = h2(&g, Ring::Integers).unwrap();
            (g, h)
        })
        .collect();
    record(run_property("genus one is toral", (0..2usize, any::<u16>(), any::<u16>()), |(i, a, b)| {
        let (g, h) = &genus_one[i];
        let x = a as usize % g.order();
        let y = commuting_partner(g, x, b as usize);
        let s = surface_cycle(g, &SurfaceTuple::new(vec![x, y]).unwrap()).unwrap();
        prop_assert_eq!(h.evaluator.evaluate(&s).unwrap(), h.evaluator.evaluate(&Cycle2::toral(x, y)).unwrap());
        Ok(())
    }));

    let relabel = (0..np).prop_flat_map(move |i| {
        let n = property_pool()[i].order();
        (Just(i), Just((1..n).collect::<Vec<_>>()).prop_shuffle(), any::<bool>())
    });
    record(run_property("relabeling invariance", relabel, |(i, rest, so)| {
        let g = &pool[i];
        let perm: Vec<usize> = std::iter::once(0).chain(rest).collect();
        let r = g.relabel(&perm).unwrap();
        prop_assert_eq!(h2(g, Ring::Integers).unwrap().descriptor, h2(&r, Ring::Integers).unwrap().descriptor);
        prop_assert_eq!(
            bogomolov(g, Method::Integral).unwrap().descriptor,
            bogomolov(&r, Method::Integral).unwrap().descriptor
        );
        let f = if so { Flavor::SO } else { Flavor::U };
        prop_assert_eq!(omega2(g, f).unwrap().total, omega2(&r, f).unwrap().total);
        Ok(())
    }));

    record(run_property(
        "hominj count",
        (2u64..=100, prop::collection::vec(any::<u64>(), 0..3)),
        |(k, picks)| {
            let units: Vec<u64> = (1..k).filter(|&u| (1..=u).all(|d| !(u % d == 0 && k % d == 0) || d == 1)).collect();
            let gens: Vec<u64> = picks.iter().map(|p| units[(*p % units.len() as u64) as usize]).collect();
            let mut a = vec![1u64];
            let mut i = 0;
            while i < a.len() {
                for &s in &gens {
                    let y = a[i] * s % k;
                    if !a.contains(&y) {
                        a.push(y);
                    }
                }
                i += 1;
            }
            let (u, _) = hominj_orbit_counts(k, &a).unwrap();
            prop_assert_eq!(u * a.len() as u64, euler_phi(k));
            Ok(())
        },
    ));

    report(
        8,
        failures.is_empty(),
        &format!("6 suites x {PROPERTY_CASES} cases (minimum 200), failures {failures:?}"),
    );
}

#[test]
fn criterion_09_lattice_oracle() {
    let mut names: Vec<String> = Vec::new();
    names.extend((1..=LATTICE_ORDER_LIMIT).map(|n| format!("C{n}")));
    names.extend((2..=LATTICE_ORDER_LIMIT / 2).map(|k| format!("D{}", 2 * k)));
    names.extend(
        ["Q8", "S3", "A4", "S4", "C2xC2", "C2xC2xC2", "C2xC2xC2xC2", "C3xC3", "C4xC4", "C2xC4", "C2xC8", "C2xQ8",
         "C2xD8", "C2xA4", "C2xS4", "C3xS3", "C2xS3", "C3xQ8", "C2xC2xS3"]
            .map(String::from),
    );
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for name in &names {
        let g = builtin(name).unwrap();
        if g.order() > LATTICE_ORDER_LIMIT {
            continue;
        }
        checked += 1;
        let l = subgroup_classes(&g).unwrap();
        let mut ours: Vec<(usize, usize)> =
            l.classes.iter().map(|c| (c.representative.order(), c.class_size)).collect();
        ours.sort_unstable();
        if ours != conjugacy_profile(&g, &brute_force_subgroups(&g).unwrap()) {
            mismatches.push(name.clone());
        }
    }
    let s4 = subgroup_classes(&builtin("S4").unwrap()).unwrap();
    let a4 = subgroup_classes(&builtin("A4").unwrap()).unwrap();
    let ok = mismatches.is_empty()
        && (s4.subgroup_count(), s4.classes.len()) == (30, 11)
        && a4.subgroup_count() == 10;
    report(
        9,
        ok,
        &format!(
            "{checked} groups of order <= {LATTICE_ORDER_LIMIT}, mismatches {mismatches:?}; \
             S4 {} subgroups in {} classes; A4 {} subgroups",
            s4.subgroup_count(),
            s4.classes.len(),
            a4.subgroup_count()
        ),
    );
}

fn run_cli(args: &[&str], cache: Option<&std::path::Path>) -> (Vec<u8>, i32) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bordcalc"));
    cmd.args(args).arg("--json");
    match cache {
        Some(dir) => cmd.arg("--cache-dir").arg(dir),
        None => cmd.arg("--no-cache"),
    };
    let out = cmd.output().expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

#[test]
fn criterion_10_determinism() {
    let commands: &[&[&str]] = &[
        &["group", "-g", "builtin:G64"],
        &["subgroups", "-g", "builtin:S4"],
        &["h2", "-g", "builtin:C4xC4"],
        &["bogomolov", "-g", "builtin:G64"],
        &["bogomolov", "-g", "builtin:G243", "--method", "order-modular"],
        &["bordism", "-g", "builtin:G64", "--flavor", "so"],
        &["bordism", "-g", "builtin:C1", "--flavor", "u"],
        &["sk", "-g", "builtin:Q8"],
        &["sk", "--point", "8"],
        &["witness", "verify", "-g", "builtin:G64", "--tuple", "a,c,a*b,c", "--genus", "2"],
        &["witness", "search", "-g", "builtin:G64", "--budget", "2000", "--seed", "5"],
        &["tables", "dim2", "-g", "builtin:C5", "--flavor", "so"],
        &["tables", "dim3", "-g", "builtin:S4", "--flavor", "so"],
        &["bordism", "-g", "presentation:<a,b | a^3, b^2, (a*b)^2>", "--flavor", "so"],
        &["bogomolov", "-g", "builtin:S3", "--method", "order-modular"],
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    for args in commands {
        let cold = run_cli(args, Some(dir.path()));
        let warm = run_cli(args, Some(dir.path()));
        let uncached = run_cli(args, None);
        let again = run_cli(args, None);
        if !(cold == warm && warm == uncached && uncached == again) {
            differing.push(args.join(" "));
        }
    }
    report(
        10,
        differing.is_empty(),
        &format!(
            "{} commands x (cold, warm, uncached twice); stdout differences {differing:?} (timing is on stderr)",
            commands.len()
        ),
    );
}
