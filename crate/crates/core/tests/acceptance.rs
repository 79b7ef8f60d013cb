//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p gcmb-core --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gcmb::catalog::{filter_blocks, import_revlex, RANK4_SIZE8_REVLEX};
use gcmb::group::{DavenportMethod, GroupSpec};
use gcmb::instances::{bundled_matroids, grid_groups, k4, tight_example, Instance};
use gcmb::lab::{
    check_k_close, check_schrijver_seymour, check_strongly_k_close, isolation_scan, labeling_count,
    labeling_from_index, sbo_strong_closeness_suite, Predicate, Reduction, ScanEntry,
};
use gcmb::matroid::{
    brualdi_bijection, delete, enumerate_bases, find_exchange, is_strongly_base_orderable, make_uniform, shared,
    ElementSet, Matroid,
};
use gcmb::solver::{
    deletion_exchange, find_optimum_base, proximity_pair_bound, solve_enum, solve_proximity, Labeling,
    ProximityMode,
};
use gcmb::weights::Weights;

struct Outcome {
    pass: bool,
    detail: String,
    /// Deterministic record of everything computed, compared across thread counts.
    report: String,
}

fn outcome(failures: &[String], detail: String, report: String) -> Outcome {
    let mut detail = detail;
    if let Some(first) = failures.first() {
        let _ = write!(detail, "; {} failure(s), first: {first}", failures.len());
    }
    Outcome { pass: failures.is_empty(), detail, report }
}

fn brute_min(m: &dyn Matroid, l: &Labeling, g_idx: usize, w: Option<&Weights>) -> Option<Rational64> {
    enumerate_bases(m)
        .unwrap()
        .into_iter()
        .filter(|&b| l.label_sum_index(b) == g_idx)
        .map(|b| w.map_or(Rational64::from_integer(0), |w| w.total(b)))
        .min()
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Weights {
    Weights::from_integers(&(0..n).map(|_| rng.gen_range(-10..=10)).collect::<Vec<_>>())
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    let mut report = String::new();
    let mut instances = 0;
    for inst in bundled_matroids() {
        let m = &*inst.matroid;
        for group in grid_groups() {
            for _ in 0..20 {
                let l = Labeling::random(group.clone(), m.ground_size(), &mut rng);
                let weights: Vec<Weights> = (0..10).map(|_| random_weights(&mut rng, m.ground_size())).collect();
                for g in group.elements() {
                    let gi = group.index_of(&g);
                    instances += 1;
                    let res = solve_enum(m, &l, &g, None).unwrap();
                    let expect = brute_min(m, &l, gi, None).is_some();
                    if res.is_feasible() != expect {
                        failures.push(format!("{} {} {} target {g}: feasibility", inst.name, group, l.compact()));
                    }
                    let _ = write!(report, "{} {} {} {g} {}", inst.name, group, l.compact(), res.status);
                    for w in &weights {
                        let res = solve_enum(m, &l, &g, Some(w)).unwrap();
                        let expect = brute_min(m, &l, gi, Some(w));
                        if res.weight != expect {
                            failures.push(format!("{} {} target {g}: weight {:?} vs {:?}", inst.name, group, res.weight, expect));
                        }
                        let _ = write!(report, " {:?}:{:?}", res.base, res.weight);
                    }
                    report.push('\n');
                }
            }
        }
    }
    outcome(&failures, format!("{instances} (matroid, group, labeling, target) instances, 10 weight vectors each"), report)
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    let mut report = String::new();
    let mut instances = 0;
    let mut max_ratio = 0.0f64;
    for inst in bundled_matroids() {
        let m = &*inst.matroid;
        for group in grid_groups().into_iter().filter(|g| g.closeness_class() == gcmb::group::ClosenessClass::Proven) {
            let k = group.order() - 1;
            let bound = proximity_pair_bound(&group, k);
            for _ in 0..20 {
                let l = Labeling::random(group.clone(), m.ground_size(), &mut rng);
                for g in group.elements() {
                    instances += 1;
                    let e = solve_enum(m, &l, &g, None).unwrap();
                    let p = solve_proximity(m, &l, &g, k, None, ProximityMode::CertifiedOnly).unwrap();
                    if e.status != p.status {
                        failures.push(format!("{} {} {} target {g}: enum {} vs proximity {}", inst.name, group, l.compact(), e.status, p.status));
                    }
                    if p.stats.intersections > bound {
                        failures.push(format!("{} {}: {} intersections > {bound}", inst.name, group, p.stats.intersections));
                    }
                    max_ratio = max_ratio.max(p.stats.intersections as f64 / bound as f64);
                    let _ = writeln!(
                        report,
                        "{} {} {} {g} {} {:?} {}",
                        inst.name,
                        group,
                        l.compact(),
                        p.status,
                        p.base,
                        p.stats.intersections
                    );
                }
            }
        }
    }
    outcome(&failures, format!("{instances} instances, max intersections/bound = {max_ratio:.3}"), report)
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    let mut report = String::new();
    for m in 2..=6u32 {
        let t = tight_example(m);
        let l = t.labeling.unwrap();
        let k = (m - 2) as usize;
        match check_k_close(&t.matroid, &l, k).unwrap() {
            Some(w) if w.distance == (m - 1) as usize => {
                let _ = writeln!(report, "m={m} k={k} witness A={} B={} distance={}", w.a, w.b, w.distance);
            }
            other => failures.push(format!("m={m}: expected a distance {} witness, got {:?}", m - 1, other.map(|w| w.distance))),
        }
        if let Some(w) = check_k_close(&t.matroid, &l, k + 1).unwrap() {
            failures.push(format!("m={m}: unexpected witness at k={} (distance {})", k + 1, w.distance));
        }
        let _ = writeln!(report, "m={m} k={} ok", k + 1);
    }
    outcome(&failures, "tight examples m = 2..6".into(), report)
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let entries = [ScanEntry { id: "k4".into(), matroid: k4() }];
    let mut report = String::new();
    let mut counts = Vec::new();
    for group in ["Z3", "Z2xZ2"] {
        let group: GroupSpec = group.parse().unwrap();
        let scan = isolation_scan(&entries, &group, Predicate::StrongBlock, Reduction::None, None, 0).unwrap();
        let line = &scan.lines[0];
        counts.push(format!("{group}: {} labelings", line.checked));
        if line.isolating != 0 || line.checked != labeling_count(&group, 6).unwrap() {
            failures.push(format!("{group}: {} isolating of {}", line.isolating, line.checked));
        }
        report.push_str(&scan.render());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let m = k4();
    for group in ["Z3", "Z2xZ2"] {
        let group: GroupSpec = group.parse().unwrap();
        for trial in 0..100 {
            let l = Labeling::random(group.clone(), 6, &mut rng);
            let w = random_weights(&mut rng, 6);
            let res = check_strongly_k_close(&m, &l, &w, 2).unwrap();
            if let Some(wit) = &res {
                failures.push(format!("{group} trial {trial}: {wit}"));
            }
            let _ = writeln!(report, "{group} {trial} {}", res.is_none());
        }
    }
    outcome(&failures, format!("{}; 200 strong 2-closeness samples", counts.join(", ")), report)
}

fn criterion_5() -> Outcome {
    let entries = import_revlex(RANK4_SIZE8_REVLEX, "r4n8_").unwrap();
    let total = entries.len();
    let blocks: Vec<_> = filter_blocks(entries).collect();
    let shard: Vec<ScanEntry> = blocks
        .iter()
        .take(20)
        .map(|e| ScanEntry { id: e.id.clone(), matroid: e.to_matroid().unwrap() })
        .collect();
    let z4 = GroupSpec::cyclic(4);
    let scan = isolation_scan(&shard, &z4, Predicate::StrongBlock, Reduction::None, None, 0).unwrap();
    let mut failures = Vec::new();
    if total != 940 {
        failures.push(format!("catalog has {total} entries, expected 940"));
    }
    if shard.len() != 20 {
        failures.push(format!("only {} block matroids", shard.len()));
    }
    for line in &scan.lines {
        if line.isolating != 0 || line.checked != 65536 {
            failures.push(format!("{}: {} isolating of {}", line.id, line.isolating, line.checked));
        }
    }
    outcome(
        &failures,
        format!("{} of {total} catalog entries are block matroids; first 20 scanned, {} labelings", blocks.len(), scan.checked()),
        scan.render(),
    )
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut exhaustive = 0u64;
    let small: Vec<Instance> = bundled_matroids().into_iter().filter(|i| i.matroid.ground_size() <= 6).collect();
    for inst in &small {
        let n = inst.matroid.ground_size();
        for group in [GroupSpec::cyclic(2), GroupSpec::cyclic(3)] {
            for idx in 0..labeling_count(&group, n).unwrap() {
                let l = labeling_from_index(&group, n, idx);
                exhaustive += 1;
                match check_schrijver_seymour(&*inst.matroid, &l) {
                    Ok(rep) if rep.holds => {}
                    Ok(rep) => failures.push(format!("{} {}: {rep}", inst.name, l.compact())),
                    Err(e) => failures.push(format!("{} {}: {e}", inst.name, l.compact())),
                }
            }
        }
    }
    let all = bundled_matroids();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut random = 0;
    for group in ["Z4", "Z6", "Z8", "Z2xZ2"] {
        let group: GroupSpec = group.parse().unwrap();
        for i in 0..1000 {
            let inst = &all[i % all.len()];
            let l = Labeling::random(group.clone(), inst.matroid.ground_size(), &mut rng);
            random += 1;
            match check_schrijver_seymour(&*inst.matroid, &l) {
                Ok(rep) if rep.holds => {}
                Ok(rep) => failures.push(format!("{} {}: {rep}", inst.name, l.compact())),
                Err(e) => failures.push(format!("{} {}: {e}", inst.name, l.compact())),
            }
        }
    }
    outcome(&failures, format!("{exhaustive} exhaustive and {random} random labelings"), String::new())
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let mut matroids: Vec<(String, gcmb::matroid::MatroidRef)> =
        (1..=4).map(|r| (format!("u{r}-{}", 2 * r), shared(make_uniform(2 * r, r).unwrap()))).collect();
    let mut skipped = Vec::new();
    for inst in bundled_matroids() {
        if matroids.iter().any(|(name, _)| *name == inst.name) {
            continue;
        }
        if is_strongly_base_orderable(&*inst.matroid).unwrap().is_orderable() {
            matroids.push((inst.name, inst.matroid));
        } else {
            skipped.push(inst.name);
        }
    }
    let mut runs = 0;
    for (name, m) in &matroids {
        for group in ["Z2", "Z3", "Z4", "Z2xZ2"] {
            let group: GroupSpec = group.parse().unwrap();
            let rep = sbo_strong_closeness_suite(m, &group, 100, 7, None).unwrap();
            runs += rep.trials;
            if !rep.passed() {
                failures.push(format!("{name}: {rep}"));
            }
        }
    }
    let names: Vec<&str> = matroids.iter().map(|(n, _)| n.as_str()).collect();
    outcome(
        &failures,
        format!("{runs} trials on {} (not SBO: {})", names.join(" "), skipped.join(" ")),
        String::new(),
    )
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut pairs = 0;
    let all = bundled_matroids();
    for inst in &all {
        let m = &*inst.matroid;
        let bases = enumerate_bases(m).unwrap();
        for &a in &bases {
            for &b in &bases {
                pairs += 1;
                match brualdi_bijection(m, a, b) {
                    Ok(f) => {
                        if f.pairs.iter().any(|&(x, y)| !m.is_base(a.without(x).with(y))) {
                            failures.push(format!("{}: bad bijection {a} {b}", inst.name));
                        }
                    }
                    Err(e) => failures.push(format!("{}: {e}", inst.name)),
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut exchanges = 0;
    let mut attempts = 0;
    while exchanges < 500 && attempts < 1_000_000 {
        attempts += 1;
        let inst = all.choose(&mut rng).unwrap();
        let m = &*inst.matroid;
        let bases = enumerate_bases(m).unwrap();
        let a = *bases.choose(&mut rng).unwrap();
        let a1: ElementSet = a.iter().filter(|_| rng.gen_bool(0.6)).collect();
        let b1: ElementSet = m.ground().difference(a).iter().filter(|_| rng.gen_bool(0.6)).collect();
        if !m.is_independent(b1) || a1.is_empty() || b1.is_empty() {
            continue;
        }
        let t = rng.gen_range(1..=a1.len().min(b1.len()));
        let surplus = a1.len() + b1.len() - m.rank_of(a1.union(b1));
        if surplus < t {
            continue;
        }
        exchanges += 1;
        match find_exchange(m, a, a1, b1, t).unwrap() {
            Some((a2, b2)) => {
                let ok = a2.len() == t
                    && b2.len() == t
                    && a2.is_subset(a1)
                    && b2.is_subset(b1)
                    && m.is_base(a.difference(a2).union(b2));
                if !ok {
                    failures.push(format!("{}: bad exchange A={a} A1={a1} B1={b1} t={t}", inst.name));
                }
            }
            None => failures.push(format!("{}: no exchange A={a} A1={a1} B1={b1} t={t}", inst.name)),
        }
    }

    let mut deletions = 0;
    for inst in &all {
        let m = &*inst.matroid;
        for _ in 0..20 {
            let w = random_weights(&mut rng, m.ground_size());
            let opt = find_optimum_base(m, &w);
            for a in opt {
                let minor = delete(inst.matroid.clone(), ElementSet::singleton(a)).unwrap();
                if minor.rank() < m.rank() {
                    continue;
                }
                deletions += 1;
                let best = enumerate_bases(m).unwrap().into_iter().filter(|b| !b.contains(a)).map(|b| w.total(b)).min();
                match deletion_exchange(m, &w, opt, a) {
                    Some(b) if Some(w.total(opt.without(a).with(b))) == best && m.is_base(opt.without(a).with(b)) => {}
                    other => failures.push(format!("{}: deleting {a} from {opt} gave {other:?}", inst.name)),
                }
            }
        }
    }
    outcome(
        &failures,
        format!("{pairs} base pairs, {exchanges} surplus exchanges, {deletions} deletion checks"),
        String::new(),
    )
}

fn criterion_9() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = Vec::new();
    let mut groups: BTreeSet<Vec<u32>> = BTreeSet::new();
    for order in 1..=16u32 {
        for a in 1..=order {
            if order % a != 0 {
                continue;
            }
            for moduli in [vec![order], vec![a, order / a]] {
                if let Ok(g) = GroupSpec::from_moduli(&moduli) {
                    groups.insert(g.factors().to_vec());
                }
            }
        }
    }
    // three or more factors of order <= 16 are p-groups
    for f in [vec![2, 2, 2], vec![2, 2, 4], vec![2, 2, 2, 2]] {
        groups.insert(f);
    }
    for factors in groups {
        let g = GroupSpec::new(factors).unwrap();
        if !(g.is_p_group() || g.factors().len() <= 2) {
            continue;
        }
        let brute = g.davenport(DavenportMethod::BruteForce).unwrap();
        let formula = g.davenport(DavenportMethod::Formula).unwrap();
        if brute != formula {
            failures.push(format!("{g}: brute force {brute}, formula {formula}"));
        }
        checked.push(g.to_string());
    }
    for m in 1..=12 {
        let d = GroupSpec::cyclic(m).davenport(DavenportMethod::BruteForce).unwrap();
        if d != m as usize {
            failures.push(format!("D(Z{m}) = {d}"));
        }
    }
    outcome(&failures, format!("{} groups: {}; cyclic m <= 12", checked.len(), checked.join(" ")), String::new())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

type Criterion = fn() -> Outcome;

#[test]
fn acceptance() {
    let criteria: [(&str, Criterion); 9] = [
        ("solver matches brute force", criterion_1),
        ("proximity agrees with enumeration", criterion_2),
        ("tight examples are sharp", criterion_3),
        ("M(K4) strong closeness", criterion_4),
        ("rank-4 size-8 Z4 scan", criterion_5),
        ("label-image inequality", criterion_6),
        ("SBO strong closeness", criterion_7),
        ("exchange machinery", criterion_8),
        ("Davenport constants", criterion_9),
    ];
    let mut results = Vec::new();
    let mut reports = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = in_pool(8, run);
        let line = format!(
            "criterion {}: {} - {name}: {} [{:.1}s]",
            i + 1,
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed().as_secs_f64()
        );
        println!("{line}");
        results.push((out.pass, line));
        if i < 5 {
            reports.push(out.report);
        }
    }

    let start = Instant::now();
    let mut mismatched = Vec::new();
    for (i, (_, run)) in criteria.iter().take(5).enumerate() {
        let single = in_pool(1, run).report;
        if single != reports[i] {
            mismatched.push(format!("{}", i + 1));
        }
    }
    let pass = mismatched.is_empty();
    let bytes: usize = reports.iter().map(|r| r.len()).sum();
    let line = format!(
        "criterion 10: {} - reports of criteria 1-5 identical with 1 and 8 threads ({bytes} bytes){} [{:.1}s]",
        if pass { "PASS" } else { "FAIL" },
        if pass { String::new() } else { format!("; differ: {}", mismatched.join(", ")) },
        start.elapsed().as_secs_f64()
    );
    println!("{line}");
    results.push((pass, line));

    let failed: Vec<&String> = results.iter().filter(|(ok, _)| !ok).map(|(_, l)| l).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\n"));
}

