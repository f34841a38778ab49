//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qualc::antenna::Synthetic;
use qualc::cli::build_instance;
use qualc::parse_calculus_spec;
use qualc_core::emit::{default_colors, emit, emit_coloring, statements, Variant};
use qualc_core::geo::{self, inverse_mercator, project_mercator};
use qualc_core::solver::{
    brute_force, brute_force_models, solve, solve_with_coloring, verify, Mode, SolveConfig, Status,
    DEFAULT_CANDIDATE_BOUND,
};
use qualc_core::{normalize, Calculus, ConstraintNetwork, NormalizedNetwork, RelationSet};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn spec_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/rcc5.spec")
}

fn rcc5() -> Calculus {
    parse_calculus_spec(&std::fs::read_to_string(spec_path()).unwrap()).unwrap()
}

fn set(calc: &Calculus, names: &[&str]) -> RelationSet {
    names.iter().map(|n| calc.relation_index(n).unwrap()).collect()
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

/// Rows and columns in the order DR, PO, PP, PPi, EQ.
const TABLE: [[&[&str]; 5]; 5] = [
    [&["dr", "po", "pp", "ppi", "eq"], &["dr", "po", "pp"], &["dr", "po", "pp"], &["dr"], &["dr"]],
    [&["dr", "po", "ppi"], &["dr", "po", "pp", "ppi", "eq"], &["po", "pp"], &["dr", "po", "ppi"], &["po"]],
    [&["dr"], &["dr", "po", "pp"], &["pp"], &["dr", "po", "pp", "ppi", "eq"], &["pp"]],
    [&["dr", "po", "ppi"], &["po", "ppi"], &["eq", "po", "pp", "ppi"], &["ppi"], &["ppi"]],
    [&["dr"], &["po"], &["pp"], &["ppi"], &["eq"]],
];
const ORDER: [&str; 5] = ["dr", "po", "pp", "ppi", "eq"];

fn table_fidelity() -> Outcome {
    let calc = rcc5();
    check(calc.relation_count() == 5, || "expected 5 relations".into())?;
    let mut matched = 0;
    for (i, row) in ORDER.iter().enumerate() {
        for (j, col) in ORDER.iter().enumerate() {
            let got = calc.cell(calc.relation_index(row).unwrap(), calc.relation_index(col).unwrap());
            let want = set(&calc, TABLE[i][j]);
            check(got == want, || format!("cell ({row}, {col}) is {:?}", calc.set_names(got)))?;
            matched += 1;
        }
    }
    check(calc == Calculus::rcc5(), || "shipped spec differs from the built-in table".into())?;
    Ok(format!("{matched}/25 cells"))
}

const GEN0_LINES: [&str; 10] = [
    "{true(X,R,Y) : relation(R)} = 1 :- element(X); element(Y); X != Y.",
    ":- true(X,R1,Y); true(Y,R2,Z); not true(X,Rout,Z) : table(R1,R2,Rout).",
    "true(X,eq,X) :- element(X).",
    ":- constraint(X,_,Y); not true(X,R,Y) : constraint(X,R,Y).",
    "relation(dr; eq; po; pp; ppi).",
    "table(dr, eq, (dr)).",
    "table(dr, po, (dr;po;pp)).",
    "table(dr, pp, (dr;po;pp)).",
    "table(dr, ppi, (dr)).",
    "table(dr, dr, (eq;po;pp;ppi;dr)).",
];

const GEN1_LINES: [&str; 4] = [
    "{true(X,R,Y) : relation(R)} = 1 :- element(X); element(Y); X < Y.",
    ":- true(X,R1,Y); X < Y; true(Y,R2,Z); Y < Z;
     not true(X,Rout,Z) : table(R1,R2,Rout).",
    "true(Y,ppi,X) :- true(X,pp,Y), X < Y.",
    "true(Y,pp,X) :- true(X,ppi,Y), X < Y.",
];

const GEN2_LINES: [&str; 3] = [
    ":- true(X,eq,Y); true(Y,R,Z); not true(X,R,Z); Y < Z.",
    ":- true(X,R,Y); true(Y,eq,Z); not true(X,R,Z); X < Y.",
    ":- true(X,R1,Y); X < Y; true(Y,R2,Z); Y < Z; R1!=eq; R2!=eq;
                     not true(X,Rout,Z) : table(R1,R2,Rout).",
];

const COLORING_LINES: [&str; 8] = [
    "color(red; green; blue).",
    "{hasColor(X,C) : color(C)} = 1 :- element(X).",
    ":- arc(V1, V2), hasColor(V1, X), hasColor(V2, Y), X=Y.",
    "arc(V2, V1):- arc(V1, V2).",
    "arc(V1, V2):-true(V1,eq,V2), V1!=V2.",
    "arc(V1, V2):-true(V1,po,V2).",
    "arc(V1, V2):-true(V1,pp,V2).",
    // the reference listing names the inverse proper part `ppc`
    "arc(V1, V2):-true(V1,ppc,V2).",
];

fn one(stmt: &str) -> String {
    let s = statements(&stmt.replace("ppc", "ppi"));
    assert_eq!(s.len(), 1, "{stmt}");
    s.into_iter().next().unwrap()
}

fn golden_emitter() -> Outcome {
    let calc = rcc5();
    let mut net = ConstraintNetwork::with_elements(2);
    net.add(0, 1, &["pp"]);
    let net = normalize(&net, &calc).unwrap();
    let program = |v: Variant| -> BTreeSet<String> {
        statements(&emit(&calc, Some(&net), v).unwrap().text()).into_iter().collect()
    };
    let expect = |v: Variant, present: &[&str], absent: &[&str]| -> Result<usize, String> {
        let p = program(v);
        for l in present {
            check(p.contains(&one(l)), || format!("{v} lacks `{l}`"))?;
        }
        for l in absent {
            check(!p.contains(&one(l)), || format!("{v} still has `{l}`"))?;
        }
        Ok(present.len())
    };
    let mut count = 0;
    count += expect(Variant::Gen0, &GEN0_LINES, &[])?;
    let mut gen1: Vec<&str> = GEN1_LINES.to_vec();
    gen1.extend(&GEN0_LINES[2..]);
    count += expect(Variant::Gen1, &gen1, &GEN0_LINES[..2])?;
    let mut gen2: Vec<&str> = vec![GEN1_LINES[0], GEN1_LINES[2], GEN1_LINES[3]];
    gen2.extend(&GEN2_LINES);
    gen2.extend(GEN0_LINES[2..].iter().filter(|l| !l.starts_with("table(dr, eq")));
    count += expect(Variant::Gen2, &gen2, &[GEN1_LINES[1], GEN0_LINES[5]])?;
    let gen3 = [GEN1_LINES[0], GEN1_LINES[2], GEN1_LINES[3], GEN0_LINES[2], GEN0_LINES[3], GEN0_LINES[4]];
    let mut gone: Vec<&str> = GEN2_LINES.to_vec();
    gone.push(GEN1_LINES[1]);
    gone.extend(&GEN0_LINES[5..]);
    count += expect(Variant::Gen3, &gen3, &gone)?;

    let frag: BTreeSet<String> = statements(&emit_coloring(&calc, set(&calc, &["eq", "po", "pp", "ppi"]), &default_colors(3)).unwrap())
        .into_iter()
        .collect();
    for l in COLORING_LINES {
        check(frag.contains(&one(l)), || format!("coloring lacks `{l}`"))?;
        count += 1;
    }

    let g2 = emit(&calc, None, Variant::Gen2).unwrap();
    let g0 = emit(&calc, None, Variant::Gen0).unwrap();
    check(g2.table_fact_count() == 16 && g0.table_fact_count() == 25, || {
        format!("table facts: gen2 {}, gen0 {}", g2.table_fact_count(), g0.table_fact_count())
    })?;
    let eq_facts = statements(&g2.text()).iter().filter(|s| s.starts_with("table(eq,") || s.contains(",eq,(")).count();
    check(eq_facts == 0, || "gen2 kept identity cells".into())?;
    Ok(format!("{count} reference lines matched; gen2 keeps 16/25 cells"))
}

fn random_network(rng: &mut ChaCha8Rng) -> ConstraintNetwork {
    const NAMES: [&str; 5] = ["dr", "eq", "po", "pp", "ppi"];
    let n = rng.gen_range(1..=4);
    let mut net = ConstraintNetwork::with_elements(n);
    for x in 0..n {
        for y in x + 1..n {
            let repeats = match rng.gen_range(0..10) {
                0..=3 => 0,
                4..=8 => 1,
                _ => 2,
            };
            for _ in 0..repeats {
                let bits: u8 = if rng.gen_bool(0.5) { 1 << rng.gen_range(0..5) } else { rng.gen_range(1..32) };
                let rels: Vec<&str> = (0..5).filter(|i| bits & (1 << i) != 0).map(|i| NAMES[i]).collect();
                if rng.gen_bool(0.5) {
                    net.add(x, y, &rels);
                } else {
                    net.add(y, x, &rels);
                }
            }
        }
    }
    net
}

fn oracle_equivalence() -> Outcome {
    let calc = rcc5();
    let mut rng = ChaCha8Rng::seed_from_u64(2020);
    let modes = [Mode::Gen0, Mode::Gen1, Mode::Gen2, Mode::Propagator];
    let (mut agree, mut sat) = (0, 0);
    for case in 0..500 {
        let net = normalize(&random_network(&mut rng), &calc).unwrap();
        let oracle = brute_force(&calc, &net, DEFAULT_CANDIDATE_BOUND).unwrap().status;
        let mut ok = true;
        for mode in modes {
            let r = solve(&calc, &net, &SolveConfig::mode(mode)).unwrap();
            ok &= r.status == oracle;
            if let Some(m) = &r.model {
                check(verify(&calc, &net, m).ok, || format!("case {case}: {mode} model fails verify"))?;
            }
        }
        check(ok, || format!("case {case}: disagreement with brute force"))?;
        agree += 1;
        sat += (oracle == Status::Sat) as usize;
    }
    Ok(format!("{agree}/500 agree ({sat} SAT, {} UNSAT)", 500 - sat))
}

fn known_instances() -> Outcome {
    let calc = rcc5();
    let mut net = ConstraintNetwork::with_elements(3);
    net.add(0, 1, &["pp"]).add(1, 2, &["pp"]).add(0, 2, &["dr"]);
    let r = solve(&calc, &normalize(&net, &calc).unwrap(), &SolveConfig::default()).unwrap();
    check(r.status == Status::Unsat, || "PP,PP,DR not UNSAT".into())?;

    let mut net = ConstraintNetwork::with_elements(3);
    net.add(0, 1, &["pp"]).add(1, 2, &["po"]);
    let net = normalize(&net, &calc).unwrap();
    let all = SolveConfig {
        max_models: None,
        ..Default::default()
    };
    let r = solve(&calc, &net, &all).unwrap();
    check(r.status == Status::Sat, || "PP,PO not SAT".into())?;
    let seen: RelationSet = r.models.iter().map(|m| m.get(0, 2).unwrap()).collect();
    check(seen == set(&calc, &["dr", "po", "pp"]), || format!("t(a,c) ranges over {:?}", calc.set_names(seen)))?;

    let free = NormalizedNetwork::unconstrained(2);
    let r = solve(&calc, &free, &all).unwrap();
    let brute = brute_force_models(&calc, &free, DEFAULT_CANDIDATE_BOUND).unwrap();
    check(r.models.len() == 5 && brute.len() == 5, || format!("{} models", r.models.len()))?;
    Ok("UNSAT / SAT with t(a,c) in {DR,PO,PP} / 5 models".into())
}

fn geometry_realizability() -> Outcome {
    let calc = rcc5();
    let allowed = set(&calc, &["dr", "po", "eq"]);
    let mut seen = RelationSet::EMPTY;
    for seed in 0..50 {
        let antennas = Synthetic::new(10, seed, 300.0).generate().unwrap();
        let inst = build_instance(&calc, &antennas, 300.0, usize::MAX, geo::DEFAULT_EPS_M).unwrap();
        check(inst.network.constraints.len() == 45, || format!("seed {seed}: incomplete table"))?;
        for s in inst.network.constraints.values() {
            seen |= *s;
        }
        let r = solve(&calc, &inst.network, &SolveConfig::default()).unwrap();
        check(r.status == Status::Sat, || format!("seed {seed}: full table UNSAT"))?;
        check(verify(&calc, &inst.network, r.model.as_ref().unwrap()).ok, || format!("seed {seed}: bad model"))?;
    }
    check(seen.is_subset(allowed), || format!("relations {:?} appeared", calc.set_names(seen)))?;
    Ok(format!("50/50 SAT; relations seen {:?}", calc.set_names(seen)))
}

fn pairwise(calc: &Calculus, n: usize, rel: &str) -> NormalizedNetwork {
    let mut net = ConstraintNetwork::with_elements(n);
    for x in 0..n {
        for y in x + 1..n {
            net.add(x, y, &[rel]);
        }
    }
    normalize(&net, calc).unwrap()
}

fn combined_coloring() -> Outcome {
    let calc = rcc5();
    let overlap = set(&calc, &["eq", "po", "pp", "ppi"]);
    let cases = [(3, 3, Status::Sat), (3, 2, Status::Unsat), (4, 3, Status::Unsat), (4, 4, Status::Sat)];
    for (n, k, want) in cases {
        let out = solve_with_coloring(&calc, &pairwise(&calc, n, "po"), overlap, k, &SolveConfig::default(), None).unwrap();
        check(out.result.status == want, || format!("PO K{n} at k={k}: {:?}", out.result.status))?;
        if let Some(c) = &out.coloring {
            check(out.arcs.iter().all(|&(a, b)| c[a] != c[b]) && c.iter().all(|&x| x < k), || "improper coloring".into())?;
        }
    }
    Ok("K3: SAT@3, UNSAT@2; K4: UNSAT@3, SAT@4; colorings proper".into())
}

fn desk_scale() -> Outcome {
    let calc = rcc5();
    let start = Instant::now();
    let antennas = Synthetic::new(300, 7, 300.0).generate().unwrap();
    let inst = build_instance(&calc, &antennas, 300.0, 1, geo::DEFAULT_EPS_M).unwrap();
    let overlap = set(&calc, &["eq", "po", "pp", "ppi"]);
    let out = solve_with_coloring(&calc, &inst.network, overlap, 3, &SolveConfig::mode(Mode::Propagator), None).unwrap();
    let elapsed = start.elapsed();
    check(out.result.status != Status::Timeout, || "timed out".into())?;
    if let Some(m) = &out.result.model {
        check(verify(&calc, &inst.network, m).ok, || "model fails verify".into())?;
        let c = out.coloring.as_ref().unwrap();
        check(out.arcs.iter().all(|&(a, b)| c[a] != c[b]), || "improper coloring".into())?;
    }
    let peak = qualc::report::peak_memory_bytes();
    check(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    check(peak.is_none_or(|p| p < 2 << 30), || format!("peak memory {peak:?}"))?;
    Ok(format!(
        "{} in {:.2?}, {} known relations, {} arcs, peak RSS {} MiB",
        out.result.status.as_str(),
        elapsed,
        inst.network.constraints.len(),
        out.arcs.len(),
        peak.map(|p| (p >> 20).to_string()).unwrap_or_else(|| "n/a".into())
    ))
}

fn optimisation_ordering() -> Outcome {
    let calc = rcc5();
    let overlap = set(&calc, &["eq", "po", "pp", "ppi"]);
    let mut instances = 0;
    let mut totals = [0u64; 3];
    for size in [20, 40, 60] {
        for seed in 0..3 {
            let antennas = Synthetic::new(size, seed, 300.0).generate().unwrap();
            let inst = build_instance(&calc, &antennas, 300.0, 1, geo::DEFAULT_EPS_M).unwrap();
            let run = |mode| solve_with_coloring(&calc, &inst.network, overlap, 3, &SolveConfig::mode(mode), None).unwrap().result;
            let (g0, g1, g2) = (run(Mode::Gen0), run(Mode::Gen1), run(Mode::Gen2));
            check(g0.status == g1.status && g1.status == g2.status, || format!("n={size} seed={seed}: statuses differ"))?;
            check(g1.stats.decisions <= g0.stats.decisions, || {
                format!("n={size} seed={seed}: gen1 {} > gen0 {} decisions", g1.stats.decisions, g0.stats.decisions)
            })?;
            check(g2.stats.propagation_checks <= g1.stats.propagation_checks, || {
                format!("n={size} seed={seed}: gen2 {} > gen1 {} checks", g2.stats.propagation_checks, g1.stats.propagation_checks)
            })?;
            totals[0] += g0.stats.decisions;
            totals[1] += g1.stats.decisions;
            totals[2] += g2.stats.propagation_checks;
            instances += 1;
        }
    }
    Ok(format!(
        "{instances} instances; decisions gen0 {} >= gen1 {}; gen2 checks {}",
        totals[0], totals[1], totals[2]
    ))
}

fn mercator() -> Outcome {
    check(project_mercator(0.0, 0.0).unwrap() == (0.0, 0.0), || "origin moved".into())?;
    let (x, y) = project_mercator(0.0, 180.0).unwrap();
    check((x - 20037508.342789244).abs() <= 1e-6 && y == 0.0, || format!("(0,180) -> ({x}, {y})"))?;
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let lat = -85.0 + 17.0 * i as f64 + 0.5;
            let lon = -180.0 + 36.0 * j as f64 + 1.0;
            let (px, py) = project_mercator(lat, lon).unwrap();
            let (la, lo) = inverse_mercator(px, py);
            worst = worst.max((la - lat).abs()).max((lo - lon).abs());
        }
    }
    check(worst <= 1e-9, || format!("round trip error {worst:e}"))?;
    Ok(format!("x(180) = {x:.9}; worst round trip {worst:.1e} deg"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("composition-table fidelity", table_fidelity, Duration::from_secs(1)),
        ("golden emitter lines", golden_emitter, Duration::from_secs(1)),
        ("oracle equivalence, 500 networks x 4 modes", oracle_equivalence, Duration::from_secs(60)),
        ("known instances", known_instances, Duration::from_secs(1)),
        ("geometry realizability, 50 datasets", geometry_realizability, Duration::from_secs(30)),
        ("combined coloring", combined_coloring, Duration::from_secs(5)),
        ("300 regions, propagator, k=3", desk_scale, Duration::from_secs(600)),
        ("optimisation ordering, sizes 20/40/60", optimisation_ordering, Duration::from_secs(120)),
        ("mercator correctness", mercator, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if took <= *limit {
                Ok(d)
            } else {
                Err(format!("{d}; exceeded {limit:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
