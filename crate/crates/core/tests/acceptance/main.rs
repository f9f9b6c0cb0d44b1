//! Acceptance suite: one PASS/FAIL line per criterion.

mod oracle;

use std::collections::{HashSet, VecDeque};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use iwahori::admissible::{admissible_set, admissible_set_j};
use iwahori::classes::SigmaEngine;
use iwahori::frobenius::FrobeniusTwist;
use iwahori::mazur;
use iwahori::rootdata::{BasedRootDatum, LatticeChoice};
use iwahori::weyl::{IwahoriWeylElement as El, IwahoriWeylGroup};

use oracle::{dominance_leq, straight_classes, Alcoves, OracleClass, TwistOracle};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn group(t: &str, lattice: LatticeChoice) -> Arc<IwahoriWeylGroup> {
    Arc::new(IwahoriWeylGroup::new(BasedRootDatum::new(t.parse().unwrap(), lattice).unwrap()).unwrap())
}

fn lattice_name(l: &LatticeChoice) -> &'static str {
    match l {
        LatticeChoice::SimplyConnected => "sc",
        LatticeChoice::Adjoint => "adj",
        _ => "int",
    }
}

fn data(types: &[&str]) -> Vec<(String, Arc<IwahoriWeylGroup>)> {
    let mut out = Vec::new();
    for t in types {
        for l in [LatticeChoice::SimplyConnected, LatticeChoice::Adjoint] {
            out.push((format!("{t} {}", lattice_name(&l)), group(t, l)));
        }
    }
    out
}

struct Case {
    name: String,
    engine: SigmaEngine,
}

impl Case {
    fn twist(&self) -> &Arc<FrobeniusTwist> {
        self.engine.twist()
    }

    fn group(&self) -> &Arc<IwahoriWeylGroup> {
        self.twist().group()
    }
}

/// Data A1, A2, B2 in both lattices with the trivial twist, the A2 diagram
/// swap and the adjoint A1 twist by the nontrivial length-zero element.
fn twist_cases() -> Vec<Case> {
    let mut out = Vec::new();
    for (name, g) in data(&["A1", "A2", "B2"]) {
        let rank = g.datum().rank();
        let mut push = |label: &str, sigma0: Vec<usize>, tau: El| {
            let twist = FrobeniusTwist::new(g.clone(), sigma0, tau).unwrap();
            out.push(Case {
                name: format!("{name} {label}"),
                engine: SigmaEngine::new(Arc::new(twist)),
            });
        };
        push("trivial", (0..rank).collect(), g.identity());
        if name.starts_with("A2") {
            push("swap", vec![1, 0], g.identity());
        }
        if name == "A1 adj" {
            push("tau", vec![0], g.omega()[1].clone());
        }
    }
    out
}

fn check(failures: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok && failures.len() < 20 {
        failures.push(msg());
    }
}

fn verdict(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let (mut elements, mut pairs) = (0usize, 0usize);
    for (name, g) in data(&["A1", "A2", "B2", "A1xA1"]) {
        let mut al = Alcoves::new(g.clone());
        al.ensure(6);
        let ball = al.ball(6);
        let lib: HashSet<El> = g.elements_up_to(6).into_iter().collect();
        check(&mut failures, lib == ball.iter().cloned().collect(), || format!("{name}: ball differs"));
        for x in &ball {
            check(&mut failures, g.length(x) == al.length(x), || {
                format!("{name}: length({x}) = {} vs {}", g.length(x), al.length(x))
            });
        }
        for y in &ball {
            let below = al.below(y);
            for x in &ball {
                check(&mut failures, g.bruhat_leq(x, y) == below.contains(x), || {
                    format!("{name}: bruhat({x}, {y})")
                });
            }
        }
        elements += ball.len();
        pairs += ball.len() * ball.len();
    }
    verdict(failures, format!("{elements} elements, {pairs} Bruhat pairs"))
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for (name, g) in data(&["A1", "A2", "B2"]) {
        let engine = SigmaEngine::new(Arc::new(FrobeniusTwist::trivial(g.clone())));
        let grid = mazur::mu_grid(&engine);
        let mut al = Alcoves::new(g.clone());
        for (a, mu) in grid.iter().enumerate() {
            for mu2 in &grid[a..] {
                let sum: Vec<i64> = mu.iter().zip(mu2.iter()).map(|(x, y)| x + y).collect();
                let lhs_a = al.adm(mu);
                let lhs_b = al.adm(mu2);
                let rhs = al.adm(&sum);
                let product: HashSet<El> =
                    lhs_a.iter().flat_map(|x| lhs_b.iter().map(|y| g.multiply(x, y))).collect();
                check(&mut failures, product == rhs, || {
                    format!("{name}: Adm({mu:?})Adm({mu2:?}) has {} elements, Adm(sum) {}", product.len(), rhs.len())
                });
                for (m, oracle) in [(&mu[..], &lhs_a), (&mu2[..], &lhs_b), (&sum[..], &rhs)] {
                    let lib = admissible_set(&g, m).unwrap();
                    check(&mut failures, lib.as_set() == oracle, || format!("{name}: library Adm({m:?}) differs"));
                }
                count += 1;
            }
        }
    }
    verdict(failures, format!("{count} (mu, mu') pairs"))
}

fn sigma_image(case: &Case, j: &[usize]) -> Vec<usize> {
    let g = case.group();
    let mut out: Vec<usize> = j
        .iter()
        .map(|&s| {
            let img = case.twist().apply_sigma(g.simple(s));
            (0..g.simple_reflections().len()).find(|&t| *g.simple(t) == img).unwrap()
        })
        .collect();
    out.sort_unstable();
    out
}

fn adm_j_bound(al: &Alcoves, mu_len: usize, j: &[usize]) -> usize {
    let longest = al.parabolic(j).iter().map(|u| al.length(u)).max().unwrap_or(0);
    mu_len + 2 * longest
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for case in twist_cases() {
        let g = case.group();
        let mut al = Alcoves::new(g.clone());
        al.ensure(4);
        for mu in mazur::mu_grid(&case.engine) {
            let adm = al.adm(&mu);
            let mu_len = al.locate(&g.translation(&mu));
            for j in mazur::stable_subsets(&case.engine) {
                check(&mut failures, sigma_image(&case, &j) == j, || format!("{}: J={j:?} not stable", case.name));
                al.ensure(adm_j_bound(&al, mu_len, &j) + 1);
                let adm_j = al.saturate(&adm, &j);
                let lib = admissible_set_j(g, &mu, &j).unwrap();
                check(&mut failures, *lib.as_set() == adm_j, || format!("{}: Adm^J({mu:?}), J={j:?}", case.name));
                let left: HashSet<&El> = adm.iter().filter(|x| al.is_min_left_rep(x, &j)).collect();
                let right: HashSet<&El> = adm_j.iter().filter(|x| al.is_min_left_rep(x, &j)).collect();
                check(&mut failures, left == right, || {
                    format!("{}: mu={mu:?} J={j:?}: {} vs {} coset minima", case.name, left.len(), right.len())
                });
                count += 1;
            }
        }
    }
    verdict(failures, format!("{count} (case, mu, J) triples"))
}

fn lib_matches(case: &Case, classes: &[OracleClass], max: usize) -> Result<(), String> {
    let lib = case.engine.enumerate_straight_classes(max).map_err(|e| e.to_string())?;
    if lib.len() != classes.len() {
        return Err(format!("{}: {} library classes vs {}", case.name, lib.len(), classes.len()));
    }
    for (c, o) in lib.iter().zip(classes) {
        let mut reps = c.min_reps.clone();
        reps.sort();
        if reps != o.min || c.newton != o.newton {
            return Err(format!("{}: class {} differs", case.name, o.min[0]));
        }
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut pairs = 0;
    for case in twist_cases() {
        let g = case.group();
        let mut al = Alcoves::new(g.clone());
        al.ensure(6);
        let t = TwistOracle::new(case.twist().clone());
        let classes = straight_classes(&al, &t, 6);
        if let Err(e) = lib_matches(&case, &classes, 6) {
            failures.push(e);
            continue;
        }
        let lib: Vec<_> = classes.iter().map(|o| case.engine.straight_class(&o.min[0]).unwrap()).collect();
        for (a, lo) in classes.iter().enumerate() {
            for (b, hi) in classes.iter().enumerate() {
                let invariants = lo.kappa == hi.kappa && dominance_leq(g, &lo.newton, &hi.newton);
                let bruhat = hi.min.iter().any(|w| lo.min.iter().any(|x| al.leq(x, w)));
                let library = case.engine.preceq_classes(&lib[a], &lib[b]);
                check(&mut failures, library == invariants && bruhat == invariants, || {
                    format!(
                        "{}: {} vs {}: library {library}, invariants {invariants}, subwords {bruhat}",
                        case.name, lo.min[0], hi.min[0]
                    )
                });
                pairs += 1;
            }
        }
    }
    verdict(failures, format!("{pairs} class pairs"))
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for case in twist_cases() {
        let g = case.group();
        let mut al = Alcoves::new(g.clone());
        al.ensure(4);
        let t = TwistOracle::new(case.twist().clone());
        let grid = mazur::mu_grid(&case.engine);
        let subsets = mazur::stable_subsets(&case.engine);
        let mut jobs = Vec::new();
        let mut bound = 0;
        for mu in &grid {
            let adm = al.adm(mu);
            let mu_len = al.locate(&g.translation(mu));
            for j in &subsets {
                let b = adm_j_bound(&al, mu_len, j);
                al.ensure(b + 1);
                let adm_j = al.saturate(&adm, j);
                bound = bound.max(adm_j.iter().map(|x| al.length(x)).max().unwrap_or(0));
                jobs.push((mu.clone(), j.clone(), adm_j));
            }
        }
        let classes = straight_classes(&al, &t, bound);
        for (mu, j, adm_j) in jobs {
            let kappa = t.kappa(&al, &g.translation(&mu));
            let diamond = t.mu_diamond(&mu);
            let acceptable: HashSet<&El> = classes
                .iter()
                .filter(|o| o.kappa == kappa && dominance_leq(g, &o.newton, &diamond))
                .map(|o| &o.min[0])
                .collect();
            let nonempty: HashSet<&El> =
                classes.iter().filter(|o| o.min.iter().any(|x| adm_j.contains(x))).map(|o| &o.min[0]).collect();
            check(&mut failures, nonempty == acceptable, || {
                format!("{}: mu={mu:?} J={j:?}: oracle sides differ", case.name)
            });
            let lib_b = mazur::b_g_mu(&case.engine, &mu).unwrap();
            let lib_keys = lib_b.keys();
            check(&mut failures, lib_keys.iter().collect::<HashSet<_>>() == acceptable, || {
                format!("{}: mu={mu:?}: library B(G, mu) has {} classes, oracle {}", case.name, lib_keys.len(), acceptable.len())
            });
            let mut lib_nonempty = HashSet::new();
            for o in &classes {
                let c = case.engine.straight_class(&o.min[0]).unwrap();
                if mazur::x_mu_b_nonempty(&case.engine, &mu, &j, &c).unwrap() {
                    lib_nonempty.insert(&o.min[0]);
                }
            }
            check(&mut failures, lib_nonempty == lib_keys.iter().collect(), || {
                format!("{}: mu={mu:?} J={j:?}: library sides differ", case.name)
            });
            count += 1;
        }
    }

    let g = group("A1", LatticeChoice::SimplyConnected);
    let engine = SigmaEngine::new(Arc::new(FrobeniusTwist::trivial(g.clone())));
    let coroot = g.datum().simple_coroots()[0].to_vec();
    let lib = mazur::b_g_mu(&engine, &coroot).unwrap().classes.len();
    let mut al = Alcoves::new(g.clone());
    let bound = al.locate(&g.translation(&coroot));
    let t = TwistOracle::new(engine.twist().clone());
    let kappa = t.kappa(&al, &g.translation(&coroot));
    let diamond = t.mu_diamond(&coroot);
    let exhaustive = straight_classes(&al, &t, bound)
        .iter()
        .filter(|o| o.kappa == kappa && dominance_leq(&g, &o.newton, &diamond))
        .count();
    check(&mut failures, lib == 2 && exhaustive == 2, || {
        format!("|B(G, coroot)| for A1: library {lib}, enumeration {exhaustive}")
    });
    verdict(failures, format!("{count} (case, mu, J) triples, |B(G, coroot)| = {lib} for A1"))
}

/// Orbit of `x` under length-preserving simple sigma-conjugation and
/// conjugation by `Omega`.
fn tilde_orbit(al: &Alcoves, t: &TwistOracle, x: &El) -> Vec<El> {
    let g = &al.g;
    let len = al.length(x);
    let mut seen = HashSet::from([x.clone()]);
    let mut queue = VecDeque::from([x.clone()]);
    while let Some(y) = queue.pop_front() {
        let moves = (0..g.simple_reflections().len())
            .map(|s| t.conj(g.simple(s), &y))
            .filter(|z| al.length(z) == len)
            .chain(g.omega().iter().map(|o| t.conj(o, &y)));
        for z in moves.collect::<Vec<_>>() {
            if seen.insert(z.clone()) {
                queue.push_back(z);
            }
        }
    }
    let mut v: Vec<El> = seen.into_iter().collect();
    v.sort();
    v
}

/// Elements of the class of `start` reachable by simple sigma-conjugation
/// and `Omega` without leaving the ball of radius `radius`.
fn bounded_class(al: &Alcoves, t: &TwistOracle, start: &[El], radius: usize) -> HashSet<El> {
    let g = &al.g;
    let mut seen: HashSet<El> = start.iter().cloned().collect();
    let mut queue: VecDeque<El> = start.iter().cloned().collect();
    while let Some(y) = queue.pop_front() {
        let moves: Vec<El> = (0..g.simple_reflections().len())
            .map(|s| t.conj(g.simple(s), &y))
            .chain(g.omega().iter().map(|o| t.conj(o, &y)))
            .collect();
        for z in moves {
            if al.length(&z) <= radius && seen.insert(z.clone()) {
                queue.push_back(z);
            }
        }
    }
    seen
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let (mut reduced, mut straight) = (0, 0);
    for case in twist_cases() {
        let g = case.group();
        let mut al = Alcoves::new(g.clone());
        al.ensure(13);
        let t = TwistOracle::new(case.twist().clone());
        let probes = al.ball(3);
        let simple_set: Vec<El> = (0..g.simple_reflections().len()).map(|s| g.simple(s).clone()).collect();

        for w in al.ball(6) {
            let red = match case.engine.reduce_to_minimal(&w) {
                Ok(r) => r,
                Err(e) => {
                    failures.push(format!("{}: reduce {w}: {e}", case.name));
                    continue;
                }
            };
            let mut cur = w.clone();
            for step in &red.path {
                let next = t.conj(g.simple(step.s), &cur);
                check(&mut failures, next == step.result && al.length(&next) <= al.length(&cur), || {
                    format!("{}: bad reduction step from {cur}", case.name)
                });
                cur = step.result.clone();
            }
            let m = red.minimal;
            check(&mut failures, cur == m, || format!("{}: path of {w} does not end at the minimum", case.name));
            let lm = al.length(&m);
            check(&mut failures, probes.iter().all(|u| al.length(&t.conj(u, &m)) >= lm), || {
                format!("{}: {m} has a shorter conjugate", case.name)
            });
            match case.engine.straight_decomposition(&m) {
                Err(e) => failures.push(format!("{}: decomposition of {m}: {e}", case.name)),
                Ok(dec) => {
                    let mut cur = m.clone();
                    for step in &dec.chain {
                        let next = t.conj(g.simple(step.s), &cur);
                        check(&mut failures, next == step.result && al.length(&next) == lm, || {
                            format!("{}: chain from {m} changes length", case.name)
                        });
                        cur = next;
                    }
                    let sj = sigma_image(&case, &dec.j);
                    let jset: Vec<&El> = dec.j.iter().map(|&s| &simple_set[s]).collect();
                    let normalizes = sj.iter().all(|&s| {
                        let c = g.multiply(&g.multiply(&dec.x, &simple_set[s]), &g.inverse(&dec.x));
                        jset.contains(&&c)
                    });
                    let ok = cur == dec.element
                        && g.multiply(&dec.u, &dec.x) == dec.element
                        && al.parabolic(&dec.j).contains(&dec.u)
                        && t.straight(&al, &dec.x)
                        && al.is_min_left_rep(&dec.x, &dec.j)
                        && al.is_min_right_rep(&dec.x, &sj)
                        && normalizes;
                    check(&mut failures, ok, || format!("{}: decomposition of {m} is invalid", case.name));
                }
            }
            reduced += 1;
        }

        let classes = straight_classes(&al, &t, 6);
        if let Err(e) = lib_matches(&case, &classes, 6) {
            failures.push(e);
        }
        for o in &classes {
            let orbit = tilde_orbit(&al, &t, &o.min[0]);
            check(&mut failures, orbit == o.min, || {
                format!("{}: O_min of {} is not one orbit", case.name, o.min[0])
            });
            let members = bounded_class(&al, &t, &o.min, 8);
            let upper: Vec<&El> = members.iter().filter(|y| al.length(y) <= 6 && !o.min.contains(y)).collect();
            for y in upper {
                check(&mut failures, al.length(y) > o.min_length, || format!("{}: {y} shorter than O_min", case.name));
                check(&mut failures, o.min.iter().any(|x| al.leq(x, y)), || {
                    format!("{}: {y} is Bruhat-minimal outside O_min", case.name)
                });
            }
            straight += 1;
        }
    }
    verdict(failures, format!("{reduced} reductions, {straight} straight classes"))
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for case in twist_cases() {
        let g = case.group();
        let mut al = Alcoves::new(g.clone());
        let t = TwistOracle::new(case.twist().clone());
        for mu in mazur::mu_grid(&case.engine) {
            let top = g.translation(&mu);
            al.locate(&top);
            let kappa = t.kappa(&al, &top);
            let diamond = t.mu_diamond(&mu);
            let adm = al.adm(&mu);
            for w in &adm {
                let nu = t.newton(w);
                check(&mut failures, dominance_leq(g, &nu, &diamond), || {
                    format!("{}: newton({w}) = {nu} exceeds {diamond}", case.name)
                });
                check(&mut failures, t.kappa(&al, w) == kappa, || format!("{}: kappa({w})", case.name));
                check(&mut failures, case.engine.newton_point(w) == nu, || {
                    format!("{}: library newton({w}) differs", case.name)
                });
                count += 1;
            }
            let report = mazur::verify_mazur_iwahori(&case.engine, &mu).unwrap();
            check(&mut failures, report.passed(), || format!("{}: library report fails for {mu:?}", case.name));
        }
    }
    verdict(failures, format!("{count} admissible elements"))
}

fn run_check(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_iwahori"))
        .args(args)
        .env_remove("IWAHORI_CACHE_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {}", out.status));
    }
    Ok(out.stdout)
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cache = dir.path().to_str().unwrap();
    let first = run_check(&["check", "all"])?;
    let runs = [
        run_check(&["check", "all"])?,
        run_check(&["--jobs", "1", "check", "all"])?,
        run_check(&["--cache-dir", cache, "check", "all"])?,
        run_check(&["--cache-dir", cache, "check", "all"])?,
    ];
    let mut failures = Vec::new();
    for (i, r) in runs.iter().enumerate() {
        check(&mut failures, *r == first, || format!("run {} differs from the first", i + 2));
    }
    let json: serde_json::Value = serde_json::from_slice(&first).map_err(|e| e.to_string())?;
    let failed = json["summary"]["failed"].as_u64();
    check(&mut failures, failed == Some(0), || format!("check all reports {failed:?} failures"));
    verdict(failures, format!("5 runs, {} bytes each", first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("length and Bruhat order against alcove BFS and subwords", criterion_1),
        ("Adm(mu) Adm(mu') = Adm(mu + mu')", criterion_2),
        ("coset minima of Adm^J(mu) and Adm(mu) agree", criterion_3),
        ("class order equals kappa and Newton dominance", criterion_4),
        ("nonemptiness pattern equals B(G, mu)", criterion_5),
        ("reduction, straight decomposition, minimal elements", criterion_6),
        ("Mazur inequality on Adm(mu)", criterion_7),
        ("check all is deterministic", criterion_8),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}; {secs:.1}s)", i + 1),
            Err(detail) => {
                all = false;
                println!("criterion {}: FAIL  {name} ({detail}; {secs:.1}s)", i + 1);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
