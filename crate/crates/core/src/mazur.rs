//! `B(G, mu)`, the non-emptiness predicate for `X(mu, b)_J`, and the
//! verifiers tying admissible sets to straight classes.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::admissible::{admissible_set, admissible_set_j, AdmissibleSet};
use crate::classes::{SigmaClass, SigmaEngine};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::rootdata::{LatticeVec, Pi1Class, RationalCoweight};
use crate::weyl::IwahoriWeylElement;

/// Straight classes `O` with `kappa(O) = mu^sharp` and `nu_O <= mu^diamond`.
#[derive(Debug, Clone)]
pub struct AcceptableSet {
    pub mu: LatticeVec,
    pub mu_diamond: RationalCoweight,
    pub mu_sharp: Pi1Class,
    pub classes: Vec<Arc<SigmaClass>>,
    /// The unique dominance-maximal Newton point, if there is one.
    pub maximal_newton: Option<RationalCoweight>,
}

impl AcceptableSet {
    pub fn keys(&self) -> HashSet<IwahoriWeylElement> {
        self.classes.iter().map(|c| c.key().clone()).collect()
    }
}

pub fn context(engine: &SigmaEngine) -> Value {
    let d = engine.group().datum();
    json!({
        "datum": d.cartan_type().to_string(),
        "lattice": d.lattice_choice(),
        "twist": engine.twist().describe(),
    })
}

fn with_context(engine: &SigmaEngine, extra: Value) -> Value {
    let mut v = context(engine);
    if let (Some(obj), Value::Object(extra)) = (v.as_object_mut(), extra) {
        obj.extend(extra);
    }
    v
}

fn labels(engine: &SigmaEngine, j: &[usize]) -> Vec<i64> {
    j.iter().map(|&s| engine.group().simple_reflections().label(s)).collect()
}

fn floor_to_usize(x: &BigRational) -> usize {
    x.floor().to_integer().to_usize().unwrap_or(0)
}

/// Unique maximum of a family of dominant coweights under dominance.
fn unique_maximum<'a>(
    engine: &SigmaEngine,
    nus: impl IntoIterator<Item = &'a RationalCoweight> + Clone,
) -> Result<Option<RationalCoweight>> {
    let d = engine.group().datum();
    let mut maxima = Vec::new();
    for a in nus.clone() {
        let mut dominated = true;
        for b in nus.clone() {
            if !d.dominance_leq(b, a)? {
                dominated = false;
                break;
            }
        }
        if dominated {
            maxima.push(a.clone());
        }
    }
    maxima.dedup();
    Ok((maxima.len() == 1).then(|| maxima.remove(0)))
}

pub fn b_g_mu(engine: &SigmaEngine, mu: &[i64]) -> Result<AcceptableSet> {
    let twist = engine.twist();
    let d = engine.group().datum();
    let mu_diamond = twist.mu_diamond(mu)?;
    let mu_sharp = twist.mu_sharp(mu);
    // a straight class has min_length = <nu, 2 rho> <= <mu^diamond, 2 rho>
    let bound = floor_to_usize(&d.rho_pairing(&mu_diamond));
    let mut classes = Vec::new();
    for c in engine.enumerate_straight_classes(bound)? {
        if c.kappa == mu_sharp && d.dominance_leq(&c.newton, &mu_diamond)? {
            classes.push(c);
        }
    }
    let maximal_newton = unique_maximum(engine, classes.iter().map(|c| &c.newton))?;
    Ok(AcceptableSet {
        mu: LatticeVec::from_slice(mu),
        mu_diamond,
        mu_sharp,
        classes,
        maximal_newton,
    })
}

/// `{Psi(w) : w in set}`, canonically ordered.
pub fn psi_image(engine: &SigmaEngine, set: &AdmissibleSet) -> Result<Vec<Arc<SigmaClass>>> {
    let classes: Vec<Arc<SigmaClass>> = set
        .elements
        .par_iter()
        .map(|w| engine.psi(w))
        .collect::<Result<_>>()?;
    let mut by_key: BTreeMap<(usize, IwahoriWeylElement), Arc<SigmaClass>> = BTreeMap::new();
    for c in classes {
        by_key.entry((c.min_length, c.key().clone())).or_insert(c);
    }
    Ok(by_key.into_values().collect())
}

/// `O preceq_sigma g` for some generator `g` of `Adm^J(mu)`.
pub fn nonempty_via_generators(engine: &SigmaEngine, set: &AdmissibleSet, class: &SigmaClass) -> bool {
    if class.kappa != engine.twist().mu_sharp(&set.mu) {
        return false;
    }
    set.generators.iter().any(|g| engine.preceq_element(class, g))
}

pub fn nonempty_via_psi(engine: &SigmaEngine, set: &AdmissibleSet, class: &SigmaClass) -> Result<bool> {
    Ok(psi_image(engine, set)?.iter().any(|c| c.key() == class.key()))
}

/// Whether `X(mu, b)_J` is nonempty for `[b]` the straight class `class`.
pub fn x_mu_b_nonempty(engine: &SigmaEngine, mu: &[i64], j: &[usize], class: &SigmaClass) -> Result<bool> {
    validate_j(engine, j)?;
    let set = admissible_set_j(engine.group(), mu, j)?;
    Ok(nonempty_via_generators(engine, &set, class))
}

pub fn validate_j(engine: &SigmaEngine, j: &[usize]) -> Result<()> {
    let g = engine.group();
    g.validate_subset(j)?;
    if !g.is_finite_parabolic(j) {
        return Err(Error::InfiniteParabolic(j.to_vec()));
    }
    if !engine.twist().is_sigma_stable(j) {
        return Err(Error::config("J", format!("{:?} is not sigma-stable", labels(engine, j))));
    }
    Ok(())
}

/// Sigma-stable `J` with `W_J` finite, smallest first.
pub fn stable_subsets(engine: &SigmaEngine) -> Vec<Vec<usize>> {
    engine
        .finite_subsets()
        .iter()
        .filter(|j| engine.twist().is_sigma_stable(j))
        .cloned()
        .collect()
}

fn class_diff(
    engine: &SigmaEngine,
    report: &mut Report,
    what: &str,
    left: &[Arc<SigmaClass>],
    right: &[Arc<SigmaClass>],
) {
    let lk: HashSet<_> = left.iter().map(|c| c.key().clone()).collect();
    let rk: HashSet<_> = right.iter().map(|c| c.key().clone()).collect();
    for c in left.iter().filter(|c| !rk.contains(c.key())) {
        report.mismatch(json!({"check": what, "side": "left", "class": engine.class_summary(c)}));
    }
    for c in right.iter().filter(|c| !lk.contains(c.key())) {
        report.mismatch(json!({"check": what, "side": "right", "class": engine.class_summary(c)}));
    }
}

/// `{O : X(mu, b)_J nonempty} = B(G, mu)`, with both forms of the
/// non-emptiness predicate required to agree.
pub fn verify_nonemptiness(engine: &SigmaEngine, mu: &[i64], j: &[usize]) -> Result<Report> {
    validate_j(engine, j)?;
    let g = engine.group();
    let set = admissible_set_j(g, mu, j)?;
    let bgmu = b_g_mu(engine, mu)?;
    let via_psi = psi_image(engine, &set)?;
    let bound = set.generators.iter().map(|x| g.length(x)).max().unwrap_or(0);
    let via_generators: Vec<Arc<SigmaClass>> = engine
        .enumerate_straight_classes(bound)?
        .into_iter()
        .filter(|c| nonempty_via_generators(engine, &set, c))
        .collect();

    let mut report = Report::new(
        "nonemptiness",
        with_context(engine, json!({"mu": mu, "J": labels(engine, j)})),
    );
    report.witness(json!({
        "adm_J": set.len(),
        "b_g_mu": bgmu.classes.iter().map(|c| engine.class_summary(c)).collect::<Vec<_>>(),
    }));
    class_diff(engine, &mut report, "psi_image_vs_b_g_mu", &via_psi, &bgmu.classes);
    class_diff(engine, &mut report, "generators_vs_psi_image", &via_generators, &via_psi);
    Ok(report)
}

/// Every `O in B(G, mu)` meets `Adm(mu)`, the maximal Newton point is
/// unique and attained in `Adm(mu)`, and equals `mu^diamond` when `tau = 1`.
pub fn verify_maximal_newton(engine: &SigmaEngine, mu: &[i64]) -> Result<Report> {
    let g = engine.group();
    let adm = admissible_set(g, mu)?;
    let bgmu = b_g_mu(engine, mu)?;
    let mut report = Report::new("maximal_newton", with_context(engine, json!({"mu": mu})));

    // first element of Adm(mu), in set order, lying in each straight class
    let found: Vec<Option<IwahoriWeylElement>> = adm
        .elements
        .par_iter()
        .map(|w| -> Result<Option<IwahoriWeylElement>> {
            let m = engine.reduce_to_minimal(w)?.minimal;
            Ok(engine.is_straight(&m).then(|| engine.straight_class(&m)).transpose()?.map(|c| c.key().clone()))
        })
        .collect::<Result<_>>()?;
    let mut witness: HashMap<IwahoriWeylElement, IwahoriWeylElement> = HashMap::new();
    for (w, key) in adm.elements.iter().zip(found) {
        if let Some(k) = key {
            witness.entry(k).or_insert_with(|| w.clone());
        }
    }
    for c in &bgmu.classes {
        match witness.get(c.key()) {
            Some(w) => report.witness(json!({"class": engine.class_summary(c), "element": g.element_json(w)})),
            None => report.mismatch(json!({"check": "class_meets_adm", "class": engine.class_summary(c)})),
        }
    }

    match &bgmu.maximal_newton {
        None => report.mismatch(json!({"check": "unique_maximal_newton"})),
        Some(max) => {
            match adm.elements.iter().find(|x| engine.newton_point(x) == *max) {
                Some(x) => report.witness(json!({"maximal_newton": max, "element": g.element_json(x)})),
                None => report.mismatch(json!({"check": "maximal_newton_attained", "newton": max})),
            }
            if *engine.twist().tau() == g.identity() && *max != bgmu.mu_diamond {
                report.mismatch(json!({
                    "check": "maximal_newton_is_mu_diamond",
                    "maximal_newton": max,
                    "mu_diamond": bgmu.mu_diamond,
                }));
            }
        }
    }
    Ok(report)
}

/// Every `w in Adm(mu)` has `nu_w <= mu^diamond` and `kappa(w) = mu^sharp`.
pub fn verify_mazur_iwahori(engine: &SigmaEngine, mu: &[i64]) -> Result<Report> {
    let g = engine.group();
    let twist = engine.twist();
    let d = g.datum();
    let adm = admissible_set(g, mu)?;
    let mu_diamond = twist.mu_diamond(mu)?;
    let mu_sharp = twist.mu_sharp(mu);
    let mut report = Report::new("mazur", with_context(engine, json!({"mu": mu})));
    let newton: Vec<RationalCoweight> = adm.elements.par_iter().map(|w| engine.newton_point(w)).collect();
    let mut seen = std::collections::BTreeSet::new();
    for (w, nu) in adm.elements.iter().zip(&newton) {
        let kappa = twist.kottwitz_kappa(w);
        if !d.dominance_leq(nu, &mu_diamond)? || kappa != mu_sharp {
            report.mismatch(json!({"element": g.element_json(w), "newton": nu, "kappa": kappa}));
        }
        seen.insert(nu.to_strings());
    }
    report.witness(json!({
        "adm": adm.len(),
        "mu_diamond": mu_diamond,
        "mu_sharp": mu_sharp,
        "newton_points": seen.into_iter().collect::<Vec<_>>(),
    }));
    Ok(report)
}

/// `O preceq_sigma O'` iff `kappa(O) = kappa(O')` and `nu_O <= nu_O'`,
/// over all straight classes with minimal length at most `max_len`.
pub fn verify_tri_order(engine: &SigmaEngine, max_len: usize) -> Result<Report> {
    let d = engine.group().datum();
    let poset = engine.straight_poset(max_len)?;
    let mut report = Report::new("tri_order", with_context(engine, json!({"length_bound": max_len})));
    let n = poset.classes.len();
    let mut comparable = 0;
    for a in 0..n {
        for b in 0..n {
            let (ca, cb) = (&poset.classes[a], &poset.classes[b]);
            let expected = ca.kappa == cb.kappa && d.dominance_leq(&ca.newton, &cb.newton)?;
            if expected != poset.relation[a][b] {
                report.mismatch(json!({
                    "lower": engine.class_summary(ca),
                    "upper": engine.class_summary(cb),
                    "preceq": poset.relation[a][b],
                    "invariants": expected,
                }));
            }
            comparable += usize::from(expected);
        }
    }
    report.witness(json!({"classes": n, "comparable_pairs": comparable, "hasse_edges": poset.hasse.len()}));
    Ok(report)
}

/// Reduction and decomposition for every element up to `max_len`; in every
/// straight class up to `max_len`, the minimal length elements form one
/// tilde-orbit, and every longer element of the class up to `max_len`
/// lies Bruhat above one of them.
pub fn verify_min_length(engine: &SigmaEngine, max_len: usize) -> Result<Report> {
    let g = engine.group();
    let mut report = Report::new("min_length", with_context(engine, json!({"length_bound": max_len})));
    let elements = g.elements_up_to(max_len);

    let outcomes: Vec<(IwahoriWeylElement, Result<IwahoriWeylElement, String>)> = elements
        .par_iter()
        .map(|w| (w.clone(), check_reduction(engine, w)))
        .collect();
    let mut class_of: HashMap<IwahoriWeylElement, IwahoriWeylElement> = HashMap::new();
    for (w, outcome) in outcomes {
        match outcome {
            Ok(m) => {
                class_of.insert(w, m);
            }
            Err(why) => report.mismatch(json!({"check": "reduction", "element": g.element_json(&w), "reason": why})),
        }
    }

    let classes = engine.enumerate_straight_classes(max_len)?;
    // straight elements grouped by invariants
    let mut by_invariants: HashMap<(RationalCoweight, Pi1Class), Vec<IwahoriWeylElement>> = HashMap::new();
    for w in &elements {
        if engine.is_straight(w) {
            by_invariants
                .entry((engine.newton_point(w), engine.twist().kottwitz_kappa(w)))
                .or_default()
                .push(w.clone());
        }
    }
    for c in &classes {
        let mut expected = by_invariants
            .get(&(c.newton.clone(), c.kappa.clone()))
            .cloned()
            .unwrap_or_default();
        expected.sort();
        if expected != c.min_reps {
            report.mismatch(json!({"check": "single_orbit", "class": engine.class_summary(c)}));
        }
        let keys: HashSet<&IwahoriWeylElement> = c.min_reps.iter().collect();
        for (w, m) in &class_of {
            if keys.contains(m) && g.length(w) > c.min_length && !c.min_reps.iter().any(|x| g.bruhat_leq(x, w)) {
                report.mismatch(json!({
                    "check": "bruhat_minimal_is_minimal_length",
                    "class": engine.class_summary(c),
                    "element": g.element_json(w),
                }));
            }
        }
        report.witness(json!({"class": engine.class_summary(c), "min_reps": c.min_reps.len()}));
    }
    Ok(report)
}

/// Reduces `w`, checks the path and the decomposition, and returns the
/// reached minimal element.
fn check_reduction(engine: &SigmaEngine, w: &IwahoriWeylElement) -> Result<IwahoriWeylElement, String> {
    let g = engine.group();
    let red = engine.reduce_to_minimal(w).map_err(|e| e.to_string())?;
    let mut cur = w.clone();
    for step in &red.path {
        let (next, down) = engine.sigma_step(&cur, step.s);
        if !down || next != step.result {
            return Err("path step is not a reduction".into());
        }
        cur = next;
    }
    if cur != red.minimal {
        return Err("path does not end at the minimal element".into());
    }
    let dec = engine.straight_decomposition(&red.minimal).map_err(|e| e.to_string())?;
    if g.length(&dec.element) != g.length(&red.minimal) {
        return Err("decomposed element has a different length".into());
    }
    if g.multiply(&dec.u, &dec.x) != dec.element {
        return Err("u x differs from the decomposed element".into());
    }
    let wj = g.parabolic_elements(&dec.j).map_err(|e| e.to_string())?;
    if !wj.contains(&dec.u) {
        return Err("u is not in W_J".into());
    }
    let sj = engine.twist().sigma_subset(&dec.j);
    if !engine.is_straight(&dec.x) || !g.is_min_coset_rep(&dec.x, &dec.j) || !g.is_min_right_coset_rep(&dec.x, &sj) {
        return Err("x is not a straight minimal double coset representative".into());
    }
    Ok(red.minimal)
}

/// Dominant `mu` with lattice coordinates in `{0, 1}`.
pub fn mu_grid(engine: &SigmaEngine) -> Vec<LatticeVec> {
    let d = engine.group().datum();
    let n = d.dim();
    (0u32..1 << n)
        .map(|mask| (0..n).map(|i| i64::from(mask & (1 << i) != 0)).collect::<LatticeVec>())
        .filter(|mu| d.is_dominant_integral(mu))
        .collect()
}
