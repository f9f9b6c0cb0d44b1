//! Admissible sets `Adm(mu)` and `Adm^J(mu)`, and the set identities
//! relating them.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frobenius::FrobeniusTwist;
use crate::report::Report;
use crate::rootdata::LatticeVec;
use crate::weyl::{IwahoriWeylElement, IwahoriWeylGroup};

#[derive(Debug, Clone)]
pub struct AdmissibleSet {
    pub mu: LatticeVec,
    pub j: Vec<usize>,
    /// Ordered by length, then canonically.
    pub elements: Vec<IwahoriWeylElement>,
    /// The Bruhat-maximal elements, canonically ordered.
    pub generators: Vec<IwahoriWeylElement>,
    index: HashSet<IwahoriWeylElement>,
}

impl AdmissibleSet {
    fn build(
        group: &IwahoriWeylGroup,
        mu: &[i64],
        j: &[usize],
        elements: impl IntoIterator<Item = IwahoriWeylElement>,
        generators: Vec<IwahoriWeylElement>,
    ) -> Self {
        let mut elements: Vec<_> = elements.into_iter().map(|x| (group.length(&x), x)).collect();
        elements.sort();
        elements.dedup();
        let elements: Vec<_> = elements.into_iter().map(|(_, x)| x).collect();
        let mut generators = generators;
        generators.sort();
        generators.dedup();
        AdmissibleSet {
            mu: LatticeVec::from_slice(mu),
            j: j.to_vec(),
            index: elements.iter().cloned().collect(),
            elements,
            generators,
        }
    }

    pub fn contains(&self, x: &IwahoriWeylElement) -> bool {
        self.index.contains(x)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn as_set(&self) -> &HashSet<IwahoriWeylElement> {
        &self.index
    }

    /// Rows `(lambda, word, length)` in the set order.
    pub fn to_json(&self, group: &IwahoriWeylGroup) -> Value {
        json!({
            "mu": self.mu.as_slice(),
            "J": self.j.iter().map(|&s| group.simple_reflections().label(s)).collect::<Vec<_>>(),
            "size": self.elements.len(),
            "generators": self.generators.iter().map(|x| group.element_json(x)).collect::<Vec<_>>(),
            "elements": self.elements.iter().map(|x| group.element_json(x)).collect::<Vec<_>>(),
        })
    }
}

fn require_dominant(group: &IwahoriWeylGroup, mu: &[i64]) -> Result<()> {
    let d = group.datum();
    if mu.len() != d.dim() {
        return Err(Error::config("mu", format!("expected {} coordinates, got {}", d.dim(), mu.len())));
    }
    if !d.is_dominant_integral(mu) {
        return Err(Error::NotDominant(format!("{mu:?}")));
    }
    Ok(())
}

/// Every element covered by a member is a member. Covers of `y` are the
/// length `l(y) - 1` elements obtained by deleting one letter of a fixed
/// reduced word.
pub fn verify_closed(group: &IwahoriWeylGroup, set: &HashSet<IwahoriWeylElement>) -> Result<()> {
    let bad = set.par_iter().find_map_any(|y| {
        let (word, omega) = group.reduced_word(y);
        (0..word.len()).find_map(|i| {
            let mut sub = word.clone();
            sub.remove(i);
            let x = group.from_word(&sub, &omega);
            (group.length(&x) + 1 == word.len() && !set.contains(&x)).then(|| (x, y.clone()))
        })
    });
    match bad {
        Some((x, y)) => Err(Error::Invariant(format!(
            "{} lies below {} but is missing",
            group.describe(&x),
            group.describe(&y)
        ))),
        None => Ok(()),
    }
}

/// `Adm(mu)`: all `w <= t^{x(mu)}` for some `x in W_0`.
pub fn admissible_set(group: &IwahoriWeylGroup, mu: &[i64]) -> Result<AdmissibleSet> {
    require_dominant(group, mu)?;
    let generators: Vec<IwahoriWeylElement> = group.orbit(mu).iter().map(|l| group.translation(l)).collect();
    let top = group.length(&generators[0]);
    let coset = group.pi1_class(&generators[0]);
    let candidates: Vec<IwahoriWeylElement> = group
        .enumerate_by_length(top)
        .filter(|x| group.pi1_class(x) == coset)
        .collect();
    let elements: Vec<IwahoriWeylElement> = candidates
        .into_par_iter()
        .filter(|x| generators.iter().any(|t| group.bruhat_leq(x, t)))
        .collect();
    let set = AdmissibleSet::build(group, mu, &[], elements, generators);
    verify_closed(group, set.as_set())?;
    Ok(set)
}

/// `Adm^J(mu) = W_J Adm(mu) W_J`, with closure checked.
pub fn admissible_set_j(group: &IwahoriWeylGroup, mu: &[i64], j: &[usize]) -> Result<AdmissibleSet> {
    let base = admissible_set(group, mu)?;
    let mut j = j.to_vec();
    j.sort_unstable();
    j.dedup();
    if j.is_empty() {
        return Ok(base);
    }
    let wj = group.parabolic_elements(&j)?;
    let saturated: BTreeSet<IwahoriWeylElement> = base
        .elements
        .par_iter()
        .flat_map_iter(|x| {
            wj.iter()
                .flat_map(|u| wj.iter().map(move |v| group.multiply(&group.multiply(u, x), v)))
                .collect::<Vec<_>>()
        })
        .collect();
    let generators: Vec<IwahoriWeylElement> = base
        .generators
        .iter()
        .map(|t| group.coset_maximum(t, &j, &j))
        .collect::<Result<_>>()?;
    let set = AdmissibleSet::build(group, mu, &j, saturated, generators);
    verify_closed(group, set.as_set())?;
    Ok(set)
}

fn elements_json(group: &IwahoriWeylGroup, xs: &[IwahoriWeylElement]) -> Vec<Value> {
    xs.iter().map(|x| group.element_json(x)).collect()
}

fn set_diff(
    report: &mut Report,
    group: &IwahoriWeylGroup,
    left: &HashSet<IwahoriWeylElement>,
    right: &HashSet<IwahoriWeylElement>,
) {
    let mut only_left: Vec<_> = left.difference(right).cloned().collect();
    let mut only_right: Vec<_> = right.difference(left).cloned().collect();
    only_left.sort();
    only_right.sort();
    for x in only_left {
        report.mismatch(json!({"side": "left", "element": group.element_json(&x)}));
    }
    for x in only_right {
        report.mismatch(json!({"side": "right", "element": group.element_json(&x)}));
    }
}

/// `Adm(mu) Adm(mu') = Adm(mu + mu')`.
pub fn check_additivity(group: &IwahoriWeylGroup, mu: &[i64], mu2: &[i64]) -> Result<Report> {
    let a = admissible_set(group, mu)?;
    let b = admissible_set(group, mu2)?;
    let sum: Vec<i64> = mu.iter().zip(mu2).map(|(x, y)| x + y).collect();
    let c = admissible_set(group, &sum)?;
    let products: HashSet<IwahoriWeylElement> = a
        .elements
        .par_iter()
        .flat_map_iter(|x| b.elements.iter().map(|y| group.multiply(x, y)).collect::<Vec<_>>())
        .collect();
    let mut report = Report::new(
        "additivity",
        json!({"datum": group.datum().cartan_type().to_string(), "mu": mu, "mu2": mu2}),
    );
    report.witness(json!({
        "adm_mu": a.len(),
        "adm_mu2": b.len(),
        "product": products.len(),
        "adm_sum": c.len(),
    }));
    set_diff(&mut report, group, &products, c.as_set());
    Ok(report)
}

/// `^J W~ cap Adm^J(mu) = ^J W~ cap Adm(mu)`.
pub fn check_compatibility(group: &IwahoriWeylGroup, mu: &[i64], j: &[usize]) -> Result<Report> {
    let adm = admissible_set(group, mu)?;
    let adm_j = admissible_set_j(group, mu, j)?;
    let filter = |s: &AdmissibleSet| -> HashSet<IwahoriWeylElement> {
        s.elements.iter().filter(|x| group.is_min_coset_rep(x, j)).cloned().collect()
    };
    let left = filter(&adm_j);
    let right = filter(&adm);
    let mut report = Report::new(
        "compatibility",
        json!({
            "datum": group.datum().cartan_type().to_string(),
            "mu": mu,
            "J": j.iter().map(|&s| group.simple_reflections().label(s)).collect::<Vec<_>>(),
        }),
    );
    let mut reps: Vec<_> = right.iter().cloned().collect();
    reps.sort();
    report.witness(json!({
        "adm": adm.len(),
        "adm_J": adm_j.len(),
        "min_reps": elements_json(group, &reps),
    }));
    set_diff(&mut report, group, &left, &right);
    Ok(report)
}

/// `sigma(Adm(mu)) = Adm(sigma_0(mu))`.
pub fn check_sigma_image(twist: &FrobeniusTwist, mu: &[i64]) -> Result<Report> {
    let group = twist.group();
    let adm = admissible_set(group, mu)?;
    let image: HashSet<IwahoriWeylElement> = adm.elements.iter().map(|x| twist.apply_sigma(x)).collect();
    let target_mu = twist.apply_sigma0_lattice(mu);
    let target = admissible_set(group, &target_mu)?;
    let mut report = Report::new(
        "sigma_image",
        json!({
            "datum": group.datum().cartan_type().to_string(),
            "twist": twist.describe(),
            "mu": mu,
        }),
    );
    report.witness(json!({"adm": adm.len(), "sigma0_mu": target_mu.as_slice()}));
    set_diff(&mut report, group, &image, target.as_set());
    Ok(report)
}
