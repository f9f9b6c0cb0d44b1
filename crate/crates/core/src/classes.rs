//! Sigma-conjugacy on `W~`: the reduction `->_sigma`, Newton points,
//! straight elements and classes, the map `Psi` and the partial order
//! `preceq_sigma` on straight classes.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frobenius::FrobeniusTwist;
use crate::rootdata::{rational::rat, Pi1Class, RationalCoweight};
use crate::weyl::{IwahoriWeylElement, IwahoriWeylGroup};

pub const DEFAULT_PLATEAU_CAP: usize = 200_000;

/// A sigma-conjugacy class, represented by minimal length elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaClass {
    /// For straight classes this is all of `O_min`; otherwise the
    /// tilde-orbit of one minimal element.
    pub min_reps: Vec<IwahoriWeylElement>,
    pub newton: RationalCoweight,
    pub kappa: Pi1Class,
    pub straight: bool,
    pub min_length: usize,
}

impl SigmaClass {
    /// Canonical representative: least element of `min_reps`.
    pub fn key(&self) -> &IwahoriWeylElement {
        &self.min_reps[0]
    }

    pub fn invariants(&self) -> (&RationalCoweight, &Pi1Class) {
        (&self.newton, &self.kappa)
    }

    pub fn label(&self) -> String {
        format!("nu={} kappa={}", self.newton, self.kappa)
    }
}

/// One move `w -> s w sigma(s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaStep {
    pub s: usize,
    pub result: IwahoriWeylElement,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub minimal: IwahoriWeylElement,
    pub path: Vec<SigmaStep>,
}

/// `element = u x` with `x` straight, `x in ^J W~^{sigma(J)}`,
/// `x sigma(J) x^{-1} = J` and `u in W_J`; `chain` leads from the input
/// to `element` through length-preserving moves.
#[derive(Debug, Clone)]
pub struct StraightDecomposition {
    pub chain: Vec<SigmaStep>,
    pub element: IwahoriWeylElement,
    pub j: Vec<usize>,
    pub x: IwahoriWeylElement,
    pub u: IwahoriWeylElement,
}

struct Plateau {
    order: Vec<IwahoriWeylElement>,
    parent: HashMap<IwahoriWeylElement, (IwahoriWeylElement, usize)>,
}

impl Plateau {
    fn chain_to(&self, x: &IwahoriWeylElement) -> Vec<SigmaStep> {
        let mut chain = Vec::new();
        let mut cur = x.clone();
        while let Some((prev, s)) = self.parent.get(&cur) {
            chain.push(SigmaStep { s: *s, result: cur.clone() });
            cur = prev.clone();
        }
        chain.reverse();
        chain
    }
}

/// Class computations for one twist, with caches shared across threads.
#[derive(Debug)]
pub struct SigmaEngine {
    twist: Arc<FrobeniusTwist>,
    plateau_cap: usize,
    /// Subsets of `S~` with finite `W_J`, by size then lexicographically.
    finite_subsets: Vec<Vec<usize>>,
    newton_cache: DashMap<IwahoriWeylElement, RationalCoweight>,
    straight_classes: DashMap<IwahoriWeylElement, Arc<SigmaClass>>,
}

impl SigmaEngine {
    pub fn new(twist: Arc<FrobeniusTwist>) -> Self {
        Self::with_plateau_cap(twist, DEFAULT_PLATEAU_CAP)
    }

    pub fn with_plateau_cap(twist: Arc<FrobeniusTwist>, plateau_cap: usize) -> Self {
        let g = twist.group();
        let n = g.simple_reflections().len();
        let mut finite_subsets: Vec<Vec<usize>> = (0u32..1 << n)
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>())
            .filter(|j| g.is_finite_parabolic(j))
            .collect();
        finite_subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        SigmaEngine {
            twist,
            plateau_cap,
            finite_subsets,
            newton_cache: DashMap::new(),
            straight_classes: DashMap::new(),
        }
    }

    pub fn twist(&self) -> &Arc<FrobeniusTwist> {
        &self.twist
    }

    pub fn group(&self) -> &IwahoriWeylGroup {
        self.twist.group()
    }

    /// Subsets `J` of `S~` with `W_J` finite, smallest first.
    pub fn finite_subsets(&self) -> &[Vec<usize>] {
        &self.finite_subsets
    }

    /// `(s w sigma(s), length did not go up)`.
    pub fn sigma_step(&self, w: &IwahoriWeylElement, s: usize) -> (IwahoriWeylElement, bool) {
        let g = self.group();
        let y = g.multiply(&g.multiply(g.simple(s), w), g.simple(self.twist.sigma_simple(s)));
        let down = g.length(&y) <= g.length(w);
        (y, down)
    }

    /// Breadth-first exploration of the length-preserving moves from
    /// `start`, stopping at the first element accepted by `stop`.
    fn explore_plateau(
        &self,
        start: &IwahoriWeylElement,
        mut stop: impl FnMut(&IwahoriWeylElement) -> bool,
    ) -> Result<(Plateau, Option<IwahoriWeylElement>)> {
        let g = self.group();
        let len = g.length(start);
        let mut plateau = Plateau {
            order: vec![start.clone()],
            parent: HashMap::new(),
        };
        let mut seen: HashSet<IwahoriWeylElement> = HashSet::from([start.clone()]);
        let mut head = 0;
        while head < plateau.order.len() {
            let x = plateau.order[head].clone();
            head += 1;
            if stop(&x) {
                return Ok((plateau, Some(x)));
            }
            for s in 0..g.simple_reflections().len() {
                let (y, _) = self.sigma_step(&x, s);
                if g.length(&y) == len && seen.insert(y.clone()) {
                    if seen.len() > self.plateau_cap {
                        return Err(Error::PlateauCapExceeded(self.plateau_cap));
                    }
                    plateau.parent.insert(y.clone(), (x.clone(), s));
                    plateau.order.push(y);
                }
            }
        }
        Ok((plateau, None))
    }

    fn strict_descent(&self, w: &IwahoriWeylElement) -> Option<SigmaStep> {
        let len = self.group().length(w);
        (0..self.group().simple_reflections().len()).find_map(|s| {
            let (y, _) = self.sigma_step(w, s);
            (self.group().length(&y) < len).then_some(SigmaStep { s, result: y })
        })
    }

    /// Walks `w ->_sigma w_min`: greedy strict descents, and a search of the
    /// current plateau whenever no descent is available directly.
    pub fn reduce_to_minimal(&self, w: &IwahoriWeylElement) -> Result<Reduction> {
        let mut cur = w.clone();
        let mut path = Vec::new();
        loop {
            if let Some(step) = self.strict_descent(&cur) {
                cur = step.result.clone();
                path.push(step);
                continue;
            }
            let (plateau, found) = self.explore_plateau(&cur, |x| self.strict_descent(x).is_some())?;
            match found {
                Some(x) => {
                    path.extend(plateau.chain_to(&x));
                    let step = self.strict_descent(&x).expect("found by search");
                    cur = step.result.clone();
                    path.push(step);
                }
                None => return Ok(Reduction { minimal: cur, path }),
            }
        }
    }

    /// The `approx_sigma` orbit of `w`: length-preserving simple moves.
    pub fn plateau(&self, w: &IwahoriWeylElement) -> Result<Vec<IwahoriWeylElement>> {
        let (p, _) = self.explore_plateau(w, |_| false)?;
        let mut v = p.order;
        v.sort();
        Ok(v)
    }

    /// The `tilde-approx_sigma` orbit of `w`: length-preserving simple moves
    /// together with `w -> omega w sigma(omega)^{-1}` for `omega in Omega`.
    pub fn tilde_orbit(&self, w: &IwahoriWeylElement) -> Result<Vec<IwahoriWeylElement>> {
        let g = self.group();
        let len = g.length(w);
        let mut seen: HashSet<IwahoriWeylElement> = HashSet::from([w.clone()]);
        let mut queue = VecDeque::from([w.clone()]);
        while let Some(x) = queue.pop_front() {
            let simple = (0..g.simple_reflections().len()).map(|s| self.sigma_step(&x, s).0);
            let twisted = g.omega().iter().map(|o| self.twist.sigma_conjugate(o, &x));
            for y in simple.chain(twisted) {
                if g.length(&y) == len && seen.insert(y.clone()) {
                    if seen.len() > self.plateau_cap {
                        return Err(Error::PlateauCapExceeded(self.plateau_cap));
                    }
                    queue.push_back(y);
                }
            }
        }
        let mut v: Vec<_> = seen.into_iter().collect();
        v.sort();
        Ok(v)
    }

    /// `nu-bar_{w, sigma}`: with `y = w sigma(w) .. sigma^{n-1}(w)` for `n`
    /// the order of `sigma` and `m` the order of the finite part of `y`,
    /// `y^m = t^lambda` and the Newton point is the dominant
    /// representative of `lambda / (n m)`.
    pub fn newton_point(&self, w: &IwahoriWeylElement) -> RationalCoweight {
        if let Some(v) = self.newton_cache.get(w) {
            return v.clone();
        }
        let (lambda, denom) = self.translation_power(w);
        let nu = RationalCoweight::from_integral(&lambda).scale(&BigRational::new(BigInt::from(1), BigInt::from(denom)));
        let (dominant, _) = self.group().dominant_representative(&nu);
        self.newton_cache.insert(w.clone(), dominant.clone());
        dominant
    }

    /// `(lambda, k)` with `(w sigma)^k = t^lambda`.
    pub fn translation_power(&self, w: &IwahoriWeylElement) -> (Vec<i64>, i64) {
        let g = self.group();
        let n = self.twist.order();
        let mut y = w.clone();
        let mut cur = w.clone();
        for _ in 1..n {
            cur = self.twist.apply_sigma(&cur);
            y = g.multiply(&y, &cur);
        }
        let m = g.finite_weyl_group().element_order(y.finite());
        let power = g.power(&y, m);
        debug_assert!(power.is_translation());
        (power.translation().to_vec(), (n * m) as i64)
    }

    pub fn is_straight(&self, w: &IwahoriWeylElement) -> bool {
        let nu = self.newton_point(w);
        self.group().datum().rho_pairing(&nu) == rat(self.group().length(w) as i64)
    }

    /// Straightness through `length((w sigma)^k) = k length(w)`.
    pub fn is_straight_by_powers(&self, w: &IwahoriWeylElement) -> bool {
        let g = self.group();
        let (lambda, k) = self.translation_power(w);
        g.length(&g.translation(&lambda)) as i64 == k * g.length(w) as i64
    }

    fn decompose_at(&self, y: &IwahoriWeylElement) -> Option<(Vec<usize>, IwahoriWeylElement, IwahoriWeylElement)> {
        let g = self.group();
        for j in &self.finite_subsets {
            let x = g.coset_extremum(y, j, &[], true);
            let sj = self.twist.sigma_subset(j);
            if !g.is_min_right_coset_rep(&x, &sj) {
                continue;
            }
            let xinv = g.inverse(&x);
            let mut conj: Vec<usize> = Vec::with_capacity(sj.len());
            let mut ok = true;
            for &s in &sj {
                match g.simple_reflections().index_of(&g.multiply(&g.multiply(&x, g.simple(s)), &xinv)) {
                    Some(t) if j.contains(&t) => conj.push(t),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok || !self.is_straight(&x) {
                continue;
            }
            let u = g.multiply(y, &xinv);
            return Some((j.clone(), x, u));
        }
        None
    }

    /// Decomposition `u x` of `w_min` or of an element reached from it by
    /// length-preserving moves.
    pub fn straight_decomposition(&self, w_min: &IwahoriWeylElement) -> Result<StraightDecomposition> {
        let mut found = None;
        let (plateau, at) = self.explore_plateau(w_min, |y| {
            found = self.decompose_at(y);
            found.is_some()
        })?;
        match (at, found) {
            (Some(y), Some((j, x, u))) => Ok(StraightDecomposition {
                chain: plateau.chain_to(&y),
                element: y,
                j,
                x,
                u,
            }),
            _ => Err(Error::Invariant(format!(
                "no straight decomposition near {}",
                self.group().describe(w_min)
            ))),
        }
    }

    /// The straight class containing the straight element `x`.
    pub fn straight_class(&self, x: &IwahoriWeylElement) -> Result<Arc<SigmaClass>> {
        if let Some(c) = self.straight_classes.get(x) {
            return Ok(Arc::clone(&c));
        }
        if !self.is_straight(x) {
            return Err(Error::Invariant(format!("{} is not straight", self.group().describe(x))));
        }
        let orbit = self.tilde_orbit(x)?;
        let class = Arc::new(SigmaClass {
            newton: self.newton_point(x),
            kappa: self.twist.kottwitz_kappa(x),
            straight: true,
            min_length: self.group().length(x),
            min_reps: orbit,
        });
        for y in &class.min_reps {
            self.straight_classes.insert(y.clone(), Arc::clone(&class));
        }
        Ok(class)
    }

    /// The class of `w`, described by the orbit of one of its minimal
    /// elements.
    pub fn class_of(&self, w: &IwahoriWeylElement) -> Result<SigmaClass> {
        let red = self.reduce_to_minimal(w)?;
        if self.is_straight(&red.minimal) {
            return Ok((*self.straight_class(&red.minimal)?).clone());
        }
        Ok(SigmaClass {
            newton: self.newton_point(&red.minimal),
            kappa: self.twist.kottwitz_kappa(&red.minimal),
            straight: false,
            min_length: self.group().length(&red.minimal),
            min_reps: self.tilde_orbit(&red.minimal)?,
        })
    }

    /// `Psi(w)`: the straight class of the straight part of a minimal
    /// element of the class of `w`.
    pub fn psi(&self, w: &IwahoriWeylElement) -> Result<Arc<SigmaClass>> {
        let red = self.reduce_to_minimal(w)?;
        let dec = self.straight_decomposition(&red.minimal)?;
        self.straight_class(&dec.x)
    }

    /// All straight classes with minimal length at most `max_len`, one per
    /// `(nu, kappa)`, ordered by minimal length and canonical key.
    pub fn enumerate_straight_classes(&self, max_len: usize) -> Result<Vec<Arc<SigmaClass>>> {
        let g = self.group();
        let mut classes: BTreeMap<(usize, IwahoriWeylElement), Arc<SigmaClass>> = BTreeMap::new();
        let mut invariants: HashSet<(RationalCoweight, Pi1Class)> = HashSet::new();
        let mut covered: HashSet<IwahoriWeylElement> = HashSet::new();
        for k in 0..=max_len {
            let layer = g.layer(k);
            let straight: Vec<IwahoriWeylElement> =
                layer.par_iter().filter(|x| self.is_straight(x)).cloned().collect();
            for x in straight {
                if covered.contains(&x) {
                    continue;
                }
                let class = self.straight_class(&x)?;
                covered.extend(class.min_reps.iter().cloned());
                if invariants.insert((class.newton.clone(), class.kappa.clone())) {
                    classes.insert((class.min_length, class.key().clone()), class);
                }
            }
        }
        Ok(classes.into_values().collect())
    }

    /// `O preceq_sigma w`: some minimal element of the straight class `O`
    /// lies Bruhat below `w`.
    pub fn preceq_element(&self, class: &SigmaClass, w: &IwahoriWeylElement) -> bool {
        let g = self.group();
        let lw = g.length(w);
        class
            .min_reps
            .iter()
            .any(|x| g.length(x) <= lw && g.bruhat_leq(x, w))
    }

    /// `O preceq_sigma O'`: `O preceq_sigma w` for some `w` in `O'_min`.
    pub fn preceq_classes(&self, lower: &SigmaClass, upper: &SigmaClass) -> bool {
        upper.min_reps.iter().any(|w| self.preceq_element(lower, w))
    }

    pub fn straight_poset(&self, max_len: usize) -> Result<StraightPoset> {
        let classes = self.enumerate_straight_classes(max_len)?;
        let n = classes.len();
        let relation: Vec<Vec<bool>> = (0..n)
            .into_par_iter()
            .map(|a| (0..n).map(|b| self.preceq_classes(&classes[a], &classes[b])).collect())
            .collect();
        let mut hasse = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b
                    && relation[a][b]
                    && !(0..n).any(|c| c != a && c != b && relation[a][c] && relation[c][b])
                {
                    hasse.push((a, b));
                }
            }
        }
        Ok(StraightPoset {
            classes,
            relation,
            hasse,
        })
    }

    /// Invariants and canonical representative only.
    pub fn class_summary(&self, class: &SigmaClass) -> Value {
        json!({
            "newton": class.newton,
            "kappa": class.kappa,
            "min_length": class.min_length,
            "key": self.group().describe(class.key()),
        })
    }

    pub fn class_json(&self, class: &SigmaClass) -> Value {
        let g = self.group();
        json!({
            "newton": class.newton,
            "kappa": class.kappa,
            "straight": class.straight,
            "min_length": class.min_length,
            "key": g.element_json(class.key()),
            "min_reps": class.min_reps.iter().map(|x| g.element_json(x)).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct StraightPoset {
    pub classes: Vec<Arc<SigmaClass>>,
    /// `relation[a][b]` iff `classes[a] preceq classes[b]`.
    pub relation: Vec<Vec<bool>>,
    pub hasse: Vec<(usize, usize)>,
}

impl StraightPoset {
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph straight_classes {\n  rankdir=BT;\n");
        for (i, c) in self.classes.iter().enumerate() {
            let _ = writeln!(out, "  c{i} [label=\"{} l={}\"];", c.label(), c.min_length);
        }
        for (a, b) in &self.hasse {
            let _ = writeln!(out, "  c{a} -> c{b};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self, engine: &SigmaEngine) -> Value {
        json!({
            "classes": self.classes.iter().map(|c| engine.class_json(c)).collect::<Vec<_>>(),
            "hasse": self.hasse.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        })
    }
}
