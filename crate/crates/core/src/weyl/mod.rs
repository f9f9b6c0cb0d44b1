//! The Iwahori-Weyl group `W~ = X_* x| W_0 = W_a x| Omega`.
//!
//! Elements are canonical pairs `t^lambda w`; words are derived data and
//! never part of an element's identity. The affine simple reflection of each
//! irreducible component is `s_0 = t^{theta^vee} s_theta`, which makes the
//! base alcove `{0 < <v, alpha> < 1 : alpha > 0}`.

pub mod finite;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use dashmap::DashMap;
use serde_json::{json, Value};

pub use finite::{FiniteWeylElement, FiniteWeylGroup};

use crate::error::{Error, Result};
use crate::rootdata::{dot, BasedRootDatum, LatticeVec, Pi1Class, RationalCoweight};

/// `t^translation * finite`. The derived order (translation, then finite
/// index) is the fixed total order used for canonical representatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IwahoriWeylElement {
    translation: LatticeVec,
    finite: FiniteWeylElement,
}

impl IwahoriWeylElement {
    pub fn new(translation: LatticeVec, finite: FiniteWeylElement) -> Self {
        IwahoriWeylElement { translation, finite }
    }

    pub fn translation(&self) -> &LatticeVec {
        &self.translation
    }

    pub fn finite(&self) -> FiniteWeylElement {
        self.finite
    }

    pub fn is_translation(&self) -> bool {
        self.finite == FiniteWeylElement::IDENTITY
    }
}

impl fmt::Display for IwahoriWeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^{:?}*w{}", self.translation.as_slice(), self.finite.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimpleKind {
    /// `s_i` for simple root `i`.
    Finite(usize),
    /// `s_0` of the given irreducible component.
    Affine(usize),
}

/// `S~`: the finite simple reflections `0..rank` followed by one affine
/// reflection per irreducible component.
#[derive(Debug)]
pub struct SimpleReflectionSet {
    kinds: Vec<SimpleKind>,
    elements: Vec<IwahoriWeylElement>,
    lookup: HashMap<IwahoriWeylElement, usize>,
    components: Vec<Vec<usize>>,
}

impl SimpleReflectionSet {
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn element(&self, s: usize) -> &IwahoriWeylElement {
        &self.elements[s]
    }

    pub fn kind(&self, s: usize) -> SimpleKind {
        self.kinds[s]
    }

    pub fn index_of(&self, x: &IwahoriWeylElement) -> Option<usize> {
        self.lookup.get(x).copied()
    }

    /// External label: finite node `i` is `i + 1`, the affine node of
    /// component `k` is `-k` (so `0` for the first component).
    pub fn label(&self, s: usize) -> i64 {
        match self.kinds[s] {
            SimpleKind::Finite(i) => i as i64 + 1,
            SimpleKind::Affine(k) => -(k as i64),
        }
    }

    pub fn from_label(&self, label: i64) -> Option<usize> {
        (0..self.len()).find(|&s| self.label(s) == label)
    }

    /// Indices of `S~` belonging to each irreducible component.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn finite_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&s| matches!(self.kinds[s], SimpleKind::Finite(_)))
    }
}

#[derive(Debug)]
pub struct IwahoriWeylGroup {
    datum: BasedRootDatum,
    w0: FiniteWeylGroup,
    simple: SimpleReflectionSet,
    omega: Vec<IwahoriWeylElement>,
    omega_by_class: HashMap<Pi1Class, usize>,
    bruhat_memo: DashMap<(IwahoriWeylElement, IwahoriWeylElement), bool>,
    layers: RwLock<Vec<Arc<[IwahoriWeylElement]>>>,
}

impl IwahoriWeylGroup {
    pub fn new(datum: BasedRootDatum) -> Result<Self> {
        let w0 = FiniteWeylGroup::new(&datum)?;
        let r = datum.rank();

        let mut kinds: Vec<SimpleKind> = (0..r).map(SimpleKind::Finite).collect();
        let mut elements: Vec<IwahoriWeylElement> = (0..r)
            .map(|i| IwahoriWeylElement::new(LatticeVec::from_elem(0, datum.dim()), w0.simple(i)))
            .collect();
        let mut components: Vec<Vec<usize>> = datum.components().to_vec();
        for (k, &h) in datum.highest_roots().iter().enumerate() {
            let theta = &datum.positive_roots()[h];
            let n = datum.dim();
            let mut m = vec![0i64; n * n];
            for row in 0..n {
                for col in 0..n {
                    m[row * n + col] = i64::from(row == col) - theta.coroot[row] * theta.root[col];
                }
            }
            let s_theta = w0
                .from_matrix(&m)
                .ok_or_else(|| Error::Invariant("highest root reflection missing from W_0".into()))?;
            kinds.push(SimpleKind::Affine(k));
            elements.push(IwahoriWeylElement::new(theta.coroot.clone(), s_theta));
            components[k].push(r + k);
        }
        let lookup = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let simple = SimpleReflectionSet {
            kinds,
            elements,
            lookup,
            components,
        };

        let mut group = IwahoriWeylGroup {
            datum,
            w0,
            simple,
            omega: Vec::new(),
            omega_by_class: HashMap::new(),
            bruhat_memo: DashMap::new(),
            layers: RwLock::new(Vec::new()),
        };
        group.omega = group.find_length_zero()?;
        group.omega_by_class = group
            .omega
            .iter()
            .enumerate()
            .map(|(i, w)| (group.datum.fundamental_group().class_of(&w.translation), i))
            .collect();
        if group.omega_by_class.len() != group.omega.len() {
            return Err(Error::Invariant("two length-zero elements share a pi_1 class".into()));
        }
        Ok(group)
    }

    /// All length-zero elements. Such `t^lambda w` force `<lambda, alpha>`
    /// into `{0, 1}` for every positive root, so `lambda` is zero or a sum of
    /// minuscule fundamental coweights, one per component at most.
    fn find_length_zero(&self) -> Result<Vec<IwahoriWeylElement>> {
        let d = &self.datum;
        let mut choices: Vec<Vec<Option<usize>>> = Vec::new();
        for &h in d.highest_roots() {
            let theta = &d.positive_roots()[h];
            let mut opts = vec![None];
            opts.extend(
                theta
                    .simple_coords
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m == 1)
                    .map(|(i, _)| Some(i)),
            );
            choices.push(opts);
        }
        let mut out = Vec::new();
        let mut pick = vec![0usize; choices.len()];
        loop {
            let mut p = vec![0i64; d.rank()];
            for (k, &c) in pick.iter().enumerate() {
                if let Some(i) = choices[k][c] {
                    p[i] = 1;
                }
            }
            if let Some(lambda) = d.from_fundamental_coordinates(&p) {
                for w in self.w0.elements() {
                    let x = IwahoriWeylElement::new(lambda.clone(), w);
                    if self.length(&x) == 0 {
                        out.push(x);
                    }
                }
            }
            // odometer over the per-component choices
            let mut k = 0;
            loop {
                if k == pick.len() {
                    out.sort();
                    let identity = self.identity();
                    let pos = out.iter().position(|x| *x == identity).expect("identity has length 0");
                    out.swap(0, pos);
                    out[1..].sort();
                    return Ok(out);
                }
                pick[k] += 1;
                if pick[k] < choices[k].len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
        }
    }

    pub fn datum(&self) -> &BasedRootDatum {
        &self.datum
    }

    pub fn finite_weyl_group(&self) -> &FiniteWeylGroup {
        &self.w0
    }

    pub fn simple_reflections(&self) -> &SimpleReflectionSet {
        &self.simple
    }

    pub fn simple(&self, s: usize) -> &IwahoriWeylElement {
        self.simple.element(s)
    }

    /// `Omega`, identity first, the rest in canonical order.
    pub fn omega(&self) -> &[IwahoriWeylElement] {
        &self.omega
    }

    pub fn identity(&self) -> IwahoriWeylElement {
        IwahoriWeylElement::new(LatticeVec::from_elem(0, self.datum.dim()), FiniteWeylElement::IDENTITY)
    }

    pub fn translation(&self, lambda: &[i64]) -> IwahoriWeylElement {
        IwahoriWeylElement::new(LatticeVec::from_slice(lambda), FiniteWeylElement::IDENTITY)
    }

    pub fn finite_element(&self, w: FiniteWeylElement) -> IwahoriWeylElement {
        IwahoriWeylElement::new(LatticeVec::from_elem(0, self.datum.dim()), w)
    }

    /// Rejects elements built for a different datum.
    pub fn check(&self, x: &IwahoriWeylElement) -> Result<()> {
        if x.translation.len() != self.datum.dim() || x.finite.index() >= self.w0.order() {
            return Err(Error::DatumMismatch);
        }
        Ok(())
    }

    pub fn multiply(&self, x: &IwahoriWeylElement, y: &IwahoriWeylElement) -> IwahoriWeylElement {
        let moved = self.w0.act(x.finite, &y.translation);
        IwahoriWeylElement {
            translation: x.translation.iter().zip(&moved).map(|(a, b)| a + b).collect(),
            finite: self.w0.multiply(x.finite, y.finite),
        }
    }

    pub fn try_multiply(&self, x: &IwahoriWeylElement, y: &IwahoriWeylElement) -> Result<IwahoriWeylElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.multiply(x, y))
    }

    pub fn inverse(&self, x: &IwahoriWeylElement) -> IwahoriWeylElement {
        let winv = self.w0.inverse(x.finite);
        let moved = self.w0.act(winv, &x.translation);
        IwahoriWeylElement {
            translation: moved.iter().map(|a| -a).collect(),
            finite: winv,
        }
    }

    pub fn try_inverse(&self, x: &IwahoriWeylElement) -> Result<IwahoriWeylElement> {
        self.check(x)?;
        Ok(self.inverse(x))
    }

    /// `x y x^{-1}`.
    pub fn conjugate(&self, x: &IwahoriWeylElement, y: &IwahoriWeylElement) -> IwahoriWeylElement {
        self.multiply(&self.multiply(x, y), &self.inverse(x))
    }

    pub fn power(&self, x: &IwahoriWeylElement, n: usize) -> IwahoriWeylElement {
        (0..n).fold(self.identity(), |acc, _| self.multiply(&acc, x))
    }

    /// Number of affine root hyperplanes separating the base alcove from
    /// its image: `sum_{alpha>0} |<lambda, alpha> - [w^{-1} alpha < 0]|`.
    pub fn length(&self, x: &IwahoriWeylElement) -> usize {
        let negated = self.w0.inverse_negation_row(x.finite);
        self.datum
            .positive_roots()
            .iter()
            .zip(negated)
            .map(|(a, &neg)| {
                let p = dot(&x.translation, &a.root);
                (if neg { p - 1 } else { p }).unsigned_abs() as usize
            })
            .sum()
    }

    /// Class of `x` in `pi_1(G) = W~ / W_a`.
    pub fn pi1_class(&self, x: &IwahoriWeylElement) -> Pi1Class {
        self.datum.fundamental_group().class_of(&x.translation)
    }

    /// Index into [`Self::omega`] of the `Omega`-component of `x`.
    pub fn omega_index(&self, x: &IwahoriWeylElement) -> usize {
        self.omega_by_class[&self.pi1_class(x)]
    }

    pub fn omega_component(&self, x: &IwahoriWeylElement) -> &IwahoriWeylElement {
        &self.omega[self.omega_index(x)]
    }

    pub fn same_omega_coset(&self, x: &IwahoriWeylElement, y: &IwahoriWeylElement) -> bool {
        self.pi1_class(x) == self.pi1_class(y)
    }

    pub fn is_left_descent(&self, x: &IwahoriWeylElement, s: usize) -> bool {
        self.length(&self.multiply(self.simple(s), x)) < self.length(x)
    }

    pub fn is_right_descent(&self, x: &IwahoriWeylElement, s: usize) -> bool {
        self.length(&self.multiply(x, self.simple(s))) < self.length(x)
    }

    pub fn descent(&self, x: &IwahoriWeylElement, s: usize, side: Side) -> bool {
        match side {
            Side::Left => self.is_left_descent(x, s),
            Side::Right => self.is_right_descent(x, s),
        }
    }

    /// `x = s_{i_1} .. s_{i_k} * omega` with `k = length(x)`; letters are
    /// indices into `S~`, chosen greedily as the first left descent.
    pub fn reduced_word(&self, x: &IwahoriWeylElement) -> (Vec<usize>, IwahoriWeylElement) {
        let mut word = Vec::new();
        let mut cur = x.clone();
        let mut len = self.length(&cur);
        while len > 0 {
            let (s, next) = (0..self.simple.len())
                .map(|s| (s, self.multiply(self.simple(s), &cur)))
                .find(|(_, y)| self.length(y) < len)
                .expect("positive length element has a left descent");
            word.push(s);
            cur = next;
            len -= 1;
        }
        (word, cur)
    }

    pub fn from_word(&self, word: &[usize], omega: &IwahoriWeylElement) -> IwahoriWeylElement {
        let prod = word
            .iter()
            .fold(self.identity(), |acc, &s| self.multiply(&acc, self.simple(s)));
        self.multiply(&prod, omega)
    }

    /// Bruhat order via the lifting property: with `s` a left descent of
    /// `y`, `x <= y` iff `min(x, sx) <= sy`. Memoised per pair.
    pub fn bruhat_leq(&self, x: &IwahoriWeylElement, y: &IwahoriWeylElement) -> bool {
        if !self.same_omega_coset(x, y) {
            return false;
        }
        self.bruhat_leq_in_coset(x, y, self.length(x), self.length(y))
    }

    fn bruhat_leq_in_coset(&self, x: &IwahoriWeylElement, y: &IwahoriWeylElement, lx: usize, ly: usize) -> bool {
        if lx > ly {
            return false;
        }
        if lx == ly {
            return x == y;
        }
        if lx == 0 {
            // the unique length-zero element of the coset is its minimum
            return true;
        }
        let key = (x.clone(), y.clone());
        if let Some(v) = self.bruhat_memo.get(&key) {
            return *v;
        }
        let (s, sy) = (0..self.simple.len())
            .map(|s| (s, self.multiply(self.simple(s), y)))
            .find(|(_, sy)| self.length(sy) < ly)
            .expect("positive length element has a left descent");
        let sx = self.multiply(self.simple(s), x);
        let lsx = self.length(&sx);
        let result = if lsx < lx {
            self.bruhat_leq_in_coset(&sx, &sy, lsx, ly - 1)
        } else {
            self.bruhat_leq_in_coset(x, &sy, lx, ly - 1)
        };
        self.bruhat_memo.insert(key, result);
        result
    }

    /// Elements of length exactly `k`, sorted.
    pub fn layer(&self, k: usize) -> Arc<[IwahoriWeylElement]> {
        if let Some(l) = self.layers.read().expect("layer lock").get(k) {
            return Arc::clone(l);
        }
        let mut layers = self.layers.write().expect("layer lock");
        while layers.len() <= k {
            let next: Arc<[IwahoriWeylElement]> = match layers.last() {
                None => self.omega.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
                Some(prev) => {
                    let target = layers.len();
                    let mut found = HashSet::new();
                    for x in prev.iter() {
                        for s in 0..self.simple.len() {
                            let y = self.multiply(self.simple(s), x);
                            if self.length(&y) == target {
                                found.insert(y);
                            }
                        }
                    }
                    let mut v: Vec<_> = found.into_iter().collect();
                    v.sort();
                    v.into()
                }
            };
            layers.push(next);
        }
        Arc::clone(&layers[k])
    }

    /// All layers `0..=max_len`.
    pub fn layers(&self, max_len: usize) -> Vec<Arc<[IwahoriWeylElement]>> {
        (0..=max_len).map(|k| self.layer(k)).collect()
    }

    /// Breadth-first stream of all elements of length at most `max_len`,
    /// ordered by length and then canonically.
    pub fn enumerate_by_length(&self, max_len: usize) -> ElementStream<'_> {
        ElementStream {
            group: self,
            max_len,
            level: 0,
            pos: 0,
            current: None,
        }
    }

    pub fn elements_up_to(&self, max_len: usize) -> Vec<IwahoriWeylElement> {
        self.enumerate_by_length(max_len).collect()
    }

    pub fn cached_layer_count(&self) -> usize {
        self.layers.read().expect("layer lock").len()
    }

    /// Installs externally stored layers after checking that they are
    /// consistent with this group. Returns whether they were accepted.
    pub fn seed_layers(&self, layers: Vec<Vec<IwahoriWeylElement>>) -> bool {
        if layers.is_empty() {
            return false;
        }
        let mut zero = self.omega.clone();
        zero.sort();
        if layers[0] != zero {
            return false;
        }
        for (k, layer) in layers.iter().enumerate() {
            if layer.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            if layer.iter().any(|x| self.check(x).is_err() || self.length(x) != k) {
                return false;
            }
        }
        let mut current = self.layers.write().expect("layer lock");
        if layers.len() > current.len() {
            *current = layers.into_iter().map(Into::into).collect();
        }
        true
    }

    pub fn validate_subset(&self, j: &[usize]) -> Result<()> {
        if let Some(&bad) = j.iter().find(|&&s| s >= self.simple.len()) {
            return Err(Error::config("J", format!("no simple reflection with index {bad}")));
        }
        Ok(())
    }

    /// `W_J` is finite iff `J` misses at least one node of every affine
    /// component diagram.
    pub fn is_finite_parabolic(&self, j: &[usize]) -> bool {
        self.simple
            .components()
            .iter()
            .all(|nodes| !nodes.iter().all(|s| j.contains(s)))
    }

    fn require_finite(&self, j: &[usize]) -> Result<()> {
        self.validate_subset(j)?;
        if !self.is_finite_parabolic(j) {
            return Err(Error::InfiniteParabolic(j.to_vec()));
        }
        Ok(())
    }

    /// All elements of the finite parabolic subgroup `W_J`, sorted.
    pub fn parabolic_elements(&self, j: &[usize]) -> Result<Vec<IwahoriWeylElement>> {
        self.require_finite(j)?;
        let mut seen: BTreeSet<IwahoriWeylElement> = BTreeSet::new();
        let mut frontier = vec![self.identity()];
        seen.insert(self.identity());
        while let Some(x) = frontier.pop() {
            for &s in j {
                let y = self.multiply(&x, self.simple(s));
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// `min(W_{J_left} x W_{J_right})`, reached by stripping descents.
    pub fn coset_minimum(
        &self,
        x: &IwahoriWeylElement,
        j_left: &[usize],
        j_right: &[usize],
    ) -> Result<IwahoriWeylElement> {
        self.require_finite(j_left)?;
        self.require_finite(j_right)?;
        Ok(self.coset_extremum(x, j_left, j_right, true))
    }

    /// `max(W_{J_left} x W_{J_right})`.
    pub fn coset_maximum(
        &self,
        x: &IwahoriWeylElement,
        j_left: &[usize],
        j_right: &[usize],
    ) -> Result<IwahoriWeylElement> {
        self.require_finite(j_left)?;
        self.require_finite(j_right)?;
        Ok(self.coset_extremum(x, j_left, j_right, false))
    }

    pub(crate) fn coset_extremum(
        &self,
        x: &IwahoriWeylElement,
        j_left: &[usize],
        j_right: &[usize],
        minimum: bool,
    ) -> IwahoriWeylElement {
        let better = |new: usize, old: usize| if minimum { new < old } else { new > old };
        let mut cur = x.clone();
        let mut len = self.length(&cur);
        'outer: loop {
            for &s in j_left {
                let y = self.multiply(self.simple(s), &cur);
                let ly = self.length(&y);
                if better(ly, len) {
                    cur = y;
                    len = ly;
                    continue 'outer;
                }
            }
            for &s in j_right {
                let y = self.multiply(&cur, self.simple(s));
                let ly = self.length(&y);
                if better(ly, len) {
                    cur = y;
                    len = ly;
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    /// `x` is of minimal length in `W_J x`.
    pub fn is_min_coset_rep(&self, x: &IwahoriWeylElement, j: &[usize]) -> bool {
        j.iter().all(|&s| !self.is_left_descent(x, s))
    }

    pub fn is_min_right_coset_rep(&self, x: &IwahoriWeylElement, j: &[usize]) -> bool {
        j.iter().all(|&s| !self.is_right_descent(x, s))
    }

    /// Dominant representative of `nu` with a minimal-length witness `x`,
    /// `x(nu)` dominant.
    pub fn dominant_representative(&self, nu: &RationalCoweight) -> (RationalCoweight, FiniteWeylElement) {
        let (dominant, word) = self.datum.dominant_representative(nu);
        (dominant, self.w0.from_word(&word))
    }

    /// Distinct points of the `W_0`-orbit of a cocharacter, sorted.
    pub fn orbit(&self, lambda: &[i64]) -> Vec<LatticeVec> {
        let mut seen: BTreeSet<LatticeVec> = BTreeSet::new();
        let mut frontier = vec![LatticeVec::from_slice(lambda)];
        seen.insert(LatticeVec::from_slice(lambda));
        while let Some(v) = frontier.pop() {
            for i in 0..self.datum.rank() {
                let u = self.datum.reflect(i, &v);
                if seen.insert(u.clone()) {
                    frontier.push(u);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// JSON record of an element: translation, finite word, affine reduced
    /// word (external labels), `Omega` index and length.
    pub fn element_json(&self, x: &IwahoriWeylElement) -> Value {
        let (word, _) = self.reduced_word(x);
        json!({
            "lambda": x.translation.as_slice(),
            "w": self.w0.word(x.finite).iter().map(|i| i + 1).collect::<Vec<_>>(),
            "word": word.iter().map(|&s| self.simple.label(s)).collect::<Vec<_>>(),
            "omega": self.omega_index(x),
            "length": word.len(),
        })
    }

    /// Compact human-readable form, e.g. `s0 s1 * w1`.
    pub fn describe(&self, x: &IwahoriWeylElement) -> String {
        let (word, _) = self.reduced_word(x);
        let omega = self.omega_index(x);
        let mut s = if word.is_empty() {
            "e".to_string()
        } else {
            word.iter()
                .map(|&l| format!("s{}", self.simple.label(l)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        if omega != 0 {
            s.push_str(&format!(" * w{omega}"));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Single-consumer stream produced by
/// [`IwahoriWeylGroup::enumerate_by_length`].
pub struct ElementStream<'a> {
    group: &'a IwahoriWeylGroup,
    max_len: usize,
    level: usize,
    pos: usize,
    current: Option<Arc<[IwahoriWeylElement]>>,
}

impl Iterator for ElementStream<'_> {
    type Item = IwahoriWeylElement;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.level > self.max_len {
                return None;
            }
            let layer = self
                .current
                .get_or_insert_with(|| self.group.layer(self.level));
            if let Some(x) = layer.get(self.pos) {
                self.pos += 1;
                return Some(x.clone());
            }
            self.level += 1;
            self.pos = 0;
            self.current = None;
        }
    }
}
