//! Brute-force oracles, deliberately independent of the library's length
//! formula, lifting-based Bruhat order, Smith-form coinvariants and
//! reduction machinery.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use iwahori::frobenius::FrobeniusTwist;
use iwahori::rootdata::RationalCoweight;
use iwahori::weyl::{IwahoriWeylElement as El, IwahoriWeylGroup};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The alcove graph explored breadth first from `Omega` by left
/// multiplication with `S~`. Distances are lengths, BFS paths are reduced
/// words.
pub struct Alcoves {
    pub g: Arc<IwahoriWeylGroup>,
    dist: HashMap<El, usize>,
    /// `x = s_{w[0]} .. s_{w[k-1]} * omega[o]`
    word: HashMap<El, (Vec<usize>, usize)>,
    pub layers: Vec<Vec<El>>,
    below: HashMap<El, Arc<HashSet<El>>>,
}

impl Alcoves {
    pub fn new(g: Arc<IwahoriWeylGroup>) -> Self {
        let mut a = Alcoves {
            g,
            dist: HashMap::new(),
            word: HashMap::new(),
            layers: Vec::new(),
            below: HashMap::new(),
        };
        let zero: Vec<El> = a.g.omega().to_vec();
        for (i, o) in zero.iter().enumerate() {
            a.dist.insert(o.clone(), 0);
            a.word.insert(o.clone(), (Vec::new(), i));
        }
        a.layers.push(zero);
        a
    }

    pub fn ensure(&mut self, max: usize) {
        while self.layers.len() <= max {
            let k = self.layers.len();
            let mut next = Vec::new();
            for x in &self.layers[k - 1] {
                for s in 0..self.g.simple_reflections().len() {
                    let y = self.g.multiply(self.g.simple(s), x);
                    if !self.dist.contains_key(&y) {
                        let (w, o) = &self.word[x];
                        let mut w2 = vec![s];
                        w2.extend_from_slice(w);
                        self.dist.insert(y.clone(), k);
                        self.word.insert(y.clone(), (w2, *o));
                        next.push(y);
                    }
                }
            }
            next.sort();
            self.layers.push(next);
        }
    }

    /// Extends the ball until it contains `x`; returns its length.
    pub fn locate(&mut self, x: &El) -> usize {
        while !self.dist.contains_key(x) {
            self.ensure(self.layers.len());
        }
        self.dist[x]
    }

    pub fn length(&self, x: &El) -> usize {
        *self.dist.get(x).unwrap_or_else(|| panic!("{x} beyond the explored ball"))
    }

    pub fn ball(&self, max: usize) -> Vec<El> {
        self.layers[..=max].iter().flatten().cloned().collect()
    }

    pub fn omega_index(&self, x: &El) -> usize {
        self.word[x].1
    }

    fn eval(&self, w: &[usize], o: usize) -> El {
        let p = w.iter().fold(self.g.identity(), |acc, &s| self.g.multiply(&acc, self.g.simple(s)));
        self.g.multiply(&p, &self.g.omega()[o])
    }

    /// All subwords of the BFS word of `y`.
    pub fn below(&mut self, y: &El) -> Arc<HashSet<El>> {
        if let Some(b) = self.below.get(y) {
            return b.clone();
        }
        let (w, o) = self.word[y].clone();
        let mut out = HashSet::new();
        // prefix products shared across masks via recursion on position
        fn rec(a: &Alcoves, w: &[usize], o: usize, i: usize, acc: El, out: &mut HashSet<El>) {
            if i == w.len() {
                out.insert(a.g.multiply(&acc, &a.g.omega()[o]));
                return;
            }
            rec(a, w, o, i + 1, acc.clone(), out);
            rec(a, w, o, i + 1, a.g.multiply(&acc, a.g.simple(w[i])), out);
        }
        rec(self, &w, o, 0, self.g.identity(), &mut out);
        debug_assert!(out.contains(&self.eval(&w, o)));
        let out = Arc::new(out);
        self.below.insert(y.clone(), out.clone());
        out
    }

    pub fn leq(&mut self, x: &El, y: &El) -> bool {
        self.below(y).contains(x)
    }

    /// Closure of `J` under multiplication.
    pub fn parabolic(&self, j: &[usize]) -> Vec<El> {
        let mut seen: HashSet<El> = HashSet::from([self.g.identity()]);
        let mut queue = VecDeque::from([self.g.identity()]);
        while let Some(x) = queue.pop_front() {
            for &s in j {
                let y = self.g.multiply(&x, self.g.simple(s));
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        let mut v: Vec<El> = seen.into_iter().collect();
        v.sort();
        v
    }

    pub fn is_min_left_rep(&self, x: &El, j: &[usize]) -> bool {
        j.iter().all(|&s| self.length(&self.g.multiply(self.g.simple(s), x)) > self.length(x))
    }

    pub fn is_min_right_rep(&self, x: &El, j: &[usize]) -> bool {
        j.iter().all(|&s| self.length(&self.g.multiply(x, self.g.simple(s))) > self.length(x))
    }

    /// `Adm(mu)` as the union of subword sets of the `W_0`-orbit
    /// translations.
    pub fn adm(&mut self, mu: &[i64]) -> HashSet<El> {
        let mut orbit: HashSet<Vec<i64>> = HashSet::from([mu.to_vec()]);
        let mut frontier = vec![mu.to_vec()];
        while let Some(v) = frontier.pop() {
            for i in 0..self.g.datum().rank() {
                let u: Vec<i64> = self.g.multiply(self.g.simple(i), &self.g.translation(&v)).translation().to_vec();
                if orbit.insert(u.clone()) {
                    frontier.push(u);
                }
            }
        }
        let tops: Vec<El> = orbit.iter().map(|v| self.g.translation(v)).collect();
        for t in &tops {
            self.locate(t);
        }
        let mut out = HashSet::new();
        for t in tops {
            out.extend(self.below(&t).iter().cloned());
        }
        out
    }

    /// `W_J A W_J`.
    pub fn saturate(&self, set: &HashSet<El>, j: &[usize]) -> HashSet<El> {
        let wj = self.parabolic(j);
        let mut out = HashSet::new();
        for x in set {
            for u in &wj {
                let ux = self.g.multiply(u, x);
                for v in &wj {
                    out.insert(self.g.multiply(&ux, v));
                }
            }
        }
        out
    }
}

/// Rational coordinates of `v` in the basis of simple coroots, by plain
/// Gaussian elimination.
pub fn coroot_coefficients(g: &IwahoriWeylGroup, v: &RationalCoweight) -> Vec<BigRational> {
    let d = g.datum();
    let r = d.rank();
    let n = d.dim();
    // n equations, r unknowns: sum_i c_i coroot_i = v
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|row| {
            let mut line: Vec<BigRational> = (0..r).map(|i| q(d.simple_coroots()[i][row])).collect();
            line.push(v.coords()[row].clone());
            line
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(p) = (row..n).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let pv = m[row][col].clone();
        for x in m[row].iter_mut() {
            *x /= &pv;
        }
        for i in 0..n {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let prow = m[row].clone();
                for (x, y) in m[i].iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    assert!(m[row..].iter().all(|line| line[r].is_zero()), "not in the coroot span");
    let mut c = vec![BigRational::zero(); r];
    for (i, &col) in pivots.iter().enumerate() {
        c[col] = m[i][r].clone();
    }
    c
}

pub fn dominance_leq(g: &IwahoriWeylGroup, a: &RationalCoweight, b: &RationalCoweight) -> bool {
    coroot_coefficients(g, &(b - a)).iter().all(|c| !c.is_negative())
}

pub fn rho_pairing(g: &IwahoriWeylGroup, nu: &RationalCoweight) -> BigRational {
    g.datum()
        .positive_roots()
        .iter()
        .map(|a| nu.coords().iter().zip(&a.root).map(|(x, &y)| x * q(y)).sum::<BigRational>())
        .sum()
}

fn dominant(g: &IwahoriWeylGroup, nu: &RationalCoweight) -> RationalCoweight {
    let d = g.datum();
    let mut v = nu.clone();
    loop {
        let neg = (0..d.rank()).find(|&i| {
            v.coords()
                .iter()
                .zip(&d.simple_roots()[i])
                .map(|(x, &y)| x * q(y))
                .sum::<BigRational>()
                .is_negative()
        });
        match neg {
            None => return v,
            Some(i) => {
                let p: BigRational = v.coords().iter().zip(&d.simple_roots()[i]).map(|(x, &y)| x * q(y)).sum();
                v = RationalCoweight::new(
                    v.coords()
                        .iter()
                        .zip(&d.simple_coroots()[i])
                        .map(|(x, &c)| x - &p * q(c))
                        .collect(),
                );
            }
        }
    }
}

/// Newton points, Kottwitz classes and straightness computed naively in
/// `W~ x| <sigma>`.
pub struct TwistOracle {
    pub twist: Arc<FrobeniusTwist>,
    order: usize,
    kappa_class: Vec<usize>,
}

impl TwistOracle {
    pub fn new(twist: Arc<FrobeniusTwist>) -> Self {
        let g = twist.group().clone();
        let gens: Vec<El> = (0..g.simple_reflections().len())
            .map(|s| g.simple(s).clone())
            .chain(g.omega().iter().cloned())
            .collect();
        let mut order = 1;
        let mut img: Vec<El> = gens.iter().map(|x| twist.apply_sigma(x)).collect();
        while img != gens {
            img = img.iter().map(|x| twist.apply_sigma(x)).collect();
            order += 1;
        }
        // coinvariants of Omega by union-find over omega ~ omega * o sigma(o)^{-1}
        let om = g.omega();
        let idx = |x: &El| om.iter().position(|o| o == x).expect("Omega is closed");
        let mut parent: Vec<usize> = (0..om.len()).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        for a in 0..om.len() {
            for o in om {
                let shift = g.multiply(o, &g.inverse(&twist.apply_sigma(o)));
                let b = idx(&g.multiply(&om[a], &shift));
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let kappa_class = (0..om.len()).map(|i| find(&mut parent, i)).collect();
        TwistOracle {
            twist,
            order,
            kappa_class,
        }
    }

    fn g(&self) -> &IwahoriWeylGroup {
        self.twist.group()
    }

    pub fn newton(&self, w: &El) -> RationalCoweight {
        let g = self.g();
        // (w sigma)^k = p sigma^k
        let mut p = g.identity();
        let mut cur = w.clone();
        let mut k = 0;
        loop {
            p = g.multiply(&p, &cur);
            cur = self.twist.apply_sigma(&cur);
            k += 1;
            if k % self.order == 0 && p.is_translation() {
                let scale = BigRational::new(BigInt::from(1), BigInt::from(k as i64));
                return dominant(g, &RationalCoweight::from_integral(p.translation()).scale(&scale));
            }
        }
    }

    pub fn kappa(&self, al: &Alcoves, w: &El) -> usize {
        self.kappa_class[al.omega_index(w)]
    }

    pub fn straight(&self, al: &Alcoves, w: &El) -> bool {
        rho_pairing(self.g(), &self.newton(w)) == q(al.length(w) as i64)
    }

    pub fn mu_diamond(&self, mu: &[i64]) -> RationalCoweight {
        let g = self.g();
        let mut sum = RationalCoweight::zero(mu.len());
        let mut t = g.translation(mu);
        for _ in 0..self.order {
            sum = &sum + &dominant(g, &RationalCoweight::from_integral(t.translation()));
            t = self.twist.apply_sigma(&t);
        }
        sum.scale(&BigRational::new(BigInt::from(1), BigInt::from(self.order as i64)))
    }

    /// `u w sigma(u)^{-1}`.
    pub fn conj(&self, u: &El, w: &El) -> El {
        let g = self.g();
        g.multiply(&g.multiply(u, w), &g.inverse(&self.twist.apply_sigma(u)))
    }
}

/// A straight class found by grouping straight elements by invariants.
#[derive(Clone)]
pub struct OracleClass {
    pub newton: RationalCoweight,
    pub kappa: usize,
    pub min_length: usize,
    pub min: Vec<El>,
}

/// All straight classes with minimal length at most `max`.
pub fn straight_classes(al: &Alcoves, t: &TwistOracle, max: usize) -> Vec<OracleClass> {
    let mut groups: HashMap<(RationalCoweight, usize), Vec<El>> = HashMap::new();
    for x in al.ball(max) {
        if t.straight(al, &x) {
            groups.entry((t.newton(&x), t.kappa(al, &x))).or_default().push(x);
        }
    }
    let mut out: Vec<OracleClass> = groups
        .into_iter()
        .map(|((newton, kappa), mut min)| {
            min.sort();
            OracleClass {
                newton,
                kappa,
                min_length: al.length(&min[0]),
                min,
            }
        })
        .collect();
    out.sort_by(|a, b| (a.min_length, &a.min[0]).cmp(&(b.min_length, &b.min[0])));
    out
}
