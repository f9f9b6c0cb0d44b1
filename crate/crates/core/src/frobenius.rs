//! The Frobenius twist `sigma = Ad(tau) . sigma_0` on `W~`, the Kottwitz
//! invariant and the averaged coweight `mu^diamond`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::rootdata::{LatticeQuotient, LatticeVec, Pi1Class, RationalCoweight};
use crate::weyl::{FiniteWeylElement, IwahoriWeylElement, IwahoriWeylGroup};

/// Upper bound when searching for the order of `sigma`.
const MAX_TWIST_ORDER: usize = 10_000;

#[derive(Debug)]
pub struct FrobeniusTwist {
    group: Arc<IwahoriWeylGroup>,
    sigma0: Vec<usize>,
    /// `sigma_0` on lattice coordinates, row-major.
    sigma0_matrix: Vec<i64>,
    sigma0_w0: Vec<FiniteWeylElement>,
    tau: IwahoriWeylElement,
    tau_inv: IwahoriWeylElement,
    order_n: usize,
    order_total: usize,
    sigma_simple: Vec<usize>,
    coinvariants: LatticeQuotient,
}

impl FrobeniusTwist {
    pub fn trivial(group: Arc<IwahoriWeylGroup>) -> Self {
        let rank = group.datum().rank();
        let id = group.identity();
        Self::new(group, (0..rank).collect(), id).expect("identity twist is valid")
    }

    /// `sigma0` is a permutation of the finite Dynkin nodes (0-based);
    /// `tau` must have length zero.
    pub fn new(group: Arc<IwahoriWeylGroup>, sigma0: Vec<usize>, tau: IwahoriWeylElement) -> Result<Self> {
        let d = group.datum();
        let r = d.rank();
        let n = d.dim();
        if sigma0.len() != r || sigma0.iter().collect::<BTreeSet<_>>().len() != r || sigma0.iter().any(|&i| i >= r) {
            return Err(Error::InvalidTwist(format!("sigma0 {sigma0:?} is not a permutation of {r} nodes")));
        }
        let a = d.cartan_matrix();
        for i in 0..r {
            for j in 0..r {
                if a[sigma0[i]][sigma0[j]] != a[i][j] {
                    return Err(Error::InvalidTwist(format!(
                        "sigma0 {sigma0:?} does not preserve the Cartan matrix"
                    )));
                }
            }
        }
        group.check(&tau).map_err(|_| Error::InvalidTwist("tau does not belong to this group".into()))?;
        if group.length(&tau) != 0 {
            return Err(Error::InvalidTwist(format!("tau = {tau} has positive length, not in Omega")));
        }

        // columns are images of the lattice basis vectors
        let mut sigma0_matrix = vec![0i64; n * n];
        for k in 0..n {
            let mut e = vec![0i64; n];
            e[k] = 1;
            let p = d.fundamental_coordinates(&e);
            let mut q = vec![0i64; r];
            for (i, &pi) in p.iter().enumerate() {
                q[sigma0[i]] = pi;
            }
            let img = d.from_fundamental_coordinates(&q).ok_or_else(|| {
                Error::InvalidTwist(format!("sigma0 {sigma0:?} does not preserve the cocharacter lattice"))
            })?;
            for row in 0..n {
                sigma0_matrix[row * n + k] = img[row];
            }
        }

        let w0 = group.finite_weyl_group();
        let sigma0_w0 = w0
            .elements()
            .map(|w| w0.from_word(&w0.word(w).iter().map(|&i| sigma0[i]).collect::<Vec<_>>()))
            .collect();

        let mut order_n = 1;
        let mut p: Vec<usize> = sigma0.clone();
        while p.iter().enumerate().any(|(i, &j)| i != j) {
            p = p.iter().map(|&j| sigma0[j]).collect();
            order_n += 1;
        }

        let mut generators: Vec<Vec<i64>> = d.simple_coroots().iter().map(|c| c.to_vec()).collect();
        for k in 0..n {
            let mut g = vec![0i64; n];
            g[k] = 1;
            for (row, gk) in g.iter_mut().enumerate() {
                *gk -= sigma0_matrix[row * n + k];
            }
            generators.push(g);
        }
        let coinvariants = LatticeQuotient::new(n, &generators);

        let tau_inv = group.inverse(&tau);
        let mut twist = FrobeniusTwist {
            group,
            sigma0,
            sigma0_matrix,
            sigma0_w0,
            tau,
            tau_inv,
            order_n,
            order_total: 0,
            sigma_simple: Vec::new(),
            coinvariants,
        };

        let g = &twist.group;
        twist.sigma_simple = (0..g.simple_reflections().len())
            .map(|s| {
                let img = twist.apply_sigma(g.simple(s));
                g.simple_reflections()
                    .index_of(&img)
                    .ok_or_else(|| Error::InvalidTwist("sigma does not preserve the simple reflections".into()))
            })
            .collect::<Result<_>>()?;

        // order of sigma on the generators S~ and Omega of W~
        let gens: Vec<IwahoriWeylElement> = (0..g.simple_reflections().len())
            .map(|s| g.simple(s).clone())
            .chain(g.omega().iter().cloned())
            .collect();
        let mut images = gens.clone();
        let mut k = 0;
        loop {
            images = images.iter().map(|x| twist.apply_sigma(x)).collect();
            k += 1;
            if images == gens {
                break;
            }
            if k > MAX_TWIST_ORDER {
                return Err(Error::InvalidTwist("sigma has unbounded order".into()));
            }
        }
        twist.order_total = k;
        Ok(twist)
    }

    pub fn group(&self) -> &Arc<IwahoriWeylGroup> {
        &self.group
    }

    pub fn sigma0(&self) -> &[usize] {
        &self.sigma0
    }

    pub fn tau(&self) -> &IwahoriWeylElement {
        &self.tau
    }

    pub fn is_trivial(&self) -> bool {
        self.order_total == 1
    }

    /// `N`, the order of `sigma_0`.
    pub fn order_sigma0(&self) -> usize {
        self.order_n
    }

    /// Order of `sigma` as an automorphism of `W~`.
    pub fn order(&self) -> usize {
        self.order_total
    }

    pub fn apply_sigma0_lattice(&self, lambda: &[i64]) -> LatticeVec {
        let n = lambda.len();
        (0..n)
            .map(|row| (0..n).map(|k| self.sigma0_matrix[row * n + k] * lambda[k]).sum())
            .collect()
    }

    pub fn apply_sigma0_rational(&self, nu: &RationalCoweight) -> RationalCoweight {
        let n = nu.dim();
        RationalCoweight::new(
            (0..n)
                .map(|row| {
                    (0..n).fold(BigRational::from_integer(BigInt::from(0)), |acc, k| {
                        acc + &nu.coords()[k] * BigRational::from_integer(BigInt::from(self.sigma0_matrix[row * n + k]))
                    })
                })
                .collect(),
        )
    }

    pub fn apply_sigma0(&self, x: &IwahoriWeylElement) -> IwahoriWeylElement {
        IwahoriWeylElement::new(
            self.apply_sigma0_lattice(x.translation()),
            self.sigma0_w0[x.finite().index()],
        )
    }

    /// `sigma(x) = tau sigma_0(x) tau^{-1}`.
    pub fn apply_sigma(&self, x: &IwahoriWeylElement) -> IwahoriWeylElement {
        let g = &self.group;
        g.multiply(&g.multiply(&self.tau, &self.apply_sigma0(x)), &self.tau_inv)
    }

    pub fn try_apply_sigma(&self, x: &IwahoriWeylElement) -> Result<IwahoriWeylElement> {
        self.group.check(x)?;
        Ok(self.apply_sigma(x))
    }

    pub fn apply_sigma_power(&self, x: &IwahoriWeylElement, k: usize) -> IwahoriWeylElement {
        (0..k % self.order_total).fold(x.clone(), |acc, _| self.apply_sigma(&acc))
    }

    /// Index of `sigma(s)` in `S~`.
    pub fn sigma_simple(&self, s: usize) -> usize {
        self.sigma_simple[s]
    }

    pub fn sigma_subset(&self, j: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = j.iter().map(|&s| self.sigma_simple[s]).collect();
        out.sort_unstable();
        out
    }

    pub fn is_sigma_stable(&self, j: &[usize]) -> bool {
        let mut sorted = j.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        self.sigma_subset(&sorted) == sorted
    }

    /// `u x sigma(u)^{-1}`.
    pub fn sigma_conjugate(&self, u: &IwahoriWeylElement, x: &IwahoriWeylElement) -> IwahoriWeylElement {
        let g = &self.group;
        g.multiply(&g.multiply(u, x), &g.inverse(&self.apply_sigma(u)))
    }

    /// `pi_1(G)_sigma = X_* / (Q^vee + (1 - sigma_0) X_*)`; `sigma` acts on
    /// `Omega ~ pi_1(G)` through `sigma_0` since `Ad(tau)` is trivial there.
    pub fn coinvariants(&self) -> &LatticeQuotient {
        &self.coinvariants
    }

    pub fn kottwitz_kappa(&self, x: &IwahoriWeylElement) -> Pi1Class {
        self.coinvariants.class_of(x.translation())
    }

    pub fn mu_sharp(&self, mu: &[i64]) -> Pi1Class {
        self.coinvariants.class_of(mu)
    }

    /// `(1/N) sum_i sigma_0^i(mu)` for dominant `mu`.
    pub fn mu_diamond(&self, mu: &[i64]) -> Result<RationalCoweight> {
        if !self.group.datum().is_dominant_integral(mu) {
            return Err(Error::NotDominant(format!("{mu:?}")));
        }
        let mut sum = vec![0i64; mu.len()];
        let mut cur = LatticeVec::from_slice(mu);
        for _ in 0..self.order_n {
            for (s, c) in sum.iter_mut().zip(&cur) {
                *s += c;
            }
            cur = self.apply_sigma0_lattice(&cur);
        }
        let inv = BigRational::new(BigInt::from(1), BigInt::from(self.order_n as i64));
        Ok(RationalCoweight::from_integral(&sum).scale(&inv))
    }

    pub fn describe(&self) -> String {
        let nodes: Vec<String> = self.sigma0.iter().map(|i| (i + 1).to_string()).collect();
        format!(
            "sigma0=[{}] tau={}",
            nodes.join(","),
            self.group.describe(&self.tau)
        )
    }
}
