//! Based root data of finite type: the cocharacter lattice, simple roots and
//! coroots, positive roots, the fundamental group and the dominance order.
//!
//! Cocharacters are integer vectors in a fixed basis of `X_*(T)`; characters
//! are integer vectors in the dual basis, so every pairing is a dot product.

mod cartan;
pub mod rational;
pub mod snf;

use std::collections::{HashSet, VecDeque};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

pub use cartan::{CartanType, IrreducibleType, Series};
pub use rational::RationalCoweight;
pub use snf::{LatticeQuotient, Pi1Class};

use crate::error::{Error, Result};

/// Integer coordinates of a cocharacter (or, for roots, of a character in the
/// dual basis).
pub type LatticeVec = SmallVec<[i64; 4]>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeChoice {
    SimplyConnected,
    Adjoint,
    /// Basis vectors of the cocharacter lattice, each written in fundamental
    /// coweight coordinates. Must contain the coroot lattice.
    Intermediate(Vec<Vec<i64>>),
}

#[derive(Debug, Clone)]
pub struct PositiveRoot {
    /// The root as a character, in the dual lattice basis.
    pub root: LatticeVec,
    /// The coroot as a cocharacter.
    pub coroot: LatticeVec,
    /// Coefficients in the simple roots.
    pub simple_coords: Vec<i64>,
    pub component: usize,
}

impl PositiveRoot {
    pub fn height(&self) -> i64 {
        self.simple_coords.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct BasedRootDatum {
    cartan_type: CartanType,
    cartan: Vec<Vec<i64>>,
    lattice_choice: LatticeChoice,
    /// Rows are lattice basis vectors in fundamental coweight coordinates.
    basis: Vec<Vec<i64>>,
    basis_inverse: Vec<Vec<BigRational>>,
    components: Vec<Vec<usize>>,
    simple_roots: Vec<LatticeVec>,
    simple_coroots: Vec<LatticeVec>,
    positive_roots: Vec<PositiveRoot>,
    highest_roots: Vec<usize>,
    /// Lattice coordinates to simple coroot coordinates.
    coroot_coords: Vec<Vec<BigRational>>,
    two_rho: LatticeVec,
    pi1: LatticeQuotient,
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl BasedRootDatum {
    pub fn new(cartan_type: CartanType, lattice_choice: LatticeChoice) -> Result<Self> {
        let (cartan, components) = cartan_type.cartan_matrix();
        let r = cartan.len();

        let basis: Vec<Vec<i64>> = match &lattice_choice {
            LatticeChoice::SimplyConnected => cartan.clone(),
            LatticeChoice::Adjoint => (0..r)
                .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
                .collect(),
            LatticeChoice::Intermediate(b) => {
                if b.len() != r || b.iter().any(|row| row.len() != r) {
                    return Err(Error::InvalidLattice(format!(
                        "intermediate basis must be a {r}x{r} matrix"
                    )));
                }
                b.clone()
            }
        };
        let basis_inverse = rational::invert(&basis)
            .ok_or_else(|| Error::InvalidLattice("basis is singular".into()))?;

        // coroot alpha_i^vee has fundamental coordinates cartan[i]; solve c B = cartan[i]
        let mut simple_coroots = Vec::with_capacity(r);
        for (i, row) in cartan.iter().enumerate() {
            let c: Vec<BigRational> = (0..r)
                .map(|k| {
                    row.iter()
                        .zip(&basis_inverse)
                        .fold(BigRational::zero(), |acc, (&a, inv_row)| acc + inv_row[k].clone() * rational::rat(a))
                })
                .collect();
            let integral = RationalCoweight::new(c).to_integral().ok_or_else(|| {
                Error::InvalidLattice(format!(
                    "basis does not contain the simple coroot alpha_{}^vee",
                    i + 1
                ))
            })?;
            simple_coroots.push(LatticeVec::from_vec(integral));
        }
        let simple_roots: Vec<LatticeVec> = (0..r)
            .map(|j| basis.iter().map(|row| row[j]).collect())
            .collect();

        // all roots by closure under simple reflections, carried with their coroots
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut queue: VecDeque<(Vec<i64>, Vec<i64>)> = VecDeque::new();
        for i in 0..r {
            let e: Vec<i64> = (0..r).map(|j| i64::from(i == j)).collect();
            seen.insert(e.clone());
            queue.push_back((e.clone(), e));
        }
        let mut positive: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
        while let Some((c, d)) = queue.pop_front() {
            if c.iter().all(|&x| x >= 0) {
                positive.push((c.clone(), d.clone()));
            }
            for i in 0..r {
                let pair_c: i64 = (0..r).map(|j| c[j] * cartan[i][j]).sum();
                let pair_d: i64 = (0..r).map(|j| d[j] * cartan[j][i]).sum();
                let mut c2 = c.clone();
                c2[i] -= pair_c;
                let mut d2 = d.clone();
                d2[i] -= pair_d;
                if seen.insert(c2.clone()) {
                    queue.push_back((c2, d2));
                }
            }
        }
        positive.sort_by(|a, b| {
            let ha: i64 = a.0.iter().sum();
            let hb: i64 = b.0.iter().sum();
            ha.cmp(&hb).then_with(|| b.0.cmp(&a.0))
        });

        let positive_roots: Vec<PositiveRoot> = positive
            .into_iter()
            .map(|(c, d)| {
                let mut root = LatticeVec::from_elem(0, r);
                let mut coroot = LatticeVec::from_elem(0, r);
                for j in 0..r {
                    for k in 0..r {
                        root[k] += c[j] * simple_roots[j][k];
                        coroot[k] += d[j] * simple_coroots[j][k];
                    }
                }
                let support = c.iter().position(|&x| x != 0).expect("nonzero root");
                let component = components
                    .iter()
                    .position(|nodes| nodes.contains(&support))
                    .expect("node in some component");
                PositiveRoot {
                    root,
                    coroot,
                    simple_coords: c,
                    component,
                }
            })
            .collect();

        let highest_roots = (0..components.len())
            .map(|k| {
                positive_roots
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.component == k)
                    .max_by_key(|(_, a)| a.height())
                    .map(|(i, _)| i)
                    .expect("component has roots")
            })
            .collect();

        let coroot_matrix: Vec<Vec<i64>> = (0..r)
            .map(|row| simple_coroots.iter().map(|c| c[row]).collect())
            .collect();
        let coroot_coords = rational::invert(&coroot_matrix)
            .ok_or_else(|| Error::InvalidLattice("coroots are linearly dependent".into()))?;

        let mut two_rho = LatticeVec::from_elem(0, r);
        for a in &positive_roots {
            for k in 0..r {
                two_rho[k] += a.root[k];
            }
        }

        let generators: Vec<Vec<i64>> = simple_coroots.iter().map(|c| c.to_vec()).collect();
        let pi1 = LatticeQuotient::new(r, &generators);

        Ok(BasedRootDatum {
            cartan_type,
            cartan,
            lattice_choice,
            basis,
            basis_inverse,
            components,
            simple_roots,
            simple_coroots,
            positive_roots,
            highest_roots,
            coroot_coords,
            two_rho,
            pi1,
        })
    }

    pub fn cartan_type(&self) -> &CartanType {
        &self.cartan_type
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn lattice_choice(&self) -> &LatticeChoice {
        &self.lattice_choice
    }

    /// Lattice basis in fundamental coweight coordinates.
    pub fn lattice_basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    /// Dimension of the cocharacter lattice.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn simple_roots(&self) -> &[LatticeVec] {
        &self.simple_roots
    }

    pub fn simple_coroots(&self) -> &[LatticeVec] {
        &self.simple_coroots
    }

    pub fn positive_roots(&self) -> &[PositiveRoot] {
        &self.positive_roots
    }

    /// Index into `positive_roots` of the highest root of each component.
    pub fn highest_roots(&self) -> &[usize] {
        &self.highest_roots
    }

    /// `<lambda, alpha>` for a cocharacter and a character.
    pub fn pairing(&self, lambda: &[i64], character: &[i64]) -> i64 {
        dot(lambda, character)
    }

    /// `pi_1(G) = X_* / (coroot lattice)`.
    pub fn fundamental_group(&self) -> &LatticeQuotient {
        &self.pi1
    }

    /// `<lambda, 2 rho>` for an integral cocharacter.
    pub fn rho_pairing_integral(&self, lambda: &[i64]) -> i64 {
        dot(lambda, &self.two_rho)
    }

    /// `<lambda, 2 rho>`, exactly.
    pub fn rho_pairing(&self, lambda: &RationalCoweight) -> BigRational {
        lambda.pair(&self.two_rho)
    }

    /// Coordinates of a cocharacter in the simple coroot basis.
    pub fn coroot_coordinates(&self, lambda: &RationalCoweight) -> Vec<BigRational> {
        rational::apply(&self.coroot_coords, lambda.coords())
    }

    /// `<lambda, alpha_i>` for each simple root.
    pub fn fundamental_coordinates(&self, lambda: &[i64]) -> Vec<i64> {
        self.simple_roots.iter().map(|a| dot(lambda, a)).collect()
    }

    /// The cocharacter with the given fundamental coweight coordinates, if it
    /// lies in the lattice.
    pub fn from_fundamental_coordinates(&self, p: &[i64]) -> Option<LatticeVec> {
        let r = self.dim();
        let c: Vec<BigRational> = (0..r)
            .map(|k| {
                p.iter()
                    .zip(&self.basis_inverse)
                    .fold(BigRational::zero(), |acc, (&a, row)| acc + row[k].clone() * rational::rat(a))
            })
            .collect();
        RationalCoweight::new(c).to_integral().map(LatticeVec::from_vec)
    }

    pub fn is_dominant(&self, lambda: &RationalCoweight) -> bool {
        self.simple_roots
            .iter()
            .all(|a| !lambda.pair(a).is_negative())
    }

    pub fn is_dominant_integral(&self, lambda: &[i64]) -> bool {
        self.simple_roots.iter().all(|a| dot(lambda, a) >= 0)
    }

    /// `s_i(lambda) = lambda - <lambda, alpha_i> alpha_i^vee`.
    pub fn reflect(&self, i: usize, lambda: &[i64]) -> LatticeVec {
        let p = dot(lambda, &self.simple_roots[i]);
        lambda
            .iter()
            .zip(&self.simple_coroots[i])
            .map(|(x, c)| x - p * c)
            .collect()
    }

    /// The dominant element of the `W_0`-orbit of `nu`, with a word
    /// `[i_1, .., i_k]` such that `s_{i_1} .. s_{i_k}` carries `nu` to it.
    /// The word is reduced and of minimal length among all such witnesses.
    pub fn dominant_representative(&self, nu: &RationalCoweight) -> (RationalCoweight, Vec<usize>) {
        let mut current = nu.clone();
        let mut applied = Vec::new();
        'outer: loop {
            for (i, a) in self.simple_roots.iter().enumerate() {
                let p = current.pair(a);
                if p.is_negative() {
                    current = current.sub_multiple(&p, &self.simple_coroots[i]);
                    applied.push(i);
                    continue 'outer;
                }
            }
            break;
        }
        applied.reverse();
        (current, applied)
    }

    /// Dominance order on dominant rational coweights: `nu <= nu'` iff
    /// `nu' - nu` is a nonnegative rational combination of simple coroots.
    pub fn dominance_leq(&self, nu: &RationalCoweight, nu2: &RationalCoweight) -> Result<bool> {
        for v in [nu, nu2] {
            if !self.is_dominant(v) {
                return Err(Error::NotDominant(v.to_string()));
            }
        }
        Ok(rational::is_nonnegative(&self.coroot_coordinates(&(nu2 - nu))))
    }
}
