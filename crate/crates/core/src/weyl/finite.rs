//! The finite Weyl group `W_0`, enumerated once into index tables.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootdata::{BasedRootDatum, LatticeVec, RationalCoweight};

/// Largest `W_0` we are willing to tabulate.
pub const WEYL_GROUP_CAP: usize = 100_000;

/// Above this order products go through the matrix index instead of a full
/// multiplication table.
const TABLE_LIMIT: usize = 2048;

/// An element of `W_0`, as an index into its [`FiniteWeylGroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteWeylElement(pub(crate) u32);

impl FiniteWeylElement {
    pub const IDENTITY: FiniteWeylElement = FiniteWeylElement(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug)]
pub struct FiniteWeylGroup {
    dim: usize,
    /// Row-major `dim x dim` action on cocharacter coordinates.
    matrices: Vec<Box<[i64]>>,
    words: Vec<Vec<u8>>,
    inverse: Vec<u32>,
    /// `inv_negative[w][k]`: `w^{-1}` sends positive root `k` to a negative root.
    inv_negative: Vec<Box<[bool]>>,
    /// Action on all roots: positive roots `0..N`, their negatives `N..2N`.
    root_perm: Vec<Box<[u16]>>,
    index: HashMap<Box<[i64]>, u32>,
    table: Option<Vec<u32>>,
    simple: Vec<u32>,
}

fn mat_mul(a: &[i64], b: &[i64], n: usize) -> Box<[i64]> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out.into_boxed_slice()
}

impl FiniteWeylGroup {
    pub fn new(datum: &BasedRootDatum) -> Result<Self> {
        let n = datum.dim();
        let r = datum.rank();
        let simple_mats: Vec<Box<[i64]>> = (0..r)
            .map(|i| {
                let a = &datum.simple_roots()[i];
                let c = &datum.simple_coroots()[i];
                let mut m = vec![0i64; n * n];
                for row in 0..n {
                    for col in 0..n {
                        m[row * n + col] = i64::from(row == col) - c[row] * a[col];
                    }
                }
                m.into_boxed_slice()
            })
            .collect();

        let identity: Box<[i64]> = (0..n * n).map(|k| i64::from(k / n == k % n)).collect();
        let mut matrices = vec![identity.clone()];
        let mut words: Vec<Vec<u8>> = vec![Vec::new()];
        let mut index = HashMap::new();
        index.insert(identity, 0u32);
        // breadth-first by length, so words are reduced
        let mut head = 0;
        while head < matrices.len() {
            for (i, s) in simple_mats.iter().enumerate() {
                let m = mat_mul(s, &matrices[head], n);
                if !index.contains_key(&m) {
                    if matrices.len() >= WEYL_GROUP_CAP {
                        return Err(Error::WeylGroupTooLarge { cap: WEYL_GROUP_CAP });
                    }
                    let mut w = Vec::with_capacity(words[head].len() + 1);
                    w.push(i as u8);
                    w.extend_from_slice(&words[head]);
                    index.insert(m.clone(), matrices.len() as u32);
                    matrices.push(m);
                    words.push(w);
                }
            }
            head += 1;
        }

        let order = matrices.len();
        let simple: Vec<u32> = simple_mats.iter().map(|m| index[m]).collect();

        // roots as row vectors; w(beta) = beta . M_{w^{-1}}
        let npos = datum.positive_roots().len();
        let mut all_roots: Vec<LatticeVec> = datum.positive_roots().iter().map(|a| a.root.clone()).collect();
        all_roots.extend(
            datum
                .positive_roots()
                .iter()
                .map(|a| a.root.iter().map(|x| -x).collect::<LatticeVec>()),
        );
        let root_index: HashMap<LatticeVec, u16> = all_roots
            .iter()
            .enumerate()
            .map(|(k, a)| (a.clone(), k as u16))
            .collect();

        let mut group = FiniteWeylGroup {
            dim: n,
            matrices,
            words,
            inverse: Vec::new(),
            inv_negative: Vec::new(),
            root_perm: Vec::new(),
            index,
            table: None,
            simple,
        };

        group.inverse = (0..order)
            .map(|w| {
                let m = group.word_matrix(group.words[w].iter().rev().map(|&i| i as usize));
                group.index[&m]
            })
            .collect();

        // beta . M_w is w^{-1}(beta)
        let action_of_inverse: Vec<Box<[u16]>> = group
            .matrices
            .iter()
            .map(|m| {
                all_roots
                    .iter()
                    .map(|beta| {
                        let img: LatticeVec = (0..n)
                            .map(|col| (0..n).map(|row| beta[row] * m[row * n + col]).sum())
                            .collect();
                        root_index[&img]
                    })
                    .collect()
            })
            .collect();
        group.inv_negative = action_of_inverse
            .iter()
            .map(|perm| perm[..npos].iter().map(|&k| k as usize >= npos).collect())
            .collect();
        group.root_perm = (0..order)
            .map(|w| action_of_inverse[group.inverse[w] as usize].clone())
            .collect();

        if order <= TABLE_LIMIT {
            let mut table = vec![0u32; order * order];
            for a in 0..order {
                for b in 0..order {
                    let m = mat_mul(&group.matrices[a], &group.matrices[b], n);
                    table[a * order + b] = group.index[&m];
                }
            }
            group.table = Some(table);
        }
        Ok(group)
    }

    fn word_matrix(&self, word: impl Iterator<Item = usize>) -> Box<[i64]> {
        let mut m = self.matrices[0].clone();
        for i in word {
            m = mat_mul(&m, &self.matrices[self.simple[i] as usize], self.dim);
        }
        m
    }

    pub fn order(&self) -> usize {
        self.matrices.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = FiniteWeylElement> {
        (0..self.order() as u32).map(FiniteWeylElement)
    }

    pub fn simple(&self, i: usize) -> FiniteWeylElement {
        FiniteWeylElement(self.simple[i])
    }

    pub fn multiply(&self, a: FiniteWeylElement, b: FiniteWeylElement) -> FiniteWeylElement {
        match &self.table {
            Some(t) => FiniteWeylElement(t[a.index() * self.order() + b.index()]),
            None => {
                let m = mat_mul(&self.matrices[a.index()], &self.matrices[b.index()], self.dim);
                FiniteWeylElement(self.index[&m])
            }
        }
    }

    pub fn inverse(&self, w: FiniteWeylElement) -> FiniteWeylElement {
        FiniteWeylElement(self.inverse[w.index()])
    }

    pub fn length(&self, w: FiniteWeylElement) -> usize {
        self.words[w.index()].len()
    }

    /// A reduced word `[i_1, .., i_k]` with `w = s_{i_1} .. s_{i_k}`.
    pub fn word(&self, w: FiniteWeylElement) -> Vec<usize> {
        self.words[w.index()].iter().map(|&i| i as usize).collect()
    }

    pub fn from_word(&self, word: &[usize]) -> FiniteWeylElement {
        word.iter().fold(FiniteWeylElement::IDENTITY, |acc, &i| self.multiply(acc, self.simple(i)))
    }

    pub fn matrix(&self, w: FiniteWeylElement) -> &[i64] {
        &self.matrices[w.index()]
    }

    pub fn from_matrix(&self, m: &[i64]) -> Option<FiniteWeylElement> {
        self.index.get(m).map(|&i| FiniteWeylElement(i))
    }

    pub fn act(&self, w: FiniteWeylElement, v: &[i64]) -> LatticeVec {
        let m = &self.matrices[w.index()];
        let n = self.dim;
        (0..n).map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum()).collect()
    }

    pub fn act_rational(&self, w: FiniteWeylElement, v: &RationalCoweight) -> RationalCoweight {
        let m = &self.matrices[w.index()];
        let n = self.dim;
        RationalCoweight::new(
            (0..n)
                .map(|i| {
                    (0..n).fold(num_traits::Zero::zero(), |acc: num_rational::BigRational, j| {
                        acc + &v.coords()[j] * crate::rootdata::rational::rat(m[i * n + j])
                    })
                })
                .collect(),
        )
    }

    /// Whether `w^{-1}` sends positive root `k` to a negative root.
    pub fn inverse_negates(&self, w: FiniteWeylElement, k: usize) -> bool {
        self.inv_negative[w.index()][k]
    }

    pub fn inverse_negation_row(&self, w: FiniteWeylElement) -> &[bool] {
        &self.inv_negative[w.index()]
    }

    /// Permutation of all roots (positive then negated) induced by `w`.
    pub fn root_permutation(&self, w: FiniteWeylElement) -> &[u16] {
        &self.root_perm[w.index()]
    }

    pub fn from_root_permutation(&self, perm: &[u16]) -> Option<FiniteWeylElement> {
        // the action on the simple roots already pins w down
        self.elements().find(|&w| self.root_perm[w.index()][..] == *perm)
    }

    /// Order of `w` in `W_0`.
    pub fn element_order(&self, w: FiniteWeylElement) -> usize {
        let mut p = w;
        let mut k = 1;
        while p != FiniteWeylElement::IDENTITY {
            p = self.multiply(p, w);
            k += 1;
        }
        k
    }
}
