//! Smith normal form over the integers and the finite quotient groups it
//! describes.

use smallvec::SmallVec;
use serde::{Deserialize, Serialize};

/// `u * a * v = d` with `u`, `v` unimodular and `d` diagonal with
/// `d[i] | d[i+1]`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: Vec<Vec<i64>>,
    pub v: Vec<Vec<i64>>,
    pub diagonal: Vec<i64>,
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn smith_normal_form(a: &[Vec<i64>]) -> SmithForm {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut d: Vec<Vec<i64>> = a.to_vec();
    let mut u = identity(m);
    let mut v = identity(n);

    let swap_rows = |d: &mut Vec<Vec<i64>>, u: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        d.swap(i, j);
        u.swap(i, j);
    };
    let swap_cols = |d: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        for row in d.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    };
    // row_j -= q * row_i
    let add_row = |d: &mut Vec<Vec<i64>>, u: &mut Vec<Vec<i64>>, i: usize, j: usize, q: i64| {
        for c in 0..d[i].len() {
            d[j][c] -= q * d[i][c];
        }
        for c in 0..u[i].len() {
            u[j][c] -= q * u[i][c];
        }
    };
    // col_j -= q * col_i
    let add_col = |d: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, i: usize, j: usize, q: i64| {
        for row in d.iter_mut() {
            row[j] -= q * row[i];
        }
        for row in v.iter_mut() {
            row[j] -= q * row[i];
        }
    };

    for k in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut pivot = None;
            for i in k..m {
                for j in k..n {
                    if d[i][j] != 0 && pivot.is_none_or(|(pi, pj): (usize, usize)| d[i][j].abs() < d[pi][pj].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break;
            };
            swap_rows(&mut d, &mut u, k, pi);
            swap_cols(&mut d, &mut v, k, pj);

            let mut dirty = false;
            for i in k + 1..m {
                let q = d[i][k].div_euclid(d[k][k]);
                add_row(&mut d, &mut u, k, i, q);
                dirty |= d[i][k] != 0;
            }
            for j in k + 1..n {
                let q = d[k][j].div_euclid(d[k][k]);
                add_col(&mut d, &mut v, k, j, q);
                dirty |= d[k][j] != 0;
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into row k and retry
            let p = d[k][k];
            let offending = (k + 1..m).find(|&i| (k + 1..n).any(|j| d[i][j] % p != 0));
            match offending {
                Some(i) => add_row(&mut d, &mut u, i, k, -1),
                None => break,
            }
        }
        if d[k][k] < 0 {
            d[k].iter_mut().for_each(|x| *x = -*x);
            u[k].iter_mut().for_each(|x| *x = -*x);
        }
    }

    let diagonal = (0..m.min(n)).map(|i| d[i][i]).collect();
    SmithForm { u, v, diagonal }
}

/// The residues of an element of a finitely generated abelian group
/// `Z^d / L`, one per nontrivial invariant factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pi1Class(pub SmallVec<[i64; 2]>);

impl Pi1Class {
    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }
}

impl std::fmt::Display for Pi1Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

/// `Z^d` modulo the span of a set of integer vectors.
#[derive(Debug, Clone)]
pub struct LatticeQuotient {
    /// Rows of the left Smith transform for the nontrivial factors.
    rows: Vec<Vec<i64>>,
    /// Invariant factor per row; `0` marks a free `Z` summand.
    orders: Vec<i64>,
}

impl LatticeQuotient {
    /// Quotient of `Z^dim` by the span of `generators`.
    pub fn new(dim: usize, generators: &[Vec<i64>]) -> Self {
        // columns are generators
        let a: Vec<Vec<i64>> = (0..dim)
            .map(|i| generators.iter().map(|g| g[i]).collect())
            .collect();
        let snf = if generators.is_empty() {
            SmithForm {
                u: identity(dim),
                v: Vec::new(),
                diagonal: Vec::new(),
            }
        } else {
            smith_normal_form(&a)
        };
        let mut rows = Vec::new();
        let mut orders = Vec::new();
        for i in 0..dim {
            let di = snf.diagonal.get(i).copied().unwrap_or(0);
            if di != 1 {
                rows.push(snf.u[i].clone());
                orders.push(di);
            }
        }
        LatticeQuotient { rows, orders }
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    /// Number of elements, or `None` if the quotient is infinite.
    pub fn order(&self) -> Option<i64> {
        self.orders
            .iter()
            .try_fold(1i64, |acc, &o| (o != 0).then_some(acc * o))
    }

    pub fn class_of(&self, v: &[i64]) -> Pi1Class {
        Pi1Class(
            self.rows
                .iter()
                .zip(&self.orders)
                .map(|(row, &o)| {
                    let x: i64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
                    if o == 0 {
                        x
                    } else {
                        x.rem_euclid(o)
                    }
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = b.first().map_or(0, Vec::len);
        a.iter()
            .map(|row| {
                (0..n)
                    .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                    .collect()
            })
            .collect()
    }

    fn check(a: &[Vec<i64>]) {
        let s = smith_normal_form(a);
        let d = mul(&mul(&s.u, a), &s.v);
        for (i, row) in d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if i == j {
                    assert_eq!(x, s.diagonal[i]);
                } else {
                    assert_eq!(x, 0, "off-diagonal entry in {d:?}");
                }
            }
        }
        for w in s.diagonal.windows(2) {
            if w[1] != 0 {
                assert_eq!(w[1] % w[0], 0, "divisibility chain {:?}", s.diagonal);
            }
        }
        assert!(s.diagonal.iter().all(|&x| x >= 0));
    }

    #[test]
    fn a2_cartan_has_cokernel_z3() {
        let q = LatticeQuotient::new(2, &[vec![2, -1], vec![-1, 2]]);
        assert_eq!(q.order(), Some(3));
        check(&[vec![2, -1], vec![-1, 2]]);
    }

    #[test]
    fn d4_cartan_has_cokernel_z2_squared() {
        let a = vec![
            vec![2, -1, 0, 0],
            vec![-1, 2, -1, -1],
            vec![0, -1, 2, 0],
            vec![0, -1, 0, 2],
        ];
        let q = LatticeQuotient::new(4, &a);
        assert_eq!(q.orders(), &[2, 2]);
    }

    #[test]
    fn classes_respect_the_quotient() {
        let q = LatticeQuotient::new(1, &[vec![2]]);
        assert_eq!(q.class_of(&[1]), q.class_of(&[3]));
        assert_ne!(q.class_of(&[1]), q.class_of(&[2]));
        assert!(q.class_of(&[4]).is_trivial());
    }

    proptest! {
        #[test]
        fn smith_form_is_a_valid_factorisation(
            entries in proptest::collection::vec(-6i64..=6, 12),
            rows in 1usize..=4,
        ) {
            let cols = 12 / rows.max(1);
            let cols = cols.min(4);
            let a: Vec<Vec<i64>> = (0..rows)
                .map(|i| (0..cols).map(|j| entries[i * cols + j]).collect())
                .collect();
            check(&a);
        }
    }
}
