//! Cartan types of finite reduced root systems and their Cartan matrices.
//!
//! Matrices follow the convention `cartan[i][j] = <alpha_i^vee, alpha_j>`
//! with Bourbaki node numbering.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Series {
    fn letter(self) -> char {
        match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        Some(match c.to_ascii_uppercase() {
            'A' => Series::A,
            'B' => Series::B,
            'C' => Series::C,
            'D' => Series::D,
            'E' => Series::E,
            'F' => Series::F,
            'G' => Series::G,
            _ => return None,
        })
    }

    fn valid_rank(self, n: usize) -> bool {
        match self {
            Series::A => n >= 1,
            Series::B | Series::C => n >= 2,
            Series::D => n >= 3,
            Series::E => (6..=8).contains(&n),
            Series::F => n == 4,
            Series::G => n == 2,
        }
    }
}

/// An irreducible finite Cartan type such as `B2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IrreducibleType {
    pub series: Series,
    pub rank: usize,
}

impl IrreducibleType {
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        if !series.valid_rank(rank) {
            return Err(Error::UnknownType(format!("{}{}", series.letter(), rank)));
        }
        Ok(IrreducibleType { series, rank })
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize, aij: i64, aji: i64| {
            a[i][j] = aij;
            a[j][i] = aji;
        };
        match self.series {
            Series::A => {
                for i in 0..n - 1 {
                    link(i, i + 1, -1, -1);
                }
            }
            Series::B => {
                for i in 0..n - 2 {
                    link(i, i + 1, -1, -1);
                }
                // alpha_n short
                link(n - 2, n - 1, -1, -2);
            }
            Series::C => {
                for i in 0..n - 2 {
                    link(i, i + 1, -1, -1);
                }
                // alpha_n long
                link(n - 2, n - 1, -2, -1);
            }
            Series::D => {
                for i in 0..n - 2 {
                    link(i, i + 1, -1, -1);
                }
                link(n - 3, n - 1, -1, -1);
            }
            Series::E => {
                link(0, 2, -1, -1);
                link(1, 3, -1, -1);
                for i in 2..n - 1 {
                    link(i, i + 1, -1, -1);
                }
            }
            Series::F => {
                link(0, 1, -1, -1);
                link(1, 2, -1, -2);
                link(2, 3, -1, -1);
            }
            Series::G => {
                // alpha_1 short, alpha_2 long
                link(0, 1, -3, -1);
            }
        }
        a
    }
}

impl fmt::Display for IrreducibleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.series.letter(), self.rank)
    }
}

/// A product of irreducible types, e.g. `A1xA1`. Nodes are numbered
/// consecutively through the components in the order given.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CartanType {
    components: Vec<IrreducibleType>,
}

impl CartanType {
    pub fn new(components: Vec<IrreducibleType>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::UnknownType(String::new()));
        }
        Ok(CartanType { components })
    }

    pub fn irreducible(series: Series, rank: usize) -> Result<Self> {
        Self::new(vec![IrreducibleType::new(series, rank)?])
    }

    pub fn components(&self) -> &[IrreducibleType] {
        &self.components
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    /// Block-diagonal Cartan matrix together with the node ranges of each
    /// component.
    pub fn cartan_matrix(&self) -> (Vec<Vec<i64>>, Vec<Vec<usize>>) {
        let r = self.rank();
        let mut a = vec![vec![0i64; r]; r];
        let mut ranges = Vec::with_capacity(self.components.len());
        let mut offset = 0;
        for c in &self.components {
            let block = c.cartan_matrix();
            for i in 0..c.rank {
                for j in 0..c.rank {
                    a[offset + i][offset + j] = block[i][j];
                }
            }
            ranges.push((offset..offset + c.rank).collect());
            offset += c.rank;
        }
        (a, ranges)
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.components.iter().enumerate() {
            if k > 0 {
                f.write_str("x")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownType(s.to_string());
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut components = Vec::new();
        for part in cleaned.split(['x', 'X', '×']) {
            let mut chars = part.chars();
            let series = chars.next().and_then(Series::from_letter).ok_or_else(bad)?;
            let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
            components.push(IrreducibleType::new(series, rank).map_err(|_| bad())?);
        }
        CartanType::new(components).map_err(|_| bad())
    }
}
