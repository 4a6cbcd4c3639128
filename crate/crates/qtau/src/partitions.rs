//! Young-diagram machinery: partitions, conjugation, arm/leg lengths and
//! exhaustive enumeration of partitions and partition pairs.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest weight `enumerate_partitions`/`enumerate_pairs_upto` will accept.
pub const ENUM_CEILING: u32 = 24;

/// A partition: weakly decreasing sequence of positive integers, viewed as
/// a Young diagram with rows of the given lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

/// A diagram cell in matrix coordinates, row `i >= 1`, column `j >= 1`.
///
/// Cells outside the diagram are legal inputs to arm/leg lengths (rows
/// beyond the length count as 0), which the Nekrasov factor relies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub row: u32,
    pub col: u32,
}

impl Cell {
    pub fn new(row: u32, col: u32) -> Self {
        assert!(row >= 1 && col >= 1, "cells are 1-based");
        Cell { row, col }
    }
}

impl Partition {
    /// Build from parts; panics unless weakly decreasing and positive.
    pub fn new(parts: Vec<u32>) -> Self {
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]),
            "partition parts must be weakly decreasing"
        );
        assert!(
            parts.last().is_none_or(|&p| p > 0),
            "partition parts must be positive"
        );
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Row length lambda_i for 1-based i, 0 beyond the last row.
    pub fn part(&self, i: u32) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.get(i as usize - 1).copied().unwrap_or(0)
    }

    /// |lambda|, the number of cells.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of rows.
    pub fn len(&self) -> u32 {
        self.parts.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Conjugate diagram: lambda'_j = #{i | lambda_i >= j}.
    pub fn conjugate(&self) -> Partition {
        let Some(&first) = self.parts.first() else {
            return Partition::empty();
        };
        let mut cols = vec![0u32; first as usize];
        for &p in &self.parts {
            for col in cols.iter_mut().take(p as usize) {
                *col += 1;
            }
        }
        Partition { parts: cols }
    }

    /// Arm length lambda_i - j; negative when the cell lies outside.
    pub fn arm(&self, cell: Cell) -> i32 {
        self.part(cell.row) as i32 - cell.col as i32
    }

    /// Leg length lambda'_j - i; negative when the cell lies outside.
    pub fn leg(&self, cell: Cell) -> i32 {
        self.conjugate().part(cell.col) as i32 - cell.row as i32
    }

    /// Row-major iteration over the cells of the diagram.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (1..=p).map(move |j| Cell::new(i as u32 + 1, j)))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of weight exactly `k`, in reverse-lexicographic order
/// (so (3) before (2,1) before (1,1,1)). The order is part of the library
/// contract: series summation follows it, keeping floating-point rounding
/// reproducible.
pub fn enumerate_partitions(k: u32) -> Result<Vec<Partition>> {
    if k > ENUM_CEILING {
        return Err(Error::CeilingExceeded {
            requested: k,
            ceiling: ENUM_CEILING,
        });
    }
    let mut out = Vec::new();
    let mut acc: Vec<u32> = Vec::new();
    fn rec(rem: u32, max_part: u32, acc: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition { parts: acc.clone() });
            return;
        }
        let hi = rem.min(max_part);
        for p in (1..=hi).rev() {
            acc.push(p);
            rec(rem - p, p, acc, out);
            acc.pop();
        }
    }
    rec(k, k, &mut acc, &mut out);
    Ok(out)
}

/// All ordered pairs (lambda_+, lambda_-) with |lambda_+| + |lambda_-| <= n,
/// grouped by total weight ascending; within a weight class the weight of
/// lambda_+ ascends and each slot runs in reverse-lexicographic order.
pub fn enumerate_pairs_upto(n: u32) -> Result<Vec<(Partition, Partition)>> {
    if n > ENUM_CEILING {
        return Err(Error::CeilingExceeded {
            requested: n,
            ceiling: ENUM_CEILING,
        });
    }
    let by_weight: Vec<Vec<Partition>> =
        (0..=n).map(enumerate_partitions).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for k in 0..=n {
        for a in 0..=k {
            for lp in &by_weight[a as usize] {
                for lm in &by_weight[(k - a) as usize] {
                    out.push((lp.clone(), lm.clone()));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn conjugate_examples() {
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
        assert_eq!(Partition::new(vec![1]).conjugate(), Partition::new(vec![1]));
        assert_eq!(
            Partition::new(vec![3, 1]).conjugate(),
            Partition::new(vec![2, 1, 1])
        );
    }

    #[test]
    fn arm_leg_examples() {
        let empty = Partition::empty();
        assert_eq!(empty.arm(Cell::new(1, 1)), -1);
        assert_eq!(empty.leg(Cell::new(1, 1)), -1);
        let one = Partition::new(vec![1]);
        assert_eq!(one.arm(Cell::new(1, 1)), 0);
        assert_eq!(one.leg(Cell::new(1, 1)), 0);
        let p = Partition::new(vec![3, 1]);
        assert_eq!(p.arm(Cell::new(1, 2)), 1);
        // conjugate of (3,1) is (2,1,1), so leg(1,2) = lambda'_2 - 1 = 0
        assert_eq!(p.leg(Cell::new(1, 2)), 0);
        assert_eq!(p.leg(Cell::new(2, 2)), -1);
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_partitions(0).unwrap(), vec![Partition::empty()]);
        let k3 = enumerate_partitions(3).unwrap();
        assert_eq!(
            k3,
            vec![
                Partition::new(vec![3]),
                Partition::new(vec![2, 1]),
                Partition::new(vec![1, 1, 1]),
            ]
        );
        assert_eq!(enumerate_partitions(5).unwrap().len(), 7);
        // p(0..10) = 1,1,2,3,5,7,11,15,22,30,42
        let p: Vec<usize> = (0..=10)
            .map(|k| enumerate_partitions(k).unwrap().len())
            .collect();
        assert_eq!(p, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        assert!(enumerate_partitions(ENUM_CEILING + 1).is_err());
    }

    #[test]
    fn pair_enumeration() {
        assert_eq!(enumerate_pairs_upto(0).unwrap().len(), 1);
        assert_eq!(enumerate_pairs_upto(1).unwrap().len(), 3);
        assert_eq!(enumerate_pairs_upto(4).unwrap().len(), 38);
        // grouped by ascending total weight
        let pairs = enumerate_pairs_upto(3).unwrap();
        let weights: Vec<u32> = pairs.iter().map(|(a, b)| a.weight() + b.weight()).collect();
        assert!(weights.windows(2).all(|w| w[0] <= w[1]));
    }

    /// Sum over cells of (leg + arm_of_empty + 1) equals sum of (i - j);
    /// the content identity behind the Chern-Simons factor.
    #[test]
    fn content_identity() {
        let empty = Partition::empty();
        for k in 0..=10 {
            for lam in enumerate_partitions(k).unwrap() {
                let lhs: i32 = lam.cells().map(|c| lam.leg(c) + empty.arm(c) + 1).sum();
                let rhs: i32 = lam.cells().map(|c| c.row as i32 - c.col as i32).sum();
                assert_eq!(lhs, rhs, "content identity failed for {lam}");
            }
        }
    }

    #[test]
    fn arm_leg_duality_exhaustive() {
        for k in 0..=8 {
            for lam in enumerate_partitions(k).unwrap() {
                let conj = lam.conjugate();
                for i in 1..=8 {
                    for j in 1..=8 {
                        assert_eq!(
                            lam.arm(Cell::new(i, j)),
                            conj.leg(Cell::new(j, i)),
                            "duality failed for {lam} at ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    fn arb_partition() -> impl Strategy<Value = Partition> {
        proptest::collection::vec(1u32..5, 0..6).prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            Partition::new(v)
        })
    }

    proptest! {
        #[test]
        fn conjugate_involution(lam in arb_partition()) {
            prop_assert_eq!(lam.conjugate().conjugate(), lam.clone());
            prop_assert_eq!(lam.conjugate().weight(), lam.weight());
        }
    }
}
