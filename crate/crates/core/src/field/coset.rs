use num_rational::Ratio;

use super::fq::FqElem;
use super::{LocalElement, LocalField};
use crate::error::{Error, Result};

/// The quotient P^low / P^high: cells are cosets of P^high inside P^low.
///
/// Cell indices encode the digits d_low, ..., d_{high-1} in base q with d_low
/// fastest. Functions on D at level k use the window (0, k).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub low: i32,
    pub high: i32,
}

impl Window {
    pub fn new(low: i32, high: i32) -> Result<Self> {
        if high < low {
            return Err(Error::param(format!("empty window P^{low}/P^{high}")));
        }
        Ok(Window { low, high })
    }

    /// The window D / P^k.
    pub fn on_d(k: u32) -> Self {
        Window {
            low: 0,
            high: k as i32,
        }
    }

    pub fn len(&self) -> u32 {
        (self.high - self.low) as u32
    }

    pub fn is_empty(&self) -> bool {
        self.high == self.low
    }

    /// Position of the first nonzero digit of a cell, or `None` for the core cell P^high.
    pub fn cell_valuation(&self, q: usize, index: usize) -> Option<i32> {
        if index == 0 {
            return None;
        }
        let mut m = index;
        let mut pos = self.low;
        while m % q == 0 {
            m /= q;
            pos += 1;
        }
        Some(pos)
    }
}

/// A coset x + P^k of D, given by the digits d_0 .. d_{k-1} of its representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CosetIndex {
    pub level: u32,
    pub word: Vec<FqElem>,
}

impl CosetIndex {
    pub fn new(field: &LocalField, word: Vec<FqElem>) -> Result<Self> {
        if word.iter().any(|d| d.0 >= field.q()) {
            return Err(Error::param("coset word digit outside F_q"));
        }
        Ok(CosetIndex {
            level: word.len() as u32,
            word,
        })
    }

    pub fn from_index(field: &LocalField, level: u32, index: usize) -> Result<Self> {
        let q = field.q() as usize;
        if index >= field.cells(level)? {
            return Err(Error::param(format!("coset index {index} >= q^{level}")));
        }
        let mut m = index;
        let word = (0..level)
            .map(|_| {
                let d = FqElem((m % q) as u32);
                m /= q;
                d
            })
            .collect();
        Ok(CosetIndex { level, word })
    }

    pub fn index(&self, q: u32) -> usize {
        self.word
            .iter()
            .rev()
            .fold(0usize, |acc, d| acc * q as usize + d.0 as usize)
    }

    pub fn representative(&self, field: &LocalField) -> LocalElement {
        LocalElement::from_cell(field, Window::on_d(self.level), self.index(field.q()))
    }
}

/// A ball h + P^level inside the ambient group P^ambient.
///
/// `index` encodes the digits of h at positions ambient .. level-1 (d_ambient fastest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ball {
    pub q: u32,
    pub ambient: i32,
    pub level: i32,
    pub index: usize,
}

impl Ball {
    pub fn new(q: u32, ambient: i32, level: i32, index: usize) -> Result<Self> {
        if level < ambient {
            return Err(Error::param(format!(
                "ball level {level} coarser than the ambient P^{ambient}"
            )));
        }
        let count = (q as usize)
            .checked_pow((level - ambient) as u32)
            .ok_or_else(|| Error::param("ball index space too large"))?;
        if index >= count {
            return Err(Error::param(format!("ball index {index} >= q^{}", level - ambient)));
        }
        Ok(Ball {
            q,
            ambient,
            level,
            index,
        })
    }

    /// The ideal P^level itself.
    pub fn ideal(q: u32, ambient: i32, level: i32) -> Result<Self> {
        Self::new(q, ambient, level, 0)
    }

    /// The ball of level `level` inside D containing the level-k cell `cell`.
    pub fn containing_cell(q: u32, level: u32, cell: usize) -> Self {
        Ball {
            q,
            ambient: 0,
            level: level as i32,
            index: cell % (q as usize).pow(level),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.index == 0
    }

    /// Valuation of the centre when the ball misses 0.
    pub fn center_valuation(&self) -> Option<i32> {
        Window::new(self.ambient, self.level)
            .ok()?
            .cell_valuation(self.q as usize, self.index)
    }

    pub fn center(&self, field: &LocalField) -> LocalElement {
        LocalElement::from_cell(
            field,
            Window {
                low: self.ambient,
                high: self.level,
            },
            self.index,
        )
    }

    /// Range of level-k cells (window `(ambient, k)`) covered by the ball, as a
    /// residue class: cells i with i mod q^(level-ambient) == index.
    pub fn contains_cell(&self, k: i32, cell: usize) -> bool {
        debug_assert!(k >= self.level);
        cell % (self.q as usize).pow((self.level - self.ambient) as u32) == self.index
    }
}

/// Haar measure q^{-level}, normalized so that |D| = 1.
pub fn haar_measure(b: &Ball) -> Ratio<i128> {
    let q = b.q as i128;
    if b.level >= 0 {
        Ratio::new(1, q.pow(b.level as u32))
    } else {
        Ratio::from_integer(q.pow((-b.level) as u32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallRelation {
    Disjoint,
    AContainsB,
    BContainsA,
    Equal,
}

/// Nested-or-disjoint relation of two balls in the same ambient group.
pub fn ball_relation(a: &Ball, b: &Ball) -> Result<BallRelation> {
    if a.q != b.q || a.ambient != b.ambient {
        return Err(Error::param("balls live in different windows"));
    }
    let prefix = |coarse: &Ball, fine: &Ball| {
        fine.index % (coarse.q as usize).pow((coarse.level - coarse.ambient) as u32) == coarse.index
    };
    Ok(if a.level == b.level {
        if a.index == b.index {
            BallRelation::Equal
        } else {
            BallRelation::Disjoint
        }
    } else if a.level < b.level {
        if prefix(a, b) {
            BallRelation::AContainsB
        } else {
            BallRelation::Disjoint
        }
    } else if prefix(b, a) {
        BallRelation::BContainsA
    } else {
        BallRelation::Disjoint
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_examples() {
        assert_eq!(haar_measure(&Ball::ideal(2, 0, 0).unwrap()), Ratio::from_integer(1));
        assert_eq!(haar_measure(&Ball::ideal(3, 0, 2).unwrap()), Ratio::new(1, 9));
        assert_eq!(haar_measure(&Ball::ideal(2, -1, -1).unwrap()), Ratio::from_integer(2));
    }

    #[test]
    fn relation_examples() {
        let d = Ball::ideal(2, 0, 0).unwrap();
        let p1 = Ball::ideal(2, 0, 1).unwrap();
        let other = Ball::new(2, 0, 1, 1).unwrap();
        assert_eq!(ball_relation(&d, &d).unwrap(), BallRelation::Equal);
        assert_eq!(ball_relation(&d, &p1).unwrap(), BallRelation::AContainsB);
        assert_eq!(ball_relation(&p1, &d).unwrap(), BallRelation::BContainsA);
        assert_eq!(ball_relation(&p1, &other).unwrap(), BallRelation::Disjoint);
    }

    #[test]
    fn nested_or_disjoint_matches_cell_sets() {
        let q = 3u32;
        let k = 3;
        let balls: Vec<Ball> = (-1..=k)
            .flat_map(|j| {
                let n = 3usize.pow((j + 1) as u32);
                (0..n).map(move |i| Ball::new(q, -1, j, i).unwrap())
            })
            .collect();
        let cells = 3usize.pow((k + 1) as u32);
        for a in &balls {
            let sa: Vec<bool> = (0..cells).map(|c| a.contains_cell(k, c)).collect();
            for b in &balls {
                let sb: Vec<bool> = (0..cells).map(|c| b.contains_cell(k, c)).collect();
                let inter = sa.iter().zip(&sb).any(|(x, y)| *x && *y);
                let a_in_b = sa.iter().zip(&sb).all(|(x, y)| !*x || *y);
                let b_in_a = sa.iter().zip(&sb).all(|(x, y)| *x || !*y);
                let expect = match (inter, a_in_b, b_in_a) {
                    (false, _, _) => BallRelation::Disjoint,
                    (true, true, true) => BallRelation::Equal,
                    (true, false, true) => BallRelation::AContainsB,
                    (true, true, false) => BallRelation::BContainsA,
                    _ => panic!("partial overlap"),
                };
                assert_eq!(ball_relation(a, b).unwrap(), expect);
            }
        }
    }

    #[test]
    fn coset_index_round_trip() {
        let f = LocalField::laurent(2, 2).unwrap();
        for i in 0..64 {
            let c = CosetIndex::from_index(&f, 3, i).unwrap();
            assert_eq!(c.index(4), i);
            assert_eq!(c.representative(&f).cell_index(Window::on_d(3)).unwrap(), i);
        }
    }
}
