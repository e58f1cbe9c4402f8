//! Breadth-first enumeration of Cayley balls.

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;

use crate::matrices::SquareMatrix;
use crate::scalar::Field;

use super::{Letter, MatrixGroup, Word};

const ROOT: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Entry {
    length: u32,
    parent: u32,
    letter: Letter,
}

/// How frontier expansion is scheduled. The resulting ball is the same.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    Sequential,
    Parallel,
}

/// All group elements of word length at most `completed_radius`, each with
/// its exact length and a geodesic word.
#[derive(Clone, Debug)]
pub struct CayleyBall<S: Field> {
    requested: u32,
    completed: u32,
    closed: bool,
    index: IndexMap<SquareMatrix<S>, Entry>,
    /// `layers[r]` is the index of the first element of length `r`.
    layers: Vec<usize>,
}

/// Word length as read from a ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum WordLength {
    Exact(u32),
    /// Not in the ball: the length exceeds the completed radius.
    GreaterThan(u32),
    /// The ball is the whole (finite) group and does not contain the matrix.
    NotInGroup,
}

impl WordLength {
    pub fn exact(self) -> Option<u32> {
        match self {
            WordLength::Exact(n) => Some(n),
            _ => None,
        }
    }
}

impl<S: Field> CayleyBall<S> {
    pub fn requested_radius(&self) -> u32 {
        self.requested
    }

    /// Radius up to which the ball is known to be complete.
    pub fn completed_radius(&self) -> u32 {
        self.completed
    }

    /// True when the requested radius was reached.
    pub fn is_complete(&self) -> bool {
        self.completed >= self.requested
    }

    /// True when a layer came out empty, so the ball is the whole group.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn contains(&self, m: &SquareMatrix<S>) -> bool {
        self.index.contains_key(m)
    }

    /// Elements with their lengths, in breadth-first order.
    pub fn iter(&self) -> impl Iterator<Item = (&SquareMatrix<S>, u32)> {
        self.index.iter().map(|(m, e)| (m, e.length))
    }

    pub fn element(&self, i: usize) -> Option<(&SquareMatrix<S>, u32)> {
        self.index.get_index(i).map(|(m, e)| (m, e.length))
    }

    /// Elements of length exactly `r`.
    pub fn sphere(&self, r: u32) -> impl Iterator<Item = &SquareMatrix<S>> {
        let r = r as usize;
        let (start, end) = match (self.layers.get(r), self.layers.get(r + 1)) {
            (Some(&s), Some(&e)) => (s, e),
            (Some(&s), None) => (s, self.index.len()),
            _ => (0, 0),
        };
        (start..end).map(move |i| self.index.get_index(i).expect("in range").0)
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        (0..self.layers.len())
            .map(|r| self.layers.get(r + 1).copied().unwrap_or(self.index.len()) - self.layers[r])
            .collect()
    }

    pub fn length(&self, m: &SquareMatrix<S>) -> WordLength {
        match self.index.get(m) {
            Some(e) => WordLength::Exact(e.length),
            None if self.closed => WordLength::NotInGroup,
            None => WordLength::GreaterThan(self.completed),
        }
    }

    /// A geodesic word for `m`, if it lies in the ball.
    pub fn word(&self, m: &SquareMatrix<S>) -> Option<Word> {
        let mut i = self.index.get_index_of(m)?;
        let mut letters = Vec::new();
        loop {
            let e = self.index[i];
            if e.parent == ROOT {
                break;
            }
            letters.push(e.letter);
            i = e.parent as usize;
        }
        letters.reverse();
        Some(Word(letters))
    }

    /// The element → length map, for comparisons.
    pub fn length_map(&self) -> Vec<(SquareMatrix<S>, u32)> {
        self.index.iter().map(|(m, e)| (m.clone(), e.length)).collect()
    }
}

/// The ball of `radius` in `group`, stopping early once it would hold more
/// than `budget` elements. Parallel frontier expansion.
pub fn bfs_ball<S: Field>(group: &MatrixGroup<S>, radius: u32, budget: usize) -> CayleyBall<S> {
    bfs_ball_with(group, radius, budget, Schedule::Parallel)
}

pub fn bfs_ball_with<S: Field>(group: &MatrixGroup<S>, radius: u32, budget: usize, schedule: Schedule) -> CayleyBall<S> {
    let letters: Vec<(Letter, &SquareMatrix<S>)> =
        group.letters().iter().map(|&l| (l, group.letter_matrix(l).expect("valid letter"))).collect();
    let mut index = IndexMap::new();
    index.insert(group.identity(), Entry { length: 0, parent: ROOT, letter: Letter { gen: 0, inverse: false } });
    let mut layers = vec![0usize];
    let mut completed = 0;
    let mut closed = false;
    while completed < radius {
        let start = *layers.last().expect("nonempty");
        let end = index.len();
        let expand = |i: usize| {
            let (m, _) = index.get_index(i).expect("in range");
            letters
                .iter()
                .filter_map(|(l, s)| {
                    let p = m.mul(s);
                    (!index.contains_key(&p)).then_some((p, i as u32, *l))
                })
                .collect::<Vec<_>>()
        };
        let candidates: Vec<(SquareMatrix<S>, u32, Letter)> = match schedule {
            Schedule::Parallel => (start..end).into_par_iter().flat_map_iter(expand).collect(),
            Schedule::Sequential => (start..end).flat_map(expand).collect(),
        };
        let length = completed + 1;
        let mut overflow = false;
        for (m, parent, letter) in candidates {
            if index.contains_key(&m) {
                continue;
            }
            if index.len() >= budget {
                overflow = true;
                break;
            }
            index.insert(m, Entry { length, parent, letter });
        }
        if overflow {
            index.truncate(end);
            break;
        }
        if index.len() == end {
            closed = true;
            completed = radius;
            break;
        }
        layers.push(end);
        completed = length;
    }
    CayleyBall { requested: radius, completed, closed, index, layers }
}

/// Exact word length from the ball, or the bound it implies.
pub fn word_length<S: Field>(ball: &CayleyBall<S>, m: &SquareMatrix<S>) -> WordLength {
    ball.length(m)
}
