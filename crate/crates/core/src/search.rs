//! Brute-force spectrum existence for finite windows, as a clique search.
//!
//! `μ̂` of a finite window is `B_n`-periodic and a spectrum reduces
//! injectively mod `B_n`, so a spectrum containing 0 exists iff the graph on
//! `{0} ∪ (Z(μ̂) ∩ [0, B_n))` with edges "difference in Z(μ̂)" has a clique of
//! size equal to the atom count. Vertices live on the grid `(1/lcm(a_k N_k))·Z`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::MeasureWindow;
use crate::rational::{from_biguint, Rational};
use crate::spectra::{atom_count, CandidateSet, PairOracle};

pub const DEFAULT_VERTEX_BUDGET: usize = 5000;

/// Fixed-size bitset over vertex indices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    /// Clears every index `≤ i`.
    fn above(&self, i: usize) -> Bits {
        let mut out = self.clone();
        for w in out.0.iter_mut().take(i / 64) {
            *w = 0;
        }
        let keep = if i % 64 == 63 {
            0
        } else {
            !0u64 << (i % 64 + 1)
        };
        out.0[i / 64] &= keep;
        out
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + t)
            })
        })
    }
}

/// Zero-set residues in `(0, B_n)`, sorted; `None` once more than `limit` are found.
fn zero_residues(window: &MeasureWindow<'_>, limit: usize) -> Result<Option<Vec<Rational>>> {
    let factors = window.factors()?;
    let period = from_biguint(&factors.last().expect("nonempty window").1);
    let mut found = BTreeSet::new();
    for (level, product) in &factors {
        if level.count < 2 {
            continue;
        }
        let step = level.stratum_step(product);
        let steps = (&period / &step).ceil().to_integer();
        let count = BigInt::from(level.count);
        let mut m = BigInt::one();
        while m < steps {
            if !m.is_multiple_of(&count) {
                found.insert(&step * Rational::from_integer(m.clone()));
                if found.len() > limit {
                    return Ok(None);
                }
            }
            m += 1;
        }
    }
    Ok(Some(found.into_iter().collect()))
}

/// Lexicographically least spectrum containing 0 of a finite window, if any.
pub fn spectrum_search(window: &MeasureWindow<'_>, budget: usize) -> Result<Option<CandidateSet>> {
    if !window.is_finite() {
        return Err(Error::InvalidWindow("search needs a finite window".into()));
    }
    let (target, _) = atom_count(window)?;
    let mut vertices = vec![Rational::zero()];
    match zero_residues(window, budget.saturating_sub(1))? {
        Some(residues) => vertices.extend(residues),
        None => {
            return Err(Error::BudgetExceeded {
                needed: budget + 1,
                budget,
            })
        }
    }
    if vertices.len() < target {
        return Ok(None);
    }
    let oracle = PairOracle::new(window, &vertices)?;
    let n = vertices.len();
    let adjacency: Vec<Bits> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Bits::new(n);
            for j in 1..n {
                if j != i && oracle.in_zero_set(i, j) {
                    row.set(j);
                }
            }
            row
        })
        .collect();

    // 0 is adjacent to every other vertex by construction; extend from there.
    let mut clique = vec![0usize];
    let candidates = adjacency[0].clone();
    if extend(&adjacency, &mut clique, candidates, target) {
        Ok(Some(
            clique.into_iter().map(|i| vertices[i].clone()).collect(),
        ))
    } else {
        Ok(None)
    }
}

/// Depth-first search in ascending vertex order, so the first clique found is
/// the lexicographically least.
fn extend(adjacency: &[Bits], clique: &mut Vec<usize>, candidates: Bits, target: usize) -> bool {
    if clique.len() == target {
        return true;
    }
    if clique.len() + candidates.count() < target {
        return false;
    }
    for v in candidates.iter() {
        let remaining = candidates.above(v);
        if clique.len() + 1 + remaining.count() < target {
            return false;
        }
        clique.push(v);
        if extend(adjacency, clique, remaining.and(&adjacency[v]), target) {
            return true;
        }
        clique.pop();
    }
    false
}
