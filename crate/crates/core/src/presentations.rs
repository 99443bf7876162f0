//! Group presentations and the relator moves acting on them.
//!
//! Relator indices in [`AcMove`] are 1-based, matching the generator
//! numbering and the on-disk certificate format.

use crate::snf;
use crate::words::{Letter, Word};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// `<x_1..x_g | r_1..r_k>`; relators are stored reduced.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct GroupPresentation {
    generators: usize,
    relators: Vec<Word>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("relator mentions generator {found} but the presentation has {max} generators")]
    GeneratorOutOfRange { found: u32, max: usize },
    #[error("move index {index} out of range (1..={len})")]
    InvalidIndex { index: usize, len: usize },
    #[error("concat requires two distinct relator indices")]
    ConcatSameIndex,
    #[error("destabilize blocked: no generator with a lone single-letter relator")]
    DestabilizeBlocked,
}

impl GroupPresentation {
    pub fn new(generators: usize, relators: Vec<Word>) -> Result<Self, PresentationError> {
        for r in &relators {
            let found = r.max_generator();
            if found as usize > generators {
                return Err(PresentationError::GeneratorOutOfRange {
                    found,
                    max: generators,
                });
            }
        }
        Ok(GroupPresentation {
            generators,
            relators,
        })
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn relator(&self, index1: usize) -> Option<&Word> {
        self.relators.get(index1.wrapping_sub(1))
    }

    pub fn total_relator_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    /// Apply one move; returns the new presentation.
    pub fn apply_move(&self, m: &AcMove) -> Result<GroupPresentation, PresentationError> {
        let check = |i: usize| -> Result<usize, PresentationError> {
            if i >= 1 && i <= self.relators.len() {
                Ok(i - 1)
            } else {
                Err(PresentationError::InvalidIndex {
                    index: i,
                    len: self.relators.len(),
                })
            }
        };
        let mut out = self.clone();
        match m {
            AcMove::Concat { i, j } => {
                if i == j {
                    return Err(PresentationError::ConcatSameIndex);
                }
                let i = check(*i)?;
                let j = check(*j)?;
                out.relators[i] = self.relators[i].concat(&self.relators[j]);
            }
            AcMove::Invert { i } => {
                let i = check(*i)?;
                out.relators[i] = self.relators[i].inverse();
            }
            AcMove::Conjugate { i, u } => {
                let i = check(*i)?;
                if u.max_generator() as usize > self.generators {
                    return Err(PresentationError::GeneratorOutOfRange {
                        found: u.max_generator(),
                        max: self.generators,
                    });
                }
                out.relators[i] = self.relators[i].conjugated_by(u);
            }
            AcMove::Stabilize => {
                out.generators += 1;
                out.relators.push(Word::letter(Letter::positive(out.generators as u32)));
            }
            AcMove::Destabilize => {
                let g = out.generators as u32;
                if g == 0 {
                    return Err(PresentationError::DestabilizeBlocked);
                }
                let lone = out.relators.iter().position(|r| {
                    r.len() == 1 && r.letters()[0].generator() == g
                });
                let Some(pos) = lone else {
                    return Err(PresentationError::DestabilizeBlocked);
                };
                let used_elsewhere = out
                    .relators
                    .iter()
                    .enumerate()
                    .any(|(k, r)| k != pos && r.count_generator(g) > 0);
                if used_elsewhere {
                    return Err(PresentationError::DestabilizeBlocked);
                }
                out.relators.remove(pos);
                out.generators -= 1;
            }
        }
        Ok(out)
    }

    /// Deterministic representative of the orbit under relator permutation,
    /// inversion, and conjugation: each relator is replaced by the
    /// lexicographically least rotation of its cyclically reduced core or of
    /// the core's inverse, and the list is sorted.
    pub fn canonical_form(&self) -> GroupPresentation {
        let mut relators: Vec<Word> = self
            .relators
            .iter()
            .map(|r| {
                let (core, _) = r.cyclic_reduce();
                orbit_min(&core)
            })
            .collect();
        relators.sort();
        GroupPresentation {
            generators: self.generators,
            relators,
        }
    }

    /// Elementary divisors and free rank of the abelianization, computed
    /// from the generator x relator exponent-sum matrix.
    pub fn abelian_invariants(&self) -> AbelianInvariants {
        let rows: Vec<Vec<BigInt>> = (1..=self.generators as u32)
            .map(|g| {
                self.relators
                    .iter()
                    .map(|r| BigInt::from(r.exponent_sum(g)))
                    .collect()
            })
            .collect();
        let divisors = snf::elementary_divisors(rows);
        let free_rank = self.generators - divisors.len();
        AbelianInvariants {
            divisors,
            free_rank,
        }
    }

    /// True iff for each generator `1..=m` some relator is exactly that
    /// single positive letter (remaining relators are unconstrained excess).
    pub fn is_m_trivial(&self, m: usize) -> bool {
        if m > self.generators {
            return false;
        }
        (1..=m as u32).all(|g| {
            self.relators
                .iter()
                .any(|r| r.len() == 1 && r.letters()[0] == Letter::positive(g))
        })
    }
}

fn orbit_min(core: &Word) -> Word {
    let mut best = core.clone();
    let inv = core.inverse();
    for k in 0..core.len().max(1) {
        let a = core.rotated(k);
        if a < best {
            best = a;
        }
        let b = inv.rotated(k);
        if b < best {
            best = b;
        }
    }
    best
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} | ", self.generators)?;
        for (i, r) in self.relators.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", r)?;
        }
        f.write_str(">")
    }
}

/// Invariants of the abelianized group: nonzero elementary divisors plus the
/// rank of the free part.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AbelianInvariants {
    #[serde(serialize_with = "crate::alexander::serialize_bigints")]
    pub divisors: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    pub fn divisors_i64(&self) -> Vec<i64> {
        self.divisors
            .iter()
            .map(|d| i64::try_from(d).expect("divisor fits i64"))
            .collect()
    }

    /// Isomorphism invariants of the abelianized group: the divisors
    /// greater than one plus the free rank. Unit divisors only record the
    /// presentation's shape, so they are dropped when comparing groups
    /// presented with different generator counts.
    pub fn canonical(&self) -> (Vec<BigInt>, usize) {
        use num_traits::One;
        (
            self.divisors
                .iter()
                .filter(|d| !d.is_one())
                .cloned()
                .collect(),
            self.free_rank,
        )
    }
}

/// A relator move. `i`, `j` are 1-based relator indices.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum AcMove {
    /// Replace `r_i` by `r_i r_j`, `i != j`.
    Concat { i: usize, j: usize },
    /// Replace `r_i` by its inverse.
    #[serde(rename = "inv")]
    Invert { i: usize },
    /// Replace `r_i` by `u r_i u^-1`.
    #[serde(rename = "conj")]
    Conjugate { i: usize, u: Word },
    /// Add a generator `x_{g+1}` and the relator `x_{g+1}`.
    #[serde(rename = "stab")]
    Stabilize,
    /// Remove the last generator when its lone single-letter relator exists
    /// and it appears in no other relator.
    #[serde(rename = "destab")]
    Destabilize,
}

/// A replayable witness: applying `moves` to the start presentation must
/// reproduce `claimed_final` exactly.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AcCertificate {
    pub moves: Vec<AcMove>,
    pub claimed_final: GroupPresentation,
}

impl AcCertificate {
    pub fn empty(p: &GroupPresentation) -> Self {
        AcCertificate {
            moves: Vec::new(),
            claimed_final: p.clone(),
        }
    }
}

/// Replay a certificate; true iff every move applies, the final presentation
/// equals `claimed_final` exactly, and that presentation is `m`-trivial.
pub fn verify_certificate(p: &GroupPresentation, cert: &AcCertificate, target_m: usize) -> bool {
    let mut cur = p.clone();
    for m in &cert.moves {
        match cur.apply_move(m) {
            Ok(next) => cur = next,
            Err(_) => return false,
        }
    }
    cur == cert.claimed_final && cur.is_m_trivial(target_m)
}
