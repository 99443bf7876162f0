//! The abstract banded-unlink calculus: circles, bands with passage words,
//! and the moves acting on them.
//!
//! A presentation holds `n` unlink circles and a list of bands. Each band
//! runs from a source circle to a target circle and carries a passage word:
//! the ordered signed sequence of its piercings through the spanning disks
//! `D_1..D_n`. The induced group presentation takes one relator
//! `w · x_s · w^-1 · x_t^-1` per band, so a band identifies the target
//! meridian with a conjugate of the source meridian.
//!
//! All indices (circles, bands, letter positions) are 1-based, matching the
//! file formats.

use crate::presentations::GroupPresentation;
use crate::words::{Letter, Word};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("diagram must have at least one circle")]
    NoCircles,
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("band index {index} out of range (1..={len})")]
    BandIndexOutOfRange { index: usize, len: usize },
    #[error("circle index {index} out of range (1..={len})")]
    CircleIndexOutOfRange { index: usize, len: usize },
    #[error("position {position} out of range for word of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("no letter matching the pass at position {position}")]
    LetterMismatch { position: usize },
    #[error("move precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("band graph is not a tree on all circles")]
    NotATree,
    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
}

/// A band from `source` to `target` carrying its passage word.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Band {
    #[serde(rename = "from")]
    pub source: usize,
    #[serde(rename = "to")]
    pub target: usize,
    pub word: Word,
}

impl Band {
    pub fn new(source: usize, target: usize, word: Word) -> Self {
        Band {
            source,
            target,
            word,
        }
    }

    /// The same geometric band read in the other direction.
    pub fn reversed(&self) -> Band {
        Band {
            source: self.target,
            target: self.source,
            word: self.word.inverse(),
        }
    }

    /// Relator `w · x_s · w^-1 · x_t^-1`, reduced.
    pub fn relator(&self) -> Word {
        self.word
            .concat(&Word::letter(Letter::positive(self.source as u32)))
            .concat(&self.word.inverse())
            .concat(&Word::letter(Letter::negative(self.target as u32)))
    }

    fn endpoint(&self, end: BandEnd) -> usize {
        match end {
            BandEnd::Source => self.source,
            BandEnd::Target => self.target,
        }
    }
}

/// Which end of a band a move refers to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandEnd {
    Source,
    Target,
}

/// An abstract banded unlink diagram: `circles` unlink components and the
/// bands attached to them.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawDiagram")]
pub struct RibbonPresentation {
    pub circles: usize,
    pub bands: Vec<Band>,
}

#[derive(Deserialize)]
struct RawDiagram {
    circles: usize,
    bands: Vec<Band>,
}

impl TryFrom<RawDiagram> for RibbonPresentation {
    type Error = DiagramError;
    fn try_from(raw: RawDiagram) -> Result<Self, DiagramError> {
        RibbonPresentation::new(raw.circles, raw.bands)
    }
}

/// Structural findings reported by [`RibbonPresentation::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub circles: usize,
    pub bands: usize,
    pub endpoints_in_range: bool,
    pub letters_in_range: bool,
    pub connected: bool,
    pub band_graph_is_tree: bool,
    /// Tree band graph on all circles: the shape presenting a single disk.
    pub disk_presentation: bool,
    pub issues: Vec<String>,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.endpoints_in_range && self.letters_in_range && self.connected
    }
}

impl RibbonPresentation {
    pub fn new(circles: usize, bands: Vec<Band>) -> Result<Self, DiagramError> {
        if circles == 0 {
            return Err(DiagramError::NoCircles);
        }
        Ok(RibbonPresentation { circles, bands })
    }

    pub fn band(&self, index1: usize) -> Result<&Band, DiagramError> {
        self.bands
            .get(index1.wrapping_sub(1))
            .ok_or(DiagramError::BandIndexOutOfRange {
                index: index1,
                len: self.bands.len(),
            })
    }

    /// Structural diagnostics: index ranges, connectivity, tree condition.
    pub fn validate(&self) -> Diagnostics {
        let mut issues = Vec::new();
        let n = self.circles;
        let mut endpoints_in_range = true;
        let mut letters_in_range = true;
        for (b, band) in self.bands.iter().enumerate() {
            for (role, c) in [("from", band.source), ("to", band.target)] {
                if c < 1 || c > n {
                    endpoints_in_range = false;
                    issues.push(format!("bands[{}].{}: circle {} out of range", b + 1, role, c));
                }
            }
            for l in band.word.iter() {
                if l.generator() as usize > n {
                    letters_in_range = false;
                    issues.push(format!(
                        "bands[{}].word: letter references circle {} of {}",
                        b + 1,
                        l.generator(),
                        n
                    ));
                }
            }
        }

        let mut connected = false;
        let mut band_graph_is_tree = false;
        if endpoints_in_range {
            let mut dsu: Vec<usize> = (0..n).collect();
            fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
                if dsu[x] != x {
                    let root = find(dsu, dsu[x]);
                    dsu[x] = root;
                }
                dsu[x]
            }
            let mut acyclic = true;
            for band in &self.bands {
                let (a, b) = (band.source - 1, band.target - 1);
                let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
                if ra == rb {
                    acyclic = false;
                } else {
                    dsu[ra] = rb;
                }
            }
            let roots: std::collections::BTreeSet<usize> =
                (0..n).map(|x| find(&mut dsu, x)).collect();
            connected = roots.len() == 1;
            band_graph_is_tree = connected && acyclic && self.bands.len() == n - 1;
            if !connected {
                issues.push("band graph is disconnected".to_string());
            }
        }

        Diagnostics {
            circles: n,
            bands: self.bands.len(),
            endpoints_in_range,
            letters_in_range,
            connected,
            band_graph_is_tree,
            disk_presentation: band_graph_is_tree,
            issues,
        }
    }

    pub fn is_disk_presentation(&self) -> bool {
        self.validate().disk_presentation
    }

    fn ensure_valid(&self) -> Result<(), DiagramError> {
        let d = self.validate();
        if d.endpoints_in_range && d.letters_in_range {
            Ok(())
        } else {
            Err(DiagramError::InvalidPresentation(d.issues.join("; ")))
        }
    }

    /// The induced group presentation: one meridian generator per circle,
    /// one relator per band.
    pub fn group(&self) -> Result<GroupPresentation, DiagramError> {
        self.ensure_valid()?;
        let relators = self.bands.iter().map(Band::relator).collect();
        GroupPresentation::new(self.circles, relators)
            .map_err(|e| DiagramError::InvalidPresentation(e.to_string()))
    }

    /// All passage words empty and the band graph a tree on all circles.
    pub fn is_syntactically_trivial(&self) -> bool {
        self.bands.iter().all(|b| b.word.is_empty()) && self.validate().band_graph_is_tree
    }

    /// Apply a move, returning the new presentation.
    pub fn apply(&self, m: &DiagramMove) -> Result<RibbonPresentation, DiagramError> {
        self.ensure_valid()?;
        let mut out = self.clone();
        match *m {
            DiagramMove::ReducePair { band, position } => {
                let b = self.band(band)?;
                let len = b.word.len();
                if position == 0 || position + 1 > len {
                    return Err(DiagramError::PositionOutOfRange { position, len });
                }
                let letters = b.word.letters();
                if !letters[position - 1].cancels(&letters[position]) {
                    return Err(DiagramError::PreconditionViolated(
                        "letters at the position do not cancel".to_string(),
                    ));
                }
                // Unreachable on reduced storage, kept for script replay.
                let mut new: Vec<Letter> = letters.to_vec();
                new.drain(position - 1..=position);
                out.bands[band - 1].word = Word::from_letters(new);
            }
            DiagramMove::InsertPair {
                band,
                position,
                generator,
                sign,
            } => {
                let b = self.band(band)?;
                let len = b.word.len();
                if position == 0 || position > len + 1 {
                    return Err(DiagramError::PositionOutOfRange { position, len });
                }
                if generator as usize > self.circles || generator == 0 {
                    return Err(DiagramError::CircleIndexOutOfRange {
                        index: generator as usize,
                        len: self.circles,
                    });
                }
                let mut new: Vec<Letter> = b.word.letters().to_vec();
                new.insert(position - 1, Letter::new(generator, -sign));
                new.insert(position - 1, Letter::new(generator, sign));
                // a cancelling pair reduces away: the move is sound but inert
                out.bands[band - 1].word = Word::from_letters(new);
            }
            DiagramMove::EndReduce { band, end } => {
                let b = self.band(band)?;
                // "source-adjacent" is adjacency to x_s in the relator
                // w·x_s·w^-1·x_t^-1: the last letter of w. Deleting it when it
                // is x_s^±1 cancels inside the relator; deleting a leading
                // x_t^±1 conjugates the relator. Both fix the normal closure.
                let (idx, circle) = match end {
                    BandEnd::Source => (b.word.len().checked_sub(1), b.source),
                    BandEnd::Target => ((!b.word.is_empty()).then_some(0), b.target),
                };
                let Some(idx) = idx else {
                    return Err(DiagramError::PreconditionViolated(
                        "band word is empty".to_string(),
                    ));
                };
                if b.word.letters()[idx].generator() as usize != circle {
                    return Err(DiagramError::PreconditionViolated(format!(
                        "letter at the {} end is not x{}",
                        match end {
                            BandEnd::Source => "source",
                            BandEnd::Target => "target",
                        },
                        circle
                    )));
                }
                let mut new: Vec<Letter> = b.word.letters().to_vec();
                new.remove(idx);
                out.bands[band - 1].word = Word::from_letters(new);
            }
            DiagramMove::SlideEnd {
                band,
                band_end,
                over,
                over_end,
            } => {
                if band == over {
                    return Err(DiagramError::PreconditionViolated(
                        "a band cannot slide over itself".to_string(),
                    ));
                }
                let b = self.band(band)?;
                let o = self.band(over)?;
                if b.endpoint(band_end) != o.endpoint(over_end) {
                    return Err(DiagramError::PreconditionViolated(format!(
                        "band {} {:?} end is on circle {}, band {} {:?} end is on circle {}",
                        band,
                        band_end,
                        b.endpoint(band_end),
                        over,
                        over_end,
                        o.endpoint(over_end)
                    )));
                }
                // View both bands so the shared circle is each one's target,
                // slide, then restore the slid band's stored orientation.
                let bv = match band_end {
                    BandEnd::Target => b.clone(),
                    BandEnd::Source => b.reversed(),
                };
                let ov = match over_end {
                    BandEnd::Target => o.clone(),
                    BandEnd::Source => o.reversed(),
                };
                let slid = Band::new(bv.source, ov.source, ov.word.inverse().concat(&bv.word));
                out.bands[band - 1] = match band_end {
                    BandEnd::Target => slid,
                    BandEnd::Source => slid.reversed(),
                };
            }
            DiagramMove::Swim {
                band,
                through,
                position,
                inverted,
            } => {
                if band == through {
                    return Err(DiagramError::PreconditionViolated(
                        "a band cannot swim through itself".to_string(),
                    ));
                }
                let b = self.band(band)?;
                let t = self.band(through)?;
                let len = b.word.len();
                if position > len + 1 || position == 0 {
                    return Err(DiagramError::PositionOutOfRange { position, len });
                }
                let relator = if inverted {
                    t.relator().inverse()
                } else {
                    t.relator()
                };
                let letters = b.word.letters();
                let new = Word::from_letters(
                    letters[..position - 1]
                        .iter()
                        .copied()
                        .chain(relator.iter().copied())
                        .chain(letters[position - 1..].iter().copied()),
                );
                out.bands[band - 1].word = new;
            }
            DiagramMove::Cancel { band } => {
                let b = self.band(band)?.clone();
                if b.source == b.target {
                    return Err(DiagramError::PreconditionViolated(
                        "cannot cancel a self-band".to_string(),
                    ));
                }
                let t = b.target;
                for (k, other) in self.bands.iter().enumerate() {
                    if k != band - 1 && (other.source == t || other.target == t) {
                        return Err(DiagramError::PreconditionViolated(format!(
                            "band {} also attaches to circle {}",
                            k + 1,
                            t
                        )));
                    }
                }
                if b.word.count_generator(t as u32) > 0 {
                    return Err(DiagramError::PreconditionViolated(format!(
                        "cancelling band's own word passes through circle {}",
                        t
                    )));
                }
                // x_t = w x_s w^-1: eliminate the generator by substitution,
                // then reindex circles above t densely.
                let image = b
                    .word
                    .concat(&Word::letter(Letter::positive(b.source as u32)))
                    .concat(&b.word.inverse());
                let reindex = |w: &Word| -> Word {
                    w.substitute(t as u32, &image)
                        .iter()
                        .map(|l| {
                            if (l.generator() as usize) > t {
                                l.shifted(-1)
                            } else {
                                *l
                            }
                        })
                        .collect()
                };
                let shift_circle = |c: usize| if c > t { c - 1 } else { c };
                let mut bands = Vec::with_capacity(self.bands.len() - 1);
                for (k, other) in self.bands.iter().enumerate() {
                    if k == band - 1 {
                        continue;
                    }
                    bands.push(Band::new(
                        shift_circle(other.source),
                        shift_circle(other.target),
                        reindex(&other.word),
                    ));
                }
                out = RibbonPresentation::new(self.circles - 1, bands)?;
            }
            DiagramMove::Intro { at } => {
                if at < 1 || at > self.circles {
                    return Err(DiagramError::CircleIndexOutOfRange {
                        index: at,
                        len: self.circles,
                    });
                }
                out.circles += 1;
                out.bands.push(Band::new(at, out.circles, Word::empty()));
            }
        }
        Ok(out)
    }

    /// Apply a band pass: a single-letter edit of a passage word. This is
    /// not an isotopy move; invariants of the presented surface may change.
    pub fn band_pass(&self, pass: &BandPass) -> Result<RibbonPresentation, DiagramError> {
        self.ensure_valid()?;
        let b = self.band(pass.band)?;
        let len = b.word.len();
        let mut out = self.clone();
        match pass.direction {
            PassDirection::Insert => {
                if pass.position > len + 1 || pass.position == 0 {
                    return Err(DiagramError::PositionOutOfRange {
                        position: pass.position,
                        len,
                    });
                }
                if pass.generator as usize > self.circles || pass.generator == 0 {
                    return Err(DiagramError::CircleIndexOutOfRange {
                        index: pass.generator as usize,
                        len: self.circles,
                    });
                }
                let letters = b.word.letters();
                let new = Word::from_letters(
                    letters[..pass.position - 1]
                        .iter()
                        .copied()
                        .chain(std::iter::once(Letter::new(pass.generator, pass.sign)))
                        .chain(letters[pass.position - 1..].iter().copied()),
                );
                out.bands[pass.band - 1].word = new;
            }
            PassDirection::Delete => {
                let letters = b.word.letters();
                let present = pass.position >= 1
                    && pass.position <= len
                    && letters[pass.position - 1] == Letter::new(pass.generator, pass.sign);
                if !present {
                    return Err(DiagramError::LetterMismatch {
                        position: pass.position,
                    });
                }
                let mut new: Vec<Letter> = letters.to_vec();
                new.remove(pass.position - 1);
                out.bands[pass.band - 1].word = Word::from_letters(new);
            }
        }
        Ok(out)
    }

    /// Apply a script of moves in order.
    pub fn apply_all(&self, moves: &[DiagramMove]) -> Result<RibbonPresentation, DiagramError> {
        let mut cur = self.clone();
        for m in moves {
            cur = cur.apply(m)?;
        }
        Ok(cur)
    }

    /// True iff band `i` connects circles `i` and `i+1` (in either stored
    /// orientation) for every band.
    pub fn is_path_form(&self) -> bool {
        self.bands.len() + 1 == self.circles
            && self.bands.iter().enumerate().all(|(i, b)| {
                let mut ends = [b.source, b.target];
                ends.sort();
                ends == [i + 1, i + 2]
            })
    }

    /// Slide band ends until the band graph is a path, then relabel circles
    /// along it so band `i` joins circles `i` and `i+1`. Requires a tree
    /// band graph; a presentation already in path form is returned as is.
    pub fn to_path_form(&self) -> Result<RibbonPresentation, DiagramError> {
        let d = self.validate();
        if !d.band_graph_is_tree {
            return Err(DiagramError::NotATree);
        }
        if self.is_path_form() {
            return Ok(self.clone());
        }
        let mut cur = self.clone();
        // Walk from a leaf; at each visited circle, keep the lowest-indexed
        // unvisited band as the continuation and slide every other band off
        // to that band's far end.
        let degree = |p: &RibbonPresentation, c: usize| -> usize {
            p.bands
                .iter()
                .filter(|b| b.source == c || b.target == c)
                .count()
        };
        let start = (1..=cur.circles)
            .find(|&c| degree(&cur, c) == 1)
            .expect("a tree has a leaf");
        let mut order = vec![start];
        let mut band_order = Vec::new();
        let mut used = vec![false; cur.bands.len()];
        let mut at = start;
        while order.len() < cur.circles {
            let continuation = (0..cur.bands.len())
                .find(|&k| !used[k] && (cur.bands[k].source == at || cur.bands[k].target == at))
                .expect("connected tree");
            let cont_end = if cur.bands[continuation].source == at {
                BandEnd::Source
            } else {
                BandEnd::Target
            };
            // slide all other bands at this circle over the continuation
            loop {
                let other = (0..cur.bands.len()).find(|&k| {
                    k != continuation
                        && !used[k]
                        && (cur.bands[k].source == at || cur.bands[k].target == at)
                });
                let Some(k) = other else { break };
                let k_end = if cur.bands[k].source == at {
                    BandEnd::Source
                } else {
                    BandEnd::Target
                };
                cur = cur.apply(&DiagramMove::SlideEnd {
                    band: k + 1,
                    band_end: k_end,
                    over: continuation + 1,
                    over_end: cont_end,
                })?;
            }
            used[continuation] = true;
            band_order.push(continuation);
            let b = &cur.bands[continuation];
            at = if b.source == at { b.target } else { b.source };
            order.push(at);
        }
        // relabel circles along the walk and order bands to match
        let mut map = vec![0u32; cur.circles + 1];
        for (new, &old) in order.iter().enumerate() {
            map[old] = new as u32 + 1;
        }
        let relabeled: Vec<Band> = band_order
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let b = &cur.bands[k];
                let word: Word = b
                    .word
                    .iter()
                    .map(|l| Letter::new(map[l.generator() as usize], l.sign()))
                    .collect();
                let (s, t) = (map[b.source] as usize, map[b.target] as usize);
                if s == i + 1 {
                    Band::new(s, t, word)
                } else {
                    Band::new(t, s, word.inverse())
                }
            })
            .collect();
        RibbonPresentation::new(cur.circles, relabeled)
    }
}

/// A move on a banded unlink diagram. All moves except band passes preserve
/// the induced group presentation up to isomorphism.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum DiagramMove {
    /// Delete adjacent cancelling letters. Stored words are already
    /// reduced, so this only matters for scripts over unreduced sources.
    ReducePair { band: usize, position: usize },
    /// Insert a cancelling pair `x_g^s x_g^-s` at the position. Reduction
    /// immediately removes it again; the move is sound but inert.
    InsertPair {
        band: usize,
        position: usize,
        generator: u32,
        sign: i8,
    },
    /// Delete the word letter adjacent to `x_s` (the last letter, when it
    /// is `x_s^±1`) or to `x_t` (the first letter, when it is `x_t^±1`).
    EndReduce { band: usize, end: BandEnd },
    /// Slide an end of `band` along `over`, from the shared circle to the
    /// other end of `over`.
    SlideEnd {
        band: usize,
        band_end: BandEnd,
        over: usize,
        over_end: BandEnd,
    },
    /// Insert the full relator of `through` (or its inverse) into `band`'s
    /// word at the position.
    Swim {
        band: usize,
        through: usize,
        position: usize,
        inverted: bool,
    },
    /// Delete the band together with its target circle, when no other band
    /// attaches there; the target meridian is substituted away.
    Cancel { band: usize },
    /// Add a fresh circle joined to `at` by a new empty band.
    Intro { at: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassDirection {
    Insert,
    Delete,
}

/// A band pass: one signed piercing toggled in one passage word.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct BandPass {
    pub band: usize,
    pub position: usize,
    pub generator: u32,
    pub sign: i8,
    pub direction: PassDirection,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alexander::alexander_polynomial;

    fn w(pairs: &[(u32, i8)]) -> Word {
        Word::from_pairs(pairs)
    }

    fn trivial(n: usize) -> RibbonPresentation {
        RibbonPresentation::new(
            n,
            (1..n).map(|i| Band::new(i, i + 1, Word::empty())).collect(),
        )
        .unwrap()
    }

    fn spun_trefoil() -> RibbonPresentation {
        RibbonPresentation::new(2, vec![Band::new(1, 2, w(&[(1, 1), (2, 1)]))]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(trivial(3).validate().disk_presentation);

        let disconnected = RibbonPresentation::new(2, vec![]).unwrap();
        let d = disconnected.validate();
        assert!(!d.connected);
        assert!(!d.is_valid());

        let ranged = RibbonPresentation::new(2, vec![Band::new(1, 2, w(&[(5, 1)]))]).unwrap();
        let d = ranged.validate();
        assert!(!d.letters_in_range);
    }

    #[test]
    fn group_of_examples() {
        let g = trivial(2).group().unwrap();
        assert_eq!(g.relators(), &[w(&[(1, 1), (2, -1)])]);

        let g = spun_trefoil().group().unwrap();
        assert_eq!(
            g.relators(),
            &[w(&[(1, 1), (2, 1), (1, 1), (2, -1), (1, -1), (2, -1)])]
        );

        let g = trivial(3).group().unwrap();
        assert_eq!(
            g.relators(),
            &[w(&[(1, 1), (2, -1)]), w(&[(2, 1), (3, -1)])]
        );
    }

    #[test]
    fn cancel_on_trivial_three() {
        let p = trivial(3);
        let q = p.apply(&DiagramMove::Cancel { band: 2 }).unwrap();
        assert_eq!(q, trivial(2));
    }

    #[test]
    fn cancel_substitutes_in_other_words() {
        // bands: (1,2,emptyish), (1,3, x2): cancelling band 1 removes circle 2,
        // so the x2 letters in band 2 become w1 x1 w1^-1 = x1, then reindex.
        let p = RibbonPresentation::new(
            3,
            vec![
                Band::new(1, 2, Word::empty()),
                Band::new(1, 3, w(&[(2, 1)])),
            ],
        )
        .unwrap();
        let q = p.apply(&DiagramMove::Cancel { band: 1 }).unwrap();
        assert_eq!(q.circles, 2);
        assert_eq!(q.bands, vec![Band::new(1, 2, w(&[(1, 1)]))]);
    }

    #[test]
    fn cancel_preconditions() {
        let p = trivial(3);
        // band 1's target circle 2 also hosts band 2
        assert!(matches!(
            p.apply(&DiagramMove::Cancel { band: 1 }),
            Err(DiagramError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn slide_end_formula() {
        // b = (1,3,w) over b' = (2,3,u) at shared target 3 -> (1,2, u^-1 w)
        let word_w = w(&[(1, 1), (2, 1)]);
        let word_u = w(&[(3, 1)]);
        let p = RibbonPresentation::new(
            3,
            vec![
                Band::new(1, 3, word_w.clone()),
                Band::new(2, 3, word_u.clone()),
            ],
        )
        .unwrap();
        let q = p
            .apply(&DiagramMove::SlideEnd {
                band: 1,
                band_end: BandEnd::Target,
                over: 2,
                over_end: BandEnd::Target,
            })
            .unwrap();
        assert_eq!(q.bands[0], Band::new(1, 2, word_u.inverse().concat(&word_w)));
        assert_eq!(q.bands[1], Band::new(2, 3, word_u));
    }

    #[test]
    fn slide_source_end_over_source_end() {
        // star tree: (1,2,∅), (1,3,∅): sliding band 2's source over band 1's
        // source gives the path (1,2,∅), (2,3,∅).
        let p = RibbonPresentation::new(
            3,
            vec![
                Band::new(1, 2, Word::empty()),
                Band::new(1, 3, Word::empty()),
            ],
        )
        .unwrap();
        let q = p
            .apply(&DiagramMove::SlideEnd {
                band: 2,
                band_end: BandEnd::Source,
                over: 1,
                over_end: BandEnd::Source,
            })
            .unwrap();
        assert_eq!(q.bands[1], Band::new(2, 3, Word::empty()));
    }

    #[test]
    fn end_reduce_examples() {
        // band (1,2,x1): the trailing x1 is the source-adjacent letter
        let p = RibbonPresentation::new(2, vec![Band::new(1, 2, w(&[(1, 1)]))]).unwrap();
        let q = p
            .apply(&DiagramMove::EndReduce {
                band: 1,
                end: BandEnd::Source,
            })
            .unwrap();
        assert!(q.bands[0].word.is_empty());

        // leading x2 on a (1,2)-band is target-adjacent
        let p = RibbonPresentation::new(2, vec![Band::new(1, 2, w(&[(2, 1), (1, -1)]))]).unwrap();
        let q = p
            .apply(&DiagramMove::EndReduce {
                band: 1,
                end: BandEnd::Target,
            })
            .unwrap();
        assert_eq!(q.bands[0].word, w(&[(1, -1)]));

        // spun trefoil: neither end letter matches its end circle
        assert!(spun_trefoil()
            .apply(&DiagramMove::EndReduce {
                band: 1,
                end: BandEnd::Source,
            })
            .is_err());
    }

    #[test]
    fn end_reduce_preserves_group_invariants() {
        let p = RibbonPresentation::new(2, vec![Band::new(1, 2, w(&[(2, 1), (1, 1)]))]).unwrap();
        let before = alexander_polynomial(&p.group().unwrap()).unwrap();
        let q = p
            .apply(&DiagramMove::EndReduce {
                band: 1,
                end: BandEnd::Source,
            })
            .unwrap();
        let after = alexander_polynomial(&q.group().unwrap()).unwrap();
        assert_eq!(before, after);
        assert_eq!(
            p.group().unwrap().abelian_invariants(),
            q.group().unwrap().abelian_invariants()
        );
    }

    #[test]
    fn swim_inserts_full_relator() {
        let p = trivial(3);
        let q = p
            .apply(&DiagramMove::Swim {
                band: 1,
                through: 2,
                position: 1,
                inverted: false,
            })
            .unwrap();
        // relator of band 2 is x2 x3^-1
        assert_eq!(q.bands[0].word, w(&[(2, 1), (3, -1)]));
        // group is preserved
        assert_eq!(
            q.group().unwrap().abelian_invariants(),
            p.group().unwrap().abelian_invariants()
        );
    }

    #[test]
    fn band_pass_examples() {
        // delete the second letter of the spun trefoil's band word
        let p = spun_trefoil();
        let q = p
            .band_pass(&BandPass {
                band: 1,
                position: 2,
                generator: 2,
                sign: 1,
                direction: PassDirection::Delete,
            })
            .unwrap();
        assert_eq!(q.bands[0].word, w(&[(1, 1)]));

        // insert into the trivial diagram
        let t = trivial(2);
        let q = t
            .band_pass(&BandPass {
                band: 1,
                position: 1,
                generator: 1,
                sign: 1,
                direction: PassDirection::Insert,
            })
            .unwrap();
        assert_eq!(q.bands[0].word, w(&[(1, 1)]));

        // delete where nothing matches
        assert!(matches!(
            t.band_pass(&BandPass {
                band: 1,
                position: 1,
                generator: 1,
                sign: 1,
                direction: PassDirection::Delete,
            }),
            Err(DiagramError::LetterMismatch { .. })
        ));
    }

    #[test]
    fn band_pass_changes_alexander_polynomial() {
        let p = spun_trefoil();
        let before = alexander_polynomial(&p.group().unwrap()).unwrap();
        assert_eq!(
            before,
            crate::alexander::LaurentPoly::from_pairs(&[(0, 1), (1, -1), (2, 1)])
        );
        let q = p
            .band_pass(&BandPass {
                band: 1,
                position: 2,
                generator: 2,
                sign: 1,
                direction: PassDirection::Delete,
            })
            .unwrap();
        let after = alexander_polynomial(&q.group().unwrap()).unwrap();
        assert!(after.is_one());
    }

    #[test]
    fn syntactic_triviality() {
        assert!(trivial(4).is_syntactically_trivial());
        assert!(!spun_trefoil().is_syntactically_trivial());
        // unreduced input words reduce on construction
        let p = RibbonPresentation::new(2, vec![Band::new(1, 2, w(&[(1, 1), (1, -1)]))]).unwrap();
        assert!(p.is_syntactically_trivial());
    }

    #[test]
    fn intro_adds_circle_and_empty_band() {
        let p = trivial(2);
        let q = p.apply(&DiagramMove::Intro { at: 1 }).unwrap();
        assert_eq!(q.circles, 3);
        assert_eq!(q.bands[1], Band::new(1, 3, Word::empty()));
        assert!(q.is_syntactically_trivial());
    }

    #[test]
    fn path_form_examples() {
        // star on 3 circles is already a (mislabeled) path
        let star = RibbonPresentation::new(
            3,
            vec![
                Band::new(1, 2, Word::empty()),
                Band::new(1, 3, Word::empty()),
            ],
        )
        .unwrap();
        let path = star.to_path_form().unwrap();
        assert_eq!(
            path.bands,
            vec![Band::new(1, 2, Word::empty()), Band::new(2, 3, Word::empty())]
        );
        assert!(path.is_path_form());

        // already a path: unchanged, and idempotent
        let p = trivial(4);
        assert_eq!(p.to_path_form().unwrap(), p);
        assert_eq!(path.to_path_form().unwrap(), path);

        // single band: unchanged
        assert_eq!(spun_trefoil().to_path_form().unwrap(), spun_trefoil());

        // a genuine 4-star needs slides; group invariants survive
        let star4 = RibbonPresentation::new(
            4,
            vec![
                Band::new(1, 2, Word::empty()),
                Band::new(1, 3, w(&[(2, 1)])),
                Band::new(1, 4, Word::empty()),
            ],
        )
        .unwrap();
        let path4 = star4.to_path_form().unwrap();
        assert!(path4.is_path_form());
        assert_eq!(
            alexander_polynomial(&star4.group().unwrap()).unwrap(),
            alexander_polynomial(&path4.group().unwrap()).unwrap()
        );

        let non_tree = RibbonPresentation::new(2, vec![]).unwrap();
        assert!(matches!(non_tree.to_path_form(), Err(DiagramError::NotATree)));
    }

    #[test]
    fn diagram_serde_round_trip() {
        let p = spun_trefoil();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"circles":2,"bands":[{"from":1,"to":2,"word":[[1,1],[2,1]]}]}"#);
        let back: RibbonPresentation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<RibbonPresentation>(r#"{"circles":0,"bands":[]}"#).is_err());
    }
}
