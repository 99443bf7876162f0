//! Trivialization search for diagrams and band-pass certificates.
//!
//! `trivialize_search` looks for a sound-move sequence to the syntactically
//! trivial form; `certify_undisking` additionally spends up to `k` band
//! passes. Certificates only ever witness upper bounds: UNKNOWN is a budget
//! verdict, never a lower-bound claim, though a presentation whose induced
//! group has a nontrivial order ideal is reported as a hard obstruction
//! (sound moves preserve it, and the trivial diagram's is 1).
//!
//! A pass bound on a disk diagram also dominates classical crossing-change
//! complexities of its boundary; no such boundary quantity is computed or
//! asserted here.

use crate::acsearch::SearchBudget;
use crate::alexander::{alexander_polynomial, LaurentPoly};
use crate::diagrams::{
    BandEnd, BandPass, DiagramError, DiagramMove, PassDirection, RibbonPresentation,
};
use serde::{Deserialize, Serialize};

/// Replayable witness that `k` band passes suffice to trivialize a diagram:
/// the passes, then a trivializing move script.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct UndiskingCertificate {
    pub passes: Vec<BandPass>,
    pub trivialization: Vec<DiagramMove>,
}

impl UndiskingCertificate {
    pub fn replay(&self, p: &RibbonPresentation) -> Result<RibbonPresentation, DiagramError> {
        let mut cur = p.clone();
        for pass in &self.passes {
            cur = cur.band_pass(pass)?;
        }
        cur.apply_all(&self.trivialization)
    }

    pub fn verifies(&self, p: &RibbonPresentation) -> bool {
        self.replay(p)
            .map(|q| q.is_syntactically_trivial())
            .unwrap_or(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrivializeOutcome {
    Trivialized(Vec<DiagramMove>),
    Unknown {
        /// Normalized order-ideal generator when it differs from 1: a proof
        /// that no sound sequence can succeed, not just a budget verdict.
        alexander_obstruction: Option<LaurentPoly>,
        nodes_expanded: usize,
    },
}

impl TrivializeOutcome {
    pub fn moves(&self) -> Option<&[DiagramMove]> {
        match self {
            TrivializeOutcome::Trivialized(m) => Some(m),
            TrivializeOutcome::Unknown { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UndiskingOutcome {
    Certified(UndiskingCertificate),
    Unknown {
        alexander_obstruction: Option<LaurentPoly>,
    },
}

impl UndiskingOutcome {
    pub fn certificate(&self) -> Option<&UndiskingCertificate> {
        match self {
            UndiskingOutcome::Certified(c) => Some(c),
            UndiskingOutcome::Unknown { .. } => None,
        }
    }
}

/// The order-ideal obstruction, when computable and nontrivial.
fn obstruction(p: &RibbonPresentation) -> Option<LaurentPoly> {
    let group = p.group().ok()?;
    let delta = alexander_polynomial(&group).ok()?;
    if delta.is_one() {
        None
    } else {
        Some(delta)
    }
}

/// Greedy strip: end reductions and cancellations only, applied to a fixed
/// point. Every step shrinks total word length or the circle count.
fn greedy_strip(p: &RibbonPresentation) -> (RibbonPresentation, Vec<DiagramMove>) {
    let mut cur = p.clone();
    let mut moves = Vec::new();
    'outer: loop {
        for band in 1..=cur.bands.len() {
            for end in [BandEnd::Source, BandEnd::Target] {
                let m = DiagramMove::EndReduce { band, end };
                if let Ok(next) = cur.apply(&m) {
                    cur = next;
                    moves.push(m);
                    continue 'outer;
                }
            }
        }
        if cur.circles > 1 {
            for band in 1..=cur.bands.len() {
                let m = DiagramMove::Cancel { band };
                if let Ok(next) = cur.apply(&m) {
                    cur = next;
                    moves.push(m);
                    continue 'outer;
                }
            }
        }
        break;
    }
    (cur, moves)
}

/// Canonical key under circle relabeling, for the transposition table.
/// Band order and orientation are normalized away; permutations are only
/// enumerated for small diagrams.
fn canonical_key(p: &RibbonPresentation) -> String {
    let n = p.circles;
    let render = |perm: &[usize]| -> String {
        let mut bands: Vec<String> = p
            .bands
            .iter()
            .map(|b| {
                let relabel = |w: &crate::words::Word| -> crate::words::Word {
                    w.iter()
                        .map(|l| {
                            crate::words::Letter::new(
                                perm[l.generator() as usize - 1] as u32,
                                l.sign(),
                            )
                        })
                        .collect()
                };
                let fwd = (
                    perm[b.source - 1],
                    perm[b.target - 1],
                    format!("{}", relabel(&b.word)),
                );
                let rev = (
                    perm[b.target - 1],
                    perm[b.source - 1],
                    format!("{}", relabel(&b.word.inverse())),
                );
                let (s, t, w) = fwd.min(rev);
                format!("{}>{}:{}", s, t, w)
            })
            .collect();
        bands.sort();
        format!("{}|{}", n, bands.join(";"))
    };
    if n > 6 {
        let identity: Vec<usize> = (1..=n).collect();
        return render(&identity);
    }
    let mut perm: Vec<usize> = (1..=n).collect();
    let mut best: Option<String> = None;
    permute(&mut perm, 0, &mut |perm| {
        let key = render(perm);
        if best.as_ref().map(|b| key < *b).unwrap_or(true) {
            best = Some(key);
        }
    });
    best.unwrap()
}

fn permute(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, f);
        perm.swap(k, i);
    }
}

fn move_candidates(p: &RibbonPresentation) -> Vec<DiagramMove> {
    let mut out = Vec::new();
    let k = p.bands.len();
    for band in 1..=k {
        for end in [BandEnd::Source, BandEnd::Target] {
            out.push(DiagramMove::EndReduce { band, end });
        }
    }
    for band in 1..=k {
        out.push(DiagramMove::Cancel { band });
    }
    for band in 1..=k {
        for over in 1..=k {
            if band == over {
                continue;
            }
            for band_end in [BandEnd::Source, BandEnd::Target] {
                for over_end in [BandEnd::Source, BandEnd::Target] {
                    out.push(DiagramMove::SlideEnd {
                        band,
                        band_end,
                        over,
                        over_end,
                    });
                }
            }
        }
    }
    for band in 1..=k {
        let len = p.bands[band - 1].word.len();
        for through in 1..=k {
            if band == through {
                continue;
            }
            for position in 1..=len + 1 {
                for inverted in [false, true] {
                    out.push(DiagramMove::Swim {
                        band,
                        through,
                        position,
                        inverted,
                    });
                }
            }
        }
    }
    for at in 1..=p.circles {
        out.push(DiagramMove::Intro { at });
    }
    out
}

/// Search for a sound-move trivialization of a disk presentation.
///
/// Greedy stripping runs first; if it does not finish the job, a
/// breadth-first search over the sound move set explores within the budget,
/// deduplicating states by their relabeling-canonical key.
pub fn trivialize_search(
    p: &RibbonPresentation,
    budget: &SearchBudget,
) -> Result<TrivializeOutcome, DiagramError> {
    if !p.is_disk_presentation() {
        return Err(DiagramError::NotATree);
    }
    if p.is_syntactically_trivial() {
        return Ok(TrivializeOutcome::Trivialized(Vec::new()));
    }
    if let Some(delta) = obstruction(p) {
        return Ok(TrivializeOutcome::Unknown {
            alexander_obstruction: Some(delta),
            nodes_expanded: 0,
        });
    }
    let (stripped, prefix) = greedy_strip(p);
    if stripped.is_syntactically_trivial() {
        return Ok(TrivializeOutcome::Trivialized(prefix));
    }

    // Breadth-first over sound moves from the stripped state.
    let mut seen: rustc_hash::FxHashSet<String> = Default::default();
    seen.insert(canonical_key(&stripped));
    let mut queue: std::collections::VecDeque<(RibbonPresentation, Vec<DiagramMove>)> =
        std::collections::VecDeque::new();
    queue.push_back((stripped, prefix));
    let mut expanded = 0usize;

    while let Some((state, path)) = queue.pop_front() {
        if expanded >= budget.max_nodes {
            return Ok(TrivializeOutcome::Unknown {
                alexander_obstruction: None,
                nodes_expanded: expanded,
            });
        }
        expanded += 1;
        for m in move_candidates(&state) {
            let Ok(child) = state.apply(&m) else { continue };
            let total: usize = child.bands.iter().map(|b| b.word.len()).sum();
            if total > budget.max_total_length || child.circles > p.circles + 4 {
                continue;
            }
            let mut child_path = path.clone();
            child_path.push(m);
            if child.is_syntactically_trivial() {
                return Ok(TrivializeOutcome::Trivialized(child_path));
            }
            if seen.insert(canonical_key(&child)) {
                queue.push_back((child, child_path));
            }
        }
    }
    Ok(TrivializeOutcome::Unknown {
        alexander_obstruction: None,
        nodes_expanded: expanded,
    })
}

/// Search for a certificate that at most `k` band passes trivialize the
/// disk presentation. Passes are searched as single-letter deletions; an
/// insertion pass never helps beyond what some deletion already covers,
/// because an insertion adjacent to an inverse letter is the same edit.
pub fn certify_undisking(
    p: &RibbonPresentation,
    k: usize,
    budget: &SearchBudget,
) -> Result<UndiskingOutcome, DiagramError> {
    if !p.is_disk_presentation() {
        return Err(DiagramError::NotATree);
    }
    let base_obstruction = obstruction(p);

    match trivialize_search(p, budget)? {
        TrivializeOutcome::Trivialized(moves) => {
            let cert = UndiskingCertificate {
                passes: Vec::new(),
                trivialization: moves,
            };
            debug_assert!(cert.verifies(p));
            return Ok(UndiskingOutcome::Certified(cert));
        }
        TrivializeOutcome::Unknown { .. } => {}
    }
    if k == 0 {
        return Ok(UndiskingOutcome::Unknown {
            alexander_obstruction: base_obstruction,
        });
    }

    // Two sweeps over the same deterministic candidate order: a quick scan
    // with a thin per-candidate budget catches certificates that strip
    // outright; the second sweep spends the full budget on each survivor.
    let quick = SearchBudget {
        max_nodes: (budget.max_nodes / 64).clamp(64, 4096),
        ..budget.clone()
    };
    for inner in [&quick, budget] {
        let mut frontier: Vec<(RibbonPresentation, Vec<BandPass>)> = vec![(p.clone(), Vec::new())];
        for _depth in 1..=k {
            let mut next = Vec::new();
            for (state, passes) in &frontier {
                for band in 1..=state.bands.len() {
                    let word = state.bands[band - 1].word.clone();
                    for position in 1..=word.len() {
                        let l = word.letters()[position - 1];
                        let pass = BandPass {
                            band,
                            position,
                            generator: l.generator(),
                            sign: l.sign(),
                            direction: PassDirection::Delete,
                        };
                        let child = state.band_pass(&pass)?;
                        let mut child_passes = passes.clone();
                        child_passes.push(pass);
                        match trivialize_search(&child, inner)? {
                            TrivializeOutcome::Trivialized(moves) => {
                                let cert = UndiskingCertificate {
                                    passes: child_passes,
                                    trivialization: moves,
                                };
                                assert!(cert.verifies(p), "certificate must replay");
                                return Ok(UndiskingOutcome::Certified(cert));
                            }
                            TrivializeOutcome::Unknown { .. } => {}
                        }
                        next.push((child, child_passes));
                    }
                }
            }
            frontier = next;
        }
        if quick.max_nodes >= budget.max_nodes {
            break;
        }
    }
    Ok(UndiskingOutcome::Unknown {
        alexander_obstruction: base_obstruction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::Band;
    use crate::words::Word;

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
    fn single_letter_band_strips() {
        let p = RibbonPresentation::new(2, vec![Band::new(1, 2, w(&[(1, 1)]))]).unwrap();
        let out = trivialize_search(&p, &SearchBudget::default()).unwrap();
        let moves = out.moves().expect("trivializes");
        let end = p.apply_all(moves).unwrap();
        assert!(end.is_syntactically_trivial());
    }

    #[test]
    fn already_trivial_is_empty() {
        let out = trivialize_search(&trivial(5), &SearchBudget::default()).unwrap();
        assert_eq!(out.moves().unwrap().len(), 0);
    }

    #[test]
    fn trefoil_blocked_by_obstruction() {
        let out = trivialize_search(&spun_trefoil(), &SearchBudget::default()).unwrap();
        match out {
            TrivializeOutcome::Unknown {
                alexander_obstruction: Some(delta),
                ..
            } => {
                assert_eq!(
                    delta,
                    crate::alexander::LaurentPoly::from_pairs(&[(0, 1), (1, -1), (2, 1)])
                );
            }
            other => panic!("expected obstruction, got {other:?}"),
        }
    }

    #[test]
    fn spun_trefoil_one_pass_certificate() {
        let out = certify_undisking(&spun_trefoil(), 1, &SearchBudget::default()).unwrap();
        let cert = out.certificate().expect("one pass suffices");
        assert_eq!(cert.passes.len(), 1);
        assert!(cert.verifies(&spun_trefoil()));
    }

    #[test]
    fn trivial_zero_pass_certificate() {
        let out = certify_undisking(&trivial(3), 0, &SearchBudget::default()).unwrap();
        let cert = out.certificate().expect("already trivial");
        assert!(cert.passes.is_empty());
        assert!(cert.trivialization.is_empty());
    }

    #[test]
    fn spun_trefoil_zero_passes_is_unknown_with_obstruction() {
        let out = certify_undisking(&spun_trefoil(), 0, &SearchBudget::default()).unwrap();
        match out {
            UndiskingOutcome::Unknown {
                alexander_obstruction: Some(delta),
            } => assert_eq!(
                delta,
                crate::alexander::LaurentPoly::from_pairs(&[(0, 1), (1, -1), (2, 1)])
            ),
            other => panic!("expected unknown with obstruction, got {other:?}"),
        }
    }

    #[test]
    fn bfs_finds_slide_based_trivialization() {
        // greedy stripping is blocked: band 2's word letter matches neither
        // of its own end circles, and both cancels are blocked by the shared
        // middle circle. A slide re-roots band 2 and unblocks the strip.
        let p = RibbonPresentation::new(
            3,
            vec![
                Band::new(1, 2, Word::empty()),
                Band::new(3, 2, w(&[(1, 1)])),
            ],
        )
        .unwrap();
        assert!(!p.is_syntactically_trivial());
        let out = trivialize_search(&p, &SearchBudget::default()).unwrap();
        let moves = out.moves().expect("slide then strip succeeds");
        let end = p.apply_all(moves).unwrap();
        assert!(end.is_syntactically_trivial());
    }

    #[test]
    fn canonical_key_collapses_relabelings() {
        let a = RibbonPresentation::new(
            3,
            vec![
                Band::new(1, 2, w(&[(3, 1)])),
                Band::new(2, 3, Word::empty()),
            ],
        )
        .unwrap();
        // a relabeled by 1->2, 2->3, 3->1, with the band list shuffled
        let b = RibbonPresentation::new(
            3,
            vec![
                Band::new(3, 1, Word::empty()),
                Band::new(2, 3, w(&[(1, 1)])),
            ],
        )
        .unwrap();
        assert_eq!(canonical_key(&a), canonical_key(&b));
    }
}
