//! Trivialization search over group presentations.
//!
//! The search runs on canonical forms: a state is the canonical
//! representative of a presentation's orbit under relator permutation,
//! inversion, conjugation, and rotation. One search transition replaces a
//! relator `r_i` by `reduce(r_i · u r_j^±1 u^-1)` for a conjugator `u` of
//! bounded length; on the orbit quotient these transitions generate exactly
//! the reachability of the primitive relator moves, and each one unpacks
//! into a chain of primitive [`AcMove`]s when a certificate is emitted.
//!
//! Strategy: iterative deepening on total (cyclically reduced) relator
//! length. Within a length cap, nodes are expanded best-first, ordered by
//! total length with ties broken by lexicographic order of canonical forms,
//! in fixed-size batches. Batches may be expanded by parallel workers; the
//! merge back into the frontier is sequential and deterministic, so the
//! verdict and certificate do not depend on the worker count. The node
//! budget counts expanded nodes. The transposition table stores 128-bit
//! hashes of canonical forms.

use crate::presentations::{verify_certificate, AcCertificate, AcMove, GroupPresentation};
use crate::words::{Letter, Word};
use rayon::prelude::*;
use rustc_hash::{FxHashSet, FxHasher};
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::hash_map::DefaultHasher;
use std::collections::BinaryHeap;
use std::hash::Hasher;

/// Resource limits for a search run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Maximum number of nodes expanded across the whole run.
    pub max_nodes: usize,
    /// Largest admitted total relator length (the iterative-deepening roof).
    pub max_total_length: usize,
    /// Longest conjugator word used in a single transition.
    pub max_conjugator_length: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 1_000_000,
            max_total_length: 64,
            max_conjugator_length: 4,
        }
    }
}

/// Optional extensions to the move set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Allow adding/removing a generator together with its single-letter
    /// relator. Off by default.
    pub allow_stabilization: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes_expanded: usize,
    pub nodes_deduplicated: usize,
    pub highest_cap_reached: usize,
    /// True when every state under `max_total_length` was exhausted without
    /// running out of nodes; the verdict is still only UNKNOWN.
    pub space_exhausted: bool,
}

/// Search verdict: a replayable certificate, or UNKNOWN with statistics.
/// UNKNOWN only means the budget or length roof was reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchOutcome {
    Certified(AcCertificate),
    Unknown(SearchStats),
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&AcCertificate> {
        match self {
            SearchOutcome::Certified(c) => Some(c),
            SearchOutcome::Unknown(_) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, SearchOutcome::Certified(_))
    }
}

const BATCH: usize = 256;

/// Letters packed as `2*generator + (sign < 0)`: integer order agrees with
/// [`Letter`]'s order, `a` cancels `b` iff `a ^ b == 1`.
type Packed = i32;

fn pack(l: &Letter) -> Packed {
    (l.generator() as i32) * 2 + if l.sign() < 0 { 1 } else { 0 }
}

fn unpack(p: Packed) -> Letter {
    Letter::new((p / 2) as u32, if p % 2 == 1 { -1 } else { 1 })
}

fn pack_word(w: &Word) -> Vec<Packed> {
    w.iter().map(pack).collect()
}

/// One class-graph transition: replace relator `i` of the canonical
/// representative by `reduce(r_i · u r_j^delta u^-1)`, where `u` is the
/// `u_idx`-th bounded conjugator for the state's generator count.
#[derive(Clone, Copy, Debug)]
struct Step {
    i: u16,
    j: u16,
    delta: i8,
    u_idx: u32,
    stab: Option<bool>, // Some(true) = stabilize, Some(false) = destabilize
}

struct Node {
    parent: u32,
    step: Option<Step>,
}

struct ChildRecord {
    step: Step,
    len: u32,
    key: u128,
    m_trivial: bool,
}

/// Search for a certificate driving `p` to a form whose first `target_m`
/// generators appear as single-letter relators (up to relator order).
pub fn ac_search(
    p: &GroupPresentation,
    target_m: usize,
    budget: &SearchBudget,
    options: &SearchOptions,
) -> SearchOutcome {
    let mut stats = SearchStats::default();
    if p.is_m_trivial(target_m) {
        return SearchOutcome::Certified(AcCertificate::empty(p));
    }
    let root = p.canonical_form();
    if class_is_m_trivial(&root, target_m) {
        // Orbit-level trivial: only per-relator normalization moves needed.
        let cert = reconstruct(p, &root, &[], target_m, budget.max_conjugator_length);
        assert!(verify_certificate(p, &cert, target_m));
        return SearchOutcome::Certified(cert);
    }

    let start_len = root.total_relator_length();
    if start_len > budget.max_total_length {
        return SearchOutcome::Unknown(stats);
    }

    let conj_cache = ConjCache::new(root.generators(), budget.max_conjugator_length);
    let mut word_cache: rustc_hash::FxHashMap<usize, Vec<Word>> = Default::default();
    let mut cap = start_len.max(1);
    let mut remaining = budget.max_nodes;

    while cap <= budget.max_total_length {
        stats.highest_cap_reached = cap;
        let mut visited: FxHashSet<u128> = FxHashSet::default();
        visited.insert(class_key(&root));
        let mut arena: Vec<Node> = vec![Node {
            parent: u32::MAX,
            step: None,
        }];
        let mut open: BinaryHeap<Reverse<(u32, GroupPresentation, u32)>> = BinaryHeap::new();
        open.push(Reverse((start_len as u32, root.clone(), 0)));
        // smallest child length rejected for exceeding this cap
        let mut next_threshold: Option<usize> = None;

        while open.peek().is_some() {
            if remaining == 0 {
                stats.nodes_expanded = budget.max_nodes;
                return SearchOutcome::Unknown(stats);
            }
            let take = BATCH.min(remaining);
            let mut batch: Vec<(GroupPresentation, u32)> = Vec::with_capacity(take);
            while batch.len() < take {
                match open.pop() {
                    Some(Reverse((_, state, idx))) => batch.push((state, idx)),
                    None => break,
                }
            }
            if batch.is_empty() {
                break;
            }
            remaining -= batch.len();
            stats.nodes_expanded += batch.len();

            let allow_stab = options.allow_stabilization;
            let expansions: Vec<(Vec<ChildRecord>, Option<usize>)> = batch
                .par_iter()
                .map(|(state, _)| expand(state, target_m, &conj_cache, cap, allow_stab))
                .collect();

            for ((parent_state, parent_idx), (children, rejected)) in
                batch.iter().zip(expansions)
            {
                if let Some(r) = rejected {
                    next_threshold = Some(next_threshold.map_or(r, |t: usize| t.min(r)));
                }
                for rec in children {
                    if rec.m_trivial {
                        let path = path_steps(&arena, *parent_idx, rec.step);
                        let cert =
                            reconstruct(p, &root, &path, target_m, budget.max_conjugator_length);
                        assert!(
                            verify_certificate(p, &cert, target_m),
                            "reconstructed certificate must replay"
                        );
                        return SearchOutcome::Certified(cert);
                    }
                    if !visited.insert(rec.key) {
                        stats.nodes_deduplicated += 1;
                        continue;
                    }
                    let words = word_cache
                        .entry(parent_state.generators())
                        .or_insert_with(|| {
                            reduced_words_up_to(
                                parent_state.generators(),
                                budget.max_conjugator_length,
                            )
                        });
                    let child = materialize(parent_state, &rec.step, words);
                    let idx = arena.len() as u32;
                    arena.push(Node {
                        parent: *parent_idx,
                        step: Some(rec.step),
                    });
                    open.push(Reverse((rec.len, child, idx)));
                }
            }
        }

        match next_threshold {
            // Nothing was pruned by the cap: the whole reachable space is
            // exhausted and larger caps change nothing.
            None => {
                stats.space_exhausted = true;
                return SearchOutcome::Unknown(stats);
            }
            Some(t) => cap = t.max(cap + 1),
        }
    }
    SearchOutcome::Unknown(stats)
}

fn hash_letters_two_ways(letters: impl Iterator<Item = Packed> + Clone, len: usize) -> (u64, u64) {
    let mut fx = FxHasher::default();
    fx.write_usize(len);
    for l in letters.clone() {
        fx.write_i32(l);
    }
    let mut sip = DefaultHasher::new();
    sip.write_usize(len);
    for l in letters {
        sip.write_i32(l);
    }
    (fx.finish(), sip.finish())
}

/// Order-independent class key: generator count, relator count, and the
/// wrapping sums of two independent per-relator content hashes.
fn class_key(p: &GroupPresentation) -> u128 {
    let mut s1: u64 = 0;
    let mut s2: u64 = 0;
    for r in p.relators() {
        let (h1, h2) = hash_letters_two_ways(r.iter().map(pack), r.len());
        s1 = s1.wrapping_add(h1);
        s2 = s2.wrapping_add(h2);
    }
    combine_key(p.generators(), p.relators().len(), s1, s2)
}

fn combine_key(generators: usize, relator_count: usize, s1: u64, s2: u64) -> u128 {
    let mut fx = FxHasher::default();
    fx.write_usize(generators);
    fx.write_usize(relator_count);
    fx.write_u64(s1);
    let a = fx.finish();
    let mut sip = DefaultHasher::new();
    sip.write_usize(generators);
    sip.write_usize(relator_count);
    sip.write_u64(s2);
    let b = sip.finish();
    ((a as u128) << 64) | (b as u128)
}

fn class_is_m_trivial(canon: &GroupPresentation, m: usize) -> bool {
    if m > canon.generators() {
        return false;
    }
    (1..=m as u32).all(|g| {
        canon
            .relators()
            .iter()
            .any(|r| r.len() == 1 && r.letters()[0] == Letter::positive(g))
    })
}

/// Reusable word builder over packed letters.
struct Scratch {
    buf: Vec<Packed>,
    len: usize,
}

impl Scratch {
    fn with_capacity(capacity: usize) -> Self {
        Scratch {
            buf: vec![0; capacity],
            len: 0,
        }
    }

    fn reset_from(&mut self, src: &[Packed]) {
        self.buf[..src.len()].copy_from_slice(src);
        self.len = src.len();
    }

    fn push_reducing(&mut self, l: Packed) {
        if self.len > 0 && self.buf[self.len - 1] ^ l == 1 {
            self.len -= 1;
        } else {
            self.buf[self.len] = l;
            self.len += 1;
        }
    }

    fn slice(&self) -> &[Packed] {
        &self.buf[..self.len]
    }
}

/// Cyclic trim bounds: indices `(lo, hi)` with the core at `s[lo..hi]`.
fn cyclic_bounds(s: &[Packed]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = s.len();
    while hi - lo >= 2 && s[lo] ^ s[hi - 1] == 1 {
        lo += 1;
        hi -= 1;
    }
    (lo, hi)
}

/// Index of the lexicographically least rotation of `s`, by the classic
/// two-pointer minimal-expression scan.
fn least_rotation(s: &[Packed]) -> usize {
    let n = s.len();
    if n <= 1 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i = i + k + 1;
        } else {
            j = j + k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// Least rotation of the core or of its inverse, as (word, start, inverted).
fn orbit_min_packed(core: &[Packed]) -> (Vec<Packed>, usize, bool) {
    let n = core.len();
    if n == 0 {
        return (Vec::new(), 0, false);
    }
    let inv: Vec<Packed> = core.iter().rev().map(|&l| l ^ 1).collect();
    let kf = least_rotation(core);
    let ki = least_rotation(&inv);
    // compare the two minimal rotations letter by letter
    let mut use_inv = false;
    for x in 0..n {
        let a = core[(kf + x) % n];
        let b = inv[(ki + x) % n];
        if a != b {
            use_inv = b < a;
            break;
        }
    }
    let (src, k) = if use_inv {
        (inv.as_slice(), ki)
    } else {
        (core, kf)
    };
    let mut min = Vec::with_capacity(n);
    min.extend_from_slice(&src[k..]);
    min.extend_from_slice(&src[..k]);
    (min, k, use_inv)
}

/// Packed bounded-conjugator tables, indexed by generator count.
struct ConjCache {
    by_g: Vec<Vec<Vec<Packed>>>,
    cap: usize,
}

impl ConjCache {
    fn new(root_generators: usize, cap: usize) -> Self {
        let top = root_generators + 8;
        let by_g = (0..=top).map(|g| packed_conjugators(g, cap)).collect();
        ConjCache { by_g, cap }
    }

    fn get(&self, g: usize) -> std::borrow::Cow<'_, Vec<Vec<Packed>>> {
        if g < self.by_g.len() {
            std::borrow::Cow::Borrowed(&self.by_g[g])
        } else {
            std::borrow::Cow::Owned(packed_conjugators(g, self.cap))
        }
    }
}

/// Children of a canonical state plus the smallest over-cap child length.
fn expand(
    state: &GroupPresentation,
    target_m: usize,
    conj_cache: &ConjCache,
    cap: usize,
    allow_stab: bool,
) -> (Vec<ChildRecord>, Option<usize>) {
    let k = state.relators().len();
    let base_len = state.total_relator_length();
    let packed: Vec<Vec<Packed>> = state.relators().iter().map(pack_word).collect();
    let rel_hashes: Vec<(u64, u64)> = packed
        .iter()
        .map(|r| hash_letters_two_ways(r.iter().copied(), r.len()))
        .collect();
    let (sum1, sum2) = rel_hashes.iter().fold((0u64, 0u64), |(a, b), (h1, h2)| {
        (a.wrapping_add(*h1), b.wrapping_add(*h2))
    });
    // how many relators are exactly the positive single letter x_g
    let single_count: Vec<usize> = (1..=state.generators() as i32)
        .map(|g| packed.iter().filter(|r| r.len() == 1 && r[0] == 2 * g).count())
        .collect();

    let conjugators = conj_cache.get(state.generators());
    let max_rel = packed.iter().map(Vec::len).max().unwrap_or(0);
    let room = 2 * max_rel + 2 * conj_cache.cap + 4;
    let mut conj_buf = Scratch::with_capacity(room);
    let mut child_buf = Scratch::with_capacity(2 * room);
    let mut out = Vec::new();
    let mut rejected: Option<usize> = None;

    for j in 0..k {
        for delta in [1i8, -1] {
            let rj = &packed[j];
            for (u_idx, u) in conjugators.iter().enumerate() {
                // conj_buf := u · r_j^delta · u^-1, reduced
                conj_buf.reset_from(u);
                if delta == 1 {
                    for &l in rj.iter() {
                        conj_buf.push_reducing(l);
                    }
                } else {
                    for &l in rj.iter().rev() {
                        conj_buf.push_reducing(l ^ 1);
                    }
                }
                for &l in u.iter().rev() {
                    conj_buf.push_reducing(l ^ 1);
                }
                let conj = conj_buf.slice();

                for i in 0..k {
                    if i == j {
                        continue;
                    }
                    let ri = &packed[i];
                    // boundary cancellation between r_i suffix and conj prefix
                    let mut t = 0usize;
                    while t < ri.len() && t < conj.len() && ri[ri.len() - 1 - t] ^ conj[t] == 1 {
                        t += 1;
                    }
                    let a = &ri[..ri.len() - t];
                    let b = &conj[t..];
                    child_buf.buf[..a.len()].copy_from_slice(a);
                    child_buf.buf[a.len()..a.len() + b.len()].copy_from_slice(b);
                    child_buf.len = a.len() + b.len();
                    let s = child_buf.slice();
                    let (lo, hi) = cyclic_bounds(s);
                    let core_len = hi - lo;
                    let child_len = base_len - ri.len() + core_len;
                    if child_len > cap {
                        rejected = Some(rejected.map_or(child_len, |r: usize| r.min(child_len)));
                        continue;
                    }
                    let (min, _, _) = orbit_min_packed(&s[lo..hi]);
                    let (h1, h2) = hash_letters_two_ways(min.iter().copied(), min.len());
                    let key = combine_key(
                        state.generators(),
                        k,
                        sum1.wrapping_sub(rel_hashes[i].0).wrapping_add(h1),
                        sum2.wrapping_sub(rel_hashes[i].1).wrapping_add(h2),
                    );
                    let m_trivial = target_m <= state.generators()
                        && (1..=target_m as i32).all(|g| {
                            let was_this = packed[i].len() == 1 && packed[i][0] == 2 * g;
                            let still_there =
                                single_count[g as usize - 1] > if was_this { 1 } else { 0 };
                            let by_new = min.len() == 1 && min[0] == 2 * g;
                            still_there || by_new
                        });
                    out.push(ChildRecord {
                        step: Step {
                            i: i as u16,
                            j: j as u16,
                            delta,
                            u_idx: u_idx as u32,
                            stab: None,
                        },
                        len: child_len as u32,
                        key,
                        m_trivial,
                    });
                }
            }
        }
    }

    if allow_stab {
        for (is_stab, child) in [(true, Some(apply_stab(state))), (false, apply_destab(state))] {
            let Some(child) = child else { continue };
            let len = child.total_relator_length();
            if len > cap {
                rejected = Some(rejected.map_or(len, |r: usize| r.min(len)));
                continue;
            }
            out.push(ChildRecord {
                step: Step {
                    i: 0,
                    j: 0,
                    delta: 1,
                    u_idx: 0,
                    stab: Some(is_stab),
                },
                len: len as u32,
                key: class_key(&child),
                m_trivial: class_is_m_trivial(&child, target_m),
            });
        }
    }
    (out, rejected)
}

/// Apply a step to a canonical state, producing the child's canonical form.
fn materialize(state: &GroupPresentation, step: &Step, conjugators: &[Word]) -> GroupPresentation {
    match step.stab {
        Some(true) => return apply_stab(state),
        Some(false) => return apply_destab(state).expect("destab step recorded when applicable"),
        None => {}
    }
    let (i, j) = (step.i as usize, step.j as usize);
    let u = conjugators[step.u_idx as usize].clone();
    let rj = &state.relators()[j];
    let operand = if step.delta == 1 {
        rj.clone()
    } else {
        rj.inverse()
    };
    let new_rel = state.relators()[i].concat(&operand.conjugated_by(&u));
    let (min, _) = orbit_min_with_witness(&new_rel);
    let mut words: Vec<Word> = Vec::with_capacity(state.relators().len());
    words.extend(
        state
            .relators()
            .iter()
            .enumerate()
            .filter(|&(r, _)| r != i)
            .map(|(_, w)| w.clone()),
    );
    let pos = words.partition_point(|w| *w <= min);
    words.insert(pos, min);
    GroupPresentation::new(state.generators(), words).expect("letters stay in range")
}

fn apply_stab(canon: &GroupPresentation) -> GroupPresentation {
    let g = canon.generators() + 1;
    let mut relators = canon.relators().to_vec();
    relators.push(Word::letter(Letter::positive(g as u32)));
    GroupPresentation::new(g, relators)
        .expect("valid")
        .canonical_form()
}

fn apply_destab(canon: &GroupPresentation) -> Option<GroupPresentation> {
    let g = canon.generators() as u32;
    if g == 0 {
        return None;
    }
    let pos = canon
        .relators()
        .iter()
        .position(|r| r.len() == 1 && r.letters()[0].generator() == g)?;
    let used_elsewhere = canon
        .relators()
        .iter()
        .enumerate()
        .any(|(k, r)| k != pos && r.count_generator(g) > 0);
    if used_elsewhere {
        return None;
    }
    let mut relators = canon.relators().to_vec();
    relators.remove(pos);
    Some(
        GroupPresentation::new(canon.generators() - 1, relators)
            .expect("generator no longer used")
            .canonical_form(),
    )
}

/// Reduced words over `g` generators of length `0..=max_len`, ordered by
/// length then lexicographically.
pub(crate) fn reduced_words_up_to(g: usize, max_len: usize) -> Vec<Word> {
    let mut letters: Vec<Letter> = Vec::with_capacity(2 * g);
    for i in 1..=g as u32 {
        letters.push(Letter::positive(i));
        letters.push(Letter::negative(i));
    }
    letters.sort();
    let mut out = vec![Word::empty()];
    let mut level: Vec<Word> = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(level.len() * 2 * g);
        for w in &level {
            for &l in &letters {
                if w.letters().last().map(|last| last.cancels(&l)) == Some(true) {
                    continue;
                }
                let mut ext = w.clone();
                ext.push_reducing(l);
                next.push(ext);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

fn packed_conjugators(g: usize, max_len: usize) -> Vec<Vec<Packed>> {
    reduced_words_up_to(g, max_len)
        .iter()
        .map(pack_word)
        .collect()
}

fn nth_conjugator(g: usize, max_len: usize, idx: usize) -> Word {
    reduced_words_up_to(g, max_len)
        .into_iter()
        .nth(idx)
        .expect("conjugator index in range")
}

fn path_steps(arena: &[Node], parent_idx: u32, last: Step) -> Vec<Step> {
    let mut rev = vec![last];
    let mut cur = parent_idx;
    while cur != u32::MAX {
        let node = &arena[cur as usize];
        if let Some(step) = &node.step {
            rev.push(*step);
        }
        cur = node.parent;
    }
    rev.reverse();
    rev
}

/// Relation of an actual relator to its canonical counterpart:
/// `actual = v · canon^(inverted ? -1 : 1) · v^-1`.
#[derive(Clone, Debug)]
struct RelWitness {
    v: Word,
    inverted: bool,
}

/// Lexicographically least rotation of the cyclically reduced core or its
/// inverse, together with the witness data relating the input to it.
fn orbit_min_with_witness(w: &Word) -> (Word, RelWitness) {
    let (core, outer) = w.cyclic_reduce();
    if core.is_empty() {
        return (
            Word::empty(),
            RelWitness {
                v: outer,
                inverted: false,
            },
        );
    }
    let packed: Vec<Packed> = core.iter().map(pack).collect();
    let (min, k, inverted) = orbit_min_packed(&packed);
    // source = p · min · p^-1 with p the first k letters of the source
    // (core, or core^-1 when inverted), so w = (outer·p) min^±1 (outer·p)^-1.
    let source = if inverted { core.inverse() } else { core };
    let p = Word::from_letters(source.letters()[..k].iter().copied());
    let v = outer.concat(&p);
    (
        Word::from_letters(min.into_iter().map(unpack)),
        RelWitness { v, inverted },
    )
}

/// Rebuild a primitive-move certificate for a class-graph path.
///
/// Tracks the actual presentation alongside the canonical representative:
/// `actual[track[c].0] = v_c · canon[c]^±1 · v_c^-1` for every canonical
/// index `c`.
fn reconstruct(
    start: &GroupPresentation,
    root: &GroupPresentation,
    path: &[Step],
    target_m: usize,
    conj_cap: usize,
) -> AcCertificate {
    let mut moves: Vec<AcMove> = Vec::new();
    let mut actual = start.clone();

    let (mut canon, mut track) = canonical_with_tracking(&actual);
    debug_assert_eq!(&canon, root);

    for step in path {
        if let Some(is_stab) = step.stab {
            if is_stab {
                moves.push(AcMove::Stabilize);
                actual = actual.apply_move(&AcMove::Stabilize).expect("stabilize");
                let new_actual_idx = actual.relators().len() - 1;
                let word = actual.relators()[new_actual_idx].clone();
                let (m, wit) = orbit_min_with_witness(&word);
                insert_tracked(&mut canon, &mut track, m, new_actual_idx, wit);
            } else {
                destabilize_tracked(&mut moves, &mut actual, &mut canon, &mut track);
            }
            debug_assert_eq!(canon, actual.canonical_form());
            continue;
        }

        let (i, j) = (step.i as usize, step.j as usize);
        let (actual_i, _) = track[i].clone();
        let (actual_j, _) = track[j].clone();
        let u = nth_conjugator(actual.generators(), conj_cap, step.u_idx as usize);

        normalize_relator(&mut moves, &mut actual, &mut track, i, &Word::empty(), false);
        let want_inverted = step.delta == -1;
        normalize_relator(&mut moves, &mut actual, &mut track, j, &u, want_inverted);

        moves.push(AcMove::Concat {
            i: actual_i + 1,
            j: actual_j + 1,
        });
        actual = actual
            .apply_move(moves.last().unwrap())
            .expect("concat applies");

        // Re-derive the changed relator's canonical data and re-sort.
        let rho = actual.relators()[actual_i].clone();
        let (m, wit) = orbit_min_with_witness(&rho);
        track[i] = (actual_i, wit);
        replace_canon_word(&mut canon, i, m);
        sort_tracking(&mut canon, &mut track);
        debug_assert_eq!(canon, actual.canonical_form());
    }

    // Normalize the witnessing relators to the exact single letters.
    for g in 1..=target_m as u32 {
        let target = Word::letter(Letter::positive(g));
        let c = (0..canon.relators().len())
            .find(|&c| canon.relators()[c] == target)
            .expect("m-trivial class has the single-letter relator");
        normalize_relator(&mut moves, &mut actual, &mut track, c, &Word::empty(), false);
    }

    AcCertificate {
        moves,
        claimed_final: actual,
    }
}

type Tracking = Vec<(usize, RelWitness)>;

fn canonical_with_tracking(actual: &GroupPresentation) -> (GroupPresentation, Tracking) {
    let mut items: Vec<(Word, usize, RelWitness)> = actual
        .relators()
        .iter()
        .enumerate()
        .map(|(idx, r)| {
            let (m, wit) = orbit_min_with_witness(r);
            (m, idx, wit)
        })
        .collect();
    items.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    let words: Vec<Word> = items.iter().map(|(w, _, _)| w.clone()).collect();
    let track: Tracking = items.into_iter().map(|(_, idx, wit)| (idx, wit)).collect();
    let canon = GroupPresentation::new(actual.generators(), words).expect("valid");
    (canon, track)
}

/// Emit the moves making `actual[track[c].0]` equal exactly
/// `u · canon[c]^(inverted ? -1 : +1) · u^-1`, updating the witness.
fn normalize_relator(
    moves: &mut Vec<AcMove>,
    actual: &mut GroupPresentation,
    track: &mut Tracking,
    c: usize,
    u: &Word,
    inverted: bool,
) {
    let (actual_idx, wit) = track[c].clone();
    if !wit.v.is_empty() {
        let mv = AcMove::Conjugate {
            i: actual_idx + 1,
            u: wit.v.inverse(),
        };
        *actual = actual.apply_move(&mv).expect("conjugate applies");
        moves.push(mv);
    }
    if wit.inverted != inverted {
        let mv = AcMove::Invert { i: actual_idx + 1 };
        *actual = actual.apply_move(&mv).expect("invert applies");
        moves.push(mv);
    }
    if !u.is_empty() {
        let mv = AcMove::Conjugate {
            i: actual_idx + 1,
            u: u.clone(),
        };
        *actual = actual.apply_move(&mv).expect("conjugate applies");
        moves.push(mv);
    }
    track[c] = (
        actual_idx,
        RelWitness {
            v: u.clone(),
            inverted,
        },
    );
}

fn replace_canon_word(canon: &mut GroupPresentation, c: usize, word: Word) {
    let mut words = canon.relators().to_vec();
    words[c] = word;
    *canon = GroupPresentation::new(canon.generators(), words).expect("valid");
}

fn sort_tracking(canon: &mut GroupPresentation, track: &mut Tracking) {
    let mut items: Vec<(Word, usize, RelWitness)> = canon
        .relators()
        .iter()
        .cloned()
        .zip(track.iter().cloned())
        .map(|(w, (idx, wit))| (w, idx, wit))
        .collect();
    items.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    let words: Vec<Word> = items.iter().map(|(w, _, _)| w.clone()).collect();
    *track = items.into_iter().map(|(_, idx, wit)| (idx, wit)).collect();
    *canon = GroupPresentation::new(canon.generators(), words).expect("valid");
}

fn insert_tracked(
    canon: &mut GroupPresentation,
    track: &mut Tracking,
    word: Word,
    actual_idx: usize,
    wit: RelWitness,
) {
    let mut words = canon.relators().to_vec();
    words.push(word);
    *canon = GroupPresentation::new(canon.generators() + 1, words).expect("valid");
    track.push((actual_idx, wit));
    sort_tracking(canon, track);
}

fn destabilize_tracked(
    moves: &mut Vec<AcMove>,
    actual: &mut GroupPresentation,
    canon: &mut GroupPresentation,
    track: &mut Tracking,
) {
    let g = canon.generators() as u32;
    let c = (0..canon.relators().len())
        .find(|&c| {
            let r = &canon.relators()[c];
            r.len() == 1 && r.letters()[0].generator() == g
        })
        .expect("destabilize step recorded only when applicable");
    normalize_relator(moves, actual, track, c, &Word::empty(), false);
    let (removed_actual, _) = track[c].clone();
    moves.push(AcMove::Destabilize);
    *actual = actual.apply_move(&AcMove::Destabilize).expect("destabilize");

    let mut words = canon.relators().to_vec();
    words.remove(c);
    track.remove(c);
    for (idx, _) in track.iter_mut() {
        if *idx > removed_actual {
            *idx -= 1;
        }
    }
    *canon = GroupPresentation::new(canon.generators() - 1, words).expect("valid");
}
