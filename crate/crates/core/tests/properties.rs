//! Cross-module invariants: move soundness checked symbolically against the
//! relator algebra, orbit invariance of the canonical form, and round trips
//! of the interchange formats.

use bandcalc::acsearch::{ac_search, SearchBudget, SearchOptions};
use bandcalc::alexander::alexander_polynomial;
use bandcalc::catalog::{self, CatalogPayload};
use bandcalc::diagrams::{Band, BandEnd, DiagramMove, RibbonPresentation};
use bandcalc::presentations::{verify_certificate, AcMove, GroupPresentation};
use bandcalc::undisking::{trivialize_search, TrivializeOutcome, UndiskingCertificate};
use bandcalc::words::{Letter, Word};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn arb_word(max_gen: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(
        (1..=max_gen, prop_oneof![Just(1i8), Just(-1i8)]),
        0..=max_len,
    )
    .prop_map(|pairs| Word::from_pairs(&pairs))
}

fn arb_presentation() -> impl Strategy<Value = GroupPresentation> {
    (1usize..=3).prop_flat_map(|g| {
        prop::collection::vec(arb_word(g as u32, 8), 1..=3)
            .prop_map(move |rs| GroupPresentation::new(g, rs).unwrap())
    })
}

fn arb_presentation_and_move() -> impl Strategy<Value = (GroupPresentation, AcMove)> {
    arb_presentation().prop_flat_map(|p| {
        let k = p.relators().len();
        let g = p.generators() as u32;
        let invert = (1..=k).prop_map(|i| AcMove::Invert { i }).boxed();
        let conjugate = ((1..=k), arb_word(g, 4))
            .prop_map(|(i, u)| AcMove::Conjugate { i, u })
            .boxed();
        let mv = if k >= 2 {
            let concat = (1..=k, 1..=k - 1)
                .prop_map(move |(i, offset)| AcMove::Concat {
                    i,
                    j: ((i - 1 + offset) % k) + 1,
                })
                .boxed();
            prop_oneof![invert, concat, conjugate].boxed()
        } else {
            prop_oneof![invert, conjugate].boxed()
        };
        (Just(p), mv)
    })
}

proptest! {
    #[test]
    fn relator_moves_preserve_abelianization((p, mv) in arb_presentation_and_move()) {
        if let Ok(q) = p.apply_move(&mv) {
            prop_assert_eq!(p.abelian_invariants(), q.abelian_invariants());
        }
    }

    #[test]
    fn canonical_form_is_orbit_invariant(
        (p, conj) in arb_presentation()
            .prop_flat_map(|p| {
                let g = p.generators() as u32;
                (Just(p), arb_word(g, 4))
            })
    ) {
        // inversion, conjugation, and relator rotation all collapse
        let k = p.relators().len();
        let mut q = p.clone();
        for i in 1..=k {
            if i % 2 == 1 {
                q = q.apply_move(&AcMove::Invert { i }).unwrap();
            }
            q = q.apply_move(&AcMove::Conjugate { i, u: conj.clone() }).unwrap();
        }
        prop_assert_eq!(p.canonical_form(), q.canonical_form());
    }

    #[test]
    fn word_serde_round_trip(w in arb_word(4, 10)) {
        let json = serde_json::to_string(&w).unwrap();
        let back: Word = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn presentation_serde_round_trip(p in arb_presentation()) {
        let json = serde_json::to_string(&p).unwrap();
        let back: GroupPresentation = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, p);
    }
}

fn random_word(rng: &mut StdRng, generators: u32, max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    Word::from_letters((0..len).map(|_| {
        Letter::new(
            rng.random_range(1..=generators),
            if rng.random_bool(0.5) { 1 } else { -1 },
        )
    }))
}

fn random_disk(rng: &mut StdRng, max_circles: usize, max_word: usize) -> RibbonPresentation {
    let n = rng.random_range(2..=max_circles);
    let bands = (2..=n)
        .map(|i| {
            let j = rng.random_range(1..i);
            let word = random_word(rng, n as u32, max_word);
            if rng.random_bool(0.5) {
                Band::new(j, i, word)
            } else {
                Band::new(i, j, word)
            }
        })
        .collect();
    RibbonPresentation::new(n, bands).expect("valid disk")
}

/// A slide replaces the slid band's relator by the product of a conjugate
/// of itself with a conjugate of the other band's inverted relator. The
/// expected relator is derived here from the words alone and compared with
/// what the move produced.
#[test]
fn slide_end_is_a_relator_product_symbolically() {
    let mut rng = StdRng::seed_from_u64(0x51DE);
    let mut checked = 0usize;
    while checked < 200 {
        let p = random_disk(&mut rng, 4, 6);
        if p.bands.len() < 2 {
            continue;
        }
        let band = rng.random_range(1..=p.bands.len());
        let over = rng.random_range(1..=p.bands.len());
        if band == over {
            continue;
        }
        let band_end = if rng.random_bool(0.5) {
            BandEnd::Source
        } else {
            BandEnd::Target
        };
        let over_end = if rng.random_bool(0.5) {
            BandEnd::Source
        } else {
            BandEnd::Target
        };
        let mv = DiagramMove::SlideEnd {
            band,
            band_end,
            over,
            over_end,
        };
        let Ok(q) = p.apply(&mv) else { continue };
        checked += 1;

        // independent derivation in the target-aligned view
        let view = |b: &Band, end: BandEnd| -> Band {
            match end {
                BandEnd::Target => b.clone(),
                BandEnd::Source => b.reversed(),
            }
        };
        let bv = view(&p.bands[band - 1], band_end);
        let ov = view(&p.bands[over - 1], over_end);
        let w_over = &ov.word;
        let expected_viewed = bv
            .relator()
            .conjugated_by(&w_over.inverse())
            .concat(&ov.relator().inverse().conjugated_by(&w_over.inverse()));
        let got_viewed = view(&q.bands[band - 1], band_end).relator();
        assert_eq!(
            got_viewed, expected_viewed,
            "slide of band {band} over {over} is not the expected relator product"
        );
        // all other bands untouched
        for k in 1..=p.bands.len() {
            if k != band {
                assert_eq!(p.bands[k - 1], q.bands[k - 1]);
            }
        }
    }
}

/// Cancelling a band eliminates its target meridian: every surviving
/// relator must equal the substitution image of the old one, reindexed.
#[test]
fn cancel_is_generator_elimination_symbolically() {
    let mut rng = StdRng::seed_from_u64(0xCA7CE1);
    let mut checked = 0usize;
    while checked < 200 {
        let p = random_disk(&mut rng, 4, 6);
        let band = rng.random_range(1..=p.bands.len().max(1));
        if p.bands.is_empty() {
            continue;
        }
        let Ok(q) = p.apply(&DiagramMove::Cancel { band }) else {
            continue;
        };
        checked += 1;
        let b = &p.bands[band - 1];
        let t = b.target;
        let image = b
            .word
            .concat(&Word::letter(Letter::positive(b.source as u32)))
            .concat(&b.word.inverse());
        let reindex = |w: &Word| -> Word {
            w.iter()
                .map(|l| {
                    if (l.generator() as usize) > t {
                        Letter::new(l.generator() - 1, l.sign())
                    } else {
                        *l
                    }
                })
                .collect()
        };
        let mut expected: Vec<Word> = Vec::new();
        for (k, other) in p.bands.iter().enumerate() {
            if k == band - 1 {
                continue;
            }
            expected.push(reindex(&other.relator().substitute(t as u32, &image)));
        }
        let got: Vec<Word> = q.bands.iter().map(Band::relator).collect();
        assert_eq!(got, expected, "cancel of band {band} on {p:?}");
    }
}

#[test]
fn trivialize_search_results_replay() {
    let mut rng = StdRng::seed_from_u64(0x7121);
    let budget = SearchBudget {
        max_nodes: 300,
        max_total_length: 24,
        max_conjugator_length: 2,
    };
    let mut found = 0usize;
    for _ in 0..120 {
        let p = random_disk(&mut rng, 3, 3);
        match trivialize_search(&p, &budget) {
            Ok(TrivializeOutcome::Trivialized(moves)) => {
                found += 1;
                let end = p.apply_all(&moves).unwrap();
                assert!(end.is_syntactically_trivial());
            }
            Ok(TrivializeOutcome::Unknown { .. }) | Err(_) => {}
        }
    }
    assert!(found > 10, "the search should trivialize a fair share of small disks");
}

#[test]
fn search_certificates_always_verify() {
    // randomized conjugated ladders: certified instances must verify
    let mut rng = StdRng::seed_from_u64(0xACAC);
    for _ in 0..20 {
        let omega = random_word(&mut rng, 2, 4);
        let r2 = omega
            .concat(&Word::letter(Letter::positive(1)))
            .concat(&omega.inverse())
            .concat(&Word::letter(Letter::negative(2)));
        let p = GroupPresentation::new(2, vec![Word::letter(Letter::positive(1)), r2]).unwrap();
        let out = ac_search(
            &p,
            2,
            &SearchBudget {
                max_nodes: 20_000,
                max_total_length: 32,
                max_conjugator_length: 2,
            },
            &SearchOptions::default(),
        );
        let cert = out.certificate().expect("ladders are trivializable");
        assert!(verify_certificate(&p, cert, 2));
    }
}

#[test]
fn catalog_disk_order_ideals_are_units_at_one() {
    for entry in catalog::entries() {
        let CatalogPayload::Diagram(d) = &entry.payload else {
            continue;
        };
        let delta = alexander_polynomial(&d.group().unwrap()).unwrap();
        let v = delta.evaluate_at_one();
        assert!(
            v == BigInt::from(1) || v == BigInt::from(-1),
            "{}: evaluation at 1 must be a unit, got {v}",
            entry.name
        );
    }
}

#[test]
fn undisking_certificate_serde_round_trip() {
    let cert = catalog::spun_twist_certificate(3).unwrap();
    let json = serde_json::to_string(&cert).unwrap();
    let back: UndiskingCertificate = serde_json::from_str(&json).unwrap();
    assert_eq!(back, cert);
}
