//! Built-in parametrized example families.
//!
//! Every entry carries an `expected` map of invariant values with a note on
//! where each value comes from; `CatalogEntry::verify` recomputes them all.
//! Twist-family passage words were fixed by matching their order ideals
//! against the classical twist-knot polynomials with an independent
//! hand derivation before being frozen here, and each family ships a stored
//! one-pass certificate that replays to the trivial diagram.

use crate::acsearch::SearchBudget;
use crate::alexander::{alexander_polynomial, LaurentPoly};
use crate::diagrams::{Band, BandEnd, BandPass, DiagramMove, PassDirection, RibbonPresentation};
use crate::handles::{handle_counts, verify_product_ball, ClosedSphereSpec, HandleKind};
use crate::presentations::GroupPresentation;
use crate::undisking::UndiskingCertificate;
use crate::words::{Letter, Word};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unsupported parameter {parameter} for catalog family {family}")]
    UnsupportedParameter { family: &'static str, parameter: i64 },
    #[error("unknown catalog entry {0}")]
    UnknownEntry(String),
}

/// `n` circles in a row, joined by empty fusion bands: the disk of the
/// unknot with `n` minima.
pub fn trivial(n: usize) -> RibbonPresentation {
    assert!(n >= 1, "trivial(n) needs n >= 1");
    RibbonPresentation::new(
        n,
        (1..n).map(|i| Band::new(i, i + 1, Word::empty())).collect(),
    )
    .expect("valid by construction")
}

/// Passage word of the spun twist-knot disk family.
///
/// `n = 1` is the spun trefoil word `x1 x2`; `|n| >= 2` uses
/// `(x2 x1^-1)^n x2 (x1 x2^-1)^n`, whose middle letter is the single pass
/// that trivializes the diagram. Negative `n` mirrors every piercing sign.
pub fn spun_twist_word(n: i64) -> Result<Word, CatalogError> {
    if n == 0 {
        return Err(CatalogError::UnsupportedParameter {
            family: "spun-twist",
            parameter: 0,
        });
    }
    let k = n.unsigned_abs() as usize;
    let positive = if k == 1 {
        Word::from_pairs(&[(1, 1), (2, 1)])
    } else {
        let mut letters = Vec::with_capacity(4 * k + 1);
        for _ in 0..k {
            letters.push(Letter::positive(2));
            letters.push(Letter::negative(1));
        }
        letters.push(Letter::positive(2));
        for _ in 0..k {
            letters.push(Letter::positive(1));
            letters.push(Letter::negative(2));
        }
        Word::from_letters(letters)
    };
    Ok(if n > 0 { positive } else { positive.mirrored() })
}

/// The spun twist-knot disk: two circles, one band.
pub fn spun_twist(n: i64) -> Result<RibbonPresentation, CatalogError> {
    let word = spun_twist_word(n)?;
    Ok(RibbonPresentation::new(2, vec![Band::new(1, 2, word)]).expect("two circles"))
}

/// The stored one-pass certificate for [`spun_twist`]: delete the middle
/// piercing, strip, cancel.
pub fn spun_twist_certificate(n: i64) -> Result<UndiskingCertificate, CatalogError> {
    let word = spun_twist_word(n)?;
    let k = n.unsigned_abs() as usize;
    let sign = if n > 0 { 1 } else { -1 };
    let (position, trivialization) = if k == 1 {
        (
            2,
            vec![
                DiagramMove::EndReduce {
                    band: 1,
                    end: BandEnd::Source,
                },
                DiagramMove::Cancel { band: 1 },
            ],
        )
    } else {
        (2 * k + 1, vec![DiagramMove::Cancel { band: 1 }])
    };
    debug_assert_eq!(word.letters()[position - 1], Letter::new(2, sign));
    Ok(UndiskingCertificate {
        passes: vec![BandPass {
            band: 1,
            position,
            generator: 2,
            sign,
            direction: PassDirection::Delete,
        }],
        trivialization,
    })
}

/// The pinned order ideal of the spun twist-knot disk family:
/// `|n| t^2 - (2|n|+1) t + |n|` for `|n| >= 2` and the trefoil value
/// `t^2 - t + 1` at `n = ±1`.
pub fn spun_twist_polynomial(n: i64) -> Result<LaurentPoly, CatalogError> {
    if n == 0 {
        return Err(CatalogError::UnsupportedParameter {
            family: "spun-twist",
            parameter: 0,
        });
    }
    let k = n.unsigned_abs() as i64;
    Ok(if k == 1 {
        LaurentPoly::from_pairs(&[(0, 1), (1, -1), (2, 1)])
    } else {
        LaurentPoly::from_pairs(&[(0, k), (1, -(2 * k + 1)), (2, k)])
    })
}

/// `<x, y | xyx(yxy)^-1, x^(n+1) y^-n>` for `n >= 2`.
pub fn ak(n: u32) -> Result<GroupPresentation, CatalogError> {
    if n < 2 {
        return Err(CatalogError::UnsupportedParameter {
            family: "ak",
            parameter: n as i64,
        });
    }
    let r1 = Word::from_pairs(&[(1, 1), (2, 1), (1, 1), (2, -1), (1, -1), (2, -1)]);
    let mut letters = Vec::with_capacity(2 * n as usize + 1);
    for _ in 0..=n {
        letters.push(Letter::positive(1));
    }
    for _ in 0..n {
        letters.push(Letter::negative(2));
    }
    let r2 = Word::from_letters(letters);
    Ok(GroupPresentation::new(2, vec![r1, r2]).expect("two generators"))
}

/// Sphere data for the twist-spun trefoil presented as a union of two
/// two-minima ribbon disks: the fusion side carries the passage word
/// `x1^-1 x2` (order ideal `2t - 1`), and the single fission conjugator
/// records three passes over the band handles, once algebraically.
pub fn two_twist_spun_trefoil() -> ClosedSphereSpec {
    let fusion = RibbonPresentation::new(
        2,
        vec![Band::new(1, 2, Word::from_pairs(&[(1, -1), (2, 1)]))],
    )
    .expect("two circles");
    ClosedSphereSpec::new(
        fusion,
        2,
        vec![Word::from_pairs(&[(2, 1), (1, 1), (2, -1)])],
        None,
    )
}

/// The unknotted sphere: one minimum, one maximum, no bands.
pub fn unknotted_sphere() -> ClosedSphereSpec {
    ClosedSphereSpec::new(trivial(1), 1, vec![], None)
}

/// The double of a ribbon disk presented with a single maximum: the fusion
/// side is the disk itself and there is nothing on the fission side.
pub fn one_maximum_double(disk: &RibbonPresentation) -> ClosedSphereSpec {
    ClosedSphereSpec::new(disk.clone(), 1, vec![], None)
}

/// What a catalog entry stores.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogPayload {
    Diagram(RibbonPresentation),
    Sphere(ClosedSphereSpec),
    Presentation(GroupPresentation),
}

/// One expected invariant value with the note on where it comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    pub invariant: &'static str,
    pub value: ExpectedValue,
    pub provenance: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpectedValue {
    Poly(LaurentPoly),
    Bool(bool),
    Counts(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Vec<i64>,
    pub payload: CatalogPayload,
    pub expected: Vec<Expected>,
}

impl CatalogEntry {
    /// Recompute every expected invariant; returns the first mismatch.
    pub fn verify(&self) -> Result<(), String> {
        for e in &self.expected {
            let err = |got: &dyn std::fmt::Debug| {
                Err(format!(
                    "{}: invariant {} expected {:?}, got {:?}",
                    self.name, e.invariant, e.value, got
                ))
            };
            match (e.invariant, &e.value, &self.payload) {
                ("alexander", ExpectedValue::Poly(want), CatalogPayload::Diagram(d)) => {
                    let got = alexander_polynomial(&d.group().map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?;
                    if got != *want {
                        return err(&got);
                    }
                }
                ("fusion_alexander", ExpectedValue::Poly(want), CatalogPayload::Sphere(s)) => {
                    let got = alexander_polynomial(&s.fusion.group().map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?;
                    if got != *want {
                        return err(&got);
                    }
                }
                ("one_pass_certificate_replays", ExpectedValue::Bool(want), CatalogPayload::Diagram(d)) => {
                    let n = self.params.first().copied().unwrap_or(1);
                    let got = spun_twist_certificate(n)
                        .map(|c| c.verifies(d))
                        .unwrap_or(false);
                    if got != *want {
                        return err(&got);
                    }
                }
                ("euler", ExpectedValue::Bool(want), CatalogPayload::Sphere(s)) => {
                    let got = s.euler_check();
                    if got != *want {
                        return err(&got);
                    }
                }
                ("gluck4_counts", ExpectedValue::Counts(want), CatalogPayload::Sphere(s)) => {
                    let got = handle_counts(s, HandleKind::Gluck4)
                        .map_err(|e| e.to_string())?
                        .counts;
                    if got != *want {
                        return err(&got);
                    }
                }
                ("product_ball_certified", ExpectedValue::Bool(want), CatalogPayload::Sphere(s)) => {
                    let got = verify_product_ball(s, &SearchBudget::default())
                        .map_err(|e| e.to_string())?
                        .is_certified();
                    if got != *want {
                        return err(&got);
                    }
                }
                ("abelianization_trivial", ExpectedValue::Bool(want), CatalogPayload::Presentation(p)) => {
                    let inv = p.abelian_invariants();
                    let got = inv.canonical() == (vec![], 0);
                    if got != *want {
                        return err(&got);
                    }
                }
                (name, _, _) => {
                    return Err(format!("{}: unsupported invariant check {}", self.name, name))
                }
            }
        }
        Ok(())
    }
}

fn one() -> LaurentPoly {
    LaurentPoly::one()
}

/// The named registry. Entries are addressed as `name` plus an optional
/// integer parameter.
pub fn entries() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for n in 1..=6i64 {
        out.push(CatalogEntry {
            name: "trivial".to_string(),
            params: vec![n],
            payload: CatalogPayload::Diagram(trivial(n as usize)),
            expected: vec![Expected {
                invariant: "alexander",
                value: ExpectedValue::Poly(one()),
                provenance: "chain of empty fusion bands",
            }],
        });
    }
    for n in [-2i64, -1, 1, 2, 3, 4, 5] {
        out.push(CatalogEntry {
            name: "spun-twist".to_string(),
            params: vec![n],
            payload: CatalogPayload::Diagram(spun_twist(n).unwrap()),
            expected: vec![
                Expected {
                    invariant: "alexander",
                    value: ExpectedValue::Poly(spun_twist_polynomial(n).unwrap()),
                    provenance: "hand derivative of the passage word, cross-checked against the classical twist-knot polynomial",
                },
                Expected {
                    invariant: "one_pass_certificate_replays",
                    value: ExpectedValue::Bool(true),
                    provenance: "stored certificate replay",
                },
            ],
        });
    }
    for n in 2..=4u32 {
        out.push(CatalogEntry {
            name: "ak".to_string(),
            params: vec![n as i64],
            payload: CatalogPayload::Presentation(ak(n).unwrap()),
            expected: vec![Expected {
                invariant: "abelianization_trivial",
                value: ExpectedValue::Bool(true),
                provenance: "Smith form of the 2x2 exponent matrix",
            }],
        });
    }
    out.push(CatalogEntry {
        name: "two-twist-spun-trefoil".to_string(),
        params: vec![],
        payload: CatalogPayload::Sphere(two_twist_spun_trefoil()),
        expected: vec![
            Expected {
                invariant: "euler",
                value: ExpectedValue::Bool(true),
                provenance: "count arithmetic",
            },
            Expected {
                invariant: "gluck4_counts",
                value: ExpectedValue::Counts(vec![1, 2, 3, 1, 1]),
                provenance: "count arithmetic",
            },
            Expected {
                invariant: "product_ball_certified",
                value: ExpectedValue::Bool(true),
                provenance: "constructive ladder certificate replay",
            },
            Expected {
                invariant: "fusion_alexander",
                value: ExpectedValue::Poly(LaurentPoly::from_pairs(&[(0, -1), (1, 2)])),
                provenance: "hand derivative; factors the classical stevedore polynomial",
            },
        ],
    });
    out.push(CatalogEntry {
        name: "unknotted-sphere".to_string(),
        params: vec![],
        payload: CatalogPayload::Sphere(unknotted_sphere()),
        expected: vec![
            Expected {
                invariant: "euler",
                value: ExpectedValue::Bool(true),
                provenance: "count arithmetic",
            },
            Expected {
                invariant: "gluck4_counts",
                value: ExpectedValue::Counts(vec![1, 1, 1, 0, 1]),
                provenance: "count arithmetic",
            },
            Expected {
                invariant: "product_ball_certified",
                value: ExpectedValue::Bool(true),
                provenance: "single-maximum form: empty certificate",
            },
        ],
    });
    for (label, disk) in [
        ("double-trivial", trivial(3)),
        ("double-spun-twist-1", spun_twist(1).unwrap()),
        ("double-spun-twist-2", spun_twist(2).unwrap()),
    ] {
        out.push(CatalogEntry {
            name: label.to_string(),
            params: vec![],
            payload: CatalogPayload::Sphere(one_maximum_double(&disk)),
            expected: vec![
                Expected {
                    invariant: "euler",
                    value: ExpectedValue::Bool(true),
                    provenance: "single maximum: bands = circles - 1",
                },
                Expected {
                    invariant: "product_ball_certified",
                    value: ExpectedValue::Bool(true),
                    provenance: "single-maximum form: empty certificate",
                },
            ],
        });
    }
    out
}

/// Look up an entry by name and optional parameter.
pub fn get(name: &str, param: Option<i64>) -> Result<CatalogEntry, CatalogError> {
    match name {
        "trivial" => {
            let n = param.unwrap_or(3);
            if n < 1 {
                return Err(CatalogError::UnsupportedParameter {
                    family: "trivial",
                    parameter: n,
                });
            }
            Ok(CatalogEntry {
                name: "trivial".to_string(),
                params: vec![n],
                payload: CatalogPayload::Diagram(trivial(n as usize)),
                expected: vec![Expected {
                    invariant: "alexander",
                    value: ExpectedValue::Poly(one()),
                    provenance: "chain of empty fusion bands",
                }],
            })
        }
        "spun-twist" => {
            let n = param.unwrap_or(1);
            Ok(CatalogEntry {
                name: "spun-twist".to_string(),
                params: vec![n],
                payload: CatalogPayload::Diagram(spun_twist(n)?),
                expected: vec![Expected {
                    invariant: "alexander",
                    value: ExpectedValue::Poly(spun_twist_polynomial(n)?),
                    provenance: "hand derivative of the passage word",
                }],
            })
        }
        "ak" => {
            let n = param.unwrap_or(3);
            let n_u32 = u32::try_from(n).map_err(|_| CatalogError::UnsupportedParameter {
                family: "ak",
                parameter: n,
            })?;
            Ok(CatalogEntry {
                name: "ak".to_string(),
                params: vec![n],
                payload: CatalogPayload::Presentation(ak(n_u32)?),
                expected: vec![],
            })
        }
        other => entries()
            .into_iter()
            .find(|e| e.name == other)
            .ok_or_else(|| CatalogError::UnknownEntry(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alexander::alexander_matrix;
    use crate::undisking::{certify_undisking, UndiskingOutcome};

    #[test]
    fn trivial_family() {
        let t1 = trivial(1);
        assert_eq!(t1.circles, 1);
        assert!(t1.bands.is_empty());

        let t3 = trivial(3);
        assert_eq!(t3.bands.len(), 2);
        assert!(t3.is_syntactically_trivial());

        let delta = alexander_polynomial(&trivial(4).group().unwrap()).unwrap();
        assert!(delta.is_one());
    }

    #[test]
    fn spun_twist_words_and_polynomials() {
        assert_eq!(spun_twist_word(1).unwrap(), Word::from_pairs(&[(1, 1), (2, 1)]));
        for n in [-5i64, -3, -2, -1, 1, 2, 3, 4, 5] {
            let d = spun_twist(n).unwrap();
            let delta = alexander_polynomial(&d.group().unwrap()).unwrap();
            assert_eq!(
                delta,
                spun_twist_polynomial(n).unwrap(),
                "order ideal for n = {n}"
            );
            // evaluation at 1 is a unit
            let at_one = delta.evaluate_at_one();
            assert!(
                at_one == num_bigint::BigInt::from(1) || at_one == num_bigint::BigInt::from(-1)
            );
        }
        assert_eq!(
            spun_twist_polynomial(2).unwrap(),
            LaurentPoly::from_pairs(&[(0, 2), (1, -5), (2, 2)])
        );
    }

    #[test]
    fn spun_twist_certificates_replay() {
        for n in [-3i64, -1, 1, 2, 3, 4, 5] {
            let d = spun_twist(n).unwrap();
            let cert = spun_twist_certificate(n).unwrap();
            assert!(cert.verifies(&d), "stored certificate for n = {n}");
        }
    }

    #[test]
    fn spun_twist_undisking_search_certifies() {
        for n in [1i64, 2, 3] {
            let d = spun_twist(n).unwrap();
            match certify_undisking(&d, 1, &SearchBudget::default()).unwrap() {
                UndiskingOutcome::Certified(cert) => assert!(cert.verifies(&d)),
                UndiskingOutcome::Unknown { .. } => panic!("n = {n} must certify"),
            }
        }
    }

    #[test]
    fn ak_family() {
        let p = ak(3).unwrap();
        assert_eq!(p.relators()[0].len(), 6);
        assert_eq!(p.relators()[1].len(), 7);
        let inv = p.abelian_invariants();
        assert_eq!(inv.canonical(), (vec![], 0));
        assert!(ak(1).is_err());
    }

    #[test]
    fn two_twist_spun_trefoil_data() {
        let s = two_twist_spun_trefoil();
        assert!(s.euler_check());
        assert!(s.has_standard_fission_shape());
        let delta = alexander_polynomial(&s.fusion.group().unwrap()).unwrap();
        assert_eq!(delta, LaurentPoly::from_pairs(&[(0, -1), (1, 2)]));
        let v = verify_product_ball(&s, &SearchBudget::default()).unwrap();
        assert!(v.is_certified());
    }

    #[test]
    fn column_independence_on_catalog_diagrams() {
        for n in [1i64, 2, 3] {
            let g = spun_twist(n).unwrap().group().unwrap();
            let m = alexander_matrix(&g).unwrap();
            let first = m.minor_determinant(0).normalized();
            for col in 1..m.cols() {
                assert_eq!(m.minor_determinant(col).normalized(), first);
            }
        }
    }

    #[test]
    fn every_entry_verifies() {
        for entry in entries() {
            entry.verify().unwrap_or_else(|e| panic!("{e}"));
        }
    }

    #[test]
    fn lookup_by_name() {
        assert!(get("spun-twist", Some(2)).is_ok());
        assert!(get("spun-twist", Some(0)).is_err());
        assert!(get("nonsense", None).is_err());
        assert!(get("two-twist-spun-trefoil", None).is_ok());
    }
}
