//! Handle bookkeeping for closed-sphere data and the induced presentations.
//!
//! A [`ClosedSphereSpec`] packages the minima-side diagram (a disk
//! presentation with its fusion bands), the number of maxima `m`, and the
//! fission conjugators read through the dual disks. The derived structures
//! count one 0-handle, `m` 1-handles, `k+1` 2-handles (the band handles
//! plus the twist handle on the first meridian), and `n-1` 3-handles, with
//! a cap only in dimension four.
//!
//! The induced presentation on the meridians `x_1..x_m` has the twist
//! relator `x_1`, the fission ladder `ω_i x_i ω_i^-1 x_{i+1}^-1`, and any
//! caller-supplied dual fusion relators as excess. When the ladder is
//! complete the trivialization is constructive; nothing is searched.

use crate::acsearch::{ac_search, SearchBudget, SearchOptions, SearchOutcome};
use crate::diagrams::RibbonPresentation;
use crate::presentations::{
    verify_certificate, AcCertificate, AcMove, GroupPresentation, PresentationError,
};
use crate::words::{Letter, Word};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HandlesError {
    #[error("band and maxima counts violate k - n + 1 = m - 1 (k = {k}, n = {n}, m = {m})")]
    EulerViolation { k: usize, n: usize, m: usize },
    #[error("fission data out of range: {0}")]
    FissionOutOfRange(String),
    #[error("invalid fusion diagram: {0}")]
    InvalidFusion(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// Closed 2-sphere data: the fusion-side disk presentation, the number of
/// maxima, and the fission conjugators (one per adjacent maxima pair).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ClosedSphereSpec {
    pub fusion: RibbonPresentation,
    pub maxima: usize,
    pub fission_words: Vec<Word>,
    #[serde(default)]
    pub fusion_words_dual: Option<Vec<Word>>,
}

impl ClosedSphereSpec {
    pub fn new(
        fusion: RibbonPresentation,
        maxima: usize,
        fission_words: Vec<Word>,
        fusion_words_dual: Option<Vec<Word>>,
    ) -> Self {
        ClosedSphereSpec {
            fusion,
            maxima,
            fission_words,
            fusion_words_dual,
        }
    }

    /// Total band count: fusion bands plus fission bands.
    pub fn band_count(&self) -> usize {
        self.fusion.bands.len() + self.fission_words.len()
    }

    /// `k - n + 1 = m - 1` for a closed sphere.
    pub fn euler_check(&self) -> bool {
        let k = self.band_count() as i64;
        let n = self.fusion.circles as i64;
        let m = self.maxima as i64;
        k - n + 1 == m - 1
    }

    /// The fission data matches the complete ladder shape.
    pub fn has_standard_fission_shape(&self) -> bool {
        self.maxima >= 1 && self.fission_words.len() == self.maxima - 1
    }
}

/// Role of a handle in the decomposition.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HandleRole {
    Gluck,
    Fusion,
    Fission,
    Cap,
}

/// Role tag plus the framing carried as metadata (never consumed by the
/// group-level verification).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HandleLabel {
    pub role: HandleRole,
    pub framing: Option<i64>,
}

/// Which derived handle decomposition to report.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HandleKind {
    /// The twisted 4-manifold: cap included.
    Gluck4,
    /// Its product with an interval: a 5-ball with no cap.
    Product5,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct HandleStructure {
    pub dimension: usize,
    /// Handle count per index `0..=dimension`.
    pub counts: Vec<usize>,
    pub presentation: GroupPresentation,
    /// Labels for the 2-handles in attachment order, then the cap if any.
    pub labels: Vec<HandleLabel>,
}

impl HandleStructure {
    pub fn euler_characteristic(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

/// Handle counts induced by a sphere spec. Errors when the sphere data
/// fails the closed-surface count identity.
pub fn handle_counts(spec: &ClosedSphereSpec, kind: HandleKind) -> Result<HandleStructure, HandlesError> {
    if !spec.euler_check() {
        return Err(HandlesError::EulerViolation {
            k: spec.band_count(),
            n: spec.fusion.circles,
            m: spec.maxima,
        });
    }
    let n = spec.fusion.circles;
    let m = spec.maxima;
    let k = spec.band_count();
    let presentation = gluck_presentation(spec)?;
    let mut labels = vec![HandleLabel {
        role: HandleRole::Gluck,
        framing: Some(1),
    }];
    labels.extend(std::iter::repeat_n(
        HandleLabel {
            role: HandleRole::Fission,
            framing: Some(0),
        },
        m - 1,
    ));
    labels.extend(std::iter::repeat_n(
        HandleLabel {
            role: HandleRole::Fusion,
            framing: Some(0),
        },
        n - 1,
    ));
    let (dimension, counts) = match kind {
        HandleKind::Gluck4 => {
            labels.push(HandleLabel {
                role: HandleRole::Cap,
                framing: None,
            });
            (4, vec![1, m, k + 1, n - 1, 1])
        }
        HandleKind::Product5 => (5, vec![1, m, k + 1, n - 1, 0, 0]),
    };
    let hs = HandleStructure {
        dimension,
        counts,
        presentation,
        labels,
    };
    debug_assert_eq!(
        hs.euler_characteristic(),
        match kind {
            HandleKind::Gluck4 => 2,
            HandleKind::Product5 => 1,
        }
    );
    Ok(hs)
}

/// The induced presentation on the maxima meridians: the twist relator
/// `x_1`, the fission ladder, then any dual fusion relators as excess.
pub fn gluck_presentation(spec: &ClosedSphereSpec) -> Result<GroupPresentation, HandlesError> {
    let m = spec.maxima;
    if m == 0 {
        return Err(HandlesError::FissionOutOfRange(
            "at least one maximum is required".to_string(),
        ));
    }
    let mut relators = vec![Word::letter(Letter::positive(1))];
    for (i, omega) in spec.fission_words.iter().enumerate() {
        let lower = i + 1;
        let upper = i + 2;
        if upper > m {
            return Err(HandlesError::FissionOutOfRange(format!(
                "fission word {} joins maxima {} and {}, but only {} maxima exist",
                i + 1,
                lower,
                upper,
                m
            )));
        }
        if omega.max_generator() as usize > m {
            return Err(HandlesError::FissionOutOfRange(format!(
                "fission word {} references meridian {} of {}",
                i + 1,
                omega.max_generator(),
                m
            )));
        }
        let relator = omega
            .concat(&Word::letter(Letter::positive(lower as u32)))
            .concat(&omega.inverse())
            .concat(&Word::letter(Letter::negative(upper as u32)));
        relators.push(relator);
    }
    if let Some(duals) = &spec.fusion_words_dual {
        for (i, word) in duals.iter().enumerate() {
            if word.max_generator() as usize > m {
                return Err(HandlesError::FissionOutOfRange(format!(
                    "dual fusion word {} references meridian {} of {}",
                    i + 1,
                    word.max_generator(),
                    m
                )));
            }
            relators.push(word.clone());
        }
    }
    Ok(GroupPresentation::new(m, relators)?)
}

/// The constructive certificate trivializing the twist-plus-ladder
/// presentation: for each fission relator in order, conjugate in the
/// inverse of its word, invert, absorb the already-trivialized lower
/// meridian, and conjugate back. Requires the complete ladder.
pub fn constructive_trivialization(
    spec: &ClosedSphereSpec,
) -> Result<AcCertificate, HandlesError> {
    if !spec.has_standard_fission_shape() {
        return Err(HandlesError::FissionOutOfRange(format!(
            "expected {} fission words, found {}",
            spec.maxima.saturating_sub(1),
            spec.fission_words.len()
        )));
    }
    let start = gluck_presentation(spec)?;
    let mut moves = Vec::new();
    for (i, omega) in spec.fission_words.iter().enumerate() {
        let phi = i + 2; // 1-based index of the i-th fission relator
        if !omega.is_empty() {
            moves.push(AcMove::Conjugate {
                i: phi,
                u: omega.inverse(),
            });
        }
        moves.push(AcMove::Invert { i: phi });
        moves.push(AcMove::Concat { i: phi, j: i + 1 });
        if !omega.is_empty() {
            moves.push(AcMove::Conjugate {
                i: phi,
                u: omega.clone(),
            });
        }
    }
    let mut cur = start;
    for mv in &moves {
        cur = cur.apply_move(mv)?;
    }
    let cert = AcCertificate {
        moves,
        claimed_final: cur,
    };
    Ok(cert)
}

/// Replace `r_i` by `r_i · u r_j u^-1`: the relator bookkeeping of sliding
/// one 2-handle over another along the path recorded by `u`.
pub fn slide_2handle(
    p: &GroupPresentation,
    i: usize,
    j: usize,
    u: &Word,
) -> Result<GroupPresentation, PresentationError> {
    if i == j {
        return Err(PresentationError::ConcatSameIndex);
    }
    let moves = [
        AcMove::Conjugate {
            i: j,
            u: u.clone(),
        },
        AcMove::Concat { i, j },
        AcMove::Conjugate {
            i: j,
            u: u.inverse(),
        },
    ];
    let mut cur = p.clone();
    for mv in &moves {
        cur = cur.apply_move(mv)?;
    }
    Ok(cur)
}

/// Slide the 2-handle for relator `i` over relator `j` (conjugated by `u`),
/// then search for `m`-triviality of the twist-plus-ladder part. With a
/// single maximum there is nothing to slide over and the slide is vacuous.
pub fn verify_step2(
    spec: &ClosedSphereSpec,
    i: usize,
    j: usize,
    u: &Word,
    budget: &SearchBudget,
) -> Result<SearchOutcome, HandlesError> {
    let gp = gluck_presentation(spec)?;
    let m = spec.maxima;
    let slid = if spec.fission_words.is_empty() && m == 1 {
        gp
    } else {
        slide_2handle(&gp, i, j, u)?
    };
    // restrict to the twist relator and the fission ladder
    let restricted =
        GroupPresentation::new(m, slid.relators()[..1 + spec.fission_words.len()].to_vec())?;
    Ok(ac_search(&restricted, m, budget, &SearchOptions::default()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductBallVerdict {
    CertifiedB5(AcCertificate),
    Unknown,
}

impl ProductBallVerdict {
    pub fn certificate(&self) -> Option<&AcCertificate> {
        match self {
            ProductBallVerdict::CertifiedB5(c) => Some(c),
            ProductBallVerdict::Unknown => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, ProductBallVerdict::CertifiedB5(_))
    }
}

/// Certify that the product handle structure carries a trivializable
/// presentation. With the complete fission ladder this is constructive;
/// otherwise the searcher runs on the twist-plus-fission part within the
/// budget. The verdict concerns the presentation only.
pub fn verify_product_ball(
    spec: &ClosedSphereSpec,
    budget: &SearchBudget,
) -> Result<ProductBallVerdict, HandlesError> {
    let gp = gluck_presentation(spec)?;
    let m = spec.maxima;
    if spec.has_standard_fission_shape() {
        let cert = constructive_trivialization(spec)?;
        assert!(
            verify_certificate(&gp, &cert, m),
            "constructive certificate must replay"
        );
        return Ok(ProductBallVerdict::CertifiedB5(cert));
    }
    let restricted = GroupPresentation::new(
        m,
        gp.relators()[..1 + spec.fission_words.len().min(m - 1)].to_vec(),
    )?;
    match ac_search(&restricted, m, budget, &SearchOptions::default()) {
        SearchOutcome::Certified(cert) => Ok(ProductBallVerdict::CertifiedB5(cert)),
        SearchOutcome::Unknown(_) => Ok(ProductBallVerdict::Unknown),
    }
}
