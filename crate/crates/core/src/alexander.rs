//! Fox calculus over the one-variable Laurent ring, with exact integer
//! coefficients.
//!
//! Every generator abelianizes to the same variable `t`: the presentations
//! this crate produces are meridional (each relator is a conjugation
//! relation between circle meridians), so first homology is a single
//! infinite cyclic class. A presentation whose relators have nonzero total
//! exponent sum is rejected.

use crate::presentations::GroupPresentation;
use crate::words::Word;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AlexanderError {
    #[error("relator {index} has total exponent sum {sum}; all generators must abelianize to t")]
    NonMeridionalPresentation { index: usize, sum: i64 },
    #[error("presentation has {generators} generators and {relators} relators; deficiency 1 required")]
    WrongDeficiency { generators: usize, relators: usize },
}

/// Laurent polynomial in one variable with `BigInt` coefficients; no zero
/// coefficient is ever stored, so the empty map is the zero polynomial.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, 1)
    }

    /// `c * t^e`.
    pub fn monomial(exponent: i64, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exponent, c);
        }
        LaurentPoly { coeffs }
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        let mut p = LaurentPoly::zero();
        for &(e, c) in pairs {
            p.add_term(e, BigInt::from(c));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(BigInt::is_one)
    }

    pub fn add_term(&mut self, exponent: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exponent).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&exponent);
        }
    }

    pub fn coefficient(&self, exponent: i64) -> BigInt {
        self.coeffs.get(&exponent).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Sorted `(exponent, coefficient)` pairs, lowest exponent first.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn lowest_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn highest_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn evaluate_at_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    /// Multiply by the unit `±t^k` so the lowest exponent is 0 and the
    /// leading coefficient is positive. The zero polynomial stays zero.
    pub fn normalized(&self) -> LaurentPoly {
        let Some(lo) = self.lowest_exponent() else {
            return LaurentPoly::zero();
        };
        let hi = self.highest_exponent().unwrap();
        let flip = self.coeffs[&hi].is_negative();
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&e, c)| (e - lo, if flip { -c.clone() } else { c.clone() }))
            .collect();
        LaurentPoly { coeffs }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let coeffs = self.coeffs.iter().map(|(&e, c)| (e, -c.clone())).collect();
        LaurentPoly { coeffs }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        // highest degree first, classic polynomial order
        for (i, (&e, c)) in self.coeffs.iter().rev().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            match e {
                0 => write!(f, "{}", mag)?,
                1 if mag.is_one() => f.write_str("t")?,
                1 => write!(f, "{}*t", mag)?,
                _ if mag.is_one() => write!(f, "t^{}", e)?,
                _ => write!(f, "{}*t^{}", mag, e)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({})", self)
    }
}

fn serialize_bigint<S: Serializer>(c: &BigInt, serializer: S) -> Result<S::Ok, S::Error> {
    match i64::try_from(c) {
        Ok(v) => serializer.serialize_i64(v),
        Err(_) => serializer.serialize_str(&c.to_string()),
    }
}

pub(crate) fn serialize_bigints<S: Serializer>(
    v: &[BigInt],
    serializer: S,
) -> Result<S::Ok, S::Error> {
    struct B<'a>(&'a BigInt);
    impl Serialize for B<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize_bigint(self.0, s)
        }
    }
    let mut seq = serializer.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&B(c))?;
    }
    seq.end()
}

impl<'de> serde::Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Coeff {
            Small(i64),
            Big(String),
        }
        let pairs = Vec::<(i64, Coeff)>::deserialize(deserializer)?;
        let mut out = LaurentPoly::zero();
        for (e, c) in pairs {
            let c = match c {
                Coeff::Small(v) => BigInt::from(v),
                Coeff::Big(s) => s
                    .parse::<BigInt>()
                    .map_err(|_| serde::de::Error::custom("coefficient is not an integer"))?,
            };
            out.add_term(e, c);
        }
        Ok(out)
    }
}

impl Serialize for LaurentPoly {
    /// `[[exponent, coefficient], ...]`, lowest exponent first. Coefficients
    /// that fit an `i64` are numbers; larger ones are decimal strings.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Term<'a>(i64, &'a BigInt);
        impl Serialize for Term<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element(&self.0)?;
                struct C<'a>(&'a BigInt);
                impl Serialize for C<'_> {
                    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                        serialize_bigint(self.0, s)
                    }
                }
                seq.serialize_element(&C(self.1))?;
                seq.end()
            }
        }
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for (e, c) in self.terms() {
            seq.serialize_element(&Term(e, c))?;
        }
        seq.end()
    }
}

/// Relator x generator matrix of abelianized Fox derivatives.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlexanderMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<LaurentPoly>>,
}

impl AlexanderMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> &LaurentPoly {
        &self.entries[row][col]
    }

    /// Determinant of the square matrix obtained by deleting `col`.
    pub fn minor_determinant(&self, col: usize) -> LaurentPoly {
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != col).collect();
        let rows: Vec<usize> = (0..self.rows).collect();
        self.det_rec(&rows, &cols)
    }

    fn det_rec(&self, rows: &[usize], cols: &[usize]) -> LaurentPoly {
        debug_assert_eq!(rows.len(), cols.len());
        match rows.len() {
            0 => LaurentPoly::one(),
            1 => self.entries[rows[0]][cols[0]].clone(),
            n => {
                let mut det = LaurentPoly::zero();
                for (k, &r) in rows.iter().enumerate() {
                    let e = &self.entries[r][cols[0]];
                    if e.is_zero() {
                        continue;
                    }
                    let sub_rows: Vec<usize> = rows
                        .iter()
                        .copied()
                        .enumerate()
                        .filter(|&(i, _)| i != k)
                        .map(|(_, r)| r)
                        .collect();
                    let term = e * &self.det_rec(&sub_rows, &cols[1..]);
                    if k % 2 == 0 {
                        det = &det + &term;
                    } else {
                        det = &det - &term;
                    }
                }
                let _ = n;
                det
            }
        }
    }
}

/// Abelianized Fox derivative `d(w)/d(x_g)` with every generator sent to `t`.
///
/// Rules: `d(uv) = d(u) + abel(u)·d(v)`, `d(x_g)/d(x_g) = 1`,
/// `d(x_g^-1)/d(x_g) = -t^-1`, `d(x_h)/d(x_g) = 0` for `h != g`.
pub fn fox_derivative(w: &Word, generator: u32) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    let mut prefix_exp = 0i64;
    for l in w.iter() {
        if l.generator() == generator {
            if l.sign() == 1 {
                out.add_term(prefix_exp, BigInt::one());
            } else {
                out.add_term(prefix_exp - 1, -BigInt::one());
            }
        }
        prefix_exp += l.sign() as i64;
    }
    out
}

/// Entry `(i, j)` is `fox_derivative(relator_i, x_j)`. Errors if some
/// relator has nonzero total exponent sum.
pub fn alexander_matrix(p: &GroupPresentation) -> Result<AlexanderMatrix, AlexanderError> {
    for (i, r) in p.relators().iter().enumerate() {
        let sum = r.total_exponent_sum();
        if sum != 0 {
            return Err(AlexanderError::NonMeridionalPresentation { index: i + 1, sum });
        }
    }
    let rows = p.relators().len();
    let cols = p.generators();
    let entries = p
        .relators()
        .iter()
        .map(|r| (1..=cols as u32).map(|g| fox_derivative(r, g)).collect())
        .collect();
    Ok(AlexanderMatrix {
        rows,
        cols,
        entries,
    })
}

/// Normalized order ideal generator for a deficiency-1 presentation:
/// delete one column of the Fox matrix, take the determinant, normalize.
/// The result does not depend on the deleted column.
pub fn alexander_polynomial(p: &GroupPresentation) -> Result<LaurentPoly, AlexanderError> {
    if p.generators() != p.relators().len() + 1 {
        return Err(AlexanderError::WrongDeficiency {
            generators: p.generators(),
            relators: p.relators().len(),
        });
    }
    let m = alexander_matrix(p)?;
    Ok(m.minor_determinant(m.cols() - 1).normalized())
}
