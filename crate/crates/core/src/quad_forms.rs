//! Diagonal quadratic forms over `K = k((t))`: first and second residue forms
//! and the induced map `W(K) -> W(k) + W(k)` for finite `k`.

use serde::Serialize;

use crate::base_fields::{is_isotropic_quad_finite, witt_class_quad, QuadFormRes, WittClassQuad};
use crate::error::{Error, Result};
use crate::valued_field::{Laurent, ValuedField};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadFormK {
    pub field: ValuedField,
    pub entries: Vec<Laurent>,
}

impl QuadFormK {
    pub fn new(field: ValuedField, entries: Vec<Laurent>) -> Result<Self> {
        for e in &entries {
            if e.field().residue() != field.residue() {
                return Err(Error::FieldMismatch);
            }
            if e.is_exact_zero() {
                return Err(Error::ZeroInput);
            }
        }
        Ok(QuadFormK { field, entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn perp(&self, other: &QuadFormK) -> Result<QuadFormK> {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        QuadFormK::new(self.field, entries)
    }

    pub fn neg(&self) -> QuadFormK {
        QuadFormK {
            field: self.field,
            entries: self.entries.iter().map(Laurent::neg).collect(),
        }
    }
}

/// Residue forms `(r0, r1)` of a form over `K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpringerResidues {
    pub r0: QuadFormRes,
    pub r1: QuadFormRes,
}

/// Split `q = q0 + t q1` with `q0`, `q1` having unit entries.
pub fn springer_split(q: &QuadFormK) -> Result<(QuadFormK, QuadFormK)> {
    let mut q0 = Vec::new();
    let mut q1 = Vec::new();
    for c in &q.entries {
        let v = c.valuation()?;
        let unit = c.shift(-2 * v.div_euclid(2));
        if v.rem_euclid(2) == 0 {
            q0.push(unit);
        } else {
            q1.push(unit.shift(-1));
        }
    }
    Ok((QuadFormK::new(q.field, q0)?, QuadFormK::new(q.field, q1)?))
}

/// First and second residue forms (relative to the uniformizer `t`).
pub fn springer_residues(q: &QuadFormK) -> Result<SpringerResidues> {
    let (q0, q1) = springer_split(q)?;
    let res = |f: &QuadFormK| -> Result<QuadFormRes> {
        let entries = f
            .entries
            .iter()
            .map(Laurent::residue)
            .collect::<Result<Vec<_>>>()?;
        QuadFormRes::new(q.field.residue(), entries)
    };
    Ok(SpringerResidues {
        r0: res(&q0)?,
        r1: res(&q1)?,
    })
}

/// `([q0], [q1])` in `W(k) + W(k)`.
pub fn springer_boundary(q: &QuadFormK) -> Result<(WittClassQuad, WittClassQuad)> {
    if !q.field.residue().is_finite() {
        return Err(Error::UnsupportedField);
    }
    let r = springer_residues(q)?;
    Ok((witt_class_quad(&r.r0)?, witt_class_quad(&r.r1)?))
}

/// Anisotropic over `K` iff both residue forms are anisotropic over `k`.
pub fn is_anisotropic_quad_k(q: &QuadFormK) -> Result<bool> {
    if !q.field.residue().is_finite() {
        return Err(Error::UnsupportedField);
    }
    let r = springer_residues(q)?;
    Ok(!is_isotropic_quad_finite(&r.r0)? && !is_isotropic_quad_finite(&r.r1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(k: &ValuedField, entries: &[&str]) -> QuadFormK {
        QuadFormK::new(*k, entries.iter().map(|s| k.parse(s).unwrap()).collect()).unwrap()
    }

    fn classes(k: &ValuedField, entries: &[i64]) -> WittClassQuad {
        let r = k.residue();
        witt_class_quad(
            &QuadFormRes::new(r, entries.iter().map(|&e| r.from_int(e)).collect()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn split_examples() {
        let k = ValuedField::prime(3).unwrap();
        let (q0, q1) = springer_split(&form(&k, &["1", "t"])).unwrap();
        assert_eq!(q0.entries, vec![k.one()]);
        assert_eq!(q1.entries, vec![k.one()]);
        let (q0, q1) = springer_split(&form(&k, &["t^2", "2*t^3"])).unwrap();
        assert_eq!(q0.entries, vec![k.one()]);
        assert_eq!(q1.entries, vec![k.int(2)]);
    }

    #[test]
    fn boundary_examples() {
        let k = ValuedField::prime(3).unwrap();
        let (c0, c1) = springer_boundary(&form(&k, &["1", "t"])).unwrap();
        assert_eq!(c0, classes(&k, &[1]));
        assert_eq!(c1, classes(&k, &[1]));
        let (c0, c1) = springer_boundary(&form(&k, &["1", "-1"])).unwrap();
        assert!(c0.is_zero() && c1.is_zero());
        let (c0, c1) = springer_boundary(&form(&k, &["1", "1", "t", "t", "2"])).unwrap();
        assert_eq!(c0, classes(&k, &[1, 1, 2]));
        assert_eq!(c1, classes(&k, &[1, 1]));
        assert_eq!(
            springer_boundary(&form(&ValuedField::rationals(), &["1"])),
            Err(Error::UnsupportedField)
        );
    }

    #[test]
    fn anisotropy_examples() {
        let k = ValuedField::prime(3).unwrap();
        assert!(is_anisotropic_quad_k(&form(&k, &["1", "-2", "-t", "2*t"])).unwrap());
        assert!(!is_anisotropic_quad_k(&form(&k, &["1", "-1"])).unwrap());
        assert!(!is_anisotropic_quad_k(&form(&k, &["1", "1", "1"])).unwrap());
    }
}
