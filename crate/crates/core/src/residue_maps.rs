//! First and second residue forms of a hermitian form over `(D, sigma)` and
//! the boundary map into Witt groups over the residue structures.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::base_fields::{
    is_isotropic_quad_finite, witt_class_herm_quadext, witt_class_quad, QuadFormRes, WittClassQuad,
};
use crate::error::{Error, Result};
use crate::hermitian::{larmour_decompose, HermitianForm, LarmourSplit};
use crate::involutions::{CaseLabel, CaseRecord, ResInvolution};
use crate::quaternion::{QuatAlgebra, ResAlgebraElem};

/// Where a residue form lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResidueTarget {
    /// Skew forms over `k(xbar)` with the identity: only the zero form.
    Zero,
    /// Quadratic forms over `k(xbar)`.
    Quad,
    /// Hermitian forms over `(k(xbar), iota)`.
    Herm,
    /// Skew-hermitian forms over `(k(xbar), iota)`.
    SkewHerm,
    /// Hermitian forms over `(abar, bbar / k)`.
    HermQda(ResInvolution),
    /// Skew-hermitian forms over `(abar, bbar / k)`.
    SkewHermQda(ResInvolution),
}

impl ResidueTarget {
    fn new(inv: ResInvolution, sign: i8) -> ResidueTarget {
        match (inv, sign) {
            (ResInvolution::Identity, 1) => ResidueTarget::Quad,
            (ResInvolution::Identity, _) => ResidueTarget::Zero,
            (ResInvolution::Iota, 1) => ResidueTarget::Herm,
            (ResInvolution::Iota, _) => ResidueTarget::SkewHerm,
            (inv, 1) => ResidueTarget::HermQda(inv),
            (inv, _) => ResidueTarget::SkewHermQda(inv),
        }
    }
}

impl fmt::Display for ResidueTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inv = |i: &ResInvolution| match i {
            ResInvolution::TauBar => "taubar",
            ResInvolution::TauXBar => "taubar_x",
            ResInvolution::Iota => "iota",
            ResInvolution::Identity => "id",
        };
        match self {
            ResidueTarget::Zero => write!(f, "W^-1(k(xbar), id) = 0"),
            ResidueTarget::Quad => write!(f, "W(k(xbar))"),
            ResidueTarget::Herm => write!(f, "W^1(k(xbar), iota)"),
            ResidueTarget::SkewHerm => write!(f, "W^-1(k(xbar), iota)"),
            ResidueTarget::HermQda(i) => write!(f, "W^1((abar,bbar/k), {})", inv(i)),
            ResidueTarget::SkewHermQda(i) => write!(f, "W^-1((abar,bbar/k), {})", inv(i)),
        }
    }
}

impl Serialize for ResidueTarget {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Targets of the first and second residue maps; the second is absent when
/// `s_eps = 2`.
pub fn residue_targets(record: &CaseRecord) -> (ResidueTarget, Option<ResidueTarget>) {
    let t0 = ResidueTarget::new(record.res_inv0, record.eps);
    // v pi'^-1 is symmetric for sigma_{pi'} since pi' is itself eps-symmetric
    let t1 = record.res_inv1.map(|i| ResidueTarget::new(i, 1));
    (t0, t1)
}

/// Note attached to the two cases where the second residue computed from its
/// definition is not the one usually quoted.
pub fn divergence_note(label: CaseLabel) -> Option<&'static str> {
    match label {
        CaseLabel::A12 => Some(
            "A12: second residue computed as residue(v pi'^-1) = pi^-1 (alpha - gamma y - (beta/a) z); \
             the z-term carries -(beta/a) rather than +beta",
        ),
        CaseLabel::B221 => Some(
            "B221: second residue computed as residue(v pi'^-1) = gamma-bar, a hermitian form over (k(xbar), iota); \
             it differs from <gamma-bar xbar> by the factor xbar, with the same Witt class",
        ),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueForm {
    pub target: ResidueTarget,
    pub entries: Vec<ResAlgebraElem>,
}

impl ResidueForm {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }
}

/// Entry-wise residues of `h0`.
pub fn d0(alg: &QuatAlgebra, split: &LarmourSplit) -> Result<ResidueForm> {
    let entries = split
        .h0
        .entries
        .iter()
        .map(|u| alg.residue_d(u))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidueForm {
        target: residue_targets(&split.record).0,
        entries,
    })
}

/// Entry-wise residues of `v pi'^-1` for `v` in `h1`.
pub fn d1(alg: &QuatAlgebra, split: &LarmourSplit) -> Result<ResidueForm> {
    let target = residue_targets(&split.record)
        .1
        .ok_or(Error::RamifiedPartForbidden)?;
    let pinv = alg.inv(&split.record.pi_prime)?;
    let entries = split
        .h1
        .entries
        .iter()
        .map(|v| alg.residue_d(&alg.mul(v, &pinv)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidueForm { target, entries })
}

/// Canonical Witt class over a finite residue structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "group")]
pub enum ResidueClass {
    Zero,
    Quad {
        class: WittClassQuad,
    },
    /// Hermitian or skew-hermitian over `(F_{q^2}, iota)`: rank mod 2.
    Herm {
        rank_parity: u8,
    },
}

impl ResidueClass {
    pub fn is_zero(&self) -> bool {
        match self {
            ResidueClass::Zero => true,
            ResidueClass::Quad { class } => class.is_zero(),
            ResidueClass::Herm { rank_parity } => *rank_parity == 0,
        }
    }

    pub fn add(&self, other: &ResidueClass) -> Result<ResidueClass> {
        match (self, other) {
            (ResidueClass::Zero, ResidueClass::Zero) => Ok(ResidueClass::Zero),
            (ResidueClass::Quad { class: a }, ResidueClass::Quad { class: b }) => {
                Ok(ResidueClass::Quad { class: a.add(b)? })
            }
            (ResidueClass::Herm { rank_parity: a }, ResidueClass::Herm { rank_parity: b }) => {
                Ok(ResidueClass::Herm { rank_parity: a ^ b })
            }
            _ => Err(Error::StructureMismatch),
        }
    }
}

/// Witt class of a residue form (finite residue field).
pub fn residue_class(alg: &QuatAlgebra, form: &ResidueForm) -> Result<ResidueClass> {
    if !alg.base().residue().is_finite() {
        return Err(Error::UnsupportedField);
    }
    let ext = alg.residue_quad_ext()?;
    let elems = || {
        form.entries
            .iter()
            .map(ResAlgebraElem::to_quad_ext)
            .collect::<Result<Vec<_>>>()
    };
    match form.target {
        ResidueTarget::Zero => {
            if form.dim() != 0 {
                return Err(Error::StructureMismatch);
            }
            Ok(ResidueClass::Zero)
        }
        ResidueTarget::Quad => Ok(ResidueClass::Quad {
            class: witt_class_quad(&QuadFormRes::new(ext, elems()?)?)?,
        }),
        ResidueTarget::Herm => Ok(ResidueClass::Herm {
            rank_parity: witt_class_herm_quadext(ext, &elems()?)?,
        }),
        ResidueTarget::SkewHerm => {
            // w -> w xbar^-1 turns skew entries into hermitian ones
            let xinv = ext.fq(0, 1)?.inv()?;
            let scaled = elems()?
                .iter()
                .map(|w| w.mul(&xinv))
                .collect::<Result<Vec<_>>>()?;
            Ok(ResidueClass::Herm {
                rank_parity: witt_class_herm_quadext(ext, &scaled)?,
            })
        }
        ResidueTarget::HermQda(_) | ResidueTarget::SkewHermQda(_) => Err(Error::UnsupportedField),
    }
}

/// `([d0 h], [d1 h])`; `c1` is absent when `s_eps = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BoundaryClass {
    pub c0: ResidueClass,
    pub c1: Option<ResidueClass>,
}

impl BoundaryClass {
    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_none_or(|c| c.is_zero())
    }

    pub fn add(&self, other: &BoundaryClass) -> Result<BoundaryClass> {
        let c1 = match (self.c1, other.c1) {
            (Some(a), Some(b)) => Some(a.add(&b)?),
            (None, None) => None,
            _ => return Err(Error::StructureMismatch),
        };
        Ok(BoundaryClass {
            c0: self.c0.add(&other.c0)?,
            c1,
        })
    }
}

/// Boundary of an already decomposed form.
pub fn boundary_of_split(alg: &QuatAlgebra, split: &LarmourSplit) -> Result<BoundaryClass> {
    let c0 = residue_class(alg, &d0(alg, split)?)?;
    let c1 = match split.record.res_inv1 {
        Some(_) => Some(residue_class(alg, &d1(alg, split)?)?),
        None => None,
    };
    Ok(BoundaryClass { c0, c1 })
}

pub fn boundary(h: &HermitianForm) -> Result<BoundaryClass> {
    if !h.algebra.base().residue().is_finite() {
        return Err(Error::UnsupportedField);
    }
    boundary_of_split(&h.algebra, &larmour_decompose(h)?)
}

/// Witt equivalence, decided by the boundary of `h1 + (-h2)`.
pub fn witt_equal(h1: &HermitianForm, h2: &HermitianForm) -> Result<bool> {
    Ok(boundary(&h1.perp(&h2.neg())?)?.is_zero())
}

fn residue_form_anisotropic(alg: &QuatAlgebra, form: &ResidueForm) -> Result<bool> {
    match form.target {
        ResidueTarget::Quad => {
            let ext = alg.residue_quad_ext()?;
            let e = form
                .entries
                .iter()
                .map(ResAlgebraElem::to_quad_ext)
                .collect::<Result<Vec<_>>>()?;
            Ok(!is_isotropic_quad_finite(&QuadFormRes::new(ext, e)?)?)
        }
        ResidueTarget::HermQda(_) | ResidueTarget::SkewHermQda(_) => Err(Error::UnsupportedField),
        _ => Ok(form.dim() <= 1),
    }
}

/// Anisotropic iff both residue forms are.
pub fn is_anisotropic_herm(h: &HermitianForm) -> Result<bool> {
    if !h.algebra.base().residue().is_finite() {
        return Err(Error::UnsupportedField);
    }
    let alg = &h.algebra;
    let split = larmour_decompose(h)?;
    if !residue_form_anisotropic(alg, &d0(alg, &split)?)? {
        return Ok(false);
    }
    match split.record.res_inv1 {
        Some(_) => residue_form_anisotropic(alg, &d1(alg, &split)?),
        None => Ok(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::involutions::{classify_case, Involution};
    use crate::quaternion::{division_algebra, QuatElem};
    use crate::valued_field::ValuedField;

    fn ram3() -> QuatAlgebra {
        let k = ValuedField::prime(3).unwrap();
        division_algebra(&k.int(2), &k.t(), false).unwrap()
    }

    fn form(d: &QuatAlgebra, sigma: Involution, eps: i8, entries: Vec<QuatElem>) -> HermitianForm {
        HermitianForm::new(d.clone(), sigma, eps, entries).unwrap()
    }

    #[test]
    fn targets() {
        let q = ValuedField::rationals();
        let h = division_algebra(&q.int(-1), &q.int(-1), true).unwrap();
        let r = classify_case(&h, &Involution::Canonical, 1).unwrap();
        let t = ResidueTarget::HermQda(ResInvolution::TauBar);
        assert_eq!(residue_targets(&r), (t, Some(t)));
        let d = ram3();
        let r = classify_case(&d, &Involution::Canonical, 1).unwrap();
        assert_eq!(residue_targets(&r), (ResidueTarget::Herm, None));
        let r = classify_case(&d, &Involution::Twisted(d.y()), 1).unwrap();
        assert_eq!(
            residue_targets(&r),
            (ResidueTarget::Quad, Some(ResidueTarget::Herm))
        );
    }

    #[test]
    fn second_residues() {
        let d = ram3();
        let h = form(
            &d,
            Involution::Canonical,
            -1,
            vec![d.add(&d.y(), &d.z()).unwrap()],
        );
        let split = larmour_decompose(&h).unwrap();
        let r = d1(&d, &split).unwrap();
        assert_eq!(r.entries[0].to_string(), "1 + xbar");
        let h = form(&d, Involution::Canonical, 1, vec![d.one()]);
        let split = larmour_decompose(&h).unwrap();
        assert_eq!(d1(&d, &split), Err(Error::RamifiedPartForbidden));
    }

    #[test]
    fn boundaries() {
        let d = ram3();
        let tau = Involution::Canonical;
        let b = boundary(&form(&d, tau.clone(), -1, vec![d.y()])).unwrap();
        assert!(b.c0.is_zero());
        let c1 = b.c1.unwrap();
        assert!(!c1.is_zero());
        let b = boundary(&form(&d, tau.clone(), -1, vec![d.x(), d.y()])).unwrap();
        assert_eq!(b.c0, ResidueClass::Herm { rank_parity: 1 });
        assert_eq!(b.c1, Some(c1));
        let h = form(&d, tau.clone(), -1, vec![d.y(), d.neg(&d.y())]);
        assert!(boundary(&h).unwrap().is_zero());
        assert!(!is_anisotropic_herm(&h).unwrap());
        assert!(is_anisotropic_herm(&form(&d, tau.clone(), -1, vec![d.y()])).unwrap());
        assert!(witt_equal(
            &form(&d, tau.clone(), -1, vec![d.y()]),
            &form(&d, tau, -1, vec![d.neg(&d.y())])
        )
        .unwrap());
        let tx = Involution::Twisted(d.x());
        let ones = form(&d, tx.clone(), 1, vec![d.one(), d.one(), d.one()]);
        assert!(!is_anisotropic_herm(&ones).unwrap());
        let one = form(&d, tx.clone(), 1, vec![d.one()]);
        let two = form(&d, tx, 1, vec![d.one(), d.one()]);
        assert!(!witt_equal(&one, &two).unwrap());
    }
}
