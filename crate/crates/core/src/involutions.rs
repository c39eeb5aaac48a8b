//! Involutions of the first kind on a quaternion division algebra, their
//! normal forms, and the ten-way case classification that drives the
//! decomposition of hermitian forms.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quaternion::{
    reduce_square, AlgebraIso, HalfInt, QuatAlgebra, QuatElem, Ramification, ResAlgebraElem,
};
use crate::valued_field::Laurent;

/// `tau` or `tau_zeta(u) = zeta tau(u) zeta^-1` with `zeta` a pure quaternion.
#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Involution {
    Canonical,
    Twisted(QuatElem),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum InvolutionType {
    Symplectic,
    Orthogonal,
}

/// Index of the only nonzero pure coordinate, if `u` is a multiple of `x`, `y`
/// or `z`.
fn basis_support(u: &QuatElem) -> Option<usize> {
    let s = u.support();
    if s[0] {
        return None;
    }
    match (s[1], s[2], s[3]) {
        (true, false, false) => Some(1),
        (false, true, false) => Some(2),
        (false, false, true) => Some(3),
        _ => None,
    }
}

fn sign_apply(signs: [i8; 4], u: &QuatElem) -> QuatElem {
    let c = u.coords();
    QuatElem::from_coords(std::array::from_fn(|i| {
        if signs[i] < 0 {
            c[i].neg()
        } else {
            c[i].clone()
        }
    }))
}

/// Sign pattern of conjugation by a basis vector `e` (`u -> e u e^-1`).
fn conj_signs(e: usize) -> [i8; 4] {
    let mut s = [1i8; 4];
    for (i, si) in s.iter_mut().enumerate().skip(1) {
        if e != 0 && i != e {
            *si = -1;
        }
    }
    s
}

fn compose_signs(a: [i8; 4], b: [i8; 4]) -> [i8; 4] {
    std::array::from_fn(|i| a[i] * b[i])
}

impl Involution {
    pub fn kind(&self) -> InvolutionType {
        match self {
            Involution::Canonical => InvolutionType::Symplectic,
            Involution::Twisted(_) => InvolutionType::Orthogonal,
        }
    }

    /// Diagonal action on `{1, x, y, z}` when `zeta` is a basis multiple.
    pub fn signs(&self) -> Option<[i8; 4]> {
        match self {
            Involution::Canonical => Some([1, -1, -1, -1]),
            Involution::Twisted(z) => {
                basis_support(z).map(|e| compose_signs(conj_signs(e), [1, -1, -1, -1]))
            }
        }
    }

    pub fn apply(&self, alg: &QuatAlgebra, u: &QuatElem) -> Result<QuatElem> {
        if let Some(s) = self.signs() {
            return Ok(sign_apply(s, u));
        }
        match self {
            Involution::Canonical => Ok(alg.tau(u)),
            Involution::Twisted(z) => alg.product(&[z, &alg.tau(u), &alg.inv(z)?]),
        }
    }

    /// `u -> lambda sigma(u) lambda^-1` for a pure or scalar `lambda` such that
    /// the result is again an involution.
    pub fn twisted_by(&self, alg: &QuatAlgebra, lambda: &QuatElem) -> Result<Involution> {
        let zeta = match self {
            Involution::Canonical => lambda.clone(),
            Involution::Twisted(z) => alg.mul(lambda, z)?,
        };
        if zeta.is_scalar() {
            return Ok(Involution::Canonical);
        }
        if !zeta.delta.is_zero_within_precision() {
            return Err(Error::NotSkew);
        }
        // drop an O(t^P) scalar part so the result stays a pure quaternion
        let pure = QuatElem {
            delta: alg.base().zero(),
            ..zeta
        };
        Ok(Involution::Twisted(pure))
    }

    /// Transport along a change of presentation.
    pub fn transport(&self, iso: &AlgebraIso) -> Result<Involution> {
        Ok(match self {
            Involution::Canonical => Involution::Canonical,
            Involution::Twisted(z) => {
                let mut w = iso.to_target(z)?;
                w.delta = iso.target.base().zero();
                Involution::Twisted(w)
            }
        })
    }

    pub fn describe(&self) -> String {
        match self {
            Involution::Canonical => "tau".into(),
            Involution::Twisted(z) => match basis_support(z) {
                Some(1) => "tau_x".into(),
                Some(2) => "tau_y".into(),
                Some(3) => "tau_z".into(),
                _ => format!("tau_({z})"),
            },
        }
    }
}

impl Serialize for Involution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.describe())
    }
}

/// Rescale a nonzero element by a power of `t` so `nu_D` lies in `{0, 1/2}`.
fn unit_or_half(alg: &QuatAlgebra, u: &QuatElem) -> Result<(QuatElem, i64)> {
    let v = alg.valuation_d(u)?.numerator();
    let k = v.div_euclid(2);
    let s = alg.base().t().pow(-k)?;
    Ok((alg.scale(&s, u)?, v - 2 * k))
}

/// Pure quaternion orthogonal to `zeta` for the norm form, trying `x`, `y`, `z`.
fn complement(alg: &QuatAlgebra, zeta: &QuatElem) -> Result<QuatElem> {
    let nz = alg.norm_pairing(zeta, zeta)?;
    for i in 1..4 {
        let e = alg.basis(i);
        let c = alg.norm_pairing(&e, zeta)?.div(&nz)?;
        let w = alg.sub(&e, &alg.scale(&c, zeta)?)?;
        if !w.is_zero_within_precision() && w.coords().iter().any(|c| c.valuation().is_ok()) {
            return Ok(w);
        }
    }
    Err(Error::PrecisionExhausted)
}

/// Result of bringing an involution to normal form: a change of presentation
/// and the involution over the new presentation, with `zeta` equal to `x` or
/// `y` (the latter only for ramified algebras).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedInvolution {
    pub iso: AlgebraIso,
    pub involution: Involution,
}

/// Normalize `tau_zeta` on a normalized division algebra.
pub fn normalize_involution(
    alg: &QuatAlgebra,
    zeta_raw: &QuatElem,
) -> Result<NormalizedInvolution> {
    if zeta_raw.is_zero_within_precision() {
        return Err(Error::ZeroInput);
    }
    if !zeta_raw.delta.is_zero_within_precision() {
        return Err(Error::NotSkew);
    }
    let ram = alg.ramification()?;
    let zeta = QuatElem {
        delta: alg.base().zero(),
        ..zeta_raw.clone()
    };
    let (zeta, zv) = unit_or_half(alg, &zeta)?;
    let (w, wv) = unit_or_half(alg, &complement(alg, &zeta)?)?;
    let (xi, yi, twist_y) = match (ram, zv, wv) {
        (Ramification::Unramified, 0, 0) => (zeta, w, false),
        (Ramification::Ramified, 0, 1) => (zeta, w, false),
        (Ramification::Ramified, 0, _) => return Err(Error::UnitComplementContradiction),
        (Ramification::Ramified, 1, 0) => (w, zeta, true),
        (Ramification::Ramified, 1, _) => {
            let x = alg.mul(&w, &alg.inv(&zeta)?)?;
            (unit_or_half(alg, &x)?.0, zeta, true)
        }
        _ => return Err(Error::UnsupportedRamification),
    };
    let sq = |e: &QuatElem| -> Result<Laurent> { Ok(alg.mul(e, e)?.delta) };
    let (a2, xi) = reduce_square(alg, &xi, &sq(&xi)?)?;
    let (b2, yi) = reduce_square(alg, &yi, &sq(&yi)?)?;
    let target = QuatAlgebra::presentation(a2, b2)?.with_ramification(ram);
    let iso = AlgebraIso {
        source: alg.clone(),
        target,
        x_img: xi,
        y_img: yi,
    };
    let zeta_new = if twist_y {
        iso.target.y()
    } else {
        iso.target.x()
    };
    Ok(NormalizedInvolution {
        iso,
        involution: Involution::Twisted(zeta_new),
    })
}

/// The ten cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseLabel {
    A11,
    A12,
    A21,
    A22,
    B11,
    B12,
    B211,
    B212,
    B221,
    B222,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 10] = [
        CaseLabel::A11,
        CaseLabel::A12,
        CaseLabel::A21,
        CaseLabel::A22,
        CaseLabel::B11,
        CaseLabel::B12,
        CaseLabel::B211,
        CaseLabel::B212,
        CaseLabel::B221,
        CaseLabel::B222,
    ];

    pub fn is_ramified(self) -> bool {
        !matches!(
            self,
            CaseLabel::A11 | CaseLabel::A12 | CaseLabel::A21 | CaseLabel::A22
        )
    }

    /// Dotted form, e.g. `B.2.1.2`.
    pub fn dotted(self) -> String {
        let s = format!("{self:?}");
        let mut out = String::new();
        for (i, c) in s.chars().enumerate() {
            if i > 0 {
                out.push('.');
            }
            out.push(c);
        }
        out
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl Serialize for CaseLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ResAlgebraKind {
    /// The quaternion algebra `(abar, bbar / k)`.
    Qda,
    /// The field `k(xbar)`.
    QuadExt,
}

/// Involution induced on the residue algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ResInvolution {
    /// Canonical involution of `(abar, bbar / k)`.
    TauBar,
    /// `xbar tauBar(.) xbar^-1`.
    TauXBar,
    /// The nontrivial automorphism of `k(xbar)`.
    Iota,
    Identity,
}

impl ResInvolution {
    fn from_signs(ram: Ramification, s: [i8; 4]) -> Result<ResInvolution> {
        match (ram, s) {
            (Ramification::Ramified, [1, -1, _, _]) => Ok(ResInvolution::Iota),
            (Ramification::Ramified, [1, 1, _, _]) => Ok(ResInvolution::Identity),
            (Ramification::Unramified, [1, -1, -1, -1]) => Ok(ResInvolution::TauBar),
            (Ramification::Unramified, [1, -1, 1, 1]) => Ok(ResInvolution::TauXBar),
            _ => Err(Error::UnsupportedRamification),
        }
    }

    pub fn apply(self, r: &ResAlgebraElem) -> ResAlgebraElem {
        match (self, r) {
            (ResInvolution::Identity, _) => *r,
            (ResInvolution::TauBar | ResInvolution::Iota, _) => r.conj(),
            (ResInvolution::TauXBar, ResAlgebraElem::Quat { abar, bbar, c }) => {
                ResAlgebraElem::Quat {
                    abar: *abar,
                    bbar: *bbar,
                    c: [c[0], c[1].neg(), c[2], c[3]],
                }
            }
            (ResInvolution::TauXBar, ResAlgebraElem::Ext { .. }) => r.conj(),
        }
    }
}

/// Basis vectors `1, x, y, z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisVec(pub usize);

impl fmt::Display for BasisVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ["1", "x", "y", "z"][self.0])
    }
}

impl Serialize for BasisVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Everything the decomposition needs to know about `(D, sigma, eps)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseRecord {
    pub label: CaseLabel,
    pub eps: i8,
    pub j: i64,
    pub pi_prime: QuatElem,
    pub pi_dblprime: QuatElem,
    pub s_eps: i64,
    pub residue_algebra: ResAlgebraKind,
    pub res_inv0: ResInvolution,
    pub res_inv1: Option<ResInvolution>,
    pub sym_basis: Vec<BasisVec>,
    /// Basis vectors spanning the shapes of unit entries after simplification.
    pub h0_basis: Vec<BasisVec>,
    /// Same for entries of value `1/j`; empty when `s_eps = 2`.
    pub h1_basis: Vec<BasisVec>,
    pub pi_prime_name: String,
    pub pi_dblprime_name: String,
}

pub fn check_eps(eps: i8) -> Result<i8> {
    if eps == 1 || eps == -1 {
        Ok(eps)
    } else {
        Err(Error::Parse {
            pos: 0,
            msg: "eps must be 1 or -1".into(),
        })
    }
}

/// Basis vectors `e` with `sigma(e) = eps e` (normalized involution).
pub fn sym_basis(sigma: &Involution, eps: i8) -> Result<Vec<BasisVec>> {
    let s = sigma.signs().ok_or(Error::UnsupportedRamification)?;
    Ok((0..4).filter(|&i| s[i] == eps).map(BasisVec).collect())
}

/// Classify a normalized `(D, sigma, eps)`.
pub fn classify_case(alg: &QuatAlgebra, sigma: &Involution, eps: i8) -> Result<CaseRecord> {
    let eps = check_eps(eps)?;
    let ram = alg.ramification()?;
    let j = alg.j()?;
    let signs = sigma.signs().ok_or(Error::UnsupportedRamification)?;
    let twist = match sigma {
        Involution::Canonical => 0,
        Involution::Twisted(z) => basis_support(z).unwrap(),
    };
    let label = match (ram, twist, eps) {
        (Ramification::Unramified, 0, 1) => CaseLabel::A11,
        (Ramification::Unramified, 0, _) => CaseLabel::A12,
        (Ramification::Unramified, 1, 1) => CaseLabel::A21,
        (Ramification::Unramified, 1, _) => CaseLabel::A22,
        (Ramification::Ramified, 0, 1) => CaseLabel::B11,
        (Ramification::Ramified, 0, _) => CaseLabel::B12,
        (Ramification::Ramified, 1, 1) => CaseLabel::B211,
        (Ramification::Ramified, 1, _) => CaseLabel::B212,
        (Ramification::Ramified, 2, 1) => CaseLabel::B221,
        (Ramification::Ramified, 2, _) => CaseLabel::B222,
        _ => return Err(Error::UnsupportedRamification),
    };
    let sym = sym_basis(sigma, eps)?;
    let t = alg.base().t();
    let basis_val = |i: usize| -> i64 { alg.val_lower_bound_d(&alg.basis(i)).unwrap() };
    // minimal-value eps-symmetric element of m_D among e and t e
    let (pi2_idx, pi2_scaled) = sym
        .iter()
        .map(|e| {
            if basis_val(e.0) > 0 {
                (e.0, false)
            } else {
                (e.0, true)
            }
        })
        .min_by_key(|&(i, scaled)| (basis_val(i) + if scaled { 2 } else { 0 }, i))
        .unwrap();
    let pi2_val = basis_val(pi2_idx) + if pi2_scaled { 2 } else { 0 };
    let s_eps = j * pi2_val / 2;
    let scaled = |i: usize, by_t: bool| -> Result<QuatElem> {
        if by_t {
            alg.scale(&t, &alg.basis(i))
        } else {
            Ok(alg.basis(i))
        }
    };
    let name = |i: usize, by_t: bool| -> String {
        let e = ["1", "x", "y", "z"][i];
        match (by_t, i) {
            (true, 0) => "t".into(),
            (true, _) => format!("t{e}"),
            (false, _) => e.into(),
        }
    };
    let pi_dblprime = scaled(pi2_idx, pi2_scaled)?;
    // pi'' is a uniformizer when s_eps = 1; otherwise y is
    let (pi1_idx, pi1_scaled) = if s_eps == 1 {
        (pi2_idx, pi2_scaled)
    } else {
        (2, false)
    };
    let pi_prime = scaled(pi1_idx, pi1_scaled)?;
    let res_inv0 = ResInvolution::from_signs(ram, signs)?;
    let res_inv1 = if s_eps == 1 {
        Some(ResInvolution::from_signs(
            ram,
            compose_signs(conj_signs(pi1_idx), signs),
        )?)
    } else {
        None
    };
    let (h0_basis, h1_basis) = match ram {
        Ramification::Ramified => {
            let h0 = sym.iter().copied().filter(|e| e.0 < 2).collect();
            let h1 = if s_eps == 1 {
                sym.iter().copied().filter(|e| e.0 >= 2).collect()
            } else {
                Vec::new()
            };
            (h0, h1)
        }
        Ramification::Unramified => (sym.clone(), sym.clone()),
    };
    Ok(CaseRecord {
        label,
        eps,
        j,
        pi_prime,
        pi_dblprime,
        s_eps,
        residue_algebra: match ram {
            Ramification::Unramified => ResAlgebraKind::Qda,
            Ramification::Ramified => ResAlgebraKind::QuadExt,
        },
        res_inv0,
        res_inv1,
        sym_basis: sym,
        h0_basis,
        h1_basis,
        pi_prime_name: name(pi1_idx, pi1_scaled),
        pi_dblprime_name: name(pi2_idx, pi2_scaled),
    })
}

/// `w = pi'^e pi'' sigma(pi'^e)` with `e = (1 - s_eps) / 2`: an
/// `eps`-symmetric uniformizer.
pub fn symmetric_uniformizer(
    alg: &QuatAlgebra,
    sigma: &Involution,
    record: &CaseRecord,
) -> Result<QuatElem> {
    if record.s_eps % 2 == 0 {
        return Err(Error::EvenS);
    }
    let e = (1 - record.s_eps) / 2;
    let base = if e < 0 {
        alg.inv(&record.pi_prime)?
    } else {
        record.pi_prime.clone()
    };
    let mut p = alg.one();
    for _ in 0..e.abs() {
        p = alg.mul(&p, &base)?;
    }
    alg.product(&[&p, &record.pi_dblprime, &sigma.apply(alg, &p)?])
}

/// Value of `pi''` as a half-integer.
pub fn pi_dblprime_value(alg: &QuatAlgebra, record: &CaseRecord) -> Result<HalfInt> {
    alg.valuation_d(&record.pi_dblprime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::division_algebra;
    use crate::valued_field::ValuedField;

    fn ram(p: u64) -> QuatAlgebra {
        let k = ValuedField::prime(p).unwrap();
        let u = k.constant(k.residue().nonsquare().unwrap());
        division_algebra(&u, &k.t(), false).unwrap()
    }

    #[test]
    fn involution_action() {
        let d = ram(3);
        let tau = Involution::Canonical;
        assert_eq!(tau.apply(&d, &d.x()).unwrap(), d.neg(&d.x()));
        let tx = Involution::Twisted(d.x());
        assert_eq!(tx.apply(&d, &d.y()).unwrap(), d.y());
        // the sign shortcut agrees with multiplication
        let general = d
            .product(&[&d.x(), &d.tau(&d.y()), &d.inv(&d.x()).unwrap()])
            .unwrap();
        assert_eq!(general, d.y());
        let zeta = d.add(&d.x(), &d.y()).unwrap();
        let tw = Involution::Twisted(zeta.clone());
        let u = d.from_ints([1, 2, 1, 1]);
        let back = tw.apply(&d, &tw.apply(&d, &u).unwrap()).unwrap();
        assert!(back.approx_eq(&u));
    }

    #[test]
    fn sym_bases() {
        let d = ram(3);
        let names = |v: Vec<BasisVec>| {
            v.iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        assert_eq!(names(sym_basis(&Involution::Canonical, 1).unwrap()), "1");
        assert_eq!(
            names(sym_basis(&Involution::Twisted(d.x()), 1).unwrap()),
            "1,y,z"
        );
        assert_eq!(
            names(sym_basis(&Involution::Twisted(d.y()), -1).unwrap()),
            "y"
        );
    }

    #[test]
    fn classification_examples() {
        let d = ram(3);
        let r = classify_case(&d, &Involution::Canonical, -1).unwrap();
        assert_eq!(r.label, CaseLabel::B12);
        assert_eq!((r.j, r.s_eps), (2, 1));
        assert_eq!(
            (r.pi_prime_name.as_str(), r.pi_dblprime_name.as_str()),
            ("y", "y")
        );
        assert_eq!(r.residue_algebra, ResAlgebraKind::QuadExt);
        assert_eq!(
            (r.res_inv0, r.res_inv1),
            (ResInvolution::Iota, Some(ResInvolution::Identity))
        );
        let r = classify_case(&d, &Involution::Twisted(d.x()), -1).unwrap();
        assert_eq!(r.label, CaseLabel::B212);
        assert_eq!(r.s_eps, 2);
        assert_eq!(r.res_inv1, None);
        let q = ValuedField::rationals();
        let h = division_algebra(&q.int(-1), &q.int(-1), true).unwrap();
        let r = classify_case(&h, &Involution::Canonical, 1).unwrap();
        assert_eq!(r.label, CaseLabel::A11);
        assert_eq!(
            (r.pi_prime_name.as_str(), r.pi_dblprime_name.as_str()),
            ("t", "t")
        );
        assert_eq!(
            (r.res_inv0, r.res_inv1),
            (ResInvolution::TauBar, Some(ResInvolution::TauBar))
        );
    }

    #[test]
    fn uniformizers() {
        let d = ram(3);
        let r = classify_case(&d, &Involution::Canonical, -1).unwrap();
        assert_eq!(
            symmetric_uniformizer(&d, &Involution::Canonical, &r).unwrap(),
            d.y()
        );
        let r = classify_case(&d, &Involution::Canonical, 1).unwrap();
        assert_eq!(
            symmetric_uniformizer(&d, &Involution::Canonical, &r),
            Err(Error::EvenS)
        );
        let q = ValuedField::rationals();
        let h = division_algebra(&q.int(-1), &q.int(-1), true).unwrap();
        let tx = Involution::Twisted(h.x());
        let r = classify_case(&h, &tx, -1).unwrap();
        assert_eq!(r.label, CaseLabel::A22);
        assert_eq!(
            symmetric_uniformizer(&h, &tx, &r).unwrap(),
            h.scale(&q.t(), &h.x()).unwrap()
        );
    }

    #[test]
    fn involution_normalization() {
        let d = ram(3);
        let k = d.base();
        let n = normalize_involution(&d, &d.scale(&k.t(), &d.x()).unwrap()).unwrap();
        assert_eq!(n.involution, Involution::Twisted(n.iso.target.x()));
        let n = normalize_involution(&d, &d.y()).unwrap();
        assert_eq!(n.involution, Involution::Twisted(n.iso.target.y()));
        let zeta = d.add(&d.y(), &d.z()).unwrap();
        let n = normalize_involution(&d, &zeta).unwrap();
        assert!(n.iso.verify().unwrap());
        assert_eq!(n.involution, Involution::Twisted(n.iso.target.y()));
        assert_eq!(n.iso.target.ramification().unwrap(), Ramification::Ramified);
        // the original involution and the normalized one agree after transport
        let sigma = Involution::Twisted(zeta);
        let u = d.from_ints([1, 2, 0, 1]);
        let lhs = n.iso.to_target(&sigma.apply(&d, &u).unwrap()).unwrap();
        let rhs = n
            .involution
            .apply(&n.iso.target, &n.iso.to_target(&u).unwrap())
            .unwrap();
        assert!(lhs.approx_eq(&rhs));
        assert_eq!(normalize_involution(&d, &d.one()), Err(Error::NotSkew));
    }
}
