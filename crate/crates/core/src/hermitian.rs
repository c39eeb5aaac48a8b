//! Diagonal `eps`-hermitian forms over `(D, sigma)` and their decomposition
//! `h = h0 + h1` into unit-valued and uniformizer-valued parts, with an
//! explicit isometry witness for every entry.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::involutions::{check_eps, classify_case, normalize_involution, CaseRecord, Involution};
use crate::quaternion::{
    normalize_presentation, AlgebraIso, HalfInt, QuatAlgebra, QuatElem, ResAlgebraElem,
};
use crate::valued_field::Laurent;

/// Minimum residual value, in half-units, for a witness to count as verified.
pub const WITNESS_HALF_UNITS: i64 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HermitianForm {
    pub algebra: QuatAlgebra,
    #[serde(rename = "involution")]
    pub sigma: Involution,
    pub eps: i8,
    pub entries: Vec<QuatElem>,
}

impl HermitianForm {
    /// Validated form: every entry nonzero and `eps`-symmetric.
    pub fn new(
        algebra: QuatAlgebra,
        sigma: Involution,
        eps: i8,
        entries: Vec<QuatElem>,
    ) -> Result<Self> {
        let eps = check_eps(eps)?;
        let h = HermitianForm {
            algebra,
            sigma,
            eps,
            entries,
        };
        validate_form(&h)?;
        Ok(h)
    }

    pub fn empty_like(&self) -> HermitianForm {
        HermitianForm {
            entries: Vec::new(),
            ..self.clone()
        }
    }

    /// Normalize a user presentation `(a, b / K)`, an optional twisting
    /// element and raw entries, all in the coordinates of that presentation.
    pub fn from_presentation(
        a: &Laurent,
        b: &Laurent,
        assume_division: bool,
        zeta: Option<&QuatElem>,
        eps: i8,
        entries: &[QuatElem],
    ) -> Result<(HermitianForm, AlgebraIso)> {
        let iso = normalize_presentation(a, b, assume_division)?;
        let (iso, sigma) = match zeta {
            None => (iso, Involution::Canonical),
            Some(z) => {
                let n = normalize_involution(&iso.target, &iso.to_target(z)?)?;
                (iso.then(&n.iso)?, n.involution)
            }
        };
        let mapped = entries
            .iter()
            .map(|u| iso.to_target(u))
            .collect::<Result<Vec<_>>>()?;
        for (i, u) in mapped.iter().enumerate() {
            if u.is_zero_within_precision() {
                return Err(Error::ZeroEntry(i));
            }
        }
        let h = HermitianForm::new(iso.target.clone(), sigma, eps, mapped)?;
        Ok((h, iso))
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    fn same_structure(&self, other: &HermitianForm) -> Result<()> {
        if self.algebra == other.algebra && self.sigma == other.sigma && self.eps == other.eps {
            Ok(())
        } else {
            Err(Error::StructureMismatch)
        }
    }

    /// Orthogonal sum.
    pub fn perp(&self, other: &HermitianForm) -> Result<HermitianForm> {
        self.same_structure(other)?;
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(HermitianForm {
            entries,
            ..self.clone()
        })
    }

    pub fn neg(&self) -> HermitianForm {
        HermitianForm {
            entries: self.entries.iter().map(|u| self.algebra.neg(u)).collect(),
            ..self.clone()
        }
    }
}

pub fn validate_form(h: &HermitianForm) -> Result<()> {
    let alg = &h.algebra;
    for (i, u) in h.entries.iter().enumerate() {
        if u.is_zero_within_precision() {
            return Err(Error::ZeroEntry(i));
        }
        let s = h.sigma.apply(alg, u)?;
        let d = if h.eps == 1 {
            alg.sub(&s, u)?
        } else {
            alg.add(&s, u)?
        };
        if !d.is_zero_within_precision() {
            return Err(Error::NotEpsilonSymmetric(i));
        }
    }
    Ok(())
}

/// `sigma(t) source t = target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsometryWitness {
    pub t: QuatElem,
    pub source: QuatElem,
    pub target: QuatElem,
}

impl IsometryWitness {
    pub fn identity(alg: &QuatAlgebra, u: &QuatElem) -> IsometryWitness {
        IsometryWitness {
            t: alg.one(),
            source: u.clone(),
            target: u.clone(),
        }
    }

    /// Lower bound on `nu_D(sigma(t) source t - target)` in half-units;
    /// `None` when the residual vanishes exactly.
    pub fn residual(&self, alg: &QuatAlgebra, sigma: &Involution) -> Result<Option<i64>> {
        let img = alg.product(&[&sigma.apply(alg, &self.t)?, &self.source, &self.t])?;
        let r = alg.sub(&img, &self.target)?;
        if r.is_zero_within_precision() {
            Ok(alg.val_lower_bound_d(&r))
        } else {
            Ok(Some(alg.valuation_d(&r)?.numerator()))
        }
    }

    pub fn verify(&self, alg: &QuatAlgebra, sigma: &Involution) -> Result<bool> {
        Ok(self
            .residual(alg, sigma)?
            .is_none_or(|v| v >= WITNESS_HALF_UNITS))
    }

    /// `self` followed by `next` (which must start where `self` ends).
    pub fn then(&self, alg: &QuatAlgebra, next: &IsometryWitness) -> Result<IsometryWitness> {
        Ok(IsometryWitness {
            t: alg.mul(&self.t, &next.t)?,
            source: self.source.clone(),
            target: next.target.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// Conjugate by `pi'^k`: `u -> pi'^k u sigma(pi'^k)` with witness
/// `sigma(pi'^k)`. The value moves by `2k/j`.
pub fn scale_entry_by(
    alg: &QuatAlgebra,
    sigma: &Involution,
    record: &CaseRecord,
    u: &QuatElem,
    k: i64,
) -> Result<(QuatElem, IsometryWitness)> {
    let base = if k < 0 {
        alg.inv(&record.pi_prime)?
    } else {
        record.pi_prime.clone()
    };
    let mut p = alg.one();
    for _ in 0..k.abs() {
        p = alg.mul(&p, &base)?;
    }
    let t = sigma.apply(alg, &p)?;
    let out = alg.product(&[&p, u, &t])?;
    Ok((
        out.clone(),
        IsometryWitness {
            t,
            source: u.clone(),
            target: out,
        },
    ))
}

/// One step up or down.
pub fn scale_entry(
    alg: &QuatAlgebra,
    sigma: &Involution,
    record: &CaseRecord,
    u: &QuatElem,
    dir: Direction,
) -> Result<(QuatElem, IsometryWitness)> {
    scale_entry_by(
        alg,
        sigma,
        record,
        u,
        if dir == Direction::Up { 1 } else { -1 },
    )
}

/// Entry after value normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedEntry {
    pub entry: QuatElem,
    /// 0 for `h0`, 1 for `h1`.
    pub part: u8,
    pub witness: IsometryWitness,
}

/// Move every entry to value `0` or `1/j`.
pub fn normalize_values(h: &HermitianForm, record: &CaseRecord) -> Result<Vec<NormalizedEntry>> {
    let alg = &h.algebra;
    let step = 4 / record.j;
    let upper = 2 / record.j;
    let mut out = Vec::with_capacity(h.dim());
    for u in &h.entries {
        let v = alg.valuation_d(u)?.numerator();
        let k = v.div_euclid(step);
        let part = if v.rem_euclid(step) == 0 { 0 } else { 1 };
        if part == 1 && (v.rem_euclid(step) != upper || record.s_eps == 2) {
            return Err(Error::ValueParityImpossible);
        }
        let (entry, witness) = scale_entry_by(alg, &h.sigma, record, u, -k)?;
        out.push(NormalizedEntry {
            entry,
            part,
            witness,
        });
    }
    Ok(out)
}

/// Outcome of [`hensel_lift_isometry`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lift {
    pub t: QuatElem,
    pub iterations: usize,
}

/// Iteration budget for a working precision.
pub fn max_lift_iterations(precision: i64) -> usize {
    (64 - (precision.max(1) as u64 - 1).leading_zeros()) as usize + 2
}

/// Find `t` with residue `theta` and `sigma(t) v1 t = v0`, given units `v0`,
/// `v1` that are both `eps`-symmetric and agree modulo `m_D` after twisting
/// by `theta`. Newton step: `t <- t (1 + w^-1 e / 2)` with
/// `w = sigma(t) v1 t`, `e = v0 - w`; the error is squared each round.
pub fn hensel_lift_isometry(
    alg: &QuatAlgebra,
    sigma: &Involution,
    v0: &QuatElem,
    v1: &QuatElem,
    theta: &ResAlgebraElem,
) -> Result<Lift> {
    for v in [v0, v1] {
        if alg.valuation_d(v)? != HalfInt::ZERO {
            return Err(Error::NonUnit);
        }
    }
    let mut t = alg.lift_residue(theta);
    let image = |t: &QuatElem| alg.product(&[&sigma.apply(alg, t)?, v1, t]);
    let e0 = alg.sub(v0, &image(&t)?)?;
    if alg.val_lower_bound_d(&e0).is_some_and(|v| v <= 0) {
        return Err(Error::ResidueConditionFails);
    }
    let budget = max_lift_iterations(alg.base().precision());
    let one = alg.one();
    for it in 0..=budget {
        let w = image(&t)?;
        let e = alg.sub(v0, &w)?;
        if e.is_zero_within_precision() {
            return Ok(Lift { t, iterations: it });
        }
        if it == budget {
            break;
        }
        let c = alg.mul(&alg.inv(&w)?, &e)?;
        let c = QuatElem::from_coords(c.coords().map(|x| x.half().expect("char is not 2")));
        t = alg.mul(&t, &alg.add(&one, &c)?)?;
    }
    Err(Error::PrecisionExhausted)
}

fn require_ramified(alg: &QuatAlgebra) -> Result<()> {
    if alg.is_ramified() {
        Ok(())
    } else {
        Err(Error::UnsupportedRamification)
    }
}

fn keep(u: &QuatElem, mask: [bool; 4]) -> QuatElem {
    let z = u.delta.field().zero();
    QuatElem::from_coords(std::array::from_fn(|i| {
        if mask[i] {
            u.coords()[i].clone()
        } else {
            z.clone()
        }
    }))
}

/// Unit entry of a ramified algebra: `<u> = <delta + alpha x>`.
pub fn simplify_unramified_entry(
    alg: &QuatAlgebra,
    sigma: &Involution,
    u: &QuatElem,
) -> Result<(QuatElem, IsometryWitness)> {
    require_ramified(alg)?;
    let target = keep(u, [true, true, false, false]);
    if target == *u {
        return Ok((target, IsometryWitness::identity(alg, u)));
    }
    let theta = ResAlgebraElem::one(&alg.res_algebra()?);
    let lift = hensel_lift_isometry(alg, sigma, &target, u, &theta)?;
    Ok((
        target.clone(),
        IsometryWitness {
            t: lift.t,
            source: u.clone(),
            target,
        },
    ))
}

/// Entry of value `1/2`: `<u> = <beta y + gamma z>`, lifted under the
/// twist `sigma_y = y sigma(.) y^-1` and transported back by `y`.
pub fn simplify_ramified_entry(
    alg: &QuatAlgebra,
    sigma: &Involution,
    u: &QuatElem,
) -> Result<(QuatElem, IsometryWitness)> {
    require_ramified(alg)?;
    let target = keep(u, [false, false, true, true]);
    if target == *u {
        return Ok((target, IsometryWitness::identity(alg, u)));
    }
    let y = alg.y();
    let y_inv = alg.inv(&y)?;
    let sigma_y = sigma.twisted_by(alg, &y)?;
    let theta = ResAlgebraElem::one(&alg.res_algebra()?);
    let lift = hensel_lift_isometry(
        alg,
        &sigma_y,
        &alg.mul(&target, &y_inv)?,
        &alg.mul(u, &y_inv)?,
        &theta,
    )?;
    let t = alg.product(&[&y_inv, &lift.t, &y])?;
    Ok((
        target.clone(),
        IsometryWitness {
            t,
            source: u.clone(),
            target,
        },
    ))
}

/// Per-entry record of the decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitEntry {
    /// Position in the input form.
    pub index: usize,
    pub part: u8,
    pub value: HalfInt,
    pub witness: IsometryWitness,
    /// Verified residual value in half-units (`None` = exact).
    pub residual: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LarmourSplit {
    pub record: CaseRecord,
    pub h0: HermitianForm,
    pub h1: HermitianForm,
    pub entries: Vec<SplitEntry>,
}

/// `h = h0 + h1` with `h0` unit-valued, `h1` of value `1/j`, every entry
/// simplified (ramified algebras) and witnessed.
pub fn larmour_decompose(h: &HermitianForm) -> Result<LarmourSplit> {
    validate_form(h)?;
    let alg = &h.algebra;
    let record = classify_case(alg, &h.sigma, h.eps)?;
    let normalized = normalize_values(h, &record)?;
    let mut h0 = h.empty_like();
    let mut h1 = h.empty_like();
    let mut entries = Vec::with_capacity(h.dim());
    for (index, (n, u)) in normalized.into_iter().zip(&h.entries).enumerate() {
        let (entry, witness) = if alg.is_ramified() {
            let (s, w) = if n.part == 0 {
                simplify_unramified_entry(alg, &h.sigma, &n.entry)?
            } else {
                simplify_ramified_entry(alg, &h.sigma, &n.entry)?
            };
            (s, n.witness.then(alg, &w)?)
        } else {
            (n.entry, n.witness)
        };
        let residual = witness.residual(alg, &h.sigma)?;
        if residual.is_some_and(|r| r < WITNESS_HALF_UNITS) {
            return Err(Error::PrecisionExhausted);
        }
        if n.part == 0 {
            h0.entries.push(entry);
        } else {
            h1.entries.push(entry);
        }
        entries.push(SplitEntry {
            index,
            part: n.part,
            value: alg.valuation_d(u)?,
            witness,
            residual,
        });
    }
    Ok(LarmourSplit {
        record,
        h0,
        h1,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::involutions::CaseLabel;
    use crate::quaternion::division_algebra;
    use crate::valued_field::ValuedField;

    fn ram3() -> QuatAlgebra {
        let k = ValuedField::prime(3).unwrap();
        division_algebra(&k.int(2), &k.t(), false).unwrap()
    }

    fn q(d: &QuatAlgebra, c: [&str; 4]) -> QuatElem {
        QuatElem::from_coords(c.map(|s| d.base().parse(s).unwrap()))
    }

    #[test]
    fn validation() {
        let d = ram3();
        let tau = Involution::Canonical;
        assert!(HermitianForm::new(
            d.clone(),
            tau.clone(),
            1,
            vec![q(&d, ["1 + t", "0", "0", "0"])]
        )
        .is_ok());
        assert_eq!(
            HermitianForm::new(d.clone(), tau.clone(), 1, vec![d.x()]),
            Err(Error::NotEpsilonSymmetric(0))
        );
        assert!(HermitianForm::new(
            d.clone(),
            tau.clone(),
            -1,
            vec![q(&d, ["0", "0", "1", "1"])]
        )
        .is_ok());
        assert_eq!(
            HermitianForm::new(d.clone(), tau, -1, vec![d.zero()]),
            Err(Error::ZeroEntry(0))
        );
    }

    #[test]
    fn scaling() {
        let d = ram3();
        let tau = Involution::Canonical;
        let rec = classify_case(&d, &tau, 1).unwrap();
        assert_eq!(rec.label, CaseLabel::B11);
        let (out, w) = scale_entry(
            &d,
            &tau,
            &rec,
            &q(&d, ["t", "0", "0", "0"]),
            Direction::Down,
        )
        .unwrap();
        assert_eq!(out, d.from_ints([-1, 0, 0, 0]));
        assert!(w.verify(&d, &tau).unwrap());
        let h = HermitianForm::new(
            d.clone(),
            tau,
            1,
            vec![q(&d, ["t", "0", "0", "0"]), q(&d, ["1 + t", "0", "0", "0"])],
        )
        .unwrap();
        let n = normalize_values(&h, &rec).unwrap();
        assert_eq!(n[0].entry, d.from_ints([2, 0, 0, 0]));
        assert!(n.iter().all(|e| e.part == 0));
    }

    #[test]
    fn lift_square_root() {
        let d = ram3();
        let tau = Involution::Canonical;
        let v0 = q(&d, ["1 + t", "0", "0", "0"]);
        let one = ResAlgebraElem::one(&d.res_algebra().unwrap());
        let l = hensel_lift_isometry(&d, &tau, &v0, &d.one(), &one).unwrap();
        assert!(l.iterations <= max_lift_iterations(32));
        let w = IsometryWitness {
            t: l.t.clone(),
            source: d.one(),
            target: v0.clone(),
        };
        assert!(w.verify(&d, &tau).unwrap());
        assert_eq!(
            hensel_lift_isometry(&d, &tau, &d.one(), &d.one(), &one)
                .unwrap()
                .iterations,
            0
        );
        assert_eq!(
            hensel_lift_isometry(&d, &tau, &d.from_ints([2, 0, 0, 0]), &d.one(), &one),
            Err(Error::ResidueConditionFails)
        );
        assert_eq!(
            hensel_lift_isometry(&d, &tau, &q(&d, ["t", "0", "0", "0"]), &d.one(), &one),
            Err(Error::NonUnit)
        );
        assert_eq!(max_lift_iterations(32), 7);
    }

    #[test]
    fn simplification() {
        let d = ram3();
        let tau = Involution::Canonical;
        let (s, w) = simplify_unramified_entry(&d, &tau, &q(&d, ["0", "1", "t", "0"])).unwrap();
        assert_eq!(s, d.x());
        assert!(w.verify(&d, &tau).unwrap());
        let (s, w) = simplify_ramified_entry(&d, &tau, &q(&d, ["0", "t", "1", "0"])).unwrap();
        assert_eq!(s, d.y());
        assert!(w.verify(&d, &tau).unwrap());
        let ty = Involution::Twisted(d.y());
        let u = q(&d, ["1 + t", "2", "0", "t"]);
        let (s, w) = simplify_unramified_entry(&d, &ty, &u).unwrap();
        assert_eq!(s, q(&d, ["1 + t", "2", "0", "0"]));
        assert!(w.verify(&d, &ty).unwrap());
        let k = ValuedField::rationals();
        let h = division_algebra(&k.int(-1), &k.int(-1), true).unwrap();
        assert_eq!(
            simplify_unramified_entry(&h, &tau, &h.one()),
            Err(Error::UnsupportedRamification)
        );
    }

    #[test]
    fn decomposition() {
        let d = ram3();
        let tau = Involution::Canonical;
        let h = HermitianForm::new(
            d.clone(),
            tau.clone(),
            -1,
            vec![q(&d, ["0", "t", "0", "0"]), d.y()],
        )
        .unwrap();
        let s = larmour_decompose(&h).unwrap();
        assert_eq!(s.h0.dim(), 1);
        assert_eq!(s.h1.entries, vec![d.y()]);
        let x_only = s.h0.entries[0].support();
        assert_eq!(x_only, [false, true, false, false]);
        assert!(s
            .entries
            .iter()
            .all(|e| e.witness.verify(&d, &tau).unwrap()));
        let k = ValuedField::rationals();
        let hq = division_algebra(&k.int(-1), &k.int(-1), true).unwrap();
        let h = HermitianForm::new(hq.clone(), tau, 1, vec![hq.scalar(k.parse("t^2").unwrap())])
            .unwrap();
        let s = larmour_decompose(&h).unwrap();
        assert_eq!(s.h0.entries, vec![hq.one()]);
        assert!(s.h1.entries.is_empty());
    }
}
