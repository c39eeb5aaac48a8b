//! Random elements, forms and the standard fixtures, for property checks and
//! benchmarks. All generators are deterministic given the RNG.

use rand::Rng;

use crate::base_fields::{ResElem, ResidueField};
use crate::error::Result;
use crate::hermitian::HermitianForm;
use crate::involutions::{classify_case, sym_basis, CaseLabel, CaseRecord, Involution};
use crate::quaternion::{division_algebra, QuatAlgebra, QuatElem};
use crate::valued_field::{Laurent, ValuedField};

/// Largest numerator magnitude for random rational coefficients.
const Q_COEFF: i64 = 3;

pub fn random_res<R: Rng>(rng: &mut R, field: ResidueField) -> ResElem {
    match field {
        ResidueField::Prime { p } => field.from_int(rng.gen_range(0..p) as i64),
        ResidueField::QuadExt { p, .. } => field
            .fq(rng.gen_range(0..p) as i64, rng.gen_range(0..p) as i64)
            .expect("in range"),
        ResidueField::Rationals => field.from_int(rng.gen_range(-Q_COEFF..=Q_COEFF)),
    }
}

pub fn random_nonzero_res<R: Rng>(rng: &mut R, field: ResidueField) -> ResElem {
    loop {
        let e = random_res(rng, field);
        if !e.is_zero() {
            return e;
        }
    }
}

/// Exact series `c_0 t^v + ... + c_{len-1} t^(v+len-1)` with `c_0 != 0`.
pub fn random_laurent<R: Rng>(rng: &mut R, k: &ValuedField, v: i64, len: usize) -> Laurent {
    let r = k.residue();
    let mut coeffs = vec![random_nonzero_res(rng, r)];
    for _ in 1..len.max(1) {
        coeffs.push(random_res(rng, r));
    }
    k.from_coeffs(v, coeffs, None)
        .expect("coefficients from the residue field")
}

/// Random unit of `O_K`.
pub fn random_unit<R: Rng>(rng: &mut R, k: &ValuedField) -> Laurent {
    let len = rng.gen_range(1..=3);
    random_laurent(rng, k, 0, len)
}

/// Random element of `O_K` (possibly zero).
pub fn random_integral<R: Rng>(rng: &mut R, k: &ValuedField) -> Laurent {
    if rng.gen_bool(0.2) {
        return k.zero();
    }
    let v = rng.gen_range(0..3);
    let len = rng.gen_range(1..=3);
    random_laurent(rng, k, v, len)
}

/// Random nonzero element of `K` with valuation in `lo..=hi`.
pub fn random_nonzero<R: Rng>(rng: &mut R, k: &ValuedField, lo: i64, hi: i64) -> Laurent {
    let v = rng.gen_range(lo..=hi);
    let len = rng.gen_range(1..=3);
    random_laurent(rng, k, v, len)
}

/// Random quaternion with coordinates of valuation in `lo..=hi` (each
/// coordinate zero with probability 1/4).
pub fn random_quat<R: Rng>(rng: &mut R, alg: &QuatAlgebra, lo: i64, hi: i64) -> QuatElem {
    let k = alg.base();
    loop {
        let u = QuatElem::from_coords(std::array::from_fn(|_| {
            if rng.gen_bool(0.25) {
                k.zero()
            } else {
                random_nonzero(rng, &k, lo, hi)
            }
        }));
        if !u.is_exact_zero() {
            return u;
        }
    }
}

/// Random unit of `O_D`.
pub fn random_unit_quat<R: Rng>(rng: &mut R, alg: &QuatAlgebra) -> QuatElem {
    loop {
        let u = QuatElem::from_coords(std::array::from_fn(|_| random_integral(rng, &alg.base())));
        if !u.is_exact_zero()
            && alg
                .valuation_d(&u)
                .map(|v| v.numerator() == 0)
                .unwrap_or(false)
        {
            return u;
        }
    }
}

/// Random nonzero `eps`-symmetric element with coordinates of valuation in
/// `lo..=hi` (normalized involution).
pub fn random_sym<R: Rng>(
    rng: &mut R,
    alg: &QuatAlgebra,
    sigma: &Involution,
    eps: i8,
    lo: i64,
    hi: i64,
) -> QuatElem {
    let k = alg.base();
    let basis = sym_basis(sigma, eps).expect("normalized involution");
    loop {
        let mut c: [Laurent; 4] = std::array::from_fn(|_| k.zero());
        for b in &basis {
            if rng.gen_bool(0.7) {
                c[b.0] = random_nonzero(rng, &k, lo, hi);
            }
        }
        let u = QuatElem::from_coords(c);
        if !u.is_exact_zero() {
            return u;
        }
    }
}

pub fn random_form<R: Rng>(
    rng: &mut R,
    alg: &QuatAlgebra,
    sigma: &Involution,
    eps: i8,
    dim: usize,
) -> HermitianForm {
    let entries = (0..dim)
        .map(|_| random_sym(rng, alg, sigma, eps, -2, 3))
        .collect();
    HermitianForm::new(alg.clone(), sigma.clone(), eps, entries).expect("symmetric entries")
}

/// `(u, t / F_p((t)))` with `u` the smallest nonresidue.
pub fn ramified_algebra(p: u64) -> Result<QuatAlgebra> {
    let k = ValuedField::prime(p)?;
    let u = k.constant(k.residue().nonsquare()?);
    division_algebra(&u, &k.t(), false)
}

/// `(-1, -1 / Q((t)))`.
pub fn hamilton_algebra() -> QuatAlgebra {
    let q = ValuedField::rationals();
    division_algebra(&q.int(-1), &q.int(-1), true)
        .expect("(-1,-1) is a division algebra over Q((t))")
}

/// Normalized `(D, sigma, eps)` realizing a case: ramified cases over
/// `F_p((t))`, unramified ones over `Q((t))` (finite residue fields admit no
/// unramified division algebra).
pub fn fixture(label: CaseLabel, p: u64) -> Result<(QuatAlgebra, Involution, i8, CaseRecord)> {
    let alg = if label.is_ramified() {
        ramified_algebra(p)?
    } else {
        hamilton_algebra()
    };
    let (sigma, eps) = match label {
        CaseLabel::A11 | CaseLabel::B11 => (Involution::Canonical, 1),
        CaseLabel::A12 | CaseLabel::B12 => (Involution::Canonical, -1),
        CaseLabel::A21 | CaseLabel::B211 => (Involution::Twisted(alg.x()), 1),
        CaseLabel::A22 | CaseLabel::B212 => (Involution::Twisted(alg.x()), -1),
        CaseLabel::B221 => (Involution::Twisted(alg.y()), 1),
        CaseLabel::B222 => (Involution::Twisted(alg.y()), -1),
    };
    let record = classify_case(&alg, &sigma, eps)?;
    Ok((alg, sigma, eps, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixtures_realize_their_labels() {
        for label in CaseLabel::ALL {
            let (_, _, _, rec) = fixture(label, 3).unwrap();
            assert_eq!(rec.label, label);
        }
    }

    #[test]
    fn generators_respect_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (alg, sigma, eps, _) = fixture(CaseLabel::B12, 5).unwrap();
        for _ in 0..20 {
            let u = random_sym(&mut rng, &alg, &sigma, eps, -2, 3);
            assert!(HermitianForm::new(alg.clone(), sigma.clone(), eps, vec![u]).is_ok());
            let w = random_unit_quat(&mut rng, &alg);
            assert_eq!(alg.valuation_d(&w).unwrap().numerator(), 0);
        }
    }
}
