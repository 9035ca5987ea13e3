//! Irreducibility and generation checks.
//!
//! Generation is certified by computing the exact order of the permutation
//! group induced on the `q³ + 1` isotropic points of the Hermitian form and
//! comparing it with `|PSU₃(q)|`. The action's kernel is the center of
//! SU₃(q), so the image of a generating set is exactly PSU₃(q).

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{gcd, Field, FieldElem};
use crate::linalg::nullspace;
use crate::mat3::{intertwiner_rows, HermitianForm, Mat3, Vec3};
use crate::perm::{ChainOptions, Perm, StabChain};

/// `|PSU₃(q)| = q³(q³+1)(q²−1)/gcd(3, q+1)`.
pub fn psu3_order(q: u64) -> u128 {
    let q = q as u128;
    q.pow(3) * (q.pow(3) + 1) * (q * q - 1) / gcd(3, q as u64 + 1) as u128
}

/// A projective point with first nonzero coordinate equal to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint(Vec3);

impl ProjPoint {
    pub fn normalize(f: &Field, v: &Vec3) -> Option<Self> {
        let lead = v.iter().copied().find(|x| !x.is_zero())?;
        let inv = f.inv(lead).ok()?;
        Some(ProjPoint(v.map(|x| f.mul(inv, x))))
    }

    pub fn coords(&self) -> &Vec3 {
        &self.0
    }
}

/// All isotropic projective points, sorted by representative in enumeration order.
pub fn isotropic_points(f: &Field, form: &HermitianForm) -> Vec<ProjPoint> {
    let (zero, one) = (f.zero(), f.one());
    let mut out = Vec::new();
    for y in f.elements() {
        for z in f.elements() {
            let v = [one, y, z];
            if form.is_isotropic(&v, f) {
                out.push(ProjPoint(v));
            }
        }
    }
    for z in f.elements() {
        let v = [zero, one, z];
        if form.is_isotropic(&v, f) {
            out.push(ProjPoint(v));
        }
    }
    let v = [zero, zero, one];
    if form.is_isotropic(&v, f) {
        out.push(ProjPoint(v));
    }
    out.sort();
    out
}

/// The action of SU₃(q) on isotropic points.
#[derive(Clone, Debug)]
pub struct IsotropicAction {
    points: Vec<ProjPoint>,
    index: HashMap<ProjPoint, u32>,
}

impl IsotropicAction {
    pub fn new(f: &Field, form: &HermitianForm) -> Self {
        let points = isotropic_points(f, form);
        let index = points.iter().enumerate().map(|(k, &pt)| (pt, k as u32)).collect();
        IsotropicAction { points, index }
    }

    pub fn degree(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    /// Permutation induced by `v ↦ M v`. Fails if `M` does not preserve the point set.
    pub fn perm_of(&self, f: &Field, m: &Mat3) -> Result<Perm> {
        let images = self
            .points
            .iter()
            .map(|pt| {
                let img = ProjPoint::normalize(f, &m.apply(pt.coords(), f)).ok_or(Error::SingularMatrix)?;
                self.index
                    .get(&img)
                    .copied()
                    .ok_or_else(|| Error::Inconsistency("matrix does not preserve the Hermitian form".into()))
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(Perm::from_images(images))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermGroupCertificate {
    pub degree: usize,
    pub order: u128,
    pub expected_order: Option<u128>,
    pub base: Vec<u32>,
    pub orbit_lengths: Vec<usize>,
}

impl PermGroupCertificate {
    pub fn matches_expected(&self) -> bool {
        self.expected_order == Some(self.order)
    }
}

/// Exact order of the group the matrices induce on isotropic points.
pub fn perm_group_order(
    f: &Field,
    action: &IsotropicAction,
    gens: &[Mat3],
    expected: Option<u128>,
) -> Result<PermGroupCertificate> {
    let perms = gens
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let p = action.perm_of(f, m)?;
            if p.is_identity() {
                return Err(Error::DegenerateAction(k));
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let opts = ChainOptions { target_order: expected, ..Default::default() };
    let chain = StabChain::with_options(action.degree(), &perms, opts);
    let cert = PermGroupCertificate {
        degree: action.degree(),
        order: chain.order(),
        expected_order: expected,
        base: chain.base(),
        orbit_lengths: chain.orbit_lengths(),
    };
    debug_assert_eq!(cert.orbit_lengths.iter().map(|&l| l as u128).product::<u128>(), cert.order);
    Ok(cert)
}

/// Order of the image of `⟨gens⟩` in PSU₃(q), compared against `|PSU₃(q)|`.
pub fn group_order(f: &Field, form: &HermitianForm, gens: &[Mat3]) -> Result<PermGroupCertificate> {
    let action = IsotropicAction::new(f, form);
    perm_group_order(f, &action, gens, Some(psu3_order(f.q() as u64)))
}

fn eigenvalues(f: &Field, m: &Mat3) -> Vec<FieldElem> {
    let cp = m.char_poly(f);
    f.elements()
        .filter(|&l| {
            let l2 = f.mul(l, l);
            let v = f.add(
                f.add(f.mul(l2, l), f.mul(cp.c2, l2)),
                f.add(f.mul(cp.c1, l), cp.c0),
            );
            v.is_zero()
        })
        .collect()
}

/// Whether the matrices share an eigenvector over GF(q²), i.e. fix a common line.
fn common_invariant_line(f: &Field, gens: &[Mat3]) -> bool {
    let spectra: Vec<Vec<FieldElem>> = gens.iter().map(|m| eigenvalues(f, m)).collect();
    if spectra.iter().any(|s| s.is_empty()) {
        return false;
    }
    let mut choice = vec![0usize; gens.len()];
    loop {
        let mut rows = Vec::new();
        for (k, m) in gens.iter().enumerate() {
            let shifted = m.add(&Mat3::scalar(f, f.neg(spectra[k][choice[k]])), f);
            rows.extend(shifted.0.iter().map(|r| r.to_vec()));
        }
        if !nullspace(f, &rows, 3).is_empty() {
            return true;
        }
        // next eigenvalue combination
        let mut k = 0;
        loop {
            if k == gens.len() {
                return false;
            }
            choice[k] += 1;
            if choice[k] < spectra[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// True iff `⟨gens⟩` fixes no line and no plane of GF(q²)³. A plane is
/// invariant exactly when the transposes fix a common line.
pub fn invariant_subspace_test(f: &Field, gens: &[Mat3]) -> bool {
    let transposes: Vec<Mat3> = gens.iter().map(|m| m.transpose()).collect();
    !common_invariant_line(f, gens) && !common_invariant_line(f, &transposes)
}

/// Dimension of `{D : D M = M D for every generator M}`.
pub fn commutant_dimension(f: &Field, gens: &[Mat3]) -> usize {
    let rows: Vec<Vec<FieldElem>> = gens.iter().flat_map(|m| intertwiner_rows(f, m, m, f.one())).collect();
    nullspace(f, &rows, 9).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_triple, search_params};

    #[test]
    fn psu_orders() {
        assert_eq!(psu3_order(3), 6048);
        assert_eq!(psu3_order(4), 62400);
        assert_eq!(psu3_order(5), 126000);
    }

    #[test]
    fn isotropic_counts() {
        for (p, e, expected) in [(2, 2, 65), (5, 1, 126), (3, 1, 28), (2, 1, 9)] {
            let f = Field::new(p, e).unwrap();
            let pts = isotropic_points(&f, &HermitianForm::standard(&f));
            assert_eq!(pts.len(), expected);
        }
    }

    #[test]
    fn reference_point_is_isotropic() {
        let f = Field::new(7, 1).unwrap();
        let form = HermitianForm::standard(&f);
        assert!(form.is_isotropic(&[f.one(), f.zero(), f.zero()], &f));
        let pts = isotropic_points(&f, &form);
        assert!(pts.contains(&ProjPoint([f.one(), f.zero(), f.zero()])));
    }

    #[test]
    fn identity_triple_is_reducible() {
        let f = Field::new(5, 1).unwrap();
        let id = Mat3::identity(&f);
        assert!(!invariant_subspace_test(&f, &[id, id, id]));
        assert_eq!(commutant_dimension(&f, &[id, id, id]), 9);
    }

    #[test]
    fn diagonal_commutant() {
        let f = Field::new(5, 1).unwrap();
        let t = build_triple(&f, &search_params(&f).unwrap()).unwrap();
        let yz = t.y.mul(&t.z, &f);
        assert_eq!(commutant_dimension(&f, &[yz, yz, yz]), 3);
        assert_eq!(commutant_dimension(&f, &t.mats()), 1);
        assert!(invariant_subspace_test(&f, &t.mats()));
    }

    #[test]
    fn degenerate_generator_is_rejected() {
        let f = Field::new(2, 2).unwrap();
        let form = HermitianForm::standard(&f);
        let id = Mat3::identity(&f);
        assert_eq!(group_order(&f, &form, &[id]), Err(Error::DegenerateAction(0)));
    }

    #[test]
    fn dihedral_subgroup_q5() {
        let f = Field::new(5, 1).unwrap();
        let form = HermitianForm::standard(&f);
        let t = build_triple(&f, &search_params(&f).unwrap()).unwrap();
        let action = IsotropicAction::new(&f, &form);
        let cert = perm_group_order(&f, &action, &[t.y, t.z], None).unwrap();
        assert_eq!(cert.order, 8);
    }
}
