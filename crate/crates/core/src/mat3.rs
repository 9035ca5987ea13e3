//! 3×3 matrices over GF(q²), the Hermitian form W, and SU₃(q) membership.

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};

pub type Vec3 = [FieldElem; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat3(pub [[FieldElem; 3]; 3]);

/// Monic `λ³ + c2 λ² + c1 λ + c0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharPoly {
    pub c2: FieldElem,
    pub c1: FieldElem,
    pub c0: FieldElem,
}

/// Polynomials of degree <= 3 in λ, low degree first.
type LambdaPoly = [FieldElem; 4];

fn lp_mul(f: &Field, a: &LambdaPoly, b: &LambdaPoly) -> LambdaPoly {
    let mut out = [f.zero(); 4];
    for i in 0..4 {
        for j in 0..4 - i {
            out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
        }
    }
    out
}

impl Mat3 {
    pub fn from_rows(rows: [[FieldElem; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn zero(f: &Field) -> Self {
        Mat3([[f.zero(); 3]; 3])
    }

    pub fn identity(f: &Field) -> Self {
        Self::scalar(f, f.one())
    }

    pub fn scalar(f: &Field, c: FieldElem) -> Self {
        let mut m = Self::zero(f);
        for i in 0..3 {
            m.0[i][i] = c;
        }
        m
    }

    pub fn diag(f: &Field, d: [FieldElem; 3]) -> Self {
        let mut m = Self::zero(f);
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn entry(&self, i: usize, j: usize) -> FieldElem {
        self.0[i][j]
    }

    pub fn mul(&self, other: &Mat3, f: &Field) -> Mat3 {
        let mut out = Self::zero(f);
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = f.zero();
                for k in 0..3 {
                    acc = f.add(acc, f.mul(self.0[i][k], other.0[k][j]));
                }
                out.0[i][j] = acc;
            }
        }
        out
    }

    pub fn apply(&self, v: &Vec3, f: &Field) -> Vec3 {
        let mut out = [f.zero(); 3];
        for (i, o) in out.iter_mut().enumerate() {
            for (k, &vk) in v.iter().enumerate() {
                *o = f.add(*o, f.mul(self.0[i][k], vk));
            }
        }
        out
    }

    pub fn scale(&self, c: FieldElem, f: &Field) -> Mat3 {
        Mat3(self.0.map(|row| row.map(|x| f.mul(c, x))))
    }

    pub fn add(&self, other: &Mat3, f: &Field) -> Mat3 {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = f.add(self.0[i][j], other.0[i][j]);
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat3 {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[j][i];
            }
        }
        out
    }

    /// Entrywise `x ↦ x^{p^i}`.
    pub fn frobenius(&self, i: u32, f: &Field) -> Mat3 {
        Mat3(self.0.map(|row| row.map(|x| f.frobenius(x, i))))
    }

    /// Entrywise q-th power, then transpose.
    pub fn conj_transpose(&self, f: &Field) -> Mat3 {
        self.frobenius(f.f(), f).transpose()
    }

    pub fn det(&self, f: &Field) -> FieldElem {
        let m = &self.0;
        let minor = |a: usize, b: usize, c: usize, d: usize| {
            f.sub(f.mul(m[1][a], m[2][b]), f.mul(m[1][c], m[2][d]))
        };
        let t0 = f.mul(m[0][0], minor(1, 2, 2, 1));
        let t1 = f.mul(m[0][1], minor(0, 2, 2, 0));
        let t2 = f.mul(m[0][2], minor(0, 1, 1, 0));
        f.add(f.sub(t0, t1), t2)
    }

    pub fn inv(&self, f: &Field) -> Result<Mat3> {
        let d = self.det(f);
        let dinv = f.inv(d).map_err(|_| Error::SingularMatrix)?;
        let m = &self.0;
        let mut out = Self::zero(f);
        for i in 0..3 {
            for j in 0..3 {
                // adjugate: out[i][j] = cofactor(j, i)
                let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                let cof = f.sub(f.mul(m[r0][c0], m[r1][c1]), f.mul(m[r0][c1], m[r1][c0]));
                out.0[i][j] = f.mul(cof, dinv);
            }
        }
        Ok(out)
    }

    pub fn trace(&self, f: &Field) -> FieldElem {
        f.add(f.add(self.0[0][0], self.0[1][1]), self.0[2][2])
    }

    /// `det(λI − M)` expanded over the permutations of {0,1,2} in GF(q²)[λ].
    pub fn char_poly(&self, f: &Field) -> CharPoly {
        let entry = |i: usize, j: usize| -> LambdaPoly {
            let mut e = [f.zero(); 4];
            e[0] = f.neg(self.0[i][j]);
            if i == j {
                e[1] = f.one();
            }
            e
        };
        const PERMS: [([usize; 3], bool); 6] = [
            ([0, 1, 2], true),
            ([1, 2, 0], true),
            ([2, 0, 1], true),
            ([0, 2, 1], false),
            ([2, 1, 0], false),
            ([1, 0, 2], false),
        ];
        let mut det = [f.zero(); 4];
        for (sigma, even) in PERMS {
            let term = lp_mul(f, &lp_mul(f, &entry(0, sigma[0]), &entry(1, sigma[1])), &entry(2, sigma[2]));
            for k in 0..4 {
                det[k] = if even { f.add(det[k], term[k]) } else { f.sub(det[k], term[k]) };
            }
        }
        debug_assert_eq!(det[3], f.one());
        CharPoly { c2: det[2], c1: det[1], c0: det[0] }
    }

    pub fn is_identity(&self, f: &Field) -> bool {
        *self == Self::identity(f)
    }

    /// `Some(c)` if the matrix is `c·I`.
    pub fn as_scalar(&self, f: &Field) -> Option<FieldElem> {
        let c = self.0[0][0];
        (*self == Self::scalar(f, c)).then_some(c)
    }

    pub fn is_central(&self, f: &Field) -> bool {
        match self.as_scalar(f) {
            Some(c) if !c.is_zero() => {
                let one = f.one();
                f.powu(c, 3) == one && f.powu(c, f.q() as u64 + 1) == one
            }
            _ => false,
        }
    }

    pub fn pow(&self, mut e: u64, f: &Field) -> Mat3 {
        let mut result = Self::identity(f);
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, f);
            }
            base = base.mul(&base, f);
            e >>= 1;
        }
        result
    }

    /// Least `n >= 1` with `Mⁿ = I`.
    pub fn matrix_order(&self, f: &Field) -> Result<u64> {
        self.first_power(f, |m| m.is_identity(f))
    }

    /// Least `n >= 1` with `Mⁿ` central.
    pub fn projective_order(&self, f: &Field) -> Result<u64> {
        self.first_power(f, |m| m.is_central(f))
    }

    fn first_power(&self, f: &Field, done: impl Fn(&Mat3) -> bool) -> Result<u64> {
        if self.det(f).is_zero() {
            return Err(Error::SingularMatrix);
        }
        // Every element of GL₃(q²) has order below q⁶.
        let bound = (f.size() as u64).pow(3);
        let mut acc = *self;
        for n in 1..=bound {
            if done(&acc) {
                return Ok(n);
            }
            acc = acc.mul(self, f);
        }
        Err(Error::OrderBound(bound))
    }

    /// Equality modulo the center of SU₃(q).
    pub fn projectively_equal(&self, other: &Mat3, f: &Field) -> bool {
        f.central_scalars().into_iter().any(|c| *self == other.scale(c, f))
    }

    pub fn format(&self, f: &Field) -> String {
        self.0
            .iter()
            .map(|row| row.iter().map(|&x| f.format_elem(x)).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse(s: &str, f: &Field) -> Result<Mat3> {
        let rows: Vec<&str> = s.split(';').collect();
        if rows.len() != 3 {
            return Err(Error::Parse(format!("expected 3 rows in {s:?}")));
        }
        let mut m = Self::zero(f);
        for (i, row) in rows.iter().enumerate() {
            let entries: Vec<&str> = row.split_whitespace().collect();
            if entries.len() != 3 {
                return Err(Error::Parse(format!("expected 3 entries in row {row:?}")));
            }
            for (j, e) in entries.iter().enumerate() {
                m.0[i][j] = f.parse_elem(e)?;
            }
        }
        Ok(m)
    }
}

/// Rows of the linear system `A·D − c·D·B = 0` in the 9 entries of `D`
/// (row-major unknown index `3i + j`).
pub fn intertwiner_rows(f: &Field, a: &Mat3, b: &Mat3, c: FieldElem) -> Vec<Vec<FieldElem>> {
    let mut rows = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            let mut row = vec![f.zero(); 9];
            for k in 0..3 {
                // (A·D)_ij = Σ_k A_ik D_kj
                row[3 * k + j] = f.add(row[3 * k + j], a.0[i][k]);
                // (D·B)_ij = Σ_k D_ik B_kj
                row[3 * i + k] = f.sub(row[3 * i + k], f.mul(c, b.0[k][j]));
            }
            rows.push(row);
        }
    }
    rows
}

/// Matrix whose row-major entries are `v`.
pub fn mat_from_vec(v: &[FieldElem]) -> Mat3 {
    Mat3([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]])
}

/// A non-degenerate Hermitian form `W`, `conj_transpose(W) = W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HermitianForm {
    w: Mat3,
}

impl HermitianForm {
    /// The anti-diagonal form with 1s on the anti-diagonal, used in both characteristics.
    pub fn standard(f: &Field) -> Self {
        let (o, z) = (f.one(), f.zero());
        HermitianForm { w: Mat3([[z, z, o], [z, o, z], [o, z, z]]) }
    }

    pub fn new(w: Mat3, f: &Field) -> Result<Self> {
        if w.conj_transpose(f) != w {
            return Err(Error::Inconsistency("form matrix is not Hermitian".into()));
        }
        if w.det(f).is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(HermitianForm { w })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.w
    }

    /// `ūᵀ W v`.
    pub fn value(&self, u: &Vec3, v: &Vec3, f: &Field) -> FieldElem {
        let wv = self.w.apply(v, f);
        u.iter().zip(&wv).fold(f.zero(), |acc, (&a, &b)| f.add(acc, f.mul(f.conj(a), b)))
    }

    pub fn is_isotropic(&self, v: &Vec3, f: &Field) -> bool {
        self.value(v, v, f).is_zero()
    }

    /// `det(M) = 1` and `M̄ᵀ W M = W`.
    pub fn is_special_unitary(&self, m: &Mat3, f: &Field) -> bool {
        m.det(f) == f.one() && self.similitude_factor(m, f) == Some(f.one())
    }

    /// `Some(μ)` if `M̄ᵀ W M = μ W` with `μ ≠ 0`.
    pub fn similitude_factor(&self, m: &Mat3, f: &Field) -> Option<FieldElem> {
        let lhs = m.conj_transpose(f).mul(&self.w, f).mul(m, f);
        // the (0,2) entry of W is 1
        let mu = lhs.0[0][2];
        (!mu.is_zero() && lhs == self.w.scale(mu, f)).then_some(mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn construction_one(f: &Field, a: FieldElem, b: FieldElem) -> [Mat3; 3] {
        let (o, z) = (f.one(), f.zero());
        let bq = f.conj(b);
        let bq1 = f.mul(b, bq);
        let x = Mat3([[f.neg(bq), b, bq1], [o, z, bq], [o, o, f.neg(b)]]);
        let y = Mat3([[z, z, a], [z, f.neg(o), z], [f.inv(a).unwrap(), z, z]]);
        let zm = Mat3([[z, z, o], [z, f.neg(o), z], [o, z, z]]);
        [x, y, zm]
    }

    fn sample_params(f: &Field) -> (FieldElem, FieldElem) {
        let q = f.q() as u64;
        let b = f
            .elements()
            .find(|&b| {
                let (_, t) = f.norm_trace_q(b);
                t == f.one() && f.conj(b) != b
            })
            .unwrap();
        let a = f.nonzero_elements().find(|&a| f.elem_order(a).unwrap() == q - 1).unwrap();
        (a, b)
    }

    #[test]
    fn identity_laws() {
        let f = Field::new(5, 1).unwrap();
        let (a, b) = sample_params(&f);
        let [x, y, z] = construction_one(&f, a, b);
        let id = Mat3::identity(&f);
        assert_eq!(id.mul(&x, &f), x);
        assert_eq!(y.det(&f), f.one());
        assert_eq!(id.conj_transpose(&f), id);
        assert_eq!(x.conj_transpose(&f).conj_transpose(&f), x);
        let ainv = f.inv(a).unwrap();
        assert_eq!(y.mul(&z, &f), Mat3::diag(&f, [a, f.one(), ainv]));
        assert_eq!(x.inv(&f).unwrap().mul(&x, &f), id);
    }

    #[test]
    fn form_is_hermitian() {
        let f = Field::new(7, 1).unwrap();
        let w = HermitianForm::standard(&f);
        assert_eq!(w.matrix().conj_transpose(&f), *w.matrix());
        assert!(HermitianForm::new(*w.matrix(), &f).is_ok());
        assert!(w.is_isotropic(&[f.one(), f.zero(), f.zero()], &f));
        assert!(w.is_special_unitary(&Mat3::identity(&f), &f));
    }

    #[test]
    fn construction_one_is_special_unitary() {
        for (p, e) in [(5, 1), (7, 1), (3, 2)] {
            let f = Field::new(p, e).unwrap();
            let w = HermitianForm::standard(&f);
            let (a, b) = sample_params(&f);
            for m in construction_one(&f, a, b) {
                assert!(w.is_special_unitary(&m, &f));
                assert_eq!(m.matrix_order(&f).unwrap(), 2);
            }
        }
    }

    #[test]
    fn char_poly_identity() {
        let f = Field::new(3, 1).unwrap();
        let cp = Mat3::identity(&f).char_poly(&f);
        // (λ − 1)³ = λ³ − 3λ² + 3λ − 1
        assert_eq!(cp, CharPoly { c2: f.from_int(-3), c1: f.from_int(3), c0: f.from_int(-1) });
    }

    #[test]
    fn char_poly_of_construction_products() {
        let f = Field::new(5, 1).unwrap();
        let (a, b) = sample_params(&f);
        let [x, y, z] = construction_one(&f, a, b);
        let ainv = f.inv(a).unwrap();
        let (nb, _) = f.norm_trace_q(b);
        let s = f.add(f.add(a, ainv), f.one());
        let cp = y.mul(&z, &f).char_poly(&f);
        assert_eq!(cp, CharPoly { c2: f.neg(s), c1: s, c0: f.from_int(-1) });
        let t = f.add(a, f.mul(ainv, nb));
        let cp = x.mul(&y, &f).char_poly(&f);
        assert_eq!(cp, CharPoly { c2: f.neg(t), c1: t, c0: f.from_int(-1) });
    }

    #[test]
    fn projective_equality() {
        let f = Field::new(5, 1).unwrap();
        let (a, b) = sample_params(&f);
        let [x, ..] = construction_one(&f, a, b);
        assert!(x.projectively_equal(&x, &f));
        assert!(!x.projectively_equal(&x.scale(f.from_int(2), &f), &f));
        let scalars = f.central_scalars();
        assert_eq!(scalars.len(), 3);
        for c in scalars {
            assert!(x.scale(c, &f).projectively_equal(&x, &f));
        }
    }

    #[test]
    fn orders_of_yz() {
        let f = Field::new(7, 1).unwrap();
        let (a, b) = sample_params(&f);
        let [_, y, z] = construction_one(&f, a, b);
        let yz = y.mul(&z, &f);
        assert_eq!(yz.projective_order(&f).unwrap(), 6);
        assert_eq!(yz.matrix_order(&f).unwrap(), 6);
        assert_eq!(Mat3::zero(&f).matrix_order(&f), Err(Error::SingularMatrix));
    }

    #[test]
    fn singular_inverse_fails() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(Mat3::zero(&f).inv(&f), Err(Error::SingularMatrix));
    }

    #[test]
    fn format_round_trip() {
        let f = Field::new(2, 2).unwrap();
        let m = Mat3::diag(&f, [f.generator(), f.one(), f.zero()]);
        let s = m.format(&f);
        assert_eq!(Mat3::parse(&s, &f).unwrap(), m);
        assert_eq!(Mat3::identity(&f).format(&f), "1,0,0,0 0,0,0,0 0,0,0,0;0,0,0,0 1,0,0,0 0,0,0,0;0,0,0,0 0,0,0,0 1,0,0,0");
        assert!(Mat3::parse("1,0,0,0", &f).is_err());
    }
}
