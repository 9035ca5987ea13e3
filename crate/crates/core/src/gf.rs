//! Arithmetic in the tower GF(p) ⊂ GF(q) ⊂ GF(q²), q = p^f.
//!
//! Only GF(q²) is materialized. Elements are stored as a packed code of
//! their coefficient vector in the power basis of the defining modulus,
//! with `c0` as the most significant base-p digit. Integer order on codes
//! is therefore lexicographic order on `(c0, c1, ..., c_{2f-1})`, which is
//! the enumeration order used by every "first element" search.
//!
//! The subfield GF(q) is the fixed field of `x ↦ x^q`.

use std::fmt;

use crate::error::{Error, Result};

/// Upper bound on `q²` for which lookup tables are built.
pub const MAX_FIELD_SIZE: u64 = 1 << 22;

/// An element of GF(q²). Meaningless without the [`Field`] it came from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem(u32);

impl FieldElem {
    /// Packed coefficient code; also the element's position in enumeration order.
    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Characteristic, extension degree of GF(q) over GF(p), and the monic
/// modulus of degree `2f` defining GF(q²).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldParams {
    pub p: u32,
    pub f: u32,
    /// Low degree first, length `2f + 1`, leading coefficient 1.
    pub modulus: Vec<u32>,
}

impl fmt::Display for FieldParams {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{},{}", self.p, self.f)?;
        for c in &self.modulus {
            write!(out, ",{c}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for FieldParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let nums = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if nums.len() < 3 {
            return Err(Error::Parse(format!("too few fields in {s:?}")));
        }
        let (p, f) = (nums[0], nums[1]);
        let modulus = nums[2..].to_vec();
        if modulus.len() != 2 * f as usize + 1 {
            return Err(Error::Parse(format!("modulus must have {} coefficients", 2 * f + 1)));
        }
        Ok(FieldParams { p, f, modulus })
    }
}

/// GF(q²) with precomputed log/exp tables.
#[derive(Clone, Debug)]
pub struct Field {
    params: FieldParams,
    q: u32,
    size: u32,
    /// `exp[k] = g^k` for the primitive element `g`, `0 <= k < size - 1`.
    exp: Vec<u32>,
    /// Inverse of `exp`; entry 0 unused.
    log: Vec<u32>,
    /// Digitwise base-p addition of two f-digit halves, `q × q`.
    half_add: Vec<u32>,
    half_neg: Vec<u32>,
    generator: FieldElem,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n).iter().fold(n, |acc, r| acc / r * (r - 1))
}

/// Dense polynomials over GF(p), low degree first, no trailing zeros.
mod poly {
    pub type Poly = Vec<u32>;

    pub fn trim(mut a: Poly) -> Poly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let (mut b, mut e) = (a as u64, p as u64 - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|c| c as u32).collect())
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Poly {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let factor = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
            for (k, &c) in m.iter().enumerate() {
                let idx = shift + k;
                r[idx] = ((r[idx] as u64 + (p - factor) as u64 * c as u64) % p as u64) as u32;
            }
            r = trim(r);
        }
        r
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Poly {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Poly {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Poly {
        let mut result = vec![1];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = rem(&mul(&result, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        result
    }

    /// Ben-Or test: no irreducible factor of degree k <= n/2.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let n = m.len() - 1;
        if n == 0 {
            return false;
        }
        let x = vec![0, 1];
        let mut h = rem(&x, m, p);
        for _ in 1..=n / 2 {
            h = pow_mod(&h, p as u64, m, p);
            let g = gcd(m, &sub(&h, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

impl Field {
    /// Builds GF(p^{2f}) over the lexicographically smallest monic
    /// irreducible modulus of degree `2f` (coefficients compared low degree first).
    pub fn new(p: u32, f: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if f == 0 {
            return Err(Error::Parse("extension degree f must be positive".into()));
        }
        let n = 2 * f;
        let size = (p as u64).checked_pow(n).filter(|&s| s <= MAX_FIELD_SIZE);
        let Some(size) = size else {
            return Err(Error::FieldTooLarge(p, n));
        };
        let modulus = smallest_irreducible(p, n as usize);
        Self::with_modulus(FieldParams { p, f, modulus }, size as u32)
    }

    /// Rebuilds a field from serialized parameters, checking the modulus.
    pub fn from_params(params: FieldParams) -> Result<Self> {
        let (p, f) = (params.p, params.f);
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let size = (p as u64).checked_pow(2 * f).filter(|&s| s <= MAX_FIELD_SIZE);
        let Some(size) = size else {
            return Err(Error::FieldTooLarge(p, 2 * f));
        };
        if params.modulus.last() != Some(&1)
            || params.modulus.iter().any(|&c| c >= p)
            || !poly::is_irreducible(&params.modulus, p)
        {
            return Err(Error::Parse(format!("modulus of {params} is not monic irreducible")));
        }
        Self::with_modulus(params, size as u32)
    }

    fn with_modulus(params: FieldParams, size: u32) -> Result<Self> {
        let p = params.p;
        let f = params.f;
        let n = 2 * f as usize;
        let q = p.pow(f);

        let digits = |code: u32| -> Vec<u32> {
            let mut c = vec![0u32; n];
            let mut rest = code;
            for i in (0..n).rev() {
                c[i] = rest % p;
                rest /= p;
            }
            c
        };
        let encode = |coeffs: &[u32]| -> u32 {
            let mut code = 0u32;
            for i in 0..n {
                code = code * p + coeffs.get(i).copied().unwrap_or(0);
            }
            code
        };

        let order = size as u64 - 1;
        let factors = prime_factors(order);
        let generator = (1..size)
            .find(|&code| {
                let g = poly::trim(digits(code));
                factors
                    .iter()
                    .all(|r| poly::pow_mod(&g, order / r, &params.modulus, p) != vec![1])
            })
            .expect("multiplicative group of a finite field is cyclic");

        let g_poly = poly::trim(digits(generator));
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; size as usize];
        let mut cur: Vec<u32> = vec![1];
        for k in 0..order as u32 {
            let code = encode(&cur);
            exp.push(code);
            log[code as usize] = k;
            cur = poly::rem(&poly::mul(&cur, &g_poly, p), &params.modulus, p);
        }

        let half_digits = |code: u32| -> Vec<u32> {
            let mut c = vec![0u32; f as usize];
            let mut rest = code;
            for i in (0..f as usize).rev() {
                c[i] = rest % p;
                rest /= p;
            }
            c
        };
        let half_encode = |c: &[u32]| c.iter().fold(0u32, |acc, &d| acc * p + d);
        let mut half_add = vec![0u32; (q * q) as usize];
        let mut half_neg = vec![0u32; q as usize];
        for x in 0..q {
            let dx = half_digits(x);
            let neg: Vec<u32> = dx.iter().map(|&d| (p - d) % p).collect();
            half_neg[x as usize] = half_encode(&neg);
            for y in 0..q {
                let dy = half_digits(y);
                let s: Vec<u32> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                half_add[(x * q + y) as usize] = half_encode(&s);
            }
        }

        Ok(Field {
            params,
            q,
            size,
            exp,
            log,
            half_add,
            half_neg,
            generator: FieldElem(generator),
        })
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    pub fn f(&self) -> u32 {
        self.params.f
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Extension degree of GF(q²) over GF(p).
    pub fn degree(&self) -> u32 {
        2 * self.params.f
    }

    /// Number of elements, `q²`.
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    /// The primitive element used for the log tables (first in enumeration order).
    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> FieldElem {
        let p = self.params.p as i64;
        let c = n.rem_euclid(p) as u32;
        let mut coeffs = vec![0; self.degree() as usize];
        coeffs[0] = c;
        self.from_coeffs(&coeffs)
    }

    /// Element with the given power-basis coefficients (low degree first);
    /// missing coefficients are zero, values are reduced mod p.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> FieldElem {
        let p = self.params.p;
        let mut code = 0u32;
        for i in 0..self.degree() as usize {
            code = code * p + coeffs.get(i).copied().unwrap_or(0) % p;
        }
        FieldElem(code)
    }

    pub fn coeffs(&self, x: FieldElem) -> Vec<u32> {
        let p = self.params.p;
        let n = self.degree() as usize;
        let mut c = vec![0u32; n];
        let mut rest = x.0;
        for i in (0..n).rev() {
            c[i] = rest % p;
            rest /= p;
        }
        c
    }

    /// Element at position `code` of the enumeration order.
    pub fn elem(&self, code: u32) -> FieldElem {
        assert!(code < self.size, "code {code} out of range");
        FieldElem(code)
    }

    /// All elements in enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.size).map(FieldElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (1..self.size).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        if self.params.p == 2 {
            return FieldElem(x.0 ^ y.0);
        }
        let q = self.q;
        let hi = self.half_add[((x.0 / q) * q + y.0 / q) as usize];
        let lo = self.half_add[((x.0 % q) * q + y.0 % q) as usize];
        FieldElem(hi * q + lo)
    }

    #[inline]
    pub fn neg(&self, x: FieldElem) -> FieldElem {
        if self.params.p == 2 {
            return x;
        }
        let q = self.q;
        FieldElem(self.half_neg[(x.0 / q) as usize] * q + self.half_neg[(x.0 % q) as usize])
    }

    #[inline]
    pub fn sub(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        if x.0 == 0 || y.0 == 0 {
            return FieldElem(0);
        }
        let order = self.size - 1;
        let mut k = self.log[x.0 as usize] + self.log[y.0 as usize];
        if k >= order {
            k -= order;
        }
        FieldElem(self.exp[k as usize])
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem> {
        if x.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.size - 1;
        let k = self.log[x.0 as usize];
        Ok(FieldElem(self.exp[((order - k) % order) as usize]))
    }

    pub fn div(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x^e` for a signed exponent; `0^0 = 1`, negative powers of zero fail.
    pub fn pow(&self, x: FieldElem, e: i64) -> Result<FieldElem> {
        if x.0 == 0 {
            return match e.cmp(&0) {
                std::cmp::Ordering::Equal => Ok(self.one()),
                std::cmp::Ordering::Greater => Ok(self.zero()),
                std::cmp::Ordering::Less => Err(Error::DivisionByZero),
            };
        }
        let order = (self.size - 1) as i128;
        let k = (self.log[x.0 as usize] as i128 * e as i128).rem_euclid(order);
        Ok(FieldElem(self.exp[k as usize]))
    }

    /// `x^e` for `e >= 0`.
    pub fn powu(&self, x: FieldElem, e: u64) -> FieldElem {
        if x.0 == 0 {
            return if e == 0 { self.one() } else { x };
        }
        let order = (self.size - 1) as u128;
        let k = (self.log[x.0 as usize] as u128 * e as u128) % order;
        FieldElem(self.exp[k as usize])
    }

    /// `x^{p^i}`; `i` is taken modulo `2f`.
    pub fn frobenius(&self, x: FieldElem, i: u32) -> FieldElem {
        let i = i % self.degree();
        self.powu(x, (self.params.p as u64).pow(i))
    }

    /// `x^q`, the conjugate over GF(q).
    pub fn conj(&self, x: FieldElem) -> FieldElem {
        self.frobenius(x, self.params.f)
    }

    pub fn is_in_subfield(&self, x: FieldElem) -> bool {
        self.conj(x) == x
    }

    /// Multiplicative order; divides `q² − 1`.
    pub fn elem_order(&self, x: FieldElem) -> Result<u64> {
        if x.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = (self.size - 1) as u64;
        let k = self.log[x.0 as usize] as u64;
        Ok(order / gcd(k, order))
    }

    /// `(x^{q+1}, x + x^q)`: norm and trace down to GF(q).
    pub fn norm_trace_q(&self, x: FieldElem) -> (FieldElem, FieldElem) {
        let xq = self.conj(x);
        (self.mul(x, xq), self.add(x, xq))
    }

    /// Scalars `c` with `c³ = 1` and `c^{q+1} = 1`, the center of SU₃(q).
    /// Sorted in enumeration order; there are `gcd(3, q + 1)` of them.
    pub fn central_scalars(&self) -> Vec<FieldElem> {
        let one = self.one();
        let q = self.q as u64;
        self.nonzero_elements()
            .filter(|&c| self.powu(c, 3) == one && self.powu(c, q + 1) == one)
            .collect()
    }

    pub fn format_elem(&self, x: FieldElem) -> String {
        self.coeffs(x).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_elem(&self, s: &str) -> Result<FieldElem> {
        let coeffs = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.len() != self.degree() as usize {
            return Err(Error::Parse(format!(
                "expected {} coefficients, got {}",
                self.degree(),
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= self.params.p) {
            return Err(Error::Parse(format!("coefficient {c} not reduced mod {}", self.params.p)));
        }
        Ok(self.from_coeffs(&coeffs))
    }
}

/// Lexicographically smallest monic irreducible polynomial of degree `n`
/// over GF(p), comparing `(m0, m1, ..., m_{n-1})`.
fn smallest_irreducible(p: u32, n: usize) -> Vec<u32> {
    let count = (p as u64).pow(n as u32);
    (0..count)
        .map(|code| {
            let mut m = vec![0u32; n + 1];
            let mut rest = code;
            for i in (0..n).rev() {
                m[i] = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            m[n] = 1;
            m
        })
        .find(|m| m[0] != 0 && poly::is_irreducible(m, p))
        .expect("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(Field::new(5, 1).unwrap().size(), 25);
        assert_eq!(Field::new(2, 2).unwrap().size(), 16);
        let f = Field::new(3, 3).unwrap();
        assert_eq!(f.elements().count(), 729);
        assert_eq!(f.params().modulus.len(), 7);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(Field::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(Field::new(2, 20), Err(Error::FieldTooLarge(2, 40))));
        assert!(Field::new(3, 0).is_err());
    }

    #[test]
    fn modulus_for_gf25() {
        // x² + 1 splits mod 5; x² + x + 1 is the first irreducible in lex order.
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.params().modulus, vec![1, 1, 1]);
        assert_eq!(f.params().to_string(), "5,1,1,1,1");
    }

    #[test]
    fn inverse_and_zero() {
        let f = Field::new(7, 1).unwrap();
        for x in f.nonzero_elements() {
            assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
            assert_eq!(f.mul(f.zero(), x), f.zero());
        }
        assert_eq!(f.inv(f.zero()), Err(Error::DivisionByZero));
        assert_eq!(f.elem_order(f.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn generator_has_full_order() {
        let f = Field::new(5, 1).unwrap();
        let g = f.generator();
        let mut acc = f.one();
        let mut first_return = None;
        for k in 1..=24u64 {
            acc = f.mul(acc, g);
            if acc == f.one() && first_return.is_none() {
                first_return = Some(k);
            }
        }
        assert_eq!(first_return, Some(24));
    }

    #[test]
    fn frobenius_basics() {
        let f = Field::new(3, 2).unwrap();
        for x in f.elements() {
            assert_eq!(f.frobenius(x, 0), x);
            assert_eq!(f.frobenius(f.frobenius(x, 2), 2), x);
        }
        for c in 0..3 {
            let x = f.from_int(c);
            assert_eq!(f.frobenius(x, 1), x);
        }
        assert_eq!(f.elements().filter(|&x| f.is_in_subfield(x)).count(), 9);
    }

    #[test]
    fn norm_trace_values() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.norm_trace_q(f.one()), (f.one(), f.from_int(2)));
        for x in f.elements().filter(|&x| f.is_in_subfield(x)) {
            let (n, t) = f.norm_trace_q(x);
            assert_eq!(n, f.mul(x, x));
            assert_eq!(t, f.add(x, x));
        }
    }

    #[test]
    fn serialization_round_trip() {
        let f = Field::new(2, 3).unwrap();
        for x in f.elements() {
            assert_eq!(f.parse_elem(&f.format_elem(x)).unwrap(), x);
        }
        assert_eq!(f.format_elem(f.one()), "1,0,0,0,0,0");
        assert!(f.parse_elem("1,0").is_err());
        assert!(f.parse_elem("2,0,0,0,0,0").is_err());
        let params: FieldParams = f.params().to_string().parse().unwrap();
        let g = Field::from_params(params).unwrap();
        assert_eq!(g.params(), f.params());
        assert!(Field::from_params("5,1,0,0,1".parse().unwrap()).is_err());
    }

    #[test]
    fn central_scalar_counts() {
        assert_eq!(Field::new(5, 1).unwrap().central_scalars().len(), 3);
        assert_eq!(Field::new(2, 2).unwrap().central_scalars().len(), 1);
        assert_eq!(Field::new(2, 3).unwrap().central_scalars().len(), 3);
        assert_eq!(Field::new(3, 1).unwrap().central_scalars().len(), 1);
    }

    #[test]
    fn totient() {
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(17), 16);
        assert_eq!(euler_phi(1), 1);
    }
}
