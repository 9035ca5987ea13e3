//! Parameter search and the generator triples of the odd and even constructions.
//!
//! Every search walks GF(q²) in enumeration order and returns the first
//! admissible element, so results are reproducible across runs and thread
//! counts.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{gcd, Field, FieldElem};
use crate::mat3::{HermitianForm, Mat3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(field: &Field) -> Parity {
        if field.p() == 2 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Required multiplicative order of `a`: `q − 1` (odd) or `q + 1` (even).
    pub fn a_order(self, q: u64) -> u64 {
        match self {
            Parity::Odd => q - 1,
            Parity::Even => q + 1,
        }
    }
}

/// Named inequalities on `(a, b)`. `Oc*` belong to odd q, `Ec*` to even q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Oc1,
    Oc2,
    Oc3,
    Ec1,
    Ec2,
    Ec3,
    Ec4,
}

impl Condition {
    pub fn for_parity(parity: Parity) -> &'static [Condition] {
        match parity {
            Parity::Odd => &[Condition::Oc1, Condition::Oc2, Condition::Oc3],
            Parity::Even => &[Condition::Ec1, Condition::Ec2, Condition::Ec3, Condition::Ec4],
        }
    }

    /// Whether the condition is quantified over the exponent set.
    pub fn indexed(self) -> bool {
        matches!(self, Condition::Oc1 | Condition::Oc2 | Condition::Ec1 | Condition::Ec2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Condition::Oc1 => "oc1",
            Condition::Oc2 => "oc2",
            Condition::Oc3 => "oc3",
            Condition::Ec1 => "ec1",
            Condition::Ec2 => "ec2",
            Condition::Ec3 => "ec3",
            Condition::Ec4 => "ec4",
        }
    }
}

/// Characteristic-polynomial coefficients the conditions compare.
#[derive(Clone, Copy, Debug)]
pub struct Coefficients {
    /// odd: `a + a⁻¹ + 1` (YZ); even: `a + a⁻¹ + 1` (ZY)
    pub diagonal: FieldElem,
    /// odd: `a + a⁻¹ b^{q+1}` (XY); even: `a(1+b+b³+b⁴) + a⁻¹(b²+b³+b⁴)` (XY)
    pub xy: FieldElem,
    /// odd: `1 + b^{q+1}` (XZ); even: `1 + b + b²` (ZX)
    pub xz: FieldElem,
}

pub fn coefficients(field: &Field, parity: Parity, a: FieldElem, b: FieldElem) -> Result<Coefficients> {
    let f = field;
    let ainv = f.inv(a)?;
    let one = f.one();
    let diagonal = f.add(f.add(a, ainv), one);
    match parity {
        Parity::Odd => {
            let (nb, _) = f.norm_trace_q(b);
            Ok(Coefficients { diagonal, xy: f.add(a, f.mul(ainv, nb)), xz: f.add(one, nb) })
        }
        Parity::Even => {
            let b2 = f.mul(b, b);
            let b3 = f.mul(b2, b);
            let b4 = f.mul(b3, b);
            let u = f.add(f.add(one, b), f.add(b3, b4));
            let v = f.add(b2, f.add(b3, b4));
            let xy = f.add(f.mul(a, u), f.mul(ainv, v));
            Ok(Coefficients { diagonal, xy, xz: f.add(one, f.add(b, b2)) })
        }
    }
}

/// The two sides compared by `cond` at Frobenius exponent `i` (ignored when
/// the condition is not indexed). The condition holds iff the sides differ.
pub fn condition_sides(field: &Field, cond: Condition, c: &Coefficients, i: u32) -> (FieldElem, FieldElem) {
    let tw = |x| field.frobenius(x, i);
    match cond {
        Condition::Oc1 => (tw(c.diagonal), c.xy),
        Condition::Oc2 => (tw(c.diagonal), c.xz),
        Condition::Oc3 => (c.xy, c.xz),
        Condition::Ec1 => (tw(c.xz), c.diagonal),
        Condition::Ec2 => (tw(c.xz), c.xy),
        Condition::Ec3 => (c.diagonal, c.xy),
        Condition::Ec4 => (c.diagonal, field.zero()),
    }
}

fn check_all(field: &Field, parity: Parity, a: FieldElem, b: FieldElem, exponents: &[u32]) -> bool {
    let Ok(c) = coefficients(field, parity, a, b) else {
        return false;
    };
    Condition::for_parity(parity).iter().all(|&cond| {
        if cond.indexed() {
            exponents.iter().all(|&i| {
                let (l, r) = condition_sides(field, cond, &c, i);
                l != r
            })
        } else {
            let (l, r) = condition_sides(field, cond, &c, 0);
            l != r
        }
    })
}

/// True iff (oc1)–(oc3) hold for every exponent in `exponents`.
pub fn check_conditions_odd(field: &Field, a: FieldElem, b: FieldElem, exponents: &[u32]) -> bool {
    check_all(field, Parity::Odd, a, b, exponents)
}

/// True iff (ec1)–(ec4) hold for every exponent in `exponents`.
pub fn check_conditions_even(field: &Field, a: FieldElem, b: FieldElem, exponents: &[u32]) -> bool {
    check_all(field, Parity::Even, a, b, exponents)
}

/// Frobenius exponents the conditions are quantified over, reduced mod `2f`.
///
/// The odd-case set is `{0, f/g, 2f/g}` with `g = gcd(3, f)`; the even-case
/// set is `{0, f, 2f/g, 4f/g}`.
pub fn exponent_set(f: u32, parity: Parity) -> Vec<u32> {
    let g = gcd(3, f as u64) as u32;
    let raw = match parity {
        Parity::Odd => vec![0, f / g, 2 * f / g],
        Parity::Even => vec![0, f, 2 * f / g, 4 * f / g],
    };
    let mut set: Vec<u32> = raw.into_iter().map(|i| i % (2 * f)).collect();
    set.sort_unstable();
    set.dedup();
    set
}

fn b_admissible(field: &Field, parity: Parity, b: FieldElem) -> bool {
    let (norm, trace) = field.norm_trace_q(b);
    if trace != field.one() {
        return false;
    }
    match parity {
        Parity::Odd => field.conj(b) != b,
        Parity::Even => norm != field.one(),
    }
}

/// All `b` satisfying the parity's conditions, in enumeration order.
pub fn admissible_b(field: &Field, parity: Parity) -> Vec<FieldElem> {
    field.nonzero_elements().filter(|&b| b_admissible(field, parity, b)).collect()
}

pub fn find_b(field: &Field, parity: Parity) -> Result<FieldElem> {
    field
        .nonzero_elements()
        .find(|&b| b_admissible(field, parity, b))
        .ok_or(Error::NoValidParams(field.q() as u64))
}

pub fn check_supported(field: &Field) -> Result<Parity> {
    let q = field.q() as u64;
    let parity = Parity::of(field);
    let min = match parity {
        Parity::Odd => 5,
        Parity::Even => 4,
    };
    if q < min {
        return Err(Error::UnsupportedQ(q));
    }
    Ok(parity)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    pub parity: Parity,
    pub b: FieldElem,
    pub a: FieldElem,
    pub exponent_set: Vec<u32>,
    /// Number of valid `a` for the chosen `b`.
    pub census: usize,
}

/// Elements of order `q ∓ 1` in enumeration order.
pub fn a_candidates(field: &Field, parity: Parity) -> Vec<FieldElem> {
    let target = parity.a_order(field.q() as u64);
    field.nonzero_elements().filter(|&a| field.elem_order(a) == Ok(target)).collect()
}

/// First `(b, a)` in enumeration order satisfying every condition.
pub fn search_params(field: &Field) -> Result<ConstructionParams> {
    let parity = check_supported(field)?;
    let exponents = exponent_set(field.f(), parity);
    let candidates = a_candidates(field, parity);
    for b in admissible_b(field, parity) {
        let valid: Vec<FieldElem> = candidates
            .par_iter()
            .copied()
            .filter(|&a| check_all(field, parity, a, b, &exponents))
            .collect();
        if let Some(&a) = valid.first() {
            return Ok(ConstructionParams { parity, b, a, exponent_set: exponents, census: valid.len() });
        }
    }
    Err(Error::NoValidParams(field.q() as u64))
}

/// Every `(b, a)` satisfying the conditions, `b`-major in enumeration order.
/// `census` on each entry counts the valid `a` for that entry's `b`.
pub fn valid_params(field: &Field) -> Result<Vec<ConstructionParams>> {
    let parity = check_supported(field)?;
    let exponents = exponent_set(field.f(), parity);
    let candidates = a_candidates(field, parity);
    let mut out = Vec::new();
    for b in admissible_b(field, parity) {
        let valid: Vec<FieldElem> = candidates
            .par_iter()
            .copied()
            .filter(|&a| check_all(field, parity, a, b, &exponents))
            .collect();
        let census = valid.len();
        out.extend(valid.into_iter().map(|a| ConstructionParams {
            parity,
            b,
            a,
            exponent_set: exponents.clone(),
            census,
        }));
    }
    Ok(out)
}

/// SU₃(q) lifts of the three involutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorTriple {
    pub x: Mat3,
    pub y: Mat3,
    pub z: Mat3,
    pub params: ConstructionParams,
}

impl GeneratorTriple {
    pub fn mats(&self) -> [Mat3; 3] {
        [self.x, self.y, self.z]
    }
}

pub fn build_triple(field: &Field, cp: &ConstructionParams) -> Result<GeneratorTriple> {
    let f = field;
    let (o, z) = (f.one(), f.zero());
    let (a, b) = (cp.a, cp.b);
    let ainv = f.inv(a)?;
    let bq = f.conj(b);
    let bq1 = f.mul(b, bq);
    let (x, y, zm) = match cp.parity {
        Parity::Odd => {
            let m1 = f.neg(o);
            (
                Mat3([[f.neg(bq), b, bq1], [o, z, bq], [o, o, f.neg(b)]]),
                Mat3([[z, z, a], [z, m1, z], [ainv, z, z]]),
                Mat3([[z, z, o], [z, m1, z], [o, z, z]]),
            )
        }
        Parity::Even => {
            let d = f.add(f.mul(a, b), f.mul(ainv, bq));
            let corner = f.add(f.mul(a, f.add(b, bq1)), f.mul(ainv, f.add(bq, bq1)));
            (
                Mat3([[b, o, o], [bq, z, o], [bq1, b, bq]]),
                Mat3([[d, z, corner], [z, o, z], [f.add(a, ainv), z, d]]),
                Mat3([[o, z, o], [z, o, z], [z, z, o]]),
            )
        }
    };
    let form = HermitianForm::standard(f);
    for (name, m) in [("X", &x), ("Y", &y), ("Z", &zm)] {
        if !form.is_special_unitary(m, f) {
            return Err(Error::Inconsistency(format!("{name} is not in SU(3, q)")));
        }
        if !m.mul(m, f).is_identity(f) {
            return Err(Error::Inconsistency(format!("{name} is not an involution")));
        }
    }
    Ok(GeneratorTriple { x, y, z: zm, params: cp.clone() })
}

/// Sizes of the exceptional sets for a fixed `b`: for each condition and
/// Frobenius exponent, the number of order-`q ∓ 1` elements violating it.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionCensus {
    pub candidates: usize,
    /// keyed by condition name, then exponent (0 for non-indexed conditions)
    pub violations: BTreeMap<&'static str, BTreeMap<u32, usize>>,
    /// elements passing every condition for the exponent set
    pub valid: usize,
}

impl ConditionCensus {
    pub fn count(&self, cond: Condition, i: u32) -> usize {
        self.violations
            .get(cond.name())
            .and_then(|m| m.get(&i))
            .copied()
            .unwrap_or(0)
    }
}

pub fn condition_census(field: &Field, parity: Parity, b: FieldElem) -> Result<ConditionCensus> {
    let candidates = a_candidates(field, parity);
    let exponents = exponent_set(field.f(), parity);
    let mut violations: BTreeMap<&'static str, BTreeMap<u32, usize>> = BTreeMap::new();
    for &cond in Condition::for_parity(parity) {
        let range: Vec<u32> = if cond.indexed() { (0..field.degree()).collect() } else { vec![0] };
        let entry = violations.entry(cond.name()).or_default();
        for i in range {
            let mut n = 0;
            for &a in &candidates {
                let c = coefficients(field, parity, a, b)?;
                let (l, r) = condition_sides(field, cond, &c, i);
                if l == r {
                    n += 1;
                }
            }
            entry.insert(i, n);
        }
    }
    let valid = candidates.iter().filter(|&&a| check_all(field, parity, a, b, &exponents)).count();
    Ok(ConditionCensus { candidates: candidates.len(), violations, valid })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_sets() {
        assert_eq!(exponent_set(1, Parity::Odd), vec![0, 1]);
        assert_eq!(exponent_set(3, Parity::Odd), vec![0, 1, 2]);
        assert_eq!(exponent_set(2, Parity::Odd), vec![0, 2]);
        assert_eq!(exponent_set(2, Parity::Even), vec![0, 2]);
        assert_eq!(exponent_set(3, Parity::Even), vec![0, 2, 3, 4]);
        assert_eq!(exponent_set(5, Parity::Even), vec![0, 5]);
    }

    #[test]
    fn b_conditions_odd() {
        let f = Field::new(5, 1).unwrap();
        let bs = admissible_b(&f, Parity::Odd);
        // trace-1 elements: q of them; 2⁻¹ = 3 is the one lying in GF(5)
        assert_eq!(bs.len(), 4);
        assert!(!bs.contains(&f.inv(f.from_int(2)).unwrap()));
        let b = find_b(&f, Parity::Odd).unwrap();
        assert_eq!(b, bs[0]);
    }

    #[test]
    fn b_conditions_even() {
        let f = Field::new(2, 2).unwrap();
        let b = find_b(&f, Parity::Even).unwrap();
        let (n, t) = f.norm_trace_q(b);
        assert_eq!(t, f.one());
        assert_ne!(n, f.one());
    }

    #[test]
    fn a_equal_one_fails_oc3() {
        let f = Field::new(7, 1).unwrap();
        let b = find_b(&f, Parity::Odd).unwrap();
        let c = coefficients(&f, Parity::Odd, f.one(), b).unwrap();
        let (l, r) = condition_sides(&f, Condition::Oc3, &c, 0);
        assert_eq!(l, r);
        assert!(!check_conditions_odd(&f, f.one(), b, &[0]));
    }

    #[test]
    fn ec4_rejects_cube_roots() {
        let f = Field::new(2, 2).unwrap();
        let b = find_b(&f, Parity::Even).unwrap();
        // a + a⁻¹ = 1 means a is a primitive cube root of unity
        for a in f.nonzero_elements().filter(|&a| f.add(a, f.inv(a).unwrap()) == f.one()) {
            assert!(!check_conditions_even(&f, a, b, &[0]));
        }
    }

    #[test]
    fn unsupported_small_q() {
        for (p, e) in [(3, 1), (2, 1)] {
            let f = Field::new(p, e).unwrap();
            assert!(matches!(search_params(&f), Err(Error::UnsupportedQ(_))));
        }
    }

    #[test]
    fn search_is_deterministic() {
        let f = Field::new(7, 1).unwrap();
        assert_eq!(search_params(&f).unwrap(), search_params(&f).unwrap());
    }

    #[test]
    fn triples_have_displayed_shape() {
        let f = Field::new(5, 1).unwrap();
        let t = build_triple(&f, &search_params(&f).unwrap()).unwrap();
        let (o, z, m1) = (f.one(), f.zero(), f.from_int(-1));
        assert_eq!(t.z, Mat3([[z, z, o], [z, m1, z], [o, z, z]]));
        let ainv = f.inv(t.params.a).unwrap();
        assert_eq!(t.y.mul(&t.z, &f), Mat3::diag(&f, [t.params.a, o, ainv]));

        let f = Field::new(2, 2).unwrap();
        let t = build_triple(&f, &search_params(&f).unwrap()).unwrap();
        let (o, z) = (f.one(), f.zero());
        assert_eq!(t.z, Mat3([[o, z, o], [z, o, z], [z, z, o]]));
    }
}
