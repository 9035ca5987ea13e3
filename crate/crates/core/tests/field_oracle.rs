//! Field arithmetic against an independent schoolbook polynomial model.

use std::sync::OnceLock;

use proptest::prelude::*;
use psu3_grr::gf::{euler_phi, Field};

const FIELDS: [(u32, u32); 8] = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4)];

fn fields() -> &'static Vec<Field> {
    static CELL: OnceLock<Vec<Field>> = OnceLock::new();
    CELL.get_or_init(|| FIELDS.iter().map(|&(p, f)| Field::new(p, f).unwrap()).collect())
}

/// Product of two residue vectors modulo the field's modulus, by long division.
fn schoolbook_mul(field: &Field, x: &[u32], y: &[u32]) -> Vec<u32> {
    let p = field.p() as u64;
    let n = x.len();
    let m = &field.params().modulus;
    let mut prod = vec![0u64; 2 * n - 1];
    for (i, &a) in x.iter().enumerate() {
        for (j, &b) in y.iter().enumerate() {
            prod[i + j] = (prod[i + j] + a as u64 * b as u64) % p;
        }
    }
    for k in (n..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for (i, &mi) in m.iter().enumerate() {
            let idx = k - n + i;
            prod[idx] = (prod[idx] + (p - c) * mi as u64) % p;
        }
    }
    prod.truncate(n);
    prod.into_iter().map(|c| c as u32).collect()
}

fn schoolbook_add(field: &Field, x: &[u32], y: &[u32]) -> Vec<u32> {
    x.iter().zip(y).map(|(a, b)| (a + b) % field.p()).collect()
}

#[test]
fn exhaustive_small_fields_match_schoolbook() {
    for field in fields().iter().filter(|f| f.size() <= 81) {
        for x in field.elements() {
            for y in field.elements() {
                let (cx, cy) = (field.coeffs(x), field.coeffs(y));
                assert_eq!(field.coeffs(field.mul(x, y)), schoolbook_mul(field, &cx, &cy));
                assert_eq!(field.coeffs(field.add(x, y)), schoolbook_add(field, &cx, &cy));
            }
        }
    }
}

#[test]
fn modulus_is_smallest_irreducible_for_gf25() {
    let f = Field::new(5, 1).unwrap();
    assert_eq!(f.params().to_string(), "5,1,1,1,1");
}

#[test]
fn element_orders_follow_totient() {
    for field in fields().iter().filter(|f| f.q() <= 16) {
        let n = field.size() as u64 - 1;
        let mut counts = std::collections::BTreeMap::new();
        for x in field.nonzero_elements() {
            *counts.entry(field.elem_order(x).unwrap()).or_insert(0u64) += 1;
        }
        for d in (1..=n).filter(|d| n % d == 0) {
            assert_eq!(counts.get(&d).copied().unwrap_or(0), euler_phi(d), "q = {}, d = {d}", field.q());
        }
    }
}

#[test]
fn serialization_round_trips() {
    for field in fields() {
        for x in field.elements() {
            assert_eq!(field.parse_elem(&field.format_elem(x)).unwrap(), x);
        }
        let params = field.params().to_string().parse().unwrap();
        let rebuilt = Field::from_params(params).unwrap();
        assert_eq!(rebuilt.generator(), field.generator());
    }
}

fn triple() -> impl Strategy<Value = (usize, u32, u32, u32)> {
    (0..FIELDS.len()).prop_flat_map(|k| {
        let size = fields()[k].size();
        (Just(k), 0..size, 0..size, 0..size)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn field_axioms((k, a, b, c) in triple()) {
        let f = &fields()[k];
        let (x, y, z) = (f.elem(a), f.elem(b), f.elem(c));
        prop_assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
        prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
        prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
        prop_assert_eq!(f.add(x, y), f.add(y, x));
        prop_assert_eq!(f.mul(x, y), f.mul(y, x));
        prop_assert_eq!(f.add(x, f.neg(x)), f.zero());
        prop_assert_eq!(f.sub(f.add(x, y), y), x);
        if !x.is_zero() {
            prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
            prop_assert_eq!(f.div(f.mul(y, x), x).unwrap(), y);
        }
    }

    #[test]
    fn frobenius_is_a_ring_homomorphism((k, a, b, _c) in triple(), i in 0u32..8) {
        let f = &fields()[k];
        let (x, y) = (f.elem(a), f.elem(b));
        prop_assert_eq!(f.frobenius(f.add(x, y), i), f.add(f.frobenius(x, i), f.frobenius(y, i)));
        prop_assert_eq!(f.frobenius(f.mul(x, y), i), f.mul(f.frobenius(x, i), f.frobenius(y, i)));
        prop_assert_eq!(f.frobenius(x, i), f.powu(x, (f.p() as u64).pow(i)));
        prop_assert_eq!(f.conj(f.conj(x)), x);
        prop_assert_eq!(f.is_in_subfield(x), f.conj(x) == x);
    }

    #[test]
    fn table_product_matches_schoolbook((k, a, b, _c) in triple()) {
        let f = &fields()[k];
        let (x, y) = (f.elem(a), f.elem(b));
        prop_assert_eq!(f.coeffs(f.mul(x, y)), schoolbook_mul(f, &f.coeffs(x), &f.coeffs(y)));
    }
}

#[test]
fn large_field_samples_match_schoolbook() {
    let f = Field::new(2, 5).unwrap();
    let mut x = f.zero();
    for k in 0..2000u32 {
        let y = f.elem((k * 7919) % f.size());
        let expected = schoolbook_mul(&f, &f.coeffs(x), &f.coeffs(y));
        assert_eq!(f.coeffs(f.mul(x, y)), expected);
        x = f.add(y, f.generator());
    }
}
