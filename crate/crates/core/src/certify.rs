//! The staged certification pipeline and the q = 3 negative control.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::autcheck::{aut_group_trivial, AutCertificate};
use crate::cayley::{graph_summary, GraphSummary};
use crate::construct::{build_triple, check_supported, valid_params, ConstructionParams, GeneratorTriple, Parity};
use crate::error::{Error, Result};
use crate::gf::{is_prime, Field};
use crate::grouporder::{
    commutant_dimension, group_order, invariant_subspace_test, psu3_order, IsotropicAction, PermGroupCertificate,
};
use crate::mat3::{HermitianForm, Mat3};
use crate::perm::{Perm, StabChain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Search,
    Construct,
    Order,
    Irreducible,
    Aut,
    Graph,
}

impl Stage {
    pub const ALL: [Stage; 6] =
        [Stage::Search, Stage::Construct, Stage::Order, Stage::Irreducible, Stage::Aut, Stage::Graph];

    /// Stages the GRR verdict depends on.
    pub const VERDICT: [Stage; 5] = [Stage::Search, Stage::Construct, Stage::Order, Stage::Irreducible, Stage::Aut];

    pub fn requires(self) -> &'static [Stage] {
        match self {
            Stage::Search => &[],
            Stage::Construct => &[Stage::Search],
            Stage::Order | Stage::Irreducible => &[Stage::Construct],
            Stage::Aut | Stage::Graph => &[Stage::Order],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::Search => "search",
            Stage::Construct => "construct",
            Stage::Order => "order",
            Stage::Irreducible => "irreducible",
            Stage::Aut => "aut",
            Stage::Graph => "graph",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown stage '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub p: u32,
    pub f: u32,
    stages: BTreeSet<Stage>,
    /// build the explicit graph for q above the default bound
    pub allow_large_graph: bool,
}

impl RunConfig {
    /// Requested stages plus their dependencies. No stages means all verdict stages.
    pub fn new(p: u32, f: u32, requested: &[Stage]) -> Self {
        let mut stages = BTreeSet::new();
        let mut todo: Vec<Stage> = if requested.is_empty() { Stage::VERDICT.to_vec() } else { requested.to_vec() };
        while let Some(s) = todo.pop() {
            if stages.insert(s) {
                todo.extend_from_slice(s.requires());
            }
        }
        RunConfig { p, f, stages, allow_large_graph: false }
    }

    pub fn stages(&self) -> &BTreeSet<Stage> {
        &self.stages
    }

    pub fn runs(&self, s: Stage) -> bool {
        self.stages.contains(&s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE", tag = "status")]
pub enum Verdict {
    GrrConfirmed,
    /// every stage that ran passed, but some verdict stage was not requested
    Incomplete { missing: Vec<Stage> },
    Failed { stage: Stage, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchRecord {
    pub parity: Parity,
    pub b: String,
    pub a: String,
    pub exponent_set: Vec<u32>,
    /// valid `a` for the first admissible `b`
    pub census: usize,
    pub valid_pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructRecord {
    pub b: String,
    pub a: String,
    pub x: String,
    pub y: String,
    pub z: String,
    pub special_unitary: bool,
    pub involutions: bool,
    pub projective_orders: [u64; 3],
    /// `yz` in odd characteristic, `zy` in even
    pub product: &'static str,
    pub product_order: u64,
    pub expected_product_order: u64,
    /// `(c2, c1, c0)` of `λ³ + c2 λ² + c1 λ + c0`, keyed by product
    pub char_polys: BTreeMap<&'static str, [String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedCandidate {
    pub b: String,
    pub a: String,
    pub order: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderRecord {
    /// valid pairs whose triple generates a proper subgroup, in enumeration order
    pub rejected: Vec<RejectedCandidate>,
    pub certificate: PermGroupCertificate,
    pub dihedral_order: u128,
    pub expected_dihedral_order: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrreducibleRecord {
    pub no_invariant_subspace: bool,
    pub commutant_dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub p: u32,
    pub f: u32,
    pub q: u32,
    pub field: String,
    pub stages: Vec<Stage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construct: Option<ConstructRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub irreducible: Option<IrreducibleRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aut: Option<AutCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSummary>,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn confirmed(&self) -> bool {
        self.verdict == Verdict::GrrConfirmed
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Field for `(p, f)`, refusing q outside the construction's range.
pub fn supported_field(p: u32, f: u32) -> Result<Field> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    let field = Field::new(p, f)?;
    check_supported(&field)?;
    Ok(field)
}

fn expected_product_order(q: u64, parity: Parity) -> u64 {
    match parity {
        Parity::Odd => q - 1,
        Parity::Even => q + 1,
    }
}

fn product_pair(t: &GeneratorTriple) -> (&'static str, Mat3, Mat3) {
    match t.params.parity {
        Parity::Odd => ("yz", t.y, t.z),
        Parity::Even => ("zy", t.z, t.y),
    }
}

/// The three pairwise products whose characteristic polynomials the
/// obstruction argument inspects.
pub fn product_char_polys(field: &Field, t: &GeneratorTriple) -> BTreeMap<&'static str, [String; 3]> {
    let pairs = match t.params.parity {
        Parity::Odd => [("yz", t.y, t.z), ("xy", t.x, t.y), ("xz", t.x, t.z)],
        Parity::Even => [("zy", t.z, t.y), ("zx", t.z, t.x), ("xy", t.x, t.y)],
    };
    pairs
        .into_iter()
        .map(|(name, l, r)| {
            let cp = l.mul(&r, field).char_poly(field);
            (name, [cp.c2, cp.c1, cp.c0].map(|c| field.format_elem(c)))
        })
        .collect()
}

fn construct_record(field: &Field, t: &GeneratorTriple) -> Result<ConstructRecord> {
    let form = HermitianForm::standard(field);
    let mats = t.mats();
    let (product, l, r) = product_pair(t);
    let mut orders = [0u64; 3];
    for (o, m) in orders.iter_mut().zip(&mats) {
        *o = m.projective_order(field)?;
    }
    Ok(ConstructRecord {
        b: field.format_elem(t.params.b),
        a: field.format_elem(t.params.a),
        x: t.x.format(field),
        y: t.y.format(field),
        z: t.z.format(field),
        special_unitary: mats.iter().all(|m| form.is_special_unitary(m, field)),
        involutions: mats.iter().all(|m| m.mul(m, field).is_identity(field)),
        projective_orders: orders,
        product,
        product_order: l.mul(&r, field).projective_order(field)?,
        expected_product_order: expected_product_order(field.q() as u64, t.params.parity),
        char_polys: product_char_polys(field, t),
    })
}

fn construct_passes(rec: &ConstructRecord) -> bool {
    rec.special_unitary
        && rec.involutions
        && rec.projective_orders == [2, 2, 2]
        && rec.product_order == rec.expected_product_order
}

/// Runs the requested stages in dependency order.
///
/// Refusals (`UnsupportedQ`, `NotPrime`) and internal inconsistencies are
/// returned as errors; a check that fails yields a `Failed` verdict.
pub fn run_certify(cfg: &RunConfig) -> Result<Certificate> {
    let field = supported_field(cfg.p, cfg.f)?;
    let form = HermitianForm::standard(&field);
    let q = field.q() as u64;
    let mut cert = Certificate {
        p: cfg.p,
        f: cfg.f,
        q: field.q(),
        field: field.params().to_string(),
        stages: cfg.stages().iter().copied().collect(),
        search: None,
        construct: None,
        order: None,
        irreducible: None,
        aut: None,
        graph: None,
        verdict: Verdict::Incomplete { missing: Vec::new() },
    };
    let fail = |mut cert: Certificate, stage: Stage, reason: String| {
        cert.verdict = Verdict::Failed { stage, reason };
        Ok(cert)
    };

    // search
    let candidates: Vec<ConstructionParams> = match valid_params(&field) {
        Ok(c) if !c.is_empty() => c,
        Ok(_) | Err(Error::NoValidParams(_)) => return fail(cert, Stage::Search, Error::NoValidParams(q).to_string()),
        Err(e) => return Err(e),
    };
    let first = &candidates[0];
    cert.search = Some(SearchRecord {
        parity: first.parity,
        b: field.format_elem(first.b),
        a: field.format_elem(first.a),
        exponent_set: first.exponent_set.clone(),
        census: first.census,
        valid_pairs: candidates.len(),
    });
    if !cfg.runs(Stage::Construct) {
        return Ok(finish(cert, cfg));
    }

    // order selects the first generating candidate; without it the first valid one is used
    let mut triple = build_triple(&field, first)?;
    if cfg.runs(Stage::Order) {
        let action = IsotropicAction::new(&field, &form);
        let expected = psu3_order(q);
        let mut rejected = Vec::new();
        let mut selected = None;
        for cp in &candidates {
            let t = build_triple(&field, cp)?;
            let c = crate::grouporder::perm_group_order(&field, &action, &t.mats(), Some(expected))?;
            if c.matches_expected() {
                selected = Some((t, c));
                break;
            }
            rejected.push(RejectedCandidate {
                b: field.format_elem(cp.b),
                a: field.format_elem(cp.a),
                order: c.order,
            });
        }
        let Some((t, c)) = selected else {
            return fail(cert, Stage::Order, format!("no valid pair generates a group of order {expected}"));
        };
        let (_, l, r) = product_pair(&t);
        let dihedral = crate::grouporder::perm_group_order(&field, &action, &[l, r], None)?;
        let expected_dihedral = 2 * expected_product_order(q, t.params.parity) as u128;
        triple = t;
        cert.order = Some(OrderRecord {
            rejected,
            certificate: c,
            dihedral_order: dihedral.order,
            expected_dihedral_order: expected_dihedral,
        });
        if dihedral.order != expected_dihedral {
            let rec = construct_record(&field, &triple)?;
            cert.construct = Some(rec);
            return fail(cert, Stage::Order, format!("⟨y, z⟩ has order {}, expected {expected_dihedral}", dihedral.order));
        }
    }

    let rec = construct_record(&field, &triple)?;
    let ok = construct_passes(&rec);
    cert.construct = Some(rec);
    if !ok {
        return fail(cert, Stage::Construct, "matrix checks failed".into());
    }

    if cfg.runs(Stage::Irreducible) {
        let mats = triple.mats();
        let rec = IrreducibleRecord {
            no_invariant_subspace: invariant_subspace_test(&field, &mats),
            commutant_dimension: commutant_dimension(&field, &mats),
        };
        if rec.no_invariant_subspace != (rec.commutant_dimension == 1) {
            return Err(Error::Inconsistency("irreducibility test and commutant dimension disagree".into()));
        }
        let ok = rec.no_invariant_subspace;
        cert.irreducible = Some(rec);
        if !ok {
            return fail(cert, Stage::Irreducible, "the triple fixes a proper subspace".into());
        }
    }

    if cfg.runs(Stage::Aut) {
        let generation = cert.order.as_ref().map(|o| &o.certificate);
        let aut = aut_group_trivial(&field, &form, &triple, generation)?;
        let trivial = aut.is_trivial();
        cert.aut = Some(aut);
        if !trivial {
            return fail(cert, Stage::Aut, "a nontrivial automorphism stabilizes the connection set".into());
        }
    }

    if cfg.runs(Stage::Graph) {
        let (summary, _) = graph_summary(&field, &triple.mats(), psu3_order(q), cfg.allow_large_graph)?;
        let ok = summary.connected
            && summary.simple
            && summary.regular_degree == Some(3)
            && summary.translation_witness.preserved
            && summary.vertex_count as u128 == psu3_order(q);
        cert.graph = Some(summary);
        if !ok {
            return fail(cert, Stage::Graph, "graph invariants failed".into());
        }
    }

    Ok(finish(cert, cfg))
}

fn finish(mut cert: Certificate, cfg: &RunConfig) -> Certificate {
    let missing: Vec<Stage> = Stage::VERDICT.into_iter().filter(|s| !cfg.runs(*s)).collect();
    cert.verdict = if missing.is_empty() { Verdict::GrrConfirmed } else { Verdict::Incomplete { missing } };
    cert
}

/// The generating triple the pipeline certifies: the first valid pair whose
/// triple generates PSU₃(q).
pub fn certified_triple(field: &Field) -> Result<(GeneratorTriple, PermGroupCertificate)> {
    let form = HermitianForm::standard(field);
    for cp in valid_params(field)? {
        let t = build_triple(field, &cp)?;
        let c = group_order(field, &form, &t.mats())?;
        if c.matches_expected() {
            return Ok((t, c));
        }
    }
    Err(Error::NoValidParams(field.q() as u64))
}

/// Generators of SU₃(q): the upper unitriangular elements together with
/// `antidiag(1, −1, 1)`.
pub fn su3_generators(field: &Field) -> Vec<Mat3> {
    let form = HermitianForm::standard(field);
    let (o, z) = (field.one(), field.zero());
    let mut out = Vec::new();
    for a in field.elements() {
        for c in field.elements() {
            for b in field.elements() {
                let m = Mat3([[o, a, b], [z, o, c], [z, z, o]]);
                if !m.is_identity(field) && form.is_special_unitary(&m, field) {
                    out.push(m);
                }
            }
        }
    }
    out.push(Mat3([[z, z, o], [z, field.neg(o), z], [o, z, z]]));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NegativeControlReport {
    pub q: u32,
    pub group_order: u128,
    pub elements_enumerated: usize,
    pub involutions: usize,
    pub involution_classes: Vec<usize>,
    pub triples_checked: usize,
    pub generating_triples: usize,
    pub max_subgroup_order: u128,
    /// subgroup order → number of checked triples generating it
    pub order_histogram: BTreeMap<u128, usize>,
}

fn closure(gens: &[Perm]) -> Vec<Perm> {
    let degree = gens[0].degree();
    let id = Perm::identity(degree);
    let mut seen: HashMap<Perm, usize> = HashMap::from([(id.clone(), 0)]);
    let mut elements = vec![id];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let h = elements[i].mul(g);
            if !seen.contains_key(&h) {
                seen.insert(h.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(h);
            }
        }
    }
    elements
}

/// Shows no triple of involutions generates PSU₃(3). The first involution is
/// fixed to one representative per conjugacy class; the other two range over
/// all involutions.
pub fn run_negative_control_q3() -> Result<NegativeControlReport> {
    let field = Field::new(3, 1)?;
    let form = HermitianForm::standard(&field);
    let action = IsotropicAction::new(&field, &form);
    let gens = su3_generators(&field)
        .iter()
        .map(|m| action.perm_of(&field, m))
        .collect::<Result<Vec<_>>>()?;
    let expected = psu3_order(3);
    let chain = StabChain::new(action.degree(), &gens);
    if chain.order() != expected {
        return Err(Error::Inconsistency(format!("generators give order {}, expected {expected}", chain.order())));
    }
    let elements = closure(&gens);
    if elements.len() as u128 != expected {
        return Err(Error::CountMismatch { found: elements.len() as u128, expected });
    }
    let involutions: Vec<Perm> = elements.iter().filter(|g| g.order() == 2).cloned().collect();
    let index: HashMap<&Perm, usize> = involutions.iter().enumerate().map(|(k, g)| (g, k)).collect();

    // conjugacy classes via orbits under conjugation by the generators
    let mut class_of = vec![usize::MAX; involutions.len()];
    let mut classes = Vec::new();
    for start in 0..involutions.len() {
        if class_of[start] != usize::MAX {
            continue;
        }
        let id = classes.len();
        class_of[start] = id;
        let mut size = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let c = g.inv().mul(&involutions[i]).mul(g);
                let j = index[&c];
                if class_of[j] == usize::MAX {
                    class_of[j] = id;
                    size += 1;
                    queue.push_back(j);
                }
            }
        }
        classes.push((start, size));
    }

    let n = involutions.len();
    let mut jobs = Vec::new();
    for &(rep, _) in &classes {
        for y in 0..n {
            for z in y..n {
                jobs.push((rep, y, z));
            }
        }
    }
    let orders: Vec<u128> = jobs
        .par_iter()
        .map(|&(x, y, z)| {
            let trip = [involutions[x].clone(), involutions[y].clone(), involutions[z].clone()];
            StabChain::new(action.degree(), &trip).order()
        })
        .collect();
    let mut histogram = BTreeMap::new();
    for &o in &orders {
        *histogram.entry(o).or_insert(0usize) += 1;
    }
    let generating = orders.iter().filter(|&&o| o == expected).count();
    let max_proper = orders.iter().copied().filter(|&o| o != expected).max().unwrap_or(1);
    Ok(NegativeControlReport {
        q: 3,
        group_order: expected,
        elements_enumerated: elements.len(),
        involutions: n,
        involution_classes: classes.iter().map(|&(_, s)| s).collect(),
        triples_checked: jobs.len(),
        generating_triples: generating,
        max_subgroup_order: max_proper,
        order_histogram: histogram,
    })
}
