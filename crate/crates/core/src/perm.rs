//! Permutations and stabilizer chains.
//!
//! Permutations act on the right: `x^(gh) = (x^g)^h`, so `g.mul(h)` applies
//! `g` first. The chain is built by sifting seeded product-replacement
//! elements and is then completed by the deterministic Schreier–Sims test
//! over every Schreier generator, so the reported order is unconditional.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    /// Panics unless `images` is a permutation of `0..images.len()`.
    pub fn from_images(images: Vec<u32>) -> Self {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            assert!(!std::mem::replace(&mut seen[x as usize], true), "not a permutation");
        }
        Perm(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    /// `self` then `other`.
    pub fn mul(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inv(&self) -> Perm {
        let mut out = vec![0u32; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            out[y as usize] = x as u32;
        }
        Perm(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.0.iter().enumerate().find(|&(x, &y)| x as u32 != y).map(|(x, _)| x as u32)
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.0.len()];
        let mut lcm = 1u64;
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            lcm = lcm / crate::gf::gcd(lcm, len) * len;
        }
        lcm
    }
}

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    /// indices into `StabChain::strong`
    gens: Vec<usize>,
    orbit: Vec<u32>,
    /// Schreier vector: tree edge that reached each orbit point (parent point, generator index)
    parent: Vec<Option<(u32, usize)>>,
    /// `inv_reps[δ]` is `u_δ⁻¹`, where `base^{u_δ} = δ`; absent when transversals are implicit
    inv_reps: Option<Vec<Option<Vec<u32>>>>,
}

impl Level {
    fn new(base: u32, degree: usize, explicit: bool) -> Self {
        let inv_reps = explicit.then(|| {
            let mut reps = vec![None; degree];
            reps[base as usize] = Some((0..degree as u32).collect());
            reps
        });
        let mut parent = vec![None; degree];
        parent[base as usize] = Some((base, usize::MAX));
        Level { base, gens: Vec::new(), orbit: vec![base], parent, inv_reps }
    }

    fn contains(&self, delta: u32) -> bool {
        self.parent[delta as usize].is_some()
    }

    fn extend_orbit(&mut self, strong: &[Perm], strong_inv: &[Perm]) {
        let mut k = 0;
        while k < self.orbit.len() {
            let beta = self.orbit[k];
            for &s in &self.gens {
                let gamma = strong[s].apply(beta);
                if self.contains(gamma) {
                    continue;
                }
                self.parent[gamma as usize] = Some((beta, s));
                self.orbit.push(gamma);
                if let Some(reps) = self.inv_reps.as_mut() {
                    let inv_beta = reps[beta as usize].as_ref().unwrap();
                    // u_γ = u_β s, so u_γ⁻¹ = s⁻¹ u_β⁻¹
                    let rep: Vec<u32> = strong_inv[s].images().iter().map(|&x| inv_beta[x as usize]).collect();
                    reps[gamma as usize] = Some(rep);
                }
            }
            k += 1;
        }
    }

    /// Replaces `g` by `g u_δ⁻¹`.
    fn apply_inv_rep(&self, g: &mut [u32], delta: u32, strong_inv: &[Perm]) {
        if let Some(reps) = &self.inv_reps {
            let inv = reps[delta as usize].as_ref().unwrap();
            for x in g.iter_mut() {
                *x = inv[*x as usize];
            }
            return;
        }
        let mut d = delta;
        while d != self.base {
            let (b, s) = self.parent[d as usize].unwrap();
            let inv = strong_inv[s].images();
            for x in g.iter_mut() {
                *x = inv[*x as usize];
            }
            d = b;
        }
    }

    fn forward_rep(&self, delta: u32, strong_inv: &[Perm]) -> Vec<u32> {
        let mut inv: Vec<u32> = (0..self.parent.len() as u32).collect();
        self.apply_inv_rep(&mut inv, delta, strong_inv);
        let mut out = vec![0u32; inv.len()];
        for (x, &y) in inv.iter().enumerate() {
            out[y as usize] = x as u32;
        }
        out
    }
}

/// Degrees above this keep transversals implicit by default.
pub const MAX_EXPLICIT_DEGREE: usize = 20000;

/// Base and strong generating set.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    strong: Vec<Perm>,
    strong_inv: Vec<Perm>,
    levels: Vec<Level>,
    explicit: bool,
    /// strong generators that came from the input generating set
    input: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct ChainOptions {
    /// Stop the random phase once this order is reached.
    pub target_order: Option<u128>,
    /// Stop the random phase after this many consecutive trivial sifts.
    pub patience: usize,
    pub seed: u64,
    /// Store every transversal element instead of tracing Schreier vectors.
    /// `None` chooses by degree.
    pub explicit_transversals: Option<bool>,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions { target_order: None, patience: 40, seed: 0x5eed, explicit_transversals: None }
    }
}

impl StabChain {
    pub fn new(degree: usize, gens: &[Perm]) -> Self {
        Self::with_options(degree, gens, ChainOptions::default())
    }

    pub fn with_options(degree: usize, gens: &[Perm], opts: ChainOptions) -> Self {
        let explicit = opts.explicit_transversals.unwrap_or(degree <= MAX_EXPLICIT_DEGREE);
        let mut chain = StabChain { degree, strong: Vec::new(), strong_inv: Vec::new(), levels: Vec::new(), explicit, input: Vec::new() };
        for g in gens {
            assert_eq!(g.degree(), degree, "generator degree mismatch");
            if g.is_identity() || chain.strong.contains(g) {
                continue;
            }
            let drop = chain
                .levels
                .iter()
                .position(|l| g.apply(l.base) != l.base)
                .unwrap_or(chain.levels.len());
            chain.input.push(chain.strong.len());
            chain.add_strong(g.clone(), drop);
        }
        if chain.strong.is_empty() {
            return chain;
        }
        chain.random_phase(gens, opts);
        chain.verify();
        chain
    }

    fn add_strong(&mut self, h: Perm, drop: usize) {
        // `h` fixes every base point before `drop`
        if drop == self.levels.len() {
            let b = h.first_moved().expect("residue is not the identity");
            self.levels.push(Level::new(b, self.degree, self.explicit));
        }
        let idx = self.strong.len();
        self.strong_inv.push(h.inv());
        self.strong.push(h);
        for level in self.levels.iter_mut().take(drop + 1) {
            level.gens.push(idx);
            level.extend_orbit(&self.strong, &self.strong_inv);
        }
    }

    /// Sifts `g` starting at `from`; returns the residue and the level where it stopped.
    fn sift(&self, mut g: Vec<u32>, from: usize) -> (Vec<u32>, usize) {
        for (k, level) in self.levels.iter().enumerate().skip(from) {
            let delta = g[level.base as usize];
            if !level.contains(delta) {
                return (g, k);
            }
            level.apply_inv_rep(&mut g, delta, &self.strong_inv);
        }
        let n = self.levels.len();
        (g, n)
    }

    fn random_phase(&mut self, gens: &[Perm], opts: ChainOptions) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let gens: Vec<&Perm> = gens.iter().filter(|g| !g.is_identity()).collect();
        let mut pool: Vec<Perm> = (0..gens.len().max(10)).map(|k| gens[k % gens.len()].clone()).collect();
        let mut acc = Perm::identity(self.degree);
        let step = |rng: &mut ChaCha8Rng, pool: &mut Vec<Perm>, acc: &mut Perm| {
            let s = rng.gen_range(0..pool.len());
            let mut t = rng.gen_range(0..pool.len() - 1);
            if t >= s {
                t += 1;
            }
            let other = if rng.gen_bool(0.5) { pool[t].clone() } else { pool[t].inv() };
            pool[s] = if rng.gen_bool(0.5) { pool[s].mul(&other) } else { other.mul(&pool[s]) };
            *acc = acc.mul(&pool[s]);
        };
        for _ in 0..50 {
            step(&mut rng, &mut pool, &mut acc);
        }
        let mut quiet = 0;
        while quiet < opts.patience {
            if let Some(target) = opts.target_order {
                if self.order() >= target {
                    break;
                }
            }
            step(&mut rng, &mut pool, &mut acc);
            let (h, j) = self.sift(acc.images().to_vec(), 0);
            if is_identity(&h) {
                quiet += 1;
            } else {
                quiet = 0;
                self.add_strong(Perm(h), j);
            }
        }
    }

    /// Deterministic completion: every Schreier generator of every level
    /// sifts to the identity through the levels below it.
    fn verify(&mut self) {
        let mut checked: Vec<HashSet<(u32, usize)>> = Vec::new();
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let li = i as usize;
            checked.resize_with(self.levels.len(), HashSet::new);
            let mut found = None;
            let orbit = self.levels[li].orbit.clone();
            // the input generators already generate the whole group (Schreier's lemma)
            let gens = if li == 0 { self.input.clone() } else { self.levels[li].gens.clone() };
            'scan: for &beta in &orbit {
                let mut u_beta: Option<Vec<u32>> = None;
                for &s in &gens {
                    if checked[li].contains(&(beta, s)) {
                        continue;
                    }
                    checked[li].insert((beta, s));
                    let gamma = self.strong[s].apply(beta);
                    if self.levels[li].parent[gamma as usize] == Some((beta, s)) {
                        continue;
                    }
                    let level = &self.levels[li];
                    let u = u_beta.get_or_insert_with(|| level.forward_rep(beta, &self.strong_inv));
                    let sg = &self.strong[s];
                    let mut schreier: Vec<u32> = u.iter().map(|&x| sg.apply(x)).collect();
                    level.apply_inv_rep(&mut schreier, gamma, &self.strong_inv);
                    let (h, j) = self.sift(schreier, li + 1);
                    if !is_identity(&h) {
                        found = Some((Perm(h), j));
                        break 'scan;
                    }
                }
            }
            match found {
                Some((h, j)) => {
                    self.add_strong(h, j);
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && is_identity(&self.sift(g.images().to_vec(), 0).0)
    }

    /// Orbit of the first base point (the group's orbit containing it).
    pub fn base_orbit(&self) -> &[u32] {
        self.levels.first().map(|l| l.orbit.as_slice()).unwrap_or(&[])
    }
}

fn is_identity(g: &[u32]) -> bool {
    g.iter().enumerate().all(|(x, &y)| x as u32 == y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Perm {
        Perm::from_images((0..n as u32).map(|x| (x + 1) % n as u32).collect())
    }

    fn transposition(n: usize, a: u32, b: u32) -> Perm {
        let mut img: Vec<u32> = (0..n as u32).collect();
        img.swap(a as usize, b as usize);
        Perm::from_images(img)
    }

    #[test]
    fn symmetric_groups() {
        for n in 2..=8usize {
            let chain = StabChain::new(n, &[cycle(n), transposition(n, 0, 1)]);
            let fact: u128 = (1..=n as u128).product();
            assert_eq!(chain.order(), fact, "S_{n}");
        }
    }

    #[test]
    fn alternating_group() {
        // 3-cycles (0 1 2) and (0 1 2 3 4) generate A5
        let c3 = Perm::from_images(vec![1, 2, 0, 3, 4]);
        let c5 = cycle(5);
        assert_eq!(StabChain::new(5, &[c3, c5]).order(), 60);
    }

    #[test]
    fn trivial_and_cyclic() {
        assert_eq!(StabChain::new(4, &[Perm::identity(4)]).order(), 1);
        assert_eq!(StabChain::new(7, &[cycle(7)]).order(), 7);
    }

    #[test]
    fn orbit_product_equals_order() {
        // dihedral group of order 12 on a hexagon
        let r = cycle(6);
        let s = Perm::from_images(vec![0, 5, 4, 3, 2, 1]);
        let chain = StabChain::new(6, &[r.clone(), s.clone()]);
        assert_eq!(chain.order(), 12);
        assert_eq!(chain.orbit_lengths().iter().map(|&l| l as u128).product::<u128>(), 12);
        assert!(chain.contains(&r.mul(&s)));
        assert!(!chain.contains(&transposition(6, 0, 1)));
    }

    #[test]
    fn perm_algebra() {
        let g = cycle(5);
        assert!(g.mul(&g.inv()).is_identity());
        assert_eq!(g.order(), 5);
        assert_eq!(transposition(5, 1, 3).first_moved(), Some(1));
        assert_eq!(Perm::identity(3).first_moved(), None);
    }

    #[test]
    fn target_order_does_not_change_result() {
        let gens = [cycle(7), transposition(7, 0, 1)];
        let opts = ChainOptions { target_order: Some(5040), ..Default::default() };
        assert_eq!(StabChain::with_options(7, &gens, opts).order(), 5040);
        // a wrong target only affects when the random phase stops
        let opts = ChainOptions { target_order: Some(1 << 40), ..Default::default() };
        assert_eq!(StabChain::with_options(7, &gens, opts).order(), 5040);
    }

    #[test]
    fn implicit_transversals_agree() {
        let gens = [cycle(9), transposition(9, 0, 1)];
        let c3 = Perm::from_images(vec![1, 2, 0, 3, 4, 5, 6, 7, 8]);
        for explicit in [true, false] {
            let opts = ChainOptions { explicit_transversals: Some(explicit), ..Default::default() };
            assert_eq!(StabChain::with_options(9, &gens, opts).order(), 362880);
            let alt = StabChain::with_options(9, &[c3.clone(), cycle(9)], opts);
            assert_eq!(alt.order(), 181440);
            assert!(alt.contains(&c3.mul(&cycle(9))));
            assert!(!alt.contains(&transposition(9, 2, 5)));
        }
    }
}
