//! Seeded random inputs for property tests and the acceptance checks.
//!
//! Complexes are built in a split form (cycles `h` plus pairs `x → y`) and
//! then conjugated by a random degree-preserving change of basis, so chain
//! maps can be written down in the split form and transported.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{homotopy_family, sphere_family, FamilyError, MonodromyData};
use crate::spectral::FilteredComplex;
use crate::z2::{GHTable, Generator, GradedComplex, Z2Matrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Cycle,
    Source(usize),
    Target(usize),
}

/// A complex together with the split form it was built from.
#[derive(Clone, Debug)]
pub struct ChainModel {
    pub complex: GradedComplex,
    kinds: Vec<Kind>,
    degrees: Vec<i64>,
    basis: Z2Matrix,
    inverse: Z2Matrix,
}

fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, p: f64) -> Z2Matrix {
    let mut m = Z2Matrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if rng.gen_bool(p) {
                m.set(r, c, true);
            }
        }
    }
    m
}

fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Z2Matrix {
    loop {
        let m = random_matrix(rng, n, n, 0.5);
        if m.is_invertible() {
            return m;
        }
    }
}

impl ChainModel {
    /// Random complex with at most `max_gens` generators in degrees
    /// `lo..=hi`, plus one extra cycle in each degree of `extra_cycles`.
    pub fn random<R: Rng>(rng: &mut R, max_gens: usize, lo: i64, hi: i64, extra_cycles: &[i64]) -> Self {
        assert!(lo < hi);
        let mut kinds = Vec::new();
        let mut degrees = Vec::new();
        let pairs = rng.gen_range(0..=max_gens / 2);
        let cycles = rng.gen_range(0..=max_gens - 2 * pairs);
        for _ in 0..cycles {
            kinds.push(Kind::Cycle);
            degrees.push(rng.gen_range(lo..=hi));
        }
        for &k in extra_cycles {
            kinds.push(Kind::Cycle);
            degrees.push(k);
        }
        for p in 0..pairs {
            let k = rng.gen_range(lo + 1..=hi);
            kinds.push(Kind::Source(p));
            degrees.push(k);
            kinds.push(Kind::Target(p));
            degrees.push(k - 1);
        }
        let n = kinds.len();
        let target_of = |p: usize| kinds.iter().position(|&k| k == Kind::Target(p)).unwrap();
        let d_std = Z2Matrix::from_entries(
            n,
            n,
            kinds.iter().enumerate().filter_map(|(i, k)| match k {
                Kind::Source(p) => Some((target_of(*p), i)),
                _ => None,
            }),
        );
        let mut basis = Z2Matrix::zeros(n, n);
        let mut distinct: Vec<i64> = degrees.clone();
        distinct.sort_unstable();
        distinct.dedup();
        for &k in &distinct {
            let idx: Vec<usize> = (0..n).filter(|&i| degrees[i] == k).collect();
            let b = random_invertible(rng, idx.len());
            for (r, c) in b.entries() {
                basis.set(idx[r], idx[c], true);
            }
        }
        let inverse = basis.inverse().expect("blockwise invertible");
        let d = basis.mul(&d_std).mul(&inverse);
        let gens = degrees
            .iter()
            .enumerate()
            .map(|(i, &degree)| Generator {
                id: format!("g{i}"),
                degree,
            })
            .collect();
        let complex = GradedComplex::from_matrix(gens, d).expect("basis change keeps degrees");
        Self {
            complex,
            kinds,
            degrees,
            basis,
            inverse,
        }
    }

    fn len(&self) -> usize {
        self.kinds.len()
    }

    fn transport(&self, f_std: &Z2Matrix) -> Z2Matrix {
        self.basis.mul(f_std).mul(&self.inverse)
    }

    /// Random chain map raising degree by `shift`; invertible when
    /// `invertible` is set (then `shift` must be 0).
    pub fn chain_map<R: Rng>(&self, rng: &mut R, shift: i64, invertible: bool) -> Z2Matrix {
        assert!(!invertible || shift == 0);
        let n = self.len();
        let mut f = Z2Matrix::zeros(n, n);
        let cycles: Vec<usize> = (0..n).filter(|&i| self.kinds[i] == Kind::Cycle).collect();
        let sources: Vec<usize> = (0..n).filter(|&i| matches!(self.kinds[i], Kind::Source(_))).collect();
        let targets: Vec<usize> = (0..n).filter(|&i| matches!(self.kinds[i], Kind::Target(_))).collect();
        let partner = |i: usize| match self.kinds[i] {
            Kind::Source(p) => self.kinds.iter().position(|&k| k == Kind::Target(p)).unwrap(),
            _ => unreachable!(),
        };
        // Same map on the sources and on their targets; the cycles and the
        // sources each get a square block per degree.
        for group in [&cycles, &sources] {
            let mut distinct: Vec<i64> = group.iter().map(|&i| self.degrees[i]).collect();
            distinct.sort_unstable();
            distinct.dedup();
            for &k in &distinct {
                let cols: Vec<usize> = group.iter().copied().filter(|&i| self.degrees[i] == k).collect();
                let rows: Vec<usize> = group.iter().copied().filter(|&i| self.degrees[i] == k + shift).collect();
                let block = if invertible {
                    random_invertible(rng, cols.len())
                } else {
                    random_matrix(rng, rows.len(), cols.len(), 0.5)
                };
                for (r, c) in block.entries() {
                    f.set(rows[r], cols[c], true);
                    if self.kinds[cols[c]] != Kind::Cycle {
                        f.set(partner(rows[r]), partner(cols[c]), true);
                    }
                }
            }
        }
        // Cycles may also hit targets, and sources may hit cycles or targets;
        // none of these terms changes d∘f or f∘d. The result stays block
        // triangular, so invertibility is kept.
        let extra = cycles
            .iter()
            .flat_map(|&c| targets.iter().map(move |&r| (r, c)))
            .chain(sources.iter().flat_map(|&c| cycles.iter().chain(&targets).map(move |&r| (r, c))));
        for (r, c) in extra {
            if self.degrees[r] == self.degrees[c] + shift && rng.gen_bool(0.3) {
                f.toggle(r, c);
            }
        }
        self.transport(&f)
    }

    /// Arbitrary (not necessarily chain) map raising degree by `shift`.
    pub fn graded_map<R: Rng>(&self, rng: &mut R, shift: i64) -> Z2Matrix {
        let n = self.len();
        let mut m = random_matrix(rng, n, n, 0.4);
        for (r, c) in m.clone().entries() {
            if self.degrees[r] != self.degrees[c] + shift {
                m.set(r, c, false);
            }
        }
        m
    }
}

/// `dK + Kd`.
fn boundary_of(fiber: &GradedComplex, k: &Z2Matrix) -> Z2Matrix {
    let d = fiber.differential();
    d.mul(k).add(&k.mul(d))
}

/// Random admissible family over `S^m`: a chain automorphism for `m = 1`, a
/// chain map of degree `m − 1` otherwise.
pub fn sphere_fixture<R: Rng>(rng: &mut R, m: usize) -> (ChainModel, FilteredComplex) {
    let model = ChainModel::random(rng, 8, -2, 3, &[]);
    let f = model.chain_map(rng, m as i64 - 1, m == 1);
    let data = MonodromyData::from_matrix(&model.complex, &f, m as i64 - 1);
    let fc = sphere_family(&model.complex, m, &data).expect("fixture data is admissible");
    (model, fc)
}

/// Two sphere families and a family over `[−1, 1] × S^m` between them.
#[derive(Clone, Debug)]
pub struct HomotopyFixture {
    pub m: usize,
    pub f0: FilteredComplex,
    pub f1: FilteredComplex,
    pub htpy: FilteredComplex,
}

fn homotopic_pair<R: Rng>(rng: &mut R, model: &ChainModel, m: usize) -> (Z2Matrix, Z2Matrix, Z2Matrix) {
    let shift = m as i64 - 1;
    let fiber = &model.complex;
    let f0 = model.chain_map(rng, shift, m == 1);
    for _ in 0..64 {
        let k = model.graded_map(rng, m as i64);
        let f1 = f0.add(&boundary_of(fiber, &k));
        if m > 1 || degreewise_invertible(fiber, &f1) {
            return (f0, f1, k);
        }
    }
    let n = fiber.len();
    (f0.clone(), f0, Z2Matrix::zeros(n, n))
}

fn degreewise_invertible(fiber: &GradedComplex, f: &Z2Matrix) -> bool {
    fiber.degrees().into_iter().all(|k| {
        let idx = fiber.in_degree(k);
        f.submatrix(&idx, &idx).is_invertible()
    })
}

fn assemble(model: &ChainModel, m: usize, f0: &Z2Matrix, f1: &Z2Matrix, h: &Z2Matrix) -> HomotopyFixture {
    let shift = m as i64 - 1;
    let fiber = &model.complex;
    let fam = |f: &Z2Matrix| {
        sphere_family(fiber, m, &MonodromyData::from_matrix(fiber, f, shift)).expect("admissible fixture")
    };
    let (f0, f1) = (fam(f0), fam(f1));
    let htpy = homotopy_family(&f0, &f1, h, None).expect("fixture homotopy has the right shape");
    HomotopyFixture { m, f0, f1, htpy }
}

/// `ψ_1 = ψ_0 + dK + Kd`, joined by `H = K`.
pub fn homotopy_fixture<R: Rng>(rng: &mut R, m: usize) -> HomotopyFixture {
    let model = ChainModel::random(rng, 8, -2, 3, &[]);
    let (f0, f1, k) = homotopic_pair(rng, &model, m);
    assemble(&model, m, &f0, &f1, &k)
}

/// Like [`homotopy_fixture`] but with `H` or `ψ_1` altered so that
/// `ψ_0 + ψ_1 ≠ dH + Hd`.
pub fn corrupted_homotopy_fixture<R: Rng>(rng: &mut R, m: usize) -> HomotopyFixture {
    let shift = m as i64 - 1;
    // Two extra cycles in one degree and one more `m − 1` above it leave room
    // for a nonzero change of ψ_1.
    let k0 = rng.gen_range(-1..=1);
    let model = ChainModel::random(rng, 8, -2, 3, &[k0, k0, k0 + shift]);
    let fiber = &model.complex;
    let (f0, f1, mut k) = homotopic_pair(rng, &model, m);
    if rng.gen_bool(0.5) {
        let n = fiber.len();
        let mut cells: Vec<(usize, usize)> = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|&(r, c)| fiber.degree_of(r) == fiber.degree_of(c) + m as i64)
            .collect();
        cells.shuffle(rng);
        for (r, c) in cells {
            let delta = Z2Matrix::from_entries(n, n, [(r, c)]);
            if !boundary_of(fiber, &delta).is_zero() {
                k.toggle(r, c);
                return assemble(&model, m, &f0, &f1, &k);
            }
        }
    }
    let f1 = loop {
        let other = if m == 1 {
            f1.mul(&model.chain_map(rng, 0, true))
        } else {
            f1.add(&model.chain_map(rng, shift, false))
        };
        if other != f1 {
            break other;
        }
    };
    assemble(&model, m, &f0, &f1, &k)
}

/// Random table with degrees in `-4..=4` and ranks up to 3.
pub fn random_table<R: Rng>(rng: &mut R) -> GHTable {
    let mut t = GHTable::new();
    for k in -4..=4 {
        if rng.gen_bool(0.6) {
            t.add(k, rng.gen_range(0..=3));
        }
    }
    t
}

/// Zero-differential complex with the given ranks; ids `h{degree}_{i}`.
pub fn free_complex(t: &GHTable) -> GradedComplex {
    let gens = t
        .iter()
        .flat_map(|(k, r)| {
            (0..r).map(move |i| Generator {
                id: format!("h{k}_{i}"),
                degree: k,
            })
        })
        .collect();
    GradedComplex::free(gens).expect("ids are distinct")
}

/// `d∘d = 0` on all three families of a fixture.
pub fn check_fixture(f: &HomotopyFixture) -> Result<(), FamilyError> {
    for fc in [&f.f0, &f.f1, &f.htpy] {
        if let Some(w) = fc.total().verify_d_squared().witness {
            return Err(FamilyError::Malformed(format!("d∘d ≠ 0 at {w}")));
        }
    }
    Ok(())
}
