mod common;

use std::collections::BTreeMap;

use gfh_core::families::fixtures::{self, ChainModel};
use gfh_core::families::{
    certificate, compose, cover_pullback, dumbbell, factor_check, kunneth, product_family, psi,
    sphere_family, spin_family, spin_gh, twist_spin, validate_spin_blocks, verify_homotopy,
    MonodromyData, PsiMap,
};
use gfh_core::spectral::{collapse_check, convergence_check, pages, total_homology, FilteredComplex};
use gfh_core::z2::{GHTable, Generator, GradedComplex, Z2Matrix};
use proptest::prelude::*;
use rand::Rng;

fn bools(m: &Z2Matrix) -> Vec<Vec<bool>> {
    m.to_dense().into_iter().map(|r| r.into_iter().map(|x| x == 1).collect()).collect()
}

fn table(m: BTreeMap<i64, usize>) -> GHTable {
    GHTable::from_pairs(m)
}

fn oracle_total(fc: &FilteredComplex) -> GHTable {
    let degrees: Vec<i64> = fc.generators().iter().map(|g| g.total_degree()).collect();
    table(common::homology(&degrees, &bools(&fc.total_differential())))
}

fn family(model: &ChainModel, m: usize, f: &Z2Matrix) -> FilteredComplex {
    let data = MonodromyData::from_matrix(&model.complex, f, m as i64 - 1);
    sphere_family(&model.complex, m, &data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn loops_compose(seed in any::<u64>()) {
        let mut r = fixtures::rng(seed);
        let model = ChainModel::random(&mut r, 9, -2, 3, &[]);
        let a = model.chain_map(&mut r, 0, true);
        let b = model.chain_map(&mut r, 0, true);
        let pa = psi(&family(&model, 1, &a)).unwrap();
        let pb = psi(&family(&model, 1, &b)).unwrap();
        let pab = psi(&family(&model, 1, &a.mul(&b))).unwrap();
        prop_assert_eq!(compose(&pa, &pb).unwrap(), pab);
    }

    #[test]
    fn spheres_add(seed in any::<u64>(), m in 2usize..5) {
        let mut r = fixtures::rng(seed);
        let model = ChainModel::random(&mut r, 9, -2, 3, &[]);
        let a = model.chain_map(&mut r, m as i64 - 1, false);
        let b = model.chain_map(&mut r, m as i64 - 1, false);
        let pa = psi(&family(&model, m, &a)).unwrap();
        let pb = psi(&family(&model, m, &b)).unwrap();
        let pab = psi(&family(&model, m, &a.add(&b))).unwrap();
        prop_assert_eq!(compose(&pa, &pb).unwrap(), pab);
    }

    #[test]
    fn sphere_families_are_complexes_and_converge(seed in any::<u64>(), m in 1usize..4) {
        let mut r = fixtures::rng(seed);
        let (_, fc) = fixtures::sphere_fixture(&mut r, m);
        prop_assert!(fc.total().verify_d_squared().ok);
        let t = total_homology(&fc).unwrap();
        prop_assert_eq!(&t, &oracle_total(&fc));
        let sp = pages(&fc, m + 1).unwrap();
        prop_assert!(convergence_check(&sp, &t).ok);
    }

    #[test]
    fn local_system_on_the_circle(seed in any::<u64>()) {
        // Free fiber, so Ψ on homology is μ itself.
        let mut r = fixtures::rng(seed);
        let t = fixtures::random_table(&mut r);
        let fiber = fixtures::free_complex(&t);
        let mut blocks = BTreeMap::new();
        for (k, n) in t.iter() {
            let mu = loop {
                let mut m = Z2Matrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        if r.gen_bool(0.5) { m.set(i, j, true); }
                    }
                }
                if m.is_invertible() { break m; }
            };
            blocks.insert(k, mu);
        }
        let fc = sphere_family(&fiber, 1, &MonodromyData { degrees: blocks.clone() }).unwrap();
        let e2 = pages(&fc, 2).unwrap();
        let e2 = e2.page(2).unwrap();
        for (k, n) in t.iter() {
            let one_plus = bools(&blocks[&k].add(&Z2Matrix::identity(n)));
            let rk = common::rank(&one_plus);
            prop_assert_eq!(e2.rank(0, k), n - rk, "coker in degree {}", k);
            prop_assert_eq!(e2.rank(1, k), n - rk, "ker in degree {}", k);
        }
    }

    #[test]
    fn kunneth_matches_tensor_oracle(seed in any::<u64>(), which in 0usize..3) {
        let mut r = fixtures::rng(seed);
        let model = ChainModel::random(&mut r, 8, -2, 3, &[]);
        let fiber = &model.complex;
        let betti: &[usize] = [&[1, 1][..], &[1, 0, 1][..], &[1, 2, 1][..]][which];
        // Base with zero Morse differential and the given Betti numbers.
        let base_degrees: Vec<i64> = betti.iter().enumerate().flat_map(|(k, &b)| std::iter::repeat_n(k as i64, b)).collect();
        let fd = bools(fiber.differential());
        let nf = fiber.len();
        let mut degs = Vec::new();
        let mut d = vec![vec![false; nf * base_degrees.len()]; nf * base_degrees.len()];
        for (p, &bp) in base_degrees.iter().enumerate() {
            for x in 0..nf {
                degs.push(bp + fiber.degree_of(x));
                for y in 0..nf {
                    d[p * nf + y][p * nf + x] = fd[y][x];
                }
            }
        }
        let oracle = table(common::homology(&degs, &d));
        let fiber_gh = table(common::homology(
            &(0..nf).map(|i| fiber.degree_of(i)).collect::<Vec<_>>(),
            &fd,
        ));
        prop_assert_eq!(kunneth(&fiber_gh, betti), oracle.clone());
        let base = GradedComplex::free(
            base_degrees.iter().enumerate().map(|(i, &degree)| Generator { id: format!("p{i}"), degree }).collect(),
        ).unwrap();
        let fc = product_family(fiber, &base).unwrap();
        let sp = pages(&fc, 3).unwrap();
        prop_assert!(collapse_check(&sp));
        prop_assert_eq!(sp.e_infinity_total(), oracle);
    }

    #[test]
    fn spin_orders_commute(seed in any::<u64>(), m1 in 1usize..4, m2 in 1usize..4) {
        let t = fixtures::random_table(&mut fixtures::rng(seed));
        prop_assert_eq!(spin_gh(&spin_gh(&t, m1), m2), spin_gh(&spin_gh(&t, m2), m1));
        prop_assert_eq!(spin_gh(&t, m1).total_rank(), 2 * t.total_rank());
    }

    #[test]
    fn twist_by_identity_is_plain_spin(seed in any::<u64>()) {
        let t = fixtures::random_table(&mut fixtures::rng(seed));
        let fiber = fixtures::free_complex(&t);
        let fc = sphere_family(&fiber, 1, &MonodromyData::identity()).unwrap();
        let p = psi(&fc).unwrap();
        prop_assert!(p.is_identity());
        prop_assert_eq!(twist_spin(&fiber, &p, 1).unwrap(), spin_gh(&t, 1));
    }

    #[test]
    fn spun_families_factor(seed in any::<u64>()) {
        let mut r = fixtures::rng(seed);
        let (_, fc) = fixtures::sphere_fixture(&mut r, 1);
        let spun = spin_family(&fc).unwrap();
        prop_assert!(spun.total().verify_d_squared().ok);
        prop_assert!(validate_spin_blocks(&spun).ok);
        prop_assert!(factor_check(&fc, &spun).unwrap().ok);
        // Spinning a family doubles its trace with a shift by one.
        let t = total_homology(&fc).unwrap();
        prop_assert_eq!(total_homology(&spun).unwrap(), spin_gh(&t, 1));
    }

    #[test]
    fn homotopy_fixtures(seed in any::<u64>(), m in 1usize..4) {
        let mut r = fixtures::rng(seed);
        let good = fixtures::homotopy_fixture(&mut r, m);
        prop_assert!(verify_homotopy(&good.f0, &good.f1, &good.htpy).unwrap().ok);
        // Homotopic families have the same Ψ.
        prop_assert_eq!(psi(&good.f0).unwrap(), psi(&good.f1).unwrap());
        let bad = fixtures::corrupted_homotopy_fixture(&mut r, m);
        prop_assert!(!verify_homotopy(&bad.f0, &bad.f1, &bad.htpy).unwrap().ok);
    }
}

#[test]
fn dumbbell_e2_at_degree_four() {
    let d = dumbbell(2, 4, 2).unwrap();
    let fc = sphere_family(&d.complex, 1, &d.monodromy).unwrap();
    let sp = pages(&fc, 3).unwrap();
    let e2 = sp.page(2).unwrap();
    assert_eq!((e2.rank(0, 4), e2.rank(1, 4)), (1, 1));
    assert_eq!((e2.rank(0, 2), e2.rank(1, 2)), (1, 1));
    assert!(collapse_check(&sp));
    assert_eq!(total_homology(&fc).unwrap(), oracle_total(&fc));
}

#[test]
fn twist_spin_against_elimination() {
    // The two-column complex on the swap block: a_i in degree 5 maps to
    // (1 + μ) b_i in degree 4, eliminated by hand.
    let d = dumbbell(2, 4, 2).unwrap();
    let p = psi(&sphere_family(&d.complex, 1, &d.monodromy).unwrap()).unwrap();
    let one_plus_swap = vec![vec![true, true], vec![true, true]];
    let rk = common::rank(&one_plus_swap);
    let twisted = twist_spin(&d.complex, &p, 1).unwrap();
    assert_eq!((twisted.rank(4), twisted.rank(5)), (2 - rk, 2 - rk));
    assert_eq!((twisted.rank(4), twisted.rank(5)), (1, 1));
    let plain = spin_gh(&d.gh, 1);
    assert_eq!((plain.rank(4), plain.rank(5)), (2, 2));
}

#[test]
fn six_fold_model() {
    let d = dumbbell(2, 4, 6).unwrap();
    let fc = sphere_family(&d.complex, 1, &d.monodromy).unwrap();
    let c = certificate(&psi(&fc).unwrap());
    assert!(c.nontrivial);
    assert_eq!(c.order_lower_bound, 6);
    for (k, order) in [(2, 3), (3, 2), (6, 1)] {
        let c = certificate(&psi(&cover_pullback(&fc, k).unwrap()).unwrap());
        assert_eq!(c.order_lower_bound, order, "cover of degree {k}");
    }
}

#[test]
fn reparametrized_dumbbell_loop() {
    // Dumbbell plus an acyclic pair u → v. A reparametrized loop changes the
    // chain-level monodromy by dK + Kd, with K: beta_L ↦ u.
    let d = dumbbell(2, 4, 2).unwrap();
    let mut doc = d.complex.to_doc();
    doc.generators.push(Generator { id: "u".into(), degree: 5 });
    doc.generators.push(Generator { id: "v".into(), degree: 4 });
    doc.differential.insert("u".into(), vec!["v".into()]);
    let fiber = GradedComplex::from_doc(&doc).unwrap();
    let idx = |id: &str| fiber.index_of(id).unwrap();
    let n = fiber.len();
    let mut mu = Z2Matrix::identity(n);
    for (a, b) in [("beta_L", "beta_R"), ("betabar_L", "betabar_R")] {
        let (i, j) = (idx(a), idx(b));
        mu.set(i, i, false);
        mu.set(j, j, false);
        mu.set(i, j, true);
        mu.set(j, i, true);
    }
    let mut k = Z2Matrix::zeros(n, n);
    k.set(idx("u"), idx("beta_L"), true);
    let dd = fiber.differential();
    let mu1 = mu.add(&dd.mul(&k)).add(&k.mul(dd));
    assert_ne!(mu1, mu);
    let fam = |m: &Z2Matrix| sphere_family(&fiber, 1, &MonodromyData::from_matrix(&fiber, m, 0)).unwrap();
    let (f0, f1) = (fam(&mu), fam(&mu1));
    let htpy = gfh_core::families::homotopy_family(&f0, &f1, &k, None).unwrap();
    assert!(verify_homotopy(&f0, &f1, &htpy).unwrap().ok);
    assert_eq!(psi(&f0).unwrap(), psi(&f1).unwrap());
    let lazy = gfh_core::families::homotopy_family(&f0, &f1, &Z2Matrix::zeros(n, n), None).unwrap();
    assert!(!verify_homotopy(&f0, &f1, &lazy).unwrap().ok);
}

#[test]
fn psi_map_round_trips_through_json() {
    let mut r = fixtures::rng(9);
    for m in 1..4 {
        let (_, fc) = fixtures::sphere_fixture(&mut r, m);
        let p = psi(&fc).unwrap();
        let back: PsiMap = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let doc = serde_json::to_string(&fc.to_doc()).unwrap();
        let again = FilteredComplex::from_doc(&serde_json::from_str(&doc).unwrap()).unwrap();
        assert_eq!(psi(&again).unwrap(), p);
    }
}
