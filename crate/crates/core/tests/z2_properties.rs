mod common;

use gfh_core::families::fixtures::{self, ChainModel};
use gfh_core::z2::{GHTable, GradedComplex, Z2Matrix};
use proptest::prelude::*;

fn bools(m: &Z2Matrix) -> Vec<Vec<bool>> {
    m.to_dense().into_iter().map(|r| r.into_iter().map(|x| x == 1).collect()).collect()
}

fn oracle(c: &GradedComplex) -> GHTable {
    let degrees: Vec<i64> = c.generators().iter().map(|g| g.degree).collect();
    GHTable::from_pairs(common::homology(&degrees, &bools(c.differential())))
}

fn model(seed: u64) -> GradedComplex {
    ChainModel::random(&mut fixtures::rng(seed), 12, -3, 4, &[]).complex
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_matches_dense_elimination(rows in 1usize..20, cols in 1usize..20, seed in any::<u64>()) {
        use rand::Rng;
        let mut r = fixtures::rng(seed);
        let p: f64 = r.gen_range(0.05..0.6);
        let entries: Vec<(usize, usize)> = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .filter(|_| r.gen_bool(p))
            .collect();
        let m = Z2Matrix::from_entries(rows, cols, entries);
        prop_assert_eq!(m.rank(), common::rank(&bools(&m)));
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn homology_matches_oracle(seed in any::<u64>()) {
        let c = model(seed);
        prop_assert!(c.verify_d_squared().ok);
        let h = c.homology().unwrap();
        prop_assert_eq!(&h, &oracle(&c));
        prop_assert!(h.total_rank() <= c.len());
        prop_assert_eq!(h.total_rank() == c.len(), c.differential().is_zero());
        prop_assert_eq!(h.euler_characteristic(), c.chain_ranks().euler_characteristic());
    }

    #[test]
    fn direct_sums_add(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (model(s1), model(s2).shifted(0, "b"));
        let sum = a.direct_sum(&b).unwrap();
        prop_assert_eq!(sum.homology().unwrap(), a.homology().unwrap().direct_sum(&b.homology().unwrap()));
    }

    #[test]
    fn tensor_products_obey_kunneth(s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = ChainModel::random(&mut fixtures::rng(s1), 6, -2, 2, &[]).complex;
        let b = ChainModel::random(&mut fixtures::rng(s2), 6, -2, 2, &[]).complex;
        let t = a.tensor(&b);
        prop_assert!(t.verify_d_squared().ok);
        let (ha, hb) = (oracle(&a), oracle(&b));
        let mut expected = GHTable::new();
        for (i, x) in ha.iter() {
            for (j, y) in hb.iter() {
                expected.add(i + j, x * y);
            }
        }
        prop_assert_eq!(t.homology().unwrap(), expected);
    }

    #[test]
    fn homology_basis_is_a_basis(seed in any::<u64>()) {
        let c = model(seed);
        let basis = c.homology_basis().unwrap();
        let d = c.differential();
        for k in basis.degrees() {
            for i in 0..basis.rank(k) {
                let v = basis.representative_global(k, i);
                prop_assert!(d.apply(&v).is_zero());
                let mut e = gfh_core::Z2Vec::zeros(basis.rank(k));
                e.set(i, true);
                prop_assert_eq!(basis.coordinates_global(k, &v), Some(e));
            }
        }
        // The identity induces the identity; a boundary has coordinates zero.
        let id = basis.induced_map(&basis, &Z2Matrix::identity(c.len()), 0).unwrap();
        for (k, b) in id {
            prop_assert_eq!(b, Z2Matrix::identity(basis.rank(k)));
        }
        for col in 0..c.len() {
            let image = d.column_vec(col);
            if image.is_zero() {
                continue;
            }
            let k = c.degree_of(col) - 1;
            let coords = basis.coordinates_global(k, &image);
            prop_assert!(coords.is_none_or(|v| v.is_zero()));
        }
    }

    #[test]
    fn doc_round_trip(seed in any::<u64>()) {
        let c = model(seed);
        let json = serde_json::to_string(&c.to_doc()).unwrap();
        let back = GradedComplex::from_doc(&serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}
