use std::collections::BTreeMap;

use gfh_core::families::fixtures;
use gfh_core::families::BaseDescriptor;
use gfh_core::spectral::{
    collapse_check, convergence_check, pages, total_homology, FilteredComplex, FilteredGenerator,
    SpectralPages,
};
use gfh_core::z2::GHTable;
use proptest::prelude::*;

fn euler(t: &GHTable) -> i64 {
    t.euler_characteristic()
}

fn check_pages(fc: &FilteredComplex, sp: &SpectralPages) -> Result<(), TestCaseError> {
    let total = total_homology(fc).unwrap();
    prop_assert!(convergence_check(sp, &total).ok);
    let chi = euler(&fc.total().chain_ranks());
    let mut last: Option<&BTreeMap<(i64, i64), usize>> = None;
    for page in sp.pages.values() {
        prop_assert_eq!(euler(&page.total_ranks()), chi);
        if let Some(prev) = last {
            for (bd, &r) in &page.ranks {
                prop_assert!(r <= prev.get(bd).copied().unwrap_or(0), "rank grew at {:?}", bd);
            }
        }
        last = Some(&page.ranks);
    }
    for (bd, &r) in &sp.e_infinity {
        prop_assert!(r <= last.unwrap().get(bd).copied().unwrap_or(0));
    }
    prop_assert_eq!(euler(&sp.e_infinity_total()), chi);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sphere_families(seed in any::<u64>(), m in 1usize..4) {
        let (_, fc) = fixtures::sphere_fixture(&mut fixtures::rng(seed), m);
        let sp = pages(&fc, m + 2).unwrap();
        check_pages(&fc, &sp)?;
    }

    #[test]
    fn interval_sphere_families(seed in any::<u64>(), m in 1usize..3) {
        // Four filtration levels with d_1, d_m and d_{m+1} all present.
        let f = fixtures::homotopy_fixture(&mut fixtures::rng(seed), m);
        let sp = pages(&f.htpy, m + 3).unwrap();
        check_pages(&f.htpy, &sp)?;
    }

    #[test]
    fn fiber_only_complexes_collapse_at_once(seed in any::<u64>()) {
        let model = fixtures::ChainModel::random(&mut fixtures::rng(seed), 10, -2, 3, &[]);
        let c = &model.complex;
        let gens = c
            .generators()
            .iter()
            .map(|g| FilteredGenerator::new("b", &g.id, 0, g.degree))
            .collect();
        let fc = FilteredComplex::new(
            BaseDescriptor::Sphere { m: 1 },
            gens,
            BTreeMap::from([(0, c.differential().clone())]),
        )
        .unwrap();
        let sp = pages(&fc, 3).unwrap();
        check_pages(&fc, &sp)?;
        prop_assert_eq!(&sp.page(1).unwrap().ranks, &sp.e_infinity);
        prop_assert!(collapse_check(&sp));
    }
}
