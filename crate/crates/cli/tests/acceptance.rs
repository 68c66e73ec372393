//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each and exits non-zero if any failed.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gfh_core::families::fixtures::{self, ChainModel};
use gfh_core::families::{
    certificate, compose, dumbbell, factor_check, kunneth, product_family, psi, sphere_family, spin_family,
    spin_gh, twist_spin, validate_spin_blocks, verify_homotopy, MonodromyData, PsiMap,
};
use gfh_core::genfam::{bundled, gh, spin_spec, stability, GHOptions};
use gfh_core::spectral::{collapse_check, convergence_check, pages, total_homology, FilteredComplex};
use gfh_core::z2::{GHTable, Generator, GradedComplex, Z2Matrix};
use gfh_core::GHResult64;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn bools(m: &Z2Matrix) -> Vec<Vec<bool>> {
    m.to_dense().into_iter().map(|r| r.into_iter().map(|x| x == 1).collect()).collect()
}

fn oracle(c: &GradedComplex) -> GHTable {
    let degrees: Vec<i64> = c.generators().iter().map(|g| g.degree).collect();
    GHTable::from_pairs(common::homology(&degrees, &bools(c.differential())))
}

fn oracle_total(fc: &FilteredComplex) -> GHTable {
    let degrees: Vec<i64> = fc.generators().iter().map(|g| g.total_degree()).collect();
    GHTable::from_pairs(common::homology(&degrees, &bools(&fc.total_differential())))
}

fn within(t: Instant, limit: Duration) -> Check {
    let e = t.elapsed();
    if e < limit {
        Ok(format!("{:.2}s", e.as_secs_f64()))
    } else {
        Err(format!("took {:.2}s, limit {:.0}s", e.as_secs_f64(), limit.as_secs_f64()))
    }
}

fn dumbbell_family(copies: usize) -> (GradedComplex, FilteredComplex) {
    let d = dumbbell(2, 4, copies).unwrap();
    let fc = sphere_family(&d.complex, 1, &d.monodromy).unwrap();
    (d.complex, fc)
}

fn sphere(model: &ChainModel, m: usize, f: &Z2Matrix) -> FilteredComplex {
    let data = MonodromyData::from_matrix(&model.complex, f, m as i64 - 1);
    sphere_family(&model.complex, m, &data).unwrap()
}

fn dumbbell_table() -> Check {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_gfh"))
        .args(["dumbbell", "--n", "2", "--r", "4", "--copies", "2"])
        .output()
        .map_err(|e| e.to_string())?;
    let time = within(t, Duration::from_secs(1))?;
    ensure!(out.status.success(), "exit {:?}", out.status.code());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let table: GHTable = serde_json::from_value(v["gh"].clone()).map_err(|e| e.to_string())?;
    let expected = GHTable::from_pairs([(2, 1), (4, 2), (-3, 2)]);
    ensure!(table == expected, "gh {table:?}");
    let complex: gfh_core::z2::ComplexDoc = serde_json::from_value(v["complex"].clone()).map_err(|e| e.to_string())?;
    let c = GradedComplex::from_doc(&complex).map_err(|e| e.to_string())?;
    ensure!(oracle(&c) == expected, "oracle {:?}", oracle(&c));
    Ok(format!("{table:?} in {time}"))
}

fn certificate_order() -> Check {
    let t = Instant::now();
    let (_, fc) = dumbbell_family(2);
    let p = psi(&fc).map_err(|e| e.to_string())?;
    let swap = vec![vec![0u8, 1], vec![1, 0]];
    for k in [4, 1 - 4] {
        ensure!(p.block(k).to_dense() == swap, "Ψ block {k} is {:?}", p.block(k).to_dense());
    }
    ensure!(p.block(2).to_dense() == vec![vec![1u8]], "Ψ block 2");
    let c = certificate(&p);
    ensure!(c.nontrivial && c.order_lower_bound >= 2, "{c:?}");
    let (_, six) = dumbbell_family(6);
    let c6 = certificate(&psi(&six).map_err(|e| e.to_string())?);
    ensure!(c6.nontrivial && c6.order_lower_bound >= 6, "{c6:?}");
    let time = within(t, Duration::from_secs(1))?;
    Ok(format!("swap on 4 and -3, orders {} and {} in {time}", c.order_lower_bound, c6.order_lower_bound))
}

fn convergence() -> Check {
    let t = Instant::now();
    let mut families = vec![dumbbell_family(2).1];
    let mut r = fixtures::rng(0);
    families.extend((0..20).map(|_| fixtures::sphere_fixture(&mut r, 1).1));
    for (i, fc) in families.iter().enumerate() {
        let sp = pages(fc, 3).map_err(|e| e.to_string())?;
        let total = total_homology(fc).map_err(|e| e.to_string())?;
        ensure!(total == oracle_total(fc), "family {i}: total homology differs from the oracle");
        let c = convergence_check(&sp, &total);
        ensure!(c.ok, "family {i}: fails at degree {:?}", c.failing_degree);
    }
    let time = within(t, Duration::from_secs(10))?;
    Ok(format!("{} families in {time}", families.len()))
}

/// `Ψ` blocks multiplied (m = 1) or added (m ≥ 2) densely.
fn dense_law(a: &PsiMap, b: &PsiMap) -> BTreeMap<i64, Vec<Vec<bool>>> {
    a.basis
        .keys()
        .map(|&k| {
            let (x, y) = (bools(&a.block(k)), bools(&b.block(k)));
            let v = if a.m == 1 {
                common::mul(&x, &y)
            } else {
                x.iter()
                    .zip(&y)
                    .map(|(p, q)| p.iter().zip(q).map(|(s, t)| s ^ t).collect())
                    .collect()
            };
            (k, v)
        })
        .collect()
}

fn homomorphism_laws() -> Check {
    let t = Instant::now();
    let mut r = fixtures::rng(1);
    for (m, pairs) in [(1usize, 50), (2, 50)] {
        for i in 0..pairs {
            let model = ChainModel::random(&mut r, 9, -2, 3, &[]);
            let invertible = m == 1;
            let a = model.chain_map(&mut r, m as i64 - 1, invertible);
            let b = model.chain_map(&mut r, m as i64 - 1, invertible);
            let ab = if m == 1 { a.mul(&b) } else { a.add(&b) };
            let (pa, pb, pab) = (
                psi(&sphere(&model, m, &a)).map_err(|e| e.to_string())?,
                psi(&sphere(&model, m, &b)).map_err(|e| e.to_string())?,
                psi(&sphere(&model, m, &ab)).map_err(|e| e.to_string())?,
            );
            ensure!(compose(&pa, &pb).map_err(|e| e.to_string())? == pab, "m = {m}, pair {i}: compose");
            let got: BTreeMap<i64, Vec<Vec<bool>>> = pab.basis.keys().map(|&k| (k, bools(&pab.block(k)))).collect();
            ensure!(got == dense_law(&pa, &pb), "m = {m}, pair {i}: dense law");
        }
    }
    let time = within(t, Duration::from_secs(10))?;
    Ok(format!("50 loop pairs, 50 sphere pairs in {time}"))
}

fn homotopy_invariance() -> Check {
    let mut r = fixtures::rng(2);
    for i in 0..20 {
        let good = fixtures::homotopy_fixture(&mut r, 1);
        let c = verify_homotopy(&good.f0, &good.f1, &good.htpy).map_err(|e| e.to_string())?;
        ensure!(c.ok, "good fixture {i} rejected: {c:?}");
        let bad = fixtures::corrupted_homotopy_fixture(&mut r, 1);
        let c = verify_homotopy(&bad.f0, &bad.f1, &bad.htpy).map_err(|e| e.to_string())?;
        ensure!(!c.ok, "corrupted fixture {i} accepted");
    }
    Ok("20 accepted, 20 corruptions rejected".into())
}

/// Non-minimal cell structures with cellular differentials.
fn base(name: &str) -> GradedComplex {
    let gen = |id: &str, degree| Generator { id: id.into(), degree };
    let d = |pairs: &[(&str, &[&str])]| -> BTreeMap<String, Vec<String>> {
        pairs
            .iter()
            .map(|(s, t)| (s.to_string(), t.iter().map(|x| x.to_string()).collect()))
            .collect()
    };
    match name {
        // Two vertices, two edges.
        "S1" => GradedComplex::new(
            vec![gen("v", 0), gen("w", 0), gen("e", 1), gen("f", 1)],
            &d(&[("e", &["v", "w"]), ("f", &["v", "w"])]),
        ),
        // A circle with two discs glued on.
        "S2" => GradedComplex::new(
            vec![gen("v", 0), gen("w", 0), gen("e", 1), gen("f", 1), gen("D", 2), gen("E", 2)],
            &d(&[("e", &["v", "w"]), ("f", &["v", "w"]), ("D", &["e", "f"]), ("E", &["e", "f"])]),
        ),
        // Square torus with one extra vertex on the edge a.
        _ => GradedComplex::new(
            vec![gen("v", 0), gen("u", 0), gen("a1", 1), gen("a2", 1), gen("b", 1), gen("T", 2)],
            &d(&[("a1", &["v", "u"]), ("a2", &["v", "u"])]),
        ),
    }
    .unwrap()
}

fn tensor_oracle(fiber: &GradedComplex, base: &GradedComplex) -> GHTable {
    let (fd, bd) = (bools(fiber.differential()), bools(base.differential()));
    let (nf, nb) = (fiber.len(), base.len());
    let at = |p: usize, x: usize| p * nf + x;
    let mut degrees = vec![0; nf * nb];
    let mut d = vec![vec![false; nf * nb]; nf * nb];
    for p in 0..nb {
        for x in 0..nf {
            degrees[at(p, x)] = base.degree_of(p) + fiber.degree_of(x);
            for y in 0..nf {
                d[at(p, y)][at(p, x)] ^= fd[y][x];
            }
            for q in 0..nb {
                d[at(q, x)][at(p, x)] ^= bd[q][p];
            }
        }
    }
    GHTable::from_pairs(common::homology(&degrees, &d))
}

fn kunneth_collapse() -> Check {
    let mut r = fixtures::rng(3);
    let bases = ["S1", "S2", "T2"];
    for (name, betti) in bases.iter().zip([&[1, 1][..], &[1, 0, 1], &[1, 2, 1]]) {
        let b = base(name);
        ensure!(oracle(&b) == GHTable::from_pairs(betti.iter().enumerate().map(|(k, &n)| (k as i64, n))), "{name} model");
        for i in 0..25 {
            let fiber = ChainModel::random(&mut r, 8, -2, 3, &[]).complex;
            let table = oracle(&fiber);
            let expected = tensor_oracle(&fiber, &b);
            ensure!(kunneth(&table, betti) == expected, "{name}, table {i}: {table:?}");
            let fc = product_family(&fiber, &b).map_err(|e| e.to_string())?;
            let sp = pages(&fc, 4).map_err(|e| e.to_string())?;
            ensure!(collapse_check(&sp), "{name}, table {i}: no collapse at E^2");
            ensure!(sp.e_infinity_total() == expected, "{name}, table {i}: E^inf");
        }
    }
    Ok("25 tables over each of S1, S2, T2".into())
}

fn numeric_gh(spec: &gfh_core::genfam::GenFamSpec, resolution: usize) -> Result<GHResult64, String> {
    gh::<f64>(spec, &GHOptions::with_resolution(resolution)).map_err(|e| e.to_string())
}

fn spin_consistency() -> Check {
    let unknot = bundled::unknot();
    let mut times = Vec::new();
    for res in [65, 129] {
        let t = Instant::now();
        let r = numeric_gh(&unknot, res)?;
        ensure!(r.table == GHTable::from_pairs([(1, 1)]), "unknot at {res}: {:?}", r.table);
        times.push(within(t, Duration::from_secs(60))?);
    }
    let t = Instant::now();
    let spun = spin_spec(&unknot, 1).map_err(|e| e.to_string())?;
    let r = numeric_gh(&spun, 33)?;
    let expected = spin_gh(&GHTable::from_pairs([(1, 1)]), 1);
    ensure!(expected == GHTable::from_pairs([(1, 1), (2, 1)]), "spin_gh {expected:?}");
    ensure!(r.table == expected, "spun unknot at 33: {:?}", r.table);
    times.push(within(t, Duration::from_secs(900))?);
    Ok(format!("unknot {{1:1}} at 65/129, spun {{1:1, 2:1}} at 33 ({})", times.join(", ")))
}

fn twist_spin_distinct() -> Check {
    let (fiber, fc) = dumbbell_family(2);
    let p = psi(&fc).map_err(|e| e.to_string())?;
    let twisted = twist_spin(&fiber, &p, 1).map_err(|e| e.to_string())?;
    let plain = spin_gh(&oracle(&fiber), 1);
    // Two-column complex a → b with d = 1 + Ψ, eliminated densely.
    let mut degrees = Vec::new();
    let mut blocks = Vec::new();
    for (&k, labels) in &p.basis {
        let n = labels.len();
        let start = degrees.len();
        degrees.extend(std::iter::repeat_n(k, n));
        degrees.extend(std::iter::repeat_n(k + 1, n));
        blocks.push((start, n, bools(&p.block(k).add(&Z2Matrix::identity(n)))));
    }
    let mut d = vec![vec![false; degrees.len()]; degrees.len()];
    for (start, n, b) in blocks {
        for i in 0..n {
            for j in 0..n {
                d[start + i][start + n + j] = b[i][j];
            }
        }
    }
    let expected = GHTable::from_pairs(common::homology(&degrees, &d));
    ensure!(twisted == expected, "twist {twisted:?} vs elimination {expected:?}");
    ensure!((twisted.rank(4), twisted.rank(5)) == (1, 1), "twisted {twisted:?}");
    ensure!((plain.rank(4), plain.rank(5)) == (2, 2), "plain {plain:?}");
    Ok("twisted 1, 1 vs plain 2, 2 at degrees 4, 5".into())
}

fn factoring() -> Check {
    let mut families = vec![dumbbell_family(2).1];
    let mut r = fixtures::rng(4);
    families.extend((0..20).map(|_| fixtures::sphere_fixture(&mut r, 1).1));
    for (i, fc) in families.iter().enumerate() {
        let spun = spin_family(fc).map_err(|e| e.to_string())?;
        let blocks = validate_spin_blocks(&spun);
        ensure!(blocks.ok, "family {i}: {:?}", blocks.failure);
        let f = factor_check(fc, &spun).map_err(|e| e.to_string())?;
        ensure!(f.ok, "family {i}: {f:?}");
        ensure!(oracle_total(&spun) == spin_gh(&oracle_total(fc), 1), "family {i}: spun trace");
    }
    Ok(format!("{} families", families.len()))
}

fn stability_of_specs() -> Check {
    let specs = bundled::numeric_specs();
    for spec in &specs {
        let name = spec.name.as_deref().unwrap_or("spec");
        let rep = stability::<f64>(spec, &GHOptions::default()).map_err(|e| e.to_string())?;
        let labels: Vec<&str> = rep.reruns.iter().map(|r| r.label.as_str()).collect();
        ensure!(labels.len() == 3, "{name}: reruns {labels:?}");
        for run in &rep.reruns {
            ensure!(run.table.as_ref() == Some(&rep.base), "{name} {}: {:?}", run.label, run);
        }
        ensure!(rep.stable, "{name}: not stable");
    }
    Ok(format!("{} specs under 3 reruns each", specs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("dumbbell table", dumbbell_table),
        ("non-contractibility certificate", certificate_order),
        ("convergence to the trace", convergence),
        ("homomorphism laws", homomorphism_laws),
        ("chain-homotopy invariance", homotopy_invariance),
        ("Kunneth and collapse", kunneth_collapse),
        ("spin consistency", spin_consistency),
        ("twist-spin distinctness", twist_spin_distinct),
        ("factoring of spun families", factoring),
        ("stability of numeric specs", stability_of_specs),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
