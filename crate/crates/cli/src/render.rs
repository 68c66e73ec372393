//! Plain-text tables for stdout.

use std::collections::BTreeMap;
use std::fmt::Write;

use gfh_core::families::{Certificate, PsiMap};
use gfh_core::genfam::{GHResult, StabilityReport};
use gfh_core::spectral::SpectralPages;
use gfh_core::z2::GHTable;

pub fn table(t: &GHTable) -> String {
    let mut s = String::from("   k  rank\n");
    for (k, r) in t.iter() {
        let _ = writeln!(s, "{k:>4}  {r:>4}");
    }
    if t.is_empty() {
        s.push_str("(all ranks zero)\n");
    }
    s
}

/// Several tables side by side, one column per label.
pub fn columns(cols: &[(&str, &GHTable)]) -> String {
    let mut degrees: Vec<i64> = cols.iter().flat_map(|(_, t)| t.iter().map(|(k, _)| k)).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let mut s = String::from("   k");
    for (label, _) in cols {
        let _ = write!(s, "  {label:>8}");
    }
    s.push('\n');
    for k in degrees {
        let _ = write!(s, "{k:>4}");
        for (_, t) in cols {
            let _ = write!(s, "  {:>8}", t.rank(k));
        }
        s.push('\n');
    }
    s
}

pub fn gh(res: &GHResult<f64>) -> String {
    let mut s = format!("GH ranks\n{}", table(&res.table));
    let _ = writeln!(
        s,
        "eps {}  omega {}  resolution {}  box scale {}",
        res.eps, res.omega, res.resolution, res.box_scale
    );
    let chords = res.positive_critical_values();
    let _ = writeln!(s, "positive critical values: {chords:?}");
    if let Some(b) = &res.box_validation {
        let _ = writeln!(s, "box check: {}", if b.ok { "ok" } else { "FLAGGED" });
    }
    for f in &res.stability_flags {
        let _ = writeln!(s, "flag: {f}");
    }
    s
}

pub fn stability(rep: &StabilityReport) -> String {
    let mut s = String::from("stability reruns\n");
    for run in &rep.reruns {
        let outcome = match (&run.table, &run.error) {
            (Some(t), _) if run.discrepancies.is_empty() => format!("{t:?}  agrees"),
            (Some(t), _) => format!("{t:?}  differs at {:?}", run.discrepancies),
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => "no result".into(),
        };
        let _ = writeln!(
            s,
            "  {:<20} res {:<4} box {:<4} {outcome}",
            run.label, run.resolution, run.box_scale
        );
    }
    let _ = writeln!(s, "stable: {}", if rep.stable { "yes" } else { "NO" });
    s
}

pub fn pages(sp: &SpectralPages, total: &GHTable, collapse: bool, converges: bool) -> String {
    let mut s = String::new();
    let grid = |s: &mut String, ranks: &BTreeMap<(i64, i64), usize>| {
        if ranks.is_empty() {
            s.push_str("  (zero)\n");
        }
        for (&(l, j), &r) in ranks {
            let _ = writeln!(s, "  l {l:>3}  j {j:>3}  rank {r}");
        }
    };
    for (r, page) in &sp.pages {
        let _ = writeln!(s, "E^{r}");
        grid(&mut s, &page.ranks);
    }
    s.push_str("E^inf\n");
    grid(&mut s, &sp.e_infinity);
    let _ = writeln!(s, "stable from E^{}", sp.stable_from);
    let _ = writeln!(s, "collapse at E^2: {}", if collapse { "yes" } else { "no" });
    let _ = writeln!(s, "total homology\n{}", table(total));
    let _ = writeln!(s, "convergence: {}", if converges { "ok" } else { "FAILED" });
    s
}

pub fn psi(p: &PsiMap) -> String {
    let mut s = format!("Psi for m = {} (degree shift {})\n", p.m, p.degree_shift);
    for (k, labels) in &p.basis {
        let target = k + p.degree_shift;
        let _ = writeln!(s, "degree {k} -> {target}  basis [{}]", labels.join(", "));
        let b = p.block(*k);
        for row in b.to_dense() {
            let cells: Vec<String> = row.iter().map(u8::to_string).collect();
            let _ = writeln!(s, "  {}", cells.join(" "));
        }
    }
    s
}

pub fn certificate(c: &Certificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "nontrivial         {}", c.nontrivial);
    let _ = writeln!(s, "order_lower_bound  {}", c.order_lower_bound);
    let _ = writeln!(s, "m                  {}", c.m);
    let _ = writeln!(s, "basis              {}", c.basis);
    let _ = writeln!(s, "trivial degrees    {:?}", c.trivial_degrees);
    let _ = writeln!(s, "claim              {}", c.paper_claim);
    s
}
