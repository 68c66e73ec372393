use serde::{Deserialize, Serialize};

use super::{difference, GenFamError, GenFamSpec};
use crate::cubical::{
    critical_values_with, relative_homology, sample_tape, validate_box, BoxRule,
    BoxValidation, CriticalOptions, CriticalPointReport,
};
use crate::expr::Derivatives;
use crate::z2::GHTable;
use crate::Scalar;

/// Critical values of `δ` with `|v|` below this are the Morse–Bott zero level.
const ZERO_LEVEL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GHOptions {
    pub resolution: usize,
    pub box_scale: f64,
    pub eps: Option<f64>,
    pub omega: Option<f64>,
    /// Dedup / degeneracy tolerance for critical points.
    pub tol: f64,
    /// Gradient threshold `‖∇δ‖ ≤ τ` for the box check; `None` uses
    /// [`BoxRule::default_for`] the grid.
    pub tau: Option<f64>,
    /// Abort when the box check fails; otherwise only flag it.
    pub enforce_box: bool,
}

impl Default for GHOptions {
    fn default() -> Self {
        Self {
            resolution: 65,
            box_scale: 1.0,
            eps: None,
            omega: None,
            tol: 1e-8,
            tau: None,
            enforce_box: true,
        }
    }
}

impl GHOptions {
    pub fn with_resolution(resolution: usize) -> Self {
        Self {
            resolution,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GHResult<F: Scalar> {
    /// GH ranks: cubical degree minus `N + 1`.
    pub table: GHTable,
    pub eps: F,
    pub omega: F,
    pub critical_report: CriticalPointReport<F>,
    pub stability_flags: Vec<String>,
    pub box_validation: Option<BoxValidation>,
    pub resolution: usize,
    pub box_scale: f64,
}

impl<F: Scalar> GHResult<F> {
    /// Positive critical values of `δ` (Reeb chord lengths), ascending.
    pub fn positive_critical_values(&self) -> Vec<F> {
        positive_values(&self.critical_report)
    }
}

fn positive_values<F: Scalar>(report: &CriticalPointReport<F>) -> Vec<F> {
    report
        .all_values()
        .into_iter()
        .filter(|v| *v > F::lit(ZERO_LEVEL))
        .collect()
}

/// `GH_k(f) = H_{N+1+k}(δ^ω, δ^ε)` from a sampled difference function.
///
/// `eps` defaults to half the smallest positive critical value of `δ`,
/// `omega` to the largest one plus 10% of the critical-value span (10% of the
/// value itself when there is a single positive value).
pub fn gh<F: Scalar>(spec: &GenFamSpec, opts: &GHOptions) -> Result<GHResult<F>, GenFamError> {
    spec.validate()?;
    if opts.box_scale <= 0.0 {
        return Err(GenFamError::Invalid("box_scale must be positive".into()));
    }
    let diff = difference(spec)?;
    let grid = diff.grid(opts.resolution, opts.box_scale)?;
    let derivs = Derivatives::new(&diff.expr, &grid.axes)?;
    let report: CriticalPointReport<F> = critical_values_with(
        &derivs,
        &grid,
        CriticalOptions {
            tol: opts.tol,
            ..Default::default()
        },
    )?;
    let mut flags = vec!["heuristic box validation".to_string()];
    flags.extend(report.warnings.iter().cloned());
    for l in &report.degenerate {
        if l.value > F::lit(ZERO_LEVEL) {
            flags.push(format!(
                "positive critical level {} is degenerate (Morse-Bott, nullity {})",
                l.value, l.nullity
            ));
        }
    }
    let positive = positive_values(&report);
    let (eps, omega) = match (positive.first(), positive.last()) {
        (Some(&lo), Some(&hi)) => {
            let span = hi - lo;
            let pad = if span > F::zero() { span } else { hi };
            (lo * F::lit(0.5), hi + pad * F::lit(0.1))
        }
        _ => {
            if opts.eps.is_none() || opts.omega.is_none() {
                flags.push("no positive critical values in box: no Reeb chords, GH is zero".into());
                return Ok(GHResult {
                    table: GHTable::new(),
                    eps: F::zero(),
                    omega: F::zero(),
                    critical_report: report,
                    stability_flags: flags,
                    box_validation: None,
                    resolution: opts.resolution,
                    box_scale: opts.box_scale,
                });
            }
            (F::zero(), F::zero())
        }
    };
    let eps = opts.eps.map(F::lit).unwrap_or(eps);
    let omega = opts.omega.map(F::lit).unwrap_or(omega);
    if let Some(&lo) = positive.first() {
        if eps >= lo {
            flags.push(format!("eps {eps} is not below the smallest positive critical value {lo}"));
        }
    }
    if let Some(&hi) = positive.last() {
        if omega <= hi {
            flags.push(format!("omega {omega} does not exceed the largest critical value {hi}"));
        }
    }

    let field = sample_tape::<F>(&derivs.value, &grid)?;
    let rule = match opts.tau {
        Some(t) => BoxRule::Gradient(t),
        None => BoxRule::default_for(&grid),
    };
    let check = validate_box(&derivs, &field, eps.to_f64_lossy(), omega.to_f64_lossy(), rule)?;
    if !check.ok {
        if opts.enforce_box {
            return Err(GenFamError::BoxValidation {
                witness: check.witness.clone().unwrap_or_default(),
                value: check.witness_value.unwrap_or(f64::NAN),
                gradient_norm: check.witness_gradient_norm.unwrap_or(f64::NAN),
                rule,
            });
        }
        flags.push(format!("box validation failed at {:?}", check.witness));
    }
    let raw = relative_homology(&field, eps, omega)?;
    let table = raw.shifted(-(spec.fiber_dim as i64 + 1));
    Ok(GHResult {
        table,
        eps,
        omega,
        critical_report: report,
        stability_flags: flags,
        box_validation: Some(check),
        resolution: opts.resolution,
        box_scale: opts.box_scale,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityRun {
    pub label: String,
    pub resolution: usize,
    pub box_scale: f64,
    pub eps: Option<f64>,
    pub omega: Option<f64>,
    pub table: Option<GHTable>,
    pub error: Option<String>,
    /// Degrees where the rerun disagrees with the base table.
    pub discrepancies: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub base: GHTable,
    pub reruns: Vec<StabilityRun>,
    pub stable: bool,
}

/// Reruns [`gh`] at doubled resolution (`2R − 1`), on the doubled box (at
/// `2R − 1`, keeping the spacing), and with an alternate `(eps, omega)`.
pub fn stability<F: Scalar>(spec: &GenFamSpec, opts: &GHOptions) -> Result<StabilityReport, GenFamError> {
    let base: GHResult<F> = gh(spec, opts)?;
    stability_from::<F>(spec, opts, &base)
}

pub fn stability_from<F: Scalar>(
    spec: &GenFamSpec,
    opts: &GHOptions,
    base: &GHResult<F>,
) -> Result<StabilityReport, GenFamError> {
    let fine = 2 * opts.resolution - 1;
    let eps = base.eps.to_f64_lossy();
    let omega = base.omega.to_f64_lossy();
    let positive: Vec<f64> = base
        .positive_critical_values()
        .iter()
        .map(|v| v.to_f64_lossy())
        .collect();
    let alt = positive
        .first()
        .map(|&lo| (0.75 * lo, omega + 0.5 * (omega - eps)));
    let mut variants = vec![
        ("doubled resolution", GHOptions {
            resolution: fine,
            ..opts.clone()
        }),
        ("doubled box", GHOptions {
            resolution: fine,
            box_scale: 2.0 * opts.box_scale,
            ..opts.clone()
        }),
    ];
    if let Some((e, w)) = alt {
        variants.push(("alternate eps/omega", GHOptions {
            eps: Some(e),
            omega: Some(w),
            ..opts.clone()
        }));
    }
    let mut reruns = Vec::new();
    for (label, o) in variants {
        let run = gh::<F>(spec, &o);
        let (table, error) = match run {
            Ok(r) => (Some(r.table), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let discrepancies = match &table {
            Some(t) => {
                let mut degs: Vec<i64> = t.iter().map(|(k, _)| k).chain(base.table.iter().map(|(k, _)| k)).collect();
                degs.sort_unstable();
                degs.dedup();
                degs.into_iter().filter(|&k| t.rank(k) != base.table.rank(k)).collect()
            }
            None => Vec::new(),
        };
        reruns.push(StabilityRun {
            label: label.to_string(),
            resolution: o.resolution,
            box_scale: o.box_scale,
            eps: o.eps,
            omega: o.omega,
            table,
            error,
            discrepancies,
        });
    }
    let stable = reruns
        .iter()
        .all(|r| r.error.is_none() && r.discrepancies.is_empty());
    Ok(StabilityReport {
        base: base.table.clone(),
        reruns,
        stable,
    })
}
