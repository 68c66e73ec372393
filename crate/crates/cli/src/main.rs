//! `gfh`: generating family homology and families of Legendrians from the
//! command line.

mod error;
mod input;
mod render;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gfh_core::families::{
    certificate, dumbbell, factor_check, fixtures, kunneth,
    psi_chain, spin_family, spin_gh, twist_spin, validate_spin_blocks, verify_homotopy, BaseDescriptor,
};
use gfh_core::genfam::{gh, legendrian_front, spin_spec, stability_from, GHOptions, GHResult};
use gfh_core::spectral::{collapse_check, convergence_check, pages, total_homology, FilteredComplex};
use serde::Serialize;
use serde_json::{json, Value};

use error::CliError;

#[derive(Parser)]
#[command(name = "gfh", version, about = "Generating family homology of Legendrians and their families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Write the primary output to this file instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Numeric {
    /// Grid points per axis.
    #[arg(long, default_value_t = 65)]
    resolution: usize,
    /// Scale of the computation box about its center.
    #[arg(long, default_value_t = 1.0)]
    box_scale: f64,
    /// Lower end of the action window (default: automatic).
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Upper end of the action window (default: automatic).
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Gradient threshold of the plain box check (default: local Newton rule).
    #[arg(long)]
    tau: Option<f64>,
}

impl Numeric {
    fn options(&self) -> GHOptions {
        GHOptions {
            resolution: self.resolution,
            box_scale: self.box_scale,
            eps: self.eps,
            omega: self.omega,
            tau: self.tau,
            ..GHOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// GH table of a generating family spec.
    Gh {
        input: Option<PathBuf>,
        #[command(flatten)]
        numeric: Numeric,
        /// Rerun at doubled resolution, on the doubled box and with another window.
        #[arg(long)]
        stability: bool,
    },
    /// Sampled Legendrian front of a spec.
    Front {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 65)]
        resolution: usize,
        /// Write the point cloud as CSV here (`-` for stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// m-spin of a spec, or the 1-spun family of a sphere family.
    Spin {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Spectral sequence pages of a family.
    Ss {
        input: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Monodromy morphism Psi of a sphere family.
    Psi {
        input: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// GH of the twist-spin along a loop, next to the plain spin.
    Twistspin {
        input: Option<PathBuf>,
        /// Spinning dimension.
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// GH of the trivial family over a base: S<m>, T<k>, point, or Betti numbers `1,2,1`.
    Kunneth {
        input: Option<PathBuf>,
        #[arg(long)]
        base: String,
    },
    /// Chain model of the dumbbell Legendrian and its rotation loop.
    Dumbbell {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        copies: usize,
    },
    /// Non-contractibility certificate from Psi.
    Certify {
        input: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Consistency checks: one family, a homotopy `F0 F1 H`, or random fixtures.
    Check {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
        /// Run this many random fixtures instead of reading input.
        #[arg(long)]
        fixtures: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Primary output plus an optional failed-check message.
struct Outcome {
    text: String,
    failure: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, failure: None }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(CliError::internal)?;
    s.push('\n');
    Ok(s)
}

fn either<T: Serialize>(json: bool, v: &T, human: impl FnOnce() -> String) -> Result<String, CliError> {
    if json {
        to_json(v)
    } else {
        Ok(human())
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(CliError::internal)
        }
    }
}

fn run_gh(input: Option<&Path>, numeric: &Numeric, with_stability: bool, json: bool) -> Result<Outcome, CliError> {
    let spec = input::spec(&input::read_json(input)?)?;
    let opts = numeric.options();
    let res: GHResult<f64> = gh(&spec, &opts).map_err(|e| CliError::rule("genfam::gh", e))?;
    let report = if with_stability {
        Some(stability_from::<f64>(&spec, &opts, &res).map_err(|e| CliError::rule("genfam::stability", e))?)
    } else {
        None
    };
    let text = if json {
        let mut v = serde_json::to_value(&res).map_err(CliError::internal)?;
        if let Some(r) = &report {
            v["stability"] = serde_json::to_value(r).map_err(CliError::internal)?;
        }
        to_json(&v)?
    } else {
        let mut s = render::gh(&res);
        if let Some(r) = &report {
            s.push_str(&render::stability(r));
        }
        s
    };
    let failure = report
        .filter(|r| !r.stable)
        .map(|_| "GH table is not stable under the reruns".to_string());
    Ok(Outcome { text, failure })
}

fn run_front(input: Option<&Path>, resolution: usize, csv: Option<&Path>, json: bool) -> Result<Outcome, CliError> {
    let spec = input::spec(&input::read_json(input)?)?;
    let front = legendrian_front(&spec, resolution).map_err(|e| CliError::rule("genfam::legendrian_front", e))?;
    if let Some(path) = csv {
        let mut buf = Vec::new();
        front.write_csv(&mut buf).map_err(CliError::internal)?;
        write_out(Some(path), &String::from_utf8(buf).map_err(CliError::internal)?)?;
    }
    let text = either(json, &front, || {
        let z: Vec<f64> = front.points.iter().map(|p| p.z).collect();
        let lo = z.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        format!(
            "front of a {}-dimensional Legendrian: {} points, z in [{lo}, {hi}]\n",
            front.n,
            front.points.len()
        )
    })?;
    Ok(Outcome::ok(text))
}

fn run_spin(input: Option<&Path>, m: usize) -> Result<Outcome, CliError> {
    let v = input::read_json(input)?;
    if v.get("expr").is_some() {
        let spec = input::spec(&v)?;
        let spun = spin_spec(&spec, m).map_err(|e| CliError::rule("genfam::spin_spec", e))?;
        return Ok(Outcome::ok(to_json(&spun)?));
    }
    if m != 1 {
        return Err(CliError::rule(
            "families::spin_family",
            "families can only be 1-spun; pass a generating family spec for higher m",
        ));
    }
    let fc = input::family(&v, None)?;
    let spun = spin_family(&fc).map_err(|e| CliError::rule("families::spin_family", e))?;
    Ok(Outcome::ok(to_json(&spun.to_doc())?))
}

fn run_ss(input: Option<&Path>, m: Option<usize>, json: bool) -> Result<Outcome, CliError> {
    let fc = input::family(&input::read_json(input)?, m)?;
    let sp = pages(&fc, fc.base_degree_spread() + 2).map_err(|e| CliError::rule("spectral::pages", e))?;
    let total = total_homology(&fc).map_err(|e| CliError::rule("spectral::total_homology", e))?;
    let conv = convergence_check(&sp, &total);
    let collapse = collapse_check(&sp);
    let v = json!({
        "pages": sp.to_json_table(),
        "e_infinity": sp.e_infinity_total(),
        "stable_from": sp.stable_from,
        "collapse": collapse,
        "total_homology": total,
        "convergence": {"ok": conv.ok, "failing_degree": conv.failing_degree},
    });
    let text = either(json, &v, || render::pages(&sp, &total, collapse, conv.ok))?;
    let failure = conv
        .failing_degree
        .map(|k| format!("E^inf does not match total homology in degree {k}"));
    Ok(Outcome { text, failure })
}

fn betti(base: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::input(format!("unknown base {base:?}; use S<m>, T<k>, point or a list like 1,2,1"));
    let lower = base.to_ascii_lowercase();
    if lower == "point" {
        return Ok(vec![1]);
    }
    if let Some(m) = lower.strip_prefix('s') {
        let m: usize = m.parse().map_err(|_| bad())?;
        let mut b = vec![0; m + 1];
        b[0] = 1;
        b[m] += 1;
        return Ok(b);
    }
    if let Some(k) = lower.strip_prefix('t') {
        let k: usize = k.parse().map_err(|_| bad())?;
        // Binomial coefficients of (1 + t)^k.
        let mut b = vec![1usize];
        for _ in 0..k {
            let mut next = vec![0; b.len() + 1];
            for (i, &c) in b.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c;
            }
            b = next;
        }
        return Ok(b);
    }
    base.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
        .collect()
}

fn check_family(fc: &FilteredComplex, json: bool) -> Result<Outcome, CliError> {
    let mut checks: Vec<(String, bool, String)> = Vec::new();
    let d2 = fc.total().verify_d_squared();
    checks.push(("d^2 = 0".into(), d2.ok, d2.witness.unwrap_or_default()));
    if d2.ok {
        let sp = pages(fc, fc.base_degree_spread() + 2).map_err(|e| CliError::rule("spectral::pages", e))?;
        let total = total_homology(fc).map_err(|e| CliError::rule("spectral::total_homology", e))?;
        let conv = convergence_check(&sp, &total);
        let detail = conv.failing_degree.map(|k| format!("degree {k}")).unwrap_or_default();
        checks.push(("convergence".into(), conv.ok, detail));
    }
    if d2.ok && matches!(fc.base(), BaseDescriptor::Sphere { .. }) {
        let spun = spin_family(fc).map_err(|e| CliError::rule("families::spin_family", e))?;
        let f = factor_check(fc, &spun).map_err(|e| CliError::rule("families::factor_check", e))?;
        checks.push(("spin blocks".into(), f.blocks.ok, f.blocks.failure.clone().unwrap_or_default()));
        checks.push(("factoring".into(), f.ok, String::new()));
    }
    report(checks, json)
}

fn report(checks: Vec<(String, bool, String)>, json: bool) -> Result<Outcome, CliError> {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
    let failure = (!failed.is_empty()).then(|| format!("failed: {}", failed.join(", ")));
    let v = json!({
        "ok": failed.is_empty(),
        "checks": checks.iter().map(|(name, ok, detail)| json!({"name": name, "ok": ok, "detail": detail})).collect::<Vec<Value>>(),
    });
    let text = either(json, &v, || {
        let mut s = String::new();
        for (name, ok, detail) in &checks {
            s.push_str(&format!("{name:<24} {}  {detail}\n", if *ok { "ok  " } else { "FAIL" }));
        }
        s
    })?;
    Ok(Outcome { text, failure })
}

/// Seeded fixtures: convergence and factoring on sphere families, and
/// `verify_homotopy` on good and corrupted homotopies.
fn check_fixtures(count: usize, seed: u64, json: bool) -> Result<Outcome, CliError> {
    let mut rng = fixtures::rng(seed);
    let mut tally = [0usize; 4];
    for _ in 0..count {
        let (_, fc) = fixtures::sphere_fixture(&mut rng, 1);
        let sp = pages(&fc, 3).map_err(CliError::internal)?;
        let total = total_homology(&fc).map_err(CliError::internal)?;
        tally[0] += usize::from(convergence_check(&sp, &total).ok);
        let spun = spin_family(&fc).map_err(CliError::internal)?;
        let f = factor_check(&fc, &spun).map_err(CliError::internal)?;
        tally[1] += usize::from(f.ok && validate_spin_blocks(&spun).ok);
        let good = fixtures::homotopy_fixture(&mut rng, 1);
        let bad = fixtures::corrupted_homotopy_fixture(&mut rng, 1);
        let verdict = |h: &fixtures::HomotopyFixture| {
            verify_homotopy(&h.f0, &h.f1, &h.htpy).map(|c| c.ok).unwrap_or(false)
        };
        tally[2] += usize::from(verdict(&good));
        tally[3] += usize::from(!verdict(&bad));
    }
    let names = [
        "convergence",
        "spin factoring",
        "homotopies accepted",
        "corruptions rejected",
    ];
    let checks = names
        .iter()
        .zip(tally)
        .map(|(n, t)| (n.to_string(), t == count, format!("{t}/{count} (seed {seed})")))
        .collect();
    report(checks, json)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let json = cli.json;
    match cli.command {
        Command::Gh {
            input,
            numeric,
            stability,
        } => run_gh(input.as_deref(), &numeric, stability, json),
        Command::Front { input, resolution, csv } => run_front(input.as_deref(), resolution, csv.as_deref(), json),
        Command::Spin { input, m } => run_spin(input.as_deref(), m),
        Command::Ss { input, m } => run_ss(input.as_deref(), m, json),
        Command::Psi { input, m } => {
            let p = input::psi_map(&input::read_json(input.as_deref())?, m)?;
            Ok(Outcome::ok(either(json, &p, || render::psi(&p))?))
        }
        Command::Twistspin { input, m } => {
            let fc = input::family(&input::read_json(input.as_deref())?, Some(1))?;
            let (fiber, _) = psi_chain(&fc).map_err(|e| CliError::rule("families::psi", e))?;
            let p = gfh_core::families::psi(&fc).map_err(|e| CliError::rule("families::psi", e))?;
            let twisted = twist_spin(&fiber, &p, m).map_err(|e| CliError::rule("families::twist_spin", e))?;
            let base = fiber.homology().map_err(|e| CliError::rule("z2::homology", e))?;
            let plain = spin_gh(&base, m);
            let v = json!({"m": m, "twist_spin": twisted, "spin": plain});
            let text = either(json, &v, || {
                render::columns(&[("twisted", &twisted), ("plain", &plain)])
            })?;
            Ok(Outcome::ok(text))
        }
        Command::Kunneth { input, base } => {
            let t = input::table(&input::read_json(input.as_deref())?)?;
            let b = betti(&base)?;
            let out = kunneth(&t, &b);
            Ok(Outcome::ok(either(json, &out, || render::table(&out))?))
        }
        Command::Dumbbell { n, r, copies } => {
            let d = dumbbell(n, r, copies).map_err(|e| CliError::rule("families::dumbbell", e))?;
            Ok(Outcome::ok(to_json(&d)?))
        }
        Command::Certify { input, m } => {
            let p = input::psi_map(&input::read_json(input.as_deref())?, m)?;
            let c = certificate(&p);
            Ok(Outcome::ok(either(json, &c, || render::certificate(&c))?))
        }
        Command::Check {
            inputs,
            m,
            fixtures,
            seed,
        } => {
            if let Some(count) = fixtures {
                return check_fixtures(count, seed, json);
            }
            match inputs.as_slice() {
                [] | [_] => {
                    let fc = input::family(&input::read_json(inputs.first().map(PathBuf::as_path))?, m)?;
                    check_family(&fc, json)
                }
                [f0, f1, h] => {
                    let load = |p: &PathBuf| input::family(&input::read_json(Some(p))?, m);
                    let (f0, f1, h) = (load(f0)?, load(f1)?, load(h)?);
                    let c = verify_homotopy(&f0, &f1, &h).map_err(|e| CliError::rule("families::verify_homotopy", e))?;
                    report(
                        vec![
                            ("d^2 = 0".into(), c.d_squared, String::new()),
                            ("chain homotopy".into(), c.chain_homotopy, c.witness.clone().unwrap_or_default()),
                        ],
                        json,
                    )
                }
                _ => Err(CliError::input("check takes one family or three (F0 F1 H)".into())),
            }
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("GFH_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::input(format!("GFH_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(CliError::internal)
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.diagnostic());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    if let Err(e) = configure_threads() {
        return fail(&e);
    }
    std::panic::set_hook(Box::new(|_| {}));
    let result = std::panic::catch_unwind(|| run(cli)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(CliError::Internal(msg))
    });
    let outcome = match result {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if let Err(e) = write_out(output.as_deref(), &outcome.text) {
        return fail(&e);
    }
    match outcome.failure {
        Some(msg) => fail(&CliError::Failed(msg)),
        None => ExitCode::SUCCESS,
    }
}
