//! Reading JSON documents and recognising which kind of document they are.

use std::io::Read;
use std::path::Path;

use gfh_core::families::{psi, sphere_family, MonodromyData, PsiMap};
use gfh_core::genfam::GenFamSpec;
use gfh_core::spectral::{FamilyDoc, FilteredComplex};
use gfh_core::z2::{ComplexDoc, GHTable};
use gfh_core::GradedComplex;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

/// Contents of `path`, or of stdin when `path` is absent or `-`.
pub fn read_text(path: Option<&Path>) -> Result<String, CliError> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            text = std::fs::read_to_string(p)
                .map_err(|e| CliError::input(format!("cannot read {}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::input(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(text)
}

pub fn read_json(path: Option<&Path>) -> Result<Value, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation {
        kind: "parse",
        message: e.to_string(),
        path: None,
        rule: None,
    })
}

/// Typed view of `v`, reporting the JSON path of the first schema violation.
pub fn typed<T: DeserializeOwned>(v: &Value, what: &'static str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| CliError::Validation {
        kind: "schema",
        message: format!("{what}: {}", e.inner()),
        path: Some(e.path().to_string()),
        rule: None,
    })
}

fn has(v: &Value, keys: &[&str]) -> bool {
    keys.iter().all(|k| v.get(k).is_some())
}

pub fn spec(v: &Value) -> Result<GenFamSpec, CliError> {
    typed(v, "generating family spec")
}

/// Fiber complex plus monodromy, as written by `gfh dumbbell`.
#[derive(Deserialize)]
struct SphereInput {
    complex: ComplexDoc,
    monodromy: MonodromyData,
    #[serde(default)]
    m: Option<usize>,
}

/// A family complex from either a family document or a
/// `{complex, monodromy}` sphere-family document.
pub fn family(v: &Value, m: Option<usize>) -> Result<FilteredComplex, CliError> {
    if has(v, &["base", "generators"]) {
        let doc: FamilyDoc = typed(v, "family document")?;
        let fc = FilteredComplex::from_doc(&doc).map_err(|e| CliError::rule("spectral::from_doc", e))?;
        if let (Some(m), Some(found)) = (m, fc.base().sphere_dim()) {
            if m != found {
                return Err(CliError::rule(
                    "families::sphere_family",
                    format!("--m {m} given for a family over a sphere of dimension {found}"),
                ));
            }
        }
        return Ok(fc);
    }
    if has(v, &["complex", "monodromy"]) {
        let doc: SphereInput = typed(v, "sphere family input")?;
        let m = match (m, doc.m) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::rule(
                    "families::sphere_family",
                    format!("--m {a} given for a document with m = {b}"),
                ));
            }
            (a, b) => a.or(b).unwrap_or(1),
        };
        let fiber = GradedComplex::from_doc(&doc.complex).map_err(|e| CliError::rule("z2::complex", e))?;
        return sphere_family(&fiber, m, &doc.monodromy).map_err(|e| CliError::rule("families::sphere_family", e));
    }
    Err(CliError::Validation {
        kind: "schema",
        message: "expected a family document {base, generators, components} or {complex, monodromy}".into(),
        path: Some(".".into()),
        rule: None,
    })
}

/// `Ψ`, read directly or computed from a family.
pub fn psi_map(v: &Value, m: Option<usize>) -> Result<PsiMap, CliError> {
    if has(v, &["degree_shift", "blocks"]) {
        let p: PsiMap = typed(v, "Ψ map")?;
        p.check_shape().map_err(|e| CliError::rule("families::psi", e))?;
        if let Some(m) = m.filter(|&m| m != p.m) {
            return Err(CliError::rule(
                "families::psi",
                format!("--m {m} given for a Ψ map with m = {}", p.m),
            ));
        }
        return Ok(p);
    }
    let fc = family(v, m)?;
    psi(&fc).map_err(|e| CliError::rule("families::psi", e))
}

/// A GH table: a bare `{"k": rank}` map, or the `table` / `gh` / `base`
/// field of a `gh`, `dumbbell` or stability document.
pub fn table(v: &Value) -> Result<GHTable, CliError> {
    for key in ["table", "gh"] {
        if let Some(t) = v.get(key) {
            return typed(t, "GH table");
        }
    }
    if has(v, &["base", "reruns"]) {
        return typed(&v["base"], "GH table");
    }
    typed(v, "GH table")
}
