//! Lower bounds for Yamabe constants and invariants, and a small catalog of
//! Einstein manifolds to feed them.
//!
//! Catalog entries are stored at their natural metric. Every bound first
//! rescales to the relevant normalization, so values are invariant under
//! `(λ, V) ↦ (λ/c, c^{n/2}·V)`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{domain, validation, Error, Result};
use crate::geometry::{sphere_volume, sphere_yamabe};
use crate::variational::{minimize_line, LineProblem, MinimizeOptions};

/// A closed manifold with a positive Ricci lower bound `Ricci ≥ λ·g`
/// (equality when `einstein`), its volume, and optionally its `Rv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub n: usize,
    pub lambda: f64,
    pub volume: f64,
    pub einstein: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rv: Option<f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl CatalogEntry {
    pub fn new(name: impl Into<String>, n: usize, lambda: f64, volume: f64, einstein: bool) -> Result<Self> {
        let e = Self { name: name.into(), n, lambda, volume, einstein, rv: None, note: String::new() };
        e.validate()?;
        Ok(e)
    }

    pub fn with_rv(mut self, rv: f64) -> Result<Self> {
        self.rv = Some(rv);
        self.validate()?;
        Ok(self)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(validation("catalog entry needs a name"));
        }
        if self.n < 2 {
            return Err(validation(format!("{}: dimension must be >= 2, got {}", self.name, self.n)));
        }
        if !(self.volume > 0.0 && self.volume.is_finite()) {
            return Err(validation(format!("{}: volume must be positive, got {}", self.name, self.volume)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(validation(format!(
                "{}: Ricci constant must be positive, got {}",
                self.name, self.lambda
            )));
        }
        if let Some(rv) = self.rv {
            if !(rv >= 0.0 && rv.is_finite()) {
                return Err(validation(format!("{}: Rv must be nonnegative, got {rv}", self.name)));
            }
        }
        Ok(())
    }

    /// Rescale `g ↦ c·g` with `c = λ/μ`, so the Ricci constant becomes `μ`.
    pub fn rescaled_to(&self, mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(domain(format!("target Ricci constant must be positive, got {mu}")));
        }
        let c = self.lambda / mu;
        Ok(Self { lambda: mu, volume: c.powf(self.n as f64 / 2.0) * self.volume, ..self.clone() })
    }

    /// Rescaled to `Ricci ≥ (n−1)·g`.
    pub fn normalized(&self) -> Result<Self> {
        self.rescaled_to(self.n as f64 - 1.0)
    }

    /// Unit round `Sⁿ`: `λ = n − 1`, `V = Vₙ = Rv(Sⁿ)`.
    pub fn sphere(n: usize) -> Result<Self> {
        let v = sphere_volume(n)?;
        Ok(Self::new(format!("sphere:{n}"), n, n as f64 - 1.0, v, true)?.with_rv(v)?)
    }

    /// Fubini–Study `ℂP²` with `λ = 3`, `V = 2π²`.
    pub fn cp2() -> Self {
        Self::new("cp2", 4, 3.0, 2.0 * PI * PI, true)
            .and_then(|e| e.with_rv(2.0 * PI * PI))
            .expect("valid constants")
            .with_note("Fubini-Study, normalized to Ricci = 3g")
    }

    /// `ℝP³ = S³/±1` with the quotient round metric.
    pub fn rp3() -> Self {
        Self::new("rp3", 3, 2.0, PI * PI, true)
            .and_then(|e| e.with_rv(PI * PI))
            .expect("valid constants")
            .with_note("quotient of the unit round 3-sphere")
    }
}

/// Riemannian product. Each factor is rescaled to the Ricci constant of the
/// first; the product is Einstein iff every factor is.
pub fn product_einstein(entries: &[CatalogEntry]) -> Result<CatalogEntry> {
    let first = entries.first().ok_or_else(|| domain("product of no factors"))?;
    for e in entries {
        e.validate()?;
    }
    if entries.len() == 1 {
        return Ok(first.clone());
    }
    let mu = first.lambda;
    let mut n = 0;
    let mut volume = 1.0;
    for e in entries {
        let r = e.rescaled_to(mu)?;
        n += r.n;
        volume *= r.volume;
    }
    let names: Vec<&str> = entries.iter().map(|e| e.name.as_str()).collect();
    let einstein = entries.iter().all(|e| e.einstein);
    Ok(CatalogEntry::new(format!("product:{}", names.join(",")), n, mu, volume, einstein)?
        .with_note(format!("factors rescaled to Ricci = {mu}g")))
}

/// Known manifolds, looked up by name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// `cp2` and `rp3`; spheres are generated on demand from `sphere:n`.
    pub fn builtin() -> Self {
        Self { entries: vec![CatalogEntry::cp2(), CatalogEntry::rp3()] }
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// Read a JSON array of entries and add them, replacing same-named ones.
    pub fn extend_from_json<R: Read>(&mut self, r: R) -> Result<()> {
        let rows: Vec<CatalogEntry> = serde_json::from_reader(r)?;
        for row in rows {
            row.validate()?;
            if row.name.starts_with("sphere") || row.name.starts_with("product") || row.name.contains([',', ':']) {
                return Err(validation(format!("catalog name {:?} is reserved or malformed", row.name)));
            }
            self.entries.retain(|e| e.name != row.name);
            self.entries.push(row);
        }
        Ok(())
    }

    fn lookup(&self, spec: &str, item: &str) -> Result<CatalogEntry> {
        let parse = |reason: String| Error::Parse { spec: spec.to_string(), reason };
        let (name, param) = match item.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (item.trim(), None),
        };
        if name == "sphere" {
            let p = param.ok_or_else(|| parse("sphere needs a dimension, e.g. sphere:4".into()))?;
            let n: usize = p.parse().map_err(|_| parse(format!("bad sphere dimension {p:?}")))?;
            return CatalogEntry::sphere(n).map_err(|e| parse(e.to_string()));
        }
        let entry = self
            .entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| parse(format!("unknown manifold {name:?}")))?;
        if let Some(p) = param {
            return Err(parse(format!("{name:?} takes no parameter, got {p:?}")));
        }
        Ok(entry.clone())
    }

    /// Resolve `name[:param]` or `product:name[:param],name[:param],...`.
    pub fn resolve(&self, spec: &str) -> Result<CatalogEntry> {
        let spec = spec.trim();
        if let Some(rest) = spec.strip_prefix("product:") {
            let factors = rest
                .split(',')
                .map(|item| {
                    if item.trim().is_empty() {
                        Err(Error::Parse { spec: spec.to_string(), reason: "empty factor".into() })
                    } else {
                        self.lookup(spec, item)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            return product_einstein(&factors);
        }
        if spec.contains(',') {
            return Err(Error::Parse {
                spec: spec.to_string(),
                reason: "several factors need the product: prefix".into(),
            });
        }
        if spec.is_empty() {
            return Err(Error::Parse { spec: spec.to_string(), reason: "empty spec".into() });
        }
        self.lookup(spec, spec)
    }
}

/// `Y(M, [g]) ≥ n·λ·V^{2/n}` for `Ricci(g) ≥ λ·g > 0`.
pub fn ilias_bound(n: usize, lambda: f64, volume: f64) -> Result<f64> {
    if n < 1 || !(lambda > 0.0) || !(volume > 0.0) {
        return Err(domain(format!("need λ > 0 and V > 0, got λ = {lambda}, V = {volume}")));
    }
    let nf = n as f64;
    Ok(nf * lambda * volume.powf(2.0 / nf))
}

/// `Y(M) ≥ n(n−1)·Rv^{2/n}`.
pub fn rv_bound(n: usize, rv: f64) -> Result<f64> {
    if n < 2 || !(rv >= 0.0) {
        return Err(domain(format!("need n >= 2 and Rv >= 0, got n = {n}, Rv = {rv}")));
    }
    let nf = n as f64;
    Ok(nf * (nf - 1.0) * rv.powf(2.0 / nf))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formula {
    #[serde(rename = "ilias")]
    Ilias,
    #[serde(rename = "rv")]
    Rv,
    #[serde(rename = "theorem1.2")]
    RicciBounded,
    #[serde(rename = "corollary1.4")]
    EinsteinCircle,
}

/// One bound, with the inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub manifold: String,
    pub target: String,
    pub formula: Formula,
    pub n: usize,
    pub lambda: f64,
    pub volume: f64,
    pub normalized_volume: f64,
    pub ratio: Option<f64>,
    pub value: f64,
    /// Line minimizer value, when a numerical confirmation was requested.
    pub numerical: Option<f64>,
    pub provenance: String,
}

fn volume_ratio(entry: &CatalogEntry) -> Result<(f64, f64)> {
    let v = entry.normalized()?.volume;
    Ok((v, v / sphere_volume(entry.n)?))
}

fn line_bound(entry: &CatalogEntry, formula: Formula, target: &str, provenance: &str) -> Result<BoundReport> {
    let (v, ratio) = volume_ratio(entry)?;
    let nf = entry.n as f64;
    Ok(BoundReport {
        manifold: entry.name.clone(),
        target: target.into(),
        formula,
        n: entry.n,
        lambda: entry.lambda,
        volume: entry.volume,
        normalized_volume: v,
        ratio: Some(ratio),
        value: ratio.powf(2.0 / (nf + 1.0)) * sphere_yamabe(entry.n + 1)?,
        numerical: None,
        provenance: provenance.into(),
    })
}

/// `Y(M × S¹) ≥ (V′/Vₙ)^{2/(n+1)}·Y_{n+1}` for Einstein `M`, with `V′` the
/// volume at `Ricci = (n−1)g`.
pub fn product_circle_bound(entry: &CatalogEntry) -> Result<BoundReport> {
    entry.validate()?;
    if !entry.einstein {
        return Err(Error::FormulaInapplicable(format!(
            "{} is not Einstein; only the M x R bound for Ricci-bounded metrics applies",
            entry.name
        )));
    }
    line_bound(
        entry,
        Formula::EinsteinCircle,
        "Y(M x S^1)",
        "Einstein base normalized to Ricci = (n-1)g; (V'/V_n)^(2/(n+1)) * Y_(n+1)",
    )
}

/// `Y(M × ℝ, [g + dt²]) ≥ (V′/Vₙ)^{2/(n+1)}·Y_{n+1}` for `Ricci ≥ (n−1)g`.
/// A lower bound only; sharpness off the Einstein case is not known.
pub fn ricci_bounded_line_bound(entry: &CatalogEntry) -> Result<BoundReport> {
    entry.validate()?;
    line_bound(
        entry,
        Formula::RicciBounded,
        "Y(M x R, [g + dt^2])",
        "Ricci lower bound normalized to (n-1)g; lower bound only",
    )
}

/// Grid for the optional numerical confirmation in [`compare_bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confirmation {
    pub half_width: f64,
    pub grid: usize,
}

/// All bounds that apply to `entry`, in a fixed order: ilias, rv (when
/// known), then the circle bound for Einstein entries or the Ricci-bounded
/// line bound otherwise.
pub fn compare_bounds(entry: &CatalogEntry, confirm: Option<Confirmation>) -> Result<Vec<BoundReport>> {
    entry.validate()?;
    let (v, ratio) = volume_ratio(entry)?;
    let mut out = vec![BoundReport {
        manifold: entry.name.clone(),
        target: "Y(M, [g])".into(),
        formula: Formula::Ilias,
        n: entry.n,
        lambda: entry.lambda,
        volume: entry.volume,
        normalized_volume: v,
        ratio: Some(ratio),
        value: ilias_bound(entry.n, entry.lambda, entry.volume)?,
        numerical: None,
        provenance: "n * lambda * V^(2/n) for Ricci >= lambda g".into(),
    }];
    if let Some(rv) = entry.rv {
        out.push(BoundReport {
            manifold: entry.name.clone(),
            target: "Y(M)".into(),
            formula: Formula::Rv,
            n: entry.n,
            lambda: entry.n as f64 - 1.0,
            volume: rv,
            normalized_volume: rv,
            ratio: Some(rv / sphere_volume(entry.n)?),
            value: rv_bound(entry.n, rv)?,
            numerical: None,
            provenance: "n(n-1) * Rv^(2/n)".into(),
        });
    }
    let mut line = if entry.einstein {
        product_circle_bound(entry)?
    } else {
        ricci_bounded_line_bound(entry)?
    };
    if let Some(c) = confirm {
        // only the Einstein case has a constant-scalar line problem to solve
        if entry.einstein {
            let problem = LineProblem::normalized(entry.n, v, c.half_width, c.grid)?;
            line.numerical = Some(match minimize_line(&problem, &MinimizeOptions::default()) {
                Ok(r) => r.value,
                Err(Error::Convergence { best_value, .. }) => best_value,
                Err(e) => return Err(e),
            });
        }
    }
    out.push(line);
    Ok(out)
}

pub fn write_reports_json<W: Write>(reports: &[BoundReport], mut w: W) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_reports_csv<W: Write>(reports: &[BoundReport], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in reports {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
