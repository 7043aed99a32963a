//! System configuration files: a JSON description of a generator system.
//!
//! Rationals are strings like `"2/9"` or `"3"`; Cantor addresses use the
//! `PREFIX(PERIOD)` grammar. Generators are given either as explicit piece
//! lists (affine / power / cantor-split) or, for the lazily materialized
//! catalog constructions, as a reference back to the catalog entry that
//! builds them. Parsing reports the JSON path of the offending field.

use orbitkit::action::GeneratorSystem;
use orbitkit::cantor::{CantorAddress, SplitHomeo, SplitHomeoSpec};
use orbitkit::catalog::{build_example, ExampleParams};
use orbitkit::homeo::{DomainKind, Piece, PieceKind, PiecewiseMap};
use orbitkit::rational::{format_rational, parse_rational, Rational};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub name: String,
    pub domain: String,
    pub invertible: bool,
    /// Present when the system is a catalog construction; required to
    /// rebuild generators that have no finite piece description.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<CatalogRef>,
    pub generators: Vec<GeneratorConfig>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub designated: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ladder: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub finite_orbit_points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogRef {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub name: String,
    /// Explicit pieces, when the map has a finite description.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<PieceConfig>>,
    /// Human-readable rule description for catalog-built generators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PieceConfig {
    Affine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lo: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hi: Option<String>,
        slope: String,
        offset: String,
    },
    Power {
        lo: String,
        hi: String,
        coeff: String,
        #[serde(default = "one_string")]
        scale: String,
        center: String,
        offset: String,
        exponent: String,
    },
    CantorSplit {
        lo: String,
        hi: String,
        src_lo: String,
        src_hi: String,
        tgt_lo: String,
        tgt_hi: String,
        pins: Vec<(String, String)>,
    },
}

fn one_string() -> String {
    "1".into()
}

/// A configuration error annotated with the path of the field at fault.
#[derive(Debug)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(path: impl Into<String>, message: impl std::fmt::Display) -> ConfigError {
    ConfigError {
        path: path.into(),
        message: message.to_string(),
    }
}

fn rational_at(path: &str, s: &str) -> Result<Rational, ConfigError> {
    parse_rational(s).map_err(|e| err(path, e))
}

fn address_at(path: &str, s: &str) -> Result<CantorAddress, ConfigError> {
    CantorAddress::parse(s).map_err(|e| err(path, e))
}

pub fn parse_config(text: &str) -> Result<SystemConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| err("<document>", e))
}

/// Builds the validated system a configuration describes.
pub fn build_system(cfg: &SystemConfig) -> Result<GeneratorSystem, ConfigError> {
    if let Some(cat) = &cfg.catalog {
        let mut params = ExampleParams::default();
        params.values = cat.params.clone();
        let sys = build_example(&cat.name, &params).map_err(|e| err("catalog", e))?;
        if sys.generators().len() != cfg.generators.len() {
            return Err(err(
                "generators",
                "generator list does not match the referenced catalog entry",
            ));
        }
        return Ok(sys);
    }

    let domain = match cfg.domain.as_str() {
        "interval01" => DomainKind::Interval01,
        "circle" => DomainKind::Circle,
        "line" => DomainKind::Line,
        other => return Err(err("domain", format!("unknown domain {other:?}"))),
    };
    let mut maps = Vec::new();
    for (gi, g) in cfg.generators.iter().enumerate() {
        let gpath = format!("generators[{gi}]");
        let Some(pieces_cfg) = &g.pieces else {
            return Err(err(
                format!("{gpath}.pieces"),
                "rule-based generators need a catalog reference",
            ));
        };
        let mut pieces = Vec::with_capacity(pieces_cfg.len());
        for (pi, p) in pieces_cfg.iter().enumerate() {
            let ppath = format!("{gpath}.pieces[{pi}]");
            pieces.push(build_piece(&ppath, p, domain)?);
        }
        let map = match (&cfg.period, domain) {
            (Some(t), DomainKind::Line) => PiecewiseMap::new_periodic(
                g.name.clone(),
                pieces,
                rational_at("period", t)?,
            ),
            _ => PiecewiseMap::new(g.name.clone(), domain, pieces),
        };
        let report = orbitkit::homeo::validate_map(&map);
        if !report.usable() {
            return Err(err(
                gpath,
                format!("map fails validation: {:?}", report.errors),
            ));
        }
        maps.push(map);
    }
    let mut sys = GeneratorSystem::new(cfg.name.clone(), domain, maps, cfg.invertible)
        .map_err(|e| err("generators", e))?;
    for (k, v) in &cfg.designated {
        sys = sys.with_designated(k, rational_at(&format!("designated.{k}"), v)?);
    }
    if !cfg.ladder.is_empty() {
        let refs: Vec<&str> = cfg.ladder.iter().map(|s| s.as_str()).collect();
        sys = sys.with_ladder(&refs);
    }
    if !cfg.finite_orbit_points.is_empty() {
        let mut pts = Vec::new();
        for (i, p) in cfg.finite_orbit_points.iter().enumerate() {
            pts.push(rational_at(&format!("finite_orbit_points[{i}]"), p)?);
        }
        sys = sys.with_finite_orbit_points(pts);
    }
    for n in &cfg.notes {
        sys = sys.with_note(n.clone());
    }
    Ok(sys)
}

fn build_piece(
    path: &str,
    p: &PieceConfig,
    domain: DomainKind,
) -> Result<Piece, ConfigError> {
    match p {
        PieceConfig::Affine {
            lo,
            hi,
            slope,
            offset,
        } => {
            let lo = match lo {
                Some(s) => Some(rational_at(&format!("{path}.lo"), s)?),
                None if domain == DomainKind::Line => None,
                None => return Err(err(format!("{path}.lo"), "bound required")),
            };
            let hi = match hi {
                Some(s) => Some(rational_at(&format!("{path}.hi"), s)?),
                None if domain == DomainKind::Line => None,
                None => return Err(err(format!("{path}.hi"), "bound required")),
            };
            Ok(Piece {
                lo,
                hi,
                kind: PieceKind::Affine {
                    slope: rational_at(&format!("{path}.slope"), slope)?,
                    offset: rational_at(&format!("{path}.offset"), offset)?,
                },
            })
        }
        PieceConfig::Power {
            lo,
            hi,
            coeff,
            scale,
            center,
            offset,
            exponent,
        } => Ok(Piece::power_scaled(
            rational_at(&format!("{path}.lo"), lo)?,
            rational_at(&format!("{path}.hi"), hi)?,
            rational_at(&format!("{path}.coeff"), coeff)?,
            rational_at(&format!("{path}.scale"), scale)?,
            rational_at(&format!("{path}.center"), center)?,
            rational_at(&format!("{path}.offset"), offset)?,
            rational_at(&format!("{path}.exponent"), exponent)?,
        )),
        PieceConfig::CantorSplit {
            lo,
            hi,
            src_lo,
            src_hi,
            tgt_lo,
            tgt_hi,
            pins,
        } => {
            let mut pin_addrs = Vec::new();
            for (i, (a, b)) in pins.iter().enumerate() {
                pin_addrs.push((
                    address_at(&format!("{path}.pins[{i}][0]"), a)?,
                    address_at(&format!("{path}.pins[{i}][1]"), b)?,
                ));
            }
            let spec = SplitHomeoSpec {
                source: (
                    rational_at(&format!("{path}.src_lo"), src_lo)?,
                    rational_at(&format!("{path}.src_hi"), src_hi)?,
                ),
                target: (
                    rational_at(&format!("{path}.tgt_lo"), tgt_lo)?,
                    rational_at(&format!("{path}.tgt_hi"), tgt_hi)?,
                ),
                pins: pin_addrs,
            };
            let homeo = SplitHomeo::build(spec).map_err(|e| err(path, e))?;
            Ok(Piece {
                lo: Some(rational_at(&format!("{path}.lo"), lo)?),
                hi: Some(rational_at(&format!("{path}.hi"), hi)?),
                kind: PieceKind::CantorSplit(Arc::new(homeo)),
            })
        }
    }
}

/// Renders a system built by the catalog into a configuration.
pub fn config_for_catalog(
    name: &str,
    params: &BTreeMap<String, String>,
    sys: &GeneratorSystem,
) -> SystemConfig {
    let domain = match sys.domain_kind() {
        DomainKind::Interval01 => "interval01",
        DomainKind::Circle => "circle",
        DomainKind::Line => "line",
    };
    let generators = sys
        .generators()
        .iter()
        .map(|g| {
            let pieces: Option<Vec<PieceConfig>> =
                g.pieces().iter().map(piece_to_config).collect();
            GeneratorConfig {
                name: g.name().to_string(),
                rule: pieces.is_none().then(|| describe_rule(g)),
                pieces,
            }
        })
        .collect();
    SystemConfig {
        name: sys.name().to_string(),
        domain: domain.into(),
        invertible: sys.is_invertible(),
        catalog: Some(CatalogRef {
            name: name.to_string(),
            params: params.clone(),
        }),
        generators,
        designated: sys
            .designated()
            .iter()
            .map(|(k, v)| (k.clone(), format_rational(v)))
            .collect(),
        ladder: sys.ladder().to_vec(),
        finite_orbit_points: sys
            .finite_orbit_points()
            .iter()
            .map(format_rational)
            .collect(),
        period: sys
            .generators()
            .iter()
            .find_map(|g| g.period().map(format_rational)),
        notes: sys.notes().to_vec(),
    }
}

fn piece_to_config(p: &Piece) -> Option<PieceConfig> {
    let fmt = |r: &Rational| format_rational(r);
    match &p.kind {
        PieceKind::Affine { slope, offset } => Some(PieceConfig::Affine {
            lo: p.lo.as_ref().map(fmt),
            hi: p.hi.as_ref().map(fmt),
            slope: fmt(slope),
            offset: fmt(offset),
        }),
        PieceKind::Power {
            coeff,
            scale,
            center,
            offset,
            exponent,
        } => Some(PieceConfig::Power {
            lo: fmt(p.lo.as_ref()?),
            hi: fmt(p.hi.as_ref()?),
            coeff: fmt(coeff),
            scale: fmt(scale),
            center: fmt(center),
            offset: fmt(offset),
            exponent: fmt(exponent),
        }),
        PieceKind::CantorSplit(h) => {
            let spec = h.spec();
            Some(PieceConfig::CantorSplit {
                lo: fmt(p.lo.as_ref()?),
                hi: fmt(p.hi.as_ref()?),
                src_lo: fmt(&spec.source.0),
                src_hi: fmt(&spec.source.1),
                tgt_lo: fmt(&spec.target.0),
                tgt_hi: fmt(&spec.target.1),
                pins: spec
                    .pins
                    .iter()
                    .map(|(a, b)| (a.to_string(), b.to_string()))
                    .collect(),
            })
        }
        PieceKind::Rule(_) => None,
    }
}

fn describe_rule(g: &PiecewiseMap) -> String {
    g.pieces()
        .iter()
        .find_map(|p| match &p.kind {
            PieceKind::Rule(r) => Some(r.describe()),
            _ => None,
        })
        .unwrap_or_else(|| "construction-defined".into())
}

pub fn render_config(cfg: &SystemConfig) -> String {
    let mut s = serde_json::to_string_pretty(cfg).expect("config serializes");
    s.push('\n');
    s
}
