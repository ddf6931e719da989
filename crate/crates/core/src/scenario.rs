//! Declarative scenario files: a surface, its transcribed curve
//! arrangement, a blow-up schedule, the chains to contract, homology
//! classes with provenance tags, declared relations, and an expected block
//! to verify against.
//!
//! The format is versioned JSON (`"schema": 1`). Parsing validates
//! references up front and reports the offending field by path.

use crate::canonical::{self, CurveClass};
use crate::config::{Configuration, PointSpec, Provenance};
use crate::exactalg::FinAbGroup;
use crate::homology::{
    self, BoundaryGroup, ClassSpec, DeclaredRelation, MeridianTerm, RelationClass, H1Z0,
};
use crate::report::{
    AssumptionReport, ChainReport, CheckReport, DeclaredRelationReport, H1Z0Report,
    MembershipReport, NefEntryReport, NefSummary, ProvenanceSummary, Report, SurfaceSummary,
};
use crate::tsingular::{self, Chain, ClassT};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Deserialize;
use std::collections::BTreeSet;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("stage '{stage}': {message}")]
    Stage { stage: &'static str, message: String },
}

fn schema_err(path: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema { path: path.into(), message: message.into() }
}

fn stage_err(stage: &'static str, err: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Stage { stage, message: err.to_string() }
}

// ---------------------------------------------------------------------------
// raw JSON layer

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema: u32,
    name: String,
    #[serde(default)]
    description: Option<String>,
    surface: RawSurface,
    curves: Vec<RawCurve>,
    #[serde(default)]
    points: Vec<RawPoint>,
    #[serde(default)]
    blowups: Vec<RawBlowup>,
    #[serde(default)]
    chains: Vec<RawChain>,
    #[serde(default)]
    h2_classes: Vec<RawClass>,
    #[serde(default)]
    declared_relations: Vec<RawDeclared>,
    #[serde(default)]
    assumptions: Vec<RawAssumption>,
    #[serde(default)]
    nef_test_curves: Vec<String>,
    #[serde(default)]
    membership_checks: Vec<RawMembership>,
    #[serde(default)]
    expected: RawExpected,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    name: String,
    k2: i64,
    b2: i64,
    h1: Vec<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    name: String,
    #[serde(default)]
    genus: u32,
    self_int: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawProvenance {
    Text,
    Figure,
    Asserted,
}

impl From<RawProvenance> for Provenance {
    fn from(p: RawProvenance) -> Self {
        match p {
            RawProvenance::Text => Provenance::Text,
            RawProvenance::Figure => Provenance::Figure,
            RawProvenance::Asserted => Provenance::Asserted,
        }
    }
}

fn default_provenance() -> RawProvenance {
    RawProvenance::Text
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    name: String,
    branches: Vec<(String, u32)>,
    #[serde(default = "default_provenance")]
    provenance: RawProvenance,
    #[serde(default)]
    note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlowup {
    at: String,
    name: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    name: String,
    curves: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    name: String,
    #[serde(default)]
    curve: Option<String>,
    #[serde(default)]
    combination: Option<Vec<(i64, String)>>,
    #[serde(default)]
    intersections: Option<Vec<Vec<i64>>>,
    #[serde(default = "default_provenance")]
    provenance: RawProvenance,
    #[serde(default)]
    note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDeclared {
    name: String,
    lift: usize,
    boundary_word: Vec<RawTerm>,
    #[serde(default)]
    statement: Option<String>,
    note: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    chain: usize,
    position: usize,
    coeff: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAssumption {
    name: String,
    statement: String,
    #[serde(default)]
    note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMembership {
    name: String,
    element: Vec<i64>,
    expect_in_image: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpected {
    #[serde(default)]
    chains: Option<Vec<RawExpectedChain>>,
    #[serde(default)]
    discrepancies: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pullback_degrees: Option<std::collections::BTreeMap<String, String>>,
    #[serde(default)]
    k2_contracted: Option<String>,
    #[serde(default)]
    boundary_h1: Option<Vec<u64>>,
    #[serde(default)]
    milnor_h1: Option<Vec<Vec<u64>>>,
    #[serde(default)]
    h1_z0: Option<RawExpectedZ0>,
    #[serde(default)]
    h1_blowdown: Option<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpectedChain {
    p: u64,
    q: u64,
    #[serde(default)]
    class_t: Option<RawClassT>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawClassT {
    Wahl { d: u64, n: u64, a: u64 },
    Marker(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpectedZ0 {
    order: u64,
    #[serde(default)]
    group: Option<Vec<u64>>,
}

// ---------------------------------------------------------------------------
// validated scenario

/// A parsed, reference-checked scenario.
#[derive(Debug)]
pub struct Scenario {
    raw: RawScenario,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.raw.name
    }

    pub fn description(&self) -> Option<&str> {
        self.raw.description.as_deref()
    }
}

/// Parse and validate a scenario document.
pub fn parse_scenario(bytes: &[u8]) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario =
        serde_json::from_slice(bytes).map_err(|e| ScenarioError::Json(e.to_string()))?;
    if raw.schema != 1 {
        return Err(schema_err("schema", format!("unsupported schema version {}", raw.schema)));
    }

    let mut curve_names: BTreeSet<&str> = BTreeSet::new();
    for (i, c) in raw.curves.iter().enumerate() {
        if !curve_names.insert(&c.name) {
            return Err(schema_err(format!("curves[{i}].name"), format!("duplicate curve '{}'", c.name)));
        }
        if c.name.is_empty() {
            return Err(schema_err(format!("curves[{i}].name"), "empty name"));
        }
    }
    let mut point_names: BTreeSet<&str> = BTreeSet::new();
    for (i, p) in raw.points.iter().enumerate() {
        if !point_names.insert(&p.name) {
            return Err(schema_err(format!("points[{i}].name"), format!("duplicate point '{}'", p.name)));
        }
        if p.branches.is_empty() {
            return Err(schema_err(format!("points[{i}].branches"), "at least one branch required"));
        }
        for (j, (c, m)) in p.branches.iter().enumerate() {
            if !curve_names.contains(c.as_str()) {
                return Err(schema_err(
                    format!("points[{i}].branches[{j}]"),
                    format!("unknown curve '{c}'"),
                ));
            }
            if *m < 1 {
                return Err(schema_err(
                    format!("points[{i}].branches[{j}]"),
                    "multiplicity must be >= 1",
                ));
            }
        }
        if p.provenance != RawProvenance::Text && p.note.is_none() {
            return Err(schema_err(
                format!("points[{i}].note"),
                "figure/asserted data must carry a source note",
            ));
        }
    }
    let mut blowup_names: BTreeSet<&str> = BTreeSet::new();
    for (i, b) in raw.blowups.iter().enumerate() {
        if curve_names.contains(b.name.as_str()) || !blowup_names.insert(&b.name) {
            return Err(schema_err(
                format!("blowups[{i}].name"),
                format!("name '{}' collides with an existing curve or blow-up", b.name),
            ));
        }
    }
    let known_curve = |name: &str| curve_names.contains(name) || blowup_names.contains(name);

    let mut seen_chain_curves: BTreeSet<&str> = BTreeSet::new();
    for (i, ch) in raw.chains.iter().enumerate() {
        if ch.curves.is_empty() {
            return Err(schema_err(format!("chains[{i}].curves"), "chain must be nonempty"));
        }
        for (j, c) in ch.curves.iter().enumerate() {
            if !known_curve(c) {
                return Err(schema_err(
                    format!("chains[{i}].curves[{j}]"),
                    format!("unknown curve '{c}'"),
                ));
            }
            if !seen_chain_curves.insert(c) {
                return Err(schema_err(
                    format!("chains[{i}].curves[{j}]"),
                    format!("curve '{c}' appears in two chains (chains must be disjoint)"),
                ));
            }
        }
    }
    for (i, class) in raw.h2_classes.iter().enumerate() {
        let kinds = usize::from(class.curve.is_some())
            + usize::from(class.combination.is_some())
            + usize::from(class.intersections.is_some());
        if kinds != 1 {
            return Err(schema_err(
                format!("h2_classes[{i}]"),
                "exactly one of 'curve', 'combination', 'intersections' required",
            ));
        }
        if let Some(c) = &class.curve {
            if !known_curve(c) {
                return Err(schema_err(format!("h2_classes[{i}].curve"), format!("unknown curve '{c}'")));
            }
        }
        if let Some(terms) = &class.combination {
            for (j, (_, c)) in terms.iter().enumerate() {
                if !known_curve(c) {
                    return Err(schema_err(
                        format!("h2_classes[{i}].combination[{j}]"),
                        format!("unknown curve '{c}'"),
                    ));
                }
            }
        }
        if let Some(rows) = &class.intersections {
            if rows.len() != raw.chains.len() {
                return Err(schema_err(
                    format!("h2_classes[{i}].intersections"),
                    format!("need one row per chain ({} chains)", raw.chains.len()),
                ));
            }
            for (j, row) in rows.iter().enumerate() {
                if row.len() != raw.chains[j].curves.len() {
                    return Err(schema_err(
                        format!("h2_classes[{i}].intersections[{j}]"),
                        format!("need {} entries", raw.chains[j].curves.len()),
                    ));
                }
            }
        }
        if class.provenance != RawProvenance::Text && class.note.is_none() {
            return Err(schema_err(
                format!("h2_classes[{i}].note"),
                "figure/asserted data must carry a source note",
            ));
        }
    }
    let ambient = FinAbGroup::canonical_from_orders(
        &raw.surface.h1.iter().map(|&o| BigUint::from(o)).collect::<Vec<_>>(),
    );
    for (i, d) in raw.declared_relations.iter().enumerate() {
        if d.lift >= ambient.torsion().len() {
            return Err(schema_err(
                format!("declared_relations[{i}].lift"),
                format!(
                    "lift index {} out of range; ambient has {} torsion factors",
                    d.lift,
                    ambient.torsion().len()
                ),
            ));
        }
        for (j, t) in d.boundary_word.iter().enumerate() {
            if t.chain >= raw.chains.len() || t.position >= raw.chains[t.chain].curves.len() {
                return Err(schema_err(
                    format!("declared_relations[{i}].boundary_word[{j}]"),
                    "chain/position out of range",
                ));
            }
        }
        if d.note.trim().is_empty() {
            return Err(schema_err(
                format!("declared_relations[{i}].note"),
                "declared relations must carry a source note",
            ));
        }
    }
    for (i, a) in raw.assumptions.iter().enumerate() {
        if a.statement.trim().is_empty() {
            return Err(schema_err(format!("assumptions[{i}].statement"), "empty statement"));
        }
    }
    for (i, name) in raw.nef_test_curves.iter().enumerate() {
        if !known_curve(name) {
            return Err(schema_err(format!("nef_test_curves[{i}]"), format!("unknown curve '{name}'")));
        }
    }
    for (i, m) in raw.membership_checks.iter().enumerate() {
        if m.element.len() != raw.chains.len() {
            return Err(schema_err(
                format!("membership_checks[{i}].element"),
                format!("need one coordinate per chain ({})", raw.chains.len()),
            ));
        }
    }
    if let Some(chains) = &raw.expected.chains {
        if chains.len() != raw.chains.len() {
            return Err(schema_err("expected.chains", "length must match the chain list"));
        }
    }
    if let Some(d) = &raw.expected.discrepancies {
        if d.len() != raw.chains.len() {
            return Err(schema_err("expected.discrepancies", "length must match the chain list"));
        }
        for (i, row) in d.iter().enumerate() {
            if row.len() != raw.chains[i].curves.len() {
                return Err(schema_err(
                    format!("expected.discrepancies[{i}]"),
                    format!("need {} coefficients", raw.chains[i].curves.len()),
                ));
            }
            for (j, s) in row.iter().enumerate() {
                parse_rational(s).map_err(|m| {
                    schema_err(format!("expected.discrepancies[{i}][{j}]"), m)
                })?;
            }
        }
    }
    if let Some(map) = &raw.expected.pullback_degrees {
        for (name, v) in map {
            if !known_curve(name) {
                return Err(schema_err(
                    format!("expected.pullback_degrees.{name}"),
                    format!("unknown curve '{name}'"),
                ));
            }
            parse_rational(v)
                .map_err(|m| schema_err(format!("expected.pullback_degrees.{name}"), m))?;
        }
    }
    if let Some(v) = &raw.expected.k2_contracted {
        parse_rational(v).map_err(|m| schema_err("expected.k2_contracted", m))?;
    }
    if let Some(m) = &raw.expected.milnor_h1 {
        if m.len() != raw.chains.len() {
            return Err(schema_err("expected.milnor_h1", "length must match the chain list"));
        }
    }
    Ok(Scenario { raw })
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    parse_scenario(text.as_bytes())
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    BigRational::from_str(s.trim()).map_err(|e| format!("not an exact rational '{s}': {e}"))
}

fn group_from_orders(orders: &[u64]) -> FinAbGroup {
    FinAbGroup::canonical_from_orders(
        &orders.iter().map(|&o| BigUint::from(o)).collect::<Vec<_>>(),
    )
}

fn factors_strings(g: &FinAbGroup) -> Vec<String> {
    g.torsion().iter().map(|d| d.to_string()).collect()
}

// ---------------------------------------------------------------------------
// pipeline

/// Build the initial surface and replay the blow-up schedule.
pub fn replayed_configuration(s: &Scenario) -> Result<Configuration, ScenarioError> {
    let raw = &s.raw;
    let ambient = group_from_orders(&raw.surface.h1);
    let mut cfg = Configuration::new(&raw.surface.name, raw.surface.k2, raw.surface.b2, ambient);
    for c in &raw.curves {
        cfg.add_curve(&c.name, c.genus, c.self_int).map_err(|e| stage_err("surface", e))?;
    }
    for p in &raw.points {
        let branches: Vec<(&str, u32)> =
            p.branches.iter().map(|(c, m)| (c.as_str(), *m)).collect();
        cfg.add_point(&p.name, &branches, p.provenance.into(), p.note.as_deref())
            .map_err(|e| stage_err("surface", e))?;
    }
    for b in &raw.blowups {
        let (next, _) = cfg
            .blow_up(&PointSpec::Existing(b.at.clone()), &b.name)
            .map_err(|e| stage_err("blowups", format!("blow-up '{}': {e}", b.name)))?;
        cfg = next;
    }
    Ok(cfg)
}

/// The validated objects a scenario feeds into the pipeline, exposed for
/// callers that drive the modules directly.
pub struct PipelineInputs {
    pub config: Configuration,
    pub chains: Vec<Chain>,
    pub classes: Vec<RelationClass>,
    pub declared: Vec<DeclaredRelation>,
}

pub fn pipeline_inputs(s: &Scenario) -> Result<PipelineInputs, ScenarioError> {
    let config = replayed_configuration(s)?;
    let chains = bind_chains(s, &config)?;
    let classes = relation_classes(s, &config)?;
    let declared = declared_relations(s);
    Ok(PipelineInputs { config, chains, classes, declared })
}

fn bind_chains(s: &Scenario, cfg: &Configuration) -> Result<Vec<Chain>, ScenarioError> {
    s.raw
        .chains
        .iter()
        .map(|ch| {
            let ids = ch
                .curves
                .iter()
                .map(|n| cfg.curve_id(n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| stage_err("chains", e))?;
            Chain::bind(cfg, &ids)
                .map_err(|e| stage_err("chains", format!("chain '{}': {e}", ch.name)))
        })
        .collect()
}

fn relation_classes(s: &Scenario, cfg: &Configuration) -> Result<Vec<RelationClass>, ScenarioError> {
    s.raw
        .h2_classes
        .iter()
        .map(|c| {
            let spec = if let Some(name) = &c.curve {
                ClassSpec::Curve(cfg.curve_id(name).map_err(|e| stage_err("classes", e))?)
            } else if let Some(terms) = &c.combination {
                ClassSpec::Combination(
                    terms
                        .iter()
                        .map(|(k, n)| Ok((*k, cfg.curve_id(n).map_err(|e| stage_err("classes", e))?)))
                        .collect::<Result<Vec<_>, ScenarioError>>()?,
                )
            } else {
                ClassSpec::Direct(c.intersections.clone().expect("validated"))
            };
            Ok(RelationClass {
                name: c.name.clone(),
                spec,
                provenance: c.provenance.into(),
                note: c.note.clone(),
            })
        })
        .collect()
}

fn declared_relations(s: &Scenario) -> Vec<DeclaredRelation> {
    s.raw
        .declared_relations
        .iter()
        .map(|d| DeclaredRelation {
            name: d.name.clone(),
            lift_index: d.lift,
            boundary_word: d
                .boundary_word
                .iter()
                .map(|t| MeridianTerm { chain: t.chain, position: t.position, coeff: t.coeff })
                .collect(),
            note: Some(d.note.clone()),
        })
        .collect()
}

fn push_check(
    checks: &mut Vec<CheckReport>,
    name: impl Into<String>,
    expected: impl Into<String>,
    computed: impl Into<String>,
) {
    let expected = expected.into();
    let computed = computed.into();
    let pass = expected == computed;
    checks.push(CheckReport { name: name.into(), expected, computed, pass });
}

/// Execute the whole pipeline on a parsed scenario and compare against its
/// expected block, field by field.
pub fn run(s: &Scenario) -> Result<Report, ScenarioError> {
    let raw = &s.raw;
    let cfg = replayed_configuration(s)?;

    let violations = cfg.validate();
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(stage_err("validate", msgs.join("; ")));
    }

    let chains = bind_chains(s, &cfg)?;
    let classes = relation_classes(s, &cfg)?;
    let declared = declared_relations(s);

    let mut checks: Vec<CheckReport> = Vec::new();

    // classification
    let mut chain_reports = Vec::with_capacity(chains.len());
    let mut types = Vec::with_capacity(chains.len());
    for (i, chain) in chains.iter().enumerate() {
        let t = tsingular::classify_class_t(chain).map_err(|e| stage_err("classify", e))?;
        let class_t_str = match &t.class_t {
            Some(ClassT::Wahl { d, n, a }) => format!("(d,n,a)=({d},{n},{a})"),
            Some(ClassT::RationalDoublePoint) => "rdp".to_string(),
            None => "none".to_string(),
        };
        if let Some(expected) = &raw.expected.chains {
            let e = &expected[i];
            push_check(
                &mut checks,
                format!("chains[{i}].p"),
                e.p.to_string(),
                t.p.to_string(),
            );
            push_check(
                &mut checks,
                format!("chains[{i}].q"),
                e.q.to_string(),
                t.q.to_string(),
            );
            let expected_str = match &e.class_t {
                Some(RawClassT::Wahl { d, n, a }) => format!("(d,n,a)=({d},{n},{a})"),
                Some(RawClassT::Marker(m)) => m.clone(),
                None => "none".to_string(),
            };
            push_check(&mut checks, format!("chains[{i}].class_t"), expected_str, &class_t_str);
        }
        chain_reports.push(ChainReport {
            name: raw.chains[i].name.clone(),
            coeffs: chain.coeffs().to_vec(),
            p: t.p.to_string(),
            q: t.q.to_string(),
            class_t: class_t_str,
            boundary: String::new(),
            milnor: String::new(),
            discrepancies: Vec::new(),
        });
        types.push(t);
    }

    // boundary homology
    let bg = BoundaryGroup::from_chains(&chains).map_err(|e| stage_err("boundary", e))?;
    for (i, r) in chain_reports.iter_mut().enumerate() {
        r.boundary = FinAbGroup::cyclic(bg.orders()[i].clone()).to_string();
    }
    let boundary_total = bg.group();
    if let Some(expected) = &raw.expected.boundary_h1 {
        push_check(
            &mut checks,
            "boundary_h1",
            group_from_orders(expected).to_string(),
            boundary_total.to_string(),
        );
    }

    // Milnor fiber homology
    let mut milnor = Vec::with_capacity(chains.len());
    for (i, t) in types.iter().enumerate() {
        let m = tsingular::milnor_h1(t).map_err(|e| {
            stage_err("milnor", format!("chain '{}': {e}", raw.chains[i].name))
        })?;
        chain_reports[i].milnor = m.to_string();
        if let Some(expected) = &raw.expected.milnor_h1 {
            push_check(
                &mut checks,
                format!("milnor_h1[{i}]"),
                group_from_orders(&expected[i]).to_string(),
                m.to_string(),
            );
        }
        milnor.push(m);
    }

    // discrepancies
    for (i, chain) in chains.iter().enumerate() {
        let div = canonical::discrepancies(&cfg, chain).map_err(|e| stage_err("discrepancies", e))?;
        let ids = chain.curves().expect("bound");
        let coeffs: Vec<String> = ids.iter().map(|&u| div.coefficient(u).to_string()).collect();
        if let Some(expected) = &raw.expected.discrepancies {
            for (j, want) in expected[i].iter().enumerate() {
                let want_value = parse_rational(want).expect("validated");
                push_check(
                    &mut checks,
                    format!("discrepancies[{i}][{j}]"),
                    want_value.to_string(),
                    &coeffs[j],
                );
            }
        }
        chain_reports[i].discrepancies = coeffs;
    }

    // pullback degrees / nef report
    let nef_classes: Vec<CurveClass> = raw
        .nef_test_curves
        .iter()
        .map(|n| Ok(CurveClass::Curve(cfg.curve_id(n).map_err(|e| stage_err("pullback", e))?)))
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    let nef = canonical::nef_report(&cfg, &chains, &nef_classes)
        .map_err(|e| stage_err("pullback", e))?;
    let mut pullback_degrees = std::collections::BTreeMap::new();
    for entry in &nef.entries {
        pullback_degrees.insert(entry.name.clone(), entry.value.to_string());
    }
    if let Some(expected) = &raw.expected.pullback_degrees {
        for (name, want) in expected {
            let want_value = parse_rational(want).expect("validated").to_string();
            let computed = pullback_degrees
                .get(name)
                .cloned()
                .unwrap_or_else(|| "absent from nef list".to_string());
            push_check(&mut checks, format!("pullback_degrees.{name}"), want_value, computed);
        }
    }
    let nef_summary = NefSummary {
        nef_on_list: nef.nef_on_list,
        strict_on_list: nef.strict_on_list,
        coefficients_positive: nef.coefficients_positive,
        coefficients_in_unit_interval: nef.coefficients_in_unit_interval,
        entries: nef
            .entries
            .iter()
            .map(|e| NefEntryReport {
                curve: e.name.clone(),
                value: e.value.to_string(),
                sign: match e.sign {
                    canonical::SignVerdict::Negative => "negative".into(),
                    canonical::SignVerdict::Zero => "zero".into(),
                    canonical::SignVerdict::Positive => "positive".into(),
                },
                chain_member: e.chain_member,
            })
            .collect(),
    };

    // K^2 of the contraction
    let k2 = canonical::k_squared_contracted(&cfg, &chains).map_err(|e| stage_err("k2", e))?;
    if let Some(expected) = &raw.expected.k2_contracted {
        let want = parse_rational(expected).expect("validated").to_string();
        push_check(&mut checks, "k2_contracted", want, k2.to_string());
    }

    // conditional conclusions: stated as annotations, never computed facts
    let mut annotations = Vec::new();
    if !chains.is_empty() && !nef.entries.is_empty() && nef.nef_on_list && nef.coefficients_positive
    {
        annotations.push(
            "the pulled-back canonical class is nonnegative on the supplied curve list and \
             every contraction coefficient is positive; granting the listed assumptions, the \
             contracted surface has nef canonical class"
                .to_string(),
        );
        if num_traits::Signed::is_positive(&k2) {
            annotations.push(format!(
                "K^2 = {k2} > 0 together with the nef certificate places any smoothing outside \
                 Kodaira dimension 0 and 1, granting the listed assumptions"
            ));
        }
    }

    // image subgroup and membership certificates
    let sub = homology::partial_image_subgroup(&cfg, &chains, &classes)
        .map_err(|e| stage_err("membership", e))?;
    let mut membership = Vec::new();
    for m in &raw.membership_checks {
        let element: Vec<BigInt> = m.element.iter().map(|&v| BigInt::from(v)).collect();
        let in_image = sub.contains(&element).map_err(|e| stage_err("membership", e))?;
        push_check(
            &mut checks,
            format!("membership.{}", m.name),
            format!("in_image={}", m.expect_in_image),
            format!("in_image={in_image}"),
        );
        membership.push(MembershipReport {
            name: m.name.clone(),
            element: m.element.clone(),
            in_image,
            expected_in_image: m.expect_in_image,
        });
    }

    // H_1 of the chain complement
    let z0 = homology::h1_z0(&cfg, &chains, &classes, cfg.h1_ambient(), &declared)
        .map_err(|e| stage_err("h1_z0", e))?;
    let z0_report = match &z0 {
        H1Z0::Resolved(r) => H1Z0Report {
            order: r.order.to_string(),
            group: Some(factors_strings(&r.group)),
            display: Some(r.group.to_string()),
            candidates: None,
            note: r.note.clone(),
        },
        H1Z0::Unresolved { order, candidates, note } => H1Z0Report {
            order: order.to_string(),
            group: None,
            display: None,
            candidates: Some(candidates.iter().map(|g| g.to_string()).collect()),
            note: note.clone(),
        },
    };
    if let Some(expected) = &raw.expected.h1_z0 {
        push_check(&mut checks, "h1_z0.order", expected.order.to_string(), z0.order().to_string());
        if let Some(group) = &expected.group {
            let computed = match &z0 {
                H1Z0::Resolved(r) => r.group.to_string(),
                H1Z0::Unresolved { .. } => "unresolved".to_string(),
            };
            push_check(&mut checks, "h1_z0.group", group_from_orders(group).to_string(), computed);
        }
    }

    // Mayer-Vietoris cokernel
    let h1_blowdown = match &z0 {
        H1Z0::Resolved(r) => {
            let h1 = homology::mv_blowdown_h1(&r.presented, &milnor, &r.boundary_generator_words)
                .map_err(|e| stage_err("h1_blowdown", e))?;
            Some(h1)
        }
        H1Z0::Unresolved { .. } => None,
    };
    if let Some(expected) = &raw.expected.h1_blowdown {
        let computed = h1_blowdown
            .as_ref()
            .map(ToString::to_string)
            .unwrap_or_else(|| "unresolved".to_string());
        push_check(&mut checks, "h1_blowdown", group_from_orders(expected).to_string(), computed);
    }

    // provenance summary over points and classes
    let mut text = 0usize;
    let mut figure = 0usize;
    let mut asserted = 0usize;
    let mut flagged: Vec<String> = Vec::new();
    for p in &raw.points {
        match p.provenance {
            RawProvenance::Text => text += 1,
            RawProvenance::Figure => {
                figure += 1;
                flagged.push(format!("point {} (figure)", p.name));
            }
            RawProvenance::Asserted => {
                asserted += 1;
                flagged.push(format!("point {} (asserted)", p.name));
            }
        }
    }
    for c in &raw.h2_classes {
        match c.provenance {
            RawProvenance::Text => text += 1,
            RawProvenance::Figure => {
                figure += 1;
                flagged.push(format!("class {} (figure)", c.name));
            }
            RawProvenance::Asserted => {
                asserted += 1;
                flagged.push(format!("class {} (asserted)", c.name));
            }
        }
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(Report {
        scenario: raw.name.clone(),
        description: raw.description.clone(),
        surface: SurfaceSummary {
            name: raw.surface.name.clone(),
            k2: raw.surface.k2,
            b2: raw.surface.b2,
            h1: group_from_orders(&raw.surface.h1).to_string(),
        },
        blowups: raw.blowups.len(),
        k2_ambient: cfg.k2(),
        b2_ambient: cfg.b2(),
        chains: chain_reports,
        boundary_h1: factors_strings(&boundary_total),
        boundary_h1_display: boundary_total.to_string(),
        milnor_h1: milnor.iter().map(ToString::to_string).collect(),
        pullback_degrees,
        nef: nef_summary,
        k2_contracted: k2.to_string(),
        membership_certificates: membership,
        declared_relations: raw
            .declared_relations
            .iter()
            .map(|d| DeclaredRelationReport {
                name: d.name.clone(),
                statement: d.statement.clone(),
                note: d.note.clone(),
            })
            .collect(),
        assumptions: raw
            .assumptions
            .iter()
            .map(|a| AssumptionReport {
                name: a.name.clone(),
                statement: a.statement.clone(),
                note: a.note.clone(),
            })
            .collect(),
        annotations,
        h1_z0: z0_report,
        h1_blowdown: h1_blowdown.as_ref().map(factors_strings),
        h1_blowdown_display: h1_blowdown.as_ref().map(ToString::to_string),
        checks,
        provenance: ProvenanceSummary { text, figure, asserted, flagged },
        pass,
    })
}

#[cfg(test)]
mod tests;
