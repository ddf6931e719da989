//! Structured verification reports: one per scenario run, serializable to
//! JSON byte-identically across runs, plus a human-readable rendering.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceSummary {
    pub name: String,
    pub k2: i64,
    pub b2: i64,
    pub h1: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub name: String,
    pub coeffs: Vec<u64>,
    pub p: String,
    pub q: String,
    pub class_t: String,
    pub boundary: String,
    pub milnor: String,
    pub discrepancies: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NefEntryReport {
    pub curve: String,
    pub value: String,
    pub sign: String,
    pub chain_member: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NefSummary {
    pub nef_on_list: bool,
    pub strict_on_list: bool,
    pub coefficients_positive: bool,
    pub coefficients_in_unit_interval: bool,
    pub entries: Vec<NefEntryReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub name: String,
    pub element: Vec<i64>,
    pub in_image: bool,
    pub expected_in_image: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct H1Z0Report {
    pub order: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub display: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<String>>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

/// A declared identity the run leaned on, reproduced so a reader can audit
/// the non-computed inputs.
#[derive(Debug, Clone, Serialize)]
pub struct DeclaredRelationReport {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statement: Option<String>,
    pub note: String,
}

/// A scenario-level assumption: a statement the verification is conditional
/// on but never computes (smoothing existence, the surgery model, ...).
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub name: String,
    pub statement: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProvenanceSummary {
    pub text: usize,
    pub figure: usize,
    pub asserted: usize,
    /// Every non-text datum, listed so a reader can audit what a run
    /// leaned on beyond transcribed statements.
    pub flagged: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub surface: SurfaceSummary,
    pub blowups: usize,
    pub k2_ambient: i64,
    pub b2_ambient: i64,
    pub chains: Vec<ChainReport>,
    pub boundary_h1: Vec<String>,
    pub boundary_h1_display: String,
    /// Milnor-fiber homology per chain, in scenario order.
    pub milnor_h1: Vec<String>,
    pub pullback_degrees: std::collections::BTreeMap<String, String>,
    pub nef: NefSummary,
    pub k2_contracted: String,
    pub membership_certificates: Vec<MembershipReport>,
    pub declared_relations: Vec<DeclaredRelationReport>,
    pub assumptions: Vec<AssumptionReport>,
    /// Conclusions that hold only conditionally on the certificates and the
    /// listed assumptions; emitted as annotations, never as computed facts.
    pub annotations: Vec<String>,
    pub h1_z0: H1Z0Report,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h1_blowdown: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h1_blowdown_display: Option<String>,
    pub checks: Vec<CheckReport>,
    pub provenance: ProvenanceSummary,
    pub pass: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable rendering; `color` switches ANSI green/red verdicts.
    pub fn render_text(&self, color: bool) -> String {
        let verdict = |pass: bool| -> String {
            match (pass, color) {
                (true, true) => "\x1b[32mPASS\x1b[0m".into(),
                (false, true) => "\x1b[31mFAIL\x1b[0m".into(),
                (true, false) => "PASS".into(),
                (false, false) => "FAIL".into(),
            }
        };
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };

        line(format!("scenario: {}", self.scenario));
        if let Some(d) = &self.description {
            line(format!("  {d}"));
        }
        line(format!(
            "surface {}: k2={} b2={} h1={}",
            self.surface.name, self.surface.k2, self.surface.b2, self.surface.h1
        ));
        line(format!(
            "after {} blow-ups: k2={} b2={}",
            self.blowups, self.k2_ambient, self.b2_ambient
        ));
        line("chains:".into());
        for c in &self.chains {
            let coeffs: Vec<String> = c.coeffs.iter().map(u64::to_string).collect();
            line(format!(
                "  {} = [{}]  (p,q)=({},{})  class-T {}  boundary={}  milnor={}",
                c.name,
                coeffs.join(","),
                c.p,
                c.q,
                c.class_t,
                c.boundary,
                c.milnor
            ));
            line(format!("    discrepancies: {}", c.discrepancies.join(" ")));
        }
        line(format!("boundary H1 = {}", self.boundary_h1_display));
        if !self.pullback_degrees.is_empty() {
            let parts: Vec<String> = self
                .pullback_degrees
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            line(format!("pullback degrees: {}", parts.join(" ")));
            line(format!(
                "nef on list: {}  strict on list: {}  coefficients positive: {}",
                self.nef.nef_on_list, self.nef.strict_on_list, self.nef.coefficients_positive
            ));
        }
        line(format!("k2 contracted = {}", self.k2_contracted));
        for m in &self.membership_certificates {
            let elt: Vec<String> = m.element.iter().map(i64::to_string).collect();
            line(format!(
                "membership {}: ({}) in image: {} (expected {})",
                m.name,
                elt.join(","),
                m.in_image,
                m.expected_in_image
            ));
        }
        for d in &self.declared_relations {
            match &d.statement {
                Some(s) => line(format!("declared input {}: {s}", d.name)),
                None => line(format!("declared input {}", d.name)),
            }
        }
        for a in &self.assumptions {
            line(format!("assumption {}: {}", a.name, a.statement));
        }
        for a in &self.annotations {
            line(format!("annotation: {a}"));
        }
        match (&self.h1_z0.display, &self.h1_z0.candidates) {
            (Some(g), _) => line(format!("h1(complement): order {} group {}", self.h1_z0.order, g)),
            (None, Some(cands)) => line(format!(
                "h1(complement): order {} candidates {{{}}}",
                self.h1_z0.order,
                cands.join(", ")
            )),
            (None, None) => line(format!("h1(complement): order {}", self.h1_z0.order)),
        }
        if let Some(g) = &self.h1_blowdown_display {
            line(format!("h1_blowdown: {g}"));
        }
        if self.provenance.figure + self.provenance.asserted > 0 {
            line(format!(
                "provenance: {} text, {} figure, {} asserted",
                self.provenance.text, self.provenance.figure, self.provenance.asserted
            ));
            for f in &self.provenance.flagged {
                line(format!("  flagged: {f}"));
            }
        } else {
            line(format!("provenance: all {} data items from stated text", self.provenance.text));
        }
        line(format!("checks ({} total):", self.checks.len()));
        for c in &self.checks {
            if c.pass {
                line(format!("  [{}] {}: {}", verdict(true), c.name, c.computed));
            } else {
                line(format!(
                    "  [{}] {}: expected {}, computed {}",
                    verdict(false),
                    c.name,
                    c.expected,
                    c.computed
                ));
            }
        }
        line(format!("result: {}", verdict(self.pass)));
        out
    }
}
