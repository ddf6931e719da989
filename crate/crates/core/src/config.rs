//! Curve configurations on a smooth projective surface and their transforms
//! under blow-up.
//!
//! The ambient surface is pure bookkeeping: `k2`, `b2` and the declared
//! first homology ride along as data, and the canonical degree of a curve
//! flows from adjunction (`K.C = 2g - 2 - C^2`) alone. No divisor-class
//! lattice is maintained.

use crate::exactalg::FinAbGroup;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown curve '{0}'")]
    UnknownCurve(String),
    #[error("unknown point '{0}'")]
    UnknownPoint(String),
    #[error("duplicate name '{0}'")]
    DuplicateName(String),
    #[error("point '{point}': branch multiplicity must be >= 1")]
    BadMultiplicity { point: String },
    #[error("point '{point}' needs at least one branch")]
    EmptyPoint { point: String },
    #[error("a fresh blow-up point may sit on at most two distinct curves, got {0}")]
    TooManyFreshCurves(usize),
    #[error("self-intersection of '{0}' requested through the pairwise query")]
    SelfPairQuery(String),
    #[error("blowing up a multiplicity-{mult} branch would make genus of '{curve}' negative")]
    GenusUnderflow { curve: String, mult: u32 },
}

/// Index of a curve inside one `Configuration`. Stable across blow-ups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveId(usize);

impl CurveId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    /// Part of the initial surface data.
    Given,
    /// Created by the blow-up with this history index.
    Exceptional { blowup: usize },
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub id: CurveId,
    pub name: String,
    pub genus: u32,
    pub self_int: i64,
    /// Canonical degree `K.C`, stored at creation and updated alongside the
    /// transform law so `validate` can catch tampering.
    pub k_deg: i64,
    pub origin: Origin,
    /// Names of blow-ups whose center lay on this curve (proper-transform
    /// lineage).
    pub transformed_by: Vec<String>,
}

impl Curve {
    pub fn is_proper_transform(&self) -> bool {
        !self.transformed_by.is_empty()
    }
}

/// Data provenance of a transcribed intersection point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    Text,
    Figure,
    Asserted,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Text => write!(f, "text"),
            Provenance::Figure => write!(f, "figure"),
            Provenance::Asserted => write!(f, "asserted"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IntersectionPoint {
    pub name: String,
    /// (curve, multiplicity >= 1); a transverse crossing of two curves is
    /// two branches of multiplicity 1. Distinct intersection points of the
    /// same pair are distinct records.
    pub branches: Vec<(CurveId, u32)>,
    pub provenance: Provenance,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BlowupRecord {
    pub name: String,
    pub at_point: String,
    pub branches: Vec<(String, u32)>,
}

/// Where to blow up: an existing recorded point, or a fresh point declared
/// on at most two named curves.
#[derive(Debug, Clone)]
pub enum PointSpec {
    Existing(String),
    Fresh { branches: Vec<(String, u32)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Adjunction { curve: String, stored: i64, recomputed: i64 },
    Referential { point: String },
    BadBranch { point: String },
    Conservation { field: &'static str, expected: i64, actual: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Adjunction { curve, stored, recomputed } => write!(
                f,
                "curve '{curve}': stored canonical degree {stored} disagrees with adjunction value {recomputed}"
            ),
            Violation::Referential { point } => {
                write!(f, "point '{point}' references a curve that does not exist")
            }
            Violation::BadBranch { point } => {
                write!(f, "point '{point}' has no branches or a multiplicity < 1")
            }
            Violation::Conservation { field, expected, actual } => {
                write!(f, "{field} should be {expected} after the recorded blow-ups, found {actual}")
            }
        }
    }
}

/// A surface together with its transcribed curve arrangement. Immutable in
/// use: `blow_up` returns a new value.
#[derive(Debug, Clone)]
pub struct Configuration {
    pub surface: String,
    k2: i64,
    b2: i64,
    initial_k2: i64,
    initial_b2: i64,
    h1_ambient: FinAbGroup,
    curves: Vec<Curve>,
    curve_index: BTreeMap<String, CurveId>,
    points: BTreeMap<String, IntersectionPoint>,
    history: Vec<BlowupRecord>,
}

impl Configuration {
    pub fn new(surface: &str, k2: i64, b2: i64, h1_ambient: FinAbGroup) -> Self {
        Self {
            surface: surface.to_string(),
            k2,
            b2,
            initial_k2: k2,
            initial_b2: b2,
            h1_ambient,
            curves: Vec::new(),
            curve_index: BTreeMap::new(),
            points: BTreeMap::new(),
            history: Vec::new(),
        }
    }

    pub fn k2(&self) -> i64 {
        self.k2
    }

    pub fn b2(&self) -> i64 {
        self.b2
    }

    pub fn h1_ambient(&self) -> &FinAbGroup {
        &self.h1_ambient
    }

    pub fn history(&self) -> &[BlowupRecord] {
        &self.history
    }

    pub fn num_blowups(&self) -> usize {
        self.history.len()
    }

    pub fn curves(&self) -> impl Iterator<Item = &Curve> {
        self.curves.iter()
    }

    pub fn points(&self) -> impl Iterator<Item = &IntersectionPoint> {
        self.points.values()
    }

    pub fn curve(&self, id: CurveId) -> &Curve {
        &self.curves[id.0]
    }

    pub fn curve_id(&self, name: &str) -> Result<CurveId, ConfigError> {
        self.curve_index
            .get(name)
            .copied()
            .ok_or_else(|| ConfigError::UnknownCurve(name.to_string()))
    }

    pub fn add_curve(&mut self, name: &str, genus: u32, self_int: i64) -> Result<CurveId, ConfigError> {
        self.add_curve_with_origin(name, genus, self_int, Origin::Given)
    }

    fn add_curve_with_origin(
        &mut self,
        name: &str,
        genus: u32,
        self_int: i64,
        origin: Origin,
    ) -> Result<CurveId, ConfigError> {
        if self.curve_index.contains_key(name) {
            return Err(ConfigError::DuplicateName(name.to_string()));
        }
        let id = CurveId(self.curves.len());
        self.curves.push(Curve {
            id,
            name: name.to_string(),
            genus,
            self_int,
            k_deg: 2 * genus as i64 - 2 - self_int,
            origin,
            transformed_by: Vec::new(),
        });
        self.curve_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_point(
        &mut self,
        name: &str,
        branches: &[(&str, u32)],
        provenance: Provenance,
        note: Option<&str>,
    ) -> Result<(), ConfigError> {
        if self.points.contains_key(name) {
            return Err(ConfigError::DuplicateName(name.to_string()));
        }
        if branches.is_empty() {
            return Err(ConfigError::EmptyPoint { point: name.to_string() });
        }
        let mut resolved = Vec::with_capacity(branches.len());
        for &(curve, mult) in branches {
            if mult < 1 {
                return Err(ConfigError::BadMultiplicity { point: name.to_string() });
            }
            resolved.push((self.curve_id(curve)?, mult));
        }
        self.points.insert(
            name.to_string(),
            IntersectionPoint {
                name: name.to_string(),
                branches: resolved,
                provenance,
                note: note.map(str::to_string),
            },
        );
        Ok(())
    }

    /// Pairwise intersection number: the sum over shared points of the
    /// product of branch multiplicities. Self-intersections are read from
    /// the curve record, not through this query.
    pub fn intersection_number(&self, a: CurveId, b: CurveId) -> Result<i64, ConfigError> {
        if a == b {
            return Err(ConfigError::SelfPairQuery(self.curve(a).name.clone()));
        }
        let mut total = 0i64;
        for p in self.points.values() {
            let ma: i64 = p.branches.iter().filter(|(c, _)| *c == a).map(|(_, m)| *m as i64).sum();
            let mb: i64 = p.branches.iter().filter(|(c, _)| *c == b).map(|(_, m)| *m as i64).sum();
            total += ma * mb;
        }
        Ok(total)
    }

    /// `K.C` from adjunction.
    pub fn canonical_degree(&self, c: CurveId) -> i64 {
        let curve = self.curve(c);
        2 * curve.genus as i64 - 2 - curve.self_int
    }

    /// Blow up at `spec`, returning the transformed configuration and the
    /// id of the new exceptional curve.
    ///
    /// For each branch `(C, m)` at the center: `C` loses `m^2` from its
    /// self-intersection (and `m(m-1)/2` from its genus), the new curve `e`
    /// meets `C` with multiplicity `m` at a single fresh point, and every
    /// crossing recorded at the center disappears.
    pub fn blow_up(
        &self,
        spec: &PointSpec,
        new_name: &str,
    ) -> Result<(Configuration, CurveId), ConfigError> {
        let mut next = self.clone();
        let (at_point, branches) = match spec {
            PointSpec::Existing(name) => {
                let p = next
                    .points
                    .remove(name)
                    .ok_or_else(|| ConfigError::UnknownPoint(name.clone()))?;
                (p.name, p.branches)
            }
            PointSpec::Fresh { branches } => {
                let mut distinct: Vec<&str> = branches.iter().map(|(c, _)| c.as_str()).collect();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() > 2 {
                    return Err(ConfigError::TooManyFreshCurves(distinct.len()));
                }
                if branches.is_empty() {
                    return Err(ConfigError::EmptyPoint { point: new_name.to_string() });
                }
                let mut resolved = Vec::with_capacity(branches.len());
                for (curve, mult) in branches {
                    if *mult < 1 {
                        return Err(ConfigError::BadMultiplicity { point: new_name.to_string() });
                    }
                    resolved.push((next.curve_id(curve)?, *mult));
                }
                (format!("<fresh:{new_name}>"), resolved)
            }
        };

        let record_branches: Vec<(String, u32)> = branches
            .iter()
            .map(|&(c, m)| (next.curve(c).name.clone(), m))
            .collect();

        for &(c, m) in &branches {
            let drop = m as i64 * m as i64;
            let genus_drop = m * (m - 1) / 2;
            let curve_name = next.curve(c).name.clone();
            let blowup_name = new_name.to_string();
            let curve = &mut next.curves[c.0];
            if genus_drop > curve.genus {
                return Err(ConfigError::GenusUnderflow { curve: curve_name, mult: m });
            }
            curve.self_int -= drop;
            curve.genus -= genus_drop;
            curve.k_deg += m as i64;
            curve.transformed_by.push(blowup_name);
        }

        let blowup_index = next.history.len();
        let e = next.add_curve_with_origin(new_name, 0, -1, Origin::Exceptional {
            blowup: blowup_index,
        })?;
        for &(c, m) in &branches {
            let pname = format!("{}*{}", new_name, next.curve(c).name);
            if next.points.contains_key(&pname) {
                return Err(ConfigError::DuplicateName(pname));
            }
            next.points.insert(
                pname.clone(),
                IntersectionPoint {
                    name: pname,
                    branches: vec![(e, 1), (c, m)],
                    provenance: Provenance::Text,
                    note: None,
                },
            );
        }

        next.k2 -= 1;
        next.b2 += 1;
        next.history.push(BlowupRecord {
            name: new_name.to_string(),
            at_point: at_point.clone(),
            branches: record_branches,
        });
        Ok((next, e))
    }

    /// All invariant violations; empty iff the configuration is consistent.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for c in &self.curves {
            let recomputed = 2 * c.genus as i64 - 2 - c.self_int;
            if recomputed != c.k_deg {
                out.push(Violation::Adjunction {
                    curve: c.name.clone(),
                    stored: c.k_deg,
                    recomputed,
                });
            }
        }
        for p in self.points.values() {
            if p.branches.is_empty() || p.branches.iter().any(|&(_, m)| m < 1) {
                out.push(Violation::BadBranch { point: p.name.clone() });
            }
            if p.branches.iter().any(|&(c, _)| c.0 >= self.curves.len()) {
                out.push(Violation::Referential { point: p.name.clone() });
            }
        }
        let n = self.history.len() as i64;
        if self.k2 != self.initial_k2 - n {
            out.push(Violation::Conservation {
                field: "k2",
                expected: self.initial_k2 - n,
                actual: self.k2,
            });
        }
        if self.b2 != self.initial_b2 + n {
            out.push(Violation::Conservation {
                field: "b2",
                expected: self.initial_b2 + n,
                actual: self.b2,
            });
        }
        out
    }

    /// Dual graph of the arrangement in DOT format: one node per curve
    /// (labelled name/self-intersection), one edge per intersecting pair
    /// with the intersection number as label.
    pub fn dual_graph_dot(&self) -> String {
        let mut out = String::from("graph dual {\n");
        out.push_str("  node [shape=ellipse];\n");
        let mut ids: Vec<&Curve> = self.curves.iter().collect();
        ids.sort_by(|a, b| a.name.cmp(&b.name));
        for c in &ids {
            out.push_str(&format!("  \"{}\" [label=\"{} ({})\"];\n", c.name, c.name, c.self_int));
        }
        for (i, a) in ids.iter().enumerate() {
            for b in ids.iter().skip(i + 1) {
                let n = self
                    .intersection_number(a.id, b.id)
                    .expect("distinct ids by construction");
                if n > 0 {
                    out.push_str(&format!(
                        "  \"{}\" -- \"{}\" [label=\"{}\"];\n",
                        a.name, b.name, n
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn enriques() -> Configuration {
        Configuration::new("Y", 0, 10, FinAbGroup::cyclic(BigUint::from(2u32)))
    }

    #[test]
    fn transverse_crossing_blow_up_arithmetic() {
        let mut cfg = enriques();
        cfg.add_curve("A", 0, -1).unwrap();
        cfg.add_curve("B", 0, -2).unwrap();
        cfg.add_point("AxB", &[("A", 1), ("B", 1)], Provenance::Text, None).unwrap();
        let a = cfg.curve_id("A").unwrap();
        let b = cfg.curve_id("B").unwrap();
        assert_eq!(cfg.intersection_number(a, b).unwrap(), 1);

        let (z, e) = cfg.blow_up(&PointSpec::Existing("AxB".into()), "e").unwrap();
        assert_eq!(z.curve(a).self_int, -2);
        assert_eq!(z.curve(b).self_int, -3);
        assert_eq!(z.intersection_number(e, a).unwrap(), 1);
        assert_eq!(z.intersection_number(e, b).unwrap(), 1);
        assert_eq!(z.intersection_number(a, b).unwrap(), 0);
        assert_eq!(z.curve(e).self_int, -1);
        assert_eq!(z.curve(e).genus, 0);
        assert_eq!(z.k2(), -1);
        assert_eq!(z.b2(), 11);
        assert!(z.validate().is_empty());
    }

    #[test]
    fn five_blow_ups_drop_k2_by_five() {
        let mut cfg = enriques();
        cfg.add_curve("C", 0, -2).unwrap();
        let mut cur = cfg;
        for i in 0..5 {
            let (next, _) = cur
                .blow_up(
                    &PointSpec::Fresh { branches: vec![("C".into(), 1)] },
                    &format!("e{i}"),
                )
                .unwrap();
            cur = next;
        }
        assert_eq!(cur.k2(), -5);
        assert_eq!(cur.b2(), 15);
        assert_eq!(cur.curve(cur.curve_id("C").unwrap()).self_int, -7);
        assert!(cur.validate().is_empty());
    }

    #[test]
    fn canonical_degree_from_adjunction() {
        let mut cfg = enriques();
        cfg.add_curve("u1", 0, -7).unwrap();
        cfg.add_curve("rdp", 0, -2).unwrap();
        cfg.add_curve("g2", 2, -1).unwrap();
        assert_eq!(cfg.canonical_degree(cfg.curve_id("u1").unwrap()), 5);
        assert_eq!(cfg.canonical_degree(cfg.curve_id("rdp").unwrap()), 0);
        assert_eq!(cfg.canonical_degree(cfg.curve_id("g2").unwrap()), 3);
        // exceptional curve: 2*0 - 2 - (-1) = -1
        let (z, e) = cfg
            .blow_up(&PointSpec::Fresh { branches: vec![("rdp".into(), 1)] }, "e")
            .unwrap();
        assert_eq!(z.canonical_degree(e), -1);
    }

    #[test]
    fn multiplicity_two_branch() {
        // Blowing up a double point of a genus-1 curve: self drops by 4,
        // genus by 1, K.C rises by 2, and e meets the transform twice.
        let mut cfg = enriques();
        cfg.add_curve("N", 1, 0).unwrap();
        let (z, e) = cfg
            .blow_up(&PointSpec::Fresh { branches: vec![("N".into(), 2)] }, "e")
            .unwrap();
        let n = z.curve_id("N").unwrap();
        assert_eq!(z.curve(n).self_int, -4);
        assert_eq!(z.curve(n).genus, 0);
        assert_eq!(z.canonical_degree(n), z.curve(n).k_deg);
        assert_eq!(z.intersection_number(e, n).unwrap(), 2);
        assert!(z.validate().is_empty());

        // a rational curve cannot lose genus
        let mut bad = enriques();
        bad.add_curve("R", 0, -2).unwrap();
        let err = bad.blow_up(&PointSpec::Fresh { branches: vec![("R".into(), 2)] }, "e");
        assert!(matches!(err, Err(ConfigError::GenusUnderflow { .. })));
    }

    #[test]
    fn blow_up_point_with_three_branches() {
        let mut cfg = enriques();
        cfg.add_curve("A", 0, -2).unwrap();
        cfg.add_curve("B", 0, -2).unwrap();
        cfg.add_curve("C", 0, -2).unwrap();
        cfg.add_point("triple", &[("A", 1), ("B", 1), ("C", 1)], Provenance::Text, None)
            .unwrap();
        let (z, e) = cfg.blow_up(&PointSpec::Existing("triple".into()), "e").unwrap();
        let a = z.curve_id("A").unwrap();
        let b = z.curve_id("B").unwrap();
        let c = z.curve_id("C").unwrap();
        for (x, y) in [(a, b), (a, c), (b, c)] {
            assert_eq!(z.intersection_number(x, y).unwrap(), 0);
        }
        for x in [a, b, c] {
            assert_eq!(z.intersection_number(e, x).unwrap(), 1);
            assert_eq!(z.curve(x).self_int, -3);
        }
    }

    #[test]
    fn validate_flags_tampering() {
        let mut cfg = enriques();
        cfg.add_curve("A", 0, -2).unwrap();
        assert!(cfg.validate().is_empty());
        cfg.curves[0].self_int = -5; // tamper without updating k_deg
        let violations = cfg.validate();
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], Violation::Adjunction { .. }));

        let mut cfg2 = enriques();
        cfg2.add_curve("A", 0, -2).unwrap();
        cfg2.points.insert(
            "ghost".into(),
            IntersectionPoint {
                name: "ghost".into(),
                branches: vec![(CurveId(99), 1)],
                provenance: Provenance::Text,
                note: None,
            },
        );
        let violations = cfg2.validate();
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], Violation::Referential { .. }));
    }

    #[test]
    fn errors_on_bad_input() {
        let mut cfg = enriques();
        cfg.add_curve("A", 0, -2).unwrap();
        assert!(matches!(cfg.add_curve("A", 0, -2), Err(ConfigError::DuplicateName(_))));
        assert!(matches!(
            cfg.add_point("p", &[("Z", 1)], Provenance::Text, None),
            Err(ConfigError::UnknownCurve(_))
        ));
        assert!(matches!(
            cfg.add_point("p", &[("A", 0)], Provenance::Text, None),
            Err(ConfigError::BadMultiplicity { .. })
        ));
        assert!(matches!(
            cfg.blow_up(&PointSpec::Existing("nope".into()), "e"),
            Err(ConfigError::UnknownPoint(_))
        ));
        let a = cfg.curve_id("A").unwrap();
        assert!(matches!(
            cfg.intersection_number(a, a),
            Err(ConfigError::SelfPairQuery(_))
        ));
    }

    #[test]
    fn two_point_pair_counts_twice() {
        let mut cfg = enriques();
        cfg.add_curve("E2", 0, -2).unwrap();
        cfg.add_curve("E16", 0, -2).unwrap();
        cfg.add_point("x1", &[("E2", 1), ("E16", 1)], Provenance::Text, None).unwrap();
        cfg.add_point("x2", &[("E2", 1), ("E16", 1)], Provenance::Text, None).unwrap();
        let a = cfg.curve_id("E2").unwrap();
        let b = cfg.curve_id("E16").unwrap();
        assert_eq!(cfg.intersection_number(a, b).unwrap(), 2);
    }

    #[test]
    fn random_blow_up_sequences_keep_intersections_symmetric_and_nonnegative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(97);
        for _ in 0..30 {
            let mut cfg = enriques();
            let n_curves = rng.gen_range(2..=5);
            for i in 0..n_curves {
                cfg.add_curve(&format!("C{i}"), 0, -rng.gen_range(1i64..=4)).unwrap();
            }
            let mut points = 0usize;
            for _ in 0..rng.gen_range(0..=6) {
                let a = rng.gen_range(0..n_curves);
                let b = rng.gen_range(0..n_curves);
                if a == b {
                    continue;
                }
                cfg.add_point(
                    &format!("p{points}"),
                    &[(&format!("C{a}"), 1), (&format!("C{b}"), 1)],
                    Provenance::Text,
                    None,
                )
                .unwrap();
                points += 1;
            }
            for step in 0..rng.gen_range(0..=4) {
                let names: Vec<String> = cfg.points().map(|p| p.name.clone()).collect();
                let spec = if !names.is_empty() && rng.gen_bool(0.7) {
                    PointSpec::Existing(names[rng.gen_range(0..names.len())].clone())
                } else {
                    let on = cfg.curves().map(|c| c.name.clone()).collect::<Vec<_>>();
                    PointSpec::Fresh {
                        branches: vec![(on[rng.gen_range(0..on.len())].clone(), 1)],
                    }
                };
                let (next, _) = cfg.blow_up(&spec, &format!("x{step}")).unwrap();
                cfg = next;
            }
            assert!(cfg.validate().is_empty());
            let ids: Vec<CurveId> = cfg.curves().map(|c| c.id).collect();
            for &a in &ids {
                for &b in &ids {
                    if a == b {
                        continue;
                    }
                    let ab = cfg.intersection_number(a, b).unwrap();
                    let ba = cfg.intersection_number(b, a).unwrap();
                    assert_eq!(ab, ba);
                    assert!(ab >= 0);
                }
            }
        }
    }

    #[test]
    fn dot_export_lists_nodes_and_edges() {
        let mut cfg = enriques();
        cfg.add_curve("A", 0, -2).unwrap();
        cfg.add_curve("B", 0, -4).unwrap();
        cfg.add_point("x", &[("A", 1), ("B", 1)], Provenance::Text, None).unwrap();
        let dot = cfg.dual_graph_dot();
        assert!(dot.contains("\"A\" [label=\"A (-2)\"]"));
        assert!(dot.contains("\"B\" [label=\"B (-4)\"]"));
        assert!(dot.contains("\"A\" -- \"B\" [label=\"1\"]"));
    }
}
