//! First homology bookkeeping for the rational blow-down: the boundary
//! group of the removed plumbings, images of second-homology classes under
//! the connecting map, the order and structure of `H_1` of the chain
//! complement, and the Mayer-Vietoris cokernel giving `H_1` of the surgered
//! 4-manifold.
//!
//! Everything a loop-lifting or covering-space argument supplies enters as
//! a *declared relation* carried by the scenario, never as a computed fact;
//! the engine enforces consistency with everything it can compute.

use crate::config::{Configuration, CurveId, Provenance};
use crate::exactalg::{self, FinAbGroup, IntMatrix, PresentedGroup};
use crate::tsingular::{self, Chain};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("element has {got} coordinates, boundary group has {want} summands")]
    BadElementLength { got: usize, want: usize },
    #[error("class '{class}': {reason}")]
    BadClass { class: String, reason: String },
    #[error("declared relation '{name}': {reason}")]
    BadDeclaredRelation { name: String, reason: String },
    #[error("declared relations are inconsistent: the presented group has order {got}, the extension count gives {want}")]
    InconsistentDeclaredRelation { got: BigUint, want: BigUint },
    #[error("ambient first homology must be finite")]
    AmbientNotFinite,
    #[error("candidate enumeration past desk scale (order {0})")]
    TooLargeForEnumeration(BigUint),
    #[error("Milnor summand {0} is not cyclic or trivial")]
    MilnorNotCyclic(usize),
    #[error("image word {index} has {got} coordinates, the complement group has {want} generators")]
    ImageNotInGroup { index: usize, got: usize, want: usize },
    #[error(transparent)]
    Chain(#[from] tsingular::ChainError),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Exactalg(#[from] crate::exactalg::ExactalgError),
}

/// Direct sum of the per-chain boundary lens-space homologies, in scenario
/// order. Elements live in per-chain coordinates: one coordinate per chain,
/// reduced modulo that chain's boundary order.
#[derive(Debug, Clone)]
pub struct BoundaryGroup {
    orders: Vec<BigUint>,
    /// `meridians[i][j]`: class of the normal circle of the j-th curve of
    /// chain i, as a multiple of the chain's canonical generator.
    meridians: Vec<Vec<BigInt>>,
}

impl BoundaryGroup {
    pub fn from_chains(chains: &[Chain]) -> Result<Self, HomologyError> {
        let mut orders = Vec::with_capacity(chains.len());
        let mut meridians = Vec::with_capacity(chains.len());
        for chain in chains {
            let boundary = tsingular::boundary_homology(chain)?;
            let order = boundary.group.order().expect("lens homology is finite");
            let coords: Vec<BigInt> = boundary
                .meridians
                .iter()
                .map(|m| m.first().cloned().unwrap_or_else(BigInt::zero))
                .collect();
            orders.push(order);
            meridians.push(coords);
        }
        Ok(Self { orders, meridians })
    }

    pub fn num_chains(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[BigUint] {
        &self.orders
    }

    pub fn order(&self) -> BigUint {
        self.orders.iter().product()
    }

    /// Canonical invariant-factor form of the direct sum.
    pub fn group(&self) -> FinAbGroup {
        FinAbGroup::canonical_from_orders(&self.orders)
    }

    pub fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.orders.len()]
    }

    pub fn reduce(&self, x: &[BigInt]) -> Result<Vec<BigInt>, HomologyError> {
        if x.len() != self.orders.len() {
            return Err(HomologyError::BadElementLength {
                got: x.len(),
                want: self.orders.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.orders)
            .map(|(v, p)| v.mod_floor(&BigInt::from(p.clone())))
            .collect())
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Result<Vec<BigInt>, HomologyError> {
        let a = self.reduce(a)?;
        let b = self.reduce(b)?;
        self.reduce(&a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>())
    }

    /// Class of the normal circle over curve `position` of chain `chain`.
    pub fn meridian(&self, chain: usize, position: usize) -> Result<Vec<BigInt>, HomologyError> {
        let coord = self
            .meridians
            .get(chain)
            .and_then(|m| m.get(position))
            .ok_or_else(|| HomologyError::BadClass {
                class: format!("meridian({chain},{position})"),
                reason: "no such chain position".into(),
            })?;
        let mut e = self.zero();
        e[chain] = coord.clone();
        self.reduce(&e)
    }

    /// The canonical generator of chain `chain`'s summand.
    pub fn chain_generator(&self, chain: usize) -> Result<Vec<BigInt>, HomologyError> {
        if chain >= self.orders.len() {
            return Err(HomologyError::BadElementLength {
                got: chain,
                want: self.orders.len(),
            });
        }
        let mut e = self.zero();
        e[chain] = BigInt::one();
        Ok(e)
    }
}

/// A second-homology class declared by the scenario, with its provenance.
#[derive(Debug, Clone)]
pub struct RelationClass {
    pub name: String,
    pub spec: ClassSpec,
    pub provenance: Provenance,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub enum ClassSpec {
    Curve(CurveId),
    Combination(Vec<(i64, CurveId)>),
    /// Intersection numbers with the chain curves, given directly (outer
    /// index = chain, inner = position). Used for fiber or half-pencil
    /// classes that are not single curve records.
    Direct(Vec<Vec<i64>>),
}

fn pair_with_chain_curve(
    cfg: &Configuration,
    class_curve: CurveId,
    chain_curve: CurveId,
) -> Result<i64, HomologyError> {
    if class_curve == chain_curve {
        Ok(cfg.curve(chain_curve).self_int)
    } else {
        Ok(cfg.intersection_number(class_curve, chain_curve)?)
    }
}

/// Image of a class under the connecting map: the sum over all chain
/// curves `u` of `(class . u) * meridian(u)`, reduced in the boundary
/// group. A curve that meets no chain maps to zero; a chain curve itself
/// maps to a row of the intersection matrix, hence to zero.
pub fn boundary_image(
    cfg: &Configuration,
    chains: &[Chain],
    bg: &BoundaryGroup,
    class: &RelationClass,
) -> Result<Vec<BigInt>, HomologyError> {
    let mut acc = bg.zero();
    for (ci, chain) in chains.iter().enumerate() {
        let ids = chain.curves().ok_or_else(|| HomologyError::BadClass {
            class: class.name.clone(),
            reason: "chains must be bound to configuration curves".into(),
        })?;
        let mut coord = BigInt::zero();
        for (pos, &u) in ids.iter().enumerate() {
            let pairing: i64 = match &class.spec {
                ClassSpec::Curve(c) => pair_with_chain_curve(cfg, *c, u)?,
                ClassSpec::Combination(terms) => {
                    let mut s = 0i64;
                    for &(k, c) in terms {
                        s += k * pair_with_chain_curve(cfg, c, u)?;
                    }
                    s
                }
                ClassSpec::Direct(rows) => {
                    let row = rows.get(ci).ok_or_else(|| HomologyError::BadClass {
                        class: class.name.clone(),
                        reason: format!("direct class needs {} chain rows", chains.len()),
                    })?;
                    *row.get(pos).ok_or_else(|| HomologyError::BadClass {
                        class: class.name.clone(),
                        reason: format!(
                            "direct class row {ci} needs {} entries",
                            ids.len()
                        ),
                    })?
                }
            };
            coord += BigInt::from(pairing) * &bg.meridians[ci][pos];
        }
        acc[ci] = coord;
    }
    bg.reduce(&acc)
}

/// The subgroup of the boundary group generated by the images of the
/// supplied classes, with exact membership queries.
#[derive(Debug, Clone)]
pub struct ImageSubgroup {
    orders: Vec<BigUint>,
    generators: Vec<Vec<BigInt>>,
}

pub fn partial_image_subgroup(
    cfg: &Configuration,
    chains: &[Chain],
    classes: &[RelationClass],
) -> Result<ImageSubgroup, HomologyError> {
    let bg = BoundaryGroup::from_chains(chains)?;
    let generators = classes
        .iter()
        .map(|c| boundary_image(cfg, chains, &bg, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ImageSubgroup { orders: bg.orders.clone(), generators })
}

impl ImageSubgroup {
    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn contains(&self, x: &[BigInt]) -> Result<bool, HomologyError> {
        if x.len() != self.orders.len() {
            return Err(HomologyError::BadElementLength {
                got: x.len(),
                want: self.orders.len(),
            });
        }
        Ok(exactalg::lattice_membership(
            &self.generators,
            &self.orders,
            self.orders.len(),
            x,
        )?)
    }

    /// The boundary group presented on the per-chain generators.
    fn boundary_presented(&self) -> PresentedGroup {
        let k = self.orders.len();
        let names: Vec<String> = (0..k).map(|i| format!("b{i}")).collect();
        let rels = IntMatrix::from_fn(k, k, |i, j| {
            if i == j {
                BigInt::from(self.orders[i].clone())
            } else {
                BigInt::zero()
            }
        });
        PresentedGroup::new(names, rels).expect("diagonal presentation")
    }

    /// Quotient of the boundary group by this subgroup.
    pub fn quotient(&self) -> Result<FinAbGroup, HomologyError> {
        Ok(exactalg::quotient(&self.boundary_presented(), &self.generators)?)
    }

    pub fn boundary_order(&self) -> BigUint {
        self.orders.iter().product()
    }

    pub fn subgroup_order(&self) -> Result<BigUint, HomologyError> {
        let q = self.quotient()?;
        let q_order = q.order().expect("quotient of a finite group is finite");
        Ok(self.boundary_order() / q_order)
    }
}

/// One term of a declared-relation word: `coeff` times the meridian of
/// `(chain, position)`.
#[derive(Debug, Clone)]
pub struct MeridianTerm {
    pub chain: usize,
    pub position: usize,
    pub coeff: i64,
}

/// A scenario-supplied identity `h * t = word`, where `t` lifts the
/// ambient torsion generator with invariant factor `h` and `word` is a
/// formal sum of meridians. These encode conclusions of geometric
/// arguments that the algebra alone cannot see.
#[derive(Debug, Clone)]
pub struct DeclaredRelation {
    pub name: String,
    /// Index into the ambient group's invariant factors.
    pub lift_index: usize,
    pub boundary_word: Vec<MeridianTerm>,
    pub note: Option<String>,
}

/// Result of the complement-homology computation.
#[derive(Debug, Clone)]
pub enum H1Z0 {
    Resolved(ResolvedZ0),
    Unresolved {
        order: BigUint,
        candidates: Vec<FinAbGroup>,
        note: String,
    },
}

#[derive(Debug, Clone)]
pub struct ResolvedZ0 {
    pub order: BigUint,
    pub group: FinAbGroup,
    /// Presentation on the chain boundary generators followed by the
    /// ambient lifts.
    pub presented: PresentedGroup,
    /// Word of each chain's canonical boundary generator over the
    /// presented generators (the unit vector at that generator).
    pub boundary_generator_words: Vec<Vec<BigInt>>,
    pub note: String,
}

impl H1Z0 {
    pub fn order(&self) -> &BigUint {
        match self {
            H1Z0::Resolved(r) => &r.order,
            H1Z0::Unresolved { order, .. } => order,
        }
    }
}

/// `H_1` of the complement of the chains, from the extension
/// `0 -> (boundary group / image) -> H_1 -> H_1(ambient) -> 0`.
///
/// The order is the extension count `|B/S| * |H_1(ambient)|`. The group
/// structure requires a declared relation per ambient invariant factor;
/// without one, the candidate set of extensions is returned instead of a
/// guess. A declared relation that contradicts the computed order is a
/// hard error.
pub fn h1_z0(
    cfg: &Configuration,
    chains: &[Chain],
    classes: &[RelationClass],
    h1_ambient: &FinAbGroup,
    declared: &[DeclaredRelation],
) -> Result<H1Z0, HomologyError> {
    let ambient_order = h1_ambient.order().ok_or(HomologyError::AmbientNotFinite)?;
    let bg = BoundaryGroup::from_chains(chains)?;
    let sub = partial_image_subgroup(cfg, chains, classes)?;
    let quotient = sub.quotient()?;
    let q_order = quotient.order().expect("finite");
    let order = &q_order * &ambient_order;

    let m = h1_ambient.torsion().len();
    let mut covered = BTreeSet::new();
    for d in declared {
        if d.lift_index >= m {
            return Err(HomologyError::BadDeclaredRelation {
                name: d.name.clone(),
                reason: format!(
                    "lift index {} out of range for ambient with {} torsion factors",
                    d.lift_index, m
                ),
            });
        }
        covered.insert(d.lift_index);
    }
    // When the image exhausts the boundary group, every lift relation is
    // forced to be zero and the extension splits; no declaration needed.
    let forced_split = quotient.is_trivial();
    if covered.len() < m && !forced_split {
        let mut candidates = extension_candidates(&quotient, h1_ambient)?;
        candidates.sort_by(|a, b| a.torsion().cmp(b.torsion()));
        return Ok(H1Z0::Unresolved {
            order,
            note: format!(
                "extension of {} by {} undetermined without declared relations",
                h1_ambient, quotient
            ),
            candidates,
        });
    }

    // Presentation: chain boundary generators, then ambient lifts.
    let k = bg.num_chains();
    let mut names: Vec<String> = (0..k).map(|i| format!("b{i}")).collect();
    names.extend((0..m).map(|j| format!("t{j}")));
    let width = k + m;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (i, p) in bg.orders().iter().enumerate() {
        let mut row = vec![BigInt::zero(); width];
        row[i] = BigInt::from(p.clone());
        rows.push(row);
    }
    for g in sub.generators() {
        let mut row = vec![BigInt::zero(); width];
        row[..k].clone_from_slice(g);
        rows.push(row);
    }
    for j in 0..m {
        if forced_split && !covered.contains(&j) {
            let mut row = vec![BigInt::zero(); width];
            row[k + j] = BigInt::from(h1_ambient.torsion()[j].clone());
            rows.push(row);
        }
    }
    for d in declared {
        let mut row = vec![BigInt::zero(); width];
        for term in &d.boundary_word {
            let meridian = bg.meridian(term.chain, term.position).map_err(|_| {
                HomologyError::BadDeclaredRelation {
                    name: d.name.clone(),
                    reason: format!("no meridian ({}, {})", term.chain, term.position),
                }
            })?;
            for (slot, v) in row[..k].iter_mut().zip(&meridian) {
                *slot -= BigInt::from(term.coeff) * v;
            }
        }
        row[k + d.lift_index] = BigInt::from(h1_ambient.torsion()[d.lift_index].clone());
        rows.push(row);
    }
    let rels = IntMatrix::from_fn(rows.len(), width, |i, j| rows[i][j].clone());
    let presented = PresentedGroup::new(names, rels)?;
    let group = presented.canonicalize().group;
    let got = group.order().expect("finite by construction");
    if got != order {
        return Err(HomologyError::InconsistentDeclaredRelation { got, want: order });
    }
    let boundary_generator_words = (0..k)
        .map(|i| {
            let mut w = vec![BigInt::zero(); width];
            w[i] = BigInt::one();
            w
        })
        .collect();
    let note = if forced_split && covered.len() < m {
        "resolved: the boundary image is full, so the extension splits".to_string()
    } else {
        format!("resolved by {} declared relation(s)", declared.len())
    };
    Ok(H1Z0::Resolved(ResolvedZ0 {
        order,
        note,
        group,
        presented,
        boundary_generator_words,
    }))
}

/// All abelian groups of order `n`, canonical and sorted.
fn abelian_groups_of_order(n: u64) -> Vec<FinAbGroup> {
    fn partitions(e: u32) -> Vec<Vec<u32>> {
        fn go(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if rest == 0 {
                out.push(cur.clone());
                return;
            }
            for part in (1..=rest.min(max)).rev() {
                cur.push(part);
                go(rest - part, part, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(e, e, &mut Vec::new(), &mut out);
        out
    }

    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += 1;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }

    let mut combos: Vec<Vec<BigUint>> = vec![Vec::new()];
    for (p, e) in factors {
        let parts = partitions(e);
        let mut next = Vec::new();
        for combo in &combos {
            for lambda in &parts {
                let mut c = combo.clone();
                for &l in lambda {
                    c.push(BigUint::from(p).pow(l));
                }
                next.push(c);
            }
        }
        combos = next;
    }
    let mut out: Vec<FinAbGroup> = combos
        .into_iter()
        .map(|orders| FinAbGroup::canonical_from_orders(&orders))
        .collect();
    out.sort_by(|a, b| a.torsion().cmp(b.torsion()));
    out.dedup();
    out
}

/// The abelian groups `G` fitting `0 -> sub -> G -> quot -> 0`, by brute
/// force over injections; desk scale only (order <= 512).
fn extension_candidates(
    sub: &FinAbGroup,
    quot: &FinAbGroup,
) -> Result<Vec<FinAbGroup>, HomologyError> {
    let n_big = sub.order().ok_or(HomologyError::AmbientNotFinite)?
        * quot.order().ok_or(HomologyError::AmbientNotFinite)?;
    let n = n_big
        .to_u64()
        .filter(|&n| n <= 512)
        .ok_or(HomologyError::TooLargeForEnumeration(n_big.clone()))?;

    let sub_elements = sub.enumerate_elements()?;
    let mut out = Vec::new();
    'groups: for g in abelian_groups_of_order(n) {
        if sub.is_trivial() {
            if g == *quot {
                out.push(g);
            }
            continue;
        }
        let g_elements = g.enumerate_elements()?;
        // candidate images per subgroup generator: elements killed by the
        // generator's invariant factor
        let slots: Vec<Vec<&Vec<BigInt>>> = sub
            .torsion()
            .iter()
            .map(|q| {
                let q = BigInt::from(q.clone());
                g_elements
                    .iter()
                    .filter(|x| {
                        let scaled: Vec<BigInt> = x.iter().map(|v| v * &q).collect();
                        g.reduce(&scaled).expect("length ok").iter().all(Zero::is_zero)
                    })
                    .collect()
            })
            .collect();
        let mut budget: u64 = 2_000_000;
        let mut choice: Vec<usize> = vec![0; slots.len()];
        'tuples: loop {
            budget = budget.checked_sub(1).ok_or_else(|| {
                HomologyError::TooLargeForEnumeration(n_big.clone())
            })?;
            let images: Vec<Vec<BigInt>> =
                choice.iter().zip(&slots).map(|(&i, s)| s[i].clone()).collect();
            // injective iff only the zero element of `sub` maps to zero
            let mut injective = true;
            for e in &sub_elements {
                if e.iter().all(Zero::is_zero) {
                    continue;
                }
                let mut acc = vec![BigInt::zero(); g.rank()];
                for (c, img) in e.iter().zip(&images) {
                    for (slot, v) in acc.iter_mut().zip(img) {
                        *slot += c * v;
                    }
                }
                if g.reduce(&acc)?.iter().all(Zero::is_zero) {
                    injective = false;
                    break;
                }
            }
            if injective {
                let q = exactalg::quotient(&g.to_presented(), &images)?;
                if q == *quot {
                    out.push(g.clone());
                    continue 'groups;
                }
            }
            // odometer over image choices
            let mut i = 0;
            loop {
                if i == choice.len() {
                    break 'tuples;
                }
                choice[i] += 1;
                if choice[i] < slots[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
    Ok(out)
}

/// `H_1` of the rational blow-down via the Mayer-Vietoris cokernel: the
/// quotient of `z0 + (sum of Milnor homologies)` by, for each chain, the
/// image `(k(g_i), j(g_i))` of the boundary generator, where `k(g_i)` is
/// the supplied word in `z0` and `j(g_i)` generates the Milnor summand.
pub fn mv_blowdown_h1(
    z0: &PresentedGroup,
    milnor: &[FinAbGroup],
    images_in_z0: &[Vec<BigInt>],
) -> Result<FinAbGroup, HomologyError> {
    if milnor.len() != images_in_z0.len() {
        return Err(HomologyError::BadElementLength {
            got: images_in_z0.len(),
            want: milnor.len(),
        });
    }
    let z0_gens = z0.generators().len();
    for (i, w) in images_in_z0.iter().enumerate() {
        if w.len() != z0_gens {
            return Err(HomologyError::ImageNotInGroup {
                index: i,
                got: w.len(),
                want: z0_gens,
            });
        }
    }
    let mut milnor_slot: Vec<Option<usize>> = Vec::with_capacity(milnor.len());
    let mut milnor_orders: Vec<BigUint> = Vec::new();
    for (i, m) in milnor.iter().enumerate() {
        if !m.is_finite() || m.torsion().len() > 1 {
            return Err(HomologyError::MilnorNotCyclic(i));
        }
        if m.is_trivial() {
            milnor_slot.push(None);
        } else {
            milnor_slot.push(Some(z0_gens + milnor_orders.len()));
            milnor_orders.push(m.torsion()[0].clone());
        }
    }
    let width = z0_gens + milnor_orders.len();
    let mut names: Vec<String> = z0.generators().to_vec();
    names.extend((0..milnor_orders.len()).map(|i| format!("m{i}")));

    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for r in 0..z0.relations().rows() {
        let mut row = vec![BigInt::zero(); width];
        row[..z0_gens].clone_from_slice(z0.relations().row(r));
        rows.push(row);
    }
    for (slot, n) in milnor_orders.iter().enumerate() {
        let mut row = vec![BigInt::zero(); width];
        row[z0_gens + slot] = BigInt::from(n.clone());
        rows.push(row);
    }
    for (i, w) in images_in_z0.iter().enumerate() {
        let mut row = vec![BigInt::zero(); width];
        row[..z0_gens].clone_from_slice(w);
        if let Some(slot) = milnor_slot[i] {
            row[slot] = BigInt::one();
        }
        rows.push(row);
    }
    let rels = IntMatrix::from_fn(rows.len(), width, |i, j| rows[i][j].clone());
    let combined = PresentedGroup::new(names, rels)?;
    Ok(combined.canonicalize().group)
}
