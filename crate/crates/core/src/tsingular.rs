//! Hirzebruch-Jung chains and class-T cyclic quotient singularities:
//! classification, boundary lens-space homology, Milnor fiber homology.
//!
//! Chains are read left to right; reversing a chain gives the dual type
//! `(p, q')` with `q q' = 1 mod p`. Both orientations classify identically,
//! but bound chains keep the orientation they were written in so that
//! meridian indexing stays aligned with the configuration.

use crate::config::{Configuration, CurveId};
use crate::exactalg::{self, FinAbGroup, GroupMap, IntMatrix, PresentedGroup};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain must be nonempty")]
    EmptyChain,
    #[error("chain entries must be >= 2, found {0}")]
    EntryTooSmall(u64),
    #[error("invalid lens data (p, q) = ({p}, {q}): need 0 < q < p and gcd(p, q) = 1")]
    InvalidPQ { p: BigUint, q: BigUint },
    #[error("continued-fraction digit exceeds the supported entry width")]
    EntryOverflow,
    #[error("type is not of class T")]
    NotClassT,
    #[error("chain binding: {0}")]
    BindMismatch(String),
    #[error("configuration error: {0}")]
    Config(#[from] crate::config::ConfigError),
}

/// An ordered linear chain `[b1, ..., br]` of rational curves slated for
/// contraction, optionally bound to curves of a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    coeffs: Vec<u64>,
    curves: Option<Vec<CurveId>>,
}

impl Chain {
    pub fn from_coeffs(coeffs: Vec<u64>) -> Result<Self, ChainError> {
        validate_coeffs(&coeffs)?;
        Ok(Self { coeffs, curves: None })
    }

    /// Bind an ordered list of configuration curves as a chain, checking
    /// the plumbing shape: genus 0, self-intersection `-b_i <= -2`,
    /// consecutive curves meeting exactly once, all others disjoint.
    pub fn bind(cfg: &Configuration, curve_ids: &[CurveId]) -> Result<Self, ChainError> {
        if curve_ids.is_empty() {
            return Err(ChainError::EmptyChain);
        }
        let mut coeffs = Vec::with_capacity(curve_ids.len());
        for &id in curve_ids {
            let c = cfg.curve(id);
            if c.genus != 0 {
                return Err(ChainError::BindMismatch(format!(
                    "curve '{}' has genus {}, chains need rational curves",
                    c.name, c.genus
                )));
            }
            if c.self_int > -2 {
                return Err(ChainError::BindMismatch(format!(
                    "curve '{}' has self-intersection {}, need <= -2",
                    c.name, c.self_int
                )));
            }
            coeffs.push((-c.self_int) as u64);
        }
        for i in 0..curve_ids.len() {
            for j in i + 1..curve_ids.len() {
                let n = cfg.intersection_number(curve_ids[i], curve_ids[j])?;
                let want = if j == i + 1 { 1 } else { 0 };
                if n != want {
                    return Err(ChainError::BindMismatch(format!(
                        "curves '{}' and '{}' meet {} times, expected {}",
                        cfg.curve(curve_ids[i]).name,
                        cfg.curve(curve_ids[j]).name,
                        n,
                        want
                    )));
                }
            }
        }
        Ok(Self { coeffs, curves: Some(curve_ids.to_vec()) })
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn curves(&self) -> Option<&[CurveId]> {
        self.curves.as_deref()
    }

    pub fn reversed(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().rev().copied().collect(),
            curves: self.curves.as_ref().map(|c| c.iter().rev().copied().collect()),
        }
    }

    /// Intersection matrix of the plumbing: `-b_i` on the diagonal, `1` on
    /// the super- and sub-diagonal.
    pub fn intersection_matrix(&self) -> IntMatrix {
        chain_matrix(&self.coeffs)
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}]",
            self.coeffs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        )
    }
}

pub fn chain_matrix(coeffs: &[u64]) -> IntMatrix {
    let r = coeffs.len();
    IntMatrix::from_fn(r, r, |i, j| {
        if i == j {
            -BigInt::from(coeffs[i])
        } else if i.abs_diff(j) == 1 {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    })
}

fn validate_coeffs(coeffs: &[u64]) -> Result<(), ChainError> {
    if coeffs.is_empty() {
        return Err(ChainError::EmptyChain);
    }
    if let Some(&b) = coeffs.iter().find(|&&b| b < 2) {
        return Err(ChainError::EntryTooSmall(b));
    }
    Ok(())
}

/// The class-T marker of a cyclic quotient type: either the Wahl-type data
/// `(d, n, a)` with `p = d n^2`, `q = d n a - 1`, or a rational double
/// point (every `b_i = 2`), which smooths with trivial Milnor `H_1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassT {
    Wahl { d: BigUint, n: BigUint, a: BigUint },
    RationalDoublePoint,
}

/// Lens data `(p, q)` of a cyclic quotient singularity together with its
/// class-T decomposition when one exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicQuotientType {
    pub p: BigUint,
    pub q: BigUint,
    pub class_t: Option<ClassT>,
}

impl CyclicQuotientType {
    pub fn is_class_t(&self) -> bool {
        self.class_t.is_some()
    }

    /// `n` of the Wahl data; `1` for a rational double point.
    pub fn milnor_order(&self) -> Result<BigUint, ChainError> {
        match &self.class_t {
            Some(ClassT::Wahl { n, .. }) => Ok(n.clone()),
            Some(ClassT::RationalDoublePoint) => Ok(BigUint::one()),
            None => Err(ChainError::NotClassT),
        }
    }
}

fn eval_small(coeffs: &[u64]) -> Option<(u128, u128)> {
    let mut iter = coeffs.iter().rev();
    let mut num: u128 = *iter.next()? as u128;
    let mut den: u128 = 1;
    for &b in iter {
        // b - den/num = (b*num - den)/num; coprimality is preserved.
        let t = (b as u128).checked_mul(num)?.checked_sub(den)?;
        den = num;
        num = t;
    }
    Some((num, den))
}

/// Evaluate `b1 - 1/(b2 - 1/(... - 1/br))` right to left in exact
/// rationals, returning `(p, q)` in lowest terms.
pub fn hj_eval(coeffs: &[u64]) -> Result<(BigUint, BigUint), ChainError> {
    validate_coeffs(coeffs)?;
    if let Some((p, q)) = eval_small(coeffs) {
        return Ok((BigUint::from(p), BigUint::from(q)));
    }
    let mut iter = coeffs.iter().rev();
    let mut num = BigUint::from(*iter.next().expect("nonempty"));
    let mut den = BigUint::one();
    for &b in iter {
        let t = BigUint::from(b) * &num - den;
        den = std::mem::replace(&mut num, t);
    }
    Ok((num, den))
}

/// Inverse of `hj_eval`: the unique all-`>=2` expansion of `p/q`.
pub fn hj_expand(p: &BigUint, q: &BigUint) -> Result<Vec<u64>, ChainError> {
    if q.is_zero() || q >= p || !p.gcd(q).is_one() {
        return Err(ChainError::InvalidPQ { p: p.clone(), q: q.clone() });
    }
    // b*q < p + q stays in range whenever p has headroom for one more bit
    if p.bits() <= 127 {
        let (mut p, mut q) = (p.to_u128().expect("bits checked"), q.to_u128().expect("q < p"));
        let mut out = Vec::new();
        while q > 0 {
            let b = p.div_ceil(q);
            out.push(u64::try_from(b).map_err(|_| ChainError::EntryOverflow)?);
            let next = b * q - p;
            p = q;
            q = next;
        }
        return Ok(out);
    }
    let mut p = p.clone();
    let mut q = q.clone();
    let mut out = Vec::new();
    while !q.is_zero() {
        let b = (&p + &q - BigUint::one()) / &q;
        out.push(b.to_u64().ok_or(ChainError::EntryOverflow)?);
        let next = b * &q - &p;
        p = std::mem::replace(&mut q, next);
    }
    Ok(out)
}

/// Classify a chain: compute `(p, q)` and search for the class-T structure.
///
/// All-2 chains are rational double points. Otherwise the chain is class T
/// exactly when `p = d n^2` and `q = d n a - 1` for some `n >= 2`,
/// `0 < a < n`, `gcd(n, a) = 1`; the triple is unique when it exists.
pub fn classify_class_t(chain: &Chain) -> Result<CyclicQuotientType, ChainError> {
    let (p, q) = hj_eval(chain.coeffs())?;
    if chain.coeffs().iter().all(|&b| b == 2) {
        return Ok(CyclicQuotientType { p, q, class_t: Some(ClassT::RationalDoublePoint) });
    }
    let q1 = &q + BigUint::one();
    let mut found = None;
    let mut n = BigUint::from(2u32);
    while &n * &n <= p {
        let nn = &n * &n;
        if (&p % &nn).is_zero() {
            let d = &p / &nn;
            let dn = &d * &n;
            if (&q1 % &dn).is_zero() {
                let a = &q1 / &dn;
                if !a.is_zero() && a < n && n.gcd(&a).is_one() {
                    debug_assert!(found.is_none(), "class-T data must be unique");
                    found = Some(ClassT::Wahl { d, n: n.clone(), a });
                }
            }
        }
        n += 1u32;
    }
    Ok(CyclicQuotientType { p, q, class_t: found })
}

/// All class-T chains of length at most `max_len`, duplicate-free, sorted
/// by length then lexicographically.
///
/// Generated by the standard recursion: bases `[4]` and `[3,2,...,2,3]`,
/// steps "prepend 2 and increment the last entry" and "append 2 and
/// increment the first entry"; all-2 chains (rational double points) are
/// included separately.
pub fn wahl_enumerate(max_len: usize) -> Vec<Vec<u64>> {
    let mut out: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut frontier: Vec<Vec<u64>> = Vec::new();

    for k in 1..=max_len {
        out.insert(vec![2; k]);
    }
    if max_len >= 1 {
        out.insert(vec![4]);
        frontier.push(vec![4]);
    }
    for len in 2..=max_len {
        let mut base = vec![2; len];
        base[0] = 3;
        base[len - 1] = 3;
        out.insert(base.clone());
        frontier.push(base);
    }
    while let Some(c) = frontier.pop() {
        if c.len() >= max_len {
            continue;
        }
        let mut left = Vec::with_capacity(c.len() + 1);
        left.push(2);
        left.extend_from_slice(&c);
        *left.last_mut().expect("nonempty") += 1;
        let mut right = c.clone();
        right[0] += 1;
        right.push(2);
        for child in [left, right] {
            if out.insert(child.clone()) {
                frontier.push(child);
            }
        }
    }
    let mut sorted: Vec<Vec<u64>> = out.into_iter().collect();
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sorted
}

/// First homology of the plumbing boundary (a lens space): the cokernel of
/// the chain intersection matrix, plus the meridian classes.
///
/// `meridians[j]` is the class of the `j`-th basis vector, i.e. the normal
/// circle of the `j`-th chain curve, expressed over the canonical generator
/// fixed by the deterministic Smith normal form.
#[derive(Debug, Clone)]
pub struct ChainBoundary {
    pub group: FinAbGroup,
    pub meridians: Vec<Vec<BigInt>>,
}

pub fn boundary_homology(chain: &Chain) -> Result<ChainBoundary, ChainError> {
    validate_coeffs(chain.coeffs())?;
    let q = chain.intersection_matrix();
    let (group, proj) = exactalg::cokernel(&q);
    debug_assert!(group.is_finite() && group.torsion().len() <= 1, "lens space homology is cyclic");
    let r = chain.len();
    let meridians = (0..r)
        .map(|j| {
            let mut e = vec![BigInt::zero(); r];
            e[j] = BigInt::one();
            group.reduce(&proj.apply_raw(&e)).expect("projection has canonical length")
        })
        .collect();
    Ok(ChainBoundary { group, meridians })
}

/// First homology of the Milnor fiber of the smoothing: `Z/n` for Wahl
/// data `(d, n, a)`, trivial for a rational double point.
pub fn milnor_h1(t: &CyclicQuotientType) -> Result<FinAbGroup, ChainError> {
    match &t.class_t {
        Some(ClassT::Wahl { n, .. }) => Ok(FinAbGroup::cyclic(n.clone())),
        Some(ClassT::RationalDoublePoint) => Ok(FinAbGroup::trivial()),
        None => Err(ChainError::NotClassT),
    }
}

/// The surjection `Z/(d n^2) -> Z/n` induced by inclusion of the boundary
/// into the Milnor fiber, sending canonical generator to canonical
/// generator. For a rational double point the target is trivial.
pub fn boundary_to_milnor(t: &CyclicQuotientType) -> Result<GroupMap, ChainError> {
    let n = t.milnor_order()?;
    let source = PresentedGroup::new(
        vec!["b".to_string()],
        IntMatrix::from_fn(1, 1, |_, _| BigInt::from(t.p.clone())),
    )
    .expect("1x1 relation matrix");
    if n.is_one() {
        let target = PresentedGroup::free(Vec::new());
        let matrix = IntMatrix::zero(1, 0);
        return Ok(GroupMap::new(source, target, matrix).expect("zero map is well defined"));
    }
    let target = PresentedGroup::new(
        vec!["m".to_string()],
        IntMatrix::from_fn(1, 1, |_, _| BigInt::from(n.clone())),
    )
    .expect("1x1 relation matrix");
    let matrix = IntMatrix::identity(1);
    GroupMap::new(source, target, matrix)
        .map_err(|_| ChainError::NotClassT)
}
