//! Discrepancies of contracted chains, pullback of the canonical class,
//! nefness reports against supplied curve lists, and `K^2` of the
//! contracted surface. All values are exact rationals.

use crate::config::{Configuration, CurveId};
use crate::exactalg::{self, IntMatrix};
use crate::tsingular::{chain_matrix, classify_class_t, Chain, ClassT};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonicalError {
    #[error("chain is not bound to configuration curves")]
    UnboundChain,
    #[error("chains '{0}' and '{1}' are not disjoint")]
    OverlappingChains(String, String),
    #[error("chain intersection matrix unexpectedly singular")]
    SingularChainMatrix,
    #[error("a formal combination may not contain the chain curve '{0}'")]
    CombinationHitsChain(String),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Chain(#[from] crate::tsingular::ChainError),
    #[error(transparent)]
    Exactalg(#[from] crate::exactalg::ExactalgError),
}

/// A finitely supported `Q`-divisor: curve id -> exact rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QDivisor {
    coeffs: BTreeMap<CurveId, BigRational>,
}

impl QDivisor {
    pub fn coefficient(&self, c: CurveId) -> BigRational {
        self.coeffs.get(&c).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CurveId, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn insert(&mut self, c: CurveId, v: BigRational) {
        if v.is_zero() {
            self.coeffs.remove(&c);
        } else {
            self.coeffs.insert(c, v);
        }
    }
}

/// Discrepancy coefficients of a single chain, solved intrinsically:
/// `sum_i c_i (u_i . u_j) = -(K . u_j)` with `K . u_j = b_j - 2`.
pub fn chain_discrepancies(coeffs: &[u64]) -> Result<Vec<BigRational>, CanonicalError> {
    let q = chain_matrix(coeffs);
    let rhs: Vec<BigRational> = coeffs
        .iter()
        .map(|&b| BigRational::from(BigInt::from(2i64 - b as i64)))
        .collect();
    let solution = exactalg::solve_rational(&q, &rhs)?.ok_or(CanonicalError::SingularChainMatrix)?;
    debug_assert!(resubstitute(&q, &solution, &rhs));
    Ok(solution)
}

fn resubstitute(q: &IntMatrix, x: &[BigRational], rhs: &[BigRational]) -> bool {
    (0..q.rows()).all(|i| {
        let acc: BigRational = (0..q.cols())
            .map(|j| BigRational::from(q.at(i, j).clone()) * &x[j])
            .sum();
        acc == rhs[i]
    })
}

/// Discrepancies of a bound chain inside a configuration: the unique
/// rational solution of `(K_Z + sum c_i u_i) . u_j = 0` for all j, with
/// `K_Z . u_j` taken from adjunction.
pub fn discrepancies(cfg: &Configuration, chain: &Chain) -> Result<QDivisor, CanonicalError> {
    let ids = chain.curves().ok_or(CanonicalError::UnboundChain)?;
    let r = ids.len();
    let q = IntMatrix::from_fn(r, r, |i, j| {
        if i == j {
            BigInt::from(cfg.curve(ids[i]).self_int)
        } else {
            BigInt::from(
                cfg.intersection_number(ids[i], ids[j])
                    .expect("distinct bound curves"),
            )
        }
    });
    let rhs: Vec<BigRational> = ids
        .iter()
        .map(|&id| BigRational::from(BigInt::from(-cfg.canonical_degree(id))))
        .collect();
    let solution = exactalg::solve_rational(&q, &rhs)?.ok_or(CanonicalError::SingularChainMatrix)?;
    debug_assert!(resubstitute(&q, &solution, &rhs));
    let mut div = QDivisor::default();
    for (&id, c) in ids.iter().zip(solution) {
        div.insert(id, c);
    }
    Ok(div)
}

/// A curve, or a formal integer combination of curves, to pair against the
/// pulled-back canonical class.
#[derive(Debug, Clone)]
pub enum CurveClass {
    Curve(CurveId),
    Combination(Vec<(i64, CurveId)>),
}

impl CurveClass {
    fn display_name(&self, cfg: &Configuration) -> String {
        match self {
            CurveClass::Curve(c) => cfg.curve(*c).name.clone(),
            CurveClass::Combination(terms) => terms
                .iter()
                .map(|(k, c)| format!("{k}*{}", cfg.curve(*c).name))
                .collect::<Vec<_>>()
                .join(" + "),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackDegree {
    pub value: BigRational,
    /// Set when the queried class is itself a chain curve; the degree is
    /// then zero by the defining property of the discrepancies.
    pub chain_member: bool,
}

fn chain_membership(chains: &[Chain], c: CurveId) -> Result<bool, CanonicalError> {
    for chain in chains {
        let ids = chain.curves().ok_or(CanonicalError::UnboundChain)?;
        if ids.contains(&c) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Degree of the pulled-back canonical class against `class`:
/// `K_Z . c + sum over chain curves u of c_u (u . c)`.
pub fn pullback_degree(
    cfg: &Configuration,
    chains: &[Chain],
    class: &CurveClass,
) -> Result<PullbackDegree, CanonicalError> {
    let terms: Vec<(i64, CurveId)> = match class {
        CurveClass::Curve(c) => {
            if chain_membership(chains, *c)? {
                return Ok(PullbackDegree { value: BigRational::zero(), chain_member: true });
            }
            vec![(1, *c)]
        }
        CurveClass::Combination(terms) => {
            for &(_, c) in terms {
                if chain_membership(chains, c)? {
                    return Err(CanonicalError::CombinationHitsChain(
                        cfg.curve(c).name.clone(),
                    ));
                }
            }
            terms.clone()
        }
    };

    let mut value = BigRational::zero();
    for &(k, c) in &terms {
        value += BigRational::from(BigInt::from(k * cfg.canonical_degree(c)));
    }
    for chain in chains {
        let div = discrepancies(cfg, chain)?;
        let ids = chain.curves().expect("checked above");
        for &u in ids {
            let coeff = div.coefficient(u);
            if coeff.is_zero() {
                continue;
            }
            let mut pairing = 0i64;
            for &(k, c) in &terms {
                pairing += k * cfg.intersection_number(u, c)?;
            }
            value += coeff * BigRational::from(BigInt::from(pairing));
        }
    }
    Ok(PullbackDegree { value, chain_member: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignVerdict {
    Negative,
    Zero,
    Positive,
}

#[derive(Debug, Clone)]
pub struct NefEntry {
    pub name: String,
    pub value: BigRational,
    pub sign: SignVerdict,
    pub chain_member: bool,
}

/// Positivity report for the pulled-back canonical class against a supplied
/// test list, together with the coefficient-positivity certificate. It says
/// nothing about curves outside the list.
#[derive(Debug, Clone)]
pub struct NefReport {
    pub entries: Vec<NefEntry>,
    pub nef_on_list: bool,
    pub strict_on_list: bool,
    /// Every discrepancy coefficient lies in [0, 1).
    pub coefficients_in_unit_interval: bool,
    /// Every coefficient is strictly positive, except on all-2 chains
    /// (rational double points), where all coefficients vanish.
    pub coefficients_positive: bool,
}

pub fn nef_report(
    cfg: &Configuration,
    chains: &[Chain],
    test_classes: &[CurveClass],
) -> Result<NefReport, CanonicalError> {
    let mut entries = Vec::with_capacity(test_classes.len());
    for class in test_classes {
        let deg = pullback_degree(cfg, chains, class)?;
        let sign = if deg.value.is_zero() {
            SignVerdict::Zero
        } else if deg.value.is_positive() {
            SignVerdict::Positive
        } else {
            SignVerdict::Negative
        };
        entries.push(NefEntry {
            name: class.display_name(cfg),
            value: deg.value,
            sign,
            chain_member: deg.chain_member,
        });
    }
    let nef_on_list = entries.iter().all(|e| e.sign != SignVerdict::Negative);
    let strict_on_list = entries.iter().all(|e| e.sign == SignVerdict::Positive);

    let mut in_unit = true;
    let mut positive = true;
    let one = BigRational::one();
    for chain in chains {
        let rdp = matches!(
            classify_class_t(chain)?.class_t,
            Some(ClassT::RationalDoublePoint)
        );
        for c in chain_discrepancies(chain.coeffs())? {
            if c.is_negative() || c >= one {
                in_unit = false;
            }
            if rdp {
                if !c.is_zero() {
                    positive = false;
                }
            } else if !c.is_positive() {
                positive = false;
            }
        }
    }
    Ok(NefReport {
        entries,
        nef_on_list,
        strict_on_list,
        coefficients_in_unit_interval: in_unit,
        coefficients_positive: positive,
    })
}

/// `K^2` of the surface obtained by contracting the chains:
/// `K_Z^2 + sum over chains of sum_i c_i (K_Z . u_i)`.
pub fn k_squared_contracted(
    cfg: &Configuration,
    chains: &[Chain],
) -> Result<BigRational, CanonicalError> {
    for (i, a) in chains.iter().enumerate() {
        let a_ids = a.curves().ok_or(CanonicalError::UnboundChain)?;
        for b in chains.iter().skip(i + 1) {
            let b_ids = b.curves().ok_or(CanonicalError::UnboundChain)?;
            for &u in a_ids {
                for &v in b_ids {
                    if u == v || cfg.intersection_number(u, v)? != 0 {
                        return Err(CanonicalError::OverlappingChains(
                            cfg.curve(u).name.clone(),
                            cfg.curve(v).name.clone(),
                        ));
                    }
                }
            }
        }
    }
    let mut total = BigRational::from(BigInt::from(cfg.k2()));
    for chain in chains {
        let div = discrepancies(cfg, chain)?;
        let ids = chain.curves().expect("checked above");
        for &u in ids {
            total += div.coefficient(u) * BigRational::from(BigInt::from(cfg.canonical_degree(u)));
        }
    }
    Ok(total)
}
