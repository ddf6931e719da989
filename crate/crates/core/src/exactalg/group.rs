//! Finitely generated abelian groups in invariant-factor form, presented
//! groups, and homomorphisms between them.

use super::{det, snf, solve_integer, ExactalgError, IntMatrix};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// A finitely generated abelian group `Z^free_rank + Z/d1 + ... + Z/dk`
/// with `d1 | d2 | ... | dk` and every `di >= 2`.
///
/// The representation is canonical: two groups are isomorphic iff the
/// fields are equal. Element coordinates list the torsion positions first
/// (reduced into `[0, di)` on construction), then the free positions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinAbGroup {
    free_rank: usize,
    torsion: Vec<BigUint>,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        Self {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(n: BigUint) -> Self {
        Self::canonical_from_orders(&[n])
    }

    pub fn cyclic_u64(n: u64) -> Self {
        Self::cyclic(BigUint::from(n))
    }

    /// Canonical form of `Z/n1 + ... + Z/nk` for arbitrary `ni >= 0`
    /// (`ni = 0` meaning a free `Z` factor, `ni = 1` a trivial one).
    pub fn canonical_from_orders(orders: &[BigUint]) -> Self {
        let n = orders.len();
        let diag = IntMatrix::from_fn(n, n, |i, j| {
            if i == j {
                BigInt::from(orders[i].clone())
            } else {
                BigInt::zero()
            }
        });
        cokernel_impl(&diag).0
    }

    /// Build directly from an invariant-factor list; rejects non-canonical
    /// input (factors < 2 or a broken divisibility chain).
    pub fn from_invariant_factors(
        free_rank: usize,
        torsion: Vec<BigUint>,
    ) -> Result<Self, ExactalgError> {
        for w in torsion.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return Err(ExactalgError::Dimension(format!(
                    "invariant factors must form a divisibility chain: {} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        if torsion.iter().any(|d| *d < BigUint::from(2u32)) {
            return Err(ExactalgError::Dimension(
                "invariant factors must be >= 2".into(),
            ));
        }
        Ok(Self { free_rank, torsion })
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut orders: Vec<BigUint> = self.torsion.clone();
        orders.extend(other.torsion.iter().cloned());
        orders.extend(std::iter::repeat_n(BigUint::zero(), self.free_rank + other.free_rank));
        Self::canonical_from_orders(&orders)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigUint] {
        &self.torsion
    }

    /// Number of coordinates of an element.
    pub fn rank(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order; `None` when infinite.
    pub fn order(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().product())
    }

    /// Reduce coordinates modulo the invariant factors.
    pub fn reduce(&self, coords: &[BigInt]) -> Result<Vec<BigInt>, ExactalgError> {
        if coords.len() != self.rank() {
            return Err(ExactalgError::BadElementLength {
                got: coords.len(),
                want: self.rank(),
            });
        }
        let mut out = coords.to_vec();
        for (i, d) in self.torsion.iter().enumerate() {
            out[i] = out[i].mod_floor(&BigInt::from(d.clone()));
        }
        Ok(out)
    }

    pub fn zero_element(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.rank()]
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Result<Vec<BigInt>, ExactalgError> {
        let a = self.reduce(a)?;
        let b = self.reduce(b)?;
        let sum: Vec<BigInt> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        self.reduce(&sum)
    }

    /// Enumerate all elements; only for finite groups of desk-top order.
    pub fn enumerate_elements(&self) -> Result<Vec<Vec<BigInt>>, ExactalgError> {
        let order = self.order().ok_or_else(|| {
            ExactalgError::Dimension("cannot enumerate an infinite group".into())
        })?;
        let order = order.to_usize().ok_or_else(|| {
            ExactalgError::Dimension("group too large to enumerate".into())
        })?;
        let mut out = Vec::with_capacity(order);
        let mut cur = self.zero_element();
        loop {
            out.push(cur.clone());
            // odometer increment over the torsion coordinates
            let mut i = 0;
            loop {
                if i == self.torsion.len() {
                    return Ok(out);
                }
                cur[i] += 1;
                if BigUint::try_from(cur[i].clone()).unwrap() < self.torsion[i] {
                    break;
                }
                cur[i] = BigInt::zero();
                i += 1;
            }
        }
    }

    /// The presentation with one generator per coordinate and the diagonal
    /// relation matrix.
    pub fn to_presented(&self) -> PresentedGroup {
        let rank = self.rank();
        let names: Vec<String> = (0..rank).map(|i| format!("g{i}")).collect();
        let rels = IntMatrix::from_fn(self.torsion.len(), rank, |i, j| {
            if i == j {
                BigInt::from(self.torsion[i].clone())
            } else {
                BigInt::zero()
            }
        });
        PresentedGroup::new(names, rels).expect("diagonal presentation is consistent")
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// An abelian group given by named generators and a relation matrix
/// (rows = relations over the generators).
#[derive(Clone, Debug)]
pub struct PresentedGroup {
    generators: Vec<String>,
    relations: IntMatrix,
}

/// Canonical form of a presented group together with the images of its
/// generators in canonical coordinates.
#[derive(Clone, Debug)]
pub struct Canonicalized {
    pub group: FinAbGroup,
    pub generator_images: Vec<Vec<BigInt>>,
}

impl PresentedGroup {
    pub fn new(generators: Vec<String>, relations: IntMatrix) -> Result<Self, ExactalgError> {
        if relations.cols() != generators.len() {
            return Err(ExactalgError::Dimension(format!(
                "relation matrix has {} columns for {} generators",
                relations.cols(),
                generators.len()
            )));
        }
        Ok(Self { generators, relations })
    }

    pub fn free(generators: Vec<String>) -> Self {
        let n = generators.len();
        Self {
            generators,
            relations: IntMatrix::zero(0, n),
        }
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    /// Canonical invariant-factor form, via SNF of the relation lattice.
    pub fn canonicalize(&self) -> Canonicalized {
        // The group is Z^g / (row span of relations) = coker(relations^T).
        let a = self.relations.transpose();
        let (group, proj) = cokernel_impl(&a);
        Canonicalized {
            group,
            generator_images: (0..self.generators.len())
                .map(|g| proj.matrix().row(g).to_vec())
                .collect(),
        }
    }

    /// Does this word lie in the relation lattice (i.e. vanish in the group)?
    pub fn word_is_zero(&self, word: &[BigInt]) -> Result<bool, ExactalgError> {
        if word.len() != self.generators.len() {
            return Err(ExactalgError::BadElementLength {
                got: word.len(),
                want: self.generators.len(),
            });
        }
        // Solve relations^T y = word over Z.
        Ok(solve_integer(&self.relations.transpose(), word)?.is_some())
    }

    /// Append extra relation rows, returning the extended presentation.
    pub fn with_extra_relations(&self, extra: &[Vec<BigInt>]) -> Result<Self, ExactalgError> {
        let g = self.generators.len();
        for (k, row) in extra.iter().enumerate() {
            if row.len() != g {
                return Err(ExactalgError::Dimension(format!(
                    "extra relation {k} has {} coordinates for {} generators",
                    row.len(),
                    g
                )));
            }
        }
        let old = self.relations.rows();
        let rels = IntMatrix::from_fn(old + extra.len(), g, |i, j| {
            if i < old {
                self.relations.at(i, j).clone()
            } else {
                extra[i - old][j].clone()
            }
        });
        PresentedGroup::new(self.generators.clone(), rels)
    }
}

/// Quotient of a presented group by extra relations, in canonical form.
///
/// Independent of relation ordering and of generator permutation.
pub fn quotient(g: &PresentedGroup, extra: &[Vec<BigInt>]) -> Result<FinAbGroup, ExactalgError> {
    Ok(g.with_extra_relations(extra)?.canonicalize().group)
}

/// A homomorphism between presented groups: row `i` of `matrix` is the image
/// of source generator `i` as a word in the target generators. Construction
/// checks well-definedness (every source relation maps into the target
/// relation lattice).
#[derive(Clone, Debug)]
pub struct GroupMap {
    source: PresentedGroup,
    target: PresentedGroup,
    matrix: IntMatrix,
}

impl GroupMap {
    pub fn new(
        source: PresentedGroup,
        target: PresentedGroup,
        matrix: IntMatrix,
    ) -> Result<Self, ExactalgError> {
        if matrix.rows() != source.generators().len() || matrix.cols() != target.generators().len()
        {
            return Err(ExactalgError::Dimension(format!(
                "map matrix is {}x{}, want {}x{}",
                matrix.rows(),
                matrix.cols(),
                source.generators().len(),
                target.generators().len()
            )));
        }
        let map = Self { source, target, matrix };
        for r in 0..map.source.relations().rows() {
            let image = map.apply_raw(map.source.relations().row(r));
            if !map.target.word_is_zero(&image)? {
                return Err(ExactalgError::IllDefinedMap { relation: r });
            }
        }
        Ok(map)
    }

    pub fn source(&self) -> &PresentedGroup {
        &self.source
    }

    pub fn target(&self) -> &PresentedGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Image of a word over the source generators, as a word over the
    /// target generators. No reduction is performed.
    pub fn apply_raw(&self, word: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.matrix.cols()];
        for (i, c) in word.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate() {
                *slot += c * self.matrix.at(i, j);
            }
        }
        out
    }

    /// Order of the image subgroup inside the target (finite targets only).
    pub fn image_order(&self) -> Result<BigUint, ExactalgError> {
        let target_order = self
            .target
            .canonicalize()
            .group
            .order()
            .ok_or_else(|| ExactalgError::Dimension("target group is infinite".into()))?;
        let image_rows: Vec<Vec<BigInt>> = (0..self.matrix.rows())
            .map(|i| self.matrix.row(i).to_vec())
            .collect();
        let coker = quotient(&self.target, &image_rows)?;
        let coker_order = coker
            .order()
            .ok_or_else(|| ExactalgError::Dimension("cokernel is infinite".into()))?;
        Ok(target_order / coker_order)
    }
}

/// `x` lies in the subgroup generated by `gens` inside `ambient`?
///
/// Solved over the relation lattice: `x` is a member iff it is an integer
/// combination of the generators and the invariant-factor relations.
pub fn subgroup_membership(
    gens: &[Vec<BigInt>],
    x: &[BigInt],
    ambient: &FinAbGroup,
) -> Result<bool, ExactalgError> {
    let rank = ambient.rank();
    if x.len() != rank {
        return Err(ExactalgError::BadElementLength { got: x.len(), want: rank });
    }
    for g in gens {
        if g.len() != rank {
            return Err(ExactalgError::BadElementLength { got: g.len(), want: rank });
        }
    }
    lattice_membership(gens, ambient.torsion(), rank, x)
}

/// Membership in `<gens> + L` inside `Z^rank`, where `L` is the lattice
/// spanned by `moduli[i] * e_i` over the leading torsion coordinates.
pub(crate) fn lattice_membership(
    gens: &[Vec<BigInt>],
    moduli: &[BigUint],
    rank: usize,
    x: &[BigInt],
) -> Result<bool, ExactalgError> {
    let cols = gens.len() + moduli.len();
    let m = IntMatrix::from_fn(rank, cols, |i, j| {
        if j < gens.len() {
            gens[j][i].clone()
        } else if i == j - gens.len() {
            BigInt::from(moduli[i].clone())
        } else {
            BigInt::zero()
        }
    });
    Ok(solve_integer(&m, x)?.is_some())
}

/// Shared implementation for `exactalg::cokernel`.
pub(crate) fn cokernel_impl(a: &IntMatrix) -> (FinAbGroup, GroupMap) {
    let dec = snf(a);
    let n = a.rows().min(a.cols());
    debug_assert!(dec.s.is_diagonal());
    debug_assert!(det(&dec.u).map(|d| d.abs().is_one()).unwrap_or(false));
    debug_assert!(det(&dec.v).map(|d| d.abs().is_one()).unwrap_or(false));

    // Keep positions whose diagonal entry is not 1: torsion (d >= 2) first,
    // then free (d = 0, including rows beyond the diagonal).
    let one = BigInt::one();
    let mut torsion_pos = Vec::new();
    let mut free_pos = Vec::new();
    for i in 0..a.rows() {
        let d = if i < n { dec.s.at(i, i).clone() } else { BigInt::zero() };
        if d == one {
            continue;
        }
        if d.is_zero() {
            free_pos.push(i);
        } else {
            torsion_pos.push(i);
        }
    }
    let torsion: Vec<BigUint> = torsion_pos
        .iter()
        .map(|&i| dec.s.at(i, i).to_biguint().expect("diagonal normalized nonnegative"))
        .collect();
    let group = FinAbGroup {
        free_rank: free_pos.len(),
        torsion,
    };

    // Class of ambient basis vector e_k: the kept coordinates of U e_k,
    // reduced modulo the invariant factors.
    let kept: Vec<usize> = torsion_pos.iter().chain(free_pos.iter()).copied().collect();
    let proj_matrix = IntMatrix::from_fn(a.rows(), kept.len(), |k, c| {
        let i = kept[c];
        let raw = dec.u.at(i, k).clone();
        if c < group.torsion.len() {
            raw.mod_floor(&BigInt::from(group.torsion[c].clone()))
        } else {
            raw
        }
    });

    // Ambient presented on `rows` generators with one relation per column.
    let ambient_names: Vec<String> = (0..a.rows()).map(|i| format!("x{i}")).collect();
    let ambient = PresentedGroup::new(ambient_names, a.transpose())
        .expect("relation matrix shape by construction");
    let target = group.to_presented();
    let proj = GroupMap::new(ambient, target, proj_matrix)
        .expect("cokernel projection is well defined by construction");
    (group, proj)
}
