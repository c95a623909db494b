//! The classification pair (C, a), unimodular equivalence of pairs, the
//! moment polytope slice P_A, deck scaling reduction on the punctured cone,
//! and the face-to-subtorus summary.
//!
//! The transcendental deck factor e^{-a} is replaced throughout by an
//! independently supplied exact rational lambda in (0, 1); every statement
//! used here depends only on strict contraction.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cone::{Cone, Face, Membership};
use crate::goodness::{check_good, GoodnessReport};
use crate::lattice::{IntMatrix, IntVector, RatVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvariantError {
    #[error("cone is not good")]
    NotGood(Box<GoodnessReport>),
    #[error("period must be positive")]
    BadPeriod,
    #[error("scale must satisfy 0 < lambda < 1")]
    BadScale,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("some ray pairs nonpositively with the slicing vector")]
    NotCompactSlice,
    #[error("zero point cannot be deck-reduced")]
    ZeroPoint,
    #[error("point lies outside the cone")]
    OutsideCone,
    #[error("facet matching search exceeds budget of {0}")]
    SearchBudgetExceeded(u64),
}

/// The classification pair (C, a), plus the exact deck-scaling stand-in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcsInvariant {
    pub cone: Cone,
    pub period_a: BigRational,
    pub scale_lambda: BigRational,
}

/// The compact (n-1)-dimensional slice C with pairing 1 against A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentPolytope {
    pub lee_vector: IntVector,
    pub vertices: Vec<RatVector>,
}

/// One row per face with 0 < codim < n: the rank-k sublattice spanned by its
/// normals, which generates the associated k-dimensional subtorus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtorusTable {
    pub rows: Vec<SubtorusRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtorusRow {
    pub face: Face,
    pub rank_k: usize,
    pub lattice_basis: Vec<IntVector>,
}

/// A unimodular change of torus coordinates carrying one cone onto another.
/// Normals map by the inverse-transpose of `matrix_u`; `facet_permutation[j]`
/// is the index in the second cone of the image of facet j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub matrix_u: IntMatrix,
    pub facet_permutation: Vec<usize>,
}

impl EquivalenceWitness {
    /// Exact check against a pair of cones.
    pub fn verify(&self, c1: &Cone, c2: &Cone) -> bool {
        if !self.matrix_u.is_unimodular() {
            return false;
        }
        let w = self.matrix_u.transpose().inverse_unimodular();
        if self.facet_permutation.len() != c1.num_facets()
            || c1.num_facets() != c2.num_facets()
        {
            return false;
        }
        let mut seen = vec![false; c2.num_facets()];
        for (j, &pj) in self.facet_permutation.iter().enumerate() {
            if pj >= c2.num_facets() || seen[pj] {
                return false;
            }
            seen[pj] = true;
            if w.mul_vec(&c1.normals()[j]) != c2.normals()[pj] {
                return false;
            }
        }
        true
    }

    pub fn inverse(&self) -> EquivalenceWitness {
        let mut perm = vec![0usize; self.facet_permutation.len()];
        for (j, &pj) in self.facet_permutation.iter().enumerate() {
            perm[pj] = j;
        }
        EquivalenceWitness {
            matrix_u: self.matrix_u.inverse_unimodular(),
            facet_permutation: perm,
        }
    }

    /// Composite witness: first `self` (cone 1 to cone 2), then `other`
    /// (cone 2 to cone 3).
    pub fn compose(&self, other: &EquivalenceWitness) -> EquivalenceWitness {
        let perm = self
            .facet_permutation
            .iter()
            .map(|&j| other.facet_permutation[j])
            .collect();
        EquivalenceWitness {
            matrix_u: other.matrix_u.mul(&self.matrix_u),
            facet_permutation: perm,
        }
    }
}

/// Validate a classification pair.
pub fn make_invariant(
    cone: Cone,
    period_a: BigRational,
    scale_lambda: BigRational,
) -> Result<LcsInvariant, InvariantError> {
    if !period_a.is_positive() {
        return Err(InvariantError::BadPeriod);
    }
    if !scale_lambda.is_positive() || scale_lambda >= BigRational::one() {
        return Err(InvariantError::BadScale);
    }
    let report = check_good(&cone);
    if !report.good {
        return Err(InvariantError::NotGood(Box::new(report)));
    }
    Ok(LcsInvariant {
        cone,
        period_a,
        scale_lambda,
    })
}

/// Equality of pairs with the torus fixed: equal periods and equal normal
/// sets (order-insensitive).
pub fn invariants_equal(i1: &LcsInvariant, i2: &LcsInvariant) -> Result<bool, InvariantError> {
    if i1.cone.dim() != i2.cone.dim() {
        return Err(InvariantError::DimensionMismatch {
            expected: i1.cone.dim(),
            got: i2.cone.dim(),
        });
    }
    if i1.period_a != i2.period_a {
        return Ok(false);
    }
    let s1: BTreeSet<&IntVector> = i1.cone.normals().iter().collect();
    let s2: BTreeSet<&IntVector> = i2.cone.normals().iter().collect();
    Ok(s1 == s2)
}

pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// Search for a unimodular torus automorphism carrying cone 1 onto cone 2
/// (an extension of the fixed-torus classification). Exhaustive over facet
/// matchings compatible with the ray-incidence degree sequence.
pub fn gl_equivalent(
    i1: &LcsInvariant,
    i2: &LcsInvariant,
    budget: u64,
) -> Result<Option<EquivalenceWitness>, InvariantError> {
    if i1.cone.dim() != i2.cone.dim() {
        return Err(InvariantError::DimensionMismatch {
            expected: i1.cone.dim(),
            got: i2.cone.dim(),
        });
    }
    if i1.period_a != i2.period_a {
        return Ok(None);
    }
    let c1 = &i1.cone;
    let c2 = &i2.cone;
    let n = c1.dim();
    let d = c1.num_facets();
    if d != c2.num_facets() {
        return Ok(None);
    }
    // Equal normal sets admit the identity, returned ahead of any other
    // witness the matching search might reach first.
    if d == c2.num_facets() {
        let perm: Option<Vec<usize>> = c1
            .normals()
            .iter()
            .map(|nu| c2.normals().iter().position(|mu| mu == nu))
            .collect();
        if let Some(perm) = perm {
            let w = EquivalenceWitness {
                matrix_u: IntMatrix::identity(n),
                facet_permutation: perm,
            };
            if w.verify(c1, c2) {
                return Ok(Some(w));
            }
        }
    }
    // Facet degree = number of incident extreme rays; preserved by any
    // unimodular correspondence.
    let degrees = |c: &Cone| -> Vec<usize> {
        let rays = c.rays();
        (0..c.num_facets())
            .map(|j| rays.iter().filter(|r| r.active.contains(&j)).count())
            .collect()
    };
    let deg1 = degrees(c1);
    let deg2 = degrees(c2);
    {
        let mut m1 = deg1.clone();
        let mut m2 = deg2.clone();
        m1.sort_unstable();
        m2.sort_unstable();
        if m1 != m2 {
            return Ok(None);
        }
    }
    // Anchor on n linearly independent normals of cone 1.
    let mut basis_idx = Vec::new();
    let mut chosen = Vec::new();
    for j in 0..d {
        chosen.push(c1.normals()[j].clone());
        if crate::lattice::rank_of(&chosen) == chosen.len() {
            basis_idx.push(j);
        } else {
            chosen.pop();
        }
        if basis_idx.len() == n {
            break;
        }
    }
    let n1 = IntMatrix::from_rows(&chosen).transpose(); // normals as columns
    // Candidate images per anchor, filtered by degree.
    let candidates: Vec<Vec<usize>> = basis_idx
        .iter()
        .map(|&j| (0..d).filter(|&t| deg2[t] == deg1[j]).collect())
        .collect();
    let mut budget_left = budget;
    let mut assignment = vec![usize::MAX; n];
    let mut used = vec![false; d];
    fn search(
        pos: usize,
        n: usize,
        c1: &Cone,
        c2: &Cone,
        candidates: &[Vec<usize>],
        n1: &IntMatrix,
        assignment: &mut Vec<usize>,
        used: &mut Vec<bool>,
        budget_left: &mut u64,
    ) -> Result<Option<EquivalenceWitness>, InvariantError> {
        if pos == n {
            if *budget_left == 0 {
                return Err(InvariantError::SearchBudgetExceeded(0));
            }
            *budget_left -= 1;
            return Ok(try_assignment(c1, c2, assignment, n1));
        }
        for &t in &candidates[pos] {
            if used[t] {
                continue;
            }
            used[t] = true;
            assignment[pos] = t;
            let r = search(
                pos + 1,
                n,
                c1,
                c2,
                candidates,
                n1,
                assignment,
                used,
                budget_left,
            )?;
            used[t] = false;
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }
    let found = search(
        0,
        n,
        c1,
        c2,
        &candidates,
        &n1,
        &mut assignment,
        &mut used,
        &mut budget_left,
    );
    match found {
        Err(_) => Err(InvariantError::SearchBudgetExceeded(budget)),
        Ok(r) => Ok(r),
    }
}

/// Solve W from the anchor correspondence, then verify it carries the whole
/// normal set bijectively.
fn try_assignment(
    c1: &Cone,
    c2: &Cone,
    assignment: &[usize],
    n1: &IntMatrix,
) -> Option<EquivalenceWitness> {
    let n = c1.dim();
    let d = c1.num_facets();
    let images: Vec<IntVector> = assignment
        .iter()
        .map(|&t| c2.normals()[t].clone())
        .collect();
    let n2 = IntMatrix::from_rows(&images).transpose();
    // W n1 = n2 -> W = n2 * n1^{-1}; integral and unimodular or reject.
    let det1 = n1.det();
    if det1.is_zero() {
        return None;
    }
    // Solve column by column over Q and demand integrality.
    let mut w = IntMatrix::zeros(n, n);
    for col in 0..n {
        // Solve n1^T x = e_col-ish: we want row `col` of W: W = n2 n1^{-1}
        // i.e. W^T solves n1^T W^T = n2^T.
        // Use rational elimination on (n1^T | n2^T row col).
        let x = solve_rational(&n1.transpose(), &n2.row(col))?;
        for (j, v) in x.iter().enumerate() {
            if !v.is_integer() {
                return None;
            }
            w.set(col, j, v.to_integer());
        }
    }
    if !w.is_unimodular() {
        return None;
    }
    // Match every normal of cone 1 to a distinct normal of cone 2.
    let mut perm = vec![usize::MAX; d];
    let mut used = vec![false; d];
    for j in 0..d {
        let img = w.mul_vec(&c1.normals()[j]);
        let Some(t) = (0..d).find(|&t| !used[t] && c2.normals()[t] == img) else {
            return None;
        };
        used[t] = true;
        perm[j] = t;
    }
    // Normals map by U^{-T} = W, so U = (W^T)^{-1}.
    let u = w.transpose().inverse_unimodular();
    let witness = EquivalenceWitness {
        matrix_u: u,
        facet_permutation: perm,
    };
    debug_assert!(witness.verify(c1, c2));
    Some(witness)
}

/// Solve `a x = b` over Q for square `a`; None if singular.
fn solve_rational(a: &IntMatrix, b: &IntVector) -> Option<Vec<BigRational>> {
    let n = a.rows();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n)
                .map(|j| BigRational::from(a.get(i, j).clone()))
                .collect();
            row.push(BigRational::from(b.entries()[i].clone()));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, p);
        let piv = m[k][k].clone();
        for j in k..=n {
            m[k][j] = &m[k][j] / &piv;
        }
        for i in 0..n {
            if i != k && !m[i][k].is_zero() {
                let f = m[i][k].clone();
                for j in k..=n {
                    let v = &m[i][j] - &f * &m[k][j];
                    m[i][j] = v;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

/// The moment polytope P_A: rays of C scaled onto the hyperplane of pairing
/// 1 against A. Requires A to pair positively with every ray.
pub fn moment_slice(c: &Cone, lee_vector: &IntVector) -> Result<MomentPolytope, InvariantError> {
    if lee_vector.dim() != c.dim() {
        return Err(InvariantError::DimensionMismatch {
            expected: c.dim(),
            got: lee_vector.dim(),
        });
    }
    let mut vertices = Vec::new();
    for ray in c.rays() {
        let p = ray.direction.dot(lee_vector);
        if !p.is_positive() {
            return Err(InvariantError::NotCompactSlice);
        }
        let scale = BigRational::from(p).recip();
        vertices.push(ray.direction.to_rat().scale(&scale));
    }
    vertices.sort();
    vertices.dedup();
    Ok(MomentPolytope {
        lee_vector: lee_vector.clone(),
        vertices,
    })
}

/// Reduce a nonzero cone point into the half-open fundamental slab
/// `lambda < <rep, A> <= 1` of the deck scaling. Returns the representative
/// and the power m with `rep = lambda^m * l`.
pub fn deck_reduce(
    l: &RatVector,
    lee_vector: &IntVector,
    lambda: &BigRational,
    c: &Cone,
) -> Result<(RatVector, i64), InvariantError> {
    if !lambda.is_positive() || *lambda >= BigRational::one() {
        return Err(InvariantError::BadScale);
    }
    if l.is_zero() {
        return Err(InvariantError::ZeroPoint);
    }
    match c.membership(l).map_err(|_| InvariantError::DimensionMismatch {
        expected: c.dim(),
        got: l.dim(),
    })? {
        Membership::Outside => return Err(InvariantError::OutsideCone),
        _ => {}
    }
    for ray in c.rays() {
        if !ray.direction.dot(lee_vector).is_positive() {
            return Err(InvariantError::NotCompactSlice);
        }
    }
    let mut pairing = lee_vector.dot_rat(l);
    if !pairing.is_positive() {
        // Cannot happen for nonzero cone points when A is dual-interior.
        return Err(InvariantError::NotCompactSlice);
    }
    let mut m: i64 = 0;
    while pairing > BigRational::one() {
        pairing *= lambda;
        m += 1;
    }
    while pairing <= *lambda {
        pairing /= lambda;
        m -= 1;
    }
    let mut factor = BigRational::one();
    if m >= 0 {
        for _ in 0..m {
            factor *= lambda;
        }
    } else {
        for _ in 0..-m {
            factor /= lambda;
        }
    }
    Ok((l.scale(&factor), m))
}

/// One subtorus row per face with 0 < codim < n. Requires goodness, so the
/// face normals form a Z-basis of the face's annihilator lattice.
pub fn orbit_summary(c: &Cone) -> Result<SubtorusTable, InvariantError> {
    let report = check_good(c);
    if !report.good {
        return Err(InvariantError::NotGood(Box::new(report)));
    }
    let rows = c
        .face_lattice()
        .into_iter()
        .filter(|f| f.codim > 0 && f.codim < c.dim())
        .map(|face| {
            let basis = face.annihilator_basis.clone();
            SubtorusRow {
                rank_k: face.codim,
                lattice_basis: basis,
                face,
            }
        })
        .collect();
    Ok(SubtorusTable { rows })
}
