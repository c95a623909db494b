//! Pointed full-dimensional rational polyhedral cones given by primitive
//! facet normals, with exact double-description ray enumeration and face
//! lattice computation.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{rank_of, IntMatrix, IntVector, RatVector};
use crate::potential::{solve_feasibility, Feasibility, LPProblem, Relation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("zero normal at index {0}")]
    ZeroNormal(usize),
    #[error("non-primitive normal at index {0}")]
    NonPrimitiveNormal(usize),
    #[error("redundant normal at index {0}")]
    RedundantNormal(usize),
    #[error("cone contains a line (normals do not span)")]
    NotPointed,
    #[error("cone has empty interior")]
    EmptyInterior,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be at least 1")]
    BadDimension,
    #[error("LP engine failed: {0}")]
    LpFailure(String),
}

/// A pointed, full-dimensional rational polyhedral cone
/// `{ l : <l, nu_j> >= 0 }` with primitive, irredundant facet normals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    dim: usize,
    normals: Vec<IntVector>,
}

/// An extreme ray, with the indices of the facets it lies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ray {
    pub direction: IntVector,
    pub active: BTreeSet<usize>,
}

/// A face of the cone, keyed by its maximal active facet set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub active: BTreeSet<usize>,
    pub codim: usize,
    pub annihilator_basis: Vec<IntVector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Interior,
    Boundary(BTreeSet<usize>),
    Outside,
}

impl Cone {
    /// Validate and build a cone. With `normalize` set, non-primitive normals
    /// are divided by their content and redundant inequalities dropped, each
    /// recorded as a warning; otherwise such input is rejected.
    pub fn build(
        dim: usize,
        normals: Vec<IntVector>,
        normalize: bool,
    ) -> Result<(Cone, Vec<String>), ConeError> {
        if dim == 0 {
            return Err(ConeError::BadDimension);
        }
        let mut warnings = Vec::new();
        let mut prepared: Vec<IntVector> = Vec::with_capacity(normals.len());
        for (j, nu) in normals.into_iter().enumerate() {
            if nu.dim() != dim {
                return Err(ConeError::DimensionMismatch {
                    expected: dim,
                    got: nu.dim(),
                });
            }
            if nu.is_zero() {
                return Err(ConeError::ZeroNormal(j));
            }
            if nu.content().is_one() {
                prepared.push(nu);
            } else if normalize {
                warnings.push(format!("normal {j} divided by its content"));
                prepared.push(nu.primitive_part().expect("nonzero"));
            } else {
                return Err(ConeError::NonPrimitiveNormal(j));
            }
        }
        // Drop redundant inequalities one at a time (duplicates included).
        let mut kept = prepared;
        let mut i = 0;
        while i < kept.len() {
            if kept.len() > 1 && is_redundant(dim, &kept, i)? {
                if normalize {
                    warnings.push(format!("redundant normal {:?} dropped", kept[i]));
                    kept.remove(i);
                    continue;
                }
                return Err(ConeError::RedundantNormal(i));
            }
            i += 1;
        }
        if rank_of(&kept) < dim {
            return Err(ConeError::NotPointed);
        }
        if !has_interior_point(dim, &kept)? {
            return Err(ConeError::EmptyInterior);
        }
        Ok((Cone { dim, normals: kept }, warnings))
    }

    /// Build without LP-backed validation; used where goodness is evaluated
    /// as a predicate on arbitrary presentations.
    pub fn new_unchecked(dim: usize, normals: Vec<IntVector>) -> Cone {
        Cone { dim, normals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[IntVector] {
        &self.normals
    }

    pub fn num_facets(&self) -> usize {
        self.normals.len()
    }

    /// Exact membership of a rational point.
    pub fn membership(&self, l: &RatVector) -> Result<Membership, ConeError> {
        if l.dim() != self.dim {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim,
                got: l.dim(),
            });
        }
        let mut active = BTreeSet::new();
        for (j, nu) in self.normals.iter().enumerate() {
            let p = nu.dot_rat(l);
            if p.is_negative() {
                return Ok(Membership::Outside);
            }
            if p.is_zero() {
                active.insert(j);
            }
        }
        Ok(if active.is_empty() {
            Membership::Interior
        } else {
            Membership::Boundary(active)
        })
    }

    /// Extreme rays via the double description method with lexicographic
    /// insertion order, sorted lexicographically by direction.
    pub fn rays(&self) -> Vec<Ray> {
        let n = self.dim;
        let d = self.normals.len();
        assert!(d >= n, "cone must have at least dim normals");
        // Pick the first n normals that are linearly independent.
        let mut basis_idx: Vec<usize> = Vec::new();
        let mut chosen: Vec<IntVector> = Vec::new();
        for j in 0..d {
            chosen.push(self.normals[j].clone());
            if rank_of(&chosen) == chosen.len() {
                basis_idx.push(j);
            } else {
                chosen.pop();
            }
            if basis_idx.len() == n {
                break;
            }
        }
        assert_eq!(basis_idx.len(), n, "normals do not span; cone not pointed");
        // Initial simplicial cone: ray k solves <nu_i, r> = det * delta_ik,
        // obtained from the adjugate of the basis matrix.
        let b = IntMatrix::from_rows(&chosen);
        let det = b.det();
        let sign = if det.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let mut current: Vec<IntVector> = (0..n)
            .map(|k| {
                // Column k of adj(B) = cofactor matrix transposed; solve via
                // Cramer: r_k[i] = cofactor. Use rational solve for clarity.
                let mut rhs = vec![BigRational::zero(); n];
                rhs[k] = BigRational::from(&det * &sign);
                solve_square(&b, &rhs)
                    .primitive_direction()
                    .expect("nonzero ray")
            })
            .collect();
        // Insert the remaining halfspaces in input order.
        let mut processed: Vec<usize> = basis_idx.clone();
        for j in 0..d {
            if basis_idx.contains(&j) {
                continue;
            }
            let nu = &self.normals[j];
            let vals: Vec<BigInt> = current.iter().map(|r| nu.dot(r)).collect();
            let pos: Vec<usize> = (0..current.len())
                .filter(|&i| vals[i].is_positive())
                .collect();
            let neg: Vec<usize> = (0..current.len())
                .filter(|&i| vals[i].is_negative())
                .collect();
            if neg.is_empty() {
                processed.push(j);
                continue;
            }
            let mut next: Vec<IntVector> = (0..current.len())
                .filter(|i| !neg.contains(i))
                .map(|i| current[i].clone())
                .collect();
            for &p in &pos {
                for &q in &neg {
                    if !adjacent(&self.normals, &processed, &current[p], &current[q], n) {
                        continue;
                    }
                    // Nonnegative combination vanishing on nu.
                    let comb = IntVector::new(
                        current[q]
                            .entries()
                            .iter()
                            .zip(current[p].entries())
                            .map(|(rq, rp)| &vals[p] * rq - &vals[q] * rp)
                            .collect(),
                    );
                    let comb = comb.primitive_part().expect("nonzero combination");
                    if !next.contains(&comb) {
                        next.push(comb);
                    }
                }
            }
            current = next;
            processed.push(j);
        }
        let mut rays: Vec<Ray> = current
            .into_iter()
            .map(|r| {
                let active = (0..d).filter(|&j| self.normals[j].dot(&r).is_zero()).collect();
                Ray { direction: r, active }
            })
            .collect();
        rays.sort_by(|a, b| a.direction.cmp(&b.direction));
        rays.dedup_by(|a, b| a.direction == b.direction);
        rays
    }

    /// All nonempty faces, keyed by maximal active sets, ordered by
    /// (codim, active set). Includes the full cone (codim 0) and the apex.
    pub fn face_lattice(&self) -> Vec<Face> {
        let d = self.normals.len();
        let rays = self.rays();
        // Incidence: ray set of each facet.
        let facet_rays: Vec<BTreeSet<usize>> = (0..d)
            .map(|j| {
                (0..rays.len())
                    .filter(|&i| rays[i].active.contains(&j))
                    .collect()
            })
            .collect();
        // Faces of a pointed cone correspond to intersections of facet ray
        // sets, closed under intersection, plus the cone itself and the apex.
        let all: BTreeSet<usize> = (0..rays.len()).collect();
        let mut sets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        sets.insert(all);
        sets.insert(BTreeSet::new());
        for fr in &facet_rays {
            sets.insert(fr.clone());
        }
        loop {
            let mut added = false;
            let list: Vec<BTreeSet<usize>> = sets.iter().cloned().collect();
            for a in &list {
                for b in &list {
                    let i: BTreeSet<usize> = a.intersection(b).cloned().collect();
                    if sets.insert(i) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|ray_set| {
                let active: BTreeSet<usize> = if ray_set.is_empty() {
                    (0..d).collect()
                } else {
                    (0..d)
                        .filter(|j| ray_set.iter().all(|&i| rays[i].active.contains(j)))
                        .collect()
                };
                let basis: Vec<IntVector> =
                    active.iter().map(|&j| self.normals[j].clone()).collect();
                let codim = if active.is_empty() { 0 } else { rank_of(&basis) };
                Face {
                    active,
                    codim,
                    annihilator_basis: basis,
                }
            })
            .collect();
        faces.sort_by(|a, b| (a.codim, &a.active).cmp(&(b.codim, &b.active)));
        faces.dedup_by(|a, b| a.active == b.active);
        faces
    }

    /// True iff some point pairs strictly positively with every normal.
    pub fn has_nonempty_interior(&self) -> bool {
        has_interior_point(self.dim, &self.normals).unwrap_or(false)
    }

    /// Map normals by a unimodular matrix: the cone of the transformed
    /// lattice presentation.
    pub fn transform_normals(&self, w: &IntMatrix) -> Cone {
        let normals = self
            .normals
            .iter()
            .map(|nu| w.mul_vec(nu))
            .collect();
        Cone {
            dim: self.dim,
            normals,
        }
    }
}

/// Two rays are adjacent iff the normals active on both have rank n - 2.
fn adjacent(
    normals: &[IntVector],
    processed: &[usize],
    r1: &IntVector,
    r2: &IntVector,
    n: usize,
) -> bool {
    if n == 2 {
        // In the plane every pair of rays is adjacent.
        return true;
    }
    let common: Vec<IntVector> = processed
        .iter()
        .filter(|&&j| normals[j].dot(r1).is_zero() && normals[j].dot(r2).is_zero())
        .map(|&j| normals[j].clone())
        .collect();
    rank_of(&common) == n - 2
}

/// Solve B x = rhs for square nonsingular integer B over Q.
fn solve_square(b: &IntMatrix, rhs: &[BigRational]) -> RatVector {
    let n = b.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n)
                .map(|j| BigRational::from(b.get(i, j).clone()))
                .collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).expect("singular");
        a.swap(k, p);
        let piv = a[k][k].clone();
        for j in k..=n {
            a[k][j] = &a[k][j] / &piv;
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in k..=n {
                    let v = &a[i][j] - &f * &a[k][j];
                    a[i][j] = v;
                }
            }
        }
    }
    RatVector::new((0..n).map(|i| a[i][n].clone()).collect())
}

/// Feasibility of `<l, nu_j> >= 1` for all j (interior point, scaled).
fn has_interior_point(dim: usize, normals: &[IntVector]) -> Result<bool, ConeError> {
    let mut lp = LPProblem::new(dim, "interior point");
    for nu in normals {
        lp.push(nu.to_rat(), Relation::Ge, BigRational::one());
    }
    match solve_feasibility(&lp).map_err(|e| ConeError::LpFailure(e.to_string()))? {
        Feasibility::Feasible(_) => Ok(true),
        Feasibility::Infeasible(_) => Ok(false),
    }
}

/// Whether inequality `i` is implied by the others:
/// `{ <l, nu_j> >= 0 for j != i, <l, nu_i> <= -1 }` infeasible.
fn is_redundant(dim: usize, normals: &[IntVector], i: usize) -> Result<bool, ConeError> {
    let mut lp = LPProblem::new(dim, "redundancy");
    for (j, nu) in normals.iter().enumerate() {
        if j == i {
            lp.push(nu.to_rat(), Relation::Le, -BigRational::one());
        } else {
            lp.push(nu.to_rat(), Relation::Ge, BigRational::zero());
        }
    }
    match solve_feasibility(&lp).map_err(|e| ConeError::LpFailure(e.to_string()))? {
        Feasibility::Feasible(_) => Ok(false),
        Feasibility::Infeasible(_) => Ok(true),
    }
}
