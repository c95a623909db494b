//! The good-cone predicate: every face of codimension k, 0 < k < n, must be
//! the intersection of exactly k facets whose primitive normals extend to a
//! Z-basis of the lattice. Includes an LP-driven brute-force oracle that
//! enumerates facet subsets independently of the double description path.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::cone::{Cone, Face};
use crate::lattice::{
    rank_of, snf, IntMatrix, IntVector, SaturationReport,
};
use crate::potential::{solve_feasibility, Feasibility, LPProblem, Relation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GoodnessError {
    #[error("facet count {0} exceeds the brute-force guard of {1}")]
    TooLarge(usize, usize),
    #[error("LP engine failed: {0}")]
    LpFailure(String),
}

const BRUTE_FORCE_GUARD: usize = 12;

/// Per-face certificate: the facet-count condition and the saturation of the
/// active normals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceCertificate {
    pub face: Face,
    pub count_ok: bool,
    pub saturation: SaturationReport,
}

impl FaceCertificate {
    pub fn valid(&self) -> bool {
        self.count_ok && self.saturation.saturated
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodnessReport {
    pub good: bool,
    pub interior_ok: bool,
    pub certificates: Vec<FaceCertificate>,
    pub violation: Option<Face>,
}

/// Saturation data for a stack of rows that may be linearly dependent: the
/// SNF diagonal with zeros trimmed, saturated iff every nonzero entry is 1.
/// A completion is attached only for independent saturated stacks.
fn saturation_of_rows(rows: &[IntVector]) -> SaturationReport {
    let m = IntMatrix::from_rows(rows);
    let k = rows.len();
    if m.rank() == k {
        return crate::lattice::saturation_check(rows).expect("independent rows");
    }
    let (d, _u, _v) = snf(&m);
    let diag: Vec<BigInt> = (0..k.min(m.cols()))
        .map(|i| d.get(i, i).clone())
        .collect();
    let saturated = diag.iter().all(|e| e.is_zero() || e.is_one());
    SaturationReport {
        saturated,
        snf_diagonal: diag,
        completion: None,
    }
}

/// Decide goodness, with a certificate per face of codimension 0 < k < n.
pub fn check_good(c: &Cone) -> GoodnessReport {
    let n = c.dim();
    let interior_ok = rank_of(c.normals()) == n && c.has_nonempty_interior();
    if !interior_ok {
        return GoodnessReport {
            good: false,
            interior_ok,
            certificates: Vec::new(),
            violation: None,
        };
    }
    let mut certificates = Vec::new();
    let mut violation: Option<Face> = None;
    for face in c.face_lattice() {
        if face.codim == 0 || face.codim >= n {
            continue;
        }
        let count_ok = face.active.len() == face.codim;
        let saturation = saturation_of_rows(&face.annihilator_basis);
        let cert = FaceCertificate {
            face: face.clone(),
            count_ok,
            saturation,
        };
        if !cert.valid() && violation.is_none() {
            violation = Some(face);
        }
        certificates.push(cert);
    }
    GoodnessReport {
        good: violation.is_none(),
        interior_ok,
        certificates,
        violation,
    }
}

/// Exhaustive oracle: enumerate all facet subsets, find those that are the
/// maximal active set of a genuine face via an exact LP for a relative
/// interior point, and test the conditions directly.
pub fn brute_force_good(c: &Cone) -> Result<bool, GoodnessError> {
    let n = c.dim();
    let d = c.num_facets();
    if d > BRUTE_FORCE_GUARD {
        return Err(GoodnessError::TooLarge(d, BRUTE_FORCE_GUARD));
    }
    if rank_of(c.normals()) < n {
        return Ok(false);
    }
    for mask in 0u32..(1u32 << d) {
        let subset: BTreeSet<usize> = (0..d).filter(|&j| mask >> j & 1 == 1).collect();
        // Is `subset` the maximal active set of some point of the cone?
        let mut lp = LPProblem::new(n, "relative interior point");
        for (j, nu) in c.normals().iter().enumerate() {
            if subset.contains(&j) {
                lp.push(nu.to_rat(), Relation::Eq, BigRational::zero());
            } else {
                lp.push(nu.to_rat(), Relation::Ge, BigRational::one());
            }
        }
        let feasible = match solve_feasibility(&lp)
            .map_err(|e| GoodnessError::LpFailure(e.to_string()))?
        {
            Feasibility::Feasible(_) => true,
            Feasibility::Infeasible(_) => false,
        };
        if !feasible {
            continue;
        }
        if subset.is_empty() {
            continue; // the cone itself, codim 0
        }
        let normals: Vec<IntVector> = subset.iter().map(|&j| c.normals()[j].clone()).collect();
        let codim = rank_of(&normals);
        if codim >= n {
            continue; // the apex
        }
        if subset.len() != codim {
            return Ok(false);
        }
        if !saturation_of_rows(&normals).saturated {
            return Ok(false);
        }
    }
    // Interior: the empty subset's LP is exactly the interior-point LP.
    let mut lp = LPProblem::new(n, "interior point");
    for nu in c.normals() {
        lp.push(nu.to_rat(), Relation::Ge, BigRational::one());
    }
    match solve_feasibility(&lp).map_err(|e| GoodnessError::LpFailure(e.to_string()))? {
        Feasibility::Feasible(_) => Ok(true),
        Feasibility::Infeasible(_) => Ok(false),
    }
}
