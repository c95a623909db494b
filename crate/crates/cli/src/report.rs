//! Canonical JSON emission: sorted keys (serde_json's default map is
//! ordered), compact separators, rationals as "p/q" strings, big integers as
//! decimal strings, facet indices 1-based.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{Map, Value};
use std::collections::BTreeSet;

use lcs_toric::cone::{Face, Ray};
use lcs_toric::goodness::{FaceCertificate, GoodnessReport};
use lcs_toric::invariant::{EquivalenceWitness, MomentPolytope, SubtorusTable};
use lcs_toric::lattice::{IntMatrix, IntVector, RatVector, SaturationReport};
use lcs_toric::potential::{FarkasCertificate, PositivityVerdict};

pub const SCHEMA_VERSION: &str = "1.0.0";

pub fn int_value(i: &BigInt) -> Value {
    Value::String(i.to_string())
}

pub fn rat_value(r: &BigRational) -> Value {
    if r.denom().is_one() {
        Value::String(r.numer().to_string())
    } else {
        Value::String(format!("{}/{}", r.numer(), r.denom()))
    }
}

pub fn ivec_value(v: &IntVector) -> Value {
    Value::Array(v.entries().iter().map(int_value).collect())
}

pub fn rvec_value(v: &RatVector) -> Value {
    Value::Array(v.entries().iter().map(rat_value).collect())
}

pub fn imat_value(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| int_value(m.get(i, j))).collect()))
            .collect(),
    )
}

/// Facet index sets are emitted 1-based.
pub fn active_value(active: &BTreeSet<usize>) -> Value {
    Value::Array(active.iter().map(|&j| Value::from(j as u64 + 1)).collect())
}

pub fn face_value(f: &Face) -> Value {
    let mut o = Map::new();
    o.insert("active".into(), active_value(&f.active));
    o.insert("codim".into(), Value::from(f.codim as u64));
    Value::Object(o)
}

pub fn saturation_value(s: &SaturationReport) -> Value {
    let mut o = Map::new();
    o.insert("saturated".into(), Value::Bool(s.saturated));
    o.insert(
        "snf_diagonal".into(),
        Value::Array(s.snf_diagonal.iter().map(int_value).collect()),
    );
    o.insert(
        "completion".into(),
        s.completion.as_ref().map_or(Value::Null, imat_value),
    );
    Value::Object(o)
}

fn certificate_value(c: &FaceCertificate) -> Value {
    let mut o = Map::new();
    o.insert("face".into(), face_value(&c.face));
    o.insert("count_ok".into(), Value::Bool(c.count_ok));
    o.insert("saturation".into(), saturation_value(&c.saturation));
    Value::Object(o)
}

pub fn goodness_value(r: &GoodnessReport) -> Value {
    let mut o = Map::new();
    o.insert("good".into(), Value::Bool(r.good));
    o.insert("interior_ok".into(), Value::Bool(r.interior_ok));
    o.insert(
        "certificates".into(),
        Value::Array(r.certificates.iter().map(certificate_value).collect()),
    );
    o.insert(
        "violation".into(),
        r.violation.as_ref().map_or(Value::Null, face_value),
    );
    Value::Object(o)
}

pub fn rays_value(rays: &[Ray]) -> Value {
    Value::Array(
        rays.iter()
            .map(|r| {
                let mut o = Map::new();
                o.insert("direction".into(), ivec_value(&r.direction));
                o.insert("active".into(), active_value(&r.active));
                Value::Object(o)
            })
            .collect(),
    )
}

pub fn faces_value(faces: &[Face]) -> Value {
    Value::Array(faces.iter().map(face_value).collect())
}

pub fn polytope_value(p: &MomentPolytope) -> Value {
    let mut o = Map::new();
    o.insert("lee_vector".into(), ivec_value(&p.lee_vector));
    o.insert(
        "vertices".into(),
        Value::Array(p.vertices.iter().map(rvec_value).collect()),
    );
    Value::Object(o)
}

pub fn subtorus_value(t: &SubtorusTable) -> Value {
    let mut o = Map::new();
    o.insert(
        "rows".into(),
        Value::Array(
            t.rows
                .iter()
                .map(|r| {
                    let mut ro = Map::new();
                    ro.insert("face".into(), face_value(&r.face));
                    ro.insert("rank_k".into(), Value::from(r.rank_k as u64));
                    ro.insert(
                        "lattice_basis".into(),
                        Value::Array(r.lattice_basis.iter().map(ivec_value).collect()),
                    );
                    Value::Object(ro)
                })
                .collect(),
        ),
    );
    Value::Object(o)
}

pub fn witness_value(w: &EquivalenceWitness) -> Value {
    let mut o = Map::new();
    o.insert("matrix_u".into(), imat_value(&w.matrix_u));
    o.insert(
        "facet_permutation".into(),
        Value::Array(
            w.facet_permutation
                .iter()
                .map(|&p| Value::from(p as u64 + 1))
                .collect(),
        ),
    );
    Value::Object(o)
}

pub fn farkas_value(c: &FarkasCertificate) -> Value {
    Value::Array(c.multipliers.iter().map(rat_value).collect())
}

pub fn verdict_value(v: &PositivityVerdict) -> Value {
    let mut o = Map::new();
    o.insert(
        "verdict".into(),
        Value::String(if v.certified { "Certified" } else { "NotCertified" }.into()),
    );
    o.insert("lambda".into(), rat_value(&v.lambda));
    o.insert("grid_n".into(), Value::from(v.grid_n as u64));
    o.insert("eps".into(), rat_value(&v.eps));
    o.insert("base_feasible".into(), Value::Bool(v.base_feasible));
    o.insert("base_witness".into(), rvec_value(&v.base_witness));
    o.insert("anchors_infeasible".into(), Value::Bool(v.anchors_infeasible));
    o.insert(
        "certificates".into(),
        Value::Array(v.certificates.iter().map(farkas_value).collect()),
    );
    Value::Object(o)
}

pub fn error_result(kind: &str, message: &str) -> Value {
    let mut e = Map::new();
    e.insert("kind".into(), Value::String(kind.into()));
    e.insert("message".into(), Value::String(message.into()));
    let mut o = Map::new();
    o.insert("error".into(), Value::Object(e));
    Value::Object(o)
}

pub fn envelope(command: &str, input_digest: &str, result: Value, warnings: &[String]) -> String {
    let mut o = Map::new();
    o.insert(
        "schema_version".into(),
        Value::String(SCHEMA_VERSION.into()),
    );
    o.insert("command".into(), Value::String(command.into()));
    o.insert("input_digest".into(), Value::String(input_digest.into()));
    o.insert("result".into(), result);
    o.insert(
        "warnings".into(),
        Value::Array(
            warnings
                .iter()
                .map(|w| Value::String(w.clone()))
                .collect(),
        ),
    );
    serde_json::to_string(&Value::Object(o)).unwrap()
}
