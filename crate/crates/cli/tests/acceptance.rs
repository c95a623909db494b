//! Acceptance gate: one test per criterion, each printing a single pass or
//! fail line. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines on success.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use lcs_toric::cone::{Cone, Membership};
use lcs_toric::goodness::{brute_force_good, check_good};
use lcs_toric::invariant::{
    deck_reduce, gl_equivalent, make_invariant, moment_slice, DEFAULT_SEARCH_BUDGET,
};
use lcs_toric::lattice::{hnf, snf, IntMatrix, IntVector, RatVector};
use lcs_toric::potential::{build_lp, certify_positivity, eps_max};

fn report(n: usize, desc: &str, outcome: Result<(), String>) {
    match &outcome {
        Ok(()) => println!("criterion {n} ({desc}): PASS"),
        Err(e) => println!("criterion {n} ({desc}): FAIL — {e}"),
    }
    if let Err(e) = outcome {
        panic!("criterion {n} failed: {e}");
    }
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn orthant(n: usize) -> Cone {
    let normals = (0..n)
        .map(|i| {
            let mut e = vec![0i64; n];
            e[i] = 1;
            IntVector::from_i64(&e)
        })
        .collect();
    Cone::build(n, normals, false).unwrap().0
}

fn square_cone() -> Cone {
    let normals = vec![
        IntVector::from_i64(&[1, 0, 1]),
        IntVector::from_i64(&[0, 1, 1]),
        IntVector::from_i64(&[-1, 0, 1]),
        IntVector::from_i64(&[0, -1, 1]),
    ];
    Cone::build(3, normals, false).unwrap().0
}

fn nongood_cone() -> Cone {
    let normals = vec![
        IntVector::from_i64(&[1, 0, 0]),
        IntVector::from_i64(&[1, 2, 0]),
        IntVector::from_i64(&[0, 0, 1]),
    ];
    Cone::build(3, normals, false).unwrap().0
}

/// A random pointed full-dimensional cone, built with normalization on.
fn random_cone(rng: &mut StdRng, n_max: usize, d_max: usize, entry: i64) -> Cone {
    loop {
        let n = rng.gen_range(2..=n_max);
        let d = rng.gen_range(n..=d_max.max(n));
        let normals: Vec<IntVector> = (0..d)
            .map(|_| {
                IntVector::new(
                    (0..n)
                        .map(|_| BigInt::from(rng.gen_range(-entry..=entry)))
                        .collect(),
                )
            })
            .collect();
        if normals.iter().any(|v| v.entries().iter().all(|e| e.is_zero())) {
            continue;
        }
        if let Ok((c, _)) = Cone::build(n, normals, true) {
            return c;
        }
    }
}

fn pow_rat(x: &BigRational, e: i64) -> BigRational {
    let mut r = BigRational::one();
    for _ in 0..e.abs() {
        if e >= 0 {
            r *= x;
        } else {
            r /= x;
        }
    }
    r
}

#[test]
fn criterion_1_goodness_atlas() {
    let out = (|| -> Result<(), String> {
        let t = Instant::now();
        for c in [orthant(2), orthant(3), orthant(4), square_cone()] {
            if !check_good(&c).good {
                return Err(format!("expected good for dim-{} atlas cone", c.dim()));
            }
        }
        let r = check_good(&nongood_cone());
        if r.good {
            return Err("non-good cone reported good".into());
        }
        let v = r.violation.ok_or("missing violation")?;
        let want: BTreeSet<usize> = [0usize, 1].into_iter().collect();
        if v.active != want {
            return Err(format!("violation active {:?}, want {{0,1}}", v.active));
        }
        let cert = r
            .certificates
            .iter()
            .find(|c| c.face.active == want)
            .ok_or("no certificate for the violating face")?;
        let diag: Vec<i64> = cert
            .saturation
            .snf_diagonal
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect();
        if diag != vec![1, 2] {
            return Err(format!("SNF diagonal {diag:?}, want [1, 2]"));
        }
        if t.elapsed() >= Duration::from_secs(1) {
            return Err(format!("runtime {:?} >= 1 s", t.elapsed()));
        }
        Ok(())
    })();
    report(1, "goodness atlas", out);
}

#[test]
fn criterion_2_goodness_oracle() {
    let out = (|| -> Result<(), String> {
        let t = Instant::now();
        let mut rng = StdRng::seed_from_u64(0x6f72_61_63);
        for i in 0..200 {
            let c = random_cone(&mut rng, 3, 6, 5);
            let fast = check_good(&c).good;
            let slow = brute_force_good(&c).map_err(|e| e.to_string())?;
            if fast != slow {
                return Err(format!(
                    "disagreement on cone {i}: check_good={fast}, oracle={slow}, normals={:?}",
                    c.normals()
                ));
            }
        }
        if t.elapsed() >= Duration::from_secs(60) {
            return Err(format!("runtime {:?} >= 60 s", t.elapsed()));
        }
        Ok(())
    })();
    report(2, "goodness oracle agreement, 200 random cones", out);
}

#[test]
fn criterion_3_snf_hnf_properties() {
    let out = (|| -> Result<(), String> {
        let mut rng = StdRng::seed_from_u64(0x736e_66);
        for i in 0..500 {
            let r = rng.gen_range(1usize..=5);
            let c = rng.gen_range(1usize..=5);
            let rows: Vec<IntVector> = (0..r)
                .map(|_| {
                    IntVector::new(
                        (0..c)
                            .map(|_| BigInt::from(rng.gen_range(-20i64..=20)))
                            .collect(),
                    )
                })
                .collect();
            let m = IntMatrix::from_rows(&rows);
            let (d, u, v) = snf(&m);
            if u.mul(&m).mul(&v) != d {
                return Err(format!("case {i}: D != U*M*V"));
            }
            if u.det().abs() != BigInt::one() || v.det().abs() != BigInt::one() {
                return Err(format!("case {i}: transform not unimodular"));
            }
            let k = r.min(c);
            for t in 0..k {
                for s in 0..k {
                    if t != s && !d.get(t, s).is_zero() {
                        return Err(format!("case {i}: D not diagonal"));
                    }
                }
                if d.get(t, t).is_negative() {
                    return Err(format!("case {i}: negative diagonal"));
                }
            }
            for t in 0..k.saturating_sub(1) {
                let a = d.get(t, t);
                let b = d.get(t + 1, t + 1);
                if !a.is_zero() && !(b % a).is_zero() {
                    return Err(format!("case {i}: divisibility chain broken"));
                }
                if a.is_zero() && !b.is_zero() {
                    return Err(format!("case {i}: zero before nonzero on diagonal"));
                }
            }
            let (h, _) = hnf(&m);
            let (h2, _) = hnf(&h);
            if h2 != h {
                return Err(format!("case {i}: HNF not idempotent"));
            }
        }
        Ok(())
    })();
    report(3, "SNF/HNF properties, 500 random matrices", out);
}

fn coarse(m: &Membership) -> u8 {
    match m {
        Membership::Interior => 0,
        Membership::Boundary(_) => 1,
        Membership::Outside => 2,
    }
}

#[test]
fn criterion_4_double_description_round_trip() {
    let out = (|| -> Result<(), String> {
        let mut rng = StdRng::seed_from_u64(0x6464_72_74);
        let mut cones = vec![
            orthant(2),
            orthant(3),
            orthant(4),
            square_cone(),
            nongood_cone(),
            Cone::build(
                2,
                vec![IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[-1, 1])],
                false,
            )
            .unwrap()
            .0,
            Cone::build(
                2,
                vec![IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[-1, 2])],
                false,
            )
            .unwrap()
            .0,
        ];
        for _ in 0..50 {
            cones.push(random_cone(&mut rng, 4, 8, 5));
        }
        for (ci, c) in cones.iter().enumerate() {
            let n = c.dim();
            let ray_dirs: Vec<IntVector> =
                c.rays().into_iter().map(|r| r.direction).collect();
            let dual = Cone::build(n, ray_dirs, true)
                .map_err(|e| format!("cone {ci}: dual build failed: {e}"))?
                .0;
            let rebuilt_normals: Vec<IntVector> =
                dual.rays().into_iter().map(|r| r.direction).collect();
            let rebuilt = Cone::build(n, rebuilt_normals, true)
                .map_err(|e| format!("cone {ci}: rebuild failed: {e}"))?
                .0;
            for pi in 0..1000 {
                let p = RatVector::new(
                    (0..n)
                        .map(|_| {
                            rat(rng.gen_range(-20i64..=20), rng.gen_range(1i64..=5))
                        })
                        .collect(),
                );
                let a = c.membership(&p).unwrap();
                let b = rebuilt.membership(&p).unwrap();
                if coarse(&a) != coarse(&b) {
                    return Err(format!(
                        "cone {ci}, point {pi}: membership {a:?} vs {b:?}"
                    ));
                }
            }
        }
        Ok(())
    })();
    report(4, "H->V->H membership round trip", out);
}

#[test]
fn criterion_5_moment_slice() {
    let out = (|| -> Result<(), String> {
        let p = moment_slice(&orthant(2), &IntVector::from_i64(&[1, 1]))
            .map_err(|e| e.to_string())?;
        let want: Vec<RatVector> = vec![
            RatVector::from_i64(&[0, 1]),
            RatVector::from_i64(&[1, 0]),
        ];
        if p.vertices != want {
            return Err(format!("orthant slice vertices {:?}", p.vertices));
        }
        let a = IntVector::from_i64(&[0, 0, 1]);
        let q = moment_slice(&square_cone(), &a).map_err(|e| e.to_string())?;
        let mut want: Vec<RatVector> = [
            [1i64, 1, 1],
            [1, -1, 1],
            [-1, 1, 1],
            [-1, -1, 1],
        ]
        .iter()
        .map(|v| RatVector::from_i64(v))
        .collect();
        want.sort();
        if q.vertices != want {
            return Err(format!("square cone slice vertices {:?}", q.vertices));
        }
        for (poly, lee) in [(&p, IntVector::from_i64(&[1, 1])), (&q, a)] {
            for v in &poly.vertices {
                let pairing: BigRational = v
                    .entries()
                    .iter()
                    .zip(lee.entries())
                    .map(|(x, y)| x * BigRational::from(y.clone()))
                    .sum();
                if !pairing.is_one() {
                    return Err(format!("vertex {v:?} has pairing {pairing}"));
                }
            }
        }
        Ok(())
    })();
    report(5, "moment slice exact vertex sets", out);
}

#[test]
fn criterion_6_deck_reduction() {
    let out = (|| -> Result<(), String> {
        let mut rng = StdRng::seed_from_u64(0x6465_636b);
        let fixtures = [
            (orthant(2), IntVector::from_i64(&[1, 1])),
            (orthant(3), IntVector::from_i64(&[1, 1, 1])),
            (square_cone(), IntVector::from_i64(&[0, 0, 1])),
        ];
        for i in 0..100 {
            let (c, lee) = &fixtures[i % fixtures.len()];
            let n = c.dim();
            let rays = c.rays();
            // A random nonzero nonnegative combination of rays, possibly
            // scaled far outside the slab.
            let mut l = vec![BigRational::zero(); n];
            let mut nonzero = false;
            for r in &rays {
                let w = rat(rng.gen_range(0i64..=10), rng.gen_range(1i64..=4));
                if w.is_zero() {
                    continue;
                }
                nonzero = true;
                for (acc, e) in l.iter_mut().zip(r.direction.entries()) {
                    *acc += &w * BigRational::from(e.clone());
                }
            }
            if !nonzero {
                let r = &rays[0];
                for (acc, e) in l.iter_mut().zip(r.direction.entries()) {
                    *acc += BigRational::from(e.clone());
                }
            }
            let q = rng.gen_range(2i64..=20);
            let lam = rat(rng.gen_range(1..q), q);
            let scale = pow_rat(&lam, rng.gen_range(-4i64..=4));
            let l = RatVector::new(l.iter().map(|v| v * &scale).collect());

            let (rep, m) = deck_reduce(&l, lee, &lam, c).map_err(|e| e.to_string())?;
            let pairing: BigRational = rep
                .entries()
                .iter()
                .zip(lee.entries())
                .map(|(x, y)| x * BigRational::from(y.clone()))
                .sum();
            if !(pairing > lam && pairing <= BigRational::one()) {
                return Err(format!("case {i}: pairing {pairing} outside (lambda, 1]"));
            }
            let expect =
                RatVector::new(l.entries().iter().map(|v| v * pow_rat(&lam, m)).collect());
            if rep != expect {
                return Err(format!("case {i}: rep != lambda^m * l"));
            }
            let (rep2, m2) = deck_reduce(&rep, lee, &lam, c).map_err(|e| e.to_string())?;
            if rep2 != rep || m2 != 0 {
                return Err(format!("case {i}: reduction not idempotent"));
            }
        }
        Ok(())
    })();
    report(6, "deck reduction, 100 random (l, lambda) pairs", out);
}

#[test]
fn criterion_7_positivity_certification() {
    let out = (|| -> Result<(), String> {
        for lam in [rat(1, 2), rat(9, 10), rat(99, 100)] {
            for n in [8usize, 32, 128] {
                let em = eps_max(&lam, n)
                    .ok_or_else(|| format!("eps_max failed at lambda={lam}, N={n}"))?;
                let eps = em / rat(2, 1);
                let t = Instant::now();
                let v = certify_positivity(&lam, n, &eps).map_err(|e| {
                    format!("lambda={lam}, N={n}: {e}")
                })?;
                if !v.certified || !v.base_feasible || !v.anchors_infeasible {
                    return Err(format!("lambda={lam}, N={n}: not certified"));
                }
                if v.certificates.len() != n {
                    return Err(format!("lambda={lam}, N={n}: missing certificates"));
                }
                // Independent re-verification against freshly built LPs.
                for (k0, cert) in v.certificates.iter().enumerate() {
                    let lp = build_lp(&lam, n, &eps, Some(k0)).map_err(|e| e.to_string())?;
                    if !lp.check_certificate(cert) {
                        return Err(format!(
                            "lambda={lam}, N={n}, anchor {k0}: certificate rejected"
                        ));
                    }
                }
                if n == 128 && t.elapsed() >= Duration::from_secs(300) {
                    return Err(format!(
                        "lambda={lam}, N=128 runtime {:?} >= 5 min",
                        t.elapsed()
                    ));
                }
            }
        }
        Ok(())
    })();
    report(7, "positivity certification campaign", out);
}

#[test]
fn criterion_8_gl_equivalence() {
    let out = (|| -> Result<(), String> {
        let a = rat(1, 1);
        let lam = rat(1, 2);
        let i_orth = make_invariant(orthant(2), a.clone(), lam.clone()).unwrap();
        let shear = Cone::build(
            2,
            vec![IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[-1, 1])],
            false,
        )
        .unwrap()
        .0;
        let skew = Cone::build(
            2,
            vec![IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[-1, 2])],
            false,
        )
        .unwrap()
        .0;
        let i_shear = make_invariant(shear, a.clone(), lam.clone()).unwrap();
        let i_skew = make_invariant(skew, a, lam).unwrap();

        let w = gl_equivalent(&i_orth, &i_shear, DEFAULT_SEARCH_BUDGET)
            .map_err(|e| e.to_string())?
            .ok_or("expected a witness for orthant vs shear")?;
        if !w.verify(&i_orth.cone, &i_shear.cone) {
            return Err("witness fails verification".into());
        }
        if gl_equivalent(&i_orth, &i_skew, DEFAULT_SEARCH_BUDGET)
            .map_err(|e| e.to_string())?
            .is_some()
        {
            return Err("unexpected witness for orthant vs skew".into());
        }
        let winv = w.inverse();
        if !winv.verify(&i_shear.cone, &i_orth.cone) {
            return Err("inverse witness fails verification".into());
        }
        let id = w.compose(&winv);
        if id.matrix_u != IntMatrix::identity(2)
            || id.facet_permutation != vec![0, 1]
            || !id.verify(&i_orth.cone, &i_orth.cone)
        {
            return Err("composition with inverse is not the identity".into());
        }
        Ok(())
    })();
    report(8, "GL-equivalence witness / none / compose / invert", out);
}

#[test]
fn criterion_9_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_lcstoric");
    let atlas = concat!(env!("CARGO_MANIFEST_DIR"), "/atlas");
    let fx = |name: &str| format!("{atlas}/{name}.json");
    let out = (|| -> Result<(), String> {
        let mut cases: Vec<(Vec<String>, i32)> = Vec::new();
        for name in [
            "orthant2", "orthant3", "orthant4", "square_cone", "shear2", "skew2",
        ] {
            cases.push((vec!["check-good".into(), fx(name)], 0));
            cases.push((vec!["rays".into(), fx(name)], 0));
            cases.push((vec!["faces".into(), fx(name)], 0));
            cases.push((vec!["slice".into(), fx(name)], 0));
            cases.push((vec!["invariant".into(), fx(name)], 0));
            cases.push((vec!["orbit-summary".into(), fx(name)], 0));
        }
        cases.push((vec!["check-good".into(), fx("nongood3")], 1));
        cases.push((vec!["rays".into(), fx("nongood3")], 0));
        cases.push((vec!["invariant".into(), fx("nongood3")], 1));
        cases.push((vec!["orbit-summary".into(), fx("nongood3")], 1));
        cases.push((
            vec!["equiv".into(), fx("orthant2"), fx("shear2")],
            0,
        ));
        cases.push((vec!["equiv".into(), fx("orthant2"), fx("skew2")], 1));
        cases.push((
            vec![
                "deck-reduce".into(),
                fx("orthant2"),
                "--point".into(),
                "4,0".into(),
            ],
            0,
        ));
        cases.push((
            vec![
                "potential-check".into(),
                "--lambda".into(),
                "1/2".into(),
                "--grid".into(),
                "8".into(),
                "--eps".into(),
                "1/1000".into(),
            ],
            0,
        ));
        cases.push((vec!["check-good".into(), fx("no_such_fixture")], 2));
        cases.push((
            vec![
                "potential-check".into(),
                "--lambda".into(),
                "3/2".into(),
                "--grid".into(),
                "8".into(),
                "--eps".into(),
                "1/1000".into(),
            ],
            2,
        ));

        for (args, want_code) in &cases {
            let mut outputs: Vec<Vec<u8>> = Vec::new();
            for _ in 0..3 {
                let out = Command::new(bin)
                    .args(args)
                    .output()
                    .map_err(|e| e.to_string())?;
                let code = out.status.code().unwrap_or(-1);
                if code != *want_code {
                    return Err(format!(
                        "{args:?}: exit {code}, want {want_code}; stderr: {}",
                        String::from_utf8_lossy(&out.stderr)
                    ));
                }
                outputs.push(out.stdout);
            }
            if outputs[0] != outputs[1] || outputs[1] != outputs[2] {
                return Err(format!("{args:?}: output differs across runs"));
            }
            if outputs[0].is_empty() {
                return Err(format!("{args:?}: empty report"));
            }
        }
        Ok(())
    })();
    report(9, "CLI determinism and exit-code contract", out);
}
