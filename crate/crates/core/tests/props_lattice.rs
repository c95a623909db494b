//! Property tests for the exact lattice layer.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use lcs_toric::lattice::{hnf, rank_of, saturation_check, snf, IntMatrix, IntVector};

fn int_matrix(max_dim: usize, max_entry: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(-max_entry..=max_entry, r * c).prop_map(move |es| {
            let rows: Vec<IntVector> = es
                .chunks(c)
                .map(|ch| IntVector::from_i64(ch))
                .collect();
            IntMatrix::from_rows(&rows)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snf_decomposition_and_divisibility(m in int_matrix(5, 20)) {
        let (d, u, v) = snf(&m);
        prop_assert_eq!(u.mul(&m).mul(&v), d.clone());
        prop_assert_eq!(u.det().abs(), BigInt::one());
        prop_assert_eq!(v.det().abs(), BigInt::one());
        let k = m.rows().min(m.cols());
        for i in 0..k {
            prop_assert!(!d.get(i, i).is_negative());
        }
        for i in 0..k.saturating_sub(1) {
            let a = d.get(i, i);
            let b = d.get(i + 1, i + 1);
            if a.is_zero() {
                prop_assert!(b.is_zero());
            } else {
                prop_assert!((b % a).is_zero());
            }
        }
    }

    #[test]
    fn snf_diagonal_is_pivot_order_independent(m in int_matrix(4, 10)) {
        // Transposing changes the elimination path; the invariant factors
        // must not change.
        let (d, _, _) = snf(&m);
        let (dt, _, _) = snf(&m.transpose());
        let k = m.rows().min(m.cols());
        for i in 0..k {
            prop_assert_eq!(d.get(i, i), dt.get(i, i));
        }
    }

    #[test]
    fn hnf_is_idempotent(m in int_matrix(5, 20)) {
        let (h, u) = hnf(&m);
        prop_assert_eq!(u.det().abs(), BigInt::one());
        prop_assert_eq!(u.mul(&m), h.clone());
        let (h2, _) = hnf(&h);
        prop_assert_eq!(h2, h);
    }
}

/// Membership of an integer point in the row lattice of an HNF matrix with
/// independent rows: eliminate against each pivot with exact division.
fn in_span_z(h: &IntMatrix, x: &IntVector) -> bool {
    let mut rem: Vec<BigInt> = x.entries().to_vec();
    for i in 0..h.rows() {
        let Some(p) = (0..h.cols()).find(|&j| !h.get(i, j).is_zero()) else {
            continue;
        };
        let (q, r) = (rem[p].clone() / h.get(i, p), rem[p].clone() % h.get(i, p));
        if !r.is_zero() {
            return false;
        }
        for j in 0..h.cols() {
            rem[j] -= &q * h.get(i, j);
        }
    }
    rem.iter().all(|v| v.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn saturation_agrees_with_lattice_point_oracle(
        n in 2usize..=3,
        k_seed in 1usize..=3,
        entries in proptest::collection::vec(-4i64..=4, 9),
    ) {
        let k = k_seed.min(n);
        let vectors: Vec<IntVector> = (0..k)
            .map(|i| IntVector::from_i64(&entries[i * n..(i + 1) * n]))
            .collect();
        prop_assume!(rank_of(&vectors) == k);
        let report = saturation_check(&vectors).unwrap();
        let (h, _) = hnf(&IntMatrix::from_rows(&vectors));
        // Scan lattice points of a box: any point of the rational span that
        // is not in the integer span witnesses non-saturation.
        let mut counterexample = false;
        let b = 3i64;
        let mut point = vec![-b; n];
        loop {
            let x = IntVector::from_i64(&point);
            let mut with: Vec<IntVector> = vectors.clone();
            with.push(x.clone());
            let in_span_q = rank_of(&with) == k;
            if in_span_q && !in_span_z(&h, &x) {
                counterexample = true;
                break;
            }
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                point[i] += 1;
                if point[i] <= b {
                    break;
                }
                point[i] = -b;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        if report.saturated {
            prop_assert!(!counterexample);
            let comp = report.completion.as_ref().unwrap();
            let mut all: Vec<IntVector> = vectors.clone();
            for i in 0..comp.rows() {
                all.push(comp.row(i));
            }
            prop_assert_eq!(IntMatrix::from_rows(&all).det().abs(), BigInt::one());
        } else if counterexample {
            prop_assert!(!report.saturated);
        }
    }
}
