use lcs_toric::potential::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::time::Instant;

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn main() {
    for l in [rat(1, 2), rat(9, 10), rat(99, 100)] {
        let n = 128usize;
        let em = eps_max(&l, n).unwrap();
        let eps = &em / rat(2, 1);
        let t = Instant::now();
        let v = certify_positivity(&l, n, &eps).unwrap();
        assert!(v.certified);
        println!("lambda={} N={} full campaign: {:?}", l, n, t.elapsed());
    }
}
