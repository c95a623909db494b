//! Exact LP feasibility with Farkas certificates, and the certified
//! positivity check for deck-equivariant strictly convex potentials.
//!
//! The discrete lemma: a function on R satisfying u(t + 1) = lambda * u(t)
//! with lambda in (0, 1) and a strict convexity margin on second differences
//! cannot be nonpositive anywhere. Each anchor LP asserts nonpositivity at
//! one grid point; its infeasibility certificate is the discrete form of the
//! scaling contradiction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::RatVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PotentialError {
    #[error("lambda must satisfy 0 < lambda < 1")]
    BadScale,
    #[error("grid size must be at least 4")]
    BadGrid,
    #[error("eps must be positive")]
    BadEps,
    #[error("anchor index {0} out of range")]
    BadAnchor(usize),
    #[error("eps exceeds eps_max: the base discretization is infeasible")]
    EpsTooLarge,
    #[error("anchored LP at index {anchor} is feasible; this refutes the discrete lemma")]
    RefutationFound { anchor: usize, witness: RatVector },
    #[error("simplex cycle guard tripped")]
    CycleGuardTripped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: RatVector,
    pub relation: Relation,
    pub rhs: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPProblem {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    pub description: String,
}

impl LPProblem {
    pub fn new(num_vars: usize, description: impl Into<String>) -> Self {
        Self {
            num_vars,
            constraints: Vec::new(),
            description: description.into(),
        }
    }

    pub fn push(&mut self, coeffs: RatVector, relation: Relation, rhs: BigRational) {
        assert_eq!(coeffs.dim(), self.num_vars);
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Exact check that `x` satisfies every constraint.
    pub fn check_witness(&self, x: &RatVector) -> bool {
        if x.dim() != self.num_vars {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs = c.coeffs.dot(x);
            match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Ge => lhs >= c.rhs,
                Relation::Eq => lhs == c.rhs,
            }
        })
    }

    /// Exact check that `cert` recombines the constraints into the
    /// contradiction 0 <= c with c < 0 (constraints oriented as <=;
    /// multipliers of equality rows may carry either sign).
    pub fn check_certificate(&self, cert: &FarkasCertificate) -> bool {
        if cert.multipliers.len() != self.constraints.len() {
            return false;
        }
        let mut combo = vec![BigRational::zero(); self.num_vars];
        let mut rhs = BigRational::zero();
        for (c, y) in self.constraints.iter().zip(&cert.multipliers) {
            if y.is_zero() {
                continue;
            }
            let (sign_ok, s) = match c.relation {
                Relation::Le => (!y.is_negative(), BigRational::one()),
                Relation::Ge => (!y.is_negative(), -BigRational::one()),
                Relation::Eq => (true, BigRational::one()),
            };
            if !sign_ok {
                return false;
            }
            let f = y * &s;
            for (acc, a) in combo.iter_mut().zip(c.coeffs.entries()) {
                *acc += &f * a;
            }
            rhs += &f * &c.rhs;
        }
        combo.iter().all(|v| v.is_zero()) && rhs.is_negative()
    }
}

/// Nonnegative multipliers proving infeasibility, one per constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(RatVector),
    Infeasible(FarkasCertificate),
}

/// Exact phase-1 simplex feasibility with Bland's rule.
///
/// Internally the constraints are oriented as `A x <= b` (equalities split
/// into two rows) and the Farkas alternative system `{ y >= 0, A^T y = 0,
/// b^T y = -1 }` is solved by a phase-1 simplex: a feasible `y` is the
/// infeasibility certificate, while the alternative's own Farkas vector
/// rescales to a feasible point of the original system.
pub fn solve_feasibility(lp: &LPProblem) -> Result<Feasibility, PotentialError> {
    let n = lp.num_vars;
    // Oriented rows (a, b) meaning a.x <= b, remembering the source constraint.
    let mut rows: Vec<(Vec<BigRational>, BigRational, usize, bool)> = Vec::new();
    for (idx, c) in lp.constraints.iter().enumerate() {
        match c.relation {
            Relation::Le => rows.push((c.coeffs.entries().to_vec(), c.rhs.clone(), idx, true)),
            Relation::Ge => rows.push((
                c.coeffs.entries().iter().map(|v| -v).collect(),
                -c.rhs.clone(),
                idx,
                true,
            )),
            Relation::Eq => {
                rows.push((c.coeffs.entries().to_vec(), c.rhs.clone(), idx, true));
                rows.push((
                    c.coeffs.entries().iter().map(|v| -v).collect(),
                    -c.rhs.clone(),
                    idx,
                    false,
                ));
            }
        }
    }
    let m = rows.len();
    if m == 0 {
        return Ok(Feasibility::Feasible(RatVector::zeros(n)));
    }

    // Equilibrate: divide each oriented row by the content of its coefficient
    // vector. Feasibility is unchanged; certificate multipliers fold back by
    // the same factor.
    let mut col_scale: Vec<BigRational> = Vec::with_capacity(m);
    for (a, b, _, _) in rows.iter_mut() {
        let g = rat_content(a.iter());
        if !g.is_one() {
            for v in a.iter_mut() {
                *v = &*v / &g;
            }
            *b = &*b / &g;
        }
        col_scale.push(g);
    }

    // Alternative system: columns indexed by oriented rows; equation rows are
    // the n coefficient-sum equations plus the normalization b^T y = -1.
    let mut eq: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); m]; n + 1];
    let mut rhs: Vec<BigRational> = vec![BigRational::zero(); n + 1];
    for (j, (a, b, _, _)) in rows.iter().enumerate() {
        for (i, aij) in a.iter().enumerate() {
            eq[i][j] = aij.clone();
        }
        eq[n][j] = b.clone();
    }
    rhs[n] = -BigRational::one();

    // The coefficient equations are homogeneous, so each may be divided by
    // its content. The normalization row may too: `b^T y = -c` for any c > 0
    // pins down the same alternative, and this is where a tiny common factor
    // in the rhs vector (such as a high-precision eps) would otherwise flood
    // the tableau. The applied row scales fold into the recovered point.
    let mut row_scale: Vec<BigRational> = Vec::with_capacity(n + 1);
    for row in eq.iter_mut() {
        let g = rat_content(row.iter());
        if !g.is_one() {
            for v in row.iter_mut() {
                *v = &*v / &g;
            }
        }
        row_scale.push(g);
    }

    match phase_one(&eq, &rhs)? {
        PhaseOneOutcome::Solved(y) => {
            // y is a certificate over oriented rows; fold back to constraints.
            let mut mult = vec![BigRational::zero(); lp.constraints.len()];
            for (j, (_, _, idx, positive)) in rows.iter().enumerate() {
                let yj = &y[j] / &col_scale[j];
                if *positive {
                    mult[*idx] += &yj;
                } else {
                    mult[*idx] -= &yj;
                }
            }
            let cert = FarkasCertificate { multipliers: mult };
            debug_assert!(lp.check_certificate(&cert));
            if !lp.check_certificate(&cert) {
                return Err(PotentialError::CycleGuardTripped);
            }
            Ok(Feasibility::Infeasible(cert))
        }
        PhaseOneOutcome::Inconsistent(z) => {
            // z has z . col_j <= 0 for every oriented row j and z_n < 0
            // after sign bookkeeping and undoing the row scales;
            // x = w[0..n] / (-w[n]) with w_i = z_i / row_scale_i is feasible.
            let w: Vec<BigRational> = z
                .iter()
                .zip(&row_scale)
                .map(|(zi, g)| zi / g)
                .collect();
            let t = w[n].clone();
            assert!(t.is_negative(), "alternative certificate has wrong sign");
            let x = RatVector::new(w[..n].iter().map(|v| v / -&t).collect());
            debug_assert!(lp.check_witness(&x));
            if !lp.check_witness(&x) {
                return Err(PotentialError::CycleGuardTripped);
            }
            Ok(Feasibility::Feasible(x))
        }
    }
}

/// Positive rational content (gcd of numerators over lcm of denominators)
/// of the nonzero entries; `1` if there are none.
fn rat_content<'a>(vals: impl Iterator<Item = &'a BigRational>) -> BigRational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for v in vals {
        if v.is_zero() {
            continue;
        }
        num = num.gcd(v.numer());
        den = den.lcm(v.denom());
    }
    if num.is_zero() {
        BigRational::one()
    } else {
        BigRational::new(num, den)
    }
}

enum PhaseOneOutcome {
    /// A nonnegative solution of the equation system.
    Solved(Vec<BigRational>),
    /// Multipliers z with z^T M <= 0 (componentwise) and z^T rhs > 0.
    Inconsistent(Vec<BigRational>),
}

/// Phase-1 simplex for `{ M y = rhs, y >= 0 }` on a fraction-free integer
/// tableau (Bareiss-style two-term updates over a common divisor), with
/// Dantzig pricing and a Bland fallback against cycling.
fn phase_one(
    eq: &[Vec<BigRational>],
    rhs: &[BigRational],
) -> Result<PhaseOneOutcome, PotentialError> {
    let m = eq.len();
    let ncols = eq.first().map_or(0, |r| r.len());

    // Clear denominators row by row; each equation may be scaled freely as
    // long as its rhs scales with it. The factors fold into the multipliers.
    let mut row_lcm: Vec<BigInt> = Vec::with_capacity(m);
    let mut itab: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    let mut irhs: Vec<BigInt> = Vec::with_capacity(m);
    for i in 0..m {
        let mut l = rhs[i].denom().clone();
        for v in &eq[i] {
            l = l.lcm(v.denom());
        }
        itab.push(
            eq[i]
                .iter()
                .map(|v| v.numer() * (&l / v.denom()))
                .collect(),
        );
        irhs.push(rhs[i].numer() * (&l / rhs[i].denom()));
        row_lcm.push(l);
    }

    // Row signs: make rhs nonnegative; remember flips to unscale multipliers.
    let mut sigma = vec![false; m];
    for i in 0..m {
        if irhs[i].is_negative() {
            sigma[i] = true;
            for v in itab[i].iter_mut() {
                *v = -&*v;
            }
            irhs[i] = -&irhs[i];
        }
    }

    // Kept for the terminal multiplier solve; dead columns make the reduced
    // costs of departed artificials unreliable.
    let orig: Vec<Vec<BigInt>> = itab.clone();

    // Tableau columns: [y columns | artificial columns], artificial i has
    // identity column e_i and phase-1 cost 1. True values are entry / div
    // with div > 0 throughout.
    let total = ncols + m;
    for (i, row) in itab.iter_mut().enumerate() {
        row.extend((0..m).map(|k| {
            if k == i {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        }));
    }
    let mut basis: Vec<usize> = (0..m).map(|i| ncols + i).collect();
    // Artificials never re-enter; their columns go dead on leaving.
    let mut dead = vec![false; total];
    let mut obj: Vec<BigInt> = vec![BigInt::zero(); total];
    let mut obj_rhs = BigInt::zero();
    for i in 0..m {
        for j in 0..total {
            obj[j] -= &itab[i][j];
        }
        obj_rhs -= &irhs[i];
    }
    for i in 0..m {
        obj[ncols + i] += BigInt::one();
    }
    let mut div = BigInt::one();

    let guard = 200usize
        .saturating_mul(m + 1)
        .saturating_mul(total + 1)
        .max(100_000);
    let bland_after = 20usize.saturating_mul(m + total).max(2_000);
    let mut iter = 0usize;
    loop {
        iter += 1;
        if iter > guard {
            return Err(PotentialError::CycleGuardTripped);
        }
        // Dantzig at first (most negative reduced cost), Bland once the
        // iteration count suggests stalling.
        let enter = if iter <= bland_after {
            let mut best: Option<usize> = None;
            for j in 0..total {
                if !dead[j]
                    && obj[j].is_negative()
                    && best.map_or(true, |b| obj[j] < obj[b])
                {
                    best = Some(j);
                }
            }
            best
        } else {
            (0..total).find(|&j| !dead[j] && obj[j].is_negative())
        };
        let Some(enter) = enter else {
            break;
        };
        // Ratio test on rhs_i / tab_ie, ties by smallest basic variable.
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if itab[i][enter].is_positive() {
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let cmp = (&irhs[i] * &itab[l][enter])
                            .cmp(&(&irhs[l] * &itab[i][enter]));
                        cmp == std::cmp::Ordering::Less
                            || (cmp == std::cmp::Ordering::Equal && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
        }
        let Some(li) = leave else {
            // Phase-1 objective is bounded below by 0; unbounded is impossible.
            return Err(PotentialError::CycleGuardTripped);
        };
        let leaving = basis[li];
        pivot(
            &mut itab, &mut irhs, &mut obj, &mut obj_rhs, &mut div, &dead, li, enter,
        );
        basis[li] = enter;
        if leaving >= ncols {
            dead[leaving] = true;
        }
    }

    if std::env::var_os("LCS_LP_STATS").is_some() {
        let max_bits = itab
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| v.bits())
            .max()
            .unwrap_or(0);
        eprintln!("lp stats: pivots={iter} max_entry_bits={max_bits}");
    }
    if obj_rhs.is_zero() {
        let mut y = vec![BigRational::zero(); ncols];
        for i in 0..m {
            if basis[i] < ncols {
                y[basis[i]] = BigRational::new(irhs[i].clone(), div.clone());
            }
        }
        Ok(PhaseOneOutcome::Solved(y))
    } else {
        // Simplex multipliers pi solve B^T pi = c_B against the original
        // columns of the final basis; then undo the row flips and the
        // denominator clearing.
        let mut bt: Vec<Vec<BigRational>> = Vec::with_capacity(m);
        let mut cb: Vec<BigRational> = Vec::with_capacity(m);
        for &bv in &basis {
            if bv < ncols {
                bt.push((0..m).map(|i| BigRational::from(orig[i][bv].clone())).collect());
                cb.push(BigRational::zero());
            } else {
                let mut row = vec![BigRational::zero(); m];
                row[bv - ncols] = BigRational::one();
                bt.push(row);
                cb.push(BigRational::one());
            }
        }
        let pi = solve_square_rat(bt, cb).ok_or(PotentialError::CycleGuardTripped)?;
        let mut z = vec![BigRational::zero(); m];
        for i in 0..m {
            let v = if sigma[i] { -pi[i].clone() } else { pi[i].clone() };
            z[i] = v * BigRational::from(row_lcm[i].clone());
        }
        Ok(PhaseOneOutcome::Inconsistent(z))
    }
}

/// Solve a square rational system by Gauss-Jordan elimination; None if
/// singular.
fn solve_square_rat(
    mut a: Vec<Vec<BigRational>>,
    mut b: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let n = a.len();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(k, p);
        b.swap(k, p);
        let piv = a[k][k].clone();
        for v in a[k].iter_mut() {
            *v = &*v / &piv;
        }
        b[k] = &b[k] / &piv;
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in 0..n {
                    if !a[k][j].is_zero() {
                        let v = &a[i][j] - &f * &a[k][j];
                        a[i][j] = v;
                    }
                }
                b[i] = &b[i] - &f * &b[k];
            }
        }
    }
    Some(b)
}

/// One fraction-free pivot: every non-pivot row (and the objective) updates
/// as `(p * row - f * pivot_row) / div`, the pivot row is left as is, and the
/// common divisor becomes `p`. The divisions are exact.
#[allow(clippy::too_many_arguments)]
fn pivot(
    tab: &mut [Vec<BigInt>],
    rhs: &mut [BigInt],
    obj: &mut [BigInt],
    obj_rhs: &mut BigInt,
    div: &mut BigInt,
    dead: &[bool],
    li: usize,
    enter: usize,
) {
    let m = tab.len();
    let total = obj.len();
    for i in 0..m {
        if i == li {
            continue;
        }
        let f = std::mem::replace(&mut tab[i][enter], BigInt::zero());
        if f.is_zero() {
            for j in 0..total {
                if !dead[j] && !tab[i][j].is_zero() {
                    let p = &tab[li][enter] * &tab[i][j];
                    tab[i][j] = p / &*div;
                }
            }
            rhs[i] = &tab[li][enter] * &rhs[i] / &*div;
        } else {
            for j in 0..total {
                if dead[j] || j == enter {
                    continue;
                }
                let p = &tab[li][enter] * &tab[i][j] - &f * &tab[li][j];
                tab[i][j] = p / &*div;
            }
            rhs[i] = (&tab[li][enter] * &rhs[i] - &f * &rhs[li]) / &*div;
        }
    }
    let f = std::mem::replace(&mut obj[enter], BigInt::zero());
    if f.is_zero() {
        for j in 0..total {
            if !dead[j] && !obj[j].is_zero() {
                let p = &tab[li][enter] * &obj[j];
                obj[j] = p / &*div;
            }
        }
        *obj_rhs = &tab[li][enter] * &*obj_rhs / &*div;
    } else {
        for j in 0..total {
            if dead[j] || j == enter {
                continue;
            }
            let p = &tab[li][enter] * &obj[j] - &f * &tab[li][j];
            obj[j] = p / &*div;
        }
        *obj_rhs = (&tab[li][enter] * &*obj_rhs - &f * &rhs[li]) / &*div;
    }
    *div = tab[li][enter].clone();
}

/// Build the discretized positivity LP for scale `lambda`, grid size `n`
/// and convexity margin `eps`, optionally anchored by `u_k0 <= 0`.
///
/// Variables sample one period on t_k = k/N; the extended window
/// `k in [-N, 2N]` is folded back through `u_{k+N} = lambda * u_k`.
pub fn build_lp(
    lambda: &BigRational,
    n: usize,
    eps: &BigRational,
    anchor: Option<usize>,
) -> Result<LPProblem, PotentialError> {
    if !lambda.is_positive() || *lambda >= BigRational::one() {
        return Err(PotentialError::BadScale);
    }
    if n < 4 {
        return Err(PotentialError::BadGrid);
    }
    if !eps.is_positive() {
        return Err(PotentialError::BadEps);
    }
    if let Some(k0) = anchor {
        if k0 >= n {
            return Err(PotentialError::BadAnchor(k0));
        }
    }
    let ni = n as i64;
    let mut lp = LPProblem::new(
        n,
        format!(
            "convexity margin LP, lambda={lambda}, N={n}, eps={eps}, anchor={anchor:?}"
        ),
    );
    // Coefficient of extended sample u_k on the base variables.
    let fold = |k: i64| -> (usize, BigRational) {
        let block = k.div_euclid(ni);
        let idx = k.rem_euclid(ni) as usize;
        let mut f = BigRational::one();
        if block >= 0 {
            for _ in 0..block {
                f *= lambda;
            }
        } else {
            for _ in 0..-block {
                f /= lambda;
            }
        }
        (idx, f)
    };
    for k in (-ni + 1)..(2 * ni) {
        let mut coeffs = vec![BigRational::zero(); n];
        for (off, w) in [(-1i64, BigRational::one()), (0, -BigRational::from(BigInt::from(2))), (1, BigRational::one())] {
            let (idx, f) = fold(k + off);
            coeffs[idx] += f * w;
        }
        lp.push(RatVector::new(coeffs), Relation::Ge, eps.clone());
    }
    if let Some(k0) = anchor {
        let mut coeffs = vec![BigRational::zero(); n];
        coeffs[k0] = BigRational::one();
        lp.push(RatVector::new(coeffs), Relation::Le, BigRational::zero());
    }
    Ok(lp)
}

/// Largest fraction `p/q <= target` with `q <= max_den` (Stern-Brocot walk
/// with run acceleration).
fn best_rational_below(target: &BigRational, max_den: &BigInt) -> BigRational {
    let floor = target.floor();
    if target.is_integer() {
        return target.clone();
    }
    // lo <= target < hi throughout.
    let mut lo: (BigInt, BigInt) = (floor.to_integer(), BigInt::one());
    let mut hi: (BigInt, BigInt) = (floor.to_integer() + 1, BigInt::one());
    loop {
        // Step from lo toward target by adding multiples of hi: find the
        // largest t with (lo + t*hi) / (loq + t*hiq) <= target and
        // denominator within bound.
        // (lo.0 + t*hi.0) * target.den <= target.num * (lo.1 + t*hi.1)
        // t * (hi.0 * den - num * hi.1) <= num * lo.1 - lo.0 * den
        let num = target.numer();
        let den = target.denom();
        let a = hi.0.clone() * den - num * &hi.1; // > 0 since hi > target
        let b = num * &lo.1 - &lo.0 * den; // >= 0 since lo <= target
        let t_den_cap = (max_den - &lo.1).div_floor(&hi.1);
        let t = (b.div_floor(&a)).min(t_den_cap);
        if t.is_positive() {
            lo = (lo.0 + &t * &hi.0, lo.1 + &t * &hi.1);
        }
        // Step hi toward target over lo: largest t with
        // (hi + t*lo)/(hiq + t*loq) > target.
        // (hi.0 + t*lo.0)*den > num*(hi.1 + t*lo.1)
        // t * (num*lo.1 - lo.0*den) < hi.0*den - num*hi.1
        let b2 = num * &lo.1 - &lo.0 * den;
        let a2 = hi.0.clone() * den - num * &hi.1;
        let t2 = if b2.is_zero() {
            // lo == target exactly; done.
            break;
        } else {
            let q = (&a2 - BigInt::one()).div_floor(&b2);
            q.min((max_den - &hi.1).div_floor(&lo.1))
        };
        if t2.is_positive() {
            hi = (hi.0 + &t2 * &lo.0, hi.1 + &t2 * &lo.1);
        }
        if &lo.1 + &hi.1 > *max_den {
            break;
        }
        if t.is_zero() && t2.is_zero() {
            break;
        }
    }
    BigRational::new(lo.0, lo.1)
}

/// The geometric surrogate witness: `u_k = q^k` with `q` the best rational
/// approximation of `lambda^(1/N)` from below with denominator <= 10^6.
pub fn surrogate_base(lambda: &BigRational, n: usize) -> BigRational {
    // High-precision rational lower bound for lambda^(1/N).
    let prec: u32 = 40;
    let scale = BigInt::from(10u32).pow(prec);
    let scaled = lambda.numer() * scale.pow(n as u32) / lambda.denom();
    let root = nth_root_floor(&scaled, n as u32);
    let lower = BigRational::new(root, scale);
    let q = best_rational_below(&lower, &BigInt::from(1_000_000u32));
    debug_assert!(pow_rat(&q, n as i64) <= *lambda);
    q
}

fn pow_rat(x: &BigRational, e: i64) -> BigRational {
    let mut r = BigRational::one();
    if e >= 0 {
        for _ in 0..e {
            r *= x;
        }
    } else {
        for _ in 0..-e {
            r /= x;
        }
    }
    r
}

/// Largest integer r with r^n <= x (x >= 0).
fn nth_root_floor(x: &BigInt, n: u32) -> BigInt {
    assert!(!x.is_negative());
    if x.is_zero() {
        return BigInt::zero();
    }
    let bits = x.bits();
    let mut hi = BigInt::one() << (bits / n as u64 + 2);
    let mut lo = BigInt::zero();
    while &lo + 1u32 < hi {
        let mid: BigInt = (&lo + &hi) >> 1;
        if mid.pow(n) <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Extended surrogate samples on `k in [-N, 2N]` and their minimal second
/// difference. Returns `None` if the surrogate violates strict convexity
/// (possible only when the root approximation is too coarse).
pub fn eps_max(lambda: &BigRational, n: usize) -> Option<BigRational> {
    if !lambda.is_positive() || *lambda >= BigRational::one() || n < 4 {
        return None;
    }
    let q = surrogate_base(lambda, n);
    let ni = n as i64;
    let sample = |k: i64| -> BigRational {
        let block = k.div_euclid(ni);
        let idx = k.rem_euclid(ni);
        pow_rat(lambda, block) * pow_rat(&q, idx)
    };
    let mut min: Option<BigRational> = None;
    for k in (-ni + 1)..(2 * ni) {
        let d2 = sample(k - 1) - BigRational::from(BigInt::from(2)) * sample(k) + sample(k + 1);
        if !d2.is_positive() {
            return None;
        }
        if min.as_ref().map_or(true, |m| d2 < *m) {
            min = Some(d2);
        }
    }
    min
}

/// The surrogate witness as a point of the base LP's variable space.
pub fn surrogate_witness(lambda: &BigRational, n: usize) -> RatVector {
    let q = surrogate_base(lambda, n);
    RatVector::new((0..n as i64).map(|k| pow_rat(&q, k)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositivityVerdict {
    pub lambda: BigRational,
    pub grid_n: usize,
    pub eps: BigRational,
    pub base_feasible: bool,
    pub base_witness: RatVector,
    pub anchors_infeasible: bool,
    pub certificates: Vec<FarkasCertificate>,
    pub certified: bool,
}

/// Run the full LP campaign: base LP expected feasible, every anchored LP
/// expected infeasible with a verified Farkas certificate.
pub fn certify_positivity(
    lambda: &BigRational,
    n: usize,
    eps: &BigRational,
) -> Result<PositivityVerdict, PotentialError> {
    if !lambda.is_positive() || *lambda >= BigRational::one() {
        return Err(PotentialError::BadScale);
    }
    if n < 4 {
        return Err(PotentialError::BadGrid);
    }
    if !eps.is_positive() {
        return Err(PotentialError::BadEps);
    }
    let base = build_lp(lambda, n, eps, None)?;
    // Gate eps by the surrogate's minimal second difference; the base LP is
    // homogeneous and cannot reject an over-large eps on its own.
    if let Some(em) = eps_max(lambda, n) {
        if *eps > em {
            return Err(PotentialError::EpsTooLarge);
        }
    }
    // The surrogate decides base feasibility when it verifies; otherwise the
    // LP itself does.
    let witness = {
        let s = surrogate_witness(lambda, n);
        if base.check_witness(&s) {
            s
        } else {
            match solve_feasibility(&base)? {
                Feasibility::Feasible(w) => w,
                Feasibility::Infeasible(_) => return Err(PotentialError::EpsTooLarge),
            }
        }
    };
    let mut certificates = Vec::with_capacity(n);
    for k0 in 0..n {
        let lp = build_lp(lambda, n, eps, Some(k0))?;
        match solve_feasibility(&lp)? {
            Feasibility::Infeasible(cert) => {
                if !lp.check_certificate(&cert) {
                    return Err(PotentialError::CycleGuardTripped);
                }
                certificates.push(cert);
            }
            Feasibility::Feasible(w) => {
                return Err(PotentialError::RefutationFound {
                    anchor: k0,
                    witness: w,
                })
            }
        }
    }
    Ok(PositivityVerdict {
        lambda: lambda.clone(),
        grid_n: n,
        eps: eps.clone(),
        base_feasible: true,
        base_witness: witness,
        anchors_infeasible: true,
        certificates,
        certified: true,
    })
}

/// The hand-derived tent certificate for an anchored LP: triangular weights
/// on the convexity rows telescope to the chord inequality over one period
/// span; the anchor row closes the scaling contradiction.
pub fn tent_certificate(
    lambda: &BigRational,
    n: usize,
    k0: usize,
) -> FarkasCertificate {
    let ni = n as i64;
    let num_conv = (3 * n - 1) as i64;
    let mut mult = vec![BigRational::zero(); num_conv as usize + 1];
    // Convexity row for window index k sits at position k - (-N + 1).
    let a = k0 as i64 - ni;
    for j in 1..(2 * ni) {
        let w = j.min(2 * ni - j);
        let k = a + j;
        let pos = (k + ni - 1) as usize;
        mult[pos] = BigRational::from(BigInt::from(w));
    }
    let contraction = lambda + pow_rat(lambda, -1) - BigRational::from(BigInt::from(2));
    mult[num_conv as usize] = contraction;
    FarkasCertificate { multipliers: mult }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn trivial_feasible() {
        let mut lp = LPProblem::new(1, "x in [1,2]");
        lp.push(RatVector::from_i64(&[1]), Relation::Ge, rat(1, 1));
        lp.push(RatVector::from_i64(&[1]), Relation::Le, rat(2, 1));
        match solve_feasibility(&lp).unwrap() {
            Feasibility::Feasible(x) => {
                assert!(lp.check_witness(&x));
            }
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn trivial_infeasible() {
        let mut lp = LPProblem::new(1, "x >= 1 and x <= 0");
        lp.push(RatVector::from_i64(&[1]), Relation::Ge, rat(1, 1));
        lp.push(RatVector::from_i64(&[1]), Relation::Le, rat(0, 1));
        match solve_feasibility(&lp).unwrap() {
            Feasibility::Infeasible(cert) => {
                assert!(lp.check_certificate(&cert));
            }
            _ => panic!("expected infeasible"),
        }
    }

    #[test]
    fn equality_constraints() {
        let mut lp = LPProblem::new(2, "x + y = 1, x - y = 3");
        lp.push(RatVector::from_i64(&[1, 1]), Relation::Eq, rat(1, 1));
        lp.push(RatVector::from_i64(&[1, -1]), Relation::Eq, rat(3, 1));
        match solve_feasibility(&lp).unwrap() {
            Feasibility::Feasible(x) => {
                assert_eq!(x.entries()[0], rat(2, 1));
                assert_eq!(x.entries()[1], rat(-1, 1));
            }
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn build_lp_row_counts() {
        let lp = build_lp(&rat(1, 2), 4, &rat(1, 100), None).unwrap();
        assert_eq!(lp.num_vars, 4);
        assert_eq!(lp.constraints.len(), 11); // 3N - 1
        let lp = build_lp(&rat(1, 2), 4, &rat(1, 100), Some(0)).unwrap();
        assert_eq!(lp.constraints.len(), 12);
        assert!(matches!(
            build_lp(&rat(1, 1), 4, &rat(1, 100), None),
            Err(PotentialError::BadScale)
        ));
    }

    #[test]
    fn anchored_lp_infeasible() {
        let lp = build_lp(&rat(1, 2), 8, &rat(1, 100), Some(3)).unwrap();
        match solve_feasibility(&lp).unwrap() {
            Feasibility::Infeasible(cert) => assert!(lp.check_certificate(&cert)),
            Feasibility::Feasible(w) => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn certify_small() {
        let v = certify_positivity(&rat(1, 2), 8, &rat(1, 1000)).unwrap();
        assert!(v.certified);
        assert_eq!(v.certificates.len(), 8);
    }

    #[test]
    fn eps_too_large() {
        let err = certify_positivity(&rat(1, 2), 8, &rat(10, 1)).unwrap_err();
        assert_eq!(err, PotentialError::EpsTooLarge);
    }

    #[test]
    fn tent_certificate_valid() {
        let n = 8;
        let lambda = rat(1, 2);
        let eps = rat(1, 1000);
        for k0 in 0..n {
            let lp = build_lp(&lambda, n, &eps, Some(k0)).unwrap();
            let cert = tent_certificate(&lambda, n, k0);
            assert!(lp.check_certificate(&cert), "tent certificate at {k0}");
        }
    }

    #[test]
    fn surrogate_satisfies_base_lp() {
        let lambda = rat(9, 10);
        let n = 8;
        let e = eps_max(&lambda, n).unwrap();
        let lp = build_lp(&lambda, n, &e, None).unwrap();
        assert!(lp.check_witness(&surrogate_witness(&lambda, n)));
    }

    #[test]
    fn best_rational_below_works() {
        let t = rat(355, 113); // ~pi
        let b = best_rational_below(&t, &BigInt::from(50));
        assert!(b <= t);
        // exhaustive check
        for q in 1..=50i64 {
            let p = (t.clone() * rat(q, 1)).floor().to_integer();
            let f = BigRational::new(p, BigInt::from(q));
            assert!(f <= b, "found better {f} vs {b}");
        }
    }
}
