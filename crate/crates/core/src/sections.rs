//! Lattice-point models of the graded section spaces `H^0(B + mL)`.
//!
//! A [`MonomialSystem`] describes a variety `X` (via its dimension), a line
//! bundle `L` (by the lattice points spanning `H^0(L)`) and a split bundle
//! `B = B_1 ⊕ ... ⊕ B_k` (one basis rule per summand). Multiplying a section by
//! an element of `H^0(L)` is lattice-point addition.
//!
//! Two basis rules exist:
//!
//! * degree rule: products of projective spaces, `B_i = O(b_i1, ..., b_it)`,
//!   `L = O(l_1, ..., l_t)`; points are exponent vectors in homogeneous
//!   coordinates, one block per factor;
//! * point rule: `basis(m) = B_pts + m * L_pts` (Minkowski sums of point sets).
//!   This models a toric section ring only when the polytopes are normal; the
//!   constructors do not check normality.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::koszul::binomial;
use crate::{Error, Result};

pub type Point = Vec<i64>;

/// Twists `0..=CLOSURE_DEPTH` are checked for closure at construction.
pub const CLOSURE_DEPTH: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    Projective,
    Product,
    Polytope,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum BasisRule {
    Degrees {
        factor_dims: Vec<usize>,
        l_degrees: Vec<i64>,
        /// one twist vector per summand, one entry per factor
        b_degrees: Vec<Vec<i64>>,
    },
    Points {
        b_points: Vec<Vec<Point>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSystem {
    ambient_rank: usize,
    variety_dim: usize,
    kind: SystemKind,
    l_points: Vec<Point>,
    rule: BasisRule,
}

/// `h^i(P^n, O(a))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CohomologyQuery {
    pub proj_dim: usize,
    pub twist: i64,
    pub index: usize,
}

/// Whether the vanishing `H^i(L) = H^i(B + mL) = 0` (`i, m > 0`) needed for
/// the equivariant identification is known for an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypotheses {
    Verified,
    Fails,
    /// Polytope instances: no cohomology oracle, vanishing is taken on trust.
    Assumed,
}

pub fn projective_system(n: usize, b_degrees: &[i64], l_degree: i64) -> Result<MonomialSystem> {
    product_system(
        &[n],
        &[l_degree],
        &b_degrees.iter().map(|&b| vec![b]).collect::<Vec<_>>(),
    )
}

/// `P^{n_1} x ... x P^{n_t}` with `L = O(l_1, ..., l_t)` and one summand per
/// entry of `b_degrees`.
pub fn product_system(
    factor_dims: &[usize],
    l_degrees: &[i64],
    b_degrees: &[Vec<i64>],
) -> Result<MonomialSystem> {
    if factor_dims.is_empty() || factor_dims.len() != l_degrees.len() {
        return Err(Error::Config(
            "need one line-bundle degree per projective factor".into(),
        ));
    }
    if l_degrees.iter().any(|&l| l < 1) {
        return Err(Error::Config("line-bundle degrees must be positive".into()));
    }
    if b_degrees.is_empty() {
        return Err(Error::Config("B needs at least one summand".into()));
    }
    if b_degrees.iter().any(|b| b.len() != factor_dims.len()) {
        return Err(Error::Config(
            "every summand of B needs one twist per factor".into(),
        ));
    }
    let l_points = degree_points(factor_dims, l_degrees);
    let sys = MonomialSystem {
        ambient_rank: factor_dims.iter().map(|n| n + 1).sum(),
        variety_dim: factor_dims.iter().sum(),
        kind: if factor_dims.len() == 1 {
            SystemKind::Projective
        } else {
            SystemKind::Product
        },
        l_points,
        rule: BasisRule::Degrees {
            factor_dims: factor_dims.to_vec(),
            l_degrees: l_degrees.to_vec(),
            b_degrees: b_degrees.to_vec(),
        },
    };
    sys.check_closure(CLOSURE_DEPTH)?;
    Ok(sys)
}

pub fn polytope_system(
    l_pts: &[Point],
    b_pts_per_summand: &[Vec<Point>],
    variety_dim: usize,
) -> Result<MonomialSystem> {
    if l_pts.is_empty() {
        return Err(Error::Config("L needs at least one lattice point".into()));
    }
    if b_pts_per_summand.is_empty() || b_pts_per_summand.iter().any(|b| b.is_empty()) {
        return Err(Error::Config(
            "every summand of B needs at least one lattice point".into(),
        ));
    }
    let r = l_pts[0].len();
    let all = l_pts.iter().chain(b_pts_per_summand.iter().flatten());
    if let Some(bad) = all.clone().find(|p| p.len() != r) {
        return Err(Error::Config(format!(
            "point {bad:?} does not live in Z^{r}"
        )));
    }
    let sys = MonomialSystem {
        ambient_rank: r,
        variety_dim,
        kind: SystemKind::Polytope,
        l_points: canonical(l_pts.iter().cloned()),
        rule: BasisRule::Points {
            b_points: b_pts_per_summand
                .iter()
                .map(|b| canonical(b.iter().cloned()))
                .collect(),
        },
    };
    sys.check_closure(CLOSURE_DEPTH)?;
    Ok(sys)
}

/// Lex-sorted exponent vectors of `O(d_1, ..., d_t)` on a product of
/// projective spaces; empty if any degree is negative.
pub fn degree_points(factor_dims: &[usize], degrees: &[i64]) -> Vec<Point> {
    let mut out: Vec<Point> = vec![Vec::new()];
    for (&n, &d) in factor_dims.iter().zip(degrees) {
        if d < 0 {
            return Vec::new();
        }
        let block = monomials(n + 1, d as u64);
        let mut next = Vec::with_capacity(out.len() * block.len());
        for prefix in &out {
            for m in &block {
                let mut p = prefix.clone();
                p.extend_from_slice(m);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Exponent vectors of degree `d` in `vars` variables, lex ascending.
fn monomials(vars: usize, d: u64) -> Vec<Point> {
    fn rec(vars: usize, d: i64, prefix: &mut Point, out: &mut Vec<Point>) {
        if vars == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in 0..=d {
            prefix.push(a);
            rec(vars - 1, d - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if vars > 0 {
        rec(vars, d as i64, &mut Vec::with_capacity(vars), &mut out);
    }
    out
}

fn canonical(points: impl IntoIterator<Item = Point>) -> Vec<Point> {
    points.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Pointwise Minkowski sum, deduplicated and lex-sorted.
pub fn minkowski_sum(a: &[Point], b: &[Point]) -> Vec<Point> {
    let mut set = BTreeSet::new();
    for x in a {
        for y in b {
            set.insert(x.iter().zip(y).map(|(u, v)| u + v).collect::<Point>());
        }
    }
    set.into_iter().collect()
}

impl MonomialSystem {
    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    /// `dim X`.
    pub fn variety_dim(&self) -> usize {
        self.variety_dim
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    /// Basis of `H^0(L)`, lex-sorted.
    pub fn l_points(&self) -> &[Point] {
        &self.l_points
    }

    /// `h^0(L)`.
    pub fn h0_l(&self) -> usize {
        self.l_points.len()
    }

    pub fn num_summands(&self) -> usize {
        match &self.rule {
            BasisRule::Degrees { b_degrees, .. } => b_degrees.len(),
            BasisRule::Points { b_points } => b_points.len(),
        }
    }

    /// Lex-sorted basis of `H^0(B_summand + mL)`. Negative twists are the
    /// zero space: the section module only has pieces in degrees `m >= 0`.
    pub fn basis(&self, summand: usize, m: i64) -> Result<Vec<Point>> {
        self.check_summand(summand)?;
        if m < 0 {
            return Ok(Vec::new());
        }
        Ok(match &self.rule {
            BasisRule::Degrees {
                factor_dims,
                l_degrees,
                b_degrees,
            } => {
                let twist: Vec<i64> = b_degrees[summand]
                    .iter()
                    .zip(l_degrees)
                    .map(|(b, l)| b + m * l)
                    .collect();
                degree_points(factor_dims, &twist)
            }
            BasisRule::Points { b_points } => {
                let mut acc = b_points[summand].clone();
                for _ in 0..m {
                    acc = minkowski_sum(&acc, &self.l_points);
                }
                acc
            }
        })
    }

    /// `h^0(B_summand + mL)`.
    pub fn h0(&self, summand: usize, m: i64) -> Result<usize> {
        self.check_summand(summand)?;
        if m < 0 {
            return Ok(0);
        }
        match &self.rule {
            BasisRule::Degrees {
                factor_dims,
                l_degrees,
                b_degrees,
            } => {
                let mut n = 1u64;
                for ((&dim, &b), &l) in factor_dims.iter().zip(&b_degrees[summand]).zip(l_degrees)
                {
                    let a = b + m * l;
                    if a < 0 {
                        return Ok(0);
                    }
                    n *= binomial(a as u64 + dim as u64, dim as u64);
                }
                Ok(n as usize)
            }
            BasisRule::Points { .. } => Ok(self.basis(summand, m)?.len()),
        }
    }

    /// `h^0(B + mL)` summed over all summands.
    pub fn h0_total(&self, m: i64) -> usize {
        (0..self.num_summands())
            .map(|s| self.h0(s, m).expect("summand in range"))
            .sum()
    }

    fn check_summand(&self, summand: usize) -> Result<()> {
        if summand >= self.num_summands() {
            return Err(Error::OutOfRange(format!(
                "summand {summand} of a bundle with {} summands",
                self.num_summands()
            )));
        }
        Ok(())
    }

    /// Verifies `basis(m) + L_points ⊆ basis(m + 1)` for `0 <= m <= depth`.
    pub fn check_closure(&self, depth: i64) -> Result<()> {
        for s in 0..self.num_summands() {
            let mut cur = self.basis(s, 0)?;
            for m in 0..=depth {
                let next = self.basis(s, m + 1)?;
                let set: HashSet<&Point> = next.iter().collect();
                for x in &cur {
                    for v in &self.l_points {
                        let y: Point = x.iter().zip(v).map(|(a, b)| a + b).collect();
                        if !set.contains(&y) {
                            return Err(Error::Integrity(format!(
                                "summand {s}: {x:?} + {v:?} is not a basis point of twist {}",
                                m + 1
                            )));
                        }
                    }
                }
                cur = next;
            }
        }
        Ok(())
    }

    /// The system computing `B^* ⊗ K_X` with the same `L`; projective
    /// instances only (`B = ⊕O(b)` ↦ `⊕O(-b-n-1)`).
    pub fn duality_data(&self) -> Option<MonomialSystem> {
        match (&self.rule, self.kind) {
            (
                BasisRule::Degrees {
                    factor_dims,
                    l_degrees,
                    b_degrees,
                },
                SystemKind::Projective,
            ) => {
                let n = factor_dims[0] as i64;
                let dual: Vec<i64> = b_degrees.iter().map(|b| -b[0] - n - 1).collect();
                projective_system(factor_dims[0], &dual, l_degrees[0]).ok()
            }
            _ => None,
        }
    }

    /// For projective instances: `(n, l, [b_i])`.
    pub fn projective_data(&self) -> Option<(usize, i64, Vec<i64>)> {
        match (&self.rule, self.kind) {
            (
                BasisRule::Degrees {
                    factor_dims,
                    l_degrees,
                    b_degrees,
                },
                SystemKind::Projective,
            ) => Some((
                factor_dims[0],
                l_degrees[0],
                b_degrees.iter().map(|b| b[0]).collect(),
            )),
            _ => None,
        }
    }

    /// `h^i(X, B_summand + mL)` for degree-rule instances (Künneth over the
    /// factors), `None` for polytope instances.
    pub fn cohomology(&self, summand: usize, m: i64, i: usize) -> Option<u64> {
        match &self.rule {
            BasisRule::Degrees {
                factor_dims,
                l_degrees,
                b_degrees,
            } => {
                let twists: Vec<i64> = b_degrees
                    .get(summand)?
                    .iter()
                    .zip(l_degrees)
                    .map(|(b, l)| b + m * l)
                    .collect();
                Some(product_cohomology(factor_dims, &twists, i))
            }
            BasisRule::Points { .. } => None,
        }
    }

    /// Upper bound for the Castelnuovo–Mumford regularity of the section
    /// module `M = ⊕_{m>=0} H^0(B + mL)` over `Sym H^0(L)`, read off from
    /// line-bundle cohomology; `None` without a cohomology oracle.
    ///
    /// `H^1_m(M)_m = H^0(B + mL)` for `m < 0`, and
    /// `H^{i+1}_m(M)_m = H^i(X, B + mL)` for `i >= 1`; the bound is the largest
    /// `i + m` over nonzero local cohomology `H^i_m(M)_m`.
    pub fn regularity_bound(&self) -> Option<i64> {
        if !matches!(self.rule, BasisRule::Degrees { .. }) {
            return None;
        }
        let n = self.variety_dim;
        let mut reg = i64::MIN;
        for s in 0..self.num_summands() {
            // nonvanishing only happens for twists below -n_i - 1 in some
            // factor or for m < 0; this window covers all degrees used here
            for m in -REG_WINDOW..=REG_WINDOW {
                if m < 0 && self.cohomology(s, m, 0)? > 0 {
                    reg = reg.max(m + 1);
                }
                for i in 1..=n {
                    if self.cohomology(s, m, i)? > 0 {
                        reg = reg.max(m + i as i64 + 1);
                    }
                }
            }
        }
        Some(reg.max(0))
    }

    /// Checks `H^i(L) = 0` and `H^i(B + mL) = 0` for `i > 0`, `0 < m <= 64`.
    pub fn interpretation_hypotheses(&self) -> Hypotheses {
        let BasisRule::Degrees {
            factor_dims,
            l_degrees,
            ..
        } = &self.rule
        else {
            return Hypotheses::Assumed;
        };
        for i in 1..=self.variety_dim {
            if product_cohomology(factor_dims, l_degrees, i) != 0 {
                return Hypotheses::Fails;
            }
            for s in 0..self.num_summands() {
                for m in 1..=64 {
                    if self.cohomology(s, m, i) != Some(0) {
                        return Hypotheses::Fails;
                    }
                }
            }
        }
        Hypotheses::Verified
    }

    pub fn describe(&self) -> String {
        self.to_string()
    }
}

const REG_WINDOW: i64 = 256;

impl fmt::Display for MonomialSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            BasisRule::Degrees {
                factor_dims,
                l_degrees,
                b_degrees,
            } => {
                let space = factor_dims
                    .iter()
                    .map(|n| format!("P^{n}"))
                    .collect::<Vec<_>>()
                    .join("x");
                let deg = |v: &[i64]| {
                    v.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                let b = b_degrees
                    .iter()
                    .map(|b| format!("O({})", deg(b)))
                    .collect::<Vec<_>>()
                    .join("+");
                write!(f, "{space} B={b} L=O({})", deg(l_degrees))
            }
            BasisRule::Points { b_points } => write!(
                f,
                "polytope Z^{} dim={} h0(L)={} B-summands={}",
                self.ambient_rank,
                self.variety_dim,
                self.l_points.len(),
                b_points.len()
            ),
        }
    }
}

/// `h^i(P^n, O(a))`.
pub fn proj_cohomology(q: CohomologyQuery) -> u64 {
    let CohomologyQuery {
        proj_dim: n,
        twist: a,
        index: i,
    } = q;
    if i == 0 {
        if a >= 0 {
            binomial(a as u64 + n as u64, n as u64)
        } else {
            0
        }
    } else if i == n {
        if a < -(n as i64) {
            binomial((-a - 1) as u64, n as u64)
        } else {
            0
        }
    } else {
        0
    }
}

/// Künneth: `h^i(P^{n_1} x ... x P^{n_t}, O(a_1, ..., a_t))`.
pub fn product_cohomology(factor_dims: &[usize], twists: &[i64], i: usize) -> u64 {
    // each factor has cohomology in degree 0 or n_j only
    let mut dist = vec![0u64; i + 1];
    dist[0] = 1;
    for (&n, &a) in factor_dims.iter().zip(twists) {
        let mut next = vec![0u64; i + 1];
        for (deg, &c) in dist.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for k in [0, n] {
                let h = proj_cohomology(CohomologyQuery {
                    proj_dim: n,
                    twist: a,
                    index: k,
                });
                if h > 0 && deg + k <= i {
                    next[deg + k] += c * h;
                }
                if n == 0 {
                    break;
                }
            }
        }
        dist = next;
    }
    dist[i]
}

/// The family `d ↦ (X, B, L_d = P + dA)`.
#[derive(Clone, Debug)]
pub struct TwistFamily {
    base: MonomialSystem,
    a_points: Vec<Point>,
    p_points: Vec<Point>,
}

pub fn twist_family(
    base: &MonomialSystem,
    a_pts: &[Point],
    p_pts: &[Point],
) -> Result<TwistFamily> {
    if a_pts.is_empty() || p_pts.is_empty() {
        return Err(Error::Config("A and P need at least one lattice point".into()));
    }
    let r = base.ambient_rank;
    if let Some(bad) = a_pts.iter().chain(p_pts).find(|p| p.len() != r) {
        return Err(Error::Config(format!(
            "point {bad:?} has rank {} but the base lives in Z^{r}",
            bad.len()
        )));
    }
    Ok(TwistFamily {
        base: base.clone(),
        a_points: canonical(a_pts.iter().cloned()),
        p_points: canonical(p_pts.iter().cloned()),
    })
}

impl TwistFamily {
    /// Convenience: `P^n`, `B = ⊕O(b)`, `A = O(a)`, `P = O(p)`.
    pub fn projective(n: usize, b_degrees: &[i64], a_degree: i64, p_degree: i64) -> Result<Self> {
        let base = projective_system(n, b_degrees, (a_degree + p_degree).max(1))?;
        twist_family(
            &base,
            &degree_points(&[n], &[a_degree]),
            &degree_points(&[n], &[p_degree]),
        )
    }

    pub fn base(&self) -> &MonomialSystem {
        &self.base
    }

    /// `L_d` as a point set: `P_pts + d * A_pts`.
    pub fn l_points(&self, d: u64) -> Vec<Point> {
        let mut acc = self.p_points.clone();
        for _ in 0..d {
            acc = minkowski_sum(&acc, &self.a_points);
        }
        acc
    }

    /// Member `d`. Over a degree-rule base `L_d` must again be a full degree
    /// set `O(l_1, ..., l_t)`; the member keeps the base's `B`.
    pub fn member(&self, d: u64) -> Result<MonomialSystem> {
        let l_pts = self.l_points(d);
        match &self.base.rule {
            BasisRule::Degrees {
                factor_dims,
                b_degrees,
                ..
            } => {
                let mut degs = Vec::with_capacity(factor_dims.len());
                let mut off = 0;
                for &n in factor_dims {
                    degs.push(l_pts[0][off..off + n + 1].iter().sum::<i64>());
                    off += n + 1;
                }
                if degree_points(factor_dims, &degs) != l_pts {
                    return Err(Error::Config(format!(
                        "L_{d} is not a complete linear system O({degs:?}) on the base"
                    )));
                }
                let sys = product_system(factor_dims, &degs, b_degrees)?;
                Ok(sys)
            }
            BasisRule::Points { b_points } => {
                polytope_system(&l_pts, b_points, self.base.variety_dim)
            }
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{} with L_d = P + d*A, |A|={} |P|={}",
            self.base,
            self.a_points.len(),
            self.p_points.len()
        )
    }
}
