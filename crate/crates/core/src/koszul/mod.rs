//! Koszul cohomology through the three-term complexes
//!
//! ```text
//! H^0(B+(q-1)L) ⊗ ∧^{p+1} H^0(L) → H^0(B+qL) ⊗ ∧^p H^0(L) → H^0(B+(q+1)L) ⊗ ∧^{p-1} H^0(L)
//! ```
//!
//! `K_{p,q}` is the middle cohomology for `q >= 1` and the kernel of the
//! right-hand map for `q = 0`.

mod differential;
mod wedge;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use differential::build_differential;
pub use wedge::{binomial, colex_rank, colex_subsets, wedge_rank, wedge_unrank, WedgeIndex};

use crate::exactlin::LinAlg;
use crate::sections::{proj_cohomology, CohomologyQuery, MonomialSystem};
use crate::{par, Error, Result};

/// Which computation produced a dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Koszul,
    Resolution,
    Equivariant,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Koszul => "koszul",
            Engine::Resolution => "resolution",
            Engine::Equivariant => "equivariant",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KoszulCell {
    pub p: usize,
    pub q: i64,
    pub dim: usize,
    pub engine: Engine,
}

/// `(n_cols, rank)` of `δ_{p,q}`.
fn differential_shape(
    sys: &MonomialSystem,
    p: usize,
    q: i64,
    la: &LinAlg,
) -> Result<(usize, usize)> {
    let d = build_differential(sys, p, q)?;
    Ok((d.n_cols(), la.rank(&d)?))
}

/// The differentials whose ranks determine `K_{p,q}`.
fn needed(p: usize, q: i64) -> Vec<(usize, i64)> {
    match q {
        q if q < 0 => vec![],
        0 => vec![(p, 0)],
        q => vec![(p, q), (p + 1, q - 1)],
    }
}

fn assemble(p: usize, q: i64, ranks: &BTreeMap<(usize, i64), (usize, usize)>) -> usize {
    if q < 0 {
        return 0;
    }
    let (cols, rank) = ranks[&(p, q)];
    let kernel = cols - rank;
    if q == 0 {
        kernel
    } else {
        kernel - ranks[&(p + 1, q - 1)].1
    }
}

/// `dim K_{p,q}(B, L)`.
pub fn koszul_dim(sys: &MonomialSystem, p: usize, q: i64, la: &LinAlg) -> Result<KoszulCell> {
    let mut ranks = BTreeMap::new();
    for key in needed(p, q) {
        ranks.insert(key, differential_shape(sys, key.0, key.1, la)?);
    }
    Ok(KoszulCell {
        p,
        q,
        dim: assemble(p, q, &ranks),
        engine: Engine::Koszul,
    })
}

/// Computes every cell in `cells`, sharing differential ranks between them.
/// Differentials are evaluated concurrently under `la.exec`.
pub fn koszul_dims(
    sys: &MonomialSystem,
    cells: &[(usize, i64)],
    la: &LinAlg,
) -> Result<BTreeMap<(usize, i64), usize>> {
    let keys: Vec<(usize, i64)> = cells
        .iter()
        .flat_map(|&(p, q)| needed(p, q))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let shapes = par::try_map(la.exec, &keys, |&(p, q)| differential_shape(sys, p, q, la))?;
    let ranks: BTreeMap<_, _> = keys.into_iter().zip(shapes).collect();
    Ok(cells
        .iter()
        .map(|&(p, q)| ((p, q), assemble(p, q, &ranks)))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub cells: BTreeMap<(usize, i64), usize>,
    pub p_max: usize,
    pub q_min: i64,
    pub q_max: i64,
    pub system: String,
    pub field: String,
    pub certified: bool,
    pub engine: Engine,
}

impl BettiTable {
    pub fn get(&self, p: usize, q: i64) -> Option<usize> {
        self.cells.get(&(p, q)).copied()
    }

    pub fn nonzero(&self) -> Vec<((usize, i64), usize)> {
        self.cells
            .iter()
            .filter(|(_, &d)| d > 0)
            .map(|(&k, &d)| (k, d))
            .collect()
    }

    /// `p,q,dim` rows sorted by `(q, p)`, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<_> = self.cells.iter().collect();
        rows.sort_by_key(|((p, q), _)| (*q, *p));
        let mut out = String::from("p,q,dim\n");
        for ((p, q), d) in rows {
            out.push_str(&format!("{p},{q},{d}\n"));
        }
        out
    }

    /// Betti diagram: columns `p`, rows `q`, zeros as `.`, with a total row.
    pub fn to_diagram(&self) -> String {
        let ps: Vec<usize> = (0..=self.p_max).collect();
        let qs: Vec<i64> = (self.q_min..=self.q_max).collect();
        let cell = |p: usize, q: i64| match self.get(p, q).unwrap_or(0) {
            0 => ".".to_string(),
            d => d.to_string(),
        };
        let totals: Vec<String> = ps
            .iter()
            .map(|&p| qs.iter().map(|&q| self.get(p, q).unwrap_or(0)).sum::<usize>())
            .map(|t| if t == 0 { ".".into() } else { t.to_string() })
            .collect();
        let widths: Vec<usize> = ps
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                qs.iter()
                    .map(|&q| cell(p, q).len())
                    .chain([p.to_string().len(), totals[i].len()])
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        let labels: Vec<String> = qs.iter().map(|q| format!("{q}:")).collect();
        let lw = labels
            .iter()
            .map(|l| l.len())
            .chain(["total:".len()])
            .max()
            .unwrap_or(0);
        let line = |label: &str, vals: Vec<String>| {
            let mut s = format!("{label:>lw$}");
            for (v, w) in vals.iter().zip(&widths) {
                s.push(' ');
                s.push_str(&format!("{v:>w$}"));
            }
            s.push('\n');
            s
        };
        let mut out = line("", ps.iter().map(|p| p.to_string()).collect());
        out.push_str(&line("total:", totals.clone()));
        for (q, label) in qs.iter().zip(&labels) {
            out.push_str(&line(label, ps.iter().map(|&p| cell(p, *q)).collect()));
        }
        out
    }
}

/// Betti table over `0 <= p <= p_max`, `q_min <= q <= q_max`.
///
/// `p_max` above `h^0(L)` is accepted; those columns vanish since
/// `∧^p H^0(L) = 0`.
pub fn betti_table(
    sys: &MonomialSystem,
    p_max: usize,
    q_range: std::ops::RangeInclusive<i64>,
    la: &LinAlg,
) -> Result<BettiTable> {
    la.validate()?;
    let (q_min, q_max) = (*q_range.start(), *q_range.end());
    if q_min > q_max {
        return Err(Error::Config(format!("empty q range {q_min}..={q_max}")));
    }
    let cells: Vec<(usize, i64)> = q_range
        .flat_map(|q| (0..=p_max).map(move |p| (p, q)))
        .collect();
    let dims = koszul_dims(sys, &cells, la)?;
    Ok(BettiTable {
        cells: dims,
        p_max,
        q_min,
        q_max,
        system: sys.describe(),
        field: la.describe(),
        certified: la.certify,
        engine: Engine::Koszul,
    })
}

/// How the dual homological index is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualIndex {
    /// `p' = r - n - p` with `r = h^0(L) - 1` (the projective dimension of the
    /// linear system). This is the index for which the duality holds.
    Projective,
    /// `p' = h^0(L) - n - p`; kept to document that this variant fails.
    SectionCount,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisCheck {
    pub index: usize,
    pub summand: usize,
    pub twist: i64,
    pub h: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityReport {
    pub p: usize,
    pub q: i64,
    pub dual_p: i64,
    pub dual_q: i64,
    /// Every cohomology group consulted; hypotheses hold iff all vanish.
    pub checks: Vec<HypothesisCheck>,
    pub hypotheses_hold: bool,
    pub dim: Option<usize>,
    pub dual_dim: Option<usize>,
}

impl DualityReport {
    /// `None` when hypotheses fail (no judgment is made).
    pub fn agrees(&self) -> Option<bool> {
        Some(self.dim? == self.dual_dim?)
    }
}

impl fmt::Display for DualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.agrees() {
            None => write!(
                f,
                "K_{{{},{}}}: hypotheses fail, no comparison",
                self.p, self.q
            ),
            Some(ok) => write!(
                f,
                "K_{{{},{}}}(B,L) = {} vs K_{{{},{}}}(B*+K,L) = {}: {}",
                self.p,
                self.q,
                self.dim.unwrap_or(0),
                self.dual_p,
                self.dual_q,
                self.dual_dim.unwrap_or(0),
                if ok { "agree" } else { "DISAGREE" }
            ),
        }
    }
}

pub fn check_duality(sys: &MonomialSystem, p: usize, q: i64, la: &LinAlg) -> Result<DualityReport> {
    check_duality_with(sys, p, q, la, DualIndex::Projective)
}

/// Compares `K_{p,q}(B, L)` with `K_{p', n+1-q}(B^* ⊗ K_X, L)` on projective
/// space after checking `H^i(B(q-i)L) = H^i(B(q-i-1)L) = 0`, `0 < i < n`.
/// `L = O(l)` with `l >= 1` is always base-point-free.
pub fn check_duality_with(
    sys: &MonomialSystem,
    p: usize,
    q: i64,
    la: &LinAlg,
    index: DualIndex,
) -> Result<DualityReport> {
    let (n, l, bs) = sys.projective_data().ok_or_else(|| {
        Error::Unsupported("duality is only checked on projective space".into())
    })?;
    let dual = sys
        .duality_data()
        .ok_or_else(|| Error::Unsupported("no dual system available".into()))?;
    let mut checks = Vec::new();
    for i in 1..n {
        for (s, b) in bs.iter().enumerate() {
            for shift in [q - i as i64, q - i as i64 - 1] {
                let twist = b + shift * l;
                checks.push(HypothesisCheck {
                    index: i,
                    summand: s,
                    twist,
                    h: proj_cohomology(CohomologyQuery {
                        proj_dim: n,
                        twist,
                        index: i,
                    }),
                });
            }
        }
    }
    let hold = checks.iter().all(|c| c.h == 0);
    let h0 = sys.h0_l() as i64;
    let dual_p = match index {
        DualIndex::Projective => h0 - 1 - n as i64 - p as i64,
        DualIndex::SectionCount => h0 - n as i64 - p as i64,
    };
    let dual_q = n as i64 + 1 - q;
    let (dim, dual_dim) = if hold {
        let lhs = koszul_dim(sys, p, q, la)?.dim;
        let rhs = if dual_p < 0 {
            0
        } else {
            koszul_dim(&dual, dual_p as usize, dual_q, la)?.dim
        };
        (Some(lhs), Some(rhs))
    } else {
        (None, None)
    };
    Ok(DualityReport {
        p,
        q,
        dual_p,
        dual_q,
        checks,
        hypotheses_hold: hold,
        dim,
        dual_dim,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EulerReport {
    pub n_total: usize,
    /// `Σ_m (-1)^m h^0(B+mL) C(h^0(L), n_total - m)`
    pub lhs: i128,
    /// `Σ_m (-1)^m dim K_{n_total-m, m}`
    pub rhs: i128,
}

impl EulerReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Alternating-sum identity along the strand `p + q = n_total`.
pub fn euler_check(sys: &MonomialSystem, n_total: usize, la: &LinAlg) -> Result<EulerReport> {
    let h0 = sys.h0_l() as u64;
    let sign = |m: usize| if m.is_multiple_of(2) { 1i128 } else { -1 };
    let lhs = (0..=n_total)
        .map(|m| {
            sign(m)
                * sys.h0_total(m as i64) as i128
                * binomial(h0, (n_total - m) as u64) as i128
        })
        .sum();
    let cells: Vec<(usize, i64)> = (0..=n_total).map(|m| (n_total - m, m as i64)).collect();
    let dims = koszul_dims(sys, &cells, la)?;
    let rhs = (0..=n_total)
        .map(|m| sign(m) * dims[&(n_total - m, m as i64)] as i128)
        .sum();
    Ok(EulerReport { n_total, lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sections::projective_system;
    use crate::FieldSpec;

    fn q_la() -> LinAlg {
        LinAlg::new(FieldSpec::Rationals)
    }

    /// Dense rational rank, independent of the sparse eliminator.
    fn dense_rank(mut m: Vec<Vec<i64>>) -> usize {
        use num_rational::Rational64;
        let mut a: Vec<Vec<Rational64>> = m
            .drain(..)
            .map(|r| r.into_iter().map(Rational64::from_integer).collect())
            .collect();
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows).find(|&r| a[r][c] != Rational64::from_integer(0)) else {
                continue;
            };
            a.swap(rank, piv);
            for r in 0..rows {
                if r != rank && a[r][c] != Rational64::from_integer(0) {
                    let f = a[r][c] / a[rank][c];
                    let pivot_row = a[rank].clone();
                    for (x, v) in a[r].iter_mut().zip(pivot_row) {
                        *x -= f * v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn p1_linear_differential_by_enumeration() {
        // δ_{1,0} on P^1, L = O(1): e_0 ↦ x_0, e_1 ↦ x_1
        let sys = projective_system(1, &[0], 1).unwrap();
        let d = build_differential(&sys, 1, 0).unwrap();
        assert_eq!((d.n_rows(), d.n_cols()), (2, 2));
        assert_eq!(dense_rank(d.to_dense()), 2);
        // l_points lex: (0,1) then (1,0); basis of twist 1 is the same list
        assert_eq!(d.to_dense(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn wedge_power_beyond_h0_is_empty() {
        let sys = projective_system(1, &[0], 1).unwrap();
        let d = build_differential(&sys, 3, 0).unwrap();
        assert_eq!(d.n_cols(), 0);
    }

    #[test]
    fn differential_squares_to_zero() {
        let sys = projective_system(2, &[0], 2).unwrap();
        for p in 1..=6 {
            for q in 0..=2 {
                let a = build_differential(&sys, p, q).unwrap();
                let b = build_differential(&sys, p - 1, q + 1).unwrap();
                assert!(b.mul(&a).unwrap().is_zero(), "p={p} q={q}");
            }
        }
    }

    #[test]
    fn sparse_rank_matches_dense_oracle() {
        let sys = projective_system(1, &[1], 2).unwrap();
        for p in 0..=3 {
            for q in 0..=2 {
                let d = build_differential(&sys, p, q).unwrap();
                let r = q_la().rank(&d).unwrap();
                assert_eq!(r, dense_rank(d.to_dense()), "p={p} q={q}");
            }
        }
    }

    #[test]
    fn twisted_cubic_cells() {
        let sys = projective_system(1, &[0], 3).unwrap();
        let la = LinAlg::default();
        assert_eq!(koszul_dim(&sys, 1, 1, &la).unwrap().dim, 3);
        assert_eq!(koszul_dim(&sys, 2, 1, &la).unwrap().dim, 2);
        assert_eq!(koszul_dim(&sys, 0, 0, &la).unwrap().dim, 1);
        assert_eq!(koszul_dim(&sys, 2, -1, &la).unwrap().dim, 0);
    }

    #[test]
    fn conic_and_veronese_quadrics() {
        let la = LinAlg::default();
        let conic = projective_system(1, &[0], 2).unwrap();
        assert_eq!(koszul_dim(&conic, 1, 1, &la).unwrap().dim, 1);
        let veronese = projective_system(2, &[0], 2).unwrap();
        assert_eq!(koszul_dim(&veronese, 1, 1, &la).unwrap().dim, 6);
    }

    #[test]
    fn twisted_cubic_table() {
        let sys = projective_system(1, &[0], 3).unwrap();
        let t = betti_table(&sys, 3, 0..=2, &LinAlg::default()).unwrap();
        assert_eq!(t.nonzero(), vec![((0, 0), 1), ((1, 1), 3), ((2, 1), 2)]);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 2..=1;
        assert!(betti_table(&sys, 3, empty, &LinAlg::default()).is_err());
    }

    #[test]
    fn conic_table() {
        let sys = projective_system(1, &[0], 2).unwrap();
        let t = betti_table(&sys, 3, 0..=2, &LinAlg::default()).unwrap();
        assert_eq!(t.nonzero(), vec![((0, 0), 1), ((1, 1), 1)]);
    }

    #[test]
    fn diagram_and_csv_format() {
        let sys = projective_system(1, &[0], 3).unwrap();
        let t = betti_table(&sys, 3, 0..=2, &LinAlg::default()).unwrap();
        assert_eq!(
            t.to_diagram(),
            "       0 1 2 3\ntotal: 1 3 2 .\n    0: 1 . . .\n    1: . 3 2 .\n    2: . . . .\n"
        );
        let csv = t.to_csv();
        assert!(csv.starts_with("p,q,dim\n0,0,1\n1,0,0\n"));
        assert!(csv.contains("\n1,1,3\n2,1,2\n"));
        assert_eq!(csv.lines().count(), 1 + 12);
    }

    #[test]
    fn duality_rational_normal_curves() {
        let la = LinAlg::default();
        let quartic = projective_system(1, &[0], 4).unwrap();
        let r = check_duality(&quartic, 1, 1, &la).unwrap();
        assert!(r.hypotheses_hold);
        assert_eq!((r.dual_p, r.dual_q), (2, 1));
        assert_eq!((r.dim, r.dual_dim), (Some(6), Some(6)));

        let cubic = projective_system(1, &[0], 3).unwrap();
        let r = check_duality(&cubic, 2, 1, &la).unwrap();
        assert_eq!((r.dual_p, r.dual_q), (0, 1));
        assert_eq!(r.agrees(), Some(true));
        assert_eq!(r.dim, Some(2));
    }

    #[test]
    fn section_count_index_is_refuted_by_the_twisted_cubic() {
        let la = LinAlg::default();
        let cubic = projective_system(1, &[0], 3).unwrap();
        let r = check_duality_with(&cubic, 0, 0, &la, DualIndex::SectionCount).unwrap();
        assert_eq!((r.dual_p, r.dual_q), (3, 2));
        assert_eq!((r.dim, r.dual_dim), (Some(1), Some(0)));
        let r = check_duality(&cubic, 0, 0, &la).unwrap();
        assert_eq!((r.dual_p, r.dual_q), (2, 2));
        assert_eq!((r.dim, r.dual_dim), (Some(1), Some(1)));
    }

    #[test]
    fn duality_veronese_with_hypotheses() {
        let la = LinAlg::default();
        let v = projective_system(2, &[0], 2).unwrap();
        let r = check_duality(&v, 1, 1, &la).unwrap();
        assert!(r.hypotheses_hold);
        assert_eq!(r.checks.len(), 2);
        assert_eq!((r.dual_p, r.dual_q), (2, 2));
        assert_eq!(r.agrees(), Some(true));
    }

    #[test]
    fn duality_requires_projective_instance() {
        let sq = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]];
        let s = crate::sections::polytope_system(&sq, &[vec![vec![0, 0]]], 2).unwrap();
        assert!(matches!(
            check_duality(&s, 0, 0, &LinAlg::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn euler_identity_examples() {
        let la = LinAlg::default();
        let cubic = projective_system(1, &[0], 3).unwrap();
        let r = euler_check(&cubic, 2, &la).unwrap();
        assert_eq!((r.lhs, r.rhs), (-3, -3));
        let r = euler_check(&cubic, 0, &la).unwrap();
        assert_eq!((r.lhs, r.rhs), (1, 1));
        let v = projective_system(2, &[0], 2).unwrap();
        assert!(euler_check(&v, 2, &la).unwrap().holds());
    }

    #[test]
    fn direct_sum_is_additive() {
        let la = LinAlg::default();
        let a = projective_system(1, &[0], 2).unwrap();
        let b = projective_system(1, &[1], 2).unwrap();
        let ab = projective_system(1, &[0, 1], 2).unwrap();
        for p in 0..=3 {
            for q in 0..=2 {
                let s = koszul_dim(&a, p, q, &la).unwrap().dim + koszul_dim(&b, p, q, &la).unwrap().dim;
                assert_eq!(koszul_dim(&ab, p, q, &la).unwrap().dim, s);
            }
        }
    }
}
