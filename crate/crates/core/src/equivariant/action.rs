//! The symmetric group acting on the full (non-invariant) diagonal terms
//!
//! `V_m = ⊕_{|I|=m} H^0(B + mL) ⊗ H^0(L)^{⊗(n-m)}`,
//!
//! one tensor factor for each coordinate outside `I`. With the alternating
//! twist (modelling `L^{[n]}`) a permutation `σ` acts by
//!
//! `(I, s, t) ↦ sgn(σ) · ε(σ, I) · (σI, s, t∘σ^{-1})`,
//!
//! where `ε(σ, I)` is the sign of the permutation sorting `σ(i_1), ..., σ(i_m)`.
//! The trivial twist (modelling `D_L`) drops both signs. Everything is
//! checked by materialising the matrices, so sizes are capped.

use std::collections::HashMap;

use itertools::Itertools;

use crate::koszul::binomial;
use crate::sections::{MonomialSystem, Point};
use crate::{Error, LinAlg, Result, SparseMatrix};

/// Default cap on the dimension of a full term.
pub const DEFAULT_CAP: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Twist {
    /// `L^{[n]}`: sign of the permutation, times the diagonal reordering sign.
    Alternating,
    /// `D_L`: plain permutation of coordinates.
    Trivial,
}

/// `(I, summand, monomial, t)` with `t[k]` the `L`-point on the `k`-th
/// coordinate outside `I`.
type FullKey = (Vec<usize>, usize, Point, Vec<usize>);

pub struct ActionModel {
    pub n: usize,
    pub m: usize,
    pub twist: Twist,
    basis: Vec<FullKey>,
    index: HashMap<FullKey, usize>,
}

fn inversions(seq: &[usize]) -> usize {
    seq.iter()
        .enumerate()
        .map(|(i, a)| seq[i + 1..].iter().filter(|b| *b < a).count())
        .sum()
}

fn sign(seq: &[usize]) -> i64 {
    if inversions(seq).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn complement(n: usize, set: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !set.contains(i)).collect()
}

/// All of `S_n` in lexicographic order, as image lists.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    (0..n).permutations(n).collect()
}

pub fn full_dim(sys: &MonomialSystem, n: usize, m: usize) -> usize {
    binomial(n as u64, m as u64) as usize
        * sys.h0_total(m as i64)
        * sys.h0_l().pow((n - m) as u32)
}

impl ActionModel {
    pub fn new(sys: &MonomialSystem, n: usize, m: usize, twist: Twist, cap: usize) -> Result<Self> {
        if m > n {
            return Err(Error::OutOfRange(format!("term {m} of a complex of length {n}")));
        }
        let size = full_dim(sys, n, m);
        if size > cap {
            return Err(Error::CapExceeded {
                what: format!("full term V_{m} for n = {n}"),
                size,
                cap,
            });
        }
        let h0 = sys.h0_l();
        let mut basis = Vec::with_capacity(size);
        for set in (0..n).combinations(m) {
            for s in 0..sys.num_summands() {
                for x in sys.basis(s, m as i64)? {
                    // the empty product yields one empty tuple
                    for t in (0..n - m).map(|_| 0..h0).multi_cartesian_product() {
                        basis.push((set.clone(), s, x.clone(), t));
                    }
                }
            }
        }
        debug_assert_eq!(basis.len(), size);
        let index = basis.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Ok(ActionModel {
            n,
            m,
            twist,
            basis,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn act(&self, sigma: &[usize], key: &FullKey) -> (usize, i64) {
        let (set, s, x, t) = key;
        let image: Vec<usize> = set.iter().map(|&i| sigma[i]).collect();
        let mut target = image.clone();
        target.sort_unstable();
        let coef = match self.twist {
            Twist::Alternating => sign(sigma) * sign(&image),
            Twist::Trivial => 1,
        };
        // t lives on the complement of I; coordinate j moves to σ(j)
        let new_comp = complement(self.n, &target);
        let mut t_new = vec![0; t.len()];
        for (k, j) in complement(self.n, set).into_iter().enumerate() {
            let pos = new_comp.binary_search(&sigma[j]).expect("σ maps complements");
            t_new[pos] = t[k];
        }
        (self.index[&(target, *s, x.clone(), t_new)], coef)
    }

    /// Matrix of `ρ(σ)` (`sigma[i]` is the image of `i`).
    pub fn matrix(&self, sigma: &[usize]) -> SparseMatrix {
        let entries = self
            .basis
            .iter()
            .enumerate()
            .map(|(col, key)| {
                let (row, c) = self.act(sigma, key);
                (row, col, c)
            })
            .collect();
        SparseMatrix::new(self.dim(), self.dim(), entries).expect("a signed permutation matrix")
    }

    /// `Σ_σ ρ(σ)`, i.e. `n!` times the Reynolds projector.
    pub fn projector(&self) -> SparseMatrix {
        let mut acc: HashMap<(usize, usize), i64> = HashMap::new();
        for sigma in permutations(self.n) {
            for (col, key) in self.basis.iter().enumerate() {
                let (row, c) = self.act(&sigma, key);
                *acc.entry((row, col)).or_insert(0) += c;
            }
        }
        let mut entries: Vec<_> = acc.into_iter().map(|((r, c), v)| (r, c, v)).collect();
        entries.sort_unstable();
        SparseMatrix::new(self.dim(), self.dim(), entries).expect("indices in range")
    }

    /// `ρ(σ)ρ(τ) = ρ(σ∘τ)` for every pair.
    pub fn group_law_holds(&self) -> Result<bool> {
        let perms = permutations(self.n);
        let mats: Vec<SparseMatrix> = perms.iter().map(|s| self.matrix(s)).collect();
        for (i, s) in perms.iter().enumerate() {
            for (j, t) in perms.iter().enumerate() {
                let st: Vec<usize> = t.iter().map(|&x| s[x]).collect();
                let k = perms.iter().position(|p| *p == st).expect("closed under composition");
                if mats[i].mul(&mats[j])? != mats[k] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `P^2 = n! P` for the unnormalised projector.
    pub fn projector_idempotent(&self) -> Result<bool> {
        let p = self.projector();
        let order: i64 = (1..=self.n as i64).product();
        Ok(p.mul(&p)? == p.scale(order))
    }
}

/// `V_m → V_{m+1}`:
/// `(I, s, t) ↦ Σ_{j∉I} (-1)^{pos(j in J)-1} (J = I ∪ {j}, s·t_j, t without j)`.
pub fn full_differential(from: &ActionModel, to: &ActionModel, sys: &MonomialSystem) -> Result<SparseMatrix> {
    if to.m != from.m + 1 || to.n != from.n {
        return Err(Error::Config("full differential needs consecutive terms".into()));
    }
    let mut entries = Vec::new();
    for (col, (set, s, x, t)) in from.basis.iter().enumerate() {
        for (k, j) in complement(from.n, set).into_iter().enumerate() {
            let mut sup = set.clone();
            let pos = sup.partition_point(|&a| a < j);
            sup.insert(pos, j);
            let y: Point = x.iter().zip(&sys.l_points()[t[k]]).map(|(a, b)| a + b).collect();
            let mut rest = t.clone();
            rest.remove(k);
            let key = (sup, *s, y, rest);
            let row = *to.index.get(&key).ok_or_else(|| {
                Error::Integrity(format!("{key:?} missing from the full term {}", to.m))
            })?;
            entries.push((row, col, if pos % 2 == 0 { 1 } else { -1 }));
        }
    }
    SparseMatrix::new(to.dim(), from.dim(), entries)
}

/// Rank of the Reynolds projector on `V_m` (alternating twist), which should
/// be `h^0(B + mL) · C(h^0(L), n - m)`.
pub fn brute_force_invariant_dim(sys: &MonomialSystem, n: usize, m: usize) -> Result<usize> {
    brute_force_invariant_dim_with(sys, n, m, Twist::Alternating, DEFAULT_CAP)
}

pub fn brute_force_invariant_dim_with(
    sys: &MonomialSystem,
    n: usize,
    m: usize,
    twist: Twist,
    cap: usize,
) -> Result<usize> {
    let model = ActionModel::new(sys, n, m, twist, cap)?;
    LinAlg::new(crate::FieldSpec::Rationals).rank(&model.projector())
}

/// Cohomology at term `q` of the invariant part of the full complex
/// `V_0 → V_1 → ... → V_n`, computed from the group action alone: the
/// invariants are the image of the projector `P_m`, and the differential on
/// them has rank `rank(D_m P_m)`.
pub fn brute_force_invariant_cohomology(
    sys: &MonomialSystem,
    n: usize,
    q: usize,
    cap: usize,
) -> Result<usize> {
    if q > n {
        return Ok(0);
    }
    let la = LinAlg::new(crate::FieldSpec::Rationals);
    let model = |m: usize| ActionModel::new(sys, n, m, Twist::Alternating, cap);
    let restricted_rank = |m: usize| -> Result<usize> {
        if m >= n {
            return Ok(0);
        }
        let (a, b) = (model(m)?, model(m + 1)?);
        la.rank(&full_differential(&a, &b, sys)?.mul(&a.projector())?)
    };
    let here = model(q)?;
    let inv = la.rank(&here.projector())?;
    let out = restricted_rank(q)?;
    let into = if q == 0 { 0 } else { restricted_rank(q - 1)? };
    Ok(inv - out - into)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sections::projective_system;

    #[test]
    fn invariant_dims_small() {
        let sys = projective_system(1, &[0], 1).unwrap();
        let model = ActionModel::new(&sys, 2, 1, Twist::Alternating, DEFAULT_CAP).unwrap();
        assert_eq!(model.dim(), 8);
        assert_eq!(brute_force_invariant_dim(&sys, 2, 1).unwrap(), 4);
        // m = n: signs cancel entirely
        assert_eq!(brute_force_invariant_dim(&sys, 2, 2).unwrap(), 3);
    }

    #[test]
    fn trivial_twist_gives_symmetric_power() {
        let sys = projective_system(1, &[0], 1).unwrap();
        let d = brute_force_invariant_dim_with(&sys, 2, 0, Twist::Trivial, DEFAULT_CAP).unwrap();
        assert_eq!(d, 3);
        let sys = projective_system(1, &[0], 2).unwrap();
        let d = brute_force_invariant_dim_with(&sys, 3, 0, Twist::Trivial, DEFAULT_CAP).unwrap();
        assert_eq!(d, binomial(3 + 3 - 1, 3) as usize);
    }

    #[test]
    fn group_law_and_idempotence() {
        let sys = projective_system(1, &[0], 2).unwrap();
        for twist in [Twist::Alternating, Twist::Trivial] {
            for m in 0..=3 {
                let model = ActionModel::new(&sys, 3, m, twist, DEFAULT_CAP).unwrap();
                assert!(model.group_law_holds().unwrap());
                assert!(model.projector_idempotent().unwrap());
            }
        }
    }

    #[test]
    fn differential_is_equivariant() {
        let sys = projective_system(1, &[1], 2).unwrap();
        let n = 3;
        for m in 0..n {
            let a = ActionModel::new(&sys, n, m, Twist::Alternating, DEFAULT_CAP).unwrap();
            let b = ActionModel::new(&sys, n, m + 1, Twist::Alternating, DEFAULT_CAP).unwrap();
            let d = full_differential(&a, &b, &sys).unwrap();
            for sigma in permutations(n) {
                let lhs = d.mul(&a.matrix(&sigma)).unwrap();
                let rhs = b.matrix(&sigma).mul(&d).unwrap();
                assert_eq!(lhs, rhs, "m={m} σ={sigma:?}");
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let sys = projective_system(1, &[0], 3).unwrap();
        let e = ActionModel::new(&sys, 4, 0, Twist::Alternating, 100);
        assert!(matches!(e, Err(Error::CapExceeded { size: 256, .. })));
    }

    #[test]
    fn group_action_reproduces_koszul_cohomology() {
        let la = LinAlg::default();
        let sys = projective_system(1, &[0], 3).unwrap();
        for n in 1..=3 {
            for q in 0..=n {
                let want = crate::koszul::koszul_dim(&sys, n - q, q as i64, &la).unwrap().dim;
                assert_eq!(brute_force_invariant_cohomology(&sys, n, q, DEFAULT_CAP).unwrap(), want);
            }
        }
    }
}
