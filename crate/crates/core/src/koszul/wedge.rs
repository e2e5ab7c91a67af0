//! Colexicographic indexing of `p`-subsets (the combinatorial number system),
//! used to number the basis `e_{i_1} ∧ ... ∧ e_{i_p}` of `∧^p H^0(L)`.

use crate::{Error, Result};

/// `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// A strictly increasing list of indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WedgeIndex(Vec<usize>);

impl WedgeIndex {
    pub fn new(subset: Vec<usize>) -> Result<Self> {
        if subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "wedge index {subset:?} is not strictly increasing"
            )));
        }
        Ok(WedgeIndex(subset))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Colex rank: `Σ_k C(s_k, k + 1)` (0-based `k`).
    pub fn rank(&self) -> usize {
        colex_rank(&self.0)
    }
}

pub fn colex_rank(subset: &[usize]) -> usize {
    subset
        .iter()
        .enumerate()
        .map(|(k, &s)| binomial(s as u64, k as u64 + 1) as usize)
        .sum()
}

pub fn wedge_rank(subset: &WedgeIndex) -> usize {
    subset.rank()
}

/// Inverse of [`wedge_rank`] among `p`-subsets of `0..h0`.
pub fn wedge_unrank(r: usize, p: usize, h0: usize) -> Result<WedgeIndex> {
    let total = binomial(h0 as u64, p as u64) as usize;
    if r >= total {
        return Err(Error::OutOfRange(format!(
            "rank {r} among C({h0}, {p}) = {total} subsets"
        )));
    }
    let mut out = vec![0; p];
    let mut rem = r;
    let mut hi = h0;
    for k in (0..p).rev() {
        // largest s < hi with C(s, k+1) <= rem
        let mut s = k;
        while s + 1 < hi && binomial(s as u64 + 1, k as u64 + 1) as usize <= rem {
            s += 1;
        }
        rem -= binomial(s as u64, k as u64 + 1) as usize;
        out[k] = s;
        hi = s;
    }
    Ok(WedgeIndex(out))
}

/// All `p`-subsets of `0..h0` in colex order (position = rank).
pub fn colex_subsets(h0: usize, p: usize) -> Vec<Vec<usize>> {
    if p > h0 {
        return Vec::new();
    }
    let total = binomial(h0 as u64, p as u64) as usize;
    let mut out = Vec::with_capacity(total);
    let mut cur: Vec<usize> = (0..p).collect();
    loop {
        out.push(cur.clone());
        // colex successor: bump the first element that can move
        let mut k = 0;
        while k < p {
            let limit = if k + 1 < p { cur[k + 1] } else { h0 };
            if cur[k] + 1 < limit {
                break;
            }
            k += 1;
        }
        if k == p {
            break;
        }
        cur[k] += 1;
        for (i, c) in cur.iter_mut().enumerate().take(k) {
            *c = i;
        }
    }
    debug_assert_eq!(out.len(), total);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(wedge_rank(&WedgeIndex::new(vec![0, 1]).unwrap()), 0);
        assert_eq!(wedge_rank(&WedgeIndex::new(vec![1, 2]).unwrap()), 2);
        assert_eq!(wedge_unrank(1, 2, 3).unwrap().as_slice(), &[0, 2]);
        assert!(wedge_unrank(3, 2, 3).is_err());
        assert!(WedgeIndex::new(vec![2, 1]).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(10, 5), 252);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn enumeration_matches_ranks() {
        for h0 in 0..8 {
            for p in 0..=h0 + 1 {
                let subs = colex_subsets(h0, p);
                assert_eq!(subs.len() as u64, binomial(h0 as u64, p as u64));
                for (r, s) in subs.iter().enumerate() {
                    assert_eq!(colex_rank(s), r);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn unrank_inverts_rank(h0 in 1usize..14, pick in 0usize..14, r in 0usize..4000) {
            let p = pick % (h0 + 1);
            let total = binomial(h0 as u64, p as u64) as usize;
            let r = r % total;
            let w = wedge_unrank(r, p, h0).unwrap();
            prop_assert_eq!(w.len(), p);
            prop_assert!(w.as_slice().iter().all(|&x| x < h0));
            prop_assert_eq!(w.rank(), r);
        }
    }
}
