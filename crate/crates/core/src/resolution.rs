//! Graded Betti numbers of `M = ⊕_{m>=0} H^0(B + mL)` over `S = Sym H^0(L)`
//! from a degree-by-degree minimal free resolution.
//!
//! Nothing here touches exterior powers. Level `k` carries the free module
//! `F_{k-1}` (or `M` itself for `k = 0`) as explicit graded pieces with basis
//! `(generator, S-monomial)`, computes the kernel `K` of `F_{k-1} → F_{k-2}`
//! piece by piece, and picks minimal generators of `K` as a complement of
//! `S_1 · K_{j-1}` inside `K_j`.
//!
//! Everything is graded by the internal degree `j` and by the lattice point
//! `α` (the torus weight), so each `(j, α)` piece is an independent small
//! linear-algebra problem; pieces of one degree run concurrently.
//!
//! When the system has a cohomology oracle, generators of `F_k` are only
//! searched in degrees `j <= k + reg`, where `reg` bounds the regularity of
//! `M` ([`MonomialSystem::regularity_bound`]); beyond it `β_{k,j} = 0`.

use std::collections::{BTreeMap, HashMap};

use crate::exactlin::{kernel_basis, Echelon, Field, PrimeField, RationalField, SparseVec};
use crate::sections::{MonomialSystem, Point};
use crate::{par, Error, FieldSpec, LinAlg, Result, SparseMatrix};

/// The pieces `M_m` and the multiplication maps `S_1 ⊗ M_m → M_{m+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModuleSlices {
    pub dims: Vec<usize>,
    /// `mult[m]` has rows indexed by the basis of `M_{m+1}` and column
    /// `x * h0(L) + i` for basis element `x` of `M_m` and `L`-point `i`.
    pub mult: Vec<SparseMatrix>,
}

pub fn module_slices(sys: &MonomialSystem, m_max: usize) -> Result<GradedModuleSlices> {
    let pieces: Vec<Vec<(usize, Point)>> = (0..=m_max as i64)
        .map(|m| module_basis(sys, m))
        .collect::<Result<_>>()?;
    let h0 = sys.h0_l();
    let mut mult = Vec::with_capacity(m_max);
    for m in 0..m_max {
        let index: HashMap<&(usize, Point), usize> =
            pieces[m + 1].iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut entries = Vec::new();
        for (xi, (s, x)) in pieces[m].iter().enumerate() {
            for (i, v) in sys.l_points().iter().enumerate() {
                let key = (*s, add(x, v));
                let row = *index.get(&key).ok_or_else(|| closure_error(&key, m + 1))?;
                entries.push((row, xi * h0 + i, 1));
            }
        }
        mult.push(SparseMatrix::new(pieces[m + 1].len(), pieces[m].len() * h0, entries)?);
    }
    Ok(GradedModuleSlices {
        dims: pieces.iter().map(Vec::len).collect(),
        mult,
    })
}

fn module_basis(sys: &MonomialSystem, m: i64) -> Result<Vec<(usize, Point)>> {
    let mut out = Vec::new();
    for s in 0..sys.num_summands() {
        out.extend(sys.basis(s, m)?.into_iter().map(|x| (s, x)));
    }
    Ok(out)
}

fn add(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn closure_error(key: &(usize, Point), m: usize) -> Error {
    Error::Integrity(format!(
        "point {:?} of summand {} missing from degree {m}",
        key.1, key.0
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionLedger {
    /// Nonzero `β_{p,j}` only.
    pub betti: BTreeMap<(usize, i64), usize>,
    pub p_max: usize,
    pub degree_bound: i64,
    /// Regularity bound used to cut the search, if any.
    pub regularity: Option<i64>,
    /// Highest internal degree searched at each level `0..=p_max`.
    pub top_degree: Vec<i64>,
    /// Set when `degree_bound`, rather than the regularity bound, ended the
    /// search at some level (or no regularity bound was available).
    pub truncated: bool,
}

impl ResolutionLedger {
    pub fn beta(&self, p: usize, j: i64) -> usize {
        self.betti.get(&(p, j)).copied().unwrap_or(0)
    }
}

/// `β_{p,p+q}`, i.e. `dim K_{p,q}` read off the resolution.
pub fn tor_dim(ledger: &ResolutionLedger, p: usize, q: i64) -> Result<usize> {
    if q < 0 {
        return Ok(0);
    }
    if p > ledger.p_max {
        return Err(Error::OutOfRange(format!(
            "homological degree {p} beyond resolved range 0..={}",
            ledger.p_max
        )));
    }
    if ledger.regularity.is_some_and(|r| q > r) {
        return Ok(0);
    }
    let j = p as i64 + q;
    if j > ledger.top_degree[p] {
        return Err(Error::Truncated(format!(
            "β_{{{p},{j}}} lies above the searched degree {}; raise the degree bound",
            ledger.top_degree[p]
        )));
    }
    Ok(ledger.beta(p, j))
}

/// Options beyond the defaults of [`minimal_resolution`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ResolutionOptions {
    /// Reverse the basis order inside every graded piece. Minimal Betti
    /// numbers must not notice.
    pub reversed: bool,
}

/// Smallest admissible `degree_bound` for `p_max`.
pub fn required_degree_bound(sys: &MonomialSystem, p_max: usize) -> i64 {
    p_max as i64 + sys.variety_dim() as i64 + 2
}

pub fn minimal_resolution(
    sys: &MonomialSystem,
    p_max: usize,
    degree_bound: i64,
    la: &LinAlg,
) -> Result<ResolutionLedger> {
    minimal_resolution_with(sys, p_max, degree_bound, la, ResolutionOptions::default())
}

pub fn minimal_resolution_with(
    sys: &MonomialSystem,
    p_max: usize,
    degree_bound: i64,
    la: &LinAlg,
    opts: ResolutionOptions,
) -> Result<ResolutionLedger> {
    la.validate()?;
    let need = required_degree_bound(sys, p_max);
    if degree_bound < need {
        return Err(Error::Truncated(format!(
            "degree bound {degree_bound} is below p_max + dim X + 2 = {need}"
        )));
    }
    let run = |spec: FieldSpec| -> Result<ResolutionLedger> {
        match spec {
            FieldSpec::Prime(p) => {
                Resolver::new(&PrimeField::new_unchecked(p), sys, p_max, degree_bound, la, opts).run()
            }
            FieldSpec::Rationals => {
                Resolver::new(&RationalField, sys, p_max, degree_bound, la, opts).run()
            }
        }
    };
    if !la.certify {
        return run(la.field);
    }
    let a = run(FieldSpec::prime(la.primes.0)?)?;
    let b = run(FieldSpec::prime(la.primes.1)?)?;
    if a == b {
        return Ok(a);
    }
    la.record_escalation();
    run(FieldSpec::Rationals)
}

/// Checks `Σ_p (-1)^p Σ_j β_{p,j} dim S_{m-j} = dim M_m` for every `m` whose
/// left side only involves computed Betti numbers. Returns the degrees checked.
pub fn hilbert_consistency(sys: &MonomialSystem, ledger: &ResolutionLedger) -> Result<Vec<i64>> {
    let h0 = sys.h0_l() as u64;
    let Some(m0) = (0..=ledger.degree_bound).find(|&m| sys.h0_total(m) > 0) else {
        return Ok(Vec::new());
    };
    // β_{p,j} = 0 for j < p + m0, so degree m only sees p <= m - m0
    let last = (m0 + ledger.p_max as i64).min(ledger.degree_bound);
    let mut checked = Vec::new();
    for m in 0..=last {
        let mut lhs: i128 = 0;
        for (&(p, j), &b) in &ledger.betti {
            if j <= m {
                let s = crate::koszul::binomial(h0 + (m - j) as u64 - 1, (m - j) as u64);
                let term = b as i128 * s as i128;
                lhs += if p % 2 == 0 { term } else { -term };
            }
        }
        let rhs = sys.h0_total(m) as i128;
        if lhs != rhs {
            return Err(Error::Integrity(format!(
                "Hilbert function mismatch in degree {m}: resolution gives {lhs}, module has {rhs}"
            )));
        }
        checked.push(m);
    }
    Ok(checked)
}

/// Basis element of a graded piece: `(summand, lattice point)` at level 0,
/// `(generator of the previous level, sorted multiset of L-point indices)`
/// above.
type Key = (usize, Vec<i64>);

struct Generator<E> {
    deg: i64,
    alpha: Point,
    /// Image in the ambient piece `(deg, alpha)` of the level that produced it.
    image: Vec<(Key, E)>,
}

struct Piece<E> {
    basis: Vec<Key>,
    kernel: Vec<SparseVec<E>>,
}

struct Resolver<'a, F: Field> {
    f: &'a F,
    sys: &'a MonomialSystem,
    p_max: usize,
    degree_bound: i64,
    exec: crate::Exec,
    reversed: bool,
    /// S-monomials of degree e, grouped by weight.
    smon: Vec<BTreeMap<Point, Vec<Vec<i64>>>>,
}

impl<'a, F: Field> Resolver<'a, F> {
    fn new(
        f: &'a F,
        sys: &'a MonomialSystem,
        p_max: usize,
        degree_bound: i64,
        la: &LinAlg,
        opts: ResolutionOptions,
    ) -> Self {
        Resolver {
            f,
            sys,
            p_max,
            degree_bound,
            exec: la.exec,
            reversed: opts.reversed,
            smon: Vec::new(),
        }
    }

    fn weight(&self, mono: &[i64]) -> Point {
        let mut w = vec![0; self.sys.ambient_rank()];
        for &i in mono {
            for (a, b) in w.iter_mut().zip(&self.sys.l_points()[i as usize]) {
                *a += b;
            }
        }
        w
    }

    fn ensure_smon(&mut self, e: usize) {
        while self.smon.len() <= e {
            let d = self.smon.len();
            let mut by_weight: BTreeMap<Point, Vec<Vec<i64>>> = BTreeMap::new();
            if d == 0 {
                by_weight.insert(vec![0; self.sys.ambient_rank()], vec![Vec::new()]);
            } else {
                // extend each degree d-1 monomial by an index >= its last one
                let prev: Vec<Vec<i64>> = self.smon[d - 1].values().flatten().cloned().collect();
                let mut all = Vec::new();
                for m in prev {
                    let start = m.last().copied().unwrap_or(0);
                    for i in start..self.sys.h0_l() as i64 {
                        let mut n = m.clone();
                        n.push(i);
                        all.push(n);
                    }
                }
                all.sort();
                for m in all {
                    by_weight.entry(self.weight(&m)).or_default().push(m);
                }
            }
            self.smon.push(by_weight);
        }
    }

    fn run(mut self) -> Result<ResolutionLedger> {
        let reg = self.sys.regularity_bound();
        let mut betti = BTreeMap::new();
        let mut top_degree = Vec::new();
        let mut truncated = reg.is_none();
        let mut prev_gens: Vec<Generator<F::Elem>> = Vec::new();
        for k in 0..=self.p_max {
            let top = match reg {
                Some(r) if (k as i64 + r) <= self.degree_bound => k as i64 + r,
                _ => {
                    truncated = true;
                    self.degree_bound
                }
            };
            top_degree.push(top);
            if k > 0 && prev_gens.is_empty() {
                continue; // the resolution has ended
            }
            let lo = if k == 0 {
                0
            } else {
                prev_gens.iter().map(|g| g.deg).min().unwrap_or(0)
            };
            if k > 0 {
                self.ensure_smon((top - lo).max(0) as usize);
            }
            let mut gens = Vec::new();
            let mut last: BTreeMap<Point, Piece<F::Elem>> = BTreeMap::new();
            for j in lo..=top {
                let pieces = self.ambient(k, j, &prev_gens)?;
                let items: Vec<(Point, Vec<Key>)> = pieces.into_iter().collect();
                let solved = par::try_map(self.exec, &items, |(alpha, basis)| {
                    self.solve_piece(k, alpha, basis.clone(), &prev_gens, &last)
                })?;
                let mut next = BTreeMap::new();
                for ((alpha, _), (piece, new_gens)) in items.into_iter().zip(solved) {
                    if !new_gens.is_empty() {
                        *betti.entry((k, j)).or_insert(0) += new_gens.len();
                    }
                    for image in new_gens {
                        gens.push(Generator {
                            deg: j,
                            alpha: alpha.clone(),
                            image,
                        });
                    }
                    next.insert(alpha, piece);
                }
                last = next;
            }
            prev_gens = gens;
        }
        Ok(ResolutionLedger {
            betti,
            p_max: self.p_max,
            degree_bound: self.degree_bound,
            regularity: reg,
            top_degree,
            truncated,
        })
    }

    /// Basis of every nonzero `(j, α)` piece of the level-`k` ambient module.
    fn ambient(
        &self,
        k: usize,
        j: i64,
        prev: &[Generator<F::Elem>],
    ) -> Result<BTreeMap<Point, Vec<Key>>> {
        let mut pieces: BTreeMap<Point, Vec<Key>> = BTreeMap::new();
        if k == 0 {
            for (s, x) in module_basis(self.sys, j)? {
                pieces.entry(x.clone()).or_default().push((s, x));
            }
        } else {
            for (gi, g) in prev.iter().enumerate() {
                if g.deg > j {
                    continue;
                }
                for (w, monos) in &self.smon[(j - g.deg) as usize] {
                    let alpha = add(&g.alpha, w);
                    let entry = pieces.entry(alpha).or_default();
                    entry.extend(monos.iter().map(|m| (gi, m.clone())));
                }
            }
        }
        if self.reversed {
            for b in pieces.values_mut() {
                b.reverse();
            }
        }
        Ok(pieces)
    }

    /// `x_i · key` in the ambient module of level `k`.
    fn shift(&self, k: usize, key: &Key, i: usize) -> Key {
        if k == 0 {
            (key.0, add(&key.1, &self.sys.l_points()[i]))
        } else {
            let mut m = key.1.clone();
            let pos = m.partition_point(|&x| x <= i as i64);
            m.insert(pos, i as i64);
            (key.0, m)
        }
    }

    /// Image of a level-`k` basis element in the level-`(k-1)` ambient module.
    fn boundary(&self, k: usize, key: &Key, prev: &[Generator<F::Elem>]) -> Vec<(Key, F::Elem)> {
        let g = &prev[key.0];
        g.image
            .iter()
            .map(|(target, c)| {
                let mut t = target.clone();
                for &i in &key.1 {
                    t = self.shift(k - 1, &t, i as usize);
                }
                (t, c.clone())
            })
            .collect()
    }

    /// Kernel of one piece and the new minimal generators it contributes.
    #[allow(clippy::type_complexity)]
    fn solve_piece(
        &self,
        k: usize,
        alpha: &Point,
        basis: Vec<Key>,
        prev: &[Generator<F::Elem>],
        last: &BTreeMap<Point, Piece<F::Elem>>,
    ) -> Result<(Piece<F::Elem>, Vec<Vec<(Key, F::Elem)>>)> {
        let f = self.f;
        let index: HashMap<Key, usize> =
            basis.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let kernel: Vec<SparseVec<F::Elem>> = if k == 0 {
            (0..basis.len()).map(|i| vec![(i, f.one())]).collect()
        } else {
            let mut rows: HashMap<Key, usize> = HashMap::new();
            let cols: Vec<SparseVec<F::Elem>> = basis
                .iter()
                .map(|key| {
                    let mut v: SparseVec<F::Elem> = Vec::new();
                    for (t, c) in self.boundary(k, key, prev) {
                        let n = rows.len();
                        let r = *rows.entry(t).or_insert(n);
                        v.push((r, c));
                    }
                    normalize(f, v)
                })
                .collect();
            kernel_basis(f, rows.len(), &cols)
        };

        // S_1 · K_{j-1}
        let mut ech = Echelon::new(f, basis.len());
        for i in 0..self.sys.h0_l() {
            let src = sub(alpha, &self.sys.l_points()[i]);
            let Some(piece) = last.get(&src) else { continue };
            for v in &piece.kernel {
                let mut w = Vec::with_capacity(v.len());
                for (c, x) in v {
                    let key = self.shift(k, &piece.basis[*c], i);
                    let Some(&t) = index.get(&key) else {
                        return Err(Error::Integrity(format!(
                            "S_1-multiple {key:?} leaves the graded piece {alpha:?}"
                        )));
                    };
                    w.push((t, x.clone()));
                }
                ech.insert(normalize(f, w));
            }
        }
        let mut new_gens = Vec::new();
        for v in &kernel {
            if ech.insert(v.clone()) {
                new_gens.push(v.iter().map(|(c, x)| (basis[*c].clone(), x.clone())).collect());
            }
        }
        Ok((
            Piece { basis, kernel },
            new_gens,
        ))
    }
}

fn sub(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Sorts by index and merges repeated indices.
fn normalize<F: Field>(f: &F, mut v: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
    v.sort_by_key(|e| e.0);
    let mut out: SparseVec<F::Elem> = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y = f.add(y, &x),
            _ => out.push((i, x)),
        }
    }
    out.retain(|(_, x)| !f.is_zero(x));
    out
}
