//! Sweeps `d ↦ dim K_{p,q}(B, P + dA)`, forward differences, and exact
//! polynomial fits validated on held-out samples.
//!
//! Stabilisation is an empirical property of the sampled window: every report
//! carries the window it was computed on.

use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exactlin::fmt_rational;
use crate::koszul::koszul_dim;
use crate::sections::TwistFamily;
use crate::{par, Error, LinAlg, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DSweep {
    pub family: String,
    pub p: usize,
    pub q: i64,
    /// `(d, dim)`, strictly increasing in `d`.
    pub samples: Vec<(u64, usize)>,
}

impl DSweep {
    pub fn dims(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.1).collect()
    }

    pub fn get(&self, d: u64) -> Option<usize> {
        self.samples.iter().find(|s| s.0 == d).map(|s| s.1)
    }

    /// `d,dim` rows sorted by `d`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,dim\n");
        for (d, v) in &self.samples {
            out.push_str(&format!("{d},{v}\n"));
        }
        out
    }
}

/// Members are computed concurrently under `la.exec`; samples come back in
/// `d` order.
pub fn sweep(
    family: &TwistFamily,
    p: usize,
    q: i64,
    d_from: u64,
    d_to: u64,
    la: &LinAlg,
) -> Result<DSweep> {
    if d_from > d_to {
        return Err(Error::Config(format!("empty d range {d_from}..={d_to}")));
    }
    let ds: Vec<u64> = (d_from..=d_to).collect();
    let dims = par::try_map(la.exec, &ds, |&d| {
        let sys = family.member(d)?;
        Ok::<_, Error>(koszul_dim(&sys, p, q, la)?.dim)
    })?;
    Ok(DSweep {
        family: family.describe(),
        p,
        q,
        samples: ds.into_iter().zip(dims).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Differences {
    /// `rows[k][i] = Δ^k dim(d_i)`.
    pub rows: Vec<Vec<i128>>,
    /// Least `k` whose row ends in at least two zeros; the sweep then agrees
    /// with a polynomial of degree `< k` from `stabilized_from` on.
    pub vanishing_order: Option<usize>,
    pub stabilized_from: Option<u64>,
}

/// A row must end in this many zeros before it counts as vanishing.
pub const MIN_ZERO_TAIL: usize = 2;

pub fn finite_differences(s: &DSweep) -> Result<Differences> {
    if s.samples.len() < 2 {
        return Err(Error::Config("finite differences need at least two samples".into()));
    }
    if s.samples.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
        return Err(Error::Config("finite differences need consecutive d".into()));
    }
    let mut rows = vec![s.samples.iter().map(|x| x.1 as i128).collect::<Vec<_>>()];
    while rows.last().is_some_and(|r| r.len() > 1) {
        let r = rows.last().unwrap();
        rows.push(r.windows(2).map(|w| w[1] - w[0]).collect());
    }
    let mut vanishing_order = None;
    let mut stabilized_from = None;
    for (k, row) in rows.iter().enumerate() {
        let tail = row.iter().rev().take_while(|&&x| x == 0).count();
        if tail >= MIN_ZERO_TAIL {
            vanishing_order = Some(k);
            stabilized_from = Some(s.samples[row.len() - tail].0);
            break;
        }
    }
    Ok(Differences {
        rows,
        vanishing_order,
        stabilized_from,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFit {
    pub degree: usize,
    /// `c_0 + c_1 d + ...`, trailing zeros removed (a zero polynomial keeps `[0]`).
    pub coefficients: Vec<BigRational>,
    /// Least sampled `d` from which the polynomial matches every sample.
    pub d0: u64,
    pub train: RangeInclusive<u64>,
    pub holdout: RangeInclusive<u64>,
    pub validated: bool,
}

impl PolyFit {
    pub fn eval(&self, d: u64) -> BigRational {
        let x = BigRational::from_integer(BigInt::from(d));
        self.coefficients
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &x + c)
    }
}

impl fmt::Display for PolyFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "degree: {}", self.degree)?;
        let cs: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| format!("c{i}={}", fmt_rational(c)))
            .collect();
        writeln!(f, "coefficients: {}", cs.join(" "))?;
        writeln!(f, "d0: {}", self.d0)?;
        writeln!(f, "train: {}..={}", self.train.start(), self.train.end())?;
        writeln!(f, "holdout: {}..={}", self.holdout.start(), self.holdout.end())?;
        writeln!(
            f,
            "verdict: {}",
            if self.validated { "validated" } else { "not validated" }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FitOutcome {
    Fit(PolyFit),
    /// The interpolant missed a held-out sample: the sweep has not settled
    /// into its polynomial on the training window.
    NotStabilized {
        first_failing_d: u64,
        predicted: BigRational,
        observed: usize,
    },
}

impl fmt::Display for FitOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitOutcome::Fit(p) => p.fmt(f),
            FitOutcome::NotStabilized {
                first_failing_d,
                predicted,
                observed,
            } => writeln!(
                f,
                "verdict: not stabilized\nfirst failing d: {first_failing_d} (predicted {}, observed {observed})",
                fmt_rational(predicted)
            ),
        }
    }
}

/// `C(x - a, k)` as a polynomial in `x`.
fn shifted_binomial(a: u64, k: usize) -> Vec<BigRational> {
    let mut poly = vec![BigRational::one()];
    for i in 0..k {
        // multiply by (x - a - i) / (i + 1)
        let root = BigRational::from_integer(BigInt::from(a + i as u64));
        let scale = BigRational::from_integer(BigInt::from(i + 1));
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j + 1] += c / &scale;
            next[j] -= c * &root / &scale;
        }
        poly = next;
    }
    poly
}

/// Interpolates exactly on `train` (consecutive `d`) and checks every sample
/// in `holdout`.
pub fn fit_and_validate(
    s: &DSweep,
    train: RangeInclusive<u64>,
    holdout: RangeInclusive<u64>,
) -> Result<FitOutcome> {
    let (a, b) = (*train.start(), *train.end());
    if a > b || holdout.start() > holdout.end() {
        return Err(Error::Config("empty train or holdout window".into()));
    }
    if holdout.start() <= train.end() && train.start() <= holdout.end() {
        return Err(Error::Config("train and holdout windows overlap".into()));
    }
    let values: Vec<usize> = (a..=b)
        .map(|d| {
            s.get(d)
                .ok_or_else(|| Error::Config(format!("d = {d} is not in the sweep")))
        })
        .collect::<Result<_>>()?;
    if let Some(d) = holdout.clone().find(|&d| s.get(d).is_none()) {
        return Err(Error::Config(format!("holdout d = {d} is not in the sweep")));
    }

    // Newton forward form on unit steps, then expand
    let mut diffs: Vec<i128> = values.iter().map(|&v| v as i128).collect();
    let mut coefficients = vec![BigRational::zero(); values.len()];
    for k in 0..values.len() {
        let lead = BigRational::from_integer(BigInt::from(diffs[0]));
        for (j, c) in shifted_binomial(a, k).into_iter().enumerate() {
            coefficients[j] += &lead * c;
        }
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
    }
    while coefficients.len() > 1 && coefficients.last().is_some_and(Zero::is_zero) {
        coefficients.pop();
    }
    let mut fit = PolyFit {
        degree: coefficients.len() - 1,
        coefficients,
        d0: a,
        train,
        holdout: holdout.clone(),
        validated: false,
    };
    for d in holdout {
        let observed = s.get(d).expect("checked above");
        let predicted = fit.eval(d);
        if predicted != BigRational::from_integer(BigInt::from(observed)) {
            return Ok(FitOutcome::NotStabilized {
                first_failing_d: d,
                predicted,
                observed,
            });
        }
    }
    fit.validated = true;
    // extend d0 backwards over agreeing samples
    let agrees = |f: &PolyFit, d: u64| {
        s.get(d)
            .is_some_and(|v| f.eval(d) == BigRational::from_integer(BigInt::from(v)))
    };
    while fit.d0 > 0 && agrees(&fit, fit.d0 - 1) {
        fit.d0 -= 1;
    }
    Ok(FitOutcome::Fit(fit))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingReport {
    pub sweep: DSweep,
    /// Least sampled `d0` with `dim = 0` for every sampled `d >= d0`.
    pub threshold: Option<u64>,
}

/// Eventual vanishing of `K_{p,q}(B, L_d)` for `q >= 2` on `d_from..=d_max`.
pub fn vanishing_threshold(
    family: &TwistFamily,
    p: usize,
    q: i64,
    d_from: u64,
    d_max: u64,
    la: &LinAlg,
) -> Result<VanishingReport> {
    if q < 2 {
        return Err(Error::Config(format!(
            "eventual vanishing concerns q >= 2, got q = {q}"
        )));
    }
    let sweep = sweep(family, p, q, d_from, d_max, la)?;
    let zero_tail = sweep.samples.iter().rev().take_while(|s| s.1 == 0).count();
    let threshold = (zero_tail > 0).then(|| sweep.samples[sweep.samples.len() - zero_tail].0);
    Ok(VanishingReport { sweep, threshold })
}
