use std::io::{Read, Write};

use rayon::prelude::*;

use super::CocycleSpec;
use crate::error::{Error, Result};
use crate::matproc::ScaledProduct;
use crate::symbolic::{InfiniteWordSource, Symbol};

/// `A^{(n,m)}(ω) = A(σ^n ω) ⋯ A(σ^{m−1} ω)` read off a materialised prefix.
///
/// Needs `|prefix| ≥ m + r − 1` when `n < m`; `n = m` gives the empty
/// product (log-norm 0).
pub fn partial_product(
    spec: &CocycleSpec,
    prefix: &[Symbol],
    n: usize,
    m: usize,
) -> Result<ScaledProduct> {
    if n > m {
        return Err(Error::InvalidParameter(format!("partial product needs n ≤ m, got {n} > {m}")));
    }
    let mut acc = ScaledProduct::identity(spec.dim());
    if n == m {
        return Ok(acc);
    }
    let required = m + spec.depth() - 1;
    if prefix.len() < required {
        return Err(Error::InsufficientContext {
            required,
            available: prefix.len(),
        });
    }
    let mut roll = RollingIndex::new(spec);
    for &s in &prefix[n..n + spec.depth() - 1] {
        roll.feed(s);
    }
    for k in n..m {
        let index = roll.feed(prefix[k + spec.depth() - 1]);
        acc.push(spec.factor_at(index))
            .map_err(|e| at_position(e, k))?;
    }
    Ok(acc)
}

fn at_position(e: Error, position: usize) -> Error {
    match e {
        Error::Underflow { .. } => Error::UnderflowAt {
            position,
            source: Box::new(e),
        },
        other => other,
    }
}

/// Base-`m` index of the last `r` symbols fed.
pub(crate) struct RollingIndex {
    m: usize,
    modulus: usize,
    index: usize,
}

impl RollingIndex {
    pub(crate) fn new(spec: &CocycleSpec) -> Self {
        let m = spec.alphabet().size();
        RollingIndex {
            m,
            modulus: m.pow(spec.depth() as u32 - 1),
            index: 0,
        }
    }

    pub(crate) fn feed(&mut self, s: Symbol) -> usize {
        debug_assert!((s as usize) < self.m);
        self.index = (self.index % self.modulus) * self.m + s as usize;
        self.index
    }
}

/// `log ‖A^{(n)}(ω)‖` sampled at checkpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovTrace {
    checkpoints: Vec<usize>,
    values: Vec<f64>,
    zero_index: Option<usize>,
}

impl LyapunovTrace {
    pub fn new(checkpoints: Vec<usize>, values: Vec<f64>, zero_index: Option<usize>) -> Result<Self> {
        if checkpoints.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: checkpoints.len(),
                found: values.len(),
            });
        }
        Ok(LyapunovTrace {
            checkpoints,
            values,
            zero_index,
        })
    }

    pub fn checkpoints(&self) -> &[usize] {
        &self.checkpoints
    }

    /// `log ‖A^{(n)}‖` per checkpoint; `-∞` past a zero product.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(1/n) log ‖A^{(n)}‖` per checkpoint (`n = 0` reports 0).
    pub fn exponents(&self) -> Vec<f64> {
        self.checkpoints
            .iter()
            .zip(&self.values)
            .map(|(&n, &v)| if n == 0 { 0.0 } else { v / n as f64 })
            .collect()
    }

    /// First `n` with `A^{(n)}(ω) = 0`.
    pub fn zero_index(&self) -> Option<usize> {
        self.zero_index
    }

    /// Exponent at the last checkpoint.
    pub fn final_exponent(&self) -> Option<f64> {
        self.exponents().last().copied()
    }

    /// CSV with header `n,log_norm,exponent,zero_flag`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["n", "log_norm", "exponent", "zero_flag"])?;
        for ((n, v), e) in self.checkpoints.iter().zip(&self.values).zip(self.exponents()) {
            let zero = self.zero_index.is_some_and(|z| *n >= z);
            w.write_record([
                n.to_string(),
                v.to_string(),
                e.to_string(),
                (zero as u8).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses [`LyapunovTrace::write_csv`] output. The zero index is
    /// recovered as the first flagged checkpoint.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let (mut checkpoints, mut values, mut zero_index) = (Vec::new(), Vec::new(), None);
        for record in r.records() {
            let record = record?;
            let field = |i: usize| {
                record
                    .get(i)
                    .ok_or_else(|| Error::Config(format!("trace row has no column {i}")))
            };
            let bad = |e: &dyn std::fmt::Display| Error::Config(format!("bad trace row: {e}"));
            let n: usize = field(0)?.parse().map_err(|e| bad(&e))?;
            let v: f64 = field(1)?.parse().map_err(|e| bad(&e))?;
            if field(3)? == "1" && zero_index.is_none() {
                zero_index = Some(n);
            }
            checkpoints.push(n);
            values.push(v);
        }
        LyapunovTrace::new(checkpoints, values, zero_index)
    }
}

/// Streams `source` once and records `log ‖A^{(n)}(ω)‖` at each checkpoint.
pub fn lyapunov_trace(
    spec: &CocycleSpec,
    source: &InfiniteWordSource,
    checkpoints: &[usize],
) -> Result<LyapunovTrace> {
    trace_symbols(spec, source.stream(), checkpoints)
}

/// Same as [`lyapunov_trace`] on a materialised prefix.
pub fn lyapunov_trace_prefix(
    spec: &CocycleSpec,
    prefix: &[Symbol],
    checkpoints: &[usize],
) -> Result<LyapunovTrace> {
    let last = checkpoints.last().copied().unwrap_or(0);
    let required = if last == 0 { 0 } else { last + spec.depth() - 1 };
    if prefix.len() < required {
        return Err(Error::InsufficientContext {
            required,
            available: prefix.len(),
        });
    }
    trace_symbols(spec, prefix.iter().map(|&s| Ok(s)), checkpoints)
}

fn trace_symbols(
    spec: &CocycleSpec,
    mut symbols: impl Iterator<Item = Result<Symbol>>,
    checkpoints: &[usize],
) -> Result<LyapunovTrace> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    let mut values = Vec::with_capacity(checkpoints.len());
    let mut zero_index = None;
    let mut acc = ScaledProduct::identity(spec.dim());
    let mut roll = RollingIndex::new(spec);
    let mut next = || -> Result<Symbol> {
        symbols.next().unwrap_or_else(|| {
            Err(Error::InvalidSource("symbol stream ended".into()))
        })
    };
    let last = checkpoints.last().copied().unwrap_or(0);
    if last > 0 {
        for _ in 0..spec.depth() - 1 {
            roll.feed(next()?);
        }
    }
    let mut n = 0;
    for &target in checkpoints {
        while n < target {
            let index = roll.feed(next()?);
            if zero_index.is_none() {
                acc.push(spec.factor_at(index)).map_err(|e| at_position(e, n))?;
                if acc.is_zero() {
                    zero_index = Some(n + 1);
                }
            }
            n += 1;
        }
        values.push(if zero_index.is_some() {
            f64::NEG_INFINITY
        } else {
            acc.log_norm()
        });
    }
    LyapunovTrace::new(checkpoints.to_vec(), values, zero_index)
}

/// `⌈n₀ · 2^{k/2}⌉` for `k = 0, 1, …` up to `max`, deduplicated, with
/// `max` appended if it is not already on the grid.
pub fn geometric_checkpoints(n0: usize, max: usize) -> Vec<usize> {
    let n0 = n0.max(1);
    let mut out: Vec<usize> = Vec::new();
    for k in 0.. {
        let n = (n0 as f64 * 2f64.powf(k as f64 / 2.0)).ceil() as usize;
        if n > max {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
    }
    if out.last() != Some(&max) && max > 0 {
        out.push(max);
    }
    out
}

/// `step, 2·step, …` up to `max` (and `max` itself).
pub fn linear_checkpoints(step: usize, max: usize) -> Vec<usize> {
    let step = step.max(1);
    let mut out: Vec<usize> = (1..).map(|k| k * step).take_while(|&n| n <= max).collect();
    if out.last() != Some(&max) && max > 0 {
        out.push(max);
    }
    out
}

/// One row of [`quasi_additivity_defect`].
#[derive(Clone, Debug, PartialEq)]
pub struct DefectRow {
    pub n: usize,
    pub m: usize,
    /// `|log‖A^{(n+m)}‖ − log‖A^{(n)}‖ − log‖A^{(n,n+m)}‖|`, or `None` when a
    /// factor is the zero matrix.
    pub defect: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport {
    pub rows: Vec<DefectRow>,
    /// Largest defined defect.
    pub max: Option<f64>,
}

/// Quasi-additivity defects of `log ‖A^{(n)}‖` for each `(n, m)` pair.
pub fn quasi_additivity_defect(
    spec: &CocycleSpec,
    prefix: &[Symbol],
    pairs: &[(usize, usize)],
) -> Result<DefectReport> {
    let rows = pairs
        .par_iter()
        .map(|&(n, m)| {
            let head = partial_product(spec, prefix, 0, n)?;
            let tail = partial_product(spec, prefix, n, n + m)?;
            let whole = head.concat(&tail)?;
            let defect = if head.is_zero() || tail.is_zero() || whole.is_zero() {
                None
            } else {
                Some((whole.log_norm() - head.log_norm() - tail.log_norm()).abs())
            };
            Ok(DefectRow { n, m, defect })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = rows
        .iter()
        .filter_map(|r| r.defect)
        .max_by(f64::total_cmp);
    Ok(DefectReport { rows, max })
}

/// `(n, m)` with both on a geometric grid and `n + m ≤ limit`.
pub fn default_defect_pairs(limit: usize) -> Vec<(usize, usize)> {
    let grid = geometric_checkpoints(1, limit / 3);
    let mut out = Vec::new();
    for &n in &grid {
        for &m in &grid {
            if n + m <= limit {
                out.push((n, m));
            }
        }
    }
    out
}
