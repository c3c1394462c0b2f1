use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{beta_cocycle, WeightedAverageSpec};
use crate::cocycle::lyapunov_trace_prefix;
use crate::error::{Error, Result};
use crate::returnformula::periodic_exponent;
use crate::symbolic::Symbol;

/// `ψ(β)`: the exponent of the deformed cocycle along the weight word.
///
/// Periodic weight sources get the exact value `log ρ / p`; any other source
/// is read for `horizon` symbols and the trace exponent at `horizon` is
/// returned, which carries an `O(1/horizon)` bias.
pub fn psi(spec: &WeightedAverageSpec, beta: f64, horizon: usize) -> Result<f64> {
    Pressure::new(spec, horizon)?.at(beta)
}

/// `ψ` with the weight word materialised once.
struct Pressure<'a> {
    spec: &'a WeightedAverageSpec,
    horizon: usize,
    weights: Option<Vec<Symbol>>,
}

impl<'a> Pressure<'a> {
    fn new(spec: &'a WeightedAverageSpec, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be at least 1".into()));
        }
        let weights = match spec.periodic_cycle() {
            Some(_) => None,
            None => Some(spec.weight_source().emit_prefix(horizon)?.into_inner()),
        };
        Ok(Pressure {
            spec,
            horizon,
            weights,
        })
    }

    fn at(&self, beta: f64) -> Result<f64> {
        let cocycle = beta_cocycle(self.spec, beta)?;
        match &self.weights {
            None => periodic_exponent(&cocycle, self.spec.periodic_cycle().unwrap()),
            Some(w) => {
                let t = lyapunov_trace_prefix(&cocycle, w, &[self.horizon])?;
                Ok(t.values()[0] / self.horizon as f64)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub beta: f64,
    pub psi: f64,
    /// `ψ′(β)` by central difference.
    pub alpha: f64,
    /// `(ψ(β) − αβ) / log q`.
    pub dim: f64,
}

impl SpectrumPoint {
    /// `dim < −1e-6`: `α` lies outside the spectrum's domain.
    pub fn outside_domain(&self) -> bool {
        self.dim < -1e-6
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumCurve {
    pub points: Vec<SpectrumPoint>,
}

impl SpectrumCurve {
    /// CSV with header `beta,psi,alpha,dim`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["beta", "psi", "alpha", "dim"])?;
        for p in &self.points {
            w.write_record([p.beta, p.psi, p.alpha, p.dim].map(|x| x.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format written by [`SpectrumCurve::write_csv`].
    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut points = Vec::new();
        for record in r.records() {
            let record = record?;
            let field = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| Error::Io(format!("bad spectrum row {record:?}")))
            };
            points.push(SpectrumPoint {
                beta: field(0)?,
                psi: field(1)?,
                alpha: field(2)?,
                dim: field(3)?,
            });
        }
        Ok(SpectrumCurve { points })
    }

    pub fn flagged(&self) -> impl Iterator<Item = &SpectrumPoint> {
        self.points.iter().filter(|p| p.outside_domain())
    }
}

/// Default derivative step `1e-3 (1 + |β|)`.
pub fn default_step(beta: f64) -> f64 {
    1e-3 * (1.0 + beta.abs())
}

/// `(β, ψ, α, dim)` on a strictly increasing grid of `β`. With `step =
/// None` each point uses [`default_step`].
pub fn spectrum_curve(
    spec: &WeightedAverageSpec,
    betas: &[f64],
    horizon: usize,
    step: Option<f64>,
) -> Result<SpectrumCurve> {
    if betas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("β grid must be strictly increasing".into()));
    }
    if let Some(h) = step {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("derivative step {h} must be positive")));
        }
    }
    let pressure = Pressure::new(spec, horizon)?;
    let log_q = (spec.states().size() as f64).ln();
    let points = betas
        .par_iter()
        .map(|&beta| {
            let h = step.unwrap_or_else(|| default_step(beta));
            let psi = pressure.at(beta)?;
            let alpha = (pressure.at(beta + h)? - pressure.at(beta - h)?) / (2.0 * h);
            let dim = (psi - alpha * beta) / log_q;
            Ok(SpectrumPoint {
                beta,
                psi,
                alpha,
                dim,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumCurve { points })
}
