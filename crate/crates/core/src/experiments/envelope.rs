//! Rates from earlier covariance-estimation results, with unit constants,
//! for plot overlays.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// √(n log n / N), under a 2-small diameter.
    Rudelson,
    /// √(n/N), isotropic log-concave.
    Alpt,
    /// (log log n)²(n/N)^{1/2−2/q}, L_q moments with q > 4.
    Vershynin,
    /// (n/N)^{η/(2η+2)}, projection tail exponent η.
    Sv,
}

impl std::str::FromStr for EnvelopeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rudelson" => Ok(Self::Rudelson),
            "alpt" => Ok(Self::Alpt),
            "vershynin" => Ok(Self::Vershynin),
            "sv" => Ok(Self::Sv),
            other => Err(Error::InvalidParameter(format!("unknown envelope kind {other:?}"))),
        }
    }
}

/// Extra inputs: q for `Vershynin`, η for `Sv`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeParams {
    pub q: Option<f64>,
    pub eta: Option<f64>,
}

pub fn reference_envelope(kind: EnvelopeKind, n: usize, big_n: usize, params: EnvelopeParams) -> Result<f64> {
    envelope_at(kind, n as f64, big_n as f64, params)
}

/// Same rates at real-valued n and N.
pub fn envelope_at(kind: EnvelopeKind, nf: f64, big_n: f64, params: EnvelopeParams) -> Result<f64> {
    if !(nf >= 2.0 && big_n >= 2.0) {
        return invalid(format!("envelopes need n, N ≥ 2, got n = {nf}, N = {big_n}"));
    }
    let ratio = nf / big_n;
    Ok(match kind {
        EnvelopeKind::Rudelson => (ratio * nf.ln()).sqrt(),
        EnvelopeKind::Alpt => ratio.sqrt(),
        EnvelopeKind::Vershynin => {
            let q = params
                .q
                .ok_or_else(|| Error::InvalidParameter("vershynin envelope needs q".into()))?;
            nf.ln().ln().powi(2) * ratio.powf(0.5 - 2.0 / q)
        }
        EnvelopeKind::Sv => {
            let eta = params
                .eta
                .ok_or_else(|| Error::InvalidParameter("sv envelope needs eta".into()))?;
            ratio.powf(eta / (2.0 * eta + 2.0))
        }
    })
}
