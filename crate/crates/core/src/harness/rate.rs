//! Closed-form achievable rates, in bit/s/Hz, against linear SNR `γ`.

use super::config::RateParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateScheme {
    OtfsOfdm,
    Ofdm,
    OtfsFcp,
    Ocdm,
    Afdm,
}

impl RateScheme {
    pub const ALL: [RateScheme; 5] = [
        RateScheme::OtfsOfdm,
        RateScheme::Ofdm,
        RateScheme::OtfsFcp,
        RateScheme::Ocdm,
        RateScheme::Afdm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RateScheme::OtfsOfdm => "otfs_ofdm",
            RateScheme::Ofdm => "ofdm",
            RateScheme::OtfsFcp => "otfs_fcp",
            RateScheme::Ocdm => "ocdm",
            RateScheme::Afdm => "afdm",
        }
    }
}

/// Fraction `payload / length`, with a negative payload clamped to zero.
fn efficiency(what: &str, payload: f64, length: f64) -> f64 {
    if payload < 0.0 {
        log::warn!("{what}: overhead exceeds the data symbols, rate clamped to 0");
        return 0.0;
    }
    payload / length
}

impl RateParams {
    /// Pre-log factor of each scheme: rate = factor * log2(1 + γ).
    pub fn prelog(&self, scheme: RateScheme) -> f64 {
        let (m, n, alpha) = (self.m as f64, self.n as f64, self.alpha as f64);
        let mn = m * n;
        let (l, t, t_cp) = (self.fcp_len as f64, self.t as f64, self.t_cp as f64);
        match scheme {
            RateScheme::OtfsOfdm => {
                efficiency("coexistent OTFS", mn / alpha - self.phi_otfs, mn + n * l)
                    + efficiency("coexistent OFDM", t / alpha - self.phi_ofdm, t + t_cp)
            }
            RateScheme::Ofdm => efficiency("OFDM", t - self.theta_ofdm, t + t_cp),
            RateScheme::OtfsFcp => efficiency("OTFS with FCP", m - self.theta_otfs, m + l),
            RateScheme::Ocdm => efficiency("OCDM", mn - self.theta_ocdm, mn),
            RateScheme::Afdm => efficiency("AFDM", mn - self.theta_afdm, mn),
        }
    }

    pub fn rate(&self, scheme: RateScheme, gamma: f64) -> f64 {
        self.prelog(scheme) * (1.0 + gamma).log2()
    }
}

/// One curve per scheme, evaluated on `gamma` (linear).
pub fn rate_curves(p: &RateParams, gamma: &[f64]) -> Vec<(RateScheme, Vec<f64>)> {
    RateScheme::ALL
        .iter()
        .map(|&s| {
            let c = p.prelog(s);
            (s, gamma.iter().map(|g| c * (1.0 + g).log2()).collect())
        })
        .collect()
}
