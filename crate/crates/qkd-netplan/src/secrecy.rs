//! Lower bounds on the secret key rate.
//!
//! The secret key rate of BB84 in the asymptotic limit is
//!
//! `R_sec = R_sift * ( kappa_1 * (1 - H(E_1)) - f_ec * H(E_mu) )`
//!
//! where `kappa_1` is the fraction of sifted bits originating from
//! single-photon pulses, `E_1` their error rate, `E_mu` the overall QBER
//! and `H` the binary Shannon entropy. `kappa_1` and `E_1` are not directly
//! observable; this module computes worst-case bounds for them:
//!
//! * without decoy states, every loss and error is attributed to
//!   single-photon pulses while multi-photon pulses are assumed to reach
//!   the receiver unharmed (photon-number-splitting attack);
//! * with two decoy states, the observed per-intensity gains bound the
//!   vacuum and single-photon yields from below and the single-photon
//!   error rate from above.
//!
//! Statistical (finite-key) fluctuations are deliberately not modelled.

use crate::error::{Error, Result};
use crate::model::{
    link_stats, DetectorParams, LinkBudget, LinkStats, ProtocolConfig, ProtocolVariant, QberOptions,
};

/// Binary Shannon entropy `H(x) = -x log2 x - (1-x) log2 (1-x)`,
/// with `H(0) = H(1) = 0` by continuity.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!(
            "binary entropy argument must be in [0, 1], got {x}"
        )));
    }
    Ok(h(x))
}

fn h(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Observed gain and QBER per emitted intensity class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainError {
    /// Signal class `(Q_mu, E_mu)`.
    pub signal: (f64, f64),
    /// Decoy classes `[(Q_nu1, E_nu1), (Q_nu2, E_nu2)]` when present.
    pub decoys: Option<[(f64, f64); 2]>,
}

impl GainError {
    /// Extract gains and error rates from an evaluated link model.
    pub fn from_stats(stats: &LinkStats) -> Result<Self> {
        let grab = |i: usize| {
            let s = &stats.per_intensity[i];
            (s.gain, s.stats.qber)
        };
        let ge = match stats.per_intensity.len() {
            1 => GainError {
                signal: grab(0),
                decoys: None,
            },
            3 => GainError {
                signal: grab(0),
                decoys: Some([grab(1), grab(2)]),
            },
            n => {
                return Err(Error::invalid(format!(
                    "expected 1 or 3 intensity classes, got {n}"
                )))
            }
        };
        ge.validate()?;
        Ok(ge)
    }

    pub fn validate(&self) -> Result<()> {
        let mut all = vec![self.signal];
        if let Some(d) = self.decoys {
            all.extend(d);
        }
        for (q, e) in &all {
            if !(0.0..=1.0).contains(q) {
                return Err(Error::invalid(format!("gain must be in [0, 1], got {q}")));
            }
            if !(0.0..=0.5).contains(e) {
                return Err(Error::invalid(format!("QBER must be in [0, 0.5], got {e}")));
            }
        }
        for w in all.windows(2) {
            if w[0].0 < w[1].0 {
                return Err(Error::invalid(
                    "gains must be monotone non-increasing in decreasing intensity",
                ));
            }
        }
        Ok(())
    }
}

/// Single-photon bounds plus the resulting secret-rate lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyResult {
    /// Lower bound on the single-photon fraction of the sifted key.
    pub kappa1_lower: f64,
    /// Upper bound on the single-photon QBER.
    pub e1_upper: f64,
    /// Lower bound on the background yield (decoy estimate only).
    pub y0_lower: Option<f64>,
    /// Lower bound on the single-photon yield (decoy estimate only).
    pub y1_lower: Option<f64>,
    /// Lower bound on the secret key rate, bit/s, clamped at zero.
    pub r_sec: f64,
    /// True when the link produces no provably secret key: the
    /// single-photon bound collapsed (multi-photon fraction eats the whole
    /// gain, or the decoy yield bound is non-positive), or the error terms
    /// drive the rate bound below zero.
    pub insecure: bool,
}

/// Worst-case single-photon bounds for plain BB84.
///
/// All multi-photon pulses are assumed to be detected with the receiver's
/// internal efficiency through a lossless channel:
/// `Q_1 >= Q_mu - (1 - (1+mu) e^-mu) * eta_det * 10^(-0.1 alpha_B)`.
/// Returns `(kappa1_lower, e1_upper, insecure)`.
pub fn no_decoy_bounds(
    q_mu: f64,
    e_mu: f64,
    mu: f64,
    eta_det: f64,
    alpha_bob_db: f64,
) -> Result<(f64, f64, bool)> {
    if q_mu <= 0.0 {
        return Err(Error::invalid("signal gain must be > 0"));
    }
    let multi_photon = (1.0 - (1.0 + mu) * (-mu).exp()) * eta_det * 10f64.powf(-0.1 * alpha_bob_db);
    let q1_lower = (q_mu - multi_photon).max(0.0);
    if q1_lower <= 0.0 {
        return Ok((0.0, 0.5, true));
    }
    let kappa1 = q1_lower / q_mu;
    let e1 = (q_mu * e_mu / q1_lower).min(0.5);
    Ok((kappa1, e1, false))
}

/// Decoy-state bounds on background yield, single-photon yield, single-photon
/// error, and the single-photon fraction `kappa_1 = Y_1 mu e^-mu / Q_mu`.
pub fn decoy_bounds(ge: &GainError, protocol: &ProtocolConfig) -> Result<SecrecyResult> {
    ge.validate()?;
    let ProtocolVariant::TwoDecoy { mu, nu1, nu2, .. } = protocol.variant else {
        return Err(Error::invalid("decoy bounds require a two-decoy protocol"));
    };
    let Some([(q_nu1, e_nu1), (q_nu2, e_nu2)]) = ge.decoys else {
        return Err(Error::invalid("decoy bounds require decoy-class gains"));
    };
    let (q_mu, _) = ge.signal;
    if q_mu <= 0.0 || q_nu1 <= 0.0 || q_nu2 <= 0.0 {
        return Err(Error::invalid("gains must be > 0"));
    }

    let y0 = ((nu1 * q_nu2 * nu2.exp() - nu2 * q_nu1 * nu1.exp()) / (nu1 - nu2)).max(0.0);

    let y1 = mu / ((nu1 - nu2) * (mu - nu1 - nu2))
        * (q_nu1 * nu1.exp()
            - q_nu2 * nu2.exp()
            - (nu1 * nu1 - nu2 * nu2) / (mu * mu) * (q_mu * mu.exp() - y0));
    let y1 = y1.clamp(0.0, 1.0);

    if y1 <= 0.0 {
        // bound collapse: no single-photon contribution can be certified
        return Ok(SecrecyResult {
            kappa1_lower: 0.0,
            e1_upper: 0.5,
            y0_lower: Some(y0),
            y1_lower: Some(0.0),
            r_sec: 0.0,
            insecure: true,
        });
    }

    let e1 = (e_nu1 * q_nu1 * nu1.exp() - e_nu2 * q_nu2 * nu2.exp()) / ((nu1 - nu2) * y1);
    let e1 = e1.clamp(0.0, 0.5);
    let kappa1 = y1 * mu * (-mu).exp() / q_mu;

    Ok(SecrecyResult {
        kappa1_lower: kappa1,
        e1_upper: e1,
        y0_lower: Some(y0),
        y1_lower: Some(y1),
        r_sec: 0.0,
        insecure: false,
    })
}

/// Secret-key-rate lower bound, clamped at zero.
///
/// The verified rate is approximated by the sifted rate (error correction
/// is assumed to succeed; its cost appears only through `f_ec`).
pub fn secret_rate(r_sift: f64, kappa1_lower: f64, e1_upper: f64, e_mu: f64, f_ec: f64) -> f64 {
    let bracket = kappa1_lower * (1.0 - h(e1_upper)) - f_ec * h(e_mu);
    (r_sift * bracket).max(0.0)
}

/// Full model evaluation of one link: click statistics plus secrecy bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkPerformance {
    pub stats: LinkStats,
    pub secrecy: SecrecyResult,
}

impl LinkPerformance {
    /// Sifted key rate, bit/s.
    pub fn r_sift(&self) -> f64 {
        self.stats.r_sift
    }

    /// Overall QBER of the signal class.
    pub fn qber(&self) -> f64 {
        self.stats.signal().stats.qber
    }

    /// Secret-key-rate lower bound, bit/s.
    pub fn r_sec(&self) -> f64 {
        self.secrecy.r_sec
    }
}

/// Run the whole pipeline for one link: click model, single-photon bounds,
/// secret-rate lower bound.
pub fn link_performance(
    det: &DetectorParams,
    link: &LinkBudget,
    protocol: &ProtocolConfig,
    opts: QberOptions,
) -> Result<LinkPerformance> {
    let stats = link_stats(det, link, protocol, opts)?;
    let ge = GainError::from_stats(&stats)?;
    let (q_mu, e_mu) = ge.signal;

    let mut secrecy = match protocol.variant {
        ProtocolVariant::NoDecoy { mu } => {
            let (kappa1, e1, insecure) =
                no_decoy_bounds(q_mu, e_mu, mu, det.eta_det, link.alpha_bob_db)?;
            SecrecyResult {
                kappa1_lower: kappa1,
                e1_upper: e1,
                y0_lower: None,
                y1_lower: None,
                r_sec: 0.0,
                insecure,
            }
        }
        ProtocolVariant::TwoDecoy { .. } => decoy_bounds(&ge, protocol)?,
    };

    if !secrecy.insecure {
        secrecy.r_sec = secret_rate(
            stats.r_sift,
            secrecy.kappa1_lower,
            secrecy.e1_upper,
            e_mu,
            protocol.f_ec,
        );
        if secrecy.r_sec <= 0.0 {
            secrecy.insecure = true;
        }
    }
    Ok(LinkPerformance { stats, secrecy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DetectorCount, Scheme};
    use approx::assert_relative_eq;

    fn backbone_det() -> DetectorParams {
        DetectorParams::new(0.10, 300.0, 5e-6, 600e-12, 0.98, 0.03).unwrap()
    }

    fn backbone_link(alpha_opt_db: f64) -> LinkBudget {
        LinkBudget {
            length_km: 100.0,
            alpha_opt_db,
            alpha_bob_db: 4.0,
            alpha_alice_db: 0.0,
            pulse_freq_hz: 312.5e6,
            scheme: Scheme::OneWay,
            detectors: DetectorCount::Two,
        }
    }

    fn decoy_protocol() -> ProtocolConfig {
        ProtocolConfig::two_decoy(0.5, 0.1, 0.01, 0.5, 0.25, 1.15).unwrap()
    }

    #[test]
    fn entropy_reference_points() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_relative_eq!(
            binary_entropy(0.11).unwrap(),
            0.499_915_958_164_5,
            max_relative = 1e-12
        );
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn entropy_is_symmetric_and_concave() {
        for i in 1..50 {
            let x = i as f64 / 100.0;
            assert_relative_eq!(
                binary_entropy(x).unwrap(),
                binary_entropy(1.0 - x).unwrap(),
                max_relative = 1e-12
            );
            let mid = binary_entropy(x).unwrap();
            let avg =
                (binary_entropy(x - 0.005).unwrap() + binary_entropy(x + 0.005).unwrap()) / 2.0;
            assert!(mid >= avg);
        }
    }

    #[test]
    fn no_decoy_single_photon_limit() {
        // vanishing mu: everything is single-photon
        let (kappa1, e1, insecure) = no_decoy_bounds(1e-3, 0.02, 1e-9, 0.15, 6.1).unwrap();
        assert_relative_eq!(kappa1, 1.0, epsilon = 1e-6);
        assert_relative_eq!(e1, 0.02, max_relative = 1e-5);
        assert!(!insecure);
    }

    #[test]
    fn no_decoy_insecure_boundary() {
        // gain exactly equal to the multi-photon bound
        let mu = 0.5f64;
        let multi = (1.0 - 1.5 * (-mu).exp()) * 0.15 * 10f64.powf(-0.61);
        let (kappa1, e1, insecure) = no_decoy_bounds(multi, 0.01, mu, 0.15, 6.1).unwrap();
        assert_eq!(kappa1, 0.0);
        assert_eq!(e1, 0.5);
        assert!(insecure);
    }

    #[test]
    fn decoy_bounds_ideal_channel() {
        // noiseless channel: Q = 1 - exp(-eta lambda), no errors
        let eta = 0.05f64;
        let q = |lam: f64| -(-eta * lam).exp_m1();
        let ge = GainError {
            signal: (q(0.5), 0.0),
            decoys: Some([(q(0.1), 0.0), (q(0.01), 0.0)]),
        };
        let b = decoy_bounds(&ge, &decoy_protocol()).unwrap();
        let y1 = b.y1_lower.unwrap();
        assert_relative_eq!(y1, 4.836_416e-2, max_relative = 1e-5);
        assert!(y1 <= eta + 1e-12);
        assert!(y1 > 0.9 * eta);
        assert_eq!(b.e1_upper, 0.0);
        assert!(!b.insecure);
    }

    #[test]
    fn decoy_vacuum_state_pins_background_yield() {
        // nu2 = 0 degenerates the background bound to the vacuum gain
        let protocol = ProtocolConfig::two_decoy(0.5, 0.1, 0.0, 0.5, 0.25, 1.15).unwrap();
        let q0 = 3.6e-7;
        let ge = GainError {
            signal: (2.5e-4, 0.04),
            decoys: Some([(5.0e-5, 0.04), (q0, 0.25)]),
        };
        let b = decoy_bounds(&ge, &protocol).unwrap();
        assert_relative_eq!(b.y0_lower.unwrap(), q0, max_relative = 1e-12);
    }

    #[test]
    fn decoy_pipeline_backbone_reference() {
        let det = backbone_det();
        let mut link = backbone_link(19.0);
        link.length_km = 86.8;
        let perf =
            link_performance(&det, &link, &decoy_protocol(), QberOptions::default()).unwrap();
        assert_relative_eq!(perf.r_sec(), 2542.85, max_relative = 1e-3);
        // within 20% of the 2.7 kbit/s reference for this link
        assert!((perf.r_sec() - 2700.0).abs() / 2700.0 < 0.2);
        let b = &perf.secrecy;
        assert_relative_eq!(b.y1_lower.unwrap(), 4.840_147e-4, max_relative = 1e-4);
        assert_relative_eq!(b.kappa1_lower, 0.584_98, max_relative = 1e-4);
        assert_relative_eq!(b.e1_upper, 4.637_3e-2, max_relative = 1e-4);
    }

    #[test]
    fn secret_rate_perfect_channel_keeps_everything() {
        assert_eq!(secret_rate(1000.0, 1.0, 0.0, 0.0, 1.15), 1000.0);
    }

    #[test]
    fn secret_rate_clamps_to_zero() {
        assert_eq!(secret_rate(1000.0, 0.5, 0.3, 0.2, 1.15), 0.0);
    }

    #[test]
    fn secret_rate_bottleneck_reference() {
        // bounds computed for the highest-loss backbone link, applied to a
        // 6.6 kbit/s sifted rate
        let det = backbone_det();
        let mut link = backbone_link(23.6);
        link.length_km = 125.8;
        let perf =
            link_performance(&det, &link, &decoy_protocol(), QberOptions::default()).unwrap();
        let r = secret_rate(
            6600.0,
            perf.secrecy.kappa1_lower,
            perf.secrecy.e1_upper,
            perf.qber(),
            1.15,
        );
        assert_relative_eq!(r, 919.26, max_relative = 1e-3);
        assert!((r - 1000.0).abs() / 1000.0 < 0.2);
    }

    #[test]
    fn secret_rate_never_exceeds_sifted_rate_and_falls_with_errors() {
        let mut previous = f64::INFINITY;
        for i in 0..100 {
            let e = i as f64 / 200.0;
            let r = secret_rate(500.0, 0.9, e, e, 1.15);
            assert!(r <= 500.0);
            assert!(r <= previous);
            previous = r;
        }
        // non-decreasing in the single-photon fraction
        assert!(
            secret_rate(500.0, 0.9, 0.05, 0.05, 1.15) >= secret_rate(500.0, 0.5, 0.05, 0.05, 1.15)
        );
    }

    #[test]
    fn decoy_bound_collapse_is_flagged() {
        // decoy gains far below what the signal gain implies: no
        // single-photon yield can be certified
        let ge = GainError {
            signal: (0.9, 0.04),
            decoys: Some([(1e-4, 0.04), (9e-5, 0.04)]),
        };
        let b = decoy_bounds(&ge, &decoy_protocol()).unwrap();
        assert!(b.insecure);
        assert_eq!(b.y1_lower, Some(0.0));
        assert_eq!(b.kappa1_lower, 0.0);
        assert_eq!(b.e1_upper, 0.5);
        assert_eq!(b.r_sec, 0.0);
    }

    #[test]
    fn no_decoy_pipeline_lab_reference() {
        let det = DetectorParams::new(0.15, 110.0, 10e-6, 200e-9, 0.993, 0.001).unwrap();
        let link = LinkBudget {
            length_km: 15.3,
            alpha_opt_db: 4.0,
            alpha_bob_db: 6.1,
            alpha_alice_db: 26.5,
            pulse_freq_hz: 5e6,
            scheme: Scheme::PlugPlay {
                pulses_per_train: 1200,
                storage_line_km: 25.0,
                fiber_index: 1.47,
            },
            detectors: DetectorCount::One,
        };
        let protocol = ProtocolConfig::no_decoy(0.4, 1.15).unwrap();
        let perf = link_performance(&det, &link, &protocol, QberOptions::default()).unwrap();
        assert_relative_eq!(perf.r_sec(), 1266.17, max_relative = 1e-3);
        assert!(!perf.secrecy.insecure);
    }

    #[test]
    fn gain_error_rejects_inverted_gains() {
        let ge = GainError {
            signal: (1e-4, 0.04),
            decoys: Some([(2e-4, 0.04), (1e-5, 0.05)]),
        };
        assert!(ge.validate().is_err());
    }
}
