//! Physical model of a single BB84 link.
//!
//! Everything here is a pure function of device and channel parameters.
//! The model produces, per pulse intensity, the probability of a signal
//! detection, the dark-count probability, the quantum bit error rate, and
//! the sifted key rate after duty-cycle and detector dead-time corrections.
//!
//! The chain is:
//!
//! 1. overall transmittance `eta = eta_det * 10^(-0.1 (alpha_opt + alpha_B))`;
//! 2. effective pulse frequency — equal to the laser frequency for one-way
//!    links, reduced by the train duty cycle for plug&play links where the
//!    emitter waits for each pulse train to return through the storage line;
//! 3. detection probability per pulse `p_sig = 1 - exp(-eta * lambda)`;
//! 4. QBER from dark counts, afterpulses, and optical visibility;
//! 5. dead-time correction `R -> R / (1 + R_click * tau_d)` driven by the
//!    sifted-level click rate of *all* pulse classes, since the detector
//!    cannot distinguish signal from decoy states or dark counts.

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Single-photon detector working point.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorParams {
    /// Detection efficiency, fraction in [0, 1].
    pub eta_det: f64,
    /// Dark count rate, Hz.
    pub dcr_hz: f64,
    /// Dead time after a registered avalanche, seconds.
    pub tau_dead_s: f64,
    /// Registration gate window, seconds. Free-running detectors use the
    /// full pulse period here.
    pub tau_gate_s: f64,
    /// Interference visibility, fraction in (0.5, 1].
    pub visibility: f64,
    /// Cumulative afterpulse probability, fraction in [0, 1).
    pub p_after: f64,
}

impl DetectorParams {
    pub fn new(
        eta_det: f64,
        dcr_hz: f64,
        tau_dead_s: f64,
        tau_gate_s: f64,
        visibility: f64,
        p_after: f64,
    ) -> Result<Self> {
        let det = Self {
            eta_det,
            dcr_hz,
            tau_dead_s,
            tau_gate_s,
            visibility,
            p_after,
        };
        det.validate()?;
        Ok(det)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta_det) {
            return Err(Error::invalid(format!(
                "detection efficiency must be in [0, 1], got {}",
                self.eta_det
            )));
        }
        if self.dcr_hz < 0.0 {
            return Err(Error::invalid("dark count rate must be >= 0"));
        }
        if self.tau_dead_s < 0.0 {
            return Err(Error::invalid("dead time must be >= 0"));
        }
        if self.tau_gate_s <= 0.0 {
            return Err(Error::invalid("gate window must be > 0"));
        }
        if !(self.visibility > 0.5 && self.visibility <= 1.0) {
            return Err(Error::invalid(format!(
                "visibility must be in (0.5, 1], got {}",
                self.visibility
            )));
        }
        if !(0.0..1.0).contains(&self.p_after) {
            return Err(Error::invalid("afterpulse probability must be in [0, 1)"));
        }
        Ok(())
    }

    /// Dark count probability per gate, `DCR * tau_gate`.
    pub fn dark_probability(&self) -> f64 {
        self.dcr_hz * self.tau_gate_s
    }
}

/// Optical scheme of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Two-pass auto-compensating scheme. Pulses are emitted in trains that
    /// must clear the storage line before the next train starts, which
    /// reduces the effective pulse frequency.
    PlugPlay {
        /// Pulses per train.
        pulses_per_train: u32,
        /// Storage line length at the reflecting side, km.
        storage_line_km: f64,
        /// Fiber refractive index.
        fiber_index: f64,
    },
    /// One-way scheme, no train gaps.
    OneWay,
}

/// Number of single-photon detectors in the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorCount {
    One,
    Two,
}

impl DetectorCount {
    pub fn count(self) -> u32 {
        match self {
            DetectorCount::One => 1,
            DetectorCount::Two => 2,
        }
    }

    /// Fraction of emitted pulses that can end up in the sifted key:
    /// 1/2 for basis reconciliation, and another 1/2 with a single detector
    /// because the receiver must also guess the bit value it checks.
    pub fn sift_factor(self) -> f64 {
        match self {
            DetectorCount::One => 0.25,
            DetectorCount::Two => 0.5,
        }
    }
}

/// Fiber link budget and transmitter configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    /// Channel length, km.
    pub length_km: f64,
    /// Total optical loss in the channel, dB.
    pub alpha_opt_db: f64,
    /// Internal loss of the receiver module, dB.
    pub alpha_bob_db: f64,
    /// Internal loss of the transmitter module, dB. Informational only:
    /// the pulse intensity is specified at the transmitter output, so this
    /// loss does not enter the transmittance.
    pub alpha_alice_db: f64,
    /// Laser pulse repetition frequency, Hz.
    pub pulse_freq_hz: f64,
    pub scheme: Scheme,
    pub detectors: DetectorCount,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        if self.length_km < 0.0 {
            return Err(Error::invalid("link length must be >= 0"));
        }
        if self.alpha_opt_db < 0.0 || self.alpha_bob_db < 0.0 || self.alpha_alice_db < 0.0 {
            return Err(Error::invalid("losses must be >= 0"));
        }
        if self.pulse_freq_hz <= 0.0 {
            return Err(Error::invalid("pulse frequency must be > 0"));
        }
        if let Scheme::PlugPlay {
            pulses_per_train,
            storage_line_km,
            fiber_index,
        } = self.scheme
        {
            if pulses_per_train < 1 {
                return Err(Error::invalid("pulses per train must be >= 1"));
            }
            if storage_line_km <= 0.0 {
                return Err(Error::invalid("storage line length must be > 0"));
            }
            if !(1.4..=1.6).contains(&fiber_index) {
                return Err(Error::invalid(format!(
                    "fiber refractive index must be in [1.4, 1.6], got {fiber_index}"
                )));
            }
        }
        Ok(())
    }
}

/// Pulse intensity configuration of the protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProtocolVariant {
    /// Plain BB84, single signal intensity.
    NoDecoy { mu: f64 },
    /// BB84 with two decoy states. `p_mu` and `p_nu1` are the emission
    /// probabilities of the signal and first decoy; the vacuum-like decoy
    /// takes the remainder.
    TwoDecoy {
        mu: f64,
        nu1: f64,
        nu2: f64,
        p_mu: f64,
        p_nu1: f64,
    },
}

/// Protocol configuration: intensities plus the error-correction efficiency
/// factor applied to the leaked-syndrome term of the secret key rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub variant: ProtocolVariant,
    pub f_ec: f64,
}

impl ProtocolConfig {
    pub fn no_decoy(mu: f64, f_ec: f64) -> Result<Self> {
        let p = Self {
            variant: ProtocolVariant::NoDecoy { mu },
            f_ec,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn two_decoy(
        mu: f64,
        nu1: f64,
        nu2: f64,
        p_mu: f64,
        p_nu1: f64,
        f_ec: f64,
    ) -> Result<Self> {
        let p = Self {
            variant: ProtocolVariant::TwoDecoy {
                mu,
                nu1,
                nu2,
                p_mu,
                p_nu1,
            },
            f_ec,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.f_ec < 1.0 {
            return Err(Error::invalid("error-correction efficiency must be >= 1"));
        }
        match self.variant {
            ProtocolVariant::NoDecoy { mu } => {
                if mu <= 0.0 {
                    return Err(Error::invalid("signal intensity must be > 0"));
                }
            }
            ProtocolVariant::TwoDecoy {
                mu,
                nu1,
                nu2,
                p_mu,
                p_nu1,
            } => {
                if !(mu > nu1 && nu1 > nu2 && nu2 >= 0.0) {
                    return Err(Error::invalid(format!(
                        "intensities must satisfy mu > nu1 > nu2 >= 0, got ({mu}, {nu1}, {nu2})"
                    )));
                }
                if nu1 + nu2 >= mu {
                    return Err(Error::invalid(
                        "decoy intensities must satisfy nu1 + nu2 < mu",
                    ));
                }
                if !(p_mu > 0.0 && p_nu1 > 0.0 && p_mu + p_nu1 < 1.0) {
                    return Err(Error::invalid(
                        "state probabilities must be positive with p_mu + p_nu1 < 1",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Signal intensity.
    pub fn mu(&self) -> f64 {
        match self.variant {
            ProtocolVariant::NoDecoy { mu } => mu,
            ProtocolVariant::TwoDecoy { mu, .. } => mu,
        }
    }

    /// Same protocol with a different signal intensity.
    pub fn with_mu(&self, mu: f64) -> Self {
        let mut p = *self;
        match &mut p.variant {
            ProtocolVariant::NoDecoy { mu: m } => *m = mu,
            ProtocolVariant::TwoDecoy { mu: m, .. } => *m = mu,
        }
        p
    }

    /// Emitted intensities as `(lambda, p_state)` pairs, signal first.
    pub fn intensities(&self) -> Vec<(f64, f64)> {
        match self.variant {
            ProtocolVariant::NoDecoy { mu } => vec![(mu, 1.0)],
            ProtocolVariant::TwoDecoy {
                mu,
                nu1,
                nu2,
                p_mu,
                p_nu1,
            } => vec![(mu, p_mu), (nu1, p_nu1), (nu2, 1.0 - p_mu - p_nu1)],
        }
    }
}

/// Options for the QBER estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QberOptions {
    /// Count only half of the dark counts as errors: a dark count lands on
    /// the correct bit value half of the time and then produces an ordinary
    /// count rather than an error.
    pub dark_half_credit: bool,
    /// Normalise by all clicks (signal + dark) instead of signal clicks only.
    pub total_click_denominator: bool,
}

/// Per-intensity click statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClickStats {
    /// Probability per emitted pulse of at least one photon detection.
    pub p_sig: f64,
    /// Dark count probability per gate.
    pub p_dark: f64,
    /// Quantum bit error rate, clamped to [0, 0.5].
    pub qber: f64,
    /// Sifted-key contribution before dead time, bit/s.
    pub r_raw: f64,
    /// Sifted-key contribution after dead time, bit/s.
    pub r_sift: f64,
}

/// Statistics for one emitted intensity class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityStats {
    /// Mean photon number of the class.
    pub intensity: f64,
    /// Emission probability of the class.
    pub p_state: f64,
    /// Gain: click probability per emitted pulse of this class,
    /// `Q = p_sig + n_det * p_dark`.
    pub gain: f64,
    pub stats: ClickStats,
}

/// Full per-link evaluation of the click model.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkStats {
    /// Overall transmittance.
    pub eta: f64,
    /// Effective pulse frequency, Hz.
    pub f_eff: f64,
    /// Per-intensity statistics, signal class first.
    pub per_intensity: Vec<IntensityStats>,
    /// Sifted-level click rate of all intensity classes including dark
    /// counts; this is what drives detector dead time.
    pub r_click: f64,
    /// Fraction of time the receiver is live, `1 / (1 + r_click * tau_d)`.
    pub live_factor: f64,
    /// Sifted key rate of the signal states after dead time, bit/s.
    pub r_sift: f64,
}

impl LinkStats {
    /// Gain and QBER of the signal class.
    pub fn signal(&self) -> &IntensityStats {
        &self.per_intensity[0]
    }
}

/// Overall transmittance from transmitter output to a detection event.
///
/// Transmitter internal losses are not included: the pulse intensity is
/// defined at the transmitter output.
pub fn transmittance(det: &DetectorParams, link: &LinkBudget) -> f64 {
    det.eta_det * 10f64.powf(-0.1 * (link.alpha_opt_db + link.alpha_bob_db))
}

/// Effective pulse frequency.
///
/// One-way links emit continuously. Plug&play links emit trains of
/// `N_p` pulses and wait for the round trip through channel and storage
/// line, so the frequency is scaled by `N_p T / T_train` with
/// `T_train = (N_p - 1) T + 2 (l + l_SL) n_fib / c`.
pub fn effective_frequency(link: &LinkBudget) -> f64 {
    match link.scheme {
        Scheme::OneWay => link.pulse_freq_hz,
        Scheme::PlugPlay {
            pulses_per_train,
            storage_line_km,
            fiber_index,
        } => {
            let period = 1.0 / link.pulse_freq_hz;
            let round_trip =
                2.0 * (link.length_km + storage_line_km) * 1e3 * fiber_index / SPEED_OF_LIGHT;
            let train_period = (pulses_per_train - 1) as f64 * period + round_trip;
            link.pulse_freq_hz * (pulses_per_train as f64 * period) / train_period
        }
    }
}

/// Probability of at least one detected photon for a coherent pulse of the
/// given mean photon number, `1 - exp(-eta * lambda)`.
pub fn signal_probability(eta: f64, intensity: f64) -> f64 {
    -(-eta * intensity).exp_m1()
}

/// Sifted-key rate contribution of one intensity class before dead time.
pub fn raw_rate(det: &DetectorParams, link: &LinkBudget, intensity: f64, p_state: f64) -> f64 {
    debug_assert!(intensity >= 0.0);
    debug_assert!(p_state > 0.0 && p_state <= 1.0);
    let eta = transmittance(det, link);
    link.detectors.sift_factor()
        * effective_frequency(link)
        * p_state
        * signal_probability(eta, intensity)
}

/// QBER of one intensity class.
///
/// `(p_dark + (p_sig + p_dark) p_after + p_sig (1 - V) / 2) / p_sig`,
/// clamped to [0, 0.5]. See [`QberOptions`] for the dark-count credit and
/// denominator variants.
pub fn qber(
    det: &DetectorParams,
    link: &LinkBudget,
    intensity: f64,
    opts: QberOptions,
) -> Result<f64> {
    if intensity <= 0.0 {
        return Err(Error::invalid(
            "QBER is undefined for non-positive intensity",
        ));
    }
    let eta = transmittance(det, link);
    Ok(qber_from_probabilities(
        det.dark_probability(),
        signal_probability(eta, intensity),
        det.visibility,
        det.p_after,
        opts,
    ))
}

pub(crate) fn qber_from_probabilities(
    p_dark: f64,
    p_sig: f64,
    visibility: f64,
    p_after: f64,
    opts: QberOptions,
) -> f64 {
    let p_opt = (1.0 - visibility) / 2.0;
    let dark_errors = if opts.dark_half_credit {
        p_dark / 2.0
    } else {
        p_dark
    };
    let numerator = dark_errors + (p_sig + p_dark) * p_after + p_sig * p_opt;
    let denominator = if opts.total_click_denominator {
        p_sig + p_dark
    } else {
        p_sig
    };
    if denominator <= 0.0 {
        return 0.5;
    }
    (numerator / denominator).clamp(0.0, 0.5)
}

/// Dead-time correction `R / (1 + (R / n_det) tau_d)` where the rate itself
/// drives the dead time and each detector of a pair handles half the clicks.
pub fn sifted_rate(r_raw_total: f64, tau_dead_s: f64, detectors: DetectorCount) -> f64 {
    debug_assert!(r_raw_total >= 0.0);
    r_raw_total / (1.0 + (r_raw_total / detectors.count() as f64) * tau_dead_s)
}

/// Evaluate the full click model for every intensity class of the protocol.
///
/// The secret-key pipeline uses only the signal class for throughput, but
/// clicks from every class (and dark counts, via the gains) drive the
/// dead-time correction.
pub fn link_stats(
    det: &DetectorParams,
    link: &LinkBudget,
    protocol: &ProtocolConfig,
    opts: QberOptions,
) -> Result<LinkStats> {
    det.validate()?;
    link.validate()?;
    protocol.validate()?;

    let eta = transmittance(det, link);
    let f_eff = effective_frequency(link);
    let p_dark = det.dark_probability();
    let n_det = link.detectors.count() as f64;
    let sift = link.detectors.sift_factor();

    let mut per_intensity = Vec::new();
    let mut click_prob = 0.0;
    for (intensity, p_state) in protocol.intensities() {
        let p_sig = signal_probability(eta, intensity);
        let gain = p_sig + n_det * p_dark;
        let qber = if intensity > 0.0 {
            qber_from_probabilities(p_dark, p_sig, det.visibility, det.p_after, opts)
        } else {
            0.5
        };
        click_prob += p_state * gain;
        per_intensity.push(IntensityStats {
            intensity,
            p_state,
            gain,
            stats: ClickStats {
                p_sig,
                p_dark,
                qber,
                r_raw: sift * f_eff * p_state * p_sig,
                r_sift: 0.0,
            },
        });
    }

    let r_click = sift * f_eff * click_prob;
    let live_factor = 1.0 / (1.0 + r_click * det.tau_dead_s);
    for entry in &mut per_intensity {
        entry.stats.r_sift = entry.stats.r_raw * live_factor;
    }
    let r_sift = per_intensity[0].stats.r_sift;

    Ok(LinkStats {
        eta,
        f_eff,
        per_intensity,
        r_click,
        live_factor,
        r_sift,
    })
}
