//! Search for the best detector working point and signal intensity.
//!
//! Detector efficiency, dark count rate and dead time cannot be tuned
//! independently on real hardware: raising the bias voltage raises both the
//! efficiency and the dark count rate. The achievable working points are
//! therefore supplied as a discrete candidate list (one row per measured
//! point), and the optimizer exhaustively maximizes the secret-key-rate
//! lower bound over candidates and a signal-intensity grid.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{DetectorParams, LinkBudget, ProtocolConfig, QberOptions};
use crate::secrecy::link_performance;

/// One achievable detector working point.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorCandidate {
    /// Detection efficiency, fraction.
    pub eta_det: f64,
    /// Dead time, seconds.
    pub tau_dead_s: f64,
    /// Dark count rate, Hz.
    pub dcr_hz: f64,
    /// Free-text provenance label (data-sheet row, measurement id, ...).
    pub label: String,
}

impl DetectorCandidate {
    /// Merge this working point into a base detector, keeping the base
    /// gate window, visibility and afterpulse probability.
    pub fn apply_to(&self, base: &DetectorParams) -> Result<DetectorParams> {
        DetectorParams::new(
            self.eta_det,
            self.dcr_hz,
            self.tau_dead_s,
            base.tau_gate_s,
            base.visibility,
            base.p_after,
        )
    }
}

/// One sample of the intensity sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub mu: f64,
    /// Secret rate with the fixed base detector.
    pub r_sec_fixed: f64,
    /// Best secret rate over the candidate set at this intensity.
    pub r_sec_optimized: f64,
}

/// Result of the exhaustive candidate x intensity search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_mu: f64,
    pub best_candidate: DetectorCandidate,
    /// Secret rate at the optimum, bit/s.
    pub r_sec: f64,
    /// Intensity-sorted sweep of fixed vs optimized rates.
    pub sweep: Vec<SweepPoint>,
    /// False when no candidate/intensity pair yields a positive rate.
    pub secure: bool,
}

/// Default intensity grid: 0.01 to 1.50 in steps of 0.01.
pub fn default_mu_grid() -> Vec<f64> {
    (1..=150).map(|i| i as f64 / 100.0).collect()
}

fn check_grid(mu_grid: &[f64]) -> Result<()> {
    if mu_grid.is_empty() {
        return Err(Error::invalid("intensity grid must be non-empty"));
    }
    if mu_grid[0] <= 0.0 {
        return Err(Error::invalid("intensities must be > 0"));
    }
    if mu_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("intensity grid must be strictly increasing"));
    }
    Ok(())
}

/// Evaluate the full pipeline over an intensity grid with fixed detector
/// parameters. Insecure points report a zero rate.
pub fn sweep_mu(
    det: &DetectorParams,
    link: &LinkBudget,
    protocol_template: &ProtocolConfig,
    mu_grid: &[f64],
    opts: QberOptions,
) -> Result<Vec<(f64, f64)>> {
    check_grid(mu_grid)?;
    mu_grid
        .iter()
        .map(|&mu| {
            let protocol = protocol_template.with_mu(mu);
            protocol.validate()?;
            let perf = link_performance(det, link, &protocol, opts)?;
            Ok((mu, perf.r_sec()))
        })
        .collect()
}

/// Exhaustive maximum of the secret rate over candidates and intensities.
///
/// Ties are broken deterministically towards lower dark count rate, then
/// lower intensity, then the candidate label, so the result does not depend
/// on the order of the candidate list.
pub fn optimize(
    base: &DetectorParams,
    candidates: &[DetectorCandidate],
    link: &LinkBudget,
    protocol_template: &ProtocolConfig,
    mu_grid: &[f64],
    opts: QberOptions,
) -> Result<OptimizationResult> {
    if candidates.is_empty() {
        return Err(Error::invalid("candidate set must be non-empty"));
    }
    check_grid(mu_grid)?;

    let fixed = sweep_mu(base, link, protocol_template, mu_grid, opts)?;

    let mut best: Option<(f64, &DetectorCandidate, f64)> = None; // (mu, candidate, rate)
    let mut sweep = Vec::with_capacity(mu_grid.len());
    for (i, &mu) in mu_grid.iter().enumerate() {
        let mut best_here = 0.0f64;
        for cand in candidates {
            let det = cand.apply_to(base)?;
            let protocol = protocol_template.with_mu(mu);
            let r = link_performance(&det, link, &protocol, opts)?.r_sec();
            best_here = best_here.max(r);
            let better = match &best {
                None => true,
                Some((bmu, bcand, brate)) => {
                    r > *brate
                        || (r == *brate
                            && (cand.dcr_hz < bcand.dcr_hz
                                || (cand.dcr_hz == bcand.dcr_hz
                                    && (mu < *bmu || (mu == *bmu && cand.label < bcand.label)))))
                }
            };
            if better {
                best = Some((mu, cand, r));
            }
        }
        sweep.push(SweepPoint {
            mu,
            r_sec_fixed: fixed[i].1,
            r_sec_optimized: best_here,
        });
    }

    let (best_mu, best_candidate, r_sec) = best.expect("non-empty grid and candidates");
    Ok(OptimizationResult {
        best_mu,
        best_candidate: best_candidate.clone(),
        r_sec,
        sweep,
        secure: r_sec > 0.0,
    })
}

/// Load a candidate file: CSV with header
/// `eta_det,tau_dead_us,dcr_hz,label`.
pub fn load_candidates(path: &Path) -> Result<Vec<DetectorCandidate>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::domain(format!("candidate file {}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::domain(format!("candidate file header: {e}")))?
        .clone();
    let expected = ["eta_det", "tau_dead_us", "dcr_hz", "label"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::domain(format!(
            "candidate file must have header {}, got {}",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::domain(format!("candidate row {}: {e}", i + 2)))?;
        let field = |j: usize| -> Result<f64> {
            record[j]
                .parse::<f64>()
                .map_err(|e| Error::domain(format!("candidate row {}: {e}", i + 2)))
        };
        out.push(DetectorCandidate {
            eta_det: field(0)?,
            tau_dead_s: field(1)? / 1e6,
            dcr_hz: field(2)?,
            label: record[3].to_string(),
        });
    }
    if out.is_empty() {
        return Err(Error::domain("candidate file contains no rows"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DetectorCount, Scheme};
    use approx::assert_relative_eq;

    fn base_det() -> DetectorParams {
        DetectorParams::new(0.15, 110.0, 10e-6, 200e-9, 0.993, 0.001).unwrap()
    }

    fn lab_link() -> LinkBudget {
        LinkBudget {
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
        }
    }

    fn protocol() -> ProtocolConfig {
        ProtocolConfig::no_decoy(0.4, 1.15).unwrap()
    }

    fn candidates() -> Vec<DetectorCandidate> {
        vec![
            DetectorCandidate {
                eta_det: 0.15,
                tau_dead_s: 10e-6,
                dcr_hz: 110.0,
                label: "base".into(),
            },
            DetectorCandidate {
                eta_det: 0.30,
                tau_dead_s: 25e-6,
                dcr_hz: 990.0,
                label: "high-bias".into(),
            },
        ]
    }

    #[test]
    fn sweep_single_point_matches_direct_evaluation() {
        let det = base_det();
        let link = lab_link();
        let sweep = sweep_mu(&det, &link, &protocol(), &[0.4], QberOptions::default()).unwrap();
        assert_eq!(sweep.len(), 1);
        let direct = link_performance(
            &det,
            &link,
            &protocol().with_mu(0.4),
            QberOptions::default(),
        )
        .unwrap()
        .r_sec();
        assert_eq!(sweep[0], (0.4, direct));
    }

    #[test]
    fn sweep_vanishing_intensity_gives_zero_rate() {
        let det = base_det();
        let link = lab_link();
        let sweep = sweep_mu(&det, &link, &protocol(), &[1e-6], QberOptions::default()).unwrap();
        assert_eq!(sweep[0].1, 0.0);
    }

    #[test]
    fn sweep_over_full_grid_has_interior_maximum() {
        let det = base_det();
        let link = lab_link();
        let sweep = sweep_mu(
            &det,
            &link,
            &protocol(),
            &default_mu_grid(),
            QberOptions::default(),
        )
        .unwrap();
        let argmax = sweep
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .unwrap()
            .0;
        assert!(argmax > 0 && argmax < sweep.len() - 1, "argmax at {argmax}");
        // the operating point of this setup sits on the rising flank
        let at_04 = sweep
            .iter()
            .find(|(mu, _)| (*mu - 0.4).abs() < 1e-9)
            .unwrap();
        assert!(at_04.1 > 0.0 && at_04.1 < sweep[argmax].1);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let det = base_det();
        let link = lab_link();
        assert!(sweep_mu(&det, &link, &protocol(), &[], QberOptions::default()).is_err());
        assert!(sweep_mu(
            &det,
            &link,
            &protocol(),
            &[0.4, 0.2],
            QberOptions::default()
        )
        .is_err());
        assert!(sweep_mu(
            &det,
            &link,
            &protocol(),
            &[0.0, 0.2],
            QberOptions::default()
        )
        .is_err());
    }

    #[test]
    fn optimized_curve_dominates_fixed_curve() {
        let result = optimize(
            &base_det(),
            &candidates(),
            &lab_link(),
            &protocol(),
            &default_mu_grid(),
            QberOptions::default(),
        )
        .unwrap();
        for p in &result.sweep {
            assert!(
                p.r_sec_optimized >= p.r_sec_fixed,
                "optimized {} < fixed {} at mu={}",
                p.r_sec_optimized,
                p.r_sec_fixed,
                p.mu
            );
        }
    }

    #[test]
    fn optimum_is_reproducible_by_reevaluation() {
        let result = optimize(
            &base_det(),
            &candidates(),
            &lab_link(),
            &protocol(),
            &default_mu_grid(),
            QberOptions::default(),
        )
        .unwrap();
        let det = result.best_candidate.apply_to(&base_det()).unwrap();
        let again = link_performance(
            &det,
            &lab_link(),
            &protocol().with_mu(result.best_mu),
            QberOptions::default(),
        )
        .unwrap()
        .r_sec();
        assert_eq!(result.r_sec, again);
    }

    #[test]
    fn optimize_is_invariant_under_candidate_permutation() {
        let grid = default_mu_grid();
        let cands = candidates();
        let mut reversed = cands.clone();
        reversed.reverse();
        let a = optimize(
            &base_det(),
            &cands,
            &lab_link(),
            &protocol(),
            &grid,
            QberOptions::default(),
        )
        .unwrap();
        let b = optimize(
            &base_det(),
            &reversed,
            &lab_link(),
            &protocol(),
            &grid,
            QberOptions::default(),
        )
        .unwrap();
        assert_eq!(a.best_mu, b.best_mu);
        assert_eq!(a.best_candidate, b.best_candidate);
        assert_eq!(a.r_sec, b.r_sec);
    }

    #[test]
    fn single_candidate_equals_sweep_argmax() {
        let grid = default_mu_grid();
        let single = vec![candidates()[0].clone()];
        let result = optimize(
            &base_det(),
            &single,
            &lab_link(),
            &protocol(),
            &grid,
            QberOptions::default(),
        )
        .unwrap();
        let sweep = sweep_mu(
            &base_det(),
            &lab_link(),
            &protocol(),
            &grid,
            QberOptions::default(),
        )
        .unwrap();
        let (best_mu, best_r) =
            sweep
                .iter()
                .copied()
                .fold((0.0, f64::NEG_INFINITY), |acc, (mu, r)| {
                    if r > acc.1 {
                        (mu, r)
                    } else {
                        acc
                    }
                });
        assert_eq!(result.best_mu, best_mu);
        assert_relative_eq!(result.r_sec, best_r, max_relative = 1e-12);
    }

    #[test]
    fn hopeless_channel_reports_no_secure_point() {
        let mut link = lab_link();
        link.alpha_opt_db = 60.0;
        let result = optimize(
            &base_det(),
            &candidates(),
            &link,
            &protocol(),
            &[0.1, 0.5, 1.0],
            QberOptions::default(),
        )
        .unwrap();
        assert!(!result.secure);
        assert_eq!(result.r_sec, 0.0);
    }

    #[test]
    fn candidate_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cands.csv");
        std::fs::write(
            &path,
            "eta_det,tau_dead_us,dcr_hz,label\n0.30,25.0,990.0,high bias point\n",
        )
        .unwrap();
        let cands = load_candidates(&path).unwrap();
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].eta_det, 0.30);
        assert_eq!(cands[0].tau_dead_s, 25e-6);
        assert_eq!(cands[0].label, "high bias point");

        std::fs::write(&path, "eta,tau,dcr,label\n").unwrap();
        assert!(load_candidates(&path).is_err());
        std::fs::write(&path, "eta_det,tau_dead_us,dcr_hz,label\n").unwrap();
        assert!(load_candidates(&path).is_err());
    }
}
