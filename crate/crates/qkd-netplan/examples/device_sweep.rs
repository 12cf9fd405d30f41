//! Optimize the detector working point and signal intensity for a
//! plug&play link: sweep the secret rate over the mean photon number with
//! the installed detector, then let the optimizer pick the best
//! {efficiency, dead time, dark count rate} row from a candidate file.
//!
//! ```bash
//! cargo run -p qkd-netplan --example device_sweep
//! ```

use std::path::Path;

use qkd_netplan::device::{default_mu_grid, load_candidates, optimize};
use qkd_netplan::{DetectorCount, DetectorParams, LinkBudget, ProtocolConfig, QberOptions, Scheme};

fn main() -> qkd_netplan::Result<()> {
    // installed detector and link of the stronger laboratory setup
    let installed = DetectorParams::new(0.15, 110.0, 10e-6, 200e-9, 0.993, 0.001)?;
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
    let protocol = ProtocolConfig::no_decoy(0.4, 1.15)?;
    let opts = QberOptions {
        dark_half_credit: true,
        total_click_denominator: false,
    };

    let candidates = load_candidates(
        &Path::new(env!("CARGO_MANIFEST_DIR")).join("data/detector_candidates.csv"),
    )?;
    let result = optimize(
        &installed,
        &candidates,
        &link,
        &protocol,
        &default_mu_grid(),
        opts,
    )?;

    println!(
        "{:>5}  {:>14}  {:>14}",
        "mu", "fixed [kbit/s]", "best [kbit/s]"
    );
    for point in result.sweep.iter().step_by(10) {
        println!(
            "{:>5.2}  {:>14.3}  {:>14.3}",
            point.mu,
            point.r_sec_fixed / 1e3,
            point.r_sec_optimized / 1e3
        );
    }

    println!(
        "\nBest working point: '{}' (eta_det {:.0}%, dead time {:.0} us, DCR {:.0} Hz) \
         at mu = {:.2} -> {:.2} kbit/s",
        result.best_candidate.label,
        result.best_candidate.eta_det * 100.0,
        result.best_candidate.tau_dead_s * 1e6,
        result.best_candidate.dcr_hz,
        result.best_mu,
        result.r_sec / 1e3
    );
    let fixed_best = result
        .sweep
        .iter()
        .map(|p| p.r_sec_fixed)
        .fold(0.0, f64::max);
    println!(
        "Installed detector peaks at {:.2} kbit/s; swapping the working point buys {:.0}%.",
        fixed_best / 1e3,
        100.0 * (result.r_sec - fixed_best) / fixed_best
    );
    Ok(())
}
