//! Find the channel-loss range where plain BB84 (no decoy states) remains
//! securable on the two laboratory setups: scan the optical loss and
//! maximize the secret rate over the signal intensity at each point.
//!
//! ```bash
//! cargo run -p qkd-netplan --example security_range
//! ```

use qkd_netplan::secrecy::link_performance;
use qkd_netplan::{DetectorCount, DetectorParams, LinkBudget, ProtocolConfig, QberOptions, Scheme};

fn plugplay_link(length_km: f64, alpha_opt_db: f64, alpha_bob_db: f64) -> LinkBudget {
    LinkBudget {
        length_km,
        alpha_opt_db,
        alpha_bob_db,
        alpha_alice_db: 0.0,
        pulse_freq_hz: 5e6,
        scheme: Scheme::PlugPlay {
            pulses_per_train: 1200,
            storage_line_km: 25.0,
            fiber_index: 1.47,
        },
        detectors: DetectorCount::One,
    }
}

fn best_over_intensity(det: &DetectorParams, link: &LinkBudget) -> (f64, f64) {
    let mut best = (0.0, 0.0);
    for i in 1..=150 {
        let mu = i as f64 / 100.0;
        let protocol = ProtocolConfig::no_decoy(mu, 1.15).unwrap();
        let r = link_performance(det, link, &protocol, QberOptions::default())
            .unwrap()
            .r_sec();
        if r > best.1 {
            best = (mu, r);
        }
    }
    best
}

fn main() -> qkd_netplan::Result<()> {
    let setups = [
        (
            "6% detector, 470 Hz DCR",
            DetectorParams::new(0.06, 470.0, 25e-6, 200e-9, 0.993, 0.001)?,
            plugplay_link(10.0, 2.0, 7.5),
        ),
        (
            "15% detector, 110 Hz DCR",
            DetectorParams::new(0.15, 110.0, 10e-6, 200e-9, 0.993, 0.001)?,
            plugplay_link(15.3, 4.0, 6.1),
        ),
    ];

    for (name, det, template) in setups {
        println!("{name}:");
        println!(
            "{:>12}  {:>8}  {:>14}",
            "loss [dB]", "best mu", "R_sec [kbit/s]"
        );
        let mut crossing = None;
        let mut previous_secure = false;
        let mut alpha = 1.0;
        while alpha <= 14.0 {
            let mut link = template.clone();
            link.alpha_opt_db = alpha;
            let (mu, r) = best_over_intensity(&det, &link);
            if alpha % 2.0 < 0.25 {
                println!("{alpha:>12.1}  {mu:>8.2}  {:>14.3}", r / 1e3);
            }
            let secure = r > 0.0;
            if previous_secure && !secure && crossing.is_none() {
                crossing = Some(alpha - 0.125);
            }
            previous_secure = secure;
            alpha += 0.25;
        }
        match crossing {
            Some(a) => println!("  -> securable up to about {a:.1} dB of channel loss\n"),
            None => println!("  -> securable over the whole scanned range\n"),
        }
    }
    Ok(())
}
