//! Shared fixtures for the integration suites: the two laboratory plug&play
//! links, the one-way backbone reference detector, and the Moscow-Udomlya
//! backbone rates.

// each suite uses a different subset of the fixtures
#![allow(dead_code)]

use qkd_netplan::{DetectorCount, DetectorParams, LinkBudget, NetworkSpec, ProtocolConfig, Scheme};

pub fn lab_detector_1() -> DetectorParams {
    DetectorParams::new(0.06, 470.0, 25e-6, 200e-9, 0.993, 0.001).unwrap()
}

pub fn lab_link_1() -> LinkBudget {
    LinkBudget {
        length_km: 10.0,
        alpha_opt_db: 2.0,
        alpha_bob_db: 7.5,
        alpha_alice_db: 31.7,
        pulse_freq_hz: 5e6,
        scheme: Scheme::PlugPlay {
            pulses_per_train: 1200,
            storage_line_km: 25.0,
            fiber_index: 1.47,
        },
        detectors: DetectorCount::One,
    }
}

pub fn lab_detector_2() -> DetectorParams {
    DetectorParams::new(0.15, 110.0, 10e-6, 200e-9, 0.993, 0.001).unwrap()
}

pub fn lab_link_2() -> LinkBudget {
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

pub fn backbone_detector() -> DetectorParams {
    DetectorParams::new(0.10, 300.0, 5e-6, 600e-12, 0.98, 0.03).unwrap()
}

pub fn backbone_link(alpha_opt_db: f64, length_km: f64) -> LinkBudget {
    LinkBudget {
        length_km,
        alpha_opt_db,
        alpha_bob_db: 4.0,
        alpha_alice_db: 0.0,
        pulse_freq_hz: 312.5e6,
        scheme: Scheme::OneWay,
        detectors: DetectorCount::Two,
    }
}

pub fn two_decoy_protocol() -> ProtocolConfig {
    ProtocolConfig::two_decoy(0.5, 0.1, 0.01, 0.5, 0.25, 1.15).unwrap()
}

/// Reference per-link values of the Moscow-Udomlya backbone:
/// (name, length km, loss dB, sifted kbit/s, secret kbit/s, QBER %).
pub const BACKBONE_LINKS: [(&str, f64, f64, f64, f64, f64); 7] = [
    ("Moscow-Kubinka", 86.8, 19.0, 16.8, 2.7, 4.1),
    ("Kubinka-Uvarovka", 115.0, 22.2, 8.8, 1.4, 4.2),
    ("Uvarovka-Gagarin", 74.0, 14.6, 35.7, 5.9, 4.0),
    ("Gagarin-P.Gorodische", 98.7, 18.9, 17.1, 2.8, 4.1),
    ("P.Gorodische-Torzhok", 125.8, 23.6, 6.6, 1.0, 4.2),
    ("Torzhok-V.Volochek", 114.4, 21.8, 9.6, 1.5, 4.1),
    ("V.Volochek-Udomlya", 82.5, 15.9, 29.2, 4.8, 4.0),
];

pub fn backbone_rates_kbit() -> Vec<f64> {
    BACKBONE_LINKS.iter().map(|l| l.4).collect()
}

pub fn backbone_network() -> NetworkSpec {
    NetworkSpec::new(
        [
            "Moscow",
            "Kubinka",
            "Uvarovka",
            "Gagarin",
            "P. Gorodische",
            "Torzhok",
            "V. Volochek",
            "Udomlya",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        backbone_rates_kbit(),
    )
    .unwrap()
}

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}
