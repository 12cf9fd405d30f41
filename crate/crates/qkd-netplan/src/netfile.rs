//! Network description files.
//!
//! A network file is a hand-editable TOML document describing a backbone:
//! ordered node names, one entry per link (either physical parameters that
//! feed the link model, or a directly specified secret key rate), named
//! detector and transmitter-setup blocks referenced by the links, the
//! protocol intensities, equipment costs, and optional planning constraints.
//!
//! Units at the file boundary: km, dB, Hz, microseconds, kbit/s. Internal
//! computations use SI units and bit/s.
//!
//! ```toml
//! schema_version = 1
//! nodes = ["Alpha", "Bravo", "Charlie"]
//!
//! [protocol]
//! variant = "two-decoy"
//! mu = 0.5
//! nu1 = 0.1
//! nu2 = 0.01
//! p_mu = 0.5
//! p_nu1 = 0.25
//! f_ec = 1.15
//!
//! [costs]
//! alice = 1.0
//! bob = 2.0
//! switch = 0.1
//!
//! [detectors.spd]
//! eta_det = 0.10
//! dcr_hz = 300.0
//! tau_dead_us = 5.0
//! tau_gate_us = 0.0006
//! visibility = 0.98
//! p_after = 0.03
//!
//! [setups.oneway]
//! pulse_freq_hz = 312.5e6
//! scheme = "one-way"
//! detectors = 2
//! bob_loss_db = 4.0
//!
//! [[links]]
//! from = "Alpha"
//! to = "Bravo"
//! length_km = 86.8
//! loss_db = 19.0
//! detector = "spd"
//! setup = "oneway"
//!
//! [[links]]
//! from = "Bravo"
//! to = "Charlie"
//! rate_kbit_s = 2.7
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::backbone::{CostModel, NetworkSpec};
use crate::error::{Error, Result};
use crate::model::{
    DetectorCount, DetectorParams, LinkBudget, ProtocolConfig, QberOptions, Scheme,
};
use crate::secrecy::link_performance;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub schema_version: u32,
    /// Ordered node names; links must follow this order.
    pub nodes: Vec<String>,
    pub protocol: ProtocolBlock,
    pub costs: CostsBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintsBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub detectors: BTreeMap<String, DetectorBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub setups: BTreeMap<String, SetupBlock>,
    pub links: Vec<LinkBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolBlock {
    pub variant: ProtocolKind,
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_nu1: Option<f64>,
    pub f_ec: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    NoDecoy,
    TwoDecoy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostsBlock {
    pub alice: f64,
    pub bob: f64,
    pub switch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsBlock {
    /// Trusted nodes that must keep two devices (no switch).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub locked_full: Vec<String>,
    /// Plan exactly this many switches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switches: Option<usize>,
    /// Plan a whole range of switch counts, inclusive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_range: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorBlock {
    pub eta_det: f64,
    pub dcr_hz: f64,
    pub tau_dead_us: f64,
    /// Registration gate window. May be omitted for plug&play setups, where
    /// the free-running default is the full pulse period.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_gate_us: Option<f64>,
    pub visibility: f64,
    pub p_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupBlock {
    pub pulse_freq_hz: f64,
    pub scheme: SchemeKind,
    /// Number of single-photon detectors in the receiver, 1 or 2.
    pub detectors: u32,
    pub bob_loss_db: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub alice_loss_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulses_per_train: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub storage_line_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_index: Option<f64>,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    OneWay,
    PlugAndPlay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBlock {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setup: Option<String>,
    /// Directly specified secret key rate; mutually exclusive with the
    /// physical parameters above.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_kbit_s: Option<f64>,
}

impl LinkBlock {
    fn is_direct(&self) -> bool {
        self.rate_kbit_s.is_some()
    }
}

/// One computed link-rate table row.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRateRow {
    pub from: String,
    pub to: String,
    pub length_km: Option<f64>,
    pub loss_db: Option<f64>,
    /// Sifted key rate, bit/s; `None` for direct-rate links.
    pub sifted_bit_s: Option<f64>,
    /// Overall QBER; `None` for direct-rate links.
    pub qber: Option<f64>,
    /// Secret key rate lower bound, bit/s.
    pub secret_bit_s: f64,
    /// The link yields no provably secret key.
    pub insecure: bool,
}

impl NetworkFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::NetworkFile(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: NetworkFile =
            toml::from_str(text).map_err(|e| Error::NetworkFile(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    /// Canonical serialization; parsing it back yields an equal value.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::NetworkFile(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::NetworkFile(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.links.is_empty() {
            return Err(Error::NetworkFile("at least one link is required".into()));
        }
        if self.nodes.len() != self.links.len() + 1 {
            return Err(Error::NetworkFile(format!(
                "{} links need {} nodes, got {}",
                self.links.len(),
                self.links.len() + 1,
                self.nodes.len()
            )));
        }
        for (i, link) in self.links.iter().enumerate() {
            if link.from != self.nodes[i] || link.to != self.nodes[i + 1] {
                return Err(Error::NetworkFile(format!(
                    "link {} ({} -> {}) does not follow the node order ({} -> {})",
                    i + 1,
                    link.from,
                    link.to,
                    self.nodes[i],
                    self.nodes[i + 1]
                )));
            }
            let physical = [
                link.length_km.is_some(),
                link.loss_db.is_some(),
                link.detector.is_some(),
                link.setup.is_some(),
            ];
            if link.is_direct() {
                if physical.iter().any(|p| *p) {
                    return Err(Error::NetworkFile(format!(
                        "link {}: rate_kbit_s excludes physical parameters",
                        i + 1
                    )));
                }
            } else if physical.iter().any(|p| !*p) {
                return Err(Error::NetworkFile(format!(
                    "link {}: needs length_km, loss_db, detector and setup (or rate_kbit_s)",
                    i + 1
                )));
            } else {
                let det = link.detector.as_ref().unwrap();
                if !self.detectors.contains_key(det) {
                    return Err(Error::NetworkFile(format!(
                        "link {}: unknown detector '{det}'",
                        i + 1
                    )));
                }
                let setup = link.setup.as_ref().unwrap();
                if !self.setups.contains_key(setup) {
                    return Err(Error::NetworkFile(format!(
                        "link {}: unknown setup '{setup}'",
                        i + 1
                    )));
                }
            }
        }
        if let Some(c) = &self.constraints {
            if c.switches.is_some() && c.switch_range.is_some() {
                return Err(Error::NetworkFile(
                    "constraints: give either switches or switch_range, not both".into(),
                ));
            }
            if let Some([lo, hi]) = c.switch_range {
                if lo > hi {
                    return Err(Error::NetworkFile("constraints: empty switch_range".into()));
                }
            }
            for name in &c.locked_full {
                let idx = self.nodes.iter().position(|n| n == name);
                match idx {
                    None => {
                        return Err(Error::NetworkFile(format!("unknown locked node '{name}'")))
                    }
                    Some(0) => {
                        return Err(Error::NetworkFile(format!(
                            "cannot lock edge node '{name}'"
                        )))
                    }
                    Some(i) if i == self.nodes.len() - 1 => {
                        return Err(Error::NetworkFile(format!(
                            "cannot lock edge node '{name}'"
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        self.protocol_config()?;
        self.cost_model().validate()?;
        Ok(())
    }

    pub fn protocol_config(&self) -> Result<ProtocolConfig> {
        let p = &self.protocol;
        match p.variant {
            ProtocolKind::NoDecoy => ProtocolConfig::no_decoy(p.mu, p.f_ec),
            ProtocolKind::TwoDecoy => {
                let need = |v: Option<f64>, name: &str| {
                    v.ok_or_else(|| Error::NetworkFile(format!("two-decoy protocol needs {name}")))
                };
                ProtocolConfig::two_decoy(
                    p.mu,
                    need(p.nu1, "nu1")?,
                    need(p.nu2, "nu2")?,
                    need(p.p_mu, "p_mu")?,
                    need(p.p_nu1, "p_nu1")?,
                    p.f_ec,
                )
            }
        }
    }

    pub fn cost_model(&self) -> CostModel {
        CostModel {
            alice: self.costs.alice,
            bob: self.costs.bob,
            switch: self.costs.switch,
        }
    }

    /// Trusted-node indices locked to full by the constraints block.
    pub fn locked_indices(&self) -> Vec<usize> {
        self.constraints
            .as_ref()
            .map(|c| {
                c.locked_full
                    .iter()
                    .filter_map(|name| self.nodes.iter().position(|n| n == name))
                    .map(|i| i - 1)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Switch-count range requested by the constraints block, if any.
    pub fn switch_range(&self) -> Option<(usize, usize)> {
        let c = self.constraints.as_ref()?;
        if let Some(k) = c.switches {
            Some((k, k))
        } else {
            c.switch_range.map(|[lo, hi]| (lo, hi))
        }
    }

    fn build_link(&self, index: usize) -> Result<(DetectorParams, LinkBudget)> {
        let link = &self.links[index];
        let setup = &self.setups[link.setup.as_ref().unwrap()];
        let det_block = &self.detectors[link.detector.as_ref().unwrap()];

        let scheme = match setup.scheme {
            SchemeKind::OneWay => Scheme::OneWay,
            SchemeKind::PlugAndPlay => {
                let need = |v: Option<f64>, name: &str| {
                    v.ok_or_else(|| Error::NetworkFile(format!("plug-and-play setup needs {name}")))
                };
                Scheme::PlugPlay {
                    pulses_per_train: setup.pulses_per_train.ok_or_else(|| {
                        Error::NetworkFile("plug-and-play setup needs pulses_per_train".into())
                    })?,
                    storage_line_km: need(setup.storage_line_km, "storage_line_km")?,
                    fiber_index: need(setup.fiber_index, "fiber_index")?,
                }
            }
        };
        let detectors = match setup.detectors {
            1 => DetectorCount::One,
            2 => DetectorCount::Two,
            n => {
                return Err(Error::NetworkFile(format!(
                    "setup: detectors must be 1 or 2, got {n}"
                )))
            }
        };

        let tau_gate_s = match (det_block.tau_gate_us, scheme) {
            (Some(us), _) => us / 1e6,
            // free-running plug&play: gate defaults to the pulse period
            (None, Scheme::PlugPlay { .. }) => 1.0 / setup.pulse_freq_hz,
            (None, Scheme::OneWay) => {
                return Err(Error::NetworkFile(
                    "one-way setups need an explicit detector tau_gate_us".into(),
                ))
            }
        };

        let det = DetectorParams::new(
            det_block.eta_det,
            det_block.dcr_hz,
            det_block.tau_dead_us / 1e6,
            tau_gate_s,
            det_block.visibility,
            det_block.p_after,
        )?;
        let budget = LinkBudget {
            length_km: link.length_km.unwrap(),
            alpha_opt_db: link.loss_db.unwrap(),
            alpha_bob_db: setup.bob_loss_db,
            alpha_alice_db: setup.alice_loss_db,
            pulse_freq_hz: setup.pulse_freq_hz,
            scheme,
            detectors,
        };
        budget.validate()?;
        Ok((det, budget))
    }

    /// Evaluate every link: run the model for physical links, echo direct
    /// rates unchanged.
    pub fn evaluate_links(&self, opts: QberOptions) -> Result<Vec<LinkRateRow>> {
        let protocol = self.protocol_config()?;
        self.links
            .iter()
            .enumerate()
            .map(|(i, link)| {
                if let Some(rate) = link.rate_kbit_s {
                    if rate < 0.0 {
                        return Err(Error::NetworkFile(format!("link {}: negative rate", i + 1)));
                    }
                    return Ok(LinkRateRow {
                        from: link.from.clone(),
                        to: link.to.clone(),
                        length_km: None,
                        loss_db: None,
                        sifted_bit_s: None,
                        qber: None,
                        secret_bit_s: rate * 1e3,
                        insecure: rate == 0.0,
                    });
                }
                let (det, budget) = self.build_link(i)?;
                let perf = link_performance(&det, &budget, &protocol, opts)?;
                Ok(LinkRateRow {
                    from: link.from.clone(),
                    to: link.to.clone(),
                    length_km: link.length_km,
                    loss_db: link.loss_db,
                    sifted_bit_s: Some(perf.r_sift()),
                    qber: Some(perf.qber()),
                    secret_bit_s: perf.r_sec(),
                    insecure: perf.secrecy.insecure || perf.r_sec() <= 0.0,
                })
            })
            .collect()
    }

    /// Secret rates of all links as a [`NetworkSpec`] ready for planning.
    /// Fails when some link yields no secret key at all.
    pub fn network_spec(&self, opts: QberOptions) -> Result<NetworkSpec> {
        let rows = self.evaluate_links(opts)?;
        for row in &rows {
            if row.secret_bit_s <= 0.0 {
                return Err(Error::domain(format!(
                    "link {} -> {} has no secret key rate; the backbone cannot operate",
                    row.from, row.to
                )));
            }
        }
        NetworkSpec::new(
            self.nodes.clone(),
            rows.iter().map(|r| r.secret_bit_s).collect(),
        )
    }

    /// Detector and link-budget parameters of one physical link, e.g. for
    /// intensity sweeps. Errors on direct-rate links.
    pub fn physical_link(&self, index: usize) -> Result<(DetectorParams, LinkBudget)> {
        if index >= self.links.len() {
            return Err(Error::domain(format!(
                "link index {} out of range ({} links)",
                index + 1,
                self.links.len()
            )));
        }
        if self.links[index].is_direct() {
            return Err(Error::domain(format!(
                "link {} has a direct rate, no physical parameters",
                index + 1
            )));
        }
        self.build_link(index)
    }

    /// Resolve a link selector: 1-based index or "From-To" / "From" name.
    pub fn find_link(&self, selector: &str) -> Result<usize> {
        if let Ok(idx) = selector.parse::<usize>() {
            if idx >= 1 && idx <= self.links.len() {
                return Ok(idx - 1);
            }
            return Err(Error::domain(format!(
                "link index {idx} out of range (1..={})",
                self.links.len()
            )));
        }
        let lower = selector.to_lowercase();
        for (i, link) in self.links.iter().enumerate() {
            let pair = format!("{}-{}", link.from, link.to).to_lowercase();
            if pair == lower || link.from.to_lowercase() == lower {
                return Ok(i);
            }
        }
        Err(Error::domain(format!("no link matches '{selector}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_toml() -> String {
        r#"
schema_version = 1
nodes = ["Alpha", "Bravo", "Charlie"]

[protocol]
variant = "two-decoy"
mu = 0.5
nu1 = 0.1
nu2 = 0.01
p_mu = 0.5
p_nu1 = 0.25
f_ec = 1.15

[costs]
alice = 1.0
bob = 2.0
switch = 0.1

[constraints]
locked_full = ["Bravo"]
switch_range = [0, 1]

[detectors.spd]
eta_det = 0.10
dcr_hz = 300.0
tau_dead_us = 5.0
tau_gate_us = 0.0006
visibility = 0.98
p_after = 0.03

[setups.oneway]
pulse_freq_hz = 312.5e6
scheme = "one-way"
detectors = 2
bob_loss_db = 4.0

[[links]]
from = "Alpha"
to = "Bravo"
length_km = 86.8
loss_db = 19.0
detector = "spd"
setup = "oneway"

[[links]]
from = "Bravo"
to = "Charlie"
rate_kbit_s = 2.7
"#
        .to_string()
    }

    #[test]
    fn parse_and_roundtrip() {
        let file = NetworkFile::from_toml(&sample_toml()).unwrap();
        let serialized = file.to_toml().unwrap();
        let reparsed = NetworkFile::from_toml(&serialized).unwrap();
        assert_eq!(file, reparsed);
    }

    #[test]
    fn evaluate_mixed_links() {
        let file = NetworkFile::from_toml(&sample_toml()).unwrap();
        let rows = file.evaluate_links(QberOptions::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].sifted_bit_s.is_some());
        assert!((rows[0].secret_bit_s - 2542.85).abs() < 5.0);
        // direct link echoes its rate
        assert_eq!(rows[1].sifted_bit_s, None);
        assert_eq!(rows[1].secret_bit_s, 2.7e3);

        let spec = file.network_spec(QberOptions::default()).unwrap();
        assert_eq!(spec.len(), 2);
        assert_eq!(spec.node_names, file.nodes);
    }

    #[test]
    fn constraints_resolution() {
        let file = NetworkFile::from_toml(&sample_toml()).unwrap();
        assert_eq!(file.locked_indices(), vec![0]);
        assert_eq!(file.switch_range(), Some((0, 1)));
    }

    #[test]
    fn link_selector() {
        let file = NetworkFile::from_toml(&sample_toml()).unwrap();
        assert_eq!(file.find_link("1").unwrap(), 0);
        assert_eq!(file.find_link("Alpha-Bravo").unwrap(), 0);
        assert_eq!(file.find_link("bravo").unwrap(), 1);
        assert!(file.find_link("3").is_err());
        assert!(file.find_link("nowhere").is_err());
        assert!(file.physical_link(1).is_err());
        assert!(file.physical_link(0).is_ok());
    }

    #[test]
    fn rejects_inconsistent_files() {
        // wrong node order
        let broken = sample_toml().replace("from = \"Bravo\"", "from = \"Charlie\"");
        assert!(NetworkFile::from_toml(&broken).is_err());

        // both direct rate and physical params
        let broken = sample_toml().replace(
            "rate_kbit_s = 2.7",
            "rate_kbit_s = 2.7\nlength_km = 1.0\nloss_db = 1.0\ndetector = \"spd\"\nsetup = \"oneway\"",
        );
        assert!(NetworkFile::from_toml(&broken).is_err());

        // unknown detector reference
        let broken = sample_toml().replace("detector = \"spd\"", "detector = \"ghost\"");
        assert!(NetworkFile::from_toml(&broken).is_err());

        // wrong schema version
        let broken = sample_toml().replace("schema_version = 1", "schema_version = 99");
        assert!(NetworkFile::from_toml(&broken).is_err());

        // locking an edge node
        let broken =
            sample_toml().replace("locked_full = [\"Bravo\"]", "locked_full = [\"Alpha\"]");
        assert!(NetworkFile::from_toml(&broken).is_err());
    }

    #[test]
    fn one_way_requires_gate_window() {
        let broken = sample_toml().replace("tau_gate_us = 0.0006\n", "");
        let file = NetworkFile::from_toml(&broken).unwrap();
        assert!(file.evaluate_links(QberOptions::default()).is_err());
    }
}
