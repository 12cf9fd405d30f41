//! Switch placement and device assignment for backbone networks.
//!
//! A backbone is a chain of `N` links joined by `N - 1` trusted nodes. A
//! trusted node either carries two devices ("full", `F`) or shares a single
//! device between its two links through an optical switch ("switch-based",
//! `S`). Full nodes cut the chain into clusters; inside a cluster the
//! switches force the links to time-share: at any moment either all odd or
//! all even links of the cluster run. With the time split chosen optimally
//! a cluster delivers `R_odd R_even / (R_odd + R_even)` where `R_odd`
//! (`R_even`) is the slowest odd (even) link, and the network delivers the
//! minimum over clusters.
//!
//! Placement is optimized by exhaustive search over configurations, then
//! the cheapest concrete device assignment (Alice/Bob orientation per
//! cluster) realizing a best configuration is selected.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A chain of links with their secret key rates.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    /// Node names, `N + 1` entries.
    pub node_names: Vec<String>,
    /// Per-link secret key rates, `N` entries, any consistent unit.
    pub link_rates: Vec<f64>,
}

impl NetworkSpec {
    pub fn new(node_names: Vec<String>, link_rates: Vec<f64>) -> Result<Self> {
        let spec = Self {
            node_names,
            link_rates,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.link_rates.is_empty() {
            return Err(Error::invalid("network needs at least one link"));
        }
        if self.node_names.len() != self.link_rates.len() + 1 {
            return Err(Error::invalid(format!(
                "{} links need {} node names, got {}",
                self.link_rates.len(),
                self.link_rates.len() + 1,
                self.node_names.len()
            )));
        }
        if self.link_rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::invalid("every link rate must be finite and > 0"));
        }
        let mut names: Vec<&String> = self.node_names.iter().collect();
        names.sort();
        names.dedup();
        if names.len() != self.node_names.len() {
            return Err(Error::invalid("node names must be unique"));
        }
        Ok(())
    }

    /// Number of links.
    pub fn len(&self) -> usize {
        self.link_rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.link_rates.is_empty()
    }

    /// Number of trusted (intermediate) nodes.
    pub fn trusted_nodes(&self) -> usize {
        self.len() - 1
    }
}

/// Kind of one trusted node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeKind {
    /// Two devices, terminates both adjacent links independently.
    Full,
    /// One device shared between the adjacent links via an optical switch.
    Switch,
}

/// Types of all trusted nodes, e.g. `FSSFFS`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Configuration {
    pub nodes: Vec<NodeKind>,
}

impl Configuration {
    pub fn all_full(trusted_nodes: usize) -> Self {
        Self {
            nodes: vec![NodeKind::Full; trusted_nodes],
        }
    }

    pub fn switch_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| **n == NodeKind::Switch)
            .count()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            f.write_str(match n {
                NodeKind::Full => "F",
                NodeKind::Switch => "S",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let nodes = s
            .chars()
            .map(|c| match c {
                'F' | 'f' => Ok(NodeKind::Full),
                'S' | 's' => Ok(NodeKind::Switch),
                other => Err(Error::invalid(format!(
                    "configuration may contain only F and S, got '{other}'"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { nodes })
    }
}

/// Partition of the link chain into switch-connected clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSplit {
    /// Link index ranges, covering `0..N` without gaps.
    pub clusters: Vec<Range<usize>>,
}

/// Split links into clusters: a new cluster starts after every full node.
pub fn cluster_split(x: &Configuration) -> ClusterSplit {
    let n_links = x.nodes.len() + 1;
    let mut clusters = Vec::new();
    let mut start = 0usize;
    for (i, kind) in x.nodes.iter().enumerate() {
        if *kind == NodeKind::Full {
            clusters.push(start..i + 1);
            start = i + 1;
        }
    }
    clusters.push(start..n_links);
    ClusterSplit { clusters }
}

/// Best achievable rate of one cluster and the optimal fraction of time
/// spent in odd mode.
///
/// A single link needs no time sharing. Otherwise the cluster alternates
/// between its odd and even links and the optimum equalizes both sides:
/// `R = R_odd R_even / (R_odd + R_even)` at `p = R_even / (R_odd + R_even)`.
pub fn subgroup_rate(rates: &[f64]) -> (f64, f64) {
    debug_assert!(!rates.is_empty(), "cluster must contain at least one link");
    if rates.len() == 1 {
        return (rates[0], 1.0);
    }
    let mut r_odd = f64::INFINITY;
    let mut r_even = f64::INFINITY;
    for (i, &r) in rates.iter().enumerate() {
        // 1-based position within the cluster
        if i % 2 == 0 {
            r_odd = r_odd.min(r);
        } else {
            r_even = r_even.min(r);
        }
    }
    (r_odd * r_even / (r_odd + r_even), r_even / (r_odd + r_even))
}

/// End-to-end rate of the network under configuration `x`: the minimum of
/// the cluster rates. With all nodes full this is the slowest link.
pub fn effective_rate(net: &NetworkSpec, x: &Configuration) -> f64 {
    effective_rate_with_overhead(net, x, 0.0)
}

/// [`effective_rate`] with a switching duty-cycle overhead: every cluster
/// that actually time-shares (two or more links) loses the given fraction
/// of its rate.
pub fn effective_rate_with_overhead(net: &NetworkSpec, x: &Configuration, overhead: f64) -> f64 {
    debug_assert_eq!(
        x.nodes.len() + 1,
        net.len(),
        "configuration length mismatch"
    );
    let split = cluster_split(x);
    let mut rate = f64::INFINITY;
    for cluster in &split.clusters {
        let (mut r, _) = subgroup_rate(&net.link_rates[cluster.clone()]);
        if cluster.len() > 1 {
            r *= 1.0 - overhead;
        }
        rate = rate.min(r);
    }
    rate
}

const MAX_TRUSTED_NODES: usize = 30;

/// All configurations with exactly `k` switches that maximize the effective
/// rate, together with that rate. `locks` lists trusted-node indices that
/// must stay full. Configurations come out in lexicographic order (`F` < `S`).
pub fn best_configurations(
    net: &NetworkSpec,
    k_switches: usize,
    locks: &[usize],
    overhead: f64,
) -> Result<(Vec<Configuration>, f64)> {
    net.validate()?;
    if !(0.0..1.0).contains(&overhead) {
        return Err(Error::invalid("switch overhead must be in [0, 1)"));
    }
    let n = net.trusted_nodes();
    if n > MAX_TRUSTED_NODES {
        return Err(Error::domain(format!(
            "exhaustive search supports at most {MAX_TRUSTED_NODES} trusted nodes, got {n}"
        )));
    }
    let mut lock_mask = 0u32;
    for &i in locks {
        if i >= n {
            return Err(Error::invalid(format!(
                "locked node index {i} out of range (have {n} trusted nodes)"
            )));
        }
        lock_mask |= 1 << i;
    }
    let available = n - lock_mask.count_ones() as usize;
    if k_switches > available {
        return Err(Error::domain(format!(
            "cannot place {k_switches} switches: only {available} unlocked trusted nodes"
        )));
    }

    let mut best_rate = f64::NEG_INFINITY;
    let mut best = Vec::new();
    for mask in masks_with_popcount(n, k_switches) {
        if mask & lock_mask != 0 {
            continue;
        }
        let config = config_from_mask(mask, n);
        let rate = effective_rate_with_overhead(net, &config, overhead);
        if rate > best_rate {
            best_rate = rate;
            best.clear();
            best.push(config);
        } else if rate == best_rate {
            best.push(config);
        }
    }
    best.sort();
    Ok((best, best_rate))
}

fn config_from_mask(mask: u32, n: usize) -> Configuration {
    Configuration {
        nodes: (0..n)
            .map(|i| {
                if mask & (1 << i) != 0 {
                    NodeKind::Switch
                } else {
                    NodeKind::Full
                }
            })
            .collect(),
    }
}

/// Masks of width `n` with exactly `k` bits set, ascending.
fn masks_with_popcount(n: usize, k: usize) -> impl Iterator<Item = u32> {
    let limit = 1u64 << n;
    let mut current = if k == 0 { 0u64 } else { (1u64 << k) - 1 };
    let mut done = false;
    std::iter::from_fn(move || {
        if done || current >= limit {
            return None;
        }
        let out = current as u32;
        if current == 0 {
            done = true;
        } else {
            // Gosper's hack: next integer with the same popcount
            let c = current & current.wrapping_neg();
            let r = current + c;
            current = (((r ^ current) >> 2) / c) | r;
        }
        Some(out)
    })
}

/// Device role at one network position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Device {
    Alice,
    Bob,
}

impl Device {
    fn flip(self) -> Self {
        match self {
            Device::Alice => Device::Bob,
            Device::Bob => Device::Alice,
        }
    }

    fn letter(self) -> char {
        match self {
            Device::Alice => 'A',
            Device::Bob => 'B',
        }
    }
}

/// Devices installed at one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeAssignment {
    /// Edge node, one device.
    Edge(Device),
    /// Switch-based trusted node, one device shared by both links.
    Switch(Device),
    /// Full trusted node, one device per adjacent link.
    Full(Device, Device),
}

impl fmt::Display for NodeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeAssignment::Edge(d) => write!(f, "{}", d.letter()),
            NodeAssignment::Switch(d) => write!(f, "S{}", d.letter()),
            NodeAssignment::Full(l, r) => write!(f, "{}{}", l.letter(), r.letter()),
        }
    }
}

/// Concrete device placement realizing a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Implementation {
    /// One entry per network node (edges included).
    pub nodes: Vec<NodeAssignment>,
}

impl Implementation {
    pub fn n_alice(&self) -> usize {
        self.count(Device::Alice)
    }

    pub fn n_bob(&self) -> usize {
        self.count(Device::Bob)
    }

    pub fn n_switch(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, NodeAssignment::Switch(_)))
            .count()
    }

    pub fn n_total(&self) -> usize {
        self.n_alice() + self.n_bob()
    }

    fn count(&self, device: Device) -> usize {
        self.nodes
            .iter()
            .map(|n| match n {
                NodeAssignment::Edge(d) | NodeAssignment::Switch(d) => usize::from(*d == device),
                NodeAssignment::Full(l, r) => usize::from(*l == device) + usize::from(*r == device),
            })
            .sum()
    }

    /// Equipment cost under the given cost model.
    pub fn cost(&self, costs: &CostModel) -> f64 {
        self.n_alice() as f64 * costs.alice
            + self.n_bob() as f64 * costs.bob
            + self.n_switch() as f64 * costs.switch
    }

    /// Check that every link ends in exactly one Alice-role and one
    /// Bob-role device.
    pub fn validate(&self) -> Result<()> {
        let n_links = self.nodes.len() - 1;
        for link in 0..n_links {
            let left = self.device_towards(link, true);
            let right = self.device_towards(link, false);
            if left == right {
                return Err(Error::invalid(format!(
                    "link {} has two {:?} ends",
                    link + 1,
                    left
                )));
            }
        }
        Ok(())
    }

    fn device_towards(&self, link: usize, left_end: bool) -> Device {
        let node = if left_end { link } else { link + 1 };
        match self.nodes[node] {
            NodeAssignment::Edge(d) | NodeAssignment::Switch(d) => d,
            NodeAssignment::Full(l, r) => {
                if left_end {
                    r
                } else {
                    l
                }
            }
        }
    }
}

impl fmt::Display for Implementation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, node) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{node}")?;
        }
        Ok(())
    }
}

/// Per-module-type equipment costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub alice: f64,
    pub bob: f64,
    pub switch: f64,
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        if self.alice < 0.0 || self.bob < 0.0 || self.switch < 0.0 {
            return Err(Error::invalid("costs must be non-negative"));
        }
        Ok(())
    }
}

const MAX_ENUMERATED_CLUSTERS: usize = 24;

/// Build the assignment for given per-cluster orientations: the device at
/// the left end of each cluster, alternating through the switch chain.
fn build_implementation(split: &ClusterSplit, orientations: &[Device]) -> Implementation {
    let n_links = split.clusters.last().unwrap().end;
    let mut left_of_node: Vec<Option<Device>> = vec![None; n_links + 1];
    let mut right_of_node: Vec<Option<Device>> = vec![None; n_links + 1];
    let mut switch_node = vec![false; n_links + 1];

    for (cluster, &start_device) in split.clusters.iter().zip(orientations) {
        let mut device = start_device;
        for node in cluster.start..=cluster.end {
            if node == cluster.start {
                right_of_node[node] = Some(device);
            } else if node == cluster.end {
                left_of_node[node] = Some(device);
            } else {
                switch_node[node] = true;
                left_of_node[node] = Some(device);
                right_of_node[node] = Some(device);
            }
            device = device.flip();
        }
    }

    let nodes = (0..=n_links)
        .map(|node| {
            if node == 0 {
                NodeAssignment::Edge(right_of_node[node].unwrap())
            } else if node == n_links {
                NodeAssignment::Edge(left_of_node[node].unwrap())
            } else if switch_node[node] {
                NodeAssignment::Switch(left_of_node[node].unwrap())
            } else {
                NodeAssignment::Full(left_of_node[node].unwrap(), right_of_node[node].unwrap())
            }
        })
        .collect();
    Implementation { nodes }
}

/// All device assignments realizing a configuration: one independent
/// Alice/Bob orientation choice per cluster.
pub fn enumerate_implementations(x: &Configuration) -> Result<Vec<Implementation>> {
    let split = cluster_split(x);
    let m = split.clusters.len();
    if m > MAX_ENUMERATED_CLUSTERS {
        return Err(Error::domain(format!(
            "implementation enumeration supports at most {MAX_ENUMERATED_CLUSTERS} clusters, got {m}"
        )));
    }
    let mut out = Vec::with_capacity(1 << m);
    for mask in 0u32..(1 << m) {
        let orientations: Vec<Device> = (0..m)
            .map(|c| {
                if mask & (1 << c) != 0 {
                    Device::Bob
                } else {
                    Device::Alice
                }
            })
            .collect();
        out.push(build_implementation(&split, &orientations));
    }
    out.sort_by_key(|imp| imp.to_string());
    out.dedup();
    Ok(out)
}

/// Cheapest assignment realizing a configuration.
///
/// Cluster orientations are independent, so each cluster is chosen locally:
/// minimum cost, then fewer Bob modules, then the lexicographically smaller
/// chain (Alice first).
pub fn cheapest_implementation(
    x: &Configuration,
    costs: &CostModel,
) -> Result<(Implementation, f64)> {
    costs.validate()?;
    let split = cluster_split(x);
    let orientations: Vec<Device> = split
        .clusters
        .iter()
        .map(|cluster| {
            let slots = cluster.len() + 1;
            let majority = slots.div_ceil(2) as f64;
            let minority = (slots / 2) as f64;
            // starting with Alice puts Alice in the majority
            let cost_a = majority * costs.alice + minority * costs.bob;
            let cost_b = majority * costs.bob + minority * costs.alice;
            if cost_a < cost_b {
                Device::Alice
            } else if cost_b < cost_a {
                Device::Bob
            } else {
                // equal cost implies equal counts; prefer the Alice-first chain
                Device::Alice
            }
        })
        .collect();
    let implementation = build_implementation(&split, &orientations);
    debug_assert!(implementation.validate().is_ok());
    let cost = implementation.cost(costs);
    Ok((implementation, cost))
}

/// One row of a deployment plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanRow {
    pub k_switches: usize,
    /// Maximal effective rate with `k_switches` switches.
    pub rate: f64,
    /// Every configuration achieving that rate, lexicographically ordered.
    pub configurations: Vec<Configuration>,
    /// The configuration realizing the cheapest implementation.
    pub chosen: Configuration,
    pub implementation: Implementation,
    pub n_alice: usize,
    pub n_bob: usize,
    pub n_switch: usize,
    pub n_total: usize,
    pub cost: f64,
}

/// Effective rate of the pair of links around one trusted node if a single
/// switch were installed there.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRate {
    pub node_index: usize,
    pub node_name: String,
    pub rate: f64,
}

/// Rate/cost tradeoff report over a range of switch counts.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanReport {
    pub rows: Vec<PlanRow>,
    /// Single-switch pair rates per trusted node.
    pub pair_rates: Vec<PairRate>,
}

/// Compute the deployment plan: for every switch count in `k_range`, the
/// maximal effective rate, all optimal configurations, and the cheapest
/// implementation among them.
pub fn plan(
    net: &NetworkSpec,
    costs: &CostModel,
    k_range: impl IntoIterator<Item = usize>,
    locks: &[usize],
    overhead: f64,
) -> Result<PlanReport> {
    net.validate()?;
    costs.validate()?;

    let mut rows = Vec::new();
    for k in k_range {
        let (configs, rate) = best_configurations(net, k, locks, overhead)?;
        let mut chosen: Option<(f64, usize, Configuration, Implementation)> = None;
        for config in &configs {
            let (implementation, cost) = cheapest_implementation(config, costs)?;
            let candidate = (cost, implementation.n_bob(), config.clone(), implementation);
            let better = match &chosen {
                None => true,
                Some((c, nb, cfg, imp)) => {
                    (
                        candidate.0,
                        candidate.1,
                        &candidate.2,
                        candidate.3.to_string(),
                    ) < (*c, *nb, cfg, imp.to_string())
                }
            };
            if better {
                chosen = Some(candidate);
            }
        }
        let (cost, _, chosen_config, implementation) = chosen.expect("at least one configuration");
        rows.push(PlanRow {
            k_switches: k,
            rate,
            configurations: configs,
            chosen: chosen_config,
            n_alice: implementation.n_alice(),
            n_bob: implementation.n_bob(),
            n_switch: implementation.n_switch(),
            n_total: implementation.n_total(),
            cost,
            implementation,
        });
    }

    let pair_rates = (0..net.trusted_nodes())
        .map(|i| {
            let (rate, _) = subgroup_rate(&net.link_rates[i..i + 2]);
            PairRate {
                node_index: i,
                node_name: net.node_names[i + 1].clone(),
                rate: rate * (1.0 - overhead),
            }
        })
        .collect();

    Ok(PlanReport { rows, pair_rates })
}
