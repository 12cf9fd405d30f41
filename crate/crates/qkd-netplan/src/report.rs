//! Plain-text and CSV rendering of computed results.
//!
//! Output is byte-stable for identical inputs: no timestamps, fixed decimal
//! places, locale-independent formatting. Rates are printed in kbit/s.

use std::fmt::Write as _;

use crate::backbone::PlanReport;
use crate::blocks::BlockQberSeries;
use crate::device::SweepPoint;
use crate::netfile::LinkRateRow;

/// Output format selector shared by all commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
}

fn kbit(rate_bit_s: f64) -> f64 {
    rate_bit_s / 1e3
}

fn row_status(row: &LinkRateRow) -> &'static str {
    if row.insecure {
        "INSECURE"
    } else if row.sifted_bit_s.is_none() {
        "direct"
    } else {
        "ok"
    }
}

pub fn link_rate_table(rows: &[LinkRateRow]) -> String {
    let name_width = rows
        .iter()
        .map(|r| r.from.len() + r.to.len() + 1)
        .chain(std::iter::once("Link".len()))
        .max()
        .unwrap_or(4);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_width$}  {:>11}  {:>9}  {:>15}  {:>15}  {:>8}  Status",
        "Link", "Length [km]", "Loss [dB]", "Sifted [kbit/s]", "Secret [kbit/s]", "QBER [%]",
    );
    for row in rows {
        let name = format!("{}-{}", row.from, row.to);
        let opt = |v: Option<f64>, prec: usize| match v {
            Some(x) => format!("{x:.prec$}"),
            None => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{:<name_width$}  {:>11}  {:>9}  {:>15}  {:>15}  {:>8}  {}",
            name,
            opt(row.length_km, 1),
            opt(row.loss_db, 1),
            opt(row.sifted_bit_s.map(kbit), 2),
            format!("{:.2}", kbit(row.secret_bit_s)),
            opt(row.qber.map(|q| q * 100.0), 2),
            row_status(row),
        );
    }
    out
}

pub fn link_rate_csv(rows: &[LinkRateRow]) -> String {
    let mut out =
        String::from("link,length_km,loss_db,sifted_kbit_s,secret_kbit_s,qber_percent,status\n");
    for row in rows {
        let opt = |v: Option<f64>, prec: usize| match v {
            Some(x) => format!("{x:.prec$}"),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "{}-{},{},{},{},{:.3},{},{}",
            row.from,
            row.to,
            opt(row.length_km, 1),
            opt(row.loss_db, 1),
            opt(row.sifted_bit_s.map(kbit), 3),
            kbit(row.secret_bit_s),
            opt(row.qber.map(|q| q * 100.0), 2),
            row_status(row),
        );
    }
    out
}

pub fn plan_table(report: &PlanReport) -> String {
    let cfg_width = report
        .rows
        .iter()
        .map(|r| r.chosen.to_string().len())
        .chain(std::iter::once("Config".len()))
        .max()
        .unwrap_or(6);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>2}  {:>14}  {:>4}  {:>4}  {:>5}  {:>8}  {:<cfg_width$}  Implementation",
        "k", "R_eff [kbit/s]", "N_A", "N_B", "N_tot", "Cost", "Config",
    );
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{:>2}  {:>14.2}  {:>4}  {:>4}  {:>5}  {:>8.2}  {:<cfg_width$}  {}",
            row.k_switches,
            kbit(row.rate),
            row.n_alice,
            row.n_bob,
            row.n_total,
            row.cost,
            row.chosen.to_string(),
            row.implementation,
        );
    }
    if !report.pair_rates.is_empty() {
        let name_width = report
            .pair_rates
            .iter()
            .map(|p| p.node_name.len())
            .max()
            .unwrap();
        let _ = writeln!(out);
        let _ = writeln!(out, "Effective pair rate with a single switch [kbit/s]:");
        for pair in &report.pair_rates {
            let _ = writeln!(
                out,
                "  {:<name_width$}  {:>8.2}",
                pair.node_name,
                kbit(pair.rate)
            );
        }
    }
    out
}

pub fn plan_csv(report: &PlanReport) -> String {
    let mut out =
        String::from("k,rate_kbit_s,n_alice,n_bob,n_total,cost,configuration,implementation\n");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{:.3},{},{},{},{:.2},{},{}",
            row.k_switches,
            kbit(row.rate),
            row.n_alice,
            row.n_bob,
            row.n_total,
            row.cost,
            row.chosen,
            row.implementation,
        );
    }
    out
}

/// Intensity sweep as CSV. The optimized column appears only when a
/// candidate set was supplied.
pub fn sweep_csv(sweep: &[SweepPoint], with_optimized: bool) -> String {
    let mut out = String::new();
    if with_optimized {
        out.push_str("mu,r_sec_fixed_kbit_s,r_sec_opt_kbit_s\n");
    } else {
        out.push_str("mu,r_sec_fixed_kbit_s\n");
    }
    for p in sweep {
        if with_optimized {
            let _ = writeln!(
                out,
                "{:.4},{:.4},{:.4}",
                p.mu,
                kbit(p.r_sec_fixed),
                kbit(p.r_sec_optimized)
            );
        } else {
            let _ = writeln!(out, "{:.4},{:.4}", p.mu, kbit(p.r_sec_fixed));
        }
    }
    out
}

pub fn block_qber_csv(series: &BlockQberSeries) -> String {
    let mut out = String::from("block,qber\n");
    for (i, q) in series.series.iter().enumerate() {
        let _ = writeln!(out, "{},{:.6}", i + 1, q);
    }
    out
}

pub fn block_qber_table(series: &BlockQberSeries) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "blocks: {}  block size: {} bytes",
        series.series.len(),
        series.block_size_bytes
    );
    let _ = writeln!(
        out,
        "mean QBER: {:.6}  max QBER: {:.6}",
        series.mean(),
        series.max()
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "{:>6}  {:>9}", "block", "QBER");
    for (i, q) in series.series.iter().enumerate() {
        let _ = writeln!(out, "{:>6}  {:>9.6}", i + 1, q);
    }
    out
}
