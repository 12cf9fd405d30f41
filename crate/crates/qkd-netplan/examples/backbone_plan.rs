//! Plan switch placement for a backbone given per-link secret key rates:
//! for each switch count, the best effective rate and the cheapest
//! Alice/Bob/switch assignment realizing it.
//!
//! ```bash
//! cargo run -p qkd-netplan --example backbone_plan
//! ```

use qkd_netplan::backbone::{plan, CostModel, NetworkSpec};
use qkd_netplan::report::plan_table;

fn main() -> qkd_netplan::Result<()> {
    // per-link secret key rates, bit/s
    let rates_kbit = [2.7, 1.4, 5.9, 2.8, 1.0, 1.5, 4.8];
    let net = NetworkSpec::new(
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
        rates_kbit.iter().map(|r| r * 1e3).collect(),
    )?;

    // a receiver module costs twice a transmitter module here
    let costs = CostModel {
        alice: 1.0,
        bob: 2.0,
        switch: 0.1,
    };

    let report = plan(&net, &costs, 0..=net.trusted_nodes(), &[], 0.0)?;
    print!("{}", plan_table(&report));

    println!();
    let base = &report.rows[0];
    for row in &report.rows {
        if row.k_switches == 0 {
            continue;
        }
        println!(
            "k={}: {:.0}% fewer modules, {:.0}% rate loss",
            row.k_switches,
            100.0 * (base.n_total - row.n_total) as f64 / base.n_total as f64,
            100.0 * (base.rate - row.rate) / base.rate
        );
    }
    Ok(())
}
