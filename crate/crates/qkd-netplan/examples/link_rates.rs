//! Evaluate every link of the bundled Moscow-Udomlya backbone: sifted key
//! rate, QBER and the secret-key-rate lower bound per fiber segment.
//!
//! ```bash
//! cargo run -p qkd-netplan --example link_rates
//! ```

use std::path::Path;

use qkd_netplan::report::link_rate_table;
use qkd_netplan::{NetworkFile, QberOptions};

fn main() -> qkd_netplan::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/moscow_udomlya.toml");
    let file = NetworkFile::load(&path)?;

    let rows = file.evaluate_links(QberOptions::default())?;
    print!("{}", link_rate_table(&rows));

    let bottleneck = rows
        .iter()
        .min_by(|a, b| a.secret_bit_s.total_cmp(&b.secret_bit_s))
        .unwrap();
    println!(
        "\nBottleneck: {} -> {} at {:.2} kbit/s; switches next to it would cut \
         the end-to-end rate.",
        bottleneck.from,
        bottleneck.to,
        bottleneck.secret_bit_s / 1e3
    );
    Ok(())
}
