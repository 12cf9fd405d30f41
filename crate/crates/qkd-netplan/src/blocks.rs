//! Block-wise QBER monitoring of measured key material.
//!
//! Two sifted-key byte streams are compared block by block; each block's
//! QBER is the fraction of mismatched bits. This is the standard way to
//! watch error-rate drift over a running key-generation session.

use crate::error::{Error, Result};

/// Per-block QBER series.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockQberSeries {
    pub block_size_bytes: usize,
    /// Mismatch fraction per block, in input order. The final block may
    /// cover fewer bytes when the key length is not a multiple of the
    /// block size.
    pub series: Vec<f64>,
}

impl BlockQberSeries {
    /// Unweighted mean over blocks.
    pub fn mean(&self) -> f64 {
        if self.series.is_empty() {
            return 0.0;
        }
        self.series.iter().sum::<f64>() / self.series.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.series.iter().copied().fold(0.0, f64::max)
    }
}

/// Split the two key streams into blocks and compute each block's QBER.
pub fn block_qber(alice: &[u8], bob: &[u8], block_size_bytes: usize) -> Result<BlockQberSeries> {
    if block_size_bytes == 0 {
        return Err(Error::invalid("block size must be > 0"));
    }
    if alice.len() != bob.len() {
        return Err(Error::domain(format!(
            "key length mismatch: {} vs {} bytes",
            alice.len(),
            bob.len()
        )));
    }
    if alice.is_empty() {
        return Err(Error::domain("empty key material"));
    }

    let series = alice
        .chunks(block_size_bytes)
        .zip(bob.chunks(block_size_bytes))
        .map(|(a, b)| {
            let mismatched: u32 = a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (x ^ y).count_ones())
                .sum();
            mismatched as f64 / (8 * a.len()) as f64
        })
        .collect();

    Ok(BlockQberSeries {
        block_size_bytes,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_streams_give_zero_series() {
        let key = vec![0xA7u8; 12_000];
        let s = block_qber(&key, &key, 5000).unwrap();
        assert_eq!(s.series.len(), 3); // 5000 + 5000 + 2000
        assert!(s.series.iter().all(|q| *q == 0.0));
        assert_eq!(s.mean(), 0.0);
    }

    #[test]
    fn complementary_streams_give_all_ones() {
        let alice = vec![0x55u8; 10_000];
        let bob = vec![0xAAu8; 10_000];
        let s = block_qber(&alice, &bob, 5000).unwrap();
        assert_eq!(s.series, vec![1.0, 1.0]);
        assert_eq!(s.max(), 1.0);
    }

    #[test]
    fn single_flipped_bit_is_counted_once() {
        let alice = vec![0u8; 5000];
        let mut bob = alice.clone();
        bob[1234] ^= 0x10;
        let s = block_qber(&alice, &bob, 5000).unwrap();
        assert_eq!(s.series.len(), 1);
        assert_eq!(s.series[0], 1.0 / 40_000.0);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        assert!(block_qber(&[0u8; 10], &[0u8; 11], 5).is_err());
        assert!(block_qber(&[0u8; 10], &[0u8; 10], 0).is_err());
        assert!(block_qber(&[], &[], 5).is_err());
    }
}
