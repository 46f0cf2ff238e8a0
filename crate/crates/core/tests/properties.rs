//! Property tests for the invariants that must hold on arbitrary inputs,
//! not just the seeded cases the unit tests pin down.

use std::collections::BTreeMap;

use proptest::prelude::*;

use mrtime_core::eximlog;
use mrtime_core::linalg::Matrix;
use mrtime_core::workloads::{
    merge_counts, shuffle, split_input, wordcount_map, wordcount_reduce, KeyValue,
};

proptest! {
    #[test]
    fn split_concat_identity(input in proptest::collection::vec(any::<u8>(), 0..600), mappers in 1u32..9) {
        let chunks = split_input(&input, mappers);
        prop_assert_eq!(chunks.len(), mappers as usize);
        let joined: Vec<u8> = chunks.concat();
        prop_assert_eq!(joined, input);
    }

    #[test]
    fn split_is_line_aligned(input in proptest::collection::vec(any::<u8>(), 0..600), mappers in 1u32..9) {
        let chunks = split_input(&input, mappers);
        for (i, chunk) in chunks.iter().enumerate() {
            let followed_by_content = chunks[i + 1..].iter().any(|c| !c.is_empty());
            if !chunk.is_empty() && followed_by_content {
                prop_assert_eq!(chunk[chunk.len() - 1], b'\n');
            }
        }
    }

    #[test]
    fn parse_line_is_total_and_preserves_raw(line in proptest::collection::vec(any::<u8>(), 0..200)) {
        let parsed = eximlog::parse_line(&line);
        prop_assert_eq!(parsed.raw(), &line[..]);
        if let Some(id) = parsed.message_id() {
            prop_assert!(eximlog::MessageId::parse(id.as_bytes()).is_some());
        }
    }

    #[test]
    fn transpose_involution(rows in 1usize..8, cols in 1usize..8, seed in any::<u64>()) {
        let mut rng = mrtime_core::rng::SplitMix64::new(seed);
        let data: Vec<f64> = (0..rows * cols).map(|_| rng.next_f64() * 10.0 - 5.0).collect();
        let m = Matrix::new(rows, cols, data).unwrap();
        prop_assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn wordcount_equals_sequential_baseline(
        input in proptest::collection::vec(any::<u8>(), 0..400),
        mappers in 1u32..5,
        reducers in 1u32..5,
    ) {
        let outputs: Vec<Vec<KeyValue>> =
            split_input(&input, mappers).into_iter().map(wordcount_map).collect();
        let emitted: usize = outputs.iter().map(Vec::len).sum();
        let partitions = shuffle(outputs, reducers);
        let consumed: usize = partitions.iter().map(Vec::len).sum();
        prop_assert_eq!(emitted, consumed);
        let counts = merge_counts(partitions.iter().map(|p| wordcount_reduce(p)).collect());

        let mut baseline: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
        for token in input.split(|b| b.is_ascii_whitespace()).filter(|t| !t.is_empty()) {
            *baseline.entry(token.to_vec()).or_insert(0) += 1;
        }
        prop_assert_eq!(counts, baseline);
    }
}
