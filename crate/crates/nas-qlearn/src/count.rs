//! Exact search-space counting.

use std::collections::HashMap;

use crate::mdp::NasConfig;
use crate::Result;

/// Exact number of distinct terminating trajectories the MDP admits,
/// computed by dynamic programming over (layer index, pooling permission,
/// signal length) equivalence classes — everything the legal-action set
/// depends on.
pub fn count_search_space(config: &NasConfig) -> Result<u128> {
    config.validate()?;
    let n_conv = (config.filter_counts.len() * config.filter_sizes.len()) as u128;
    let mut memo: HashMap<(usize, bool, usize), u128> = HashMap::new();
    // A convolution first move neither changes the length nor the flag, so
    // all first moves share one completion count.
    Ok(n_conv * completions(1, true, config.input_length, config, n_conv, &mut memo))
}

fn completions(
    layer: usize,
    pooling_allowed: bool,
    length: usize,
    config: &NasConfig,
    n_conv: u128,
    memo: &mut HashMap<(usize, bool, usize), u128>,
) -> u128 {
    if layer >= config.max_layers {
        return 1; // forced GAP
    }
    if let Some(&cached) = memo.get(&(layer, pooling_allowed, length)) {
        return cached;
    }
    // Choosing GAP ends the trajectory; convolutions preserve the class.
    let mut total = 1 + n_conv * completions(layer + 1, pooling_allowed, length, config, n_conv, memo);
    if pooling_allowed {
        for &pool_size in &config.pool_sizes {
            if length >= pool_size {
                let new_length = length / pool_size;
                let next_allowed = new_length >= config.min_length;
                total += completions(layer + 1, next_allowed, new_length, config, n_conv, memo);
            }
        }
    }
    memo.insert((layer, pooling_allowed, length), total);
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{legal_actions, transition, NasState, Step};

    /// Exhaustive enumeration oracle: walk every legal action sequence.
    fn brute_force(config: &NasConfig) -> u128 {
        fn recurse(state: &NasState, config: &NasConfig) -> u128 {
            let mut count = 0;
            for action in legal_actions(state, config) {
                match transition(state, action, config).unwrap() {
                    Step::Finished(_) => count += 1,
                    Step::Continue(next) => count += recurse(&next, config),
                }
            }
            count
        }
        recurse(&NasState::initial(config), config)
    }

    #[test]
    fn dp_matches_enumeration_for_small_caps() {
        for max_layers in 2..=4 {
            let mut c = NasConfig::paper_default(100);
            c.max_layers = max_layers;
            assert_eq!(
                count_search_space(&c).unwrap(),
                brute_force(&c),
                "L = {max_layers}"
            );
        }
        // Also with a length that exercises the permission toggle early.
        for max_layers in 2..=4 {
            let mut c = NasConfig::paper_default(20);
            c.max_layers = max_layers;
            assert_eq!(count_search_space(&c).unwrap(), brute_force(&c), "N=20, L={max_layers}");
        }
    }

    #[test]
    fn paper_config_count_lies_in_published_bounds() {
        let c = NasConfig::paper_default(100);
        let count = count_search_space(&c).unwrap();
        // Roughly between 8^8 and 11^8 networks.
        assert!(
            (16_777_216..=214_358_881).contains(&count),
            "count {count} outside [8^8, 11^8]"
        );
    }

    #[test]
    fn one_layer_menus_count_by_hand() {
        // L = 2, single conv option, no pools fitting: trajectories are
        // C,GAP and C,C,GAP and C,P,GAP when the pool fits.
        let c = NasConfig {
            max_layers: 2,
            min_length: 8,
            input_length: 3,
            filter_counts: vec![8],
            filter_sizes: vec![3],
            pool_sizes: vec![4],
            ..NasConfig::paper_default(3)
        };
        // Pool of 4 never fits a length-3 signal: C,GAP + C,C,GAP.
        assert_eq!(count_search_space(&c).unwrap(), 2);

        let mut c4 = c.clone();
        c4.input_length = 4;
        // Now C,P4,GAP joins in.
        assert_eq!(count_search_space(&c4).unwrap(), 3);
    }
}
