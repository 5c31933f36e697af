//! Seeded instance generation.
//!
//! Each quantity class draws from its own ChaCha8 stream of the cell seed,
//! so changing how many values one class needs leaves the others intact:
//!
//! | stream | quantity |
//! |--------|----------|
//! | 1 | link capacities, one per link in link order |
//! | 2 | item sizes, one per item |
//! | 3 | storage unit costs, one per safe DC in ascending id order |
//! | 4 | storage capacities, one per safe DC in ascending id order |

use anyhow::{bail, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{IntRange, ScenarioConfig};
use crate::netmodel::{DcInfo, Instance, InstanceParams, Network};

pub const STREAM_LINK_CAPACITY: u64 = 1;
pub const STREAM_ITEM_SIZE: u64 = 2;
pub const STREAM_STORAGE_COST: u64 = 3;
pub const STREAM_STORAGE_CAPACITY: u64 = 4;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn draw(rng: &mut ChaCha8Rng, r: IntRange) -> u64 {
    rng.gen_range(r.lo..=r.hi)
}

/// Storage capacities: each uniform in `[max size, 2 * total / |safe|]`,
/// then scaled up just enough that their sum exceeds `total` when needed.
pub fn draw_storage(rng: &mut ChaCha8Rng, sizes: &[u64], sites: usize) -> Vec<u64> {
    let total: u64 = sizes.iter().sum();
    let lo = sizes.iter().copied().max().unwrap_or(0);
    let hi = (2 * total / sites as u64).max(lo);
    let mut caps: Vec<u64> = (0..sites).map(|_| rng.gen_range(lo..=hi)).collect();
    let sum: u64 = caps.iter().sum();
    if sum <= total {
        if sum == 0 {
            caps.iter_mut().for_each(|c| *c = total / sites as u64 + 1);
        } else {
            let target = total + 1;
            for c in &mut caps {
                *c = (*c * target).div_ceil(sum);
            }
        }
    }
    caps
}

/// Draws one instance of the campaign with `num_items` items, using the
/// first warning time of the configuration. Values already present in the
/// topology are kept; the draws are made regardless.
pub fn generate_instance(
    config: &ScenarioConfig,
    network: &Network,
    num_items: usize,
    seed: u64,
) -> anyhow::Result<Instance> {
    config.check()?;
    for &v in config.safe.iter().chain([&config.affected]) {
        if !network.is_dc(v) {
            bail!("node {v} is not a data center of the topology");
        }
    }

    let mut rng = stream(seed, STREAM_LINK_CAPACITY);
    let caps: Vec<u32> = network
        .links()
        .iter()
        .map(|l| {
            let c = draw(&mut rng, config.link_capacity) as u32;
            l.capacity.unwrap_or(c)
        })
        .collect();
    let mut net = network.with_capacities(&caps);

    let mut rng = stream(seed, STREAM_ITEM_SIZE);
    let sizes: Vec<u64> = (0..num_items)
        .map(|_| draw(&mut rng, config.item_size))
        .collect();

    let mut rng = stream(seed, STREAM_STORAGE_COST);
    let costs: Vec<u64> = config
        .safe
        .iter()
        .map(|_| draw(&mut rng, config.storage_cost))
        .collect();

    let mut rng = stream(seed, STREAM_STORAGE_CAPACITY);
    let storage = draw_storage(&mut rng, &sizes, config.safe.len());

    for ((&v, &w), &s) in config.safe.iter().zip(&costs).zip(&storage) {
        let old = *net.dc(v).context("safe DC")?;
        net = net.with_dc(
            v,
            DcInfo {
                storage_capacity: Some(old.storage_capacity.unwrap_or(s)),
                storage_unit_cost: Some(old.storage_unit_cost.unwrap_or(w)),
            },
        );
    }

    let epsilon1 = *config.epsilon1.first().context("no warning time configured")?;
    Ok(Instance::generate_paths(
        net,
        config.affected,
        config.safe.clone(),
        &sizes,
        InstanceParams {
            epsilon1,
            pn: config.pn,
            vn: config.vn,
            lambda: config.lambda,
            max_hops: config.max_hops,
        },
    ))
}
