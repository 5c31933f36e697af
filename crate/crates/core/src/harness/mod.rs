//! Seeded scenarios, experiment campaigns and CSV output.

mod config;
mod experiment;
mod generate;

pub use config::{parse_list, IntRange, ScenarioConfig, TopologySource, HARNESS_LAMBDA};
pub use generate::{
    draw_storage, generate_instance, STREAM_ITEM_SIZE, STREAM_LINK_CAPACITY,
    STREAM_STORAGE_CAPACITY, STREAM_STORAGE_COST,
};
pub use experiment::{
    bb_params, campaign_cells, cell_instance, csv_string, run_cell, run_experiment, write_csv,
    CellResult, ExperimentRow, ObjectiveRun, CSV_COLUMNS,
};
