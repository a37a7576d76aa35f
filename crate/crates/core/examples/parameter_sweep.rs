//! Sweeps the edge CPU frequency and prints the resulting CSV.

use meqc::bench::{parse_config, run_sweep, csv::to_csv_string};

const CONFIG: &str = r#"
seed = 1
users = 3
servers = 3

[eval]
policies = ["local", "random", "random_cloud", "greedy", "oracle"]
episodes = 5

[sweep]
param = "edge_cpu"
values = [5e9, 10e9, 15e9, 20e9]
seeds = [1, 2]
"#;

fn main() -> meqc::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let rows = run_sweep(&cfg)?;
    print!("{}", to_csv_string(&rows)?);
    Ok(())
}
