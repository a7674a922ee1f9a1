//! A declarative experiment run from a JSON document.

use lpbm::experiment::{self, ExperimentConfig};

fn main() -> lpbm::Result<()> {
    let dir = std::env::temp_dir().join("lpbm_example");
    let text = format!(
        r#"{{
        "seed": 17,
        "families": [
            {{"name": "boxes", "generator": "unconditional_box", "dimension": 2, "count": 20}},
            {{"name": "same", "generator": "identical_pair", "dimension": 2, "count": 3}}
        ],
        "inequalities": [
            {{"name": "gaussian_boxes", "functional": {{"kind": "measure", "measure": {{"kind": "gaussian"}}}},
              "alpha": 0.5, "p": [1, 1.5, 2, 4], "lambda": [0.25, 0.5, 0.75], "families": ["boxes", "same"]}}
        ],
        "sampling": {{"n_samples": 20000}},
        "tolerances": {{"mu_grid": 64}},
        "outputs": {{"dir": "{}"}}
    }}"#,
        dir.display()
    );
    let cfg = ExperimentConfig::from_json(&text)?;
    print!("{}", experiment::describe(&cfg));
    let out = experiment::run(&cfg)?;
    for s in out.summaries() {
        println!("{}: {} records, {} pass, {} fail, median slack {:?}", s.suite, s.records, s.pass, s.fail, s.median_slack_non_identical);
    }
    println!("exit code {}, report {}", out.exit_code(), out.report_path.display());
    Ok(())
}
