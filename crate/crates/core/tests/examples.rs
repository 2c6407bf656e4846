//! Every example compiles as a module here and runs with small settings.

#[allow(dead_code)]
#[path = "../examples/ablation.rs"]
mod ablation;
#[allow(dead_code)]
#[path = "../examples/bezier_fit.rs"]
mod bezier_fit;
#[allow(dead_code)]
#[path = "../examples/bisphere_two_phase.rs"]
mod bisphere_two_phase;
#[allow(dead_code)]
#[path = "../examples/custom_problem.rs"]
mod custom_problem;
#[allow(dead_code)]
#[path = "../examples/ecdf_report.rs"]
mod ecdf_report;
#[allow(dead_code)]
#[path = "../examples/experiment_grid.rs"]
mod experiment_grid;
#[allow(dead_code)]
#[path = "../examples/hypervolume_archive.rs"]
mod hypervolume_archive;
#[allow(dead_code)]
#[path = "../examples/optimizers.rs"]
mod optimizers;
#[allow(dead_code)]
#[path = "../examples/parameter_sweep.rs"]
mod parameter_sweep;

#[test]
fn ablation_runs() {
    ablation::run_example(2, 1).unwrap();
}

#[test]
fn bezier_fit_runs() {
    bezier_fit::run_example().unwrap();
}

#[test]
fn bisphere_two_phase_runs() {
    bisphere_two_phase::run_example().unwrap();
}

#[test]
fn custom_problem_runs() {
    custom_problem::run_example().unwrap();
}

#[test]
fn ecdf_report_runs() {
    ecdf_report::run_example(2, 1).unwrap();
}

#[test]
fn experiment_grid_runs() {
    let dir = tempfile::tempdir().unwrap();
    experiment_grid::run_example(dir.path().to_path_buf()).unwrap();
    assert!(dir.path().join("reports/final_indicator.csv").exists());
}

#[test]
fn hypervolume_archive_runs() {
    hypervolume_archive::run_example().unwrap();
}

#[test]
fn optimizers_runs() {
    optimizers::run_example().unwrap();
}

#[test]
fn parameter_sweep_runs() {
    parameter_sweep::run_example(2, 1).unwrap();
}
