use bidepo::grid::{FigurePreset, GridSpec, RegionGrid};
use bidepo::verify::{run, Suite};
use bidepo::{Dims, Execution};

#[test]
fn full_suite_passes() {
    let report = run(Suite::All, 7, Execution::default()).unwrap();
    assert!(report.passed(), "{}", report.failure_json());
    assert_eq!(report.checks.len(), 15);
}

#[test]
fn suites_are_deterministic_across_strategies() {
    for suite in [Suite::Hadamard, Suite::Certificates, Suite::Eb] {
        let a = run(suite, 11, Execution::Sequential).unwrap();
        let b = run(suite, 11, Execution::Parallel).unwrap();
        let strip = |r: &bidepo::verify::VerifyReport| {
            r.checks
                .iter()
                .map(|c| {
                    (
                        c.name.clone(),
                        c.passed,
                        c.value.to_bits(),
                        c.detail.clone(),
                    )
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
    }
}

#[test]
fn eb_figure_has_a_ppt_pyramid() {
    let preset = FigurePreset::Eb;
    let grid = RegionGrid::sweep(
        preset.spec(preset.default_dims()).unwrap(),
        Execution::default(),
    );
    assert_eq!(grid.cells.len(), 61 * 61 * 61);
    assert!(grid.count(|c| c.ppt_not_eb()) > 0);
    let square = RegionGrid::sweep(
        GridSpec::cube(Dims::new(2, 2).unwrap(), -1.0, 2.0, 61).unwrap(),
        Execution::default(),
    );
    assert_eq!(square.count(|c| c.ppt_not_eb()), 0);
}
