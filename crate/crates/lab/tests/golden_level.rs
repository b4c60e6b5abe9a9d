//! Golden-file check for the level-analysis record: a fixed config and seed
//! must reproduce the audited record byte for byte (wall clock excluded).
//! Regenerate with REGEN_GOLDEN=1 after intentional changes, and re-audit.

use radial_lab::experiments::level::{self, LevelAnalysisConfig};
use radial_lab::spec::MeasureSpec;

fn golden_config() -> LevelAnalysisConfig {
    LevelAnalysisConfig {
        schema: radial_lab::record::CONFIG_SCHEMA.to_string(),
        // K and E on one line, separated: the collinear geometry drives the
        // heavy branch with single-tube witnesses and one flower per arc
        k: MeasureSpec::Restrict {
            base: Box::new(MeasureSpec::HorizontalLine { y: 0.35, depth: 8 }),
            x0: 0.0,
            x1: 0.5,
            y0: 0.0,
            y1: 1.0,
            normalize: true,
        },
        e: MeasureSpec::Restrict {
            base: Box::new(MeasureSpec::HorizontalLine { y: 0.35, depth: 8 }),
            x0: 0.7,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
            normalize: true,
        },
        kappa_mu: 1.0,
        kappa_nu: 1.0,
        tau: 0.4,
        eta: 0.005,
        epsilon: 0.1,
        k_start: 20,
        levels: 2,
        max_viewpoints: 12,
        beta: None,
    }
}

fn check_golden(record: radial_lab::record::RunRecord, name: &str) {
    let bytes = record.canonical_bytes();
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name);
    if std::env::var_os("REGEN_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &bytes).unwrap();
        return;
    }
    let golden = std::fs::read(&path).expect("golden file present");
    assert_eq!(
        String::from_utf8_lossy(&bytes),
        String::from_utf8_lossy(&golden),
        "record drifted from the audited golden file {name}"
    );
}

#[test]
fn line_config_record_matches_golden_file() {
    check_golden(
        level::run(&golden_config(), 7).unwrap(),
        "golden_level.json",
    );
}

#[test]
fn cantor_pair_record_matches_golden_file() {
    // default config: four-corner Cantor against a separated copy, 2 levels
    check_golden(
        level::run(&LevelAnalysisConfig::default(), 7).unwrap(),
        "golden_level_cantor.json",
    );
}
