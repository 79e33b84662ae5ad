//! Cross-module checks: the pieces agree with each other end to end.

use std::path::PathBuf;

use ness_core::asymptotics::renyi_mi_asym;
use ness_core::correlation::{build_corr_matrix, Mode};
use ness_core::fisher_hartwig::{gamma_log_sum_mi, mi_log_sum_unified, JumpWindows};
use ness_core::harness::{run_scan, ExperimentConfig, GridSpec, Measure, RowFlag};
use ness_core::measures::{mutual_information_joint, EntropyOrder};
use ness_core::model::{BiasConfig, Geometry, ImpurityModel, Subsystem};

fn config_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn replica_sum_matches_the_mutual_information_log_term() {
    let bias = BiasConfig::from_fermi_momenta(1.0, 1.9, 1.1).unwrap();
    let delta_k = bias.window();
    let geometries = [
        Geometry::new(0, 300, 40, 280, 90).unwrap(),
        Geometry::new(0, 100, 30, 170, 50).unwrap(),
        Geometry::new(0, 200, 60, 230, 70).unwrap(),
    ];
    for t in [0.2, 0.55, 0.9] {
        let model = ImpurityModel::ConstantS { transmission: t };
        for g in &geometries {
            let windows = JumpWindows::from_lengths(g.d_left, g.len_left, g.d_right, g.len_right, delta_k, 2048).unwrap();
            for n in 2..=4u32 {
                let predicted = (1.0 - n as f64) * renyi_mi_asym(&model, &bias, g, n as f64).unwrap().log_term();
                let direct = gamma_log_sum_mi(t, n, windows.case(), &windows).unwrap();
                let unified = mi_log_sum_unified(t, n, &windows).unwrap();
                assert!((direct - predicted).abs() < 1e-10, "T={t} n={n} {g:?}: {direct} vs {predicted}");
                assert!((unified - predicted).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn scan_rows_match_direct_measures() {
    let text = std::fs::read_to_string(config_dir().join("fig3_offset.toml")).unwrap();
    let mut cfg = ExperimentConfig::from_toml(&text).unwrap();
    cfg.grid = GridSpec::Values { values: vec![-120, 13] };
    cfg.geometry.len_left = ness_core::harness::Affine::Fixed(20);
    cfg.geometry.len_right = ness_core::harness::Affine::Fixed(40);
    cfg.measures = vec![Measure::Mi];
    let report = run_scan(&cfg).unwrap();
    let resolved = cfg.resolve().unwrap();
    for (row, g) in report.rows.iter().zip(&resolved.geometries) {
        assert_eq!(row.flag, RowFlag::Ok);
        let c = build_corr_matrix(&resolved.model, &resolved.bias, g, Subsystem::Both, Mode::Longrange).unwrap();
        let direct = mutual_information_joint(&c, EntropyOrder::VonNeumann).unwrap().value;
        assert!((row.numeric - direct).abs() < 1e-12);
    }
}

#[test]
fn shipped_configs_resolve() {
    let mut seen = 0;
    for entry in std::fs::read_dir(config_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = ExperimentConfig::from_toml(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.resolve().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 3);
}

#[test]
fn scan_output_is_deterministic() {
    let text = std::fs::read_to_string(config_dir().join("appendix_a.toml")).unwrap();
    let mut cfg = ExperimentConfig::from_toml(&text).unwrap();
    cfg.grid = GridSpec::Range { start: 16, stop: 40, step: 8 };
    let run = |cfg: &ExperimentConfig| {
        let mut out = Vec::new();
        run_scan(cfg).unwrap().write_csv(&mut out).unwrap();
        out
    };
    let first = run(&cfg);
    cfg.threads = Some(3);
    assert_eq!(first, run(&cfg));
}
