//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any failed.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use ness_core::correlation::{build_corr_matrix, Mode};
use ness_core::harness::{
    fh_validate, run_identities, run_scan, Affine, BiasSpec, ExperimentConfig, FhValidationSpec, FitSpec,
    GeometryTemplate, GridSpec, IdentityGrid, Measure, RowFlag, ScanKind, ScanReport,
};
use ness_core::measures::{
    fermionic_negativity, mutual_information_joint, renyi_entropy, renyi_negativity_det, renyi_negativity_eig,
    EntropyOrder,
};
use ness_core::model::{BiasConfig, Geometry, ImpurityModel, Subsystem};

const KF_RIGHT: f64 = PI / 2.0;
const KF_LEFT: f64 = PI / 2.0 + 0.2;
const ONSITE: [f64; 3] = [0.5, 1.0, 2.0];

struct Outcome {
    passed: bool,
    detail: String,
}

fn single_site(onsite: f64) -> ImpurityModel {
    ImpurityModel::SingleSite { onsite, hopping: 1.0 }
}

fn fig_bias() -> BiasSpec {
    BiasSpec { hopping: 1.0, kf_left: Some(KF_LEFT), kf_right: Some(KF_RIGHT), mu_left: None, mu_right: None }
}

fn scan_config(
    model: ImpurityModel,
    geometry: GeometryTemplate,
    grid: GridSpec,
    measures: Vec<Measure>,
    n: Vec<f64>,
    fit: FitSpec,
) -> ExperimentConfig {
    ExperimentConfig {
        model,
        bias: fig_bias(),
        geometry,
        grid,
        measures,
        n,
        mode: Mode::Longrange,
        fit,
        exclusion_radius: 5,
        threads: None,
        output: None,
    }
}

fn scan(cfg: &ExperimentConfig) -> Result<ScanReport, String> {
    let report = run_scan(cfg).map_err(|e| e.to_string())?;
    match report.rows.iter().find(|r| r.flag == RowFlag::Failed) {
        Some(r) => Err(format!("{} at {} failed: {}", r.measure.name(), r.scan_value, r.error.as_deref().unwrap_or(""))),
        None => Ok(report),
    }
}

fn label(measure: Measure, n: f64) -> String {
    if measure.takes_order() {
        format!("{}({n})", measure.name())
    } else {
        measure.name().to_string()
    }
}

fn identity_suite() -> Outcome {
    let report = run_identities(&IdentityGrid::default());
    let failed: Vec<String> = report
        .rows
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{} n={:?} T={:?} value={:.2e}", r.identity, r.n, r.transmission, r.value))
        .collect();
    let worst = report
        .summary
        .iter()
        .map(|s| format!("{} {:.1e}", s.identity, s.max_residual))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome {
        passed: failed.is_empty(),
        detail: if failed.is_empty() { worst } else { failed.join("; ") },
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn route_equivalence() -> Outcome {
    let cases: [(ImpurityModel, Geometry, Mode); 4] = [
        (ImpurityModel::ConstantS { transmission: 0.3 }, Geometry::new(0, 200, 20, 200, 20).unwrap(), Mode::Longrange),
        (single_site(1.0), Geometry::new(0, 300, 40, 330, 60).unwrap(), Mode::Longrange),
        (single_site(0.5), Geometry::new(0, 500, 80, 500, 80).unwrap(), Mode::Longrange),
        (single_site(2.0), Geometry::new(1, 10, 30, 25, 40).unwrap(), Mode::Full),
    ];
    let bias = BiasConfig::from_fermi_momenta(1.0, KF_LEFT, KF_RIGHT).unwrap();
    let mut worst: f64 = 0.0;
    let mut largest = 0;
    for (model, g, mode) in cases {
        let c = match build_corr_matrix(&model, &bias, &g, Subsystem::Both, mode) {
            Ok(c) => c,
            Err(e) => return Outcome { passed: false, detail: e.to_string() },
        };
        largest = largest.max(c.dim());
        for n in [2, 4] {
            match (renyi_negativity_eig(&c, n), renyi_negativity_det(&c, n)) {
                (Ok(a), Ok(b)) => worst = worst.max(relative_gap(a.value, b.value)),
                (Err(e), _) | (_, Err(e)) => return Outcome { passed: false, detail: e.to_string() },
            }
        }
    }
    Outcome { passed: worst <= 1e-8, detail: format!("max relative gap {worst:.2e}, dimensions up to {largest}") }
}

fn vanishing() -> Outcome {
    let biased = BiasConfig::from_fermi_momenta(1.0, KF_LEFT, KF_RIGHT).unwrap();
    let unbiased = BiasConfig::from_fermi_momenta(1.0, 1.3, 1.3).unwrap();
    let cases = [
        ("T=0", ImpurityModel::ConstantS { transmission: 0.0 }, biased),
        ("T=1", ImpurityModel::ConstantS { transmission: 1.0 }, biased),
        ("mu_L=mu_R", single_site(1.0), unbiased),
    ];
    let geometries = [Geometry::new(0, 400, 40, 400, 40).unwrap(), Geometry::new(0, 400, 30, 390, 50).unwrap()];
    let mut worst = [0.0f64; 3];
    for (name, model, bias) in cases {
        for g in &geometries {
            let c = match build_corr_matrix(&model, &bias, g, Subsystem::Both, Mode::Longrange) {
                Ok(c) => c,
                Err(e) => return Outcome { passed: false, detail: format!("{name}: {e}") },
            };
            let eval = || -> ness_core::Result<[f64; 3]> {
                let mi = mutual_information_joint(&c, EntropyOrder::VonNeumann)?.value.abs();
                let e = fermionic_negativity(&c)?.value.abs();
                let mut gap: f64 = 0.0;
                for n in [2u32, 4] {
                    let en = renyi_negativity_det(&c, n)?.value;
                    let s = renyi_entropy(&c, n as f64)?.value;
                    gap = gap.max((en - (1.0 - n as f64) * s).abs());
                }
                Ok([mi, e, gap])
            };
            match eval() {
                Ok(v) => (0..3).for_each(|i| worst[i] = worst[i].max(v[i])),
                Err(e) => return Outcome { passed: false, detail: format!("{name}: {e}") },
            }
        }
    }
    Outcome {
        passed: worst.iter().all(|&w| w <= 1e-8),
        detail: format!("max MI {:.1e}, max E {:.1e}, max |E_n - (1-n)S_n| {:.1e}", worst[0], worst[1], worst[2]),
    }
}

fn length_template(d_left: Affine, len_left: Affine, d_right: Affine, len_right: Affine) -> GeometryTemplate {
    GeometryTemplate { scan: ScanKind::Length, m0: 0, d_left, len_left, d_right, len_right }
}

fn fig2() -> Outcome {
    let slope = Affine::Linear { base: 0.0, slope: 1.0 };
    let geometry = length_template(Affine::Fixed(2000), slope, Affine::Fixed(2000), slope);
    let mut passed = true;
    let mut notes = Vec::new();
    for onsite in ONSITE {
        let cfg = scan_config(
            single_site(onsite),
            geometry,
            GridSpec::Values { values: vec![128, 192, 256, 384, 512] },
            vec![Measure::Mi, Measure::MiN, Measure::E, Measure::EN],
            vec![2.0, 4.0],
            FitSpec { start: Some(0), end: None },
        );
        let report = match scan(&cfg) {
            Ok(r) => r,
            Err(e) => return Outcome { passed: false, detail: e },
        };
        for (measure, n) in [(Measure::Mi, 1.0), (Measure::MiN, 2.0), (Measure::E, 1.0), (Measure::EN, 4.0)] {
            let rows = report.series(measure, n);
            let max = rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
            let (first, last) = (rows[0].residual.abs(), rows[rows.len() - 1].residual.abs());
            let ok = max <= 0.05 && last < first;
            passed &= ok;
            if !ok || measure == Measure::EN {
                notes.push(format!(
                    "eps0={onsite} {}: max {max:.4}, |r(128)| {first:.4}, |r(512)| {last:.4}",
                    label(measure, n)
                ));
            }
        }
    }
    Outcome { passed, detail: notes.join("; ") }
}

fn fig3() -> Outcome {
    let geometry = GeometryTemplate {
        scan: ScanKind::Offset,
        m0: 0,
        d_left: Affine::Linear { base: 3000.0, slope: 1.0 },
        len_left: Affine::Fixed(100),
        d_right: Affine::Fixed(3000),
        len_right: Affine::Fixed(200),
    };
    let mut passed = true;
    let mut notes = Vec::new();
    for onsite in ONSITE {
        let cfg = scan_config(
            single_site(onsite),
            geometry,
            GridSpec::Range { start: -350, stop: 150, step: 1 },
            vec![Measure::Mi, Measure::MiN],
            vec![2.0],
            FitSpec::default(),
        );
        let report = match scan(&cfg) {
            Ok(r) => r,
            Err(e) => return Outcome { passed: false, detail: e },
        };
        for (measure, n) in [(Measure::Mi, 1.0), (Measure::MiN, 2.0)] {
            let rows = report.series(measure, n);
            let kept: Vec<_> = rows.iter().filter(|r| r.flag == RowFlag::Ok).collect();
            let closer = kept
                .iter()
                .filter(|r| (r.numeric - r.lin_term - r.log_term).abs() < (r.numeric - r.lin_term).abs())
                .count();
            let fraction = closer as f64 / kept.len() as f64;
            let peak = rows.iter().max_by(|a, b| a.numeric.total_cmp(&b.numeric)).unwrap().scan_value;
            // Mirror image of A_L inside A_R: d_R <= d_L and d_L + 100 <= d_R + 200.
            let ok = fraction >= 0.9 && (0..=100).contains(&peak);
            passed &= ok;
            notes.push(format!(
                "eps0={onsite} {}: log closer at {:.1}% of {}, peak at {peak}",
                label(measure, n),
                100.0 * fraction,
                kept.len()
            ));
        }
    }
    Outcome { passed, detail: notes.join("; ") }
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    sxy / x.iter().map(|a| (a - mx).powi(2)).sum::<f64>()
}

fn symmetric_entropy() -> Outcome {
    let slope_len = Affine::Linear { base: 0.0, slope: 1.0 };
    let geometry = length_template(Affine::Fixed(1500), slope_len, Affine::Fixed(1500), slope_len);
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for onsite in [0.0, 1.0, 2.0] {
        let cfg = scan_config(
            single_site(onsite),
            geometry,
            GridSpec::Values { values: vec![64, 128, 256, 512] },
            vec![Measure::SN],
            vec![2.0, 3.0],
            FitSpec::default(),
        );
        let report = match scan(&cfg) {
            Ok(r) => r,
            Err(e) => return Outcome { passed: false, detail: e },
        };
        for n in [2.0, 3.0] {
            let rows = report.series(Measure::SN, n);
            let x: Vec<f64> = rows.iter().map(|r| (r.scan_value as f64).ln()).collect();
            let y: Vec<f64> = rows.iter().map(|r| r.numeric - r.log_term).collect();
            let s = slope(&x, &y);
            worst = worst.max(s.abs());
            notes.push(format!("eps0={onsite} n={n}: {s:+.4}"));
        }
    }
    Outcome { passed: worst <= 0.02, detail: format!("residual slopes {}", notes.join(", ")) }
}

fn fisher_hartwig() -> Outcome {
    let report = match fh_validate(&FhValidationSpec::default()) {
        Ok(r) => r,
        Err(e) => return Outcome { passed: false, detail: e.to_string() },
    };
    let mut passed = true;
    let mut notes = Vec::new();
    let mut worst_err: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    for s in &report.summaries {
        let ratio = s.shrink_ratios.iter().copied().fold(f64::INFINITY, f64::min);
        min_ratio = min_ratio.min(ratio);
        worst_err = worst_err.max(s.relative_error);
        let ok = ratio >= 2.0 && s.relative_error <= 0.02;
        passed &= ok;
        if !ok {
            notes.push(format!(
                "{:?}/{}: shrink {ratio:.3}, ln M error {:.2}%",
                s.case,
                s.family.name(),
                100.0 * s.relative_error
            ));
        }
    }
    let summary = format!("min shrink {min_ratio:.3}, max ln M error {:.2}%", 100.0 * worst_err);
    Outcome {
        passed,
        detail: if notes.is_empty() { summary } else { format!("{summary}; failing: {}", notes.join(", ")) },
    }
}

fn block_maxima(rows: &[(i64, f64)], blocks: &[(i64, i64)]) -> Vec<f64> {
    blocks
        .iter()
        .map(|&(lo, hi)| rows.iter().filter(|(l, _)| *l >= lo && *l <= hi).map(|(_, d)| d.abs()).fold(0.0, f64::max))
        .collect()
}

fn appendix_protocol() -> Outcome {
    let geometry = length_template(
        Affine::Linear { base: 4000.0, slope: 0.5 },
        Affine::Linear { base: 0.0, slope: 1.0 },
        Affine::Fixed(4000),
        Affine::Linear { base: 0.0, slope: 2.0 },
    );
    let blocks = [(32, 63), (64, 127), (128, 256)];
    let mut passed = true;
    let mut notes = Vec::new();
    for onsite in ONSITE {
        let cfg = scan_config(
            single_site(onsite),
            geometry,
            GridSpec::Range { start: 32, stop: 256, step: 8 },
            vec![Measure::Mi, Measure::MiN],
            vec![2.0],
            FitSpec::default(),
        );
        let report = match scan(&cfg) {
            Ok(r) => r,
            Err(e) => return Outcome { passed: false, detail: e },
        };
        for (measure, n) in [(Measure::Mi, 1.0), (Measure::MiN, 2.0)] {
            let deviations: Vec<(i64, f64)> =
                report.series(measure, n).iter().map(|r| (r.scan_value, r.deviation())).collect();
            let maxima = block_maxima(&deviations, &blocks);
            let ok = maxima.windows(2).all(|w| w[1] < w[0]);
            passed &= ok;
            let shown: Vec<String> = maxima.iter().map(|m| format!("{m:.1e}")).collect();
            notes.push(format!("eps0={onsite} {}: [{}]", label(measure, n), shown.join(" > ")));
        }
    }
    Outcome { passed, detail: format!("block maxima {}", notes.join("; ")) }
}

fn main() {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let minute = Duration::from_secs(60);
    let criteria: [Criterion; 8] = [
        ("1 identity suite", minute, identity_suite),
        ("2 negativity route equivalence", minute, route_equivalence),
        ("3 vanishing for trivial impurity or zero bias", minute, vanishing),
        ("4 symmetric scaling with one fitted constant", 10 * minute, fig2),
        ("5 offset scan, log term vs volume only", 15 * minute, fig3),
        ("6 scatterer-independent entropy of A", 5 * minute, symmetric_entropy),
        ("7 Fisher-Hartwig engine convergence", 2 * minute, fisher_hartwig),
        ("8 deviation envelope for lengths l and 2l", 5 * minute, appendix_protocol),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = outcome.passed && in_time;
        if !passed {
            failures += 1;
        }
        let timing = if in_time { String::new() } else { format!(" over budget of {}s", budget.as_secs()) };
        println!(
            "{} criterion {name}: {} ({:.1}s{timing})",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
