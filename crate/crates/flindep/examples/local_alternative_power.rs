//! Power against alternatives that shrink as the sample grows.
//!
//! The slope is scaled by c * n^a / sqrt(n) with a < 1/2, so the signal
//! shrinks slower than the root-n parametric rate and the norm tests should
//! still detect it with power growing in n.
//!
//! Run with: cargo run --release --example local_alternative_power

use flindep::bootstrap::{CalibrationKind, Multiplier, PValueMode, VarianceMode};
use flindep::simgen::{run_scenario, LocalAlternative, MethodSpec, ScenarioSpec, ThetaSpec};
use flindep::stats::StatisticKind;
use flindep::Result;

fn main() -> Result<()> {
    let local = LocalAlternative { scale: 1.0, exponent: 0.25 };
    println!("slope factor c * n^a / sqrt(n) with c = {}, a = {}:", local.scale, local.exponent);

    for n in [50, 100, 200] {
        let spec = ScenarioSpec {
            name: format!("local-n{n}"),
            n,
            p: 100,
            datasets: 150,
            seed: 3000 + n as u64,
            theta: ThetaSpec::SinCubed,
            sigma0: Some(0.1),
            r: None,
            local: Some(local),
            intercept: 0.0,
            alphas: vec![0.05],
            kn: vec![],
            replicates: 400,
            p_value_mode: PValueMode::Proportion,
            methods: vec![MethodSpec {
                statistic: StatisticKind::T3s,
                calibration: CalibrationKind::Wild,
                multiplier: Multiplier::Gaussian,
                variance_mode: VarianceMode::Bootstrapped,
                label: None,
            }],
        };
        let report = run_scenario(&spec)?;
        let cell = &report.cells[0];
        println!(
            "  n = {n:3}: slope factor {:.3}, rejection rate {:.1}% ({}/{} datasets)",
            local.slope_factor(n),
            100.0 * cell.rate,
            cell.rejections,
            cell.datasets,
        );
    }
    println!("\nThe slope shrinks like n^(-1/4), slower than the root-n rate at which");
    println!("the test's resolution improves, so power still rises with n.");
    Ok(())
}
