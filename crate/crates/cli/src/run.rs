//! Command dispatch: every subcommand produces CSV + JSON views of
//! the same rows, a one-line headline, and completeness provenance.

use crate::config::RunConfig;
use crate::CliError;
use adiabatic_spectra::asymptotics::{self, BranchOutcome, ClassifierConfig, WeylInput};
use adiabatic_spectra::heat::{self, SpectrumSource};
use adiabatic_spectra::heisenberg::{HeisenbergAdiabaticModel, HeisenbergMetric};
use adiabatic_spectra::torus::{self, TorusModel};
use adiabatic_spectra::{fmt_g17, CountMode, SpectrumSlice};

pub struct Outcome {
    pub csv: String,
    pub json: serde_json::Value,
    pub headline: String,
    pub provenance: Vec<String>,
}

#[derive(Clone)]
enum Cell {
    F(f64),
    I(u64),
    S(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => fmt_g17(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::F(v) => serde_json::json!(v),
            Cell::I(v) => serde_json::json!(v),
            Cell::S(s) => serde_json::json!(s),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

fn table(
    columns: &[&str],
    rows: Vec<Vec<Cell>>,
    headline: String,
    provenance: Vec<String>,
) -> Outcome {
    let mut csv = columns.join(",");
    csv.push('\n');
    for row in &rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    let json = serde_json::json!({
        "columns": columns,
        "rows": rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    Outcome {
        csv,
        json,
        headline,
        provenance,
    }
}

fn slice_outcome(slice: SpectrumSlice, headline: String) -> Outcome {
    Outcome {
        csv: slice.to_csv(),
        json: slice.to_json(),
        headline,
        provenance: vec![slice.provenance().to_string()],
    }
}

pub fn dispatch(command: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        "torus-spectrum" => torus_spectrum(cfg),
        "torus-count" => torus_count(cfg),
        "torus-audit" => torus_audit(cfg),
        "heis-spectrum" => heis_spectrum(cfg),
        "heat-trace" => heat_trace_cmd(cfg),
        "trace-ratio" => trace_ratio_cmd(cfg),
        "branch-audit" => branch_audit_cmd(cfg),
        "weyl-check" => weyl_check(cfg),
        other => Err(CliError::config(format!("unknown command: {other}"))),
    }
}

fn count_mode(cfg: &RunConfig) -> Result<CountMode, CliError> {
    match cfg.mode.as_deref().unwrap_or("open") {
        "open" => Ok(CountMode::Open),
        "closed" => Ok(CountMode::Closed),
        other => Err(CliError::config(format!(
            "mode must be open or closed, got {other}"
        ))),
    }
}

fn torus_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let slope = cfg.require_slope()?;
    let h = cfg.require_f64("h", cfg.h)?;
    let cutoff = cfg.require_f64("cutoff", cfg.cutoff)?;
    let degree = cfg.degree.unwrap_or(0);
    let model = TorusModel::new(slope, h)?;
    let slice = model.spectrum(degree, cutoff)?;
    let headline = format!(
        "torus-spectrum slope={slope:?} h={h} degree={degree} cutoff={cutoff} entries={} total_multiplicity={}",
        slice.entries().len(),
        slice.total_multiplicity()
    );
    Ok(slice_outcome(slice, headline))
}

fn torus_count(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let slope = cfg.require_slope()?;
    let lambda = cfg.require_f64("lambda", cfg.lambda)?;
    let degree = cfg.degree.unwrap_or(0);
    let mode = count_mode(cfg)?;
    let hs = cfg.h_values()?;
    let mut rows = Vec::new();
    let mut last = 0u64;
    for &h in &hs {
        let model = TorusModel::new(slope, h)?;
        let count = model.count_exact(lambda, degree, mode)?;
        let predicted = torus::predicted_count(slope, lambda, h)?;
        rows.push(vec![
            Cell::F(h),
            Cell::I(count),
            Cell::F(predicted),
            Cell::F(count as f64 / predicted),
        ]);
        last = count;
    }
    let headline = format!(
        "torus-count slope={slope:?} lambda={lambda} degree={degree} mode={:?} count={last}",
        mode
    );
    Ok(table(
        &["h", "count", "predicted", "ratio"],
        rows,
        headline,
        vec![format!(
            "streaming lattice count, certified index radius from k^2+l^2 <= (lambda/(2pi)^2)(1+h^-2)"
        )],
    ))
}

fn torus_audit(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let slope = cfg.require_slope()?;
    let lambda = cfg.require_f64("lambda", cfg.lambda)?;
    let degree = cfg.degree.unwrap_or(0);
    let mode = count_mode(cfg)?;
    let hs = cfg.h_values()?;
    if hs.len() < 3 {
        return Err(CliError::config(
            "torus-audit needs an h_grid with >= 3 points",
        ));
    }
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for &h in &hs {
        let model = TorusModel::new(slope, h)?;
        let count = model.count_exact(lambda, degree, mode)?;
        let predicted = torus::predicted_count(slope, lambda, h)?;
        rows.push(vec![
            Cell::F(h),
            Cell::I(count),
            Cell::F(predicted),
            Cell::F(count as f64 / predicted),
        ]);
        samples.push((h, count));
    }
    let fit = asymptotics::fit_leading_coefficient(&samples, 1)?;
    let coefficient = torus::predicted_coefficient(slope, lambda)?;
    let headline = format!(
        "torus-audit slope={slope:?} lambda={lambda} fitted_coefficient={} predicted={} free_slope={}",
        fmt_g17(fit.coefficient),
        fmt_g17(coefficient),
        fmt_g17(fit.free_slope)
    );
    Ok(table(
        &["h", "count", "predicted", "ratio"],
        rows,
        headline,
        vec!["exact counts; fit of log(count) = -log(h) + log(C)".to_string()],
    ))
}

fn heis_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cutoff = cfg.require_f64("cutoff", cfg.cutoff)?;
    let degree = cfg.degree.unwrap_or(0);
    let (slice, desc) = match cfg.metric {
        Some([h11, h12, h22, g33]) => {
            let metric = HeisenbergMetric::new(h11, h12, h22, g33)?;
            let slice = match degree {
                0 | 3 => metric.function_spectrum(cutoff)?,
                1 | 2 => metric.one_form_spectrum(cutoff)?,
                d => return Err(CliError::config(format!("degree must be 0..=3, got {d}"))),
            };
            (slice, format!("metric=({h11},{h12},{h22},{g33})"))
        }
        None => {
            let h = cfg.require_f64("h", cfg.h)?;
            let alpha = cfg.alpha.unwrap_or(0.0);
            let model = HeisenbergAdiabaticModel::new(h, alpha)?;
            (
                model.form_spectrum(degree, cutoff)?,
                format!("h={h} alpha={alpha}"),
            )
        }
    };
    let headline = format!(
        "heis-spectrum {desc} degree={degree} cutoff={cutoff} entries={} total_multiplicity={}",
        slice.entries().len(),
        slice.total_multiplicity()
    );
    Ok(slice_outcome(slice, headline))
}

fn heat_source(cfg: &RunConfig, h: f64) -> Result<(SpectrumSource, bool), CliError> {
    let degree = cfg.degree.unwrap_or(0);
    match cfg.model.as_deref().unwrap_or("heisenberg") {
        "torus" => {
            let slope = cfg.require_slope()?;
            let model = TorusModel::new(slope, h)?;
            Ok((SpectrumSource::torus(model, degree)?, false))
        }
        "heisenberg" => {
            let alpha = cfg.alpha.unwrap_or(0.0);
            let model = HeisenbergAdiabaticModel::new(h, alpha)?;
            let with_ratio = degree == 0 || degree == 3;
            Ok((SpectrumSource::heisenberg(model, degree)?, with_ratio))
        }
        other => Err(CliError::config(format!(
            "model must be torus or heisenberg, got {other}"
        ))),
    }
}

fn heat_trace_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let eps = cfg.eps.unwrap_or(1e-9);
    let hs = cfg.h_values()?;
    let ts = cfg.t_values()?;
    let mut rows = Vec::new();
    let mut headline_value = 0.0;
    for &h in &hs {
        let (source, with_ratio) = heat_source(cfg, h)?;
        for &t in &ts {
            let r = heat::heat_trace(&source, t, eps)?;
            let ratio = if with_ratio {
                let i = heat::limit_integral(t, eps.min(1e-10))?;
                Cell::F(4.0 * std::f64::consts::PI * h * h * r.value / i)
            } else {
                Cell::Empty
            };
            headline_value = r.value;
            rows.push(vec![
                Cell::F(t),
                Cell::F(h),
                Cell::F(r.value),
                Cell::F(r.truncation_bound),
                ratio,
            ]);
        }
    }
    let headline = format!(
        "heat-trace model={} eps={eps} trace={}",
        cfg.model.as_deref().unwrap_or("heisenberg"),
        fmt_g17(headline_value)
    );
    Ok(table(
        &["t", "h", "trace", "tail_bound", "ratio"],
        rows,
        headline,
        vec!["tail bounded by C(1+lambda)^2 envelope from enumeration certificates".to_string()],
    ))
}

fn trace_ratio_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let eps = cfg.eps.unwrap_or(1e-9);
    let t = cfg.require_f64("t", cfg.t)?;
    let alpha = cfg.alpha.unwrap_or(0.0);
    let hs = cfg.h_values()?;
    let mut rows = Vec::new();
    let mut last_ratio = f64::NAN;
    for &h in &hs {
        let model = HeisenbergAdiabaticModel::new(h, alpha)?;
        let source = SpectrumSource::heisenberg(model, 0)?;
        let r = heat::heat_trace(&source, t, eps)?;
        let ratio = heat::trace_ratio(model, t, eps)?;
        last_ratio = ratio;
        rows.push(vec![
            Cell::F(t),
            Cell::F(h),
            Cell::F(r.value),
            Cell::F(r.truncation_bound),
            Cell::F(ratio),
        ]);
    }
    let headline = format!(
        "trace-ratio t={t} alpha={alpha} ratio={}",
        fmt_g17(last_ratio)
    );
    Ok(table(
        &["t", "h", "trace", "tail_bound", "ratio"],
        rows,
        headline,
        vec!["ratio = 4 pi h^2 tr / I(t)".to_string()],
    ))
}

fn branch_audit_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let hs = cfg.h_values()?;
    if hs.len() < 4 {
        return Err(CliError::config(
            "branch-audit needs an h_grid with >= 4 points",
        ));
    }
    let i_max = cfg.i_max.unwrap_or(12);
    let degree = cfg.degree.unwrap_or(0);
    let classifier = ClassifierConfig::default();
    let report = match cfg.model.as_deref().unwrap_or("heisenberg") {
        "heisenberg" => {
            let alpha = cfg.alpha.unwrap_or(0.0);
            asymptotics::branch_audit(
                &|h, cutoff| HeisenbergAdiabaticModel::new(h, alpha)?.form_spectrum(degree, cutoff),
                &hs,
                i_max,
                &classifier,
            )?
        }
        "torus" => {
            let slope = cfg.require_slope()?;
            match cfg.pairing.as_deref().unwrap_or("sorted") {
                "sorted" => asymptotics::branch_audit(
                    &|h, cutoff| TorusModel::new(slope, h)?.spectrum(degree, cutoff),
                    &hs,
                    i_max,
                    &classifier,
                )?,
                "curves" => {
                    let curves = torus::eigenvalue_curves(slope, &hs, degree, i_max)?;
                    asymptotics::audit_curves(&curves, &classifier)?
                }
                other => {
                    return Err(CliError::config(format!(
                        "pairing must be sorted or curves, got {other}"
                    )))
                }
            }
        }
        other => {
            return Err(CliError::config(format!(
                "model must be torus or heisenberg, got {other}"
            )))
        }
    };
    let mut rows = Vec::new();
    for (i, b) in report.branches.iter().enumerate() {
        let (slope_v, const_v) = match b {
            BranchOutcome::Classified(r) => (Cell::F(r.fitted_slope), Cell::F(r.fitted_constant)),
            BranchOutcome::Ambiguous { slope } => (Cell::F(*slope), Cell::Empty),
        };
        rows.push(vec![
            Cell::I(i as u64),
            Cell::S(b.kind_str()),
            slope_v,
            const_v,
        ]);
    }
    let zeros = report.count_kind(asymptotics::BranchKind::Zero);
    let headline = format!(
        "branch-audit model={} degree={degree} i_max={i_max} zero_branches={zeros}",
        cfg.model.as_deref().unwrap_or("heisenberg")
    );
    Ok(table(
        &["branch_index", "kind", "slope", "constant"],
        rows,
        headline,
        vec!["slope fitted over the smallest decade of h".to_string()],
    ))
}

fn weyl_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let slope = cfg.require_slope()?;
    let lambdas = cfg.lambda_values()?;
    let mut rows = Vec::new();
    let mut last_pred = f64::NAN;
    for &lambda in &lambdas {
        let bound = cfg.jump_bound.unwrap_or(lambda + 1.0);
        let input = WeylInput {
            codim_q: 1,
            leafwise_sdf: torus::leafwise_sdf(slope, bound)?,
        };
        let weyl = asymptotics::weyl_transform(&input, lambda)?;
        let predicted = torus::predicted_coefficient(slope, lambda)?;
        last_pred = predicted;
        rows.push(vec![
            Cell::F(lambda),
            Cell::F(predicted),
            Cell::F(weyl),
            Cell::F((weyl - predicted).abs() / predicted.abs().max(1e-300)),
        ]);
    }
    let headline = format!(
        "weyl-check slope={slope:?} predicted_coefficient={}",
        fmt_g17(last_pred)
    );
    Ok(table(
        &["lambda", "predicted", "weyl", "rel_diff"],
        rows,
        headline,
        vec!["weyl transform vs counting coefficient, q=1".to_string()],
    ))
}
