//! The four subcommands.

use serde::Serialize;

use lmgfs_core::analytic::{chi_g_analytic, chi_r_analytic, chi_r_extensive_density, entropy_analytic};
use lmgfs_core::fit::{geometric_grid, linear_fit, log_log_fit};
use lmgfs_core::peak::locate_peak;

use crate::args::{CommandKind, Format, MethodSel, Settings, Split};
use crate::engine::{self, Outcome, Row};
use crate::error::{CliError, CliResult};
use crate::output::{self, Curve, Document};

/// Everything a command hands back for printing.
pub struct Report {
    pub written: Vec<String>,
    pub text: Option<String>,
    pub warnings: Vec<String>,
}

fn document<'a, T: Serialize>(
    settings: &'a Settings,
    generated: &'a str,
    notes: &'a [String],
    warnings: &'a [String],
    body: T,
) -> Document<'a, T> {
    Document {
        tool: "lmgfs",
        version: output::VERSION,
        command: settings.command.as_str(),
        generated,
        input: &settings.echo,
        notes,
        warnings,
        body,
    }
}

#[derive(Serialize)]
struct Records<'a> {
    records: &'a [Row],
}

fn data_curves(rows: &[Row], with_h: bool) -> Vec<Curve> {
    if with_h {
        output::curves_by(
            rows,
            |r| (r.n, r.method, r.h.to_bits()),
            |r| Curve {
                filter: format!("$2 == {} && strcol(8) eq '{}' && abs($1 - {}) < 1e-12", r.n, r.method, r.h),
                title: format!("N={} h={} {}", r.n, r.h, r.method),
            },
        )
    } else {
        output::curves_by(
            rows,
            |r| (r.n, r.method),
            |r| Curve {
                filter: format!("$2 == {} && strcol(8) eq '{}'", r.n, r.method),
                title: format!("N={} {}", r.n, r.method),
            },
        )
    }
}

/// Write the data CSV, JSON records and plot scripts for a set of rows.
fn write_rows(
    settings: &Settings,
    stem: &str,
    rows: &[Row],
    notes: &[String],
    warnings: &[String],
    generated: &str,
    plots: &[(&str, usize, &str, usize, &str)],
) -> CliResult<Vec<String>> {
    let mut written = Vec::new();
    let csv_name = format!("{stem}.csv");
    if settings.wants(Format::Csv) {
        let path = output::out_path(settings, &csv_name);
        output::write_rows_csv(&path, &output::header_lines(settings, notes, generated), rows)?;
        written.push(path.display().to_string());
    }
    if settings.wants(Format::Json) {
        let path = output::out_path(settings, &format!("{stem}.json"));
        output::write_json(&path, &document(settings, generated, notes, warnings, Records { records: rows }))?;
        written.push(path.display().to_string());
    }
    if settings.wants(Format::PlotScript) {
        let tau_sweep = settings.command == CommandKind::SweepTau;
        let curves = data_curves(rows, tau_sweep);
        for &(suffix, x, x_label, y, y_label) in plots {
            let path = output::out_path(settings, &format!("{stem}-{suffix}.gp"));
            let title = format!("{y_label} vs {x_label}, gamma={}", settings.gamma);
            output::write_text(&path, &output::plot_script(&csv_name, (x, x_label), (y, y_label), &title, &curves))?;
            written.push(path.display().to_string());
        }
    }
    Ok(written)
}

fn finish(settings: &Settings, rows: &[Row], report: Report) -> CliResult<Report> {
    match engine::failures(rows) {
        Some(summary) if !settings.skip_errors => Err(CliError::Numerical(summary)),
        Some(summary) => Ok(Report {
            warnings: report
                .warnings
                .into_iter()
                .chain(std::iter::once(format!("{summary} (skipped)")))
                .collect(),
            ..report
        }),
        None => Ok(report),
    }
}

pub fn sweep_h(settings: &Settings) -> CliResult<Report> {
    let (tasks, notes) = engine::h_sweep_tasks(settings)?;
    let rows = engine::run_tasks(settings, &tasks)?;
    let warnings = engine::drift_warnings(&rows);
    let generated = output::timestamp();
    output::ensure_dir(&settings.out)?;
    let written = write_rows(
        settings,
        "sweep-h",
        &rows,
        &notes,
        &warnings,
        &generated,
        &[("chi_r", 1, "h", 5, "chi_r"), ("eta", 1, "h", 6, "eta"), ("entropy", 1, "h", 7, "entropy")],
    )?;
    let report = Report {
        written,
        text: None,
        warnings,
    };
    finish(settings, &rows, report)
}

pub fn sweep_tau(settings: &Settings) -> CliResult<Report> {
    let (tasks, notes) = engine::tau_sweep_tasks(settings)?;
    let rows = engine::run_tasks(settings, &tasks)?;
    let warnings = engine::drift_warnings(&rows);
    let generated = output::timestamp();
    output::ensure_dir(&settings.out)?;
    let written = write_rows(
        settings,
        "sweep-tau",
        &rows,
        &notes,
        &warnings,
        &generated,
        &[("eta", 3, "tau", 6, "eta"), ("entropy", 3, "tau", 7, "entropy")],
    )?;
    let report = Report {
        written,
        text: None,
        warnings,
    };
    finish(settings, &rows, report)
}

/// Relative deviation |numeric − analytic| / |analytic|.
fn rel(numeric: f64, analytic: f64) -> f64 {
    (numeric - analytic).abs() / analytic.abs()
}

#[derive(Debug, Clone, Serialize)]
struct Deviation {
    n: usize,
    h: f64,
    tau: f64,
    method: MethodSel,
    status: &'static str,
    chi_g: Option<[f64; 3]>,
    chi_r: Option<[f64; 3]>,
    entropy: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize)]
struct Summary {
    n: usize,
    method: MethodSel,
    points: usize,
    singular: usize,
    failed: usize,
    chi_g_max: Option<f64>,
    chi_g_median: Option<f64>,
    chi_r_max: Option<f64>,
    chi_r_median: Option<f64>,
    entropy_max: Option<f64>,
    entropy_median: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct Exponent {
    quantity: &'static str,
    window: [f64; 2],
    slope: f64,
    expected: f64,
}

#[derive(Serialize)]
struct CompareBody<'a> {
    deviations: &'a [Deviation],
    summary: &'a [Summary],
    exponents: &'a [Exponent],
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 0 {
        0.5 * (values[mid - 1] + values[mid])
    } else {
        values[mid]
    })
}

fn max(values: &[f64]) -> Option<f64> {
    values.iter().cloned().reduce(f64::max)
}

/// Closed-form slopes near h = 1 over |h − 1| ∈ [1e-5, 1e-4].
fn exponents(gamma: f64, tau: f64) -> CliResult<Vec<Exponent>> {
    let window = [1e-5, 1e-4];
    let x = geometric_grid(window[0], window[1], 20);
    let ln_x: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let numeric = |e: lmgfs_core::Error| CliError::Numerical(e.to_string());
    let collect = |f: &dyn Fn(f64) -> lmgfs_core::Result<f64>| -> CliResult<Vec<f64>> {
        x.iter().map(|&v| f(v).map_err(numeric)).collect()
    };
    let broken = collect(&|v| chi_r_extensive_density(1.0 - v, gamma, tau))?;
    let symmetric = collect(&|v| chi_r_analytic(1.0 + v, gamma, tau, 1))?;
    let global = collect(&|v| chi_g_analytic(1.0 + v, gamma, 1))?;
    let e_below = collect(&|v| entropy_analytic(1.0 - v, gamma, tau))?;
    let e_above = collect(&|v| entropy_analytic(1.0 + v, gamma, tau))?;
    let fit_err = |e: lmgfs_core::Error| CliError::Numerical(e.to_string());
    Ok(vec![
        Exponent {
            quantity: "chi_r/N vs 1-h (h<1)",
            window,
            slope: log_log_fit(&x, &broken).map_err(fit_err)?.slope,
            expected: -0.5,
        },
        Exponent {
            quantity: "chi_r vs h-1 (h>1)",
            window,
            slope: log_log_fit(&x, &symmetric).map_err(fit_err)?.slope,
            expected: -2.0,
        },
        Exponent {
            quantity: "chi_g vs h-1 (h>1)",
            window,
            slope: log_log_fit(&x, &global).map_err(fit_err)?.slope,
            expected: -2.0,
        },
        Exponent {
            quantity: "entropy vs ln(1-h) (h<1)",
            window,
            slope: linear_fit(&ln_x, &e_below).map_err(fit_err)?.slope,
            expected: -0.25,
        },
        Exponent {
            quantity: "entropy vs ln(h-1) (h>1)",
            window,
            slope: linear_fit(&ln_x, &e_above).map_err(fit_err)?.slope,
            expected: -0.25,
        },
    ])
}

fn compare_text(deviations: &[Deviation], summary: &[Summary], exponents: &[Exponent]) -> String {
    let cell = |v: Option<[f64; 3]>, i: usize| v.map_or("-".to_string(), |a| format!("{:.6e}", a[i]));
    let mut s = String::new();
    s.push_str("relative deviation |numeric - analytic| / |analytic|\n\n");
    s.push_str(&format!(
        "{:>6} {:>10} {:>18} {:>9} {:>13} {:>13} {:>13} {:>13} {:>13} {:>13}\n",
        "N", "h", "method", "status", "chi_g", "dev", "chi_r", "dev", "entropy", "dev"
    ));
    for d in deviations {
        s.push_str(&format!(
            "{:>6} {:>10.6} {:>18} {:>9} {:>13} {:>13} {:>13} {:>13} {:>13} {:>13}\n",
            d.n,
            d.h,
            d.method.as_str(),
            d.status,
            cell(d.chi_g, 0),
            cell(d.chi_g, 2),
            cell(d.chi_r, 0),
            cell(d.chi_r, 2),
            cell(d.entropy, 0),
            cell(d.entropy, 2),
        ));
    }
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4e}"));
    s.push_str("\nsummary per N\n\n");
    s.push_str(&format!(
        "{:>6} {:>18} {:>6} {:>8} {:>6} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}\n",
        "N", "method", "points", "singular", "failed", "chi_g max", "chi_g med", "chi_r max", "chi_r med", "S max", "S med"
    ));
    for m in summary {
        s.push_str(&format!(
            "{:>6} {:>18} {:>6} {:>8} {:>6} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}\n",
            m.n,
            m.method.as_str(),
            m.points,
            m.singular,
            m.failed,
            opt(m.chi_g_max),
            opt(m.chi_g_median),
            opt(m.chi_r_max),
            opt(m.chi_r_median),
            opt(m.entropy_max),
            opt(m.entropy_median),
        ));
    }
    s.push_str("\nclosed-form exponents near h = 1\n\n");
    for e in exponents {
        s.push_str(&format!(
            "{:<28} |h-1| in [{:e}, {:e}]  slope {:>9.5}  expected {:>6}\n",
            e.quantity, e.window[0], e.window[1], e.slope, e.expected
        ));
    }
    s
}

pub fn compare(settings: &Settings) -> CliResult<Report> {
    let (tasks, notes) = engine::h_sweep_tasks(settings)?;
    let rows = engine::run_tasks(settings, &tasks)?;
    let warnings = engine::drift_warnings(&rows);
    let generated = output::timestamp();

    let mut deviations = Vec::new();
    for row in rows.iter().filter(|r| r.method != MethodSel::Analytic) {
        let analytic = rows.iter().find(|a| {
            a.method == MethodSel::Analytic && a.n == row.n && a.h == row.h && a.m_sub == row.m_sub
        });
        let (status, values) = match (&row.outcome, analytic.map(|a| &a.outcome)) {
            (Outcome::Failed { .. }, _) => ("failed", None),
            (_, Some(Outcome::Singular)) => ("singular", None),
            (Outcome::Ok { point }, Some(Outcome::Analytic { point: exact })) => (
                "ok",
                Some((
                    [point.chi_g, exact.chi_g, rel(point.chi_g, exact.chi_g)],
                    [point.chi_r, exact.chi_r, rel(point.chi_r, exact.chi_r)],
                    [point.entropy, exact.entropy, rel(point.entropy, exact.entropy)],
                )),
            ),
            _ => ("failed", None),
        };
        deviations.push(Deviation {
            n: row.n,
            h: row.h,
            tau: row.tau,
            method: row.method,
            status,
            chi_g: values.map(|v| v.0),
            chi_r: values.map(|v| v.1),
            entropy: values.map(|v| v.2),
        });
    }

    let mut summary = Vec::new();
    let mut keys: Vec<(usize, MethodSel)> = deviations.iter().map(|d| (d.n, d.method)).collect();
    keys.dedup();
    for (n, method) in keys {
        let group: Vec<&Deviation> = deviations.iter().filter(|d| d.n == n && d.method == method).collect();
        let pick = |f: &dyn Fn(&Deviation) -> Option<[f64; 3]>| -> Vec<f64> {
            group.iter().filter_map(|d| f(d)).map(|a| a[2]).collect()
        };
        let mut g = pick(&|d| d.chi_g);
        let mut r = pick(&|d| d.chi_r);
        let mut e = pick(&|d| d.entropy);
        summary.push(Summary {
            n,
            method,
            points: group.len(),
            singular: group.iter().filter(|d| d.status == "singular").count(),
            failed: group.iter().filter(|d| d.status == "failed").count(),
            chi_g_max: max(&g),
            chi_g_median: median(&mut g),
            chi_r_max: max(&r),
            chi_r_median: median(&mut r),
            entropy_max: max(&e),
            entropy_median: median(&mut e),
        });
    }

    let tau = match settings.split {
        Split::Tau(t) => t,
        Split::M(m) => m as f64 / *settings.n_list.iter().max().expect("non-empty") as f64,
    };
    let exponents = exponents(settings.gamma, tau)?;
    let text = compare_text(&deviations, &summary, &exponents);

    output::ensure_dir(&settings.out)?;
    let mut written = Vec::new();
    let path = output::out_path(settings, "compare.json");
    output::write_json(
        &path,
        &document(
            settings,
            &generated,
            &notes,
            &warnings,
            CompareBody {
                deviations: &deviations,
                summary: &summary,
                exponents: &exponents,
            },
        ),
    )?;
    written.push(path.display().to_string());
    let path = output::out_path(settings, "compare.txt");
    let header = output::header_lines(settings, &notes, &generated).join("\n");
    output::write_text(&path, &format!("{header}\n\n{text}"))?;
    written.push(path.display().to_string());
    if settings.wants(Format::Csv) || settings.wants(Format::PlotScript) {
        let data_settings = Settings {
            formats: settings
                .formats
                .iter()
                .copied()
                .filter(|f| *f != Format::Json)
                .collect(),
            ..settings.clone()
        };
        written.extend(write_rows(
            &data_settings,
            "compare-data",
            &rows,
            &notes,
            &warnings,
            &generated,
            &[("chi_r", 1, "h", 5, "chi_r"), ("chi_g", 1, "h", 4, "chi_g")],
        )?);
    }
    let report = Report {
        written,
        text: Some(text),
        warnings,
    };
    finish(settings, &rows, report)
}

#[derive(Debug, Clone, Serialize)]
struct PeakRow {
    n: usize,
    m_sub: usize,
    tau: f64,
    method: MethodSel,
    h_star: f64,
    distance: f64,
    height: f64,
    grid_index: usize,
}

#[derive(Serialize)]
struct PeakBody<'a> {
    peaks: &'a [PeakRow],
    checked: bool,
}

pub fn peak_scan(settings: &Settings) -> CliResult<Report> {
    let method = *settings
        .methods
        .iter()
        .find(|m| m.numeric().is_some())
        .expect("validated: a numeric method is present");
    let scan = Settings {
        methods: vec![method],
        ..settings.clone()
    };
    let (tasks, notes) = engine::h_sweep_tasks(&scan)?;
    let rows = engine::run_tasks(&scan, &tasks)?;
    let mut warnings = engine::drift_warnings(&rows);
    let generated = output::timestamp();
    if let Some(summary) = engine::failures(&rows) {
        if !settings.skip_errors {
            return Err(CliError::Numerical(summary));
        }
        warnings.push(format!("{summary} (skipped)"));
    }

    let mut peaks = Vec::new();
    for &n in &settings.n_list {
        let curve: Vec<&Row> = rows.iter().filter(|r| r.n == n && r.status() == "ok").collect();
        let h: Vec<f64> = curve.iter().map(|r| r.h).collect();
        let chi: Vec<f64> = curve.iter().map(|r| r.values().chi_r.expect("ok row")).collect();
        let peak = locate_peak(&h, &chi).map_err(|e| CliError::Usage(format!("N={n}: {e}")))?;
        peaks.push(PeakRow {
            n,
            m_sub: curve[0].m_sub,
            tau: curve[0].tau,
            method,
            h_star: peak.location,
            distance: (peak.location - 1.0).abs(),
            height: peak.height,
            grid_index: peak.index,
        });
    }

    let checked = settings.check && peaks.len() > 1;
    let mut text = format!(
        "{:>6} {:>6} {:>10} {:>22} {:>22} {:>22}\n",
        "N", "M", "tau", "h*", "|h* - 1|", "height"
    );
    for p in &peaks {
        text.push_str(&format!(
            "{:>6} {:>6} {:>10.6} {:>22} {:>22} {:>22}\n",
            p.n,
            p.m_sub,
            p.tau,
            output::fmt_float(p.h_star),
            output::fmt_float(p.distance),
            output::fmt_float(p.height)
        ));
    }

    output::ensure_dir(&settings.out)?;
    let mut written = Vec::new();
    let header = output::header_lines(settings, &notes, &generated);
    if settings.wants(Format::Csv) {
        let path = output::out_path(settings, "peak-scan.csv");
        let records: Vec<Vec<String>> = peaks
            .iter()
            .map(|p| {
                vec![
                    p.n.to_string(),
                    p.m_sub.to_string(),
                    output::fmt_float(p.tau),
                    p.method.to_string(),
                    output::fmt_float(p.h_star),
                    output::fmt_float(p.distance),
                    output::fmt_float(p.height),
                    p.grid_index.to_string(),
                ]
            })
            .collect();
        output::write_table(
            &path,
            &header,
            &["N", "M", "tau", "method", "h_star", "distance", "height", "grid_index"],
            &records,
        )?;
        written.push(path.display().to_string());
    }
    if settings.wants(Format::Json) {
        let path = output::out_path(settings, "peak-scan.json");
        output::write_json(
            &path,
            &document(
                settings,
                &generated,
                &notes,
                &warnings,
                PeakBody {
                    peaks: &peaks,
                    checked,
                },
            ),
        )?;
        written.push(path.display().to_string());
    }
    let path = output::out_path(settings, "peak-scan.txt");
    output::write_text(&path, &format!("{}\n\n{text}", header.join("\n")))?;
    written.push(path.display().to_string());
    if settings.wants(Format::Csv) || settings.wants(Format::PlotScript) {
        let data_settings = Settings {
            formats: settings
                .formats
                .iter()
                .copied()
                .filter(|f| *f != Format::Json)
                .collect(),
            ..scan.clone()
        };
        written.extend(write_rows(
            &data_settings,
            "peak-scan-curves",
            &rows,
            &notes,
            &warnings,
            &generated,
            &[("chi_r", 1, "h", 5, "chi_r")],
        )?);
    }

    if checked {
        let distance_ok = peaks.windows(2).all(|w| w[1].distance < w[0].distance);
        let height_ok = peaks.windows(2).all(|w| w[1].height > w[0].height);
        if !(distance_ok && height_ok) {
            return Err(CliError::Numerical(format!(
                "peak check failed: |h* - 1| strictly decreasing: {distance_ok}, height strictly increasing: {height_ok}"
            )));
        }
    }
    Ok(Report {
        written,
        text: Some(text),
        warnings,
    })
}
