use std::f64::consts::PI;
use std::io::Write;

use clap::Args;
use ortholab::density::{asymptotic_r, asymptotic_ratio_limit, rho_cumulative_mass, rho_profile, total_mass_f, MAX_T};
use ortholab::dilog::{li2, rogers_l, ZETA2};
use ortholab::hypgeom::{length_from_a, ExtReal};
use ortholab::montecarlo::{cdf_sup_distance, mc_class_measure, mc_polygon_measure, RunReport};
use ortholab::output::fmt17;
use ortholab::polygon::{lewin_partial_sum, lewin_tail_estimate, regular_polygon, IdealPolygon, PolygonReport};
use ortholab::verify::{run_suite, Suite};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::{CliError, Function, Outcome};

type Out<'a> = &'a mut dyn Write;

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct PolygonArgs {
    /// Regular ideal n-gon with vertices at the n-th roots of unity.
    #[arg(long)]
    regular: Option<usize>,
    /// Comma-separated boundary points of the upper half-plane in cyclic
    /// order; `inf` is the point at infinity.
    #[arg(long, allow_hyphen_values = true)]
    vertices: Option<String>,
}

#[derive(Debug, Clone, Args)]
#[group(required = false, multiple = false)]
pub struct OptionalPolygonArgs {
    #[arg(long)]
    regular: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    vertices: Option<String>,
}

fn build_polygon(regular: Option<usize>, vertices: Option<&str>) -> Result<IdealPolygon, CliError> {
    match (regular, vertices) {
        (Some(n), _) => Ok(regular_polygon(n)?),
        (None, Some(list)) => {
            let points = list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map(ExtReal::from)
                        .map_err(|_| CliError::Usage(format!("bad vertex {s:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(IdealPolygon::from_points(&points)?)
        }
        (None, None) => Err(CliError::Usage("give --regular or --vertices".into())),
    }
}

fn csv_writer(out: Out) -> csv::Writer<Out> {
    csv::Writer::from_writer(out)
}

fn write_json<T: Serialize>(out: Out, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct EvalRecord {
    function: &'static str,
    x: f64,
    value: f64,
}

pub fn eval(config: &RunConfig, function: Function, x: f64, out: Out) -> Result<Outcome, CliError> {
    let (name, value) = match function {
        Function::Li2 => ("li2", li2(x)?),
        Function::RogersL => ("rogersL", rogers_l(x)?),
    };
    match config.format_or(Format::Text) {
        Format::Text => writeln!(out, "{}", fmt17(value))?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["function", "x", "value"])?;
            w.write_record([name, &fmt17(x), &fmt17(value)])?;
            w.flush()?;
        }
        Format::Json => write_json(
            out,
            &EvalRecord {
                function: name,
                x,
                value,
            },
        )?,
    }
    Ok(Outcome::Pass)
}

/// Groups equal cross-ratios: `[(multiplicity, b)]` in increasing `b`.
fn grouped_cross_ratios(b_sorted: &[f64]) -> Vec<(usize, f64)> {
    let mut groups: Vec<(usize, f64)> = Vec::new();
    for &b in b_sorted {
        match groups.last_mut() {
            Some((m, g)) if (b - *g).abs() <= 1e-12 * g.abs() => *m += 1,
            _ => groups.push((1, b)),
        }
    }
    groups
}

pub fn polygon(config: &RunConfig, args: &PolygonArgs, out: Out) -> Result<Outcome, CliError> {
    let p = build_polygon(args.regular, args.vertices.as_deref())?;
    let report = PolygonReport::new(&p);
    let mut b_sorted: Vec<f64> = report.ortho.iter().map(|e| e.b).collect();
    b_sorted.sort_by(f64::total_cmp);
    let relation = {
        let lhs: Vec<String> = grouped_cross_ratios(&b_sorted)
            .iter()
            .map(|(m, b)| format!("{m} L({})", fmt17(*b)))
            .collect();
        let lhs = if lhs.is_empty() {
            "0".to_string()
        } else {
            lhs.join(" + ")
        };
        format!("{lhs} = (n - 3) pi^2/6 = {}", fmt17((p.n() as f64 - 3.0) * ZETA2))
    };
    let tol = config.tolerances.identity_tol;
    match config.format_or(Format::Json) {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["i", "j", "b", "l"])?;
            for e in &report.ortho {
                w.write_record([e.i.to_string(), e.j.to_string(), fmt17(e.b), fmt17(e.l)])?;
            }
            w.flush()?;
        }
        Format::Text => {
            let deg: Vec<String> = report.vertices_deg.iter().map(|d| fmt17(*d)).collect();
            writeln!(out, "n = {}", report.n)?;
            writeln!(out, "vertices (deg) = {}", deg.join(", "))?;
            writeln!(out, "{:>3} {:>3} {:>24} {:>24}", "i", "j", "b", "l")?;
            for e in &report.ortho {
                writeln!(out, "{:>3} {:>3} {:>24} {:>24}", e.i, e.j, fmt17(e.b), fmt17(e.l))?;
            }
        }
    }
    eprintln!("{relation}");
    eprintln!("defect = {} (tolerance {})", fmt17(report.defect), fmt17(tol));
    Ok(if report.defect.abs() <= tol {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn grid(tmax: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Usage(format!("--step must be positive, got {step}")));
    }
    if !(tmax > 0.0 && tmax <= MAX_T) {
        return Err(CliError::Usage(format!("--tmax must lie in (0, {MAX_T}], got {tmax}")));
    }
    let n = (tmax / step - 1e-9).ceil() as usize;
    if n > 10_000_000 {
        return Err(CliError::Usage(format!("grid of {n} points is too large")));
    }
    Ok((1..=n).map(|k| (k as f64 * step).min(tmax)).collect())
}

#[derive(Serialize)]
struct DensityRecord {
    l: f64,
    t: Vec<f64>,
    rho: Vec<f64>,
    mass: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<Vec<f64>>,
    total_mass_f: f64,
}

pub fn density(
    config: &RunConfig,
    l: f64,
    tmax: f64,
    step: f64,
    asymptote: bool,
    out: Out,
) -> Result<Outcome, CliError> {
    let f = total_mass_f(l)?;
    let t = grid(tmax, step)?;
    let tol = config.tolerances.quadrature_tol;
    let rho = rho_profile(l, &t, tol)?.values;
    let mass = rho_cumulative_mass(l, &t, tol)?;
    let r = asymptotic_r(l)?;
    let limit = asymptotic_ratio_limit(l)?;
    let ratio: Option<Vec<f64>> = asymptote.then(|| {
        t.iter()
            .zip(&rho)
            .map(|(&t, &v)| v / (16.0 * t * t * (-2.0 * t).exp()))
            .collect()
    });

    let mut header = vec!["l", "t", "rho", "mass"];
    if asymptote {
        header.extend(["ratio", "ratio_to_r", "ratio_to_limit"]);
    }
    let rows = t.iter().enumerate().map(|(k, &tk)| {
        let mut row = vec![fmt17(l), fmt17(tk), fmt17(rho[k]), fmt17(mass[k])];
        if let Some(q) = &ratio {
            row.extend([fmt17(q[k]), fmt17(q[k] / r), fmt17(q[k] / limit)]);
        }
        row
    });
    match config.format_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(&header)?;
            for row in rows {
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Format::Text => {
            let line: Vec<String> = header.iter().map(|h| format!("{h:>24}")).collect();
            writeln!(out, "{}", line.join(" "))?;
            for row in rows {
                let line: Vec<String> = row.iter().map(|v| format!("{v:>24}")).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
        }
        Format::Json => write_json(
            out,
            &DensityRecord {
                l,
                t: t.clone(),
                rho,
                mass: mass.clone(),
                ratio,
                total_mass_f: f,
            },
        )?,
    }

    let total = *mass.last().expect("grid is non-empty");
    eprintln!(
        "mass on (0, {}] = {}, F(l) = {}, difference {}",
        fmt17(tmax),
        fmt17(total),
        fmt17(f),
        fmt17(total - f)
    );
    if asymptote {
        eprintln!("r(l) = {}, 2 cosh l = {}", fmt17(r), fmt17(limit));
    }
    // The mass check applies only once the range covers all but a negligible
    // tail.
    let envelope_tail = 16.0 * tmax * tmax * (-2.0 * tmax).exp() * r.max(limit).max(1.0);
    let checked = envelope_tail < 1e-2 * config.tolerances.mass_tol;
    Ok(if checked && (total - f).abs() > config.tolerances.mass_tol {
        Outcome::Fail
    } else {
        Outcome::Pass
    })
}

fn bins(width: f64, max: f64) -> Result<Vec<f64>, CliError> {
    if !(width > 0.0 && max > width && (max / width) <= 1e6) {
        return Err(CliError::Usage(format!("bad bins: width {width}, max {max}")));
    }
    let n = (max / width).round() as usize;
    Ok((0..=n).map(|k| k as f64 * width).collect())
}

#[derive(Serialize)]
struct BinsRecord<'a> {
    edges: &'a [f64],
    masses: &'a [f64],
    overflow: f64,
}

#[derive(Serialize)]
struct ChartRecord<'a> {
    seed: u64,
    n_samples: u64,
    a: f64,
    l: f64,
    mass: f64,
    stderr: f64,
    expected: f64,
    cdf_sup_distance: f64,
    bins: BinsRecord<'a>,
    digest: String,
}

fn write_bins_csv(out: Out, edges: &[f64], masses: &[f64]) -> Result<(), CliError> {
    let mut w = csv_writer(out);
    w.write_record(["lo", "hi", "mass"])?;
    for (e, m) in edges.windows(2).zip(masses) {
        w.write_record([fmt17(e[0]), fmt17(e[1]), fmt17(*m)])?;
    }
    w.flush()?;
    Ok(())
}

/// Estimates further than this many standard errors from the exact value
/// fail.
const MC_SIGMA: f64 = 5.0;

#[allow(clippy::too_many_arguments)]
pub fn montecarlo(
    config: &RunConfig,
    polygon: &OptionalPolygonArgs,
    chart: Option<f64>,
    samples: u64,
    bin_width: f64,
    bin_max: f64,
    out: Out,
) -> Result<Outcome, CliError> {
    let edges = bins(bin_width, bin_max)?;
    let seed = config.seed;
    let format = config.format_or(Format::Json);
    if let Some(a) = chart {
        let (mass, measure) = mc_class_measure(a, samples, seed, &edges)?;
        let expected = -8.0 * rogers_l(a)?;
        let record = ChartRecord {
            seed,
            n_samples: samples,
            a,
            l: length_from_a(a)?,
            mass: mass.estimate,
            stderr: mass.stderr,
            expected,
            cdf_sup_distance: cdf_sup_distance(a, &measure)?,
            bins: BinsRecord {
                edges: &measure.bin_edges,
                masses: &measure.masses,
                overflow: measure.overflow,
            },
            digest: measure.digest(),
        };
        match format {
            Format::Json => write_json(out, &record)?,
            Format::Csv => write_bins_csv(out, &measure.bin_edges, &measure.masses)?,
            Format::Text => {
                writeln!(out, "chart a = {}, l = {}", fmt17(a), fmt17(record.l))?;
                writeln!(out, "mass     = {} +- {}", fmt17(record.mass), fmt17(record.stderr))?;
                writeln!(out, "expected = {}", fmt17(expected))?;
                writeln!(out, "CDF sup distance = {}", fmt17(record.cdf_sup_distance))?;
                writeln!(out, "digest = {}", record.digest)?;
            }
        }
        eprintln!("digest {}", record.digest);
        let ok = (record.mass - expected).abs() <= MC_SIGMA * record.stderr;
        return Ok(if ok { Outcome::Pass } else { Outcome::Fail });
    }

    let p = build_polygon(polygon.regular, polygon.vertices.as_deref()).map_err(|e| match e {
        CliError::Usage(_) => CliError::Usage("give --regular, --vertices or --chart".into()),
        other => other,
    })?;
    let run = mc_polygon_measure(&p, samples, seed, &edges)?;
    let report = RunReport::new(&run);
    match format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => write_bins_csv(out, &report.bins.edges, &report.bins.masses)?,
        Format::Text => {
            writeln!(out, "seed = {seed}, samples per class = {samples}")?;
            writeln!(out, "{:>3} {:>3} {:>24} {:>24}", "i", "j", "mass", "stderr")?;
            for c in &report.per_class {
                writeln!(
                    out,
                    "{:>3} {:>3} {:>24} {:>24}",
                    c.i,
                    c.j,
                    fmt17(c.mass),
                    fmt17(c.stderr)
                )?;
            }
            writeln!(out, "cusp mass      = {}", fmt17(report.cusp_mass))?;
            writeln!(
                out,
                "total          = {} +- {}",
                fmt17(report.total),
                fmt17(run.total_stderr)
            )?;
            writeln!(out, "expected total = {}", fmt17(report.expected_total))?;
            writeln!(out, "digest = {}", report.digest)?;
        }
    }
    eprintln!("digest {}", report.digest);
    let ok = (run.total - run.expected_total).abs() <= MC_SIGMA * run.total_stderr;
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Serialize)]
struct LewinRow {
    r: u64,
    partial_sum: f64,
    tail_estimate: f64,
    remainder: f64,
}

pub fn lewin(config: &RunConfig, r_max: u64, out: Out) -> Result<Outcome, CliError> {
    if r_max < 2 {
        return Err(CliError::Usage(format!("--R must be at least 2, got {r_max}")));
    }
    let mut checkpoints: Vec<u64> = std::iter::successors(Some(10u64), |r| r.checked_mul(10))
        .take_while(|&r| r < r_max)
        .collect();
    checkpoints.push(r_max);
    let rows = checkpoints
        .into_iter()
        .map(|r| {
            let s = lewin_partial_sum(r)?;
            Ok(LewinRow {
                r,
                partial_sum: s,
                tail_estimate: lewin_tail_estimate(r),
                remainder: PI * PI / 6.0 - s,
            })
        })
        .collect::<Result<Vec<_>, ortholab::Error>>()?;
    match config.format_or(Format::Text) {
        Format::Json => write_json(out, &rows)?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["R", "partial_sum", "tail_estimate", "remainder"])?;
            for row in &rows {
                w.write_record([
                    row.r.to_string(),
                    fmt17(row.partial_sum),
                    fmt17(row.tail_estimate),
                    fmt17(row.remainder),
                ])?;
            }
            w.flush()?;
        }
        Format::Text => {
            writeln!(
                out,
                "{:>12} {:>24} {:>24} {:>24}",
                "R", "partial_sum", "tail_estimate", "pi^2/6 - sum"
            )?;
            for row in &rows {
                writeln!(
                    out,
                    "{:>12} {:>24} {:>24} {:>24}",
                    row.r,
                    fmt17(row.partial_sum),
                    fmt17(row.tail_estimate),
                    fmt17(row.remainder)
                )?;
            }
        }
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct VerifyRecord<'a> {
    #[serde(flatten)]
    report: &'a ortholab::verify::VerifyReport,
    passed: bool,
    digest: Option<String>,
}

pub fn verify(config: &RunConfig, suite: Suite, out: Out) -> Result<Outcome, CliError> {
    let report = run_suite(suite, config.seed, &config.tolerances);
    let passed = report.passed();
    match config.format_or(Format::Text) {
        Format::Json => write_json(
            out,
            &VerifyRecord {
                report: &report,
                passed,
                digest: report.digest(),
            },
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["criterion", "title", "check", "measured", "tolerance", "passed"])?;
            for r in &report.results {
                if let Some(e) = &r.error {
                    w.write_record([
                        r.id.to_string(),
                        r.title.clone(),
                        format!("error: {e}"),
                        "nan".into(),
                        "nan".into(),
                        "false".into(),
                    ])?;
                }
                for c in &r.checks {
                    w.write_record([
                        r.id.to_string(),
                        r.title.clone(),
                        c.label.clone(),
                        fmt17(c.measured),
                        fmt17(c.tolerance),
                        c.passed().to_string(),
                    ])?;
                }
            }
            w.flush()?;
        }
        Format::Text => {
            for r in &report.results {
                writeln!(out, "{r}")?;
            }
            let n_pass = report.results.iter().filter(|r| r.passed()).count();
            writeln!(
                out,
                "{n_pass}/{} criteria passed (seed {})",
                report.results.len(),
                report.seed
            )?;
            if let Some(d) = report.digest() {
                writeln!(out, "digest {d}")?;
            }
        }
    }
    Ok(if passed { Outcome::Pass } else { Outcome::Fail })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ends_at_tmax() {
        let g = grid(1.0, 0.3).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(grid(1.0, 0.25).unwrap().len(), 4);
        assert!(grid(400.0, 1.0).is_err());
        assert!(grid(1.0, 0.0).is_err());
    }

    #[test]
    fn grouping() {
        let g = grouped_cross_ratios(&[0.25, 0.25, 0.25, 1.0 / 3.0, 1.0 / 3.0]);
        assert_eq!(g, vec![(3, 0.25), (2, 1.0 / 3.0)]);
    }

    #[test]
    fn vertex_parsing() {
        let p = build_polygon(None, Some("0, 0.25,0.5,1,inf")).unwrap();
        assert_eq!(p.n(), 5);
        assert!(matches!(build_polygon(None, Some("0,x,1")), Err(CliError::Usage(_))));
        assert!(matches!(
            build_polygon(None, Some("0,1,0.5")),
            Err(CliError::Library(_))
        ));
    }
}
