//! Subcommand bodies. Each one takes a fully merged [`Config`], writes its
//! artifacts into an output directory and finishes with a manifest that
//! [`replay`] can run again.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use spiroplanck::coverage::{
    coverage_binomial, coverage_poisson, density, le_cam_bound, p_r, total_variation,
};
use spiroplanck::curve::{generate_curve, CurvePoint};
use spiroplanck::oracle::{compare_to_formula, simulate};
use spiroplanck::planner::{run_on_points, trace_to_rows, Outcome, TRACE_COLUMNS};
use spiroplanck::radiometry::{spectral_curve, SpectralForm, SpectralParams};

use crate::bench;
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::format::{exact, sig9};
use crate::manifest::RunManifest;
use crate::svg;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spirograph,
    Plan,
    Planck,
    Coverage,
    MonteCarlo,
    Bench,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Spirograph,
        Command::Plan,
        Command::Planck,
        Command::Coverage,
        Command::MonteCarlo,
        Command::Bench,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spirograph => "spirograph",
            Command::Plan => "plan",
            Command::Planck => "planck",
            Command::Coverage => "coverage",
            Command::MonteCarlo => "montecarlo",
            Command::Bench => "bench",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: Command,
    pub manifest: PathBuf,
    pub artifacts: Vec<PathBuf>,
    /// Human-readable summary lines.
    pub messages: Vec<String>,
    pub warnings: Vec<String>,
    /// Set by `plan`.
    pub outcome: Option<Outcome>,
}

pub fn manifest_path(out_dir: &Path, command: Command) -> PathBuf {
    out_dir.join(format!("{}.manifest", command.name()))
}

struct Emitter {
    out_dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Emitter {
    fn new(out_dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
            path: out_dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }
}

/// Runs `command` with `config` (flags already merged) into `out_dir`.
pub fn execute(command: Command, mut config: Config, out_dir: &Path) -> Result<RunReport> {
    config.materialize()?;
    let mut emitter = Emitter::new(out_dir)?;
    let mut report = RunReport {
        command,
        manifest: manifest_path(out_dir, command),
        artifacts: Vec::new(),
        messages: Vec::new(),
        warnings: Vec::new(),
        outcome: None,
    };
    let seed = match command {
        Command::Spirograph => spirograph(&config, &mut emitter, &mut report)?,
        Command::Plan => plan(&config, &mut emitter, &mut report)?,
        Command::Planck => planck(&config, &mut emitter, &mut report)?,
        Command::Coverage => coverage(&config, &mut emitter, &mut report)?,
        Command::MonteCarlo => montecarlo(&config, &mut emitter, &mut report)?,
        Command::Bench => bench_cmd(&config, &mut emitter, &mut report)?,
    };
    let mut manifest = RunManifest::new(command.name(), config, seed);
    manifest.artifacts = emitter.written.clone();
    let name = format!("{}.manifest", command.name());
    emitter.write(&name, &manifest.render()?)?;
    report.artifacts = emitter.written;
    Ok(report)
}

/// Re-runs the command recorded in a manifest, writing into `out_dir`.
pub fn replay(manifest: &Path, out_dir: &Path) -> Result<RunReport> {
    let m = RunManifest::load(manifest)?;
    let command = Command::from_name(&m.command).ok_or_else(|| CliError::Parse {
        path: manifest.display().to_string(),
        message: format!("unknown command `{}`", m.command),
    })?;
    execute(command, m.config, out_dir)
}

fn spirograph(config: &Config, emitter: &mut Emitter, report: &mut RunReport) -> Result<Option<u64>> {
    let params = config.curve()?;
    let curve = generate_curve(&params)?;
    let mut csv = String::from("t,x,y\n");
    for p in &curve {
        let _ = writeln!(csv, "{},{},{}", sig9(p.t), sig9(p.x), sig9(p.y));
    }
    emitter.write("spirograph.csv", &csv)?;
    let xy: Vec<(f64, f64)> = curve.iter().map(|p| (p.x, p.y)).collect();
    let title = format!("Spirograph r1={} r2={} a={}", sig9(params.r1), sig9(params.r2), sig9(params.a));
    emitter.write("spirograph.svg", &svg::curve(&xy, &title))?;
    report.messages.push(format!("{} curve samples", curve.len()));
    Ok(None)
}

/// Affine map of the curve's bounding box into the field, centred, aspect
/// preserved, with a 5% margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMapping {
    pub scale: f64,
    pub center: (f64, f64),
    pub side: f64,
}

impl FieldMapping {
    pub fn fit(points: &[CurvePoint<f64>], side: f64) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in points {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        if points.is_empty() {
            (x0, y0, x1, y1) = (0.0, 0.0, 0.0, 0.0);
        }
        let extent = (x1 - x0).max(y1 - y0);
        let scale = if extent > 0.0 { 0.9 * side / extent } else { 1.0 };
        Self {
            scale,
            center: (0.5 * (x0 + x1), 0.5 * (y0 + y1)),
            side,
        }
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (
            0.5 * self.side + (x - self.center.0) * self.scale,
            0.5 * self.side + (y - self.center.1) * self.scale,
        )
    }
}

fn plan(config: &Config, emitter: &mut Emitter, report: &mut RunReport) -> Result<Option<u64>> {
    let planner = config.planner()?;
    let curve = generate_curve(&planner.curve)?;
    let result = run_on_points(&planner, &curve)?;
    let mapping = FieldMapping::fit(&curve, planner.field.side_length);

    let mut csv = String::from("index,t,x,y,field_x,field_y\n");
    let mut nodes = Vec::with_capacity(result.placed.len());
    for (i, p) in result.placed.iter().enumerate() {
        let (fx, fy) = mapping.apply(p.x, p.y);
        nodes.push((fx, fy));
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            i + 1,
            sig9(p.t),
            sig9(p.x),
            sig9(p.y),
            sig9(fx),
            sig9(fy)
        );
    }
    emitter.write("placement.csv", &csv)?;

    let mut trace = TRACE_COLUMNS.join(",");
    trace.push('\n');
    for row in trace_to_rows(&result) {
        let _ = writeln!(
            trace,
            "{},{},{},{},{},{}",
            row.iteration,
            row.n_nodes,
            exact(row.density),
            exact(row.p_isolated),
            exact(row.radiance),
            row.accepted
        );
    }
    emitter.write("trace.csv", &trace)?;

    let mapped_curve: Vec<(f64, f64)> = curve.iter().map(|p| mapping.apply(p.x, p.y)).collect();
    let title = format!(
        "SpiroPlanck placement: N={} p={} ({})",
        result.n_final,
        sig9(result.p_final),
        result.outcome
    );
    emitter.write(
        "placement.svg",
        &svg::placement(planner.field.side_length, planner.field.range, &mapped_curve, &nodes, &title),
    )?;

    report.messages.push(format!(
        "outcome={} N={} lambda={} p={} iterations={}",
        result.outcome,
        result.n_final,
        sig9(result.density_final),
        sig9(result.p_final),
        result.trace.len()
    ));
    if result.outcome != Outcome::Converged {
        report.warnings.push(format!(
            "planner stopped with {} at N={} (p={} < threshold {})",
            result.outcome,
            result.n_final,
            sig9(result.p_final),
            sig9(planner.threshold)
        ));
    }
    report.outcome = Some(result.outcome);
    Ok(match planner.select {
        spiroplanck::planner::SelectPolicy::Random { seed } => Some(seed),
        spiroplanck::planner::SelectPolicy::Sequential => None,
    })
}

fn planck(config: &Config, emitter: &mut Emitter, report: &mut RunReport) -> Result<Option<u64>> {
    let section = &config.planck;
    if section.temperatures.is_empty() {
        return Err(CliError::Config("[planck] at least one temperature is required".into()));
    }
    if let Some(t) = section.temperatures.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(CliError::Config(format!("[planck] temperature must be positive, got {t}")));
    }
    let grid = config.wavelengths()?;
    let form: SpectralForm = section.form.into();
    let curves = section
        .temperatures
        .iter()
        .map(|&t| {
            spectral_curve(&SpectralParams {
                temperature: t,
                grid: grid.clone(),
                constants: section.constants.constants(),
                form,
            })
        })
        .collect::<spiroplanck::Result<Vec<_>>>()?;

    let mut csv = String::from("lambda_m");
    for t in &section.temperatures {
        let _ = write!(csv, ",T_{}", sig9(*t));
    }
    csv.push('\n');
    for (i, w) in grid.iter().enumerate() {
        csv.push_str(&exact(*w));
        for c in &curves {
            csv.push(',');
            csv.push_str(&exact(c[i].1));
        }
        csv.push('\n');
    }
    emitter.write("planck.csv", &csv)?;

    let series = section
        .temperatures
        .iter()
        .zip(&curves)
        .enumerate()
        .map(|(i, (t, c))| svg::Series {
            label: format!("T = {}", sig9(*t)),
            points: c.iter().map(|&(w, v)| (w * 1e9, v)).collect(),
            markers: i == 2,
        })
        .collect();
    let y_label = match form {
        SpectralForm::Radiance => "Intensity (W m^-3)",
        SpectralForm::EnergyDensity => "Energy density (J m^-4)",
    };
    let plot = svg::Plot {
        title: "Wavelength and Intensity",
        x_label: "Wavelength (nm)",
        y_label,
        series,
    };
    emitter.write("planck.svg", &svg::line_plot(&plot))?;
    report
        .messages
        .push(format!("{} wavelengths x {} temperatures", grid.len(), curves.len()));
    Ok(None)
}

fn coverage(config: &Config, emitter: &mut Emitter, report: &mut RunReport) -> Result<Option<u64>> {
    let field = config.field()?;
    let n_nodes = usize::try_from(config.coverage.n_nodes)
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| CliError::Config("[coverage] n_nodes must be at least 1".into()))?;
    let binomial = coverage_binomial(&field, n_nodes)?;
    let lambda = density(&field, n_nodes);
    let poisson = coverage_poisson(lambda, n_nodes - 1)?;
    let tv = total_variation(&binomial.mass, &poisson.mass);
    let bound = le_cam_bound(n_nodes - 1, p_r(&field)?);

    let mut csv = String::from("n,binomial,poisson\n");
    for (n, (b, p)) in binomial.mass.iter().zip(&poisson.mass).enumerate() {
        let _ = writeln!(csv, "{n},{},{}", exact(*b), exact(*p));
    }
    let _ = writeln!(csv, "# tv_distance={},le_cam_bound={}", exact(tv), exact(bound));
    emitter.write("coverage.csv", &csv)?;
    report.messages.push(format!(
        "N={n_nodes} lambda={} TV(binomial, poisson)={} Le Cam bound={}",
        sig9(lambda),
        sig9(tv),
        sig9(bound)
    ));
    Ok(None)
}

fn montecarlo(config: &Config, emitter: &mut Emitter, report: &mut RunReport) -> Result<Option<u64>> {
    let trials = config.trials()?;
    let stats = simulate(&trials)?;
    let lambda = density(&trials.field, trials.n_nodes);
    let cmp = compare_to_formula(&stats, lambda, trials.n_nodes)?;

    let mut csv = String::from("metric,value,stderr\n");
    let mut row = |name: &str, value: String, stderr: Option<f64>| {
        let _ = writeln!(csv, "{name},{value},{}", stderr.map(exact).unwrap_or_default());
    };
    row("n_nodes", trials.n_nodes.to_string(), None);
    row("trials", trials.trials.to_string(), None);
    row("lambda", exact(lambda), None);
    row("p_no_isolated", exact(stats.p_no_isolated), Some(stats.p_no_isolated_stderr));
    row("formula_p", exact(cmp.formula_p), None);
    row("isolation_gap", exact(cmp.isolation_gap), Some(cmp.isolation_stderr));
    row("mean_isolated_count", exact(stats.mean_isolated_count), Some(stats.mean_isolated_stderr));
    row("predicted_mean_isolated", exact(cmp.predicted_mean_isolated), None);
    row("tv_binomial", exact(cmp.tv_binomial), None);
    row("tv_poisson", exact(cmp.tv_poisson), None);
    row("stderr_reliable", stats.stderr_reliable.to_string(), None);
    row("degenerate", cmp.degenerate.to_string(), None);
    emitter.write("montecarlo.csv", &csv)?;

    let p_r = lambda / trials.n_nodes as f64;
    let binomial = spiroplanck::coverage::coverage_binomial(&trials.field, trials.n_nodes)?;
    let poisson = coverage_poisson(lambda, trials.n_nodes)?;
    let mut hist = String::from("n,empirical,stderr,binomial,poisson\n");
    for n in 0..=trials.n_nodes {
        let _ = writeln!(
            hist,
            "{n},{},{},{},{}",
            exact(stats.coverage_histogram[n]),
            exact(stats.coverage_histogram_stderr[n]),
            exact(binomial.mass.get(n).copied().unwrap_or(0.0)),
            exact(poisson.mass[n])
        );
    }
    emitter.write("montecarlo_histogram.csv", &hist)?;

    let mut text = String::new();
    let _ = writeln!(text, "Monte Carlo deployment check");
    let _ = writeln!(
        text,
        "field {} m x {} m, range {} m, N = {}, {} trials, topology {}, seed {}",
        sig9(trials.field.side_length),
        sig9(trials.field.side_length),
        sig9(trials.field.range),
        trials.n_nodes,
        trials.trials,
        trials.topology.as_str(),
        trials.seed
    );
    let _ = writeln!(text, "density lambda = {}, P_R = {}", sig9(lambda), sig9(p_r));
    let _ = writeln!(
        text,
        "P(no isolated node): simulated {} +/- {}, formula (1 - e^-lambda)^N = {}, gap {}{}",
        sig9(stats.p_no_isolated),
        sig9(stats.p_no_isolated_stderr),
        sig9(cmp.formula_p),
        sig9(cmp.isolation_gap),
        cmp.isolation_gap_sigmas
            .map(|s| format!(" ({} standard errors)", sig9(s)))
            .unwrap_or_default()
    );
    let _ = writeln!(
        text,
        "isolated nodes per trial: simulated {} +/- {}, predicted N e^-lambda = {}",
        sig9(stats.mean_isolated_count),
        sig9(stats.mean_isolated_stderr),
        sig9(cmp.predicted_mean_isolated)
    );
    let _ = writeln!(
        text,
        "coverage histogram TV distance: binomial {}, poisson {}",
        sig9(cmp.tv_binomial),
        sig9(cmp.tv_poisson)
    );
    if !stats.stderr_reliable {
        let _ = writeln!(
            text,
            "note: only {} trial(s); standard errors are unreliable",
            trials.trials
        );
    }
    if cmp.degenerate {
        let _ = writeln!(
            text,
            "note: a single node is always isolated, so the formula's {} is an expected divergence",
            sig9(cmp.formula_p)
        );
    }
    emitter.write("montecarlo_report.txt", &text)?;
    report.messages.extend(text.lines().map(str::to_owned));
    Ok(Some(trials.seed))
}

fn bench_cmd(config: &Config, emitter: &mut Emitter, report: &mut RunReport) -> Result<Option<u64>> {
    let rows = match &config.bench.reference {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            bench::parse(&text, &path.display().to_string())?
        }
        None => bench::bundled(),
    };
    emitter.write("bench.csv", &bench::render(&rows))?;
    let series_of = |label: &str, pick: fn(&bench::ReferenceRow) -> u64| svg::Series {
        label: label.to_owned(),
        points: rows.iter().map(|r| (r.nodes as f64, pick(r) as f64)).collect(),
        markers: true,
    };
    let plot = svg::Plot {
        title: "OSPF overhead",
        x_label: "Number of nodes",
        y_label: "OSPF overhead",
        series: vec![
            series_of("Pt-to-Mpt simulation", |r| r.pt_mpt_simulation),
            series_of("Pt-to-Mpt emulation", |r| r.pt_mpt_emulation),
            series_of("SpiroPlanck", |r| r.spiroplanck),
        ],
    };
    emitter.write("bench.svg", &svg::line_plot(&plot))?;
    report.messages.push(format!("{} reference rows", rows.len()));
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(Command::from_name(c.name()), Some(c));
        }
        assert_eq!(Command::from_name("rerun"), None);
    }

    #[test]
    fn mapping_fits_inside_field() {
        let pts = [
            CurvePoint { x: -275.0, y: -100.0, t: 0.0 },
            CurvePoint { x: 275.0, y: 100.0, t: 1.0 },
        ];
        let m = FieldMapping::fit(&pts, 100.0);
        let (a, b) = (m.apply(-275.0, -100.0), m.apply(275.0, 100.0));
        assert!((a.0 - 5.0).abs() < 1e-12 && (b.0 - 95.0).abs() < 1e-12);
        assert!((a.1 - (50.0 - 100.0 * m.scale)).abs() < 1e-12);
        assert!((m.apply(0.0, 0.0).0 - 50.0).abs() < 1e-12);
    }
}
