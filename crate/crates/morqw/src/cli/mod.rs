//! Command-line front end: scenario assembly, command dispatch, exit codes.
//!
//! Three commands share one flat scenario schema (see [`config`]):
//!
//! * `point` — evaluate a single parameter set, print JSON observables;
//! * `sweep` — evaluate a 1D/2D grid, write one CSV/JSON table;
//! * `figure` — expand a bundled preset into its full set of tables.
//!
//! Settings combine in fixed precedence: built-in defaults, then `--config`
//! file, then `--figure` preset, then `--set KEY=VALUE` overrides, then
//! dedicated flags. Exit codes: 0 success, 2 usage/config errors, 3 a
//! directly requested evaluation failed, 4 output I/O errors.

mod config;
mod output;

pub use config::{ConfigError, OutputFormat, ScenarioConfig};
pub use output::{format_float, point_to_json, sweep_to_csv, sweep_to_json};

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::method::{lookup, MethodError, SteadyStateMethod};
use crate::sweep::{
    figure_preset, run_sweep, FigureId, FigurePreset, FigureVariant, SweepError, SweepResult,
};
use crate::types::{validate_params, SystemParams};

/// Steady-state magneto-optical rotation in a four-level quantum-well
/// waveguide: solves the driven, dissipative level dynamics, forms the two
/// circular susceptibilities, and propagates the probe to transmitted
/// intensities and polarization rotation.
#[derive(Debug, Parser)]
#[command(name = "morqw", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one parameter point and print its observables as JSON.
    Point(RunArgs),
    /// Evaluate a 1D or 2D grid and write one table.
    Sweep(RunArgs),
    /// Expand a bundled preset into its full set of data files.
    Figure(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file: flat `KEY = VALUE` lines or a flat JSON object.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override one scenario key (repeatable), e.g. --set delta_b=7.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Start from a bundled preset (fig2 … fig7).
    #[arg(long, value_name = "NAME")]
    figure: Option<String>,

    /// Output file; for `figure`, the output directory. Default: stdout
    /// (`figure`: current directory).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Table format for `sweep` and `figure` (`point` always prints JSON).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Evaluation strategy.
    #[arg(long, value_name = "NAME")]
    method: Option<String>,

    /// Worker threads for sweeps; default MORQW_WORKERS, then all cores.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

/// Any failure surfaced by a CLI command, tagged with its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad scenario input (exit 2).
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// Bad axis/grid/preset request (exit 2).
    #[error(transparent)]
    Sweep(#[from] SweepError),
    /// Command misuse not caught by the argument parser (exit 2).
    #[error("{0}")]
    Usage(String),
    /// A directly requested evaluation failed (exit 3).
    #[error(transparent)]
    Method(#[from] MethodError),
    /// Output could not be written (exit 4).
    #[error("cannot write {path}: {source}")]
    Io {
        /// Destination that failed.
        path: PathBuf,
        /// Underlying I/O error.
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Sweep(_) | CliError::Usage(_) => 2,
            CliError::Method(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

/// Parses `std::env::args`, runs the requested command, and reports failures
/// on stderr with the documented exit codes.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Point(args) => cmd_point(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Figure(args) => cmd_figure(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

/// Scenario assembled from defaults, config file, preset, and overrides.
struct Assembly {
    cfg: ScenarioConfig,
    preset: Option<FigurePreset>,
    /// Whether `--set` pinned the optical depth, which replaces a preset's
    /// depth list.
    alpha_l_overridden: bool,
}

fn assemble(args: &RunArgs, keep_preset_axes: bool) -> Result<Assembly, CliError> {
    let mut cfg = ScenarioConfig::default();
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }

    let preset = match &args.figure {
        Some(name) => Some(figure_preset(name.parse::<FigureId>()?)),
        None => None,
    };
    if let Some(p) = &preset {
        cfg.params = p.base;
        cfg.set_method(p.method)?;
        if keep_preset_axes {
            cfg.axis1 = Some(p.axes[0]);
            cfg.axis2 = p.axes.get(1).copied();
        }
        if !p.sweeps_alpha_l() {
            cfg.alpha_l = p.alpha_l[0];
        }
    }

    let mut alpha_l_overridden = false;
    for pair in &args.set {
        cfg.apply_set_pair(pair)?;
        if pair.split_once('=').map(|(k, _)| k.trim()) == Some("alpha_l") {
            alpha_l_overridden = true;
        }
    }

    if let Some(format) = args.format {
        cfg.format = format.into();
    }
    if let Some(method) = &args.method {
        cfg.set_method(method)?;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    if let Some(workers) = args.workers {
        if workers == 0 {
            return Err(CliError::Usage("--workers must be >= 1".into()));
        }
        cfg.workers = Some(workers);
    }

    validate_params(cfg.params).map_err(ConfigError::Param)?;
    Ok(Assembly {
        cfg,
        preset,
        alpha_l_overridden,
    })
}

fn resolved_method(cfg: &ScenarioConfig) -> &'static dyn SteadyStateMethod {
    lookup(&cfg.method).expect("config only accepts registered methods")
}

/// Worker count: explicit flag/config first, then MORQW_WORKERS, then the
/// rayon default (all cores).
fn resolve_workers(cfg: &ScenarioConfig) -> Result<Option<usize>, CliError> {
    if cfg.workers.is_some() {
        return Ok(cfg.workers);
    }
    match std::env::var("MORQW_WORKERS") {
        Ok(raw) => {
            let n: usize = raw.trim().parse().map_err(|_| {
                CliError::Usage(format!(
                    "MORQW_WORKERS must be a positive integer, got {raw:?}"
                ))
            })?;
            if n == 0 {
                return Err(CliError::Usage("MORQW_WORKERS must be >= 1".into()));
            }
            Ok(Some(n))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(std::env::VarError::NotUnicode(_)) => Err(CliError::Usage(
            "MORQW_WORKERS is not valid UTF-8".into(),
        )),
    }
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the ambient pool
/// when no count was requested. Row order is grid order either way, so
/// results are identical for every worker count.
fn run_with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| {
                    CliError::Usage(format!("cannot build a {n}-thread worker pool: {e}"))
                })?;
            Ok(pool.install(f))
        }
    }
}

fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `point`: evaluates one parameter set. A preset contributes its base
/// parameters, method, and depth, but its sweep axes are dropped; axes set
/// explicitly via config or `--set` are an error here.
fn cmd_point(args: &RunArgs) -> Result<(), CliError> {
    let assembly = assemble(args, false)?;
    let cfg = assembly.cfg;
    if cfg.axis1.is_some() || cfg.axis2.is_some() {
        return Err(CliError::Usage(
            "point evaluates a single parameter set; remove axis1/axis2 or use `morqw sweep`"
                .into(),
        ));
    }
    let observables = resolved_method(&cfg).evaluate(&cfg.params, cfg.alpha_l)?;
    let rendered = point_to_json(&observables);
    match &cfg.out {
        Some(path) => write_text(path, &rendered),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn render_table(result: &SweepResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => sweep_to_csv(result),
        OutputFormat::Json => sweep_to_json(result),
    }
}

/// `sweep`: evaluates one grid and writes one table to `--out` or stdout.
/// Presets work here only when they expand to exactly one table; the
/// multi-table presets belong to `morqw figure`.
fn cmd_sweep(args: &RunArgs) -> Result<(), CliError> {
    let assembly = assemble(args, true)?;
    let cfg = assembly.cfg;
    if let Some(preset) = &assembly.preset {
        let combinations = preset.combination_count();
        if combinations > 1 {
            return Err(CliError::Usage(format!(
                "preset {} expands to {combinations} tables; run `morqw figure --figure {}`",
                preset.id, preset.id
            )));
        }
    }
    let axes = collect_axes(&cfg)?;
    let workers = resolve_workers(&cfg)?;
    let method = resolved_method(&cfg);
    let result =
        run_with_workers(workers, || run_sweep(&cfg.params, &axes, cfg.alpha_l, method))??;
    let rendered = render_table(&result, cfg.format);
    match &cfg.out {
        Some(path) => write_text(path, &rendered),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn collect_axes(cfg: &ScenarioConfig) -> Result<Vec<crate::sweep::SweepAxis>, CliError> {
    match (cfg.axis1, cfg.axis2) {
        (Some(a), Some(b)) => Ok(vec![a, b]),
        (Some(a), None) => Ok(vec![a]),
        (None, Some(_)) => Err(CliError::Usage("axis2 is set but axis1 is not".into())),
        (None, None) => Err(CliError::Usage(
            "sweep needs an axis: set axis1=name:start:stop:count or use --figure".into(),
        )),
    }
}

/// `figure`: expands a preset into one table per variant × depth. `--out`
/// names the output directory (created if missing); filenames are
/// self-describing, e.g. `fig3_gamma21-0.05_al-58.csv`.
fn cmd_figure(args: &RunArgs) -> Result<(), CliError> {
    let assembly = assemble(args, true)?;
    let cfg = assembly.cfg;
    let Some(preset) = assembly.preset else {
        return Err(CliError::Usage(
            "figure requires --figure NAME (fig2 … fig7)".into(),
        ));
    };

    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.clone(),
        source,
    })?;

    let axes = collect_axes(&cfg)?;
    let depths: Vec<Option<f64>> = if preset.sweeps_alpha_l() {
        vec![None]
    } else if assembly.alpha_l_overridden {
        vec![Some(cfg.alpha_l)]
    } else {
        preset.alpha_l.iter().copied().map(Some).collect()
    };
    let workers = resolve_workers(&cfg)?;
    let method = resolved_method(&cfg);

    run_with_workers(workers, || -> Result<(), CliError> {
        for variant in &preset.variants {
            let params = overlay_variant(&cfg.params, &preset.base, &variant.params);
            validate_params(params).map_err(ConfigError::Param)?;
            for &depth in &depths {
                let result = run_sweep(&params, &axes, depth.unwrap_or(cfg.alpha_l), method)?;
                let rendered = render_table(&result, cfg.format);
                let path = dir.join(table_filename(preset.id, variant, depth, cfg.format));
                write_text(&path, &rendered)?;
                println!("wrote {} ({} rows)", path.display(), result.rows.len());
            }
        }
        Ok(())
    })?
}

/// Copies onto `target` the fields in which `variant` differs from the
/// preset base, so `--set` overrides survive variant expansion.
fn overlay_variant(
    target: &SystemParams,
    base: &SystemParams,
    variant: &SystemParams,
) -> SystemParams {
    let mut out = *target;
    macro_rules! overlay_fields {
        ($($field:ident),* $(,)?) => {
            $(
                if variant.$field != base.$field {
                    out.$field = variant.$field;
                }
            )*
        };
    }
    overlay_fields!(
        omega_plus, omega_minus, omega_1, omega_2, phi, delta_p, delta_pi, delta_b, delta_lh,
        gamma_31, gamma_32, gamma_41, gamma_42, gamma_d_21, gamma_d_31, gamma_d_32, gamma_d_41,
        gamma_d_42, gamma_d_43,
    );
    out
}

/// Self-describing table filename: preset name, variant label, and — when
/// the depth is a fixed scalar — an `al-` suffix.
fn table_filename(
    id: FigureId,
    variant: &FigureVariant,
    depth: Option<f64>,
    format: OutputFormat,
) -> String {
    let mut name = id.as_str().to_string();
    if !variant.label.is_empty() {
        name.push('_');
        name.push_str(&variant.label);
    }
    if let Some(al) = depth {
        name.push_str(&format!("_al-{al}"));
    }
    format!("{name}.{}", format.extension())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn bare_args() -> RunArgs {
        RunArgs {
            config: None,
            set: vec![],
            figure: None,
            out: None,
            format: None,
            method: None,
            workers: None,
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn precedence_is_defaults_config_preset_set_flags() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "method = analytic\ndelta_b = 3\nalpha_l = 12").unwrap();

        // Preset overrides the config file...
        let mut args = bare_args();
        args.config = Some(file.path().to_path_buf());
        args.figure = Some("fig2".into());
        let assembly = assemble(&args, true).unwrap();
        assert_eq!(assembly.cfg.method, "numeric");
        assert_eq!(assembly.cfg.params.delta_b, 9.0);
        assert_eq!(assembly.cfg.alpha_l, 0.0);
        assert!(!assembly.alpha_l_overridden);

        // ...--set overrides the preset...
        args.set = vec!["delta_b=4".into(), "alpha_l = 7".into(), "method=analytic".into()];
        let assembly = assemble(&args, true).unwrap();
        assert_eq!(assembly.cfg.params.delta_b, 4.0);
        assert_eq!(assembly.cfg.alpha_l, 7.0);
        assert_eq!(assembly.cfg.method, "analytic");
        assert!(assembly.alpha_l_overridden);

        // ...and dedicated flags win over --set.
        args.method = Some("numeric".into());
        let assembly = assemble(&args, true).unwrap();
        assert_eq!(assembly.cfg.method, "numeric");
    }

    #[test]
    fn config_without_preset_applies_directly() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "delta_b = 3").unwrap();
        let mut args = bare_args();
        args.config = Some(file.path().to_path_buf());
        let assembly = assemble(&args, true).unwrap();
        assert_eq!(assembly.cfg.params.delta_b, 3.0);
    }

    #[test]
    fn point_assembly_drops_preset_axes_but_keeps_depth_and_method() {
        let mut args = bare_args();
        args.figure = Some("fig6".into());
        let assembly = assemble(&args, false).unwrap();
        assert!(assembly.cfg.axis1.is_none());
        assert!(assembly.cfg.axis2.is_none());
        assert_eq!(assembly.cfg.alpha_l, 45.0);
        assert_eq!(assembly.cfg.method, "analytic");
    }

    #[test]
    fn assemble_rejects_invalid_params_and_figures() {
        let mut args = bare_args();
        args.set = vec!["omega_plus=-1".into()];
        assert!(matches!(
            assemble(&args, true),
            Err(CliError::Config(ConfigError::Param(_)))
        ));

        let mut args = bare_args();
        args.figure = Some("fig9".into());
        assert!(matches!(
            assemble(&args, true),
            Err(CliError::Sweep(SweepError::UnknownFigure(_)))
        ));
    }

    #[test]
    fn variant_overlay_preserves_user_overrides() {
        let preset = figure_preset(FigureId::Fig2);
        let user = SystemParams {
            omega_plus: 2.0,
            omega_minus: 2.0,
            ..preset.base
        };
        let overlaid =
            overlay_variant(&user, &preset.base, &preset.variants[1].params);
        assert_eq!(overlaid.omega_plus, 2.0, "user override survives");
        assert_eq!(overlaid.gamma_d_21, 0.05, "variant field applies");
        assert_eq!(overlaid.delta_b, 9.0, "preset base fields intact");
    }

    #[test]
    fn table_filenames_are_self_describing() {
        let fig3 = figure_preset(FigureId::Fig3);
        assert_eq!(
            table_filename(fig3.id, &fig3.variants[1], Some(58.0), OutputFormat::Csv),
            "fig3_gamma21-0.05_al-58.csv"
        );
        let fig7 = figure_preset(FigureId::Fig7);
        assert_eq!(
            table_filename(fig7.id, &fig7.variants[0], None, OutputFormat::Json),
            "fig7.json"
        );
        let fig5 = figure_preset(FigureId::Fig5);
        assert_eq!(
            table_filename(fig5.id, &fig5.variants[0], Some(30.0), OutputFormat::Csv),
            "fig5_al-30.csv"
        );
    }

    #[test]
    fn sweep_refuses_multi_table_presets() {
        let mut args = bare_args();
        args.figure = Some("fig3".into());
        let err = cmd_sweep(&args).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("morqw figure"));
    }

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::Sweep(SweepError::AxisCount(0)).exit_code(),
            2
        );
        let method_err = lookup("analytic")
            .unwrap()
            .evaluate(
                &SystemParams {
                    gamma_d_43: 0.05,
                    ..SystemParams::default()
                },
                0.0,
            )
            .unwrap_err();
        assert_eq!(CliError::Method(method_err).exit_code(), 3);
        assert_eq!(
            CliError::Io {
                path: PathBuf::from("/nope"),
                source: std::io::Error::from(std::io::ErrorKind::NotFound),
            }
            .exit_code(),
            4
        );
    }
}
