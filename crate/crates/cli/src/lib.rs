//! Command-line driver: check, translate, simulate and dump specifications.
//!
//! Everything is reachable through [`run`], which writes artifacts to one
//! stream and diagnostics to another, so tests can drive the tool in process.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use otsc_core::analyzer::{
    check_composition, classify_with_warnings, dump_model, object_modules, OtsModel,
};
use otsc_core::codegen::{emit_java_jml, translate_modules, CodegenOptions, Translation};
use otsc_core::exec::ExecMode;
use otsc_core::interp::{parse_scenario, DomainBounds, InterpError, InterpOptions, Interpreter};
use otsc_core::parser::parse_spec;
use otsc_core::{DiagCode, Diagnostic, Diagnostics, ModuleSet, SourceSpan};

/// Environment variable naming the configuration file used when `--config`
/// is absent.
pub const CONFIG_ENV: &str = "OTSC_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Diagnostics = 1,
    Usage = 2,
    Internal = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    JavaJml,
    Json,
}

/// Bounds section of the configuration file. Missing keys keep defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub int_min: Option<i64>,
    pub int_max: Option<i64>,
    pub id_min: Option<i64>,
    pub id_max: Option<i64>,
    pub max_rewrite_steps: Option<u64>,
}

/// Contents of the TOML configuration file. Every key is optional.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub ghost_name: Option<String>,
    pub implicit_stutter: Option<bool>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub bounds: BoundsConfig,
    /// Visible sort to Java type.
    #[serde(default)]
    pub sorts: BTreeMap<String, String>,
    /// Module name to class name.
    #[serde(default)]
    pub class_names: BTreeMap<String, String>,
    /// `MODULE.op` to method name.
    #[serde(default)]
    pub method_names: BTreeMap<String, String>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("invalid configuration {path}: {source}")]
    Parse {
        path: String,
        source: toml::de::Error,
    },
}

impl Config {
    pub fn from_toml(text: &str, path: &str) -> Result<Config, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: name.clone(),
            source,
        })?;
        Config::from_toml(&text, &name)
    }

    /// The explicit path, else the one named by [`CONFIG_ENV`], else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Config, ConfigError> {
        match explicit {
            Some(p) => Config::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Config::load(Path::new(&p)),
                _ => Ok(Config::default()),
            },
        }
    }

    pub fn codegen_options(&self, ghost_flag: Option<&str>) -> CodegenOptions {
        let mut o = CodegenOptions::default();
        if let Some(g) = ghost_flag.or(self.ghost_name.as_deref()) {
            o.ghost_name = g.to_string();
        }
        o.class_names = self.class_names.clone();
        o.method_names = self.method_names.clone();
        for (sort, ty) in &self.sorts {
            o.sorts.insert(sort, ty);
        }
        o
    }

    pub fn domain_bounds(&self, flags: &BoundsArgs) -> DomainBounds {
        let d = DomainBounds::default();
        let c = &self.bounds;
        DomainBounds {
            int_range: (
                flags.int_min.or(c.int_min).unwrap_or(d.int_range.0),
                flags.int_max.or(c.int_max).unwrap_or(d.int_range.1),
            ),
            id_range: (
                flags.id_min.or(c.id_min).unwrap_or(d.id_range.0),
                flags.id_max.or(c.id_max).unwrap_or(d.id_range.1),
            ),
            max_rewrite_steps: flags
                .fuel
                .or(c.max_rewrite_steps)
                .unwrap_or(d.max_rewrite_steps),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "otsc",
    version,
    about = "Checks, simulates and translates OTS specifications"
)]
pub struct Cli {
    /// Configuration file (TOML). Defaults to $OTSC_CONFIG.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Do all work on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse, classify and check composition conditions.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Generate one contract-annotated class per object module.
    Translate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Output directory (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Name of the ghost field holding the pre-state.
        #[arg(long)]
        ghost_name: Option<String>,
    },
    /// Run a scenario and print the observations after every step.
    Simulate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Module to run; may be omitted when the files define one object.
        #[arg(long)]
        module: Option<String>,
        /// JSON list of `{"transition": ..., "args": [...]}` steps.
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        bounds: BoundsArgs,
        /// Treat a missing equation for an ineffective transition as stutter.
        #[arg(long)]
        implicit_stutter: Option<bool>,
        /// Print one JSON object per step instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print the analyzed model as JSON.
    Dump {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        module: Option<String>,
    },
}

#[derive(Clone, Debug, Default, Args)]
pub struct BoundsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub int_min: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub int_max: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub id_min: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub id_max: Option<i64>,
    /// Rewrite step budget per reduction.
    #[arg(long)]
    pub fuel: Option<u64>,
}

/// Output streams of one invocation.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

impl Io<'_> {
    fn diagnostics(&mut self, diags: &Diagnostics) {
        let _ = write!(self.err, "{diags}");
    }

    fn usage(&mut self, msg: impl std::fmt::Display) -> ExitStatus {
        let _ = writeln!(self.err, "otsc: {msg}");
        ExitStatus::Usage
    }
}

/// Parsed and checked input: the module set and models of its objects.
pub struct Checked {
    pub set: ModuleSet,
    pub models: Vec<OtsModel>,
    pub diagnostics: Diagnostics,
}

/// Parses `files`, classifies every object module and checks the
/// composition conditions of composites. Errors come back in
/// `diagnostics`; models are present only for modules that classified.
pub fn check_files(files: &[PathBuf]) -> Result<Checked, Diagnostics> {
    let set = parse_spec(files)?;
    let mut diagnostics = Diagnostics::new();
    let mut models: Vec<OtsModel> = Vec::new();
    for m in object_modules(&set) {
        match classify_with_warnings(&set, &m.name) {
            Ok((model, warnings)) => {
                diagnostics.extend(warnings);
                models.push(model);
            }
            Err(d) => diagnostics.extend(d),
        }
    }
    for model in models.iter().filter(|m| m.is_composite()) {
        let mut components: Vec<OtsModel> = Vec::new();
        for p in &model.projections {
            if components
                .iter()
                .any(|c| c.module_name == p.component_module)
            {
                continue;
            }
            if let Some(c) = models.iter().find(|c| c.module_name == p.component_module) {
                components.push(c.clone());
            }
        }
        diagnostics.extend(check_composition(model, &components, &set));
    }
    diagnostics.sort();
    Ok(Checked {
        set,
        models,
        diagnostics,
    })
}

fn is_io(diags: &Diagnostics) -> bool {
    diags.iter().any(|d| d.code == DiagCode::Io)
}

/// Runs the checks and reports. `None` means the caller should stop with
/// the returned status.
fn checked_or_exit(files: &[PathBuf], io: &mut Io) -> Result<Checked, ExitStatus> {
    match check_files(files) {
        Err(d) => {
            io.diagnostics(&d);
            Err(if is_io(&d) {
                ExitStatus::Usage
            } else {
                ExitStatus::Diagnostics
            })
        }
        Ok(c) => {
            io.diagnostics(&c.diagnostics);
            if c.diagnostics.has_errors() {
                Err(ExitStatus::Diagnostics)
            } else {
                Ok(c)
            }
        }
    }
}

fn pick_module(checked: &Checked, requested: Option<&str>) -> Result<String, String> {
    match requested {
        Some(m) if checked.models.iter().any(|x| x.module_name == m) => Ok(m.to_string()),
        Some(m) => Err(format!("no object module named `{m}`")),
        None => match checked.models.as_slice() {
            [only] => Ok(only.module_name.clone()),
            [] => Err("the input defines no object module".into()),
            many => {
                let names: Vec<&str> = many.iter().map(|m| m.module_name.as_str()).collect();
                Err(format!(
                    "several object modules ({}); choose one with --module",
                    names.join(", ")
                ))
            }
        },
    }
}

fn module_span(set: &ModuleSet, module: &str) -> SourceSpan {
    set.get(module)
        .map(|m| m.span.clone())
        .unwrap_or_else(SourceSpan::builtin)
}

/// Translations of every object module, in dependency order.
pub fn translate_checked(
    checked: &Checked,
    opts: &CodegenOptions,
    mode: ExecMode,
) -> Result<Vec<Translation>, Diagnostic> {
    let modules: Vec<String> = checked
        .models
        .iter()
        .map(|m| m.module_name.clone())
        .collect();
    translate_modules(&checked.set, &modules, opts, mode).map_err(|(module, e)| {
        Diagnostic::error(
            DiagCode::Codegen,
            module_span(&checked.set, &module),
            e.to_string(),
        )
    })
}

/// File name and contents for one translation.
pub fn render(t: &Translation, format: Format) -> (String, String) {
    match format {
        Format::JavaJml => (format!("{}.java", t.class.name), emit_java_jml(&t.class)),
        Format::Json => (format!("{}.json", t.class.name), t.class.to_json()),
    }
}

fn interp_diagnostic(e: &InterpError, span: SourceSpan) -> Diagnostic {
    let code = if e.is_projection_absent() {
        DiagCode::ProjectionAbsent
    } else {
        DiagCode::Interpreter
    };
    Diagnostic::error(code, span, e.to_string())
}

pub fn run(cli: Cli, io: &mut Io) -> ExitStatus {
    let config = match Config::resolve(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return io.usage(e),
    };
    let mode = if cli.sequential {
        ExecMode::Sequential
    } else {
        ExecMode::Parallel
    };
    match cli.command {
        Command::Check { files } => match checked_or_exit(&files, io) {
            Ok(_) => ExitStatus::Success,
            Err(s) => s,
        },
        Command::Translate {
            files,
            out,
            format,
            ghost_name,
        } => {
            let checked = match checked_or_exit(&files, io) {
                Ok(c) => c,
                Err(s) => return s,
            };
            let opts = config.codegen_options(ghost_name.as_deref());
            let translations = match translate_checked(&checked, &opts, mode) {
                Ok(t) => t,
                Err(d) => {
                    io.diagnostics(&d.into());
                    return ExitStatus::Diagnostics;
                }
            };
            let format = format.or(config.format).unwrap_or_default();
            let dir = out
                .or(config.out_dir.clone())
                .unwrap_or_else(|| PathBuf::from("."));
            if let Err(e) = std::fs::create_dir_all(&dir) {
                let _ = writeln!(io.err, "otsc: cannot create {}: {e}", dir.display());
                return ExitStatus::Internal;
            }
            for t in &translations {
                io.diagnostics(&Diagnostics(t.warnings.clone()));
                let (name, text) = render(t, format);
                let path = dir.join(name);
                if let Err(e) = std::fs::write(&path, text) {
                    let _ = writeln!(io.err, "otsc: cannot write {}: {e}", path.display());
                    return ExitStatus::Internal;
                }
                let _ = writeln!(io.out, "{}", path.display());
            }
            ExitStatus::Success
        }
        Command::Simulate {
            files,
            module,
            scenario,
            bounds,
            implicit_stutter,
            json,
        } => {
            let checked = match checked_or_exit(&files, io) {
                Ok(c) => c,
                Err(s) => return s,
            };
            let module = match pick_module(&checked, module.as_deref()) {
                Ok(m) => m,
                Err(msg) => return io.usage(msg),
            };
            let scenario_name = scenario.display().to_string();
            let steps = match std::fs::read_to_string(&scenario) {
                Ok(text) => match parse_scenario(&text) {
                    Ok(s) => s,
                    Err(e) => return io.usage(format!("invalid scenario {scenario_name}: {e}")),
                },
                Err(e) => return io.usage(format!("cannot read {scenario_name}: {e}")),
            };
            let bounds = config.domain_bounds(&bounds);
            if let Err(e) = bounds.validate() {
                return io.usage(e);
            }
            let opts = InterpOptions {
                implicit_stutter: implicit_stutter.or(config.implicit_stutter).unwrap_or(true),
                mode,
            };
            let interp = match Interpreter::with_options(&checked.set, &module, bounds, opts) {
                Ok(i) => i,
                Err(d) => {
                    io.diagnostics(&d);
                    return ExitStatus::Diagnostics;
                }
            };
            match interp.run_scenario(&steps) {
                Ok(trace) => {
                    let text = if json {
                        trace.to_json_lines()
                    } else {
                        trace.to_text()
                    };
                    let _ = io.out.write_all(text.as_bytes());
                    ExitStatus::Success
                }
                Err(e) => {
                    io.diagnostics(
                        &interp_diagnostic(&e, SourceSpan::point(scenario_name, 1, 1)).into(),
                    );
                    ExitStatus::Diagnostics
                }
            }
        }
        Command::Dump { files, module } => {
            let checked = match checked_or_exit(&files, io) {
                Ok(c) => c,
                Err(s) => return s,
            };
            let module = match pick_module(&checked, module.as_deref()) {
                Ok(m) => m,
                Err(msg) => return io.usage(msg),
            };
            let model = checked
                .models
                .iter()
                .find(|m| m.module_name == module)
                .expect("picked module");
            let _ = io.out.write_all(dump_model(model).as_bytes());
            ExitStatus::Success
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let text = r#"
ghost_name = "pre"
implicit_stutter = false
out_dir = "gen"
format = "json"

[bounds]
int_min = -5
id_max = 4

[sorts]
Money = "long"

[class_names]
"ACCOUNT-SYSTEM" = "Bank"

[method_names]
"ACCOUNT.read" = "balance"
"#;
        let c = Config::from_toml(text, "t.toml").unwrap();
        assert_eq!(c.format, Some(Format::Json));
        assert_eq!(c.out_dir, Some(PathBuf::from("gen")));
        let b = c.domain_bounds(&BoundsArgs::default());
        assert_eq!(b.int_range, (-5, 3));
        assert_eq!(b.id_range, (0, 4));
        let flags = BoundsArgs {
            int_min: Some(-1),
            ..Default::default()
        };
        assert_eq!(c.domain_bounds(&flags).int_range, (-1, 3));
        let o = c.codegen_options(None);
        assert_eq!(o.ghost_name, "pre");
        assert_eq!(o.class_name("ACCOUNT-SYSTEM"), "Bank");
        assert_eq!(o.sorts.get("Money").unwrap().ty, "long");
        assert_eq!(c.codegen_options(Some("old")).ghost_name, "old");
    }

    #[test]
    fn unknown_config_key_rejected() {
        assert!(matches!(
            Config::from_toml("colour = 1", "t.toml"),
            Err(ConfigError::Parse { .. })
        ));
    }

    #[test]
    fn defaults_without_config() {
        let c = Config::default();
        assert_eq!(
            c.domain_bounds(&BoundsArgs::default()),
            DomainBounds::default()
        );
        assert_eq!(c.codegen_options(None), CodegenOptions::default());
    }

    #[test]
    fn exit_codes() {
        let codes: Vec<i32> = [
            ExitStatus::Success,
            ExitStatus::Diagnostics,
            ExitStatus::Usage,
            ExitStatus::Internal,
        ]
        .iter()
        .map(|s| s.code())
        .collect();
        assert_eq!(codes, vec![0, 1, 2, 3]);
    }
}
