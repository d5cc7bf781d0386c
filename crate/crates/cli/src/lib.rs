//! Library behind the `gdo` binary: builds deformed oscillator algebras,
//! states and phase operators, runs their check suites and renders reports.
//!
//! Exit status: 0 when every check passes, 2 when a check fails, 1 on a
//! usage, configuration or construction error.

pub mod args;
pub mod commands;
pub mod render;

use std::io::Write;

use gdo_core::Expectation;

use crate::args::{Cli, Format, Global, Params, RunConfig};
use crate::commands::{Ctx, DEFAULT_MAX_DIM};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gdo_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub fn max_dim() -> Result<usize, CliError> {
    match std::env::var("GDO_MAX_DIM") {
        Err(_) => Ok(DEFAULT_MAX_DIM),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("GDO_MAX_DIM must be a positive integer, got {v:?}"))),
    }
}

/// Runs one command; `Ok(true)` when all checks pass.
pub fn run(cli: Cli) -> Result<bool, CliError> {
    let config = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let (name, params): (String, Params) = match (cli.command, config.command) {
        (Some(cmd), cfg) => {
            let name = cmd.name();
            if let Some(c) = cfg {
                if c != name {
                    return Err(CliError::Usage(format!(
                        "config names command {c:?} but the command line runs {name:?}"
                    )));
                }
            }
            (name.to_string(), cmd.into_params().overlay(config.params))
        }
        (None, Some(c)) => (c, config.params),
        (None, None) => return Err(CliError::Usage("no command given (see --help)".into())),
    };
    let global: Global = cli.global.overlay(config.global);
    if let Some(t) = global.tol {
        if !t.is_finite() || t < 0.0 {
            return Err(CliError::Usage("--tol must be a finite non-negative number".into()));
        }
    }
    let ctx = Ctx {
        seed: global.seed.unwrap_or(0),
        cap: max_dim()?,
    };
    let mut output = commands::run(&name, &params, &ctx)?;
    if let Some(t) = global.tol {
        for e in &mut output.report.entries {
            if e.expect == Expectation::AtMost {
                e.tolerance = t;
                e.pass = e.residual <= t;
            }
        }
    }
    let bytes = render::render(&output, global.format.unwrap_or(Format::Json));
    match &global.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "stdout".into(),
                    source,
                })?;
        }
    }
    Ok(output.report.all_pass())
}

