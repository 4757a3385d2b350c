//! Command-line front end: argument parsing, subcommands and report output.

pub mod acceptance;
pub mod args;
pub mod commands;
pub mod io;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};

use args::{Cli, Command};
use output::Report;

pub fn run(cli: &Cli) -> Result<Report> {
    use commands::*;
    match &cli.command {
        Command::FieldSelftest { field, k, seed, all_fields } => field_selftest(field, *k, *seed, *all_fields),
        Command::Characters { field, table } => characters(field, *table),
        Command::Dirichlet { field, n, k, bank, seed, all_fields } => {
            dirichlet_cmd(field, *n, *k, *bank, *seed, *all_fields)
        }
        Command::KernelAudit { field, nmax, k, all_fields } => kernel_audit(field, *nmax, *k, *all_fields),
        Command::SnNorms { field, w, p, k, nmax, budget, seed } => {
            sn_norms(&field.field()?, w, *p, *k, *nmax, *budget, *seed)
        }
        Command::Ap { field, w, p, k } => ap(&field.field()?, w, *p, *k),
        Command::Doubling { field, w, k } => doubling(&field.field()?, w, *k),
        Command::RhiProbe { field, w, k } => rhi(&field.field()?, w, *k),
        Command::AinfProbe { field, w, k, samples, seed } => ainf(&field.field()?, w, *k, *samples, *seed),
        Command::Maximal { field, input, k, seed, m, kind, s } => {
            maximal_cmd(field, input.as_deref(), *k, *seed, *m, *kind, *s)
        }
        Command::Buckley { field, p, theta, k, m } => buckley(&field.field()?, *p, theta, *k, *m),
        Command::MSharpProbe { field, p, w, k, seed, random } => {
            m_sharp(&field.field()?, *p, w, *k, *seed, *random)
        }
        Command::Schauder { field, phi, klist, n } => schauder(field, phi, klist, *n),
        Command::Tiling { field, omega, t, standard, k, spectral, move_cell } => tiling(
            field,
            omega.as_deref(),
            t.as_deref(),
            *standard,
            *k,
            *spectral,
            move_cell.as_deref(),
        ),
        Command::Acceptance { criterion } => acceptance::acceptance(criterion),
    }
}

fn destination(cli: &Cli, ext: &str) -> Option<PathBuf> {
    if let Some(p) = &cli.out {
        return Some(p.clone());
    }
    let dir = std::env::var_os("LFHARM_OUTPUT_DIR")?;
    Some(PathBuf::from(dir).join(format!("{}.{ext}", cli.command.name())))
}

fn emit(cli: &Cli, report: &Report) -> Result<()> {
    let format = cli.format.unwrap_or(report.default_format);
    let text = report.render(format);
    match destination(cli, format.extension()) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Exit status: 0 success, 1 a checked contract failed, 3 a library or I/O error.
/// Usage errors exit with 2 from the argument parser.
pub fn execute(cli: &Cli) -> i32 {
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 3;
        }
    };
    if let Err(e) = emit(cli, &report) {
        eprintln!("error: {e:#}");
        return 3;
    }
    match &report.violation {
        Some(v) => {
            eprintln!("violation: {v}");
            1
        }
        None => 0,
    }
}
