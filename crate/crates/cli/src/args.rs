use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};
use lfharm::{Characteristic, FieldParams, LocalField};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "lfharm", version, about = "Harmonic analysis experiments on local fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file. Without it the report goes to $LFHARM_OUTPUT_DIR/<command>.<ext>,
    /// or to stdout when that variable is unset.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Field selection. `--char 0` is Q_p, `--char p` is F_q((X)).
#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[arg(long = "char", default_value = "0", value_parser = parse_char)]
    pub characteristic: Characteristic,
    /// Residue characteristic p.
    #[arg(long)]
    pub p: Option<u32>,
    /// Residue field size q = p^c; an alternative to --p/--c.
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub c: Option<u32>,
    /// Monic irreducible modulus for F_q, base-p digits, low degree first.
    #[arg(long, value_delimiter = ',')]
    pub modulus: Option<Vec<u32>>,
}

/// Field selection for subcommands where --p is the Lebesgue exponent.
#[derive(Debug, Clone, Args)]
pub struct FieldQArgs {
    #[arg(long = "char", default_value = "0", value_parser = parse_char)]
    pub characteristic: Characteristic,
    /// Residue field size q = p^c.
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    #[arg(long, value_delimiter = ',')]
    pub modulus: Option<Vec<u32>>,
}

fn parse_char(s: &str) -> Result<Characteristic, String> {
    match s {
        "0" => Ok(Characteristic::Zero),
        "p" | "P" => Ok(Characteristic::Positive),
        _ => Err(format!("expected 0 or p, got {s:?}")),
    }
}

/// q = p^c for prime p.
fn prime_power(q: u32) -> Result<(u32, u32)> {
    if q < 2 {
        bail!("q = {q} is not a prime power");
    }
    let p = (2..=q).find(|d| q % d == 0).expect("q >= 2 has a divisor");
    let (mut r, mut c) = (q, 0);
    while r % p == 0 {
        r /= p;
        c += 1;
    }
    if r != 1 {
        bail!("q = {q} is not a prime power");
    }
    Ok((p, c))
}

fn build(characteristic: Characteristic, p: u32, c: u32, modulus: Option<Vec<u32>>) -> Result<LocalField> {
    Ok(LocalField::new(FieldParams::new(characteristic, p, c, modulus)?)?)
}

impl FieldArgs {
    pub fn field(&self) -> Result<LocalField> {
        let (p, c) = match (self.q, self.p, self.c) {
            (Some(q), p, c) => {
                let (qp, qc) = prime_power(q)?;
                if p.is_some_and(|p| p != qp) || c.is_some_and(|c| c != qc) {
                    bail!("--q {q} contradicts --p/--c");
                }
                (qp, qc)
            }
            (None, p, c) => (p.unwrap_or(2), c.unwrap_or(1)),
        };
        build(self.characteristic, p, c, self.modulus.clone())
    }
}

impl FieldQArgs {
    pub fn field(&self) -> Result<LocalField> {
        let (p, c) = prime_power(self.q)?;
        build(self.characteristic, p, c, self.modulus.clone())
    }
}

/// Weight specification: `power:ALPHA`, `unit`, or a function JSON file.
#[derive(Debug, Clone)]
pub enum WeightArg {
    Power(f64),
    Unit,
    File(PathBuf),
}

pub fn parse_weight(s: &str) -> Result<WeightArg, String> {
    let lower = s.to_ascii_lowercase();
    if let Some(a) = lower.strip_prefix("power:") {
        return a
            .parse()
            .map(WeightArg::Power)
            .map_err(|_| format!("bad exponent in {s:?}"));
    }
    if lower == "unit" || lower == "1" {
        return Ok(WeightArg::Unit);
    }
    let path = s.strip_prefix("file:").unwrap_or(s);
    Ok(WeightArg::File(PathBuf::from(path)))
}

/// phi^ specification: `indicator`, `power:ALPHA` (|phi^|^2 = |xi|^ALPHA on D), or a JSON file.
#[derive(Debug, Clone)]
pub enum PhiArg {
    Indicator,
    Power(f64),
    File(PathBuf),
}

pub fn parse_phi(s: &str) -> Result<PhiArg, String> {
    let lower = s.to_ascii_lowercase();
    if lower == "indicator" {
        return Ok(PhiArg::Indicator);
    }
    match parse_weight(s)? {
        WeightArg::Power(a) => Ok(PhiArg::Power(a)),
        WeightArg::Unit => Ok(PhiArg::Indicator),
        WeightArg::File(p) => Ok(PhiArg::File(p)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MaximalKind {
    /// Hardy-Littlewood
    Hl,
    Sharp,
    /// M_s f = (M |f|^s)^{1/s}
    Ms,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Checks field, enumeration and character invariants at level k.
    FieldSelftest {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 5)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run over Q_2, Q_3, F_2((X)), F_3((X)) and F_4((X)) instead of one field.
        #[arg(long)]
        all_fields: bool,
    },
    /// Character table chi_n(x) on D / P^k.
    Characters {
        #[command(flatten)]
        field: FieldArgs,
        /// Level k of the table.
        #[arg(long)]
        table: u32,
    },
    /// Dirichlet kernel D_n, or without --n the kernel identities at level k.
    Dirichlet {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 4)]
        k: u32,
        /// Seeded functions for the S_{q^r} = averaging check.
        #[arg(long, default_value_t = 100)]
        bank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        all_fields: bool,
    },
    /// Audits |K_n(x)| |x| <= q, the transform of K_n and its sphere constancy.
    KernelAudit {
        #[command(flatten)]
        field: FieldArgs,
        /// Largest n audited; defaults to q^4.
        #[arg(long)]
        nmax: Option<usize>,
        /// Level; defaults to the least k with nmax < q^k.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        all_fields: bool,
    },
    /// Norms of S_n on L^p(D, w), n = 1..=nmax.
    SnNorms {
        #[command(flatten)]
        field: FieldQArgs,
        #[arg(long, value_parser = parse_weight)]
        w: WeightArg,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 32)]
        nmax: usize,
        /// Candidate budget for the lower bound when p != 2.
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A_p characteristic of a weight over balls of levels 0..=k.
    Ap {
        #[command(flatten)]
        field: FieldQArgs,
        #[arg(long, value_parser = parse_weight)]
        w: WeightArg,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: u32,
    },
    /// Parent/child mass ratios of a weight.
    Doubling {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = parse_weight)]
        w: WeightArg,
        #[arg(long)]
        k: u32,
    },
    /// Reverse Holder exponent on the grid 0.05..1.
    RhiProbe {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = parse_weight)]
        w: WeightArg,
        #[arg(long)]
        k: u32,
    },
    /// A_infinity exponent on the grid 0.05..1.
    AinfProbe {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = parse_weight)]
        w: WeightArg,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Maximal functions of a function file or of a seeded random function.
    Maximal {
        #[command(flatten)]
        field: FieldArgs,
        /// Function JSON; without it a seeded random function at level k is used.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ambient levels above D.
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long, value_enum, default_value_t = MaximalKind::Hl)]
        kind: MaximalKind,
        #[arg(long, default_value_t = 2.0)]
        s: f64,
    },
    /// ||Mf|| / ||f|| on L^p(|x|^{(p-1)(1-theta)}) for f = |x|^{theta-1} 1_D.
    Buckley {
        #[command(flatten)]
        field: FieldQArgs,
        #[arg(long)]
        p: f64,
        /// One or more theta values in (0, 1).
        #[arg(long, value_delimiter = ',', required = true)]
        theta: Vec<f64>,
        /// Depth; chosen per theta when omitted.
        #[arg(long)]
        k: Option<u32>,
        /// Window above D; the smallest passing window when omitted.
        #[arg(long)]
        m: Option<u32>,
    },
    /// ||Mf||_{L^p(w)} / ||f^#||_{L^p(w)} over a seeded bank.
    MSharpProbe {
        #[command(flatten)]
        field: FieldQArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, value_parser = parse_weight)]
        w: WeightArg,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        random: usize,
    },
    /// Schauder basis verdict for the integer translates of phi.
    Schauder {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = parse_phi)]
        phi: PhiArg,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        klist: Vec<u32>,
        #[arg(long = "N", default_value_t = 32)]
        n: usize,
    },
    /// Tiling and spectral checks for Omega + T.
    Tiling {
        #[command(flatten)]
        field: FieldArgs,
        /// Omega JSON: {"window": [low, high], "balls": [[level, index], ...]}.
        #[arg(long, conflicts_with = "standard")]
        omega: Option<PathBuf>,
        /// Translations JSON: {"u": [n, ...]} and/or {"cells": [index, ...]}.
        #[arg(long, requires = "omega")]
        t: Option<PathBuf>,
        /// Omega = D, T = {u(n) : n < q^m} on P^{-m} / P^k.
        #[arg(long)]
        standard: Option<u32>,
        #[arg(long)]
        k: u32,
        /// Also certify Gamma = {u(n) : n < q^k} as a spectrum.
        #[arg(long)]
        spectral: bool,
        /// Move one level-k cell of Omega before checking: FROM,TO.
        #[arg(long, value_delimiter = ',')]
        move_cell: Option<Vec<usize>>,
    },
    /// Runs one acceptance criterion (1-11) or all of them.
    Acceptance {
        #[arg(long, default_value = "all")]
        criterion: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FieldSelftest { .. } => "field-selftest",
            Command::Characters { .. } => "characters",
            Command::Dirichlet { .. } => "dirichlet",
            Command::KernelAudit { .. } => "kernel-audit",
            Command::SnNorms { .. } => "sn-norms",
            Command::Ap { .. } => "ap",
            Command::Doubling { .. } => "doubling",
            Command::RhiProbe { .. } => "rhi-probe",
            Command::AinfProbe { .. } => "ainf-probe",
            Command::Maximal { .. } => "maximal",
            Command::Buckley { .. } => "buckley",
            Command::MSharpProbe { .. } => "m-sharp-probe",
            Command::Schauder { .. } => "schauder",
            Command::Tiling { .. } => "tiling",
            Command::Acceptance { .. } => "acceptance",
        }
    }
}

/// Q_2, F_2((X)), Q_3, F_3((X)), F_4((X)).
pub fn standard_fields() -> Vec<LocalField> {
    vec![
        LocalField::q_p(2).expect("Q_2"),
        LocalField::laurent(2, 1).expect("F_2"),
        LocalField::q_p(3).expect("Q_3"),
        LocalField::laurent(3, 1).expect("F_3"),
        LocalField::laurent(2, 2).expect("F_4"),
    ]
}

pub fn fields_for(field: &FieldArgs, all: bool) -> Result<Vec<LocalField>> {
    if all {
        Ok(standard_fields())
    } else {
        Ok(vec![field.field().map_err(|e| anyhow!(e))?])
    }
}
