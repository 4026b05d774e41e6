#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use h2e_core::bell::{self, ChshReport, TwoQubitState, UnitVector3};
use h2e_core::scan::{self, GridKind, OutputFormat, ScanConfig};
use h2e_core::{BasisSet, Error, LengthUnit};
use serde_json::json;

use args::{BellArgs, Cli, Command, Format, PointArgs, ScanArgs, StateName, Unit};

const EXIT_USAGE: u8 = 1;
const EXIT_FAILURE: u8 = 2;

enum Failure {
    Usage(String),
    Computation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Computation(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let basis_dir = cli.basis_dir.as_deref();
    let result = match &cli.command {
        Command::Scan(a) => scan_command(a, basis_dir),
        Command::Point(a) => point_command(a, basis_dir),
        Command::Bell(a) => bell_command(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn length_unit(unit: Unit) -> LengthUnit {
    match unit {
        Unit::Bohr => LengthUnit::Bohr,
        Unit::Angstrom => LengthUnit::Angstrom,
    }
}

fn write_stdout(text: &str) -> Result<(), Failure> {
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| Failure::Computation(format!("writing to stdout: {e}")))
}

fn scan_command(a: &ScanArgs, basis_dir: Option<&Path>) -> Result<(), Failure> {
    let format = match a.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    let config = ScanConfig {
        basis_name: a.basis.clone(),
        r_min: a.rmin,
        r_max: a.rmax,
        n_points: a.points,
        grid: if a.log_grid {
            GridKind::Logarithmic
        } else {
            GridKind::Linear
        },
        unit: length_unit(a.unit),
        far_point: (!a.no_far_point).then_some(a.far_point),
        output_path: Some(a.out.clone()),
        format,
        rescale: a.rescale,
    };
    config.validate()?;
    let outcome = scan::run_scan(&config, basis_dir)?;
    for f in &outcome.failures {
        eprintln!("warning: R = {} Bohr failed: {}", f.r, f.message);
    }
    if a.out.as_os_str() == "-" {
        write_stdout(&scan::render(&outcome.points, format)?)?;
    } else {
        scan::emit(&outcome.points, format, &a.out)?;
        eprintln!(
            "wrote {} points ({} failed) to {}",
            outcome.points.len(),
            outcome.failures.len(),
            a.out.display()
        );
    }
    Ok(())
}

fn point_command(a: &PointArgs, basis_dir: Option<&Path>) -> Result<(), Failure> {
    if !(a.distance > 0.0) || !a.distance.is_finite() {
        return Err(Failure::Usage(format!(
            "bond length must be positive, got {}",
            a.distance
        )));
    }
    let r = length_unit(a.unit).to_bohr(a.distance);
    let basis = BasisSet::load(&a.basis, basis_dir)?;
    let report = scan::run_single_point(r, &basis)?;
    let text = if a.json {
        let value = json!({
            "R_bohr": r,
            "basis": basis.name,
            "E_HF": report.e_hf,
            "E_FCI": report.e_fci,
            "E_corr": report.e_corr,
            "entropy_bits": report.entropy,
            "occupations": report.occupations.0,
        });
        format!(
            "{}\n",
            serde_json::to_string_pretty(&value).expect("JSON values serialize")
        )
    } else {
        let occ: Vec<String> = report.occupations.0.iter().map(|n| format!("{n:.10}")).collect();
        format!(
            "R_bohr        {r:.10}\nbasis         {}\nE_HF          {:.12}\nE_FCI         {:.12}\nE_corr        {:.12}\nentropy_bits  {:.10}\noccupations   {}\n",
            basis.name,
            report.e_hf,
            report.e_fci,
            report.e_corr,
            report.entropy,
            occ.join(" ")
        )
    };
    write_stdout(&text)
}

fn vector_text(v: &UnitVector3) -> String {
    let v = v.as_vector();
    format!("({:+.6}, {:+.6}, {:+.6})", v.x, v.y, v.z)
}

fn bell_command(a: &BellArgs) -> Result<(), Failure> {
    if !(a.resolution > 0.0) || !a.resolution.is_finite() {
        return Err(Failure::Usage(format!(
            "resolution must be positive, got {}",
            a.resolution
        )));
    }
    let (name, state): (&str, TwoQubitState) = match a.state {
        StateName::Singlet => ("singlet", bell::singlet()),
        StateName::Product => ("product", bell::product_updown()),
        StateName::Dissociation => ("dissociation", bell::dissociation_spin_state()),
    };
    let report: ChshReport = bell::chsh_max_grid(&state, a.resolution)?;
    let closed = bell::chsh_max_closed_form(&state);
    let text = if a.json {
        let value = json!({
            "state": name,
            "chsh_max": report.value,
            "chsh_closed_form": closed,
            "settings": report.settings,
            "violated": report.violated,
        });
        format!(
            "{}\n",
            serde_json::to_string_pretty(&value).expect("JSON values serialize")
        )
    } else {
        let s = &report.settings;
        format!(
            "state             {name}\nchsh_max          {:.6}\nchsh_closed_form  {closed:.6}\na                 {}\nd                 {}\nb                 {}\nc                 {}\nviolated          {}\n",
            report.value,
            vector_text(&s.a),
            vector_text(&s.d),
            vector_text(&s.b),
            vector_text(&s.c),
            report.violated
        )
    };
    write_stdout(&text)
}
