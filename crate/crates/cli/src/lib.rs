//! `qrsim` command dispatch. [`run`] takes argv and output sinks so the
//! binary and the tests share one code path.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrsim_core::device::{load_calibration, CouplingMode, DeviceCalibration};
use qrsim_core::dsl::parse_circuit;
use qrsim_core::io;
use qrsim_core::protocols::{run_purification_experiment, run_swap_experiment, ErrorSpec, PurificationMode};
use qrsim_core::state::phi_plus;
use qrsim_core::tomography::{fidelity, run_tomography, TomographyConfig};
use qrsim_core::{Circuit, DensityMatrix, Simulator};

pub const DEFAULT_SHOTS: u64 = 8192;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "qrsim", version, about = "Quantum repeater protocol simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Measurement shots (per tomography setting for swap/purify/tomo).
    #[arg(long, default_value_t = DEFAULT_SHOTS, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Device calibration JSON; noiseless when absent.
    #[arg(long, value_name = "CALIB_JSON")]
    noise: Option<PathBuf>,
    /// Write JSON here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Mode {
    Ancilla,
    Direct,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a circuit file and emit counts.
    Run {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Reject CX gates not in the device coupling map.
        #[arg(long, conflicts_with = "rewrite_coupling")]
        strict_coupling: bool,
        /// Reverse CX gates whose flipped direction is in the coupling map.
        #[arg(long)]
        rewrite_coupling: bool,
    },
    /// Entanglement swapping experiment.
    Swap {
        #[command(flatten)]
        common: Common,
    },
    /// Entanglement purification experiment.
    Purify {
        /// Phase-change angle in radians.
        #[arg(long, default_value_t = 0.125, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long, value_enum, default_value_t = Mode::Ancilla)]
        mode: Mode,
        #[command(flatten)]
        common: Common,
    },
    /// Pauli tomography of one or two qubits of a circuit's output.
    Tomo {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1)]
        qubits: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Fidelity between a target and a density matrix.
    Fidelity {
        /// `bell-phi-plus` or a density-matrix JSON file.
        #[arg(long)]
        target: String,
        #[arg(long)]
        rho: PathBuf,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_noise(path: Option<&Path>) -> Result<Option<DeviceCalibration>, Failure> {
    path.map(|p| load_calibration(&read(p)?).map_err(|e| Failure(format!("{}: {e}", p.display()))))
        .transpose()
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    let text = read(path)?;
    parse_circuit(&text).map_err(|diags| {
        let lines: Vec<String> = diags.iter().map(|d| format!("{}:{d}", path.display())).collect();
        Failure(lines.join("\n"))
    })
}

fn emit(out: &mut dyn Write, target: Option<&Path>, value: &serde_json::Value) -> CmdResult {
    let text = io::to_pretty(value);
    match target {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Run { file, common, strict_coupling, rewrite_coupling } => {
            let mut circuit = load_circuit(&file)?;
            let cal = load_noise(common.noise.as_deref())?;
            if let Some(c) = &cal {
                c.check_fits(circuit.num_qubits())?;
            }
            if strict_coupling || rewrite_coupling {
                let device = cal.clone().unwrap_or_else(DeviceCalibration::ibmqx4);
                let mode = if strict_coupling { CouplingMode::Strict } else { CouplingMode::Rewrite };
                match device.validate_coupling(&circuit, mode)? {
                    Ok(c) => circuit = c,
                    Err(violations) => {
                        let msgs: Vec<String> = violations
                            .iter()
                            .map(|v| {
                                format!(
                                    "{}: gate {} `cx q[{}], q[{}]` not in coupling map",
                                    file.display(),
                                    v.op_index,
                                    v.control,
                                    v.target
                                )
                            })
                            .collect();
                        return Err(Failure(msgs.join("\n")));
                    }
                }
            }
            let counts = Simulator::new(cal.as_ref()).sample(&circuit, common.shots, common.seed)?;
            emit(out, common.out.as_deref(), &io::counts_to_json(&counts, common.seed))
        }
        Command::Swap { common } => {
            let cal = load_noise(common.noise.as_deref())?;
            let report = run_swap_experiment(cal.as_ref(), common.shots, common.seed)?;
            emit(out, common.out.as_deref(), &io::report_to_json(&report))
        }
        Command::Purify { phi, mode, common } => {
            let cal = load_noise(common.noise.as_deref())?;
            let mode = match mode {
                Mode::Ancilla => PurificationMode::Ancilla,
                Mode::Direct => PurificationMode::Direct,
            };
            let report = run_purification_experiment(cal.as_ref(), &ErrorSpec::all(phi), mode, common.shots, common.seed)?;
            emit(out, common.out.as_deref(), &io::report_to_json(&report))
        }
        Command::Tomo { file, qubits, common } => {
            let circuit = load_circuit(&file)?;
            let cal = load_noise(common.noise.as_deref())?;
            if let Some(c) = &cal {
                c.check_fits(circuit.num_qubits())?;
            }
            let cfg = TomographyConfig { shots: Some(common.shots), seed: common.seed, ..Default::default() };
            let result = run_tomography(&Simulator::new(cal.as_ref()), &circuit.without_measurements(), &qubits, &cfg)?;
            emit(out, common.out.as_deref(), &io::tomography_to_json(&result))
        }
        Command::Fidelity { target, rho } => {
            let load = |p: &Path| -> Result<DensityMatrix, Failure> {
                io::density_from_json(&read(p)?).map_err(|e| Failure(format!("{}: {e}", p.display())))
            };
            let rho = load(&rho)?;
            let target = match target.as_str() {
                "bell-phi-plus" => phi_plus().to_density(),
                path => load(Path::new(path))?,
            };
            let f = fidelity(&target, &rho)?;
            writeln!(out, "{f:.4}")?;
            Ok(())
        }
    }
}

/// Run the CLI. Returns the process exit code: 0 on success, 1 for
/// diagnostics or IO errors, 2 for bad flags.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "{msg}");
            1
        }
    }
}
