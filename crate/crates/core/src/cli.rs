//! The `padicnet` command line: batch synthesis, evaluation, verification,
//! analysis and distance computation over JSON artifacts.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 parse error or prime
//! mismatch, 3 width below the minimum, 4 budget exceeded, 5 verification
//! mismatch.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::analysis::{analyze_network, interleaving_table};
use crate::error::Error;
use crate::functions::{table_distance, verify_against_table, NormOrder};
use crate::json::{
    certificates_from_json, certificates_to_json, network_from_json, network_to_json, parse_scalar,
    table_from_json, table_to_json, verdict_to_json, VerdictReport,
};
use crate::network::Network;
use crate::padic::{interleave_digits, Budget, Coset, PVector, Prime, DEFAULT_BUDGET};
use crate::synthesis::{
    decode_with_certificates, synth_approximator, synth_decoder, synth_encoder,
    synth_locally_constant,
};

#[derive(Parser, Debug)]
#[command(
    name = "padicnet",
    version,
    about = "Exact p-adic pReLU network synthesis and analysis"
)]
struct Cli {
    /// Maximum number of items any exhaustive sweep may enumerate.
    #[arg(long, global = true, env = "PADICNET_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a scalar table into a network of width d_in + 1.
    Synth {
        table: PathBuf,
        out: PathBuf,
        /// Pad the network to this width.
        #[arg(long)]
        width: Option<usize>,
        /// Decoder precision, required for vector-valued tables.
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Approximate a vector-valued table to precision p^-n.
    Approx {
        table: PathBuf,
        out: PathBuf,
        #[arg(long)]
        precision: u32,
        /// Where to write the decoder certificates.
        #[arg(long)]
        certificates: Option<PathBuf>,
    },
    /// Evaluate a network at a point given as rational coordinates.
    Eval {
        net: PathBuf,
        #[arg(required = true, allow_hyphen_values = true)]
        point: Vec<String>,
    },
    /// Check a network against a table on every coset.
    Verify {
        net: PathBuf,
        table: PathBuf,
        /// Extra lifts checked per coset.
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
    /// Exact L_q distance between two tables.
    Distance {
        f: PathBuf,
        g: PathBuf,
        /// Positive integer or `inf`.
        #[arg(long, default_value = "1")]
        q: String,
    },
    /// Affine or direction-constant verdict for a width-n network on Z_p^n.
    Analyze {
        net: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the level-m encoder Z_p^d -> Z_p.
    Encode {
        out: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Find a decoder input whose image lies in the target coset.
    Decode {
        certificates: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(required = true)]
        residues: Vec<u64>,
    },
    /// Write the juggler (or a decoder of dimension --dim) and its certificates.
    Juggle {
        out: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        certificates: Option<PathBuf>,
    },
    /// Level-k digit interleaving of a point, or of all of Z_p^d with --table.
    Interleave {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        level: u32,
        #[arg(allow_hyphen_values = true)]
        point: Vec<String>,
        /// Write the interleaving table on Z_p^dim instead.
        #[arg(long, requires = "dim")]
        table: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::PrimeMismatch { .. } | Error::NotPrime(_) => 2,
        Error::WidthTooSmall { .. } => 3,
        Error::BudgetExceeded { .. } => 4,
        _ => 1,
    }
}

/// Parses arguments and runs one subcommand, writing reports to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    if cli.budget == 0 {
        let _ = writeln!(err, "error: budget must be positive");
        return 2;
    }
    match dispatch(cli.command, Budget::new(cli.budget), out) {
        Ok(()) => 0,
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Mismatch(msg)) => {
            let _ = writeln!(err, "mismatch: {msg}");
            5
        }
    }
}

/// Entry point for the binary.
pub fn main_with_args<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Writes through a sibling temporary file and a rename.
fn write_atomic(path: &Path, contents: &str) -> Outcome {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let name = path
        .file_name()
        .ok_or_else(|| Failure::Io(format!("{}: not a file path", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

fn say(out: &mut dyn Write, line: impl std::fmt::Display) -> Outcome {
    writeln!(out, "{line}").map_err(|e| Failure::Io(e.to_string()))
}

fn shape(net: &Network) -> String {
    format!(
        "width {} depth {} layers {}",
        net.width(),
        net.depth(),
        net.layers().len()
    )
}

fn prime(p: u64) -> std::result::Result<Prime, Failure> {
    Prime::new(p).map_err(|e| Failure::Lib(Error::parse("--prime", e.to_string())))
}

fn point(coords: &[String]) -> std::result::Result<PVector, Failure> {
    let entries = coords
        .iter()
        .enumerate()
        .map(|(i, s)| parse_scalar(&format!("point[{i}]"), s))
        .collect::<crate::error::Result<Vec<_>>>()?;
    Ok(PVector::new(entries))
}

fn dispatch(command: Command, budget: Budget, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Synth {
            table,
            out: path,
            width,
            precision,
        } => {
            let t = table_from_json(&read(&table)?)?;
            if t.d_out() > 1 {
                let n = precision.ok_or_else(|| {
                    Failure::Lib(Error::parse(
                        "--precision",
                        "required for vector-valued tables",
                    ))
                })?;
                return approx(&t, n, budget, width, &path, None, out);
            }
            let minimum = t.d_in() + 1;
            let w = width.unwrap_or(minimum);
            let mut net = synth_locally_constant(&t, w, budget)?;
            if width.is_some() {
                net = net.pad_width(w)?;
            }
            write_atomic(&path, &network_to_json(&net))?;
            say(out, shape(&net))
        }
        Command::Approx {
            table,
            out: path,
            precision,
            certificates,
        } => {
            let t = table_from_json(&read(&table)?)?;
            approx(
                &t,
                precision,
                budget,
                None,
                &path,
                certificates.as_deref(),
                out,
            )
        }
        Command::Eval { net, point: coords } => {
            let net = network_from_json(&read(&net)?)?;
            let x = point(&coords)?;
            if x.dim() != net.d_in() {
                return Err(Error::parse(
                    "point",
                    format!("expected {} coordinates, got {}", net.d_in(), x.dim()),
                )
                .into());
            }
            let y = net.eval(&x)?;
            let text: Vec<String> = y.entries().iter().map(|v| v.to_string()).collect();
            say(out, text.join(" "))
        }
        Command::Verify {
            net,
            table,
            samples,
        } => {
            let net = network_from_json(&read(&net)?)?;
            let t = table_from_json(&read(&table)?)?;
            match verify_against_table(&net, &t, samples, budget)? {
                None => say(out, "ok"),
                Some(m) => Err(Failure::Mismatch(format!(
                    "coset {:?} at {}: expected {}, got {}",
                    m.coset.residues(),
                    m.point,
                    m.expected,
                    m.actual
                ))),
            }
        }
        Command::Distance { f, g, q } => {
            let f = table_from_json(&read(&f)?)?;
            let g = table_from_json(&read(&g)?)?;
            let q: NormOrder = q.parse()?;
            say(out, table_distance(&f, &g, q, budget)?)
        }
        Command::Analyze {
            net,
            samples,
            out: path,
        } => {
            let net = network_from_json(&read(&net)?)?;
            let verdict = analyze_network(&net, budget)?;
            let verified = verdict.verify(&net, samples)?.passed();
            let text = verdict_to_json(&VerdictReport {
                verdict,
                verified,
                samples,
            });
            if let Some(path) = path {
                write_atomic(&path, &text)?;
            }
            write!(out, "{text}").map_err(|e| Failure::Io(e.to_string()))?;
            if verified {
                Ok(())
            } else {
                Err(Failure::Mismatch(
                    "verdict failed its sampled re-check".into(),
                ))
            }
        }
        Command::Encode {
            out: path,
            prime: p,
            level,
            dim,
        } => {
            let net = synth_encoder(prime(p)?, dim, level, budget)?;
            write_atomic(&path, &network_to_json(&net))?;
            say(out, shape(&net))
        }
        Command::Decode {
            certificates,
            prime: p,
            residues,
        } => {
            let p = prime(p)?;
            let (level, certs) = certificates_from_json(&read(&certificates)?)?;
            let target = Coset::new(p, level, residues)?;
            say(out, decode_with_certificates(p, level, &certs, &target)?)
        }
        Command::Juggle {
            out: path,
            prime: p,
            level,
            dim,
            certificates,
        } => {
            let dec = synth_decoder(prime(p)?, dim, level, budget)?;
            write_atomic(&path, &network_to_json(&dec.net))?;
            if let Some(c) = certificates {
                write_atomic(&c, &certificates_to_json(level, &dec.juggler.certificates))?;
            }
            say(out, shape(&dec.net))
        }
        Command::Interleave {
            prime: p,
            level,
            point: coords,
            table,
            dim,
        } => {
            let p = prime(p)?;
            if let Some(path) = table {
                let t = interleaving_table(p, dim.expect("clap enforces --dim"), level, budget)?;
                write_atomic(&path, &table_to_json(&t))?;
                return say(out, format!("{} cosets", t.num_entries()));
            }
            if coords.is_empty() {
                return Err(Error::parse("point", "give coordinates or --table").into());
            }
            say(out, interleave_digits(p, &point(&coords)?, level)?)
        }
    }
}

fn approx(
    t: &crate::functions::FunctionTable,
    n: u32,
    budget: Budget,
    width: Option<usize>,
    path: &Path,
    certificates: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let a = synth_approximator(t, n, budget)?;
    let minimum = (t.d_in() + 1).max(t.d_out());
    let net = match width {
        Some(w) if w < minimum => {
            return Err(Error::WidthTooSmall {
                requested: w,
                minimum,
            }
            .into())
        }
        Some(w) => a.net.pad_width(w)?,
        None => a.net,
    };
    write_atomic(path, &network_to_json(&net))?;
    if let Some(c) = certificates {
        write_atomic(c, &certificates_to_json(n, &a.decoder.juggler.certificates))?;
    }
    say(out, shape(&net))
}
