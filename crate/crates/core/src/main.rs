//! Command-line front end: transforms, operator application, norms,
//! operator-norm experiments, sparse and atomic tools, corpus
//! generation, verification suites, and envelope reports.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails, 2 on
//! input errors (bad flags, malformed files, invalid parameters).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use dyadlab::atoms::atomic_decompose;
use dyadlab::corpus::{gaussian_signal_1d, generate_corpus, write_corpus, Distribution};
use dyadlab::error::{Error, Result};
use dyadlab::functionals::{norm_1d, norm_2d, parse_norm_kind, NormKind};
use dyadlab::io::{self, AnyCoeffs, AnySignal, CsvRow};
use dyadlab::opnorm::{
    build_hadamard_example, build_identity_example, level_set_witness, opnorm_l2, opnorm_search_1d,
    opnorm_search_2d, pi4_matrix_bound, row_slice_witness, SearchBudget,
};
use dyadlab::paraproduct::{
    para_one, para_two, EpsPair, NamedOperator1D, NamedOperator2D, OperatorKind1D, OperatorKind2D,
    Signature2D,
};
use dyadlab::sparse::{carleson_constant, jn_profile, sparse_extract, CarlesonMode, RectFamily};
use dyadlab::verify::{run_suite, Suite};
use dyadlab::{DyadicInterval, Grid2D, HaarCoeffs1D, HaarCoeffs2D};

#[derive(Parser)]
#[command(
    name = "dyadlab",
    version,
    about = "Dyadic bi-parameter analysis toolkit"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Haar analysis of a signal file, or synthesis of a coefficient file.
    Transform {
        /// Signal or coefficient JSON; the direction is inferred.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Apply a named operator or a signature pattern to a signal.
    Apply {
        /// pi1, pi1t, pi2, pi3, pi4, pig, pigp, pigpp, or eps:<bits>[,<bits>]
        #[arg(long)]
        op: String,
        /// Symbol file (coefficient or signal JSON).
        #[arg(long)]
        g: PathBuf,
        /// Operand signal JSON.
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a norm of a signal.
    Norm {
        /// lp, hp-square, hp-maximal, bmo-line, product-bmo-exact,
        /// product-bmo-heuristic, slice-bmo-sup, slice-hr-lr
        #[arg(long)]
        kind: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Operator norm estimates: spectral, search, structured witnesses,
    /// or the per-cell matrix view.
    Opnorm {
        #[arg(long)]
        op: Option<String>,
        #[arg(long)]
        g: PathBuf,
        /// Norm spec for search, e.g. hp-square:2.
        #[arg(long)]
        in_norm: Option<String>,
        #[arg(long)]
        out_norm: Option<String>,
        /// l2, search, level-witness, row-witness, matrix-view.
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Input exponent for the witness methods.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Symbol exponent for the witness methods.
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        /// Row level for the row witness; rows are all intervals there.
        #[arg(long, default_value_t = 0)]
        row_level: u32,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sparse-family tools over a rectangle list.
    Sparse {
        /// Rectangle list JSON.
        #[arg(long)]
        family: PathBuf,
        /// Grid resolution per axis; defaults to the finest level used.
        #[arg(long)]
        n1: Option<u32>,
        #[arg(long)]
        n2: Option<u32>,
        /// Extract a half-density sparse subfamily with witnesses.
        #[arg(long)]
        extract: bool,
        /// Carleson packing constant: exact or restricted.
        #[arg(long)]
        carleson: Option<String>,
        /// Distributional profile exponent over the extracted family.
        #[arg(long)]
        jn: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Atomic decomposition of a signal's cancellative part.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Named coefficient families on a square grid.
    Construct {
        /// hadamard or identity.
        #[arg(long)]
        example: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Seeded corpus of signal files with a hash manifest.
    Generate {
        /// gaussian, sparse, or tensor.
        #[arg(long)]
        dist: String,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        n1: u32,
        #[arg(long, default_value_t = 4)]
        n2: u32,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run property suites and print a pass/fail table.
    Verify {
        /// A suite token or "all".
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Corpus size override.
        #[arg(long)]
        count: Option<usize>,
        /// Grid resolution override where the suite takes one.
        #[arg(long)]
        n: Option<u32>,
        /// text or json.
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Envelope measurements over a seeded corpus, one row per
    /// (instance, quantity).
    Report {
        /// level-witness, tensor-search, atomic, or bmo.
        #[arg(long)]
        quantity: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        n1: u32,
        #[arg(long, default_value_t = 5)]
        n2: u32,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 120)]
        iters: usize,
        /// csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Prints a line, treating a closed pipe as a normal exit condition.
fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => io::write_text(p, text),
        None => print_stdout(text),
    }
}

/// Writes a report envelope; the wall clock is included on stdout only,
/// so file artifacts stay byte-identical run to run.
fn emit_report(
    path: Option<&Path>,
    config: Value,
    seed: Option<u64>,
    started: Instant,
    result: Value,
) -> Result<()> {
    match path {
        Some(p) => {
            let env = io::report_envelope(config, seed, None, result);
            io::write_text(p, &serde_json::to_string_pretty(&env)?)
        }
        None => {
            let ms = started.elapsed().as_millis();
            let env = io::report_envelope(config, seed, Some(ms), result);
            print_stdout(&serde_json::to_string_pretty(&env)?)
        }
    }
}

enum OpToken {
    One(OperatorKind1D),
    Two(OperatorKind2D),
    Eps1(EpsPair),
    Eps2(Signature2D),
}

fn parse_eps_pair(s: &str) -> Result<EpsPair> {
    let bits: Vec<u8> = s
        .chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            other => Err(Error::InvalidParameter(format!(
                "signature bit {other:?} in {s:?}, expected 0 or 1"
            ))),
        })
        .collect::<Result<_>>()?;
    if bits.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "signature {s:?} needs exactly two bits"
        )));
    }
    EpsPair::new(bits[0], bits[1])
}

fn parse_op(s: &str) -> Result<OpToken> {
    if let Ok(kind) = s.parse::<OperatorKind2D>() {
        return Ok(OpToken::Two(kind));
    }
    if let Ok(kind) = s.parse::<OperatorKind1D>() {
        return Ok(OpToken::One(kind));
    }
    if let Some(pattern) = s.strip_prefix("eps:") {
        let parts: Vec<&str> = pattern.split(',').collect();
        return match parts.as_slice() {
            [x] => Ok(OpToken::Eps1(parse_eps_pair(x)?)),
            [x, y] => Ok(OpToken::Eps2(Signature2D::new(
                parse_eps_pair(x)?,
                parse_eps_pair(y)?,
            ))),
            _ => Err(Error::InvalidParameter(format!(
                "signature pattern {pattern:?} needs one or two comma-separated pairs"
            ))),
        };
    }
    Err(Error::InvalidParameter(format!(
        "unknown operator token {s:?}"
    )))
}

/// Accepts either wire format for a symbol: coefficient JSON is used as
/// is, signal JSON goes through the forward transform.
fn parse_symbol(text: &str) -> Result<AnyCoeffs> {
    let v: Value = serde_json::from_str(text)?;
    if v.get("entries").is_some() {
        io::parse_coeffs(text)
    } else {
        match io::parse_signal(text)? {
            AnySignal::One(f) => Ok(AnyCoeffs::One(HaarCoeffs1D::forward(&f))),
            AnySignal::Two(f) => Ok(AnyCoeffs::Two(HaarCoeffs2D::forward(&f))),
        }
    }
}

fn rect_family_json(fam: &RectFamily) -> Value {
    let labels = fam.labels();
    Value::Array(
        fam.rects()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut m = json!({
                    "lx": r.x.level(), "kx": r.x.index(),
                    "ly": r.y.level(), "ky": r.y.index(),
                });
                if let Some(ls) = labels {
                    m["label"] = json!(ls[i]);
                }
                m
            })
            .collect(),
    )
}

fn run(cli: Cli) -> Result<u8> {
    let started = Instant::now();
    match cli.cmd {
        Cmd::Transform { input, output } => {
            let text = io::read_text(&input)?;
            let v: Value = serde_json::from_str(&text)?;
            let out = if v.get("entries").is_some() {
                match io::parse_coeffs(&text)? {
                    AnyCoeffs::One(c) => io::signal_1d_json(&c.inverse())?,
                    AnyCoeffs::Two(c) => io::signal_2d_json(&c.inverse())?,
                }
            } else {
                match io::parse_signal(&text)? {
                    AnySignal::One(f) => io::coeffs_1d_json(&HaarCoeffs1D::forward(&f))?,
                    AnySignal::Two(f) => io::coeffs_2d_json(&HaarCoeffs2D::forward(&f))?,
                }
            };
            emit_text(output.as_deref(), &out)?;
            Ok(0)
        }
        Cmd::Apply { op, g, f, output } => {
            let op = parse_op(&op)?;
            let sym = parse_symbol(&io::read_text(&g)?)?;
            let operand = io::parse_signal(&io::read_text(&f)?)?;
            let out = match (op, sym, operand) {
                (OpToken::Two(kind), AnyCoeffs::Two(gc), AnySignal::Two(f)) => {
                    io::signal_2d_json(&NamedOperator2D::from_coeffs(kind, gc).apply(&f)?)?
                }
                (OpToken::One(kind), AnyCoeffs::One(gc), AnySignal::One(f)) => {
                    io::signal_1d_json(&NamedOperator1D::from_coeffs(kind, gc).apply(&f)?)?
                }
                (OpToken::Eps2(sig), AnyCoeffs::Two(gc), AnySignal::Two(f)) => {
                    io::signal_2d_json(&para_two(sig, &f, &gc.inverse())?)?
                }
                (OpToken::Eps1(sig), AnyCoeffs::One(gc), AnySignal::One(f)) => {
                    io::signal_1d_json(&para_one(sig, &f, &gc.inverse())?)?
                }
                _ => {
                    return Err(Error::DimensionMismatch(
                        "operator arity does not match the symbol and operand dimensions".into(),
                    ))
                }
            };
            emit_text(output.as_deref(), &out)?;
            Ok(0)
        }
        Cmd::Norm {
            kind,
            p,
            r,
            input,
            output,
        } => {
            let nk = parse_norm_kind(&kind, p, r)?;
            let value = match io::parse_signal(&io::read_text(&input)?)? {
                AnySignal::One(f) => norm_1d(&f, nk)?,
                AnySignal::Two(f) => norm_2d(&f, nk)?,
            };
            let config = json!({"kind": kind, "p": p, "r": r, "input": input});
            emit_report(
                output.as_deref(),
                config,
                None,
                started,
                json!({"kind": kind, "value": value}),
            )?;
            Ok(0)
        }
        Cmd::Opnorm {
            op,
            g,
            in_norm,
            out_norm,
            method,
            restarts,
            iters,
            seed,
            p,
            r,
            row_level,
            output,
        } => {
            let budget = SearchBudget {
                restarts,
                iterations: iters,
                seed,
            };
            let sym = parse_symbol(&io::read_text(&g)?)?;
            let config = json!({
                "op": op, "g": g, "method": method,
                "in_norm": in_norm, "out_norm": out_norm,
                "restarts": restarts, "iters": iters,
                "p": p, "r": r, "row_level": row_level,
            });
            let require_op = |what: &str| -> Result<OpToken> {
                let tok = op.as_deref().ok_or_else(|| {
                    Error::InvalidParameter(format!("--op is required for method {what}"))
                })?;
                parse_op(tok)
            };
            let result = match method.as_str() {
                "l2" => {
                    let report = match (require_op("l2")?, &sym) {
                        (OpToken::Two(kind), AnyCoeffs::Two(gc)) => {
                            opnorm_l2(&NamedOperator2D::from_coeffs(kind, gc.clone()))
                        }
                        (OpToken::One(kind), AnyCoeffs::One(gc)) => {
                            opnorm_l2(&NamedOperator1D::from_coeffs(kind, gc.clone()))
                        }
                        _ => {
                            return Err(Error::DimensionMismatch(
                                "operator arity does not match the symbol dimensions".into(),
                            ))
                        }
                    };
                    serde_json::to_value(&report)?
                }
                "search" => {
                    let missing = |flag: &str| {
                        Error::InvalidParameter(format!("{flag} is required for method search"))
                    };
                    let in_spec = in_norm.as_deref().ok_or_else(|| missing("--in-norm"))?;
                    let out_spec = out_norm.as_deref().ok_or_else(|| missing("--out-norm"))?;
                    let ink = parse_norm_kind(in_spec, Some(p), Some(r))?;
                    let outk = parse_norm_kind(out_spec, Some(p), Some(r))?;
                    let report = match (require_op("search")?, &sym) {
                        (OpToken::Two(kind), AnyCoeffs::Two(gc)) => opnorm_search_2d(
                            &NamedOperator2D::from_coeffs(kind, gc.clone()),
                            ink,
                            outk,
                            &budget,
                        )?,
                        (OpToken::One(kind), AnyCoeffs::One(gc)) => opnorm_search_1d(
                            &NamedOperator1D::from_coeffs(kind, gc.clone()),
                            ink,
                            outk,
                            &budget,
                        )?,
                        _ => {
                            return Err(Error::DimensionMismatch(
                                "operator arity does not match the symbol dimensions".into(),
                            ))
                        }
                    };
                    serde_json::to_value(&report)?
                }
                "level-witness" => {
                    let gc = match &sym {
                        AnyCoeffs::Two(gc) => gc,
                        AnyCoeffs::One(_) => {
                            return Err(Error::DimensionMismatch(
                                "the level witness needs a two-dimensional symbol".into(),
                            ))
                        }
                    };
                    let (wf, w) = level_set_witness(&gc.inverse(), p, r)?;
                    json!({
                        "q": w.q, "t": w.t,
                        "family": rect_family_json(&w.family),
                        "input_norm": w.input_norm,
                        "output_norm": w.output_norm,
                        "ratio": w.ratio,
                        "level_check": w.level_check,
                        "min_margin": w.min_margin,
                        "witness_values": wf.values(),
                    })
                }
                "row-witness" => {
                    let gc = match &sym {
                        AnyCoeffs::Two(gc) => gc,
                        AnyCoeffs::One(_) => {
                            return Err(Error::DimensionMismatch(
                                "the row witness needs a two-dimensional symbol".into(),
                            ))
                        }
                    };
                    let rows: Vec<DyadicInterval> = (0..(1u64 << row_level))
                        .map(|k| DyadicInterval::new(row_level, k))
                        .collect::<Result<_>>()?;
                    let (wf, w) = row_slice_witness(&gc.inverse(), p, r, &rows, &budget)?;
                    json!({
                        "q": w.q,
                        "rows": w.rows.iter().map(|row| json!({
                            "level": row.interval.level(),
                            "index": row.interval.index(),
                            "value": row.value,
                            "symbol_norm": row.symbol_norm,
                        })).collect::<Vec<_>>(),
                        "input_norm": w.input_norm,
                        "output_norm": w.output_norm,
                        "ratio": w.ratio,
                        "slice_quantity": w.slice_quantity,
                        "witness_values": wf.values(),
                    })
                }
                "matrix-view" => {
                    if let Some(tok) = op.as_deref() {
                        if tok != "pi4" {
                            return Err(Error::InvalidParameter(format!(
                                "matrix-view applies to pi4 only, got {tok:?}"
                            )));
                        }
                    }
                    let gc = match &sym {
                        AnyCoeffs::Two(gc) => gc,
                        AnyCoeffs::One(_) => {
                            return Err(Error::DimensionMismatch(
                                "the matrix view needs a two-dimensional symbol".into(),
                            ))
                        }
                    };
                    serde_json::to_value(pi4_matrix_bound(gc))?
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown method {other:?}; expected l2, search, level-witness, row-witness, or matrix-view"
                    )))
                }
            };
            emit_report(output.as_deref(), config, Some(seed), started, result)?;
            Ok(0)
        }
        Cmd::Sparse {
            family,
            n1,
            n2,
            extract,
            carleson,
            jn,
            output,
        } => {
            let rects = io::parse_rects(&io::read_text(&family)?)?;
            let (mut lx, mut ly) = (0u32, 0u32);
            for rect in &rects {
                lx = lx.max(rect.x.level());
                ly = ly.max(rect.y.level());
            }
            let grid = Grid2D::new(n1.unwrap_or(lx), n2.unwrap_or(ly))?;
            let fam = RectFamily::from_rects(grid, rects)?;
            let config = json!({
                "family": family, "n1": grid.n1(), "n2": grid.n2(),
                "extract": extract, "carleson": carleson, "jn": jn,
            });
            let result = if extract {
                let sf = sparse_extract(&fam);
                json!({
                    "density": sf.density(),
                    "union_ratio": sf.union_ratio(),
                    "rects": rect_family_json(sf.family()),
                    "witnesses": sf.witnesses().iter()
                        .map(|w| w.iter().collect::<Vec<usize>>())
                        .collect::<Vec<_>>(),
                })
            } else if let Some(mode) = carleson {
                let mode = match mode.as_str() {
                    "exact" => CarlesonMode::Exact,
                    "restricted" => CarlesonMode::Restricted,
                    other => {
                        return Err(Error::InvalidParameter(format!(
                            "unknown carleson mode {other:?}, expected exact or restricted"
                        )))
                    }
                };
                json!({"constant": carleson_constant(&fam, mode)?})
            } else if let Some(pq) = jn {
                let sf = sparse_extract(&fam);
                json!({"jn": jn_profile(&sf, pq)?, "density": sf.density()})
            } else {
                return Err(Error::InvalidParameter(
                    "choose one of --extract, --carleson, or --jn".into(),
                ));
            };
            emit_report(output.as_deref(), config, None, started, result)?;
            Ok(0)
        }
        Cmd::Decompose {
            input,
            p,
            s,
            output,
        } => {
            let f = io::parse_signal_2d(&io::read_text(&input)?)?;
            let d = atomic_decompose(&f, p, s)?;
            emit_text(output.as_deref(), &io::decomposition_json(&d)?)?;
            Ok(0)
        }
        Cmd::Construct { example, n, output } => {
            let grid = Grid2D::new(
                u32::try_from(n).map_err(|_| {
                    Error::InvalidParameter(format!("example size {n} out of range"))
                })?,
                u32::try_from(n).unwrap_or(0),
            )?;
            let c = match example.as_str() {
                "hadamard" => build_hadamard_example(grid, n)?,
                "identity" => build_identity_example(grid, n)?,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown example {other:?}, expected hadamard or identity"
                    )))
                }
            };
            emit_text(output.as_deref(), &io::coeffs_2d_json(&c)?)?;
            Ok(0)
        }
        Cmd::Generate {
            dist,
            count,
            seed,
            n1,
            n2,
            out_dir,
        } => {
            let dist: Distribution = dist.parse()?;
            let manifest = write_corpus(&out_dir, Grid2D::new(n1, n2)?, dist, count, seed)?;
            print_stdout(&serde_json::to_string_pretty(&manifest)?)?;
            Ok(0)
        }
        Cmd::Verify {
            suite,
            seed,
            count,
            n,
            format,
        } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse()?]
            };
            let mut reports = Vec::new();
            for s in suites {
                reports.push(run_suite(s, count, n, seed)?);
            }
            let all_ok = reports.iter().all(|r| r.passed());
            match format.as_str() {
                "text" => {
                    for r in &reports {
                        print_stdout(r.table().trim_end())?;
                    }
                    print_stdout(&format!(
                        "overall: {}",
                        if all_ok { "PASS" } else { "FAIL" }
                    ))?;
                }
                "json" => {
                    let config = json!({"suite": suite, "count": count, "n": n});
                    let result = json!({
                        "passed": all_ok,
                        "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
                    });
                    emit_report(None, config, Some(seed), started, result)?;
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown format {other:?}, expected text or json"
                    )))
                }
            }
            Ok(if all_ok { 0 } else { 1 })
        }
        Cmd::Report {
            quantity,
            count,
            seed,
            n1,
            n2,
            restarts,
            iters,
            format,
            output,
        } => {
            let rows = report_rows(&quantity, count, seed, n1, n2, restarts, iters)?;
            let config = json!({
                "quantity": quantity, "count": count,
                "n1": n1, "n2": n2,
                "restarts": restarts, "iters": iters,
            });
            match format.as_str() {
                "csv" => emit_text(output.as_deref(), &io::csv_table(&rows))?,
                "json" => {
                    let result = Value::Array(
                        rows.iter()
                            .map(|row| {
                                json!({
                                    "seed": row.seed, "n1": row.n1, "n2": row.n2,
                                    "quantity": row.quantity, "value": row.value,
                                })
                            })
                            .collect(),
                    );
                    emit_report(output.as_deref(), config, Some(seed), started, result)?;
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown format {other:?}, expected csv or json"
                    )))
                }
            }
            Ok(0)
        }
    }
}

/// One instance per base seed offset, so any row can be regenerated
/// with `generate --count 1 --seed <row seed>`.
fn report_rows(
    quantity: &str,
    count: usize,
    seed: u64,
    n1: u32,
    n2: u32,
    restarts: usize,
    iters: usize,
) -> Result<Vec<CsvRow>> {
    let grid = Grid2D::new(n1, n2)?;
    let mut rows = Vec::new();
    let row = |seed: u64, quantity: &str, value: f64| CsvRow {
        seed,
        n1,
        n2,
        quantity: quantity.into(),
        value,
    };
    match quantity {
        "level-witness" => {
            for i in 0..count {
                let s = seed + i as u64;
                let g = generate_corpus(grid, Distribution::Gaussian, 1, s)?.remove(0);
                let (_, w) = level_set_witness(&g, 2.0, 2.0)?;
                let gn = norm_2d(&g, NormKind::HpSquare(2.0))?;
                rows.push(row(s, "ratio", w.ratio));
                rows.push(row(s, "symbol-norm", gn));
                if gn > 0.0 {
                    rows.push(row(s, "envelope", w.ratio / gn));
                }
            }
        }
        "tensor-search" => {
            let budget = SearchBudget {
                restarts,
                iterations: iters,
                seed,
            };
            for i in 0..count {
                let s = seed + i as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let b = gaussian_signal_1d(grid.x_axis(), &mut rng);
                let vals: Vec<f64> = (0..grid.x_cells())
                    .flat_map(|ix| std::iter::repeat_n(b.value(ix as u64), grid.y_cells()))
                    .collect();
                let g = dyadlab::Signal2D::new(grid, vals)?;
                let line = dyadlab::functionals::bmo_line(&b);
                rows.push(row(s, "line-norm", line));
                let op = NamedOperator2D::new(OperatorKind2D::Pi3, g);
                for p in [1.0, 2.0] {
                    let found = opnorm_search_2d(
                        &op,
                        NormKind::HpSquare(p),
                        NormKind::HpSquare(p),
                        &budget,
                    )?;
                    rows.push(row(s, &format!("search-p{p}"), found.value));
                }
            }
        }
        "atomic" => {
            for i in 0..count {
                let s = seed + i as u64;
                let f = generate_corpus(grid, Distribution::Gaussian, 1, s)?.remove(0);
                for p in [0.5, 1.0, 2.0] {
                    let slater = if p > 1.0 { 2.0 * p } else { 2.0 };
                    let d = atomic_decompose(&f, p, slater)?;
                    let denom = norm_2d(&f, NormKind::HpSquare(p))?;
                    if denom > 0.0 {
                        rows.push(row(s, &format!("ratio-p{p}"), d.hp_estimate() / denom));
                    }
                }
            }
        }
        "bmo" => {
            for i in 0..count {
                let s = seed + i as u64;
                let f = generate_corpus(grid, Distribution::Gaussian, 1, s)?.remove(0);
                rows.push(row(s, "exact", norm_2d(&f, NormKind::ProductBmoExact)?));
                rows.push(row(
                    s,
                    "heuristic",
                    norm_2d(&f, NormKind::ProductBmoHeuristic)?,
                ));
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown quantity {other:?}; expected level-witness, tensor-search, atomic, or bmo"
            )))
        }
    }
    Ok(rows)
}
