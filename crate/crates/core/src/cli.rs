//! The `hrnr` command line.
//!
//! Exit codes: 0 success or membership, 2 a definitive negative answer
//! (empty range, λ out of range, residual above tolerance, not correctable),
//! 3 the subset enumeration cap, 1 any other error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::io::{
    read_json, read_matrix, read_projection, to_json, ErrorsFile, MatrixFile, ProjectionFile,
    SpectrumFile,
};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::normal::{hull_intersection_region, ConvexRegion, SpectrumList};
use crate::projection::{
    construct_projection_for, general_matrix_projection, pairing_projection, verify_compression,
    CompressionProjection,
};
use crate::qec::{code_check, joint_search, CodeReport};
use crate::range::{hermitian_range, RankKRange};
use crate::search::{scan_region, Grid, SearchConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hrnr", version, about = "Higher-rank numerical ranges")]
struct Cli {
    /// Base seed for random frames.
    #[arg(long, global = true, env = "HRNR_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Pairing,
    General,
    /// Arbitrary square input, `4k − 3 ≤ N`; λ is chosen by the construction.
    Corollary,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Λ_k of a Hermitian matrix.
    Range {
        #[arg(long)]
        input: PathBuf,
        #[arg(short = 'k')]
        k: usize,
    },
    /// Build a rank-k projection compressing the input to λ.
    Project {
        #[arg(long)]
        input: PathBuf,
        #[arg(short = 'k')]
        k: usize,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Option<C64>,
        #[arg(long, value_enum, default_value = "pairing")]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residual ‖PTP − λP‖ of a stored projection.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        projection: PathBuf,
        /// Defaults to the value stored with the projection.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Option<C64>,
        /// Relative to max(1, ‖T‖_F).
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Convex-hull outer bound for a normal matrix or an eigenvalue list.
    Hull {
        #[arg(long)]
        input: PathBuf,
        #[arg(short = 'k')]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best search residual over a grid of λ values. Low residuals are
    /// numerical evidence of membership, not proof.
    Scan {
        #[arg(long)]
        input: PathBuf,
        #[arg(short = 'k')]
        k: usize,
        #[arg(long, value_parser = parse_grid, default_value = "41x41")]
        grid: (usize, usize),
        #[arg(long, value_parser = parse_bbox, allow_hyphen_values = true)]
        bbox: Option<[f64; 4]>,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check or search error-correcting codes.
    Qec {
        /// Error operators file.
        #[arg(long, alias = "errors")]
        input: PathBuf,
        /// Projection file of the code to check.
        #[arg(long, conflicts_with = "search", required_unless_present = "search")]
        code: Option<PathBuf>,
        /// Search for codes of this rank.
        #[arg(long)]
        search: Option<usize>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
        /// Where to write the best code found by a search.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `re`, `re+imi`, `re-imi` or `imi`.
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number {s:?}");
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse::<f64>()
            .map(|x| C64::new(x, 0.0))
            .map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid must look like NXxNY, got {s:?}"))?;
    let nx = a.parse().map_err(|_| format!("bad grid width {a:?}"))?;
    let ny = b.parse().map_err(|_| format!("bad grid height {b:?}"))?;
    Ok((nx, ny))
}

fn parse_bbox(s: &str) -> std::result::Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| format!("bad bounding box {s:?}"))?;
    <[f64; 4]>::try_from(parts).map_err(|_| "bounding box needs x0,x1,y0,y1".to_string())
}

/// 15 significant digits, trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        "0".into()
    } else {
        format!("{rounded}")
    }
}

fn fmt_complex(z: C64) -> String {
    if z.im == 0.0 {
        fmt_num(z.re)
    } else {
        let im = fmt_num(z.im);
        let sign = if im.starts_with('-') { "" } else { "+" };
        format!("{}{sign}{im}i", fmt_num(z.re))
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::LambdaOutOfRange { .. } => EXIT_NEGATIVE,
        Error::TooManySubsets { .. } => EXIT_CAP,
        _ => EXIT_ERROR,
    }
}

/// Runs the command line; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{shown}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{shown}");
                    EXIT_ERROR
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(io_err),
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Range { input, k } => cmd_range(input, *k, out),
        Command::Project {
            input,
            k,
            lambda,
            method,
            out: path,
        } => cmd_project(input, *k, *lambda, *method, cli.seed, path.as_deref(), out),
        Command::Verify {
            input,
            projection,
            lambda,
            tol,
        } => cmd_verify(input, projection, *lambda, *tol, out),
        Command::Hull {
            input,
            k,
            out: path,
        } => cmd_hull(input, *k, path.as_deref(), out),
        Command::Scan {
            input,
            k,
            grid,
            bbox,
            restarts,
            out: path,
        } => {
            let grid = Grid {
                nx: grid.0,
                ny: grid.1,
                bbox: *bbox,
            };
            let cfg = SearchConfig::for_scan()
                .with_seed(cli.seed)
                .with_restarts(*restarts);
            cmd_scan(input, *k, &grid, &cfg, path.as_deref(), out)
        }
        Command::Qec {
            input,
            code,
            search,
            restarts,
            tol,
            json,
            out: path,
        } => {
            let errors = read_json::<ErrorsFile>(input)?.to_model()?;
            match (code, search) {
                (Some(code), _) => {
                    let p = read_projection(code)?;
                    let report = code_check(&errors, &p, *tol)?;
                    write_report(&report, *json, out)?;
                    Ok(if report.correctable {
                        EXIT_OK
                    } else {
                        EXIT_NEGATIVE
                    })
                }
                (None, Some(k)) => {
                    let mut cfg = SearchConfig::default()
                        .with_seed(cli.seed)
                        .with_restarts(*restarts);
                    if let Some(t) = tol {
                        cfg.residual_tol = *t;
                    }
                    let codes = joint_search(&errors, *k, &cfg)?;
                    writeln!(out, "codes {}", codes.len()).map_err(io_err)?;
                    for (i, (_, report)) in codes.iter().enumerate() {
                        writeln!(
                            out,
                            "code {i} max_residual {}",
                            fmt_num(report.max_residual)
                        )
                        .map_err(io_err)?;
                    }
                    if let (Some(path), Some((p, _))) = (path, codes.first()) {
                        emit(
                            &to_json(&ProjectionFile::from_projection(p)),
                            Some(path),
                            out,
                        )?;
                    }
                    Ok(if codes.is_empty() {
                        EXIT_NEGATIVE
                    } else {
                        EXIT_OK
                    })
                }
                (None, None) => Err(Error::InvalidConfig("qec needs --code or --search".into())),
            }
        }
    }
}

fn cmd_range(input: &Path, k: usize, out: &mut dyn Write) -> Result<i32> {
    let a = read_matrix(input)?;
    let range = hermitian_range(&a, k)?;
    let line = match &range {
        RankKRange::Empty => "Empty".to_string(),
        RankKRange::Singleton(z) => format!("Singleton {}", fmt_complex(*z)),
        RankKRange::Interval { lo, hi } => format!("Interval {} {}", fmt_num(*lo), fmt_num(*hi)),
        RankKRange::Region { .. } => unreachable!("Hermitian ranges are real"),
    };
    writeln!(out, "{line}").map_err(io_err)?;
    Ok(if range.is_empty() {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    })
}

fn real_lambda(lambda: Option<C64>, k: usize) -> Result<f64> {
    let z = lambda.ok_or_else(|| Error::InvalidConfig("--lambda is required".into()))?;
    if z.im != 0.0 {
        // Hermitian ranges are real
        return Err(Error::LambdaOutOfRange { lambda: z.re, k });
    }
    Ok(z.re)
}

fn cmd_project(
    input: &Path,
    k: usize,
    lambda: Option<C64>,
    method: Method,
    seed: u64,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let t = read_matrix(input)?;
    let p: CompressionProjection = match method {
        Method::Pairing => {
            let lambda = real_lambda(lambda, k)?;
            let eig = hermitian_eig(&t)?;
            pairing_projection(&eig, k, lambda, &[], None)?.verified(&t)?
        }
        Method::General => {
            construct_projection_for(&t, k, real_lambda(lambda, k)?, None, Some(seed))?
        }
        Method::Corollary => general_matrix_projection(&t, k)?.1,
    };
    let residual = p.residual().unwrap_or(f64::NAN);
    let tol = 1e-9 * t.scale_ref();
    match path {
        Some(path) => {
            emit(
                &to_json(&ProjectionFile::from_projection(&p)),
                Some(path),
                out,
            )?;
            writeln!(out, "lambda {}", fmt_complex(p.lambda())).map_err(io_err)?;
            writeln!(out, "residual {}", fmt_num(residual)).map_err(io_err)?;
        }
        None => emit(&to_json(&ProjectionFile::from_projection(&p)), None, out)?,
    }
    if !(residual <= tol) {
        return Err(Error::NotACompression { residual });
    }
    Ok(EXIT_OK)
}

fn cmd_verify(
    input: &Path,
    projection: &Path,
    lambda: Option<C64>,
    tol: f64,
    out: &mut dyn Write,
) -> Result<i32> {
    let t = read_matrix(input)?;
    let p = read_projection(projection)?;
    let lambda = lambda.unwrap_or(p.lambda());
    let residual = verify_compression(&t, &p, lambda)?;
    writeln!(out, "residual {}", fmt_num(residual)).map_err(io_err)?;
    Ok(if residual <= tol * t.scale_ref() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn read_spectrum(input: &Path) -> Result<SpectrumList> {
    let value: serde_json::Value = read_json(input)?;
    if value.get("spectrum").is_some() {
        let file: SpectrumFile =
            serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))?;
        file.to_spectrum()
    } else {
        let file: MatrixFile =
            serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))?;
        SpectrumList::from_normal_matrix(&file.to_matrix()?)
    }
}

fn csv_complex(z: C64) -> String {
    format!("{},{}", z.re + 0.0, z.im + 0.0)
}

fn cmd_hull(input: &Path, k: usize, path: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let spec = read_spectrum(input)?;
    let region = hull_intersection_region(&spec, k)?;
    let mut text = String::from("re,im\n");
    if region == ConvexRegion::Empty {
        text.push_str("# empty\n");
    }
    for z in region.vertices() {
        text.push_str(&csv_complex(z));
        text.push('\n');
    }
    emit(&text, path, out)?;
    Ok(if region == ConvexRegion::Empty {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    })
}

fn cmd_scan(
    input: &Path,
    k: usize,
    grid: &Grid,
    cfg: &SearchConfig,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let t: ComplexMatrix = read_matrix(input)?;
    let points = scan_region(&t, k, grid, cfg)?;
    let mut text = String::from("re,im,residual\n");
    for p in points {
        text.push_str(&format!("{},{}\n", csv_complex(p.lambda), p.residual));
    }
    emit(&text, path, out)?;
    Ok(EXIT_OK)
}

fn write_report(report: &CodeReport, json: bool, out: &mut dyn Write) -> Result<()> {
    let m = report.lambda_matrix.rows();
    if json {
        let lambda: Vec<Vec<[f64; 2]>> = (0..m)
            .map(|i| {
                report
                    .lambda_matrix
                    .row(i)
                    .iter()
                    .map(|z| [z.re, z.im])
                    .collect()
            })
            .collect();
        let value = serde_json::json!({
            "correctable": report.correctable,
            "max_residual": report.max_residual,
            "lambda": lambda,
            "residuals": report.residuals,
        });
        return out.write_all(to_json(&value).as_bytes()).map_err(io_err);
    }
    writeln!(out, "correctable {}", report.correctable).map_err(io_err)?;
    writeln!(out, "max_residual {}", fmt_num(report.max_residual)).map_err(io_err)?;
    writeln!(out, "lambda").map_err(io_err)?;
    for i in 0..m {
        let row: Vec<String> = report
            .lambda_matrix
            .row(i)
            .iter()
            .map(|&z| fmt_complex(z))
            .collect();
        writeln!(out, "  {}", row.join(" ")).map_err(io_err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1.5").unwrap(), C64::new(1.5, 0.0));
        assert_eq!(parse_complex("0.2+0.1i").unwrap(), C64::new(0.2, 0.1));
        assert_eq!(parse_complex("-1e-3-2i").unwrap(), C64::new(-1e-3, -2.0));
        assert_eq!(parse_complex("2.5e+1i").unwrap(), C64::new(0.0, 25.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("3 + i").unwrap(), C64::new(3.0, 1.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt_complex(C64::new(1.0, -0.5)), "1-0.5i");
    }

    #[test]
    fn grid_and_bbox_parsing() {
        assert_eq!(parse_grid("41x21").unwrap(), (41, 21));
        assert!(parse_grid("41").is_err());
        assert_eq!(parse_bbox("-1,1,-2,2").unwrap(), [-1.0, 1.0, -2.0, 2.0]);
        assert!(parse_bbox("0,1").is_err());
    }
}
