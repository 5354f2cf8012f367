use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qons_core::charges::spectrum;
use qons_core::scalars::{casimir_weight, coeff_c_closed, coeff_c_recursive, omega0, poly_p_table, rho_constant};
use qons_core::{
    build_charges, dress_chain, extend, lift_chain, run_verify, CMatrix, Checks, Error, KMatrix, LaurentMatrix,
    RunConfig, C64,
};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "qons", version, about = "Build and verify dressed K-matrices and q-Onsager generators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `outputs.dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated check groups, or `all`.
    #[arg(long)]
    checks: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected checks and write a JSON report.
    Verify(Common),
    /// Write generators, charges, the dressed K-matrix, polynomials or a spectrum.
    Export {
        what: Target,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Print the scalar constants and closure coefficients level by level.
    Table(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Generators,
    Charges,
    Kmatrix,
    Polys,
    Spectrum,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

enum Failure {
    Config(String),
    Cap(String),
    Checks,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Checks => 1,
            Failure::Config(_) => 2,
            Failure::Cap(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionCap { .. } => Failure::Cap(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Config(format!("{}: {e}", path.display()))
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf), Failure> {
    let text = fs::read_to_string(&common.config).map_err(io_err(&common.config))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(list) = &common.checks {
        cfg.checks = Checks::parse_list(list);
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = common.tol {
        cfg.tol = tol;
    }
    cfg.validate()?;
    let out = common
        .out
        .clone()
        .or_else(|| cfg.outputs.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out).map_err(io_err(&out))?;
    Ok((cfg, out))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(io_err(path))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn verify(common: &Common) -> Result<(), Failure> {
    let (cfg, out) = load(common)?;
    let report = run_verify(&cfg)?;
    for e in &report.entries {
        let verdict = if e.pass { "pass" } else { "FAIL" };
        println!("{verdict}  {:<48} {:>10.3e}  (tol {:.0e})", e.name, e.residual, e.tolerance);
    }
    let failures = report.failures().count();
    println!("{} checks, {failures} failing", report.entries.len());
    write(&out.join(&cfg.outputs.report), &to_json(&report))?;
    if report.overall_pass {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn entries(m: &CMatrix) -> Vec<[f64; 2]> {
    m.iter().copied().map(pair).collect()
}

fn matrix_json(m: &CMatrix) -> serde_json::Value {
    json!({ "dim": m.nrows(), "degrees": [{ "d": 0, "entries": entries(m) }] })
}

fn laurent_json(m: &LaurentMatrix) -> serde_json::Value {
    let degrees: Vec<_> = m.terms().map(|(d, c)| json!({ "d": d, "entries": entries(c) })).collect();
    json!({ "dim": m.dim(), "degrees": degrees })
}

fn matrix_csv(m: &CMatrix) -> String {
    let mut s = String::from("row,col,re,im\n");
    for ((i, j), z) in m.indexed_iter() {
        s.push_str(&format!("{i},{j},{:e},{:e}\n", z.re, z.im));
    }
    s
}

/// The auxiliary 2×2 blocks of `K` interleaved into one `2·dim` Laurent matrix.
fn full_k(k: &KMatrix) -> LaurentMatrix {
    let dim = k.quantum_dim();
    let mut degrees: Vec<i32> = k.blocks().iter().flatten().flat_map(|b| b.degrees().collect::<Vec<_>>()).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let terms = degrees.into_iter().map(|d| {
        let mut m = CMatrix::zeros((2 * dim, 2 * dim));
        for (a, row) in k.blocks().iter().enumerate() {
            for (b, block) in row.iter().enumerate() {
                for ((i, j), z) in block.coeff_or_zero(d).indexed_iter() {
                    m[[a * dim + i, b * dim + j]] = *z;
                }
            }
        }
        (d, m)
    });
    LaurentMatrix::from_terms(2 * dim, terms)
}

/// Named constant matrices, as one JSON object or one CSV file each.
fn write_matrices(out: &Path, stem: &str, format: Format, named: &[(String, CMatrix)]) -> Result<(), Failure> {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> =
                named.iter().map(|(n, m)| (n.clone(), matrix_json(m))).collect();
            write(&out.join(format!("{stem}.json")), &to_json(&map))
        }
        Format::Csv => {
            for (n, m) in named {
                write(&out.join(format!("{stem}_{n}.csv")), &matrix_csv(m))?;
            }
            Ok(())
        }
    }
}

fn export(what: Target, format: Format, common: &Common) -> Result<(), Failure> {
    let (cfg, out) = load(common)?;
    let ctx = cfg.context()?;
    let n = cfg.n;
    let csv_unsupported = |name: &str| Failure::Config(format!("{name} export is Laurent-valued; use --format json"));
    match what {
        Target::Generators => {
            let set = lift_chain(&ctx, n)?.swap_remove(n - 1);
            let named: Vec<_> = set.entries().map(|(kind, idx, g)| (kind.label(idx), g.matrix.clone())).collect();
            write_matrices(&out, "generators", format, &named)
        }
        Target::Charges => {
            let set = extend(&ctx, &lift_chain(&ctx, n)?[n - 1], cfg.k_max() + 1)?;
            let family = build_charges(&set, cfg.weights(), cfg.k_max())?;
            let named: Vec<_> =
                family.charges.iter().enumerate().map(|(k, m)| (format!("I_{}", 2 * k + 1), m.clone())).collect();
            write_matrices(&out, "charges", format, &named)
        }
        Target::Kmatrix => {
            if format == Format::Csv {
                return Err(csv_unsupported("kmatrix"));
            }
            let k = dress_chain(&ctx, n)?.swap_remove(n);
            let body = json!({ "N": n, "j": ctx.spin(), "matrix": laurent_json(&full_k(&k)) });
            write(&out.join("kmatrix.json"), &to_json(&body))
        }
        Target::Polys => {
            if format == Format::Csv {
                return Err(csv_unsupported("polys"));
            }
            let polys: Vec<_> = poly_p_table(&ctx, n)?
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    let terms: Vec<_> = p.terms().map(|(d, c)| json!({ "d": d, "c": pair(c) })).collect();
                    json!({ "name": format!("P_-{k}"), "terms": terms })
                })
                .collect();
            write(&out.join("polys.json"), &to_json(&json!({ "N": n, "polys": polys })))
        }
        Target::Spectrum => {
            let set = extend(&ctx, &lift_chain(&ctx, n)?[n - 1], 1)?;
            let family = build_charges(&set, cfg.weights(), 0)?;
            let eig = spectrum(&family.charges[0])?;
            match format {
                Format::Json => {
                    let values: Vec<_> = eig.iter().copied().map(pair).collect();
                    let body = json!({ "N": n, "j": ctx.spin(), "charge": "I_1", "eigenvalues": values });
                    write(&out.join("spectrum.json"), &to_json(&body))
                }
                Format::Csv => {
                    let mut s = String::from("index,re,im\n");
                    for (i, z) in eig.iter().enumerate() {
                        s.push_str(&format!("{i},{:e},{:e}\n", z.re, z.im));
                    }
                    write(&out.join("spectrum.csv"), &s)
                }
            }
        }
    }
}

fn fmt(z: C64) -> String {
    format!("{:+.6e}{:+.6e}i", z.re, z.im)
}

fn table(common: &Common) -> Result<(), Failure> {
    let text = fs::read_to_string(&common.config).map_err(io_err(&common.config))?;
    let cfg = RunConfig::from_json(&text)?;
    let ctx = cfg.context()?;
    println!("w0  = {}", fmt(casimir_weight(&ctx)));
    println!("rho = {}", fmt(rho_constant(&ctx)));
    println!("{:>3} {:>28} {:>3} {:>28} {:>28} {:>10}", "N", "omega0", "k", "C_-k closed", "C_-k recursive", "rel dev");
    for n in 1..=cfg.n {
        let w = omega0(&ctx, n).map_or_else(|_| "-".to_string(), fmt);
        for k in 0..n {
            let closed = coeff_c_closed(&ctx, n, k + 1)?;
            let rec = coeff_c_recursive(&ctx, n, k)?;
            let dev = (closed - rec).norm() / closed.norm().max(rec.norm()).max(f64::MIN_POSITIVE);
            let w = if k == 0 { w.as_str() } else { "" };
            println!("{n:>3} {w:>28} {k:>3} {:>28} {:>28} {dev:>10.2e}", fmt(closed), fmt(rec));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(c) => verify(c),
        Command::Export { what, format, common } => export(*what, *format, common),
        Command::Table(c) => table(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("error: {m}"),
                Failure::Cap(m) => eprintln!("error: {m}"),
                Failure::Checks => eprintln!("verification failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
