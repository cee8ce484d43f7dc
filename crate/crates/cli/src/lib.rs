//! The `trifam` command line, callable in-process through [`run`].

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use rainbow_core::canon::{are_isomorphic, canonical_family};
use rainbow_core::certifier::{certify_with_limit, CertifyError};
use rainbow_core::constructions::{double, fig5, pair_family, t_star};
use rainbow_core::mis::DEFAULT_MIS_LIMIT;
use rainbow_core::rs::{check_t2_constraints, decompose, unique_triangle_property};
use rainbow_core::search::{max_family, Checkpoint, SearchConfig, SearchResult, Target};
use rainbow_core::{find_rainbow, Mode, RainbowCertificate, TriangleFamily};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "trifam",
    version,
    about = "Rainbow-triangle-free families of triangles"
)]
struct Cli {
    /// Write the primary output to this path instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Stable `key=value` output.
    #[arg(long, global = true)]
    porcelain: bool,
    /// `key = value` file supplying defaults for any long flag.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report whether a family contains a rainbow triangle.
    Check {
        file: PathBuf,
        /// Also compare the size with n²/8.
        #[arg(long)]
        verify_bound: bool,
    },
    /// Emit a known construction.
    Construct {
        #[command(subcommand)]
        kind: Construction,
    },
    /// Run the extremal certifier.
    Certify {
        file: PathBuf,
        /// Largest vertex count for the exact independent-set solver.
        #[arg(long, default_value_t = DEFAULT_MIS_LIMIT)]
        mis_limit: usize,
    },
    /// Exhaustive search for large rainbow-free families.
    Search(SearchArgs),
    /// Multiset decomposition report.
    Rs { file: PathBuf },
    /// Decide whether two families are isomorphic.
    Iso { a: PathBuf, b: PathBuf },
    /// Print the canonical form of a family.
    Canon { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum Construction {
    /// Pairs `{2i, 2i+1}` joined to apexes `n/2..n`.
    Tstar {
        #[arg(long)]
        n: usize,
    },
    /// `pairs` disjoint pairs joined to the last `apexes` vertices.
    Pairs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        pairs: usize,
        #[arg(long)]
        apexes: usize,
    },
    /// Every member of a set-mode family taken twice.
    Double { file: PathBuf },
    /// Twelve triangles on nine vertices.
    Fig5,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "set")]
    mode: Mode,
    /// Decide whether a family of at least this size exists.
    #[arg(long, value_name = "K", conflicts_with = "enumerate_extremal")]
    prove: Option<usize>,
    /// List every isomorphism class at the maximum.
    #[arg(long)]
    enumerate_extremal: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long, value_name = "PATH")]
    checkpoint: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    resume: Option<PathBuf>,
}

/// Everything a run produced; `main` prints it and exits with `code`.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn with_code(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if let Err(e) = merge_config(&mut argv) {
        return Outcome::error(EXIT_USAGE, e);
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(o) => o,
    };
    match (&cli.out, &cli.command) {
        (Some(path), cmd) if !matches!(cmd, Command::Search(_)) && outcome.code != EXIT_USAGE => {
            match fs::write(path, &outcome.stdout) {
                Ok(()) => Outcome {
                    stdout: String::new(),
                    ..outcome
                },
                Err(e) => Outcome::error(EXIT_USAGE, format!("{}: {e}", path.display())),
            }
        }
        _ => outcome,
    }
}

/// Appends `--key value` for each config entry whose flag is absent from
/// the command line, so flags always win.
fn merge_config(argv: &mut Vec<OsString>) -> Result<(), String> {
    let strings: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let path = strings.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            strings.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(path) = path else {
        return Ok(());
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    let given: Vec<&str> = strings
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| format!("{path}:{}: expected `key = value`", no + 1))?;
        if key.is_empty() || key == "config" || key.starts_with('-') {
            return Err(format!("{path}:{}: invalid key `{key}`", no + 1));
        }
        if given.contains(&key) {
            continue;
        }
        match value {
            "true" => argv.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                argv.push(format!("--{key}").into());
                argv.push(value.into());
            }
        }
    }
    Ok(())
}

fn read_family(path: &Path) -> Result<TriangleFamily, Outcome> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Outcome::error(EXIT_USAGE, format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path)
            .map_err(|e| Outcome::error(EXIT_USAGE, format!("{}: {e}", path.display())))?
    };
    TriangleFamily::parse_trifam(&text)
        .map_err(|e| Outcome::error(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn certificate_text(cert: &RainbowCertificate, porcelain: bool) -> String {
    if !porcelain {
        return cert.to_string();
    }
    let [x, y, z] = cert.vertices;
    let mut s = format!("status=rainbow\ntriple={x} {y} {z}\n");
    for (e, r) in &cert.assignment {
        let _ = writeln!(
            s,
            "edge_{}_{}=owner {} copy {}",
            e.u(),
            e.v(),
            r.index,
            r.copy
        );
    }
    s
}

fn execute(cli: &Cli) -> Result<Outcome, Outcome> {
    let p = cli.porcelain;
    match &cli.command {
        Command::Check { file, verify_bound } => {
            let f = read_family(file)?;
            if let Some(cert) = find_rainbow(&f) {
                return Ok(Outcome::with_code(EXIT_FAILS, certificate_text(&cert, p)));
            }
            let mut out = String::from(if p {
                "status=rainbow-free\n"
            } else {
                "rainbow-free\n"
            });
            let mut code = EXIT_OK;
            if *verify_bound {
                let (size, n2) = (f.size(), f.n() * f.n());
                let within = 8 * size <= n2;
                let verdict = match (f.mode(), within) {
                    (Mode::Set, true) => "pass",
                    (Mode::Set, false) => {
                        code = EXIT_FAILS;
                        "fail"
                    }
                    // The bound is only asymptotic for multisets.
                    (Mode::Multiset, true) => "within",
                    (Mode::Multiset, false) => "exceeds",
                };
                let bound = format_ratio(n2, 8);
                if p {
                    let _ = writeln!(out, "size={size}\nbound={bound}\nbound_check={verdict}");
                } else {
                    let _ = writeln!(out, "size {size} <= n^2/8 = {bound} {verdict}");
                }
            }
            Ok(Outcome::with_code(code, out))
        }
        Command::Construct { kind } => {
            let f = match kind {
                Construction::Tstar { n } => t_star(*n),
                Construction::Pairs { n, pairs, apexes } => pair_family(*n, *pairs, *apexes),
                Construction::Double { file } => double(&read_family(file)?),
                Construction::Fig5 => Ok(fig5()),
            }
            .map_err(|e| Outcome::error(EXIT_USAGE, e))?;
            Ok(Outcome::ok(f.to_trifam()))
        }
        Command::Certify { file, mis_limit } => {
            let f = read_family(file)?;
            match certify_with_limit(&f, *mis_limit) {
                Ok(report) => {
                    let code = if report.passed() { EXIT_OK } else { EXIT_FAILS };
                    Ok(Outcome::with_code(code, report.render(p)))
                }
                Err(CertifyError::Rainbow(cert)) => {
                    Ok(Outcome::with_code(EXIT_FAILS, certificate_text(&cert, p)))
                }
                Err(e @ CertifyError::MisLimit(_)) => Err(Outcome::error(EXIT_LIMIT, e)),
                Err(e) => Err(Outcome::error(EXIT_FAILS, e)),
            }
        }
        Command::Search(args) => search(args, cli.out.as_deref(), p),
        Command::Rs { file } => {
            let f = read_family(file)?;
            let d = decompose(&f).map_err(|e| Outcome::error(EXIT_USAGE, e))?;
            let check = check_t2_constraints(&d, &f);
            let unique = unique_triangle_property(&d.g2).is_ok();
            let mut out = if p {
                rs_porcelain(&d, unique)
            } else {
                rainbow_core::rs::bound_report(&d)
            };
            for v in &check.violations {
                let _ = writeln!(out, "{}{v:?}", if p { "violation=" } else { "violation " });
            }
            let holds = check.holds() && unique && d.g2.edge_count() == 3 * d.t2.size();
            Ok(Outcome::with_code(
                if holds { EXIT_OK } else { EXIT_FAILS },
                out,
            ))
        }
        Command::Iso { a, b } => {
            let (fa, fb) = (read_family(a)?, read_family(b)?);
            let iso = are_isomorphic(&fa, &fb);
            let out = match (p, iso) {
                (true, _) => format!("isomorphic={iso}\n"),
                (false, true) => "isomorphic\n".to_string(),
                (false, false) => "not-isomorphic\n".to_string(),
            };
            Ok(Outcome::with_code(
                if iso { EXIT_OK } else { EXIT_FAILS },
                out,
            ))
        }
        Command::Canon { file } => Ok(Outcome::ok(
            canonical_family(&read_family(file)?).to_trifam(),
        )),
    }
}

fn format_ratio(num: usize, den: usize) -> String {
    let g = gcd(num, den);
    if den / g == 1 {
        (num / g).to_string()
    } else {
        format!("{}/{}", num / g, den / g)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

fn rs_porcelain(d: &rainbow_core::rs::MultisetDecomposition, unique: bool) -> String {
    let n = d.t1.n();
    let check = rainbow_core::rs::check_doubled_constraints(d);
    let verdict = |b: bool| if b { "pass" } else { "fail" };
    let mut s = String::new();
    let _ = writeln!(s, "n={n}");
    let _ = writeln!(s, "t1={}", d.t1.size());
    let _ = writeln!(s, "t1_bound={}", format_ratio(n * n, 8));
    let _ = writeln!(s, "t1_check={}", verdict(8 * d.t1.size() <= n * n));
    let _ = writeln!(s, "t2={}", d.t2.size());
    let _ = writeln!(s, "g2_edges={}", d.g2.edge_count());
    let _ = writeln!(
        s,
        "g2_edges_check={}",
        verdict(d.g2.edge_count() == 3 * d.t2.size())
    );
    let _ = writeln!(s, "t2_edge_disjoint={}", check.edge_disjoint);
    let _ = writeln!(s, "g2_no_extra_triangles={}", check.no_extra_triangles);
    let _ = writeln!(s, "g2_unique_triangle={unique}");
    let _ = writeln!(s, "total={}", d.total());
    let _ = writeln!(s, "t2_subquadratic=informational");
    s
}

fn search(args: &SearchArgs, out: Option<&Path>, p: bool) -> Result<Outcome, Outcome> {
    let target = match (args.prove, args.enumerate_extremal) {
        (Some(k), _) => Target::ProveSize(k),
        (None, true) => Target::EnumerateExtremal,
        (None, false) => Target::Maximize,
    };
    let mut cfg = SearchConfig::new(args.n, args.mode)
        .target(target)
        .workers(args.workers);
    cfg.node_limit = args.node_limit;
    cfg.checkpoint_path = args.checkpoint.clone();
    if let Some(path) = &args.resume {
        let ckpt = Checkpoint::load(path)
            .map_err(|e| Outcome::error(EXIT_USAGE, format!("{}: {e}", path.display())))?;
        cfg = cfg.resume(ckpt);
    }
    let result = max_family(&cfg).map_err(|e| match e {
        rainbow_core::search::SearchError::UnsoundWitness(_) => Outcome::error(EXIT_FAILS, e),
        _ => Outcome::error(EXIT_USAGE, e),
    })?;

    let mut files = Vec::new();
    if let Some(dir) = out {
        fs::create_dir_all(dir)
            .map_err(|e| Outcome::error(EXIT_USAGE, format!("{}: {e}", dir.display())))?;
        for (i, w) in result.witnesses.iter().enumerate() {
            let path = dir.join(format!("witness-{:03}.trifam", i + 1));
            fs::write(&path, w.to_trifam())
                .map_err(|e| Outcome::error(EXIT_USAGE, format!("{}: {e}", path.display())))?;
            files.push(path);
        }
    }

    let text = search_report(&cfg, &result, &files, out.is_none() && !p, p);
    let code = match target {
        _ if !result.completed => EXIT_LIMIT,
        Target::ProveSize(_) if result.witnesses.is_empty() => EXIT_FAILS,
        _ => EXIT_OK,
    };
    Ok(Outcome::with_code(code, text))
}

fn search_report(
    cfg: &SearchConfig,
    r: &SearchResult,
    files: &[PathBuf],
    inline: bool,
    p: bool,
) -> String {
    let target = match cfg.target {
        Target::Maximize => "maximize".to_string(),
        Target::EnumerateExtremal => "enumerate-extremal".to_string(),
        Target::ProveSize(k) => format!("prove {k}"),
    };
    let mut fields: Vec<(&str, String)> = vec![
        ("n", cfg.n.to_string()),
        ("mode", cfg.mode.to_string()),
        ("target", target),
        ("workers", cfg.workers.to_string()),
    ];
    match cfg.target {
        Target::ProveSize(k) => {
            let proof = match (r.witnesses.is_empty(), r.completed, p) {
                (false, _, true) => "found".to_string(),
                (false, _, false) => "witness found".to_string(),
                (true, true, true) => "refuted".to_string(),
                (true, true, false) => format!("no rainbow-free family of size {k}"),
                (true, false, _) => "undecided".to_string(),
            };
            fields.push(("proof", proof));
            fields.push(("best_seen", r.best_size.to_string()));
        }
        _ => {
            fields.push(("best", r.best_size.to_string()));
            fields.push((
                "classes",
                r.extremal_class_count
                    .map_or("n/a".to_string(), |c| c.to_string()),
            ));
        }
    }
    fields.push(("nodes", r.nodes_explored.to_string()));
    fields.push(("completed", r.completed.to_string()));
    fields.push(("witnesses", r.witnesses.len().to_string()));
    for f in files {
        fields.push(("witness_file", f.display().to_string()));
    }
    let sep = if p { "=" } else { " " };
    let mut s = String::new();
    for (k, v) in fields {
        let _ = writeln!(s, "{k}{sep}{v}");
    }
    if inline {
        for (i, w) in r.witnesses.iter().enumerate() {
            let _ = writeln!(s, "witness {}", i + 1);
            s.push_str(&w.to_trifam());
        }
    }
    s
}
