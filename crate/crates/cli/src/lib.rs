//! `apnforge` command-line front end.
//!
//! [`run`] is the whole program minus process plumbing: it parses `argv`,
//! executes one verb, writes the report to `out` and diagnostics to `err`,
//! and returns the exit status (0 ok, 2 usage error, 3 domain error).

pub mod suites;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use apnforge_core::ddt::{self, Family, FamilyMember, FamilySpec};
use apnforge_core::phi::{build_phi, build_phi_j, gold_factors, gold_product};
use apnforge_core::screen::{self, coprime_gold_formula, coprime_scan, root_of_unity_audit};
use apnforge_core::{FieldCtx, FieldElement, PolyError, Strategy, UniPoly};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "apnforge", version, about = "APN function verification over GF(2^n)")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Worker threads for the enumeration kernels (results do not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Extension degree n of GF(2^n).
    #[arg(long)]
    n: u32,
    /// Reduction modulus as 0x-prefixed hex; defaults to the smallest
    /// irreducible of degree n.
    #[arg(long)]
    modulus: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Differential spectrum of f.
    Ddt {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        poly: String,
        /// Emit the full q x q table (n <= 12).
        #[arg(long)]
        full: bool,
    },
    /// Whether f is APN.
    Apn {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        poly: String,
    },
    /// The surface polynomial phi_j, or phi of a given f.
    Phi {
        #[arg(long, conflicts_with = "poly")]
        j: Option<u32>,
        #[arg(long, requires = "n")]
        poly: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        modulus: Option<String>,
    },
    /// Gold factorization of phi_(2^k+1).
    Gold {
        #[arg(long)]
        k: u32,
        /// Ambient field degree (a multiple of k; defaults to k).
        #[arg(long)]
        n: Option<u32>,
    },
    /// Coprimality of phi_(2^k+1) and phi_d: closed form and brute force.
    Coprime {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u32,
        /// Ambient field degree (a multiple of k; defaults to k).
        #[arg(long)]
        ambient: Option<u32>,
    },
    /// Exceptional-APN screen.
    Screen {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        poly: String,
    },
    /// Rational points on the projective closure of phi = 0.
    Points {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        poly: String,
    },
    /// Root-of-unity audit for m = 2^i * l + 1 against GF(2^k).
    Audit {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        ambient: Option<u32>,
    },
    /// The APN family table, or one member.
    Families {
        /// gold | kasami-welch | welch | niho | inverse | dobbertin | ekp | bcl
        #[arg(long, requires = "n")]
        family: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long)]
        s: Option<u32>,
        /// BCL parameter k.
        #[arg(long)]
        k: Option<u32>,
        /// EKP coefficient u (hex).
        #[arg(long)]
        u: Option<String>,
    },
    /// Run a bundled verification suite.
    Verify {
        /// gold-factorization | coprimality | families | prop1 | lucas | even-identity | all
        #[arg(default_value = "all")]
        suite: String,
    },
}

/// Why a command failed.
#[derive(Debug)]
enum Failure {
    Usage { flag: &'static str, msg: String },
    Domain(String),
}

fn usage(flag: &'static str, msg: impl ToString) -> Failure {
    Failure::Usage {
        flag,
        msg: msg.to_string(),
    }
}

fn domain(msg: impl ToString) -> Failure {
    Failure::Domain(msg.to_string())
}

/// A verb's result in every output shape.
struct Report {
    json: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    /// Overrides the table rendering.
    text: Option<String>,
    /// Exit with [`EXIT_DOMAIN`] after printing (failed verification).
    failed: bool,
}

impl Report {
    fn new(json: Value, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Report {
            json,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
            text: None,
            failed: false,
        }
    }

    fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }
}

const EXAMPLES: &[(&str, &str)] = &[
    ("ddt", "apnforge ddt --n 5 --poly \"x^3\""),
    ("apn", "apnforge apn --n 10 --poly \"x^3\""),
    ("phi", "apnforge phi --j 5"),
    ("gold", "apnforge gold --k 3"),
    ("coprime", "apnforge coprime --k 4 --d 5"),
    ("screen", "apnforge screen --n 5 --poly \"x^9+x^7\""),
    ("points", "apnforge points --n 5 --poly \"x^9+x^7\""),
    ("audit", "apnforge audit --k 2 --i 1 --l 3"),
    ("families", "apnforge families --family gold --r 3 --n 10"),
    ("verify", "apnforge verify lucas"),
];

fn example_for(verb: Option<&str>) -> &'static str {
    verb.and_then(|v| EXAMPLES.iter().find(|(name, _)| *name == v))
        .map_or("apnforge apn --n 10 --poly \"x^3\"", |(_, e)| e)
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let verb_name = argv.get(1).and_then(|s| s.to_str()).map(str::to_owned);
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(out, "{e}");
                return if e.kind() == DisplayHelpOnMissingArgumentOrSubcommand { EXIT_USAGE } else { EXIT_OK };
            }
            let _ = write!(err, "{e}");
            let _ = writeln!(err, "example: {}", example_for(verb_name.as_deref()));
            return EXIT_USAGE;
        }
    };
    let format = cli.format;
    // Diagnostics are buffered while the verb runs on the worker pool.
    let mut notes = Vec::new();
    let result = with_jobs(cli.jobs, || execute(cli.verb, &mut notes));
    for line in notes {
        let _ = writeln!(err, "{line}");
    }
    match result {
        Ok(report) => {
            if let Err(e) = emit(&report, format, out) {
                let _ = writeln!(err, "error: writing output: {e}");
                return EXIT_DOMAIN;
            }
            if report.failed {
                EXIT_DOMAIN
            } else {
                EXIT_OK
            }
        }
        Err(Failure::Usage { flag, msg }) => {
            let _ = writeln!(err, "error: invalid value for {flag}: {msg}");
            let _ = writeln!(err, "example: {}", example_for(verb_name.as_deref()));
            EXIT_USAGE
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DOMAIN
        }
    }
}

#[cfg(feature = "parallel")]
fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<R: Send>(_jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

fn field(args: &FieldArgs) -> Result<FieldCtx, Failure> {
    let modulus = match &args.modulus {
        Some(text) => Some(
            text.parse::<FieldElement>()
                .map_err(|e| usage("--modulus", e))?
                .bits(),
        ),
        None => None,
    };
    FieldCtx::create(args.n, modulus).map_err(|e| {
        if args.modulus.is_some() {
            usage("--modulus", e)
        } else {
            usage("--n", e)
        }
    })
}

fn small_field(n: u32, flag: &'static str) -> Result<FieldCtx, Failure> {
    FieldCtx::new(n).map_err(|e| usage(flag, e))
}

fn poly(text: &str, ctx: FieldCtx) -> Result<UniPoly, Failure> {
    UniPoly::parse(text, ctx).map_err(|e| match e {
        PolyError::Syntax { .. } | PolyError::Coefficient { .. } | PolyError::DegreeCap(_) => {
            usage("--poly", e)
        }
        other => domain(other),
    })
}

fn kv(pairs: &[(&str, String)]) -> (Vec<String>, Vec<Vec<String>>) {
    (
        vec!["key".into(), "value".into()],
        pairs
            .iter()
            .map(|(k, v)| vec![k.to_string(), v.clone()])
            .collect(),
    )
}

fn record(json: Value, pairs: &[(&str, String)]) -> Report {
    let (header, rows) = kv(pairs);
    Report {
        json,
        header,
        rows,
        text: None,
        failed: false,
    }
}

fn execute(verb: Verb, notes: &mut Vec<String>) -> Result<Report, Failure> {
    match verb {
        Verb::Ddt { field: fa, poly: text, full } => {
            let ctx = field(&fa)?;
            let f = poly(&text, ctx)?;
            if (16..=ddt::SPECTRUM_LIMIT).contains(&ctx.n()) {
                notes.push(format!("computing spectrum over GF(2^{}) ...", ctx.n()));
            }
            let spec = ddt::diff_spectrum(&f, &ctx).map_err(domain)?;
            let report = spec.report(&f);
            let mut json = serde_json::to_value(&report).expect("report serializes");
            let mut rows: Vec<Vec<String>> = report
                .histogram
                .iter()
                .map(|h| vec![h.count.to_string(), h.frequency.to_string()])
                .collect();
            let mut header = vec!["count", "frequency"];
            let text = if full {
                let table = ddt::ddt_full(&f, &ctx).map_err(domain)?;
                header = vec!["a", "b", "count"];
                rows = table
                    .iter()
                    .enumerate()
                    .flat_map(|(a, row)| {
                        row.iter()
                            .enumerate()
                            .map(move |(b, c)| vec![a.to_string(), b.to_string(), c.to_string()])
                    })
                    .collect();
                json["table"] = json!(table);
                table
                    .iter()
                    .map(|row| row.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
                    .collect::<Vec<_>>()
                    .join("\n")
            } else {
                let mut t = format!(
                    "field       GF(2^{}) mod {}\npoly        {}\nuniformity  {}\napn         {}\n",
                    report.n, report.modulus, report.poly, report.uniformity, report.apn
                );
                t.push_str(&render_table(&["count", "frequency"], &rows));
                t.trim_end().to_string()
            };
            Ok(Report::new(json, &header, rows).with_text(text))
        }
        Verb::Apn { field: fa, poly: text } => {
            let ctx = field(&fa)?;
            let f = poly(&text, ctx)?;
            let spec = ddt::diff_spectrum(&f, &ctx).map_err(domain)?;
            let json = json!({
                "n": ctx.n(),
                "modulus": format!("{:#x}", ctx.modulus()),
                "poly": f.to_string(),
                "uniformity": spec.uniformity,
                "apn": spec.is_apn(),
            });
            Ok(Report::new(
                json,
                &["n", "modulus", "poly", "uniformity", "apn"],
                vec![vec![
                    ctx.n().to_string(),
                    format!("{:#x}", ctx.modulus()),
                    f.to_string(),
                    spec.uniformity.to_string(),
                    spec.is_apn().to_string(),
                ]],
            ))
        }
        Verb::Phi { j, poly: text, n, modulus } => {
            let (label, phi) = match (j, text) {
                (Some(j), None) => {
                    let ctx = match n {
                        Some(n) => field(&FieldArgs { n, modulus })?,
                        None => FieldCtx::new(1).expect("GF(2)"),
                    };
                    (format!("x^{j}"), build_phi_j(j, ctx))
                }
                (None, Some(text)) => {
                    let ctx = field(&FieldArgs {
                        n: n.expect("clap enforces --n"),
                        modulus,
                    })?;
                    let f = poly(&text, ctx)?;
                    (f.to_string(), build_phi(&f))
                }
                _ => return Err(usage("--j", "give exactly one of --j and --poly")),
            };
            let rendered = phi.to_string();
            let json = json!({
                "f": label,
                "phi": rendered,
                "degree": phi.total_degree(),
                "terms": phi.len(),
                "homogeneous": phi.is_homogeneous(),
            });
            Ok(Report::new(
                json,
                &["f", "phi", "degree", "terms"],
                vec![vec![
                    label,
                    rendered.clone(),
                    phi.total_degree().map_or("-".into(), |d| d.to_string()),
                    phi.len().to_string(),
                ]],
            )
            .with_text(rendered))
        }
        Verb::Gold { k, n } => {
            let ctx = small_field(n.unwrap_or(k), "--n")?;
            let factors = gold_factors(k, ctx).map_err(|e| usage("--k", e))?;
            let product = gold_product(k, ctx).map_err(|e| usage("--k", e))?;
            let j = 1u32
                .checked_shl(k)
                .and_then(|p| p.checked_add(1))
                .filter(|_| k <= 15)
                .ok_or_else(|| usage("--k", "k must be at most 15"))?;
            let phi = build_phi_j(j, ctx);
            let matches = product == phi;
            let forms: Vec<String> = factors.iter().map(|f| f.to_string()).collect();
            let json = json!({
                "k": k,
                "n": ctx.n(),
                "factors": forms,
                "phi": phi.to_string(),
                "matches": matches,
            });
            let mut rows: Vec<Vec<String>> = forms.iter().map(|f| vec![f.clone()]).collect();
            let text = format!(
                "{}\nproduct == phi_{j}: {matches}",
                forms.join("\n")
            );
            rows.push(vec![format!("product == phi_{j}: {matches}")]);
            let mut r = Report::new(json, &["factor"], rows).with_text(text);
            r.failed = !matches;
            Ok(r)
        }
        Verb::Coprime { k, d, ambient } => {
            let ctx = small_field(ambient.unwrap_or(k), "--ambient")?;
            let formula = if d % 2 == 1 {
                Some(coprime_gold_formula(k, d).map_err(domain)?)
            } else {
                None
            };
            let scan = coprime_scan(k, d, &ctx, Strategy::default()).map_err(domain)?;
            let agree = formula.map(|f| f == scan.coprime);
            let json = json!({
                "k": k,
                "d": d,
                "formula": formula,
                "bruteforce": scan.coprime,
                "agree": agree,
                "odd_core": scan.odd_core,
                "square_exponent": scan.square_exponent,
                "dividing": scan.dividing.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            });
            let show = |v: Option<bool>| v.map_or("-".to_string(), |b| b.to_string());
            let mut r = record(
                json,
                &[
                    ("k", k.to_string()),
                    ("d", d.to_string()),
                    ("formula", show(formula)),
                    ("bruteforce", scan.coprime.to_string()),
                    ("agree", show(agree)),
                ],
            );
            r.failed = agree == Some(false);
            Ok(r)
        }
        Verb::Screen { field: fa, poly: text } => {
            let ctx = field(&fa)?;
            let f = poly(&text, ctx)?;
            let v = screen::screen_exceptional(&f);
            let json = serde_json::to_value(&v).expect("verdict serializes");
            let rows: Vec<Vec<String>> = v
                .trace
                .iter()
                .map(|e| vec![e.test.clone(), e.inputs.clone(), e.outcome.clone()])
                .collect();
            let text = format!(
                "status     {:?}\ntheorem    {}\nheuristic  {}\n{}",
                v.status,
                v.theorem.as_deref().unwrap_or("-"),
                v.heuristic,
                render_table(&["test", "inputs", "outcome"], &rows)
            );
            Ok(Report::new(json, &["test", "inputs", "outcome"], rows).with_text(text.trim_end().into()))
        }
        Verb::Points { field: fa, poly: text } => {
            let ctx = field(&fa)?;
            let f = poly(&text, ctx)?;
            let count = ddt::projective_point_count(&f, &ctx).map_err(domain)?;
            let d = f.degree().expect("degree checked by the count") as u64;
            let bound = ddt::corollary_bound(d, ctx.order());
            let json = json!({
                "n": ctx.n(),
                "poly": f.to_string(),
                "affine": count.affine,
                "at_infinity": count.at_infinity,
                "total": count.total,
                "bound": bound,
            });
            Ok(record(
                json,
                &[
                    ("poly", f.to_string()),
                    ("affine", count.affine.to_string()),
                    ("at_infinity", count.at_infinity.to_string()),
                    ("total", count.total.to_string()),
                    ("bound", bound.to_string()),
                ],
            ))
        }
        Verb::Audit { k, i, l, ambient } => {
            let ctx = small_field(ambient.unwrap_or(k), "--ambient")?;
            let report = root_of_unity_audit(k, i, l, &ctx).map_err(domain)?;
            let json = serde_json::to_value(&report).expect("audit serializes");
            let pairs: Vec<(&str, String)> = match &report {
                screen::AuditReport::GoldCase { m } => {
                    vec![("m", m.to_string()), ("result", "Gold case, not applicable".into())]
                }
                screen::AuditReport::Checked {
                    m,
                    binomial,
                    candidates,
                    violations,
                } => vec![
                    ("m", m.to_string()),
                    ("binomial", binomial.to_string()),
                    ("candidates", candidates.len().to_string()),
                    ("violations", violations.len().to_string()),
                ],
            };
            let mut r = record(json, &pairs);
            r.failed = !report.is_clean();
            Ok(r)
        }
        Verb::Families { family, n, r, s, k, u } => {
            let specs = match family {
                Some(name) => {
                    let n = n.expect("clap enforces --n");
                    vec![parse_family(&name, n, r, s, k, u.as_deref())?]
                }
                None => suites::standard_families(),
            };
            let mut rows = Vec::new();
            let mut json_rows = Vec::new();
            let mut failed = false;
            for spec in specs {
                let member = ddt::family_exponent(&spec).map_err(domain)?;
                let ctx = small_field(spec.n, "--n")?;
                let f = member.to_poly(ctx);
                let spectrum = ddt::diff_spectrum(&f, &ctx).map_err(domain)?;
                let exponent = match &member {
                    FamilyMember::Exponent(d) => Some(*d),
                    FamilyMember::Binomial(_) => None,
                };
                failed |= !spectrum.is_apn();
                rows.push(vec![
                    spec.family.name().to_string(),
                    family_params(&spec.family),
                    spec.n.to_string(),
                    f.to_string(),
                    spectrum.uniformity.to_string(),
                    spectrum.is_apn().to_string(),
                ]);
                json_rows.push(json!({
                    "family": spec.family.name(),
                    "params": family_params(&spec.family),
                    "n": spec.n,
                    "exponent": exponent,
                    "poly": f.to_string(),
                    "uniformity": spectrum.uniformity,
                    "apn": spectrum.is_apn(),
                }));
            }
            let mut report = Report::new(
                Value::Array(json_rows),
                &["family", "params", "n", "poly", "uniformity", "apn"],
                rows,
            );
            report.failed = failed;
            Ok(report)
        }
        Verb::Verify { suite } => {
            let checks = suites::run_suite(&suite, &mut |line| notes.push(line))
            .map_err(|e| usage("suite", e))?;
            let failed = checks.iter().any(|c| !c.pass);
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        c.suite.clone(),
                        c.name.clone(),
                        if c.pass { "pass" } else { "FAIL" }.to_string(),
                        c.detail.clone(),
                    ]
                })
                .collect();
            let json = serde_json::to_value(&checks).expect("checks serialize");
            let mut r = Report::new(json, &["suite", "check", "result", "detail"], rows);
            r.failed = failed;
            Ok(r)
        }
    }
}

fn family_params(f: &Family) -> String {
    match f {
        Family::Gold { r }
        | Family::KasamiWelch { r }
        | Family::Welch { r }
        | Family::Niho { r }
        | Family::Inverse { r }
        | Family::Dobbertin { r } => format!("r={r}"),
        Family::EkpBinomial { u: Some(u) } => format!("u={u}"),
        Family::EkpBinomial { u: None } => "u=first".into(),
        Family::Bcl { s, k } => format!("s={s} k={k}"),
    }
}

fn parse_family(
    name: &str,
    n: u32,
    r: Option<u32>,
    s: Option<u32>,
    k: Option<u32>,
    u: Option<&str>,
) -> Result<FamilySpec, Failure> {
    let need = |v: Option<u32>, flag: &'static str| v.ok_or_else(|| usage(flag, format!("required by --family {name}")));
    let family = match name {
        "gold" => Family::Gold { r: need(r, "--r")? },
        "kasami-welch" => Family::KasamiWelch { r: need(r, "--r")? },
        "welch" => Family::Welch { r: need(r, "--r")? },
        "niho" => Family::Niho { r: need(r, "--r")? },
        "inverse" => Family::Inverse { r: need(r, "--r")? },
        "dobbertin" => Family::Dobbertin { r: need(r, "--r")? },
        "ekp" => Family::EkpBinomial {
            u: match u {
                Some(text) => Some(text.parse().map_err(|e| usage("--u", e))?),
                None => None,
            },
        },
        "bcl" => Family::Bcl {
            s: need(s, "--s")?,
            k: need(k, "--k")?,
        },
        other => return Err(usage("--family", format!("unknown family {other:?}"))),
    };
    Ok(FamilySpec { family, n })
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(cell);
            } else {
                s.push_str(&format!("{cell:<w$}  "));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn emit(report: &Report, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer(&mut *out, &report.json)?;
            writeln!(out)
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(&report.header)?;
            for row in &report.rows {
                w.write_record(row)?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            out.write_all(&bytes)
        }
        Format::Table => match &report.text {
            Some(text) => writeln!(out, "{text}"),
            None => {
                let header: Vec<&str> = report.header.iter().map(String::as_str).collect();
                out.write_all(render_table(&header, &report.rows).as_bytes())
            }
        },
    }
}
