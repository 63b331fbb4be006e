//! The `kmoments` command line.
//!
//! Exit status: 0 on success, 1 when a verification finds a mismatch, 2 on
//! usage errors and on requests over the work limit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::charsums::KloostermanTable;
use crate::codes::{weight_prefix_bruteforce, weight_prefix_dp, CodeSpec, WeightPrefix};
use crate::config::{build_field, load_moduli};
use crate::error::{Error, Result};
use crate::gauss::{
    gauss_sum_closed, gauss_sum_from_b_r, gauss_sum_from_histogram, general_linear, GaussSumRequest, Variant,
};
use crate::gf3r::{FieldContext, FieldElement};
use crate::limits::{WorkLimits, DEFAULT_OPS};
use crate::moments::{recursion_chain, verify_report};
use crate::ogroups::{enumerate_group, histogram_closed_form, GroupElement, GroupId, TraceHistogram};

#[derive(Debug, Parser)]
#[command(name = "kmoments", version, about = "Kloosterman moments over GF(3^r) via ternary group codes")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Extension degree, q = 3^r.
    #[arg(long, global = true, default_value_t = 1, env = "KMOMENTS_R")]
    pub r: u32,

    /// Modulus as "2,2,1" (constant term first) or "x^2+2x+2".
    #[arg(long, global = true, env = "KMOMENTS_POLY")]
    pub poly: Option<String>,

    /// File mapping r to a modulus (JSON or `r: poly` lines).
    #[arg(long, global = true, env = "KMOMENTS_CONFIG")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json, env = "KMOMENTS_FORMAT")]
    pub format: Format,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0, env = "KMOMENTS_THREADS")]
    pub threads: usize,

    /// Refuse jobs estimated above this many basic operations.
    #[arg(long, global = true, default_value_t = DEFAULT_OPS, env = "KMOMENTS_LIMIT_OPS",
          value_parser = clap::value_parser!(u64).range(1..))]
    pub limit_ops: u64,

    /// Report elapsed_ms as 0 so output is byte-identical across runs.
    #[arg(long, global = true, env = "KMOMENTS_NO_TIMING")]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeSel {
    So2,
    O2,
    So4,
}

impl From<CodeSel> for GroupId {
    fn from(c: CodeSel) -> GroupId {
        match c {
            CodeSel::So2 => GroupId::So2,
            CodeSel::O2 => GroupId::O2,
            CodeSel::So4 => GroupId::So4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupSel {
    So2,
    O2,
    So4,
    /// GL(2,q)
    Gl,
}

impl GroupSel {
    fn orthogonal(self) -> Result<GroupId> {
        match self {
            GroupSel::So2 => Ok(GroupId::So2),
            GroupSel::O2 => Ok(GroupId::O2),
            GroupSel::So4 => Ok(GroupId::So4),
            GroupSel::Gl => Err(Error::Domain("this command takes so2, o2 or so4".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightMethod {
    /// From the trace histogram.
    Dp,
    /// Walk every word up to the weight bound.
    Bruteforce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpFormat {
    Json,
    Binary,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Describe GF(3^r): modulus, generator, epsilon, squares.
    Field {
        /// Also describe the element with this index.
        #[arg(long, env = "KMOMENTS_A")]
        a: Option<u32>,
    },
    /// Kloosterman sums K(a) for every nonzero a, or one.
    Kloosterman {
        #[arg(long, env = "KMOMENTS_A")]
        a: Option<u32>,
    },
    /// Power moments SK^h.
    Moments {
        #[command(subcommand)]
        how: MomentsCmd,
    },
    /// Low-weight counts C_0..C_J of a group code.
    Weights(WeightsArgs),
    /// Code utilities.
    Codes {
        #[command(subcommand)]
        cmd: CodesCmd,
    },
    /// Group enumeration and trace histograms.
    Groups {
        #[command(subcommand)]
        cmd: GroupsCmd,
    },
    /// Gauss sums of SO-(2n,q) and O-(2n,q).
    Gauss {
        /// Take n and the variant from a group.
        #[arg(long, value_enum, env = "KMOMENTS_GROUP", conflicts_with_all = ["n", "variant"])]
        group: Option<GroupSel>,
        #[arg(long, env = "KMOMENTS_N")]
        n: Option<u32>,
        /// so or o.
        #[arg(long, env = "KMOMENTS_VARIANT")]
        variant: Option<String>,
        /// Character scale by index; every nonzero a when omitted.
        #[arg(long, env = "KMOMENTS_A")]
        a: Option<u32>,
    },
    /// Compare every recursion with direct moments.
    Verify {
        #[arg(long, default_value_t = 10, env = "KMOMENTS_H_MAX")]
        h_max: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum MomentsCmd {
    /// By summing K(a)^h over the nonzero squares.
    Direct {
        #[arg(long, env = "KMOMENTS_H")]
        h: u32,
    },
    /// By the recursion of one code, starting from SK^0 alone.
    Recursive {
        #[arg(long, value_enum, env = "KMOMENTS_CODE")]
        code: CodeSel,
        /// Highest moment; so4 yields only even moments up to it.
        #[arg(long, env = "KMOMENTS_H")]
        h: u32,
    },
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[arg(long, value_enum, env = "KMOMENTS_CODE")]
    pub code: CodeSel,
    #[arg(long, env = "KMOMENTS_MAX_J")]
    pub max_j: u32,
    #[arg(long, value_enum, default_value_t = WeightMethod::Dp, env = "KMOMENTS_METHOD")]
    pub method: WeightMethod,
}

#[derive(Debug, Subcommand)]
pub enum CodesCmd {
    /// Same as the top-level `weights`.
    Weights(WeightsArgs),
}

#[derive(Debug, Subcommand)]
pub enum GroupsCmd {
    /// List the group and report its order and trace histogram.
    Enumerate {
        #[arg(long, value_enum, env = "KMOMENTS_GROUP")]
        group: GroupSel,
    },
    /// Trace histogram from the closed forms, no enumeration.
    Histogram {
        #[arg(long, value_enum, env = "KMOMENTS_GROUP")]
        group: GroupSel,
    },
    /// Write every element in canonical order.
    Dump {
        #[arg(long, value_enum, env = "KMOMENTS_GROUP")]
        group: GroupSel,
        #[arg(long, value_enum, default_value_t = DumpFormat::Json)]
        dump_format: DumpFormat,
        /// Write here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Result of a command: text to print and whether everything checked out.
struct Outcome {
    body: Vec<u8>,
    ok: bool,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome { body: body.into_bytes(), ok: true }
    }
}

/// Parses `args` (program name first), runs the command, writes its output
/// to `out` and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    eprint!("{}", e.render());
                    2
                }
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if out.write_all(&outcome.body).and_then(|_| out.flush()).is_err() {
                return 2;
            }
            if outcome.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("kmoments: {e}");
            match e {
                Error::Consistency(_) => 1,
                _ => 2,
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    let table = match &c.config {
        Some(p) => Some(load_moduli(p)?),
        None => None,
    };
    let ctx = build_field(c.r, c.poly.as_deref(), table.as_ref())?;
    let limits = WorkLimits::new(c.limit_ops);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.threads)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli, &ctx, &limits))
}

fn dispatch(cli: &Cli, ctx: &FieldContext, limits: &WorkLimits) -> Result<Outcome> {
    let fmt = cli.common.format;
    match &cli.command {
        Command::Field { a } => cmd_field(ctx, *a, fmt),
        Command::Kloosterman { a } => cmd_kloosterman(ctx, *a, limits, fmt),
        Command::Moments { how: MomentsCmd::Direct { h } } => cmd_moments_direct(ctx, *h, limits, fmt),
        Command::Moments { how: MomentsCmd::Recursive { code, h } } => {
            cmd_moments_recursive(ctx, (*code).into(), *h, fmt)
        }
        Command::Weights(w) | Command::Codes { cmd: CodesCmd::Weights(w) } => cmd_weights(ctx, w, limits, fmt),
        Command::Groups { cmd } => match cmd {
            GroupsCmd::Enumerate { group } => cmd_groups_enumerate(ctx, *group, limits, fmt),
            GroupsCmd::Histogram { group } => {
                let id = group.orthogonal()?;
                let hist = histogram_closed_form(ctx, id)?;
                Ok(Outcome::ok(render_histogram(ctx, id.name(), "closed-form", &hist, fmt)))
            }
            GroupsCmd::Dump { group, dump_format, output } => {
                cmd_groups_dump(ctx, *group, *dump_format, output.as_ref(), limits)
            }
        },
        Command::Gauss { group, n, variant, a } => cmd_gauss(ctx, *group, *n, variant.as_deref(), *a, limits, fmt),
        Command::Verify { h_max } => cmd_verify(ctx, *h_max, limits, cli.common.no_timing, fmt),
    }
}

fn element_arg(ctx: &FieldContext, a: u32) -> Result<FieldElement> {
    ctx.element(a)
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_field(ctx: &FieldContext, a: Option<u32>, fmt: Format) -> Result<Outcome> {
    let squares: Vec<u32> = ctx.squares().iter().map(|x| x.0).collect();
    let mut v = json!({
        "r": ctx.r(),
        "q": ctx.q(),
        "modulus": ctx.modulus().to_string(),
        "modulus_coeffs": ctx.modulus().coeffs(),
        "generator": ctx.generator().0,
        "epsilon": ctx.epsilon().0,
        "squares": squares,
    });
    if let Some(a) = a {
        let x = element_arg(ctx, a)?;
        v["element"] = json!({
            "index": x.0,
            "trace": ctx.trace(x),
            "log": ctx.log(x),
            "square": !x.is_zero() && ctx.is_square(x),
            "inverse": ctx.inv(x).ok().map(|y| y.0),
        });
    }
    let body = match fmt {
        Format::Json => to_json(&v),
        Format::Csv => {
            let mut s = String::from("key,value\n");
            for k in ["r", "q", "modulus", "generator", "epsilon"] {
                let _ = writeln!(s, "{k},{}", plain(&v[k]));
            }
            if let Some(e) = v.get("element") {
                for (k, val) in e.as_object().expect("object") {
                    let _ = writeln!(s, "element_{k},{}", plain(val));
                }
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "GF({}) = F_3[x]/({})\ngenerator {}\nepsilon {}\nnonzero squares {}\n",
                ctx.q(),
                ctx.modulus(),
                ctx.generator(),
                ctx.epsilon(),
                squares.len()
            );
            if let Some(e) = v.get("element") {
                for (k, val) in e.as_object().expect("object") {
                    let _ = writeln!(s, "{k} {}", plain(val));
                }
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn cmd_kloosterman(ctx: &FieldContext, a: Option<u32>, limits: &WorkLimits, fmt: Format) -> Result<Outcome> {
    let rows: Vec<(u32, i64)> = match a {
        Some(a) => {
            let x = element_arg(ctx, a)?;
            vec![(a, crate::charsums::kloosterman(ctx, x)?)]
        }
        None => {
            let t = KloostermanTable::compute(ctx, limits)?;
            ctx.nonzero().map(|x| Ok((x.0, t.get(x)?))).collect::<Result<_>>()?
        }
    };
    let body = match fmt {
        Format::Json => to_json(&json!({
            "q": ctx.q(),
            "r": ctx.r(),
            "values": rows.iter().map(|(a, k)| json!({"a": a, "k": k.to_string()})).collect::<Vec<_>>(),
        })),
        Format::Csv => two_columns("a,k", rows.iter().map(|(a, k)| (a.to_string(), k.to_string()))),
        Format::Text => two_columns_text(rows.iter().map(|(a, k)| (format!("K({a})"), k.to_string()))),
    };
    Ok(Outcome::ok(body))
}

fn two_columns(header: &str, rows: impl Iterator<Item = (String, String)>) -> String {
    let mut s = format!("{header}\n");
    for (a, b) in rows {
        let _ = writeln!(s, "{a},{b}");
    }
    s
}

fn two_columns_text(rows: impl Iterator<Item = (String, String)>) -> String {
    let mut s = String::new();
    for (a, b) in rows {
        let _ = writeln!(s, "{a} = {b}");
    }
    s
}

fn moment_rows(ctx: &FieldContext, method: &str, code: Option<GroupId>, rows: &[(u32, BigInt)], fmt: Format) -> String {
    match fmt {
        Format::Json => {
            let mut v = json!({
                "q": ctx.q(),
                "r": ctx.r(),
                "method": method,
                "rows": rows.iter().map(|(h, v)| json!({"h": h, "sk": v.to_string()})).collect::<Vec<_>>(),
            });
            if let Some(c) = code {
                v["code"] = json!(c.name());
            }
            to_json(&v)
        }
        Format::Csv => two_columns("h,sk", rows.iter().map(|(h, v)| (h.to_string(), v.to_string()))),
        Format::Text => two_columns_text(rows.iter().map(|(h, v)| (format!("SK^{h}"), v.to_string()))),
    }
}

fn cmd_moments_direct(ctx: &FieldContext, h: u32, limits: &WorkLimits, fmt: Format) -> Result<Outcome> {
    let t = KloostermanTable::compute(ctx, limits)?;
    let rows: Vec<(u32, BigInt)> = t.sk_moments(ctx, h).into_iter().enumerate().map(|(i, v)| (i as u32, v)).collect();
    Ok(Outcome::ok(moment_rows(ctx, "direct", None, &rows, fmt)))
}

fn cmd_moments_recursive(ctx: &FieldContext, id: GroupId, h: u32, fmt: Format) -> Result<Outcome> {
    let rows: Vec<(u32, BigInt)> = match id {
        GroupId::So4 => recursion_chain(ctx, id, h / 2)?
            .into_iter()
            .enumerate()
            .map(|(i, v)| (2 * i as u32, v))
            .collect(),
        _ => recursion_chain(ctx, id, h)?
            .into_iter()
            .enumerate()
            .map(|(i, v)| (i as u32, v))
            .collect(),
    };
    Ok(Outcome::ok(moment_rows(ctx, "recursive", Some(id), &rows, fmt)))
}

fn cmd_weights(ctx: &FieldContext, w: &WeightsArgs, limits: &WorkLimits, fmt: Format) -> Result<Outcome> {
    let id: GroupId = w.code.into();
    let prefix: WeightPrefix = match w.method {
        WeightMethod::Dp => weight_prefix_dp(ctx, &histogram_closed_form(ctx, id)?, w.max_j),
        WeightMethod::Bruteforce => weight_prefix_bruteforce(&CodeSpec::new(ctx, id, limits)?, w.max_j, limits)?,
    };
    let rows = prefix.counts.iter().enumerate().map(|(j, c)| (j.to_string(), c.to_string()));
    let body = match fmt {
        Format::Json => {
            let map: BTreeMap<u32, String> =
                prefix.counts.iter().enumerate().map(|(j, c)| (j as u32, c.to_string())).collect();
            to_json(&map)
        }
        Format::Csv => two_columns("j,count", rows),
        Format::Text => two_columns_text(rows.map(|(j, c)| (format!("C_{j}"), c))),
    };
    Ok(Outcome::ok(body))
}

fn render_histogram(ctx: &FieldContext, group: &str, method: &str, hist: &TraceHistogram, fmt: Format) -> String {
    let entries = hist.iter().filter(|&(_, c)| c > 0);
    match fmt {
        Format::Json => {
            let map: BTreeMap<u32, String> = entries.map(|(b, c)| (b.0, c.to_string())).collect();
            to_json(&json!({
                "group": group,
                "q": ctx.q(),
                "method": method,
                "order": hist.total().to_string(),
                "histogram": map,
            }))
        }
        Format::Csv => two_columns("trace,count", entries.map(|(b, c)| (b.0.to_string(), c.to_string()))),
        Format::Text => {
            let mut s = format!("{group} over GF({}): order {}\n", ctx.q(), hist.total());
            for (b, c) in entries {
                let _ = writeln!(s, "trace {b}: {c}");
            }
            s
        }
    }
}

fn listing(ctx: &FieldContext, group: GroupSel, limits: &WorkLimits) -> Result<(String, Vec<GroupElement>, Option<u128>)> {
    match group {
        GroupSel::Gl => {
            let q = ctx.q() as u128;
            Ok(("gl2".into(), general_linear(ctx, 2, limits)?, Some((q * q - 1) * (q * q - q))))
        }
        other => {
            let id = other.orthogonal()?;
            let e = enumerate_group(ctx, id, limits)?;
            Ok((id.name().into(), e.elements, Some(id.order(ctx.q()))))
        }
    }
}

fn cmd_groups_enumerate(ctx: &FieldContext, group: GroupSel, limits: &WorkLimits, fmt: Format) -> Result<Outcome> {
    let (name, elements, expected) = listing(ctx, group, limits)?;
    let hist = TraceHistogram::from_traces(ctx.q(), elements.iter().map(|w| w.trace(ctx)));
    let ok = expected.is_none_or(|n| n == elements.len() as u128);
    let body = render_histogram(ctx, &name, "enumeration", &hist, fmt);
    if !ok {
        eprintln!("kmoments: enumerated {} elements, expected {}", elements.len(), expected.unwrap_or(0));
    }
    Ok(Outcome { body: body.into_bytes(), ok })
}

/// Binary dump layout, all integers little-endian: `b"KMGD"`, version `u8`
/// = 1, `q: u32`, `dim: u8`, `count: u64`, then `count * dim * dim` entries
/// as `u32` field indices, row-major.
pub fn encode_dump(q: u32, dim: usize, elements: &[GroupElement]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(18 + elements.len() * dim * dim * 4);
    buf.extend_from_slice(b"KMGD");
    buf.push(1);
    buf.extend_from_slice(&q.to_le_bytes());
    buf.push(dim as u8);
    buf.extend_from_slice(&(elements.len() as u64).to_le_bytes());
    for w in elements {
        for e in &w.entries {
            buf.extend_from_slice(&e.0.to_le_bytes());
        }
    }
    buf
}

fn cmd_groups_dump(
    ctx: &FieldContext,
    group: GroupSel,
    dump_format: DumpFormat,
    output: Option<&PathBuf>,
    limits: &WorkLimits,
) -> Result<Outcome> {
    let (name, elements, _) = listing(ctx, group, limits)?;
    let dim = elements.first().map_or(0, |w| w.dim);
    let bytes = match dump_format {
        DumpFormat::Binary => encode_dump(ctx.q(), dim, &elements),
        DumpFormat::Json => {
            let rows: Vec<Vec<u32>> = elements.iter().map(|w| w.entries.iter().map(|e| e.0).collect()).collect();
            to_json(&json!({"group": name, "q": ctx.q(), "dim": dim, "elements": rows})).into_bytes()
        }
    };
    match output {
        Some(path) => {
            std::fs::write(path, &bytes)?;
            Ok(Outcome::ok(format!("wrote {} elements to {}\n", elements.len(), path.display())))
        }
        None => Ok(Outcome { body: bytes, ok: true }),
    }
}

#[derive(Serialize)]
struct GaussRow {
    a: u32,
    closed: String,
    from_b_r: String,
    enumerated: Option<String>,
    #[serde(rename = "match")]
    matches: bool,
}

fn cmd_gauss(
    ctx: &FieldContext,
    group: Option<GroupSel>,
    n: Option<u32>,
    variant: Option<&str>,
    a: Option<u32>,
    limits: &WorkLimits,
    fmt: Format,
) -> Result<Outcome> {
    let (n, variant, id) = match group {
        Some(g) => {
            let id = g.orthogonal()?;
            let req = GaussSumRequest::for_group(id, FieldElement::ONE);
            (req.n, req.variant, Some(id))
        }
        None => {
            let n = n.ok_or_else(|| Error::Parse("give --group, or --n and --variant".into()))?;
            let v: Variant = variant.unwrap_or("so").parse()?;
            let id = match (n, v) {
                (1, Variant::So) => Some(GroupId::So2),
                (1, Variant::O) => Some(GroupId::O2),
                (2, Variant::So) => Some(GroupId::So4),
                _ => None,
            };
            (n, v, id)
        }
    };
    let scales: Vec<FieldElement> = match a {
        Some(a) => vec![element_arg(ctx, a)?],
        None => ctx.nonzero().collect(),
    };
    // enumerate once for all scales when it fits the budget
    let hist = match id {
        Some(id) => match enumerate_group(ctx, id, limits) {
            Ok(e) => Some(e.histogram),
            Err(Error::Capacity(_)) => None,
            Err(e) => return Err(e),
        },
        None => None,
    };
    let mut rows = Vec::new();
    for x in scales {
        let req = GaussSumRequest { n, variant, a: x };
        let closed = gauss_sum_closed(ctx, &req)?;
        let from_b_r = gauss_sum_from_b_r(ctx, &req)?;
        let enumerated = match &hist {
            Some(h) => Some(gauss_sum_from_histogram(ctx, h, x)?),
            None => None,
        };
        let matches = closed == from_b_r && enumerated.as_ref().is_none_or(|e| *e == closed);
        rows.push(GaussRow {
            a: x.0,
            closed: closed.to_string(),
            from_b_r: from_b_r.to_string(),
            enumerated: enumerated.map(|e| e.to_string()),
            matches,
        });
    }
    let ok = rows.iter().all(|r| r.matches);
    let variant_name = match variant {
        Variant::So => "so",
        Variant::O => "o",
    };
    let body = match fmt {
        Format::Json => to_json(&json!({"q": ctx.q(), "r": ctx.r(), "n": n, "variant": variant_name, "rows": rows})),
        Format::Csv => {
            let mut s = String::from("a,closed,from_b_r,enumerated,match\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.a,
                    r.closed,
                    r.from_b_r,
                    r.enumerated.as_deref().unwrap_or(""),
                    r.matches
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                let _ = write!(s, "a={}: {}", r.a, r.closed);
                if let Some(e) = &r.enumerated {
                    let _ = write!(s, " (enumerated {e})");
                }
                s.push_str(if r.matches { "\n" } else { " MISMATCH\n" });
            }
            s
        }
    };
    Ok(Outcome { body: body.into_bytes(), ok })
}

fn cmd_verify(ctx: &FieldContext, h_max: u32, limits: &WorkLimits, no_timing: bool, fmt: Format) -> Result<Outcome> {
    let start = Instant::now();
    let mut reports = verify_report(ctx, h_max, limits)?;
    if no_timing {
        for r in &mut reports {
            r.elapsed_ms = 0;
        }
    }
    let ok = reports.iter().all(|r| r.all_match());
    let body = match fmt {
        Format::Json => to_json(&reports),
        Format::Csv => {
            let mut s = String::from("code,h,direct,recursive,match\n");
            for r in &reports {
                for row in &r.rows {
                    let _ = writeln!(s, "{},{},{},{},{}", r.code, row.h, row.direct, row.recursive, row.matches);
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                let status = if r.all_match() { "ok" } else { "MISMATCH" };
                let _ = writeln!(s, "{} over GF({}): {} rows {status}", r.code, r.q, r.rows.len());
                if let Some(bad) = r.first_mismatch() {
                    let _ = writeln!(s, "  h={}: direct {} recursive {}", bad.h, bad.direct, bad.recursive);
                }
            }
            if !no_timing {
                let _ = writeln!(s, "{} ms", start.elapsed().as_millis());
            }
            s
        }
    };
    Ok(Outcome { body: body.into_bytes(), ok })
}
