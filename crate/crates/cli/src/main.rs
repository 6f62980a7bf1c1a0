//! `skbessel` command line. Every subcommand prints one JSON document
//! (schema `skbessel/1`, see `docs/cli-schema.md`).
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use skbessel::global::{fourier_ratio, LocalDichotomy};
use skbessel::localfield::classify_case_with_precision;
use skbessel::localfield::working_precision;
use skbessel::sk_factors::oldform_polys;
use skbessel::{
    arch_factor, bessel_exists, fourier_dirichlet, global_root_number, hecke_coset_reps,
    match_field, newform_profile, regular_l, verify_closure, verify_decomposition,
    verify_em_cosets, Existence, Flavor, GlobalTauData, HeckeDirection, LocalSKData, Member,
    PacketChoice, ParamodularSpec, QuadCase, QuadExtData, Sign, TauLocalType, Q,
};

const SCHEMA: &str = "skbessel/1";

#[derive(Parser)]
#[command(name = "skbessel", version, about = "Paramodular Bessel newforms of Saito-Kurokawa packets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Existence, minimal level, sign and L-factors of one local configuration.
    Factor(LocalArgs),
    /// Newform zetas, PS zeta at the minimal level, and oldform zeta polynomials.
    Newform {
        #[command(flatten)]
        local: LocalArgs,
        /// Oldform depth k.
        #[arg(long, default_value_t = 0)]
        k: u32,
    },
    /// Paramodular group checks.
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Coset representatives for `e_m` or for the Hecke double cosets.
    Cosets {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        m: u32,
        /// Hecke direction (`+` or `-`); omit for the `e_m` cosets.
        #[arg(long)]
        hecke: Option<String>,
        #[arg(long, value_enum, default_value_t = FlavorArg::Sharp)]
        flavor: FlavorArg,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Formal Dirichlet coefficients of the Fourier coefficients `F(n sigma')`.
    Euler {
        #[command(flatten)]
        global: GlobalArgs,
        #[arg(long)]
        n_max: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Global root number and, with `--dichotomy`, the field matching test.
    GlobalRoot {
        #[command(flatten)]
        global: GlobalArgs,
        /// JSON map `p -> {eps_product, chi_minus_one}`.
        #[arg(long)]
        dichotomy: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Sampled closure, inverse and factorization checks.
    Verify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum)]
        flavor: FlavorArg,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    p: u64,
    /// One of Split, U-i, U-ii, R-i, R-ii.
    #[arg(long)]
    case: String,
}

impl FieldArgs {
    fn ctx(&self) -> Result<QuadExtData> {
        let case: QuadCase = self.case.parse()?;
        Ok(classify_case_with_precision(self.p, case, working_precision())?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TauKind {
    Unr,
    Ram,
    Steinberg,
    Twisted,
    Sc,
}

#[derive(Clone, Copy, ValueEnum)]
enum MemberArg {
    Sk,
    Jl,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Complete,
    Flat,
    Plain,
    Sharp,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Complete => Flavor::Complete,
            FlavorArg::Flat => Flavor::Flat,
            FlavorArg::Plain => Flavor::Plain,
            FlavorArg::Sharp => Flavor::Sharp,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct LocalArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum)]
    tau: TauKind,
    #[arg(long, value_enum, default_value_t = MemberArg::Sk)]
    member: MemberArg,
    /// Satake parameter `a` for `--tau unr`.
    #[arg(long, default_value = "1")]
    a: String,
    #[arg(long)]
    n_tau: Option<u32>,
    /// `+` or `-`.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    eps_tau: String,
    /// Case of the field `L` of `chi_L` for `--tau twisted`.
    #[arg(long)]
    chi_case: Option<String>,
    /// Case R dichotomy bit: whether `tau` has a nonzero torus period.
    #[arg(long)]
    period: Option<bool>,
    /// Turn off the dyadic gamma-factor assumption.
    #[arg(long)]
    no_dyadic_gamma: bool,
}

fn parse_sign(s: &str) -> Result<Sign> {
    match s.trim() {
        "+" | "+1" | "1" => Ok(Sign::Plus),
        "-" | "-1" => Ok(Sign::Minus),
        other => bail!("invalid sign {other:?}"),
    }
}

fn parse_q(s: &str) -> Result<Q> {
    s.trim().parse::<Q>().map_err(|e| anyhow::anyhow!("invalid rational {s:?}: {e}"))
}

impl LocalArgs {
    fn tau(&self) -> Result<TauLocalType> {
        let eps_tau = parse_sign(&self.eps_tau)?;
        let n = || self.n_tau.context("--n-tau is required for this tau");
        Ok(match self.tau {
            TauKind::Unr => TauLocalType::UnramifiedPrincipal { a: parse_q(&self.a)? },
            TauKind::Ram => TauLocalType::RamifiedPrincipal { n_tau: n()?, eps_tau },
            TauKind::Steinberg => TauLocalType::Steinberg,
            TauKind::Sc => TauLocalType::Supercuspidal { n_tau: n()?, eps_tau },
            TauKind::Twisted => {
                let chi_case: QuadCase = self.chi_case.as_deref().unwrap_or(&self.field.case).parse()?;
                let n_tau = match self.n_tau {
                    Some(n) => n,
                    None if chi_case.is_unramified_field() => 1,
                    None => bail!("--n-tau is required for a ramified twist"),
                };
                TauLocalType::TwistedSteinberg { chi_case, n_tau, eps_tau }
            }
        })
    }

    fn data(&self) -> Result<LocalSKData> {
        let member = match self.member {
            MemberArg::Sk => Member::SkTau,
            MemberArg::Jl => Member::SkTauJl,
        };
        Ok(LocalSKData::new(self.tau()?, member, self.field.ctx()?)?
            .with_period(self.period)
            .with_dyadic_gamma(!self.no_dyadic_gamma))
    }
}

#[derive(Args)]
struct GlobalArgs {
    /// JSON file `{"primes": {"5": {"kind": "steinberg"}, ...}}`.
    #[arg(long)]
    tau_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    kappa: u32,
    /// Squarefree `d` with `E = Q(sqrt(-d))`.
    #[arg(long)]
    d: u64,
    /// Comma separated primes of `S`.
    #[arg(long, value_delimiter = ',')]
    s: Vec<u64>,
    /// Fill primes missing from the tau file with this Satake parameter.
    #[arg(long)]
    default_satake: Option<String>,
}

#[derive(serde::Deserialize)]
struct TauFile {
    primes: BTreeMap<u64, TauLocalType>,
}

impl GlobalArgs {
    fn load(&self, n_max: u64) -> Result<(GlobalTauData, PacketChoice)> {
        let mut primes = match &self.tau_file {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str::<TauFile>(&text).context("parsing the tau file")?.primes
            }
            None => BTreeMap::new(),
        };
        if let Some(a) = &self.default_satake {
            let a = parse_q(a)?;
            for p in (2..=n_max).filter(|&p| skbessel::localfield::is_prime(p)) {
                primes.entry(p).or_insert_with(|| TauLocalType::UnramifiedPrincipal { a: a.clone() });
            }
        }
        let level_n = primes.iter().map(|(p, t)| p.pow(t.n_tau())).product();
        let tau = GlobalTauData { primes, weight_kappa: self.kappa, level_n };
        let choice = PacketChoice { s: self.s.iter().copied().collect::<BTreeSet<_>>(), d: self.d };
        Ok((tau, choice))
    }
}

fn existence_json(e: &Existence) -> Value {
    match e {
        Existence::Exists => json!(true),
        Existence::NotExists => json!(false),
        Existence::NotDetermined(_) => Value::Null,
    }
}

fn factor(args: &LocalArgs) -> Result<Value> {
    let data = args.data()?;
    let e = bessel_exists(&data);
    let mut out = json!({ "schema": SCHEMA, "exists": existence_json(&e) });
    if let Existence::NotDetermined(why) = &e {
        out["status"] = json!("not_determined");
        out["reason"] = json!(why);
    }
    if e != Existence::Exists {
        return Ok(out);
    }
    let nf = newform_profile(&data)?;
    let fields = json!({
        "M_pi": nf.level.m_pi,
        "eps_pi": nf.level.eps_pi,
        "N_pi": nf.factors.n_pi,
        "E_pi": nf.factors.e_pi,
        "L_phi_inverse": nf.factors.l_phi_inverse.to_string(),
        "Lreg": regular_l(&data).to_string(),
        "strict_space": nf.level.strict_space,
        "newform_Z": nf.profile.zeta.to_string(),
        "newform_Zstar": nf.profile.zeta_star.as_ref().map(|z| z.to_string()),
        "newform_PSzeta": nf.ps_zeta.to_string(),
    });
    merge(&mut out, fields);
    Ok(out)
}

fn newform(args: &LocalArgs, k: u32) -> Result<Value> {
    let data = args.data()?;
    let nf = newform_profile(&data)?;
    let old: Vec<Value> = (0..=k)
        .map(|j| {
            oldform_polys(&data, j).map(|ps| {
                json!({
                    "k": j,
                    "polys": ps.iter().map(|p| json!({"m": p.index_m, "P": p.poly.to_string()})).collect::<Vec<_>>(),
                })
            })
        })
        .collect::<std::result::Result<_, _>>()?;
    Ok(json!({
        "schema": SCHEMA,
        "profile": nf.profile,
        "M_pi": nf.level.m_pi,
        "eps_pi": nf.level.eps_pi,
        "PS_zeta": nf.ps_zeta.to_string(),
        "P": nf.poly.poly.to_string(),
        "oldforms": old,
    }))
}

fn group_verify(field: &FieldArgs, m: u32, flavor: FlavorArg, samples: usize, seed: u64) -> Result<Value> {
    let ctx = field.ctx()?;
    let spec = ParamodularSpec::new(&ctx, m, flavor.into())?;
    let closure = verify_closure(&spec, samples, seed)?;
    let decomposition = if spec.decomposition_in_range() {
        Some(verify_decomposition(&spec, samples, seed)?)
    } else {
        None
    };
    let passed = closure.failures == 0 && decomposition.as_ref().is_none_or(|d| d.passed());
    if !passed {
        bail!("group checks failed for {}", spec.tag());
    }
    Ok(json!({
        "schema": SCHEMA,
        "group": spec.tag(),
        "closure": closure,
        "decomposition": decomposition,
        "passed": passed,
    }))
}

fn cosets(field: &FieldArgs, m: u32, hecke: Option<&str>, flavor: FlavorArg, samples: usize, seed: u64) -> Result<Value> {
    let ctx = field.ctx()?;
    match hecke {
        None => {
            let report = verify_em_cosets(&ctx, m, samples, seed)?;
            if !report.passed() {
                bail!("coset partition check failed: {report:?}");
            }
            Ok(json!({ "schema": SCHEMA, "cosets": report, "expected": ctx.residue_size() + 1 }))
        }
        Some(dir) => {
            let dir = match dir {
                "+" | "plus" => HeckeDirection::Plus,
                "-" | "minus" => HeckeDirection::Minus,
                other => bail!("unknown Hecke direction {other:?}"),
            };
            let spec = ParamodularSpec::new(&ctx, m, flavor.into())?;
            let fam = hecke_coset_reps(&spec, dir)?;
            Ok(json!({ "schema": SCHEMA, "group": spec.tag(), "double_coset": fam.sub, "count": fam.len() }))
        }
    }
}

fn euler(args: &GlobalArgs, n_max: u64, format: Format) -> Result<Option<Value>> {
    let (tau, choice) = args.load(n_max)?;
    let b = fourier_dirichlet(&tau, &choice, n_max)?;
    if format == Format::Csv {
        let mut out = std::io::stdout().lock();
        writeln!(out, "n,c_n").ok();
        for (i, c) in b.iter().enumerate() {
            if writeln!(out, "{},{}", i + 1, c).is_err() {
                break;
            }
        }
        return Ok(None);
    }
    let coeffs: Vec<Value> = b
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let n = i as u64 + 1;
            json!({ "n": n, "c_n": c.to_string(), "fourier_ratio": fourier_ratio(n, c, tau.weight_kappa).to_string() })
        })
        .collect();
    Ok(Some(json!({
        "schema": SCHEMA,
        "variable": "X_p = p^(-s+1/2); fourier_ratio = n^kappa c_n",
        "d": choice.d,
        "S": choice.s,
        "coefficients": coeffs,
    })))
}

fn global_root(args: &GlobalArgs, dichotomy: Option<&PathBuf>) -> Result<Value> {
    let (tau, choice) = args.load(1)?;
    let root = global_root_number(&tau, &choice)?;
    let mut out = json!({
        "schema": SCHEMA,
        "eps_tau_half": tau.global_root(),
        "global_root_number": root,
        "arch": arch_factor(tau.weight_kappa)?,
    });
    if let Some(path) = dichotomy {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let dd: BTreeMap<u64, LocalDichotomy> = serde_json::from_str(&text).context("parsing the dichotomy file")?;
        out["matches"] = json!(match_field(&choice, &tau, &dd)?);
    }
    Ok(out)
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn run(cli: Cli) -> Result<Option<Value>> {
    Ok(Some(match &cli.cmd {
        Cmd::Factor(a) => factor(a)?,
        Cmd::Newform { local, k } => newform(local, *k)?,
        Cmd::Group { cmd: GroupCmd::Verify { field, m, flavor, samples, seed } } => {
            group_verify(field, *m, *flavor, *samples, *seed)?
        }
        Cmd::Cosets { field, m, hecke, flavor, samples, seed } => {
            cosets(field, *m, hecke.as_deref(), *flavor, *samples, *seed)?
        }
        Cmd::Euler { global, n_max, format } => return euler(global, *n_max, *format),
        Cmd::GlobalRoot { global, dichotomy } => global_root(global, dichotomy.as_ref())?,
    }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Some(v)) => {
            let text = serde_json::to_string_pretty(&v).expect("serializable");
            writeln!(std::io::stdout().lock(), "{text}").ok();
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
