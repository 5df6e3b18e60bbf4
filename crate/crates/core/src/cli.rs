//! Command-line front end. Every command prints one deterministic document;
//! exit status is 0 on success, 1 when a verification finds a mismatch and
//! 2 on any input error.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::cap_operators::CapOperatorSet;
use crate::closed_forms::{verify_family, FamilySpec};
use crate::error::{Error, Result};
use crate::jacobi_sequences::{
    compute_omegas, detect_atoms, sequences_for, AtomDetection, FockModel, JacobiSequencePair,
};
use crate::moments::{atomic_from_json, table_from_json, MomentFunctional};
use crate::multiindex::MultiIndex;
use crate::orthodecomp::decompose;
use crate::polyring::monomial_basis;
use crate::rational::{format_q, parse_q_list, Q};
use crate::symbolic::Symbolic;

#[derive(Debug, Parser)]
#[command(name = "jacobi-mv", version, about = "Exact Jacobi sequences of multivariate moment functionals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the graded orthogonal basis and its Gram matrices.
    Decompose {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Dump creation/preservation/annihilation blocks (levels below max-degree).
    Cap {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Omega_n for every level up to max-level.
    Omega {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 3)]
        max_level: usize,
        #[arg(long, value_enum, default_value_t = Convention::Normalized)]
        convention: Convention,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// alpha_{e_j|n} for every coordinate and level up to max-level.
    Alpha {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 3)]
        max_level: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare the pipeline with the closed forms of a classical family.
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 3)]
        max_level: usize,
        /// `stated` also fails on disagreement with the separately stated
        /// Gegenbauer/Chebyshev/Legendre formulas.
        #[arg(long, value_enum, default_value_t = Against::Master)]
        against: Against,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Find the first vanishing Omega_n and bound the number of atoms.
    Atoms {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 4)]
        max_level: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Recover moments from the Jacobi sequences alone.
    Reconstruct {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 4)]
        max_level: usize,
        /// Exponent, e.g. `2,1`; all exponents up to max-level when omitted.
        #[arg(long)]
        beta: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// hermite, laguerre, jacobi, gegenbauer, chebyshev1, chebyshev2, legendre
    #[arg(long, conflicts_with_all = ["measure", "moments"])]
    pub family: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Laguerre parameters, comma separated rationals.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Atomic measure JSON file.
    #[arg(long, conflicts_with = "moments")]
    pub measure: Option<PathBuf>,
    /// Moment table JSON file.
    #[arg(long)]
    pub moments: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Normalized,
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Against {
    Master,
    Stated,
}

/// Where the functional comes from.
#[derive(Debug, Clone)]
pub enum FunctionalSource {
    Family(FamilySpec),
    Measure(PathBuf),
    Moments(PathBuf),
}

/// A validated command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub source: FunctionalSource,
    pub max_level: usize,
    pub convention: Convention,
    pub format: Format,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommandKind {
    Decompose,
    Cap,
    Omega,
    Alpha,
    Verify { against: Against },
    Atoms,
    Reconstruct { beta: Option<MultiIndex> },
}

pub struct Outcome {
    pub document: String,
    pub status: i32,
}

fn params(raw: &Option<String>, d: Option<usize>, name: &str) -> Result<Vec<Q>> {
    let raw = raw
        .as_ref()
        .ok_or_else(|| Error::Malformed(format!("--{name} is required for this family")))?;
    let v = parse_q_list(raw)?;
    match d {
        Some(d) if v.len() == 1 && d > 1 => Ok(vec![v[0].clone(); d]),
        Some(d) if v.len() != d => Err(Error::DimensionMismatch { expected: d, got: v.len() }),
        _ => Ok(v),
    }
}

fn family_spec(s: &SourceArgs, name: &str) -> Result<FamilySpec> {
    let need_d = || s.d.ok_or_else(|| Error::Malformed(format!("--d is required for {name}")));
    match name {
        "hermite" => FamilySpec::hermite(need_d()?),
        "laguerre" => FamilySpec::laguerre(params(&s.alpha, s.d, "alpha")?),
        "jacobi" => FamilySpec::jacobi(params(&s.a, s.d, "a")?, params(&s.b, s.d, "b")?),
        "gegenbauer" => FamilySpec::gegenbauer(params(&s.lambda, s.d, "lambda")?),
        "chebyshev1" => FamilySpec::chebyshev1(need_d()?),
        "chebyshev2" => FamilySpec::chebyshev2(need_d()?),
        "legendre" => FamilySpec::legendre(need_d()?),
        other => Err(Error::Malformed(format!("unknown family `{other}`"))),
    }
}

impl SourceArgs {
    fn resolve(&self) -> Result<FunctionalSource> {
        match (&self.family, &self.measure, &self.moments) {
            (Some(f), None, None) => Ok(FunctionalSource::Family(family_spec(self, f)?)),
            (None, Some(p), None) => Ok(FunctionalSource::Measure(p.clone())),
            (None, None, Some(p)) => Ok(FunctionalSource::Moments(p.clone())),
            _ => Err(Error::Malformed("give exactly one of --family, --measure, --moments".into())),
        }
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (command, source, max_level, convention, out) = match cli.command {
            Command::Decompose { source, max_degree, out } => {
                (CommandKind::Decompose, source, max_degree, Convention::Normalized, out)
            }
            Command::Cap { source, max_degree, out } => (CommandKind::Cap, source, max_degree, Convention::Normalized, out),
            Command::Omega { source, max_level, convention, out } => (CommandKind::Omega, source, max_level, convention, out),
            Command::Alpha { source, max_level, out } => (CommandKind::Alpha, source, max_level, Convention::Normalized, out),
            Command::Verify { source, max_level, against, out } => {
                (CommandKind::Verify { against }, source, max_level, Convention::Normalized, out)
            }
            Command::Atoms { source, max_level, out } => (CommandKind::Atoms, source, max_level, Convention::Normalized, out),
            Command::Reconstruct { source, max_level, beta, out } => {
                let beta = beta
                    .map(|b| {
                        b.split(',')
                            .map(|x| x.trim().parse::<u32>().map_err(|_| Error::Malformed(format!("bad exponent `{x}`"))))
                            .collect::<Result<Vec<_>>>()
                            .map(MultiIndex::new)
                    })
                    .transpose()?;
                (CommandKind::Reconstruct { beta }, source, max_level, Convention::Normalized, out)
            }
        };
        Ok(RunConfig {
            command,
            source: source.resolve()?,
            max_level,
            convention,
            format: out.format,
            output: out.output,
        })
    }

    fn functional(&self) -> Result<MomentFunctional> {
        let read = |p: &PathBuf| fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())));
        match &self.source {
            FunctionalSource::Family(spec) => spec.functional(),
            FunctionalSource::Measure(p) => atomic_from_json(&read(p)?),
            FunctionalSource::Moments(p) => table_from_json(&read(p)?),
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn csv_only_diagonal() -> Error {
    Error::Malformed("CSV output is only available for diagonal matrices; use --format json".into())
}

fn class_label(c: &MultiIndex) -> String {
    c.entries().iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn omega_document(cfg: &RunConfig, seq: &JacobiSequencePair, f: &MomentFunctional) -> Result<String> {
    let mass: Option<Symbolic> = match cfg.convention {
        Convention::Paper => Some(f.mass_factor()?),
        Convention::Normalized => None,
    };
    let entry = |x: &Q| match &mass {
        Some(m) => m.scale(x).to_string(),
        None => format_q(x),
    };
    if cfg.format == Format::Csv {
        let mut s = String::from("n,class,omega\n");
        for n in 0..=seq.max_level() {
            let om = seq.omega(n);
            if !om.is_diagonal() {
                return Err(csv_only_diagonal());
            }
            for (k, c) in seq.classes(n).classes().iter().enumerate() {
                s += &format!("{n},{},{}\n", class_label(c), entry(om.get(k, k)));
            }
        }
        return Ok(s);
    }
    let levels: Vec<_> = (0..=seq.max_level())
        .map(|n| {
            let om = seq.omega(n);
            json!({
                "n": n,
                "classes": seq.classes(n).classes().iter().map(|c| c.entries().to_vec()).collect::<Vec<_>>(),
                "omega": (0..om.rows()).map(|r| (0..om.cols()).map(|c| entry(om.get(r, c))).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "rank": seq.rank(n),
            })
        })
        .collect();
    pretty(&json!({
        "d": seq.d(),
        "convention": cfg.convention,
        "mass_factor": mass.as_ref().map(Symbolic::to_json),
        "mass_factor_text": mass.as_ref().map(Symbolic::to_string),
        "levels": levels,
    }))
}

fn alpha_document(cfg: &RunConfig, seq: &JacobiSequencePair) -> Result<String> {
    if cfg.format == Format::Csv {
        let header: Vec<String> = (1..=seq.d()).map(|j| format!("alpha_{j}")).collect();
        let mut s = format!("n,class,{}\n", header.join(","));
        for n in 0..seq.alpha_levels() {
            if (0..seq.d()).any(|j| !seq.alpha(n, j).is_diagonal()) {
                return Err(csv_only_diagonal());
            }
            for (k, c) in seq.classes(n).classes().iter().enumerate() {
                let vals: Vec<String> = (0..seq.d()).map(|j| format_q(seq.alpha(n, j).get(k, k))).collect();
                s += &format!("{n},{},{}\n", class_label(c), vals.join(","));
            }
        }
        return Ok(s);
    }
    let levels: Vec<_> = (0..seq.alpha_levels()).map(|n| seq.level_json(n)).collect();
    pretty(&json!({ "d": seq.d(), "levels": levels }))
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let ok = |document| Ok(Outcome { document, status: 0 });
    let no_csv = |what: &str| Error::Malformed(format!("{what} output is JSON only"));
    match &cfg.command {
        CommandKind::Decompose => {
            if cfg.format == Format::Csv {
                return Err(no_csv("decompose"));
            }
            ok(pretty(&decompose(&cfg.functional()?, cfg.max_level)?.to_json())?)
        }
        CommandKind::Cap => {
            if cfg.format == Format::Csv {
                return Err(no_csv("cap"));
            }
            let basis = decompose(&cfg.functional()?, cfg.max_level)?;
            ok(pretty(&CapOperatorSet::build(&basis)?.to_json())?)
        }
        CommandKind::Omega => {
            let f = cfg.functional()?;
            let ops = CapOperatorSet::build(&decompose(&f, cfg.max_level)?)?;
            let seq = compute_omegas(&ops, cfg.max_level)?;
            ok(omega_document(cfg, &seq, &f)?)
        }
        CommandKind::Alpha => ok(alpha_document(cfg, &sequences_for(&cfg.functional()?, cfg.max_level)?)?),
        CommandKind::Verify { against } => {
            let FunctionalSource::Family(spec) = &cfg.source else {
                return Err(Error::Malformed("verify needs --family".into()));
            };
            let report = verify_family(spec, cfg.max_level)?;
            let stated_ok = report.stated_formulas.iter().all(|c| c.matches);
            let pass = report.pass && (*against == Against::Master || stated_ok);
            let document = if cfg.format == Format::Csv {
                let mut s = String::from("n,class,pipeline_omega,closed_omega,omega_match,alpha_match\n");
                for l in &report.levels {
                    for c in &l.classes {
                        let label = c.class.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
                        s += &format!(
                            "{},{label},{},{},{},{}\n",
                            l.n, c.pipeline_omega, c.closed_omega, c.omega_match, c.alpha_match
                        );
                    }
                }
                s
            } else {
                pretty(&report)?
            };
            Ok(Outcome { document, status: if pass { 0 } else { 1 } })
        }
        CommandKind::Atoms => {
            let r = detect_atoms(&cfg.functional()?, cfg.max_level)?;
            let (n0, bound) = match r {
                AtomDetection::Atomic { n0, atom_bound } => (Some(n0), Some(atom_bound)),
                AtomDetection::Inconclusive { .. } => (None, None),
            };
            if cfg.format == Format::Csv {
                let cell = |x: Option<String>| x.unwrap_or_default();
                return ok(format!(
                    "n0,atom_bound\n{},{}\n",
                    cell(n0.map(|v| v.to_string())),
                    cell(bound.map(|v| v.to_string()))
                ));
            }
            let doc = match r {
                AtomDetection::Atomic { .. } => json!({ "n0": n0, "atom_bound": bound }),
                AtomDetection::Inconclusive { max_level } => {
                    json!({ "n0": null, "atom_bound": null, "inconclusive_up_to": max_level })
                }
            };
            ok(pretty(&doc)?)
        }
        CommandKind::Reconstruct { beta } => {
            let f = cfg.functional()?;
            let betas = match beta {
                Some(b) => vec![b.clone()],
                None => monomial_basis(f.d(), cfg.max_level)?,
            };
            let need = betas.iter().map(|b| b.degree()).max().unwrap_or(0);
            if need > cfg.max_level {
                return Err(Error::InsufficientDepth { needed: need, available: cfg.max_level });
            }
            // the walk never climbs above half the word length
            let seq = sequences_for(&f, (cfg.max_level / 2).max(1))?;
            let fock = FockModel::new(&seq)?;
            let mut rows = Vec::new();
            let mut all = true;
            for b in &betas {
                if b.d() != f.d() {
                    return Err(Error::DimensionMismatch { expected: f.d(), got: b.d() });
                }
                let got = fock.moment(b)?;
                let want = f.moment(b)?;
                all &= got == want;
                rows.push((b.clone(), got, want));
            }
            let document = if cfg.format == Format::Csv {
                let mut s = String::from("beta,reconstructed,moment,match\n");
                for (b, g, w) in &rows {
                    s += &format!("{},{},{},{}\n", class_label(b), format_q(g), format_q(w), g == w);
                }
                s
            } else {
                let items: Vec<_> = rows
                    .iter()
                    .map(|(b, g, w)| {
                        json!({ "beta": b.entries(), "reconstructed": format_q(g), "moment": format_q(w), "match": g == w })
                    })
                    .collect();
                pretty(&json!({ "d": f.d(), "max_level": cfg.max_level, "moments": items }))?
            };
            Ok(Outcome { document, status: if all { 0 } else { 1 } })
        }
    }
}

/// Sizes the global thread pool from `JACOBI_MV_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("JACOBI_MV_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("JACOBI_MV_THREADS=`{v}` is not a thread count")))?;
        // a second initialization in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses, runs and writes; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = configure_threads().and_then(|_| RunConfig::from_cli(cli)).and_then(|cfg| {
        let out = run(&cfg)?;
        match &cfg.output {
            Some(p) => fs::write(p, &out.document).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
            None => print!("{}", out.document),
        }
        Ok(out.status)
    });
    match result {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
