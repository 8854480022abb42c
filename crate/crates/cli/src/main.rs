use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use realtile::realization::{first_period_with_seeds, periodic_fibers, Kernel};
use realtile::report::{classify, sample_realization, AnalysisReport, Options, Pipeline};
use realtile::{analyze, example, parse_input, Substitution, CORPUS};

#[derive(Parser)]
#[command(name = "realtile", version, about = "Cohomology and geometric realization of 1-D substitution tilings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full invariant report for one substitution.
    Analyze {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        /// Write the A-P complex in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Skip the sampled realization checks.
        #[arg(long)]
        no_realize: bool,
    },
    /// Evaluate the realization map on random tilings.
    Realize {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = KernelArg::Lambda)]
        kernel: KernelArg,
        /// Write one row per sample as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Group periodic tilings by their image on the torus.
    Fibers {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = KernelArg::Lambda)]
        kernel: KernelArg,
        /// Period; defaults to the smallest one with seeds.
        #[arg(long)]
        period: Option<usize>,
    },
    /// Analyze every bundled example.
    Examples {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Source {
    /// Input file with `LETTER -> WORD` rules and an optional `[expansion]` section.
    #[arg(required_unless_present = "example", conflicts_with = "example")]
    input: Option<PathBuf>,
    /// Use a bundled example instead of a file.
    #[arg(long, short)]
    example: Option<String>,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, overrides_with = "uncollared", default_value_t = true)]
    collared: bool,
    #[arg(long)]
    uncollared: bool,
    #[arg(long, default_value_t = 50)]
    depth: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Lambda,
    Hyp,
}

impl From<KernelArg> for Kernel {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Lambda => Kernel::Lambda,
            KernelArg::Hyp => Kernel::Hyp,
        }
    }
}

impl Common {
    fn options(&self, realize: bool) -> Options {
        Options {
            collared: !self.uncollared,
            depth: self.depth,
            tol: self.tol,
            samples: self.samples,
            seed: self.seed,
            realize,
        }
    }
}

enum Loaded {
    Substitution(Substitution, Option<realtile::ExpansionSpec>),
    ExpansionOnly(realtile::ExpansionSpec),
}

fn load(source: &Source) -> Result<Loaded> {
    let text = match (&source.input, &source.example) {
        (_, Some(name)) => example(name)?.text.to_string(),
        (Some(path), None) => std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        (None, None) => bail!("no input given"),
    };
    let input = parse_input(&text)?;
    Ok(match (input.substitution, input.expansion) {
        (Some(s), e) => Loaded::Substitution(s, e),
        (None, Some(e)) => Loaded::ExpansionOnly(e),
        (None, None) => bail!("input has neither rules nor an expansion section"),
    })
}

fn substitution(source: &Source) -> Result<Substitution> {
    match load(source)? {
        Loaded::Substitution(s, _) => Ok(s),
        Loaded::ExpansionOnly(_) => bail!(realtile::Error::Parse { line: 0, message: "input has no substitution rules".into() }),
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn print_report(r: &AnalysisReport) {
    print!("{}", r.substitution);
    println!("lambda          {:.12}  minpoly {:?}", r.lambda, r.lambda_minpoly);
    println!("complex         {} vertices, {} edges", r.complex.vertices, r.complex.edges);
    let k = &r.ranks;
    println!("H1 complex      {}", k.h1_complex);
    println!("H1 tiling space {}", k.h1_tiling_space);
    println!("D(Lambda)       {}", k.d_lambda);
    println!("D(GR)           {}", k.d_gr);
    match k.d_prime {
        Some(d) => println!("D'              {d}"),
        None => println!("D'              n/a"),
    }
    println!("H1_f            {}", k.h1_f);
    if let Some(p) = k.pisot_subgroup_rank {
        println!("Pisot subgroup  {p}");
    }
    println!("charpoly A      {:?}", r.charpoly_a);
    if let Some(c) = &r.charpoly_aprime {
        println!("charpoly A'     {c:?}");
    }
    println!(
        "flags           unimodular={} hyperbolic={} pisot_family={} certified={}",
        r.flags.expansion.unimodular, r.flags.expansion.hyperbolic, r.flags.expansion.pisot_family, r.flags.expansion.certified
    );
    for c in &r.conjectures {
        println!("{:<17} {}", c.name, c.hypothesis_status);
    }
    if let Some(z) = &r.realization {
        println!(
            "realization     D={} residual_max={:.3e} error_bound={:.3e} within={}",
            z.dimension, z.residual_max, z.error_bound, z.within_bound
        );
        if let Some(t) = &z.translation {
            println!("translation     max deviation {:.3e}", t.max_deviation);
        }
        if let Some(f) = &z.fiber_groups {
            println!("fibers (m={})   groups {:?} of seeds {:?} (diagnostic)", f.period, f.groups, f.seeds);
        }
    }
    for w in &r.warnings {
        println!("warning: {w}");
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { source, common, dot, no_realize } => {
            let opts = common.options(!no_realize);
            match load(&source)? {
                Loaded::ExpansionOnly(e) => {
                    let report = classify(&e, opts.tol)?;
                    println!("{}", serde_json::to_string_pretty(&report)?);
                    if let Some(p) = &common.json {
                        write_json(p, &report)?;
                    }
                }
                Loaded::Substitution(s, expansion) => {
                    let mut report = analyze(&s, &opts)?;
                    if let Some(e) = expansion {
                        report.expansion = Some(classify(&e, opts.tol)?);
                    }
                    print_report(&report);
                    if let Some(p) = &common.json {
                        write_json(p, &report)?;
                    }
                    if let Some(p) = dot {
                        let pipe = Pipeline::new(&s, opts.collared, opts.tol)?;
                        std::fs::write(&p, pipe.complex.to_dot(&s)).with_context(|| format!("writing {}", p.display()))?;
                    }
                }
            }
        }
        Command::Realize { source, common, kernel, csv } => {
            let s = substitution(&source)?;
            let opts = common.options(true);
            let pipe = Pipeline::new(&s, opts.collared, opts.tol)?;
            let r = pipe.realizer(kernel.into())?;
            let run = sample_realization(&r, opts.samples, opts.depth, opts.seed)?;
            println!(
                "D={} depth={} samples={} error_bound={:.3e} residual_max={:.3e} digit_bound={:.3}",
                run.dimension, run.depth, opts.samples, run.error_bound, run.residual_max, run.digit_bound
            );
            if let Some(p) = &common.json {
                write_json(p, &run)?;
            }
            if let Some(p) = csv {
                std::fs::write(&p, run.to_csv()).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        Command::Fibers { source, common, kernel, period } => {
            let s = substitution(&source)?;
            let opts = common.options(true);
            let pipe = Pipeline::new(&s, opts.collared, opts.tol)?;
            let r = pipe.realizer(kernel.into())?;
            let m = match period {
                Some(m) => m,
                None => first_period_with_seeds(&s, 12)?.context("no periodic seeds with period at most 12")?,
            };
            let rep = periodic_fibers(&r, &s, m, opts.depth)?;
            println!("period {m}: |det(A^m - I)| = {}", rep.fixed_point_count);
            for (i, seed) in rep.seeds.iter().enumerate() {
                println!("  {seed:<8} -> ({}) at distance {:.2e}", rep.snapped[i].join(", "), rep.snap_distance[i]);
            }
            println!("groups {:?}; asymptotic pairs agree: {}", rep.groups, rep.asymptotic_pairs_agree);
            println!("(periodic fibers are a diagnostic, not the almost-everywhere fiber size)");
            if let Some(p) = &common.json {
                write_json(p, &rep)?;
            }
        }
        Command::Examples { common } => {
            let opts = common.options(false);
            let mut all = Vec::new();
            println!("{:<14} {:>4} {:>4} {:>4} {:>4} {:>4}", "example", "H1", "D", "DGR", "D'", "H1f");
            for e in CORPUS {
                let r = analyze(&e.substitution(), &opts)?;
                let k = &r.ranks;
                let dp = k.d_prime.map_or("-".to_string(), |d| d.to_string());
                println!(
                    "{:<14} {:>4} {:>4} {:>4} {:>4} {:>4}",
                    e.name, k.h1_tiling_space, k.d_lambda, k.d_gr, dp, k.h1_f
                );
                all.push(serde_json::json!({ "name": e.name, "report": r }));
            }
            if let Some(p) = &common.json {
                write_json(p, &all)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<realtile::Error>().map_or(2, realtile::Error::exit_code);
            ExitCode::from(code)
        }
    }
}
