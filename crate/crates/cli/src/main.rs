use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gwql_core::cache::InvariantCache;
use gwql_core::config::{Config, CACHE_DIR_ENV};
use gwql_core::engine::{hypergeom_genus0_oracle, InsertionDescriptor, InvariantDescriptor, TwistEntry};
use gwql_core::graphs::{enumerate_loc_graphs, graph_automorphisms};
use gwql_core::hodge::HodgeTable;
use gwql_core::lefschetz::{
    degree_condition_modified, enumerate_hypergraphs, masterspace_fixed_data, recursion_plan,
    vanishing_bound, vdim_difference, MasterspaceSpec, PairGeometry,
};
use gwql_core::relations::{relation_report, report_passes, RelationCase, RelationId};
use gwql_core::Engine;

#[derive(Parser, Debug)]
#[command(
    name = "gwql",
    version,
    about = "Twisted Gromov-Witten invariants of P^N by localization"
)]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed of the first generic torus weight draw.
    #[arg(long, global = true)]
    weight_seed: Option<u64>,
    /// Invariant cache directory (default: $GWQL_CACHE_DIR, else no cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single invariants.
    #[command(subcommand)]
    Invariant(InvariantCmd),
    /// Genus-1 / genus-0 relations.
    #[command(subcommand)]
    Relation(RelationCmd),
    /// Dimension and vanishing bounds for a hypersurface pair.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Fixed loci of the masterspace.
    #[command(subcommand)]
    Masterspace(MasterspaceCmd),
    /// Decorated stable graphs.
    #[command(subcommand)]
    Hypergraphs(HypergraphsCmd),
    /// Localization graphs.
    #[command(subcommand)]
    Graphs(GraphsCmd),
    /// Hodge integrals over M̄_{0,n} and M̄_{1,n}.
    HodgeTable {
        #[arg(long, default_value_t = 1)]
        genus: u8,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Inspect or clear the invariant cache.
    #[command(subcommand)]
    Cache(CacheCmd),
}

#[derive(Args, Debug)]
struct DescriptorArgs {
    /// Target P^N, e.g. P4.
    #[arg(long, value_parser = parse_space)]
    space: Option<usize>,
    /// Twist `k:m[:euler|inverse]`, repeatable.
    #[arg(long, allow_hyphen_values = true)]
    twist: Vec<TwistEntry>,
    #[arg(long, default_value_t = 0)]
    genus: u8,
    #[arg(long)]
    degree: Option<u32>,
    /// Insertion `<class>[;psi=p][;kernel=c,order]`, repeatable.
    #[arg(long, allow_hyphen_values = true)]
    insertion: Vec<InsertionDescriptor>,
    /// A canonical descriptor key instead of the flags above.
    #[arg(long, conflicts_with_all = ["space", "twist", "degree", "insertion"])]
    key: Option<String>,
}

#[derive(Subcommand, Debug)]
enum InvariantCmd {
    Compute {
        #[command(flatten)]
        desc: DescriptorArgs,
        /// Also compare this many independent weight draws.
        #[arg(long)]
        check_weights: Option<usize>,
    },
    /// Genus-0 no-insertion value from the hypergeometric series.
    Oracle {
        #[arg(long, value_parser = parse_space)]
        space: usize,
        /// Positive twist degrees, comma separated.
        #[arg(long, value_delimiter = ',')]
        twist: Vec<u32>,
        #[arg(long)]
        degree: u32,
    },
}

#[derive(Subcommand, Debug)]
enum RelationCmd {
    Check {
        /// rel1, rel2 or fano.
        #[arg(long)]
        id: RelationId,
        /// Base P^N, e.g. P2.
        #[arg(long = "X", value_parser = parse_space)]
        x: usize,
        #[arg(long = "Ddeg")]
        d_degree: u32,
        #[arg(long)]
        beta: u32,
    },
    /// Run every case of a JSON file `[{"relation":..,"N":..,"d_degree":..,"beta_degree":..}]`.
    Suite {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum BoundsCmd {
    Check {
        #[arg(long, value_parser = parse_pair)]
        pair: PairGeometry,
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        degree: u32,
        /// Number of primitive insertions.
        #[arg(long, default_value_t = 0)]
        primitive: u32,
    },
    /// The recursion step isolating the hypersurface invariant.
    Plan {
        #[arg(long, value_parser = parse_pair)]
        pair: PairGeometry,
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        degree: u32,
    },
}

#[derive(Subcommand, Debug)]
enum MasterspaceCmd {
    Data {
        #[arg(long, value_parser = parse_pair, default_value = "P4:5")]
        pair: PairGeometry,
        #[arg(long = "L", default_value_t = 0, allow_hyphen_values = true)]
        l_degree: i64,
    },
}

#[derive(Subcommand, Debug)]
enum HypergraphsCmd {
    Enumerate {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        count_only: bool,
    },
}

#[derive(Subcommand, Debug)]
enum GraphsCmd {
    Enumerate {
        #[arg(long, value_parser = parse_space)]
        space: usize,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        genus: u8,
        #[arg(long, default_value_t = 0)]
        markings: usize,
        #[arg(long)]
        count_only: bool,
    },
}

#[derive(Subcommand, Debug)]
enum CacheCmd {
    List,
    Get {
        #[arg(long)]
        key: String,
    },
    Clear,
}

fn parse_space(s: &str) -> Result<usize, String> {
    let n = s.strip_prefix('P').unwrap_or(s);
    n.parse().map_err(|_| format!("expected P<N>, got {s:?}"))
}

fn parse_pair(s: &str) -> Result<PairGeometry, String> {
    let (n, d) = s
        .split_once(':')
        .ok_or_else(|| format!("expected P<N>:<Ddeg>, got {s:?}"))?;
    let d: u32 = d.parse().map_err(|_| format!("bad D degree in {s:?}"))?;
    PairGeometry::new(parse_space(n)? as u32, d).map_err(|e| e.to_string())
}

struct Ctx {
    json: bool,
    config: Config,
}

impl Ctx {
    fn engine(&self) -> Result<Engine, String> {
        let engine = Engine::new(self.config.clone());
        Ok(match self.cache()? {
            Some(c) => engine.with_cache(Arc::new(c)),
            None => engine,
        })
    }

    fn cache(&self) -> Result<Option<InvariantCache>, String> {
        match &self.config.cache_dir {
            Some(dir) => InvariantCache::open(dir).map(Some).map_err(|e| e.to_string()),
            None => Ok(None),
        }
    }

    fn emit(&self, value: Value, text: impl FnOnce() -> String) {
        if self.json {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("JSON values serialize")
            );
        } else {
            println!("{}", text());
        }
    }
}

/// Success flag or an error message; errors exit 1.
type Outcome = Result<bool, String>;

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn series_text(v: &Value) -> String {
    match v.as_object() {
        Some(m) if m.is_empty() => "0".into(),
        Some(m) => m
            .iter()
            .map(|(e, c)| {
                if e == "0" {
                    c.as_str().unwrap_or("").to_string()
                } else {
                    format!("{}*λ^{e}", c.as_str().unwrap_or(""))
                }
            })
            .collect::<Vec<_>>()
            .join(" + "),
        None => v.to_string(),
    }
}

fn descriptor(args: DescriptorArgs) -> Result<InvariantDescriptor, String> {
    if let Some(key) = args.key {
        return InvariantDescriptor::from_key(&key).map_err(|e| e.to_string());
    }
    let space = args.space.ok_or("--space is required without --key")?;
    let degree = args.degree.ok_or("--degree is required without --key")?;
    Ok(InvariantDescriptor::new(
        space,
        args.twist,
        args.genus,
        degree,
        args.insertion,
    ))
}

fn invariant(ctx: &Ctx, cmd: InvariantCmd) -> Outcome {
    match cmd {
        InvariantCmd::Compute { desc, check_weights } => {
            let desc = descriptor(desc)?;
            let engine = ctx.engine()?;
            let start = Instant::now();
            let eval = engine.evaluate(&desc).map_err(|e| e.to_string())?;
            log::info!("from cache: {}", eval.from_cache);
            let mut out = json!({
                "key": desc.canonical_key(),
                "value": to_value(&eval.value),
                "graph_count": eval.graph_count,
            });
            let mut ok = true;
            if let Some(trials) = check_weights {
                let same = engine
                    .weight_independence_check(&desc, trials)
                    .map_err(|e| e.to_string())?;
                out["weight_independent"] = json!(same);
                ok = same;
            }
            out["seconds"] = json!(start.elapsed().as_secs_f64());
            ctx.emit(out.clone(), || series_text(&out["value"]));
            Ok(ok)
        }
        InvariantCmd::Oracle { space, twist, degree } => {
            let v = hypergeom_genus0_oracle(space, &twist, degree).map_err(|e| e.to_string())?;
            ctx.emit(
                json!({ "N": space, "twists": twist, "degree": degree, "value": v }),
                || v.to_string(),
            );
            Ok(true)
        }
    }
}

fn relation(ctx: &Ctx, cmd: RelationCmd) -> Outcome {
    let cases = match cmd {
        RelationCmd::Check {
            id,
            x,
            d_degree,
            beta,
        } => vec![RelationCase::new(id, x, d_degree, beta)],
        RelationCmd::Suite { file } => {
            let text = std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", file.display()))?
        }
    };
    let report = relation_report(&ctx.engine()?, &cases);
    let pass = report_passes(&report);
    let text = || {
        report
            .iter()
            .zip(&cases)
            .map(|(r, c)| match r.get("error") {
                Some(e) => format!("{c}: error: {}", e.as_str().unwrap_or("")),
                None => format!(
                    "{c}: {} | lhs {} | rhs {}",
                    if r["equal"] == true { "equal" } else { "NOT equal" },
                    series_text(&r["lhs"]),
                    series_text(&r["rhs"])
                ),
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    ctx.emit(json!({ "cases": report, "all_equal": pass }), text);
    Ok(pass)
}

fn bounds(ctx: &Ctx, cmd: BoundsCmd) -> Outcome {
    match cmd {
        BoundsCmd::Check {
            pair,
            genus,
            degree,
            primitive,
        } => {
            let vanishes = vanishing_bound(&pair, genus, degree, primitive);
            ctx.emit(
                json!({
                    "pair": pair.to_string(),
                    "genus": genus,
                    "degree": degree,
                    "primitive": primitive,
                    "vdim_difference": vdim_difference(&pair, genus, degree),
                    "vanishing_bound": vanishes,
                    "degree_condition_modified": degree_condition_modified(&pair, degree, genus),
                }),
                || vanishes.to_string(),
            );
            Ok(true)
        }
        BoundsCmd::Plan { pair, genus, degree } => {
            let plan = recursion_plan(&pair, genus, degree).map_err(|e| e.to_string())?;
            let v = to_value(&plan);
            ctx.emit(v, || {
                format!(
                    "{}: leading term {}λ^{}, {} lower terms",
                    plan.vanishing,
                    if plan.leading_sign > 0 { "+" } else { "-" },
                    plan.lambda_exponent,
                    plan.lower_terms.len()
                )
            });
            Ok(true)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let mut config = Config::from_env();
    if let Some(seed) = cli.weight_seed {
        config.weight_seed = seed;
    }
    if let Some(dir) = cli.cache_dir {
        config.cache_dir = Some(dir);
    }
    let ctx = Ctx {
        json: cli.json,
        config,
    };
    match cli.command {
        Command::Invariant(c) => invariant(&ctx, c),
        Command::Relation(c) => relation(&ctx, c),
        Command::Bounds(c) => bounds(&ctx, c),
        Command::Masterspace(MasterspaceCmd::Data { pair, l_degree }) => {
            let data = masterspace_fixed_data(&MasterspaceSpec { pair, l_degree });
            let v = json!({ "pair": pair.to_string(), "L_degree": l_degree, "loci": to_value(&data) });
            ctx.emit(v, || {
                data.iter()
                    .map(|d| format!("{}: twist degrees {:?}", d.locus, d.twist_degrees()))
                    .collect::<Vec<_>>()
                    .join("\n")
            });
            Ok(true)
        }
        Command::Hypergraphs(HypergraphsCmd::Enumerate { genus, count_only }) => {
            let hs = enumerate_hypergraphs(genus).map_err(|e| e.to_string())?;
            let zero_edge = hs.iter().filter(|h| h.edges.is_empty()).count();
            let mut v = json!({ "genus": genus, "count": hs.len(), "zero_edge_count": zero_edge });
            if !count_only {
                v["hypergraphs"] = to_value(&hs);
            }
            ctx.emit(v, || {
                if count_only {
                    hs.len().to_string()
                } else {
                    hs.iter().map(|h| h.to_string()).collect::<Vec<_>>().join("\n")
                }
            });
            Ok(true)
        }
        Command::Graphs(GraphsCmd::Enumerate {
            space,
            degree,
            genus,
            markings,
            count_only,
        }) => {
            let gs = enumerate_loc_graphs(space, degree, genus, markings).map_err(|e| e.to_string())?;
            let mut v = json!({ "N": space, "degree": degree, "genus": genus, "markings": markings, "count": gs.len() });
            if !count_only {
                let rows: Vec<Value> = gs
                    .iter()
                    .map(|g| {
                        let aut = graph_automorphisms(g);
                        json!({ "graph": to_value(g), "automorphisms": aut.automorphisms, "edge_degree_factor": aut.edge_degree_factor })
                    })
                    .collect();
                v["graphs"] = Value::Array(rows);
            }
            ctx.emit(v, || gs.len().to_string());
            Ok(true)
        }
        Command::HodgeTable { genus, max_n } => {
            let rows = HodgeTable::new().dump(genus, max_n).map_err(|e| e.to_string())?;
            ctx.emit(json!({ "genus": genus, "entries": to_value(&rows) }), || {
                rows.iter()
                    .map(|r| {
                        let l = if r.lambda1 > 0 { " lambda1" } else { "" };
                        format!("psi {:?}{l}: {}", r.psi, r.value)
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            });
            Ok(true)
        }
        Command::Cache(cmd) => {
            let cache = ctx
                .cache()?
                .ok_or_else(|| format!("no cache directory: pass --cache-dir or set {CACHE_DIR_ENV}"))?;
            match cmd {
                CacheCmd::List => {
                    let entries = cache.entries().map_err(|e| e.to_string())?;
                    ctx.emit(json!({ "entries": to_value(&entries) }), || {
                        entries
                            .iter()
                            .map(|e| format!("{} = {}", e.key, e.value))
                            .collect::<Vec<_>>()
                            .join("\n")
                    });
                    Ok(true)
                }
                CacheCmd::Get { key } => match cache.get(&key) {
                    Some(v) => {
                        ctx.emit(json!({ "key": key, "value": to_value(&v) }), || v.to_string());
                        Ok(true)
                    }
                    None => Err(format!("no cache entry for {key}")),
                },
                CacheCmd::Clear => {
                    let n = cache.clear().map_err(|e| e.to_string())?;
                    ctx.emit(json!({ "removed": n }), || format!("removed {n} entries"));
                    Ok(true)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
