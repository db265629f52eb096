mod cache;
mod source;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bordcalc_core::abelian::AbelianGroupDescriptor;
use bordcalc_core::bogomolov::{bogomolov_with, witness_search, witness_verify, BogomolovOptions, Method, SurfaceTuple};
use bordcalc_core::bordism::{adjacent_table_dim2, adjacent_table_dim3, omega2_with, sk2, sk_point, BordismOptions, Flavor};
use bordcalc_core::homology::{h2_with, p_group_prime, HomologyOptions, Ring, DEFAULT_MAX_INTEGRAL_ORDER};
use bordcalc_core::lattice::subgroup_classes;
use bordcalc_core::presentation::{word_eval, DEFAULT_MAX_COSETS};
use bordcalc_core::{Error, ErrorKind, FiniteGroup, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cache::Cache;

#[derive(Parser, Debug)]
#[command(name = "bordcalc", version, about = "Equivariant bordism of surfaces and Bogomolov multipliers of finite groups")]
struct Cli {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, value_name = "PATH", default_value = ".bordcalc-cache")]
    cache_dir: PathBuf,
    #[arg(long, global = true)]
    no_cache: bool,
    /// Coset limit for presentation sources.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_COSETS)]
    max_cosets: usize,
    /// Largest order handled by exact integral homology.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_INTEGRAL_ORDER)]
    max_integral_order: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GroupArg {
    /// builtin:NAME, file:PATH or presentation:<...>|PATH
    #[arg(short = 'g', long = "group")]
    group: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FlavorArg {
    U,
    So,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::U => Flavor::U,
            FlavorArg::So => Flavor::SO,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Integral,
    OrderModular,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Basic facts about a group.
    Group(GroupArg),
    /// Subgroups up to conjugacy.
    Subgroups(GroupArg),
    /// Integral (or mod p^k) second homology.
    H2 {
        #[command(flatten)]
        g: GroupArg,
        /// `Z`, or a prime power `p^k` for coefficients in Z/p^k.
        #[arg(long, default_value = "Z")]
        ring: String,
    },
    /// Homological Bogomolov multiplier.
    Bogomolov {
        #[command(flatten)]
        g: GroupArg,
        /// Defaults to integral up to the exact-homology limit, else the
        /// order method for p-groups.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Equivariant bordism of surfaces with per-class breakdown.
    Bordism {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, value_enum, default_value = "u")]
        flavor: FlavorArg,
    },
    /// SK_2 of the classifying space, or SK groups of a point.
    Sk {
        #[arg(short = 'g', long = "group", required_unless_present = "point")]
        group: Option<String>,
        #[arg(long)]
        point: Option<i64>,
    },
    /// Surface-group witnesses for nontrivial classes.
    Witness {
        #[command(subcommand)]
        action: WitnessCmd,
    },
    /// Adjacent-family classification tables.
    Tables {
        #[command(subcommand)]
        dim: TableCmd,
    },
}

#[derive(Subcommand, Debug)]
enum WitnessCmd {
    Verify {
        #[command(flatten)]
        g: GroupArg,
        /// Comma-separated words x1,y1,...,xg,yg.
        #[arg(long)]
        tuple: String,
        #[arg(long)]
        genus: Option<usize>,
    },
    Search {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, default_value_t = 2)]
        genus: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum TableCmd {
    Dim2 {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, value_enum, default_value = "u")]
        flavor: FlavorArg,
    },
    Dim3 {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, value_enum, default_value = "so")]
        flavor: FlavorArg,
    },
}

/// Command result; everything here is deterministic and cacheable.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct Outcome {
    descriptor: Option<AbelianGroupDescriptor>,
    breakdown: Vec<Value>,
    notes: Vec<String>,
    text: Vec<String>,
}

struct Ctx {
    cache: Option<Cache>,
    homology: HomologyOptions,
    max_cosets: usize,
    cache_hits: usize,
}

impl Ctx {
    fn group(&self, source: &str) -> Result<FiniteGroup> {
        source::resolve(source, self.max_cosets)
    }

    fn cached(
        &mut self,
        g: &FiniteGroup,
        command: &str,
        params: &Value,
        compute: impl FnOnce() -> Result<Outcome>,
    ) -> Result<Outcome> {
        let fp = g.fingerprint();
        let params = params.to_string();
        if let Some(c) = &self.cache {
            if let Some(hit) = c.get::<Outcome>(&fp, command, &params) {
                self.cache_hits += 1;
                return Ok(hit);
            }
        }
        let out = compute()?;
        if let Some(c) = &self.cache {
            if let Err(e) = c.put(&fp, command, &params, &out) {
                eprintln!("warning: cache write failed: {e}");
            }
        }
        Ok(out)
    }
}

fn parse_ring(s: &str) -> Result<Ring> {
    if s == "Z" || s.eq_ignore_ascii_case("integers") {
        return Ok(Ring::Integers);
    }
    let bad = || Error::Input(format!("ring must be `Z` or `p^k`, got `{s}`"));
    let (p, k) = s.split_once('^').unwrap_or((s, "1"));
    let p: u64 = p.trim().parse().map_err(|_| bad())?;
    let k: u32 = k.trim().parse().map_err(|_| bad())?;
    Ok(Ring::ModPrimePower { p, k })
}

fn method_for(g: &FiniteGroup, m: Option<MethodArg>, homology: &HomologyOptions) -> Method {
    match m {
        Some(MethodArg::Integral) => Method::Integral,
        Some(MethodArg::OrderModular) => Method::OrderModular,
        None if g.order() > homology.max_integral_order && p_group_prime(g).is_some() => Method::OrderModular,
        None => Method::Integral,
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Integral => "integral",
        Method::OrderModular => "order-modular",
    }
}

fn parse_tuple(g: &FiniteGroup, text: &str, genus: Option<usize>) -> Result<SurfaceTuple> {
    let elems = text
        .split(',')
        .map(|w| word_eval(g, w.trim()))
        .collect::<Result<Vec<_>>>()?;
    let t = SurfaceTuple::new(elems)?;
    if let Some(gen) = genus {
        if gen != t.genus() {
            return Err(Error::Input(format!("tuple has genus {}, expected {gen}", t.genus())));
        }
    }
    Ok(t)
}

fn cmd_group(g: &FiniteGroup) -> Outcome {
    let breakdown = g
        .generators()
        .iter()
        .map(|s| json!({"label": s.label, "element": s.element, "order": g.element_order(s.element)}))
        .collect();
    let hist: Vec<String> = g
        .order_histogram()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(o, c)| format!("{o}:{c}"))
        .collect();
    let notes = vec![
        format!("order {}", g.order()),
        format!("exponent {}", g.exponent()),
        format!("abelian {}", g.is_abelian()),
        format!("shape {}", g.classify_special()),
        format!("element orders {}", hist.join(" ")),
    ];
    let mut text = notes.clone();
    text.push(format!(
        "generators {}",
        g.generators().iter().map(|s| s.label.as_str()).collect::<Vec<_>>().join(", ")
    ));
    Outcome {
        descriptor: None,
        breakdown,
        notes,
        text,
    }
}

fn cmd_subgroups(g: &FiniteGroup) -> Result<Outcome> {
    let l = subgroup_classes(g)?;
    let mut breakdown = Vec::new();
    let mut text = Vec::new();
    for (i, c) in l.classes.iter().enumerate() {
        let gens: Vec<&str> = g
            .subgroup_generators(&c.representative)
            .iter()
            .map(|&x| g.name(x))
            .collect();
        breakdown.push(json!({
            "index": i,
            "order": c.representative.order(),
            "class_size": c.class_size,
            "normalizer_order": c.normalizer.order(),
            "weyl_order": c.weyl.order(),
            "generators": gens,
        }));
        text.push(format!(
            "[{i}] order {} x{} |N|={} |W|={} <{}>",
            c.representative.order(),
            c.class_size,
            c.normalizer.order(),
            c.weyl.order(),
            gens.join(", ")
        ));
    }
    let notes = vec![
        format!("{} classes", l.classes.len()),
        format!("{} subgroups", l.subgroup_count()),
    ];
    text.push(notes.join(", "));
    Ok(Outcome {
        descriptor: None,
        breakdown,
        notes,
        text,
    })
}

fn cmd_h2(g: &FiniteGroup, ring: Ring, homology: &HomologyOptions) -> Result<Outcome> {
    let h = h2_with(g, ring, homology)?;
    let label = match ring {
        Ring::Integers => "H_2(G; Z)".to_string(),
        Ring::ModPrimePower { p, k } => format!("H_2(G; Z/{p}^{k})"),
    };
    Ok(Outcome {
        text: vec![format!("{label} = {}", h.descriptor)],
        descriptor: Some(h.descriptor),
        breakdown: Vec::new(),
        notes: Vec::new(),
    })
}

fn cmd_bogomolov(g: &FiniteGroup, method: Method, homology: &HomologyOptions) -> Result<Outcome> {
    let mut opts = BogomolovOptions::new(method);
    opts.homology = *homology;
    let r = bogomolov_with(g, &opts)?;
    let shown = r
        .descriptor
        .as_ref()
        .map_or_else(|| format!("order {}", r.order), |d| d.to_string());
    let mut notes = vec![format!("method {}", method_name(method))];
    notes.extend(r.notes);
    Ok(Outcome {
        descriptor: r.descriptor,
        breakdown: vec![json!({"order": r.order.to_string()})],
        text: vec![format!("B0(G) = {shown}")],
        notes,
    })
}

fn cmd_bordism(g: &FiniteGroup, flavor: Flavor, homology: &HomologyOptions) -> Result<Outcome> {
    let r = omega2_with(g, flavor, &BordismOptions { homology: *homology })?;
    let mut text = vec![format!("Omega_2^{{{flavor},G}} = {}", r.total)];
    let mut breakdown = Vec::new();
    for c in &r.contributions {
        let free = if flavor == Flavor::U { c.u_free } else { c.so_free };
        breakdown.push(json!({
            "class": c.class_index,
            "order": c.order,
            "class_size": c.class_size,
            "weyl_order": c.weyl_order,
            "shape": c.shape.to_string(),
            "free": free,
            "torsion": c.torsion,
            "notes": c.notes,
        }));
        text.push(format!(
            "  [{}] |K|={} {} |W|={}: Z^{free} + B0(W)={}",
            c.class_index, c.order, c.shape, c.weyl_order, c.torsion
        ));
    }
    Ok(Outcome {
        descriptor: Some(r.total),
        breakdown,
        notes: vec![format!("flavor {flavor}")],
        text,
    })
}

fn cmd_sk2(g: &FiniteGroup) -> Result<Outcome> {
    let (sk, skbar) = sk2(g)?;
    Ok(Outcome {
        text: vec![format!("SK_2(BG) = {sk}"), format!("reduced SK_2(BG) = {skbar}")],
        breakdown: vec![json!({"reduced": skbar})],
        descriptor: Some(sk),
        notes: Vec::new(),
    })
}

fn cmd_sk_point(n: i64) -> Result<Outcome> {
    Ok(match sk_point(n)? {
        Some((sk, skbar)) => Outcome {
            text: vec![format!("SK_{n}(*) = {sk}"), format!("reduced SK_{n}(*) = {skbar}")],
            breakdown: vec![json!({"reduced": skbar})],
            descriptor: Some(sk),
            notes: Vec::new(),
        },
        None => Outcome {
            text: vec![format!("SK_{n}(*): not covered by the closed formulas")],
            notes: vec!["degree not covered by the closed formulas".into()],
            ..Outcome::default()
        },
    })
}

fn tuple_names(g: &FiniteGroup, t: &SurfaceTuple) -> Vec<String> {
    t.elements.iter().map(|&x| g.name(x).to_string()).collect()
}

fn evaluator_for(g: &FiniteGroup, homology: &HomologyOptions) -> Result<(bordcalc_core::bogomolov::BogomolovResult, Method)> {
    let method = method_for(g, None, homology);
    let mut opts = BogomolovOptions::new(method);
    opts.homology = *homology;
    Ok((bogomolov_with(g, &opts)?, method))
}

fn cmd_witness_verify(g: &FiniteGroup, t: &SurfaceTuple, homology: &HomologyOptions) -> Result<Outcome> {
    let (b0, method) = evaluator_for(g, homology)?;
    let r = witness_verify(g, t, &b0.evaluator)?;
    let names = tuple_names(g, t);
    Ok(Outcome {
        descriptor: None,
        breakdown: vec![json!({
            "tuple": names,
            "relator_ok": r.relator_ok,
            "generates": r.generates_group,
            "nontrivial": r.nontrivial,
            "class": r.class_coordinates,
        })],
        notes: vec![
            format!("classes evaluated in {}", b0.evaluator.descriptor()),
            format!("method {}", method_name(method)),
        ],
        text: vec![
            format!("tuple ({})", names.join(", ")),
            format!("relator_ok {}", r.relator_ok),
            format!("generates {}", r.generates_group),
            format!("nontrivial {}", r.nontrivial),
        ],
    })
}

fn cmd_witness_search(g: &FiniteGroup, genus: usize, budget: u64, seed: u64, homology: &HomologyOptions) -> Result<Outcome> {
    let (b0, _) = evaluator_for(g, homology)?;
    let found = witness_search(g, genus, budget, seed, &b0.evaluator)?;
    Ok(match found {
        Some(t) => {
            let r = witness_verify(g, &t, &b0.evaluator)?;
            let names = tuple_names(g, &t);
            Outcome {
                breakdown: vec![json!({"tuple": names, "generates": r.generates_group, "class": r.class_coordinates})],
                text: vec![format!("found ({})", names.join(", "))],
                ..Outcome::default()
            }
        }
        None => Outcome {
            breakdown: vec![json!({"tuple": null})],
            text: vec!["no nontrivial tuple found within budget".into()],
            ..Outcome::default()
        },
    })
}

fn table_outcome(d: AbelianGroupDescriptor, label: String) -> Outcome {
    Outcome {
        text: vec![format!("{label} = {d}")],
        descriptor: Some(d),
        ..Outcome::default()
    }
}

struct Run {
    group: Option<FiniteGroup>,
    command: String,
    params: Value,
    outcome: Outcome,
}

fn run(cli: &Cli, ctx: &mut Ctx) -> Result<Run> {
    let homology = ctx.homology;
    let (group, command, params, outcome) = match &cli.command {
        Command::Group(a) => {
            let g = ctx.group(&a.group)?;
            let out = cmd_group(&g);
            (Some(g), "group", json!({}), out)
        }
        Command::Subgroups(a) => {
            let g = ctx.group(&a.group)?;
            let p = json!({});
            let out = ctx.cached(&g, "subgroups", &p, || cmd_subgroups(&g))?;
            (Some(g), "subgroups", p, out)
        }
        Command::H2 { g: a, ring } => {
            let g = ctx.group(&a.group)?;
            let ring = parse_ring(ring)?;
            let p = json!({"ring": ring, "max_integral_order": homology.max_integral_order});
            let out = ctx.cached(&g, "h2", &p, || cmd_h2(&g, ring, &homology))?;
            (Some(g), "h2", p, out)
        }
        Command::Bogomolov { g: a, method } => {
            let g = ctx.group(&a.group)?;
            let m = method_for(&g, *method, &homology);
            let p = json!({"method": method_name(m), "max_integral_order": homology.max_integral_order});
            let out = ctx.cached(&g, "bogomolov", &p, || cmd_bogomolov(&g, m, &homology))?;
            (Some(g), "bogomolov", p, out)
        }
        Command::Bordism { g: a, flavor } => {
            let g = ctx.group(&a.group)?;
            let f: Flavor = (*flavor).into();
            let p = json!({"flavor": f, "max_integral_order": homology.max_integral_order});
            let out = ctx.cached(&g, "bordism", &p, || cmd_bordism(&g, f, &homology))?;
            (Some(g), "bordism", p, out)
        }
        Command::Sk { group, point } => match (group, point) {
            (_, Some(n)) => (None, "sk", json!({"point": n}), cmd_sk_point(*n)?),
            (Some(src), None) => {
                let g = ctx.group(src)?;
                let p = json!({});
                let out = ctx.cached(&g, "sk", &p, || cmd_sk2(&g))?;
                (Some(g), "sk", p, out)
            }
            (None, None) => return Err(Error::Input("sk needs --group or --point".into())),
        },
        Command::Witness { action } => match action {
            WitnessCmd::Verify { g: a, tuple, genus } => {
                let g = ctx.group(&a.group)?;
                let t = parse_tuple(&g, tuple, *genus)?;
                let out = cmd_witness_verify(&g, &t, &homology)?;
                (Some(g), "witness verify", json!({"tuple": tuple, "genus": t.genus()}), out)
            }
            WitnessCmd::Search { g: a, genus, budget, seed } => {
                let g = ctx.group(&a.group)?;
                let out = cmd_witness_search(&g, *genus, *budget, *seed, &homology)?;
                (Some(g), "witness search", json!({"genus": genus, "budget": budget, "seed": seed}), out)
            }
        },
        Command::Tables { dim } => match dim {
            TableCmd::Dim2 { g: a, flavor } => {
                let g = ctx.group(&a.group)?;
                let f: Flavor = (*flavor).into();
                let out = table_outcome(adjacent_table_dim2(&g, f), format!("Omega_2^{{{f},K}}{{A K, P K}}"));
                (Some(g), "tables dim2", json!({"flavor": f}), out)
            }
            TableCmd::Dim3 { g: a, flavor } => {
                let g = ctx.group(&a.group)?;
                let f: Flavor = (*flavor).into();
                let out = table_outcome(adjacent_table_dim3(&g, f), format!("Omega_3^{{{f},K}}{{A K, P K}}"));
                (Some(g), "tables dim3", json!({"flavor": f}), out)
            }
        },
    };
    Ok(Run {
        group,
        command: command.to_string(),
        params,
        outcome,
    })
}

fn envelope(r: &Run) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "group": r.group.as_ref().map(|g| json!({"fingerprint": g.fingerprint(), "order": g.order()})),
        "command": r.command,
        "parameters": r.params,
        "result": {
            "descriptor": r.outcome.descriptor,
            "summary": r.outcome.descriptor.as_ref().map(|d| d.to_string()),
            "breakdown": r.outcome.breakdown,
        },
        "notes": r.outcome.notes,
    })
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Input => 2,
        ErrorKind::Resource => 3,
        ErrorKind::Precondition => 4,
        ErrorKind::Internal => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let cache = if cli.no_cache {
        None
    } else {
        match Cache::open(&cli.cache_dir) {
            Ok(c) => Some(c),
            Err(e) => {
                eprintln!("warning: cache disabled: {e}");
                None
            }
        }
    };
    let mut ctx = Ctx {
        cache,
        homology: HomologyOptions {
            max_integral_order: cli.max_integral_order,
        },
        max_cosets: cli.max_cosets,
        cache_hits: 0,
    };
    let result = run(&cli, &mut ctx);
    // timing and cache statistics go to stderr so stdout stays reproducible
    eprintln!(
        "elapsed {:.3}s, cache hits {}",
        start.elapsed().as_secs_f64(),
        ctx.cache_hits
    );
    match result {
        Ok(r) => {
            if cli.json {
                emit(&serde_json::to_string_pretty(&envelope(&r)).expect("JSON values serialize"));
            } else if !r.outcome.text.is_empty() {
                emit(&r.outcome.text.join("\n"));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let doc = json!({
                    "version": env!("CARGO_PKG_VERSION"),
                    "error": {"exit_code": code, "message": e.to_string()},
                });
                emit(&serde_json::to_string_pretty(&doc).expect("JSON values serialize"));
            }
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}

/// Writes to stdout, treating a closed pipe (e.g. `| head`) as success.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|()| out.flush());
}
