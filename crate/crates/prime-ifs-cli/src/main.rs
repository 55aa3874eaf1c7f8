//! Command-line driver: every figure and table is reproducible from a
//! named subcommand, and every run drops a `manifest.json` that replays
//! to byte-identical outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use prime_ifs::census::{
    distance_frequencies, kgram_frequencies, sigma_scan, tuple_center_census, twin_census,
    FrequencyTable, SigmaInterpretation,
};
use prime_ifs::ifs::{
    chaos_game, default_start, driven_orbit, gasket_system, standard_square_system, IfsSystem,
    Point, PRNG_ALGORITHM,
};
use prime_ifs::prime_stream::{
    primes, twin_pairs, tuple_centers, PrimeRangeQuery, RangeConvention, TupleCenterQuery,
};
use prime_ifs::raster::{
    accumulate, apply_gridlines, render_pgm, write_points_csv, GrayScale,
};
use prime_ifs::residue::{
    abs_diff_stream, canonical_orderings, rot_distance_stream, symbolize, ResidueAlphabet,
    SymbolStream,
};

#[derive(Parser)]
#[command(name = "prime-ifs", version, about = "Prime-residue IFS rasters and censuses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chaos-game raster of a built-in system
    Gasket(GasketArgs),
    /// Drive the square system with a prime residue stream
    Drive(DriveArgs),
    /// Census and raster of the rotational-distance stream
    Rotdist(DerivedArgs),
    /// Census and raster of the absolute-difference stream
    Absdiff(DerivedArgs),
    /// Twin-pair censuses (concatenated, per-pair, forbidden list)
    Twins(TwinsArgs),
    /// Tuple-center census for centers n with n-d and n+d prime
    Tuple(TupleArgs),
    /// Standard deviation of pair counts across start values
    SigmaScan(SigmaArgs),
    /// Re-run a recorded manifest
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemChoice {
    Gasket,
    Square,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleChoice {
    Linear,
    Log,
}

impl From<ScaleChoice> for GrayScale {
    fn from(s: ScaleChoice) -> Self {
        match s {
            ScaleChoice::Linear => GrayScale::Linear,
            ScaleChoice::Log => GrayScale::Log,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InterpChoice {
    Window,
    Count,
    Both,
}

#[derive(Args)]
struct GasketArgs {
    #[arg(long, value_enum, default_value = "gasket")]
    system: SystemChoice,
    #[arg(long)]
    points: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 512)]
    size: usize,
    #[arg(long, value_enum, default_value = "linear")]
    scale: ScaleChoice,
    #[arg(long, default_value_t = 0)]
    divider: usize,
    #[arg(long)]
    points_csv: bool,
    #[arg(long)]
    out: PathBuf,
}

/// Flags shared by every prime-stream subcommand.
#[derive(Args)]
struct StreamArgs {
    #[arg(long = "mod")]
    modulus: u64,
    /// Residue classes in symbol order, e.g. "1 3 7 9"
    #[arg(long)]
    ordering: Option<String>,
    #[arg(long)]
    start: u64,
    /// Take this many primes starting at or after --start
    #[arg(long, conflicts_with = "limit")]
    count: Option<usize>,
    /// Take primes in the value range [--start, --limit]
    #[arg(long)]
    limit: Option<u64>,
}

impl StreamArgs {
    fn query(&self) -> Result<PrimeRangeQuery, String> {
        let q = match (self.count, self.limit) {
            (Some(count), None) => PrimeRangeQuery::ByCountFrom { start: self.start, count },
            (None, Some(limit)) => PrimeRangeQuery::ByValueRange { lo: self.start, hi: limit },
            _ => return Err("exactly one of --count or --limit is required".into()),
        };
        q.validate().map_err(|e| e.to_string())?;
        Ok(q)
    }

    fn range_json(&self) -> Value {
        match (self.count, self.limit) {
            (Some(c), _) => json!({ "start": self.start, "count": c }),
            (_, Some(l)) => json!({ "start": self.start, "limit": l }),
            _ => Value::Null,
        }
    }
}

#[derive(Args)]
struct DriveArgs {
    #[command(flatten)]
    stream: StreamArgs,
    /// Render only the first two canonical orderings
    #[arg(long, conflicts_with = "ordering")]
    skip_third: bool,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 512)]
    size: usize,
    #[arg(long, value_enum, default_value = "log")]
    scale: ScaleChoice,
    #[arg(long, default_value_t = 0)]
    divider: usize,
    #[arg(long)]
    points_csv: bool,
    #[arg(long)]
    pretty: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DerivedArgs {
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 512)]
    size: usize,
    #[arg(long, value_enum, default_value = "log")]
    scale: ScaleChoice,
    #[arg(long, default_value_t = 0)]
    divider: usize,
    #[arg(long)]
    points_csv: bool,
    #[arg(long)]
    pretty: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TwinsArgs {
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, default_value_t = 512)]
    size: usize,
    #[arg(long, value_enum, default_value = "log")]
    scale: ScaleChoice,
    #[arg(long, default_value_t = 0)]
    divider: usize,
    #[arg(long)]
    pretty: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TupleArgs {
    #[command(flatten)]
    stream: StreamArgs,
    /// Half-width d: centers n with n-d and n+d both prime
    #[arg(long)]
    offset: u64,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long, default_value_t = 512)]
    size: usize,
    #[arg(long, value_enum, default_value = "log")]
    scale: ScaleChoice,
    #[arg(long, default_value_t = 0)]
    divider: usize,
    #[arg(long)]
    pretty: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SigmaArgs {
    #[arg(long = "mod")]
    modulus: u64,
    #[arg(long)]
    ordering: Option<String>,
    #[arg(long = "x0-list", value_delimiter = ',', required = true)]
    x0_list: Vec<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    size: u64,
    #[arg(long, value_enum, default_value = "count")]
    interpretation: InterpChoice,
    #[arg(long)]
    pretty: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct RunManifest {
    subcommand: String,
    parameters: BTreeMap<String, Value>,
    argv: Vec<String>,
    convention: Value,
    seed: Option<u64>,
    prng: String,
    artifacts: Vec<String>,
}

fn main() -> ExitCode {
    init_threads();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(cli.command, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(feature = "parallel")]
fn init_threads() {
    if let Some(n) = std::env::var("PRIME_IFS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn init_threads() {}

fn run(command: Command, argv: &[String]) -> Result<(), String> {
    match command {
        Command::Gasket(a) => cmd_gasket(a, argv),
        Command::Drive(a) => cmd_drive(a, argv),
        Command::Rotdist(a) => cmd_derived(a, argv, "rotdist"),
        Command::Absdiff(a) => cmd_derived(a, argv, "absdiff"),
        Command::Twins(a) => cmd_twins(a, argv),
        Command::Tuple(a) => cmd_tuple(a, argv),
        Command::SigmaScan(a) => cmd_sigma_scan(a, argv),
        Command::Replay(a) => cmd_replay(a),
    }
}

const MODULUS_GUARD: &str = "Please choose modulus 5, 8, 10, or 12";

fn check_modulus(q: u64) -> Result<(), String> {
    if matches!(q, 5 | 8 | 10 | 12) {
        Ok(())
    } else {
        Err(MODULUS_GUARD.into())
    }
}

fn parse_ordering(modulus: u64, text: &str) -> Result<ResidueAlphabet, String> {
    let classes: Vec<u64> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| format!("bad ordering element {t:?}")))
        .collect::<Result<_, _>>()?;
    let classes: [u64; 4] = classes
        .try_into()
        .map_err(|v: Vec<u64>| format!("ordering needs 4 classes, got {}", v.len()))?;
    ResidueAlphabet::new(modulus, classes).map_err(|e| e.to_string())
}

/// Resolve `--ordering` to one alphabet, or fall back to the canonical
/// orderings of the modulus (optionally without the third).
fn resolve_alphabets(
    modulus: u64,
    ordering: &Option<String>,
    skip_third: bool,
) -> Result<Vec<ResidueAlphabet>, String> {
    check_modulus(modulus)?;
    if let Some(text) = ordering {
        return Ok(vec![parse_ordering(modulus, text)?]);
    }
    let mut orderings = canonical_orderings(modulus).map_err(|e| e.to_string())?;
    if skip_third {
        orderings.truncate(2);
    }
    orderings
        .into_iter()
        .map(|classes| ResidueAlphabet::new(modulus, classes).map_err(|e| e.to_string()))
        .collect()
}

fn single_alphabet(modulus: u64, ordering: &Option<String>) -> Result<ResidueAlphabet, String> {
    Ok(resolve_alphabets(modulus, ordering, false)?.remove(0))
}

fn ordering_tag(a: &ResidueAlphabet) -> String {
    a.classes().iter().map(|c| c.to_string()).collect::<Vec<_>>().join("-")
}

fn write_file(dir: &Path, name: &str, bytes: &[u8], artifacts: &mut Vec<String>) -> Result<(), String> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| format!("writing {}: {e}", path.display()))?;
    artifacts.push(name.to_string());
    Ok(())
}

fn write_json(dir: &Path, name: &str, value: &Value, artifacts: &mut Vec<String>) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    write_file(dir, name, text.as_bytes(), artifacts)
}

fn render(
    points: &[Point],
    size: usize,
    scale: ScaleChoice,
    divider: usize,
) -> Result<Vec<u8>, String> {
    let grid = accumulate(points, size).map_err(|e| e.to_string())?;
    let mut pgm = render_pgm(&grid, scale.into());
    apply_gridlines(&mut pgm, size, divider);
    Ok(pgm)
}

fn finish(
    out: &Path,
    subcommand: &str,
    parameters: BTreeMap<String, Value>,
    argv: &[String],
    convention: RangeConvention,
    seed: Option<u64>,
    artifacts: Vec<String>,
) -> Result<(), String> {
    let manifest = RunManifest {
        subcommand: subcommand.to_string(),
        parameters,
        argv: argv.to_vec(),
        convention: serde_json::to_value(convention).map_err(|e| e.to_string())?,
        seed,
        prng: PRNG_ALGORITHM.to_string(),
        artifacts,
    };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| e.to_string())?;
    text.push('\n');
    let path = out.join("manifest.json");
    fs::write(&path, text).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn ensure_dir(out: &Path) -> Result<(), String> {
    fs::create_dir_all(out).map_err(|e| format!("creating {}: {e}", out.display()))
}

fn print_table(title: &str, table: &FrequencyTable) {
    println!("{title} (total {})", table.total());
    for (key, count) in table.sorted_entries().into_iter().rev() {
        let pct = 100.0 * count as f64 / table.total().max(1) as f64;
        println!("  {:>8}  {:>12}  {:6.3}%", key.label(), count, pct);
    }
}

fn cmd_gasket(a: GasketArgs, argv: &[String]) -> Result<(), String> {
    ensure_dir(&a.out)?;
    let (sys, name): (IfsSystem, _) = match a.system {
        SystemChoice::Gasket => (gasket_system(), "gasket"),
        SystemChoice::Square => (standard_square_system(), "square"),
    };
    let points = chaos_game(&sys, a.points, a.seed, default_start());
    let mut artifacts = Vec::new();
    write_file(&a.out, "render.pgm", &render(&points, a.size, a.scale, a.divider)?, &mut artifacts)?;
    if a.points_csv {
        write_file(&a.out, "points.csv", write_points_csv(&points).as_bytes(), &mut artifacts)?;
    }
    let parameters = BTreeMap::from([
        ("system".into(), json!(name)),
        ("points".into(), json!(a.points)),
        ("size".into(), json!(a.size)),
        ("divider".into(), json!(a.divider)),
        ("points_csv".into(), json!(a.points_csv)),
    ]);
    finish(&a.out, "gasket", parameters, argv, RangeConvention::Unspecified, Some(a.seed), artifacts)
}

fn cmd_drive(a: DriveArgs, argv: &[String]) -> Result<(), String> {
    ensure_dir(&a.out)?;
    let query = a.stream.query()?;
    let alphabets = resolve_alphabets(a.stream.modulus, &a.stream.ordering, a.skip_third)?;
    let values = primes(&query).map_err(|e| e.to_string())?;
    let sys = standard_square_system();
    let mut artifacts = Vec::new();
    for alphabet in &alphabets {
        let tag = ordering_tag(alphabet);
        let stream = symbolize(&values, alphabet).map_err(|e| e.to_string())?;
        let orbit = driven_orbit(&stream, &sys, default_start()).map_err(|e| e.to_string())?;
        let census = kgram_frequencies(&stream, a.depth)
            .map_err(|e| e.to_string())?
            .with_convention(query.convention());
        write_file(
            &a.out,
            &format!("drive_{tag}.pgm"),
            &render(&orbit, a.size, a.scale, a.divider)?,
            &mut artifacts,
        )?;
        write_json(&a.out, &format!("census_{tag}.json"), &census.to_json(), &mut artifacts)?;
        if a.points_csv {
            write_file(
                &a.out,
                &format!("points_{tag}.csv"),
                write_points_csv(&orbit).as_bytes(),
                &mut artifacts,
            )?;
        }
        if a.pretty {
            print_table(&format!("depth-{} census, ordering {tag}", a.depth), &census);
        }
    }
    let parameters = BTreeMap::from([
        ("mod".into(), json!(a.stream.modulus)),
        (
            "orderings".into(),
            json!(alphabets.iter().map(ordering_tag).collect::<Vec<_>>()),
        ),
        ("range".into(), a.stream.range_json()),
        ("depth".into(), json!(a.depth)),
        ("size".into(), json!(a.size)),
        ("divider".into(), json!(a.divider)),
    ]);
    finish(&a.out, "drive", parameters, argv, query.convention(), None, artifacts)
}

fn cmd_derived(a: DerivedArgs, argv: &[String], name: &str) -> Result<(), String> {
    ensure_dir(&a.out)?;
    let query = a.stream.query()?;
    let alphabet = single_alphabet(a.stream.modulus, &a.stream.ordering)?;
    let values = primes(&query).map_err(|e| e.to_string())?;
    let stream = symbolize(&values, &alphabet).map_err(|e| e.to_string())?;
    let derived: SymbolStream = match name {
        "rotdist" => rot_distance_stream(&stream),
        _ => abs_diff_stream(&stream),
    }
    .map_err(|e| e.to_string())?;
    let orbit = driven_orbit(&derived, &standard_square_system(), default_start())
        .map_err(|e| e.to_string())?;
    let census = kgram_frequencies(&derived, a.depth)
        .map_err(|e| e.to_string())?
        .with_convention(query.convention());
    let distances = distance_frequencies(&stream)
        .map_err(|e| e.to_string())?
        .with_convention(query.convention());
    let mut artifacts = Vec::new();
    write_file(
        &a.out,
        &format!("{name}.pgm"),
        &render(&orbit, a.size, a.scale, a.divider)?,
        &mut artifacts,
    )?;
    write_json(&a.out, "census.json", &census.to_json(), &mut artifacts)?;
    write_json(&a.out, "distances.json", &distances.to_json(), &mut artifacts)?;
    if a.points_csv {
        write_file(&a.out, "points.csv", write_points_csv(&orbit).as_bytes(), &mut artifacts)?;
    }
    if a.pretty {
        print_table(&format!("depth-{} {name} census", a.depth), &census);
        print_table("rotational distances", &distances);
    }
    let parameters = BTreeMap::from([
        ("mod".into(), json!(a.stream.modulus)),
        ("ordering".into(), json!(ordering_tag(&alphabet))),
        ("range".into(), a.stream.range_json()),
        ("depth".into(), json!(a.depth)),
        ("size".into(), json!(a.size)),
        ("divider".into(), json!(a.divider)),
    ]);
    finish(&a.out, name, parameters, argv, query.convention(), None, artifacts)
}

fn cmd_twins(a: TwinsArgs, argv: &[String]) -> Result<(), String> {
    ensure_dir(&a.out)?;
    let query = a.stream.query()?;
    let alphabet = single_alphabet(a.stream.modulus, &a.stream.ordering)?;
    let pairs = twin_pairs(&query).map_err(|e| e.to_string())?;
    let census = twin_census(&pairs, &alphabet, query.convention()).map_err(|e| e.to_string())?;

    // Raster of the concatenated stream, unmapped pairs dropped.
    let concatenated: Vec<u64> = pairs
        .iter()
        .filter(|&&(p, p2)| alphabet.symbol_of(p).is_some() && alphabet.symbol_of(p2).is_some())
        .flat_map(|&(p, p2)| [p, p2])
        .collect();
    let stream = symbolize(&concatenated, &alphabet).map_err(|e| e.to_string())?;
    let orbit = driven_orbit(&stream, &standard_square_system(), default_start())
        .map_err(|e| e.to_string())?;

    let mut artifacts = Vec::new();
    write_file(
        &a.out,
        "twins.pgm",
        &render(&orbit, a.size, a.scale, a.divider)?,
        &mut artifacts,
    )?;
    let report = json!({
        "concatenated": census.concatenated.to_json(),
        "classes": census.classes.to_json(),
        "forbidden": census.forbidden,
    });
    write_json(&a.out, "twin_census.json", &report, &mut artifacts)?;
    if a.pretty {
        print_table("concatenated pairs", &census.concatenated);
        print_table("twin classes", &census.classes);
        println!("forbidden pairs: {:?}", census.forbidden);
    }
    let parameters = BTreeMap::from([
        ("mod".into(), json!(a.stream.modulus)),
        ("ordering".into(), json!(ordering_tag(&alphabet))),
        ("range".into(), a.stream.range_json()),
        ("size".into(), json!(a.size)),
        ("divider".into(), json!(a.divider)),
    ]);
    finish(&a.out, "twins", parameters, argv, query.convention(), None, artifacts)
}

fn cmd_tuple(a: TupleArgs, argv: &[String]) -> Result<(), String> {
    if a.offset == 0 {
        return Err("--offset must be at least 1".into());
    }
    ensure_dir(&a.out)?;
    let query = a.stream.query()?;
    let alphabet = single_alphabet(a.stream.modulus, &a.stream.ordering)?;
    let centers = tuple_centers(&TupleCenterQuery { offset: a.offset, query })
        .map_err(|e| e.to_string())?;
    let census = tuple_center_census(&centers, &alphabet, a.depth, query.convention())
        .map_err(|e| e.to_string())?;
    let stream = symbolize(&centers, &alphabet).map_err(|e| e.to_string())?;
    let orbit = driven_orbit(&stream, &standard_square_system(), default_start())
        .map_err(|e| e.to_string())?;

    let mut artifacts = Vec::new();
    write_file(
        &a.out,
        "tuple.pgm",
        &render(&orbit, a.size, a.scale, a.divider)?,
        &mut artifacts,
    )?;
    write_json(&a.out, "tuple_census.json", &census.to_json(), &mut artifacts)?;
    if a.pretty {
        print_table(&format!("offset-{} length-{} patterns", a.offset, a.depth), &census);
        println!("top 4:");
        for (key, count) in census.sorted_entries().into_iter().rev().take(4) {
            println!("  {}  {}", key.label(), count);
        }
    }
    let parameters = BTreeMap::from([
        ("mod".into(), json!(a.stream.modulus)),
        ("ordering".into(), json!(ordering_tag(&alphabet))),
        ("range".into(), a.stream.range_json()),
        ("offset".into(), json!(a.offset)),
        ("depth".into(), json!(a.depth)),
        ("size".into(), json!(a.size)),
        ("divider".into(), json!(a.divider)),
    ]);
    finish(&a.out, "tuple", parameters, argv, query.convention(), None, artifacts)
}

fn cmd_sigma_scan(a: SigmaArgs, argv: &[String]) -> Result<(), String> {
    ensure_dir(&a.out)?;
    let alphabet = single_alphabet(a.modulus, &a.ordering)?;
    let interpretations: &[SigmaInterpretation] = match a.interpretation {
        InterpChoice::Window => &[SigmaInterpretation::WindowWidth],
        InterpChoice::Count => &[SigmaInterpretation::PrimeCount],
        InterpChoice::Both => &[SigmaInterpretation::WindowWidth, SigmaInterpretation::PrimeCount],
    };
    let mut rows = Vec::new();
    for &interp in interpretations {
        rows.extend(sigma_scan(&a.x0_list, a.size, &alphabet, interp).map_err(|e| e.to_string())?);
    }
    if a.pretty {
        for row in &rows {
            println!("x0 = {:>14}  sigma = {:>10.1}  ({:?})", row.x0, row.sigma, row.interpretation);
        }
    }
    let mut artifacts = Vec::new();
    write_json(
        &a.out,
        "sigma_scan.json",
        &serde_json::to_value(&rows).map_err(|e| e.to_string())?,
        &mut artifacts,
    )?;
    let parameters = BTreeMap::from([
        ("mod".into(), json!(a.modulus)),
        ("ordering".into(), json!(ordering_tag(&alphabet))),
        ("x0_list".into(), json!(a.x0_list)),
        ("size".into(), json!(a.size)),
    ]);
    finish(&a.out, "sigma-scan", parameters, argv, RangeConvention::Unspecified, None, artifacts)
}

fn cmd_replay(a: ReplayArgs) -> Result<(), String> {
    let text = fs::read_to_string(&a.manifest)
        .map_err(|e| format!("reading {}: {e}", a.manifest.display()))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    if manifest.subcommand == "replay" {
        return Err("manifest records a replay; nothing to re-run".into());
    }
    let mut full = vec!["prime-ifs".to_string()];
    full.extend(manifest.argv.iter().cloned());
    let cli = Cli::try_parse_from(&full).map_err(|e| e.to_string())?;
    run(cli.command, &manifest.argv)
}
