use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use brauer_cone::brauer::{BrauerClass, OrbitReport};
use brauer_cone::config::{parse_config, parse_point};
use brauer_cone::localarith::{is_prime, legendre};
use brauer_cone::quadric::{
    count_points_formula, diagonalize, enumerate_points_fp, fano_affine_piece, plane_branch,
    tangent_section_points, ConePoint, GaloisField, QuadricForm, DEFAULT_PRECISION,
};
use brauer_cone::search::{search_integral_points, verify_theorem_with_base_points, SearchCensus, TheoremReport};
use brauer_cone::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Height used to find base points when none are supplied.
const POOL_HEIGHT: i128 = 40;

#[derive(Parser, Debug)]
#[command(name = "brauer-cone", version, about = "Brauer–Manin obstruction on the punctured cone over a quadric surface")]
struct Cli {
    /// Config file (`diag = [...]` or `matrix = [[...]]`), or four
    /// comma-separated diagonal entries. Defaults to the 1, 47, -103, -82297 quadric.
    #[arg(long, global = true)]
    quadric: Option<String>,

    /// Base point `x0,x1,x2,x3`; repeat to extend the pool.
    #[arg(long = "base-point", global = true)]
    base_points: Vec<String>,

    /// p-adic precision for Hensel lifts.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare enumerated point counts with the closed formula.
    Count {
        /// A prime or an inclusive range `a..b`.
        #[arg(long, default_value = "3..47")]
        prime: String,
    },
    /// Invariants of all scalar multiples of a point mod p.
    Orbits {
        /// The tuple `x0,x1,x2,x3` mod p.
        point: String,
        #[arg(long, default_value_t = 17)]
        prime: u64,
    },
    /// Coprime integral points up to a height, with their census mod p.
    Search {
        #[arg(long, default_value_t = 500)]
        height: i128,
        #[arg(long, default_value_t = 17)]
        prime: u64,
    },
    /// Full obstruction check against the solutions up to a height.
    Verify {
        #[arg(long, default_value_t = 500)]
        height: i128,
        #[arg(long, default_value_t = 17)]
        prime: u64,
    },
    /// Lines on the quadric and the tangent-plane section mod p.
    Lines {
        #[arg(long)]
        prime: u64,
    },
}

struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

struct Setup {
    form: QuadricForm,
    base_points: Vec<ConePoint>,
}

fn load(cli: &Cli) -> Result<Setup, Failure> {
    let (form, mut base_points) = match &cli.quadric {
        None => (QuadricForm::default_instance(), Vec::new()),
        Some(spec) => {
            if Path::new(spec).is_file() {
                let text = std::fs::read_to_string(spec).map_err(|e| Failure(format!("cannot read {spec}: {e}")))?;
                let config = parse_config(&text)?;
                (config.form, config.base_points)
            } else {
                (QuadricForm::diagonal(parse_point(spec)?)?, Vec::new())
            }
        }
    };
    let mut flagged = Vec::new();
    for bp in &cli.base_points {
        flagged.push(ConePoint::new(parse_point(bp)?, &form)?);
    }
    flagged.append(&mut base_points);
    Ok(Setup { form, base_points: flagged })
}

/// The supplied base points, followed by the search output up to
/// [`POOL_HEIGHT`] ordered by height.
fn brauer_class(setup: &Setup) -> Result<BrauerClass, Failure> {
    let mut pool = setup.base_points.clone();
    let mut found = search_integral_points(&setup.form, POOL_HEIGHT)?;
    found.sort_by_key(|p| (p.height(), std::cmp::Reverse(*p)));
    pool.extend(found);
    let base = *pool.first().ok_or(Error::NoBasePoint(POOL_HEIGHT))?;
    Ok(BrauerClass::new(&setup.form, base)?.with_pool(pool.into_iter().skip(1))?)
}

fn parse_range(s: &str) -> Result<(u64, u64), Failure> {
    let bad = || Failure(format!("invalid prime range {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let p = s.trim().parse().map_err(|_| bad())?;
            (p, p)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn render(format: Format, json: &Value, tsv: String) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(json).expect("json value") + "\n",
        Format::Tsv => tsv,
    }
}

fn cmd_count(setup: &Setup, range: &str, format: Format) -> Result<(String, bool), Failure> {
    let (lo, hi) = parse_range(range)?;
    let mut rows = Vec::new();
    let mut tsv = String::from("prime\tenumerated\tformula\tstatus\n");
    let mut all_match = true;
    for p in (lo.max(3)..=hi).filter(|&p| is_prime(p)) {
        let enumerated = enumerate_points_fp(&setup.form, p)?.len() as u64;
        let (formula, status) = match count_points_formula(&setup.form, p) {
            Ok(n) if n == enumerated => (Some(n), "ok"),
            Ok(n) => {
                all_match = false;
                (Some(n), "mismatch")
            }
            Err(Error::SingularReduction { .. }) => (None, "singular reduction, formula skipped"),
            Err(e) => return Err(e.into()),
        };
        let formula_text = formula.map_or("-".to_string(), |n| n.to_string());
        let _ = writeln!(tsv, "{p}\t{enumerated}\t{formula_text}\t{status}");
        rows.push(json!({"prime": p, "enumerated": enumerated, "formula": formula, "status": status}));
    }
    let value = json!({"rows": rows, "all_match": all_match});
    Ok((render(format, &value, tsv), all_match))
}

fn orbit_tsv(report: &OrbitReport) -> String {
    let mut header = vec!["base".to_string(), "prime".to_string()];
    header.extend((1..report.prime).map(|l| l.to_string()));
    header.extend(["zero_count".to_string(), "half_count".to_string()]);
    let [a, b, c, d] = report.base;
    let mut row = vec![format!("({a},{b},{c},{d})"), report.prime.to_string()];
    row.extend(report.table.iter().map(|i| i.to_string()));
    row.extend([report.zero_count.to_string(), report.half_count.to_string()]);
    format!("{}\n{}\n", header.join("\t"), row.join("\t"))
}

fn cmd_orbits(setup: &Setup, point: &str, p: u64, precision: u32, format: Format) -> Result<String, Failure> {
    let coords = parse_point(point)?;
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p).into());
    }
    let residues = coords.map(|c| c.rem_euclid(p as i128) as u64);
    let class = brauer_class(setup)?;
    let report = class.orbit_report_with_precision(&residues, p, precision)?;
    let value = serde_json::to_value(&report).expect("serializable");
    Ok(render(format, &value, orbit_tsv(&report)))
}

fn cmd_search(setup: &Setup, height: i128, p: u64, format: Format) -> Result<String, Failure> {
    let census = SearchCensus::run(&setup.form, height, p)?;
    let mut tsv = String::from("x0\tx1\tx2\tx3\treduction\n");
    for s in &census.solutions {
        let [a, b, c, d] = *s.coords();
        let [r0, r1, r2, r3] = s.reduce(p);
        let _ = writeln!(tsv, "{a}\t{b}\t{c}\t{d}\t({r0},{r1},{r2},{r3})");
    }
    let value = serde_json::to_value(&census).expect("serializable");
    Ok(render(format, &value, tsv))
}

fn cmd_verify(setup: &Setup, height: i128, p: u64, format: Format) -> Result<(String, bool), Failure> {
    let report: TheoremReport = verify_theorem_with_base_points(&setup.form, height, p, &setup.base_points)?;
    let ok = report.passed() && report.scalar_law_holds;
    let tsv = format!(
        "H\tcensus_mod\tsolutions\tobstruction_violations\tinvariant_zero_classes\thit\tcoverage_fraction\torbit_split_holds\tscalar_law_holds\tpassed\n{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{}\t{}\n",
        report.census.height_bound,
        report.census.prime,
        report.census.solutions.len(),
        report.obstruction_violations.len(),
        report.coverage.invariant_zero_classes,
        report.coverage.hit,
        report.coverage.fraction(),
        report.orbit_split_holds,
        report.scalar_law_holds,
        report.passed(),
    );
    let value = serde_json::to_value(&report).expect("serializable");
    Ok((render(format, &value, tsv), ok))
}

fn cmd_lines(setup: &Setup, p: u64, format: Format) -> Result<(String, bool), Failure> {
    let diagonal = if setup.form.is_diagonal() {
        setup.form.clone()
    } else {
        diagonalize(&setup.form)?.form
    };
    let rational = fano_affine_piece(&diagonal, &GaloisField::prime(p)?)?;
    let ext_field = GaloisField::quadratic_extension(p)?;
    let extension = fano_affine_piece(&diagonal, &ext_field)?;
    let mut on_planes = true;
    for pt in &extension {
        on_planes &= plane_branch(&diagonal, &ext_field, pt)?.is_some();
    }
    let class = brauer_class(setup)?;
    let base = *class.base_point();
    let section = tangent_section_points(&base, &setup.form, p)?.len() as u64;
    let square = legendre(setup.form.determinant(), p)? == 1;
    let expected = if square { 2 * p + 1 } else { 1 };
    let ok = on_planes && section == expected && (square || rational.is_empty());
    let value = json!({
        "prime": p,
        "delta_square": square,
        "rational_lines": rational.len(),
        "extension_lines": extension.len(),
        "plane_condition_holds": on_planes,
        "tangent_section": {"base_point": base, "points": section, "expected": expected},
    });
    let [a, b, c, d] = *base.coords();
    let tsv = format!(
        "prime\tdelta_square\trational_lines\textension_lines\tplane_condition_holds\tbase_point\tsection_points\tsection_expected\n{p}\t{square}\t{}\t{}\t{on_planes}\t({a},{b},{c},{d})\t{section}\t{expected}\n",
        rational.len(),
        extension.len(),
    );
    Ok((render(format, &value, tsv), ok))
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let setup = load(cli)?;
    match &cli.command {
        Command::Count { prime } => cmd_count(&setup, prime, cli.format),
        Command::Orbits { point, prime } => Ok((cmd_orbits(&setup, point, *prime, cli.precision, cli.format)?, true)),
        Command::Search { height, prime } => Ok((cmd_search(&setup, *height, *prime, cli.format)?, true)),
        Command::Verify { height, prime } => cmd_verify(&setup, *height, *prime, cli.format),
        Command::Lines { prime } => cmd_lines(&setup, *prime, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
