//! `infogeo`: Fisher-Rao information-geometry toolbox.
//!
//! CSV in, JSON (or CSV for geodesic tables) out. Exit codes: 0 success,
//! 2 malformed input, 3 numerical failure. Diagnostics go to stderr only;
//! set `INFOGEO_LOG` to any nonempty value for timing output.

mod family;

use clap::{Args, Parser, Subcommand};
use family::Family;
use infogeo::error::Error;
use infogeo::geometry::manifold::{metric_norm, EuclideanSpace};
use infogeo::learning::{knn_classify, riemannian_kmeans, LabeledDataset};
use infogeo::{GeodesicEnd, GeodesicSolver};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "infogeo",
    version,
    about = "Fisher-Rao geometry of probability-distribution families: \
             distances, geodesics, curvature, sampling, clustering and \
             classification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct FamilyArgs {
    /// Distribution family: bernoulli | binomial | poisson | exponential |
    /// geometric | categorical | multinomial | normal | normal-diagonal |
    /// normal-centered | gamma | beta | dirichlet
    #[arg(long)]
    family: String,
    /// Number of trials (binomial, multinomial)
    #[arg(long)]
    n: Option<u32>,
    /// Dimension (dirichlet, normal-diagonal, normal-centered)
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Pairwise Fisher-Rao distances (all pairs of a CSV file, or one
    /// inline pair)
    Dist {
        #[command(flatten)]
        fam: FamilyArgs,
        /// CSV file of points, one per row
        #[arg(long)]
        points: Option<PathBuf>,
        /// First inline point, comma-separated coordinates
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        /// Second inline point
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        /// Use the legacy half-plane distance for the normal family
        #[arg(long)]
        legacy_halfplane: bool,
        /// Plain Euclidean coordinate distance instead of Fisher-Rao
        #[arg(long)]
        euclidean: bool,
    },
    /// Discretized geodesic as CSV rows (t, coordinates, speed); with
    /// --sphere/--rays, a geodesic sphere around --a instead
    Geodesic {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// End point (omit in sphere mode)
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        /// Number of sample intervals (emits samples+1 rows per curve)
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Geodesic-sphere radius
        #[arg(long)]
        sphere: Option<f64>,
        /// Number of rays of the geodesic sphere
        #[arg(long)]
        rays: Option<usize>,
    },
    /// Sectional curvature at a point
    Curvature {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Fisher information metric matrix at a point
    Metric {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Draw observations from the distribution at a point
    Sample {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Number of draws
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Density / probability mass at observation values
    Pdf {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Observation to evaluate (repeatable; comma-separated for
        /// vector-valued observations)
        #[arg(long = "at", required = true, allow_hyphen_values = true)]
        at: Vec<String>,
    },
    /// Riemannian K-means clustering of a CSV point file
    Kmeans {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        /// Cluster with plain Euclidean coordinate distance instead
        #[arg(long)]
        euclidean: bool,
    },
    /// K-nearest-neighbor classification of a test CSV against a labeled
    /// training CSV
    Knn {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Training CSV with a `label` column (header row required)
        #[arg(long)]
        train: PathBuf,
        /// Test CSV of points to classify
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        k: usize,
        /// Classify with plain Euclidean coordinate distance instead
        #[arg(long)]
        euclidean: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let start = std::time::Instant::now();
    let result = run(cli);
    if std::env::var("INFOGEO_LOG").map(|v| !v.is_empty()).unwrap_or(false) {
        eprintln!("infogeo: finished in {:?}", start.elapsed());
    }
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

/// 2 for malformed input, 3 for numerical failures.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_)
        | Error::DimensionMismatch { .. }
        | Error::NotTangent { .. }
        | Error::FamilyMismatch(_)
        | Error::Invalid(_) => 2,
        _ => 3,
    }
}

fn parse_point(s: &str) -> Result<DVector<f64>, Error> {
    let coords: Result<Vec<f64>, Error> = s
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("cannot parse coordinate '{}'", c.trim())))
        })
        .collect();
    let coords = coords?;
    if coords.is_empty() {
        return Err(Error::Domain("empty point".into()));
    }
    Ok(DVector::from_vec(coords))
}

/// Reads a CSV point file: one point per row. A header row is detected by
/// non-numeric fields; a header column named `label` carries class labels.
fn read_points(path: &PathBuf) -> Result<(Vec<DVector<f64>>, Option<Vec<usize>>), Error> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Domain(format!("malformed CSV: {e}")))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push(record.iter().map(|f| f.to_string()).collect());
    }
    if rows.is_empty() {
        return Err(Error::Domain(format!("{} contains no points", path.display())));
    }
    // header row iff the first row has a non-numeric field
    let has_header = rows[0].iter().any(|f| f.parse::<f64>().is_err());
    let label_col = if has_header {
        rows[0].iter().position(|h| h.eq_ignore_ascii_case("label"))
    } else {
        None
    };
    let data = if has_header { &rows[1..] } else { &rows[..] };
    if data.is_empty() {
        return Err(Error::Domain(format!("{} contains no points", path.display())));
    }
    let width = rows[if has_header { 1 } else { 0 }].len();
    let mut points = Vec::with_capacity(data.len());
    let mut labels = label_col.map(|_| Vec::with_capacity(data.len()));
    for (r, row) in data.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Domain(format!(
                "row {} has {} fields, expected {width}",
                r + 1,
                row.len()
            )));
        }
        let mut coords = Vec::with_capacity(width);
        for (c, field) in row.iter().enumerate() {
            if Some(c) == label_col {
                let label = field.parse::<usize>().map_err(|_| {
                    Error::Domain(format!("row {}: label '{field}' is not an integer", r + 1))
                })?;
                labels.as_mut().unwrap().push(label);
            } else {
                let x = field.parse::<f64>().map_err(|_| {
                    Error::Domain(format!("row {}: cannot parse coordinate '{field}'", r + 1))
                })?;
                coords.push(x);
            }
        }
        points.push(DVector::from_vec(coords));
    }
    Ok((points, labels))
}

fn build_family(fam: &FamilyArgs, width: usize) -> Result<Family, Error> {
    Family::build(&fam.family, fam.n, fam.dim, width)
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON serialization"));
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Dist { fam, points, a, b, legacy_halfplane, euclidean } => {
            let pts: Vec<DVector<f64>> = match (&points, &a, &b) {
                (Some(path), None, None) => read_points(path)?.0,
                (None, Some(a), Some(b)) => vec![parse_point(a)?, parse_point(b)?],
                _ => {
                    return Err(Error::Domain(
                        "provide either --points FILE or both --a and --b".into(),
                    ))
                }
            };
            if pts.len() < 2 {
                return Err(Error::Domain("need at least two points".into()));
            }
            let family = build_family(&fam, pts[0].len())?;
            let solver = GeodesicSolver::default();
            let mut pairs = Vec::new();
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    let d = if euclidean {
                        (&pts[i] - &pts[j]).norm()
                    } else {
                        match family.dist(&pts[i], &pts[j], &solver, legacy_halfplane) {
                            Ok(d) => d,
                            Err(e) => {
                                eprintln!("error: distance for pair ({i}, {j}) failed: {e}");
                                std::process::exit(exit_code(&e));
                            }
                        }
                    };
                    pairs.push(json!({ "i": i, "j": j, "distance": d }));
                }
            }
            print_json(&json!({ "family": fam.family, "pairs": pairs }));
        }
        Cmd::Geodesic { fam, a, b, samples, sphere, rays } => {
            let start = parse_point(&a)?;
            let family = build_family(&fam, start.len())?;
            let manifold = family.manifold()?;
            let solver = GeodesicSolver::default();
            let x = family.to_internal(&start)?;
            if samples == 0 {
                return Err(Error::Domain("--samples must be positive".into()));
            }
            match (b, sphere, rays) {
                (Some(b), None, None) => {
                    let y = family.to_internal(&parse_point(&b)?)?;
                    let path = solver.geodesic(manifold, &x, GeodesicEnd::Point(y), samples)?;
                    let mut out = String::new();
                    let d = start.len();
                    out.push('t');
                    for i in 1..=d {
                        out.push_str(&format!(",x{i}"));
                    }
                    out.push_str(",speed\n");
                    for s in &path.samples {
                        let speed = metric_norm(manifold, &s.point, &s.velocity)?;
                        out.push_str(&format!("{}", s.t));
                        for c in family.from_internal(&s.point).iter() {
                            out.push_str(&format!(",{c}"));
                        }
                        out.push_str(&format!(",{speed}\n"));
                    }
                    print!("{out}");
                }
                (None, Some(radius), Some(rays)) => {
                    if manifold.dim() != 2 {
                        return Err(Error::Domain(
                            "--sphere/--rays requires a two-parameter family".into(),
                        ));
                    }
                    if rays == 0 || !(radius > 0.0) {
                        return Err(Error::Domain("need --rays >= 1 and --sphere > 0".into()));
                    }
                    let mut out = String::from("ray,t,x1,x2,speed\n");
                    for ray in 0..rays {
                        let angle = 2.0 * std::f64::consts::PI * ray as f64 / rays as f64;
                        let u = DVector::from_vec(vec![angle.cos(), angle.sin()]);
                        let norm = metric_norm(manifold, &x, &u)?;
                        let v = u * (radius / norm);
                        let path =
                            solver.geodesic(manifold, &x, GeodesicEnd::Tangent(v), samples)?;
                        for s in &path.samples {
                            let speed = metric_norm(manifold, &s.point, &s.velocity)?;
                            out.push_str(&format!("{ray},{}", s.t));
                            for c in family.from_internal(&s.point).iter() {
                                out.push_str(&format!(",{c}"));
                            }
                            out.push_str(&format!(",{speed}\n"));
                        }
                    }
                    print!("{out}");
                }
                _ => {
                    return Err(Error::Domain(
                        "provide either --b, or both --sphere and --rays".into(),
                    ))
                }
            }
        }
        Cmd::Curvature { fam, point } => {
            let p = parse_point(&point)?;
            let family = build_family(&fam, p.len())?;
            let k = family.curvature(&p, &GeodesicSolver::default())?;
            print_json(&json!({
                "family": fam.family,
                "point": p.as_slice(),
                "sectional_curvature": k,
            }));
        }
        Cmd::Metric { fam, point } => {
            let p = parse_point(&point)?;
            let family = build_family(&fam, p.len())?;
            let g = family.manifold()?.metric_matrix(&family.to_internal(&p)?)?;
            let rows: Vec<Vec<f64>> =
                g.row_iter().map(|r| r.iter().copied().collect()).collect();
            print_json(&json!({
                "family": fam.family,
                "point": p.as_slice(),
                "metric": rows,
            }));
        }
        Cmd::Sample { fam, point, samples, seed } => {
            let p = parse_point(&point)?;
            let family = build_family(&fam, p.len())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let draws = family.sample(&p, samples, &mut rng)?;
            print_json(&json!({
                "family": fam.family,
                "point": p.as_slice(),
                "seed": seed,
                "samples": draws,
            }));
        }
        Cmd::Pdf { fam, point, at } => {
            let p = parse_point(&point)?;
            let family = build_family(&fam, p.len())?;
            let mut values = Vec::new();
            for spec in &at {
                let x = parse_point(spec)?;
                let density = family.pdf(&p, x.as_slice())?;
                values.push(json!({ "x": x.as_slice(), "pdf": density }));
            }
            print_json(&json!({
                "family": fam.family,
                "point": p.as_slice(),
                "values": values,
            }));
        }
        Cmd::Kmeans { fam, points, k, seed, max_iter, euclidean } => {
            let (raw, _) = read_points(&points)?;
            let family = build_family(&fam, raw[0].len())?;
            let solver = GeodesicSolver::fast();
            let result = if euclidean {
                let manifold = EuclideanSpace { dim: raw[0].len() };
                let ds = LabeledDataset::new(raw, None)?;
                riemannian_kmeans(&ds, &manifold, &solver, k, seed, max_iter)?
            } else {
                let internal: Result<Vec<_>, Error> =
                    raw.iter().map(|p| family.to_internal(p)).collect();
                let ds = LabeledDataset::new(internal?, None)?;
                riemannian_kmeans(&ds, family.manifold()?, &solver, k, seed, max_iter)?
            };
            if result.reseeds > 0 {
                eprintln!("infogeo: reseeded {} empty cluster(s)", result.reseeds);
            }
            let centroids: Vec<Vec<f64>> = result
                .centroids
                .iter()
                .map(|c| {
                    if euclidean {
                        c.as_slice().to_vec()
                    } else {
                        family.from_internal(c).as_slice().to_vec()
                    }
                })
                .collect();
            print_json(&json!({
                "family": fam.family,
                "k": k,
                "seed": seed,
                "metric": if euclidean { "euclidean" } else { "fisher-rao" },
                "assignments": result.assignments,
                "centroids": centroids,
                "objective": result.objective,
                "iterations": result.iterations,
            }));
        }
        Cmd::Knn { fam, train, test, k, euclidean } => {
            let (train_raw, labels) = read_points(&train)?;
            let labels = labels.ok_or_else(|| {
                Error::Domain("training file needs a `label` column (with a header row)".into())
            })?;
            let (test_raw, _) = read_points(&test)?;
            if test_raw[0].len() != train_raw[0].len() {
                return Err(Error::DimensionMismatch {
                    expected: train_raw[0].len(),
                    got: test_raw[0].len(),
                });
            }
            let family = build_family(&fam, train_raw[0].len())?;
            let solver = GeodesicSolver::fast();
            let predictions = if euclidean {
                let manifold = EuclideanSpace { dim: train_raw[0].len() };
                let ds = LabeledDataset::new(train_raw, Some(labels))?;
                knn_classify(&ds, &test_raw, &manifold, &solver, k)?
            } else {
                let conv = |pts: &[DVector<f64>]| -> Result<Vec<DVector<f64>>, Error> {
                    pts.iter().map(|p| family.to_internal(p)).collect()
                };
                let ds = LabeledDataset::new(conv(&train_raw)?, Some(labels))?;
                knn_classify(&ds, &conv(&test_raw)?, family.manifold()?, &solver, k)?
            };
            print_json(&json!({
                "family": fam.family,
                "k": k,
                "metric": if euclidean { "euclidean" } else { "fisher-rao" },
                "predictions": predictions,
            }));
        }
    }
    Ok(())
}
