//! Command dispatch: argument parsing, certificate emission, exit codes.
//!
//! Every command reads JSON inputs, does its work through the core crate,
//! writes a certificate (or report) to stdout, and prints a one-line summary
//! to stderr.  `--output FILE` additionally writes the stdout bytes to a
//! file.  The exit codes are a stable contract:
//!
//! | code | meaning                                                    |
//! |------|------------------------------------------------------------|
//! | 0    | positive result: holds, found, true, counted, valid        |
//! | 2    | malformed input: flags, JSON, spec shape, or map table     |
//! | 3    | the supplied map is not continuous                         |
//! | 10   | negative result: fails, false, or invalid certificate      |
//! | 11   | the supplied map has no approximate fixed point            |
//! | 20   | undecided: a search budget was exhausted before the answer |

use crate::certificate::{self, map_to_table, Certificate, ResultPayload};
use crate::spec::{parse_map_pairs, ImageSpec};
use crate::suite::{self, Scale};
use afpp_core::constructive::{
    box_afp, product_afp, tree_afp, AfpFinder, ConstructiveError, ExhaustiveAfpFinder,
    TreeAfpFinder,
};
use afpp_core::maps::{self, DigitalMap};
use afpp_core::products::{np_assoc_check, np_equals_cu};
use afpp_core::search::enumerate_continuous_self_maps;
use afpp_core::{decide_afpp, DigitalImage, Point, SearchBudget, SearchError, TreeStructure};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DISCONTINUOUS: i32 = 3;
pub const EXIT_NEGATIVE: i32 = 10;
pub const EXIT_NO_AFP: i32 = 11;
pub const EXIT_UNDECIDED: i32 = 20;

#[derive(Parser)]
#[command(
    name = "afpp",
    version,
    about = "Fixed point checks for digital images, with verifiable certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether every continuous self-map of an image has an
    /// approximate fixed point.
    DecideAfpp {
        /// Image spec file (JSON).
        image: PathBuf,
        /// Abort after this many search assignments.
        #[arg(long)]
        budget_nodes: Option<u64>,
        /// Refuse images with more vertices than this.
        #[arg(long)]
        max_vertices: Option<usize>,
        /// Also write the certificate to a file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Find an approximate fixed point of a continuous self-map.
    FindAfp {
        /// Image spec file (JSON).
        image: PathBuf,
        /// Map file: a JSON array of [[domain-point],[image-point]] pairs.
        map: PathBuf,
        /// Which construction to use.
        #[arg(long, value_enum, default_value_t = FinderChoice::Auto)]
        finder: FinderChoice,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a property of a map between two images.
    Check {
        /// Which property to check.
        #[arg(value_enum)]
        what: CheckKind,
        /// Domain image spec file.
        image: PathBuf,
        /// Map file: a JSON array of [[domain-point],[image-point]] pairs.
        map: PathBuf,
        /// Codomain image spec file (defaults to the domain).
        #[arg(long)]
        codomain: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Count the continuous self-maps of an image.
    Enumerate {
        image: PathBuf,
        #[arg(long)]
        budget_nodes: Option<u64>,
        #[arg(long)]
        max_vertices: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare normal-product adjacency against the grid rules.
    #[command(subcommand)]
    NpCheck(NpForm),
    /// Run the acceptance battery and report per-criterion results.
    VerifySuite {
        #[arg(long, value_enum, default_value_t = ScaleChoice::Default)]
        scale: ScaleChoice,
        /// Seed for the randomized criteria.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Re-check every claim a certificate makes from its own payload.
    VerifyCertificate {
        /// Certificate file produced by another command.
        certificate: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum NpForm {
    /// Does the normal product of two grid images equal the combined grid
    /// rule on the product vertex set?
    Equals {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Does attaching a cube one axis at a time agree with attaching it in
    /// one step?
    Assoc {
        image: PathBuf,
        /// Cube dimension (number of attached axes).
        #[arg(long)]
        cube_dim: usize,
        /// Cube side length (each axis runs 0..=side).
        #[arg(long)]
        side: i64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FinderChoice {
    /// Pick by image shape: trees, then full-`u` boxes, then a plain scan.
    Auto,
    Tree,
    Box,
    Product,
    Search,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Continuity,
    Retraction,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleChoice {
    Default,
    Tiny,
}

/// What a successfully dispatched command hands back to `run`.
struct CmdOutput {
    /// Structured text for stdout (and `--output`).
    text: String,
    /// One human-readable line (or table) for stderr.
    summary: String,
    exit: i32,
    output: Option<PathBuf>,
}

/// A failed command: message for stderr plus the contracted exit code.
enum CmdError {
    Usage(String),
    Discontinuous(String),
    NoAfp(String),
    Undecided(String),
}

impl CmdError {
    fn exit(&self) -> i32 {
        match self {
            CmdError::Usage(_) => EXIT_USAGE,
            CmdError::Discontinuous(_) => EXIT_DISCONTINUOUS,
            CmdError::NoAfp(_) => EXIT_NO_AFP,
            CmdError::Undecided(_) => EXIT_UNDECIDED,
        }
    }

    fn message(&self) -> &str {
        match self {
            CmdError::Usage(m)
            | CmdError::Discontinuous(m)
            | CmdError::NoAfp(m)
            | CmdError::Undecided(m) => m,
        }
    }
}

/// Parses `args` (including the program name) and runs one command, writing
/// structured output to `stdout` and summaries or errors to `stderr`.
/// Returns the process exit code.  This is the whole CLI in library form, so
/// tests can run commands in-process and compare output bytes.
pub fn run(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version are not usage errors.
            return if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{err}");
                EXIT_OK
            } else {
                let _ = write!(stderr, "{err}");
                EXIT_USAGE
            };
        }
    };

    let result = match cli.command {
        Command::DecideAfpp {
            image,
            budget_nodes,
            max_vertices,
            output,
        } => cmd_decide(&image, budget_nodes, max_vertices, output),
        Command::FindAfp {
            image,
            map,
            finder,
            output,
        } => cmd_find(&image, &map, finder, output),
        Command::Check {
            what,
            image,
            map,
            codomain,
            output,
        } => cmd_check(what, &image, &map, codomain.as_deref(), output),
        Command::Enumerate {
            image,
            budget_nodes,
            max_vertices,
            output,
        } => cmd_enumerate(&image, budget_nodes, max_vertices, output),
        Command::NpCheck(form) => match form {
            NpForm::Equals {
                left,
                right,
                output,
            } => cmd_np_equals(&left, &right, output),
            NpForm::Assoc {
                image,
                cube_dim,
                side,
                output,
            } => cmd_np_assoc(&image, cube_dim, side, output),
        },
        Command::VerifySuite {
            scale,
            seed,
            output,
        } => cmd_verify_suite(scale, seed, output),
        Command::VerifyCertificate {
            certificate,
            output,
        } => cmd_verify_certificate(&certificate, output),
    };

    match result {
        Ok(out) => {
            let _ = stdout.write_all(out.text.as_bytes());
            if let Some(path) = &out.output {
                if let Err(err) = std::fs::write(path, out.text.as_bytes()) {
                    let _ = writeln!(stderr, "cannot write {}: {err}", path.display());
                    return EXIT_USAGE;
                }
            }
            let _ = writeln!(stderr, "{}", out.summary);
            out.exit
        }
        Err(err) => {
            let _ = writeln!(stderr, "error: {}", err.message());
            err.exit()
        }
    }
}

fn read_file(path: &Path) -> Result<String, CmdError> {
    std::fs::read_to_string(path)
        .map_err(|err| CmdError::Usage(format!("cannot read {}: {err}", path.display())))
}

fn load_image(path: &Path) -> Result<(ImageSpec, DigitalImage), CmdError> {
    let text = read_file(path)?;
    let spec = ImageSpec::from_json(&text)
        .map_err(|err| CmdError::Usage(format!("{}: {err}", path.display())))?;
    let image = spec
        .to_image()
        .map_err(|err| CmdError::Usage(format!("{}: {err}", path.display())))?;
    Ok((spec, image))
}

fn load_map(
    path: &Path,
    domain: &DigitalImage,
    codomain: &DigitalImage,
) -> Result<DigitalMap, CmdError> {
    let text = read_file(path)?;
    let pairs = parse_map_pairs(&text)
        .map_err(|err| CmdError::Usage(format!("{}: {err}", path.display())))?;
    DigitalMap::from_pairs(domain.clone(), codomain.clone(), &pairs)
        .map_err(|err| CmdError::Usage(format!("{}: {err}", path.display())))
}

fn search_error(err: SearchError) -> CmdError {
    match err {
        SearchError::InvalidBudget => CmdError::Usage(err.to_string()),
        _ => CmdError::Undecided(err.to_string()),
    }
}

fn budget(budget_nodes: Option<u64>, max_vertices: Option<usize>) -> SearchBudget {
    let defaults = SearchBudget::default();
    SearchBudget {
        max_vertices: max_vertices.unwrap_or(defaults.max_vertices),
        max_nodes: budget_nodes.unwrap_or(defaults.max_nodes),
        seed: defaults.seed,
    }
}

fn cmd_decide(
    image_path: &Path,
    budget_nodes: Option<u64>,
    max_vertices: Option<usize>,
    output: Option<PathBuf>,
) -> Result<CmdOutput, CmdError> {
    let (spec, image) = load_image(image_path)?;
    let budget = budget(budget_nodes, max_vertices);
    let verdict = decide_afpp(&image, &budget).map_err(search_error)?;

    let mut cert = Certificate::new("decide-afpp");
    cert.set_param("budget_max_nodes", json!(budget.max_nodes));
    cert.set_param("budget_max_vertices", json!(budget.max_vertices));
    cert.push_image("image", &spec, &image);
    cert.result = ResultPayload::Verdict {
        holds: verdict.holds,
        exhaustive: verdict.exhaustive,
        nodes_explored: verdict.nodes_explored,
    };
    match &verdict.witness {
        Some(witness) => {
            cert.check("witness is continuous", witness.is_continuous());
            let no_afp = maps::approximate_fixed_points(witness)
                .map(|afps| afps.is_empty())
                .unwrap_or(false);
            cert.check("witness has no approximate fixed point", no_afp);
            cert.witness = Some(map_to_table(witness));
        }
        None => {
            cert.check(
                "search exhausted the space of continuous self-maps",
                verdict.exhaustive,
            );
        }
    }

    let summary = if verdict.holds {
        format!(
            "AFPP holds ({} vertices, {} nodes explored)",
            image.len(),
            verdict.nodes_explored
        )
    } else {
        format!(
            "AFPP fails: fixed-point-free witness attached ({} vertices, {} nodes explored)",
            image.len(),
            verdict.nodes_explored
        )
    };
    Ok(CmdOutput {
        text: cert.to_json(),
        summary,
        exit: if verdict.holds { EXIT_OK } else { EXIT_NEGATIVE },
        output,
    })
}

fn finder_name(choice: FinderChoice) -> &'static str {
    match choice {
        FinderChoice::Auto => "auto",
        FinderChoice::Tree => "tree",
        FinderChoice::Box => "box",
        FinderChoice::Product => "product",
        FinderChoice::Search => "search",
    }
}

fn constructive_error(err: ConstructiveError) -> CmdError {
    match err {
        ConstructiveError::NotContinuous { .. } => CmdError::Discontinuous(err.to_string()),
        ConstructiveError::NoApproximateFixedPoint => CmdError::NoAfp(err.to_string()),
        _ => CmdError::Usage(err.to_string()),
    }
}

/// Runs the tree construction, rooting at the spec's root when it has one.
fn find_on_tree(
    spec: &ImageSpec,
    image: &DigitalImage,
    map: &DigitalMap,
) -> Result<Point, CmdError> {
    let root = spec
        .tree_root()
        .unwrap_or_else(|| image.vertices()[0].clone());
    let tree = TreeStructure::new(image, &root)
        .map_err(|err| CmdError::Usage(format!("not usable as a tree: {err}")))?;
    tree_afp(&tree, map).map_err(constructive_error)
}

fn find_by_scan(image: &DigitalImage, map: &DigitalMap) -> Result<Point, CmdError> {
    ExhaustiveAfpFinder::new(image)
        .find_afp(map)
        .map_err(constructive_error)
}

/// The cube shape a product right-factor must have: `[0, side]^dim` under
/// the full grid rule.
fn cube_shape(spec: &ImageSpec) -> Option<(usize, i64)> {
    let ImageSpec::Box { bounds, u } = spec else {
        return None;
    };
    if bounds.is_empty() || *u != bounds.len() {
        return None;
    }
    let side = bounds[0].1;
    if bounds.iter().all(|&(lo, hi)| lo == 0 && hi == side) {
        Some((bounds.len(), side))
    } else {
        None
    }
}

fn find_on_product(
    spec: &ImageSpec,
    map: &DigitalMap,
) -> Result<Point, CmdError> {
    let ImageSpec::Product { left, right } = spec else {
        return Err(CmdError::Usage(
            "--finder product needs a product spec".to_string(),
        ));
    };
    let Some((cube_dim, side)) = cube_shape(right) else {
        return Err(CmdError::Usage(
            "--finder product needs a right factor of the form [0,n]^k under the full grid rule"
                .to_string(),
        ));
    };
    let base = left
        .to_image()
        .map_err(|err| CmdError::Usage(err.to_string()))?;
    if base.is_tree() {
        let root = left
            .tree_root()
            .unwrap_or_else(|| base.vertices()[0].clone());
        let tree = TreeStructure::new(&base, &root)
            .map_err(|err| CmdError::Usage(err.to_string()))?;
        let finder = TreeAfpFinder::new(&tree);
        product_afp(&base, cube_dim, side, map, &finder).map_err(constructive_error)
    } else {
        let finder = ExhaustiveAfpFinder::new(&base);
        product_afp(&base, cube_dim, side, map, &finder).map_err(constructive_error)
    }
}

fn cmd_find(
    image_path: &Path,
    map_path: &Path,
    finder: FinderChoice,
    output: Option<PathBuf>,
) -> Result<CmdOutput, CmdError> {
    let (spec, image) = load_image(image_path)?;
    let map = load_map(map_path, &image, &image)?;
    if let Some((a, b)) = map.continuity_violation() {
        return Err(CmdError::Discontinuous(format!(
            "map is not continuous: adjacent pair {a}, {b} has images {}, {} \
             which are neither equal nor adjacent",
            map.apply(&a).expect("violation points are in the domain"),
            map.apply(&b).expect("violation points are in the domain"),
        )));
    }

    let (resolved, point) = match finder {
        FinderChoice::Auto => {
            if image.is_tree() {
                ("tree", find_on_tree(&spec, &image, &map)?)
            } else if matches!(&spec, ImageSpec::Box { bounds, u } if *u == bounds.len()) {
                let ImageSpec::Box { bounds, .. } = &spec else {
                    unreachable!()
                };
                ("box", box_afp(bounds, &map).map_err(constructive_error)?)
            } else {
                ("search", find_by_scan(&image, &map)?)
            }
        }
        FinderChoice::Tree => {
            if !image.is_tree() {
                return Err(CmdError::Usage(
                    "--finder tree needs an image whose adjacency forms a tree".to_string(),
                ));
            }
            ("tree", find_on_tree(&spec, &image, &map)?)
        }
        FinderChoice::Box => {
            let ImageSpec::Box { bounds, u } = &spec else {
                return Err(CmdError::Usage("--finder box needs a box spec".to_string()));
            };
            if *u != bounds.len() {
                return Err(CmdError::Usage(format!(
                    "--finder box needs the full grid rule (u = {}, dimension = {})",
                    u,
                    bounds.len()
                )));
            }
            ("box", box_afp(bounds, &map).map_err(constructive_error)?)
        }
        FinderChoice::Product => ("product", find_on_product(&spec, &map)?),
        FinderChoice::Search => ("search", find_by_scan(&image, &map)?),
    };

    let mut cert = Certificate::new("find-afp");
    cert.set_param("finder", json!(finder_name(finder)));
    cert.set_param("resolved_finder", json!(resolved));
    cert.push_image("image", &spec, &image);
    cert.map = Some(map_to_table(&map));
    cert.result = ResultPayload::Vertex {
        point: point.coords().to_vec(),
    };
    cert.check("input map is continuous", map.is_continuous());
    let image_of_point = map.apply(&point).expect("found point is in the domain");
    cert.check(
        "returned vertex is within one step of its image",
        image.adjacent_or_equal(&point, image_of_point),
    );

    let summary = format!("approximate fixed point at {point} (finder: {resolved})");
    Ok(CmdOutput {
        text: cert.to_json(),
        summary,
        exit: EXIT_OK,
        output,
    })
}

fn cmd_check(
    what: CheckKind,
    image_path: &Path,
    map_path: &Path,
    codomain_path: Option<&Path>,
    output: Option<PathBuf>,
) -> Result<CmdOutput, CmdError> {
    let (domain_spec, domain) = load_image(image_path)?;
    let (codomain_spec, codomain) = match codomain_path {
        Some(path) => load_image(path)?,
        None => (domain_spec.clone(), domain.clone()),
    };
    let map = load_map(map_path, &domain, &codomain)?;

    let mut cert = Certificate::new("check");
    cert.push_image("domain", &domain_spec, &domain);
    cert.push_image("codomain", &codomain_spec, &codomain);
    cert.map = Some(map_to_table(&map));

    let (value, summary) = match what {
        CheckKind::Continuity => {
            cert.set_param("what", json!("continuity"));
            match map.continuity_violation() {
                None => {
                    cert.check(
                        "every adjacent domain pair lands on equal or adjacent images",
                        map.is_continuous(),
                    );
                    (true, "continuity: true".to_string())
                }
                Some((a, b)) => {
                    let fa = map.apply(&a).expect("violating point is in the domain");
                    let fb = map.apply(&b).expect("violating point is in the domain");
                    cert.set_detail(
                        "violating_pair",
                        json!([a.coords().to_vec(), b.coords().to_vec()]),
                    );
                    cert.set_detail(
                        "violating_images",
                        json!([fa.coords().to_vec(), fb.coords().to_vec()]),
                    );
                    cert.check(
                        "recorded violating pair is adjacent in the domain",
                        domain.adjacent(&a, &b),
                    );
                    cert.check(
                        "its images are neither equal nor adjacent in the codomain",
                        !codomain.adjacent_or_equal(fa, fb),
                    );
                    (
                        false,
                        format!("continuity: false (violating pair {a}, {b})"),
                    )
                }
            }
        }
        CheckKind::Retraction => {
            cert.set_param("what", json!("retraction"));
            let value = maps::is_retraction(&map).map_err(|err| {
                CmdError::Usage(format!("retraction check is ill-posed: {err}"))
            })?;
            if value {
                cert.check(
                    "codomain vertices all lie in the domain",
                    codomain.vertices().iter().all(|p| domain.contains(p)),
                );
                cert.check("map is continuous", map.is_continuous());
                cert.check(
                    "map fixes every codomain point",
                    codomain
                        .vertices()
                        .iter()
                        .all(|p| map.apply(p).map(|q| q == p).unwrap_or(false)),
                );
                (true, "retraction: true".to_string())
            } else if let Some((a, b)) = map.continuity_violation() {
                cert.set_detail(
                    "violating_pair",
                    json!([a.coords().to_vec(), b.coords().to_vec()]),
                );
                cert.check("map fails to be continuous", true);
                (
                    false,
                    format!("retraction: false (map is not continuous at pair {a}, {b})"),
                )
            } else {
                let moved = codomain
                    .vertices()
                    .iter()
                    .find(|p| map.apply(p).map(|q| q != *p).unwrap_or(true))
                    .cloned();
                if let Some(p) = &moved {
                    cert.set_detail("moved_point", json!(p.coords().to_vec()));
                }
                cert.check("map moves a codomain point", moved.is_some());
                let location = moved
                    .map(|p| format!(" (moves {p})"))
                    .unwrap_or_default();
                (false, format!("retraction: false{location}"))
            }
        }
    };

    cert.result = ResultPayload::Boolean { value };
    Ok(CmdOutput {
        text: cert.to_json(),
        summary,
        exit: if value { EXIT_OK } else { EXIT_NEGATIVE },
        output,
    })
}

fn cmd_enumerate(
    image_path: &Path,
    budget_nodes: Option<u64>,
    max_vertices: Option<usize>,
    output: Option<PathBuf>,
) -> Result<CmdOutput, CmdError> {
    let (spec, image) = load_image(image_path)?;
    let budget = budget(budget_nodes, max_vertices);
    let mut all_continuous = true;
    let enumeration = enumerate_continuous_self_maps(&image, &budget, |map| {
        all_continuous &= map.is_continuous();
        true
    })
    .map_err(search_error)?;

    let mut cert = Certificate::new("enumerate");
    cert.set_param("budget_max_nodes", json!(budget.max_nodes));
    cert.set_param("budget_max_vertices", json!(budget.max_vertices));
    cert.push_image("image", &spec, &image);
    cert.result = ResultPayload::Count {
        count: enumeration.count,
        nodes_explored: enumeration.nodes_explored,
    };
    cert.check(
        "every enumerated table was re-checked continuous",
        all_continuous,
    );

    let summary = format!(
        "{} continuous self-maps ({} nodes explored)",
        enumeration.count, enumeration.nodes_explored
    );
    Ok(CmdOutput {
        text: cert.to_json(),
        summary,
        exit: EXIT_OK,
        output,
    })
}

fn cmd_np_equals(
    left_path: &Path,
    right_path: &Path,
    output: Option<PathBuf>,
) -> Result<CmdOutput, CmdError> {
    let (left_spec, left) = load_image(left_path)?;
    let (right_spec, right) = load_image(right_path)?;
    let cmp = np_equals_cu(&left, &right).map_err(|err| CmdError::Usage(err.to_string()))?;

    let mut cert = Certificate::new("np-check");
    cert.set_param("form", json!("equals"));
    cert.push_image("left", &left_spec, &left);
    cert.push_image("right", &right_spec, &right);
    cert.result = ResultPayload::Boolean { value: cmp.equal };
    cert.set_detail("expected_u", json!(cmp.expected_u));
    match &cmp.discrepancy {
        None => {
            cert.check(
                "product adjacency equals the grid rule on every vertex pair",
                cmp.equal,
            );
        }
        Some(d) => {
            cert.set_detail(
                "discrepancy",
                json!({
                    "left": d.left.coords().to_vec(),
                    "right": d.right.coords().to_vec(),
                    "np_adjacent": d.np_adjacent,
                    "cu_adjacent": d.cu_adjacent,
                }),
            );
            cert.check(
                "recorded pair separates product and grid adjacency",
                d.np_adjacent != d.cu_adjacent,
            );
        }
    }

    let summary = format!(
        "normal product equals c_{}: {}",
        cmp.expected_u, cmp.equal
    );
    Ok(CmdOutput {
        text: cert.to_json(),
        summary,
        exit: if cmp.equal { EXIT_OK } else { EXIT_NEGATIVE },
        output,
    })
}

fn cmd_np_assoc(
    image_path: &Path,
    cube_dim: usize,
    side: i64,
    output: Option<PathBuf>,
) -> Result<CmdOutput, CmdError> {
    let (spec, image) = load_image(image_path)?;
    let value =
        np_assoc_check(&image, cube_dim, side).map_err(|err| CmdError::Usage(err.to_string()))?;

    let mut cert = Certificate::new("np-check");
    cert.set_param("form", json!("assoc"));
    cert.set_param("cube_dim", json!(cube_dim));
    cert.set_param("side", json!(side));
    cert.push_image("base", &spec, &image);
    cert.result = ResultPayload::Boolean { value };
    cert.check(
        "nested and one-step cube attachments were compared on every pair",
        true,
    );

    let summary = format!("re-association agreement: {value}");
    Ok(CmdOutput {
        text: cert.to_json(),
        summary,
        exit: if value { EXIT_OK } else { EXIT_NEGATIVE },
        output,
    })
}

fn cmd_verify_suite(
    scale: ScaleChoice,
    seed: u64,
    output: Option<PathBuf>,
) -> Result<CmdOutput, CmdError> {
    let scale = match scale {
        ScaleChoice::Default => Scale::Default,
        ScaleChoice::Tiny => Scale::Tiny,
    };
    let report = suite::run_all(scale, seed);
    let passed = report.criteria.iter().filter(|c| c.passed).count();
    let mut summary = report.table();
    summary.push_str(&format!(
        "{passed}/{} criteria passed (scale: {})",
        report.criteria.len(),
        report.scale.name()
    ));
    Ok(CmdOutput {
        text: report.bundle_json(),
        summary,
        exit: if report.all_passed() {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        },
        output,
    })
}

fn cmd_verify_certificate(
    cert_path: &Path,
    output: Option<PathBuf>,
) -> Result<CmdOutput, CmdError> {
    let text = read_file(cert_path)?;
    let cert = Certificate::from_json(&text)
        .map_err(|err| CmdError::Usage(format!("{}: {err}", cert_path.display())))?;
    let report = certificate::verify_certificate(&cert);

    let mut summary = String::new();
    for line in &report.checks {
        summary.push_str(&format!(
            "{} {}\n",
            if line.ok { "ok   -" } else { "FAIL -" },
            line.check
        ));
    }
    summary.push_str(if report.valid {
        "certificate valid"
    } else {
        "certificate INVALID"
    });

    Ok(CmdOutput {
        text: report.to_json(),
        summary,
        exit: if report.valid { EXIT_OK } else { EXIT_NEGATIVE },
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&args, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn write_temp(dir: &tempfile::TempDir, name: &str, contents: &str) -> String {
        let path = dir.path().join(name);
        std::fs::write(&path, contents).unwrap();
        path.to_string_lossy().into_owned()
    }

    #[test]
    fn decide_holds_and_fails_with_contracted_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let interval = write_temp(&dir, "interval.json", r#"{"box":{"bounds":[[0,2]],"u":1}}"#);
        let square = write_temp(
            &dir,
            "square.json",
            r#"{"box":{"bounds":[[0,1],[0,1]],"u":1}}"#,
        );

        let (code, stdout, _) = run_args(&["afpp", "decide-afpp", &interval]);
        assert_eq!(code, EXIT_OK);
        let cert = Certificate::from_json(&stdout).unwrap();
        assert!(matches!(
            cert.result,
            ResultPayload::Verdict { holds: true, .. }
        ));

        let (code, stdout, _) = run_args(&["afpp", "decide-afpp", &square]);
        assert_eq!(code, EXIT_NEGATIVE);
        let cert = Certificate::from_json(&stdout).unwrap();
        assert!(matches!(
            cert.result,
            ResultPayload::Verdict { holds: false, .. }
        ));
        assert!(cert.witness.is_some());
        assert!(certificate::verify_certificate(&cert).valid);
    }

    #[test]
    fn malformed_input_exits_2() {
        let dir = tempfile::tempdir().unwrap();
        let bad = write_temp(&dir, "bad.json", "{not json");
        let (code, stdout, stderr) = run_args(&["afpp", "decide-afpp", &bad]);
        assert_eq!(code, EXIT_USAGE);
        assert!(stdout.is_empty());
        assert!(stderr.contains("error"));

        let (code, _, _) = run_args(&["afpp", "no-such-command"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn tiny_budget_exits_20() {
        let dir = tempfile::tempdir().unwrap();
        let interval = write_temp(&dir, "interval.json", r#"{"box":{"bounds":[[0,6]],"u":1}}"#);
        let (code, stdout, stderr) = run_args(&[
            "afpp",
            "decide-afpp",
            &interval,
            "--budget-nodes",
            "3",
        ]);
        assert_eq!(code, EXIT_UNDECIDED);
        assert!(stdout.is_empty());
        assert!(stderr.contains("budget"));
    }

    #[test]
    fn find_afp_reports_discontinuous_maps_and_missing_afps() {
        let dir = tempfile::tempdir().unwrap();
        let interval = write_temp(&dir, "interval.json", r#"{"box":{"bounds":[[0,2]],"u":1}}"#);
        let torn = write_temp(&dir, "torn.json", "[[[0],[0]],[[1],[2]],[[2],[0]]]");
        let (code, _, stderr) = run_args(&["afpp", "find-afp", &interval, &torn]);
        assert_eq!(code, EXIT_DISCONTINUOUS);
        assert!(stderr.contains("not continuous"));

        let square = write_temp(
            &dir,
            "square.json",
            r#"{"box":{"bounds":[[0,1],[0,1]],"u":1}}"#,
        );
        let antipodal = write_temp(
            &dir,
            "antipodal.json",
            "[[[0,0],[1,1]],[[0,1],[1,0]],[[1,0],[0,1]],[[1,1],[0,0]]]",
        );
        let (code, _, _) = run_args(&["afpp", "find-afp", &square, &antipodal]);
        assert_eq!(code, EXIT_NO_AFP);
    }

    #[test]
    fn find_afp_resolves_finders_and_verifies() {
        let dir = tempfile::tempdir().unwrap();
        let tree = write_temp(
            &dir,
            "path.json",
            r#"{"tree":{"edges":[[0,1],[1,2]],"root":0}}"#,
        );
        let reflect = write_temp(&dir, "reflect.json", "[[[0],[2]],[[1],[1]],[[2],[0]]]");
        let (code, stdout, _) = run_args(&["afpp", "find-afp", &tree, &reflect]);
        assert_eq!(code, EXIT_OK);
        let cert = Certificate::from_json(&stdout).unwrap();
        assert!(matches!(&cert.result, ResultPayload::Vertex { point } if point == &vec![1]));
        assert_eq!(
            cert.parameters.get("resolved_finder").unwrap(),
            &json!("tree")
        );
        assert!(certificate::verify_certificate(&cert).valid);
    }

    #[test]
    fn check_reports_violating_pair() {
        let dir = tempfile::tempdir().unwrap();
        let interval = write_temp(&dir, "interval.json", r#"{"box":{"bounds":[[0,2]],"u":1}}"#);
        let torn = write_temp(&dir, "torn.json", "[[[0],[1]],[[1],[0]],[[2],[2]]]");
        let (code, stdout, _) = run_args(&["afpp", "check", "continuity", &interval, &torn]);
        assert_eq!(code, EXIT_NEGATIVE);
        let cert = Certificate::from_json(&stdout).unwrap();
        assert!(matches!(
            cert.result,
            ResultPayload::Boolean { value: false }
        ));
        assert_eq!(
            cert.details.get("violating_pair").unwrap(),
            &json!([[1], [2]])
        );
        assert_eq!(
            cert.details.get("violating_images").unwrap(),
            &json!([[0], [2]])
        );
        assert!(certificate::verify_certificate(&cert).valid);
    }

    #[test]
    fn check_retraction_clamp_is_true() {
        let dir = tempfile::tempdir().unwrap();
        let big = write_temp(&dir, "big.json", r#"{"box":{"bounds":[[0,2]],"u":1}}"#);
        let small = write_temp(&dir, "small.json", r#"{"box":{"bounds":[[0,1]],"u":1}}"#);
        let clamp = write_temp(&dir, "clamp.json", "[[[0],[0]],[[1],[1]],[[2],[1]]]");
        let (code, stdout, _) = run_args(&[
            "afpp",
            "check",
            "retraction",
            &big,
            &clamp,
            "--codomain",
            &small,
        ]);
        assert_eq!(code, EXIT_OK);
        let cert = Certificate::from_json(&stdout).unwrap();
        assert!(matches!(cert.result, ResultPayload::Boolean { value: true }));
        assert!(certificate::verify_certificate(&cert).valid);
    }

    #[test]
    fn enumerate_counts_known_values() {
        let dir = tempfile::tempdir().unwrap();
        let interval = write_temp(&dir, "interval.json", r#"{"box":{"bounds":[[0,2]],"u":1}}"#);
        let (code, stdout, _) = run_args(&["afpp", "enumerate", &interval]);
        assert_eq!(code, EXIT_OK);
        let cert = Certificate::from_json(&stdout).unwrap();
        assert!(matches!(cert.result, ResultPayload::Count { count: 17, .. }));
    }

    #[test]
    fn np_check_equals_and_assoc() {
        let dir = tempfile::tempdir().unwrap();
        let edge = write_temp(&dir, "edge.json", r#"{"box":{"bounds":[[0,1]],"u":1}}"#);
        let (code, stdout, _) = run_args(&["afpp", "np-check", "equals", &edge, &edge]);
        assert_eq!(code, EXIT_OK);
        let cert = Certificate::from_json(&stdout).unwrap();
        assert!(matches!(cert.result, ResultPayload::Boolean { value: true }));
        assert!(certificate::verify_certificate(&cert).valid);

        // An under-full left factor breaks the identity: the square's
        // diagonal is not c_1-adjacent but crosses only two coordinates.
        let partial_square = write_temp(
            &dir,
            "partial-square.json",
            r#"{"box":{"bounds":[[0,1],[0,1]],"u":1}}"#,
        );
        let point = write_temp(&dir, "point.json", r#"{"box":{"bounds":[[0,0]],"u":1}}"#);
        let (code, stdout, _) =
            run_args(&["afpp", "np-check", "equals", &partial_square, &point]);
        assert_eq!(code, EXIT_NEGATIVE);
        let cert = Certificate::from_json(&stdout).unwrap();
        assert!(cert.details.contains_key("discrepancy"));
        assert!(certificate::verify_certificate(&cert).valid);

        // Factors must use grid rules at all for the comparison to make sense.
        let graph = write_temp(
            &dir,
            "graph.json",
            r#"{"graph":{"vertices":[[0],[1]],"edges":[[0,1]]}}"#,
        );
        let (code, _, _) = run_args(&["afpp", "np-check", "equals", &graph, &edge]);
        assert_eq!(code, EXIT_USAGE);

        let (code, _, _) = run_args(&[
            "afpp",
            "np-check",
            "assoc",
            &edge,
            "--cube-dim",
            "1",
            "--side",
            "1",
        ]);
        assert_eq!(code, EXIT_OK);
    }

    #[test]
    fn verify_certificate_round_trips_and_catches_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let square = write_temp(
            &dir,
            "square.json",
            r#"{"box":{"bounds":[[0,1],[0,1]],"u":1}}"#,
        );
        let (code, stdout, _) = run_args(&["afpp", "decide-afpp", &square]);
        assert_eq!(code, EXIT_NEGATIVE);

        let cert_path = write_temp(&dir, "cert.json", &stdout);
        let (code, report, _) = run_args(&["afpp", "verify-certificate", &cert_path]);
        assert_eq!(code, EXIT_OK);
        assert!(report.contains("\"valid\": true"));

        // Tamper with the witness: verification must fail.
        let tampered = stdout.replace("\"holds\": false", "\"holds\": true");
        let bad_path = write_temp(&dir, "bad-cert.json", &tampered);
        let (code, report, _) = run_args(&["afpp", "verify-certificate", &bad_path]);
        assert_eq!(code, EXIT_NEGATIVE);
        assert!(report.contains("\"valid\": false"));
    }

    #[test]
    fn output_flag_writes_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let interval = write_temp(&dir, "interval.json", r#"{"box":{"bounds":[[0,2]],"u":1}}"#);
        let out_path = dir.path().join("cert.json");
        let (code, stdout, _) = run_args(&[
            "afpp",
            "decide-afpp",
            &interval,
            "--output",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        let written = std::fs::read_to_string(&out_path).unwrap();
        assert_eq!(written, stdout);
    }

    #[test]
    fn help_exits_zero() {
        let (code, stdout, _) = run_args(&["afpp", "--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(stdout.contains("decide-afpp"));
    }
}
