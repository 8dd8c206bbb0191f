//! Command-line front door: localized norms, BMO scans, stopping-time
//! decompositions, sparse families, A∞ checks, explicit constants and
//! the verification suites.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use oscillab::constants::{
    laplace_bound, orlicz_constant, theorem_constant, variable_cn, variable_jn_constant,
    Bijection, JNParams,
};
use oscillab::functionals::{
    ainfty_char_profile, embedding_constant, fujii_wilson, sd_check, CubeFunctional, PsiCandidate,
};
use oscillab::grid::{CellFunction, CellMeasure, DyadicCube, Grid};
use oscillab::io;
use oscillab::norms::{
    lp_norm, orlicz_modular, variable_modular, ExponentFunction, LocalNormSpec, NormFamily,
};
use oscillab::oscillation::{bmo_norm, cz_decompose, jn_tail, sparse_dominate};
use oscillab::testfns;
use oscillab::verify::run_suites;
use oscillab::young::YoungFunction;
use oscillab::{Error, Result};

#[derive(Parser)]
#[command(name = "oscillab", version, about = "dyadic oscillation laboratory", disable_help_subcommand = true)]
struct Cli {
    /// Key-value file whose entries are treated as extra long flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Grid dimension for CSV inputs (binary inputs are self-described).
    #[arg(long, default_value_t = 1)]
    dim: u32,
    /// Grid depth for CSV inputs.
    #[arg(long)]
    depth: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a localized norm on one cube.
    Norm {
        #[arg(long)]
        family: String,
        /// Family parameter (exponent for lp/weak-lp; name for orlicz
        /// families; exponent file for variable).
        #[arg(long)]
        params: Option<String>,
        /// Cube as level:morton.
        #[arg(long, default_value = "0:0")]
        cube: String,
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "lebesgue")]
        measure: String,
        #[arg(long)]
        weight: Option<String>,
        /// Functional: measure | weight | wr:R.
        #[arg(long = "Y", default_value = "measure")]
        y: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Dyadic BMO norm with its argmax cube.
    Bmo {
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "lebesgue")]
        measure: String,
        #[arg(long, default_value_t = 1)]
        min_level: u32,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Stopping-time decomposition at a level.
    Czd {
        #[arg(long)]
        g: String,
        #[arg(long, default_value = "lebesgue")]
        measure: String,
        #[arg(long, default_value = "0:0")]
        cube: String,
        #[arg(long = "L")]
        l: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Sparse domination family of the oscillation.
    Sparse {
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "lebesgue")]
        measure: String,
        #[arg(long = "Lambda", default_value_t = 2.0)]
        lambda: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// A∞-type checks on a weight.
    Ainfty {
        /// fujii-wilson | sd | profile | embed.
        #[arg(long)]
        check: String,
        #[arg(long)]
        weight: String,
        #[arg(long, default_value = "lebesgue")]
        measure: String,
        #[arg(long = "Y", default_value = "weight")]
        y: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        /// Young function name for profile candidates.
        #[arg(long)]
        phi: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Explicit constants.
    Constants {
        /// theorem | laplace | orlicz | variable-jn.
        #[arg(long)]
        which: String,
        /// Comma-separated key=value pairs.
        #[arg(long, default_value = "")]
        params: String,
    },
    /// Run verification suites and emit a JSON report.
    Verify {
        /// Suite name, repeatable or comma-separated; default all.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Reduced depths and trial counts.
        #[arg(long)]
        quick: bool,
        /// Write the JSON report here as well as stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write plot-ready CSV curves into this directory.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
}

fn parse_cube(text: &str, grid: &Grid) -> Result<DyadicCube> {
    let (level, morton) = text
        .split_once(':')
        .ok_or_else(|| Error::Parameter(format!("cube must be level:morton, got {text:?}")))?;
    let level: u32 = level
        .parse()
        .map_err(|_| Error::Parameter(format!("bad cube level in {text:?}")))?;
    let morton: u64 = morton
        .parse()
        .map_err(|_| Error::Parameter(format!("bad cube index in {text:?}")))?;
    let cube = DyadicCube::from_morton(level, morton, grid.dim());
    grid.check_cube(&cube)?;
    Ok(cube)
}

/// Loads cell values from a file or a built-in test-function name.
fn load_function(spec: &str, grid_args: &GridArgs, grid_hint: Option<Arc<Grid>>) -> Result<CellFunction> {
    let path = Path::new(spec);
    if path.exists() {
        let shape = grid_args.depth.map(|d| (grid_args.dim, d));
        let data = io::read_cell_data(path, shape)?;
        let grid = Grid::unit(data.dim, data.depth);
        return CellFunction::from_row_major(grid, data.values);
    }
    let grid = match grid_hint {
        Some(g) => g,
        None => Grid::unit(
            grid_args.dim,
            grid_args.depth.ok_or_else(|| {
                Error::Parameter("built-in functions need --depth".into())
            })?,
        ),
    };
    testfns::from_name(grid, spec)
}

fn load_measure(spec: &str, grid: Arc<Grid>, grid_args: &GridArgs) -> Result<CellMeasure> {
    match spec {
        "lebesgue" => Ok(CellMeasure::lebesgue(grid)),
        path_text => {
            let path = Path::new(path_text);
            if !path.exists() {
                if let Some(rest) = path_text.strip_prefix("split:") {
                    let seed: u64 = rest
                        .parse()
                        .map_err(|_| Error::Parameter(format!("bad seed in {path_text:?}")))?;
                    return testfns::recursive_split_measure(grid, seed, 3.0);
                }
                return Err(Error::Io { path: path_text.into(), message: "no such file".into() });
            }
            let shape = grid_args.depth.map(|d| (grid_args.dim, d));
            let data = io::read_cell_data(path, shape)?;
            if data.dim != grid.dim() || data.depth != grid.depth() {
                return Err(Error::Parameter(format!(
                    "measure shape {}x{} does not match the function grid {}x{}",
                    data.dim,
                    data.depth,
                    grid.dim(),
                    grid.depth()
                )));
            }
            CellMeasure::from_row_major(grid, data.values)
        }
    }
}

fn build_functional(
    spec: &str,
    measure: &Arc<CellMeasure>,
    weight: Option<&CellFunction>,
) -> Result<CubeFunctional> {
    match spec {
        "measure" => Ok(CubeFunctional::measure(measure.clone())),
        "weight" => {
            let w = weight.ok_or_else(|| Error::Parameter("--Y weight needs --weight".into()))?;
            CubeFunctional::weight_mass(measure, w)
        }
        other => {
            if let Some(r_text) = other.strip_prefix("wr:") {
                let r: f64 = r_text
                    .parse()
                    .map_err(|_| Error::Parameter(format!("bad r in {other:?}")))?;
                let w = weight.ok_or_else(|| Error::Parameter("--Y wr:r needs --weight".into()))?;
                CubeFunctional::wr(measure.clone(), w, r)
            } else {
                Err(Error::Parameter(format!(
                    "unknown functional {other:?}; try measure, weight, wr:r"
                )))
            }
        }
    }
}

fn parse_kv(params: &str) -> BTreeMap<String, String> {
    params
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .filter_map(|s| {
            s.split_once('=').map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn kv_f64(map: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| Error::Parameter(format!("parameter {key}={v:?} is not a number"))),
    }
}

fn run_norm(
    family: &str,
    params: Option<&str>,
    cube_text: &str,
    f_spec: &str,
    measure_spec: &str,
    weight_spec: Option<&str>,
    y_spec: &str,
    grid_args: &GridArgs,
) -> Result<()> {
    let f = load_function(f_spec, grid_args, None)?;
    let grid = f.grid().clone();
    let base = Arc::new(load_measure(measure_spec, grid.clone(), grid_args)?);
    let weight = weight_spec
        .map(|w| load_function(w, grid_args, Some(grid.clone())))
        .transpose()?;
    let measure = match &weight {
        Some(w) => Arc::new(base.weighted(w)?),
        None => base.clone(),
    };
    let cube = parse_cube(cube_text, &grid)?;
    let functional = build_functional(y_spec, &measure, weight.as_ref())?;
    let norm_family = match family {
        "lp" | "weak-lp" => {
            let p: f64 = params
                .ok_or_else(|| Error::Parameter("lp families need --params <p>".into()))?
                .parse()
                .map_err(|_| Error::Parameter("exponent must be a number".into()))?;
            if family == "lp" { NormFamily::Lp(p) } else { NormFamily::WeakLp(p) }
        }
        "orlicz" | "weak-orlicz" => {
            let phi = YoungFunction::from_name(
                params.ok_or_else(|| Error::Parameter("orlicz families need --params <name>".into()))?,
            )?;
            if family == "orlicz" { NormFamily::Orlicz(phi) } else { NormFamily::WeakOrlicz(phi) }
        }
        "variable" => {
            let pf = load_function(
                params.ok_or_else(|| Error::Parameter("variable needs --params <exponent file>".into()))?,
                grid_args,
                Some(grid.clone()),
            )?;
            NormFamily::Variable(ExponentFunction::new(pf)?)
        }
        other => {
            return Err(Error::Parameter(format!(
                "unknown family {other:?}; try lp, weak-lp, orlicz, weak-orlicz, variable"
            )))
        }
    };
    let spec = LocalNormSpec { family: norm_family.clone(), measure: measure.clone(), functional, geom_k: norm_family.geom_k() };
    let value = spec.norm(&f, &cube)?;
    let modular = match (&spec.family, value) {
        (_, v) if v == 0.0 => None,
        (NormFamily::Orlicz(phi), v) => Some(orlicz_modular(&f, phi, &cube, &spec, v)?),
        (NormFamily::Variable(pf), v) => Some(variable_modular(&f, pf, &cube, &measure, v)?),
        (NormFamily::Lp(p), v) => Some(lp_norm(&f, &cube, &spec, *p)?.powf(*p) / v.powf(*p)),
        _ => None,
    };
    println!(
        "{}",
        serde_json::json!({
            "family": spec.family.name(),
            "cube": format!("{}:{}", cube.level, cube.morton()),
            "value": value,
            "modular_at_value": modular,
        })
    );
    Ok(())
}

fn run_ainfty(
    check: &str,
    weight_spec: &str,
    measure_spec: &str,
    y_spec: &str,
    p: Option<f64>,
    s: Option<f64>,
    phi_name: Option<&str>,
    seed: u64,
    trials: usize,
    grid_args: &GridArgs,
) -> Result<()> {
    let w = load_function(weight_spec, grid_args, None)?;
    let grid = w.grid().clone();
    let measure = Arc::new(load_measure(measure_spec, grid.clone(), grid_args)?);
    let y = build_functional(y_spec, &measure, Some(&w))?;
    let out = match check {
        "fujii-wilson" => {
            let (value, arg) = fujii_wilson(&w, &y, &measure, 0)?;
            serde_json::json!({
                "check": check,
                "value": value,
                "argmax": format!("{}:{}", arg.level, arg.morton()),
            })
        }
        "sd" => {
            let report = sd_check(
                &y,
                &w,
                &measure,
                p.unwrap_or(1.0),
                s.unwrap_or(2.0),
                trials,
                seed,
            )?;
            serde_json::json!({
                "check": check,
                "a_est": report.a_est,
                "a_est_half_sample": report.a_est_half,
                "holds": report.holds,
                "trials": report.trials,
                "seed": seed,
            })
        }
        "profile" => {
            let phi = YoungFunction::from_name(phi_name.unwrap_or("power:2"))?;
            let spec = LocalNormSpec::with_measure_functional(
                NormFamily::Orlicz(phi.clone()),
                measure.clone(),
            );
            let candidate = PsiCandidate::Orlicz(phi);
            let profile = ainfty_char_profile(&spec, &measure, &candidate, trials, seed)?;
            let violation = profile.max_violation(&candidate)?;
            serde_json::json!({
                "check": check,
                "candidate": profile.candidate,
                "fitted_c": profile.fitted_c,
                "samples": profile.samples,
                "max_violation": violation,
                "characteristic_restricted": profile.restricted,
                "seed": seed,
            })
        }
        "embed" => {
            let tests: Vec<CellFunction> = vec![
                testfns::log_reciprocal(grid.clone(), &vec![0.0; grid.dim() as usize])?,
                testfns::indicator(grid.clone(), 0.5)?,
                testfns::random_step(grid.clone(), seed),
            ];
            let (value, skipped) = embedding_constant(&w, &y, &measure, &tests, 1)?;
            serde_json::json!({
                "check": check,
                "value": value,
                "skipped_constant_tests": skipped,
            })
        }
        other => {
            return Err(Error::Parameter(format!(
                "unknown check {other:?}; try fujii-wilson, sd, profile, embed"
            )))
        }
    };
    println!("{out}");
    Ok(())
}

fn run_constants(which: &str, params: &str) -> Result<()> {
    let kv = parse_kv(params);
    let out = match which {
        "theorem" => {
            let psi = match kv.get("psi").map(String::as_str).unwrap_or("identity") {
                "identity" => Bijection::identity(),
                name => {
                    if let Some(p) = name.strip_prefix("power:") {
                        Bijection::power(p.parse().map_err(|_| {
                            Error::Parameter(format!("bad power bijection {name:?}"))
                        })?)?
                    } else if let Some(phi) = name.strip_prefix("orlicz:") {
                        Bijection::orlicz(YoungFunction::from_name(phi)?)
                    } else {
                        return Err(Error::Parameter(format!("unknown bijection {name:?}")));
                    }
                }
            };
            let c_y = kv_f64(&kv, "cy", 1.0)?;
            let k = kv_f64(&kv, "k", 1.0)?;
            let c_mu = kv_f64(&kv, "cmu", 1.0)?;
            let n_mu = kv_f64(&kv, "nmu", 1.0)?;
            let (value, argmin) = theorem_constant(&psi, c_y, k, c_mu, n_mu)?;
            serde_json::json!({
                "which": which,
                "formula_inputs": {"psi": psi.name(), "cy": c_y, "k": k, "cmu": c_mu, "nmu": n_mu},
                "value": value,
                "argmin_level": argmin,
            })
        }
        "laplace" => {
            let phi = YoungFunction::from_name(
                kv.get("phi").map(String::as_str).unwrap_or("power:2"),
            )?;
            let jn = JNParams::new(kv_f64(&kv, "c1", 2.0)?, kv_f64(&kv, "c2", 2.0)?)?;
            let value = laplace_bound(&phi, &jn)?;
            serde_json::json!({
                "which": which,
                "formula_inputs": {"phi": phi.name(), "c1": jn.c1, "c2": jn.c2},
                "value": value,
            })
        }
        "orlicz" => {
            let phi = YoungFunction::from_name(
                kv.get("phi").map(String::as_str).unwrap_or("plog:2:0"),
            )?;
            let c = kv_f64(&kv, "c", phi.submult_c())?;
            let c_mu = kv_f64(&kv, "cmu", 1.0)?;
            let n_mu = kv_f64(&kv, "nmu", 1.0)?;
            let value = orlicz_constant(&phi, c, c_mu, n_mu)?;
            serde_json::json!({
                "which": which,
                "formula_inputs": {"phi": phi.name(), "c": c, "cmu": c_mu, "nmu": n_mu},
                "value": value,
            })
        }
        "variable-jn" => {
            let p_plus = kv_f64(&kv, "pplus", 2.0)?;
            let c_n = match kv.get("cn") {
                Some(v) => v
                    .parse()
                    .map_err(|_| Error::Parameter(format!("parameter cn={v:?} is not a number")))?,
                None => variable_cn(kv_f64(&kv, "cmu", 1.0)?, kv_f64(&kv, "nmu", 1.0)?, p_plus)?,
            };
            let value = variable_jn_constant(c_n, p_plus)?;
            serde_json::json!({
                "which": which,
                "formula_inputs": {"cn": c_n, "pplus": p_plus},
                "value": value,
            })
        }
        other => {
            return Err(Error::Parameter(format!(
                "unknown constant {other:?}; try theorem, laplace, orlicz, variable-jn"
            )))
        }
    };
    println!("{out}");
    Ok(())
}

/// Plot-ready curves: the per-p constants, the tail of the logarithmic
/// exemplar against its fitted bound, and an A∞ profile.
fn emit_plot_data(dir: &Path, seed: u64) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Io { path: dir.display().to_string(), message: e.to_string() })?;
    // (p, optimizer constant, transform bound)
    let mut rows = Vec::new();
    let jn = JNParams::default();
    for k in 1..=5u32 {
        let p = 2f64.powi(k as i32);
        let (tc, _) = theorem_constant(&Bijection::power(p)?, 1.0, 1.0, 1.0, 0.0)?;
        let lb = laplace_bound(&YoungFunction::power(p)?, &jn)?;
        rows.push(vec![p, tc, lb]);
    }
    io::write_rows_csv(&dir.join("p_constant.csv"), Some("p,optimizer,transform"), &rows)?;

    // (t, tail fraction, fitted exponential)
    let depth = 12;
    let grid = Grid::unit(1, depth);
    let measure = CellMeasure::lebesgue(grid.clone());
    let f = testfns::log_reciprocal_unit(depth);
    let root = grid.root();
    let (bmo, _) = bmo_norm(&f, &measure, 1)?;
    let mut rows = Vec::new();
    for k in 0..=40 {
        let t = 0.25 * k as f64;
        let tail = jn_tail(&f, &root, &measure, t)?;
        rows.push(vec![t, tail, (-t / bmo).exp().min(1.0)]);
    }
    io::write_rows_csv(&dir.join("t_tail.csv"), Some("t,tail,exp_model"), &rows)?;

    // (fraction, norm, fitted bound curve)
    let phi = YoungFunction::power(2.0)?;
    let measure = Arc::new(CellMeasure::lebesgue(Grid::unit(1, 8)));
    let spec =
        LocalNormSpec::with_measure_functional(NormFamily::Orlicz(phi.clone()), measure.clone());
    let candidate = PsiCandidate::Orlicz(phi);
    let profile = ainfty_char_profile(&spec, &measure, &candidate, 40, seed)?;
    let mut rows = Vec::new();
    for &(frac, value) in &profile.samples {
        rows.push(vec![frac, value, profile.fitted_c * candidate.inv(frac)?]);
    }
    rows.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
    io::write_rows_csv(&dir.join("fraction_norm.csv"), Some("fraction,norm,c_psi_inv"), &rows)?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Norm { family, params, cube, f, measure, weight, y, grid } => {
            run_norm(
                &family,
                params.as_deref(),
                &cube,
                &f,
                &measure,
                weight.as_deref(),
                &y,
                &grid,
            )?;
            Ok(true)
        }
        Command::Bmo { f, measure, min_level, grid } => {
            let func = load_function(&f, &grid, None)?;
            let g = func.grid().clone();
            let m = load_measure(&measure, g, &grid)?;
            let (value, arg) = bmo_norm(&func, &m, min_level)?;
            println!(
                "{}",
                serde_json::json!({
                    "bmo": value,
                    "argmax": format!("{}:{}", arg.level, arg.morton()),
                    "min_level": min_level,
                })
            );
            Ok(true)
        }
        Command::Czd { g, measure, cube, l, grid } => {
            let func = load_function(&g, &grid, None)?;
            let gr = func.grid().clone();
            let m = load_measure(&measure, gr.clone(), &grid)?;
            let parent = parse_cube(&cube, &gr)?;
            let cz = cz_decompose(&func, &parent, &m, l)?;
            let mut union = 0.0;
            let mut cubes = Vec::new();
            for (q, avg) in cz.selected.members.iter().zip(&cz.averages) {
                union += m.cube_mass(q)?;
                cubes.push(serde_json::json!({
                    "level": q.level,
                    "index": q.morton(),
                    "average": avg,
                }));
            }
            println!(
                "{}",
                serde_json::json!({
                    "L": l,
                    "selected": cubes,
                    "smallness_ratio": union / m.cube_mass(&parent)?,
                })
            );
            Ok(true)
        }
        Command::Sparse { f, measure, lambda, grid } => {
            let func = load_function(&f, &grid, None)?;
            let gr = func.grid().clone();
            let m = load_measure(&measure, gr.clone(), &grid)?;
            let family = sparse_dominate(&func, &gr.root(), &m, lambda, 64)?;
            let members: Vec<serde_json::Value> = family
                .members
                .iter()
                .zip(&family.major_sets)
                .map(|(q, e)| {
                    serde_json::json!({
                        "level": q.level,
                        "index": q.morton(),
                        "major_mass": m.cell_set_mass(e),
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::json!({
                    "Lambda": family.stopping_factor,
                    "members": members,
                    "C_dom": family.c_dom,
                    "truncated": family.truncated,
                })
            );
            Ok(true)
        }
        Command::Ainfty { check, weight, measure, y, p, s, phi, seed, trials, grid } => {
            run_ainfty(
                &check,
                &weight,
                &measure,
                &y,
                p,
                s,
                phi.as_deref(),
                seed,
                trials,
                &grid,
            )?;
            Ok(true)
        }
        Command::Constants { which, params } => {
            run_constants(&which, &params)?;
            Ok(true)
        }
        Command::Verify { suite, seed, quick, report, plot_dir } => {
            let rep = run_suites(&suite, seed, quick)?;
            let json = rep.to_json();
            if let Some(path) = &report {
                std::fs::write(path, &json).map_err(|e| Error::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
            }
            if let Some(dir) = &plot_dir {
                emit_plot_data(dir, seed)?;
            }
            println!("{json}");
            Ok(rep.pass)
        }
    }
}

/// Expands `--config file` into long flags inserted after the subcommand;
/// explicit flags win because clap keeps the last occurrence.
fn expand_config(args: Vec<String>) -> std::result::Result<Vec<String>, String> {
    let Some(pos) = args.iter().position(|a| a == "--config") else {
        return Ok(args);
    };
    let path = args
        .get(pos + 1)
        .ok_or_else(|| "--config needs a file path".to_string())?
        .clone();
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    let mut expanded: Vec<String> = args[..pos].to_vec();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key = value", i + 1))?;
        expanded.push(format!("--{}", key.trim()));
        let value = value.trim();
        if !value.is_empty() {
            expanded.push(value.to_string());
        }
    }
    expanded.extend_from_slice(&args[pos + 2..]);
    Ok(expanded)
}

fn main() -> ExitCode {
    // cap for concurrent suite execution; evaluation is sequential and
    // deterministic regardless of the cap
    let _threads: usize = std::env::var("OSC_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1);
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as non-errors
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } | Error::Parse { .. } | Error::Parameter(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
