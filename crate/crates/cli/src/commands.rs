use std::path::{Path, PathBuf};

use serde_json::json;

use vessel3d::eval::{auc_table, extract_profile, fwhm, psnr, roc};
use vessel3d::hessian::{
    neuriteness_multiscale, vesselness, volume_ratio, Scales, VesselnessParams, VolumeRatioParams,
    NEURITENESS_ALPHA,
};
use vessel3d::phantom::{add_noise, generate_phantom, vessel_truth, NoiseModel, NoiseSpec, PhantomSpec};
use vessel3d::volume::{load_volume, normalize, save_volume};
use vessel3d::{bowler_hat, BowlerHatParams, Dtype, Volume32};

use crate::manifest::{sibling, Recorder};
use crate::{Cli, Command, EnhanceArgs, EvalArgs, EvalMode, Method, NoiseArgs, NoiseKind, PhantomArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] vessel3d::Error),

    #[error("cannot read phantom spec {path}: {source}")]
    SpecRead {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed phantom spec {path}: {source}")]
    SpecParse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.category(),
            CliError::SpecRead { .. } => "io",
            CliError::SpecParse { .. } => "spec-parse",
            CliError::Write { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

type Enhancer = Box<dyn Fn(&Volume32) -> vessel3d::Result<Volume32>>;

pub fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {n} threads: {e}")))?;
    }
    match &cli.command {
        Command::Phantom(a) => phantom(a, cli.threads),
        Command::Noise(a) => noise(a, cli.threads),
        Command::Enhance(a) => enhance(a, cli.threads),
        Command::Eval(a) => eval(a, cli.threads),
    }
}

fn save(v: &Volume32, path: &Path, rec: &mut Recorder) -> Result<()> {
    save_volume(v, path, Dtype::F32)?;
    rec.outputs.push(path.to_path_buf());
    Ok(())
}

fn load(path: &Path, rec: &mut Recorder) -> Result<Volume32> {
    rec.inputs.push(path.to_path_buf());
    Ok(load_volume(path)?)
}

fn phantom(a: &PhantomArgs, threads: Option<usize>) -> Result<()> {
    let mut rec = Recorder::new("phantom", threads);
    let text = std::fs::read_to_string(&a.spec).map_err(|e| CliError::SpecRead {
        path: a.spec.clone(),
        source: e,
    })?;
    let spec = PhantomSpec::from_json(&text).map_err(|e| CliError::SpecParse {
        path: a.spec.clone(),
        source: e,
    })?;
    rec.inputs.push(a.spec.clone());
    let ph = generate_phantom::<f32>(&spec)?;
    let vessels = vessel_truth::<f32>(&spec)?;
    save(&ph.volume, &a.out, &mut rec)?;
    save(&ph.truth, &sibling(&a.out, "truth.json"), &mut rec)?;
    save(&vessels, &sibling(&a.out, "vessels.json"), &mut rec)?;
    let count = |v: &Volume32| v.data().iter().filter(|&&x| x == 1.0).count();
    rec.params = serde_json::to_value(&spec).expect("spec serializes");
    rec.results = json!({
        "dims": spec.dims,
        "foreground_voxels": count(&ph.truth),
        "vessel_voxels": count(&vessels),
    });
    let manifest = rec.finish(&a.out)?;
    println!("wrote {} ({} foreground voxels); manifest {}", a.out.display(), count(&ph.truth), manifest.display());
    Ok(())
}

fn noise(a: &NoiseArgs, threads: Option<usize>) -> Result<()> {
    let mut rec = Recorder::new("noise", threads);
    let need = |value: Option<f64>, flag: &str| {
        value.ok_or_else(|| CliError::Usage(format!("--model {:?} needs {flag}", a.model).to_lowercase()))
    };
    let model = match a.model {
        NoiseKind::Gaussian => NoiseModel::Gaussian {
            sigma: need(a.sigma, "--sigma")?,
        },
        NoiseKind::Speckle => NoiseModel::Speckle {
            sigma: need(a.sigma, "--sigma")?,
        },
        NoiseKind::Saltpepper => NoiseModel::SaltPepper { rho: need(a.rho, "--rho")? },
    };
    let spec = NoiseSpec::new(model, a.seed);
    spec.validate()?;
    let v = load(&a.input, &mut rec)?;
    let out = add_noise(&v, &spec)?;
    save(&out, &a.out, &mut rec)?;
    rec.params = serde_json::to_value(spec).expect("noise spec serializes");
    rec.seeds.push(a.seed);
    rec.finish(&a.out)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn enhance(a: &EnhanceArgs, threads: Option<usize>) -> Result<()> {
    let mut rec = Recorder::new("enhance", threads);
    let scales = match &a.scales {
        Some(s) => Scales::new(s.clone())?,
        None => Scales::default(),
    };
    let run: Enhancer = match a.method {
        Method::Bowlerhat => {
            let p = BowlerHatParams::new(a.dmax, a.directions)?;
            rec.params = json!({"method": "bowlerhat", "dmax": p.d_max, "directions": p.n_directions});
            Box::new(move |v| bowler_hat(v, &p))
        }
        Method::Vesselness => {
            let p = VesselnessParams {
                alpha: a.alpha.unwrap_or(0.5),
                beta: a.beta,
                c: a.c,
                scales: scales.clone(),
            };
            p.validate()?;
            rec.params = json!({
                "method": "vesselness", "alpha": p.alpha, "beta": p.beta,
                "c": p.c.map_or(json!("auto"), |c| json!(c)), "scales": p.scales.as_slice(),
            });
            Box::new(move |v| vesselness(v, &p))
        }
        Method::Neuriteness => {
            let alpha = a.alpha.unwrap_or(NEURITENESS_ALPHA);
            if !alpha.is_finite() {
                return Err(vessel3d::Error::InvalidParameter {
                    name: "alpha",
                    reason: "must be finite".into(),
                }
                .into());
            }
            rec.params = json!({"method": "neuriteness", "alpha": alpha, "scales": scales.as_slice()});
            let s = scales.clone();
            Box::new(move |v| neuriteness_multiscale(v, &s, alpha))
        }
        Method::Volumeratio => {
            let p = VolumeRatioParams {
                tau: a.tau,
                scales: scales.clone(),
            };
            p.validate()?;
            rec.params = json!({"method": "volumeratio", "tau": p.tau, "scales": p.scales.as_slice()});
            Box::new(move |v| volume_ratio(v, &p))
        }
    };
    let v = load(&a.input, &mut rec)?;
    let out = normalize(&run(&v)?);
    save(&out, &a.out, &mut rec)?;
    rec.finish(&a.out)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

/// `name=path` or `path` (named after the file stem).
fn named(arg: &str) -> (String, PathBuf) {
    match arg.split_once('=') {
        Some((name, path)) if !name.is_empty() => (name.to_string(), PathBuf::from(path)),
        _ => {
            let path = PathBuf::from(arg);
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            (name, path)
        }
    }
}

fn single(a: &EvalArgs, mode: &str) -> Result<(String, PathBuf)> {
    match a.scores.as_slice() {
        [one] => Ok(named(one)),
        _ => Err(CliError::Usage(format!("--mode {mode} takes exactly one --scores volume"))),
    }
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str, mode: &str) -> Result<&'a PathBuf> {
    p.as_ref().ok_or_else(|| CliError::Usage(format!("--mode {mode} needs {flag}")))
}

fn point(p: &Option<Vec<f64>>, flag: &str) -> Result<[f64; 3]> {
    match p.as_deref() {
        Some(&[x, y, z]) => Ok([x, y, z]),
        _ => Err(CliError::Usage(format!("--mode profile needs {flag} x,y,z"))),
    }
}

fn eval(a: &EvalArgs, threads: Option<usize>) -> Result<()> {
    let mut rec = Recorder::new("eval", threads);
    rec.params = json!({
        "mode": format!("{:?}", a.mode).to_lowercase(),
        "scores": a.scores,
        "thresholds": a.thresholds,
        "samples": a.samples,
        "p0": a.p0, "p1": a.p1, "peak": a.peak,
    });
    match a.mode {
        EvalMode::Roc => {
            let (name, path) = single(a, "roc")?;
            let truth = load(required(&a.truth, "--truth", "roc")?, &mut rec)?;
            let scores = load(&path, &mut rec)?;
            let curve = roc(&normalize(&scores), &truth, a.thresholds)?;
            curve.save_csv(&a.out)?;
            rec.results = json!({"method": name, "auc": curve.auc});
            println!("{name}: auc={}", curve.auc);
        }
        EvalMode::Table => {
            let truth = load(required(&a.truth, "--truth", "table")?, &mut rec)?;
            let mut methods = vec![];
            for arg in &a.scores {
                let (name, path) = named(arg);
                methods.push((name, load(&path, &mut rec)?));
            }
            let refs: Vec<(&str, &Volume32)> = methods.iter().map(|(n, v)| (n.as_str(), v)).collect();
            let table = auc_table(&refs, &truth, a.thresholds)?;
            table.save_csv(&a.out)?;
            for row in &table.rows {
                println!("{}: auc={}", row.method, row.auc);
            }
            rec.results = serde_json::to_value(&table.rows).expect("rows serialize");
        }
        EvalMode::Profile => {
            let (name, path) = single(a, "profile")?;
            let (p0, p1) = (point(&a.p0, "--p0")?, point(&a.p1, "--p1")?);
            let v = load(&path, &mut rec)?;
            let profile = extract_profile(&v, p0, p1, a.samples)?;
            profile.save_csv(&a.out)?;
            let width = fwhm(&profile);
            rec.results = json!({
                "method": name,
                "argmax": profile.argmax(),
                "fwhm": width.as_ref().ok(),
                "fwhm_error": width.as_ref().err().map(|e| e.to_string()),
            });
            match width {
                Ok(w) => println!("{name}: argmax={} fwhm={w}", profile.argmax()),
                Err(e) => println!("{name}: argmax={} fwhm unavailable ({e})", profile.argmax()),
            }
        }
        EvalMode::Psnr => {
            let reference = load(required(&a.reference, "--reference", "psnr")?, &mut rec)?;
            let mut rows = vec![];
            for arg in &a.scores {
                let (name, path) = named(arg);
                let v = load(&path, &mut rec)?;
                rows.push((name, psnr(&reference, &v, a.peak)?));
            }
            let mut w = csv::Writer::from_path(&a.out).map_err(vessel3d::Error::from)?;
            w.write_record(["method", "psnr_db"]).map_err(vessel3d::Error::from)?;
            for (name, db) in &rows {
                w.write_record([name.clone(), db.to_string()]).map_err(vessel3d::Error::from)?;
                println!("{name}: psnr={db} dB");
            }
            w.flush().map_err(|e| CliError::Write {
                path: a.out.clone(),
                source: e,
            })?;
            rec.results = json!(rows.iter().map(|(n, db)| json!({"method": n, "psnr_db": db.to_string()})).collect::<Vec<_>>());
        }
    }
    rec.outputs.push(a.out.clone());
    rec.finish(&a.out)?;
    Ok(())
}
