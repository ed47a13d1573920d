use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensor_radon::analysis::{range_check, reshetnyak_check, ForwardRoute, ReshetnyakOptions, SobolevIndex};
use tensor_radon::decomp::decompose;
use tensor_radon::field::{Grid, TensorField};
use tensor_radon::invert::{invert_full, GrtDataset, InversionOptions};
use tensor_radon::io::{read_field, read_sinogram, write_field, write_sinogram};
use tensor_radon::phantom::{PhantomSpec, RandomPhantom};
use tensor_radon::radon::{
    grt_fourier_many, grt_many, Degree, DirectionGrid, FourierOptions, OffsetGrid, QuadratureOptions, Sinogram,
};
use tensor_radon::suite::{run_selected, slice_error, CRITERIA};
use tensor_radon::symtensor::DegreeSignature;
use tensor_radon::ucp::{ucp_counterexample, ucp_uniqueness_experiment, UcpEvenConfig, UcpOddConfig};

use crate::config::{ExperimentConfig, Form, Route, Signatures};
use crate::report::Report;
use crate::{Command, Failure};

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<(), Failure> {
    let out = cfg.io.out.as_path();
    match cmd {
        Command::Phantom => phantom(cfg, out),
        Command::Forward => forward(cfg, out),
        Command::Invert => invert(cfg, out),
        Command::Decompose => decomposition(cfg, out),
        Command::SliceCheck => slice_check(cfg, out),
        Command::Reshetnyak => reshetnyak(cfg, out),
        Command::RangeCheck => range(cfg, out),
        Command::UcpOdd => ucp_odd(cfg, out),
        Command::UcpEven => ucp_even(cfg, out),
        Command::Selftest => selftest(cfg, out),
    }
}

fn grid(cfg: &ExperimentConfig) -> Result<Grid, Failure> {
    Ok(Grid::new(cfg.grid.n, cfg.grid.half_width, cfg.grid.samples)?)
}

fn directions(cfg: &ExperimentConfig, g: &Grid, with_u: bool) -> Result<Arc<DirectionGrid>, Failure> {
    let u = if with_u { cfg.directions.u_count_for(g.n()) } else { 0 };
    Ok(Arc::new(DirectionGrid::for_dimension(
        g.n(),
        cfg.directions.count_for(g.n()),
        OffsetGrid::for_grid(g),
        u,
    )?))
}

fn quadrature(cfg: &ExperimentConfig) -> QuadratureOptions {
    QuadratureOptions {
        stencil: cfg.transform.stencil,
        ..Default::default()
    }
}

fn phantom_spec(cfg: &ExperimentConfig) -> Result<PhantomSpec, Failure> {
    let (n, m) = (cfg.grid.n, cfg.transform.m);
    let spec = if let Some(path) = &cfg.phantom.spec {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    } else if cfg.phantom.zero {
        PhantomSpec { n, m, terms: Vec::new() }
    } else {
        let opts = RandomPhantom {
            min_terms: cfg.phantom.min_terms,
            max_terms: cfg.phantom.max_terms,
            ..Default::default()
        };
        PhantomSpec::random(n, m, &opts, &mut ChaCha8Rng::seed_from_u64(cfg.seed))
    };
    spec.validate()?;
    if spec.n != n {
        return Err(Failure::Usage(format!("phantom lives on R^{} but grid.n = {n}", spec.n)));
    }
    Ok(spec)
}

/// `io.input` when it names a field, else the configured phantom.
fn input_field(cfg: &ExperimentConfig) -> Result<TensorField, Failure> {
    match &cfg.io.input {
        Some(p) => Ok(read_field(p)?),
        None => Ok(phantom_spec(cfg)?.sample(&grid(cfg)?)?),
    }
}

fn degrees(cfg: &ExperimentConfig, n: usize, m: usize) -> Result<Vec<Degree>, Failure> {
    match (&cfg.transform.signatures, cfg.transform.form) {
        (Signatures::All(s), form) if s == "all" => Ok(match form {
            Form::Frame => Degree::all_frames(n, m),
            Form::Pair => Degree::all_pairs(m),
        }),
        (Signatures::All(s), _) => Err(Failure::Usage(format!("signatures must be \"all\" or a list, got {s:?}"))),
        (Signatures::List(list), Form::Frame) => Ok(list.iter().cloned().map(|l| Degree::Frame(DegreeSignature(l))).collect()),
        (Signatures::List(list), Form::Pair) => list
            .iter()
            .map(|l| match l.as_slice() {
                [a, b] => Ok(Degree::Pair { normal: *a, tangent: *b }),
                _ => Err(Failure::Usage(format!("pair degrees are [normal, tangent], got {l:?}"))),
            })
            .collect(),
    }
}

fn label(d: &Degree) -> String {
    match d {
        Degree::Scalar => "scalar".into(),
        Degree::Frame(l) => format!("frame_{}", l.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-")),
        Degree::Pair { normal, tangent } => format!("pair_{normal}-{tangent}"),
    }
}

fn phantom(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let spec = phantom_spec(cfg)?;
    let g = grid(cfg)?;
    let f = spec.sample(&g)?;
    fs::create_dir_all(out)?;
    write_field(out.join("phantom.tfld"), &f)?;
    let json = serde_json::to_string_pretty(&spec).map_err(|e| Failure::Io(e.to_string()))?;
    fs::write(out.join("phantom.json"), json + "\n")?;
    let mut r = Report::new("phantom");
    r.value("l2_norm", f.l2_norm());
    r.value("max_abs", f.max_abs());
    r.value("mass_loss", spec.mass_loss(g.half_width()));
    r.finish(out)
}

fn forward_sinograms(cfg: &ExperimentConfig, f: &TensorField, degrees: &[Degree]) -> Result<Vec<Sinogram>, Failure> {
    let with_u = degrees.iter().any(|d| d.uses_u());
    let dg = directions(cfg, f.grid(), with_u)?;
    Ok(match cfg.transform.route {
        Route::Quadrature => grt_many(f, degrees, &dg, &quadrature(cfg))?,
        Route::Fourier => grt_fourier_many(f, degrees, &dg, &FourierOptions::default())?,
    })
}

fn forward(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let f = input_field(cfg)?;
    let degs = degrees(cfg, f.grid().n(), f.order())?;
    let start = Instant::now();
    let sinos = forward_sinograms(cfg, &f, &degs)?;
    let dir = out.join("sino");
    fs::create_dir_all(&dir)?;
    let mut r = Report::new("forward");
    r.timing.insert("forward_seconds".into(), start.elapsed().as_secs_f64());
    for (d, s) in degs.iter().zip(&sinos) {
        write_sinogram(dir.join(format!("{}.sino", label(d))), s)?;
        r.value(format!("{} max_abs", label(d)), s.max_abs());
    }
    r.finish(out)
}

/// Sinograms from a `.sino` file or every `.sino` in a directory, sorted by
/// name.
fn input_sinograms(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<Sinogram>, Failure> {
    let path = cfg.io.input.clone().unwrap_or_else(|| out.join("sino"));
    if path.is_file() {
        return Ok(vec![read_sinogram(&path)?]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(&path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "sino"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::Usage(format!("no .sino files in {}", path.display())));
    }
    files.iter().map(|p| Ok(read_sinogram(p)?)).collect()
}

fn invert(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let sinos = input_sinograms(cfg, out)?;
    let m = sinos[0].order();
    let dg = sinos[0].grid.clone();
    let mut data = GrtDataset::new(m, dg);
    for s in sinos.into_iter().filter(|s| matches!(s.degree, Degree::Frame(_))) {
        data.insert(s)?;
    }
    let g = grid(cfg)?;
    let opts = InversionOptions {
        imag_tol: cfg.tolerances.imag,
        support_radius: cfg.inversion.support_radius,
        pad: cfg.inversion.pad,
        ..Default::default()
    };
    let start = Instant::now();
    let rec = invert_full(&data, &g, &opts)?;
    let mut r = Report::new("invert");
    r.timing.insert("invert_seconds".into(), start.elapsed().as_secs_f64());
    fs::create_dir_all(out)?;
    write_field(out.join("reconstruction.tfld"), &rec.field)?;
    for c in &rec.components {
        write_field(out.join(format!("v{}.tfld", c.index)), &c.field)?;
        r.value(format!("v{} imag_residue", c.index), c.imag_residue);
        r.value(format!("v{} range_residual", c.index), c.range_residual);
    }
    if let Some(p) = &cfg.io.reference {
        let err = rec.field.rel_l2_error(&read_field(p)?)?;
        r.value("rel_l2_error", err);
        r.passed = Some(err <= cfg.tolerances.inversion);
    }
    r.finish(out)
}

fn decomposition(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let f = input_field(cfg)?;
    let dec = decompose(&f)?;
    fs::create_dir_all(out)?;
    let mut r = Report::new("decompose");
    r.value("residual", dec.residual);
    for (i, v) in dec.components.iter().enumerate() {
        write_field(out.join(format!("v{i}.tfld")), v)?;
    }
    for (i, c) in dec.certificates.iter().enumerate() {
        r.value(format!("v{i} certificate"), *c);
    }
    r.finish(out)
}

fn slice_check(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let spec = phantom_spec(cfg)?;
    let g = grid(cfg)?;
    let dg = directions(cfg, &g, true)?;
    let mut r = Report::new("slice-check");
    let mut ok = true;
    for a in 0..=spec.m {
        let e = slice_error(&spec, &g, &dg, a, spec.m - a)?;
        ok &= e <= cfg.tolerances.slice;
        r.value(format!("pair_{a}-{} slice_error", spec.m - a), e);
    }
    r.passed = Some(ok);
    r.finish(out)
}

fn reshetnyak(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let f = input_field(cfg)?;
    let dg = directions(cfg, f.grid(), true)?;
    let opts = ReshetnyakOptions {
        grid: dg,
        route: match cfg.transform.route {
            Route::Quadrature => ForwardRoute::Quadrature,
            Route::Fourier => ForwardRoute::FourierSlice,
        },
        quadrature: quadrature(cfg),
        fourier: FourierOptions::default(),
    };
    let idx = SobolevIndex::new(cfg.reshetnyak.s, cfg.reshetnyak.t);
    let m = f.order();
    let mut r = Report::new("reshetnyak");
    let mut ok = true;
    for a in 0..=m {
        let res = reshetnyak_check(&f, a, m - a, idx, &opts)?;
        ok &= res.rel_gap <= cfg.tolerances.reshetnyak;
        let key = format!("pair_{a}-{}", m - a);
        r.value(format!("{key} lhs"), res.lhs);
        r.value(format!("{key} rhs"), res.rhs);
        r.value(format!("{key} rel_gap"), res.rel_gap);
    }
    r.passed = Some(ok);
    r.finish(out)
}

fn range(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let sinos = if cfg.io.input.is_some() {
        input_sinograms(cfg, out)?
    } else {
        let f = phantom_spec(cfg)?.sample(&grid(cfg)?)?;
        forward_sinograms(cfg, &f, &Degree::all_pairs(f.order()))?
    };
    let mut r = Report::new("range-check");
    let mut ok = true;
    let mut reports = Vec::new();
    for s in &sinos {
        let rep = range_check(s, cfg.tolerances.k_max, cfg.tolerances.range)?;
        ok &= rep.passed;
        r.value(format!("{} parity_defect", label(&s.degree)), rep.parity_defect);
        r.value(format!("{} max_residual", label(&s.degree)), rep.max_residual);
        reports.push(rep);
    }
    r.extra("reports", &reports);
    r.passed = Some(ok);
    r.finish(out)
}

fn ucp_odd(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let u = &cfg.ucp;
    let base = UcpOddConfig::default();
    let c = UcpOddConfig {
        m: u.m,
        i: u.i,
        outer: u.outer,
        directions: u.directions.unwrap_or(base.directions),
        samples: u.samples.unwrap_or(base.samples),
        half_width: u.half_width.unwrap_or(base.half_width),
        ..base
    };
    let rep = ucp_counterexample(&c)?;
    let mut r = Report::new("ucp-odd");
    r.value("interior_norm", rep.interior_norm);
    r.value("exterior_norm", rep.exterior_norm);
    r.value("data_norm_on_u", rep.data_norm_on_u);
    r.value("ratio", rep.interior_norm / rep.exterior_norm);
    r.extra("report", &rep);
    r.passed = Some(rep.passed);
    r.finish(out)
}

fn ucp_even(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let u = &cfg.ucp;
    let base = UcpEvenConfig::default();
    let mut r = Report::new("ucp-even");
    let mut ok = true;
    let mut reports = Vec::new();
    for &seed in &u.seeds {
        let rep = ucp_uniqueness_experiment(&UcpEvenConfig {
            m: u.m,
            i: u.i,
            seed,
            directions: u.directions.unwrap_or(base.directions),
            samples: u.samples.unwrap_or(base.samples),
            half_width: u.half_width.unwrap_or(base.half_width),
        })?;
        ok &= rep.passed;
        r.value(format!("seed {seed} margin"), rep.margin);
        reports.push(rep);
    }
    r.extra("reports", &reports);
    r.passed = Some(ok);
    r.finish(out)
}

fn selftest(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    if let Some(bad) = cfg.selftest.criteria.iter().find(|&&c| c == 0 || c > CRITERIA) {
        return Err(Failure::Usage(format!("no criterion {bad}; ids run from 1 to {CRITERIA}")));
    }
    let results = run_selected(&cfg.selftest.criteria);
    let mut r = Report::new("selftest");
    for c in &results {
        println!("{}", c.line());
        r.value(format!("criterion {} metric", c.id), c.metric);
        r.timing.insert(format!("criterion {}", c.id), c.seconds);
    }
    r.passed = Some(results.iter().all(|c| c.passed));
    r.extra("criteria", &results);
    r.finish(out)
}
