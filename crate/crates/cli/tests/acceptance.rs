//! Acceptance checks, one status line per criterion.
//!
//! Dataset-bound criteria look for `ETTh1.csv` and `ETTm2.csv` under
//! `$TSABLATE_DATA_DIR` and report BLOCKED when they are missing.
//! Set `TSABLATE_ACCEPTANCE_STRICT=1` to count BLOCKED as a failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use chrono::{Duration as Span, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

use tsablate::data::{fewshot_subset, make_splits, FewShotSpec, SplitSpec};
use tsablate::eval::{bootstrap_ci, perturb_window, PerturbationKind};
use tsablate::models::{
    decompose_series, instance_denormalize, instance_normalize, AblationHead, DLinearModel,
    ForecastModel, ModelConfig, ModelKind,
};
use tsablate::nnkernel::{
    grad_check_report, mse_loss_with_grad, LayerNorm, LinearLayer, MultiHeadAttention, Parameter,
    Parameterized, Tensor2, TransformerBlock,
};
use tsablate_cli::commands;
use tsablate_cli::record::ResultRecord;
use tsablate_cli::{config::DATA_DIR_ENV, ExperimentConfig};

const GRAD_TOL: f64 = 1e-4;
const GRAD_H: f64 = 1e-5;
const GRAD_SEEDS: u64 = 20;
const IDENTITY_TOL: f64 = 1e-12;
const IDENTITY_CASES: u64 = 1000;

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Pass,
    Fail,
    Blocked,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: String) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Self { status, detail }
    }

    fn blocked(detail: impl Into<String>) -> Self {
        Self { status: Status::Blocked, detail: detail.into() }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self { status: Status::Fail, detail: detail.into() }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(rows: usize, cols: usize, scale: f64, r: &mut impl Rng) -> Tensor2 {
    Tensor2::from_fn(rows, cols, |_, _| r.random_range(-scale..scale))
}

// ---------------------------------------------------------------- gradients

struct WithInput<L> {
    layer: L,
    input: Parameter,
}

impl<L: Parameterized> Parameterized for WithInput<L> {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        self.layer.visit_params(prefix, f);
        f("input".into(), &self.input);
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        self.layer.visit_params_mut(prefix, f);
        f("input".into(), &mut self.input);
    }
}

type LayerPass<L> = fn(&mut L, &Tensor2, &Tensor2) -> tsablate::Result<(Tensor2, Tensor2)>;

fn layer_error<L: Parameterized>(layer: L, input: Tensor2, probe: Tensor2, pass: LayerPass<L>) -> f64 {
    let mut m = WithInput { layer, input: Parameter::new(input) };
    grad_check_report(
        &mut m,
        |m| {
            let x = m.input.value.clone();
            let (y, dx) = pass(&mut m.layer, &x, &probe)?;
            m.input.grad.add_assign(&dx)?;
            Ok(y.mul_elem(&probe)?.sum())
        },
        GRAD_H,
    )
    .map_or(f64::INFINITY, |r| r.max_relative_error)
}

fn model_error(kind: ModelKind, seed: u64) -> f64 {
    let mut cfg = ModelConfig::new(kind, 32, 4, 2);
    (cfg.patch_len, cfg.stride, cfg.d_model, cfg.heads) = (8, 4, 8, 2);
    (cfg.k_trend, cfg.k_seasonal, cfg.ma_kernel) = (7, 3, 5);
    let Ok(mut model) = ForecastModel::new(cfg, seed) else {
        return f64::INFINITY;
    };
    let mut r = rng(1000 + seed);
    let inputs: Vec<Tensor2> = (0..2).map(|_| uniform(32, 2, 2.0, &mut r)).collect();
    let targets: Vec<Tensor2> = (0..2).map(|_| uniform(4, 2, 2.0, &mut r)).collect();
    let scale = 1.0 / inputs.len() as f64;
    grad_check_report(
        &mut model,
        |m| {
            let (preds, cache) = m.forward(&inputs)?;
            let mut loss = 0.0;
            let mut grads = Vec::new();
            for (p, t) in preds.iter().zip(&targets) {
                let (l, g) = mse_loss_with_grad(p, t)?;
                loss += l * scale;
                grads.push(g.scale(scale));
            }
            m.backward(&cache, &grads)?;
            Ok(loss)
        },
        GRAD_H,
    )
    .map_or(f64::INFINITY, |r| r.max_relative_error)
}

fn criterion_gradients() -> Outcome {
    let start = Instant::now();
    let mut worst: Vec<(String, f64)> = Vec::new();
    let mut note = |name: &str, err: f64| match worst.iter_mut().find(|(n, _)| n == name) {
        Some((_, w)) => *w = w.max(err),
        None => worst.push((name.to_string(), err)),
    };
    for seed in 0..GRAD_SEEDS {
        let mut r = rng(seed);
        let lin = LinearLayer::new(6, 4, &mut r);
        let (x, p) = (uniform(5, 6, 1.0, &mut r), uniform(5, 4, 1.0, &mut r));
        note("linear", layer_error(lin, x, p, |l, x, p| {
            let (y, c) = l.forward(x)?;
            Ok((y, l.backward(&c, p)?))
        }));

        let mut ln = LayerNorm::new(8);
        ln.gamma.value = uniform(1, 8, 1.5, &mut r);
        ln.beta.value = uniform(1, 8, 0.5, &mut r);
        let (x, p) = (uniform(4, 8, 2.0, &mut r), uniform(4, 8, 1.0, &mut r));
        note("layernorm", layer_error(ln, x, p, |l, x, p| {
            let (y, c) = l.forward(x)?;
            Ok((y, l.backward(&c, p)?))
        }));

        let mha = MultiHeadAttention::new(8, 2, &mut r).unwrap();
        let (x, p) = (uniform(16, 8, 1.0, &mut r), uniform(16, 8, 1.0, &mut r));
        note("attention", layer_error(mha, x, p, |l, x, p| {
            let (y, c) = l.forward_batch(x, 8)?;
            Ok((y, l.backward(&c, p)?))
        }));

        let block = TransformerBlock::new(8, 2, &mut r).unwrap();
        let (x, p) = (uniform(16, 8, 1.0, &mut r), uniform(16, 8, 1.0, &mut r));
        note("transformer", layer_error(block, x, p, |l, x, p| {
            let (y, c) = l.forward_batch(x, 8)?;
            Ok((y, l.backward(&c, p)?))
        }));

        let heads = [
            ("head-identity", AblationHead::Identity),
            ("head-attention", AblationHead::SingleAttention(MultiHeadAttention::new(8, 2, &mut r).unwrap())),
            ("head-transformer", AblationHead::SingleTransformer(TransformerBlock::new(8, 2, &mut r).unwrap())),
        ];
        for (name, head) in heads {
            let (x, p) = (uniform(8, 8, 1.0, &mut r), uniform(8, 8, 1.0, &mut r));
            note(name, layer_error(head, x, p, |l, x, p| {
                let (y, c) = l.forward_batch(x, 4)?;
                Ok((y, l.backward(&c, p)?))
            }));
        }

        for kind in ModelKind::ALL.iter().copied().filter(|k| k.is_trainable()) {
            note(kind.name(), model_error(kind, seed));
        }
    }
    let elapsed = start.elapsed();
    let (name, max) = worst
        .iter()
        .cloned()
        .fold((String::new(), 0.0), |a, b| if b.1 > a.1 { b } else { a });
    Outcome::check(
        max < GRAD_TOL && elapsed < Duration::from_secs(60),
        format!(
            "{} components x {GRAD_SEEDS} seeds, worst relative error {max:.2e} ({name}), {:.1}s",
            worst.len(),
            elapsed.as_secs_f64()
        ),
    )
}

// --------------------------------------------------------------- identities

fn criterion_identities() -> Outcome {
    let mut worst = [0.0f64; 4];
    for case in 0..IDENTITY_CASES {
        let mut r = rng(case);
        let (l, c) = (r.random_range(2..40), r.random_range(1..6));
        let offset = r.random_range(-5.0..5.0);
        let x = uniform(l, c, 3.0, &mut r).map(|v| v + offset);
        worst[0] = worst[0].max(match instance_normalize(&x) {
            Ok((z, s)) => instance_denormalize(&z, &s).map_or(f64::INFINITY, |b| b.max_abs_diff(&x)),
            Err(_) => f64::INFINITY,
        });

        let ks = 2 * r.random_range(0..5) + 1;
        let kt = ks + 2 * r.random_range(0..12);
        let x = uniform(r.random_range(1..60), c, 4.0, &mut r);
        worst[1] = worst[1].max(match decompose_series(&x, kt, ks) {
            Ok(d) => d.trend.add(&d.seasonal).and_then(|s| s.add(&d.residual)).map_or(f64::INFINITY, |s| s.max_abs_diff(&x)),
            Err(_) => f64::INFINITY,
        });

        let k = 2 * r.random_range(0..13) + 1;
        let model = DLinearModel::new(l, 3, k, &mut r).unwrap();
        let windows: Vec<Tensor2> = (0..3).map(|_| uniform(l, c, 4.0, &mut r)).collect();
        let (trend, rem) = model.split_trend(&windows).unwrap();
        let sum = trend.add(&rem).unwrap();
        for (bi, w) in windows.iter().enumerate() {
            for ch in 0..c {
                for (t, v) in w.column(ch).iter().enumerate() {
                    worst[2] = worst[2].max((sum.row(bi * c + ch)[t] - v).abs());
                }
            }
        }

        let x = uniform(2 * r.random_range(1..30), c, 4.0, &mut r);
        let once = perturb_window(&x, PerturbationKind::ExHalf, case);
        worst[3] = worst[3].max(perturb_window(&once, PerturbationKind::ExHalf, case).max_abs_diff(&x));
    }
    Outcome::check(
        worst.iter().all(|w| *w <= IDENTITY_TOL),
        format!(
            "{IDENTITY_CASES} cases each; max |diff| instance-norm {:.1e}, decomposition {:.1e}, dlinear {:.1e}, ex-half {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

// ---------------------------------------------------------------- bootstrap

fn criterion_bootstrap() -> Outcome {
    let start = Instant::now();
    let (trials, n) = (200u64, 500);
    let mut covered = 0;
    for trial in 0..trials {
        let mut r = rng(50_000 + trial);
        let errors: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
        match bootstrap_ci(&errors, 0.95, 1000, trial) {
            Ok(ci) if ci.lower <= 0.0 && 0.0 <= ci.upper => covered += 1,
            Ok(_) => {}
            Err(e) => return Outcome::fail(format!("bootstrap failed: {e}")),
        }
    }
    let coverage = covered as f64 / trials as f64;
    let elapsed = start.elapsed();
    Outcome::check(
        (coverage - 0.95).abs() <= 0.04 && elapsed < Duration::from_secs(120),
        format!("coverage {coverage:.3} over {trials} trials, {:.1}s", elapsed.as_secs_f64()),
    )
}

// ------------------------------------------------------------- experiments

fn dataset(name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(DATA_DIR_ENV)?;
    let path = Path::new(&dir).join(format!("{name}.csv"));
    path.is_file().then_some(path)
}

fn missing(name: &str) -> Outcome {
    Outcome::blocked(format!("dataset not found: {name}.csv (set {DATA_DIR_ENV})"))
}

fn experiment(data: &Path, kind: &str, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.data.path = Some(data.to_path_buf());
    cfg.model.kind = kind.into();
    cfg.model.lookback = Some(336);
    cfg.model.horizon = 96;
    cfg.output.dir = out.to_path_buf();
    cfg
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn comparable(r: &ResultRecord) -> Value {
    let mut v = serde_json::to_value(r).expect("records serialize");
    v.as_object_mut().unwrap().remove("wall_clock_seconds");
    v
}

fn reproduction(
    label: &str,
    cfg: ExperimentConfig,
    max_mae: f64,
    max_mse: f64,
    budget_min: u64,
) -> (Outcome, Option<ResultRecord>) {
    let (res, took) = timed(|| commands::train(cfg));
    match res {
        Ok(out) => {
            let m = &out.record.metrics;
            let ok = m.mae <= max_mae && m.mse <= max_mse && took <= Duration::from_secs(budget_min * 60);
            let detail = format!(
                "{label}: MAE {:.4} (<= {max_mae}), MSE {:.4} (<= {max_mse}), {:.1} min (<= {budget_min})",
                m.mae,
                m.mse,
                took.as_secs_f64() / 60.0
            );
            (Outcome::check(ok, detail), Some(out.record))
        }
        Err(e) => (Outcome::fail(format!("{label}: {e}")), None),
    }
}

fn criterion_meanp(etth1: &Path, out: &Path) -> Outcome {
    let (mae, mse) = (0.525, 0.753);
    match commands::evaluate(experiment(etth1, "meanp", out)) {
        Ok(r) => {
            let within = |v: f64, target: f64| (v - target).abs() <= 0.15 * target;
            Outcome::check(
                within(r.metrics.mae, mae) && within(r.metrics.mse, mse),
                format!(
                    "MeanP L=336 H=96: MAE {:.4} (target {mae} +-15%), MSE {:.4} (target {mse} +-15%)",
                    r.metrics.mae, r.metrics.mse
                ),
            )
        }
        Err(e) => Outcome::fail(e.to_string()),
    }
}

fn criterion_shuffle_order(etth1: &Path, trained: Option<&ResultRecord>, out: &Path) -> Outcome {
    let Some(checkpoint) = trained.and_then(|r| r.checkpoint.clone()) else {
        return Outcome::fail("no trained PAttn checkpoint from criterion 3");
    };
    let mut cfg = experiment(etth1, "pattn", out);
    cfg.eval.checkpoint = Some(checkpoint);
    cfg.eval.kinds = vec!["sf-all".into(), "sf-half".into()];
    let rec = match commands::ablate(cfg) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(e.to_string()),
    };
    let pct = |kind: &str| {
        rec.ablation
            .iter()
            .flatten()
            .find(|a| a.kind == kind)
            .and_then(|a| a.mse_degradation_pct)
    };
    match (pct("sf-all"), pct("sf-half")) {
        (Some(all), Some(half)) => Outcome::check(
            all > half && half >= 0.0,
            format!("MSE degradation sf-all {all:.2}% > sf-half {half:.2}% >= 0"),
        ),
        _ => Outcome::fail("ablation record lacks degradation values"),
    }
}

/// Hourly multichannel series shaped like an ETT file.
fn synthetic_csv(path: &Path, rows: usize, channels: usize, seed: u64) {
    let mut r = rng(seed);
    let start = NaiveDate::from_ymd_opt(2016, 7, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
    let mut s = String::from("date");
    for c in 0..channels {
        write!(s, ",x{c}").unwrap();
    }
    s.push('\n');
    let mut level = vec![0.0f64; channels];
    for t in 0..rows {
        write!(s, "{}", (start + Span::hours(t as i64)).format("%Y-%m-%d %H:%M:%S")).unwrap();
        for (c, lv) in level.iter_mut().enumerate() {
            *lv += 0.02 * r.sample::<f64, _>(StandardNormal);
            let day = (std::f64::consts::TAU * t as f64 / 24.0 + c as f64).sin();
            let week = 0.5 * (std::f64::consts::TAU * t as f64 / 168.0).cos();
            let v = *lv + (1.0 + 0.3 * c as f64) * day + week + 0.2 * r.sample::<f64, _>(StandardNormal);
            write!(s, ",{v:.5}").unwrap();
        }
        s.push('\n');
    }
    std::fs::write(path, s).expect("write synthetic csv");
}

fn criterion_fewshot(etth1: Option<&Path>, scratch: &Path) -> Outcome {
    const T: usize = 17_420;
    let splits = match make_splits(T, &SplitSpec::for_dataset("ETTh1"), 0) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(e.to_string()),
    };
    let subset = fewshot_subset(splits.train.clone(), &FewShotSpec { fraction: 0.1 }, 0);
    let rows = subset.as_ref().map_or(0, |r| r.len());
    if rows != 1045 {
        return Outcome::fail(format!("few-shot subset of T={T} has {rows} rows, expected 1045"));
    }

    let (data, source) = match etth1 {
        Some(p) => (p.to_path_buf(), "ETTh1"),
        None => {
            let p = scratch.join("ett_synthetic.csv");
            synthetic_csv(&p, T, 7, 7);
            (p, "synthetic 17420x7 stand-in")
        }
    };
    let mut cfg = experiment(&data, "pattn", &scratch.join("fewshot"));
    cfg.data.split = "60/20/20".into();
    cfg.data.fewshot = true;
    if etth1.is_none() {
        cfg.train.epochs = 1;
    }
    let (res, took) = timed(|| commands::train(cfg));
    let rec = match res {
        Ok(out) => out.record,
        Err(e) => return Outcome::fail(format!("few-shot PAttn on {source}: {e}")),
    };
    let windows = rec.training.as_ref().map_or(0, |t| t.train_windows);
    let expected = 1045 - 336 - 96 + 1;
    let results = scratch.join("fewshot").join(commands::RESULTS_FILE);
    let emitted = std::fs::read_to_string(&results).is_ok_and(|t| t.lines().count() == 1);
    let detail = format!(
        "subset 1045 rows; few-shot PAttn on {source}: {windows} train windows, record emitted: {emitted}, {:.1}s",
        took.as_secs_f64()
    );
    if windows != expected || !emitted || rec.method != "pattn-fewshot" {
        Outcome::fail(detail)
    } else if etth1.is_none() {
        Outcome::blocked(format!("{detail}; ETTh1.csv not found"))
    } else {
        Outcome::check(true, detail)
    }
}

fn criterion_determinism(etth1: Option<&Path>, first: Option<&ResultRecord>, scratch: &Path) -> Outcome {
    let (data, source) = match etth1 {
        Some(p) => (p.to_path_buf(), "ETTh1"),
        None => {
            let p = scratch.join("determinism.csv");
            synthetic_csv(&p, 3000, 3, 11);
            (p, "synthetic 3000x3 stand-in")
        }
    };
    let make = |dir: &str| {
        let mut cfg = experiment(&data, "dlinear", &scratch.join(dir));
        if etth1.is_none() {
            cfg.model.lookback = Some(96);
            cfg.model.horizon = 24;
            cfg.train.epochs = 3;
        }
        cfg
    };
    let a = match first {
        Some(r) => Ok(r.clone()),
        None => commands::train(make("det")).map(|o| o.record),
    };
    let b = commands::train(make("det")).map(|o| o.record);
    let (a, b) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::fail(e.to_string()),
    };
    let same = comparable(&a) == comparable(&b);
    let detail = format!("DLinear on {source}: records identical apart from wall clock: {same}");
    if !same {
        Outcome::fail(detail)
    } else if etth1.is_none() {
        Outcome::blocked(format!("{detail}; ETTh1.csv not found"))
    } else {
        Outcome::check(true, detail)
    }
}

fn main() {
    let strict = std::env::var("TSABLATE_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let scratch = tempfile::tempdir().expect("temp dir");
    let etth1 = dataset("ETTh1");
    let ettm2 = dataset("ETTm2");

    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "gradient verification", criterion_gradients()));
    results.push((2, "exact identities", criterion_identities()));

    let etth1_out = scratch.path().join("etth1");
    let mut pattn_etth1 = None;
    let mut dlinear_etth1 = None;
    match &etth1 {
        Some(p) => {
            let (o, r) = reproduction("PAttn ETTh1 L=336 H=96", experiment(p, "pattn", &etth1_out), 0.43, 0.43, 30);
            pattn_etth1 = r;
            results.push((3, "PAttn ETTh1 reproduction", o));
        }
        None => results.push((3, "PAttn ETTh1 reproduction", missing("ETTh1"))),
    }
    match &ettm2 {
        Some(p) => {
            let mut cfg = experiment(p, "pattn", &scratch.path().join("ettm2"));
            cfg.train.epochs = 6;
            let (o, _) = reproduction("PAttn ETTm2 L=336 H=96", cfg, 0.28, 0.19, 45);
            results.push((4, "PAttn ETTm2 reproduction", o));
        }
        None => results.push((4, "PAttn ETTm2 reproduction", missing("ETTm2"))),
    }
    match &etth1 {
        Some(p) => {
            let det_dir = scratch.path().join("det");
            let (o, r) = reproduction("DLinear ETTh1 L=336 H=96", experiment(p, "dlinear", &det_dir), 0.44, 0.42, 5);
            dlinear_etth1 = r;
            results.push((5, "DLinear ETTh1 reproduction", o));
            results.push((6, "MeanP baseline cross-check", criterion_meanp(p, &etth1_out)));
            results.push((7, "shuffle ordering", criterion_shuffle_order(p, pattn_etth1.as_ref(), &etth1_out)));
        }
        None => {
            results.push((5, "DLinear ETTh1 reproduction", missing("ETTh1")));
            results.push((6, "MeanP baseline cross-check", missing("ETTh1")));
            results.push((7, "shuffle ordering", missing("ETTh1")));
        }
    }
    results.push((8, "bootstrap calibration", criterion_bootstrap()));
    results.push((9, "few-shot protocol", criterion_fewshot(etth1.as_deref(), scratch.path())));
    results.push((10, "end-to-end determinism", criterion_determinism(etth1.as_deref(), dlinear_etth1.as_ref(), scratch.path())));

    println!();
    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = match o.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Blocked => "BLOCKED",
        };
        println!("criterion {n:>2} {tag:<7} {name}: {}", o.detail);
        if o.status == Status::Fail || (strict && o.status == Status::Blocked) {
            failed += 1;
        }
    }
    let blocked = results.iter().filter(|r| r.2.status == Status::Blocked).count();
    println!("\n{} passed, {failed} failed, {blocked} blocked{}", results.len() - failed - blocked, if strict { " (strict)" } else { "" });
    if failed > 0 {
        std::process::exit(1);
    }
}
