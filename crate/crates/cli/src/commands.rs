use std::fmt::Write as _;

use ipdsaw::exact::{excess_partitions, extended_constants_auto, extension_laws, ExactSampler, MixtureSampler, ENGINE_LIMIT};
use ipdsaw::experiments::{self, run_acceptance, Curve, ExperimentParams, ACCEPTANCE_IDS, QUICK_IDS};
use ipdsaw::mc::{
    critical_excursions, lifetime_sample, perfect_critical_sample, replicate, write_excursions_csv, BeadWindow,
    ConditionedBead,
};
use ipdsaw::exact::WalkStart;
use ipdsaw::polymer::{from_aux_walk, SampleRecord};
use ipdsaw::thermo::{a_beta, beta_c, crit_constants, g_tilde, ModelParams, WulffShape};
use ipdsaw::{Error, Result};
use serde_json::{json, Map, Value};

use crate::config::{Command, RunConfig, SampleKind};

/// What a command produced: the main artifact, extra files for `--out`,
/// run metadata, and whether its checks passed.
pub struct Output {
    pub name: String,
    pub body: String,
    pub extra: Vec<(String, String)>,
    pub meta: Map<String, Value>,
    pub passed: bool,
}

impl Output {
    fn new(name: &str, body: String) -> Self {
        Self {
            name: name.into(),
            body,
            extra: Vec::new(),
            meta: Map::new(),
            passed: true,
        }
    }
}

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn csv(curve: &Curve) -> Result<String> {
    let mut buf = Vec::new();
    curve.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is ascii"))
}

pub fn run(c: &RunConfig) -> Result<Output> {
    match c.command.as_ref().expect("resolved config has a command") {
        Command::Constants => constants(c),
        Command::Zpartition => zpartition(c),
        Command::Extension => extension(c),
        Command::Sample { kind } => sample(c, *kind),
        Command::Excursions => excursions(c),
        Command::Shape => shape(c),
        Command::Experiment { name } => experiment(c, name),
        Command::Selftest => selftest(c),
    }
}

fn constants(c: &RunConfig) -> Result<Output> {
    let beta = c.beta()?;
    let p = ModelParams::new(beta)?;
    let bc = beta_c();
    let mut v = json!({
        "beta": beta,
        "x": p.x,
        "c_beta": p.c_beta,
        "gamma_beta": p.gamma_beta,
        "var_increment": p.var_increment(),
        "beta_c": bc,
    });
    let regime = if beta < bc {
        let k = extended_constants_auto(beta)?;
        v["extended"] = serde_json::to_value(k)?;
        "extended"
    } else if beta == bc {
        v["critical"] = serde_json::to_value(crit_constants(beta)?)?;
        "critical"
    } else {
        let a = a_beta(beta)?;
        v["collapsed"] = json!({"a_beta": a, "g_tilde_at_a": g_tilde(beta, a)?});
        "collapsed"
    };
    v["regime"] = json!(regime);
    Ok(Output::new("constants.json", pretty(&v)?))
}

fn zpartition(c: &RunConfig) -> Result<Output> {
    let beta = c.beta()?;
    let l = c.max_length()?;
    let lz = excess_partitions(beta, l)?;
    let x = (1..=l).map(|i| i as f64).collect();
    let curve = Curve::new("log_z_tilde", x, lz[1..].to_vec(), None);
    Ok(Output::new("zpartition.csv", csv(&curve)?))
}

fn extension(c: &RunConfig) -> Result<Output> {
    let beta = c.beta()?;
    let lengths = c.lengths()?;
    let laws = extension_laws(beta, c.max_length()?)?;
    let mut summary = Vec::new();
    let mut out = Output::new("extension.json", String::new());
    for &l in &lengths {
        let law = &laws[l - 1];
        summary.push(json!({
            "L": l, "log_z_tilde": law.log_z, "mean": law.mean(), "argmax": law.argmax(),
        }));
        let x = (0..law.probs.len()).map(|n| n as f64).collect();
        let curve = Curve::new(format!("extension_L{l}"), x, law.probs.clone(), None);
        out.extra.push((format!("extension_L{l}.csv"), csv(&curve)?));
    }
    out.body = pretty(&json!({"beta": beta, "laws": summary}))?;
    Ok(out)
}

fn sample(c: &RunConfig, kind: SampleKind) -> Result<Output> {
    let beta = c.beta.unwrap_or_else(beta_c);
    let replicas = c.replicas.unwrap_or(1);
    let mut meta = Map::new();
    let records: Vec<SampleRecord> = match kind {
        SampleKind::Perfect => {
            let l = c.max_length()?;
            if beta != beta_c() {
                return Err(Error::Domain(format!("the perfect sampler runs at beta_c = {}", beta_c())));
            }
            let budget = c.budget.unwrap_or(1 << 40);
            collect(replicate(c.seed, 0, replicas, |_, rng| {
                perfect_critical_sample(l, rng, budget).map(|s| SampleRecord::new(&s.path, s.trials))
            }))?
        }
        SampleKind::Lifetime => {
            let l = c.max_length()?;
            let budget = c.budget.unwrap_or(100_000_000);
            collect(replicate(c.seed, 0, replicas, |_, rng| {
                lifetime_sample(beta, l, rng, budget)?
                    .map(|s| SampleRecord::new(&s.path, s.trials))
                    .ok_or(Error::BudgetExhausted { trials: budget })
            }))?
        }
        SampleKind::Exact => {
            let l = c.max_length()?;
            let sampler = match &c.cache {
                Some(dir) => ExactSampler::cached(beta, l, dir)?,
                None => ExactSampler::new(beta, l)?,
            };
            collect(replicate(c.seed, 0, replicas, |_, rng| {
                sampler.sample(l, rng).map(|p| SampleRecord::new(&p, 1))
            }))?
        }
        SampleKind::Mixture => {
            let l = c.max_length()?;
            let m = MixtureSampler::new(beta, l, ENGINE_LIMIT)?;
            meta.insert("epsilon".into(), json!(m.epsilon));
            meta.insert("epsilon_raw".into(), json!(m.epsilon_raw));
            collect(replicate(c.seed, 0, replicas, |_, rng| {
                m.sample(rng).map(|(_, p)| SampleRecord::new(&p, 1))
            }))?
        }
        SampleKind::Tilted => {
            let n = c.n.ok_or_else(|| Error::InvalidParameter("--n is required".into()))?;
            let q = match c.q {
                Some(q) => q,
                None => a_beta(beta)?.powi(-2),
            };
            let window = BeadWindow::default_for(n);
            let bead = ConditionedBead::new(beta, n, q, window)?;
            let budget = c.budget.unwrap_or(10_000_000);
            meta.insert("q".into(), json!(q));
            meta.insert("window".into(), json!({"w": window.w, "w_prime": window.w_prime}));
            collect(replicate(c.seed, 0, replicas, |_, rng| {
                let s = bead.sample(rng, budget).ok_or(Error::BudgetExhausted { trials: budget })?;
                Ok(SampleRecord::new(&from_aux_walk(&s.walk, n)?, s.trials))
            }))?
        }
    };
    let mut body = String::new();
    for r in &records {
        body.push_str(&serde_json::to_string(r)?);
        body.push('\n');
    }
    let mut out = Output::new("samples.jsonl", body);
    out.meta = meta;
    Ok(out)
}

fn collect<T>(v: Vec<Result<T>>) -> Result<Vec<T>> {
    v.into_iter().collect()
}

fn excursions(c: &RunConfig) -> Result<Output> {
    let beta = c.beta.unwrap_or_else(beta_c);
    let count = c.replicas.unwrap_or(10_000);
    let cap = c.budget.unwrap_or(10_000);
    let mut rng = ipdsaw::mc::RngStream::new(c.seed, 0);
    let records = critical_excursions(beta, count, WalkStart::Mu, cap, &mut rng)?;
    let mut buf = Vec::new();
    write_excursions_csv(&mut buf, &records)?;
    let mut out = Output::new("excursions.csv", String::from_utf8(buf).expect("csv is ascii"));
    out.meta
        .insert("censored".into(), json!(records.iter().filter(|r| r.censored()).count()));
    Ok(out)
}

fn shape(c: &RunConfig) -> Result<Output> {
    let beta = c.beta()?;
    let q = match c.q {
        Some(q) => q,
        None => a_beta(beta)?.powi(-2),
    };
    let points = c.n.unwrap_or(200);
    let w = WulffShape::new(beta, q)?;
    let mut body = String::from("t,profile,envelope\n");
    for i in 0..=points {
        let t = i as f64 / points as f64;
        writeln!(body, "{t:.17e},{:.17e},{:.17e}", w.profile(t)?, w.envelope(t)?).unwrap();
    }
    let mut out = Output::new("shape.csv", body);
    out.meta.insert("q".into(), json!(q));
    out.meta.insert("h0".into(), json!(w.tilt.h0));
    out.meta.insert("h1".into(), json!(w.tilt.h1));
    Ok(out)
}

fn experiment(c: &RunConfig, name: &str) -> Result<Output> {
    let params = ExperimentParams {
        beta: c.beta,
        sizes: c.l.clone(),
        q: c.q,
        n: c.n,
        replicas: c.replicas,
        seed: c.seed,
        budget: c.budget,
        quick: c.quick,
    };
    let report = experiments::run(name, &params)?;
    eprint!("{report}");
    let mut out = Output::new(&format!("{name}.json"), report.to_json()? + "\n");
    for curve in &report.curves {
        out.extra.push((format!("{}.csv", curve.name), csv(curve)?));
    }
    out.meta.insert("wall_time_s".into(), json!(report.wall_time.as_secs_f64()));
    out.passed = report.passed();
    Ok(out)
}

fn selftest(c: &RunConfig) -> Result<Output> {
    let ids: &[&str] = if c.quick { &QUICK_IDS } else { &ACCEPTANCE_IDS };
    let mut items = Vec::new();
    let mut passed = true;
    for id in ids {
        let r = run_acceptance(id, c.seed)?;
        eprintln!("{r}");
        passed &= r.passed();
        items.push(json!({
            "id": r.id,
            "title": r.title,
            "passed": r.passed(),
            "criteria": r.criteria,
        }));
    }
    let mut out = Output::new("selftest.json", pretty(&json!({"seed": c.seed, "items": items}))?);
    out.passed = passed;
    Ok(out)
}
