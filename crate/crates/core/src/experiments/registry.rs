use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::estimators::{
    chi2, cross_cov, emp_cov, ks_weighted, linear_fit, loglog_slope, mean_se, sup_dist, total_variation,
};
use super::report::{Criterion, Curve, ExperimentReport, ReferenceKind, Tolerance};
use crate::error::{Error, Result};
use crate::exact::{
    constrained_partitions, crit_renewal, excess_partition, excess_partitions, excursion_law,
    extended_constants_auto, extension_law, extension_laws, tau_law, ExactSampler, ExtensionLaw, WalkStart,
};
use crate::mc::{critical_excursions, perfect_critical_sample, replicate, BeadWindow, ConditionedBead, RngStream};
use crate::polymer::{geometry, AuxWalk, PolymerPath};
use crate::thermo::{
    a_beta, beta_c, crit_constants, g_tilde, mu_prob, variance_function, xi_field, ModelParams, WulffShape,
};

/// Names accepted by [`run`].
pub const EXPERIMENTS: [&str; 7] = [
    "ext_lln",
    "crit_extension",
    "crit_prefactor",
    "collapsed_extension",
    "wulff_shape",
    "fluctuations",
    "renewal_tail",
];

/// Inputs of an experiment; absent fields take the experiment's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentParams {
    pub beta: Option<f64>,
    pub sizes: Vec<usize>,
    pub q: Option<f64>,
    pub n: Option<usize>,
    pub replicas: Option<usize>,
    pub seed: u64,
    pub budget: Option<u64>,
    pub quick: bool,
}

impl ExperimentParams {
    pub fn seeded(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn quick(mut self) -> Self {
        self.quick = true;
        self
    }

    fn sizes_or(&self, full: &[usize], quick: &[usize]) -> Vec<usize> {
        if !self.sizes.is_empty() {
            let mut s = self.sizes.clone();
            s.sort_unstable();
            s
        } else if self.quick {
            quick.to_vec()
        } else {
            full.to_vec()
        }
    }

    fn replicas_or(&self, full: usize, quick: usize) -> usize {
        self.replicas.unwrap_or(if self.quick { quick } else { full })
    }

    fn n_or(&self, full: usize, quick: usize) -> usize {
        self.n.unwrap_or(if self.quick { quick } else { full })
    }
}

/// Runs the named experiment.
pub fn run(name: &str, params: &ExperimentParams) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = match name {
        "ext_lln" => ext_lln(params),
        "crit_extension" => crit_extension(params),
        "crit_prefactor" => crit_prefactor(params),
        "collapsed_extension" => collapsed_extension(params),
        "wulff_shape" => wulff_shape(params),
        "fluctuations" => fluctuations(params),
        "renewal_tail" => renewal_tail(params),
        other => Err(Error::InvalidParameter(format!(
            "unknown experiment {other:?}; known: {}",
            EXPERIMENTS.join(", ")
        ))),
    }?;
    report.wall_time = start.elapsed();
    Ok(report)
}

fn rel(name: &str, m: f64, r: f64, kind: ReferenceKind, tol: f64) -> Criterion {
    Criterion::new(name, m, None, r, kind, Tolerance::Relative { tol })
}

fn below(name: &str, m: f64, bound: f64, kind: ReferenceKind) -> Criterion {
    Criterion::new(name, m, None, bound, kind, Tolerance::Below)
}

/// Rescaled law `(N/L^{2/3}, P(N))`.
fn rescaled(law: &ExtensionLaw, power: f64) -> Vec<(f64, f64)> {
    let s = (law.length as f64).powf(power);
    law.probs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &p)| (n as f64 / s, p))
        .collect()
}

fn ext_lln(p: &ExperimentParams) -> Result<ExperimentReport> {
    let beta = p.beta.unwrap_or(0.8);
    let l = *p.sizes_or(&[512], &[256]).last().unwrap();
    let l_mc = l.min(if p.quick { 128 } else { 256 });
    let reps = p.replicas_or(2000, 400);
    let mut r = ExperimentReport::new(
        "ext_lln",
        json!({"beta": beta, "L": l, "L_mc": l_mc, "replicas": reps, "seed": p.seed}),
    );
    let k = extended_constants_auto(beta)?;
    r.measure("f_tilde", k.f_tilde, None)
        .measure("e_beta", k.e_beta, None)
        .measure("sigma_beta", k.sigma_beta, None)
        .measure("inverse mean pattern length", k.c_renewal, None)
        .measure("renewal truncation tail", k.tail_bound, None);

    let law = extension_law(beta, l)?;
    r.check(rel("E[N]/L vs e(beta)", law.mean() / l as f64, k.e_beta, ReferenceKind::Oracle, 0.02));
    let z = (excess_partition(beta, l)? - k.f_tilde * l as f64).exp();
    r.check(rel("Z_L exp(-f L) vs 1/E[sigma]", z, k.c_renewal, ReferenceKind::Oracle, 0.02));
    let zc = (constrained_partitions(beta, l)?[l] - k.f_tilde * l as f64).exp();
    r.check(rel(
        "constrained Z^c_L exp(-f L) vs 1/E[sigma]",
        zc,
        k.c_renewal,
        ReferenceKind::Oracle,
        0.02,
    ));
    r.note("Z_L = exp(beta) Z^c_{L+1}, so the unconstrained ratio tends to exp(beta + f)/E[sigma]");

    // middle line of exact samples: Var(sqrt(N) M(s)) = s sigma^2
    let sampler = ExactSampler::new(beta, l_mc)?;
    let grid = [0.2, 0.4, 0.6, 0.8, 1.0];
    let samples = replicate(p.seed, 0, reps, |_, rng| -> Result<Vec<f64>> {
        let path = sampler.sample(l_mc, rng)?;
        let g = geometry(&path);
        let n = path.extension();
        Ok(grid
            .iter()
            .map(|&s| {
                let i = (s * (n + 1) as f64).floor() as usize;
                (n as f64).sqrt() * g.middle(i) / (n + 1) as f64
            })
            .collect())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let cov = emp_cov(&samples)?;
    let var: Vec<f64> = (0..grid.len()).map(|i| cov.cov[(i, i)]).collect();
    let var_se: Vec<f64> = (0..grid.len()).map(|i| cov.se[(i, i)]).collect();
    let s2: f64 = grid.iter().map(|s| s * s).sum();
    let slope = grid.iter().zip(&var).map(|(s, v)| s * v).sum::<f64>() / s2;
    let slope_se = grid.iter().zip(&var_se).map(|(s, e)| (s * e).powi(2)).sum::<f64>().sqrt() / s2;
    r.check(Criterion::new(
        "middle-line variance slope vs sigma^2",
        slope,
        Some(slope_se),
        k.sigma_beta * k.sigma_beta,
        ReferenceKind::Oracle,
        Tolerance::Sigma { k: 3.0 },
    ));
    let fit = linear_fit(&grid, &var)?;
    r.measure("middle-line variance intercept", fit.intercept, None);
    r.curves.push(Curve::new("middle_line_variance", grid.to_vec(), var, Some(var_se)));
    Ok(r)
}

fn crit_extension(p: &ExperimentParams) -> Result<ExperimentReport> {
    let beta = beta_c();
    let sizes = p.sizes_or(&[512, 2048], &[128, 512]);
    let (l0, l1) = (sizes[0], *sizes.last().unwrap());
    let reps = p.replicas_or(2000, 500);
    let budget = p.budget.unwrap_or(1 << 32);
    let mut r = ExperimentReport::new(
        "crit_extension",
        json!({"beta": beta, "L": [l0, l1], "replicas": reps, "seed": p.seed, "budget": budget}),
    );
    let laws = extension_laws(beta, l1)?;
    let (a, b) = (&laws[l0 - 1], &laws[l1 - 1]);
    let power = 2.0 / 3.0;
    let d = ks_weighted(&rescaled(a, power), &rescaled(b, power))?;
    r.check(below("KS of N/L^(2/3) between the two sizes", d, 0.05, ReferenceKind::Oracle));
    for law in [a, b] {
        r.measure(
            format!("E[N]/L^(2/3) at L={}", law.length),
            law.mean() / (law.length as f64).powf(power),
            None,
        );
    }

    let draws = replicate(p.seed, 0, reps, |_, rng| perfect_critical_sample(l0, rng, budget))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let emp: Vec<(f64, f64)> = draws
        .iter()
        .map(|s| (s.path.extension() as f64 / (l0 as f64).powf(power), 1.0))
        .collect();
    let d_mc = ks_weighted(&emp, &rescaled(a, power))?;
    // 1% critical value of the one-sample KS statistic
    r.check(below(
        "KS of perfect samples vs exact law",
        d_mc,
        1.628 / (reps as f64).sqrt(),
        ReferenceKind::Oracle,
    ));
    let trials: Vec<f64> = draws.iter().map(|s| s.trials as f64).collect();
    let t = mean_se(&trials)?;
    let c = ModelParams::new(beta)?.c_beta;
    r.check(Criterion::new(
        "mean trials vs c/Z_L",
        t.value,
        t.se,
        c / a.log_z.exp(),
        ReferenceKind::Oracle,
        Tolerance::Sigma { k: 3.0 },
    ));
    for law in [a, b] {
        let (x, y): (Vec<f64>, Vec<f64>) = rescaled(law, power).into_iter().unzip();
        r.curves.push(Curve::new(format!("extension_law_L{}", law.length), x, y, None));
    }
    Ok(r)
}

fn crit_prefactor(p: &ExperimentParams) -> Result<ExperimentReport> {
    let beta = beta_c();
    let sizes = p.sizes_or(&[64, 128, 256, 512], &[64, 128, 256, 512]);
    let l_max = *sizes.last().unwrap();
    let mut r = ExperimentReport::new("crit_prefactor", json!({"beta": beta, "L": sizes}));
    let logs = excess_partitions(beta, l_max)?;
    let x: Vec<f64> = sizes.iter().map(|&l| l as f64).collect();
    let z: Vec<f64> = sizes.iter().map(|&l| logs[l].exp()).collect();
    let fit = loglog_slope(&x, &z)?;
    r.check(Criterion::new(
        "log-log slope of Z_L",
        fit.slope,
        Some(fit.slope_se),
        -2.0 / 3.0,
        ReferenceKind::Theory,
        Tolerance::Absolute { tol: 0.05 },
    ));
    let k = crit_constants(beta)?;
    let pref = (l_max as f64).powf(2.0 / 3.0) * z.last().unwrap();
    r.check(rel("L^(2/3) Z_L vs prefactor", pref, k.z_prefactor, ReferenceKind::Theory, 0.15));
    let xb = ModelParams::new(beta)?.x;
    let renewal = (1.0 + xb) / ((12.0 * std::f64::consts::PI * xb).sqrt() * k.airy_integral);
    r.measure("renewal-theory prefactor (1+x)/(sqrt(12 pi x) I)", renewal, None);
    let scaled: Vec<f64> = x.iter().zip(&z).map(|(l, z)| l.powf(2.0 / 3.0) * z).collect();
    r.curves.push(Curve::new("scaled_partition", x, scaled, None));
    Ok(r)
}

fn collapsed_extension(p: &ExperimentParams) -> Result<ExperimentReport> {
    let beta = p.beta.unwrap_or(2.0);
    let sizes = p.sizes_or(&[256, 512, 1024], &[64, 128, 256]);
    let l_max = *sizes.last().unwrap();
    let mut r = ExperimentReport::new("collapsed_extension", json!({"beta": beta, "L": sizes}));
    let a = a_beta(beta)?;
    let g = g_tilde(beta, a)?;
    r.measure("a(beta)", a, None).measure("G(a(beta))", g, None);
    let laws = extension_laws(beta, l_max)?;
    let law = &laws[l_max - 1];
    r.check(rel(
        "argmax N vs a sqrt(L)",
        law.argmax() as f64,
        a * (l_max as f64).sqrt(),
        ReferenceKind::Theory,
        0.05,
    ));
    let rates: Vec<f64> = sizes.iter().map(|&l| laws[l - 1].log_z / (l as f64).sqrt()).collect();
    r.check(rel("log Z_L / sqrt(L) vs G(a)", *rates.last().unwrap(), g, ReferenceKind::Theory, 0.05));
    let gaps: Vec<f64> = rates.iter().map(|v| (v - g).abs()).collect();
    let violations = gaps.windows(2).filter(|w| w[1] >= w[0]).count();
    r.check(Criterion::new(
        "non-decreasing gaps to G(a)",
        violations as f64,
        None,
        0.0,
        ReferenceKind::Identity,
        Tolerance::Absolute { tol: 0.0 },
    ));
    let x: Vec<f64> = sizes.iter().map(|&l| l as f64).collect();
    r.curves.push(Curve::new("rate", x, rates, None));
    Ok(r)
}

fn bead_params(p: &ExperimentParams) -> Result<(f64, f64)> {
    let beta = p.beta.unwrap_or(2.0);
    let q = match p.q {
        Some(q) => q,
        None => a_beta(beta)?.powi(-2),
    };
    Ok((beta, q))
}

fn path_of(walk: &AuxWalk) -> Result<PolymerPath> {
    let v = walk.values();
    let stretches = (1..v.len()).map(|i| if i % 2 == 1 { v[i] } else { -v[i] }).collect();
    PolymerPath::new(stretches)
}

fn bead_samples(
    p: &ExperimentParams,
    beta: f64,
    n: usize,
    q: f64,
    reps: usize,
    stream0: u64,
) -> Result<(BeadWindow, Vec<(AuxWalk, u64)>)> {
    let window = BeadWindow::default_for(n);
    let budget = p.budget.unwrap_or(10_000_000);
    let bead = ConditionedBead::new(beta, n, q, window)?;
    let walks = replicate(p.seed, stream0, reps, |_, rng| {
        bead.sample(rng, budget)
            .map(|s| (s.walk, s.trials))
            .ok_or(Error::BudgetExhausted { trials: budget })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok((window, walks))
}

fn wulff_shape(p: &ExperimentParams) -> Result<ExperimentReport> {
    let (beta, q) = bead_params(p)?;
    let n = p.n_or(400, 200);
    let reps = p.replicas_or(2000, 300);
    let (window, walks) = bead_samples(p, beta, n, q, reps, 0)?;
    let mut r = ExperimentReport::new(
        "wulff_shape",
        json!({"beta": beta, "q": q, "n": n, "replicas": reps, "seed": p.seed,
               "window": {"w": window.w, "w_prime": window.w_prime}}),
    );
    let shape = WulffShape::new(beta, q)?;
    let nf = n as f64;
    let mut mean = vec![0.0; n + 1];
    let mut upper = vec![0.0; n + 2];
    let mut lower = vec![0.0; n + 2];
    for (w, _) in &walks {
        for (i, v) in w.values().iter().enumerate() {
            mean[i] += v.unsigned_abs() as f64 / (nf * reps as f64);
        }
        let g = geometry(&path_of(w)?);
        for i in 0..=n + 1 {
            upper[i] += g.upper(i) / ((nf + 1.0) * reps as f64);
            lower[i] += g.lower(i) / ((nf + 1.0) * reps as f64);
        }
    }
    let target: Vec<f64> = (0..=n).map(|i| shape.profile(i as f64 / nf)).collect::<Result<_>>()?;
    let d = sup_dist(&mean, &target)?;
    r.check(below("sup |mean profile - gamma*_q|", d, 0.05, ReferenceKind::Theory));
    let env: Vec<f64> = (0..=n + 1)
        .map(|i| shape.envelope(i as f64 / (nf + 1.0)))
        .collect::<Result<_>>()?;
    let neg: Vec<f64> = env.iter().map(|v| -v).collect();
    r.check(below("sup |mean upper envelope - gamma*/2|", sup_dist(&upper, &env)?, 0.05, ReferenceKind::Theory));
    r.check(below("sup |mean lower envelope + gamma*/2|", sup_dist(&lower, &neg)?, 0.05, ReferenceKind::Theory));
    let trials: Vec<f64> = walks.iter().map(|w| w.1 as f64).collect();
    let t = mean_se(&trials)?;
    r.measure("acceptance rate", 1.0 / t.value, None);
    let ts: Vec<f64> = (0..=n).map(|i| i as f64 / nf).collect();
    r.curves.push(Curve::new("mean_profile", ts.clone(), mean, None));
    r.curves.push(Curve::new("wulff_profile", ts, target, None));
    Ok(r)
}

fn fluctuations(p: &ExperimentParams) -> Result<ExperimentReport> {
    let (beta, q) = bead_params(p)?;
    let sizes = p.sizes_or(&[100, 400], &[100]);
    let reps = p.replicas_or(4000, 1000);
    let field_reps = p.replicas_or(100_000, 10_000).max(reps);
    let grid: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
    let mut r = ExperimentReport::new(
        "fluctuations",
        json!({"beta": beta, "q": q, "n": sizes, "replicas": reps, "field_replicas": field_reps,
               "grid": grid, "seed": p.seed}),
    );
    r.note("fluctuations are scaled by sqrt(n) of the conditioned walk rather than sqrt(N_l)");

    // reference covariances; the conditioned one is computed on a fine grid
    let fine: Vec<f64> = (1..=200).map(|i| i as f64 / 200.0).collect();
    let cond = xi_field(beta, q, &fine, true)?;
    let idx: Vec<usize> = grid.iter().map(|t| (t * 200.0).round() as usize - 1).collect();
    let x = ModelParams::new(beta)?.x;
    let free = xi_field(beta, q, &grid, false)?;
    let k: Vec<f64> = grid.iter().map(|&t| variance_function(x, &free.tilt, t)).collect();
    let ref_free = |i: usize, j: usize| k[i.min(j)];
    let ref_cond = |i: usize, j: usize| cond.covariance[(idx[i], idx[j])];

    // Gaussian sampler self-checks
    let mut rng = RngStream::new(p.seed, u64::MAX);
    let worst = (0..100)
        .map(|_| {
            let s = cond.sample(&mut rng);
            let c = cond.constraint_values(&s);
            c[0].abs().max(c[1].abs())
        })
        .fold(0.0, f64::max);
    r.check(below("conditioned field constraint residual", worst, 1e-10, ReferenceKind::Identity));
    let xs: Vec<Vec<f64>> = (0..field_reps).map(|_| free.sample(&mut rng)).collect();
    let c = emp_cov(&xs)?;
    let mut worst_z: f64 = 0.0;
    for i in 0..grid.len() {
        for j in 0..=i {
            worst_z = worst_z.max((c.cov[(i, j)] - ref_free(i, j)).abs() / c.se[(i, j)]);
        }
    }
    r.check(below("field covariance: worst |z| over entries", worst_z, 3.0, ReferenceKind::Theory));

    let max_rel = |emp: &nalgebra::DMatrix<f64>, want: &dyn Fn(usize, usize) -> f64| {
        let scale = (0..grid.len()).map(|i| want(i, i).abs()).fold(0.0, f64::max);
        let mut d: f64 = 0.0;
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                d = d.max((emp[(i, j)] - want(i, j)).abs());
            }
        }
        d / scale
    };
    let shape = WulffShape::new(beta, q)?;
    let gamma: Vec<f64> = grid.iter().map(|&t| shape.profile(t)).collect::<Result<_>>()?;
    for (si, &n) in sizes.iter().enumerate() {
        let (_, walks) = bead_samples(p, beta, n, q, reps, (si as u64 + 1) << 32)?;
        let nf = n as f64;
        let mut prof = Vec::with_capacity(reps);
        let mut mid = Vec::with_capacity(reps);
        for (w, _) in &walks {
            let v = w.values();
            // 2M_i is the alternating sum of the increments up to i
            let mut two_m = vec![0i64; n + 1];
            for i in 1..=n {
                let u = v[i] - v[i - 1];
                two_m[i] = two_m[i - 1] + if i % 2 == 1 { u } else { -u };
            }
            let at = |t: f64| (t * nf).floor() as usize;
            prof.push(
                grid.iter()
                    .zip(&gamma)
                    .map(|(&t, g)| (v[at(t)].unsigned_abs() as f64 - nf * g) / nf.sqrt())
                    .collect::<Vec<f64>>(),
            );
            mid.push(grid.iter().map(|&t| two_m[at(t)] as f64 / nf.sqrt()).collect::<Vec<f64>>());
        }
        let cp = emp_cov(&prof)?;
        let cm = emp_cov(&mid)?;
        let cx = cross_cov(&mid, &prof)?;
        let dp = max_rel(&cp.cov, &ref_cond);
        let dm = max_rel(&cm.cov, &ref_free);
        let last = si + 1 == sizes.len();
        if last {
            r.check(below("profile covariance: max relative deviation", dp, 0.15, ReferenceKind::Theory));
            r.check(below("middle-line covariance: max relative deviation", dm, 0.15, ReferenceKind::Theory));
            for i in 0..grid.len() {
                r.check(Criterion::new(
                    format!("cross-covariance at t={}", grid[i]),
                    cx.cov[(i, i)],
                    Some(cx.se[(i, i)]),
                    0.0,
                    ReferenceKind::Theory,
                    Tolerance::Sigma { k: 3.0 },
                ));
            }
        }
        r.measure(format!("profile covariance deviation at n={n}"), dp, None);
        r.measure(format!("middle-line covariance deviation at n={n}"), dm, None);
        let diag: Vec<f64> = (0..grid.len()).map(|i| cp.cov[(i, i)]).collect();
        let want: Vec<f64> = (0..grid.len()).map(|i| ref_cond(i, i)).collect();
        r.curves.push(Curve::new(format!("profile_variance_n{n}"), grid.to_vec(), diag, None));
        r.curves.push(Curve::new(format!("conditioned_field_variance_n{n}"), grid.to_vec(), want, None));
    }
    Ok(r)
}

fn renewal_tail(p: &ExperimentParams) -> Result<ExperimentReport> {
    let beta = p.beta.unwrap_or_else(beta_c);
    let n_max = p.n_or(4096, 1024);
    let count = p.replicas_or(100_000, 20_000);
    let cap = p.budget.unwrap_or(10_000);
    let mut r = ExperimentReport::new(
        "renewal_tail",
        json!({"beta": beta, "n_max": n_max, "excursions": count, "step_cap": cap, "seed": p.seed}),
    );
    let k = crit_constants(beta)?;
    let x = ModelParams::new(beta)?.x;

    if beta == beta_c() {
        let l = if p.quick { 128 } else { 256 };
        let ren = crit_renewal(l)?;
        let dp = excess_partitions(beta, l)?;
        let worst = (1..=l)
            .map(|i| (ren.z_tilde[i] / dp[i].exp() - 1.0).abs())
            .fold(0.0, f64::max);
        r.check(below("renewal vs direct Z_L, max relative error", worst, 1e-8, ReferenceKind::Oracle));
    }

    let law = excursion_law(beta, n_max, WalkStart::Mu)?;
    let nf = n_max as f64;
    r.check(rel(
        "n^(4/3) P(X=n) vs c_1",
        nf.powf(4.0 / 3.0) * law[n_max],
        k.c_tail,
        ReferenceKind::Theory,
        0.10,
    ));
    let tau = tau_law(beta, n_max, WalkStart::Mu)?;
    let points: Vec<usize> = (0..5).map(|i| n_max >> (4 - i)).collect();
    let scaled: Vec<f64> = points.iter().map(|&n| (n as f64).powf(1.5) * tau[n]).collect();
    let gaps: Vec<f64> = scaled.iter().map(|v| (v - k.c_tau).abs()).collect();
    let violations = gaps.windows(2).filter(|w| w[1] >= w[0]).count();
    r.check(Criterion::new(
        "n^(3/2) P(tau=n): non-decreasing gaps to C_tau",
        violations as f64,
        None,
        0.0,
        ReferenceKind::Theory,
        Tolerance::Absolute { tol: 0.0 },
    ));
    r.check(rel("n^(3/2) P(tau=n) vs C_tau", *scaled.last().unwrap(), k.c_tau, ReferenceKind::Theory, 0.10));
    r.measure("c_1", k.c_tail, None).measure("C_tau", k.c_tau, None);
    let xs: Vec<f64> = points.iter().map(|&n| n as f64).collect();
    r.curves.push(Curve::new("tau_tail", xs, scaled, None));
    let tail_n: Vec<f64> = (1..=16).map(|i| (i * n_max / 16) as f64).collect();
    let tail_y: Vec<f64> = tail_n.iter().map(|&n| n.powf(4.0 / 3.0) * law[n as usize]).collect();
    r.curves.push(Curve::new("x_tail", tail_n, tail_y, None));

    let mut rng = RngStream::new(p.seed, 0);
    let recs = critical_excursions(beta, count, WalkStart::Mu, cap, &mut rng)?;
    let vt: Vec<i64> = recs.iter().filter_map(|e| e.vtau).collect();
    let m = 60i64;
    let mut emp = vec![0.0; (2 * m + 2) as usize];
    let mut want = vec![0.0; (2 * m + 2) as usize];
    for &v in &vt {
        let i = if v.abs() <= m { (v + m) as usize } else { (2 * m + 1) as usize };
        emp[i] += 1.0 / vt.len() as f64;
    }
    for v in -m..=m {
        want[(v + m) as usize] = mu_prob(x, v);
    }
    want[(2 * m + 1) as usize] = x.powi(m as i32 + 1);
    r.check(below("TV of V_tau vs mu_beta", total_variation(&emp, &want), 0.02, ReferenceKind::Theory));

    let xs: Vec<f64> = recs.iter().map(|e| e.x() as f64).collect();
    let (a, b) = (&xs[..xs.len() - 1], &xs[1..]);
    let ma = a.iter().sum::<f64>() / a.len() as f64;
    let mb = b.iter().sum::<f64>() / b.len() as f64;
    let sab: f64 = a.iter().zip(b).map(|(u, v)| (u - ma) * (v - mb)).sum();
    let saa: f64 = a.iter().map(|u| (u - ma).powi(2)).sum();
    let sbb: f64 = b.iter().map(|v| (v - mb).powi(2)).sum();
    let corr = sab / (saa * sbb).sqrt();
    r.check(Criterion::new(
        "correlation of consecutive X",
        corr,
        Some(1.0 / (a.len() as f64).sqrt()),
        0.0,
        ReferenceKind::Theory,
        Tolerance::Sigma { k: 3.0 },
    ));
    r.measure("censored excursions", recs.iter().filter(|e| e.censored()).count() as f64, None);

    let top = 200.min(n_max);
    let exact = excursion_law(beta, top, WalkStart::Mu)?;
    let mut counts = vec![0.0; top];
    for e in &recs {
        let xv = e.x() as usize;
        if (1..=top).contains(&xv) {
            counts[xv - 1] += 1.0;
        }
    }
    let test = chi2(&counts, &exact[1..=top], recs.len() as f64, 5.0)?;
    r.check(Criterion::new(
        "chi-square p-value of X law (n <= 200)",
        test.p_value,
        None,
        0.01,
        ReferenceKind::Oracle,
        Tolerance::Above,
    ));
    r.measure("chi-square statistic", test.statistic, None)
        .measure("chi-square dof", test.dof as f64, None);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name() {
        let e = run("nope", &ExperimentParams::default()).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn reports_are_reproducible() {
        let p = ExperimentParams {
            sizes: vec![32, 64],
            replicas: Some(50),
            seed: 3,
            ..ExperimentParams::default()
        };
        let a = run("crit_extension", &p).unwrap().to_json().unwrap();
        let b = run("crit_extension", &p).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn prefactor_slope_near_two_thirds() {
        let r = run("crit_prefactor", &ExperimentParams::default()).unwrap();
        assert!(r.criterion("log-log slope of Z_L").unwrap().passed);
    }
}
