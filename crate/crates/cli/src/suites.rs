use std::f64::consts::{FRAC_PI_4, LN_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use fockops_core::coherent::{
    coherent_state, composition_phase, displacement, glauber_reconstruct,
    regularized_trace_plane_integral, regularized_trace_u, resolution_identity_coherent,
    u_element_closed, CoherentMethod,
};
use fockops_core::fock::project_safe;
use fockops_core::quadrature::{conjecture_integral, DiskGrid, PlaneGrid};
use fockops_core::schwinger::paris_residual;
use fockops_core::special::{
    assoc_laguerre, gauss_laguerre, laguerre_generating_closed, laguerre_recurrence,
    laguerre_sequence, ln_gamma,
};
use fockops_core::su11::{
    decomposition_residual, disentangle_residual, generalized_coherent_state,
    glauber_su11_reconstruct, perelomov_state, resolution_identity_su11, trace_v_closed,
    trace_v_numeric, v_element_closed, v_operator, DefiningRep, DiskPoint,
};
use fockops_core::{ComplexMatrix, Result, SafeSector, SpinWeight, TruncatedSpace};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::options::{Options, Suite};
use crate::report::{sort_reports, CheckReport, Outcome, Params, PassMode};

/// Largest increase tolerated between successive cutoff doublings.
pub const DOUBLING_FLOOR: f64 = 1e-12;

/// Multiple of the quadrature tolerance by which the su(1,1) Glauber
/// reconstruction must miss the true element.
pub const FAILURE_MARGIN: f64 = 50.0;

const COMPOSITION_SEED: u64 = 0x5eed_2009;

type Run = Box<dyn FnOnce() -> Result<Outcome> + Send>;

/// One check, ready to run.
pub struct Job {
    check: String,
    params: Params,
    cutoff: usize,
    safe_sector: usize,
    tol: f64,
    run: Run,
}

impl Job {
    fn new(
        check: &str,
        params: Params,
        cutoff: usize,
        safe_sector: usize,
        tol: f64,
        run: impl FnOnce() -> Result<Outcome> + Send + 'static,
    ) -> Self {
        Self {
            check: check.into(),
            params,
            cutoff,
            safe_sector,
            tol,
            run: Box::new(run),
        }
    }

    pub fn check(&self) -> &str {
        &self.check
    }

    pub fn execute(self) -> CheckReport {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(self.run));
        let runtime_ms = start.elapsed().as_millis() as u64;
        let mut params = self.params.into_map();
        let failure = |msg: String| (vec![], vec![], f64::NAN, f64::NAN, false, msg);
        let (computed, reference, abs_error, rel_error, pass, error) = match result {
            Ok(Ok(o)) => {
                let pass = o.passes(self.tol);
                params.extend(o.notes);
                (
                    o.computed,
                    o.reference,
                    o.abs_error,
                    o.rel_error,
                    pass,
                    String::new(),
                )
            }
            Ok(Err(e)) => failure(e.to_string()),
            Err(p) => failure(panic_message(p)),
        };
        if !error.is_empty() {
            params.insert("error".into(), error.into());
        }
        CheckReport {
            check: self.check,
            params,
            computed,
            reference,
            abs_error,
            rel_error,
            tolerance: self.tol,
            pass,
            cutoff: self.cutoff,
            safe_sector: self.safe_sector,
            runtime_ms,
        }
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    let msg = p
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown".into());
    format!("panic: {msg}")
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn z_grid(o: &Options, default: &[Complex64]) -> Vec<Complex64> {
    o.z().map_or_else(|| default.to_vec(), |z| vec![z])
}

fn k_grid(o: &Options, default: &[f64]) -> Vec<f64> {
    o.two_k.map_or_else(|| default.to_vec(), |k| vec![k])
}

fn plane_grid(o: &Options) -> Result<PlaneGrid> {
    PlaneGrid::new(
        o.radius.unwrap_or(PlaneGrid::DEFAULT_RADIUS),
        o.radial_nodes.unwrap_or(PlaneGrid::DEFAULT_NODES),
        o.angular_nodes.unwrap_or(PlaneGrid::DEFAULT_NODES),
    )
}

fn disk_grid(o: &Options) -> Result<DiskGrid> {
    DiskGrid::new(
        o.s_max.unwrap_or(DiskGrid::DEFAULT_S_MAX),
        o.radial_nodes.unwrap_or(DiskGrid::DEFAULT_RADIAL_NODES),
        o.angular_nodes.unwrap_or(DiskGrid::DEFAULT_ANGULAR_NODES),
    )
}

fn plane_params(o: &Options) -> Params {
    let g = PlaneGrid::default();
    Params::new()
        .num("radius", o.radius.unwrap_or(g.radius()))
        .int("radial_nodes", o.radial_nodes.unwrap_or(g.radial_nodes()))
        .int(
            "angular_nodes",
            o.angular_nodes.unwrap_or(g.angular_nodes()),
        )
}

fn disk_params(p: Params, o: &Options) -> Params {
    let g = DiskGrid::default();
    p.num("s_max", o.s_max.unwrap_or(g.s_max()))
        .int("radial_nodes", o.radial_nodes.unwrap_or(g.radial_nodes()))
        .int(
            "angular_nodes",
            o.angular_nodes.unwrap_or(g.angular_nodes()),
        )
}

/// Entry with the largest deviation over a `rows x rows` block.
fn worst_element(
    rows: usize,
    mut f: impl FnMut(usize, usize) -> Result<(Complex64, Complex64)>,
) -> Result<Outcome> {
    let mut worst = (-1.0, 0, 0, c(0.0, 0.0), c(0.0, 0.0));
    for m in 0..rows {
        for n in 0..rows {
            let (got, want) = f(n, m)?;
            let d = (got - want).norm();
            if d > worst.0 {
                worst = (d, n, m, got, want);
            }
        }
    }
    let (_, n, m, got, want) = worst;
    Ok(Outcome::complex(got, want, PassMode::Absolute)
        .note("n", n)
        .note("m", m)
        .note("elements", rows * rows))
}

fn max_deviation(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_abs()
}

fn u_elements(o: &Options) -> Vec<Job> {
    let n = o.cutoff.unwrap_or(256);
    let rows = o.safe_sector.unwrap_or(31);
    let mut jobs = Vec::new();
    for z in z_grid(o, &[c(0.3, 0.4), c(1.2, 0.0), c(0.0, 2.0)]) {
        jobs.push(Job::new(
            "u-elements",
            Params::new().z("z", z),
            n,
            rows,
            o.tol.unwrap_or(1e-9),
            move || {
                let space = TruncatedSpace::single_mode(n)?;
                SafeSector::new(rows, &space)?;
                let u = displacement(&space, z)?.matrix.matrix;
                worst_element(rows, |i, j| Ok((u[(i, j)], u_element_closed(i, j, z))))
            },
        ));
    }
    let sector = o.safe_sector.unwrap_or(n / 4);
    for z in z_grid(
        o,
        &[
            c(0.5, 0.0),
            c(1.0, 1.0),
            c(2.0, 0.0),
            c(0.0, 2.0),
            c(-1.2, 1.6),
        ],
    ) {
        jobs.push(Job::new(
            "u-elements.coherent-series",
            Params::new().z("z", z),
            n,
            n,
            o.tol.unwrap_or(1e-10),
            move || {
                let space = TruncatedSpace::single_mode(n)?;
                let series = coherent_state(&space, z, CoherentMethod::Series)?.amplitudes;
                let vacuum = coherent_state(&space, z, CoherentMethod::DisplacedVacuum)?.amplitudes;
                let k = (0..n)
                    .max_by(|&a, &b| {
                        (series[a] - vacuum[a])
                            .norm()
                            .total_cmp(&(series[b] - vacuum[b]).norm())
                    })
                    .unwrap_or(0);
                Ok(Outcome::complex(vacuum[k], series[k], PassMode::Absolute).note("n", k))
            },
        ));
        jobs.push(Job::new(
            "u-elements.eigenvalue",
            Params::new().z("z", z),
            n,
            sector,
            o.tol.unwrap_or(1e-8),
            move || {
                let space = TruncatedSpace::single_mode(n)?;
                SafeSector::new(sector, &space)?;
                let v = coherent_state(&space, z, CoherentMethod::DisplacedVacuum)?.amplitudes;
                let r = (0..sector)
                    .map(|k| (v[k + 1] * ((k + 1) as f64).sqrt() - z * v[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                Ok(Outcome::residual(r))
            },
        ));
    }
    jobs
}

/// Points uniform in the disk of radius 1.5 from a fixed seed.
pub fn composition_pairs(count: usize) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(COMPOSITION_SEED);
    let mut point = || {
        let r = 1.5 * rng.random::<f64>().sqrt();
        Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
    };
    (0..count).map(|_| (point(), point())).collect()
}

fn u_composition(o: &Options) -> Vec<Job> {
    let n = o.cutoff.unwrap_or(256);
    let sector = o.safe_sector.unwrap_or(n / 4);
    let tol = o.tol.unwrap_or(1e-9);
    let mut pairs = composition_pairs(5);
    if let Some(z) = o.z() {
        pairs.iter_mut().for_each(|p| p.0 = z);
    }
    let residual =
        move |f: &dyn Fn(&ComplexMatrix, &ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
              z: Complex64,
              w: Complex64|
              -> Result<Outcome> {
            let space = TruncatedSpace::single_mode(n)?;
            let s = SafeSector::new(sector, &space)?;
            let u = |x| displacement(&space, x).map(|d| d.matrix.matrix);
            let d = f(&u(z)?, &u(w)?, &u(z + w)?);
            Ok(Outcome::residual(project_safe(&d, s)?.op_norm()))
        };
    let mut jobs = Vec::new();
    for (z, w) in pairs {
        let p = Params::new().z("z", z).z("w", w);
        jobs.push(Job::new(
            "u-composition.addition",
            p.clone(),
            n,
            sector,
            tol,
            move || {
                residual(
                    &|uz, uw, uzw| uzw - &(uz * uw).scale(composition_phase(z, w)),
                    z,
                    w,
                )
            },
        ));
        jobs.push(Job::new(
            "u-composition.commutation",
            p.clone(),
            n,
            sector,
            tol,
            move || {
                let phase = (z * w.conj() - z.conj() * w).exp();
                residual(&|uz, uw, _| &(uz * uw) - &(uw * uz).scale(phase), z, w)
            },
        ));
        jobs.push(Job::new(
            "u-composition.inverse",
            Params::new().z("z", z),
            n,
            sector,
            tol,
            move || {
                let space = TruncatedSpace::single_mode(n)?;
                let s = SafeSector::new(sector, &space)?;
                let u = displacement(&space, z)?.matrix.matrix;
                let v = displacement(&space, -z)?.matrix.matrix;
                let d = &(&u * &v) - &ComplexMatrix::identity(n);
                Ok(Outcome::residual(project_safe(&d, s)?.op_norm()))
            },
        ));
    }
    jobs
}

fn u_trace(o: &Options) -> Vec<Job> {
    let mut jobs = Vec::new();
    for z in z_grid(o, &[c(0.5, 0.0), c(1.0, 1.0), c(2.0, 0.0)]) {
        for t in [0.0, 0.5, 0.9, 0.95] {
            jobs.push(Job::new(
                "u-trace.partial-sum",
                Params::new().z("z", z).num("t", t),
                0,
                0,
                o.tol.unwrap_or(1e-8),
                move || {
                    let r = regularized_trace_u(z, t)?;
                    Ok(Outcome::complex(r.numeric, r.closed, PassMode::Relative)
                        .note("terms", r.terms)
                        .note("tail_bound", r.tail_bound))
                },
            ));
        }
    }
    for t in [0.5, 0.9, 0.99, 0.999] {
        let opts = o.clone();
        jobs.push(Job::new(
            "u-trace.plane-integral",
            plane_params(o).num("t", t),
            0,
            0,
            o.tol.unwrap_or(1e-6),
            move || {
                let v = regularized_trace_plane_integral(t, &plane_grid(&opts)?)?;
                Ok(Outcome::real(v, 2.0 / (1.0 + t), PassMode::Absolute))
            },
        ));
        let opts = o.clone();
        jobs.push(Job::new(
            "u-trace.unit-limit",
            plane_params(o).num("t", t),
            0,
            0,
            1.0 - t,
            move || {
                let v = regularized_trace_plane_integral(t, &plane_grid(&opts)?)?;
                Ok(Outcome::real(v, 1.0, PassMode::Absolute))
            },
        ));
    }
    jobs
}

fn glauber(o: &Options) -> Vec<Job> {
    let n = o.cutoff.unwrap_or(256);
    let rows = o.safe_sector.unwrap_or(6);
    let opts = o.clone();
    vec![Job::new(
        "glauber",
        plane_params(o),
        n,
        rows,
        o.tol.unwrap_or(1e-3),
        move || {
            let space = TruncatedSpace::single_mode(n)?;
            let sector = SafeSector::new(rows, &space)?;
            let mut a = ComplexMatrix::zeros(n);
            a[(0, 0)] = c(1.0, 0.0);
            let rec = glauber_reconstruct(&a, &space, &plane_grid(&opts)?, sector)?;
            worst_element(rows, |i, j| Ok((rec[(i, j)], a[(i, j)])))
        },
    )]
}

const LAGUERRE_X: [f64; 11] = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0];

fn laguerre(o: &Options) -> Vec<Job> {
    let mut jobs = Vec::new();
    for alpha in [0.0, 1.0, 2.5] {
        jobs.push(Job::new(
            "laguerre.recurrence",
            Params::new()
                .num("alpha", alpha)
                .int("n_max", 60)
                .num("x_max", 50.0),
            0,
            0,
            o.tol.unwrap_or(1e-10),
            move || {
                let mut worst = (-1.0, 0, 0.0, 0.0, 0.0, 1.0);
                for n in 0..=60 {
                    for x in LAGUERRE_X {
                        let got = assoc_laguerre(n, alpha, x);
                        let want = laguerre_recurrence(n, alpha, x);
                        // |L_n^(alpha)(x)| <= binom(n+alpha, n) e^(x/2)
                        let nf = n as f64;
                        let env = (ln_gamma(nf + alpha + 1.0)
                            - ln_gamma(nf + 1.0)
                            - ln_gamma(alpha + 1.0)
                            + x / 2.0)
                            .exp();
                        let rel = (got - want).abs() / env;
                        if rel > worst.0 {
                            worst = (rel, n, x, got, want, env);
                        }
                    }
                }
                let (_, n, x, got, want, env) = worst;
                Ok(Outcome::with_errors(
                    vec![got],
                    vec![want],
                    (got - want).abs(),
                    PassMode::Relative,
                    env,
                )
                .note("n", n)
                .note("x", x)
                .note("scale", env))
            },
        ));
        jobs.push(Job::new(
            "laguerre.orthogonality",
            Params::new().num("alpha", alpha).int("n_max", 15),
            0,
            0,
            o.tol.unwrap_or(1e-8),
            move || {
                let (x, w) = gauss_laguerre(40, alpha);
                let table: Vec<Vec<f64>> = x
                    .iter()
                    .map(|&xi| laguerre_sequence(15, alpha, xi).iter().copied().collect())
                    .collect();
                let h =
                    |n: usize| (ln_gamma(n as f64 + alpha + 1.0) - ln_gamma(n as f64 + 1.0)).exp();
                let mut worst = (-1.0, 0, 0, 0.0, 0.0);
                for n in 0..=15 {
                    for m in 0..=15 {
                        let g: f64 = table.iter().zip(&w).map(|(l, wi)| wi * l[n] * l[m]).sum();
                        let got = g / (h(n) * h(m)).sqrt();
                        let want = if n == m { 1.0 } else { 0.0 };
                        if (got - want).abs() > worst.0 {
                            worst = ((got - want).abs(), n, m, got, want);
                        }
                    }
                }
                let (d, n, m, got, want) = worst;
                Ok(
                    Outcome::with_errors(vec![got], vec![want], d, PassMode::Relative, 1.0)
                        .note("n", n)
                        .note("m", m),
                )
            },
        ));
    }
    for (x, t, alpha) in [
        (1.0, 0.5, 0.0),
        (5.0, 0.3, 1.0),
        (2.0, 0.8, 2.5),
        (0.5, 0.9, 0.0),
    ] {
        jobs.push(Job::new(
            "laguerre.generating",
            Params::new().num("x", x).num("t", t).num("alpha", alpha),
            0,
            0,
            o.tol.unwrap_or(1e-10),
            move || {
                let closed = laguerre_generating_closed(x, t, alpha)?;
                let seq = laguerre_sequence(400, alpha, x);
                let mut partial = Vec::new();
                let (mut acc, mut tn) = (0.0, 1.0);
                for (n, l) in seq.iter().enumerate() {
                    acc += tn * l;
                    tn *= t;
                    if [25, 50, 100, 200].contains(&n) {
                        partial.push(((acc - closed) / closed).abs());
                    }
                }
                Ok(Outcome::real(acc, closed, PassMode::Relative)
                    .note("partial_rel_errors_25_50_100_200", partial))
            },
        ));
    }
    jobs
}

fn su11_elements(o: &Options) -> Vec<Job> {
    let n = o.cutoff.unwrap_or(256);
    let rows = o.safe_sector.unwrap_or(21);
    let mut jobs = Vec::new();
    for two_k in k_grid(o, &[1.0, 2.0, 3.0, 2.5]) {
        for z in z_grid(o, &[c(1.5, 0.0), c(0.0, 1.5), c(-0.9, 1.2), c(0.5, 0.2)]) {
            let p = Params::new().num("two_k", two_k).z("z", z);
            jobs.push(Job::new(
                "su11-elements",
                p.clone(),
                n,
                rows,
                o.tol.unwrap_or(1e-8),
                move || {
                    let space = TruncatedSpace::spin_k(n, two_k)?;
                    SafeSector::new(rows, &space)?;
                    let spin = SpinWeight::new(two_k)?;
                    let v = v_operator(&space, z)?.matrix;
                    worst_element(rows, |i, j| {
                        Ok((v[(i, j)], v_element_closed(spin, i, j, z)?))
                    })
                },
            ));
            let sector = o.safe_sector.unwrap_or(n / 4);
            jobs.push(Job::new(
                "su11-elements.perelomov",
                p,
                n,
                sector,
                o.tol.unwrap_or(1e-10),
                move || {
                    let space = TruncatedSpace::spin_k(n, two_k)?;
                    SafeSector::new(sector, &space)?;
                    let got = generalized_coherent_state(&space, z)?.amplitudes;
                    let want = perelomov_state(&space, DiskPoint::from_z(z))?.amplitudes;
                    let k = (0..sector)
                        .max_by(|&a, &b| {
                            (got[a] - want[a])
                                .norm()
                                .total_cmp(&(got[b] - want[b]).norm())
                        })
                        .unwrap_or(0);
                    Ok(Outcome::complex(got[k], want[k], PassMode::Absolute).note("n", k))
                },
            ));
        }
    }
    jobs
}

fn su11_trace(o: &Options) -> Vec<Job> {
    let defaults = [c(0.5, 0.0), c(LN_2, 0.0), c(1.5, 0.0)];
    let mut jobs = Vec::new();
    let tol = o.tol.unwrap_or(1e-6);
    let trace = |two_k: f64, z: Complex64| -> Result<(f64, f64, f64, f64)> {
        let spin = SpinWeight::new(two_k)?;
        let t = trace_v_numeric(spin, z, 60)?;
        Ok((
            t.abel,
            trace_v_closed(spin, z)?,
            t.abel_error,
            t.partial_sum,
        ))
    };
    for two_k in k_grid(o, &[2.0, 3.0, 4.0, 2.5]) {
        for z in z_grid(o, &defaults) {
            jobs.push(Job::new(
                "su11-trace",
                Params::new().num("two_k", two_k).z("z", z),
                0,
                0,
                tol,
                move || {
                    let (abel, closed, err, partial) = trace(two_k, z)?;
                    Ok(Outcome::real(abel, closed, PassMode::Relative)
                        .note("abel_error", err)
                        .note("partial_sum_60", partial))
                },
            ));
        }
    }
    jobs.push(Job::new(
        "su11-trace.spot",
        Params::new().num("two_k", 2.0).z("z", c(LN_2, 0.0)),
        0,
        0,
        tol,
        move || {
            let (abel, closed, _, _) = trace(2.0, c(LN_2, 0.0))?;
            Ok(Outcome::real(abel, 1.0 / 3.0, PassMode::Relative).note("closed", closed))
        },
    ));
    jobs
}

fn disentangle(o: &Options) -> Vec<Job> {
    let n = o.cutoff.unwrap_or(512);
    let rows = o.safe_sector.unwrap_or(64);
    let tol = o.tol.unwrap_or(1e-8);
    let zs = z_grid(
        o,
        &[
            c(1.5, 0.0),
            Complex64::from_polar(1.5, FRAC_PI_4),
            c(0.3, -0.4),
        ],
    );
    let mut jobs = Vec::new();
    for two_k in k_grid(o, &[0.5, 1.0, 2.0, 3.0]) {
        for &z in &zs {
            jobs.push(Job::new(
                "disentangle",
                Params::new().num("two_k", two_k).z("z", z),
                n,
                rows,
                tol,
                move || {
                    let space = TruncatedSpace::spin_k(n, two_k)?;
                    let r = disentangle_residual(&space, z, SafeSector::new(rows, &space)?)?;
                    Ok(Outcome::residual(r.forward))
                },
            ));
        }
    }
    for &z in &zs {
        jobs.push(Job::new(
            "disentangle.defining",
            Params::new().z("z", z),
            2,
            2,
            tol,
            move || {
                let [lhs, forward, reversed] = DefiningRep::new().disentangled(z)?;
                Ok(Outcome::residual(
                    max_deviation(&lhs, &forward).max(max_deviation(&lhs, &reversed)),
                )
                .note("forward", max_deviation(&lhs, &forward))
                .note("reversed", max_deviation(&lhs, &reversed)))
            },
        ));
    }
    jobs
}

fn decomposition(o: &Options) -> Vec<Job> {
    let n = o.cutoff.unwrap_or(256);
    let rows = o.safe_sector.unwrap_or(11);
    let mut jobs = Vec::new();
    for two_k in k_grid(o, &[1.0, 2.0, 3.0]) {
        for z in z_grid(o, &[c(0.5, 0.0), c(0.5, 0.5), c(1.0, 0.0)]) {
            let p = Params::new().num("two_k", two_k).z("z", z);
            let residual = move |cut: usize| -> Result<f64> {
                let space = TruncatedSpace::spin_k(cut, two_k)?;
                decomposition_residual(&space, z, rows)
            };
            jobs.push(Job::new(
                "decomposition",
                p.clone(),
                n,
                rows,
                o.tol.unwrap_or(1e-8),
                move || Ok(Outcome::residual(residual(n)?)),
            ));
            let cutoffs = [n / 4, n / 2, n];
            jobs.push(Job::new(
                "decomposition.doubling",
                p.int("cutoff_start", n / 4),
                n,
                rows,
                DOUBLING_FLOOR,
                move || {
                    let r = cutoffs
                        .iter()
                        .map(|&k| residual(k))
                        .collect::<Result<Vec<_>>>()?;
                    let rise = r
                        .windows(2)
                        .map(|w| (w[1] - w[0]).max(0.0))
                        .fold(0.0, f64::max);
                    Ok(Outcome::with_errors(
                        r,
                        vec![],
                        rise,
                        PassMode::Absolute,
                        0.0,
                    ))
                },
            ));
        }
    }
    jobs
}

fn resolution(o: &Options) -> Vec<Job> {
    let n = o.cutoff.unwrap_or(256);
    let rows = o.safe_sector.unwrap_or(8);
    let tol = o.tol.unwrap_or(1e-3);
    let mut jobs = Vec::new();
    let opts = o.clone();
    jobs.push(Job::new(
        "resolution.coherent",
        plane_params(o),
        n,
        rows,
        tol,
        move || {
            let space = TruncatedSpace::single_mode(n)?;
            let r = resolution_identity_coherent(
                &space,
                &plane_grid(&opts)?,
                SafeSector::new(rows, &space)?,
            )?;
            Ok(Outcome::residual(max_deviation(
                &r,
                &ComplexMatrix::identity(rows),
            )))
        },
    ));
    for two_k in k_grid(o, &[1.5, 2.0, 3.0]) {
        let opts = o.clone();
        jobs.push(Job::new(
            "resolution.su11",
            disk_params(Params::new().num("two_k", two_k), o),
            n,
            rows,
            tol,
            move || {
                let space = TruncatedSpace::spin_k(n, two_k)?;
                let r = resolution_identity_su11(
                    &space,
                    &disk_grid(&opts)?,
                    SafeSector::new(rows, &space)?,
                )?;
                Ok(Outcome::residual(max_deviation(
                    &r,
                    &ComplexMatrix::identity(rows),
                )))
            },
        ));
    }
    jobs
}

fn conjecture(o: &Options) -> Vec<Job> {
    let tol = o.tol.unwrap_or(1e-4);
    let chis = o.chi.map_or_else(|| vec![0.2, 0.5, 0.8], |c| vec![c]);
    let mut runs: Vec<(&str, f64, f64)> = Vec::new();
    for two_k in k_grid(o, &[1.5, 2.0, 3.0]) {
        runs.extend(chis.iter().map(|&chi| ("conjecture", two_k, chi)));
    }
    if o.limit_study == Some(true) {
        let chis = o.chi.map_or_else(|| vec![0.5], |c| vec![c]);
        for two_k in [1.5, 1.25, 1.125, 1.0625] {
            runs.extend(
                chis.iter()
                    .map(|&chi| ("conjecture.limit-study", two_k, chi)),
            );
        }
    }
    runs.into_iter()
        .map(|(check, two_k, chi)| {
            let opts = o.clone();
            let p = disk_params(Params::new().num("two_k", two_k).num("chi", chi), o);
            Job::new(check, p, 0, 0, tol, move || {
                let v = conjecture_integral(two_k, c(chi, 0.0), &disk_grid(&opts)?, tol / 10.0)?;
                Ok(Outcome::real(v.numeric, v.rhs, PassMode::Relative)
                    .note("imaginary", v.imaginary)
                    .note("s_max_used", v.s_max_used)
                    .note("tail_bound", v.tail_bound))
            })
        })
        .collect()
}

fn paris(o: &Options) -> Vec<Job> {
    let m = o.cutoff.unwrap_or(48);
    let q = o.safe_sector.unwrap_or(12);
    z_grid(o, &[c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.7), c(0.6, 0.8)])
        .into_iter()
        .map(|z| {
            Job::new(
                "paris",
                Params::new().z("z", z),
                m,
                q,
                o.tol.unwrap_or(1e-6),
                move || {
                    let r = paris_residual(&TruncatedSpace::two_mode(m)?, z, q)?;
                    Ok(Outcome::residual(r.residual)
                        .note("vacuum_lhs_re", r.vacuum_lhs.re)
                        .note("vacuum_rhs_re", r.vacuum_rhs.re))
                },
            )
        })
        .collect()
}

/// Reconstructed `(n, n)` entry of `|K,0><K,0|` from the su(1,1) Glauber integral.
fn glauber_su11_entry(
    two_k: f64,
    n: usize,
    cutoff: usize,
    rows: usize,
    grid: &DiskGrid,
) -> Result<Complex64> {
    let space = TruncatedSpace::spin_k(cutoff, two_k)?;
    let sector = SafeSector::new(rows, &space)?;
    let mut a = ComplexMatrix::zeros(cutoff);
    a[(0, 0)] = c(1.0, 0.0);
    Ok(glauber_su11_reconstruct(&a, &space, grid, sector)?[(n, n)])
}

fn glauber_failure(o: &Options) -> Vec<Job> {
    let n = o.cutoff.unwrap_or(64);
    let rows = o.safe_sector.unwrap_or(4);
    let tol = o.tol.unwrap_or(1e-3);
    let two_k = o.two_k.unwrap_or(2.0);
    let p = disk_params(Params::new().num("two_k", two_k), o);
    let (o1, o2, o3) = (o.clone(), o.clone(), o.clone());
    vec![
        Job::new(
            "glauber-failure.vacuum",
            p.clone(),
            n,
            rows,
            tol,
            move || {
                let v = glauber_su11_entry(two_k, 0, n, rows, &disk_grid(&o1)?)?;
                Ok(Outcome::complex(v, c(1.0, 0.0), PassMode::Absolute))
            },
        ),
        Job::new(
            "glauber-failure.excited",
            p.clone(),
            n,
            rows,
            tol,
            move || {
                let v = glauber_su11_entry(two_k, 1, n, rows, &disk_grid(&o2)?)?;
                Ok(Outcome::complex(
                    v,
                    c(-1.0 / two_k, 0.0),
                    PassMode::Absolute,
                ))
            },
        ),
        Job::new("glauber-failure.deviation", p, n, rows, 0.0, move || {
            let v = glauber_su11_entry(two_k, 1, n, rows, &disk_grid(&o3)?)?;
            let need = FAILURE_MARGIN * tol;
            Ok(Outcome::with_errors(
                vec![v.norm()],
                vec![need],
                (need - v.norm()).max(0.0),
                PassMode::Absolute,
                need,
            )
            .note("true_element", 0.0))
        }),
    ]
}

pub fn jobs_for(suite: Suite, o: &Options) -> Vec<Job> {
    match suite {
        Suite::UElements => u_elements(o),
        Suite::UComposition => u_composition(o),
        Suite::UTrace => u_trace(o),
        Suite::Glauber => glauber(o),
        Suite::Laguerre => laguerre(o),
        Suite::Su11Elements => su11_elements(o),
        Suite::Su11Trace => su11_trace(o),
        Suite::Disentangle => disentangle(o),
        Suite::Decomposition => decomposition(o),
        Suite::Resolution => resolution(o),
        Suite::Conjecture => conjecture(o),
        Suite::Paris => paris(o),
        Suite::GlauberFailure => glauber_failure(o),
        Suite::All => Suite::MEMBERS
            .iter()
            .flat_map(|&s| jobs_for(s, o))
            .collect(),
    }
}

/// Runs every check of `suite` on up to `o.jobs` threads; reports are sorted
/// by check id, then params.
pub fn run_suite(suite: Suite, o: &Options) -> Vec<CheckReport> {
    let jobs = jobs_for(suite, o);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(o.jobs.unwrap_or(0))
        .build()
        .expect("thread pool");
    let mut reports: Vec<CheckReport> =
        pool.install(|| jobs.into_par_iter().map(Job::execute).collect());
    sort_reports(&mut reports);
    reports
}
