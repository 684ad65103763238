use std::time::Instant;

use acasimir::acoustics::{
    acp_pressure_eval, electrostatic_pressure, ideal_pressure, pressure_profile,
    repulsive_peak_locations, resonant_extrema, sign_changes, Extremum, PressureProfile,
    SignConvention,
};
use acasimir::mems::{bifurcation_value, lambda2, pull_in_with_shape, PullInResult};
use acasimir::{exec, Execution};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{PeakSign, QuadratureStats, SignReport, Stages, Table};

const MAX_REPORTED_PEAKS: usize = 64;

pub type CoreResult<T> = acasimir::Result<T>;

/// What a subcommand produced, before it is written out.
pub struct Run {
    pub table: Table,
    pub results: Value,
    pub report: Vec<String>,
    pub warnings: Vec<String>,
}

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub stats: QuadratureStats,
    pub stages: Stages,
    pub execution: Execution,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a RunConfig) -> Self {
        Self {
            cfg,
            stats: QuadratureStats::default(),
            stages: Stages::new(),
            execution: Execution::Parallel,
        }
    }

    fn profile(&mut self, gaps: &[f64]) -> CoreResult<PressureProfile> {
        let (cfg, exec) = (self.cfg, self.execution);
        let p = self.stages.time("pressure sweep", || {
            pressure_profile(
                gaps,
                &cfg.bandwidth(),
                &cfg.environment(),
                &cfg.tolerance,
                exec,
            )
        })?;
        self.stats.add(p.len(), p.evals, p.max_error);
        Ok(p)
    }

    /// `f(L̃) = L̃² D P(L̃ D)` at unit intensity, recording quadrature stats.
    fn shape(&self, l_tilde: f64) -> CoreResult<f64> {
        let cfg = self.cfg;
        let d = cfg.device.rest_gap;
        let unit = cfg.environment().with_intensity(1.0)?;
        let e = acp_pressure_eval(l_tilde * d, &cfg.bandwidth(), &unit, &cfg.tolerance)?;
        self.stats.record(&e);
        Ok(l_tilde * l_tilde * d * e.pressure)
    }

    fn shape_grid(&self, grid: &[f64]) -> CoreResult<Vec<f64>> {
        exec::try_map(self.execution, grid, |&x| self.shape(x))
    }

    /// Pressure sign at every predicted resonance inside `[lo, hi]`.
    pub fn sign_report(&mut self, lo: f64, hi: f64) -> CoreResult<SignReport> {
        let cfg = self.cfg;
        let band = cfg.bandwidth();
        let env = cfg.environment();
        let first = repulsive_peak_locations(&band, env.c(), 1)?[0];
        let n_max = ((hi / first).floor() as usize).clamp(1, MAX_REPORTED_PEAKS);
        let to_printed = SignConvention::Printed.prefactor() * env.sign.prefactor();
        let mut peaks = Vec::new();
        for (i, gap) in repulsive_peak_locations(&band, env.c(), n_max)?
            .into_iter()
            .enumerate()
        {
            if gap < lo || gap > hi {
                continue;
            }
            let e = acp_pressure_eval(gap, &band, &env, &cfg.tolerance)?;
            self.stats.record(&e);
            peaks.push(PeakSign {
                n: i + 1,
                gap_m: gap,
                pressure_pa: e.pressure,
                sign: sign_of(e.pressure),
                printed_sign: sign_of(to_printed * e.pressure),
                repulsive: e.pressure > 0.0,
            });
        }
        let mismatches = if env.intensity() == 0.0 || env.r_product() == 0.0 {
            0
        } else {
            peaks.iter().filter(|p| !p.repulsive).count()
        };
        Ok(SignReport {
            convention: match env.sign {
                SignConvention::ResonanceRepulsive => "resonance_repulsive".into(),
                SignConvention::Printed => "printed".into(),
            },
            expected: "repulsive (P > 0) at n*pi*c/omega1",
            peaks,
            mismatches,
        })
    }
}

fn sign_of(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum()
    }
}

fn label(v: f64) -> String {
    format!("{v}")
}

#[derive(Serialize)]
struct ExtremumOut {
    gap_m: f64,
    pressure_pa: f64,
}

impl From<&Extremum> for ExtremumOut {
    fn from(e: &Extremum) -> Self {
        Self {
            gap_m: e.gap,
            pressure_pa: e.pressure,
        }
    }
}

fn ideal_column(gaps: &[f64], intensity: f64) -> CoreResult<Vec<f64>> {
    gaps.iter().map(|&g| ideal_pressure(g, intensity)).collect()
}

pub fn pressure_sweep(ctx: &mut Context<'_>) -> CoreResult<Run> {
    let cfg = ctx.cfg;
    let gaps = cfg.gaps();
    let profile = ctx.profile(&gaps)?;
    let (crossings, extrema) =
        ctx.stages
            .time("sign changes and extrema", || -> CoreResult<_> {
                Ok((
                    sign_changes(&profile, &cfg.tolerance)?,
                    resonant_extrema(&profile, &cfg.tolerance)?,
                ))
            })?;
    let predicted: Vec<f64> =
        repulsive_peak_locations(&cfg.bandwidth(), cfg.environment.c, MAX_REPORTED_PEAKS)?
            .into_iter()
            .filter(|&l| l >= gaps[0] && l <= gaps[gaps.len() - 1])
            .collect();
    let table = Table::new()
        .column("L_m", gaps.clone())
        .column("P_Pa", profile.pressures.clone())
        .column(
            "P_ideal_Pa",
            ideal_column(&gaps, cfg.environment.intensity)?,
        );
    let report = vec![
        format!("sign changes: {}", crossings.len()),
        format!("resonant extrema: {}", extrema.len()),
    ];
    Ok(Run {
        table,
        results: json!({
            "sign_changes_m": crossings,
            "predicted_peaks_m": predicted,
            "resonant_extrema": extrema.iter().map(ExtremumOut::from).collect::<Vec<_>>(),
        }),
        report,
        warnings: Vec::new(),
    })
}

pub fn compare_electrostatic(ctx: &mut Context<'_>) -> CoreResult<Run> {
    let cfg = ctx.cfg;
    let gaps = cfg.gaps();
    let mut table = Table::new()
        .column("L_m", gaps.clone())
        .column("P0_Pa", ideal_column(&gaps, cfg.environment.intensity)?);
    for &v in &cfg.voltages {
        let col = gaps
            .iter()
            .map(|&g| electrostatic_pressure(g, v))
            .collect::<CoreResult<Vec<_>>>()?;
        table = table.column(format!("P_es_V{}_Pa", label(v)), col);
    }
    Ok(Run {
        table,
        results: json!({ "voltages": cfg.voltages }),
        report: vec![format!("electrostatic columns: {}", cfg.voltages.len())],
        warnings: Vec::new(),
    })
}

#[derive(Serialize)]
struct CurveOut {
    lambda2: f64,
    l_tilde_star: f64,
    lambda1_star: f64,
    argmax_at_classic: bool,
    v_star: f64,
    v_star_closed: Option<f64>,
}

fn maximize(ctx: &Context<'_>, lambda2: f64) -> CoreResult<PullInResult> {
    let cfg = ctx.cfg;
    pull_in_with_shape(
        &cfg.device(),
        lambda2,
        |x| ctx.shape(x),
        &cfg.tolerance,
        ctx.execution,
    )
}

pub fn bifurcation(ctx: &mut Context<'_>) -> CoreResult<Run> {
    let cfg = ctx.cfg;
    let grid = cfg.l_tilde_grid();
    let start = Instant::now();
    let f = ctx.shape_grid(&grid)?;
    ctx.stages.record("shape function", start);
    let mut table = Table::new().column("L_tilde", grid.clone());
    for &l2 in &cfg.lambda2 {
        let curve = grid
            .iter()
            .zip(&f)
            .map(|(&x, &fx)| bifurcation_value(x, l2, fx))
            .collect();
        table = table.column(format!("lambda1_lambda2={}", label(l2)), curve);
    }
    let mut curves = Vec::new();
    let mut report = Vec::new();
    let start = Instant::now();
    for &l2 in &cfg.lambda2 {
        let r = maximize(ctx, l2)?;
        report.push(format!(
            "lambda2 = {}: L_tilde* = {:.9}, lambda1* = {:.9}",
            label(l2),
            r.l_tilde_star,
            r.lambda1_star
        ));
        curves.push(CurveOut {
            lambda2: l2,
            l_tilde_star: r.l_tilde_star,
            lambda1_star: r.lambda1_star,
            argmax_at_classic: !r.argmax_shifted,
            v_star: r.v_star,
            v_star_closed: r.v_star_closed,
        });
    }
    ctx.stages.record("curve maxima", start);
    let warnings = curves
        .iter()
        .filter(|c| !c.argmax_at_classic)
        .map(|c| {
            format!(
                "lambda2 = {}: maximum moved to L_tilde = {:.6} (more than 1e-3 from 2/3)",
                label(c.lambda2),
                c.l_tilde_star
            )
        })
        .collect();
    Ok(Run {
        table,
        results: json!({ "curves": curves }),
        report,
        warnings,
    })
}

pub fn pull_in(ctx: &mut Context<'_>) -> CoreResult<Run> {
    let cfg = ctx.cfg;
    let dev = cfg.device();
    let l2 = lambda2(&dev, &cfg.environment());
    let grid = cfg.l_tilde_grid();
    let start = Instant::now();
    let f = ctx.shape_grid(&grid)?;
    ctx.stages.record("shape function", start);
    let start = Instant::now();
    let r = maximize(ctx, l2)?;
    ctx.stages.record("maximize", start);
    let curve = grid
        .iter()
        .zip(&f)
        .map(|(&x, &fx)| bifurcation_value(x, l2, fx))
        .collect();
    let table = Table::new()
        .column("L_tilde", grid.clone())
        .column("f", f)
        .column("lambda1", curve);
    let mut warnings = Vec::new();
    if r.argmax_shifted {
        warnings.push(format!(
            "maximum moved to L_tilde = {:.6}; V*_closed assumes it stays at 2/3",
            r.l_tilde_star
        ));
    }
    if r.v_star_closed.is_none() {
        warnings.push("1 + (27/4) lambda2 f(2/3) < 0: closed-form V* undefined".into());
    }
    let report = vec![
        format!("V_in        = {:.6} V", r.v_in),
        format!("L_in        = {:.6e} m", r.l_in),
        format!("lambda2     = {:.6e}", r.lambda2),
        format!("f(2/3)      = {:.6e}", r.f_at_classic),
        format!("V*          = {:.6} V", r.v_star),
        match r.v_star_closed {
            Some(v) => format!("V*_closed   = {v:.6} V"),
            None => "V*_closed   = undefined".into(),
        },
        format!("L_tilde*    = {:.9}", r.l_tilde_star),
        format!("argmax_shifted = {}", r.argmax_shifted),
    ];
    Ok(Run {
        table,
        results: serde_json::to_value(r).expect("plain numbers"),
        report,
        warnings,
    })
}

pub fn design_bandwidth(ctx: &mut Context<'_>) -> CoreResult<Run> {
    let cfg = ctx.cfg;
    let target = cfg.band.design.expect("checked by caller");
    let gaps = cfg.gaps();
    let profile = ctx.profile(&gaps)?;
    let extrema = ctx
        .stages
        .time("extrema", || resonant_extrema(&profile, &cfg.tolerance))?;
    let nearest = extrema.iter().min_by(|a, b| {
        (a.gap - target.target_gap)
            .abs()
            .total_cmp(&(b.gap - target.target_gap).abs())
    });
    let placement = nearest.map(|e| (e.gap - target.target_gap) / target.target_gap);
    let table = Table::new()
        .column("L_m", gaps.clone())
        .column("P_Pa", profile.pressures.clone())
        .column(
            "P_ideal_Pa",
            ideal_column(&gaps, cfg.environment.intensity)?,
        );
    let mut report = vec![
        format!("omega1 = {:.9e} rad/s", cfg.band.omega1),
        format!("omega2 = {:.9e} rad/s", cfg.band.omega2),
    ];
    let mut warnings = Vec::new();
    match (nearest, placement) {
        (Some(e), Some(p)) => report.push(format!(
            "nearest extremum at {:.6e} m (P = {:+.6e} Pa), placement error {:+.3}%",
            e.gap,
            e.pressure,
            100.0 * p
        )),
        _ => warnings.push("no pressure extremum inside the sweep".into()),
    }
    Ok(Run {
        table,
        results: json!({
            "omega1": cfg.band.omega1,
            "omega2": cfg.band.omega2,
            "nearest_extremum": nearest.map(ExtremumOut::from),
            "relative_placement_error": placement,
        }),
        report,
        warnings,
    })
}
