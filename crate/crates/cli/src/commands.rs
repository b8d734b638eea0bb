use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use szeta::analysis::{self, Rectangle};
use szeta::cache::{self, CacheStatus};
use szeta::transfer::{self, CollocationOperator};
use szeta::{GroupConfig, OrbitTable, ZetaSeries};

use crate::config::RunConfig;
use crate::report::{opt, RunReport};
use crate::{CliError, Command, Method};

const SVD_BURN_IN: usize = 6;
const SVD_FLOOR: f64 = 1e-12;
const BOWEN_AGREEMENT: f64 = 1e-9;

struct Context {
    config: RunConfig,
    group: GroupConfig,
    report: RunReport,
}

impl Context {
    fn table(&self, order: usize) -> Result<Arc<OrbitTable>, CliError> {
        let power = self.config.power_options();
        let table = match &self.config.io.cache {
            Some(dir) => {
                let (table, status) = cache::load_or_build(dir, &self.group, order, &power)?;
                let verb = match status {
                    CacheStatus::Hit => "loaded",
                    CacheStatus::Stored => "stored",
                    CacheStatus::Replaced => "rebuilt stale",
                };
                eprintln!("cache: {verb} {}", cache::cache_path(dir, &self.group.fingerprint(), order).display());
                table
            }
            None => szeta::build_orbit_table_with(&self.group, order, &power)?,
        };
        Ok(Arc::new(table))
    }

    fn series_of_order(&self, order: usize) -> Result<ZetaSeries, CliError> {
        Ok(ZetaSeries::new(self.table(order)?, order, self.config.zeta.mode)?)
    }

    fn series(&self) -> Result<ZetaSeries, CliError> {
        self.series_of_order(self.config.zeta.order)
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.config.io.output {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_csv(&self, columns: &str, body: &str) -> Result<(), CliError> {
        let mut text = self.report.csv_header();
        text.push_str(columns);
        text.push('\n');
        text.push_str(body);
        self.emit(&text)
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|part| part.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{what}: cannot parse {part:?}"))))
        .collect()
}

fn parse_rect(text: &str) -> Result<Rectangle, CliError> {
    match parse_list(text, "--rect")?[..] {
        [x0, x1, y0, y1] => Rectangle::new(x0, x1, y0, y1).map_err(|e| CliError::Usage(e.to_string())),
        _ => Err(CliError::Usage(format!("--rect expects x0,x1,y0,y1, got {text:?}"))),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn parse_grid(text: &str) -> Result<Vec<Complex64>, CliError> {
    let values = parse_list(text, "--grid")?;
    let [x0, x1, nx, y0, y1, ny] = values[..] else {
        return Err(CliError::Usage(format!("--grid expects x0,x1,nx,y0,y1,ny, got {text:?}")));
    };
    let count = |v: f64| {
        (v >= 1.0 && v.fract() == 0.0)
            .then_some(v as usize)
            .ok_or_else(|| CliError::Usage(format!("--grid point counts must be positive integers, got {v}")))
    };
    let (nx, ny) = (count(nx)?, count(ny)?);
    let ys = linspace(y0, y1, ny);
    Ok(linspace(x0, x1, nx).into_iter().flat_map(|x| ys.iter().map(move |&y| Complex64::new(x, y))).collect())
}

#[derive(Serialize)]
#[serde(tag = "method", rename_all = "lowercase")]
enum DimResult {
    Newton { delta: f64, iterations: usize, residual: f64, bracket: [f64; 2], order: usize },
    Bowen { delta: f64, degree: usize, eigen_residual: f64 },
}

pub fn execute(command: &Command, config: RunConfig, echo: String) -> Result<(), CliError> {
    let group = config.group()?;
    let report = RunReport::new(echo, group.fingerprint(), config.clone());
    let mut ctx = Context { config, group, report };
    match command {
        Command::Dim { method, degree } => dim(&mut ctx, *method, *degree),
        Command::Eval { re, im, grid } => {
            let points = match (re, im, grid) {
                (Some(re), Some(im), _) => vec![Complex64::new(*re, *im)],
                (_, _, Some(grid)) => parse_grid(grid)?,
                _ => return Err(CliError::Usage("eval needs --re and --im, or --grid".into())),
            };
            eval(&mut ctx, &points)
        }
        Command::Zeros { rect } => zeros(&mut ctx, parse_rect(rect)?),
        Command::Locate { rect, resolution } => locate(&mut ctx, parse_rect(rect)?, *resolution),
        Command::GridZeros { x0, ymax, samples } => grid_zeros(&mut ctx, &parse_list(x0, "--x0")?, *ymax, *samples),
        Command::GridLogz { rect, samples, seed } => grid_logz(&mut ctx, parse_rect(rect)?, *samples, *seed),
        Command::Orbits => orbits(&mut ctx),
        Command::Err { m1, m2, line, ymin, ymax, samples } => {
            error_metric(&mut ctx, (*m1, *m2), *line, (*ymin, *ymax), *samples)
        }
        Command::SvdProfile { re, im, degree } => svd_profile(&mut ctx, Complex64::new(*re, *im), *degree),
    }
}

fn dim(ctx: &mut Context, method: Method, degree: Option<usize>) -> Result<(), CliError> {
    let tol = ctx.config.tolerances.newton_tol;
    let result = match method {
        Method::Newton => {
            let series = ctx.series()?;
            let r = analysis::dimension(&series, tol)?;
            DimResult::Newton {
                delta: r.delta,
                iterations: r.iterations,
                residual: r.residual,
                bracket: [r.bracket.0, r.bracket.1],
                order: series.order(),
            }
        }
        Method::Bowen => {
            let r = match degree {
                Some(k) => CollocationOperator::new(&ctx.group, k)?.bowen_dimension(tol)?,
                None => {
                    transfer::bowen_dimension_converged(&ctx.group, &transfer::DEGREE_LADDER, tol, BOWEN_AGREEMENT)?
                }
            };
            DimResult::Bowen { delta: r.delta, degree: r.degree, eigen_residual: r.eigen_residual }
        }
    };
    let delta = match result {
        DimResult::Newton { delta, .. } | DimResult::Bowen { delta, .. } => delta,
    };
    let json = ctx.report.json(&result);
    match &ctx.config.io.output {
        Some(path) => {
            std::fs::write(path, json).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            println!("delta = {delta}");
            Ok(())
        }
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn eval(ctx: &mut Context, points: &[Complex64]) -> Result<(), CliError> {
    let series = ctx.series()?;
    for s in points {
        ctx.report.check_abscissa(s.re);
    }
    let values: Vec<_> = points.par_iter().map(|&s| series.evaluate(s)).collect();
    let mut body = String::new();
    for v in values {
        let _ = writeln!(body, "{},{},{},{},{},{}", v.s.re, v.s.im, v.z.re, v.z.im, v.dz.re, v.dz.im);
    }
    ctx.emit_csv("s_re,s_im,z_re,z_im,dz_re,dz_im", &body)
}

fn zeros(ctx: &mut Context, rect: Rectangle) -> Result<(), CliError> {
    ctx.report.check_abscissa(rect.x0);
    let series = ctx.series()?;
    let c = analysis::count_zeros(&series, &rect, &ctx.config.contour_options())?;
    let body = format!(
        "{},{},{},{},{},{},{},{},{}\n",
        rect.x0, rect.x1, rect.y0, rect.y1, c.count, c.integral.re, c.integral.im, c.residual, c.panels
    );
    ctx.emit_csv("x0,x1,y0,y1,count,integral_re,integral_im,residual,panels", &body)
}

fn locate(ctx: &mut Context, rect: Rectangle, resolution: f64) -> Result<(), CliError> {
    ctx.report.check_abscissa(rect.x0);
    let series = ctx.series()?;
    let boxes = analysis::locate_zeros(&series, &rect, resolution, &ctx.config.contour_options())?;
    let mut body = String::new();
    for b in boxes {
        let (r, c) = (b.region, b.region.center());
        let _ = writeln!(body, "{},{},{},{},{},{},{}", r.x0, r.x1, r.y0, r.y1, c.re, c.im, b.count);
    }
    ctx.emit_csv("x0,x1,y0,y1,center_re,center_im,count", &body)
}

fn grid_zeros(ctx: &mut Context, x0s: &[f64], y_max: f64, samples: usize) -> Result<(), CliError> {
    for &x0 in x0s {
        ctx.report.check_abscissa(x0);
    }
    let series = ctx.series()?;
    let opts = ctx.config.contour_options();
    let grids = x0s
        .par_iter()
        .map(|&x0| analysis::density_grid(&series, x0, y_max, samples, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    ctx.report.note(format!(
        "count: zeros in [x0, {}] x [{}, y]; count_symmetric: zeros with |Im s| <= y",
        analysis::DENSITY_X1,
        analysis::DENSITY_Y0
    ));
    ctx.report.note("statistic: log(count)/log(y) - 1, empty when undefined");
    let mut body = String::new();
    for grid in &grids {
        ctx.report.note(format!("x0 = {}: {} zeros with |Im s| <= {}", grid.x0, grid.axis_count, -grid.y0));
        for row in &grid.rows {
            let _ = writeln!(
                body,
                "{},{},{},{},{},{}",
                grid.x0,
                row.y,
                row.count,
                opt(row.statistic),
                row.count_symmetric,
                opt(row.statistic_symmetric)
            );
        }
    }
    ctx.emit_csv("x0,y,count,statistic,count_symmetric,statistic_symmetric", &body)
}

fn grid_logz(ctx: &mut Context, rect: Rectangle, samples: usize, seed: u64) -> Result<(), CliError> {
    ctx.report.check_abscissa(rect.x0);
    let series = ctx.series()?;
    let mut body = String::new();
    for p in analysis::logz_grid(&series, &rect, samples, seed) {
        let _ = writeln!(body, "{},{},{},{}", p.s.re, p.s.im, p.abs_z, opt(p.statistic));
    }
    ctx.emit_csv("s_re,s_im,abs_z,statistic", &body)
}

fn orbits(ctx: &mut Context) -> Result<(), CliError> {
    let table = ctx.table(ctx.config.zeta.order)?;
    let mut body = String::new();
    for class in table.iter() {
        let _ = writeln!(
            body,
            "{},{},{},{},{},{}",
            class.len(),
            class.word,
            class.multiplicity,
            class.primitive_period,
            class.u,
            class.m
        );
    }
    ctx.emit_csv("n,representative,rotation_count,primitive_period,u,m", &body)
}

fn error_metric(
    ctx: &mut Context,
    (m1, m2): (usize, usize),
    line: f64,
    (ymin, ymax): (f64, f64),
    samples: usize,
) -> Result<(), CliError> {
    let top = m1.max(m2);
    if m1 == 0 || m2 == 0 || top > szeta::zeta::MAX_ORDER {
        return Err(CliError::Usage(format!("--m1 and --m2 must lie in 1..={}", szeta::zeta::MAX_ORDER)));
    }
    if !(ymin < ymax) || samples == 0 {
        return Err(CliError::Usage("need ymin < ymax and samples >= 1".into()));
    }
    ctx.report.check_abscissa(line);
    ctx.report.note(format!("series built to order {top}; metric = |R1 - R2| / (1 + |R1| + |R2|), R = Z'/Z"));
    let series = ctx.series_of_order(top)?;
    let points: Vec<Complex64> = linspace(ymin, ymax, samples).into_iter().map(|y| Complex64::new(line, y)).collect();
    let rows = points
        .par_iter()
        .map(|&s| szeta::zeta::error_metric(&series, s, m1, m2).map(|e| (s, e)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut body = String::new();
    for (s, e) in rows {
        let _ = writeln!(body, "{},{},{},{},{},{},{}", s.re, s.im, e.value, e.r1.re, e.r1.im, e.r2.re, e.r2.im);
    }
    ctx.emit_csv("s_re,s_im,metric,r1_re,r1_im,r2_re,r2_im", &body)
}

fn svd_profile(ctx: &mut Context, s: Complex64, degree: usize) -> Result<(), CliError> {
    let operator = CollocationOperator::new(&ctx.group, degree)?;
    let values = operator.singular_value_profile(s);
    let group = ctx.group.num_generators();
    match transfer::fit_geometric_decay(&values, group, SVD_BURN_IN, SVD_FLOOR) {
        Ok(fit) => ctx.report.note(format!(
            "fit: ratio = {}, r_squared = {}, indices {}..{} (groups of {group})",
            fit.ratio, fit.r_squared, fit.range.0, fit.range.1
        )),
        Err(e) => ctx.report.warnings.push(format!("no geometric fit: {e}")),
    }
    let mut body = String::new();
    for (l, mu) in values.iter().enumerate() {
        let _ = writeln!(body, "{l},{mu}");
    }
    ctx.emit_csv("l,mu", &body)
}
