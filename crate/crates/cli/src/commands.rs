use std::f64::consts::TAU;
use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use umbilic_core::convexbody::{theorem1_pipeline, PipelineOptions};
use umbilic_core::curvature::{thm2_vectorfield, thm3_vectorfield, PlaneField};
use umbilic_core::quad::{divergence_consistency, verify_thm2, verify_thm3, QuadScheme};
use umbilic_core::scan::{contours, grid_field, umbilic_free_floor, umbilic_search, ResidualParams};
use umbilic_core::transform::{invert_local_graph, normalize_umbilic, ExteriorGraph};
use umbilic_core::{decay_profile, list_families, Direction, Family, ScalarField};

use crate::args::*;
use crate::output::{grid_svg, num, Table};
use crate::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fields { action: FieldsCommand::List(out) } => fields_list(out),
        Command::Curvature { action: CurvatureCommand::Map(a) } => curvature_map(a),
        Command::Umbilic { action: UmbilicCommand::Scan(a) } => umbilic_scan(a),
        Command::Floor(a) => floor(a),
        Command::Invert { action: InvertCommand::Graph(a) } => invert_graph(a),
        Command::Verify { action: VerifyCommand::Thm2(a) } => thm2(a),
        Command::Verify { action: VerifyCommand::Thm3(a) } => thm3(a),
        Command::Verify { action: VerifyCommand::Divergence(a) } => divergence(a),
        Command::Pipeline { action: PipelineCommand::Thm1(a) } => pipeline(a),
        Command::Contour(a) => contour(a),
        Command::Decay(a) => decay(a),
    }
}

fn scheme(s: &SchemeArgs) -> Result<QuadScheme, CliError> {
    Ok(QuadScheme::new(s.n_r, s.n_theta)?)
}

fn params(d: &DirectionArgs) -> ResidualParams {
    ResidualParams { x: Direction::new(d.x), y: Direction::new(d.y), theta0: d.theta0 }
}

fn positive(name: &str, v: usize, min: usize) -> Result<(), CliError> {
    if v < min {
        return Err(CliError::Usage(format!("--{name} must be at least {min}, got {v}")));
    }
    Ok(())
}

fn fields_list(out: OutputArgs) -> Result<(), CliError> {
    let mut t = Table::new(
        "quantity: registry of built-in fields; units: none",
        &["name", "params", "formula", "domain", "asymptotically_constant", "umbilic_free", "positively_curved", "from_source"],
    );
    for s in list_families() {
        t.row(vec![
            s.name.to_string(),
            s.params.join(";"),
            s.formula.to_string(),
            s.domain.to_string(),
            s.asymptotically_constant.to_string(),
            s.umbilic_free.map_or("unknown".to_string(), |b| b.to_string()),
            s.positively_curved.to_string(),
            s.from_source.to_string(),
        ]);
    }
    t.emit(out.out.as_deref())
}

fn sampled_grid(
    field: &Family,
    residual: umbilic_core::scan::Residual,
    grid: &GridArgs,
    dirs: &DirectionArgs,
) -> Result<umbilic_core::scan::Grid, CliError> {
    positive("nx", grid.nx, 2)?;
    positive("ny", grid.ny, 2)?;
    Ok(grid_field(field, residual, grid.region, grid.nx, grid.ny, params(dirs))?)
}

fn residual_units(r: umbilic_core::scan::Residual) -> &'static str {
    use umbilic_core::scan::Residual::*;
    match r {
        DeltaK => "1/length",
        DkDtheta => "1/length per radian",
        P1 | P2 => "1/length",
        D => "1/length^2",
    }
}

fn curvature_map(a: MapArgs) -> Result<(), CliError> {
    let g = sampled_grid(&a.field.field, a.residual, &a.grid, &a.dirs)?;
    let mut t = Table::new(
        format!(
            "quantity: {} of {} on a {}x{} grid; units: {}",
            a.residual,
            a.field.field,
            g.nx,
            g.ny,
            residual_units(a.residual)
        ),
        &["x", "y", "value"],
    );
    t.comment(format!("X = {} rad, Y = {} rad, theta0 = {} rad", a.dirs.x, a.dirs.y, a.dirs.theta0));
    for j in 0..g.ny {
        for i in 0..g.nx {
            let p = g.point(i, j);
            t.row(vec![num(p.x), num(p.y), num(g.value(i, j))]);
        }
    }
    if let Some(path) = &a.svg {
        fs::write(path, grid_svg(&g, None))?;
    }
    t.emit(a.output.out.as_deref())
}

fn contour(a: ContourArgs) -> Result<(), CliError> {
    let g = sampled_grid(&a.field.field, a.residual, &a.grid, &a.dirs)?;
    let c = contours(&g, a.level);
    let mut t = Table::new(
        format!("quantity: level-{} polylines of {} of {}; units: length", a.level, a.residual, a.field.field),
        &["polyline", "vertex", "x", "y", "closed"],
    );
    for (k, line) in c.lines.iter().enumerate() {
        for (v, p) in line.points.iter().enumerate() {
            t.row(vec![k.to_string(), v.to_string(), num(p.x), num(p.y), line.closed.to_string()]);
        }
    }
    if let Some(path) = &a.svg {
        fs::write(path, grid_svg(&g, Some(&c)))?;
    }
    t.emit(a.output.out.as_deref())
}

fn umbilic_scan(a: ScanArgs) -> Result<(), CliError> {
    positive("n", a.n, 2)?;
    let s = umbilic_search(&a.field.field, a.region, a.n, a.tol)?;
    let mut t = Table::new(
        format!("quantity: umbilic candidates of {} (D normalized by (1+q)^3, system residual by (1+q)^(3/2)); units: length, 1/length^2, 1/length", a.field.field),
        &["x", "y", "d_normalized", "system_residual", "refined"],
    );
    if s.totally_umbilic {
        t.comment("more than half the grid is below tolerance: region reported as totally umbilic");
    }
    for c in &s.candidates {
        t.row(vec![num(c.p.x), num(c.p.y), num(c.d_normalized), num(c.system_residual), c.refined.to_string()]);
    }
    t.emit(a.output.out.as_deref())
}

fn floor(a: FloorArgs) -> Result<(), CliError> {
    positive("n", a.n, 2)?;
    let f = umbilic_free_floor(&a.field.field, a.region, a.n)?;
    let mut t = Table::new(
        format!("quantity: min over a {0}x{0} grid of max(|P1|,|P2|)/(1+q)^(3/2) for {1}; units: 1/length", a.n, a.field.field),
        &["floor", "argmin_x", "argmin_y"],
    );
    t.row(vec![num(f.value), num(f.argmin.x), num(f.argmin.y)]);
    t.emit(a.output.out.as_deref())
}

fn invert_graph(a: InvertArgs) -> Result<(), CliError> {
    positive("n-theta", a.n_theta, 4)?;
    if a.normalize {
        let field = normalize_umbilic(a.field.field)?;
        let g = invert_local_graph(field, a.r0)?;
        invert_report(&g, &a, &a.field.field.to_string())
    } else {
        let g = invert_local_graph(a.field.field, a.r0)?;
        invert_report(&g, &a, &a.field.field.to_string())
    }
}

fn invert_report<F: ScalarField>(g: &ExteriorGraph<F>, a: &InvertArgs, name: &str) -> Result<(), CliError> {
    let ladder = &a.radii.0;
    if ladder.iter().any(|r| *r < g.rbar_min()) {
        return Err(CliError::Usage(format!("ladder radii must be at least r̄_min = {}", g.rbar_min())));
    }
    if a.samples > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let (lo, hi) = (g.rbar_min().ln(), ladder.iter().fold(g.rbar_min(), |m, r| m.max(*r)).ln());
        let mut t = Table::new(
            format!(
                "quantity: exterior graph of inverted {name} at random (r_bar, theta), seed {}; units: length, radian",
                a.seed
            ),
            &["r_bar", "theta", "r", "fbar", "fbar_rbar", "fbar_theta"],
        );
        for _ in 0..a.samples {
            let rb = rng.gen_range(lo..=hi).exp();
            let th = rng.gen_range(0.0..TAU);
            let s = g.eval(rb, th)?;
            t.row(vec![num(rb), num(th), num(s.r), num(s.fbar), num(s.fbar_rbar), num(s.fbar_theta)]);
        }
        return t.emit(a.output.out.as_deref());
    }
    let mut t = Table::new(
        format!("quantity: decay of the exterior graph of inverted {name} over circles r_bar; units: length"),
        &["r_bar", "fbar_min", "fbar_max", "sup_rbar_abs_fbar_rbar", "sup_abs_r_rbar_minus_1"],
    );
    t.comment(format!("r0 = {}, r_bar_min = {}", num(a.r0), num(g.rbar_min())));
    if let Some(c) = g.asymptotic_constant() {
        t.comment(format!("limit c = {}", num(c)));
    }
    for &rb in ladder {
        let (mut lo, mut hi, mut slope, mut prod) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64);
        for k in 0..a.n_theta {
            let th = TAU * k as f64 / a.n_theta as f64;
            let s = g.eval(rb, th)?;
            lo = lo.min(s.fbar);
            hi = hi.max(s.fbar);
            slope = slope.max(rb * s.fbar_rbar.abs());
            prod = prod.max((s.r * rb - 1.0).abs());
        }
        t.row(vec![num(rb), num(lo), num(hi), num(slope), num(prod)]);
    }
    t.emit(a.output.out.as_deref())
}

fn thm2(a: Thm2Args) -> Result<(), CliError> {
    let s = scheme(&a.scheme)?;
    let table = verify_thm2(a.field.field, Direction::new(a.dirs.x), Direction::new(a.dirs.y), &a.radii.0, s)?;
    let mut t = Table::new(
        format!(
            "quantity: disk integral of the curvature-difference integrand (k_X - k_Y)(1+f_X^2)(1+f_Y^2) dA for {}, X = {} rad, Y = {} rad; units: length",
            a.field.field, a.dirs.x, a.dirs.y
        ),
        &["r", "I_area", "I_flux", "majorant"],
    );
    t.comment(format!(
        "scheme n_r = {}, n_theta = {}; max pointwise identity gap {}",
        s.n_r,
        s.n_theta,
        num(table.identity_residual)
    ));
    for r in &table.rows {
        t.row(vec![num(r.r), num(r.area_integral), num(r.boundary_flux), num(r.majorant)]);
    }
    t.emit(a.output.out.as_deref())
}

fn thm3(a: Thm3Args) -> Result<(), CliError> {
    let s = scheme(&a.scheme)?;
    let table = verify_thm3(a.field.field, a.theta0, &a.radii.0, s)?;
    let mut t = Table::new(
        format!(
            "quantity: disk integral of the principal-angle divergence (I_area) and of dk/dtheta (1+f_X^2) dA (I_stated) for {}, theta0 = {} rad; units: length",
            a.field.field, a.theta0
        ),
        &["r", "I_area", "I_flux", "majorant", "I_stated", "stated_ratio"],
    );
    t.comment(format!("scheme n_r = {}, n_theta = {}", s.n_r, s.n_theta));
    for r in &table.rows {
        t.row(vec![
            num(r.r),
            num(r.area_integral),
            num(r.boundary_flux),
            num(r.majorant),
            num(r.stated_integral.unwrap_or(f64::NAN)),
            num(r.stated_ratio().unwrap_or(f64::NAN)),
        ]);
    }
    t.emit(a.output.out.as_deref())
}

fn divergence(a: DivergenceArgs) -> Result<(), CliError> {
    let s = scheme(&a.scheme)?;
    let field = a.field.field;
    let v: Box<dyn PlaneField> = match a.kind {
        VectorFieldKind::Thm2 => Box::new(thm2_vectorfield(field, Direction::new(a.dirs.x), Direction::new(a.dirs.y))),
        VectorFieldKind::Thm3 => Box::new(thm3_vectorfield(field, a.dirs.theta0)),
    };
    let mut t = Table::new(
        format!("quantity: |disk integral of div V - boundary flux of V| for the {:?} field of {field}; units: length", a.kind)
            .to_lowercase(),
        &["r", "residual", "residual_doubled"],
    );
    t.comment(format!(
        "scheme n_r = {}, n_theta = {}, doubled n_r = {}, n_theta = {}",
        s.n_r,
        s.n_theta,
        2 * s.n_r,
        2 * s.n_theta
    ));
    let mut worst: f64 = 0.0;
    for &r in &a.radii.0 {
        let base = divergence_consistency(v.as_ref(), r, s)?;
        let fine = divergence_consistency(v.as_ref(), r, s.doubled())?;
        worst = worst.max(base);
        t.row(vec![num(r), num(base), num(fine)]);
    }
    t.emit(a.output.out.as_deref())?;
    if !(worst < a.tol) {
        return Err(CliError::Check(format!("divergence residual {worst:e} exceeds tolerance {:e}", a.tol)));
    }
    Ok(())
}

fn pipeline(a: PipelineArgs) -> Result<(), CliError> {
    positive("n-azimuth", a.n_azimuth, 4)?;
    positive("grid-n", a.grid_n, 4)?;
    let opts = PipelineOptions { offset: a.offset, grid_n: a.grid_n, n_azimuth: a.n_azimuth, ..PipelineOptions::default() };
    let rep = theorem1_pipeline(&a.body, &a.bins.0, opts)?;
    let mut t = Table::new(
        format!("quantity: decay of the inverted parallel body {} posed at its umbilic; units: length", a.body),
        &["r_bar", "sup_abs_height_minus_c", "sup_rbar_slope"],
    );
    let (u, tr, rot) = (rep.umbilic, rep.translation, rep.rotation);
    let vec3 = |a: f64, b: f64, c: f64| format!("({}, {}, {})", num(a), num(b), num(c));
    t.comment(format!("umbilic u* = {}, residual rho2 - rho1 = {}", vec3(u.x, u.y, u.z), num(rep.umbilic_residual)));
    t.comment(format!(
        "pose rotation rows {} {} {}, translation {}",
        vec3(rot[(0, 0)], rot[(0, 1)], rot[(0, 2)]),
        vec3(rot[(1, 0)], rot[(1, 1)], rot[(1, 2)]),
        vec3(rot[(2, 0)], rot[(2, 1)], rot[(2, 2)]),
        vec3(tr.x, tr.y, tr.z)
    ));
    t.comment(format!("offset r = {}, rho* = {}, c = {}", num(rep.offset), num(rep.rho_star), num(rep.limit)));
    for r in &rep.rows {
        t.row(vec![num(r.r_bar), num(r.sup_height_deviation), num(r.sup_rbar_slope)]);
    }
    t.emit(a.output.out.as_deref())
}

fn decay(a: DecayArgs) -> Result<(), CliError> {
    let p = decay_profile(&a.field.field, &a.radii.0, a.n_theta)?;
    let mut t = Table::new(
        format!("quantity: sup over circles of |f - c| and r |grad f| for {}; units: length, dimensionless", a.field.field),
        &["r", "sup_abs_f_minus_c", "sup_r_grad"],
    );
    t.comment(
        format!("c = {} ({:?}), variance on the outer ring {}", num(p.constant), p.constant_source, num(p.constant_variance))
            .to_lowercase(),
    );
    for r in &p.rows {
        t.row(vec![num(r.r), num(r.sup_deviation), num(r.sup_r_grad)]);
    }
    t.emit(a.output.out.as_deref())
}
