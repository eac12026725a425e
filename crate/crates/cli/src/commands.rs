use std::f64::consts::PI;

use rayon::prelude::*;
use resonance_core::counting::{
    carleman_study, census_below_segment, halfplane_count_envelope, jensen_count_bound, jensen_study, CountReport,
    NormalizedDeterminant,
};
use resonance_core::determinants::{
    determinant, in_resonance_strips, region_classify, ModelDeterminant, ModelSpec, Plane, RegionParams, RegionTag,
};
use resonance_core::dynamics::{small_field_stability, EnergyWindow, SurvivalSeries, WellEigenpair, WellState};
use resonance_core::numerics::ExtendedComplex;
use resonance_core::rootfinder::{isolate_zeros, SearchBox};
use resonance_core::{Complex64, Error};
use serde::{Deserialize, Serialize};

use crate::args::{Cli, Command, Format, ModelArgs, ModelKind};
use crate::output::{atlas_csv, atlas_svg, table_csv, to_json, Atlas, AtlasPoint, Envelope, LOG_CLIP};
use crate::CliError;

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Model errors caused by the arguments are configuration errors.
fn validated(spec: resonance_core::Result<ModelSpec>) -> Result<ModelSpec, CliError> {
    spec.map_err(|e| match e {
        Error::InvalidModel(msg) => CliError::Config(msg),
        other => other.into(),
    })
}

fn parse_numbers(text: &str, expected: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| config(format!("{what}: {e}")))?;
    if values.len() != expected || values.iter().any(|v| !v.is_finite()) {
        return Err(config(format!("{what}: expected {expected} finite comma separated numbers, got `{text}`")));
    }
    Ok(values)
}

fn parse_box(text: &str, plane: Plane) -> Result<SearchBox, CliError> {
    let v = parse_numbers(text, 4, "--box")?;
    if !(v[0] < v[1] && v[2] < v[3]) {
        return Err(config("--box needs x0 < x1 and y0 < y1"));
    }
    Ok(SearchBox::from_bounds(v[0], v[1], v[2], v[3], plane)?)
}

fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let parsed = text
        .split_once(['x', 'X'])
        .and_then(|(n, m)| Some((n.trim().parse::<usize>().ok()?, m.trim().parse::<usize>().ok()?)));
    match parsed {
        Some((n, m)) if n >= 1 && m >= 1 => Ok((n, m)),
        _ => Err(config(format!("--grid: expected NxM with positive N and M, got `{text}`"))),
    }
}

fn single_field(args: &ModelArgs) -> Result<f64, CliError> {
    match args.f.as_slice() {
        [f] => Ok(*f),
        [] => Err(config("the stark model needs --f")),
        _ => Err(config("this command takes a single --f")),
    }
}

/// The model named by the arguments, with a single field for Stark.
fn model_spec(args: &ModelArgs) -> Result<ModelSpec, CliError> {
    match args.model {
        ModelKind::Free => {
            if !args.f.is_empty() {
                return Err(config("--f does not apply to the free model"));
            }
            validated(ModelSpec::free(args.kappa, args.eta))
        }
        ModelKind::Stark => validated(ModelSpec::stark(args.kappa, args.eta, single_field(args)?)),
        ModelKind::Dirichlet => {
            let l = args.l.ok_or_else(|| config("the dirichlet model needs --l"))?;
            validated(ModelSpec::dirichlet(args.kappa, args.eta, l))
        }
    }
}

fn stark_only(args: &ModelArgs, command: &str) -> Result<(), CliError> {
    if args.model != ModelKind::Stark {
        return Err(config(format!("`{command}` needs --model stark")));
    }
    Ok(())
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct EvalPoint {
    pub point: Complex64,
    pub plane: Plane,
    pub value: ExtendedComplex,
    pub log_abs: f64,
    pub arg: f64,
    pub region_tag: Option<RegionTag>,
    pub trunc_error: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct JensenOutput {
    pub report: CountReport,
    /// Bound on the zeros in the disk of radius `r / v`.
    pub count_bound: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct VerifiedZero {
    pub location: Complex64,
    pub multiplicity: u32,
    pub region: RegionTag,
    pub in_strips: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub search_box: SearchBox,
    pub zero_count: i64,
    pub unresolved_clusters: usize,
    pub zeros: Vec<VerifiedZero>,
    pub all_in_strips: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
pub enum DynamicsOutput {
    Series(SurvivalSeries),
    Stability(Vec<resonance_core::dynamics::StabilityReport>),
}

struct Rendered {
    json: String,
    csv: Option<String>,
    svg: Option<String>,
}

impl Rendered {
    fn select(self, format: Format, command: &str) -> Result<String, CliError> {
        let chosen = match format {
            Format::Json => Some(self.json),
            Format::Csv => self.csv,
            Format::Svg => self.svg,
        };
        chosen.ok_or_else(|| config(format!("`{command}` has no {format:?} output")))
    }
}

fn envelope<T: Serialize>(command: &str, model: Option<ModelSpec>, data: &T) -> Result<String, CliError> {
    Ok(to_json(&Envelope::new(command, model, data))?)
}

/// Runs the command and returns the artifact text.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let name = cli.command.name();
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let rendered = match &cli.command {
        Command::Eval { model, points } => eval(model, points, name)?,
        Command::Atlas { model, region, grid } => atlas(model, region, grid, name)?,
        Command::Zeros { model, region, resolution } => zeros(model, region, *resolution, name)?,
        Command::Count { model, rl, ru, eps } => {
            stark_only(model, name)?;
            let spec = model_spec(model)?;
            let check = halfplane_count_envelope(&spec, *rl, *ru, *eps)?;
            let row = vec![check.lower, check.upper, check.measured as f64, check.r_l, check.r_u];
            Rendered {
                json: envelope(name, Some(spec), &check)?,
                csv: Some(table_csv(&["lower", "upper", "measured", "r_l", "r_u"], &[row])),
                svg: None,
            }
        }
        Command::Jensen { model, r, v } => {
            stark_only(model, name)?;
            let spec = model_spec(model)?;
            let report = jensen_study(&spec, *r)?;
            let count_bound = match (v, report.safe_radius) {
                (Some(v), Some(radius)) => Some(jensen_count_bound(&NormalizedDeterminant::upright(spec)?, radius, *v)?),
                _ => None,
            };
            let csv = report_csv(std::slice::from_ref(&report));
            Rendered { json: envelope(name, Some(spec), &JensenOutput { report, count_bound })?, csv: Some(csv), svg: None }
        }
        Command::Carleman { model, rl } => {
            stark_only(model, name)?;
            let spec = model_spec(model)?;
            let report = carleman_study(&spec, *rl)?;
            let csv = report_csv(std::slice::from_ref(&report));
            Rendered { json: envelope(name, Some(spec), &report)?, csv: Some(csv), svg: None }
        }
        Command::Census { model, a, b, m } => census(model, *a, *b, *m, name)?,
        Command::Dynamics { model, n, window, t_max, steps } => dynamics(model, *n, window, *t_max, *steps, name)?,
        Command::Verify { model, region, m, beta, resolution } => verify(model, region, *m, *beta, *resolution, name)?,
    };
    rendered.select(format, name)
}

fn eval(args: &ModelArgs, points: &[String], name: &str) -> Result<Rendered, CliError> {
    let spec = model_spec(args)?;
    let parsed: Vec<Complex64> = points
        .iter()
        .map(|p| parse_numbers(p, 2, "--at").map(|v| Complex64::new(v[0], v[1])))
        .collect::<Result<_, _>>()?;
    let values: Vec<EvalPoint> = parsed
        .par_iter()
        .map(|&p| {
            let v = determinant(p, &spec)?;
            Ok(EvalPoint {
                point: p,
                plane: v.plane,
                value: v.value,
                log_abs: v.value.log_abs(),
                arg: v.value.arg(),
                region_tag: v.region_tag,
                trunc_error: v.trunc_error,
            })
        })
        .collect::<resonance_core::Result<_>>()?;
    let rows: Vec<AtlasPoint> = values
        .iter()
        .map(|v| AtlasPoint { re: v.point.re, im: v.point.im, log_abs: v.log_abs.clamp(-LOG_CLIP, LOG_CLIP), arg: v.arg })
        .collect();
    Ok(Rendered { json: envelope(name, Some(spec), &values)?, csv: Some(atlas_csv(&rows)), svg: None })
}

fn linspace(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

fn atlas(args: &ModelArgs, region: &str, grid: &str, name: &str) -> Result<Rendered, CliError> {
    let spec = model_spec(args)?;
    let search = parse_box(region, spec.plane())?;
    let (columns, rows) = parse_grid(grid)?;
    let points: Vec<AtlasPoint> = (0..columns * rows)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % columns, idx / columns);
            let p = Complex64::new(
                linspace(search.lo.re, search.hi.re, columns, i),
                linspace(search.lo.im, search.hi.im, rows, j),
            );
            let (log_abs, arg) = match determinant(p, &spec) {
                Ok(v) => (v.value.log_abs(), v.value.arg()),
                Err(Error::Pole) => (f64::INFINITY, 0.0),
                Err(e) => return Err(e),
            };
            Ok(AtlasPoint { re: p.re, im: p.im, log_abs: log_abs.clamp(-LOG_CLIP, LOG_CLIP), arg })
        })
        .collect::<resonance_core::Result<_>>()?;
    let atlas = Atlas { columns, rows, points };
    Ok(Rendered {
        csv: Some(atlas_csv(&atlas.points)),
        svg: Some(atlas_svg(&atlas)),
        json: envelope(name, Some(spec), &atlas)?,
    })
}

fn zeros(args: &ModelArgs, region: &str, resolution: f64, name: &str) -> Result<Rendered, CliError> {
    let spec = model_spec(args)?;
    if !(resolution > 0.0) {
        return Err(config("--resolution must be positive"));
    }
    let search = parse_box(region, spec.plane())?;
    let iso = isolate_zeros(&ModelDeterminant::new(spec)?, &search, resolution)?;
    let rows: Vec<Vec<f64>> =
        iso.resonances.iter().map(|r| vec![r.location.re, r.location.im, r.multiplicity as f64, r.residual]).collect();
    Ok(Rendered {
        json: envelope(name, Some(spec), &iso)?,
        csv: Some(table_csv(&["re", "im", "multiplicity", "residual"], &rows)),
        svg: None,
    })
}

fn report_csv(reports: &[CountReport]) -> String {
    let rows: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| {
            vec![
                r.field,
                r.zero_count as f64,
                r.scaled_count,
                r.jensen_value.unwrap_or(f64::NAN),
                r.carleman_value.unwrap_or(f64::NAN),
            ]
        })
        .collect();
    table_csv(&["f", "zero_count", "count_times_f", "jensen", "carleman"], &rows)
}

fn census(args: &ModelArgs, a: f64, b: f64, m: f64, name: &str) -> Result<Rendered, CliError> {
    stark_only(args, name)?;
    if args.f.is_empty() {
        return Err(config("`census` needs --f"));
    }
    let reports: Vec<CountReport> = args
        .f
        .iter()
        .map(|&f| {
            let spec = validated(ModelSpec::stark(args.kappa, args.eta, f))?;
            Ok(census_below_segment(&spec, a, b, m)?)
        })
        .collect::<Result<_, CliError>>()?;
    // the envelope's model is the field-free base; each report carries its own f
    let base = validated(ModelSpec::free(args.kappa, args.eta))?;
    Ok(Rendered { json: envelope(name, Some(base), &reports)?, csv: Some(report_csv(&reports)), svg: None })
}

fn dynamics(args: &ModelArgs, n: u32, window: &str, t_max: f64, steps: usize, name: &str) -> Result<Rendered, CliError> {
    if args.model == ModelKind::Dirichlet {
        return Err(config("`dynamics` supports the free model and its Stark perturbations"));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) || steps == 0 {
        return Err(config("`dynamics` needs a finite --t-max >= 0 and --steps >= 1"));
    }
    let base = validated(ModelSpec::free(args.kappa, args.eta))?;
    let w = parse_numbers(window, 3, "--window")?;
    let window = EnergyWindow::new(w[0], w[1], w[2]).map_err(|e| config(e.to_string()))?;
    let state = WellState::from(WellEigenpair::new(n, args.kappa).map_err(|e| config(e.to_string()))?);
    let times: Vec<f64> = (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect();

    let output = if args.f.is_empty() {
        DynamicsOutput::Series(SurvivalSeries::compute(&base, &state, &window, &times)?)
    } else {
        DynamicsOutput::Stability(
            args.f
                .iter()
                .map(|&f| small_field_stability(&base, f, &state, &window, &times))
                .collect::<resonance_core::Result<_>>()?,
        )
    };
    let csv = match &output {
        DynamicsOutput::Series(s) => {
            let rows: Vec<Vec<f64>> = s
                .times
                .iter()
                .zip(s.exact.iter().zip(&s.resonance_sum))
                .map(|(t, (a, b))| vec![*t, a.re, a.im, b.re, b.im])
                .collect();
            table_csv(&["t", "exact_re", "exact_im", "resonance_re", "resonance_im"], &rows)
        }
        DynamicsOutput::Stability(reports) => {
            let rows: Vec<Vec<f64>> = reports
                .iter()
                .flat_map(|r| {
                    r.times.iter().zip(r.free.iter().zip(&r.stark)).map(|(t, (a, b))| vec![r.field, *t, a.re, a.im, b.re, b.im])
                })
                .collect();
            table_csv(&["f", "t", "free_re", "free_im", "stark_re", "stark_im"], &rows)
        }
    };
    Ok(Rendered { json: envelope(name, Some(base), &output)?, csv: Some(csv), svg: None })
}

fn verify(args: &ModelArgs, region: &str, m: f64, beta: f64, resolution: f64, name: &str) -> Result<Rendered, CliError> {
    stark_only(args, name)?;
    let spec = model_spec(args)?;
    let f = single_field(args)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(config("--beta must lie in (0, 1)"));
    }
    if !(resolution > 0.0) {
        return Err(config("--resolution must be positive"));
    }
    let params = RegionParams::new(f, m, 0.4).map_err(|e| config(e.to_string()))?;
    let search = parse_box(region, Plane::Z)?;
    let iso = isolate_zeros(&ModelDeterminant::new(spec)?, &search, resolution)?;
    let zeros: Vec<VerifiedZero> = iso
        .resonances
        .iter()
        .map(|r| VerifiedZero {
            location: r.location,
            multiplicity: r.multiplicity,
            region: region_classify(r.location, &params),
            in_strips: in_resonance_strips(r.location, f, m, beta),
        })
        .collect();
    // clusters are unresolved, so their centres are checked conservatively
    let clusters_in_strips = iso.clusters.iter().all(|c| in_resonance_strips(c.search_box.center(), f, m, beta));
    let report = VerifyReport {
        search_box: iso.search_box,
        zero_count: iso.count(),
        unresolved_clusters: iso.clusters.len(),
        all_in_strips: clusters_in_strips && zeros.iter().all(|z| z.in_strips),
        zeros,
    };
    let rows: Vec<Vec<f64>> = report
        .zeros
        .iter()
        .map(|z| vec![z.location.re, z.location.im, z.location.arg() / PI, f64::from(u8::from(z.in_strips))])
        .collect();
    Ok(Rendered {
        json: envelope(name, Some(spec), &report)?,
        csv: Some(table_csv(&["re", "im", "arg_over_pi", "in_strips"], &rows)),
        svg: None,
    })
}
