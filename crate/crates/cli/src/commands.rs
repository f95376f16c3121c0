//! One function per subcommand. Each returns the full standard output.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use syz_core::disk_topology::{mirror_equation, Form};
use syz_core::flat_coords::{corrections, inverse_mirror_map, Corrections, InverseMirrorMap};
use syz_core::periods::{mirror_map_series, single_log_periods, LogPeriod};
use syz_core::refdata::{
    lookup_reference, verify_against_reference, Computed, RefError, ReferenceExample,
};
use syz_core::toric_cy::{
    charge_matrix, compact_divisors, discriminant_locus, mori_orthant_check,
    polytope_from_constants, validate_fan_with_base, ChargeMatrix, CyFan, Fan, FanError,
    MomentPolytope,
};
use syz_series::rational::format_rational;
use syz_series::{Monomial, MultiSeries, Rational};

use crate::fanfile::{read_fan, FanInput};
use crate::reference::ReferenceDoc;
use crate::render::{self, int_vec, point, series_tex, series_text, ConstraintDoc, SeriesDoc};
use crate::{exit, Cli, CliError, Command, FormArg, Format, Output};

pub fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    let ctx = Context {
        cutoff: cli.cutoff,
        base_cone: cli.base_cone,
        format: cli.format,
    };
    match &cli.command {
        Command::Validate { fan } => validate(&ctx, fan),
        Command::Charges { fan } => charges(&ctx, fan),
        Command::Periods { fan } => periods(&ctx, fan),
        Command::MirrorMap { fan } => mirror_map(&ctx, fan),
        Command::Invert { fan } => invert(&ctx, fan),
        Command::OpenGw { fan, inverse } => open_gw(&ctx, fan, inverse.as_deref()),
        Command::MirrorEq { fan, form } => mirror_eq(&ctx, fan, *form),
        Command::Discriminant { fan } => discriminant(&ctx, fan),
        Command::Verify {
            example,
            order,
            reference,
        } => verify(&ctx, example, *order, reference.as_deref()),
        Command::ExportRef { example } => export_ref(example),
    }
}

struct Context {
    cutoff: u32,
    base_cone: usize,
    format: Format,
}

impl Context {
    fn no_latex(&self, what: &str) -> Result<(), CliError> {
        if self.format == Format::Latex {
            return Err(CliError::Usage(format!(
                "{what} has no LaTeX output; use text or json"
            )));
        }
        Ok(())
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

struct Loaded {
    input: FanInput,
    fan: CyFan,
    q: ChargeMatrix,
}

fn load(ctx: &Context, path: &Path) -> Result<Loaded, CliError> {
    let input = read_fan(path)?;
    from_fan(ctx, input)
}

fn from_fan(ctx: &Context, input: FanInput) -> Result<Loaded, CliError> {
    let fan = validate_fan_with_base(&input.fan, ctx.base_cone).map_err(|e| match e {
        FanError::BadBaseCone { .. } => CliError::Usage(e.to_string()),
        other => other.into(),
    })?;
    let q = charge_matrix(&fan);
    Ok(Loaded { input, fan, q })
}

/// Prints a warning when the nonnegative orthant in `q` is not the Mori cone.
fn warn_mori(l: &Loaded) {
    let check = mori_orthant_check(&l.fan, &l.q);
    if !check.nonnegative {
        eprintln!(
            "warning: some compact curve classes have negative coordinates in the charge basis {:?}; \
             series in q are not expansions at a large-volume limit",
            check.classes
        );
    }
}

struct Pipeline {
    periods: Vec<LogPeriod>,
    inverse: InverseMirrorMap,
    corrections: Corrections,
}

fn pipeline(l: &Loaded, cutoff: u32) -> Result<Pipeline, CliError> {
    let periods = single_log_periods(&l.q, cutoff);
    let inverse = inverse_mirror_map(&periods)?;
    let corrections = corrections(&l.fan, &l.q, &inverse)?;
    Ok(Pipeline {
        periods,
        inverse,
        corrections,
    })
}

#[derive(Serialize)]
struct ValidateDoc {
    rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    covector: Vec<i64>,
    base_cone: usize,
    base_rays: Vec<usize>,
    dual_basis: Vec<Vec<i64>>,
    compact_divisors: Vec<usize>,
    walls: usize,
    boundary_facets: usize,
    mori_classes: Vec<Vec<i64>>,
    mori_orthant: bool,
    polytope_constants: Vec<String>,
}

fn polytope(l: &Loaded) -> Result<MomentPolytope, CliError> {
    match &l.input.polytope_constants {
        Some(cs) => {
            let p = polytope_from_constants(&l.fan, cs.clone())?;
            p.check(l.fan.valid())?;
            Ok(p)
        }
        None => Ok(MomentPolytope::for_fan(&l.fan)?),
    }
}

fn validate(ctx: &Context, path: &Path) -> Result<Output, CliError> {
    ctx.no_latex("validate")?;
    let l = load(ctx, path)?;
    let cy = l.fan.cy();
    let mori = mori_orthant_check(&l.fan, &l.q);
    let p = polytope(&l)?;
    let doc = ValidateDoc {
        rank: l.fan.rank(),
        rays: l.input.fan.rays().to_vec(),
        max_cones: l.input.fan.max_cones().to_vec(),
        covector: cy.covector().to_vec(),
        base_cone: cy.base_cone(),
        base_rays: cy.base().to_vec(),
        dual_basis: cy.dual_basis().to_vec(),
        compact_divisors: compact_divisors(l.fan.valid()).into_iter().collect(),
        walls: l.fan.valid().walls().len(),
        boundary_facets: l.fan.valid().boundary().len(),
        mori_classes: mori.classes.clone(),
        mori_orthant: mori.nonnegative,
        polytope_constants: render::rationals(p.constants()),
    };
    if ctx.format == Format::Json {
        return Ok(Output::ok(json(&doc)));
    }
    let mut out = String::new();
    writeln!(out, "smooth toric Calabi-Yau fan of rank {}", doc.rank).unwrap();
    writeln!(out, "rays: {}", doc.rays.len()).unwrap();
    writeln!(out, "maximal cones: {}", doc.max_cones.len()).unwrap();
    writeln!(out, "covector: {}", int_vec(&doc.covector)).unwrap();
    writeln!(out, "base cone: {} = {:?}", doc.base_cone, doc.base_rays).unwrap();
    for (j, nu) in doc.dual_basis.iter().enumerate() {
        writeln!(out, "nu{j}: {}", int_vec(nu)).unwrap();
    }
    writeln!(out, "compact divisors: {:?}", doc.compact_divisors).unwrap();
    writeln!(out, "walls: {}", doc.walls).unwrap();
    writeln!(out, "boundary facets: {}", doc.boundary_facets).unwrap();
    writeln!(
        out,
        "Mori cone is the nonnegative orthant: {}",
        if doc.mori_orthant { "yes" } else { "no" }
    )
    .unwrap();
    writeln!(
        out,
        "polytope constants: ({})",
        doc.polytope_constants.join(", ")
    )
    .unwrap();
    Ok(Output::ok(out))
}

#[derive(Serialize)]
struct ChargesDoc {
    base: Vec<usize>,
    others: Vec<usize>,
    rows: Vec<Vec<i64>>,
}

fn charges(ctx: &Context, path: &Path) -> Result<Output, CliError> {
    let l = load(ctx, path)?;
    let rows = l.q.rows().to_vec();
    match ctx.format {
        Format::Json => Ok(Output::ok(json(&ChargesDoc {
            base: l.q.base().to_vec(),
            others: l.q.others().to_vec(),
            rows,
        }))),
        Format::Text => {
            let mut out = String::new();
            if rows.is_empty() {
                out.push_str("no charge vectors: the fan has no compact curves\n");
            }
            for (a, row) in rows.iter().enumerate() {
                writeln!(out, "Q{} = {}", a + 1, int_vec(row)).unwrap();
            }
            Ok(Output::ok(out))
        }
        Format::Latex => {
            let body: Vec<String> = rows
                .iter()
                .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(" & "))
                .collect();
            Ok(Output::ok(format!(
                "Q = \\begin{{pmatrix}} {} \\end{{pmatrix}}\n",
                body.join(" \\\\ ")
            )))
        }
    }
}

#[derive(Serialize)]
struct NamedSeriesDoc {
    name: String,
    series: SeriesDoc,
}

/// Writes `name_a = series` lines in the requested format.
fn series_list(
    ctx: &Context,
    name: &str,
    tex_name: &str,
    checked: bool,
    list: &[MultiSeries],
) -> String {
    match ctx.format {
        Format::Json => json(
            &list
                .iter()
                .enumerate()
                .map(|(a, s)| NamedSeriesDoc {
                    name: format!("{name}{}", a + 1),
                    series: SeriesDoc::from_series(s),
                })
                .collect::<Vec<_>>(),
        ),
        Format::Text => list
            .iter()
            .enumerate()
            .map(|(a, s)| format!("{name}{} = {}\n", a + 1, series_text(s, checked)))
            .collect(),
        Format::Latex => list
            .iter()
            .enumerate()
            .map(|(a, s)| format!("{tex_name}_{{{}}} = {}\n", a + 1, series_tex(s, checked)))
            .collect(),
    }
}

fn periods(ctx: &Context, path: &Path) -> Result<Output, CliError> {
    let l = load(ctx, path)?;
    warn_mori(&l);
    let f: Vec<MultiSeries> = single_log_periods(&l.q, ctx.cutoff)
        .into_iter()
        .map(|p| p.f)
        .collect();
    Ok(Output::ok(series_list(ctx, "f", "f", true, &f)))
}

fn times_var(s: &MultiSeries, a: usize) -> MultiSeries {
    s.mul_monomial(
        &Monomial::var(s.nvars(), a),
        &Rational::from_integer(1.into()),
    )
}

fn mirror_map(ctx: &Context, path: &Path) -> Result<Output, CliError> {
    let l = load(ctx, path)?;
    warn_mori(&l);
    let periods = single_log_periods(&l.q, ctx.cutoff);
    let factors = mirror_map_series(&periods)?;
    let q: Vec<MultiSeries> = factors
        .iter()
        .enumerate()
        .map(|(a, g)| times_var(g, a))
        .collect();
    Ok(Output::ok(series_list(ctx, "q", "q", true, &q)))
}

/// `invert --format json`: coordinates `q̌_a(q)` and the ratios `q̌_a/q_a`,
/// the latter at full precision.
#[derive(Serialize, serde::Deserialize)]
pub struct InverseDoc {
    pub coordinates: Vec<SeriesDoc>,
    pub ratios: Vec<SeriesDoc>,
}

fn invert(ctx: &Context, path: &Path) -> Result<Output, CliError> {
    let l = load(ctx, path)?;
    warn_mori(&l);
    let inv = inverse_mirror_map(&single_log_periods(&l.q, ctx.cutoff))?;
    let coords: Vec<MultiSeries> = (0..inv.components.len())
        .map(|a| inv.coordinate(a))
        .collect();
    if ctx.format == Format::Json {
        return Ok(Output::ok(json(&InverseDoc {
            coordinates: coords.iter().map(SeriesDoc::from_series).collect(),
            ratios: inv.components.iter().map(SeriesDoc::from_series).collect(),
        })));
    }
    Ok(Output::ok(series_list(
        ctx,
        "q̌",
        "\\check{q}",
        false,
        &coords,
    )))
}

#[derive(Serialize)]
struct InvariantDoc {
    alpha: Vec<u32>,
    n: String,
}

#[derive(Serialize)]
struct OpenGwDoc {
    compact_divisor: Option<usize>,
    cutoff: u32,
    invariants: Vec<InvariantDoc>,
}

fn open_gw(ctx: &Context, path: &Path, inverse: Option<&Path>) -> Result<Output, CliError> {
    let l = load(ctx, path)?;
    warn_mori(&l);
    let inv = match inverse {
        Some(p) => {
            let doc: InverseDoc = serde_json::from_str(&crate::read_file(p)?)
                .map_err(|e| CliError::Parse(format!("inverse map file: {e}")))?;
            let components = doc
                .ratios
                .iter()
                .map(SeriesDoc::to_series)
                .collect::<Result<Vec<_>, _>>()?;
            if components.iter().any(|c| c.nvars() != l.q.l()) || components.len() != l.q.l() {
                return Err(CliError::Parse(format!(
                    "inverse map file does not have {} components in {} variables",
                    l.q.l(),
                    l.q.l()
                )));
            }
            InverseMirrorMap { components }
        }
        None => inverse_mirror_map(&single_log_periods(&l.q, ctx.cutoff))?,
    };
    let cutoff = inv
        .components
        .first()
        .map_or(ctx.cutoff, MultiSeries::cutoff);
    let corr = corrections(&l.fan, &l.q, &inv)?;
    let compact: Vec<usize> = compact_divisors(l.fan.valid()).into_iter().collect();
    let divisor = compact.first().copied();
    let delta = divisor.and_then(|c| corr.delta(c).cloned());
    let invariants: Vec<InvariantDoc> = delta
        .iter()
        .flat_map(|d| d.terms())
        .map(|(m, c)| InvariantDoc {
            alpha: m.exponents().to_vec(),
            n: format_rational(c),
        })
        .collect();
    let names = render::text_names(false, l.q.l());
    match ctx.format {
        Format::Json => Ok(Output::ok(json(&OpenGwDoc {
            compact_divisor: divisor,
            cutoff,
            invariants,
        }))),
        Format::Text => {
            let Some(c) = divisor else {
                return Ok(Output::ok(
                    "no compact divisor: every correction vanishes\n".into(),
                ));
            };
            let mut out = String::new();
            let d = delta.unwrap_or_else(|| MultiSeries::zero(l.q.l(), cutoff));
            writeln!(out, "delta{c} = {}", d.display_with(&names)).unwrap();
            for inv in &invariants {
                writeln!(out, "n[beta{c} + {:?}] = {}", inv.alpha, inv.n).unwrap();
            }
            Ok(Output::ok(out))
        }
        Format::Latex => {
            let Some(c) = divisor else {
                return Ok(Output::ok("\\delta = 0\n".into()));
            };
            let d = delta.unwrap_or_else(|| MultiSeries::zero(l.q.l(), cutoff));
            Ok(Output::ok(format!(
                "\\delta_{{{c}}} = {}\n",
                series_tex(&d, false)
            )))
        }
    }
}

#[derive(Serialize)]
struct MirrorTermDoc {
    ray: usize,
    exponent: Vec<i64>,
    area: Vec<i64>,
    q_power: Vec<i64>,
    correction: SeriesDoc,
}

#[derive(Serialize)]
struct MirrorDoc {
    form: &'static str,
    base_cone: usize,
    equation: String,
    terms: Vec<MirrorTermDoc>,
}

fn mirror_eq(ctx: &Context, path: &Path, form: FormArg) -> Result<Output, CliError> {
    let l = load(ctx, path)?;
    warn_mori(&l);
    let p = pipeline(&l, ctx.cutoff)?;
    let form = match form {
        FormArg::C => Form::CForm,
        FormArg::Flat => Form::Flat,
    };
    let mp = mirror_equation(&l.fan, &l.q, &p.corrections, form)?;
    Ok(Output::ok(match ctx.format {
        Format::Text => format!("{}\n", mp.to_text()),
        Format::Latex => format!("{}\n", mp.to_latex()),
        Format::Json => json(&MirrorDoc {
            form: match form {
                Form::CForm => "c",
                Form::Flat => "flat",
            },
            base_cone: mp.base_cone,
            equation: mp.to_text(),
            terms: mp
                .terms
                .iter()
                .map(|t| MirrorTermDoc {
                    ray: t.ray,
                    exponent: t.exponent.clone(),
                    area: t.area.clone(),
                    q_power: t.q_power.clone(),
                    correction: SeriesDoc::from_series(&t.correction),
                })
                .collect(),
        }),
    }))
}

#[derive(Serialize)]
struct StratumDoc {
    pair: [usize; 2],
    dimension: usize,
    vertices: Vec<Vec<String>>,
    rays: Vec<Vec<String>>,
    equations: Vec<ConstraintDoc>,
    inequalities: Vec<ConstraintDoc>,
}

#[derive(Serialize)]
struct DiscriminantDoc {
    coordinates: String,
    polytope_constants: Vec<String>,
    boundary: bool,
    strata: Vec<StratumDoc>,
}

fn discriminant(ctx: &Context, path: &Path) -> Result<Output, CliError> {
    ctx.no_latex("discriminant")?;
    let l = load(ctx, path)?;
    let p = polytope(&l)?;
    let d = discriminant_locus(&l.fan, &p)?;
    let coordinates =
        "y_j = <v_j - v_0, xi>, j = 1..n-1, for the base cone rays v_0..v_{n-1}".to_string();
    if ctx.format == Format::Json {
        return Ok(Output::ok(json(&DiscriminantDoc {
            coordinates,
            polytope_constants: render::rationals(p.constants()),
            boundary: d.boundary,
            strata: d
                .strata
                .iter()
                .map(|s| StratumDoc {
                    pair: s.pair,
                    dimension: s.dimension,
                    vertices: s.vertices.iter().map(|v| render::rationals(v)).collect(),
                    rays: s.rays.iter().map(|v| render::rationals(v)).collect(),
                    equations: s.region.equations.iter().map(ConstraintDoc::new).collect(),
                    inequalities: s
                        .region
                        .inequalities
                        .iter()
                        .map(ConstraintDoc::new)
                        .collect(),
                })
                .collect(),
        })));
    }
    let mut out = String::new();
    writeln!(out, "coordinates: {coordinates}").unwrap();
    writeln!(
        out,
        "polytope constants: ({})",
        render::rationals(p.constants()).join(", ")
    )
    .unwrap();
    if d.boundary {
        writeln!(out, "boundary: image of D0").unwrap();
    }
    for s in &d.strata {
        writeln!(
            out,
            "stratum T{{{},{}}}: dimension {}",
            s.pair[0], s.pair[1], s.dimension
        )
        .unwrap();
        for v in &s.vertices {
            writeln!(out, "  vertex {}", point(v)).unwrap();
        }
        for r in &s.rays {
            writeln!(out, "  ray {}", point(r)).unwrap();
        }
        for c in &s.region.equations {
            writeln!(out, "  {}", render::constraint(c, "=")).unwrap();
        }
        for c in &s.region.inequalities {
            writeln!(out, "  {}", render::constraint(c, ">=")).unwrap();
        }
    }
    Ok(Output::ok(out))
}

fn reference_for(example: &str, file: Option<&Path>) -> Result<ReferenceExample, CliError> {
    let builtin = lookup_reference(example)?;
    let Some(path) = file else {
        return Ok(builtin);
    };
    let doc: ReferenceDoc = serde_json::from_str(&crate::read_file(path)?)
        .map_err(|e| CliError::Parse(format!("reference file: {e}")))?;
    if doc.id != example {
        return Err(CliError::Usage(format!(
            "reference file is for '{}', not '{example}'",
            doc.id
        )));
    }
    doc.to_example()
}

#[derive(Serialize)]
struct CheckDoc {
    table: String,
    index: Vec<u32>,
    expected: String,
    actual: String,
    matches: bool,
}

#[derive(Serialize)]
struct OperatorDoc {
    operator: String,
    first_nonzero_degree: Option<u32>,
}

#[derive(Serialize)]
struct VerifyDoc {
    id: String,
    order: u32,
    cutoff: u32,
    passed: bool,
    problems: Vec<String>,
    checks: Vec<CheckDoc>,
    operators: Vec<OperatorDoc>,
}

fn verify(
    ctx: &Context,
    example: &str,
    order: u32,
    file: Option<&Path>,
) -> Result<Output, CliError> {
    ctx.no_latex("verify")?;
    let reference = reference_for(example, file)?;
    let cutoff = ctx.cutoff.max(order);
    let mut problems = Vec::new();
    if let Err(e) = reference.check_consistency() {
        match e {
            RefError::Inconsistent { .. } => problems.push(e.to_string()),
            other => return Err(other.into()),
        }
    }
    let raw = Fan::new(
        reference.rank,
        reference.rays.clone(),
        reference.max_cones.clone(),
    );
    let l = from_fan(
        ctx,
        FanInput {
            fan: raw,
            polytope_constants: None,
        },
    )?;
    if l.q.rows() != reference.charge_rows.as_slice() {
        problems.push(format!(
            "charge rows {:?} differ from the reference {:?}",
            l.q.rows(),
            reference.charge_rows
        ));
    }
    let p = pipeline(&l, cutoff)?;
    let computed = Computed {
        periods: &p.periods,
        inverse: &p.inverse,
        corrections: &p.corrections,
    };
    let report = verify_against_reference(&reference, &computed, order)?;
    let passed = problems.is_empty() && report.passed();
    let doc = VerifyDoc {
        id: report.id.clone(),
        order,
        cutoff,
        passed,
        problems,
        checks: report
            .checks
            .iter()
            .map(|c| CheckDoc {
                table: c.table.clone(),
                index: c.index.clone(),
                expected: format_rational(&c.expected),
                actual: format_rational(&c.actual),
                matches: c.matches(),
            })
            .collect(),
        operators: report
            .operators
            .iter()
            .map(|o| OperatorDoc {
                operator: o.operator.clone(),
                first_nonzero_degree: o.first_nonzero,
            })
            .collect(),
    };
    let code = if passed { exit::OK } else { exit::MISMATCH };
    let stdout = match ctx.format {
        Format::Json => json(&doc),
        _ => {
            let mut out = String::new();
            writeln!(out, "{} at order {order} (cutoff {cutoff})", doc.id).unwrap();
            for p in &doc.problems {
                writeln!(out, "problem: {p}").unwrap();
            }
            for c in &doc.checks {
                writeln!(
                    out,
                    "{} {:?}: expected {}, computed {} {}",
                    c.table,
                    c.index,
                    c.expected,
                    c.actual,
                    if c.matches { "ok" } else { "MISMATCH" }
                )
                .unwrap();
            }
            for o in &doc.operators {
                match o.first_nonzero_degree {
                    None => writeln!(
                        out,
                        "operator {}: annihilates every period through degree {cutoff}",
                        o.operator
                    ),
                    Some(d) => writeln!(
                        out,
                        "operator {}: residual starts at degree {d} MISMATCH",
                        o.operator
                    ),
                }
                .unwrap();
            }
            let matched = doc.checks.iter().filter(|c| c.matches).count();
            writeln!(
                out,
                "{}: {matched}/{} coefficients match",
                if passed { "PASS" } else { "FAIL" },
                doc.checks.len()
            )
            .unwrap();
            out
        }
    };
    Ok(Output { stdout, code })
}

fn export_ref(example: &str) -> Result<Output, CliError> {
    let r = lookup_reference(example)?;
    Ok(Output::ok(json(&ReferenceDoc::from_example(&r))))
}
