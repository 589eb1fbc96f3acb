use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use polywell_core::exact::{format_rational, format_vector, parse_vector, q, to_f64, Matrix, QVector};
use polywell_core::format::{l1_spec, parse_graph, parse_l0, tv_spec, ProblemFile, RegularizerSpec};
use polywell_core::pwl::{format_generators, Subdifferential};
use polywell_core::reductions::{
    brute_force_l0, brute_force_partition, partition_to_instance, reduce_l0, tv_partition_instance,
    PartitionInstance,
};
use polywell_core::tvgraph::{
    ct_axis_instance, ct_axis_instance_with, in_tv_polytope, nn_tv_vertices, orientation_from_point,
    tv_polytope_vertices, Graph, Orientation,
};
use polywell_core::wellposed::{
    ill_posedness_number, ill_posedness_number_exhaustive, monte_carlo_wellposedness,
    non_uniqueness_witness, solve_numeric_rational, well_posedness, ExactSolver, Status,
};
use polywell_core::{Budget, Error};

use crate::report::Report;
use crate::{Cli, Command};

/// Failure of a solver rather than of the input.
#[derive(Debug)]
struct SolverFailure(Error);

impl fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "solver failed: {}", self.0)
    }
}

impl std::error::Error for SolverFailure {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(SolverFailure(inner)) = e.downcast_ref::<SolverFailure>() {
        return match inner {
            Error::BudgetExceeded { .. } => 4,
            _ => 5,
        };
    }
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => 4,
        Some(Error::Construction(_)) | Some(Error::NoConvergence { .. }) => 5,
        _ => 1,
    }
}

pub fn run(cli: &Cli) -> u8 {
    match dispatch(cli) {
        Ok((report, code)) => {
            print!("{}", report.render());
            if let Some(path) = &cli.emit_json {
                if let Err(e) = fs::write(path, report.to_json()) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 1;
                }
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn load_problem(path: &Path) -> Result<ProblemFile> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    ProblemFile::parse(&text).map_err(|e| anyhow!(e).context(format!("{}", path.display())))
}

fn budget() -> Result<Budget> {
    Ok(Budget::from_env()?)
}

fn dispatch(cli: &Cli) -> Result<(Report, u8)> {
    match &cli.command {
        Command::Check { file } => check(file),
        Command::Diagnose { file } => diagnose(file),
        Command::Solve {
            file,
            b,
            numeric,
            tol,
            ..
        } => solve(file, b, *numeric, *tol),
        Command::Tv {
            graph,
            vertices,
            nn,
            ct,
            z,
        } => tv(graph.as_deref(), *vertices, *nn, *ct, z.as_deref()),
        Command::Reduce {
            l0,
            partition,
            tv,
            nonneg,
            output,
        } => reduce(l0.as_deref(), partition.as_deref(), *tv, *nonneg, output),
        Command::Montecarlo {
            file,
            m,
            trials,
            seed,
            replay,
        } => montecarlo(file, *m, *trials, *seed, replay),
    }
}

fn describe_subdiff(s: &Subdifferential) -> String {
    let mut parts: Vec<String> = s
        .term_generators()
        .iter()
        .map(|g| {
            if g.len() == 1 {
                format_vector(&g[0])
            } else {
                format!("conv{}", format_generators(g))
            }
        })
        .collect();
    if !s.normals().is_empty() {
        parts.push(format!("cone{}", format_generators(s.normals())));
    }
    parts.join(" + ")
}

fn shape(r: &mut Report, file: &Path, pf: &ProblemFile) {
    let inst = &pf.instance;
    r.text("file", file.display().to_string());
    if let Some(name) = pf.metadata.get("name") {
        r.text("name", name.clone());
    }
    r.int("m", inst.m()).int("n", inst.n());
    r.int("rank", inst.rank_a()).int("nullity", inst.nullity_a());
}

fn check(file: &Path) -> Result<(Report, u8)> {
    let pf = load_problem(file)?;
    let inst = &pf.instance;
    let verdict = well_posedness(inst, &budget()?)?;
    let mut r = Report::new("check");
    shape(&mut r, file, &pf);
    r.text("status", verdict.status.label());
    if verdict.status != Status::HypothesisViolated {
        r.flag("solutions-exist", verdict.solutions_exist);
        r.int("faces-scanned", verdict.faces_scanned);
    }
    let code = match verdict.status {
        Status::WellPosed => 0,
        Status::HypothesisViolated => {
            r.text("reason", "the domain of f is not full-dimensional");
            3
        }
        Status::IllPosed => {
            match (&verdict.offending_face, &verdict.row_space_witness) {
                (Some(face), Some(z)) => {
                    r.text("offending-face", face.pattern.to_string());
                    r.int("face-dim-cell", face.dim_cell);
                    r.int("face-dim-subdiff", face.dim_subdiff);
                    r.text("subdifferential", describe_subdiff(&face.subdiff));
                    r.text("row-space-witness", format_vector(z));
                    r.text("A^T z", format_vector(&inst.a().tmul_vec(z)?));
                    let cert = non_uniqueness_witness(inst, face, z).map_err(SolverFailure)?;
                    r.text("certificate.b", format_vector(&cert.b));
                    r.text("certificate.x", format_vector(&cert.x));
                    r.text("certificate.y", format_vector(&cert.y));
                    r.text("certificate.direction", format_vector(&cert.direction));
                    r.flag("certificate.verified", cert.verify(inst)?);
                    let b: Vec<String> = cert.b.iter().map(format_rational).collect();
                    r.text(
                        "replay",
                        format!("polywell solve {} --b \"{}\" --exact", file.display(), b.join(",")),
                    );
                }
                _ => {
                    r.text("reason", "no subdifferential meets row(A), so no data vector has a minimizer");
                }
            }
            2
        }
    };
    Ok((r, code))
}

fn diagnose(file: &Path) -> Result<(Report, u8)> {
    let pf = load_problem(file)?;
    let inst = &pf.instance;
    let b = budget()?;
    let rep = ill_posedness_number(inst, &b)?;
    let unordered = ill_posedness_number_exhaustive(inst, &b)?;
    if unordered != rep.number {
        return Err(anyhow!(Error::Construction(
            "sorted and exhaustive scans disagree".into()
        )));
    }
    let mut r = Report::new("diagnose");
    shape(&mut r, file, &pf);
    r.flag("full-dimensional-domain", inst.f().is_full_dimensional());
    match (&rep.number, &rep.face, &rep.witness) {
        (Some(k), Some(face), Some(z)) => {
            r.int("ill-posedness-number", *k);
            r.text("minimal-face", face.pattern.to_string());
            r.int("face-dim-cell", face.dim_cell);
            r.text("subdifferential", describe_subdiff(&face.subdiff));
            r.text("row-space-witness", format_vector(z));
            r.text(
                "rank-condition",
                format!(
                    "well-posed iff nullity <= {k}, i.e. rank(A) >= {}",
                    inst.n().saturating_sub(*k)
                ),
            );
            let wp = inst.f().is_full_dimensional() && inst.nullity_a() <= *k;
            r.flag("well-posed", wp);
        }
        _ => {
            r.text("ill-posedness-number", "infinity");
            r.text("rank-condition", "no subdifferential meets row(A); no data vector has a minimizer");
            r.flag("well-posed", false);
        }
    }
    r.text("cross-check", "exhaustive scan agrees");
    Ok((r, 0))
}

fn fmt_f64(v: f64) -> String {
    let s = format!("{v:.10}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn solve(file: &Path, b: &str, numeric: bool, tol: f64) -> Result<(Report, u8)> {
    let pf = load_problem(file)?;
    let inst = &pf.instance;
    let b = parse_vector(b).context("--b")?;
    if b.len() != inst.m() {
        bail!(Error::DimensionMismatch {
            expected: inst.m(),
            found: b.len()
        });
    }
    let mut r = Report::new("solve");
    shape(&mut r, file, &pf);
    r.text("b", format_vector(&b));
    if numeric {
        let s = solve_numeric_rational(inst, &b, tol).map_err(SolverFailure)?;
        r.text("mode", "numeric");
        r.text(
            "minimizer",
            format!("({})", s.x.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(", ")),
        );
        r.text("objective", fmt_f64(s.objective));
        r.int("iterations", s.iterations);
        r.text("fixed-point-residual", format!("{:.3e}", s.residual));
        return Ok((r, 0));
    }
    let budget = budget()?;
    let mut solver = ExactSolver::new(inst, &budget)?;
    let s = solver.solve(&b).map_err(SolverFailure)?;
    r.text("mode", "exact");
    r.text("minimizer", format_vector(&s.minimizer));
    r.text("minimizer-approx", {
        let v: Vec<String> = s.minimizer.iter().map(|x| fmt_f64(to_f64(x))).collect();
        format!("({})", v.join(", "))
    });
    r.text("objective", format_rational(&s.objective));
    r.text("cell", s.pattern.to_string());
    r.text(
        "residual-gradient",
        format_vector(&inst.residual_gradient(&b, &s.minimizer)?),
    );
    r.flag("fermat-verified", s.fermat_verified);
    r.flag("unique", s.flat_direction.is_none());
    if let Some(d) = &s.flat_direction {
        r.text("flat-direction", format_vector(d));
    }
    Ok((r, 0))
}

fn arcs(g: &Graph, u: &Orientation) -> String {
    u.arcs(g)
        .iter()
        .map(|(t, h)| format!("{t}->{h}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn load_graph(path: Option<&Path>) -> Result<Graph> {
    let path = path.ok_or_else(|| anyhow!(Error::Format("a graph file is required".into())))?;
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_graph(&text).map_err(|e| anyhow!(e).context(format!("{}", path.display())))
}

fn vertex_lines(g: &Graph, vertices: &[QVector]) -> Result<Vec<String>> {
    vertices
        .iter()
        .map(|v| {
            let u = orientation_from_point(g, v)?
                .ok_or_else(|| Error::Construction(format!("no orientation for {}", format_vector(v))))?;
            Ok(format!("{}  via  {}", format_vector(v), arcs(g, &u)))
        })
        .collect()
}

fn tv(graph: Option<&Path>, vertices: bool, nn: bool, ct: Option<usize>, z: Option<&str>) -> Result<(Report, u8)> {
    let b = budget()?;
    if let Some(n) = ct {
        let rep = match z {
            Some(z) => ct_axis_instance_with(n, &parse_vector(z).context("--z")?)?,
            None => ct_axis_instance(n)?,
        };
        let g = Graph::grid(n);
        let mut r = Report::new("tv ct");
        r.int("N", n);
        r.text("z", format_vector(&rep.z));
        r.list("A^T z", rep.grid_rows().iter().map(|row| format_vector(row)).collect());
        r.int("rank", rep.rank_a);
        r.int("pixels", n * n);
        r.flag("certified", rep.certified());
        match &rep.orientation {
            Some(u) => {
                r.text("orientation", arcs(&g, u));
                r.text(
                    "conclusion",
                    format!(
                        "A^T z is a vertex of the TV dual polytope, so well-posedness needs rank(A) >= {}; here rank(A) = {}",
                        n * n,
                        rep.rank_a
                    ),
                );
                r.flag("ill-posed", rep.rank_a < n * n);
            }
            None => {
                r.flag("in-tv-polytope", in_tv_polytope(&g, &rep.point)?);
                r.text("conclusion", "A^T z is not a vertex of the TV dual polytope; no certificate");
            }
        }
        return Ok((r, 0));
    }
    let g = load_graph(graph)?;
    let tv = tv_polytope_vertices(&g, &b)?;
    let mut r = Report::new(if nn { "tv nn" } else { "tv vertices" });
    r.int("nodes", g.node_count()).int("edges", g.edge_count());
    r.flag("forest", g.is_forest());
    if vertices {
        r.int("vertex-count", tv.len());
        r.list("vertices", vertex_lines(&g, &tv)?);
    } else {
        let nnv = nn_tv_vertices(&g, &b)?;
        r.int("vertex-count", nnv.len());
        r.list("vertices", nnv.iter().map(|v| format_vector(v)).collect());
        r.flag("equals-tv-vertices", nnv == tv);
    }
    Ok((r, 0))
}

fn write_problem(path: &Path, pf: &ProblemFile) -> Result<()> {
    let text = pf.to_toml();
    let back = ProblemFile::parse(&text)?;
    if back.instance != pf.instance {
        return Err(anyhow!(Error::Construction("emitted file does not round-trip".into())));
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn parse_weights(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|w| {
            w.trim()
                .parse::<u64>()
                .map_err(|_| anyhow!(Error::Format(format!("`{}` is not a positive integer", w.trim()))))
        })
        .collect()
}

fn reduce(l0: Option<&Path>, partition: Option<&str>, tv: bool, nonneg: bool, out: &Path) -> Result<(Report, u8)> {
    let b = budget()?;
    let mut r = Report::new("reduce");
    if let Some(path) = l0 {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let inst = parse_l0(&text).map_err(|e| anyhow!(e).context(format!("{}", path.display())))?;
        let reduced = reduce_l0(&inst)?;
        let mut pf = ProblemFile::from_instance(&reduced);
        pf.metadata.insert("source".into(), format!("l0 reduction of {}", path.display()));
        write_problem(out, &pf)?;
        let oracle = brute_force_l0(&inst).ok();
        let number = ill_posedness_number(&reduced, &b)?.number;
        r.text("source", "l0");
        r.flag("nonneg", inst.nonneg);
        r.text("output", out.display().to_string());
        r.text("l0-minimum", oracle.map_or("infeasible".into(), |k| k.to_string()));
        r.text("ill-posedness-number", number.map_or("infinity".into(), |k| k.to_string()));
        r.flag("agree", oracle == number);
        return Ok((r, 0));
    }
    let weights = parse_weights(partition.expect("clap requires a source"))?;
    let p = PartitionInstance::new(weights)?;
    let (inst, spec): (_, Vec<RegularizerSpec>) = if tv {
        let inst = tv_partition_instance(&p, nonneg)?;
        let mut spec = vec![tv_spec(&Graph::path(p.weights().len() + 1), &q(1))];
        if nonneg {
            spec.push(RegularizerSpec::NonnegIndicator);
        }
        (inst, spec)
    } else {
        (partition_to_instance(&p)?, vec![l1_spec(None, &q(1))])
    };
    let mut pf = ProblemFile {
        instance: inst.clone(),
        regularizers: spec,
        metadata: Default::default(),
    };
    let w: Vec<String> = p.weights().iter().map(u64::to_string).collect();
    pf.metadata.insert("source".into(), format!("partition {}", w.join(",")));
    write_problem(out, &pf)?;
    let exists = brute_force_partition(&p)?;
    let verdict = well_posedness(&inst, &b)?;
    r.text("source", if tv { "partition (path TV)" } else { "partition (l1)" });
    r.flag("nonneg", nonneg);
    r.text("output", out.display().to_string());
    r.flag("partition-exists", exists);
    r.text("status", verdict.status.label());
    r.flag("agree", exists == (verdict.status == Status::IllPosed));
    Ok((r, 0))
}

fn replay_text(m: usize, trials: usize, seed: u64, samples: &[(usize, &Matrix)]) -> String {
    let mut s = format!("version = 1\nm = {m}\ntrials = {trials}\nseed = {seed}\n");
    for (trial, a) in samples {
        s.push_str(&format!("\n[[sample]]\ntrial = {trial}\nA = [\n"));
        for row in a.rows() {
            let cells: Vec<String> = row.iter().map(|x| format!("\"{}\"", format_rational(x))).collect();
            s.push_str(&format!("    [{}],\n", cells.join(", ")));
        }
        s.push_str("]\n");
    }
    s
}

fn montecarlo(file: &Path, m: usize, trials: usize, seed: u64, replay: &Path) -> Result<(Report, u8)> {
    let pf = load_problem(file)?;
    let f = pf.instance.f();
    let rep = monte_carlo_wellposedness(f, m, trials, seed, &budget()?)?;
    let mut r = Report::new("montecarlo");
    r.text("file", file.display().to_string());
    r.int("n", f.ambient_dim()).int("m", m).int("trials", trials);
    r.text("seed", seed.to_string());
    r.text("p", rep.p.map_or("-".into(), |p| p.to_string()));
    r.int("well-posed", rep.well_posed);
    r.int("ill-posed", rep.ill_posed);
    r.int("hypothesis-violated", rep.hypothesis_violated);
    r.text(
        "fraction",
        rep.fraction().map_or("-".into(), |x| format!("{x:.4}")),
    );
    if !rep.ill_posed_samples.is_empty() {
        let samples: Vec<(usize, &Matrix)> = rep.ill_posed_trials.iter().copied().zip(&rep.ill_posed_samples).collect();
        fs::write(replay, replay_text(m, trials, seed, &samples))
            .with_context(|| format!("cannot write {}", replay.display()))?;
        r.text("replay", replay.display().to_string());
        r.list("ill-posed-trials", rep.ill_posed_trials.iter().map(usize::to_string).collect());
    }
    Ok((r, 0))
}
