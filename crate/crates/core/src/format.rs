//! Problem, l0 and graph file formats.
//!
//! Problem and l0 files are TOML with a required leading `version = 1`. Rationals are
//! written as strings `"p/q"` (integers are also accepted as bare TOML integers).
//!
//! ```toml
//! version = 1
//! A = [["1", "0"]]
//!
//! [[regularizer]]
//! kind = "l1"
//! L = [["1", "0"]]
//! gamma = "1"
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, Matrix, QVector, Rational};
use crate::polyhedra::HPolyhedron;
use crate::pwl::{AffinePiece, CpwlFunction, MaxAffine};
use crate::reductions::L0Instance;
use crate::tvgraph::{difference_matrix, Graph};
use crate::wellposed::ProblemInstance;

pub const FORMAT_VERSION: u32 = 1;

/// A rational that (de)serializes as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Q, E> {
                parse_rational(v).map(Q).map_err(|e| E::custom(e.to_string()))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
        }
        d.deserialize_any(V)
    }
}

fn qs(v: &[Rational]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

fn unq(v: &[Q]) -> QVector {
    v.iter().map(|x| x.0.clone()).collect()
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<Q>> {
    m.rows().iter().map(|r| qs(r)).collect()
}

fn matrix_from(rows: &[Vec<Q>], cols: Option<usize>, what: &str) -> Result<Matrix> {
    let n = cols.or_else(|| rows.first().map(Vec::len)).unwrap_or(0);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::Format(format!(
                "{what}: row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
    }
    Matrix::from_rows(n, &rows.iter().map(|r| unq(r)).collect::<Vec<_>>())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub v: Vec<Q>,
    pub w: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub a: Vec<Q>,
    pub b: Q,
}

/// One summand of the regularizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegularizerSpec {
    /// `γ‖Lx‖₁`; `L` defaults to the identity.
    L1 {
        #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
        l: Option<Vec<Vec<Q>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<Q>,
    },
    LinfBallIndicator,
    NonnegIndicator,
    /// `γ Σ_{(i,j) ∈ E} |x_i − x_j|` with 0-based node indices.
    Tv {
        nodes: usize,
        edges: Vec<[usize; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<Q>,
    },
    MaxAffine {
        pieces: Vec<PieceSpec>,
    },
    /// Indicator of `{x : a·x <= b for ineqs, a·x = b for eqs}`.
    Indicator {
        #[serde(default)]
        ineqs: Vec<RowSpec>,
        #[serde(default)]
        eqs: Vec<RowSpec>,
    },
}

impl RegularizerSpec {
    fn gamma(g: &Option<Q>) -> Rational {
        g.as_ref().map_or_else(Rational::one, |q| q.0.clone())
    }

    pub fn build(&self, n: usize) -> Result<CpwlFunction> {
        match self {
            RegularizerSpec::L1 { l, gamma } => {
                let l = match l {
                    Some(rows) => matrix_from(rows, Some(n), "l1.L")?,
                    None => Matrix::identity(n),
                };
                CpwlFunction::l1(&l, &Self::gamma(gamma))
            }
            RegularizerSpec::LinfBallIndicator => Ok(CpwlFunction::linf_ball_indicator(n)),
            RegularizerSpec::NonnegIndicator => Ok(CpwlFunction::nonneg_indicator(n)),
            RegularizerSpec::Tv { nodes, edges, gamma } => {
                if *nodes != n {
                    return Err(Error::Format(format!("tv: {nodes} nodes but A has {n} columns")));
                }
                let e: Vec<(usize, usize)> = edges.iter().map(|[a, b]| (*a, *b)).collect();
                let g = Graph::new(*nodes, &e).map_err(|e| Error::Format(format!("tv: {e}")))?;
                CpwlFunction::l1(&difference_matrix(&g), &Self::gamma(gamma))
            }
            RegularizerSpec::MaxAffine { pieces } => {
                for (i, p) in pieces.iter().enumerate() {
                    if p.v.len() != n {
                        return Err(Error::Format(format!(
                            "max_affine: piece {i} has {} slope entries, expected {n}",
                            p.v.len()
                        )));
                    }
                }
                let pieces = pieces.iter().map(|p| AffinePiece::new(unq(&p.v), p.w.0.clone())).collect();
                CpwlFunction::max_affine(n, pieces)
            }
            RegularizerSpec::Indicator { ineqs, eqs } => {
                let mut d = HPolyhedron::whole_space(n);
                for (i, r) in ineqs.iter().chain(eqs).enumerate() {
                    if r.a.len() != n {
                        return Err(Error::Format(format!(
                            "indicator: row {i} has {} entries, expected {n}",
                            r.a.len()
                        )));
                    }
                }
                for r in ineqs {
                    d.add_inequality(unq(&r.a), r.b.0.clone())?;
                }
                for r in eqs {
                    d.add_equality(unq(&r.a), r.b.0.clone())?;
                }
                CpwlFunction::indicator(d)
            }
        }
    }

    /// Generic description of `f`: one `max_affine` per term plus an `indicator` for the
    /// domain.
    pub fn describe(f: &CpwlFunction) -> Vec<RegularizerSpec> {
        let mut out: Vec<RegularizerSpec> = f
            .terms()
            .iter()
            .map(|t: &MaxAffine| RegularizerSpec::MaxAffine {
                pieces: t
                    .pieces
                    .iter()
                    .map(|p| PieceSpec {
                        v: qs(&p.slope),
                        w: Q(p.offset.clone()),
                    })
                    .collect(),
            })
            .collect();
        let d = f.domain();
        if !d.inequalities().is_empty() || !d.equalities().is_empty() {
            let rows = |cs: &[crate::polyhedra::Constraint]| {
                cs.iter()
                    .map(|c| RowSpec {
                        a: qs(&c.normal),
                        b: Q(c.rhs.clone()),
                    })
                    .collect()
            };
            // A lone zero term is implied by the indicator.
            if f.terms().len() == 1 && f.terms()[0].is_zero() {
                out.clear();
            }
            out.push(RegularizerSpec::Indicator {
                ineqs: rows(d.inequalities()),
                eqs: rows(d.equalities()),
            });
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    version: u32,
    #[serde(rename = "A")]
    a: Vec<Vec<Q>>,
    /// Column count, only needed when `A` has no rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<Vec<Vec<Q>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
    #[serde(default, rename = "regularizer")]
    regularizers: Vec<RegularizerSpec>,
}

/// A parsed problem file: the instance plus the description it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub instance: ProblemInstance,
    pub regularizers: Vec<RegularizerSpec>,
    pub metadata: BTreeMap<String, String>,
}

fn check_leading_version(text: &str) -> Result<()> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    match first {
        Some(l) if l.starts_with("version") => Ok(()),
        _ => Err(Error::Format("the first entry must be `version`".into())),
    }
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {v}")));
    }
    Ok(())
}

fn toml_error(e: toml::de::Error) -> Error {
    Error::Format(e.to_string().trim_end().to_string())
}

impl ProblemFile {
    pub fn build(a: Matrix, sigma: Option<Matrix>, regularizers: Vec<RegularizerSpec>) -> Result<ProblemInstance> {
        let n = a.ncols();
        let mut f: Option<CpwlFunction> = None;
        for r in &regularizers {
            let g = r.build(n)?;
            f = Some(match f {
                None => g,
                Some(acc) => acc.sum(&g)?,
            });
        }
        let f = match f {
            Some(f) => f,
            None => CpwlFunction::new(n, vec![], HPolyhedron::whole_space(n))?,
        };
        match sigma {
            Some(s) => ProblemInstance::with_sigma(a, f, s),
            None => ProblemInstance::new(a, f),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        check_leading_version(text)?;
        let raw: RawProblem = toml::from_str(text).map_err(toml_error)?;
        check_version(raw.version)?;
        let a = matrix_from(&raw.a, raw.n, "A")?;
        let m = a.nrows();
        let sigma = match &raw.sigma {
            Some(rows) => {
                let s = matrix_from(rows, Some(m), "sigma")?;
                if s.nrows() != m {
                    return Err(Error::Format(format!("sigma must be {m}x{m}")));
                }
                Some(s)
            }
            None => None,
        };
        let instance = Self::build(a, sigma, raw.regularizers.clone())?;
        Ok(ProblemFile {
            instance,
            regularizers: raw.regularizers,
            metadata: raw.metadata,
        })
    }

    /// Uses the generic regularizer description of `inst.f()`.
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        ProblemFile {
            instance: inst.clone(),
            regularizers: RegularizerSpec::describe(inst.f()),
            metadata: BTreeMap::new(),
        }
    }

    pub fn to_toml(&self) -> String {
        let inst = &self.instance;
        let sigma = if inst.sigma() == &Matrix::identity(inst.m()) {
            None
        } else {
            Some(matrix_rows(inst.sigma()))
        };
        let raw = RawProblem {
            version: FORMAT_VERSION,
            a: matrix_rows(inst.a()),
            n: (inst.m() == 0).then_some(inst.n()),
            sigma,
            metadata: self.metadata.clone(),
            regularizers: self.regularizers.clone(),
        };
        toml::to_string(&raw).expect("problem files serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawL0 {
    version: u32,
    #[serde(rename = "B")]
    b: Vec<Vec<Q>>,
    y: Vec<Q>,
    #[serde(default)]
    nonneg: bool,
}

pub fn parse_l0(text: &str) -> Result<L0Instance> {
    check_leading_version(text)?;
    let raw: RawL0 = toml::from_str(text).map_err(toml_error)?;
    check_version(raw.version)?;
    let b = matrix_from(&raw.b, None, "B")?;
    if b.nrows() != raw.y.len() {
        return Err(Error::Format(format!(
            "y has {} entries but B has {} rows",
            raw.y.len(),
            b.nrows()
        )));
    }
    L0Instance::new(b, unq(&raw.y), raw.nonneg)
}

pub fn l0_to_toml(inst: &L0Instance) -> String {
    toml::to_string(&RawL0 {
        version: FORMAT_VERSION,
        b: matrix_rows(&inst.b),
        y: qs(&inst.y),
        nonneg: inst.nonneg,
    })
    .expect("l0 files serialize")
}

/// `nodes E` on the first line, then `E` lines `i j` (0-based). `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let nums = |lineno: usize, l: &str| -> Result<(usize, usize)> {
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Format(format!("line {lineno}: expected two integers")));
        }
        let p = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Format(format!("line {lineno}: `{s}` is not a nonnegative integer")))
        };
        Ok((p(parts[0])?, p(parts[1])?))
    };
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| Error::Format("empty graph file".into()))?;
    let (nodes, count) = nums(lineno, header)?;
    let mut edges = Vec::with_capacity(count);
    for (lineno, l) in lines {
        edges.push(nums(lineno, l)?);
    }
    if edges.len() != count {
        return Err(Error::Format(format!(
            "header announces {count} edges, found {}",
            edges.len()
        )));
    }
    Graph::new(nodes, &edges).map_err(|e| Error::Format(e.to_string()))
}

pub fn graph_to_text(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.node_count(), g.edge_count());
    for (i, j) in g.edges() {
        s.push_str(&format!("{i} {j}\n"));
    }
    s
}

/// Spec for `γ‖x‖₁` or `γ‖Lx‖₁`.
pub fn l1_spec(l: Option<&Matrix>, gamma: &Rational) -> RegularizerSpec {
    RegularizerSpec::L1 {
        l: l.map(matrix_rows),
        gamma: (!gamma.is_one()).then(|| Q(gamma.clone())),
    }
}

pub fn tv_spec(g: &Graph, gamma: &Rational) -> RegularizerSpec {
    RegularizerSpec::Tv {
        nodes: g.node_count(),
        edges: g.edges().iter().map(|&(i, j)| [i, j]).collect(),
        gamma: (!gamma.is_one() && !gamma.is_zero()).then(|| Q(gamma.clone())),
    }
}
