//! Subcommands. Each reads its files through [`Inputs`], does the work and
//! returns a [`RunReport`] ready for printing.

use std::path::PathBuf;

use clap::{ArgGroup, Args};
use serde::{Deserialize, Serialize};
use toricgm::factorization::{classify, in_variety_kernel_oracle, is_facial_lp, Evidence, VerdictKind};
use toricgm::graph_analysis::{chordless_cycle, is_chordal, nondecomposable_partition, saturated_separations};
use toricgm::markov_ci::pairwise_ideal;
use toricgm::mle::{
    assemble_mle_system_with, ips_fit, rational_root_check, solve_mle_exact_with, solve_mle_shape_with, DEFAULT_IPS_MAX_CYCLES,
    DEFAULT_IPS_TOL,
};
use toricgm::model_core::cliques;
use toricgm::poly_engine::Budget;
use toricgm::toric::{compute_toric_basis_with, is_quadratic_basis};

use crate::formats::{
    load_model, parse_json, parse_order, to_json, BasisFile, GeneratorsFile, GraphFile, MatrixFile, ValuesFile,
};
use crate::{write_file, CliError, Inputs, RunReport};

/// Active cells above which `mle-exact` needs `--heavy`.
pub const LIGHT_CELL_LIMIT: usize = 12;
/// S-pair budget of a `--heavy` run unless `--budget` says otherwise.
pub const HEAVY_BUDGET: usize = 200_000_000;

fn budget(explicit: Option<usize>, fallback: Budget) -> Budget {
    explicit.map(Budget::new).unwrap_or(fallback)
}

// ------------------------------------------------------------------ model

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["graph", "generators", "matrix"])))]
pub struct ModelArgs {
    /// Graph file; the generators are its maximal cliques.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Generators file for a hierarchical log-linear model.
    #[arg(long)]
    pub generators: Option<PathBuf>,
    /// Raw matrix file, validated for equal column sums.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Where to write the matrix file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResults {
    pub source: String,
    pub d: usize,
    pub m: usize,
    pub column_sum: i64,
    pub matrix: MatrixFile,
}

pub fn model(args: &ModelArgs) -> Result<RunReport<ModelResults>, CliError> {
    let mut inputs = Inputs::default();
    let (source, a) = if let Some(p) = &args.graph {
        let g = parse_json::<GraphFile>("graph", &inputs.read("--graph", p)?)?.to_graph()?;
        ("graph", toricgm::model_core::build_graph_matrix(&g)?)
    } else if let Some(p) = &args.generators {
        ("generators", parse_json::<GeneratorsFile>("generators", &inputs.read("--generators", p)?)?.to_model()?)
    } else {
        let p = args.matrix.as_ref().expect("clap requires one source");
        ("matrix", parse_json::<MatrixFile>("matrix", &inputs.read("--matrix", p)?)?.to_model()?)
    };
    let matrix = MatrixFile::from_model(&a);
    if let Some(out) = &args.out {
        write_file(out, &to_json(&matrix))?;
    }
    let results = ModelResults { source: source.into(), d: a.d(), m: a.m(), column_sum: a.column_sum(), matrix };
    Ok(inputs.finish("model", results))
}

// ------------------------------------------------------------------ basis

#[derive(Args, Debug)]
pub struct BasisArgs {
    /// Model file: a matrix, graph or generators file.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value = "grevlex", value_parser = ["lex", "grevlex"])]
    pub order: String,
    /// Seed the computation with the pairwise Markov binomials; graph models only.
    #[arg(long)]
    pub seed_pairwise: bool,
    /// S-pair budget; defaults to `TORICGM_BUDGET` or the built-in limit.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Where to write the basis file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisResults {
    pub model_source: String,
    pub seeded: bool,
    pub size: usize,
    pub max_degree: u64,
    pub quadratic: bool,
    pub basis: BasisFile,
}

pub fn basis(args: &BasisArgs) -> Result<RunReport<BasisResults>, CliError> {
    let mut inputs = Inputs::default();
    let model = load_model("model", &inputs.read("--model", &args.model)?)?;
    inputs.option("--order", &args.order);
    inputs.option("--seed-pairwise", if args.seed_pairwise { "yes" } else { "no" });
    let order = parse_order(&args.order, model.matrix.m())?;
    let budget = budget(args.budget, Budget::from_env());
    let basis = if args.seed_pairwise {
        let g = model.graph.as_ref().ok_or_else(|| CliError::validation("--seed-pairwise needs a graph model"))?;
        let seed = pairwise_ideal(g);
        compute_toric_basis_with(&model.matrix, &order, Some(&seed), budget)?
    } else {
        compute_toric_basis_with(&model.matrix, &order, None, budget)?
    };
    let file = BasisFile::from_basis(&basis);
    if let Some(out) = &args.out {
        write_file(out, &to_json(&file))?;
    }
    let results = BasisResults {
        model_source: model.kind.into(),
        seeded: args.seed_pairwise,
        size: basis.len(),
        max_degree: basis.binomials().iter().map(|b| b.degree()).max().unwrap_or(0),
        quadratic: is_quadratic_basis(&basis),
        basis: file,
    };
    Ok(inputs.finish("basis", results))
}

// ------------------------------------------------------------------ check

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Basis file for the same model.
    #[arg(long)]
    pub basis: PathBuf,
    /// Distribution file.
    #[arg(long)]
    pub dist: PathBuf,
    /// Report the distribution rescaled to total one.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvidenceOut {
    None,
    InfeasibleColumn { column: usize, column_label: String, covered_rows: Vec<usize> },
    FailedBinomial { index: usize, binomial: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResults {
    pub verdict: String,
    pub evidence: EvidenceOut,
    pub support: Vec<String>,
    /// Membership in the variety by the kernel oracle, independent of the basis.
    pub kernel_oracle_in_variety: bool,
    /// Facial certificate of the support when it has one.
    pub facial_certificate: Option<Vec<String>>,
    pub distribution: Option<ValuesFile>,
}

pub fn check(args: &CheckArgs) -> Result<RunReport<CheckResults>, CliError> {
    let mut inputs = Inputs::default();
    let model = load_model("model", &inputs.read("--model", &args.model)?)?;
    let a = &model.matrix;
    let basis = parse_json::<BasisFile>("basis", &inputs.read("--basis", &args.basis)?)?.to_basis(a)?;
    let p = parse_json::<ValuesFile>("dist", &inputs.read("--dist", &args.dist)?)?.to_distribution(a.m())?;
    inputs.option("--normalize", if args.normalize { "yes" } else { "no" });
    let verdict = classify(a, &basis, &p);
    let labels = a.col_labels();
    let evidence = match verdict.evidence {
        Evidence::None => EvidenceOut::None,
        Evidence::InfeasibleColumn { column, covered_rows } => {
            EvidenceOut::InfeasibleColumn { column, column_label: labels[column].clone(), covered_rows }
        }
        Evidence::FailedBinomial { index, binomial, value } => {
            EvidenceOut::FailedBinomial { index, binomial: binomial.text(&a.var_names()), value: value.to_string() }
        }
    };
    let support = p.support();
    let facial_certificate = match verdict.kind {
        VerdictKind::Outside => None,
        _ => is_facial_lp(a, &support).1.map(|c| c.c.iter().map(|x| x.to_string()).collect()),
    };
    let distribution = (args.normalize && !support.is_empty()).then(|| ValuesFile::from_rats(p.normalized().values()));
    let results = CheckResults {
        verdict: verdict.kind.as_str().into(),
        evidence,
        support: support.iter().map(|&j| labels[j].clone()).collect(),
        kernel_oracle_in_variety: in_variety_kernel_oracle(a, &p),
        facial_certificate,
        distribution,
    };
    Ok(inputs.finish("check", results))
}

// -------------------------------------------------------------------- ips

#[derive(Args, Debug)]
pub struct IpsArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Count file.
    #[arg(long)]
    pub counts: PathBuf,
    #[arg(long, default_value_t = DEFAULT_IPS_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_IPS_MAX_CYCLES)]
    pub max_cycles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpsResults {
    /// Fitted counts for every cell, in value order.
    pub fitted: Vec<f64>,
    pub dropped: Vec<String>,
    pub cycles: usize,
    pub max_error: f64,
    pub loglik: f64,
}

pub fn ips(args: &IpsArgs) -> Result<RunReport<IpsResults>, CliError> {
    let mut inputs = Inputs::default();
    let model = load_model("model", &inputs.read("--model", &args.model)?)?;
    let a = &model.matrix;
    let n = parse_json::<ValuesFile>("counts", &inputs.read("--counts", &args.counts)?)?.to_counts(a.m())?;
    inputs.option("--tol", &args.tol.to_string());
    inputs.option("--max-cycles", &args.max_cycles.to_string());
    let fit = ips_fit(a, &n, args.tol, args.max_cycles)?;
    let dropped = (0..a.m()).filter(|j| !fit.active.contains(j)).map(|j| a.col_labels()[j].clone()).collect();
    let results = IpsResults {
        fitted: fit.fitted,
        dropped,
        cycles: fit.cycles,
        max_error: fit.max_error,
        loglik: fit.loglik.last().copied().unwrap_or(f64::NAN),
    };
    Ok(inputs.finish("ips", results))
}

// -------------------------------------------------------------- mle-exact

#[derive(Args, Debug)]
pub struct MleArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub counts: PathBuf,
    /// S-pair budget for both Gröbner basis runs.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Allow systems with more than twelve active cells.
    #[arg(long)]
    pub heavy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootOut {
    pub lo: String,
    pub hi: String,
    pub approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleResults {
    pub active: Vec<String>,
    pub binomials: usize,
    /// `shape` when the lex basis was read off a grevlex one, else `lex`.
    pub method: String,
    /// Cell whose value the univariate polynomial constrains.
    pub psi_variable: String,
    pub degree: usize,
    /// Coefficients from the leading one down.
    pub psi: Vec<String>,
    pub rational_roots: Vec<String>,
    pub positive_roots: Vec<RootOut>,
    pub rational_mle: bool,
    /// Fitted counts for every cell, in value order.
    pub estimate: Option<Vec<f64>>,
    pub exact_estimate: Option<Vec<String>>,
}

pub fn mle_exact(args: &MleArgs) -> Result<RunReport<MleResults>, CliError> {
    let mut inputs = Inputs::default();
    let model = load_model("model", &inputs.read("--model", &args.model)?)?;
    let a = &model.matrix;
    let n = parse_json::<ValuesFile>("counts", &inputs.read("--counts", &args.counts)?)?.to_counts(a.m())?;
    inputs.option("--heavy", if args.heavy { "yes" } else { "no" });
    let fallback = if args.heavy { Budget::new(HEAVY_BUDGET) } else { Budget::from_env() };
    let budget = budget(args.budget, fallback);
    let sys = assemble_mle_system_with(a, &n, budget)?;
    if sys.nvars() > LIGHT_CELL_LIMIT && !args.heavy {
        return Err(CliError::validation(format!(
            "{} active cells; elimination above {LIGHT_CELL_LIMIT} cells needs --heavy",
            sys.nvars()
        )));
    }
    // both routes give the same lex basis; lex Buchberger is only needed
    // when the last cell does not separate the solutions
    let (sol, method) = match solve_mle_shape_with(&sys, budget) {
        Ok(sol) => (sol, "shape"),
        Err(toricgm::Error::NotTriangular(_)) => (solve_mle_exact_with(&sys, budget)?, "lex"),
        Err(e) => return Err(e.into()),
    };
    let full = |cells: &[f64]| {
        let mut out = vec![0.0; a.m()];
        for (&j, &x) in sys.active.iter().zip(cells) {
            out[j] = x;
        }
        out
    };
    let exact_estimate = sol.rational_estimate().map(|cells| {
        let mut out = vec!["0".to_string(); a.m()];
        for (&j, x) in sys.active.iter().zip(&cells) {
            out[j] = x.to_string();
        }
        out
    });
    let results = MleResults {
        active: sys.active.iter().map(|&j| a.col_labels()[j].clone()).collect(),
        binomials: sys.binomials.len(),
        method: method.into(),
        psi_variable: a.col_labels()[sys.active[sol.psi_var]].clone(),
        degree: sol.psi.len() - 1,
        psi: sol.psi_strings(),
        rational_roots: rational_root_check(&sol.psi).iter().map(|r| r.to_string()).collect(),
        positive_roots: sol
            .profiles
            .iter()
            .map(|p| RootOut { lo: p.root.lo.to_string(), hi: p.root.hi.to_string(), approx: p.root.approx() })
            .collect(),
        rational_mle: exact_estimate.is_some(),
        estimate: sol.estimate().map(|p| full(&p.cells)),
        exact_estimate,
    };
    Ok(inputs.finish("mle-exact", results))
}

// ------------------------------------------------------------------ graph

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationOut {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionOut {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
    pub d: Vec<String>,
    pub e: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphResults {
    pub vertices: usize,
    pub chordal: bool,
    /// Perfect elimination order, first eliminated first.
    pub elimination_order: Option<Vec<String>>,
    pub chordless_cycle: Option<Vec<String>>,
    pub cliques: Vec<Vec<String>>,
    pub separations: Vec<SeparationOut>,
    /// Set when the vertex count is above the enumeration cap.
    pub separations_truncated: bool,
    pub partition: Option<PartitionOut>,
}

pub fn graph(args: &GraphArgs) -> Result<RunReport<GraphResults>, CliError> {
    let mut inputs = Inputs::default();
    let g = parse_json::<GraphFile>("graph", &inputs.read("--graph", &args.graph)?)?.to_graph()?;
    let names = |vs: &[usize]| vs.iter().map(|&v| g.name(v).to_string()).collect::<Vec<_>>();
    let (chordal, peo) = is_chordal(&g);
    let (separations, separations_truncated) = match saturated_separations(&g) {
        Ok(seps) => (seps, false),
        Err(toricgm::Error::VertexCapExceeded { .. }) => (Vec::new(), true),
        Err(e) => return Err(e.into()),
    };
    let partition = if chordal {
        None
    } else {
        let p = nondecomposable_partition(&g)?;
        Some(PartitionOut { a: names(&p.a), b: names(&p.b), c: names(&p.c), d: names(&p.d), e: names(&p.e) })
    };
    let results = GraphResults {
        vertices: g.nvertices(),
        chordal,
        elimination_order: peo.map(|o| names(&o)),
        chordless_cycle: chordless_cycle(&g).map(|c| names(&c)),
        cliques: cliques(&g).names(g.space()),
        separations: separations.iter().map(|s| SeparationOut { x: names(&s.x), y: names(&s.y), z: names(&s.z) }).collect(),
        separations_truncated,
        partition,
    };
    Ok(inputs.finish("graph", results))
}
