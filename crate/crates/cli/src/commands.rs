use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use witnesskit::basis::{
    decompose as decompose_op, default_basis, gellmann_basis, pauli_basis, standard_basis,
    CoeffMatrix, StateBasis,
};
use witnesskit::linalg::{BipartiteDims, CMatrix, MatrixJson};
use witnesskit::mdi::{
    build_mdi_witness, eval_mdi_linear, eval_mdi_new, mes_effect, prob_table, MdiWitness,
    PovmEffect,
};
use witnesskit::states::{bound_entangled_b, werner, DensityMatrix};
use witnesskit::targets::{self, compare, Agreement};
use witnesskit::verify::{run_suite, Case, VerifyReport};
use witnesskit::witness::{eval_linear, eval_nonlinear, NonlinearWitness};

use crate::{BasisArg, CaseArg, Family};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_DEGENERATE: u8 = 3;
pub const EXIT_ENTANGLED: u8 = 10;

pub fn exit_code(e: &anyhow::Error) -> u8 {
    let degenerate = e.chain().any(|c| {
        matches!(
            c.downcast_ref(),
            Some(witnesskit::Error::DegenerateDenominator(_))
        )
    });
    if degenerate {
        EXIT_DEGENERATE
    } else {
        EXIT_INPUT
    }
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

impl Family {
    fn case(self) -> Case {
        match self {
            Family::Werner => Case::Werner,
            Family::Bound => Case::Bound,
        }
    }

    fn parameter(self) -> &'static str {
        match self {
            Family::Werner => "nu",
            Family::Bound => "a",
        }
    }

    fn member(self, x: f64) -> witnesskit::Result<DensityMatrix> {
        match self {
            Family::Werner => werner(x),
            Family::Bound => bound_entangled_b(x),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScanRow {
    pub linear: f64,
    pub nonlinear: f64,
    pub mdi_linear: f64,
    pub mdi_nonlinear: f64,
    pub ppt_min_eig: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScanReport {
    pub parameter: String,
    pub grid: Vec<f64>,
    pub rows: Vec<ScanRow>,
}

fn scan_point(
    family: Family,
    f: &NonlinearWitness,
    w: &MdiWitness,
    x: f64,
) -> witnesskit::Result<ScanRow> {
    let rho = family.member(x)?;
    let t = prob_table(&rho, w, &mes_effect(w.dims.a), &mes_effect(w.dims.b))?;
    Ok(ScanRow {
        linear: eval_linear(&f.linear(), &rho)?,
        nonlinear: eval_nonlinear(f, &rho)?,
        mdi_linear: eval_mdi_linear(w, &t)?,
        mdi_nonlinear: eval_mdi_new(w, &t)?,
        ppt_min_eig: rho.ppt_min_eigenvalue()?,
    })
}

fn scan_csv(report: &ScanReport) -> String {
    let mut s = format!(
        "{},linear,nonlinear,mdi_linear,mdi_nonlinear,ppt_min_eig\n",
        report.parameter
    );
    for (x, r) in report.grid.iter().zip(&report.rows) {
        let cells = [
            *x,
            r.linear,
            r.nonlinear,
            r.mdi_linear,
            r.mdi_nonlinear,
            r.ppt_min_eig,
        ]
        .map(num);
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

pub fn scan(family: Family, from: f64, to: f64, steps: usize, out: Option<&Path>) -> Result<u8> {
    if steps < 2 {
        bail!("--steps must be at least 2");
    }
    if !(from < to) {
        bail!("--from must be less than --to");
    }
    let grid: Vec<f64> = (0..steps)
        .map(|k| {
            if k == steps - 1 {
                to
            } else {
                from + (to - from) * k as f64 / (steps - 1) as f64
            }
        })
        .collect();
    let f = family.case().witness();
    let w = family.case().mdi_witness();
    let rows = grid
        .par_iter()
        .map(|&x| scan_point(family, &f, &w, x))
        .collect::<witnesskit::Result<Vec<_>>>()?;
    let report = ScanReport {
        parameter: family.parameter().to_string(),
        grid,
        rows,
    };
    match out {
        Some(stem) => {
            let csv = stem.with_extension("csv");
            let json = stem.with_extension("json");
            fs::write(&csv, scan_csv(&report))
                .with_context(|| format!("writing {}", csv.display()))?;
            fs::write(&json, serde_json::to_string_pretty(&report)?)
                .with_context(|| format!("writing {}", json.display()))?;
            eprintln!("wrote {} and {}", csv.display(), json.display());
        }
        None => print_json(&report)?,
    }
    Ok(EXIT_OK)
}

fn coeff_csv(c: &CoeffMatrix) -> String {
    let mut s = String::new();
    for row in c.to_rows() {
        let _ = writeln!(
            s,
            "{}",
            row.into_iter().map(num).collect::<Vec<_>>().join(",")
        );
    }
    s
}

pub fn coeffs(case: Family, out: Option<&Path>) -> Result<u8> {
    let f = case.case().witness();
    let w = build_mdi_witness(&f, default_basis(f.dims.a), default_basis(f.dims.b))?;
    let tables = match case {
        Family::Werner => [
            ("alpha", w.alpha, targets::alpha()),
            ("beta", w.beta, targets::beta()),
            ("gamma", w.gamma, targets::gamma()),
        ],
        Family::Bound => [
            ("lambda", w.alpha, targets::lambda()),
            ("mu", w.beta, targets::mu()),
            ("nu", w.gamma, targets::nu()),
        ],
    };
    let tol = witnesskit::tolerance::tol().decomposition;
    let mut code = EXIT_OK;
    for (name, computed, target) in &tables {
        let (agreement, dev) = compare(computed, target, tol);
        let label = match agreement {
            Agreement::Exact => "exact",
            Agreement::Negated => "negated (sign convention)",
            Agreement::Mismatch => {
                code = EXIT_FAILED;
                "MISMATCH"
            }
        };
        let summary = format!("# {name}: {label}, max deviation {dev:e}");
        match out {
            Some(dir) => {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let path: PathBuf = dir.join(format!("{name}.csv"));
                fs::write(&path, coeff_csv(computed))
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("{summary} -> {}", path.display());
            }
            None => print!("{summary}\n{}", coeff_csv(computed)),
        }
    }
    Ok(code)
}

fn basis_for(arg: BasisArg, d: usize) -> Result<StateBasis> {
    Ok(match (arg, d) {
        (BasisArg::Auto, _) => default_basis(d),
        (BasisArg::Pauli, 2) => pauli_basis(),
        (BasisArg::Gellmann, 3) => gellmann_basis(),
        (BasisArg::Standard, _) => standard_basis(d),
        (_, _) => bail!("basis {arg:?} is not defined for local dimension {d}"),
    })
}

#[derive(Serialize)]
struct MdiReport {
    #[serde(rename = "I")]
    linear: f64,
    #[serde(rename = "N")]
    nonlinear: f64,
    pmm: f64,
    table: Vec<Vec<f64>>,
}

pub fn mdi_eval(
    state: &Path,
    witness: &Path,
    effect_a: Option<&Path>,
    effect_b: Option<&Path>,
    basis: BasisArg,
) -> Result<u8> {
    let f: NonlinearWitness = read_json(witness)?;
    let rho: DensityMatrix = read_json(state)?;
    let rho = match rho.dims() {
        Some(_) => rho,
        None => rho.with_dims(f.dims)?,
    };
    let load = |p: Option<&Path>, d| -> Result<PovmEffect> {
        match p {
            Some(p) => read_json(p),
            None => Ok(mes_effect(d)),
        }
    };
    let a1 = load(effect_a, f.dims.a)?;
    let b1 = load(effect_b, f.dims.b)?;
    let w = build_mdi_witness(&f, basis_for(basis, f.dims.a)?, basis_for(basis, f.dims.b)?)?;
    let t = prob_table(&rho, &w, &a1, &b1)?;
    let linear = eval_mdi_linear(&w, &t)?;
    let nonlinear = eval_mdi_new(&w, &t).with_context(|| format!("pmm = {:e}", t.pmm))?;
    print_json(&MdiReport {
        linear,
        nonlinear,
        pmm: t.pmm,
        table: t.clamped(),
    })?;
    Ok(if nonlinear < 0.0 {
        EXIT_ENTANGLED
    } else {
        EXIT_OK
    })
}

#[derive(Serialize)]
struct CombinedReport {
    trials: u64,
    failures: u64,
    worst_value: f64,
    runtime_ms: u64,
    cases: Vec<VerifyReport>,
}

pub fn verify(trials: u64, seed: u64, case: CaseArg) -> Result<u8> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    let code = |failures| if failures == 0 { EXIT_OK } else { EXIT_FAILED };
    let cases = match case {
        CaseArg::Werner => vec![Case::Werner],
        CaseArg::Bound => vec![Case::Bound],
        CaseArg::Both => vec![Case::Werner, Case::Bound],
    };
    let mut reports: Vec<VerifyReport> = cases
        .into_iter()
        .map(|c| run_suite(c, trials, seed))
        .collect();
    if reports.len() == 1 {
        let r = reports.remove(0);
        print_json(&r)?;
        return Ok(code(r.failures));
    }
    let combined = CombinedReport {
        trials: reports.iter().map(|r| r.trials).sum(),
        failures: reports.iter().map(|r| r.failures).sum(),
        worst_value: reports
            .iter()
            .map(|r| r.worst_value)
            .fold(f64::INFINITY, f64::min),
        runtime_ms: reports.iter().map(|r| r.runtime_ms).sum(),
        cases: reports,
    };
    print_json(&combined)?;
    Ok(code(combined.failures))
}

#[derive(Deserialize)]
struct OperatorFile {
    #[serde(flatten)]
    matrix: MatrixJson,
    dims: Option<BipartiteDims>,
}

fn parse_dims(s: &str) -> Result<BipartiteDims> {
    let (a, b) = s.split_once(',').context("--dims expects `dA,dB`")?;
    Ok(BipartiteDims::new(a.trim().parse()?, b.trim().parse()?))
}

pub fn decompose(operator: &Path, dims: Option<&str>, basis: BasisArg, csv: bool) -> Result<u8> {
    let file: OperatorFile = read_json(operator)?;
    let m = CMatrix::try_from(file.matrix)?;
    let dims = match (dims, file.dims) {
        (Some(s), _) => parse_dims(s)?,
        (None, Some(d)) => d,
        (None, None) => {
            let d = (m.dim() as f64).sqrt().round() as usize;
            BipartiteDims::new(d, d)
        }
    };
    dims.check(m.dim())?;
    let c = decompose_op(&m, &basis_for(basis, dims.a)?, &basis_for(basis, dims.b)?)?;
    if csv {
        print!("{}", coeff_csv(&c));
    } else {
        print_json(&c)?;
    }
    Ok(EXIT_OK)
}

pub fn state(family: Family, param: f64) -> Result<u8> {
    print_json(&family.member(param)?)?;
    Ok(EXIT_OK)
}

pub fn witness(case: Family) -> Result<u8> {
    print_json(&case.case().witness())?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn dims_parsing() {
        assert_eq!(parse_dims("2, 3").unwrap(), BipartiteDims::new(2, 3));
        assert!(parse_dims("4").is_err());
    }

    #[test]
    fn degenerate_maps_to_exit_3() {
        let e = anyhow::Error::from(witnesskit::Error::DegenerateDenominator(0.0)).context("pmm");
        assert_eq!(exit_code(&e), EXIT_DEGENERATE);
        assert_eq!(exit_code(&anyhow::anyhow!("bad file")), EXIT_INPUT);
    }
}
