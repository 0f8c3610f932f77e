use pam_magic::fixtures::check_fixture;
use pam_magic::gram::{classify_gram, parse_gram_csv, GramClassification};
use pam_magic::qrac::{classical_strategy, mub_quantum_strategy, pd_value, seesaw_stabilizer, SeesawConfig};
use pam_magic::report::{BoundReport, Scenario};
use pam_magic::sweep::{mixed_stab_table, normalized_grid, s3_sweep_all_at_w, s3_sweep_one_free, tn_sweep, SweepPoint};
use pam_magic::witness::selftest::selftest_h;
use pam_magic::witness::{
    classical_bound, k_stabilizer_bound_any_slots, quantum_bound_qubit, stabilizer_bound_qubit, tilted_bounds,
    AscentConfig, NormSumForm, WitnessSpec,
};
use pam_magic::{Error, PrimeDimension};

use crate::output::Record;

/// Result of a command: rows to print and whether a check failed.
pub struct Outcome {
    pub records: Vec<Record>,
    pub mismatch: Option<String>,
}

impl From<Vec<Record>> for Outcome {
    fn from(records: Vec<Record>) -> Self {
        Self { records, mismatch: None }
    }
}

type CmdResult = Result<Outcome, Error>;

fn bound_record(label: &str, rep: &BoundReport, closed_form: Option<f64>, certifies_above: &str) -> Record {
    Record::new()
        .with("scenario", label)
        .num("value", rep.value)
        .with("exact", rep.exact)
        .opt_num("closed_form", closed_form)
        .with("certifies_above", certifies_above)
}

fn s3_family(spec: &WitnessSpec<f64>, form: &NormSumForm<f64>, t: f64, cfg: &AscentConfig) -> CmdResult {
    let closed = tilted_bounds(t)?;
    let c = classical_bound(spec)?;
    let s = stabilizer_bound_qubit(form, 0, cfg)?;
    let k = stabilizer_bound_qubit(form, 1, cfg)?;
    let any = k_stabilizer_bound_any_slots(form, 1, cfg)?;
    let q = quantum_bound_qubit(form, cfg)?;
    Ok(vec![
        bound_record("C", &c, Some(closed.classical), ""),
        bound_record("STAB", &s, Some(closed.stab), "AT_LEAST_ONE_NS"),
        bound_record("2-STAB", &k, Some(closed.two_stab), "AT_LEAST_TWO_NS"),
        bound_record("2-STAB (any slot free)", &any, None, ""),
        bound_record("Q", &q, Some(closed.quantum), ""),
    ]
    .into())
}

pub fn bounds_s3(cfg: &AscentConfig) -> CmdResult {
    s3_family(&WitnessSpec::s3(), &NormSumForm::s3(), 0.5, cfg)
}

pub fn bounds_tilted(t: f64, cfg: &AscentConfig) -> CmdResult {
    s3_family(&WitnessSpec::tilted_s3(t)?, &NormSumForm::tilted_s3(t)?, t, cfg)
}

pub fn bounds_tn(n: usize, cfg: &AscentConfig) -> CmdResult {
    let spec = WitnessSpec::<f64>::tn(n)?;
    let form = NormSumForm::<f64>::tn(n)?;
    let c = classical_bound(&spec)?;
    let s = stabilizer_bound_qubit(&form, 0, cfg)?;
    let q = quantum_bound_qubit(&form, cfg)?;
    Ok(vec![
        bound_record("C", &c, None, ""),
        bound_record("STAB", &s, None, "AT_LEAST_ONE_NS"),
        bound_record("Q", &q, None, ""),
    ]
    .into())
}

#[derive(Debug, Clone, Copy)]
pub enum SweepKind {
    OneFree,
    AllAtW,
    Tn(usize),
}

pub fn sweep(kind: SweepKind, intervals: usize, cfg: &AscentConfig) -> CmdResult {
    let grid = normalized_grid::<f64>(intervals + 1);
    let points: Vec<SweepPoint> = match kind {
        SweepKind::OneFree => s3_sweep_one_free(&grid)?,
        SweepKind::AllAtW => s3_sweep_all_at_w(&grid, cfg)?,
        SweepKind::Tn(n) => tn_sweep(n, &grid, cfg)?,
    };
    Ok(points
        .iter()
        .map(|p| Record::new().num("w", p.w).num("w_normalized", p.w_normalized).num("value", p.value))
        .collect::<Vec<_>>()
        .into())
}

pub fn table_t_stab(n: usize, cfg: &AscentConfig) -> CmdResult {
    if !(3..=4).contains(&n) {
        return Err(Error::OutOfRange { name: "N", value: n as f64, range: "{3, 4}" });
    }
    let rows = (0..=1usize << n)
        .map(|s| {
            mixed_stab_table::<f64>(n, s, cfg).map(|r| {
                Record::new()
                    .with("s", r.s)
                    .num("value", r.value)
                    .num("max_over_choices", r.max_over_choices)
                    .with("choice_dependent", r.choice_dependent)
                    .with("orbits", r.orbits)
                    .with("exact", r.exact)
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(rows.into())
}

pub fn fixture_check() -> CmdResult {
    let mut records = Vec::new();
    let mut failed = Vec::new();
    for n in 3..=5 {
        let c = check_fixture(n)?;
        if !c.passed() {
            failed.push(format!("T{n}: value {} expected {} (diff {:e}), XOR {}", c.value, c.expected, c.value - c.expected, c.xor_ok));
        }
        records.push(
            Record::new()
                .with("n", n)
                .num("value", c.value)
                .num("expected", c.expected)
                .num("diff", c.value - c.expected)
                .with("xor_ok", c.xor_ok)
                .with("passed", c.passed()),
        );
    }
    Ok(Outcome { records, mismatch: (!failed.is_empty()).then(|| failed.join("; ")) })
}

fn classification_record(c: &GramClassification) -> Record {
    let pairs: Vec<serde_json::Value> =
        c.offending_pairs.iter().map(|&(i, j, r)| serde_json::json!([i, j, r])).collect();
    Record::new()
        .with("scenario", c.scenario.to_string())
        .with("compatible_entrywise", c.compatible_entrywise)
        .with("subset_match", c.subset_match.map_or(serde_json::Value::Null, serde_json::Value::Bool))
        .with("offending_pairs", pairs)
        .with("non_pure_diagonal", c.non_pure_diagonal.clone())
}

pub fn gram(text: &str, d: Option<u32>, tol: f64) -> CmdResult {
    let (g, file_dim) = parse_gram_csv(text)?;
    let dim = match d {
        Some(d) => PrimeDimension::new(d)?,
        None => file_dim,
    };
    let records = [Scenario::C, Scenario::Stab]
        .into_iter()
        .map(|s| classify_gram(&g, dim, s, tol).map(|c| classification_record(&c)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(records.into())
}

pub fn selftest(points: usize) -> CmdResult {
    let rep = selftest_h(points);
    let records = rep
        .maximizers
        .iter()
        .zip(&rep.values)
        .map(|(m, v)| Record::new().num("x", m[0]).num("y", m[1]).num("z", m[2]).num("value", *v))
        .collect();
    let mismatch = (!rep.matches_h_orbit)
        .then(|| format!("{} maximizers found; they are not the 12 H-type vectors", rep.maximizers.len()));
    Ok(Outcome { records, mismatch })
}

pub struct QracSummary {
    pub best: f64,
    pub classical: f64,
    pub quantum: f64,
}

pub fn qrac(d: u32, cfg: &SeesawConfig) -> Result<(Outcome, QracSummary), Error> {
    let dim = PrimeDimension::new(d)?;
    if d != 3 {
        return Err(Error::Unsupported(format!("qrac seesaw for d = {d}; only d = 3 is supported")));
    }
    let rep = seesaw_stabilizer::<f64>(dim, cfg)?;
    let records = rep
        .traces
        .iter()
        .map(|t| {
            let values: Vec<serde_json::Value> =
                t.values.iter().map(|&v| serde_json::Value::from(v)).collect();
            Record::new()
                .with("restart", t.restart)
                .num("value", t.value())
                .with("converged", t.converged)
                .with("best", t.restart == rep.best.restart)
                .with("half_steps", t.values.len())
                .with("trace", values)
        })
        .collect();
    let summary = QracSummary {
        best: rep.best.value(),
        classical: pd_value(&classical_strategy::<f64>(dim)),
        quantum: pd_value(&mub_quantum_strategy::<f64>(dim)),
    };
    Ok((Outcome { records, mismatch: None }, summary))
}
