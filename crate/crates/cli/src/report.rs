//! Text and JSON renderings. JSON objects have sorted keys, so equal runs
//! print equal bytes.

use rankcert::adversary::AttackReport;
use rankcert::proto::{CostMeter, Inputs, Output, ProtocolId, Run, Verdict};
use serde_json::{json, Value};

pub fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Accept => "accept",
        Verdict::Reject(_) => "reject",
        Verdict::Abort(_) => "abort",
    }
}

pub fn cause(v: &Verdict) -> Option<String> {
    match v {
        Verdict::Accept => None,
        Verdict::Reject(c) => Some(format!("{c:?}")),
        Verdict::Abort(c) => Some(format!("{c:?}")),
    }
}

pub fn verdict_text(v: &Verdict) -> String {
    match cause(v) {
        Some(c) => format!("{} ({c})", verdict_name(v)),
        None => verdict_name(v).to_string(),
    }
}

pub fn meter_json(m: &CostMeter) -> Value {
    json!({
        "field_p2v": m.field_p2v,
        "field_v2p": m.field_v2p,
        "ints_p2v": m.ints_p2v,
        "ints_v2p": m.ints_v2p,
        "matvecs": m.matvecs,
        "verifier_field_ops": m.verifier_field_ops,
    })
}

pub fn meter_text(m: &CostMeter) -> String {
    format!(
        "field p->v {}, field v->p {}, ints p->v {}, ints v->p {}, matvecs {}, verifier ops {}",
        m.field_p2v, m.field_v2p, m.ints_p2v, m.ints_v2p, m.matvecs, m.verifier_field_ops
    )
}

fn output_json(o: &Output) -> Value {
    match o {
        Output::Verified => json!({ "verified": true }),
        Output::Determinant(d) => json!({ "determinant": d }),
        Output::ColumnProfile(c) => json!({ "column_profile": c.indices() }),
        Output::RowProfile(r) => json!({ "row_profile": r.indices() }),
        Output::RankProfileMatrix(r) => json!({ "rank_profile_matrix": r.ones() }),
        Output::Ldup { p, d } => json!({ "p": p.images(), "d": d.entries() }),
        Output::RankAtMost(r) => json!({ "rank_at_most": r }),
        Output::IndependentColumns(c) => json!({ "independent_columns": c.indices() }),
    }
}

fn list(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("[{}]", items.join(", "))
}

fn output_text(o: &Output) -> String {
    match o {
        Output::Verified => "verified".into(),
        Output::Determinant(d) => format!("det = {d}"),
        Output::ColumnProfile(c) => format!("column rank profile {}", list(c.indices())),
        Output::RowProfile(r) => format!("row rank profile {}", list(r.indices())),
        Output::RankProfileMatrix(r) => {
            let ones: Vec<String> = r.ones().iter().map(|(i, j)| format!("({i},{j})")).collect();
            format!("rank profile matrix, rank {}: {}", r.rank(), ones.join(" "))
        }
        Output::Ldup { p, d } => {
            let d: Vec<String> = d.entries().iter().map(u64::to_string).collect();
            format!("P {}, D [{}]", list(p.images()), d.join(", "))
        }
        Output::RankAtMost(r) => format!("rank <= {r}"),
        Output::IndependentColumns(c) => format!("independent columns {}, rank >= {}", list(c.indices()), c.rank()),
    }
}

pub struct RunReport {
    protocol: ProtocolId,
    m: usize,
    n: usize,
    p: u64,
    seed: Option<u64>,
    mode: &'static str,
    run: Run<Output>,
}

impl RunReport {
    pub fn new(protocol: ProtocolId, inputs: &Inputs, seed: Option<u64>, mode: &'static str, run: Run<Output>) -> Self {
        let a = &inputs.a;
        Self { protocol, m: a.rows(), n: a.cols(), p: a.field().modulus(), seed, mode, run }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "protocol": self.protocol.name(),
            "m": self.m,
            "n": self.n,
            "p": self.p,
            "seed": self.seed,
            "mode": self.mode,
            "verdict": verdict_name(&self.run.verdict),
            "cause": cause(&self.run.verdict),
            "output": self.run.output.as_ref().map(output_json),
            "meter": meter_json(&self.run.meter),
        })
    }

    pub fn print(&self, json: bool) {
        if json {
            println!("{}", self.to_json());
            return;
        }
        let seed = self.seed.map_or(String::new(), |s| format!(", seed {s}"));
        println!("{} on {}x{} over F_{} ({}{seed})", self.protocol, self.m, self.n, self.p, self.mode);
        println!("verdict: {}", verdict_text(&self.run.verdict));
        if let Some(o) = &self.run.output {
            println!("{}", output_text(o));
        }
        println!("meter: {}", meter_text(&self.run.meter));
    }
}

pub struct AttackView {
    pub report: AttackReport,
    pub seed: u64,
}

impl AttackView {
    pub fn print(&self, json: bool) {
        let r = &self.report;
        if json {
            let v = json!({
                "adversary": r.adversary.name(),
                "protocol": r.adversary.protocol().name(),
                "p": r.modulus,
                "seed": self.seed,
                "trials": r.trials,
                "accepted": r.accepted,
                "rate": r.rate,
                "bound": r.bound,
                "slack": r.slack,
                "pass": r.pass,
            });
            println!("{v}");
            return;
        }
        println!(
            "{} against {} over F_{}, {} trials (seed {})",
            r.adversary,
            r.adversary.protocol(),
            r.modulus,
            r.trials,
            self.seed
        );
        println!("accepted {} times, rate {:.5}", r.accepted, r.rate);
        println!(
            "bound {:.5} + 3 sigma {:.5} = {:.5}: {}",
            r.bound,
            r.slack,
            r.bound + r.slack,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
}
