//! Report assembly: one JSON object per invocation with deterministic key
//! order (rationals rendered `"a/b"`, magnitudes as
//! `{reciprocal, level, lo, hi}`), plus a loose text rendering for humans.

use gapcert::boundchain::{BetaChecks, BoundReport, BoundValue};
use gapcert::constaudit::{AuditResult, ConstantDef, ConstantEval, Method, Verdict};
use gapcert::egyptian::{CurtissResult, SylvesterEntry, UnitSumResult};
use gapcert::exactnum::{format_rational, CompareOutcome, Magnitude, Rational};
use gapcert::gapsearch::{
    CertStatus, Dim1GapReport, Dim1Kind, Eps2, Eq2Outcome, GapCertificate,
};
use gapcert::hyperstd::HyperElem;
use serde_json::{json, Map, Value};

pub struct Report {
    command: String,
    inputs: Map<String, Value>,
    result: Map<String, Value>,
    error: Option<String>,
    elapsed_ms: Option<f64>,
    exit_code: i32,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: Map::new(),
            result: Map::new(),
            error: None,
            elapsed_ms: None,
            exit_code: 0,
        }
    }

    pub fn input_u64(&mut self, key: &str, v: u64) {
        self.inputs.insert(key.to_string(), json!(v));
    }

    pub fn input_str(&mut self, key: &str, v: &str) {
        self.inputs.insert(key.to_string(), json!(v));
    }

    pub fn set_error(&mut self, msg: &str) {
        self.error = Some(msg.to_string());
        eprintln!("error: {msg}");
    }

    pub fn set_elapsed_ms(&mut self, ms: f64) {
        self.elapsed_ms = Some(ms);
    }

    pub fn set_exit_code(&mut self, code: i32) {
        self.exit_code = code;
    }

    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert("command".into(), json!(self.command));
        root.insert("inputs".into(), Value::Object(self.inputs.clone()));
        if let Some(err) = &self.error {
            root.insert("error".into(), json!(err));
        }
        root.insert("result".into(), Value::Object(self.result.clone()));
        root.insert("exit_code".into(), json!(self.exit_code));
        root.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        if let Some(ms) = self.elapsed_ms {
            root.insert("elapsed_ms".into(), json!(ms));
        }
        Value::Object(root).to_string()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(err) = &self.error {
            out.push_str(&format!("{}: error: {err}\n", self.command));
            return out;
        }
        out.push_str(&format!("{}:\n", self.command));
        render_text(&Value::Object(self.result.clone()), 1, &mut out);
        out
    }

    // ----- per-command payloads -------------------------------------------

    pub fn result_certificate(&mut self, cert: &GapCertificate) {
        self.result = certificate_json(cert);
    }

    pub fn result_eps2(&mut self, e2: &Eps2, cert: &GapCertificate) {
        let mut m = Map::new();
        match e2 {
            Eps2::Exact(v) => {
                m.insert("value".into(), json!(format_rational(v)));
                m.insert("status".into(), json!("proven"));
            }
            Eps2::Bracket { lo, hi } => {
                m.insert("status".into(), json!("within_caps"));
                if let Some(lo) = lo {
                    m.insert("lower".into(), json!(format_rational(lo)));
                }
                m.insert("upper".into(), json!(format_rational(hi)));
            }
        }
        m.insert("epsilon1".into(), Value::Object(certificate_json(cert)));
        self.result = m;
    }

    pub fn result_dim1(&mut self, r: &Dim1GapReport) {
        let mut m = Map::new();
        m.insert(
            "kind".into(),
            json!(match r.kind {
                Dim1Kind::Lct => "lct",
                Dim1Kind::Glct => "glct",
                Dim1Kind::Mld => "mld",
            }),
        );
        m.insert("gap".into(), json!(format_rational(&r.gap)));
        let mut w = Map::new();
        w.insert("gammas".into(), rationals_json(&elem_values(&r.witness.gammas)));
        w.insert("t".into(), json!(format_rational(&r.witness.t)));
        w.insert("multiplicity".into(), json!(r.witness.multiplicity));
        w.insert("pairs".into(), pairs_json(&r.witness.gammas));
        m.insert("witness".into(), Value::Object(w));
        if let Some(cert) = &r.certificate {
            m.insert("certificate".into(), Value::Object(certificate_json(cert)));
        }
        self.result = m;
    }

    pub fn result_eq2(&mut self, outcome: &Eq2Outcome) {
        let mut m = Map::new();
        match outcome {
            Eq2Outcome::Unsat => {
                m.insert("status".into(), json!("unsat"));
            }
            Eq2Outcome::Sat { gammas, bs } => {
                m.insert("status".into(), json!("sat"));
                m.insert("gammas".into(), rationals_json(&elem_values(gammas)));
                m.insert(
                    "bs".into(),
                    rationals_json(&bs.iter().cloned().collect::<Vec<_>>()),
                );
            }
        }
        self.result = m;
    }

    pub fn result_u64(&mut self, key: &str, v: u64) {
        self.result.insert(key.to_string(), json!(v));
    }

    pub fn result_curtiss(&mut self, c: &CurtissResult) {
        self.result.insert("gap".into(), json!(format_rational(&c.gap)));
        self.result.insert("witness".into(), json!(c.witness));
    }

    pub fn result_sylvester(&mut self, e: &SylvesterEntry, holds: bool) {
        self.result.insert("index".into(), json!(e.index));
        if let Some(v) = &e.exact {
            let s = v.to_string();
            self.result.insert("digits".into(), json!(s.len()));
            if s.len() <= 64 {
                self.result.insert("exact".into(), json!(s));
            }
        }
        self.result.insert("bound".into(), magnitude_json(&e.bound));
        self.result.insert("bound_holds".into(), json!(holds));
    }

    pub fn result_max_under(&mut self, r: &UnitSumResult) {
        self.result.insert("best".into(), json!(format_rational(&r.best)));
        self.result.insert("witness".into(), json!(r.witness));
    }

    pub fn result_membership(&mut self, elem: Option<&HyperElem>) {
        match elem {
            Some(e) => {
                self.result.insert("member".into(), json!(true));
                let (n, k) = e.witness();
                self.result.insert("witness".into(), json!([n, k]));
                self.result
                    .insert("value".into(), json!(format_rational(&e.value())));
            }
            None => {
                self.result.insert("member".into(), json!(false));
            }
        }
    }

    pub fn result_beta(&mut self, bound: &BoundReport, checks: &BetaChecks) {
        self.result.insert("p".into(), json!(bound.p));
        self.result.insert("direction".into(), json!("lower"));
        self.result
            .insert("bound".into(), bound_value_json(&bound.value));
        let mut c = Map::new();
        c.insert(
            "exceeds_tower14".into(),
            json!(outcome_str(checks.exceeds_tower14)),
        );
        c.insert(
            "exceeds_tower17".into(),
            json!(outcome_str(checks.exceeds_tower17)),
        );
        c.insert(
            "below_min_upper".into(),
            json!(outcome_str(checks.below_min_upper)),
        );
        self.result.insert("checks".into(), Value::Object(c));
        self.result.insert("trace".into(), json!(bound.trace));
    }

    pub fn result_upsilon(
        &mut self,
        l_rep: &BoundReport,
        l_cmp: CompareOutcome,
        u_rep: &BoundReport,
        u_cmp: CompareOutcome,
    ) {
        self.result
            .insert("l_upper".into(), bound_value_json(&l_rep.value));
        self.result
            .insert("l_below_tower17".into(), json!(outcome_str(l_cmp)));
        self.result
            .insert("upsilon_lower".into(), bound_value_json(&u_rep.value));
        self.result
            .insert("upsilon_above_tower19".into(), json!(outcome_str(u_cmp)));
        self.result.insert("trace".into(), json!(u_rep.trace));
    }

    pub fn result_constant(&mut self, c: &ConstantEval) {
        self.result.insert("id".into(), json!(c.id));
        self.result.insert("expression".into(), json!(c.expression));
        if let Some(v) = &c.exact {
            self.result.insert("exact".into(), json!(format_rational(v)));
        }
        self.result
            .insert("magnitude".into(), magnitude_json(&c.magnitude));
        if let Some(pm) = &c.prime_map {
            let mut m = Map::new();
            for (p, e) in &pm.0 {
                m.insert(p.to_string(), json!(e.to_string()));
            }
            self.result.insert("prime_map".into(), Value::Object(m));
        }
    }

    pub fn result_constant_list(&mut self, defs: &[ConstantDef]) {
        let rows: Vec<Value> = defs
            .iter()
            .map(|d| {
                json!({
                    "id": d.id,
                    "statement": d.statement,
                    "expression": d.expr.render(),
                })
            })
            .collect();
        self.result.insert("constants".into(), json!(rows));
    }

    pub fn result_audit_all(&mut self, audits: &[AuditResult], beta: &[(u64, BetaChecks)]) {
        let rows: Vec<Value> = audits
            .iter()
            .map(|a| {
                json!({
                    "claim": a.claim,
                    "verdict": verdict_str(a.verdict),
                    "method": match a.method {
                        Method::ExactNormalForm => "exact_normal_form",
                        Method::MagnitudeCompare => "magnitude_compare",
                    },
                    "evidence": a.evidence,
                })
            })
            .collect();
        self.result.insert("audits".into(), json!(rows));
        let beta_rows: Vec<Value> = beta
            .iter()
            .map(|(p, c)| {
                json!({
                    "p": p,
                    "exceeds_tower14": outcome_str(c.exceeds_tower14),
                    "exceeds_tower17": outcome_str(c.exceeds_tower17),
                    "below_min_upper": outcome_str(c.below_min_upper),
                })
            })
            .collect();
        self.result.insert("beta_suite".into(), json!(beta_rows));
    }
}

fn elem_values(elems: &[HyperElem]) -> Vec<Rational> {
    let mut v: Vec<Rational> = elems.iter().map(|e| e.value()).collect();
    v.sort();
    v
}

fn rationals_json(vals: &[Rational]) -> Value {
    json!(vals.iter().map(format_rational).collect::<Vec<_>>())
}

fn pairs_json(elems: &[HyperElem]) -> Value {
    let mut pairs: Vec<(u64, u64)> = elems.iter().map(|e| e.witness()).collect();
    pairs.sort();
    json!(pairs.iter().map(|(n, k)| json!([n, k])).collect::<Vec<_>>())
}

fn certificate_json(cert: &GapCertificate) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("value".into(), json!(format_rational(&cert.value)));
    m.insert(
        "witness".into(),
        json!(cert
            .witness_pairs()
            .iter()
            .map(|(n, k)| json!([n, k]))
            .collect::<Vec<_>>()),
    );
    match &cert.status {
        CertStatus::Proven => {
            m.insert("status".into(), json!("proven"));
        }
        CertStatus::ProvenWithinCaps(caps) => {
            m.insert("status".into(), json!("proven_within_caps"));
            m.insert(
                "caps".into(),
                json!({"depth": caps.max_depth, "den": caps.max_den}),
            );
        }
    }
    if let Some(f) = &cert.sylvester_floor {
        m.insert("sylvester_floor".into(), json!(format_rational(f)));
    }
    m
}

fn magnitude_json(m: &Magnitude) -> Value {
    let (lo, hi) = m.body();
    json!({
        "reciprocal": m.is_reciprocal(),
        "level": m.level(),
        "lo": format_rational(lo),
        "hi": format_rational(hi),
    })
}

fn bound_value_json(v: &BoundValue) -> Value {
    match v {
        BoundValue::Rational(r) => json!(format_rational(r)),
        BoundValue::Mag(m) => magnitude_json(m),
    }
}

fn outcome_str(o: CompareOutcome) -> &'static str {
    match o {
        CompareOutcome::Lt => "lt",
        CompareOutcome::Gt => "gt",
        CompareOutcome::Eq => "eq",
        CompareOutcome::Inconclusive => "inconclusive",
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Verified => "verified",
        Verdict::Falsified => "falsified",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, val) in m {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(val, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {val}\n")),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(item, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {item}\n")),
                }
            }
        }
        other => out.push_str(&format!("{pad}{other}\n")),
    }
}
