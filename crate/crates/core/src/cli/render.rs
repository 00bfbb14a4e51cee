//! JSON and text encodings of results for the command line.

use serde_json::{json, Value};

use crate::activation::{ActivationReport, LocalityClass, MActivable, MStatus, NoGoReport};
use crate::algebra::CVec;
use crate::diagram::ket_string;
use crate::measure::{Branch, LocalPvm};
use crate::opsolve::{BlockCertificate, Enumeration, Exactness, Irreducibility, SolutionReport};
use crate::protocol::{Status, Verdict};
use crate::states::{PartySpec, Redundancy};

pub fn group_dims(spec: &PartySpec, group: &[usize]) -> Vec<usize> {
    group.iter().map(|&p| spec.dims()[p]).collect()
}

/// `{|0⟩, |1⟩}; {|2⟩}` style summary of the element ranges.
pub fn pvm_string(lp: &LocalPvm, spec: &PartySpec) -> String {
    let dims = group_dims(spec, &lp.group);
    lp.pvm
        .elements()
        .iter()
        .map(|e| {
            let r: Vec<String> = e.range().iter().map(|v| ket_string(v, &dims)).collect();
            format!("{{{}}}", r.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn local_pvm(lp: &LocalPvm, spec: &PartySpec) -> Value {
    json!({
        "group": spec.group_label(&lp.group),
        "ranges": pvm_string(lp, spec),
        "pvm": lp.to_json_value(spec),
    })
}

fn kets(vs: &[CVec], dims: &[usize]) -> Vec<String> {
    vs.iter().map(|v| ket_string(v, dims)).collect()
}

pub fn solution(r: &SolutionReport, spec: &PartySpec) -> Value {
    let dims = group_dims(spec, &r.group);
    let solutions: Vec<Value> = r
        .solutions
        .iter()
        .map(|d| {
            let exactness = match &d.exactness {
                Exactness::Exact => json!("exact"),
                Exactness::Algebraic(w) => json!({ "algebraic": w }),
                Exactness::Numeric => json!("numeric"),
            };
            json!({
                "vector": d.vector.as_ref().map(|v| ket_string(v, &dims)),
                "approx": d.approx,
                "exactness": exactness,
            })
        })
        .collect();
    let families: Vec<Value> = r
        .families
        .iter()
        .map(|f| json!({ "description": f.describe(), "representatives": kets(&f.representatives, &dims) }))
        .collect();
    json!({
        "group": spec.group_label(&r.group),
        "group_dim": r.group_dim,
        "support_dim": r.support_dim,
        "solutions": solutions,
        "families": families,
        "none_found": r.none_found.as_ref().map(|n| n.method.clone()),
        "complete": r.complete,
        "unresolved_cells": r.unresolved_cells,
        "seed": r.numeric_seed,
        "tolerance": r.tolerance,
        "trace": r.trace,
    })
}

pub fn enumeration(e: &Enumeration, spec: &PartySpec) -> Value {
    json!({
        "group": spec.group_label(&e.group),
        "complete": e.complete,
        "verification_only": e.verification_only,
        "pvms": e.pvms.iter().map(|lp| local_pvm(lp, spec)).collect::<Vec<_>>(),
    })
}

pub fn certificate(c: &BlockCertificate, spec: &PartySpec) -> Value {
    let group = spec.group_label(c.group());
    match c {
        BlockCertificate::NoNontrivialPvm { method, .. } => {
            json!({ "group": group, "result": "no-nontrivial-pvm", "method": format!("{method:?}") })
        }
        BlockCertificate::Witness { pvm, .. } => json!({ "group": group, "result": "witness", "pvm": local_pvm(pvm, spec) }),
        BlockCertificate::Undetermined { reason, .. } => json!({ "group": group, "result": "undetermined", "reason": reason }),
    }
}

pub fn certificate_text(c: &BlockCertificate, spec: &PartySpec) -> String {
    let group = spec.group_label(c.group());
    match c {
        BlockCertificate::NoNontrivialPvm { method, .. } => format!("{group}: no nontrivial OP-PVM ({method:?})"),
        BlockCertificate::Witness { pvm, .. } => format!("{group}: measures {}", pvm_string(pvm, spec)),
        BlockCertificate::Undetermined { reason, .. } => format!("{group}: undetermined ({reason})"),
    }
}

pub fn irreducibility(i: &Irreducibility, spec: &PartySpec) -> Value {
    let status = match i {
        Irreducibility::Irreducible { .. } => "irreducible",
        Irreducibility::Reducible { .. } => "reducible",
        Irreducibility::Unknown { .. } => "unknown",
    };
    json!({
        "status": status,
        "level": "pvm",
        "certificates": i.certificates().iter().map(|c| certificate(c, spec)).collect::<Vec<_>>(),
    })
}

pub fn verdict(v: &Verdict, spec: &PartySpec) -> Value {
    let (status, extra) = match &v.status {
        Status::Distinguishable(t) => ("distinguishable", json!({ "protocol": t.to_json_value(spec) })),
        Status::Indistinguishable(i) => ("indistinguishable", json!({ "irreducibility": irreducibility(i, spec) })),
        Status::Unknown(why) => ("unknown", json!({ "reason": why })),
    };
    let trace: Vec<Value> =
        v.trace.iter().map(|b| json!({ "path": b.path, "labels": b.labels, "claim": b.claim.to_string() })).collect();
    json!({ "status": status, "detail": extra, "trace": trace })
}

pub fn branches(bs: &[Branch]) -> Value {
    Value::Array(
        bs.iter()
            .map(|b| json!({ "outcome": b.outcome, "set": b.set.to_json_value(), "annihilated": b.annihilated }))
            .collect(),
    )
}

pub fn branches_text(bs: &[Branch]) -> String {
    let mut out = String::new();
    for b in bs {
        out.push_str(&format!("outcome {}: {} states", b.outcome, b.set.len()));
        if !b.annihilated.is_empty() {
            out.push_str(&format!(" (annihilated: {})", b.annihilated.join(", ")));
        }
        out.push('\n');
        for st in b.set.states() {
            out.push_str(&format!("  {}: {}\n", st.label, ket_string(&st.vector, b.set.spec().dims())));
        }
    }
    out
}

fn redundancy(r: &Redundancy, spec: &PartySpec) -> Value {
    match r {
        Redundancy::Redundant { discarded } => json!({ "redundant": true, "discarded": spec.group_label(discarded) }),
        Redundancy::Irredundant => json!({ "redundant": false }),
    }
}

pub fn activation(r: &ActivationReport, spec: &PartySpec) -> Value {
    let branches: Vec<Value> = r
        .branches
        .iter()
        .map(|b| {
            let domino = b.domino.as_ref().map(|w| {
                json!({
                    "transposed": w.transposed,
                    "permutation": w.permutation,
                    "bases": [w.bases[0].iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                              w.bases[1].iter().map(|v| v.to_string()).collect::<Vec<_>>()],
                })
            });
            json!({
                "outcome": b.outcome,
                "set": b.set.to_json_value(),
                "annihilated": b.annihilated,
                "irreducibility": irreducibility(&b.irreducibility, spec),
                "domino": domino,
            })
        })
        .collect();
    json!({
        "first": local_pvm(&r.first, spec),
        "partition": r.partition.label(spec),
        "activated": r.activated,
        "uncertified": r.uncertified,
        "redundancy": redundancy(&r.redundancy, spec),
        "branches": branches,
    })
}

pub fn activation_text(r: &ActivationReport, spec: &PartySpec) -> String {
    let mut out = format!(
        "first round: {} measures {}\npartition: {}\nactivated: {}\n",
        spec.group_label(&r.first.group),
        pvm_string(&r.first, spec),
        r.partition.label(spec),
        r.activated
    );
    if r.redundancy.is_redundant() {
        out.push_str("set is locally redundant\n");
    }
    for b in &r.branches {
        let status = match &b.irreducibility {
            Irreducibility::Irreducible { .. } => "PVM-irreducible".to_string(),
            Irreducibility::Reducible { witness, .. } => {
                format!("reducible ({} measures {})", spec.group_label(&witness.group), pvm_string(witness, spec))
            }
            Irreducibility::Unknown { .. } => "undecided".to_string(),
        };
        out.push_str(&format!("  outcome {}: {} states, {status}", b.outcome, b.set.len()));
        if b.domino.is_some() {
            out.push_str(", domino structure");
        }
        out.push('\n');
    }
    out
}

pub fn locality(c: &LocalityClass, spec: &PartySpec) -> Value {
    json!({
        "class": c.class.to_string(),
        "evidence": c.evidence.as_ref().map(|e| e.to_string()),
        "witness": c.witness.as_ref().map(|w| activation(w, spec)),
        "trace": c.trace,
    })
}

pub fn m_activable(m: &MActivable, spec: &PartySpec) -> Value {
    let (status, detail) = match &m.status {
        MStatus::Activable { partition, report, coarser } => (
            "activable",
            json!({
                "partition": partition.label(spec),
                "coarser": coarser.as_ref().map(|q| q.label(spec)),
                "report": activation(report, spec),
            }),
        ),
        MStatus::NotActivable => ("not-activable", Value::Null),
        MStatus::Unknown(why) => ("unknown", json!(why)),
    };
    json!({ "m": m.m, "strong": m.strong, "status": status, "detail": detail, "trace": m.trace })
}

pub fn nogo(r: &NoGoReport, spec: &PartySpec) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            let lp = LocalPvm { group: vec![c.party], pvm: c.pvm.clone() };
            json!({ "party": spec.labels()[c.party], "ranges": pvm_string(&lp, spec), "reduces": c.reduces })
        })
        .collect();
    json!({ "holds": r.holds, "checks": checks, "first_party": certificate(&r.first_party, spec) })
}
