use crate::args::{CodeArgs, CountArgs, ExportArgs, Format, SelftestArgs};
use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};
use skewcode::central::{
    count_xs, count_xts, default_tuple, enumerate_xts, subfield_index, EvalKind, DEFAULT_ENUM_CAP,
};
use skewcode::codes::{
    build_code, default_mds_h, export_csv, export_generators, min_distance, optimality_verdict, sample_distance,
    verify_sum_rank, Distance,
};
use skewcode::invariants::{nuclear_parameters, Subring};
use skewcode::selftest::{run_all, run_criterion, SelftestReport, REPORT_SCHEMA};
use skewcode::{
    build_tower, AdmissibleTuple, Ambient, Code, CodeParams, Elem, Error, Family, FieldSpec, Gf, Poly, SubgroupSpec,
    TowerContext,
};
use std::sync::Arc;

pub struct Outcome {
    pub body: Body,
    /// Computed, but the verdict is negative (exit 2).
    pub negative: bool,
}

pub enum Body {
    Json(Value),
    Text(String),
}

impl Outcome {
    fn json(v: Value, negative: bool) -> Outcome {
        Outcome { body: Body::Json(v), negative }
    }

    pub fn render(&self) -> String {
        match &self.body {
            Body::Json(v) => format!("{}\n", serde_json::to_string_pretty(v).expect("serializable")),
            Body::Text(s) => s.clone(),
        }
    }
}

fn parse_family(s: &str) -> Result<Family> {
    s.parse::<Family>().map_err(|e| anyhow!(e))
}

fn parse_subgroup(spec: &str, q: u64) -> Result<SubgroupSpec> {
    let t = match spec.to_ascii_lowercase().as_str() {
        "full" => SubgroupSpec::full(q),
        "squares" => {
            if q.is_multiple_of(2) {
                bail!("squares need q odd");
            }
            SubgroupSpec::squares(q)
        }
        "trivial" => SubgroupSpec { q0: q, order: 1 },
        other => match other.split_once(':') {
            Some((q0, order)) => SubgroupSpec {
                q0: q0.trim().parse().context("subgroup q0")?,
                order: order.trim().parse().context("subgroup order")?,
            },
            None => SubgroupSpec { q0: q, order: other.parse().context("subgroup order")? },
        },
    };
    t.check(q)?;
    Ok(t)
}

/// `alpha`, `alpha^N`, or an integer element code.
fn parse_elem(gf: &Gf, s: &str) -> Result<Elem> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("alpha") {
        let e: u64 = match rest.strip_prefix('^') {
            Some(x) => x.parse().context("exponent of alpha")?,
            None if rest.is_empty() => 1,
            None => bail!("cannot parse element {s:?}"),
        };
        return Ok(gf.pow(gf.generator(), e));
    }
    let v: u32 = s.parse().with_context(|| format!("cannot parse element {s:?}"))?;
    if v >= gf.order() {
        bail!("element code {v} out of range for a field of order {}", gf.order());
    }
    Ok(Elem(v))
}

fn parse_tuple(k: &Gf, s: &str) -> Result<AdmissibleTuple> {
    let polys = s
        .split(';')
        .map(|p| {
            let coeffs = p.split(',').map(|c| parse_elem(k, c)).collect::<Result<Vec<_>>>()?;
            Ok(Poly::new(coeffs))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AdmissibleTuple::new(k, polys))
}

struct Setup {
    family: Family,
    tower: Arc<TowerContext>,
    tuple: Option<AdmissibleTuple>,
    ambient: Option<Ambient>,
    params: CodeParams,
}

fn setup(a: &CodeArgs) -> Result<Setup> {
    let family = parse_family(&a.family)?;
    let tower = build_tower(&FieldSpec::from_q(a.q, a.n, a.s)?.with_reference_moduli())?;
    let q = tower.q() as u64;
    let (tuple, ambient) = match family {
        Family::S | Family::D => {
            let tuple = match (&a.tuple, a.t) {
                (Some(s), _) => parse_tuple(tower.k(), s)?,
                (None, Some(t)) => default_tuple(tower.k(), a.s as usize, t, DEFAULT_ENUM_CAP)?,
                (None, None) => bail!("--t or --tuple is required for family {}", family.name()),
            };
            (Some(tuple), None)
        }
        Family::MdsS => {
            let t = parse_subgroup(a.subgroup.as_deref().unwrap_or("full"), q)?;
            (None, Some(Ambient::evaluation(tower.clone(), EvalKind::A, t, DEFAULT_ENUM_CAP)?))
        }
        Family::MdsD => {
            let t = SubgroupSpec::squares(q);
            (None, Some(Ambient::evaluation(tower.clone(), EvalKind::B, t, DEFAULT_ENUM_CAP)?))
        }
    };
    let (twist_arg, other) = match family {
        Family::S | Family::MdsS => (&a.eta, &a.gamma),
        Family::D | Family::MdsD => (&a.gamma, &a.eta),
    };
    if other.is_some() {
        bail!("family {} takes {}", family.name(), if a.eta.is_some() { "--gamma, not --eta" } else { "--eta, not --gamma" });
    }
    let twist_gf = if family.is_evaluation() { tower.k().clone() } else { tower.l().clone() };
    let twist = parse_elem(&twist_gf, twist_arg.as_deref().unwrap_or("0"))?;
    let mut params = CodeParams::new(family, a.k, twist);
    params.h = match (a.h, &ambient) {
        (Some(h), _) => h,
        (None, Some(Ambient::Evaluation { subgroup, .. })) if family == Family::MdsS => default_mds_h(&tower, *subgroup)?,
        _ => 0,
    };
    if let Some(Ambient::Evaluation { subgroup, .. }) = &ambient {
        if family == Family::MdsS {
            params.subgroup = Some(*subgroup);
        }
    }
    Ok(Setup { family, tower, tuple, ambient, params })
}

fn build(st: &Setup) -> Result<Code> {
    let ambient = match (&st.ambient, &st.tuple) {
        (Some(a), _) => a.clone(),
        (None, Some(t)) => Ambient::quotient(st.tower.clone(), t.clone())?,
        (None, None) => unreachable!("setup provides one of the two"),
    };
    Ok(build_code(ambient, st.params.clone())?)
}

fn header(a: &CodeArgs, st: &Setup) -> serde_json::Map<String, Value> {
    let tw = &st.tower;
    let mut m = serde_json::Map::new();
    m.insert("family".into(), json!(st.family));
    m.insert("q".into(), json!(a.q));
    m.insert("n".into(), json!(a.n));
    m.insert("s".into(), json!(a.s));
    if let Some(t) = &st.tuple {
        m.insert("t".into(), json!(t.t()));
        m.insert("tuple".into(), json!(t.to_doc(tw.k())));
    }
    m.insert("k".into(), json!(a.k));
    m.insert("h".into(), json!(st.params.h));
    let field = if st.family.is_evaluation() { tw.k() } else { tw.l() };
    let key = match st.family {
        Family::S | Family::MdsS => "eta",
        Family::D | Family::MdsD => "gamma",
    };
    m.insert(key.into(), json!(field.digits(st.params.twist)));
    if let Some(t) = st.params.subgroup {
        m.insert("T".into(), json!(t));
    }
    m.insert("seed".into(), json!(a.seed));
    m
}

pub fn construct(a: &CodeArgs) -> Result<Outcome> {
    let st = setup(a)?;
    let code = build(&st)?;
    let mut doc = header(a, &st);
    doc.insert("schema".into(), json!("skewcode.code/1"));
    doc.insert("length".into(), json!(code.ambient.length()));
    doc.insert("max_weight".into(), json!(code.ambient.max_weight()));
    doc.insert("log_p_size".into(), json!(code.log_size()));
    doc.insert("kprime_degree".into(), json!(code.kprime_degree));
    doc.insert("condition".into(), json!(code.condition));
    doc.insert("generators".into(), json!(export_generators(&code)));
    Ok(Outcome::json(Value::Object(doc), false))
}

fn distance(code: &Code, a: &CodeArgs) -> Result<Distance> {
    match min_distance(code, a.cap) {
        Ok(d) => Ok(d),
        Err(Error::CapExceeded { .. }) => Ok(sample_distance(code, a.samples, a.seed)),
        Err(e) => Err(e.into()),
    }
}

pub fn verify(a: &CodeArgs) -> Result<Outcome> {
    let st = setup(a)?;
    let mut doc = header(a, &st);
    doc.insert("schema".into(), json!("skewcode.verify/1"));
    let (code, dist, verdict) = match &st.tuple {
        Some(tuple) => {
            let (code, dist, v) = verify_sum_rank(st.tower.clone(), tuple.clone(), st.params.clone(), a.cap)
                .or_else(|e| match e {
                    Error::CapExceeded { .. } => {
                        let code = build(&st)?;
                        let d = distance(&code, a)?;
                        let v = optimality_verdict(&code, &d);
                        Ok((Some(code), Some(d), v))
                    }
                    e => Err(anyhow!(e)),
                })?;
            (code, dist, v)
        }
        None => {
            let code = build(&st)?;
            let d = distance(&code, a)?;
            let v = optimality_verdict(&code, &d);
            (Some(code), Some(d), v)
        }
    };
    let condition = code.as_ref().map(|c| c.condition.passed);
    doc.insert(
        "verdict".into(),
        json!({
            "kind": verdict.kind,
            "condition": condition,
            "d": verdict.d,
            "exact": dist.as_ref().map(|d| d.exact),
            "msrd": verdict.kind == skewcode::VerdictKind::Msrd,
            "mds": verdict.kind == skewcode::VerdictKind::Mds,
            "log_p_size": verdict.log_size,
            "log_p_bound": verdict.log_bound,
        }),
    );
    let certificate = match (&code, &dist) {
        (Some(code), Some(d)) => {
            let l = code.ambient.tower().l();
            json!({
                "twist_condition": code.condition,
                "argmin_coords": d.coords,
                "argmin": d.argmin.coeffs.iter().map(|&c| l.digits(c)).collect::<Vec<_>>(),
                "argmin_weight": code.ambient.weight(&d.argmin),
                "examined": d.examined.to_string(),
                "sample_seed": d.seed,
            })
        }
        _ => json!({ "invalid_tuple": true }),
    };
    doc.insert("certificate".into(), certificate);
    Ok(Outcome::json(Value::Object(doc), !verdict.optimal()))
}

pub fn count(a: &CountArgs) -> Result<Outcome> {
    let (p, e) = skewcode::ftower::prime_power(a.q).ok_or_else(|| anyhow!("q = {} is not a prime power", a.q))?;
    if a.s == 0 {
        bail!("s must be positive");
    }
    let q = a.q as u64;
    let t = parse_subgroup(&a.subgroup, q)?;
    let k = Gf::new(p, e)?;
    let mut rows = Vec::new();
    let mut agree_all = true;
    for s in 1..=a.s as u64 {
        let xts = count_xts(q, s, t)?;
        let enumerated = match enumerate_xts(&k, s as usize, t, a.cap) {
            Ok(v) => Some(v.len() as u64),
            Err(Error::CapExceeded { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let agree = enumerated.is_none_or(|n| n == xts);
        agree_all &= agree;
        let mut row = json!({ "s": s, "xs": count_xs(q, s), "xts": xts, "enumerated": enumerated, "agree": agree });
        if q % 2 == 1 {
            row["max_d"] = json!(count_xts(q, s, SubgroupSpec::squares(q))?);
        }
        rows.push(row);
    }
    let doc = json!({
        "schema": "skewcode.count/1",
        "q": q,
        "s": a.s,
        "T": t,
        "r": subfield_index(q, t.q0),
        "rows": rows,
    });
    Ok(Outcome::json(doc, !agree_all))
}

fn subring_doc(code: &Code, r: &Subring) -> Value {
    let ctx = code.quotient().expect("quotient code");
    let basis: Vec<Vec<u32>> = r.basis.iter().map(|b| ctx.to_fp(b).into_iter().map(|c| c.0).collect()).collect();
    json!({ "log_p_size": r.log_size(), "basis_fp": basis })
}

pub fn invariants(a: &CodeArgs) -> Result<Outcome> {
    let st = setup(a)?;
    if st.family.is_evaluation() {
        bail!("invariants are defined for the S and D families");
    }
    let code = build(&st)?;
    let prof = nuclear_parameters(&code, a.seed)?;
    let l = st.tower.l();
    let poly_doc = |x: &Option<skewcode::SkewPoly>| {
        x.as_ref().map(|f| f.coeffs.iter().map(|&c| l.digits(c)).collect::<Vec<_>>())
    };
    let mut doc = header(a, &st);
    doc.insert("schema".into(), json!("skewcode.invariants/1"));
    doc.insert("sizes_log_p".into(), json!({
        "C": prof.sizes_log_p[0],
        "Il": prof.sizes_log_p[1],
        "Ir": prof.sizes_log_p[2],
        "Cen": prof.sizes_log_p[3],
        "Z": prof.sizes_log_p[4],
    }));
    doc.insert("hypotheses_met".into(), json!(prof.hypotheses_met));
    doc.insert("closed_form".into(), json!(prof.closed_form));
    doc.insert("closed_form_match".into(), json!(prof.closed_form_match));
    doc.insert(
        "subrings".into(),
        json!({
            "Il": subring_doc(&code, &prof.il),
            "Ir": subring_doc(&code, &prof.ir),
            "Cen": subring_doc(&code, &prof.cen),
            "Z": subring_doc(&code, &prof.z),
        }),
    );
    doc.insert(
        "normalization".into(),
        json!({
            "unit": poly_doc(&prof.normalized.unit),
            "unit_inverse": poly_doc(&prof.normalized.unit_inverse),
            "attempts": prof.normalized.attempts,
        }),
    );
    let negative = prof.hypotheses_met && prof.closed_form_match == Some(false);
    Ok(Outcome::json(Value::Object(doc), negative))
}

pub fn export(a: &ExportArgs) -> Result<Outcome> {
    let st = setup(&a.code)?;
    let code = build(&st)?;
    Ok(match a.format {
        Format::Json => Outcome::json(json!(export_generators(&code)), false),
        Format::Csv => Outcome { body: Body::Text(export_csv(&code)), negative: false },
    })
}

pub fn selftest(a: &SelftestArgs) -> Result<Outcome> {
    let report = match a.criterion {
        None => run_all(a.seed),
        Some(id) => {
            let c = run_criterion(id, a.seed).ok_or_else(|| anyhow!("no criterion {id}; choose 1-9"))?;
            SelftestReport { schema: REPORT_SCHEMA, seed: a.seed, passed: c.passed, total_ms: c.elapsed_ms, criteria: vec![c] }
        }
    };
    let negative = !report.passed;
    Ok(Outcome::json(json!(report), negative))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_syntax() {
        let f9 = Gf::with_modulus(3, &[2, 2, 1]).unwrap();
        assert_eq!(parse_elem(&f9, "alpha").unwrap(), f9.generator());
        assert_eq!(parse_elem(&f9, "alpha^2").unwrap(), f9.mul(f9.generator(), f9.generator()));
        assert_eq!(parse_elem(&f9, "5").unwrap(), Elem(5));
        assert!(parse_elem(&f9, "9").is_err());
        assert!(parse_elem(&f9, "beta").is_err());
    }

    #[test]
    fn subgroup_syntax() {
        assert_eq!(parse_subgroup("full", 9).unwrap(), SubgroupSpec { q0: 9, order: 8 });
        assert_eq!(parse_subgroup("squares", 9).unwrap(), SubgroupSpec { q0: 9, order: 4 });
        assert_eq!(parse_subgroup("3:1", 9).unwrap(), SubgroupSpec { q0: 3, order: 1 });
        assert!(parse_subgroup("3", 9).is_err());
        assert!(parse_subgroup("squares", 8).is_err());
    }

    #[test]
    fn tuple_syntax() {
        let f3 = Gf::new(3, 1).unwrap();
        let t = parse_tuple(&f3, "1,1;2,1").unwrap();
        assert_eq!(t.t(), 2);
        assert_eq!(t.polys[1], Poly::new(vec![Elem(2), Elem(1)]));
    }
}
