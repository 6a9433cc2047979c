//! Built-in acceptance suite: each criterion runs a fixed battery of checks
//! against independent oracles and reports pass/fail with timings.

use crate::central::{
    count, default_tuple, enumerate_xts, make_tuple, min_poly_over_k, AdmissibleTuple, CountKind, EvalKind,
    SubgroupSpec, DEFAULT_ENUM_CAP,
};
use crate::codes::{
    build_code, default_mds_h, min_distance, optimality_verdict, passing_twists, twist_friendly_tuple, Ambient,
    CodeParams, Family, VerdictKind, DEFAULT_CODE_CAP,
};
use crate::error::Result;
use crate::ftower::{build_tower, FieldSpec, TowerContext};
use crate::gf::{Elem, Gf};
use crate::invariants::{
    closed_forms, nuclear_parameters, novelty_verdict, FamilyPoint, Novelty, Point, Profile,
};
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::quotient::{explicit_data, QuotCtx, QuotElem, Realization, RealizationMode};
use crate::skew::{SkewPoly, SkewRing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

pub const REPORT_SCHEMA: &str = "skewcode.selftest/1";
pub const DEFAULT_SELFTEST_SEED: u64 = 20240917;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub elapsed_ms: u128,
    pub limit_ms: u128,
    pub checks: Vec<Check>,
    pub observations: Vec<String>,
    /// Set when a literal target is known not to hold; the failing checks carry the detail.
    pub known_deviation: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub schema: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub total_ms: u128,
    pub criteria: Vec<CriterionReport>,
}

#[derive(Default)]
struct Run {
    checks: Vec<Check>,
    observations: Vec<String>,
    deviation: Option<String>,
}

impl Run {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
        passed
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, name: impl Into<String>, got: T, want: T) -> bool {
        let passed = got == want;
        let detail = format!("got {got:?}, expected {want:?}");
        self.check(name, passed, detail)
    }

    fn note(&mut self, s: impl Into<String>) {
        self.observations.push(s.into());
    }
}

type CriterionFn = fn(u64) -> Result<Run>;

/// `(id, title, time limit in ms)` of every criterion.
pub const CRITERIA: &[(u32, &str, u128)] = &[
    (1, "counting regression", 1_000),
    (2, "Möbius count vs brute-force enumeration", 30_000),
    (3, "skew-ring property suite", 30_000),
    (4, "bound correctness", 60_000),
    (5, "isometry witness", 60_000),
    (6, "MSRD grid", 4 * 60_000),
    (7, "MDS regression", 300_000),
    (8, "nuclear parameters", 120_000),
    (9, "novelty verdicts", 10_000),
    (10, "full run under 10 minutes", 600_000),
];

fn criterion_fn(id: u32) -> Option<CriterionFn> {
    Some(match id {
        1 => c1_counting,
        2 => c2_mobius,
        3 => c3_skew_ring,
        4 => c4_bound,
        5 => c5_isometry,
        6 => c6_msrd_grid,
        7 => c7_mds,
        8 => c8_nuclear,
        9 => c9_novelty,
        _ => return None,
    })
}

/// Runs criterion `id` (1..=9); criterion 10 is only meaningful inside [`run_all`].
pub fn run_criterion(id: u32, seed: u64) -> Option<CriterionReport> {
    let f = criterion_fn(id)?;
    let &(_, title, limit_ms) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let run = f(seed).unwrap_or_else(|e| {
        let mut r = Run::default();
        r.check("completed without error", false, e.to_string());
        r
    });
    let elapsed_ms = start.elapsed().as_millis();
    let mut checks = run.checks;
    checks.push(Check {
        name: "time limit".into(),
        passed: elapsed_ms <= limit_ms,
        detail: format!("{elapsed_ms} ms of {limit_ms} ms"),
    });
    Some(CriterionReport {
        id,
        title: title.into(),
        passed: checks.iter().all(|c| c.passed),
        elapsed_ms,
        limit_ms,
        checks,
        observations: run.observations,
        known_deviation: run.deviation,
    })
}

/// Every criterion in order, then the overall timing criterion.
pub fn run_all(seed: u64) -> SelftestReport {
    let start = Instant::now();
    let mut criteria: Vec<CriterionReport> = (1..=9).filter_map(|id| run_criterion(id, seed)).collect();
    let total_ms = start.elapsed().as_millis();
    let limit_ms = CRITERIA[9].2;
    let serializable = serde_json::to_string(&criteria).is_ok();
    let checks = vec![
        Check { name: "criteria 1-9 ran".into(), passed: criteria.len() == 9, detail: format!("{} reports", criteria.len()) },
        Check { name: "total time".into(), passed: total_ms <= limit_ms, detail: format!("{total_ms} ms of {limit_ms} ms") },
        Check { name: "report serializes".into(), passed: serializable, detail: String::new() },
    ];
    criteria.push(CriterionReport {
        id: 10,
        title: CRITERIA[9].1.into(),
        passed: checks.iter().all(|c| c.passed),
        elapsed_ms: total_ms,
        limit_ms,
        checks,
        observations: vec![],
        known_deviation: None,
    });
    let passed = criteria.iter().all(|c| c.passed);
    SelftestReport { schema: REPORT_SCHEMA, seed, passed, total_ms, criteria }
}

fn poly(c: &[u32]) -> Poly {
    Poly::new(c.iter().map(|&x| Elem(x)).collect())
}

fn sorted(mut v: Vec<Poly>) -> Vec<Poly> {
    v.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
    v
}

fn c1_counting(_seed: u64) -> Result<Run> {
    let mut r = Run::default();
    r.eq("count(Xs, q=3, s=3)", count(CountKind::Xs, 3, 3, None)?, 8);
    let k3 = Gf::new(3, 1)?;
    // c0-first coefficient lists of the eight monic irreducible cubics over F_3
    let listed = [
        [1, 2, 0, 1],
        [1, 0, 2, 1],
        [1, 2, 1, 1],
        [1, 1, 2, 1],
        [2, 0, 1, 1],
        [2, 2, 0, 1],
        [2, 1, 1, 1],
        [2, 2, 2, 1],
    ];
    let got = enumerate_xts(&k3, 3, SubgroupSpec::full(3), DEFAULT_ENUM_CAP)?;
    r.eq(
        "enumerate X_{F3*,3} equals the listed cubics",
        sorted(got),
        sorted(listed.iter().map(|c| poly(c)).collect()),
    );
    r.eq(
        "count(XTs, q=3, T={1}, s=3)",
        count(CountKind::XTs, 3, 3, Some(SubgroupSpec { q0: 3, order: 1 }))?,
        4,
    );
    r.eq("count(XTs, q=9, s=2, T=squares)", count(CountKind::MaxD, 9, 2, None)?, 16);
    // the sixteen quadratics over F_9, coefficients as powers of α (α² = α + 1)
    let tower = build_tower(&FieldSpec::new(3, 2, 1, 2).with_reference_moduli())?;
    let k9 = tower.k();
    let a = k9.generator();
    let listed_z: [(u64, u64); 16] = [
        (0, 2), (6, 6), (3, 4), (7, 4), (0, 6), (2, 2), (7, 0), (1, 4),
        (5, 4), (4, 6), (6, 2), (1, 0), (2, 6), (4, 2), (5, 0), (3, 0),
    ];
    let z: Vec<Poly> = listed_z
        .iter()
        .map(|&(e1, e0)| Poly::new(vec![k9.pow(a, e0), k9.pow(a, e1), Elem::ONE]))
        .collect();
    let got = enumerate_xts(k9, 2, SubgroupSpec::squares(9), DEFAULT_ENUM_CAP)?;
    r.eq("enumerate Z_{T,2} over F_9 equals the listed quadratics", sorted(got), sorted(z));
    Ok(r)
}

fn c2_mobius(_seed: u64) -> Result<Run> {
    let mut r = Run::default();
    let fields = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (3, 2)];
    let mut cases = 0;
    let mut bad = Vec::new();
    for (p, e) in fields {
        let k = Gf::new(p, e)?;
        let q = k.order() as u64;
        let q0s: Vec<u64> = [1u32, 2].iter().filter(|&&rr| e % rr == 0).map(|&rr| (p as u64).pow(e / rr)).collect();
        for q0 in q0s {
            for s in 1..=4u64 {
                for order in crate::central::divisors(q0 - 1) {
                    let t = SubgroupSpec { q0, order };
                    let n = enumerate_xts(&k, s as usize, t, DEFAULT_ENUM_CAP)?.len() as u64;
                    let c = count(CountKind::XTs, q, s, Some(t))?;
                    cases += 1;
                    if n != c {
                        bad.push(format!("q={q} q0={q0} s={s} |T|={order}: {n} vs {c}"));
                    }
                }
            }
        }
    }
    r.check(format!("{cases} (q, q0, s, T) cases agree"), bad.is_empty(), bad.join("; "));
    Ok(r)
}

/// `(p, e, n)` with `q^n ≤ 64`.
const RING_TOWERS: [(u32, u32, u32); 10] =
    [(2, 1, 2), (2, 1, 3), (2, 1, 6), (2, 2, 2), (2, 2, 3), (3, 1, 2), (3, 1, 3), (5, 1, 2), (7, 1, 2), (2, 3, 2)];

fn ring(p: u32, e: u32, n: u32) -> Result<SkewRing> {
    Ok(SkewRing::new(build_tower(&FieldSpec::new(p, e, n, 1))?))
}

fn deg(f: &SkewPoly) -> usize {
    f.degree().unwrap_or(0)
}

fn c3_skew_ring(seed: u64) -> Result<Run> {
    let mut r = Run::default();
    let rings: Vec<SkewRing> = RING_TOWERS.iter().map(|&(p, e, n)| ring(p, e, n)).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
    let mut fails = [0usize; 5];
    for i in 0..1000 {
        let rg = &rings[i % rings.len()];
        let l = rg.tower().l().clone();
        let df = rng.gen_range(0..=8);
        let dg = rng.gen_range(0..=8);
        let f = rg.random_of_degree(&mut rng, df);
        let g = rg.random_of_degree(&mut rng, dg);

        if deg(&rg.mul(&f, &g)) != df + dg {
            fails[0] += 1;
        }

        // division: recover a planted quotient and remainder
        let qd = rng.gen_range(0..=8usize.saturating_sub(dg));
        let q0 = rg.random_of_degree(&mut rng, qd);
        let r0 = rg.random(&mut rng, dg);
        let planted = rg.add(&rg.mul(&q0, &g), &r0);
        let (qq, rr) = rg.right_divmod(&planted, &g)?;
        let (q1, r1) = rg.right_divmod(&f, &g)?;
        let reconstructs = rg.add(&rg.mul(&q1, &g), &r1) == f && (r1.is_zero() || deg(&r1) < dg);
        if (qq, rr) != (q0, r0) || !reconstructs {
            fails[1] += 1;
        }

        // Bezout on a pair with a planted common right factor
        let hd = rng.gen_range(0..=3);
        let h = rg.random_of_degree(&mut rng, hd);
        let da = rng.gen_range(0..=5);
        let a = rg.mul(&rg.random_of_degree(&mut rng, da), &h);
        let db = rng.gen_range(0..=5);
        let b = rg.mul(&rg.random_of_degree(&mut rng, db), &h);
        let (d, u, v) = rg.gcrd_ext(&a, &b)?;
        let bezout = rg.add(&rg.mul(&u, &a), &rg.mul(&v, &b)) == d
            && d.lead() == Elem::ONE
            && rg.right_divides(&d, &a)
            && rg.right_divides(&d, &b)
            && deg(&d) >= hd;
        if !bezout {
            fails[2] += 1;
        }

        // lclm: degree identity and common multiple
        let m = rg.lclm(&f, &g)?;
        if deg(&m) + rg.gcrd_degree(&f, &g) != df + dg || !rg.right_divides(&f, &m) || !rg.right_divides(&g, &m) {
            fails[3] += 1;
        }

        let alpha = l.random_nonzero(&mut rng);
        if rg.shift_scale(&rg.mul(&f, &g), alpha)? != rg.mul(&rg.shift_scale(&f, alpha)?, &rg.shift_scale(&g, alpha)?) {
            fails[4] += 1;
        }
    }
    for (name, f) in
        ["degree additivity", "right-division uniqueness", "gcrd Bezout certificates", "lclm degree identity", "shift homomorphism"]
            .iter()
            .zip(fails)
    {
        r.check(format!("{name} (1000 instances)"), f == 0, format!("{f} failures"));
    }
    Ok(r)
}

/// Random irreducible monic `F ≠ y` of degree `s` over `k`.
fn random_irreducible<R: Rng>(k: &Gf, s: usize, rng: &mut R) -> Poly {
    loop {
        let mut c: Vec<Elem> = (0..s).map(|_| k.random(rng)).collect();
        c.push(Elem::ONE);
        let f = Poly::new(c);
        if !f.coeff(0).is_zero() && f.is_irreducible(k) {
            return f;
        }
    }
}

/// Random monic right divisor of degree `deg F` of `F(x^n)` by repeated gcrds.
fn random_divisor<R: Rng>(rg: &SkewRing, big_f: &Poly, rng: &mut R) -> SkewPoly {
    let s = big_f.degree().unwrap();
    let mut g = rg.inflate(big_f);
    while deg(&g) != s {
        let a = rg.random(rng, deg(&g));
        if a.is_zero() {
            continue;
        }
        let d = rg.gcrd(&a, &g);
        if deg(&d) > 0 && deg(&d) < deg(&g) && deg(&d).is_multiple_of(s) {
            g = d;
        }
    }
    g
}

/// Monic polynomials over `k` of exact degree `d`.
fn monic_of_degree(k: &Gf, d: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = k.order() as u64;
    (0..q.pow(d as u32)).map(move |idx| {
        let mut c: Vec<Elem> = (0..d).map(|i| k.unrank(((idx / q.pow(i as u32)) % q) as u32)).collect();
        c.push(Elem::ONE);
        Poly::new(c)
    })
}

fn c4_bound(seed: u64) -> Result<Run> {
    let mut r = Run::default();
    let towers = [(2, 1, 2), (2, 1, 3), (3, 1, 2), (3, 1, 3), (2, 2, 2), (2, 2, 3)];
    let rings: Vec<SkewRing> = towers.iter().map(|&(p, e, n)| ring(p, e, n)).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
    let mut fails: Vec<String> = Vec::new();
    for i in 0..200 {
        let rg = &rings[i % rings.len()];
        let tw = rg.tower().clone();
        let k = tw.k();
        let s = 1 + (i / rings.len()) % 4;
        let big_f = random_irreducible(k, s, &mut rng);
        let f = random_divisor(rg, &big_f, &mut rng);
        let b = rg.bound_of(&f)?;
        let inflated = rg.inflate(&b);
        let central = rg.is_central(&inflated);
        let divisible = rg.right_divides(&f, &inflated);
        let irreducible = b.is_irreducible(k) && b.degree() == f.degree();
        // brute force: no monic central G of smaller degree is a left multiple of f
        let minimal = (1..deg(&f)).all(|d| monic_of_degree(k, d).all(|g| !rg.right_divides(&f, &rg.inflate(&g))));
        let sign = if (s * (tw.n() as usize - 1)).is_multiple_of(2) { Elem::ONE } else { k.neg(Elem::ONE) };
        let norm = tw.norm_l_k(f.coeff(0)) == k.mul(sign, b.coeff(0));
        if !(b == big_f && central && divisible && irreducible && minimal && norm) {
            fails.push(format!(
                "{}: F={} b={} central={central} divisible={divisible} irreducible={irreducible} minimal={minimal} norm={norm}",
                rg.display(&f),
                big_f.display(k),
                b.display(k)
            ));
        }
    }
    r.check(
        "200 random irreducible divisors: bound is central, divisible, minimal, irreducible, norm relation",
        fails.is_empty(),
        fails.first().cloned().unwrap_or_default(),
    );
    Ok(r)
}

fn explicit_ctx(p: u32, t: usize) -> Result<QuotCtx> {
    let tower = build_tower(&FieldSpec::new(p, 1, 3, 3).with_reference_moduli())?;
    let l = tower.l();
    let xi = l.root();
    let base = crate::quotient::min_poly_in_l(&tower, xi);
    let lambdas: Vec<Elem> = (1..=t as u32).map(Elem).collect();
    let tuple = make_tuple(tower.k(), &base, &lambdas)?;
    QuotCtx::new(tower, tuple)
}

/// Two distinct cubics over `F_2` (λ-scaling is unavailable there).
fn two_cubics_ctx() -> Result<QuotCtx> {
    let tower = build_tower(&FieldSpec::new(2, 1, 3, 3).with_reference_moduli())?;
    let tuple = default_tuple(tower.k(), 3, 2, DEFAULT_ENUM_CAP)?;
    QuotCtx::new(tower, tuple)
}

fn diag3(tw: &TowerContext, a: Elem) -> Matrix {
    let mut d = Matrix::zeros(3, 3);
    d.set(0, 0, a);
    d.set(1, 1, tw.sigma_pow(a, 2));
    d.set(2, 2, tw.sigma_pow(a, 1));
    d
}

fn witness_checks(r: &mut Run, label: &str, ctx: &QuotCtx, mode: RealizationMode, seed: u64) -> Result<()> {
    let real = Realization::new(ctx, mode, seed)?;
    let e = ctx.tower().e_field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mult_fail = 0;
    for _ in 0..500 {
        let a = ctx.ring().random(&mut rng, ctx.nst());
        let b = ctx.ring().random(&mut rng, ctx.nst());
        if real.apply(ctx, &ctx.mul(&a, &b)) != real.apply(ctx, &a).mul(&e, &real.apply(ctx, &b)) {
            mult_fail += 1;
        }
    }
    r.check(format!("{label}: multiplicative on 500 random pairs"), mult_fail == 0, format!("{mult_fail} failures"));
    // half the samples are multiples of a block factor so that ranks below full occur
    let mut rank_fail = 0;
    let mut ranks = std::collections::BTreeSet::new();
    for j in 0..500 {
        let mut a: QuotElem = ctx.ring().random(&mut rng, ctx.nst());
        if j % 2 == 1 {
            let f = ctx.reduce(ctx.factor(j / 2 % ctx.t()));
            a = ctx.mul(&a, &f);
        }
        let w = ctx.f_weight(&a);
        ranks.insert(w);
        if real.apply(ctx, &a).sum_rank(&e) != w {
            rank_fail += 1;
        }
    }
    r.check(
        format!("{label}: Σ rank = F-weight on 500 elements"),
        rank_fail == 0,
        format!("{rank_fail} failures; weights seen {ranks:?}"),
    );
    Ok(())
}

fn c5_isometry(seed: u64) -> Result<Run> {
    let mut r = Run::default();
    for (p, t) in [(2u32, 1usize), (5, 1), (5, 2)] {
        let ctx = explicit_ctx(p, t)?;
        let label = format!("q={p}, t={t}, explicit");
        witness_checks(&mut r, &label, &ctx, RealizationMode::Explicit3x3, seed ^ 5)?;
        let data = explicit_data(&ctx)?;
        let tw = ctx.tower().clone();
        let real = Realization::new(&ctx, RealizationMode::Explicit3x3, seed)?;
        let mut xmat = Matrix::zeros(3, 3);
        xmat.set(0, 2, data.xi);
        xmat.set(1, 0, Elem::ONE);
        xmat.set(2, 1, Elem::ONE);
        let l = tw.l();
        let mut ok_alpha = true;
        for a in l.elements() {
            let m = real.apply(&ctx, &SkewPoly::constant(a));
            ok_alpha &= m.blocks.iter().all(|b| *b == diag3(&tw, a));
        }
        r.check(format!("{label}: Φ(α) = diag(α, σ²α, σα) for every α"), ok_alpha, "");
        let mx = real.apply(&ctx, &SkewPoly::x());
        // block i is Φ(a(α_i^{-1} x))
        let want: Vec<Matrix> =
            data.alphas.iter().map(|&al| diag3(&tw, l.inv(al).unwrap()).mul(l, &xmat)).collect();
        r.eq(format!("{label}: Φ(x) blocks = D(α_i^{{-1}})·X"), mx.blocks, want);
        let norms: Vec<Elem> = data.alphas.iter().map(|&al| tw.norm_l_k(al)).collect();
        r.eq(format!("{label}: N(α_i) = λ_i"), norms, ctx.tuple().lambdas.clone());
        if p == 5 {
            r.eq("q=5: ξ is a root of y³+3y+3", data.base.clone(), poly(&[3, 3, 0, 1]));
            if t == 2 {
                r.eq("q=5: α = (1, ξ)", data.alphas.clone(), vec![Elem::ONE, data.xi]);
            }
        }
    }
    let ctx = two_cubics_ctx()?;
    witness_checks(&mut r, "q=2, t=2, generic", &ctx, RealizationMode::Generic, seed ^ 55)?;
    r.note("q=2, t=2 uses two distinct cubics with the generic realization: F_2 has no λ ≠ 1");
    Ok(r)
}

/// Checks one S/D code: exact distance `tn − k + 1` and an MSRD verdict.
fn msrd_case(r: &mut Run, amb: &Ambient, params: CodeParams, label: &str) -> Result<()> {
    let code = build_code(amb.clone(), params)?;
    let dist = min_distance(&code, DEFAULT_CODE_CAP)?;
    let v = optimality_verdict(&code, &dist);
    let want = amb.max_weight() - code.params.k + 1;
    r.check(
        label.to_string(),
        dist.exact && dist.d == want && v.kind == VerdictKind::Msrd && code.condition.passed,
        format!("d = {} (expected {want}), verdict {:?}", dist.d, v.kind),
    );
    Ok(())
}

fn twist_label(tw: &TowerContext, e: Elem) -> String {
    format!("{:?}", tw.l().digits(e))
}

fn s_point(r: &mut Run, q: u32, n: u32, s: u32, t: usize, ks: &[usize]) -> Result<()> {
    let start = Instant::now();
    let tower = build_tower(&FieldSpec::from_q(q, n, s)?)?;
    let tag = format!("S q={q} n={n} s={s} t={t}");
    let default = default_tuple(tower.k(), s as usize, t, DEFAULT_ENUM_CAP)?;
    let amb = Ambient::quotient(tower.clone(), default.clone())?;
    for &k in ks {
        msrd_case(r, &amb, CodeParams::new(Family::S, k, Elem::ZERO), &format!("{tag} k={k} η=0"))?;
    }
    let ne = tower.n() * tower.e();
    let grid: Vec<CodeParams> =
        ks.iter().flat_map(|&k| (0..ne).map(move |h| CodeParams::new(Family::S, k, Elem::ZERO).with_h(h))).collect();
    let mut tuples = vec![default.clone()];
    match twist_friendly_tuple(&tower, t, &grid, DEFAULT_ENUM_CAP)? {
        Some((tuple, _, _)) if tuple != default => tuples.push(tuple),
        Some(_) => {}
        None => r.note(format!("{tag}: no {t}-subset of X_{s} admits a nonzero twist for any k, h; η ≠ 0 is vacuous")),
    }
    let mut twisted = 0;
    for tuple in &tuples {
        let amb = Ambient::quotient(tower.clone(), tuple.clone())?;
        let names: Vec<String> = tuple.polys.iter().map(|f| f.display(tower.k())).collect();
        for p in &grid {
            for eta in passing_twists(&amb, p)? {
                twisted += 1;
                let label = format!("{tag} k={} h={} η={} tuple ({})", p.k, p.h, twist_label(&tower, eta), names.join(", "));
                msrd_case(r, &amb, CodeParams { twist: eta, ..p.clone() }, &label)?;
            }
        }
    }
    r.note(format!("{tag}: {twisted} twisted codes checked"));
    let ms = start.elapsed().as_millis();
    r.check(format!("{tag}: point under 60 s"), ms <= 60_000, format!("{ms} ms"));
    Ok(())
}

fn d_point(r: &mut Run, q: u32, ks: &[usize], required: bool) -> Result<()> {
    let start = Instant::now();
    let (n, s, t) = (2, 1, 2);
    let tower = build_tower(&FieldSpec::from_q(q, n, s)?)?;
    let tag = format!("D q={q} n={n} s={s} t={t}");
    let grid: Vec<CodeParams> = ks.iter().map(|&k| CodeParams::new(Family::D, k, Elem::ZERO)).collect();
    let tuple = match twist_friendly_tuple(&tower, t, &grid, DEFAULT_ENUM_CAP)? {
        Some((tuple, _, _)) => tuple,
        None => default_tuple(tower.k(), s as usize, t, DEFAULT_ENUM_CAP)?,
    };
    let amb = Ambient::quotient(tower.clone(), tuple.clone())?;
    let mut valid = 0;
    for p in &grid {
        let gammas = passing_twists(&amb, p)?;
        if gammas.is_empty() {
            r.note(format!(
                "{tag} k={}: no valid γ on any tuple of X_1 ({} nonzero candidates examined)",
                p.k,
                tower.l().order() - 1
            ));
            for g in tower.l().elements().skip(1) {
                let code = build_code(amb.clone(), CodeParams { twist: g, ..p.clone() })?;
                let d = min_distance(&code, DEFAULT_CODE_CAP)?.d;
                r.note(format!("{tag} k={} γ={}: d = {d} (condition fails)", p.k, twist_label(&tower, g)));
            }
        }
        for g in gammas {
            valid += 1;
            msrd_case(r, &amb, CodeParams { twist: g, ..p.clone() }, &format!("{tag} k={} γ={}", p.k, twist_label(&tower, g)))?;
        }
    }
    if valid == 0 {
        r.check(
            format!("{tag}: valid-γ set is empty (vacuous), certified by exhaustive search"),
            !required,
            "every nonzero γ fails the non-square condition",
        );
    }
    let ms = start.elapsed().as_millis();
    r.check(format!("{tag}: point under 60 s"), ms <= 60_000, format!("{ms} ms"));
    Ok(())
}

fn c6_msrd_grid(_seed: u64) -> Result<Run> {
    let mut r = Run::default();
    s_point(&mut r, 3, 2, 1, 2, &[1, 2, 3])?;
    s_point(&mut r, 3, 1, 2, 3, &[1, 2])?;
    s_point(&mut r, 5, 1, 1, 4, &[1, 2, 3])?;
    s_point(&mut r, 3, 2, 2, 2, &[1, 2])?;
    d_point(&mut r, 3, &[1, 2], false)?;
    d_point(&mut r, 5, &[1, 2], true)?;
    Ok(r)
}

fn mds_case(r: &mut Run, amb: &Ambient, params: CodeParams, dim: usize, want_d: usize, label: &str) -> Result<()> {
    let code = build_code(amb.clone(), params)?;
    let dist = min_distance(&code, DEFAULT_CODE_CAP)?;
    let v = optimality_verdict(&code, &dist);
    r.check(
        label.to_string(),
        code.condition.passed && code.basis.len() == dim && dist.exact && dist.d == want_d && v.kind == VerdictKind::Mds,
        format!("F_p-dim {} (expected {dim}), d = {} (expected {want_d}), verdict {:?}", code.basis.len(), dist.d, v.kind),
    );
    Ok(())
}

fn c7_mds(_seed: u64) -> Result<Run> {
    let mut r = Run::default();
    let tower = build_tower(&FieldSpec::from_q(3, 1, 3)?.with_reference_moduli())?;
    let k = tower.k().clone();
    for (t, len) in [(SubgroupSpec::full(3), 8usize), (SubgroupSpec { q0: 3, order: 1 }, 4)] {
        let amb = Ambient::evaluation(tower.clone(), EvalKind::A, t, DEFAULT_ENUM_CAP)?;
        r.eq(format!("MDS_S |T|={}: length", t.order), amb.length(), len);
        let h = default_mds_h(&tower, t)?;
        let kmax = len / 2;
        for kk in 1..=kmax {
            let base = CodeParams::new(Family::MdsS, kk, Elem::ZERO).with_h(h).with_subgroup(t);
            let minus1k = if kk % 2 == 0 { Elem::ONE } else { k.neg(Elem::ONE) };
            let mut twists = vec![Elem::ZERO];
            twists.extend(passing_twists(&amb, &base)?);
            if t.order == 1 {
                r.eq(
                    format!("MDS_S |T|=1 k={kk}: passing η = F_3 minus (-1)^k"),
                    twists.clone(),
                    k.elements().filter(|&e| e != minus1k).collect::<Vec<_>>(),
                );
            }
            for eta in twists {
                mds_case(
                    &mut r,
                    &amb,
                    CodeParams { twist: eta, ..base.clone() },
                    3 * kk,
                    len + 1 - kk,
                    &format!("MDS_S |T|={} k={kk} η={}", t.order, eta.0),
                )?;
            }
        }
    }
    // the listed A-set of F_27 = F_3(ξ), ξ³ = ξ + 2: roots of every cubic in X_3
    let e27 = tower.e_field();
    let xi = e27.root();
    let a_listed: Vec<Poly> = [1i64, -1, 5, -5, 4, -4, 2, -2]
        .iter()
        .map(|&i| Ok(min_poly_over_k(&tower, e27.powi(xi, i)?)))
        .collect::<Result<_>>()?;
    r.eq(
        "listed A-set points have the minimal polynomials X_{F3*,3}",
        sorted(a_listed),
        sorted(enumerate_xts(&k, 3, SubgroupSpec::full(3), DEFAULT_ENUM_CAP)?),
    );

    let tower = build_tower(&FieldSpec::from_q(9, 1, 2)?.with_reference_moduli())?;
    let amb = Ambient::evaluation(tower.clone(), EvalKind::B, SubgroupSpec::squares(9), DEFAULT_ENUM_CAP)?;
    r.eq("MDS_D q=9 s=2: length", amb.length(), 16);
    let alpha = tower.k().generator();
    for kk in 1..=3 {
        mds_case(&mut r, &amb, CodeParams::new(Family::MdsD, kk, alpha), 4 * kk, 17 - kk, &format!("MDS_D q=9 s=2 γ=α k={kk}"))?;
    }
    let e81 = tower.e_field();
    let xi = e81.root();
    let b_listed: Vec<Poly> = [2i64, -2, 4, -4, 6, -6, 8, 12, -12, 14, -14, 16, 22, -22, 24, 32]
        .iter()
        .map(|&i| Ok(min_poly_over_k(&tower, e81.powi(xi, i)?)))
        .collect::<Result<_>>()?;
    r.eq(
        "listed B-set points (ξ⁴ = ξ³ + 1) have the minimal polynomials Z_{T,2}",
        sorted(b_listed),
        sorted(enumerate_xts(tower.k(), 2, SubgroupSpec::squares(9), DEFAULT_ENUM_CAP)?),
    );
    Ok(r)
}

const ENTRIES: [&str; 5] = ["|C|", "|I_l|", "|I_r|", "|Cen|", "|Z|"];

fn profile_checks(r: &mut Run, label: &str, got: Profile, want: Profile) {
    for i in 0..5 {
        r.check(format!("{label}: log_3 {}", ENTRIES[i]), got[i] == want[i], format!("got {}, expected {}", got[i], want[i]));
    }
}

fn c8_nuclear(seed: u64) -> Result<Run> {
    let mut r = Run::default();
    let tower = build_tower(&FieldSpec::from_q(3, 2, 2)?)?;
    let pt = Point { p: 3, e: 1, n: 2, s: 2, t: 2, k: 2 };
    let tuple = default_tuple(tower.k(), 2, 2, DEFAULT_ENUM_CAP)?;
    let amb = Ambient::quotient(tower.clone(), tuple)?;
    let code = build_code(amb, CodeParams::new(Family::S, 2, Elem::ZERO))?;
    let prof = nuclear_parameters(&code, seed)?;
    // target as listed: (3^16, 3^2, 3^2, 3^4, 3)
    profile_checks(&mut r, "S η=0 q=3 n=2 s=2 t=2 k=2 vs listed target", prof.sizes_log_p, [16, 2, 2, 4, 1]);
    r.eq("S η=0: closed form with |C| = q^{nsk}", Some(prof.sizes_log_p), closed_forms(FamilyPoint::SUntwisted, &pt).first().copied());
    if prof.sizes_log_p[0] != 16 {
        r.deviation = Some(format!(
            "the listed |C| = 3^16 is the size of the ambient space; the code has q^(nsk) = 3^{} elements",
            prof.sizes_log_p[0]
        ));
    }

    let ne = tower.n() * tower.e();
    let grid: Vec<CodeParams> = (0..ne).map(|h| CodeParams::new(Family::S, 2, Elem::ZERO).with_h(h)).collect();
    let Some((tuple, _, _)) = twist_friendly_tuple(&tower, 2, &grid, DEFAULT_ENUM_CAP)? else {
        r.check("η≠0 point exists", false, "no tuple admits a twist");
        return Ok(r);
    };
    let amb = Ambient::quotient(tower.clone(), tuple)?;
    for p in grid {
        let Some(&eta) = passing_twists(&amb, &p)?.first() else { continue };
        let code = build_code(amb.clone(), CodeParams { twist: eta, ..p.clone() })?;
        let prof = nuclear_parameters(&code, seed)?;
        let want = closed_forms(FamilyPoint::STwisted { h: Some(p.h) }, &pt)[0];
        profile_checks(&mut r, &format!("S η={} h={} vs closed form", twist_label(&tower, eta), p.h), prof.sizes_log_p, want);
    }

    let tower = build_tower(&FieldSpec::from_q(3, 2, 1)?)?;
    let tuple = AdmissibleTuple::new(tower.k(), enumerate_xts(tower.k(), 1, SubgroupSpec::full(3), DEFAULT_ENUM_CAP)?);
    let amb = Ambient::quotient(tower.clone(), tuple)?;
    let dpt = Point { s: 1, ..pt };
    for g in tower.l().elements().skip(1) {
        let code = build_code(amb.clone(), CodeParams::new(Family::D, 2, g))?;
        let prof = nuclear_parameters(&code, seed)?;
        let label = format!("D q=3 n=2 s=1 t=2 k=2 γ={}", twist_label(&tower, g));
        r.eq(format!("{label}: |I_l| = |I_r| = 3"), (prof.sizes_log_p[1], prof.sizes_log_p[2]), (1, 1));
        r.eq(format!("{label}: full profile vs closed form"), Some(prof.sizes_log_p), closed_forms(FamilyPoint::D, &dpt).first().copied());
    }
    Ok(r)
}

fn c9_novelty(seed: u64) -> Result<Run> {
    let mut r = Run::default();
    let pt = Point { p: 3, e: 1, n: 2, s: 2, t: 2, k: 2 };
    let v = novelty_verdict((FamilyPoint::SUntwisted, pt), (FamilyPoint::Lrs, pt))?;
    let via_il = matches!(&v, Novelty::ProvablyInequivalent { entries, .. } if entries.iter().any(|e| e == "|I_l|"));
    r.check("n=s=2: S(0,·) vs LRS inequivalent via |I_l|", via_il, format!("{v:?}"));
    // computed profile of S(0,·) against the LRS closed form
    let tower = build_tower(&FieldSpec::from_q(3, 2, 2)?)?;
    let amb = Ambient::quotient(tower.clone(), default_tuple(tower.k(), 2, 2, DEFAULT_ENUM_CAP)?)?;
    let code = build_code(amb, CodeParams::new(Family::S, 2, Elem::ZERO))?;
    let computed = nuclear_parameters(&code, seed)?.sizes_log_p;
    let lrs = closed_forms(FamilyPoint::Lrs, &pt)[0];
    r.check("n=s=2: computed |I_l| of S(0,·) differs from LRS", computed[1] != lrs[1], format!("{computed:?} vs {lrs:?}"));

    let p1 = Point { s: 1, ..pt };
    for (a, b) in [
        (FamilyPoint::SUntwisted, FamilyPoint::Lrs),
        (FamilyPoint::STwisted { h: None }, FamilyPoint::Atlrs { j: None }),
        (FamilyPoint::D, FamilyPoint::Tz),
    ] {
        let v = novelty_verdict((a, p1), (b, p1))?;
        r.check(format!("s=1: {a:?} vs {b:?} is a family coincidence"), matches!(v, Novelty::SameFamily { .. }), format!("{v:?}"));
    }

    let p3 = Point { p: 3, e: 1, n: 2, s: 3, t: 4, k: 3 };
    for a in [FamilyPoint::SUntwisted, FamilyPoint::STwisted { h: None }] {
        let v = novelty_verdict((a, p3), (FamilyPoint::D, p3))?;
        r.check(
            format!("n ∤ sk (n=2, s=3, k=3): {a:?} vs D inequivalent"),
            matches!(v, Novelty::ProvablyInequivalent { .. }),
            format!("{v:?}"),
        );
    }
    Ok(r)
}

/// One line per criterion: `PASS`/`FAIL`, id, title, time.
pub fn summary_lines(report: &SelftestReport) -> Vec<String> {
    report
        .criteria
        .iter()
        .map(|c| {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let failing: Vec<&str> = c.checks.iter().filter(|k| !k.passed).map(|k| k.name.as_str()).collect();
            let mut line = format!("{status} criterion {:>2}: {} ({} ms, limit {} ms)", c.id, c.title, c.elapsed_ms, c.limit_ms);
            if !failing.is_empty() {
                line.push_str(&format!(" failing: {}", failing.join("; ")));
            }
            line
        })
        .collect()
}
