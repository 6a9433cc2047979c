//! Nuclear parameters: left and right idealizers, centralizer and center of a
//! code in `R/RH(x^n)`, computed as `F_p`-kernels, with the closed forms of the
//! S and D families and of the known LRS, ATLRS and TZ-type families.

use crate::codes::{Code, Family};
use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::linalg::{Echelon, Matrix};
use crate::quotient::{QuotCtx, QuotElem};
use crate::skew::SkewPoly;
use num_integer::gcd;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubringKind {
    /// `{g : gC ⊆ C}`.
    Il,
    /// `{g : Cg ⊆ C}`.
    Ir,
    /// `{g : ga = ag for all a ∈ C}`.
    Cen,
    /// `Il ∩ Cen`.
    Z,
}

/// An `F_p`-subspace of the quotient with a basis of witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subring {
    pub kind: SubringKind,
    pub basis: Vec<QuotElem>,
}

impl Subring {
    pub fn log_size(&self) -> usize {
        self.basis.len()
    }
}

fn quot(code: &Code) -> Result<&QuotCtx> {
    code.quotient()
        .ok_or_else(|| Error::Precondition("nuclear parameters need the quotient form".into()))
}

/// Rows `y` with `y·c = 0` for every `c` in the span.
fn annihilator(ctx: &QuotCtx, gens: &[QuotElem]) -> Vec<Vec<Elem>> {
    let n = ctx.fp_dim();
    if gens.is_empty() {
        return Matrix::identity(n).to_rows();
    }
    let rows: Vec<Vec<Elem>> = gens.iter().map(|g| ctx.to_fp(g)).collect();
    Matrix::from_rows(&rows).kernel(ctx.prime())
}

fn stack(rows: &mut Vec<Vec<Elem>>, m: &Matrix) {
    rows.extend(m.to_rows());
}

fn kernel_elems(ctx: &QuotCtx, rows: Vec<Vec<Elem>>) -> Vec<QuotElem> {
    let n = ctx.fp_dim();
    if rows.is_empty() {
        return (0..n).map(|i| ctx.fp_basis(i)).collect();
    }
    Matrix::from_rows(&rows).kernel(ctx.prime()).iter().map(|v| ctx.from_fp(v)).collect()
}

/// The requested subring of the span of `gens`, as the kernel of an `F_p`-system.
pub fn subring_of(ctx: &QuotCtx, gens: &[QuotElem], kind: SubringKind) -> Result<Subring> {
    let fp = ctx.prime();
    if matches!(kind, SubringKind::Cen | SubringKind::Z) && !contains(ctx, gens, &SkewPoly::one()) {
        return Err(Error::Precondition("centralizer and center need a code containing 1".into()));
    }
    let ann = if matches!(kind, SubringKind::Cen) { Vec::new() } else { annihilator(ctx, gens) };
    let y = if ann.is_empty() { None } else { Some(Matrix::from_rows(&ann)) };
    let mut rows = Vec::new();
    for a in gens {
        let left = ctx.mult_matrix(a, true);
        let right = ctx.mult_matrix(a, false);
        if let Some(y) = &y {
            match kind {
                // g·a = R_a g must lie in C
                SubringKind::Il | SubringKind::Z => stack(&mut rows, &y.mul(fp, &right)),
                SubringKind::Ir => stack(&mut rows, &y.mul(fp, &left)),
                SubringKind::Cen => {}
            }
        }
        if matches!(kind, SubringKind::Cen | SubringKind::Z) {
            stack(&mut rows, &right.sub(fp, &left));
        }
    }
    rows.retain(|r| r.iter().any(|c| !c.is_zero()));
    Ok(Subring { kind, basis: kernel_elems(ctx, rows) })
}

pub fn subring_invariant(code: &Code, kind: SubringKind) -> Result<Subring> {
    subring_of(quot(code)?, &code.basis, kind)
}

/// Membership in the `F_p`-span.
pub fn contains(ctx: &QuotCtx, gens: &[QuotElem], a: &QuotElem) -> bool {
    let fp = ctx.prime();
    let mut ech = Echelon::new();
    for g in gens {
        let _ = ech.insert(fp, &ctx.to_fp(g));
    }
    ech.contains(fp, &ctx.to_fp(a))
}

/// Checks that a subring basis contains 1 and is closed under multiplication.
pub fn verify_subring(ctx: &QuotCtx, ring: &Subring) -> bool {
    contains(ctx, &ring.basis, &SkewPoly::one())
        && ring
            .basis
            .iter()
            .all(|a| ring.basis.iter().all(|b| contains(ctx, &ring.basis, &ctx.mul(a, b))))
}

/// `C' = C·w^{-1}` for a full-weight codeword `w`.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub gens: Vec<QuotElem>,
    /// The full-weight codeword used, `None` when `1 ∈ C` already.
    pub unit: Option<QuotElem>,
    pub unit_inverse: Option<QuotElem>,
    pub attempts: u64,
}

/// Search budget for a full-weight codeword.
pub const UNIT_SEARCH_BUDGET: u64 = 1 << 14;

/// Moves the code onto an equivalent one containing 1.
pub fn normalize_unital(code: &Code, seed: u64) -> Result<Normalized> {
    let ctx = quot(code)?;
    if contains(ctx, &code.basis, &SkewPoly::one()) {
        return Ok(Normalized { gens: code.basis.clone(), unit: None, unit_inverse: None, attempts: 0 });
    }
    let full = ctx.t() * ctx.n();
    let p = code.p();
    let dim = code.basis.len();
    let mut attempts = 0u64;
    // basis elements first, then small combinations, then random ones
    let mut candidates: Vec<Vec<u32>> = (0..dim)
        .map(|i| {
            let mut c = vec![0; dim];
            c[i] = 1;
            c
        })
        .collect();
    for i in 0..dim {
        for j in i + 1..dim {
            let mut c = vec![0; dim];
            c[i] = 1;
            c[j] = 1;
            candidates.push(c);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while attempts < UNIT_SEARCH_BUDGET {
        let coords = if (attempts as usize) < candidates.len() {
            candidates[attempts as usize].clone()
        } else {
            (0..dim).map(|_| rand::Rng::gen_range(&mut rng, 0..p)).collect()
        };
        attempts += 1;
        let w = code.combine(&coords);
        if w.is_zero() || ctx.f_weight(&w) != full {
            continue;
        }
        let winv = ctx.invert_unit(&w)?;
        let gens = code.basis.iter().map(|b| ctx.mul(b, &winv)).collect();
        return Ok(Normalized { gens, unit: Some(w), unit_inverse: Some(winv), attempts });
    }
    Err(Error::BudgetExhausted { attempts, seed })
}

/// Closed-form hypotheses: `ks > 2` (S) or `ks ≥ 2` (D), and `k ≤ tn/2`.
pub fn hypotheses_met(family: Family, n: usize, s: usize, t: usize, k: usize) -> bool {
    let ks = k * s;
    let size_ok = 2 * k <= t * n;
    match family {
        Family::S => ks > 2 && size_ok,
        Family::D => ks >= 2 && size_ok,
        _ => false,
    }
}

/// Parameters of a family point in `⊕_t M_n(F_{q^s})`, `q = p^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub p: u32,
    pub e: u32,
    pub n: u32,
    pub s: u32,
    pub t: u32,
    pub k: u32,
}

/// A family with its twist data, for closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyPoint {
    /// `S(0, ·)`.
    SUntwisted,
    /// `S(η ≠ 0, ρ = p^h)`; `None` ranges over every `h < ne`.
    STwisted { h: Option<u32> },
    D,
    Lrs,
    /// Additive twisted LRS with `ρ = p^j`; `None` ranges over every `j < nes`.
    Atlrs { j: Option<u32> },
    /// TZ-type twisted LRS.
    Tz,
}

/// `log_p` of `(|C|, |Il|, |Ir|, |Cen|, |Z|)`.
pub type Profile = [u32; 5];

/// All closed-form profiles of a family point (several when a parameter is free).
pub fn closed_forms(fam: FamilyPoint, pt: &Point) -> Vec<Profile> {
    let Point { e, n, s, t, k, .. } = *pt;
    let size = e * n * s * k;
    let cen = e * t * s;
    match fam {
        FamilyPoint::SUntwisted => vec![[size, n * e, n * e, cen, e]],
        FamilyPoint::STwisted { h } => {
            let hs: Vec<u32> = match h {
                Some(h) => vec![h],
                None => (0..n * e).collect(),
            };
            hs.into_iter()
                .map(|h| [size, gcd(n * e, h), gcd(n * e, k * e * s + n * e - h % (n * e)), cen, gcd(e, h)])
                .collect()
        }
        FamilyPoint::D => vec![[size, n * e / 2, n * e / 2, cen, e]],
        FamilyPoint::Lrs => vec![[size, n * e * s, n * e * s, cen, e * s]],
        FamilyPoint::Atlrs { j } => {
            let nes = n * e * s;
            let js: Vec<u32> = match j {
                Some(j) => vec![j],
                None => (0..nes).collect(),
            };
            js.into_iter()
                .map(|j| [size, gcd(nes, j), gcd(nes, k * e * s + nes - j % nes), cen, gcd(e * s, j)])
                .collect()
        }
        FamilyPoint::Tz => vec![[size, n * e * s / 2, n * e * s / 2, cen, e * s]],
    }
}

/// Computed nuclear parameters.
#[derive(Clone, Debug)]
pub struct NuclearProfile {
    pub sizes_log_p: Profile,
    pub hypotheses_met: bool,
    /// Closed form for the code's family, when one applies.
    pub closed_form: Option<Profile>,
    pub closed_form_match: Option<bool>,
    pub il: Subring,
    pub ir: Subring,
    pub cen: Subring,
    pub z: Subring,
    pub normalized: Normalized,
}

/// The family point of a built code.
pub fn family_point(code: &Code) -> Option<(FamilyPoint, Point)> {
    let ctx = code.quotient()?;
    let tw = ctx.tower();
    let pt = Point {
        p: tw.p(),
        e: tw.e(),
        n: tw.n(),
        s: tw.s(),
        t: ctx.t() as u32,
        k: code.params.k as u32,
    };
    let fam = match code.params.family {
        Family::S if code.params.twist.is_zero() => FamilyPoint::SUntwisted,
        Family::S => FamilyPoint::STwisted { h: Some(code.params.h) },
        Family::D => FamilyPoint::D,
        _ => return None,
    };
    Some((fam, pt))
}

pub fn nuclear_parameters(code: &Code, seed: u64) -> Result<NuclearProfile> {
    let ctx = quot(code)?;
    let il = subring_invariant(code, SubringKind::Il)?;
    let ir = subring_invariant(code, SubringKind::Ir)?;
    let normalized = normalize_unital(code, seed)?;
    let cen = subring_of(ctx, &normalized.gens, SubringKind::Cen)?;
    let z = subring_of(ctx, &normalized.gens, SubringKind::Z)?;
    let sizes_log_p = [
        code.log_size() as u32,
        il.log_size() as u32,
        ir.log_size() as u32,
        cen.log_size() as u32,
        z.log_size() as u32,
    ];
    let (closed_form, hyp) = match family_point(code) {
        Some((fam, pt)) => (
            closed_forms(fam, &pt).first().copied(),
            hypotheses_met(code.params.family, pt.n as usize, pt.s as usize, pt.t as usize, pt.k as usize),
        ),
        None => (None, false),
    };
    let closed_form_match = closed_form.map(|c| c == sizes_log_p);
    Ok(NuclearProfile { sizes_log_p, hypotheses_met: hyp, closed_form, closed_form_match, il, ir, cen, z, normalized })
}

/// Outcome of comparing two family points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Novelty {
    /// Every admissible pair of profiles differs; equivalence here excludes
    /// transpositions of blocks.
    ProvablyInequivalent { entries: Vec<String>, fast_path: Option<String> },
    /// At `s = 1` the two descriptions are the same family.
    SameFamily { reason: String },
    Inconclusive,
}

const ENTRY: [&str; 5] = ["|C|", "|I_l|", "|I_r|", "|Cen|", "|Z|"];

/// Compares the nuclear profiles of two points in the same ambient space.
pub fn novelty_verdict(a: (FamilyPoint, Point), b: (FamilyPoint, Point)) -> Result<Novelty> {
    let (fa, pa) = a;
    let (fb, pb) = b;
    if (pa.p, pa.e, pa.n, pa.s, pa.t) != (pb.p, pb.e, pb.n, pb.s, pb.t) {
        return Err(Error::InvalidArgument("the two points live in different ambient spaces".into()));
    }
    let ours = |f: FamilyPoint| matches!(f, FamilyPoint::SUntwisted | FamilyPoint::STwisted { .. } | FamilyPoint::D);
    if pa.s == 1 && ours(fa) != ours(fb) {
        let (o, known) = if ours(fa) { (fa, fb) } else { (fb, fa) };
        let matched = matches!(
            (o, known),
            (FamilyPoint::SUntwisted, FamilyPoint::Lrs)
                | (FamilyPoint::STwisted { .. }, FamilyPoint::Atlrs { .. })
                | (FamilyPoint::D, FamilyPoint::Tz)
        );
        if matched {
            return Ok(Novelty::SameFamily {
                reason: format!("with s = 1 the {o:?} codes are the {known:?} codes"),
            });
        }
    }
    let fast_path = fast_path(fa, fb, &pa);
    let la = closed_forms(fa, &pa);
    let lb = closed_forms(fb, &pb);
    let mut entries = std::collections::BTreeSet::new();
    for x in &la {
        for y in &lb {
            match (0..5).find(|&i| x[i] != y[i]) {
                Some(i) => {
                    entries.insert(ENTRY[i].to_string());
                }
                None => return Ok(Novelty::Inconclusive),
            }
        }
    }
    Ok(Novelty::ProvablyInequivalent { entries: entries.into_iter().collect(), fast_path })
}

fn fast_path(fa: FamilyPoint, fb: FamilyPoint, pt: &Point) -> Option<String> {
    let g = gcd(pt.n, pt.s);
    let known = |f: FamilyPoint| matches!(f, FamilyPoint::Lrs | FamilyPoint::Atlrs { .. } | FamilyPoint::Tz);
    let pair = |x: FamilyPoint, y: FamilyPoint| (x, y);
    for (x, y) in [pair(fa, fb), pair(fb, fa)] {
        match x {
            FamilyPoint::SUntwisted if known(y) && g > 1 && pt.s >= 2 => return Some("gcd(n,s) > 1".into()),
            FamilyPoint::STwisted { .. } if known(y) && !pt.e.is_multiple_of(g) => return Some("gcd(n,s) does not divide e".into()),
            FamilyPoint::D if known(y) && pt.s >= 3 && g > 1 => return Some("gcd(n,s) > 1 with s ≥ 3".into()),
            FamilyPoint::STwisted { .. } if y == FamilyPoint::D && !(pt.s * pt.k).is_multiple_of(pt.n) => {
                return Some("n does not divide sk".into())
            }
            _ => {}
        }
    }
    None
}

/// `log_p` sizes of `(C, Il, Ir, Cen, Z)` of an arbitrary subspace containing a unit.
pub fn profile_of_span(ctx: &QuotCtx, gens: &[QuotElem]) -> Result<Profile> {
    let dim = {
        let mut ech = Echelon::new();
        for g in gens {
            let _ = ech.insert(ctx.prime(), &ctx.to_fp(g));
        }
        ech.dim()
    };
    let il = subring_of(ctx, gens, SubringKind::Il)?;
    let ir = subring_of(ctx, gens, SubringKind::Ir)?;
    let cen = subring_of(ctx, gens, SubringKind::Cen)?;
    let z = subring_of(ctx, gens, SubringKind::Z)?;
    Ok([dim as u32, il.log_size() as u32, ir.log_size() as u32, cen.log_size() as u32, z.log_size() as u32])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::AdmissibleTuple;
    use crate::codes::{build_code, Ambient, CodeParams};
    use crate::ftower::{build_tower, FieldSpec};
    use crate::poly::Poly;

    fn p(c: &[u32]) -> Poly {
        Poly::new(c.iter().map(|&x| Elem(x)).collect())
    }

    fn amb_3222() -> Ambient {
        let tower = build_tower(&FieldSpec::from_q(3, 2, 2).unwrap()).unwrap();
        let k = tower.k().clone();
        Ambient::quotient(tower, AdmissibleTuple::new(&k, vec![p(&[2, 1, 1]), p(&[2, 2, 1])])).unwrap()
    }

    #[test]
    fn full_space_subrings_are_everything() {
        let amb = amb_3222();
        let Ambient::Quotient(ctx) = &amb else { unreachable!() };
        let all: Vec<QuotElem> = (0..ctx.fp_dim()).map(|i| ctx.fp_basis(i)).collect();
        let n = ctx.fp_dim() as u32;
        // the center of ⊕ M_2(F_9)^2 is F_9^2, so Cen(all) = Z(all) has size 3^4
        assert_eq!(profile_of_span(ctx, &all).unwrap(), [n, n, n, 4, 4]);
    }

    #[test]
    fn untwisted_profile_matches_closed_form() {
        let amb = amb_3222();
        let code = build_code(amb, CodeParams::new(Family::S, 2, Elem::ZERO)).unwrap();
        let prof = nuclear_parameters(&code, 1).unwrap();
        assert_eq!(prof.sizes_log_p, [8, 2, 2, 4, 1]);
        assert_eq!(prof.closed_form_match, Some(true));
        assert!(prof.hypotheses_met);
        assert!(prof.normalized.unit.is_none());
        let ctx = code.quotient().unwrap();
        for r in [&prof.il, &prof.ir, &prof.cen, &prof.z] {
            assert!(verify_subring(ctx, r));
        }
    }

    #[test]
    fn twisted_profiles_match_closed_forms() {
        let amb = amb_3222();
        for h in 0..2 {
            let code = build_code(amb.clone(), CodeParams::new(Family::S, 2, Elem(3)).with_h(h)).unwrap();
            let prof = nuclear_parameters(&code, 1).unwrap();
            assert_eq!(Some(prof.sizes_log_p), prof.closed_form, "h = {h}");
            let ctx = code.quotient().unwrap();
            let w = prof.normalized.unit.clone().unwrap();
            // unit right-multiplication keeps the idealizer sizes
            let il2 = subring_of(ctx, &prof.normalized.gens, SubringKind::Il).unwrap();
            let ir2 = subring_of(ctx, &prof.normalized.gens, SubringKind::Ir).unwrap();
            assert_eq!((il2.log_size(), ir2.log_size()), (prof.il.log_size(), prof.ir.log_size()));
            assert_eq!(ctx.f_weight(&w), 4);
            assert!(contains(ctx, &prof.normalized.gens, &SkewPoly::one()));
        }
    }

    #[test]
    fn d_family_idealizers() {
        let tower = build_tower(&FieldSpec::from_q(3, 2, 1).unwrap()).unwrap();
        let k = tower.k().clone();
        let amb = Ambient::quotient(tower.clone(), AdmissibleTuple::new(&k, vec![p(&[1, 1]), p(&[2, 1])])).unwrap();
        for g in tower.l().elements().skip(1) {
            let code = build_code(amb.clone(), CodeParams::new(Family::D, 2, g)).unwrap();
            let prof = nuclear_parameters(&code, 1).unwrap();
            assert_eq!(prof.sizes_log_p[1..3], [1, 1]);
        }
    }

    #[test]
    fn cen_requires_unit() {
        let amb = amb_3222();
        let code = build_code(amb, CodeParams::new(Family::S, 2, Elem(3))).unwrap();
        assert!(matches!(subring_invariant(&code, SubringKind::Cen), Err(Error::Precondition(_))));
    }

    #[test]
    fn novelty_examples() {
        let pt = Point { p: 3, e: 1, n: 2, s: 2, t: 2, k: 2 };
        let v = novelty_verdict((FamilyPoint::SUntwisted, pt), (FamilyPoint::Lrs, pt)).unwrap();
        assert!(matches!(&v, Novelty::ProvablyInequivalent { entries, .. } if entries.contains(&"|I_l|".to_string())));
        let p1 = Point { s: 1, ..pt };
        assert!(matches!(
            novelty_verdict((FamilyPoint::STwisted { h: None }, p1), (FamilyPoint::Atlrs { j: None }, p1)).unwrap(),
            Novelty::SameFamily { .. }
        ));
        let p3 = Point { p: 3, e: 1, n: 2, s: 3, t: 4, k: 3 };
        assert!(matches!(
            novelty_verdict((FamilyPoint::STwisted { h: None }, p3), (FamilyPoint::D, p3)).unwrap(),
            Novelty::ProvablyInequivalent { fast_path: Some(_), .. }
        ));
        // identical points cannot be separated
        assert_eq!(novelty_verdict((FamilyPoint::D, pt), (FamilyPoint::D, pt)).unwrap(), Novelty::Inconclusive);
        assert!(novelty_verdict((FamilyPoint::D, pt), (FamilyPoint::D, p3)).is_err());
    }
}
