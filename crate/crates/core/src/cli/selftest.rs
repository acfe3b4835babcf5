//! Property suites over generated curves, each checked against an
//! independent computation. `tropabel selftest` and the acceptance tests
//! both run these.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{self, Sample, Shape};
use crate::cli::format::write_curve;
use crate::curve::{validate, IVec, MarkedPoint, Multiplier, QVec, TropicalCurve};
use crate::exactmath::{
    det, determinantal_divisor, hnf, int, rank_rational, rat, snf, solve_rational, Int, IntMatrix, Rational,
};
use crate::moduli::{
    build_f, count_curves, dual_flag_space, kernel_order_bruteforce, kernel_order_gcstar, BruteforceError,
};
use crate::prelog::{
    assemble_system, betas_from_mus, edge_relation, mus_from_betas, prelog_exists, solve_monomial, verify_assignment,
    verify_system, vertex_residual, MonomialSystem, Solution,
};
use crate::curve::crossings;
use crate::realize::{chi, parity, realizability, sigma_cocycle, sigma_geometric};
use crate::valuegroup::{Alpha, EqualityMode, MulValue, Verdict};

/// How many instances each suite draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sizes {
    pub curves: usize,
    pub offsets: usize,
    pub exact_assignments: usize,
    pub kernel_instances: usize,
    pub triples: usize,
    pub matrices: usize,
}

impl Sizes {
    /// Sizes scaled from a number of generated curves; 50 gives the full run.
    pub fn from_cases(n: usize) -> Sizes {
        let n = n.max(1);
        Sizes {
            curves: n,
            offsets: 3,
            exact_assignments: n.div_ceil(5) * 2,
            kernel_instances: (n * 3).div_ceil(5),
            triples: (n * 3).div_ceil(5),
            matrices: 2 * n,
        }
    }
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes::from_cases(50)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, cases: 0, failures: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    /// A failure with the offending curve attached (only the first one is dumped in full).
    fn fail_with(&mut self, label: &str, curve: &TropicalCurve, msg: String) {
        if self.failures.is_empty() {
            self.failures.push(format!("{label}: {msg}\n{}", write_curve(curve, &[])));
        } else {
            self.failures.push(format!("{label}: {msg}"));
        }
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {} ({} cases", self.name, self.cases);
        if !self.failures.is_empty() {
            s.push_str(&format!(", {} failures", self.failures.len()));
        }
        s.push(')');
        s
    }
}

pub type Suite = fn(u64, &Sizes) -> SuiteResult;

pub const SUITES: [(&str, Suite); 9] = [
    ("sigma-agreement", sigma_agreement),
    ("sigma-invariance", sigma_invariance),
    ("prelog-equivalence", prelog_equivalence),
    ("deformation-ranks", deformation_ranks_suite),
    ("kernel-oracle", kernel_oracle),
    ("count-invariance", count_invariance),
    ("vertex-roundtrip", vertex_roundtrip),
    ("solver-soundness", solver_soundness),
    ("exactmath", exactmath_suite),
];

/// Runs every suite, in parallel, returning results in suite order.
pub fn run_all(seed: u64, sizes: &Sizes) -> Vec<SuiteResult> {
    std::thread::scope(|s| {
        let handles: Vec<_> = SUITES.iter().map(|&(_, f)| s.spawn(move || f(seed, sizes))).collect();
        handles.into_iter().map(|h| h.join().expect("suite panicked")).collect()
    })
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
}

/// The shared family of generated curves.
pub fn generated_curves(seed: u64, n: usize) -> Vec<Sample> {
    catalog::family(&mut rng_for(seed, 0), n)
}

/// An offset with prime denominators, away from the walls.
fn random_offset<R: Rng>(rng: &mut R) -> QVec {
    const PRIMES: [i64; 8] = [7, 11, 13, 17, 19, 23, 29, 31];
    let p = *PRIMES.choose(rng).unwrap();
    let q = *PRIMES.choose(rng).unwrap();
    [rat(rng.gen_range(1..p), p), rat(rng.gen_range(1..q), q)]
}

/// `n` offsets at which the crossing count is well defined.
fn generic_offsets<R: Rng>(rng: &mut R, curve: &TropicalCurve, n: usize) -> Vec<(QVec, MulValue)> {
    let mut out = Vec::new();
    for _ in 0..20 * n {
        if out.len() == n {
            break;
        }
        let off = random_offset(rng);
        if let Ok(s) = sigma_geometric(curve, &off) {
            out.push((off, s));
        }
    }
    out
}

fn multiplier_values(curve: &TropicalCurve) -> Option<BTreeMap<Alpha, MulValue>> {
    Alpha::ALL
        .iter()
        .map(|&a| match curve.lattice.multiplier(a) {
            Multiplier::Formal(v) | Multiplier::Polar(v) => Some((a, v.clone())),
            Multiplier::Numeric(_) => None,
        })
        .collect()
}

/// σ with the lattice's multipliers substituted for the α symbols.
fn sigma_value(curve: &TropicalCurve) -> MulValue {
    let map = multiplier_values(curve).expect("exact or formal multipliers");
    sigma_cocycle(curve).substitute(&map).expect("all four multipliers")
}

fn mode_of(curve: &TropicalCurve) -> EqualityMode {
    curve.lattice.equality_mode(None, crate::valuegroup::DEFAULT_TOLERANCE).expect("matching mode")
}

fn unimodular_with_det<R: Rng>(rng: &mut R, sign: i64) -> [[i64; 2]; 2] {
    let a = catalog::random_unimodular(rng);
    let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if d == sign {
        a
    } else {
        // swap the rows
        [a[1], a[0]]
    }
}

/// `(-1)^parity`, or its negative.
fn parity_target(curve: &TropicalCurve, flip: bool) -> MulValue {
    MulValue::sign(parity(curve) as i64 + i64::from(flip))
}

/// Exact multipliers of the given flavour: 0 random, 1 realizable, 2 anti-realizable.
fn exact_variant<R: Rng>(rng: &mut R, curve: &TropicalCurve, flavour: usize) -> TropicalCurve {
    let mults = match flavour {
        0 => catalog::random_polar_multipliers(rng),
        k => catalog::tuned_multipliers(rng, &sigma_cocycle(curve), &parity_target(curve, k == 2)),
    };
    catalog::with_multipliers(curve, mults)
}

pub fn sigma_agreement(seed: u64, sizes: &Sizes) -> SuiteResult {
    let mut r = SuiteResult::new("sigma-agreement");
    let mut rng = rng_for(seed, 1);
    for s in generated_curves(seed, sizes.curves) {
        let cocycle = sigma_cocycle(&s.curve);
        let offs = generic_offsets(&mut rng, &s.curve, sizes.offsets);
        if offs.len() < sizes.offsets {
            r.fail_with(&s.label, &s.curve, format!("only {} generic offsets found", offs.len()));
        }
        for (off, g) in offs {
            r.cases += 1;
            if g != cocycle {
                r.fail_with(
                    &s.label,
                    &s.curve,
                    format!("offset {}: geometric {g} vs cocycle {cocycle}", crate::realize::fmt_offset(&off)),
                );
            }
        }
    }
    r
}

pub fn sigma_invariance(seed: u64, sizes: &Sizes) -> SuiteResult {
    let mut r = SuiteResult::new("sigma-invariance");
    let mut rng = rng_for(seed, 2);
    for (i, s) in generated_curves(seed, sizes.curves).into_iter().enumerate() {
        let c = if i.is_multiple_of(2) { s.curve.clone() } else { exact_variant(&mut rng, &s.curve, 1 + i % 4 / 2) };
        let sigma = sigma_value(&c);
        let verdict = realizability(&c, &mode_of(&c)).map(|x| x.verdict);

        let moved = c.relift(&catalog::random_moves(&mut rng, &c));
        r.check(sigma_value(&moved) == sigma, || format!("{}: σ changed under relift", s.label));
        let offs = generic_offsets(&mut rng, &moved, 2);
        r.check(offs.len() == 2 && offs[0].1 == offs[1].1, || format!("{}: σ depends on the offset", s.label));
        r.check(realizability(&moved, &mode_of(&moved)).map(|x| x.verdict) == verdict, || {
            format!("{}: verdict changed under relift", s.label)
        });

        for sign in [1, -1] {
            let a = unimodular_with_det(&mut rng, sign);
            let t = match c.transform(a) {
                Ok(t) => t,
                Err(e) => {
                    r.fail_with(&s.label, &c, format!("transform {a:?}: {e}"));
                    continue;
                }
            };
            let expected = sigma.pow_int(sign);
            let got = sigma_value(&t);
            r.check(got == expected, || format!("{}: transform {a:?} gives σ' = {got}, expected {expected}", s.label));
            r.check(realizability(&t, &mode_of(&t)).map(|x| x.verdict) == verdict, || {
                format!("{}: verdict changed under transform {a:?}", s.label)
            });
        }
    }
    r
}

pub fn prelog_equivalence(seed: u64, sizes: &Sizes) -> SuiteResult {
    let mut r = SuiteResult::new("prelog-equivalence");
    let mut rng = rng_for(seed, 3);
    let samples = generated_curves(seed, sizes.curves);
    let compare = |r: &mut SuiteResult, label: &str, c: &TropicalCurve, mode: &EqualityMode| -> Option<Verdict> {
        let real = realizability(c, mode);
        let pre = prelog_exists(c, mode);
        r.cases += 1;
        match (real, pre) {
            (Ok(a), Ok(b)) if a.verdict == b => Some(b),
            (a, b) => {
                r.fail_with(
                    label,
                    c,
                    format!("{} mode: realizability {:?} vs prelog {:?}", mode.kind(), a.map(|x| x.verdict), b),
                );
                None
            }
        }
    };
    for s in &samples {
        compare(&mut r, &s.label, &s.curve, &EqualityMode::Formal);
        let t = s.curve.transform(catalog::random_unimodular(&mut rng)).expect("unimodular");
        compare(&mut r, &format!("{}/transform", s.label), &t, &mode_of(&t));
    }
    // constructive direction: with the vertices inside the domain, each edge
    // row's right-hand side is that edge's wall-crossing character
    for s in &samples {
        let Some((off, _)) = generic_offsets(&mut rng, &s.curve, 1).pop() else { continue };
        let c = s.curve.relift_into_domain(&off);
        let Ok(xs) = crossings(&c, &off) else { continue };
        let delta = c.delta();
        for e in 0..c.edges.len() {
            let geometric = xs
                .iter()
                .filter(|x| x.edge == e)
                .fold(MulValue::one(), |acc, x| acc.mul(&chi(x.side, x.outward, delta).pow_int(x.count as i64)));
            let w = crate::curve::primitive(c.edges[e].m).1;
            let row = edge_relation(&c, e).1.pow(&rat(w, delta));
            r.cases += 1;
            if row != geometric {
                let msg = format!("edge {} row gives {row}, its crossings give {geometric}", c.edges[e].id);
                r.fail_with(&s.label, &c, msg);
            }
        }
    }
    let (mut yes, mut no) = (0, 0);
    for i in 0..sizes.exact_assignments {
        let s = &samples[i % samples.len()];
        let c = exact_variant(&mut rng, &s.curve, i % 3);
        let label = format!("{}/exact{}", s.label, i % 3);
        match compare(&mut r, &label, &c, &mode_of(&c)) {
            Some(Verdict::Yes) => yes += 1,
            Some(Verdict::No) => no += 1,
            _ => {}
        }
        let numeric = c.lattice.equality_mode(Some(crate::valuegroup::ModeKind::Numeric), 1e-9).unwrap();
        compare(&mut r, &format!("{label}/numeric"), &c, &numeric);
    }
    r.notes.push(format!("exact assignments: {yes} realizable, {no} not realizable"));
    if sizes.exact_assignments >= 3 && (yes == 0 || no == 0) {
        r.failures.push(format!("exact assignments did not cover both verdicts ({yes} yes, {no} no)"));
    }
    r
}

/// Catalog and random trivalent curves, relifted, some transformed.
fn trivalent_curves(seed: u64, n: usize) -> Vec<(String, TropicalCurve)> {
    let mut rng = rng_for(seed, 40);
    let mut out: Vec<(String, TropicalCurve)> = vec![
        ("theta".into(), catalog::theta()),
        ("theta2".into(), catalog::theta2()),
        ("theta(2,1)(1,2)".into(), catalog::theta_with([[2, 1], [1, 2], [-3, -3]])),
    ];
    let mut i = 0;
    while out.len() < n {
        let shape = Shape::ALL[i % Shape::ALL.len()];
        let c = catalog::random_curve(&mut rng, shape);
        let c = c.relift(&catalog::random_moves(&mut rng, &c));
        let c = if i % 3 == 0 { c.transform(catalog::random_unimodular(&mut rng)).expect("unimodular") } else { c };
        out.push((format!("{}#{i}", shape.name()), c));
        i += 1;
    }
    out.truncate(n.max(1));
    out
}

fn nullity(m: &IntMatrix) -> usize {
    let rows: Vec<Vec<Rational>> =
        m.to_rows().into_iter().map(|r| r.into_iter().map(Rational::from_integer).collect()).collect();
    let zeros = vec![Rational::zero(); rows.len()];
    if rows.is_empty() {
        return m.cols();
    }
    solve_rational(&rows, &zeros).expect("homogeneous").1.len()
}

pub fn deformation_ranks_suite(seed: u64, sizes: &Sizes) -> SuiteResult {
    let mut r = SuiteResult::new("deformation-ranks");
    for (label, c) in trivalent_curves(seed, sizes.curves) {
        let f = build_f(&c);
        let ker = nullity(&f) as i64;
        let coker = c.edges.len() as i64 - (f.cols() as i64 - ker);
        let nv = c.vertices.len() as i64;
        r.check(ker == c.genus(), || format!("{label}: rk Ker F = {ker}, genus {}", c.genus()));
        r.check(coker == 1, || format!("{label}: rk Coker F = {coker}"));
        r.check(ker - coker == 2 * nv - c.edges.len() as i64, || format!("{label}: rank identity fails"));

        let dual = dual_flag_space(&c);
        r.check(dual.dimension == 1, || format!("{label}: dual space has dimension {}", dual.dimension));
        if dual.dimension != 1 {
            continue;
        }
        let u: BTreeMap<_, _> = dual.generator.iter().cloned().collect();
        let nonzero = u.values().any(|v| !v[0].is_zero() || !v[1].is_zero());
        let perp = c.flags().iter().all(|&fl| {
            let w = c.flag_vector(fl);
            let v = &u[&fl];
            (&v[0] * Int::from(w[0]) + &v[1] * Int::from(w[1])).is_zero()
        });
        let opposite = c.flags().chunks(2).all(|p| {
            let (a, b) = (&u[&p[0]], &u[&p[1]]);
            (&a[0] + &b[0]).is_zero() && (&a[1] + &b[1]).is_zero()
        });
        let balanced = (0..c.vertices.len()).all(|v| {
            let mut s = [Rational::zero(), Rational::zero()];
            for fl in c.flags().iter().filter(|fl| fl.vertex == v) {
                s[0] += &u[fl][0];
                s[1] += &u[fl][1];
            }
            s[0].is_zero() && s[1].is_zero()
        });
        r.check(nonzero && perp && opposite && balanced, || {
            format!("{label}: dual generator fails (nonzero {nonzero}, perp {perp}, opposite {opposite}, balanced {balanced})")
        });
    }
    r
}

/// Genus-2 curves small enough for enumeration.
fn small_instances(seed: u64) -> impl Iterator<Item = (String, TropicalCurve)> {
    let mut rng = rng_for(seed, 50);
    let mut i = 0usize;
    std::iter::from_fn(move || {
        i += 1;
        let c = match i % 3 {
            0 => catalog::random_curve(&mut rng, Shape::Theta),
            1 => {
                let v = |rng: &mut ChaCha8Rng| [rng.gen_range(-2..=2), rng.gen_range(-2..=2)];
                let (a, b) = (v(&mut rng), v(&mut rng));
                let ms: [IVec; 3] = [a, b, [-a[0] - b[0], -a[1] - b[1]]];
                let c = catalog::theta_with(ms);
                if !validate(&c).is_empty() {
                    return Some((format!("skip#{i}"), catalog::theta()));
                }
                c
            }
            _ => catalog::theta2(),
        };
        let c = c.relift(&catalog::random_moves(&mut rng, &c));
        let c = if i.is_multiple_of(2) { c.transform(catalog::random_unimodular(&mut rng)).expect("unimodular") } else { c };
        Some((format!("genus2#{i}"), c))
    })
}

fn two_marks<R: Rng>(rng: &mut R, c: &TropicalCurve) -> Vec<MarkedPoint> {
    if rng.gen_bool(0.7) {
        catalog::random_distinct_marks(rng, c, 2)
    } else {
        let e = rng.gen_range(0..c.edges.len());
        vec![MarkedPoint { edge: e, t: rat(1, 3) }, MarkedPoint { edge: e, t: rat(2, 3) }]
    }
}

pub fn theta_marks() -> Vec<MarkedPoint> {
    vec![MarkedPoint { edge: 0, t: rat(1, 3) }, MarkedPoint { edge: 1, t: rat(1, 2) }]
}

pub fn kernel_oracle(seed: u64, sizes: &Sizes) -> SuiteResult {
    let mut r = SuiteResult::new("kernel-oracle");
    let mut rng = rng_for(seed, 5);
    let compare = |r: &mut SuiteResult, label: &str, c: &TropicalCurve, marks: &[MarkedPoint]| -> Option<Int> {
        let g = kernel_order_gcstar(c, marks).ok()?;
        if g.unknowns > 12 {
            return None;
        }
        match (g.order, kernel_order_bruteforce(c, marks)) {
            (Some(a), Ok(b)) => {
                r.check(a == b, || format!("{label}: Smith form {a}, enumeration {b}"));
                Some(a)
            }
            (None, Err(BruteforceError::RankDeficient)) => None,
            (_, Err(BruteforceError::TooLarge { .. })) => None,
            (a, b) => {
                r.fail_with(label, c, format!("Smith form {a:?}, enumeration {b:?}"));
                None
            }
        }
    };
    for (label, c) in [("theta", catalog::theta()), ("theta2", catalog::theta2())] {
        let k = compare(&mut r, label, &c, &theta_marks());
        r.notes.push(format!("{label}: kernel order {}", k.as_ref().map_or("n/a".into(), |k| k.to_string())));
        r.check(k == Some(int(1)), || format!("{label}: kernel order {k:?}, pinned by enumeration at 1"));
    }
    let mut finite = 0;
    for (label, c) in small_instances(seed).take(40 * sizes.kernel_instances.max(1)) {
        if finite >= sizes.kernel_instances {
            break;
        }
        let marks = two_marks(&mut rng, &c);
        if compare(&mut r, &label, &c, &marks).is_some() {
            finite += 1;
        }
    }
    r.notes.push(format!("{finite} random finite instances"));
    if finite < sizes.kernel_instances {
        r.failures.push(format!("only {finite} finite instances generated"));
    }
    r
}

/// Index of `e` after subdividing edge `split` once.
fn remap_edge(e: usize, split: usize) -> usize {
    if e < split {
        e
    } else {
        e + 1
    }
}

pub fn count_invariance(seed: u64, sizes: &Sizes) -> SuiteResult {
    let mut r = SuiteResult::new("count-invariance");
    let mut rng = rng_for(seed, 6);
    let ones = Alpha::ALL.map(|_| Multiplier::Polar(MulValue::one()));
    for (label, c) in [("theta", catalog::theta()), ("theta2", catalog::theta2())] {
        let c = catalog::with_multipliers(&c, ones.clone());
        let marks = theta_marks();
        let total = count_curves(&c, &marks, &mode_of(&c)).ok().and_then(|x| x.total);
        let oracle = kernel_order_bruteforce(&c, &marks)
            .ok()
            .map(|k| k * crate::moduli::edge_weight_product(&c));
        r.notes.push(format!("{label}: total {}", total.as_ref().map_or("n/a".into(), |t| t.to_string())));
        r.check(total.is_some() && total == oracle, || format!("{label}: total {total:?}, enumeration gives {oracle:?}"));
        let golden = if label == "theta" { int(1) } else { int(8) };
        r.check(total == Some(golden.clone()), || format!("{label}: total {total:?}, golden {golden}"));
    }

    let mut pool: Vec<(String, TropicalCurve)> = trivalent_curves(seed ^ 6, sizes.kernel_instances.max(4));
    pool.extend(small_instances(seed).take(sizes.kernel_instances));
    let mut counted = 0;
    for (label, base) in pool {
        if counted >= sizes.kernel_instances {
            break;
        }
        let c = exact_variant(&mut rng, &base, 1);
        let g = c.genus() as usize;
        if c.edges.len() <= g {
            continue;
        }
        let marks = catalog::random_distinct_marks(&mut rng, &c, g);
        let Ok(rep) = count_curves(&c, &marks, &mode_of(&c)) else { continue };
        let Some(total) = rep.total else { continue };
        counted += 1;

        let marked: Vec<usize> = marks.iter().map(|p| p.edge).collect();
        let free: Vec<usize> = (0..c.edges.len()).filter(|e| !marked.contains(e)).collect();
        let split = *free.choose(&mut rng).expect("an unmarked edge");
        let (sub, _) = c.subdivide(&[MarkedPoint { edge: split, t: rat(1, 2) }]).expect("valid split");
        let sub_marks: Vec<MarkedPoint> =
            marks.iter().map(|p| MarkedPoint { edge: remap_edge(p.edge, split), t: p.t.clone() }).collect();
        let t2 = count_curves(&sub, &sub_marks, &mode_of(&sub)).ok().and_then(|x| x.total);
        r.check(t2.as_ref() == Some(&total), || format!("{label}: total {total} becomes {t2:?} after subdividing"));

        let a = catalog::random_unimodular(&mut rng);
        let tc = c.transform(a).expect("unimodular");
        let t3 = count_curves(&tc, &marks, &mode_of(&tc)).ok().and_then(|x| x.total);
        r.check(t3.as_ref() == Some(&total), || format!("{label}: total {total} becomes {t3:?} under {a:?}"));
    }
    r.notes.push(format!("{counted} rigid realizable instances"));
    if counted < sizes.kernel_instances.min(10) {
        r.failures.push(format!("only {counted} countable instances generated"));
    }
    r
}

fn random_polar<R: Rng>(rng: &mut R) -> MulValue {
    let moduli = [rat(1, 1), rat(2, 1), rat(3, 1), rat(1, 2), rat(5, 3), rat(7, 4)];
    MulValue::polar(moduli.choose(rng).unwrap(), &rat(rng.gen_range(0..24), 24)).expect("positive")
}

/// A balanced triple of weight vectors with weights at most 8.
fn random_triple<R: Rng>(rng: &mut R) -> [IVec; 3] {
    loop {
        let dir = |rng: &mut R| loop {
            let v: IVec = [rng.gen_range(-3..=3), rng.gen_range(-3..=3)];
            if v != [0, 0] && crate::curve::primitive(v).1 == 1 {
                return v;
            }
        };
        let (p1, p2) = (dir(rng), dir(rng));
        let (w1, w2) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let m1 = [w1 * p1[0], w1 * p1[1]];
        let m2 = [w2 * p2[0], w2 * p2[1]];
        let m3 = [-m1[0] - m2[0], -m1[1] - m2[1]];
        if crate::curve::det2(m1, m2) != 0 && crate::curve::primitive(m3).1 <= 8 {
            return [m1, m2, m3];
        }
    }
}

pub fn vertex_roundtrip(seed: u64, sizes: &Sizes) -> SuiteResult {
    let mut r = SuiteResult::new("vertex-roundtrip");
    let mut rng = rng_for(seed, 7);
    let exact = EqualityMode::Exact(BTreeMap::new());
    let no_alpha = BTreeMap::new();
    for i in 0..sizes.triples {
        let ms = random_triple(&mut rng);
        let w = ms.map(|m| crate::curve::primitive(m).1);
        let gamma = num_integer::gcd(num_integer::gcd(w[0], w[1]), w[2]);
        let d = crate::prelog::det_l(&ms);
        let k = w.map(|wi| d / wi);

        // forward
        let (b1, b2) = (random_polar(&mut rng), random_polar(&mut rng));
        let mus = mus_from_betas(&ms, &b1, &b2).expect("nondegenerate");
        let res = vertex_residual(&ms, &mus).expect("nondegenerate");
        r.check(res.is_identity(), || format!("{ms:?}: forward relation residual {res}"));

        // converse on random ν's satisfying the relation
        let (n1, n2) = (random_polar(&mut rng), random_polar(&mut rng));
        let w3p = (w[2] / gamma) as u64;
        let rest = MulValue::sign(d.abs() / gamma).div(&n1.pow_int(w[0] / gamma)).div(&n2.pow_int(w[1] / gamma));
        let n3 = rest.root(w3p).mul(&MulValue::phase(&rat(rng.gen_range(0..w3p as i64), w3p as i64)));
        let nu = [n1, n2, n3];
        let vm = match betas_from_mus(&ms, &nu, &exact) {
            Ok(vm) => vm,
            Err(e) => {
                r.check(false, || format!("{ms:?}: {e}"));
                continue;
            }
        };
        let back = mus_from_betas(&ms, &vm.beta1, &vm.beta2).expect("nondegenerate");
        r.check(back == nu, || format!("{ms:?}: substitution gives {back:?}, expected {nu:?}"));
        let [l, m, n] = vm.lmn;
        let lhs = l * w[0] - m * w[1] + d.signum() * n * gamma;
        r.check(lhs.rem_euclid(w[2]) == 0, || format!("{ms:?}: congruence fails for (l, m, n) = {:?}", vm.lmn));
        r.check(vm.zeta1.div(&vm.zeta2).pow_int(k[2]) == vm.zeta3.inv(), || format!("{ms:?}: ζ relation fails"));
        r.check(
            vm.zeta1.pow_int(k[0]).is_identity() && vm.zeta2.pow_int(k[1]).is_identity(),
            || format!("{ms:?}: ζ₁, ζ₂ are not roots of unity of the right order"),
        );
        if i % 3 == 0 {
            let worst = back
                .iter()
                .zip(&nu)
                .map(|(a, b)| {
                    let (za, zb) = (a.eval_numeric(&no_alpha).unwrap(), b.eval_numeric(&no_alpha).unwrap());
                    (za - zb).norm() / zb.norm().max(1.0)
                })
                .fold(0.0, f64::max);
            r.check(worst <= 1e-9, || format!("{ms:?}: numeric residual {worst:e}"));
        }
    }
    r
}

/// An integer `c` with `w = t^c`, smallest `|c|` first.
fn power_of(w: &MulValue, t: &MulValue) -> Option<i64> {
    (1i64..=12).flat_map(|c| [c, -c]).find(|&c| t.pow_int(c) == *w)
}

pub fn solver_soundness(seed: u64, sizes: &Sizes) -> SuiteResult {
    let mut r = SuiteResult::new("solver-soundness");
    let mut rng = rng_for(seed, 8);
    let samples = generated_curves(seed, sizes.curves);
    for (i, s) in samples.iter().enumerate() {
        let variants = [s.curve.clone(), exact_variant(&mut rng, &s.curve, i % 3)];
        for c in &variants {
            let mode = mode_of(c);
            let system = assemble_system(c).expect("valid curve");
            let sol = match solve_monomial(&system, &mode) {
                Ok(sol) => sol,
                Err(e) => {
                    r.fail_with(&s.label, c, format!("solver error {e}"));
                    continue;
                }
            };
            match sol {
                Solution::Feasible { assignment, .. } => {
                    let ok = verify_assignment(c, &assignment, &mode).map(|v| v.passed).unwrap_or(false);
                    r.check(ok, || format!("{}: solution fails verification", s.label));
                }
                Solution::Infeasible { witnesses } => {
                    let target = sigma_cocycle(c).mul(&MulValue::sign(parity(c) as i64));
                    let target = match &mode {
                        EqualityMode::Exact(v) => target.substitute(v).expect("assigned"),
                        _ => target,
                    };
                    let verdict = realizability(c, &mode).map(|x| x.verdict).ok();
                    r.check(verdict == Some(Verdict::No), || format!("{}: infeasible but verdict {verdict:?}", s.label));
                    for w in &witnesses {
                        let nontrivial = w.is_one(&mode).map(|d| d.verdict == Verdict::No).unwrap_or(false);
                        r.check(nontrivial, || format!("{}: witness {w} is trivial", s.label));
                        let c = power_of(w, &target);
                        r.check(matches!(c, Some(1 | -1)), || {
                            format!("{}: witness {w} is not σ·(-1)^parity = {target} up to inversion", s.label)
                        });
                    }
                }
                Solution::Undecided { certificate } => {
                    r.fail_with(&s.label, c, format!("undecided in exact arithmetic: {certificate}"));
                }
            }
        }
    }
    // random small systems with random exact right-hand sides
    for _ in 0..sizes.curves {
        let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let a = IntMatrix::from_i64(
            &(0..m).map(|_| (0..n).map(|_| rng.gen_range(-4..=4)).collect()).collect::<Vec<Vec<i64>>>(),
        );
        let b: Vec<MulValue> = (0..m)
            .map(|_| if rng.gen_bool(0.5) { MulValue::one() } else { random_polar(&mut rng) })
            .collect();
        let system = MonomialSystem::new(a.clone(), b);
        match solve_monomial(&system, &EqualityMode::Formal) {
            Ok(Solution::Feasible { assignment, .. }) => {
                let ok = verify_system(&system, &assignment, &EqualityMode::Formal).map(|v| v.passed).unwrap_or(false);
                r.check(ok, || format!("system {:?}: solution fails verification", a.to_rows()));
            }
            Ok(Solution::Infeasible { witnesses }) => {
                r.check(!witnesses.is_empty() && witnesses.iter().all(|w| !w.is_identity()), || {
                    format!("system {:?}: empty or trivial witness", a.to_rows())
                });
            }
            other => r.check(false, || format!("system {:?}: {other:?}", a.to_rows())),
        }
    }
    r
}

fn random_matrix<R: Rng>(rng: &mut R) -> IntMatrix {
    let (m, n) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
    let entry = |rng: &mut R| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(-20..=20) };
    if rng.gen_bool(0.25) && m > 1 && n > 1 {
        // low rank: product of thin factors, entries clipped to the range
        let k = rng.gen_range(1..m.min(n));
        let x: Vec<Vec<i64>> = (0..m).map(|_| (0..k).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        let y: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        let rows: Vec<Vec<i64>> =
            (0..m).map(|i| (0..n).map(|j| (0..k).map(|l| x[i][l] * y[l][j]).sum::<i64>().clamp(-20, 20)).collect()).collect();
        return IntMatrix::from_i64(&rows);
    }
    IntMatrix::from_i64(&(0..m).map(|_| (0..n).map(|_| entry(rng)).collect()).collect::<Vec<Vec<i64>>>())
}

fn is_unimodular(u: &IntMatrix) -> bool {
    det(u).abs() == int(1)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn exactmath_suite(seed: u64, sizes: &Sizes) -> SuiteResult {
    let mut r = SuiteResult::new("exactmath");
    let mut rng = rng_for(seed, 9);
    for _ in 0..sizes.matrices {
        let a = random_matrix(&mut rng);
        let shape = format!("{}x{}", a.rows(), a.cols());
        let f = snf(&a);
        r.check(f.u.mul(&a).mul(&f.v) == f.s, || format!("{shape}: U·A·V ≠ S for {:?}", a.to_rows()));
        r.check(is_unimodular(&f.u) && is_unimodular(&f.v), || format!("{shape}: Smith transforms not unimodular"));
        let d = f.invariant_factors();
        let diagonal = (0..f.s.rows())
            .all(|i| (0..f.s.cols()).all(|j| i == j || f.s[(i, j)].is_zero()))
            && (d.len()..f.s.rows().min(f.s.cols())).all(|i| f.s[(i, i)].is_zero());
        let chain = d.iter().all(|x| x.is_positive()) && d.windows(2).all(|w| (&w[1] % &w[0]).is_zero());
        r.check(diagonal && chain, || format!("{shape}: S is not a Smith form: {:?}", f.s.to_rows()));
        r.check(d.len() == rank_rational(&a), || format!("{shape}: Smith rank differs from rational rank"));

        let (h, u) = hnf(&a);
        r.check(u.mul(&a) == h && is_unimodular(&u), || format!("{shape}: U·A ≠ H"));
        r.check(is_hermite(&h), || format!("{shape}: not in Hermite form: {:?}", h.to_rows()));

        let rank = d.len();
        let small = a.rows().min(a.cols()) <= 5;
        let mut prefix = int(1);
        for k in 1..=rank {
            prefix *= &d[k - 1];
            let affordable = binomial(a.rows(), k) * binomial(a.cols(), k) <= 60_000;
            if (small || k <= 2 || k == rank) && affordable {
                let dk = determinantal_divisor(&a, k);
                r.check(dk == prefix, || format!("{shape}: D_{k} = {dk}, product of invariant factors {prefix}"));
            }
        }
    }
    r
}

fn is_hermite(h: &IntMatrix) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero = false;
    for i in 0..h.rows() {
        let Some(p) = (0..h.cols()).find(|&j| !h[(i, j)].is_zero()) else {
            seen_zero = true;
            continue;
        };
        if seen_zero || last_pivot.is_some_and(|q| p <= q) || !h[(i, p)].is_positive() {
            return false;
        }
        if !(0..i).all(|k| !h[(k, p)].is_negative() && h[(k, p)] < h[(i, p)]) {
            return false;
        }
        last_pivot = Some(p);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoke_run_passes() {
        let sizes = Sizes::from_cases(3);
        for res in run_all(11, &sizes) {
            assert!(res.passed(), "{}\n{}", res.line(), res.failures.join("\n"));
        }
    }

    #[test]
    fn sizes_scale() {
        let s = Sizes::default();
        assert_eq!((s.curves, s.exact_assignments, s.kernel_instances, s.triples, s.matrices), (50, 20, 30, 30, 100));
    }
}
