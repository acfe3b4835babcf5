//! Named example curves and seeded random generators.

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::curve::{validate, Edge, IVec, MarkedPoint, Multiplier, PeriodLattice, TropicalCurve, Vertex};
use crate::exactmath::{rat, solve_rational, Int, Rational};
use crate::valuegroup::{Alpha, MulValue};

fn q(n: i64, d: i64) -> Rational {
    rat(n, d)
}

fn vertex(id: &str, x: Rational, y: Rational) -> Vertex {
    Vertex { id: id.to_string(), pos: [x, y] }
}

fn edge(id: &str, tail: usize, head: usize, m: IVec, length: Rational, shift: IVec) -> Edge {
    Edge { id: id.to_string(), tail, head, m, length, shift }
}

/// The running genus-2 example: two trivalent vertices joined by three edges.
pub fn theta() -> TropicalCurve {
    TropicalCurve {
        lattice: PeriodLattice::formal([1, -1], [1, 2]),
        vertices: vec![vertex("u", q(0, 1), q(0, 1)), vertex("v", q(1, 1), q(0, 1))],
        edges: vec![
            edge("e1", 0, 1, [1, 0], q(1, 1), [0, 0]),
            edge("e2", 0, 1, [0, 1], q(1, 1), [1, 0]),
            edge("e3", 0, 1, [-1, -1], q(1, 1), [1, 1]),
        ],
    }
}

/// [`theta`] with weight vectors doubled and lengths halved.
pub fn theta2() -> TropicalCurve {
    theta().scale_weights(2)
}

/// Two vertices joined by edges with weight vectors `ms` (summing to zero),
/// all of length 1, on the lattice spanned by `m₁ - m₂` and `m₁ - m₃`.
pub fn theta_with(ms: [IVec; 3]) -> TropicalCurve {
    let [m1, m2, m3] = ms;
    let sub = |a: IVec, b: IVec| [a[0] - b[0], a[1] - b[1]];
    TropicalCurve {
        lattice: PeriodLattice::formal(sub(m1, m2), sub(m1, m3)),
        vertices: vec![
            vertex("u", q(0, 1), q(0, 1)),
            vertex("v", Rational::from_integer(m1[0].into()), Rational::from_integer(m1[1].into())),
        ],
        edges: vec![
            edge("e1", 0, 1, m1, q(1, 1), [0, 0]),
            edge("e2", 0, 1, m2, q(1, 1), [1, 0]),
            edge("e3", 0, 1, m3, q(1, 1), [0, 1]),
        ],
    }
}

/// A horizontal closed geodesic on the square torus, split into four
/// 2-valent pieces; it wraps once in the `λ₁` direction.
pub fn cycle() -> TropicalCurve {
    let half = q(1, 2);
    TropicalCurve {
        lattice: PeriodLattice::formal([1, 0], [0, 1]),
        vertices: (0..4).map(|i| vertex(&format!("c{i}"), q(i, 4), half.clone())).collect(),
        edges: (0..4)
            .map(|i| edge(&format!("f{i}"), i, (i + 1) % 4, [1, 0], q(1, 4), if i == 3 { [-1, 0] } else { [0, 0] }))
            .collect(),
    }
}

/// Trivalent graph shapes used by the random generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Theta,
    K4,
    Prism,
    K33,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::Theta, Shape::K4, Shape::Prism, Shape::K33];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Theta => "theta",
            Shape::K4 => "k4",
            Shape::Prism => "prism",
            Shape::K33 => "k33",
        }
    }

    /// Vertex count and oriented edge list.
    pub fn graph(self) -> (usize, Vec<(usize, usize)>) {
        match self {
            Shape::Theta => (2, vec![(0, 1), (0, 1), (0, 1)]),
            Shape::K4 => (4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            Shape::Prism => (6, vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]),
            Shape::K33 => (
                6,
                vec![(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
            ),
        }
    }
}

/// Signed edge incidence vectors of a cycle basis (one cycle per non-tree edge).
fn cycle_basis(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    // BFS tree from vertex 0
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = vec![0];
    seen[0] = true;
    let mut tree = vec![false; edges.len()];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for (k, &(a, b)) in edges.iter().enumerate() {
            let w = if a == v { b } else if b == v { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, k));
                tree[k] = true;
                order.push(w);
            }
        }
    }
    // path from root to v as signed edge incidence (+1 when traversed tail to head)
    let root_path = |mut v: usize| {
        let mut c = vec![0i64; edges.len()];
        while let Some((p, k)) = parent[v] {
            c[k] += if edges[k] == (p, v) { 1 } else { -1 };
            v = p;
        }
        c
    };
    let mut out = Vec::new();
    for (k, &(a, b)) in edges.iter().enumerate() {
        if tree[k] {
            continue;
        }
        // root -> a, then a -> b along k, then b -> root
        let pa = root_path(a);
        let pb = root_path(b);
        let mut c: Vec<i64> = pa.iter().zip(&pb).map(|(x, y)| x - y).collect();
        c[k] += 1;
        out.push(c);
    }
    out
}

/// Random balanced curve on the given shape, or `None` if the random
/// choices did not produce positive lengths and a nondegenerate lattice.
pub fn try_random_curve<R: Rng>(rng: &mut R, shape: Shape) -> Option<TropicalCurve> {
    let (n, graph) = shape.graph();
    let ne = graph.len();
    let cycles = cycle_basis(n, &graph);

    // balanced weights: combinations of cycle flows
    let mut m = vec![[0i64; 2]; ne];
    for c in &cycles {
        let coef = [rng.gen_range(-2..=2), rng.gen_range(-2..=2)];
        for (e, &s) in c.iter().enumerate() {
            m[e][0] += s * coef[0];
            m[e][1] += s * coef[1];
        }
    }
    if m.contains(&[0, 0]) {
        return None;
    }
    let shifts: Vec<IVec> = (0..ne).map(|_| [rng.gen_range(-1..=1), rng.gen_range(-1..=1)]).collect();

    // unknowns: x_1..x_{n-1} (2 each), lengths (ne), λ₁, λ₂ (4); x_0 = 0
    let nx = 2 * (n - 1);
    let cols = nx + ne + 4;
    let mut a = Vec::new();
    for (e, &(t, h)) in graph.iter().enumerate() {
        for k in 0..2 {
            let mut row = vec![Rational::zero(); cols];
            if h > 0 {
                row[2 * (h - 1) + k] += Rational::one();
            }
            if t > 0 {
                row[2 * (t - 1) + k] -= Rational::one();
            }
            row[nx + e] = Rational::from_integer((-m[e][k]).into());
            row[nx + ne + k] = Rational::from_integer((-shifts[e][0]).into());
            row[nx + ne + 2 + k] = Rational::from_integer((-shifts[e][1]).into());
            a.push(row);
        }
    }
    let b = vec![Rational::zero(); a.len()];
    let (_, kernel) = solve_rational(&a, &b)?;
    if kernel.is_empty() {
        return None;
    }
    let coeffs = positive_combination(rng, &kernel, nx..nx + ne)?;
    for _ in 0..20 {
        let mut x = vec![Rational::zero(); cols];
        for (k, &c0) in kernel.iter().zip(&coeffs) {
            let c = Rational::from_integer((c0 + rng.gen_range(-2i64..=2)).into());
            for (xi, ki) in x.iter_mut().zip(k) {
                *xi += &c * ki;
            }
        }
        if !x[nx..nx + ne].iter().all(Signed::is_positive) {
            continue;
        }
        let lam = &x[nx + ne..];
        let det = &lam[0] * &lam[3] - &lam[1] * &lam[2];
        if det.is_zero() {
            continue;
        }
        // scale so that the lattice is integral
        let denom = lam.iter().fold(Int::one(), |acc, v| num_integer::lcm(acc, v.denom().clone()));
        let scale = Rational::from_integer(denom);
        let lam_i: Vec<i64> = lam.iter().map(|v| i64::try_from((v * &scale).to_integer()).ok()).collect::<Option<_>>()?;
        if lam_i.iter().any(|v| v.abs() > 1000) {
            continue;
        }
        let mut vertices = vec![vertex("v0", q(0, 1), q(0, 1))];
        for v in 1..n {
            let i = 2 * (v - 1);
            vertices.push(vertex(&format!("v{v}"), &x[i] * &scale, &x[i + 1] * &scale));
        }
        let edges = graph
            .iter()
            .enumerate()
            .map(|(e, &(t, h))| edge(&format!("e{e}"), t, h, m[e], &x[nx + e] * &scale, shifts[e]))
            .collect();
        let curve = TropicalCurve {
            lattice: PeriodLattice::formal([lam_i[0], lam_i[1]], [lam_i[2], lam_i[3]]),
            vertices,
            edges,
        };
        if validate(&curve).is_empty() {
            return Some(curve);
        }
    }
    None
}

/// Integer coefficients `c` such that `Σ c_k·kernel[k]` is positive on the
/// coordinates in `range`, found by a perceptron pass in floating point.
fn positive_combination<R: Rng>(
    rng: &mut R,
    kernel: &[Vec<Rational>],
    range: std::ops::Range<usize>,
) -> Option<Vec<i64>> {
    use num_traits::ToPrimitive;
    let a: Vec<Vec<f64>> =
        range.map(|j| kernel.iter().map(|k| k[j].to_f64().unwrap_or(0.0)).collect()).collect();
    let mut c: Vec<f64> = kernel.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let dot = |c: &[f64], v: &[f64]| c.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    for _ in 0..500 {
        let Some(bad) = a.iter().find(|v| dot(&c, v) <= 1e-6) else {
            let scale = 40.0 / c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            return Some(c.iter().map(|x| (x * scale).round() as i64).collect());
        };
        let norm = dot(bad, bad).sqrt().max(1e-12);
        for (ci, bi) in c.iter_mut().zip(bad) {
            *ci += bi / norm;
        }
    }
    None
}

pub fn random_curve<R: Rng>(rng: &mut R, shape: Shape) -> TropicalCurve {
    loop {
        if let Some(c) = try_random_curve(rng, shape) {
            return c;
        }
    }
}

/// Up to `k` marks on random edges at random fractions with small denominators.
pub fn random_marks<R: Rng>(rng: &mut R, curve: &TropicalCurve, k: usize) -> Vec<MarkedPoint> {
    let mut out: Vec<MarkedPoint> = Vec::new();
    for _ in 0..k {
        let edge = rng.gen_range(0..curve.edges.len());
        let d = rng.gen_range(2..=7);
        let t = rat(rng.gen_range(1..d), d);
        if !out.iter().any(|p| p.edge == edge && p.t == t) {
            out.push(MarkedPoint { edge, t });
        }
    }
    out
}

/// Marks on `k` distinct edges, one each.
pub fn random_distinct_marks<R: Rng>(rng: &mut R, curve: &TropicalCurve, k: usize) -> Vec<MarkedPoint> {
    let mut edges: Vec<usize> = (0..curve.edges.len()).collect();
    edges.shuffle(rng);
    edges
        .into_iter()
        .take(k)
        .map(|edge| {
            let d = rng.gen_range(2..=5);
            MarkedPoint { edge, t: rat(rng.gen_range(1..d), d) }
        })
        .collect()
}

pub fn random_moves<R: Rng>(rng: &mut R, curve: &TropicalCurve) -> Vec<IVec> {
    (0..curve.vertices.len()).map(|_| [rng.gen_range(-2..=2), rng.gen_range(-2..=2)]).collect()
}

/// A short random product of elementary and swap matrices.
pub fn random_unimodular<R: Rng>(rng: &mut R) -> [[i64; 2]; 2] {
    let mut a = [[1, 0], [0, 1]];
    for _ in 0..rng.gen_range(1..=3) {
        let k = *[-1i64, 1, 2].choose(rng).unwrap();
        let g = match rng.gen_range(0..3) {
            0 => [[1, k], [0, 1]],
            1 => [[1, 0], [k, 1]],
            _ => [[0, 1], [1, 0]],
        };
        a = [
            [g[0][0] * a[0][0] + g[0][1] * a[1][0], g[0][0] * a[0][1] + g[0][1] * a[1][1]],
            [g[1][0] * a[0][0] + g[1][1] * a[1][0], g[1][0] * a[0][1] + g[1][1] * a[1][1]],
        ];
    }
    a
}

fn random_polar_value<R: Rng>(rng: &mut R) -> MulValue {
    let moduli = [rat(1, 1), rat(2, 1), rat(3, 1), rat(1, 2), rat(2, 3), rat(5, 4)];
    let modulus = moduli.choose(rng).unwrap().clone();
    let turns = rat(rng.gen_range(0..12), 12);
    MulValue::polar(&modulus, &turns).expect("positive modulus")
}

/// Four independent random exact multipliers.
pub fn random_polar_multipliers<R: Rng>(rng: &mut R) -> [Multiplier; 4] {
    Alpha::ALL.map(|_| Multiplier::Polar(random_polar_value(rng)))
}

/// Random exact multipliers under which the α-monomial `sigma` evaluates to
/// `target` (an α-free value). Falls back to independent values when
/// `sigma` has no α part.
pub fn tuned_multipliers<R: Rng>(rng: &mut R, sigma: &MulValue, target: &MulValue) -> [Multiplier; 4] {
    let mut values: Vec<MulValue> = Alpha::ALL.iter().map(|_| random_polar_value(rng)).collect();
    let exps = sigma.alpha_exponents();
    let Some((&pivot, e)) = exps.iter().next() else {
        return values.into_iter().map(Multiplier::Polar).collect::<Vec<_>>().try_into().unwrap();
    };
    let e = e.clone();
    let mut rest = MulValue::one();
    for (&a, ea) in exps {
        if a != pivot {
            let idx = Alpha::ALL.iter().position(|&b| b == a).unwrap();
            rest = rest.mul(&values[idx].pow(ea));
        }
    }
    let alpha_free: MulValue = sigma.substitute(&Alpha::ALL.iter().map(|&a| (a, MulValue::one())).collect()).unwrap();
    // sigma = alpha_free · rest · pivot^e, solve for pivot
    let x = target.div(&rest).div(&alpha_free);
    let k = e.numer().magnitude().clone();
    let sign = if e.is_positive() { 1 } else { -1 };
    assert!(e.is_integer(), "tuning needs an integer exponent");
    let k = u64::try_from(k).expect("small exponent");
    let idx = Alpha::ALL.iter().position(|&b| b == pivot).unwrap();
    values[idx] = x.pow_int(sign).root(k);
    values.into_iter().map(Multiplier::Polar).collect::<Vec<_>>().try_into().unwrap()
}

pub fn with_multipliers(curve: &TropicalCurve, multipliers: [Multiplier; 4]) -> TropicalCurve {
    TropicalCurve {
        lattice: curve.lattice.with_multipliers(multipliers).expect("uniform multiplier kind"),
        ..curve.clone()
    }
}

/// A labelled curve from a generated family.
#[derive(Clone, Debug)]
pub struct Sample {
    pub label: String,
    pub curve: TropicalCurve,
}

/// Catalog and random trivalent curves, each optionally subdivided and
/// relifted. Deterministic in `rng`.
pub fn family<R: Rng>(rng: &mut R, count: usize) -> Vec<Sample> {
    let base: Vec<(String, TropicalCurve)> = vec![
        ("theta".into(), theta()),
        ("theta2".into(), theta2()),
        ("cycle".into(), cycle()),
        ("theta(2,1)(1,2)".into(), theta_with([[2, 1], [1, 2], [-3, -3]])),
    ];
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < count {
        let (name, c) = if i < base.len() {
            base[i].clone()
        } else {
            let shape = Shape::ALL[i % Shape::ALL.len()];
            (format!("{}#{i}", shape.name()), random_curve(rng, shape))
        };
        i += 1;
        let (sub, marks) = match rng.gen_range(0..3) {
            0 => (c.clone(), 0),
            _ => {
                let k = rng.gen_range(1..=2);
                let marks = random_marks(rng, &c, k);
                let n = marks.len();
                (c.subdivide(&marks).expect("valid marks").0, n)
            }
        };
        let moves = random_moves(rng, &sub);
        let curve = sub.relift(&moves);
        out.push(Sample { label: format!("{name}/sub{marks}/relift"), curve });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn catalog_curves_are_valid() {
        for c in [theta(), theta2(), cycle(), theta_with([[2, 1], [1, 2], [-3, -3]])] {
            assert_eq!(validate(&c), vec![]);
        }
    }

    #[test]
    fn cycle_bases_have_genus_size() {
        for shape in Shape::ALL {
            let (n, g) = shape.graph();
            let cycles = cycle_basis(n, &g);
            assert_eq!(cycles.len() as i64, g.len() as i64 - n as i64 + 1);
            for c in &cycles {
                // each cycle is balanced at every vertex
                for v in 0..n {
                    let s: i64 = g
                        .iter()
                        .zip(c)
                        .map(|(&(t, h), &x)| if t == v { x } else if h == v { -x } else { 0 })
                        .sum();
                    assert_eq!(s, 0);
                }
            }
        }
    }

    #[test]
    fn random_curves_are_valid_for_every_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for shape in Shape::ALL {
            for _ in 0..3 {
                let c = random_curve(&mut rng, shape);
                assert_eq!(validate(&c), vec![], "{shape:?}");
                assert!(c.is_trivalent());
            }
        }
    }

    #[test]
    fn family_is_deterministic() {
        let a = family(&mut ChaCha8Rng::seed_from_u64(3), 12);
        let b = family(&mut ChaCha8Rng::seed_from_u64(3), 12);
        assert_eq!(a.len(), 12);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.curve, y.curve);
            assert_eq!(validate(&x.curve), vec![], "{}", x.label);
        }
    }
}
