//! Signed counts of zeros of generically perturbed sections of vdim-0 models,
//! and the vdim-0 intersection pairing built on fibre products.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dman::StdModel;
use crate::error::{Error, Result};
use crate::fibre::fibre_product;
use crate::linalg::{det_f64, solve_f64};
use crate::poly::{jacobian, scalar_to_f64, Poly};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonParams {
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Seeds per axis of the starting grid.
    pub grid: usize,
    pub dedupe_radius: f64,
    /// Zeros with `|det| <=` this are treated as non-transverse.
    pub det_threshold: f64,
    pub max_resamples: usize,
}

impl Default for NewtonParams {
    fn default() -> Self {
        NewtonParams {
            max_iterations: 50,
            tolerance: 1e-12,
            grid: 32,
            dedupe_radius: 1e-6,
            det_threshold: 1e-8,
            max_resamples: 8,
        }
    }
}

/// Largest supported dimension for grid seeding.
pub const MAX_COUNT_DIM: usize = 3;

#[derive(Debug, Clone)]
pub struct CountProblem {
    pub model: Arc<StdModel>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub seeds: Vec<u64>,
    pub newton: NewtonParams,
    /// Required lower bound for `|s|` on the boundary grid.
    pub margin: f64,
}

impl CountProblem {
    /// Five seeds, three perturbation sizes and default solver settings.
    pub fn new(model: Arc<StdModel>, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        CountProblem {
            model,
            lo,
            hi,
            epsilons: vec![1e-3, 1e-2, 3e-2],
            seeds: vec![1, 2, 3, 4, 5],
            newton: NewtonParams::default(),
            margin: 1e-6,
        }
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_epsilons(mut self, epsilons: Vec<f64>) -> Self {
        self.epsilons = epsilons;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Zero {
    pub coords: Vec<f64>,
    pub det: f64,
    pub sign: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replica {
    pub seed: u64,
    pub epsilon: f64,
    pub direction: Vec<f64>,
    pub resamples: usize,
    pub zeros: Vec<Zero>,
    /// Orientation times the sum of signs.
    pub count: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub count: i64,
    pub boundary_min: f64,
    pub replicas: Vec<Replica>,
}

/// Polynomial with float coefficients for repeated evaluation.
struct FloatPoly {
    terms: Vec<(f64, Vec<u32>)>,
}

impl FloatPoly {
    fn new(p: &Poly) -> Self {
        FloatPoly { terms: p.terms().map(|(m, c)| (scalar_to_f64(c), m.exponents().to_vec())).collect() }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| e.iter().zip(x).fold(*c, |t, (&k, xi)| if k == 0 { t } else { t * xi.powi(k as i32) }))
            .sum()
    }
}

struct System {
    section: Vec<FloatPoly>,
    jac: Vec<Vec<FloatPoly>>,
}

impl System {
    fn new(model: &StdModel) -> Result<Self> {
        let j = jacobian(model.section(), model.n())?;
        Ok(System {
            section: model.section().iter().map(FloatPoly::new).collect(),
            jac: (0..j.rows()).map(|r| j.row(r).iter().map(FloatPoly::new).collect()).collect(),
        })
    }

    fn value(&self, x: &[f64], shift: &[f64]) -> Vec<f64> {
        self.section.iter().zip(shift).map(|(p, s)| p.eval(x) - s).collect()
    }

    fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jac.iter().map(|row| row.iter().map(|p| p.eval(x)).collect()).collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn axis(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

/// All points of the product grid, first axis slowest.
fn grid(lo: &[f64], hi: &[f64], count: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for (&a, &b) in lo.iter().zip(hi) {
        let ticks = axis(a, b, count);
        out = out.iter().flat_map(|p| ticks.iter().map(move |t| [p.as_slice(), &[*t]].concat())).collect();
    }
    out
}

/// Grid points on the faces of the box.
fn boundary_grid(lo: &[f64], hi: &[f64], count: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for d in 0..lo.len() {
        for face in [lo[d], hi[d]] {
            let (mut l, mut h) = (lo.to_vec(), hi.to_vec());
            l[d] = face;
            h[d] = face;
            out.extend(grid(&l, &h, count).into_iter().map(|mut p| {
                p[d] = face;
                p
            }));
        }
    }
    out
}

fn inside(x: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v <= b)
}

fn newton(sys: &System, shift: &[f64], start: &[f64], lo: &[f64], hi: &[f64], prm: &NewtonParams) -> Option<Vec<f64>> {
    let mut x = start.to_vec();
    let mut f = sys.value(&x, shift);
    let mut r = norm(&f);
    for _ in 0..prm.max_iterations {
        if r <= prm.tolerance {
            return Some(x);
        }
        let j = sys.jacobian(&x);
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        let step = solve_f64(&j, &neg)?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            let ft = sys.value(&trial, shift);
            let rt = norm(&ft);
            if rt < r || t < 1e-6 {
                let moved = t * norm(&step);
                x = trial;
                f = ft;
                let stalled = rt >= r;
                r = rt;
                if !x.iter().all(|v| v.is_finite()) || !inside(&x, lo, hi) {
                    return None;
                }
                if stalled || moved <= 1e-15 * (1.0 + norm(&x)) {
                    // No further progress; accept only a residual near round-off.
                    return (r <= prm.tolerance.max(1e-9)).then_some(x);
                }
                break;
            }
            t /= 2.0;
        }
    }
    (r <= prm.tolerance).then_some(x)
}

fn random_unit(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    if k == 0 {
        return Vec::new();
    }
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 0.1 && n <= 1.0 {
            return v.iter().map(|a| a / n).collect();
        }
    }
}

fn find_zeros(sys: &System, shift: &[f64], seeds: &[Vec<f64>], p: &CountProblem) -> Vec<Zero> {
    let mut found: Vec<Vec<f64>> = Vec::new();
    for s in seeds {
        let Some(x) = newton(sys, shift, s, &p.lo, &p.hi, &p.newton) else { continue };
        let dup = found.iter().any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).abs() <= p.newton.dedupe_radius));
        if !dup {
            found.push(x);
        }
    }
    found.sort_by(|a, b| a.iter().zip(b).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    found
        .into_iter()
        .map(|coords| {
            let det = det_f64(&sys.jacobian(&coords));
            let sign = if det > 0.0 { 1 } else { -1 };
            Zero { coords, det, sign }
        })
        .collect()
}

fn check_problem(p: &CountProblem) -> Result<()> {
    let m = &p.model;
    if m.n() != m.k() {
        return Err(Error::Count(format!("virtual dimension is {}, not 0", m.vdim())));
    }
    if m.n() > MAX_COUNT_DIM {
        return Err(Error::Count(format!("dimension {} exceeds the supported {MAX_COUNT_DIM}", m.n())));
    }
    if p.lo.len() != m.n() || p.hi.len() != m.n() {
        return Err(Error::Dimension { expected: m.n(), found: p.lo.len().min(p.hi.len()) });
    }
    if p.lo.iter().zip(&p.hi).any(|(a, b)| !(a < b)) {
        return Err(Error::Count("box has an empty side".into()));
    }
    if p.seeds.is_empty() || p.epsilons.is_empty() {
        return Err(Error::Count("need at least one seed and one perturbation size".into()));
    }
    if p.epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Count("perturbation sizes must be positive".into()));
    }
    Ok(())
}

/// Minimum of `|s|` over the boundary grid; `+inf` for a zero-dimensional box.
fn boundary_min(sys: &System, p: &CountProblem) -> f64 {
    let zero = vec![0.0; p.model.k()];
    boundary_grid(&p.lo, &p.hi, p.newton.grid.max(2))
        .iter()
        .map(|x| norm(&sys.value(x, &zero)))
        .fold(f64::INFINITY, f64::min)
}

pub fn virtual_count(p: &CountProblem) -> Result<CountReport> {
    check_problem(p)?;
    let m = &p.model;
    let sys = System::new(m)?;
    let seeds = grid(&p.lo, &p.hi, p.newton.grid);
    for x in &seeds {
        for d in m.domain() {
            if FloatPoly::new(d).eval(x) <= 0.0 {
                return Err(Error::Count(format!("box point {x:?} lies outside the domain")));
            }
        }
    }
    let bmin = boundary_min(&sys, p);
    if bmin <= p.margin {
        return Err(Error::Count(format!("|s| reaches {bmin:e} on the box boundary, margin is {:e}", p.margin)));
    }
    let emax = p.epsilons.iter().cloned().fold(0.0, f64::max);
    if 2.0 * emax >= bmin {
        return Err(Error::Count(format!("perturbation {emax:e} is too large for boundary minimum {bmin:e}")));
    }

    let mut replicas = Vec::new();
    for &seed in &p.seeds {
        for (ei, &eps) in p.epsilons.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ei as u64);
            let mut resamples = 0;
            loop {
                let u = random_unit(&mut rng, m.k());
                let shift: Vec<f64> = u.iter().map(|c| eps * c).collect();
                let zeros = find_zeros(&sys, &shift, &seeds, p);
                if zeros.iter().all(|z| z.det.abs() > p.newton.det_threshold) {
                    let total: i64 = zeros.iter().map(|z| z.sign as i64).sum();
                    replicas.push(Replica {
                        seed,
                        epsilon: eps,
                        direction: u,
                        resamples,
                        zeros,
                        count: m.orient() as i64 * total,
                    });
                    break;
                }
                resamples += 1;
                if resamples > p.newton.max_resamples {
                    return Err(Error::Count(format!(
                        "seed {seed}, epsilon {eps:e}: non-transverse zero after {resamples} resamples"
                    )));
                }
            }
        }
    }
    let count = replicas[0].count;
    if replicas.iter().any(|r| r.count != count) {
        let values: Vec<String> = replicas.iter().map(|r| format!("(seed {}, eps {:e}) -> {}", r.seed, r.epsilon, r.count)).collect();
        return Err(Error::Count(format!("replicas disagree: {}", values.join(", "))));
    }
    Ok(CountReport { count, boundary_min: bmin, replicas })
}

/// Sum of counts over components, each with its own box.
pub fn count_disjoint_union(parts: &[CountProblem]) -> Result<i64> {
    parts.iter().map(|p| virtual_count(p).map(|r| r.count)).sum()
}

/// `[X, f] • [X', f']` for `vdim X + vdim X' = p`, counted on a box in the
/// coordinates of `V_X x V_X'`.
pub fn intersection_number(
    x: Arc<StdModel>,
    f: Vec<Poly>,
    x2: Arc<StdModel>,
    f2: Vec<Poly>,
    p: usize,
    template: &CountProblem,
) -> Result<CountReport> {
    if x.vdim() + x2.vdim() != p as i64 {
        return Err(Error::Count(format!("vdim {} + vdim {} is not {p}", x.vdim(), x2.vdim())));
    }
    let d = fibre_product(x, f, x2, f2, p)?;
    virtual_count(&CountProblem { model: d.w, ..template.clone() })
}
