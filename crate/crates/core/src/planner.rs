//! Choosing and ordering segments from a pool to maximise `g²`.
//!
//! Segments with nearly identical dispersion splice into a fiber that behaves
//! like one long homogeneous piece. The objective is the predicted `g²` of
//! the spliced assembly alone; splice loss is not modelled.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::correlation::g2_quadrature;
use crate::dispersion::FiberSegment;
use crate::error::{invalid, Error, Result};
use crate::phasematch::{PhaseMatchPoint, PumpSpec};
use crate::spectra::{
    auto_grid, build_jsa, marginal, AssemblySegment, AssemblySpec, GridOptions, MarginalAxis, ModelMode, Spectrum1D,
};

/// Two `g²` values closer than this are treated as equal.
const G2_TIE: f64 = 1e-9;
const LENGTH_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub segment: FiberSegment,
    pub point: PhaseMatchPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthConstraint {
    pub target_total_length_m: f64,
    /// Defaults to the shortest candidate length.
    pub tolerance_m: Option<f64>,
    /// Defaults to the pool size.
    pub max_segments: Option<usize>,
}

impl LengthConstraint {
    pub fn new(target_total_length_m: f64) -> Self {
        Self {
            target_total_length_m,
            tolerance_m: None,
            max_segments: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPool {
    candidates: Vec<Candidate>,
    constraint: LengthConstraint,
    tolerance_m: f64,
    max_segments: usize,
}

impl SegmentPool {
    pub fn new(candidates: Vec<Candidate>, constraint: LengthConstraint) -> Result<Self> {
        if candidates.is_empty() {
            return Err(invalid("pool", "needs at least one candidate"));
        }
        for c in &candidates {
            c.segment.validate()?;
        }
        let omega_pc = candidates[0].point.omega_pc;
        if candidates
            .iter()
            .any(|c| ((c.point.omega_pc - omega_pc) / omega_pc).abs() > 1e-12)
        {
            return Err(invalid("pool", "all candidates must be linearised at one pump"));
        }
        if !(constraint.target_total_length_m > 0.0) {
            return Err(invalid("target length", "must be positive"));
        }
        let shortest = candidates
            .iter()
            .map(|c| c.segment.length_m)
            .fold(f64::INFINITY, f64::min);
        let tolerance_m = constraint.tolerance_m.unwrap_or(shortest);
        if !(tolerance_m >= 0.0) {
            return Err(invalid("length tolerance", "must be non-negative"));
        }
        let max_segments = constraint.max_segments.unwrap_or(candidates.len());
        if max_segments == 0 {
            return Err(invalid("max segments", "must be at least one"));
        }
        Ok(Self {
            candidates,
            constraint,
            tolerance_m,
            max_segments,
        })
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn constraint(&self) -> LengthConstraint {
        self.constraint
    }

    pub fn tolerance_m(&self) -> f64 {
        self.tolerance_m
    }

    pub fn max_segments(&self) -> usize {
        self.max_segments
    }

    pub fn total_length_m(&self, order: &[usize]) -> f64 {
        order.iter().map(|&k| self.candidates[k].segment.length_m).sum()
    }

    fn excess(&self, total: f64) -> f64 {
        (total - self.constraint.target_total_length_m).abs() - self.tolerance_m
    }

    pub fn is_feasible(&self, order: &[usize]) -> bool {
        !order.is_empty() && order.len() <= self.max_segments && self.excess(self.total_length_m(order)) <= LENGTH_SLACK
    }

    fn check_order(&self, order: &[usize]) -> Result<()> {
        if order.is_empty() {
            return Err(invalid("plan", "is empty"));
        }
        for (k, &i) in order.iter().enumerate() {
            if i >= self.candidates.len() {
                return Err(invalid("plan", "index out of range"));
            }
            if order[..k].contains(&i) {
                return Err(invalid("plan", "repeats a candidate"));
            }
        }
        Ok(())
    }

    pub fn assembly(&self, order: &[usize]) -> Result<AssemblySpec> {
        self.check_order(order)?;
        let segs = order
            .iter()
            .map(|&k| {
                let c = &self.candidates[k];
                AssemblySegment::linearized(c.segment.label.clone(), c.segment.length_m, c.point)
            })
            .collect();
        let label: Vec<&str> = order
            .iter()
            .map(|&k| self.candidates[k].segment.label.as_str())
            .collect();
        AssemblySpec::new(label.join("+"), segs, ModelMode::Linearized)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerOptions {
    pub grid: GridOptions,
    /// Largest number of feasible ordered subsets the exhaustive search accepts.
    pub cap: usize,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        Self {
            grid: GridOptions::default(),
            cap: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanEvaluation {
    pub g2: f64,
    /// Signal marginal over wavelength.
    pub spectrum: Spectrum1D,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplicePlan {
    /// Pool indices in splice order.
    pub order: Vec<usize>,
    pub labels: Vec<String>,
    pub total_length_m: f64,
    pub predicted_g2: f64,
    pub predicted_spectrum: Spectrum1D,
}

/// Builds the assembly in the given order and predicts its `g²` and signal
/// spectrum.
pub fn evaluate_plan(
    order: &[usize],
    pool: &SegmentPool,
    pump: &PumpSpec,
    opts: &PlannerOptions,
) -> Result<PlanEvaluation> {
    let asm = pool.assembly(order)?;
    let grid = auto_grid(&asm, pump, &opts.grid)?;
    let jsa = build_jsa(&asm, pump, &grid)?;
    Ok(PlanEvaluation {
        g2: g2_quadrature(&jsa)?,
        spectrum: marginal(&jsa, MarginalAxis::Signal).to_wavelength(),
    })
}

fn make_plan(pool: &SegmentPool, order: Vec<usize>, eval: PlanEvaluation) -> SplicePlan {
    SplicePlan {
        labels: order
            .iter()
            .map(|&k| pool.candidates[k].segment.label.clone())
            .collect(),
        total_length_m: pool.total_length_m(&order),
        order,
        predicted_g2: eval.g2,
        predicted_spectrum: eval.spectrum,
    }
}

/// Every feasible ordered subset, in lexicographic order of index sequences
/// (a prefix sorts before its extensions).
pub fn enumerate_plans(pool: &SegmentPool, cap: usize) -> Result<Vec<Vec<usize>>> {
    fn walk(pool: &SegmentPool, cur: &mut Vec<usize>, total: f64, out: &mut Vec<Vec<usize>>, cap: usize) -> Result<()> {
        let limit = pool.constraint.target_total_length_m + pool.tolerance_m + LENGTH_SLACK;
        for k in 0..pool.candidates.len() {
            if cur.contains(&k) {
                continue;
            }
            let t = total + pool.candidates[k].segment.length_m;
            if t > limit {
                continue;
            }
            cur.push(k);
            if pool.is_feasible(cur) {
                out.push(cur.clone());
                if out.len() > cap {
                    return Err(Error::CombinatorialCap { count: out.len(), cap });
                }
            }
            if cur.len() < pool.max_segments {
                walk(pool, cur, t, out, cap)?;
            }
            cur.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(pool, &mut Vec::new(), 0.0, &mut out, cap)?;
    Ok(out)
}

/// Is `a` strictly preferable to `b`? Higher `g²`, then shorter total
/// length. Equal candidates keep enumeration order.
fn better(pool: &SegmentPool, a: (&[usize], f64), b: (&[usize], f64)) -> bool {
    if a.1 > b.1 + G2_TIE {
        return true;
    }
    if a.1 < b.1 - G2_TIE {
        return false;
    }
    pool.total_length_m(a.0) < pool.total_length_m(b.0) - LENGTH_SLACK
}

/// Picks the best of already evaluated plans, which must be given in
/// enumeration order for the tie-break to be deterministic.
pub fn select_best(pool: &SegmentPool, evaluated: Vec<(Vec<usize>, PlanEvaluation)>) -> Result<SplicePlan> {
    let mut best: Option<(Vec<usize>, PlanEvaluation)> = None;
    for (order, eval) in evaluated {
        let replace = match &best {
            None => true,
            Some((bo, be)) => better(pool, (&order, eval.g2), (bo, be.g2)),
        };
        if replace {
            best = Some((order, eval));
        }
    }
    let (order, eval) = best.ok_or(Error::Infeasible {
        reason: "no subset of the pool meets the length constraint".into(),
    })?;
    Ok(make_plan(pool, order, eval))
}

/// Global argmax of `g²` over all feasible ordered subsets.
pub fn plan_exhaustive(pool: &SegmentPool, pump: &PumpSpec, opts: &PlannerOptions) -> Result<SplicePlan> {
    let plans = enumerate_plans(pool, opts.cap)?;
    let evaluated = plans
        .into_iter()
        .map(|order| {
            let e = evaluate_plan(&order, pool, pump, opts)?;
            Ok((order, e))
        })
        .collect::<Result<Vec<_>>>()?;
    select_best(pool, evaluated)
}

fn lambda_s0(pool: &SegmentPool, k: usize) -> f64 {
    pool.candidates[k].point.lambda_s0_nm()
}

/// Seed: the candidate pair with the closest phase-matched signal
/// wavelengths (or the only candidate).
fn seed(pool: &SegmentPool) -> Vec<usize> {
    let n = pool.candidates.len();
    if n == 1 || pool.max_segments == 1 {
        return vec![0];
    }
    let mut best = (f64::INFINITY, 0, 1);
    for i in 0..n {
        for j in i + 1..n {
            let gap = (lambda_s0(pool, i) - lambda_s0(pool, j)).abs();
            if gap < best.0 - 1e-9 {
                best = (gap, i, j);
            }
        }
    }
    vec![best.1, best.2]
}

fn grow(pool: &SegmentPool, mut cur: Vec<usize>) -> Vec<usize> {
    let target = pool.constraint.target_total_length_m;
    // a seed pair that overshoots falls back to its first member
    if cur.len() > 1 && pool.total_length_m(&cur) - target > pool.tolerance_m + LENGTH_SLACK {
        cur.truncate(1);
    }
    while cur.len() < pool.max_segments {
        let mean = cur.iter().map(|&k| lambda_s0(pool, k)).sum::<f64>() / cur.len() as f64;
        let next = (0..pool.candidates.len())
            .filter(|k| !cur.contains(k))
            .min_by(|&a, &b| {
                (lambda_s0(pool, a) - mean)
                    .abs()
                    .total_cmp(&(lambda_s0(pool, b) - mean).abs())
                    .then(a.cmp(&b))
            });
        let Some(next) = next else { break };
        let now = (pool.total_length_m(&cur) - target).abs();
        let after = (pool.total_length_m(&cur) + pool.candidates[next].segment.length_m - target).abs();
        if after < now - LENGTH_SLACK {
            cur.push(next);
        } else {
            break;
        }
    }
    cur
}

fn neighbours(pool: &SegmentPool, cur: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a in 0..cur.len() {
        for b in a + 1..cur.len() {
            let mut v = cur.to_vec();
            v.swap(a, b);
            out.push(v);
        }
    }
    for a in 0..cur.len() {
        for k in 0..pool.candidates.len() {
            if !cur.contains(&k) {
                let mut v = cur.to_vec();
                v[a] = k;
                if pool.is_feasible(&v) {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Heuristic: start from the pair closest in phase-matched signal
/// wavelength, add the candidates nearest to the cluster until the length
/// target is met, then apply the best reorder or replacement move until no
/// move raises `g²`.
pub fn plan_greedy(pool: &SegmentPool, pump: &PumpSpec, opts: &PlannerOptions) -> Result<SplicePlan> {
    let cur = grow(pool, seed(pool));
    if !pool.is_feasible(&cur) {
        return Err(Error::Infeasible {
            reason: "greedy growth could not meet the length constraint".into(),
        });
    }
    let mut best_eval = evaluate_plan(&cur, pool, pump, opts)?;
    let mut cur = cur;
    loop {
        let mut improved: Option<(Vec<usize>, PlanEvaluation)> = None;
        for cand in neighbours(pool, &cur) {
            let e = evaluate_plan(&cand, pool, pump, opts)?;
            let reference = improved.as_ref().map_or(best_eval.g2, |x| x.1.g2);
            if e.g2 > reference + G2_TIE {
                improved = Some((cand, e));
            }
        }
        match improved {
            Some((o, e)) => {
                cur = o;
                best_eval = e;
            }
            None => break,
        }
    }
    Ok(make_plan(pool, cur, best_eval))
}
