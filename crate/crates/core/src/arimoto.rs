//! The Arimoto iteration with certified stopping.
//!
//! Each iterate `q` yields per-input divergences `d(x) = D(r(·|x) || r_q)`.
//! They drive the multiplicative update `q'(x) ∝ q(x)·exp(d(x))` and the
//! capacity bracket `I(q) ≤ C ≤ max_x d(x)`. The solver stops once the
//! bracket is narrower than the tolerance, so every converged result carries
//! a certified interval for the capacity.

use std::io::Write;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::prob::Distribution;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max_iterations",
        }
    }
}

/// How an iterate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Initial,
    Arimoto,
    /// Backward m-step solved exactly by the inner fixed-point iteration.
    Exact,
    /// Inner solve did not converge; the Arimoto approximation was used.
    Fallback,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Initial => "init",
            StepKind::Arimoto => "arimoto",
            StepKind::Exact => "exact",
            StepKind::Fallback => "fallback",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based; iteration 1 is the initial distribution.
    pub iteration: usize,
    pub mutual_info: f64,
    pub lower: f64,
    pub upper: f64,
    pub per_input_divergence: Vec<f64>,
    pub input: Distribution,
    pub step: StepKind,
    pub inner_residual: Option<f64>,
    /// An entry underflowed to zero and was lifted to the smallest normal.
    pub clamped: bool,
}

impl IterationRecord {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub const CSV_HEADER: &'static str = "iter,mutual_info,lower,upper,gap,status,inner_residual";

    /// One line per record, values in nats.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for rec in &self.records {
            let residual = rec.inner_residual.map(|r| r.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                rec.iteration,
                rec.mutual_info,
                rec.lower,
                rec.upper,
                rec.gap(),
                rec.step.as_str(),
                residual
            )?;
        }
        Ok(())
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// Midpoint of the bracket, in nats.
    pub capacity: f64,
    pub lower: f64,
    pub upper: f64,
    pub optimal_input: Distribution,
    pub iterations: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Starting point; uniform when absent. Must be interior.
    pub initial: Option<Distribution>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            initial: None,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// `d(x) = D(r(·|x) || r_q)` for every input.
pub fn per_input_divergences(q: &Distribution, ch: &Channel) -> Result<Vec<f64>> {
    let r = ch.output_marginal(q)?;
    ch.divergences_to(&r)
}

/// `(I(q), max_x d(x))` from precomputed divergences. `I(q) = Σ q(x) d(x)`.
pub(crate) fn bracket_from_divergences(q: &Distribution, d: &[f64]) -> (f64, f64) {
    let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut lower = 0.0;
    for (&qx, &dx) in q.weights().iter().zip(d) {
        if qx > 0.0 {
            lower += qx * dx;
        }
    }
    // a convex combination may round one ulp past its maximum
    (lower.min(upper), upper)
}

/// Certified interval `I(joint(q, ch)) ≤ C ≤ max_x D(r(·|x) || r_q)`.
pub fn capacity_bracket(q: &Distribution, ch: &Channel) -> Result<(f64, f64)> {
    q.require_interior()?;
    let d = per_input_divergences(q, ch)?;
    Ok(bracket_from_divergences(q, &d))
}

/// `q'(x) ∝ q(x)·exp(d(x))` in log space. Entries may underflow to zero.
pub(crate) fn multiplicative_update(q: &Distribution, d: &[f64]) -> Result<Distribution> {
    let logits: Vec<f64> = q
        .weights()
        .iter()
        .zip(d)
        .map(|(&qx, &dx)| qx.ln() + dx)
        .collect();
    Distribution::from_log_weights(&logits)
}

pub(crate) fn lift_zeros(q: Distribution) -> (Distribution, bool) {
    if q.is_interior() {
        return (q, false);
    }
    let mut w = q.into_weights();
    for v in w.iter_mut() {
        if *v <= 0.0 {
            *v = f64::MIN_POSITIVE;
        }
    }
    let sum: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= sum;
    }
    (Distribution::from_vec_unchecked(w), true)
}

/// One Arimoto update of an interior input distribution.
pub fn arimoto_step(q: &Distribution, ch: &Channel) -> Result<Distribution> {
    q.require_interior()?;
    let d = per_input_divergences(q, ch)?;
    multiplicative_update(q, &d).map(|next| lift_zeros(next).0)
}

/// Product of one outer update.
pub(crate) struct StepOutput {
    pub next: Distribution,
    pub kind: StepKind,
    pub inner_residual: Option<f64>,
}

/// Shared outer loop: evaluate, record, stop on the bracket gap, else step.
pub(crate) fn drive<F>(
    ch: &Channel,
    opts: &SolveOptions,
    mut step: F,
) -> Result<(CapacityResult, IterationTrace)>
where
    F: FnMut(&Distribution, &[f64]) -> Result<StepOutput>,
{
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::ParameterOutOfRange {
            name: "tol",
            value: opts.tol,
        });
    }
    if opts.max_iters == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "max_iters",
            value: 0.0,
        });
    }
    let mut q = match &opts.initial {
        Some(q0) => {
            if q0.len() != ch.inputs() {
                return Err(Error::DimensionMismatch {
                    expected: ch.inputs(),
                    found: q0.len(),
                });
            }
            q0.require_interior()?;
            q0.clone()
        }
        None => Distribution::uniform(ch.inputs())?,
    };

    let mut trace = IterationTrace::default();
    let mut kind = StepKind::Initial;
    let mut inner_residual = None;
    let mut clamped = false;
    for iteration in 1..=opts.max_iters {
        let d = per_input_divergences(&q, ch)?;
        let (lower, upper) = bracket_from_divergences(&q, &d);
        let converged = upper - lower <= opts.tol;
        let last = converged || iteration == opts.max_iters;
        // the step needs `d`, so compute it before the record takes ownership
        let out = if last { None } else { Some(step(&q, &d)?) };
        trace.records.push(IterationRecord {
            iteration,
            mutual_info: lower,
            lower,
            upper,
            per_input_divergence: d,
            input: q.clone(),
            step: kind,
            inner_residual,
            clamped,
        });
        if last {
            let result = CapacityResult {
                capacity: 0.5 * (lower + upper),
                lower,
                upper,
                optimal_input: q,
                iterations: iteration,
                termination: if converged {
                    Termination::Converged
                } else {
                    Termination::MaxIterations
                },
            };
            return Ok((result, trace));
        }
        let out = out.expect("step computed for non-final iteration");
        let (next, was_clamped) = lift_zeros(out.next);
        q = next;
        kind = out.kind;
        inner_residual = out.inner_residual;
        clamped = was_clamped;
    }
    unreachable!("loop returns on its final iteration")
}

/// Runs the Arimoto iteration until the capacity bracket closes to `tol`.
pub fn solve_arimoto(ch: &Channel, opts: &SolveOptions) -> Result<(CapacityResult, IterationTrace)> {
    drive(ch, opts, |q, d| {
        Ok(StepOutput {
            next: multiplicative_update(q, d)?,
            kind: StepKind::Arimoto,
            inner_residual: None,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelKind;
    use crate::prob::mutual_information;
    use std::f64::consts::LN_2;

    fn dist(w: &[f64]) -> Distribution {
        Distribution::new(w.to_vec()).unwrap()
    }

    fn canonical(kind: ChannelKind) -> Channel {
        Channel::canonical(kind).unwrap()
    }

    fn bsc_capacity(p: f64) -> f64 {
        LN_2 + p * p.ln() + (1.0 - p) * (1.0 - p).ln()
    }

    #[test]
    fn step_fixed_points() {
        let bsc = canonical(ChannelKind::Bsc(0.1));
        let u = Distribution::uniform(2).unwrap();
        assert!(arimoto_step(&u, &bsc).unwrap().max_abs_diff(&u) < 1e-15);

        let r0 = vec![0.25, 0.25, 0.5];
        let same = Channel::from_rows(&[r0.clone(), r0.clone(), r0]).unwrap();
        let q = dist(&[0.2, 0.5, 0.3]);
        assert!(arimoto_step(&q, &same).unwrap().max_abs_diff(&q) < 1e-15);
    }

    #[test]
    fn step_on_z_channel_moves_toward_noiseless_input() {
        let z = canonical(ChannelKind::Z(0.5));
        let next = arimoto_step(&Distribution::uniform(2).unwrap(), &z).unwrap();
        // d(0) = ln(4/3), d(1) = ln(4/3)/2, so q'(0) = 1 / (1 + sqrt(3/4))
        let expected = 1.0 / (1.0 + 0.75f64.sqrt());
        assert!((next.weights()[0] - expected).abs() < 1e-15);
        assert!((expected - 0.535_898_384_862_245_5).abs() < 1e-15);
        assert!(next.weights()[0] > 0.5);
    }

    #[test]
    fn step_errors() {
        let bsc = canonical(ChannelKind::Bsc(0.1));
        assert!(matches!(
            arimoto_step(&dist(&[1.0, 0.0]), &bsc),
            Err(Error::NonInteriorInput { index: 1 })
        ));
        assert!(matches!(
            arimoto_step(&dist(&[0.2, 0.3, 0.5]), &bsc),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bracket_examples() {
        let id = canonical(ChannelKind::Identity(2));
        let (lo, hi) = capacity_bracket(&Distribution::uniform(2).unwrap(), &id).unwrap();
        assert!((lo - LN_2).abs() < 1e-15 && (hi - LN_2).abs() < 1e-15);

        let u = canonical(ChannelKind::UniformRows(3, 4));
        let (lo, hi) = capacity_bracket(&dist(&[0.1, 0.3, 0.6]), &u).unwrap();
        assert!(lo.abs() < 1e-15 && hi.abs() < 1e-15);

        let bsc = canonical(ChannelKind::Bsc(0.1));
        let (lo, hi) = capacity_bracket(&Distribution::uniform(2).unwrap(), &bsc).unwrap();
        assert!((lo - bsc_capacity(0.1)).abs() < 1e-15);
        assert!((hi - bsc_capacity(0.1)).abs() < 1e-15);

        // lower bound is the mutual information of the joint
        let q = dist(&[0.3, 0.7]);
        let (lo, hi) = capacity_bracket(&q, &bsc).unwrap();
        let mi = mutual_information(&bsc.joint(&q).unwrap());
        assert!((lo - mi).abs() < 1e-15);
        assert!(lo <= hi);
    }

    #[test]
    fn solve_bsc_bec_z() {
        let (res, trace) = solve_arimoto(&canonical(ChannelKind::Bsc(0.1)), &SolveOptions::default()).unwrap();
        assert_eq!(res.termination, Termination::Converged);
        assert!((res.capacity - 0.368_064_207_168_497_1).abs() < 1e-9);
        assert!(res.optimal_input.max_abs_diff(&Distribution::uniform(2).unwrap()) < 1e-12);
        assert_eq!(trace.len(), res.iterations);

        let (res, _) = solve_arimoto(&canonical(ChannelKind::Bec(0.5)), &SolveOptions::default()).unwrap();
        assert!((res.capacity - 0.5 * LN_2).abs() < 1e-9);

        let (res, _) = solve_arimoto(&canonical(ChannelKind::Z(0.5)), &SolveOptions::default()).unwrap();
        assert!((crate::prob::nats_to_bits(res.capacity) - 1.25f64.log2()).abs() < 1e-8);
        assert!((res.optimal_input.weights()[0] - 0.6).abs() < 1e-4);
    }

    #[test]
    fn solve_respects_max_iters_and_options() {
        let z = canonical(ChannelKind::Z(0.5));
        let opts = SolveOptions {
            tol: 1e-15,
            max_iters: 3,
            initial: None,
        };
        let (res, trace) = solve_arimoto(&z, &opts).unwrap();
        assert_eq!(res.termination, Termination::MaxIterations);
        assert_eq!(res.iterations, 3);
        assert_eq!(trace.records[0].step, StepKind::Initial);
        assert_eq!(trace.records[1].step, StepKind::Arimoto);

        let bad = SolveOptions {
            tol: 0.0,
            ..SolveOptions::default()
        };
        assert!(solve_arimoto(&z, &bad).is_err());
        let bad = SolveOptions {
            initial: Some(dist(&[1.0, 0.0])),
            ..SolveOptions::default()
        };
        assert!(matches!(solve_arimoto(&z, &bad), Err(Error::NonInteriorInput { .. })));
    }

    #[test]
    fn zero_capacity_terminates_immediately() {
        let (res, trace) = solve_arimoto(&canonical(ChannelKind::UniformRows(3, 2)), &SolveOptions::default()).unwrap();
        assert_eq!(res.iterations, 1);
        assert_eq!(trace.len(), 1);
        assert!(res.capacity.abs() < 1e-15);
    }

    #[test]
    fn trace_csv_layout() {
        let (_, trace) = solve_arimoto(&canonical(ChannelKind::Z(0.3)), &SolveOptions::default()).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), IterationTrace::CSV_HEADER);
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 7);
        assert_eq!(first[0], "1");
        assert_eq!(first[5], "init");
        assert_eq!(first[6], "");
        assert_eq!(text.lines().count(), trace.len() + 1);
    }

    #[test]
    fn underflowed_entries_are_lifted() {
        let (q, clamped) = lift_zeros(Distribution::from_vec_unchecked(vec![1.0, 0.0]));
        assert!(clamped);
        assert!(q.is_interior());
        assert_eq!(q.weights()[1], f64::MIN_POSITIVE);
    }
}
