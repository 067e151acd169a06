//! One-periodic coefficient functions and the media built from them.
//!
//! A [`FunctionDescriptor`] is a symbolic description of a bounded 1-periodic
//! function: either a finite trigonometric series in `2πkx` or a
//! piecewise-constant function on half-open segments of `[0, 1)`. Keeping the
//! description symbolic gives exact point values and derivatives at the
//! interface `x = 0`, which a sampled coefficient cannot.
//!
//! An [`InterfaceMedium`] glues two [`PeriodicMedium`] halves along `x = 0`:
//! `side1` for `x > 0`, `side2` for `x < 0`. Point evaluation at exactly
//! `x = 0` uses `side1`; quadrature nodes at `x = 0` use the mean of the two
//! one-sided limits (see [`Medium::node_values`]).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;
const SEGMENT_EPS: f64 = 1e-12;
const SUP_SAMPLES: usize = 8192;

/// One term `amplitude · cos(2π·frequency·x)` (or `sin`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Harmonic {
    pub frequency: u32,
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrigSeries {
    pub constant: f64,
    pub cos: Vec<Harmonic>,
    pub sin: Vec<Harmonic>,
}

/// A half-open piece `[start, end)` of `[0, 1)` carrying a constant value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

/// Bounded 1-periodic real function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDescriptor", into = "RawDescriptor")]
pub enum FunctionDescriptor {
    Trig(TrigSeries),
    Piecewise(Vec<Segment>),
}

/// JSON shape: `{"const": 1.0, "cos": [[1, 0.5]], "sin": [[2, 0.1]]}` or
/// `{"segments": [[0.0, 0.5, 1.0], [0.5, 1.0, 2.0]]}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDescriptor {
    #[serde(rename = "const", default, skip_serializing_if = "Option::is_none")]
    constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cos: Option<Vec<(u32, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sin: Option<Vec<(u32, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    segments: Option<Vec<(f64, f64, f64)>>,
}

impl TryFrom<RawDescriptor> for FunctionDescriptor {
    type Error = Error;

    fn try_from(raw: RawDescriptor) -> Result<Self> {
        let has_trig = raw.cos.as_ref().is_some_and(|c| !c.is_empty())
            || raw.sin.as_ref().is_some_and(|s| !s.is_empty())
            || raw.constant.is_some_and(|c| c != 0.0);
        match raw.segments {
            Some(segments) => {
                if has_trig {
                    return Err(Error::InvalidDescriptor(
                        "descriptor mixes trigonometric terms with piecewise segments".into(),
                    ));
                }
                FunctionDescriptor::piecewise(
                    segments
                        .into_iter()
                        .map(|(start, end, value)| Segment { start, end, value })
                        .collect(),
                )
            }
            None => {
                let to_harmonics = |v: Option<Vec<(u32, f64)>>| {
                    v.unwrap_or_default()
                        .into_iter()
                        .map(|(frequency, amplitude)| Harmonic { frequency, amplitude })
                        .collect::<Vec<_>>()
                };
                FunctionDescriptor::trig(
                    raw.constant.unwrap_or(0.0),
                    to_harmonics(raw.cos),
                    to_harmonics(raw.sin),
                )
            }
        }
    }
}

impl From<FunctionDescriptor> for RawDescriptor {
    fn from(d: FunctionDescriptor) -> Self {
        match d {
            FunctionDescriptor::Trig(t) => {
                let pairs = |h: &[Harmonic]| {
                    (!h.is_empty()).then(|| h.iter().map(|h| (h.frequency, h.amplitude)).collect())
                };
                RawDescriptor {
                    constant: Some(t.constant),
                    cos: pairs(&t.cos),
                    sin: pairs(&t.sin),
                    segments: None,
                }
            }
            FunctionDescriptor::Piecewise(segs) => RawDescriptor {
                segments: Some(segs.iter().map(|s| (s.start, s.end, s.value)).collect()),
                ..Default::default()
            },
        }
    }
}

fn check_finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDescriptor(format!("{what} is not finite")))
    }
}

impl FunctionDescriptor {
    pub fn constant(value: f64) -> Self {
        FunctionDescriptor::Trig(TrigSeries {
            constant: value,
            ..Default::default()
        })
    }

    /// `constant + Σ a cos(2πkx) + Σ b sin(2πkx)`.
    pub fn trig(constant: f64, cos: Vec<Harmonic>, sin: Vec<Harmonic>) -> Result<Self> {
        check_finite(constant, "constant term")?;
        for h in cos.iter().chain(sin.iter()) {
            if h.frequency == 0 {
                return Err(Error::InvalidDescriptor(
                    "harmonic frequencies must be positive integers".into(),
                ));
            }
            check_finite(h.amplitude, "harmonic amplitude")?;
        }
        Ok(FunctionDescriptor::Trig(TrigSeries { constant, cos, sin }))
    }

    /// `constant + Σ a_k cos(2π k x)` from `(k, a_k)` pairs.
    pub fn cosine_series(constant: f64, terms: &[(u32, f64)]) -> Result<Self> {
        let cos = terms
            .iter()
            .map(|&(frequency, amplitude)| Harmonic { frequency, amplitude })
            .collect();
        Self::trig(constant, cos, Vec::new())
    }

    /// Segments must partition `[0, 1)` in order.
    pub fn piecewise(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidDescriptor("no segments".into()));
        }
        let mut expected = 0.0;
        for s in &segments {
            check_finite(s.value, "segment value")?;
            if (s.start - expected).abs() > SEGMENT_EPS {
                return Err(Error::InvalidDescriptor(format!(
                    "segments must partition [0,1) contiguously; gap or overlap at {}",
                    s.start
                )));
            }
            if s.end <= s.start {
                return Err(Error::InvalidDescriptor(format!(
                    "empty or reversed segment [{}, {})",
                    s.start, s.end
                )));
            }
            expected = s.end;
        }
        if (expected - 1.0).abs() > SEGMENT_EPS {
            return Err(Error::InvalidDescriptor(format!(
                "segments end at {expected}, not 1"
            )));
        }
        let mut segments = segments;
        segments[0].start = 0.0;
        let last = segments.len() - 1;
        segments[last].end = 1.0;
        Ok(FunctionDescriptor::Piecewise(segments))
    }

    pub fn is_piecewise(&self) -> bool {
        matches!(self, FunctionDescriptor::Piecewise(_))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let y = x.rem_euclid(1.0);
        match self {
            FunctionDescriptor::Trig(t) => {
                let mut acc = t.constant;
                for h in &t.cos {
                    acc += h.amplitude * (TWO_PI * h.frequency as f64 * y).cos();
                }
                for h in &t.sin {
                    acc += h.amplitude * (TWO_PI * h.frequency as f64 * y).sin();
                }
                acc
            }
            FunctionDescriptor::Piecewise(segs) => segment_at(segs, y).value,
        }
    }

    /// `(f(x⁻), f(x⁺))`. Equal for trigonometric descriptors.
    pub fn one_sided(&self, x: f64) -> (f64, f64) {
        match self {
            FunctionDescriptor::Trig(_) => {
                let v = self.eval(x);
                (v, v)
            }
            FunctionDescriptor::Piecewise(segs) => {
                let y = x.rem_euclid(1.0);
                let n = segs.len();
                let at_start = segs.iter().position(|s| {
                    (s.start - y).abs() < SEGMENT_EPS || (s.start + 1.0 - y).abs() < SEGMENT_EPS
                });
                match at_start {
                    Some(i) if n > 1 => (segs[(i + n - 1) % n].value, segs[i].value),
                    _ => {
                        let v = segment_at(segs, y).value;
                        (v, v)
                    }
                }
            }
        }
    }

    /// Value used at a quadrature node: the mean of the one-sided limits.
    pub fn node_value(&self, x: f64) -> f64 {
        let (l, r) = self.one_sided(x);
        0.5 * (l + r)
    }

    /// True when the one-sided limits at `x` differ.
    pub fn has_breakpoint_at(&self, x: f64) -> bool {
        let (l, r) = self.one_sided(x);
        l != r
    }

    /// First derivative. Piecewise descriptors have zero derivative away
    /// from breakpoints and none at a breakpoint.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        match self {
            FunctionDescriptor::Trig(t) => {
                let y = x.rem_euclid(1.0);
                let mut acc = 0.0;
                for h in &t.cos {
                    let w = TWO_PI * h.frequency as f64;
                    acc -= h.amplitude * w * (w * y).sin();
                }
                for h in &t.sin {
                    let w = TWO_PI * h.frequency as f64;
                    acc += h.amplitude * w * (w * y).cos();
                }
                Ok(acc)
            }
            FunctionDescriptor::Piecewise(_) => {
                if self.has_breakpoint_at(x) {
                    Err(Error::NotDifferentiable { x })
                } else {
                    Ok(0.0)
                }
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        match self {
            FunctionDescriptor::Trig(t) => {
                let y = x.rem_euclid(1.0);
                let mut acc = 0.0;
                for h in &t.cos {
                    let w = TWO_PI * h.frequency as f64;
                    acc -= h.amplitude * w * w * (w * y).cos();
                }
                for h in &t.sin {
                    let w = TWO_PI * h.frequency as f64;
                    acc -= h.amplitude * w * w * (w * y).sin();
                }
                Ok(acc)
            }
            FunctionDescriptor::Piecewise(_) => self.derivative(x),
        }
    }

    /// Mean over one period.
    pub fn mean(&self) -> f64 {
        match self {
            FunctionDescriptor::Trig(t) => t.constant,
            FunctionDescriptor::Piecewise(segs) => {
                segs.iter().map(|s| (s.end - s.start) * s.value).sum()
            }
        }
    }

    /// Rigorous upper bound on `sup f`; exact for piecewise descriptors and
    /// for trigonometric series with at most one frequency.
    pub fn sup_bound(&self) -> f64 {
        match self {
            FunctionDescriptor::Trig(t) => t.constant + self.amplitude_sum(),
            FunctionDescriptor::Piecewise(segs) => {
                segs.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    /// Rigorous lower bound on `inf f`; exactness as for [`Self::sup_bound`].
    pub fn inf_bound(&self) -> f64 {
        match self {
            FunctionDescriptor::Trig(t) => t.constant - self.amplitude_sum(),
            FunctionDescriptor::Piecewise(segs) => {
                segs.iter().map(|s| s.value).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Upper bound on `‖f‖_∞`.
    pub fn abs_bound(&self) -> f64 {
        self.sup_bound().abs().max(self.inf_bound().abs())
    }

    /// Largest value over a dense uniform sample of one period. A lower
    /// bound on `sup f`, so `sampled_sup() > 0` proves `sup f > 0`.
    pub fn sampled_sup(&self) -> f64 {
        match self {
            FunctionDescriptor::Piecewise(_) => self.sup_bound(),
            FunctionDescriptor::Trig(_) => (0..SUP_SAMPLES)
                .map(|i| self.eval(i as f64 / SUP_SAMPLES as f64))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn amplitude_sum(&self) -> f64 {
        let FunctionDescriptor::Trig(t) = self else {
            return 0.0;
        };
        let mut freqs: Vec<u32> = t.cos.iter().chain(t.sin.iter()).map(|h| h.frequency).collect();
        freqs.sort_unstable();
        freqs.dedup();
        freqs
            .into_iter()
            .map(|k| {
                let a: f64 = t.cos.iter().filter(|h| h.frequency == k).map(|h| h.amplitude).sum();
                let b: f64 = t.sin.iter().filter(|h| h.frequency == k).map(|h| h.amplitude).sum();
                a.hypot(b)
            })
            .sum()
    }

    /// `x ↦ f(x + shift)`, realized in the descriptor.
    pub fn shifted(&self, shift: f64) -> Self {
        match self {
            FunctionDescriptor::Trig(t) => {
                let mut cos = Vec::new();
                let mut sin = Vec::new();
                // cos(w(x+s)) = cos(wx)cos(ws) − sin(wx)sin(ws)
                // sin(w(x+s)) = sin(wx)cos(ws) + cos(wx)sin(ws)
                for h in &t.cos {
                    let phase = TWO_PI * h.frequency as f64 * shift.rem_euclid(1.0);
                    cos.push(Harmonic { frequency: h.frequency, amplitude: h.amplitude * phase.cos() });
                    sin.push(Harmonic { frequency: h.frequency, amplitude: -h.amplitude * phase.sin() });
                }
                for h in &t.sin {
                    let phase = TWO_PI * h.frequency as f64 * shift.rem_euclid(1.0);
                    sin.push(Harmonic { frequency: h.frequency, amplitude: h.amplitude * phase.cos() });
                    cos.push(Harmonic { frequency: h.frequency, amplitude: h.amplitude * phase.sin() });
                }
                FunctionDescriptor::Trig(TrigSeries {
                    constant: t.constant,
                    cos: merge_harmonics(cos),
                    sin: merge_harmonics(sin),
                })
            }
            FunctionDescriptor::Piecewise(segs) => {
                let s = shift.rem_euclid(1.0);
                let mut out = Vec::with_capacity(segs.len() + 1);
                for seg in segs {
                    let (a, b) = (seg.start - s, seg.end - s);
                    if b <= 0.0 {
                        out.push(Segment { start: a + 1.0, end: b + 1.0, value: seg.value });
                    } else if a < 0.0 {
                        out.push(Segment { start: a + 1.0, end: 1.0, value: seg.value });
                        out.push(Segment { start: 0.0, end: b, value: seg.value });
                    } else {
                        out.push(Segment { start: a, end: b, value: seg.value });
                    }
                }
                FunctionDescriptor::Piecewise(normalize_segments(out))
            }
        }
    }

    /// `x ↦ f(−x)`.
    pub fn reflected(&self) -> Self {
        match self {
            FunctionDescriptor::Trig(t) => FunctionDescriptor::Trig(TrigSeries {
                constant: t.constant,
                cos: t.cos.clone(),
                sin: t
                    .sin
                    .iter()
                    .map(|h| Harmonic { frequency: h.frequency, amplitude: -h.amplitude })
                    .collect(),
            }),
            FunctionDescriptor::Piecewise(segs) => {
                let out = segs
                    .iter()
                    .map(|s| Segment { start: 1.0 - s.end, end: 1.0 - s.start, value: s.value })
                    .collect();
                FunctionDescriptor::Piecewise(normalize_segments(out))
            }
        }
    }

    /// `x ↦ factor · f(k x)` for a positive integer `k`.
    pub fn compressed(&self, k: u32, factor: f64) -> Self {
        match self {
            FunctionDescriptor::Trig(t) => {
                let map = |h: &[Harmonic]| {
                    h.iter()
                        .map(|h| Harmonic { frequency: h.frequency * k, amplitude: factor * h.amplitude })
                        .collect()
                };
                FunctionDescriptor::Trig(TrigSeries {
                    constant: factor * t.constant,
                    cos: map(&t.cos),
                    sin: map(&t.sin),
                })
            }
            FunctionDescriptor::Piecewise(segs) => {
                let kf = k as f64;
                let out = (0..k)
                    .flat_map(|j| {
                        segs.iter().map(move |s| Segment {
                            start: (s.start + j as f64) / kf,
                            end: (s.end + j as f64) / kf,
                            value: factor * s.value,
                        })
                    })
                    .collect();
                FunctionDescriptor::Piecewise(normalize_segments(out))
            }
        }
    }

    /// `self − other` when both descriptors share a representation.
    pub fn difference(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (FunctionDescriptor::Trig(a), FunctionDescriptor::Trig(b)) => {
                let neg = |h: &[Harmonic]| -> Vec<Harmonic> {
                    h.iter().map(|h| Harmonic { frequency: h.frequency, amplitude: -h.amplitude }).collect()
                };
                Some(FunctionDescriptor::Trig(TrigSeries {
                    constant: a.constant - b.constant,
                    cos: merge_harmonics(a.cos.iter().copied().chain(neg(&b.cos)).collect()),
                    sin: merge_harmonics(a.sin.iter().copied().chain(neg(&b.sin)).collect()),
                }))
            }
            (FunctionDescriptor::Piecewise(_), FunctionDescriptor::Piecewise(_)) => {
                let mut cuts: Vec<f64> = self.breakpoints();
                cuts.extend(other.breakpoints());
                cuts.push(1.0);
                cuts.sort_by(f64::total_cmp);
                cuts.dedup_by(|a, b| (*a - *b).abs() < SEGMENT_EPS);
                let mut out = Vec::new();
                let mut start = 0.0;
                for &end in &cuts {
                    if end - start < SEGMENT_EPS {
                        continue;
                    }
                    let mid = 0.5 * (start + end);
                    out.push(Segment { start, end, value: self.eval(mid) - other.eval(mid) });
                    start = end;
                }
                Some(FunctionDescriptor::Piecewise(normalize_segments(out)))
            }
            _ => None,
        }
    }

    /// Segment start points in `[0, 1)`; empty for trigonometric descriptors.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            FunctionDescriptor::Trig(_) => Vec::new(),
            FunctionDescriptor::Piecewise(segs) => segs.iter().map(|s| s.start).collect(),
        }
    }
}

fn segment_at(segs: &[Segment], y: f64) -> &Segment {
    segs.iter()
        .find(|s| y >= s.start && y < s.end)
        .unwrap_or_else(|| segs.last().expect("validated non-empty"))
}

fn merge_harmonics(mut hs: Vec<Harmonic>) -> Vec<Harmonic> {
    hs.sort_by_key(|h| h.frequency);
    let mut out: Vec<Harmonic> = Vec::with_capacity(hs.len());
    for h in hs {
        match out.last_mut() {
            Some(last) if last.frequency == h.frequency => last.amplitude += h.amplitude,
            _ => out.push(h),
        }
    }
    out.retain(|h| h.amplitude != 0.0);
    out
}

/// Sorts, drops slivers, merges equal neighbours and snaps the ends to 0 and 1.
fn normalize_segments(mut segs: Vec<Segment>) -> Vec<Segment> {
    segs.retain(|s| s.end - s.start > SEGMENT_EPS);
    segs.sort_by(|a, b| a.start.total_cmp(&b.start));
    let mut out: Vec<Segment> = Vec::with_capacity(segs.len());
    for s in segs {
        match out.last_mut() {
            Some(last) if last.value == s.value => last.end = s.end,
            Some(last) => {
                let start = last.end;
                out.push(Segment { start, ..s });
            }
            None => out.push(s),
        }
    }
    if let Some(first) = out.first_mut() {
        first.start = 0.0;
    }
    if let Some(last) = out.last_mut() {
        last.end = 1.0;
    }
    out
}

/// One side of the problem: the pair `(V, Γ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicMedium {
    #[serde(rename = "V")]
    pub v: FunctionDescriptor,
    #[serde(rename = "Gamma")]
    pub gamma: FunctionDescriptor,
}

impl PeriodicMedium {
    /// Requires `sup Γ > 0`.
    pub fn new(v: FunctionDescriptor, gamma: FunctionDescriptor) -> Result<Self> {
        let m = PeriodicMedium { v, gamma };
        m.check_h2("medium")?;
        Ok(m)
    }

    pub fn constant(v: f64, gamma: f64) -> Result<Self> {
        Self::new(FunctionDescriptor::constant(v), FunctionDescriptor::constant(gamma))
    }

    pub fn check_h2(&self, side: &str) -> Result<()> {
        let sup = self.gamma.sampled_sup();
        if sup > 0.0 {
            Ok(())
        } else {
            Err(Error::H2Violation { side: side.to_string(), sup })
        }
    }

    pub fn eval(&self, x: f64) -> (f64, f64) {
        (self.v.eval(x), self.gamma.eval(x))
    }
}

/// Two periodic media glued along `x = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterfaceMedium {
    /// Used for `x > 0` (and at `x = 0` for point evaluation).
    pub side1: PeriodicMedium,
    /// Used for `x < 0`.
    pub side2: PeriodicMedium,
}

impl InterfaceMedium {
    pub fn eval(&self, x: f64) -> (f64, f64) {
        if x >= 0.0 {
            self.side1.eval(x)
        } else {
            self.side2.eval(x)
        }
    }

    /// The interface seen from the other side: `x ↦ −x`, sides swapped.
    pub fn reflected(&self) -> Self {
        InterfaceMedium {
            side1: PeriodicMedium {
                v: self.side2.v.reflected(),
                gamma: self.side2.gamma.reflected(),
            },
            side2: PeriodicMedium {
                v: self.side1.v.reflected(),
                gamma: self.side1.gamma.reflected(),
            },
        }
    }
}

/// Either kind of medium; what the variational layer consumes.
#[derive(Clone, Debug, PartialEq)]
pub enum Medium {
    Periodic(PeriodicMedium),
    Interface(InterfaceMedium),
}

impl From<PeriodicMedium> for Medium {
    fn from(m: PeriodicMedium) -> Self {
        Medium::Periodic(m)
    }
}

impl From<InterfaceMedium> for Medium {
    fn from(m: InterfaceMedium) -> Self {
        Medium::Interface(m)
    }
}

impl Medium {
    /// `(V(x), Γ(x))`; at `x = 0` an interface uses side 1.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match self {
            Medium::Periodic(m) => m.eval(x),
            Medium::Interface(m) => m.eval(x),
        }
    }

    /// Coefficients at a quadrature node: jumps (including the interface
    /// at `x = 0`) contribute the mean of the two one-sided limits.
    pub fn node_values(&self, x: f64) -> (f64, f64) {
        match self {
            Medium::Periodic(m) => (m.v.node_value(x), m.gamma.node_value(x)),
            Medium::Interface(m) => {
                if x > 0.0 {
                    (m.side1.v.node_value(x), m.side1.gamma.node_value(x))
                } else if x < 0.0 {
                    (m.side2.v.node_value(x), m.side2.gamma.node_value(x))
                } else {
                    let (v2, _) = m.side2.v.one_sided(0.0);
                    let (g2, _) = m.side2.gamma.one_sided(0.0);
                    let (_, v1) = m.side1.v.one_sided(0.0);
                    let (_, g1) = m.side1.gamma.one_sided(0.0);
                    (0.5 * (v1 + v2), 0.5 * (g1 + g2))
                }
            }
        }
    }

    pub fn sides(&self) -> Vec<&PeriodicMedium> {
        match self {
            Medium::Periodic(m) => vec![m],
            Medium::Interface(m) => vec![&m.side1, &m.side2],
        }
    }
}

/// `eval_medium` as a free function.
pub fn eval_medium(m: &Medium, x: f64) -> (f64, f64) {
    m.eval(x)
}

pub fn compose_interface(m1: PeriodicMedium, m2: PeriodicMedium) -> Result<InterfaceMedium> {
    m1.check_h2("side1")?;
    m2.check_h2("side2")?;
    Ok(InterfaceMedium { side1: m1, side2: m2 })
}

/// Dislocated interface: `V₀(x+τ), Γ₀(x+σ)` for `x > 0` and
/// `V₀(x−τ), Γ₀(x−σ)` for `x < 0`.
pub fn dislocate(
    v0: &FunctionDescriptor,
    gamma0: &FunctionDescriptor,
    tau: f64,
    sigma: f64,
) -> Result<InterfaceMedium> {
    compose_interface(
        PeriodicMedium { v: v0.shifted(tau), gamma: gamma0.shifted(sigma) },
        PeriodicMedium { v: v0.shifted(-tau), gamma: gamma0.shifted(-sigma) },
    )
}

/// `V₁(x) = k² V₂(kx)`, `Γ₁(x) = γ² Γ₂(kx)`.
pub fn scaled_pair(m2: &PeriodicMedium, k: i64, gamma: f64) -> Result<PeriodicMedium> {
    if k < 1 || k > u32::MAX as i64 {
        return Err(Error::InvalidScale(k));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParams(format!("scaling gamma = {gamma} must be positive")));
    }
    let k32 = k as u32;
    let kf = k as f64;
    PeriodicMedium::new(m2.v.compressed(k32, kf * kf), m2.gamma.compressed(k32, gamma * gamma))
}

/// Exponent `p` and spectral parameter `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub p: f64,
    pub lambda: f64,
}

impl ProblemParams {
    pub fn new(p: f64, lambda: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParams(format!("exponent p = {p} must satisfy p > 1")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParams("lambda must be finite".into()));
        }
        Ok(ProblemParams { p, lambda })
    }

    /// `η = 1/2 − 1/(p+1)`, so that `J = η |||u|||²` on the Nehari manifold.
    pub fn eta(&self) -> f64 {
        0.5 - 1.0 / (self.p + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mathieu(a: f64) -> FunctionDescriptor {
        FunctionDescriptor::cosine_series(1.0, &[(1, a)]).unwrap()
    }

    #[test]
    fn evaluates_constant_and_cosine() {
        assert_eq!(FunctionDescriptor::constant(1.0).eval(0.37), 1.0);
        assert!((mathieu(0.5).eval(0.25) - 1.0).abs() < 1e-15);
        assert!((mathieu(0.5).eval(0.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn interface_dispatches_on_sign() {
        let m = compose_interface(
            PeriodicMedium::constant(1.0, 1.0).unwrap(),
            PeriodicMedium::constant(2.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(m.eval(-0.1).0, 2.0);
        assert_eq!(m.eval(0.1).0, 1.0);
        assert_eq!(m.eval(0.0).0, 1.0);
        let node = Medium::Interface(m).node_values(0.0);
        assert_eq!(node.0, 1.5);
    }

    #[test]
    fn degenerate_interface_matches_periodic() {
        let base = PeriodicMedium::new(mathieu(0.3), FunctionDescriptor::constant(1.0)).unwrap();
        let m = compose_interface(base.clone(), base.clone()).unwrap();
        for i in -50..50 {
            let x = i as f64 * 0.037;
            assert_eq!(m.eval(x), base.eval(x));
        }
    }

    #[test]
    fn rejects_nonpositive_gamma() {
        let bad = PeriodicMedium { v: FunctionDescriptor::constant(1.0), gamma: FunctionDescriptor::constant(-1.0) };
        let good = PeriodicMedium::constant(1.0, 1.0).unwrap();
        assert!(matches!(compose_interface(good, bad), Err(Error::H2Violation { .. })));
        assert!(matches!(PeriodicMedium::constant(1.0, -1.0), Err(Error::H2Violation { .. })));
    }

    #[test]
    fn dislocation_evaluates_shifted_base() {
        let v0 = mathieu(0.5);
        let g0 = FunctionDescriptor::constant(1.0);
        let m = dislocate(&v0, &g0, 0.25, 0.25).unwrap();
        assert!((m.side1.v.eval(0.0) - 1.0).abs() < 1e-15);
        let zero = dislocate(&v0, &g0, 0.0, 0.0).unwrap();
        assert_eq!(zero.side1.v.eval(0.3), v0.eval(0.3));
        assert_eq!(zero.side2.v.eval(0.3), v0.eval(0.3));
    }

    #[test]
    fn scaled_pair_cases() {
        let m2 = PeriodicMedium::new(mathieu(0.3), FunctionDescriptor::constant(1.0)).unwrap();
        assert_eq!(scaled_pair(&m2, 1, 1.0).unwrap(), m2);
        let c = PeriodicMedium::constant(1.0, 1.0).unwrap();
        assert_eq!(scaled_pair(&c, 2, 1.0).unwrap().v.eval(0.123), 4.0);
        let m1 = scaled_pair(&m2, 2, 1.0).unwrap();
        let expected = FunctionDescriptor::cosine_series(4.0, &[(2, 1.2)]).unwrap();
        assert_eq!(m1.v, expected);
        assert!(matches!(scaled_pair(&m2, 0, 1.0), Err(Error::InvalidScale(0))));
    }

    #[test]
    fn piecewise_validation_and_shift() {
        let seg = |a, b, v| Segment { start: a, end: b, value: v };
        assert!(FunctionDescriptor::piecewise(vec![seg(0.0, 0.4, 1.0), seg(0.5, 1.0, 2.0)]).is_err());
        assert!(FunctionDescriptor::piecewise(vec![seg(0.0, 0.6, 1.0), seg(0.5, 1.0, 2.0)]).is_err());
        let f = FunctionDescriptor::piecewise(vec![seg(0.0, 0.5, 1.0), seg(0.5, 1.0, 2.0)]).unwrap();
        assert_eq!(f.eval(0.25), 1.0);
        assert_eq!(f.eval(0.5), 2.0);
        assert_eq!(f.eval(-0.25), 2.0);
        assert_eq!(f.one_sided(0.0), (2.0, 1.0));
        assert_eq!(f.node_value(0.5), 1.5);
        let g = f.shifted(0.2);
        for i in 0..97 {
            let x = i as f64 / 97.0 + 0.003;
            assert_eq!(g.eval(x), f.eval(x + 0.2), "x = {x}");
        }
        let r = f.reflected();
        assert_eq!(r.eval(0.25), f.eval(-0.25));
        assert!(f.derivative(0.0).is_err());
        assert_eq!(f.derivative(0.3).unwrap(), 0.0);
    }

    #[test]
    fn mixed_descriptor_is_rejected() {
        let json = r#"{"const": 1.0, "segments": [[0.0, 1.0, 1.0]]}"#;
        assert!(serde_json::from_str::<FunctionDescriptor>(json).is_err());
        let json = r#"{"const": 1.0, "cos": [[1, 0.5]]}"#;
        let d: FunctionDescriptor = serde_json::from_str(json).unwrap();
        assert_eq!(d, mathieu(0.5));
    }

    #[test]
    fn bounds_and_derivatives() {
        let f = mathieu(0.5);
        assert_eq!(f.sup_bound(), 1.5);
        assert_eq!(f.inf_bound(), 0.5);
        assert_eq!(f.abs_bound(), 1.5);
        assert!((f.second_derivative(0.0).unwrap() + 2.0 * PI * PI).abs() < 1e-12);
        let shifted = f.shifted(0.25);
        assert!((shifted.derivative(0.0).unwrap() + PI).abs() < 1e-12);
    }

    #[test]
    fn eta_identity() {
        let params = ProblemParams::new(3.0, 0.0).unwrap();
        assert_eq!(params.eta(), 0.25);
        assert!(ProblemParams::new(1.0, 0.0).is_err());
    }
}
