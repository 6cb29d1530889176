//! Degree sequences, their power moments, and regime diagnostics.
//!
//! A [`DegreeSequence`] is validated once (every degree at least one, even
//! total) and caches the power sums `m_k = Σ d_i^k` for `k ≤ 5`, which is
//! everything the closed-form predictions need.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{RngStream, StreamRole};

/// Moments `m_0 ..= m_5` are cached at construction (here `m_0` is the
/// vertex count, not the minimum degree).
pub const CACHED_MOMENTS: u32 = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DegreeError {
    #[error("degree sequence is empty")]
    Empty,
    #[error("vertex {index} has degree {degree}; degrees must be at least 1")]
    NonPositiveDegree { index: usize, degree: i64 },
    #[error("degree sum {sum} is odd")]
    OddSum { sum: u128 },
    #[error("infeasible family parameters: {0}")]
    InfeasibleParams(String),
    #[error("malformed degree sequence: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<u64>")]
pub struct DegreeSequence {
    degrees: Vec<u64>,
    power_sums: [u128; CACHED_MOMENTS as usize + 1],
    min: u64,
    max: u64,
}

impl DegreeSequence {
    pub fn new(raw: &[i64]) -> Result<Self, DegreeError> {
        if raw.is_empty() {
            return Err(DegreeError::Empty);
        }
        let mut degrees = Vec::with_capacity(raw.len());
        for (index, &degree) in raw.iter().enumerate() {
            if degree < 1 {
                return Err(DegreeError::NonPositiveDegree { index, degree });
            }
            degrees.push(degree as u64);
        }
        Self::from_degrees(degrees)
    }

    pub fn from_degrees(degrees: Vec<u64>) -> Result<Self, DegreeError> {
        if degrees.is_empty() {
            return Err(DegreeError::Empty);
        }
        if let Some(index) = degrees.iter().position(|&d| d == 0) {
            return Err(DegreeError::NonPositiveDegree { index, degree: 0 });
        }
        let mut power_sums = [0u128; CACHED_MOMENTS as usize + 1];
        for &d in &degrees {
            let d = d as u128;
            let mut p = 1u128;
            for slot in power_sums.iter_mut() {
                *slot += p;
                p *= d;
            }
        }
        if power_sums[1] % 2 == 1 {
            return Err(DegreeError::OddSum { sum: power_sums[1] });
        }
        let min = *degrees.iter().min().expect("nonempty");
        let max = *degrees.iter().max().expect("nonempty");
        Ok(Self {
            degrees,
            power_sums,
            min,
            max,
        })
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> u64 {
        self.degrees[i]
    }

    /// Minimum degree `m_0`.
    pub fn m0(&self) -> u64 {
        self.min
    }

    /// Maximum degree `m_∞`.
    pub fn m_inf(&self) -> u64 {
        self.max
    }

    /// Total degree `m_1`, i.e. the number of half-edges.
    pub fn m1(&self) -> u128 {
        self.power_sums[1]
    }

    pub fn edge_count(&self) -> u128 {
        self.power_sums[1] / 2
    }

    /// Exact power sum `Σ_i d_i^k`. `k = 0` returns the vertex count.
    ///
    /// Panics if the sum overflows 128 bits, which cannot happen for `k ≤ 5`
    /// with `n ≤ 10^7` and degrees up to `10^3`.
    pub fn moment(&self, k: u32) -> u128 {
        if k <= CACHED_MOMENTS {
            return self.power_sums[k as usize];
        }
        self.degrees.iter().fold(0u128, |acc, &d| {
            let term = (d as u128).checked_pow(k).expect("degree power overflows u128");
            acc.checked_add(term).expect("moment overflows u128")
        })
    }

    pub fn moment_f64(&self, k: u32) -> f64 {
        self.moment(k) as f64
    }

    /// Average degree `ω_n = m_1 / n`.
    pub fn mean_degree(&self) -> f64 {
        self.m1() as f64 / self.len() as f64
    }

    /// First flat half-edge index of every vertex; half-edge `(i, l)` maps to
    /// `offsets[i] + l`. The final entry is `m_1`.
    pub fn half_edge_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.len() + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for &d in &self.degrees {
            acc += d as usize;
            offsets.push(acc);
        }
        offsets
    }

    /// Vertex owning each flat half-edge index.
    pub fn half_edge_owners(&self) -> Vec<u32> {
        let mut owners = Vec::with_capacity(self.m1() as usize);
        for (i, &d) in self.degrees.iter().enumerate() {
            owners.extend(std::iter::repeat_n(i as u32, d as usize));
        }
        owners
    }

    /// One degree per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 4);
        for d in &self.degrees {
            out.push_str(&d.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the one-column format; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self, DegreeError> {
        let mut raw = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let d: i64 = line
                .parse()
                .map_err(|_| DegreeError::Parse(format!("line {}: {line:?}", lineno + 1)))?;
            raw.push(d);
        }
        Self::new(&raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("degree sequences always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, DegreeError> {
        serde_json::from_str(text).map_err(|e| DegreeError::Parse(e.to_string()))
    }
}

impl TryFrom<Vec<i64>> for DegreeSequence {
    type Error = DegreeError;

    fn try_from(raw: Vec<i64>) -> Result<Self, Self::Error> {
        Self::new(&raw)
    }
}

impl From<DegreeSequence> for Vec<u64> {
    fn from(seq: DegreeSequence) -> Self {
        seq.degrees
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Pass,
    Warn,
}

/// Where a sequence sits relative to the bounded-inhomogeneity and
/// sparsity regime (`m_0 ≍ m_∞`, `1 ≪ m_∞ ≪ √n`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub n: usize,
    pub m0: u64,
    pub m_inf: u64,
    /// `m_∞ / m_0`, at least one.
    pub ratio_inhomogeneity: f64,
    /// `m_∞ / √n`; the regime requires this to vanish.
    pub sparsity_index: f64,
    pub inhomogeneity: Flag,
    pub sparsity: Flag,
    pub notes: Vec<String>,
}

/// Inhomogeneity ratios above this are reported as a warning.
pub const MAX_INHOMOGENEITY_RATIO: f64 = 10.0;
/// Sparsity indices at or above this value get a margin note.
pub const SPARSITY_MARGIN: f64 = 0.5;

pub fn assumption_diagnostics(seq: &DegreeSequence) -> AssumptionReport {
    let n = seq.len();
    let ratio = seq.m_inf() as f64 / seq.m0() as f64;
    let sparsity = seq.m_inf() as f64 / (n as f64).sqrt();
    let mut notes = Vec::new();

    let inhomogeneity = if ratio > MAX_INHOMOGENEITY_RATIO {
        notes.push(format!(
            "max/min degree ratio {ratio:.2} exceeds {MAX_INHOMOGENEITY_RATIO}"
        ));
        Flag::Warn
    } else {
        Flag::Pass
    };
    let sparsity_flag = if sparsity >= 1.0 {
        notes.push(format!(
            "max degree {} is not below sqrt(n) = {:.2}",
            seq.m_inf(),
            (n as f64).sqrt()
        ));
        Flag::Warn
    } else {
        if sparsity >= SPARSITY_MARGIN {
            notes.push(format!(
                "max degree is within a factor {:.2} of sqrt(n); finite-size corrections may be visible",
                1.0 / sparsity
            ));
        }
        Flag::Pass
    };
    if seq.m_inf() < 3 {
        notes.push("max degree below 3; the large-degree regime is not reached".into());
    }

    AssumptionReport {
        n,
        m0: seq.m0(),
        m_inf: seq.m_inf(),
        ratio_inhomogeneity: ratio,
        sparsity_index: sparsity,
        inhomogeneity,
        sparsity: sparsity_flag,
        notes,
    }
}

/// Erdős–Gallai test: a simple graph with these degrees exists.
pub fn is_graphical(seq: &DegreeSequence) -> bool {
    let mut d: Vec<u64> = seq.degrees().to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let n = d.len();
    if d[0] as usize >= n {
        return false;
    }
    let mut prefix = vec![0u128; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + d[i] as u128;
    }
    // `p` = number of leading entries with degree >= k; non-increasing in k.
    let mut p = n;
    for k in 1..=n {
        while p > 0 && (d[p - 1] as usize) < k {
            p -= 1;
        }
        let lhs = prefix[k];
        let kk = k as u128;
        // Σ_{i>k} min(d_i, k): entries in k..p contribute k, the rest contribute d_i.
        let capped = if p > k { (p - k) as u128 * kk } else { 0 };
        let tail = prefix[n] - prefix[p.max(k)];
        if lhs > kk * (kk - 1) + capped + tail {
            return false;
        }
    }
    true
}

/// Parametric degree-sequence fixtures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeFamily {
    /// Every vertex has degree `d`.
    Regular { d: u64 },
    /// Degrees drawn independently and uniformly from `lo..=hi`.
    Band { lo: u64, hi: u64 },
    /// First `⌊n/2⌋` vertices get `low`, the rest `high`.
    TwoBlock { low: u64, high: u64 },
    /// Band whose upper end grows with `n`: `hi = round(n^exponent)`,
    /// `lo = max(1, ceil(lo_ratio * hi))`.
    BandPower { exponent: f64, lo_ratio: f64 },
}

impl DegreeFamily {
    /// Resolves size-dependent families to a concrete one for `n` vertices.
    pub fn resolve(&self, n: usize) -> Result<DegreeFamily, DegreeError> {
        match *self {
            DegreeFamily::BandPower { exponent, lo_ratio } => {
                if !(exponent > 0.0 && exponent < 1.0) || !(lo_ratio > 0.0 && lo_ratio <= 1.0) {
                    return Err(DegreeError::InfeasibleParams(format!(
                        "band_power needs 0 < exponent < 1 and 0 < lo_ratio <= 1, got {exponent}, {lo_ratio}"
                    )));
                }
                let hi = ((n as f64).powf(exponent).round() as u64).max(1);
                let lo = ((lo_ratio * hi as f64).ceil() as u64).clamp(1, hi);
                Ok(DegreeFamily::Band { lo, hi })
            }
            ref other => Ok(other.clone()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DegreeFamily::Regular { d } => format!("regular(d={d})"),
            DegreeFamily::Band { lo, hi } => format!("band({lo}..{hi})"),
            DegreeFamily::TwoBlock { low, high } => format!("two_block({low},{high})"),
            DegreeFamily::BandPower { exponent, lo_ratio } => {
                format!("band_power(exp={exponent},lo_ratio={lo_ratio})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySample {
    pub sequence: DegreeSequence,
    /// The last degree was incremented by one to make the sum even.
    pub parity_adjusted: bool,
}

/// Builds a fixture sequence. Random families draw from the dedicated family
/// stream of `seed`, so the result depends only on `(family, n, seed)`.
/// An odd total is repaired by incrementing the last degree.
pub fn make_family(family: &DegreeFamily, n: usize, seed: u64) -> Result<FamilySample, DegreeError> {
    if n < 2 {
        return Err(DegreeError::InfeasibleParams(format!("need n >= 2, got {n}")));
    }
    let mut degrees = match family.resolve(n)? {
        DegreeFamily::Regular { d } => {
            if d < 1 {
                return Err(DegreeError::InfeasibleParams("regular degree must be >= 1".into()));
            }
            vec![d; n]
        }
        DegreeFamily::Band { lo, hi } => {
            if lo < 1 || lo > hi {
                return Err(DegreeError::InfeasibleParams(format!(
                    "band needs 1 <= lo <= hi, got lo={lo}, hi={hi}"
                )));
            }
            let mut rng = RngStream::for_role(seed, StreamRole::Family, 0);
            let width = hi - lo + 1;
            (0..n).map(|_| lo + rng.below(width)).collect()
        }
        DegreeFamily::TwoBlock { low, high } => {
            if low < 1 || high < 1 {
                return Err(DegreeError::InfeasibleParams("block degrees must be >= 1".into()));
            }
            let half = n / 2;
            (0..n).map(|i| if i < half { low } else { high }).collect()
        }
        DegreeFamily::BandPower { .. } => unreachable!("resolved above"),
    };
    let total: u128 = degrees.iter().map(|&d| d as u128).sum();
    let parity_adjusted = total % 2 == 1;
    if parity_adjusted {
        *degrees.last_mut().expect("n >= 2") += 1;
    }
    Ok(FamilySample {
        sequence: DegreeSequence::from_degrees(degrees)?,
        parity_adjusted,
    })
}
