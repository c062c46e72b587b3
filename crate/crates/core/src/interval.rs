//! Finite unions of closed, disjoint, sorted intervals on the real line.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
    prefix: Vec<f64>,
}

impl From<Vec<[f64; 2]>> for IntervalUnion {
    fn from(v: Vec<[f64; 2]>) -> Self {
        IntervalUnion::from_intervals(v.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<IntervalUnion> for Vec<[f64; 2]> {
    fn from(u: IntervalUnion) -> Self {
        u.intervals.iter().map(|&(a, b)| [a, b]).collect()
    }
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Canonicalizes arbitrary intervals: drops degenerate ones, sorts, merges overlapping
    /// or touching neighbours.
    pub fn from_intervals(mut raw: Vec<(f64, f64)>) -> Self {
        raw.retain(|&(a, b)| a < b);
        raw.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        Self::from_sorted_disjoint(out)
    }

    /// Caller guarantees canonical form (sorted, disjoint, non-touching, nondegenerate).
    pub(crate) fn from_sorted_disjoint(intervals: Vec<(f64, f64)>) -> Self {
        let mut prefix = Vec::with_capacity(intervals.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &(a, b) in &intervals {
            acc += b - a;
            prefix.push(acc);
        }
        IntervalUnion { intervals, prefix }
    }

    /// Like `from_sorted_disjoint`, with lengths supplied by the caller (more accurate than
    /// endpoint differences for narrow intervals far from the origin).
    pub(crate) fn from_sorted_with_lengths(intervals: Vec<(f64, f64)>, lengths: &[f64]) -> Self {
        debug_assert_eq!(intervals.len(), lengths.len());
        let mut prefix = Vec::with_capacity(intervals.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &w in lengths {
            acc += w;
            prefix.push(acc);
        }
        IntervalUnion { intervals, prefix }
    }

    pub fn single(a: f64, b: f64) -> Self {
        Self::from_intervals(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        *self.prefix.last().unwrap_or(&0.0)
    }

    /// Smallest closed interval containing the set.
    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.intervals.partition_point(|&(a, _)| a <= x);
        i > 0 && x <= self.intervals[i - 1].1
    }

    /// `|Ω ∩ (−∞, x]|`.
    pub fn cumulative(&self, x: f64) -> f64 {
        let i = self.intervals.partition_point(|&(a, _)| a <= x);
        if i == 0 {
            return 0.0;
        }
        let (a, b) = self.intervals[i - 1];
        self.prefix[i - 1] + (x.min(b) - a)
    }

    /// `|Ω ∩ [lo, hi]|`.
    pub fn measure_in(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        (self.cumulative(hi) - self.cumulative(lo)).max(0.0)
    }

    /// Bounded complement gaps between consecutive intervals.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }

    pub fn translate(&self, t: f64) -> Self {
        Self::from_intervals(self.intervals.iter().map(|&(a, b)| (a + t, b + t)).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        assert!(s > 0.0);
        Self::from_intervals(self.intervals.iter().map(|&(a, b)| (a * s, b * s)).collect())
    }

    pub fn intersect(&self, other: &IntervalUnion) -> Self {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.len() && j < other.len() {
            let (a1, b1) = self.intervals[i];
            let (a2, b2) = other.intervals[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo < hi {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_intervals(out)
    }

    /// True when every interval of `self` lies inside some interval of `other`, up to `tol`.
    pub fn is_subset_of(&self, other: &IntervalUnion, tol: f64) -> bool {
        self.intervals.iter().all(|&(a, b)| {
            let i = other.intervals.partition_point(|&(c, _)| c <= a + tol);
            i > 0 && {
                let (c, d) = other.intervals[i - 1];
                c <= a + tol && b <= d + tol
            }
        })
    }

    /// Maximum endpoint distance between two unions with the same interval count.
    pub fn max_endpoint_distance(&self, other: &IntervalUnion) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        Some(
            self.intervals
                .iter()
                .zip(&other.intervals)
                .map(|(x, y)| (x.0 - y.0).abs().max((x.1 - y.1).abs()))
                .fold(0.0, f64::max),
        )
    }
}
