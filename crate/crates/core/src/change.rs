//! Change detection over bounded real streams.

use std::collections::VecDeque;
use std::fmt::Debug;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectorError {
    #[error("input {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("estimate of an empty window")]
    Empty,
}

/// Interface shared by tree-node detectors. Inputs are 1 for an error and 0
/// for a correct prediction.
pub trait ChangeDetector: Debug + Send {
    /// Appends `x`; true when the detector flagged a change.
    fn add_element(&mut self, x: f64) -> Result<bool, DetectorError>;
    /// Mean of the current window.
    fn estimate(&self) -> Result<f64, DetectorError>;
    /// Number of elements in the current window.
    fn width(&self) -> u64;
    fn reset(&mut self);
    fn boxed_clone(&self) -> Box<dyn ChangeDetector>;
}

impl Clone for Box<dyn ChangeDetector> {
    fn clone(&self) -> Self {
        self.boxed_clone()
    }
}

fn check_range(x: f64) -> Result<(), DetectorError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(DetectorError::OutOfRange(x))
    }
}

/// Detector that keeps a running mean and never flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NeverFire {
    count: u64,
    sum: f64,
}

impl ChangeDetector for NeverFire {
    fn add_element(&mut self, x: f64) -> Result<bool, DetectorError> {
        check_range(x)?;
        self.count += 1;
        self.sum += x;
        Ok(false)
    }

    fn estimate(&self) -> Result<f64, DetectorError> {
        if self.count == 0 {
            return Err(DetectorError::Empty);
        }
        Ok(self.sum / self.count as f64)
    }

    fn width(&self) -> u64 {
        self.count
    }

    fn reset(&mut self) {
        *self = Self::default();
    }

    fn boxed_clone(&self) -> Box<dyn ChangeDetector> {
        Box::new(self.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bucket {
    sum: f64,
    count: u64,
}

/// Adaptive windowing over an exponential histogram.
///
/// Row `i` holds buckets of `2^i` elements, at most `max_buckets` per row,
/// each row ordered oldest (front) to newest (back). After every insertion
/// the window is scanned from the oldest end, and the prefix up to the
/// first boundary whose two sides differ by at least
/// `sqrt(ln(4/delta') / (2m))` is dropped, where `m` is the harmonic mean of
/// the two side lengths and `delta'` is `delta` split over the boundaries
/// tested. Scans repeat until no boundary qualifies.
#[derive(Debug, Clone, PartialEq)]
pub struct Adwin {
    delta: f64,
    max_buckets: usize,
    rows: Vec<VecDeque<Bucket>>,
    total_count: u64,
    total_sum: f64,
}

pub const DEFAULT_ADWIN_DELTA: f64 = 0.002;
pub const DEFAULT_MAX_BUCKETS: usize = 5;

impl Default for Adwin {
    fn default() -> Self {
        Self::new(DEFAULT_ADWIN_DELTA)
    }
}

impl Adwin {
    pub fn new(delta: f64) -> Self {
        Self::with_buckets(delta, DEFAULT_MAX_BUCKETS)
    }

    pub fn with_buckets(delta: f64, max_buckets: usize) -> Self {
        assert!(delta > 0.0 && delta < 1.0, "ADWIN delta must lie in (0, 1)");
        assert!(max_buckets >= 2, "ADWIN needs at least two buckets per row");
        Self { delta, max_buckets, rows: Vec::new(), total_count: 0, total_sum: 0.0 }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn total_sum(&self) -> f64 {
        self.total_sum
    }

    pub fn bucket_count(&self) -> usize {
        self.rows.iter().map(VecDeque::len).sum()
    }

    /// Bucket sizes from oldest to newest.
    pub fn bucket_sizes(&self) -> Vec<u64> {
        self.oldest_first().map(|b| b.count).collect()
    }

    fn oldest_first(&self) -> impl Iterator<Item = &Bucket> {
        self.rows.iter().rev().flat_map(|row| row.iter())
    }

    fn compress(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.rows[i].len() <= self.max_buckets {
                break;
            }
            let a = self.rows[i].pop_front().expect("row over capacity");
            let b = self.rows[i].pop_front().expect("row over capacity");
            if i + 1 == self.rows.len() {
                self.rows.push(VecDeque::new());
            }
            self.rows[i + 1].push_back(Bucket { sum: a.sum + b.sum, count: a.count + b.count });
            i += 1;
        }
    }

    /// Number of oldest buckets to drop, or 0 when no boundary qualifies.
    fn find_cut(&self) -> usize {
        let buckets = self.bucket_count();
        if buckets < 2 {
            return 0;
        }
        let delta_prime = self.delta / (buckets - 1) as f64;
        let log_term = (4.0 / delta_prime).ln();
        let n = self.total_count as f64;
        let (mut n0, mut s0) = (0.0, 0.0);
        for (idx, b) in self.oldest_first().enumerate().take(buckets - 1) {
            n0 += b.count as f64;
            s0 += b.sum;
            let n1 = n - n0;
            let s1 = self.total_sum - s0;
            let m = 1.0 / (1.0 / n0 + 1.0 / n1);
            let eps = (log_term / (2.0 * m)).sqrt();
            if (s0 / n0 - s1 / n1).abs() >= eps {
                return idx + 1;
            }
        }
        0
    }

    fn drop_oldest(&mut self, mut k: usize) {
        while k > 0 {
            let row = self.rows.iter_mut().rev().find(|r| !r.is_empty()).expect("bucket to drop");
            let b = row.pop_front().expect("non-empty row");
            self.total_count -= b.count;
            self.total_sum -= b.sum;
            k -= 1;
        }
        while self.rows.last().is_some_and(VecDeque::is_empty) {
            self.rows.pop();
        }
        if self.total_count == 0 {
            self.total_sum = 0.0;
        }
    }
}

impl ChangeDetector for Adwin {
    fn add_element(&mut self, x: f64) -> Result<bool, DetectorError> {
        check_range(x)?;
        if self.rows.is_empty() {
            self.rows.push(VecDeque::new());
        }
        self.rows[0].push_back(Bucket { sum: x, count: 1 });
        self.total_count += 1;
        self.total_sum += x;
        self.compress();
        let mut changed = false;
        loop {
            let k = self.find_cut();
            if k == 0 {
                break;
            }
            self.drop_oldest(k);
            changed = true;
        }
        Ok(changed)
    }

    fn estimate(&self) -> Result<f64, DetectorError> {
        if self.total_count == 0 {
            return Err(DetectorError::Empty);
        }
        Ok(self.total_sum / self.total_count as f64)
    }

    fn width(&self) -> u64 {
        self.total_count
    }

    fn reset(&mut self) {
        self.rows.clear();
        self.total_count = 0;
        self.total_sum = 0.0;
    }

    fn boxed_clone(&self) -> Box<dyn ChangeDetector> {
        Box::new(self.clone())
    }
}
