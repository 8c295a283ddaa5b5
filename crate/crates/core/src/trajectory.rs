//! Best-so-far precision traces stored at geometric checkpoints.
//!
//! Checkpoints are every evaluation up to 100, then each next checkpoint is
//! the previous one grown by 1% (rounded up). The final evaluation of a run
//! is always stored.

/// Evaluations recorded one by one before geometric spacing starts.
pub const DENSE_PREFIX: u64 = 100;

/// The checkpoint after `t`.
pub fn next_checkpoint(t: u64) -> u64 {
    if t < DENSE_PREFIX {
        t + 1
    } else {
        (t + 1).max((t * 101).div_ceil(100))
    }
}

/// All checkpoints up to and including `budget`.
pub fn checkpoint_schedule(budget: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut t = 1;
    while t <= budget {
        out.push(t);
        t = next_checkpoint(t);
    }
    if out.last() != Some(&budget) && budget > 0 {
        out.push(budget);
    }
    out
}

/// `(evaluations, best precision)` pairs, evaluations strictly increasing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    points: Vec<(u64, f64)>,
}

impl Trajectory {
    pub fn from_points(points: Vec<(u64, f64)>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Evaluations at the last stored point.
    pub fn last_evaluation(&self) -> u64 {
        self.points.last().map_or(0, |p| p.0)
    }

    pub fn final_precision(&self) -> f64 {
        self.points.last().map_or(f64::INFINITY, |p| p.1)
    }

    /// Best precision after `t` evaluations; infinite before the first one.
    /// Past the last stored point the final value holds.
    pub fn best_at(&self, t: u64) -> f64 {
        match self.points.partition_point(|p| p.0 <= t) {
            0 => f64::INFINITY,
            i => self.points[i - 1].1,
        }
    }

    /// Increasing evaluations and nonincreasing precision.
    pub fn is_well_formed(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[1].1 <= w[0].1)
    }
}

/// Builds a [`Trajectory`] from per-evaluation updates.
#[derive(Debug, Clone)]
pub struct TrajectoryRecorder {
    next: u64,
    best: f64,
    last: u64,
    points: Vec<(u64, f64)>,
}

impl Default for TrajectoryRecorder {
    fn default() -> Self {
        Self::new()
    }
}

impl TrajectoryRecorder {
    pub fn new() -> Self {
        Self {
            next: 1,
            best: f64::INFINITY,
            last: 0,
            points: Vec::new(),
        }
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    /// Registers evaluation number `t` (1-based, consecutive).
    pub fn record(&mut self, t: u64, precision: f64) {
        self.best = self.best.min(precision);
        self.last = t;
        if t == self.next {
            self.points.push((t, self.best));
            self.next = next_checkpoint(t);
        }
    }

    pub fn finish(mut self) -> Trajectory {
        if self.last > 0 && self.points.last().map(|p| p.0) != Some(self.last) {
            self.points.push((self.last, self.best));
        }
        Trajectory {
            points: self.points,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_shape() {
        let s = checkpoint_schedule(400_000);
        assert_eq!(&s[..3], &[1, 2, 3]);
        assert_eq!(s[99], 100);
        assert_eq!(s[100], 101);
        assert_eq!(*s.last().unwrap(), 400_000);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        // geometric growth keeps the trace small
        assert!(s.len() < 1500, "{}", s.len());
        assert_eq!(checkpoint_schedule(6), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn recorder_follows_schedule() {
        let mut rec = TrajectoryRecorder::new();
        for t in 1..=1000u64 {
            rec.record(t, 1000.0 / t as f64);
        }
        let tr = rec.finish();
        let evals: Vec<u64> = tr.points().iter().map(|p| p.0).collect();
        assert_eq!(evals, checkpoint_schedule(1000));
        assert!(tr.is_well_formed());
        assert_eq!(tr.best_at(0), f64::INFINITY);
        assert_eq!(tr.best_at(1), 1000.0);
        assert_eq!(tr.best_at(5000), 1.0);
    }

    #[test]
    fn early_stop_keeps_last_evaluation() {
        let mut rec = TrajectoryRecorder::new();
        for t in 1..=137u64 {
            rec.record(t, if t == 120 { 0.0 } else { 5.0 });
        }
        let tr = rec.finish();
        assert_eq!(tr.last_evaluation(), 137);
        assert_eq!(tr.final_precision(), 0.0);
        assert_eq!(tr.best_at(119), 5.0);
    }
}
