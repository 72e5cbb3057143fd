use crate::observation::Observation;

/// Which pipeline test decided a query, and by which observation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Hit {
    /// Test number, 1 through 7.
    pub test: u8,
    pub observation: Observation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnsweredBy {
    Observation(Hit),
    Fallback,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryOutcome {
    pub answer: bool,
    pub answered_by: AnsweredBy,
    /// Vertices the fallback expanded; 0 for observation answers.
    pub work: u64,
}

pub const TESTS: u8 = 7;

/// Per-observation effectiveness counters.
///
/// First-hit counters credit only the test that answered; overlap counters
/// (collected when `track_overlap` is set) credit every observation that could
/// have answered, once per query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationStats {
    first_hit: [[u64; Observation::COUNT]; TESTS as usize],
    overlap: [u64; Observation::COUNT],
    pub track_overlap: bool,
    queries: u64,
    positive: u64,
    fallback: u64,
    fallback_work: u64,
}

impl Default for ObservationStats {
    fn default() -> Self {
        Self::new()
    }
}

impl ObservationStats {
    pub fn new() -> Self {
        ObservationStats {
            first_hit: [[0; Observation::COUNT]; TESTS as usize],
            overlap: [0; Observation::COUNT],
            track_overlap: false,
            queries: 0,
            positive: 0,
            fallback: 0,
            fallback_work: 0,
        }
    }

    pub fn with_overlap() -> Self {
        ObservationStats {
            track_overlap: true,
            ..Self::new()
        }
    }

    #[inline]
    pub(crate) fn record_hit(&mut self, hit: Hit, reachable: bool) {
        self.queries += 1;
        self.positive += reachable as u64;
        self.first_hit[hit.test as usize - 1][hit.observation.index()] += 1;
    }

    #[inline]
    pub(crate) fn record_fallback(&mut self, reachable: bool, work: u64) {
        self.queries += 1;
        self.positive += reachable as u64;
        self.fallback += 1;
        self.fallback_work += work;
    }

    pub(crate) fn record_overlap(&mut self, seen: u32) {
        for obs in Observation::ALL {
            if seen >> obs.index() & 1 == 1 {
                self.overlap[obs.index()] += 1;
            }
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn positive_answers(&self) -> u64 {
        self.positive
    }

    pub fn negative_answers(&self) -> u64 {
        self.queries - self.positive
    }

    pub fn fallback_count(&self) -> u64 {
        self.fallback
    }

    /// Total vertices expanded by fallback searches.
    pub fn fallback_work(&self) -> u64 {
        self.fallback_work
    }

    pub fn fallback_rate(&self) -> Option<f64> {
        (self.queries > 0).then(|| self.fallback as f64 / self.queries as f64)
    }

    pub fn first_hit(&self, test: u8, obs: Observation) -> u64 {
        self.first_hit[test as usize - 1][obs.index()]
    }

    /// Queries answered by `test`, over all of its observations.
    pub fn test_hits(&self, test: u8) -> u64 {
        self.first_hit[test as usize - 1].iter().sum()
    }

    pub fn observation_hits(&self, obs: Observation) -> u64 {
        self.first_hit.iter().map(|row| row[obs.index()]).sum()
    }

    pub fn overlap(&self, obs: Observation) -> u64 {
        self.overlap[obs.index()]
    }

    /// Nonzero first-hit counters in test order.
    pub fn first_hits(&self) -> impl Iterator<Item = (Hit, u64)> + '_ {
        (1..=TESTS).flat_map(move |test| {
            Observation::ALL.into_iter().filter_map(move |observation| {
                let c = self.first_hit(test, observation);
                (c > 0).then_some((Hit { test, observation }, c))
            })
        })
    }

    pub fn answered_by_observation(&self) -> u64 {
        self.first_hit.iter().flatten().sum()
    }

    pub fn merge(&mut self, other: &ObservationStats) {
        for (a, b) in self
            .first_hit
            .iter_mut()
            .flatten()
            .zip(other.first_hit.iter().flatten())
        {
            *a += b;
        }
        for (a, b) in self.overlap.iter_mut().zip(&other.overlap) {
            *a += b;
        }
        self.queries += other.queries;
        self.positive += other.positive;
        self.fallback += other.fallback;
        self.fallback_work += other.fallback_work;
    }
}
