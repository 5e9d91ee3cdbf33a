/// Observables at one time sample. Oracle fields are `None` when the
/// oracle was not run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TracePoint {
    pub omega_t: f64,
    pub coherence_abs: Option<f64>,
    pub concurrence: f64,
    pub oracle_concurrence: Option<f64>,
    pub negativity: Option<f64>,
}

impl TracePoint {
    pub fn abs_error(&self) -> Option<f64> {
        self.oracle_concurrence
            .map(|c| (c - self.concurrence).abs())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DynamicsTrace {
    pub points: Vec<TracePoint>,
}

impl DynamicsTrace {
    /// `steps + 1` evenly spaced phases on `[0, omega_t_max]`.
    pub fn grid(omega_t_max: f64, steps: usize) -> Vec<f64> {
        if steps == 0 {
            return vec![0.0];
        }
        (0..=steps)
            .map(|i| omega_t_max * i as f64 / steps as f64)
            .collect()
    }

    pub fn max_abs_error(&self) -> Option<f64> {
        self.points
            .iter()
            .filter_map(TracePoint::abs_error)
            .reduce(f64::max)
    }
}
