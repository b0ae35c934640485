use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::VectorField;

/// States sampled at strictly increasing times, with named norm traces.
#[derive(Clone, Debug)]
pub struct EvolutionPath {
    pub times: Vec<f64>,
    pub states: Vec<VectorField>,
    pub norm_traces: Vec<NormTrace>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormTrace {
    pub name: String,
    pub values: Vec<f64>,
}

impl EvolutionPath {
    pub fn new(times: Vec<f64>, states: Vec<VectorField>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::ShapeMismatch { expected: times.len(), got: states.len() });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("path times must be strictly increasing".into()));
        }
        Ok(EvolutionPath { times, states, norm_traces: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the sample at `t` (relative match `1e-12`).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
    }

    /// Evaluates `norm` on every state and stores it under `name`.
    pub fn add_trace(&mut self, name: &str, norm: impl Fn(&VectorField) -> f64) {
        let values = self.states.iter().map(norm).collect();
        self.norm_traces.retain(|tr| tr.name != name);
        self.norm_traces.push(NormTrace { name: name.to_string(), values });
    }

    pub fn trace(&self, name: &str) -> Option<&[f64]> {
        self.norm_traces.iter().find(|tr| tr.name == name).map(|tr| tr.values.as_slice())
    }

    /// `states[i] − shift` for every sample.
    pub fn shifted(&self, shift: &VectorField) -> EvolutionPath {
        EvolutionPath {
            times: self.times.clone(),
            states: self.states.iter().map(|s| s - shift).collect(),
            norm_traces: Vec::new(),
        }
    }
}
