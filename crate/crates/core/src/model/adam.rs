use serde::{Deserialize, Serialize};

use super::ModelParams;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.005,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment accumulators mirroring the parameter tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub config: AdamConfig,
    pub step: u64,
    pub first_moment: ModelParams,
    pub second_moment: ModelParams,
}

impl OptimizerState {
    pub fn new(params: &ModelParams, config: AdamConfig) -> Self {
        Self {
            config,
            step: 0,
            first_moment: params.zeros_like(),
            second_moment: params.zeros_like(),
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(
    state: &mut OptimizerState,
    params: &mut ModelParams,
    grads: &ModelParams,
) -> Result<()> {
    if !params.same_shape(grads) || !params.same_shape(&state.first_moment) {
        return invalid("optimizer, parameter and gradient shapes differ");
    }
    for (t, tensor) in grads.tensors().iter().enumerate() {
        if tensor.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric {
                layer: grads.tensor_layer(t),
                msg: format!("non-finite gradient in {}", grads.tensor_names()[t]),
            });
        }
    }

    state.step += 1;
    let AdamConfig {
        learning_rate,
        beta1,
        beta2,
        epsilon,
    } = state.config;
    let correction1 = 1.0 - beta1.powi(state.step as i32);
    let correction2 = 1.0 - beta2.powi(state.step as i32);

    let grads = grads.tensors();
    let firsts = state.first_moment.tensors_mut();
    let seconds = state.second_moment.tensors_mut();
    for (((p, g), m), v) in params.tensors_mut().into_iter().zip(grads).zip(firsts).zip(seconds) {
        for i in 0..p.len() {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            let m_hat = m[i] / correction1;
            let v_hat = v[i] / correction2;
            p[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Readout;

    fn fill(p: &mut ModelParams, value: f64) {
        for t in p.tensors_mut() {
            t.fill(value);
        }
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = ModelParams::init(2, 3, Readout::Rectifier, 1);
        let before = p.clone();
        let zeros = p.zeros_like();
        let mut state = OptimizerState::new(&p, AdamConfig::default());
        adam_step(&mut state, &mut p, &zeros).unwrap();
        assert_eq!(p, before);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn first_unit_step_moves_by_learning_rate() {
        let mut p = ModelParams::init(2, 3, Readout::Rectifier, 1);
        let before = p.clone();
        let mut g = p.zeros_like();
        fill(&mut g, 1.0);
        let config = AdamConfig::default();
        let mut state = OptimizerState::new(&p, config);
        adam_step(&mut state, &mut p, &g).unwrap();
        let expected = config.learning_rate / (1.0 + config.epsilon);
        for (a, b) in p.tensors().iter().zip(before.tensors()) {
            for (x, y) in a.iter().zip(b) {
                assert!((y - x - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn trajectories_are_deterministic() {
        let run = || {
            let mut p = ModelParams::init(2, 3, Readout::Rectifier, 8);
            let mut state = OptimizerState::new(&p, AdamConfig::default());
            for k in 0..5 {
                let mut g = p.clone();
                fill(&mut g, 0.1 * k as f64 - 0.2);
                adam_step(&mut state, &mut p, &g).unwrap();
            }
            (p, state)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn rejects_non_finite_gradients() {
        let mut p = ModelParams::init(2, 3, Readout::Rectifier, 1);
        let mut g = p.zeros_like();
        g.layers[1].edge_mix[[0, 0]] = f64::NAN;
        let mut state = OptimizerState::new(&p, AdamConfig::default());
        let err = adam_step(&mut state, &mut p, &g).unwrap_err();
        assert!(matches!(err, Error::Numeric { layer: 1, .. }));
        assert_eq!(state.step, 0);
    }
}
