use crate::{Tensor, TensorError};

/// Adam optimizer state: per-parameter first/second moments plus the
/// step counter driving bias correction.
#[derive(Debug, Clone)]
pub struct AdamState {
    step_count: u64,
    first_moment: Vec<Tensor>,
    second_moment: Vec<Tensor>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    /// State with the usual defaults (beta1 0.9, beta2 0.999, eps 1e-8),
    /// moments initialized to zero in the parameters' shapes.
    pub fn new(params: &[Tensor], learning_rate: f64) -> Self {
        Self::with_hyper(params, learning_rate, 0.9, 0.999, 1e-8)
    }

    pub fn with_hyper(
        params: &[Tensor],
        learning_rate: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) -> Self {
        assert!(learning_rate > 0.0 && beta1 > 0.0 && beta2 > 0.0 && epsilon > 0.0);
        let zeros: Vec<Tensor> = params.iter().map(|p| Tensor::zeros(p.shape().to_vec())).collect();
        Self {
            step_count: 0,
            first_moment: zeros.clone(),
            second_moment: zeros,
            learning_rate,
            beta1,
            beta2,
            epsilon,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One bias-corrected Adam update; returns the new parameter values.
    ///
    /// `params` and `grads` must line up with the parameters the state
    /// was built for, in the same order.
    pub fn step(&mut self, params: &[Tensor], grads: &[Tensor]) -> Result<Vec<Tensor>, TensorError> {
        if params.len() != grads.len() || params.len() != self.first_moment.len() {
            return Err(TensorError::ParamCount { params: params.len(), grads: grads.len() });
        }
        for ((p, g), m) in params.iter().zip(grads).zip(&self.first_moment) {
            if p.shape() != g.shape() || p.shape() != m.shape() {
                return Err(TensorError::dim(
                    "adam_step",
                    format!(
                        "parameter shape {:?}, gradient shape {:?}, moment shape {:?}",
                        p.shape(),
                        g.shape(),
                        m.shape()
                    ),
                ));
            }
        }

        self.step_count += 1;
        let t = self.step_count as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);

        let mut updated = Vec::with_capacity(params.len());
        for i in 0..params.len() {
            let p = params[i].data();
            let g = grads[i].data();
            let m_old = self.first_moment[i].data();
            let v_old = self.second_moment[i].data();

            let mut m_new = Vec::with_capacity(p.len());
            let mut v_new = Vec::with_capacity(p.len());
            let mut p_new = Vec::with_capacity(p.len());
            for j in 0..p.len() {
                let m = self.beta1 * m_old[j] + (1.0 - self.beta1) * g[j];
                let v = self.beta2 * v_old[j] + (1.0 - self.beta2) * g[j] * g[j];
                let m_hat = m / bc1;
                let v_hat = v / bc2;
                p_new.push(p[j] - self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon));
                m_new.push(m);
                v_new.push(v);
            }
            self.first_moment[i] = Tensor::from_parts(params[i].shape().to_vec(), m_new);
            self.second_moment[i] = Tensor::from_parts(params[i].shape().to_vec(), v_new);
            updated.push(Tensor::from_parts(params[i].shape().to_vec(), p_new));
        }
        Ok(updated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_gradient_is_a_noop_on_parameters() {
        let params = vec![Tensor::from_vec(vec![2], vec![1.5, -0.5]).unwrap()];
        let grads = vec![Tensor::zeros(vec![2])];
        let mut state = AdamState::new(&params, 1e-3);
        let updated = state.step(&params, &grads).unwrap();
        assert_eq!(updated[0], params[0]);
        assert_eq!(state.step_count(), 1);
        let updated = state.step(&updated, &grads).unwrap();
        assert_eq!(updated[0], params[0]);
        assert_eq!(state.step_count(), 2);
    }

    #[test]
    fn first_step_magnitude_is_learning_rate() {
        // bias correction makes m_hat = g and v_hat = g^2 on step one, so
        // the update is lr * sign(g) up to epsilon
        let params = vec![Tensor::scalar(1.0)];
        let grads = vec![Tensor::scalar(2.0)];
        let mut state = AdamState::new(&params, 1e-3);
        let updated = state.step(&params, &grads).unwrap();
        assert_abs_diff_eq!(updated[0].data()[0], 0.999, epsilon = 1e-8);
    }

    #[test]
    fn two_steps_on_quadratic_strictly_decrease_loss() {
        // loss(p) = (p - 3)^2, grad = 2(p - 3)
        let loss = |p: f64| (p - 3.0) * (p - 3.0);
        let grad = |p: f64| 2.0 * (p - 3.0);
        let mut params = vec![Tensor::scalar(0.0)];
        let mut state = AdamState::new(&params, 0.05);
        let l0 = loss(params[0].data()[0]);
        for _ in 0..2 {
            let g = vec![Tensor::scalar(grad(params[0].data()[0]))];
            params = state.step(&params, &g).unwrap();
        }
        let l2 = loss(params[0].data()[0]);
        assert!(l2 < l0, "loss did not decrease: {l0} -> {l2}");
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let params = vec![Tensor::zeros(vec![2])];
        let grads = vec![Tensor::zeros(vec![3])];
        let mut state = AdamState::new(&params, 1e-3);
        assert!(state.step(&params, &grads).is_err());
    }
}
