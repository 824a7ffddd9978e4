use rand::Rng;
use tensor_autodiff::Tensor;

use crate::CvaeError;

/// The architecture table: every free size of the network in one place.
///
/// Encoder: for each entry of `enc_channels`, a 3x3 stride-1 convolution
/// with zero padding 1 (shape-preserving), selu, then 2x2 max pooling.
/// After the last stage the map is flattened, passed through a leaky relu
/// trunk, and two *linear* dense heads emit the latent mean and
/// log-variance.
///
/// Decoder: one dense layer from the latent space to the bottleneck
/// volume, a reshape, then for each entry of `dec_channels` a 4x4
/// stride-2 padding-1 transposed convolution (kernel - 2*padding ==
/// stride, so each stage doubles the side exactly) with selu after every
/// stage except the last, which stays linear — reconstructed
/// sensitivities may go negative and are truncated downstream instead of
/// being squashed by the net.
#[derive(Debug, Clone, PartialEq)]
pub struct CvaeArch {
    pub input_side: usize,
    pub r: usize,
    pub enc_channels: Vec<usize>,
    pub dec_initial_channels: usize,
    pub dec_channels: Vec<usize>,
    pub leaky_slope: f64,
    pub enc_kernel: usize,
    pub enc_padding: usize,
    pub pool_window: usize,
    pub dec_kernel: usize,
    pub dec_stride: usize,
    pub dec_padding: usize,
}

impl CvaeArch {
    /// The pinned full-size architecture for a given latent dimension:
    /// 64x64 inputs, encoder channels (8, 16, 32, 32, 64, 64), decoder
    /// channels (64, 32, 32, 16, 8, 1).
    pub fn standard(r: usize) -> Self {
        Self {
            input_side: 64,
            r,
            enc_channels: vec![8, 16, 32, 32, 64, 64],
            dec_initial_channels: 64,
            dec_channels: vec![64, 32, 32, 16, 8, 1],
            leaky_slope: 0.3,
            enc_kernel: 3,
            enc_padding: 1,
            pool_window: 2,
            dec_kernel: 4,
            dec_stride: 2,
            dec_padding: 1,
        }
    }

    /// A two-stage miniature on 8x8 inputs, used for gradient audits.
    pub fn miniature(r: usize) -> Self {
        Self {
            input_side: 8,
            r,
            enc_channels: vec![4, 8],
            dec_initial_channels: 8,
            dec_channels: vec![4, 1],
            leaky_slope: 0.3,
            enc_kernel: 3,
            enc_padding: 1,
            pool_window: 2,
            dec_kernel: 4,
            dec_stride: 2,
            dec_padding: 1,
        }
    }

    pub fn validate(&self) -> Result<(), CvaeError> {
        let err = |m: String| Err(CvaeError::InvalidArchitecture(m));
        if self.r == 0 {
            return err("latent dimension must be >= 1".into());
        }
        if self.enc_channels.is_empty() || self.dec_channels.is_empty() {
            return err("need at least one encoder and one decoder stage".into());
        }
        if self.enc_kernel != 2 * self.enc_padding + 1 {
            return err(format!(
                "encoder kernel {} with padding {} is not shape-preserving",
                self.enc_kernel, self.enc_padding
            ));
        }
        if self.pool_window < 2 {
            return err("pool window must be >= 2".into());
        }
        let stages = self.enc_channels.len();
        let reduction = self.pool_window.pow(stages as u32);
        if self.input_side % reduction != 0 {
            return err(format!(
                "{} pooling stages need the input side {} divisible by {reduction}",
                stages, self.input_side
            ));
        }
        if self.dec_kernel != self.dec_stride + 2 * self.dec_padding {
            return err(format!(
                "decoder kernel {} stride {} padding {} does not upsample exactly",
                self.dec_kernel, self.dec_stride, self.dec_padding
            ));
        }
        if *self.dec_channels.last().unwrap() != 1 {
            return err("decoder must end in a single channel".into());
        }
        let out_side = self.bottleneck_side() * self.dec_stride.pow(self.dec_channels.len() as u32);
        if out_side != self.input_side {
            return err(format!(
                "decoder reconstructs {out_side}x{out_side}, input is {0}x{0}",
                self.input_side
            ));
        }
        Ok(())
    }

    /// Spatial side of the bottleneck feature map.
    pub fn bottleneck_side(&self) -> usize {
        self.input_side / self.pool_window.pow(self.enc_channels.len() as u32)
    }

    /// Flattened encoder bottleneck length.
    pub fn flat_len(&self) -> usize {
        self.enc_channels.last().unwrap() * self.bottleneck_side() * self.bottleneck_side()
    }

    /// Flattened decoder entry volume.
    pub fn dec_flat_len(&self) -> usize {
        self.dec_initial_channels * self.bottleneck_side() * self.bottleneck_side()
    }

    /// Shapes of every parameter tensor, in the canonical storage order:
    /// encoder conv (kernels, bias) per stage, mean head (w, b),
    /// log-variance head (w, b), decoder dense (w, b), decoder transposed
    /// conv (kernels, bias) per stage.
    pub fn param_shapes(&self) -> Vec<Vec<usize>> {
        let mut shapes = Vec::new();
        let mut c_in = 1;
        for &c_out in &self.enc_channels {
            shapes.push(vec![c_out, c_in, self.enc_kernel, self.enc_kernel]);
            shapes.push(vec![c_out]);
            c_in = c_out;
        }
        let flat = self.flat_len();
        shapes.push(vec![self.r, flat]);
        shapes.push(vec![self.r]);
        shapes.push(vec![self.r, flat]);
        shapes.push(vec![self.r]);
        shapes.push(vec![self.dec_flat_len(), self.r]);
        shapes.push(vec![self.dec_flat_len()]);
        let mut c_in = self.dec_initial_channels;
        for &c_out in &self.dec_channels {
            shapes.push(vec![c_in, c_out, self.dec_kernel, self.dec_kernel]);
            shapes.push(vec![c_out]);
            c_in = c_out;
        }
        shapes
    }

    /// Glorot-uniform weights, zero biases, in storage order.
    pub fn init_params<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Tensor> {
        self.param_shapes()
            .into_iter()
            .map(|shape| match shape.len() {
                4 => {
                    let k2 = shape[2] * shape[3];
                    let (fan_out, fan_in) = (shape[0] * k2, shape[1] * k2);
                    Tensor::glorot_uniform(shape, fan_in, fan_out, rng)
                }
                2 => {
                    let (fan_out, fan_in) = (shape[0], shape[1]);
                    Tensor::glorot_uniform(shape, fan_in, fan_out, rng)
                }
                _ => Tensor::zeros(shape),
            })
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.param_shapes().iter().map(|s| s.iter().product::<usize>()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn standard_architecture_is_valid() {
        let arch = CvaeArch::standard(20);
        arch.validate().unwrap();
        assert_eq!(arch.bottleneck_side(), 1);
        assert_eq!(arch.flat_len(), 64);
        assert_eq!(arch.dec_flat_len(), 64);
    }

    #[test]
    fn miniature_architecture_is_valid() {
        let arch = CvaeArch::miniature(2);
        arch.validate().unwrap();
        assert_eq!(arch.bottleneck_side(), 2);
        assert_eq!(arch.flat_len(), 32);
    }

    #[test]
    fn invalid_tables_are_rejected() {
        let mut bad = CvaeArch::standard(20);
        bad.input_side = 60; // not divisible by 2^6
        assert!(bad.validate().is_err());

        let mut bad = CvaeArch::standard(20);
        bad.dec_kernel = 3; // 3 != 2 + 2*1, no exact doubling
        assert!(bad.validate().is_err());

        let mut bad = CvaeArch::standard(20);
        bad.dec_channels = vec![64, 32, 32, 16, 8, 2];
        assert!(bad.validate().is_err());

        assert!(CvaeArch::standard(0).validate().is_err());
    }

    #[test]
    fn init_matches_declared_shapes() {
        let arch = CvaeArch::miniature(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = arch.init_params(&mut rng);
        let shapes = arch.param_shapes();
        assert_eq!(params.len(), shapes.len());
        for (p, s) in params.iter().zip(&shapes) {
            assert_eq!(p.shape(), &s[..]);
        }
        // biases start at zero
        assert!(params[1].data().iter().all(|&v| v == 0.0));
    }
}
