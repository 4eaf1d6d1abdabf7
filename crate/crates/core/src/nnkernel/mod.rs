//! Deterministic dense neural-network kernel with hand-derived gradients.

mod adam;
mod attention;
mod gradcheck;
mod layernorm;
mod linear;
mod loss;
mod param;
mod tensor;
mod transformer;

pub use adam::{adam_step, AdamConfig};
pub use attention::{AttentionCache, MultiHeadAttention};
pub use gradcheck::{grad_check, grad_check_report, GradCheckReport};
pub use layernorm::{LayerNorm, LayerNormCache, LAYERNORM_EPS};
pub use linear::{LinearCache, LinearLayer};
pub use loss::mse_loss_with_grad;
pub use param::{Parameter, Parameterized};
pub(crate) use param::join;
pub use tensor::{matmul, matmul_a_bt, matmul_at_b, softmax_rows, Tensor2};
pub use transformer::{gelu, gelu_grad, TransformerBlock, TransformerCache};

impl Parameterized for Vec<Parameter> {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        for (i, p) in self.iter().enumerate() {
            f(join(prefix, &i.to_string()), p);
        }
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        for (i, p) in self.iter_mut().enumerate() {
            f(join(prefix, &i.to_string()), p);
        }
    }
}
