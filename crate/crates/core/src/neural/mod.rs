//! Small neural-network engine for recurrent policies.
//!
//! Networks are `tanh → GRU → tanh → linear` with every weight and bias in a
//! single flat vector, which keeps optimizers, checkpoints and gradient
//! checks simple. Gradients come from hand-written backpropagation through
//! time.

mod gradcheck;
mod net;
mod policy;

pub use gradcheck::{check_gradient, relative_error, GradCheckReport};
pub use net::{NetSizes, RecurrentNet, StepCache};
pub use policy::{gaussian_entropy, gaussian_log_prob, sample_action, GaussianPolicy, ValueFunction};
