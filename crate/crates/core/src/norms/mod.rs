//! Littlewood–Paley blocks, homogeneous Besov norms, Lebesgue and weak-Lebesgue
//! norms, the K-functional, and ensemble verifiers for the embedding and
//! product estimates.

mod besov;
mod decompose;
mod kfunctional;
mod lebesgue;
mod partition;
mod verify;

pub use besov::{besov, besov_norm, block_support_ok, critical_s, lq_sum, BesovIndex, BlockNorm, BlockNorms, NormReport};
pub use decompose::{dyadic_decompose, DyadicDecomposition};
pub use kfunctional::{k_functional, KFunctional};
pub use lebesgue::{lp_norm, lp_of_samples, magnitude_samples, weak_lp_norm, weak_lp_of_samples};
pub use partition::{chi, make_dyadic_partition, phi, Partition};
pub use verify::{
    embedding_exponent, product_ratio, verify_embedding, verify_product, EmbeddingReport, EnsembleSpec,
    ProductReport,
};
