//! Skip-gram with negative sampling over walk corpora.

mod io;
mod sgns;
mod train;
mod vocab;

pub use io::{load_embeddings, save_embeddings};
pub use sgns::{neg_log_sigmoid, sgns_pair_loss_and_grad, sigmoid, PairGradient, MAX_LOGIT};
pub use train::{
    initial_parameters, train, train_encoded, EmbeddingMatrix, EpochStats, TrainConfig, TrainOutput,
    MIN_LR_FRACTION,
};
pub use vocab::{build_vocab, Vocab, UNIGRAM_POWER};
