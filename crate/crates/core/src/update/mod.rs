//! Client update generation backends.
//!
//! Two backends produce per-round client updates: a synthetic generator
//! realizing the mean-plus-fluctuation decomposition with a planted watermark
//! direction, and a bigram language-model testbed where watermarked clients
//! train on green-list-rephrased corpora, giving genuine radioactivity
//! transfer at desk scale.

pub mod bigram;
pub mod synthetic;
pub mod watermark;

pub use bigram::{gen_corpus, train_local, BigramModel};
pub use synthetic::{synth_updates, SyntheticUpdateSpec};
pub use watermark::{green_list, GreenListKey};
