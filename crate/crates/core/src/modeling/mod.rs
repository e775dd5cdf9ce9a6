//! Token-classification fine-tuning of transformer encoders.
//!
//! Encoders are named in an [`EncoderRegistry`] and materialized through a
//! [`CheckpointProvider`]. The network itself (BERT, RoBERTa and ALBERT
//! layouts, reading Hugging Face parameter names) runs on candle. Word-level
//! tags are attached to the first subword of each word; every other position
//! is excluded from the loss.

mod align;
mod arch;
mod encoder;
mod params;
mod provider;
mod registry;
mod subword;
mod tagger;
mod train;
mod vocab;

pub use align::{align_labels, AlignmentResult};
pub use arch::{Activation, EncoderArch, Layout};
pub use encoder::masked_cross_entropy;
#[cfg(feature = "hub-download")]
pub use provider::HubProvider;
pub use provider::{CheckpointFiles, CheckpointProvider, LocalCacheProvider, OfflineProvider};
pub use registry::{list_encoders, EncoderFamily, EncoderRegistry, EncoderSpec, TINY_TEST};
pub use subword::{FnSplitter, HfSubwords, SpecialIds, SubwordSplitter, Subwords, WordPiece};
pub use tagger::{load_tagger, save_tagger, TrainedTagger, TAGGER_FORMAT_VERSION};
pub use train::{train, EpochLog, ModelContext, Schedule, TrainConfig};
pub use vocab::{LabelVocabulary, IGNORE_ID};
