//! Cross-lingual NER transfer between Hindi and Marathi.
//!
//! The crate reads heterogeneous NER corpora ([`corpus_io`]), maps them onto
//! one flat tag set and builds merged training sets ([`harmonize`]),
//! fine-tunes token-classification encoders ([`modeling`]), scores
//! predictions ([`evaluation`]) and runs whole mono-vs-merged experiments
//! from a config file ([`experiment`]).

pub mod corpus_io;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod harmonize;
pub mod modeling;
pub mod synthetic;

pub use error::{Error, Result};
