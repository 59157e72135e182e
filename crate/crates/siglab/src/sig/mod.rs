//! Signature words, discrete paths, and the three signature transforms.

pub mod path;
pub mod transform;
pub mod words;

pub use path::Path;
pub use transform::{
    ito_signature, linear_signature, signature, stratonovich_signature, Convention,
    SignatureVector,
};
pub use words::{enumerate_words, word_count, SignatureWord, WordIndexing};
