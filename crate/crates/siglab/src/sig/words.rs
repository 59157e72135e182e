//! Signature word enumeration in recursive order.
//!
//! A word is a tuple of dimension indices `(i_1, ..., i_k)` with each letter
//! in `1..=d`; the empty word is the 0-th order component. Words are
//! enumerated order by order. Within order `k + 1` the enumeration repeats
//! the order-`k` block `d` times, appending last letter `1, ..., d`:
//!
//! ```text
//! order 1:  1  2  ...  d
//! order 2:  (1,1) (2,1) ... (d,1) (1,2) ... (d,d)
//! ```
//!
//! The flat index of `(w_1, ..., w_k)` within its order block is therefore
//! `sum_m (w_m - 1) d^(m-1)`, so prefixes and suffixes of a word are
//! recovered arithmetically (`index mod d^i` and `index div d^i`). This
//! enumeration is what makes the Brownian-motion Ito correlation matrix
//! block diagonal with Kronecker-product blocks.

use crate::error::{Result, SigLabError};
use serde::{Deserialize, Serialize};

/// One signature index tuple. The empty tuple is the 0-th order component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignatureWord {
    letters: Vec<u32>,
}

impl SignatureWord {
    pub fn new(letters: Vec<u32>, d: u32) -> Result<Self> {
        if letters.iter().any(|&l| l == 0 || l > d) {
            return Err(SigLabError::InvalidArgument(format!(
                "word {:?} has letters outside 1..={}",
                letters, d
            )));
        }
        Ok(Self { letters })
    }

    pub fn empty() -> Self {
        Self { letters: Vec::new() }
    }

    /// Order of the component = word length.
    pub fn order(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Label like `()`, `(1)`, `(2,1)` used in CSV headers and error messages.
    pub fn label(&self) -> String {
        let inner: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        format!("({})", inner.join(","))
    }
}

/// Enumeration of all words of orders `0..=K` over an alphabet of size `d`,
/// in recursive order, together with the flat-index bookkeeping shared by
/// signatures, moment matrices and regression designs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordIndexing {
    d: u32,
    max_order: usize,
    /// Start offset of each order block; `offsets[k]` is the flat index of
    /// the first order-`k` word, `offsets[max_order + 1]` the total count.
    offsets: Vec<usize>,
    words: Vec<SignatureWord>,
}

/// Count of words of orders `0..=k` over `d` letters: `(d^(k+1)-1)/(d-1)`.
pub fn word_count(d: u32, k: usize) -> usize {
    let d = d as usize;
    if d == 1 {
        k + 1
    } else {
        (d.pow(k as u32 + 1) - 1) / (d - 1)
    }
}

/// Enumerates all words of orders `0..=max_order` in recursive order.
pub fn enumerate_words(d: u32, max_order: usize) -> Result<WordIndexing> {
    if d == 0 {
        return Err(SigLabError::InvalidArgument(
            "alphabet size d must be at least 1".into(),
        ));
    }
    let mut words = Vec::with_capacity(word_count(d, max_order));
    let mut offsets = Vec::with_capacity(max_order + 2);
    words.push(SignatureWord::empty());
    offsets.push(0);
    let mut prev_block = 0..1usize;
    for _ in 1..=max_order {
        offsets.push(words.len());
        let start = words.len();
        for letter in 1..=d {
            for idx in prev_block.clone() {
                let mut letters = words[idx].letters.clone();
                letters.push(letter);
                words.push(SignatureWord { letters });
            }
        }
        prev_block = start..words.len();
    }
    offsets.push(words.len());
    Ok(WordIndexing {
        d,
        max_order,
        offsets,
        words,
    })
}

impl WordIndexing {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[SignatureWord] {
        &self.words
    }

    pub fn word(&self, flat: usize) -> &SignatureWord {
        &self.words[flat]
    }

    /// Order of the word at a flat index.
    pub fn order_of(&self, flat: usize) -> usize {
        debug_assert!(flat < self.len());
        self.offsets
            .windows(2)
            .position(|w| flat >= w[0] && flat < w[1])
            .expect("flat index within bounds")
    }

    /// Flat index of the first order-`k` word.
    pub fn order_offset(&self, k: usize) -> usize {
        self.offsets[k]
    }

    /// Range of flat indices covering the order-`k` block.
    pub fn order_range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    /// Flat index of a word given its letters.
    pub fn flat_index(&self, word: &SignatureWord) -> Result<usize> {
        let k = word.order();
        if k > self.max_order {
            return Err(SigLabError::InvalidArgument(format!(
                "word {} exceeds truncation order {}",
                word.label(),
                self.max_order
            )));
        }
        let d = self.d as usize;
        let mut within = 0usize;
        let mut stride = 1usize;
        for &l in word.letters() {
            if l == 0 || l > self.d {
                return Err(SigLabError::InvalidArgument(format!(
                    "word {} has letters outside 1..={}",
                    word.label(),
                    self.d
                )));
            }
            within += (l as usize - 1) * stride;
            stride *= d;
        }
        Ok(self.offsets[k] + within)
    }

    /// For an order-`k >= 1` word at flat index `flat`, the flat index of its
    /// length `k-1` prefix and the 0-based dimension of its last letter.
    pub fn parent_and_last(&self, flat: usize, k: usize) -> (usize, usize) {
        debug_assert!(k >= 1);
        let d = self.d as usize;
        let within = flat - self.offsets[k];
        let stride = d.pow(k as u32 - 1);
        let last = within / stride;
        (self.offsets[k - 1] + within % stride, last)
    }

    /// Flat indices of the length-`i` prefix and length-`k-i` suffix of the
    /// order-`k` word at `flat`.
    pub fn split(&self, flat: usize, k: usize, i: usize) -> (usize, usize) {
        debug_assert!(i <= k);
        let d = self.d as usize;
        let within = flat - self.offsets[k];
        let stride = d.pow(i as u32);
        (
            self.offsets[i] + within % stride,
            self.offsets[k - i] + within / stride,
        )
    }

    pub fn labels(&self) -> Vec<String> {
        self.words.iter().map(|w| w.label()).collect()
    }
}
