//! Packed bit array with a per-word rank index.

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RankedBits {
    len: usize,
    words: Vec<u64>,
    /// `rank[w]` = number of set bits in words `0..w`.
    rank: Vec<u64>,
}

impl RankedBits {
    /// Builds from raw words; bits at positions `>= len` are cleared.
    pub(crate) fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        let nwords = len.div_ceil(64);
        words.truncate(nwords);
        words.resize(nwords, 0);
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        let mut rank = Vec::with_capacity(nwords);
        let mut acc = 0u64;
        for w in &words {
            rank.push(acc);
            acc += u64::from(w.count_ones());
        }
        RankedBits { len, words, rank }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of set bits at positions `0..=i`.
    pub(crate) fn rank_inclusive(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        let w = i / 64;
        let bit = i % 64;
        let mask = if bit == 63 { u64::MAX } else { (1u64 << (bit + 1)) - 1 };
        self.rank[w] + u64::from((self.words[w] & mask).count_ones())
    }

    pub(crate) fn count_ones(&self) -> u64 {
        match self.len {
            0 => 0,
            n => self.rank_inclusive(n - 1),
        }
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Mutable bit buffer used during sieving.
pub(crate) struct BitBuf {
    pub(crate) words: Vec<u64>,
}

impl BitBuf {
    pub(crate) fn ones(len: usize) -> Self {
        BitBuf { words: vec![u64::MAX; len.div_ceil(64)] }
    }

    #[inline]
    pub(crate) fn clear(&mut self, i: usize) {
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }
}
