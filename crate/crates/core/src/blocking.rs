//! Trigram blocking: a decode-time constraint that rejects any token which
//! would repeat a trigram already present in the emitted prefix.

use alloc::collections::BTreeSet;
use alloc::string::String;

/// Tracks the trigrams of an emitted token prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigramBlocker<T = String> {
    seen: BTreeSet<[T; 3]>,
    last_two: [Option<T>; 2],
    emitted: usize,
}

impl<T: Ord + Clone> Default for TrigramBlocker<T> {
    fn default() -> Self {
        TrigramBlocker {
            seen: BTreeSet::new(),
            last_two: [None, None],
            emitted: 0,
        }
    }
}

impl<T: Ord + Clone> TrigramBlocker<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds the state for an already emitted prefix.
    pub fn from_prefix<'a>(prefix: impl IntoIterator<Item = &'a T>) -> Self
    where
        T: 'a,
    {
        let mut blocker = Self::new();
        for t in prefix {
            blocker.push(t.clone());
        }
        blocker
    }

    /// Whether emitting `candidate` next keeps every trigram unique.
    pub fn allows(&self, candidate: &T) -> bool {
        match &self.last_two {
            [Some(a), Some(b)] => !self
                .seen
                .contains(&[a.clone(), b.clone(), candidate.clone()]),
            _ => true,
        }
    }

    /// Records `token` as emitted.
    pub fn push(&mut self, token: T) {
        if let [Some(a), Some(b)] = &self.last_two {
            self.seen.insert([a.clone(), b.clone(), token.clone()]);
        }
        let [_, second] = core::mem::take(&mut self.last_two);
        self.last_two = [second, Some(token)];
        self.emitted += 1;
    }

    pub fn emitted(&self) -> usize {
        self.emitted
    }

    pub fn seen_trigrams(&self) -> &BTreeSet<[T; 3]> {
        &self.seen
    }
}
