use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::system::{SystemKind, SystemSpec};
use crate::nil::HeisenbergPoint;
use crate::phase::Phase;
use crate::rng::{self, streams};

/// A point of one of the model systems.
#[derive(Clone, Debug, PartialEq)]
pub enum StatePoint {
    Circle(Phase),
    Torus(Phase, Phase),
    Cyclic { index: u32, x: Phase },
    Doubling(DoublingPoint),
    Heisenberg(HeisenbergPoint),
}

impl StatePoint {
    /// Real coordinates; the cyclic index is reported as a float first.
    pub fn coordinates(&self) -> Vec<f64> {
        match self {
            StatePoint::Circle(p) => vec![p.to_f64()],
            StatePoint::Torus(z, u) => vec![z.to_f64(), u.to_f64()],
            StatePoint::Cyclic { index, x } => vec![*index as f64, x.to_f64()],
            StatePoint::Doubling(d) => vec![d.phase().to_f64()],
            StatePoint::Heisenberg(h) => vec![h.x, h.y, h.z],
        }
    }

    pub(crate) fn index(&self) -> u32 {
        match self {
            StatePoint::Cyclic { index, .. } => *index,
            _ => 0,
        }
    }

    /// Circle coordinates as phases, padded with zeros.
    pub(crate) fn phases(&self) -> [Phase; 3] {
        match self {
            StatePoint::Circle(p) => [*p, Phase::ZERO, Phase::ZERO],
            StatePoint::Torus(z, u) => [*z, *u, Phase::ZERO],
            StatePoint::Cyclic { x, .. } => [*x, Phase::ZERO, Phase::ZERO],
            StatePoint::Doubling(d) => [d.phase(), Phase::ZERO, Phase::ZERO],
            StatePoint::Heisenberg(h) => [
                Phase::from_f64(h.x),
                Phase::from_f64(h.y),
                Phase::from_f64(h.z),
            ],
        }
    }

    pub(crate) fn matches(&self, sys: &SystemSpec) -> bool {
        matches!(
            (sys.kind(), self),
            (SystemKind::Rotation { .. }, StatePoint::Circle(_))
                | (SystemKind::SkewProduct { .. }, StatePoint::Torus(..))
                | (SystemKind::Doubling, StatePoint::Doubling(_))
                | (SystemKind::Heisenberg { .. }, StatePoint::Heisenberg(_))
        ) || match (sys.kind(), self) {
            (SystemKind::CyclicProduct { q, .. }, StatePoint::Cyclic { index, .. }) => index < q,
            _ => false,
        }
    }
}

/// Where the binary digits of a doubling-map point come from.
#[derive(Clone, Debug, PartialEq)]
pub enum BitSource {
    /// A point with a finite binary expansion (64 bits, then zeros).
    Dyadic(u64),
    /// An unbounded stream of independent fair bits addressed by a ChaCha key.
    Seeded { seed: u64, stream: u64, index: u64 },
    /// A seeded stream with a materialised window of words.
    Cached(Arc<WordCache>),
}

#[derive(Debug, PartialEq)]
pub struct WordCache {
    seed: u64,
    stream: u64,
    index: u64,
    first: u64,
    words: Vec<u64>,
}

fn seeded_words(seed: u64, stream: u64, index: u64, first: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::from_seed(rng::key(seed, stream, index));
    rng.set_word_pos(2 * first as u128);
    (0..count).map(|_| rng.next_u64()).collect()
}

impl BitSource {
    fn word(&self, i: u64) -> u64 {
        match self {
            BitSource::Dyadic(w) => {
                if i == 0 {
                    *w
                } else {
                    0
                }
            }
            BitSource::Seeded {
                seed,
                stream,
                index,
            } => seeded_words(*seed, *stream, *index, i, 1)[0],
            BitSource::Cached(c) => {
                if i >= c.first && i - c.first < c.words.len() as u64 {
                    c.words[(i - c.first) as usize]
                } else {
                    seeded_words(c.seed, c.stream, c.index, i, 1)[0]
                }
            }
        }
    }

    /// The 64 bits starting at bit `offset`, most significant first.
    fn window(&self, offset: u64) -> u64 {
        let i = offset / 64;
        let r = (offset % 64) as u32;
        if r == 0 {
            self.word(i)
        } else {
            (self.word(i) << r) | (self.word(i + 1) >> (64 - r))
        }
    }
}

/// A point of the doubling map: the real number whose binary expansion is
/// the bit stream read from `offset`. Applying the map advances the offset,
/// so orbits are exact shifts and never collapse to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DoublingPoint {
    source: BitSource,
    offset: u64,
}

impl DoublingPoint {
    pub fn dyadic(x: Phase) -> DoublingPoint {
        DoublingPoint {
            source: BitSource::Dyadic(x.0),
            offset: 0,
        }
    }

    pub fn seeded(seed: u64, stream: u64, index: u64) -> DoublingPoint {
        DoublingPoint {
            source: BitSource::Seeded {
                seed,
                stream,
                index,
            },
            offset: 0,
        }
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn source(&self) -> &BitSource {
        &self.source
    }

    pub fn phase(&self) -> Phase {
        Phase(self.source.window(self.offset))
    }

    pub(crate) fn advanced(&self, by: u64) -> DoublingPoint {
        DoublingPoint {
            source: self.source.clone(),
            offset: self.offset.saturating_add(by),
        }
    }

    /// Materialises the words needed to read `span` further bits, so an
    /// orbit of that length is generated without random access.
    pub(crate) fn with_cache(&self, span: u64) -> DoublingPoint {
        let (seed, stream, index) = match &self.source {
            BitSource::Seeded {
                seed,
                stream,
                index,
            } => (*seed, *stream, *index),
            BitSource::Cached(c) => (c.seed, c.stream, c.index),
            BitSource::Dyadic(_) => return self.clone(),
        };
        let first = self.offset / 64;
        let count = (span / 64 + 3) as usize;
        let words = seeded_words(seed, stream, index, first, count);
        DoublingPoint {
            source: BitSource::Cached(Arc::new(WordCache {
                seed,
                stream,
                index,
                first,
                words,
            })),
            offset: self.offset,
        }
    }
}

/// Independent draws from the invariant measure; draw `i` depends only on
/// `(seed, i)`.
pub fn sample_invariant_measure(sys: &SystemSpec, count: usize, seed: u64) -> Vec<StatePoint> {
    sample_stream(sys, count, seed, streams::SAMPLES)
}

pub(crate) fn sample_stream(
    sys: &SystemSpec,
    count: usize,
    seed: u64,
    stream: u64,
) -> Vec<StatePoint> {
    (0..count as u64)
        .map(|i| {
            let mut rng = rng::stream_rng(seed, stream, i);
            match sys.kind() {
                SystemKind::Rotation { .. } => StatePoint::Circle(Phase(rng.next_u64())),
                SystemKind::SkewProduct { .. } => {
                    StatePoint::Torus(Phase(rng.next_u64()), Phase(rng.next_u64()))
                }
                SystemKind::Doubling => StatePoint::Doubling(DoublingPoint::seeded(
                    seed,
                    streams::DOUBLING_BITS ^ (stream << 8),
                    i,
                )),
                SystemKind::CyclicProduct { q, .. } => StatePoint::Cyclic {
                    index: rng.gen_range(0..*q),
                    x: Phase(rng.next_u64()),
                },
                SystemKind::Heisenberg { .. } => StatePoint::Heisenberg(HeisenbergPoint::new(
                    rng.gen::<f64>(),
                    rng.gen::<f64>(),
                    rng.gen::<f64>(),
                )),
            }
        })
        .collect()
}
