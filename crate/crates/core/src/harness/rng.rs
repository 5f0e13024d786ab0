use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams derived from one base seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Adversary draws (and the hidden battlefield) of a repetition.
    Adversary(usize),
    /// Path sampling of a repetition.
    Learner(usize),
    Optimizer,
    Battlefields,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Adversary(r) => 2 * r as u64 + 16,
            Stream::Learner(r) => 2 * r as u64 + 17,
            Stream::Optimizer => 1,
            Stream::Battlefields => 2,
        }
    }
}

/// ChaCha8 keyed by `seed`, on the stream for `which`.
pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which.id());
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_differ_and_repeat() {
        let a: u64 = stream(5, Stream::Adversary(0)).random();
        let b: u64 = stream(5, Stream::Learner(0)).random();
        let c: u64 = stream(5, Stream::Adversary(1)).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, stream(5, Stream::Adversary(0)).random::<u64>());
    }
}
