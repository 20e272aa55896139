use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};

/// Seeded random stream.
///
/// Backed by ChaCha8, whose 64-bit stream parameter gives independent
/// sub-streams for a single seed.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    /// Sub-stream `stream` of `seed`.
    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn bernoulli(&mut self, p: f64) -> Result<u8> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("bernoulli p={p} outside [0, 1]")));
        }
        Ok(u8::from(self.uniform() < p))
    }

    pub fn poisson(&mut self, mu: f64) -> Result<u64> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::Domain(format!("poisson mean must be positive, got {mu}")));
        }
        let dist = Poisson::new(mu).map_err(|e| Error::Domain(format!("poisson mean {mu}: {e}")))?;
        let draw: f64 = dist.sample(&mut self.rng);
        Ok(draw as u64)
    }
}
