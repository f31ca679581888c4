use super::NumericsError;

/// Seeded pseudo-random generator: xoshiro256** seeded through SplitMix64.
///
/// Both algorithms are written out here so the stream is fully determined
/// by the 64-bit seed on every platform:
///
/// * seeding: the four state words are four consecutive SplitMix64 outputs
///   starting from `seed`;
/// * `next_f64`: the top 53 bits of `next_u64` scaled by 2⁻⁵³, in `[0, 1)`;
/// * `gaussian`: Box–Muller, consuming exactly two uniforms per draw,
///   `u1` first then `u2`, returning `√(−2 ln(1−u1))·cos(2π u2)`;
/// * `bernoulli`: one uniform `u`, success iff `u < p`.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    s: [u64; 4],
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Self { seed, s }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> Result<f64, NumericsError> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(NumericsError::InvalidParameter(format!(
                "uniform bounds [{lo}, {hi}]"
            )));
        }
        Ok(lo + (hi - lo) * self.next_f64())
    }

    pub fn gaussian(&mut self, mean: f64, std: f64) -> Result<f64, NumericsError> {
        if !(mean.is_finite() && std.is_finite() && std >= 0.0) {
            return Err(NumericsError::InvalidParameter(format!(
                "gaussian mean {mean}, std {std}"
            )));
        }
        Ok(mean + std * self.standard_normal())
    }

    pub fn bernoulli(&mut self, p: f64) -> Result<bool, NumericsError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(NumericsError::InvalidParameter(format!(
                "bernoulli probability {p}"
            )));
        }
        Ok(self.next_f64() < p)
    }

    /// One N(0, 1) draw (Box–Muller, cosine branch).
    pub fn standard_normal(&mut self) -> f64 {
        // 1 − u lies in (0, 1], so the log is finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// `len` independent N(mean, std²) draws.
    pub fn gaussian_vec(
        &mut self,
        len: usize,
        mean: f64,
        std: f64,
    ) -> Result<Vec<f64>, NumericsError> {
        (0..len).map(|_| self.gaussian(mean, std)).collect()
    }

    pub fn uniform_vec(&mut self, len: usize, lo: f64, hi: f64) -> Result<Vec<f64>, NumericsError> {
        (0..len).map(|_| self.uniform(lo, hi)).collect()
    }
}
