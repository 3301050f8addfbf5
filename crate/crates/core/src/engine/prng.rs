//! 32-bit hash and generator shared bit-for-bit with the browser runner.
//!
//! Only 32-bit wrapping arithmetic is used so a JavaScript implementation can
//! reproduce every draw with `Math.imul` and `>>> 0`.

const FNV_OFFSET: u32 = 2_166_136_261;
const FNV_PRIME: u32 = 16_777_619;

/// FNV-1a over the UTF-8 bytes of a respondent id.
pub fn seed_from_id(respondent_id: &str) -> u32 {
    respondent_id
        .bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u32::from(b)).wrapping_mul(FNV_PRIME))
}

/// Mulberry32.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prng {
    state: u32,
}

impl Prng {
    pub fn new(seed: u32) -> Self {
        Prng { state: seed }
    }

    pub fn for_respondent(respondent_id: &str) -> Self {
        Prng::new(seed_from_id(respondent_id))
    }

    pub fn state(&self) -> u32 {
        self.state
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_add(0x6D2B_79F5);
        let mut z = self.state;
        z = (z ^ (z >> 15)).wrapping_mul(z | 1);
        z ^= z.wrapping_add((z ^ (z >> 7)).wrapping_mul(z | 61));
        z ^ (z >> 14)
    }

    /// `next_u32() % bound`; modulo bias is part of the contract.
    pub fn below(&mut self, bound: u32) -> u32 {
        debug_assert!(bound > 0);
        self.next_u32() % bound
    }
}

/// Fisher-Yates from the back: for i = len-1 down to 1, swap i with
/// `next_u32() % (i + 1)`. Lists of length 0 or 1 consume no draws.
pub fn shuffle<T>(items: &mut [T], prng: &mut Prng) {
    for i in (1..items.len()).rev() {
        let j = prng.below(i as u32 + 1) as usize;
        items.swap(i, j);
    }
}
