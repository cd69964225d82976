use rand::Rng;

/// One edge configuration: bit `e` set means edge `e` is open.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    words: Vec<u64>,
    len: usize,
}

impl Configuration {
    pub fn closed(len: usize) -> Configuration {
        Configuration { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn open(len: usize) -> Configuration {
        let mut c = Configuration { words: vec![u64::MAX; len.div_ceil(64)], len };
        c.trim();
        c
    }

    /// Low `len` bits of `mask`; requires `len <= 64`.
    pub fn from_mask(len: usize, mask: u64) -> Configuration {
        assert!(len <= 64, "mask configurations hold at most 64 edges");
        let mut c = Configuration { words: vec![mask; len.div_ceil(64)], len };
        c.trim();
        c
    }

    pub fn from_bits(bits: &[bool]) -> Configuration {
        let mut c = Configuration::closed(bits.len());
        for (e, b) in bits.iter().enumerate() {
            c.set(e, *b);
        }
        c
    }

    /// Edge `e` open iff `uniforms[e] < p`. Shared uniforms give the
    /// standard monotone coupling across `p`.
    pub fn from_uniforms(uniforms: &[f64], p: f64) -> Configuration {
        let mut c = Configuration::closed(uniforms.len());
        for (e, u) in uniforms.iter().enumerate() {
            if *u < p {
                c.words[e / 64] |= 1 << (e % 64);
            }
        }
        c
    }

    /// Independent Bernoulli(p) bits, one uniform per edge in index order.
    pub fn sample<R: Rng + ?Sized>(len: usize, p: f64, rng: &mut R) -> Configuration {
        let mut c = Configuration::closed(len);
        for e in 0..len {
            if rng.random::<f64>() < p {
                c.words[e / 64] |= 1 << (e % 64);
            }
        }
        c
    }

    fn trim(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(w) = self.words.last_mut() {
                *w &= (1u64 << r) - 1;
            }
        }
        if self.len == 0 {
            self.words.clear();
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, e: usize) -> bool {
        debug_assert!(e < self.len);
        self.words[e / 64] >> (e % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, e: usize, open: bool) {
        debug_assert!(e < self.len);
        if open {
            self.words[e / 64] |= 1 << (e % 64);
        } else {
            self.words[e / 64] &= !(1 << (e % 64));
        }
    }

    /// Copy with edge `e` forced to `open`.
    pub fn with(&self, e: usize, open: bool) -> Configuration {
        let mut c = self.clone();
        c.set(e, open);
        c
    }

    pub fn count_open(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn open_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&e| self.get(e))
    }

    /// Bitwise order: every edge open here is open in `other`.
    pub fn le(&self, other: &Configuration) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Low 64 bits as a mask.
    pub fn mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn extremes_of_p() {
        let mut r = rng::stream(1, rng::tag::CONFIG, 0);
        assert_eq!(Configuration::sample(100, 0.0, &mut r).count_open(), 0);
        assert_eq!(Configuration::sample(100, 1.0, &mut r).count_open(), 100);
        assert_eq!(Configuration::open(70).count_open(), 70);
    }

    #[test]
    fn masks_and_flips() {
        let c = Configuration::from_mask(5, 0b10110);
        assert!(!c.get(0) && c.get(1) && c.get(2) && !c.get(3) && c.get(4));
        assert_eq!(c.with(0, true).mask(), 0b10111);
        assert!(c.le(&c.with(3, true)));
        assert!(!c.with(3, true).le(&c));
        assert_eq!(c.open_edges().collect::<Vec<_>>(), vec![1, 2, 4]);
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = Configuration::sample(300, 0.4, &mut rng::stream(9, rng::tag::CONFIG, 2));
        let b = Configuration::sample(300, 0.4, &mut rng::stream(9, rng::tag::CONFIG, 2));
        assert_eq!(a, b);
    }
}
