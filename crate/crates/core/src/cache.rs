//! Randomized fractional cache placement.
//!
//! Each EN stores, independently for every file, a uniformly random subset
//! of floor(mu * L) of that file's L subfiles.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::SystemConfig;

/// Caching variables c^i_{f,l} for every EN, file and subfile.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheState {
    ens: usize,
    files: usize,
    subfiles: usize,
    subfile_bits: f64,
    bits: Vec<bool>,
}

impl CacheState {
    /// An empty cache of the given dimensions.
    pub fn empty(ens: usize, files: usize, subfiles: usize, subfile_bits: f64) -> Self {
        CacheState {
            ens,
            files,
            subfiles,
            subfile_bits,
            bits: vec![false; ens * files * subfiles],
        }
    }

    fn offset(&self, i: usize, f: usize, l: usize) -> usize {
        ((i - 1) * self.files + (f - 1)) * self.subfiles + (l - 1)
    }

    fn check(&self, i: usize, f: usize, l: usize) -> Result<()> {
        if i == 0 || i > self.ens {
            return Err(Error::param(
                "i",
                format!("EN {i} is outside [1, {}]", self.ens),
            ));
        }
        if f == 0 || f > self.files {
            return Err(Error::param(
                "f",
                format!("file {f} is outside [1, {}]", self.files),
            ));
        }
        if l == 0 || l > self.subfiles {
            return Err(Error::param(
                "l",
                format!("subfile {l} is outside [1, {}]", self.subfiles),
            ));
        }
        Ok(())
    }

    /// Whether EN `i` caches subfile `(f, l)`. All indices are 1-based.
    pub fn cached(&self, i: usize, f: usize, l: usize) -> Result<bool> {
        self.check(i, f, l)?;
        Ok(self.bits[self.offset(i, f, l)])
    }

    /// Unchecked variant of [`CacheState::cached`] for hot loops.
    pub(crate) fn has(&self, i: usize, f: usize, l: usize) -> bool {
        self.bits[self.offset(i, f, l)]
    }

    pub fn set(&mut self, i: usize, f: usize, l: usize, value: bool) -> Result<()> {
        self.check(i, f, l)?;
        let o = self.offset(i, f, l);
        self.bits[o] = value;
        Ok(())
    }

    pub fn ens(&self) -> usize {
        self.ens
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn subfiles(&self) -> usize {
        self.subfiles
    }

    pub fn subfile_bits(&self) -> f64 {
        self.subfile_bits
    }

    /// Number of cached subfiles of file `f` at EN `i`.
    pub fn count_for(&self, i: usize, f: usize) -> usize {
        let start = self.offset(i, f, 1);
        self.bits[start..start + self.subfiles]
            .iter()
            .filter(|&&b| b)
            .count()
    }

    /// Bits stored at EN `i`.
    pub fn stored_bits(&self, i: usize) -> f64 {
        let start = self.offset(i, 1, 1);
        let n = self.bits[start..start + self.files * self.subfiles]
            .iter()
            .filter(|&&b| b)
            .count();
        n as f64 * self.subfile_bits
    }

    /// Text dump: one line per (EN, file) in EN-major order, one `0`/`1`
    /// character per subfile.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.bits.len() + self.ens * self.files);
        for row in self.bits.chunks(self.subfiles) {
            for &b in row {
                out.push(if b { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`CacheState::to_text`].
    pub fn from_text(text: &str, ens: usize, subfile_bits: f64) -> Result<Self> {
        let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        if ens == 0 || rows.is_empty() || !rows.len().is_multiple_of(ens) {
            return Err(Error::param(
                "cache",
                "row count is not a multiple of the EN count",
            ));
        }
        let files = rows.len() / ens;
        let subfiles = rows[0].trim().len();
        let mut state = CacheState::empty(ens, files, subfiles, subfile_bits);
        for (r, row) in rows.iter().enumerate() {
            let row = row.trim();
            if row.len() != subfiles {
                let mut msg = String::new();
                let _ = write!(
                    msg,
                    "row {} has {} columns, expected {subfiles}",
                    r + 1,
                    row.len()
                );
                return Err(Error::param("cache", msg));
            }
            for (c, ch) in row.chars().enumerate() {
                state.bits[r * subfiles + c] = match ch {
                    '0' => false,
                    '1' => true,
                    other => {
                        return Err(Error::param(
                            "cache",
                            format!("unexpected character {other:?}"),
                        ))
                    }
                };
            }
        }
        Ok(state)
    }
}

/// Draws a fresh cache placement for every EN.
///
/// For each (EN, file) a full random permutation of the subfiles is drawn
/// and its first floor(mu * L) entries are cached. The draw count does not
/// depend on mu, so for a fixed stream the placements are nested as mu
/// grows.
pub fn populate_caches<R: Rng + ?Sized>(rng: &mut R, cfg: &SystemConfig) -> CacheState {
    let keep = cfg.cached_per_file();
    let mut state = CacheState::empty(
        cfg.pairs,
        cfg.library_size,
        cfg.subfiles,
        cfg.subfile_bits(),
    );
    let mut perm: Vec<usize> = (0..cfg.subfiles).collect();
    for i in 1..=cfg.pairs {
        for f in 1..=cfg.library_size {
            perm.iter_mut().enumerate().for_each(|(j, p)| *p = j);
            perm.shuffle(rng);
            let base = state.offset(i, f, 1);
            for &l in &perm[..keep] {
                state.bits[base + l] = true;
            }
        }
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn cfg(mu: f64, l: usize) -> SystemConfig {
        SystemConfig {
            cache_fraction: mu,
            subfiles: l,
            library_size: 7,
            ..SystemConfig::default()
        }
    }

    #[test]
    fn exact_count_per_en_and_file() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let c = cfg(0.3, 50);
        let s = populate_caches(&mut rng, &c);
        for i in 1..=c.pairs {
            for f in 1..=c.library_size {
                assert_eq!(s.count_for(i, f), 15);
            }
            // Memory constraint with equality: 0.3 * 50 is an integer.
            let budget = c.cache_capacity_files() * c.file_bits;
            assert!((s.stored_bits(i) - budget).abs() <= 1e-6 * budget);
        }
    }

    #[test]
    fn memory_constraint_strict_when_fractional() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let c = cfg(0.33, 10);
        let s = populate_caches(&mut rng, &c);
        let budget = c.cache_capacity_files() * c.file_bits;
        for i in 1..=c.pairs {
            assert!(s.stored_bits(i) < budget);
        }
    }

    #[test]
    fn full_and_empty_caches() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let full = populate_caches(&mut rng, &cfg(1.0, 9));
        let none = populate_caches(&mut rng, &cfg(0.0, 9));
        for i in 1..=4 {
            for f in 1..=7 {
                for l in 1..=9 {
                    assert!(full.cached(i, f, l).unwrap());
                    assert!(!none.cached(i, f, l).unwrap());
                }
            }
        }
    }

    #[test]
    fn hand_built_lookup_and_range_errors() {
        let mut s = CacheState::empty(2, 3, 4, 1.0);
        s.set(1, 2, 3, true).unwrap();
        assert!(s.cached(1, 2, 3).unwrap());
        assert!(!s.cached(1, 2, 4).unwrap());
        assert!(matches!(
            s.cached(0, 1, 1),
            Err(Error::Parameter { name: "i", .. })
        ));
        assert!(matches!(
            s.cached(1, 4, 1),
            Err(Error::Parameter { name: "f", .. })
        ));
        assert!(matches!(
            s.cached(1, 1, 5),
            Err(Error::Parameter { name: "l", .. })
        ));
    }

    #[test]
    fn subfile_indices_are_uniform() {
        let c = SystemConfig {
            pairs: 1,
            library_size: 1,
            subfiles: 10,
            cache_fraction: 0.3,
            ..SystemConfig::default()
        };
        let trials = 100_000;
        let mut hits = [0usize; 10];
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for _ in 0..trials {
            let s = populate_caches(&mut rng, &c);
            for (l, h) in hits.iter_mut().enumerate() {
                if s.cached(1, 1, l + 1).unwrap() {
                    *h += 1;
                }
            }
        }
        for h in hits {
            let freq = h as f64 / trials as f64;
            assert!((freq - 0.3).abs() < 0.02 * 0.3, "frequency {freq}");
        }
    }

    #[test]
    fn placements_are_nested_in_mu() {
        let small = populate_caches(&mut ChaCha20Rng::seed_from_u64(5), &cfg(0.2, 20));
        let large = populate_caches(&mut ChaCha20Rng::seed_from_u64(5), &cfg(0.6, 20));
        for i in 1..=4 {
            for f in 1..=7 {
                for l in 1..=20 {
                    if small.cached(i, f, l).unwrap() {
                        assert!(large.cached(i, f, l).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn text_dump_round_trip() {
        let s = populate_caches(&mut ChaCha20Rng::seed_from_u64(3), &cfg(0.5, 6));
        let text = s.to_text();
        assert_eq!(text.lines().count(), 4 * 7);
        assert!(text.lines().all(|l| l.len() == 6));
        assert_eq!(
            CacheState::from_text(&text, 4, s.subfile_bits()).unwrap(),
            s
        );
    }
}
