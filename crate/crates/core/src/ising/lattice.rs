use crate::error::{Error, Result};

/// M×M periodic lattice of binary spins (0 = down, Z = +1; 1 = up) with
/// sites bucketed by their number of misaligned neighbours.
///
/// Each site has four neighbour slots (north, south, east, west). On a 2×2
/// lattice opposite slots point at the same site and are counted twice.
#[derive(Clone, Debug)]
pub struct SpinConfig {
    m: usize,
    spins: Vec<u8>,
    class_of: Vec<u8>,
    members: [Vec<u32>; 5],
    pos: Vec<u32>,
}

impl PartialEq for SpinConfig {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.spins == other.spins
    }
}

impl Eq for SpinConfig {}

impl SpinConfig {
    pub fn uniform(m: usize, spin: u8) -> Result<Self> {
        Self::from_spins(m, vec![spin; m * m])
    }

    pub fn from_spins(m: usize, spins: Vec<u8>) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParams("lattice size must be at least 2".into()));
        }
        if spins.len() != m * m {
            return Err(Error::DimensionMismatch { expected: m * m, found: spins.len() });
        }
        if spins.iter().any(|&s| s > 1) {
            return Err(Error::InvalidParams("spins must be 0 or 1".into()));
        }
        let n = m * m;
        let mut cfg = Self {
            m,
            spins,
            class_of: vec![0; n],
            members: Default::default(),
            pos: vec![0; n],
        };
        cfg.rebuild_classes();
        Ok(cfg)
    }

    /// Configuration whose spin at site s is bit s of `index`.
    pub fn from_index(m: usize, index: usize) -> Result<Self> {
        let spins = (0..m * m).map(|s| ((index >> s) & 1) as u8).collect();
        Self::from_spins(m, spins)
    }

    /// Inverse of [`SpinConfig::from_index`].
    pub fn index(&self) -> usize {
        self.spins.iter().enumerate().map(|(s, &v)| (v as usize) << s).sum()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_sites(&self) -> usize {
        self.m * self.m
    }

    pub fn site(&self, x: usize, y: usize) -> usize {
        (y % self.m) * self.m + (x % self.m)
    }

    pub fn spin(&self, site: usize) -> u8 {
        self.spins[site]
    }

    pub fn spins(&self) -> &[u8] {
        &self.spins
    }

    /// Neighbour slots [north, south, east, west]; north is (x, y+1) and
    /// east is (x+1, y).
    pub fn neighbors(&self, site: usize) -> [usize; 4] {
        let m = self.m;
        let (x, y) = (site % m, site / m);
        [
            ((y + 1) % m) * m + x,
            ((y + m - 1) % m) * m + x,
            y * m + (x + 1) % m,
            y * m + (x + m - 1) % m,
        ]
    }

    pub fn misaligned(&self, site: usize) -> u8 {
        let s = self.spins[site];
        self.neighbors(site).iter().filter(|&&j| self.spins[j] != s).count() as u8
    }

    pub fn class_of(&self, site: usize) -> u8 {
        self.class_of[site]
    }

    pub fn class_counts(&self) -> [usize; 5] {
        std::array::from_fn(|k| self.members[k].len())
    }

    pub fn members(&self, class: usize) -> &[u32] {
        &self.members[class]
    }

    pub fn n_up(&self) -> usize {
        self.spins.iter().filter(|&&s| s == 1).count()
    }

    /// Mean of Z over sites (Z = +1 for down spins).
    pub fn magnetization(&self) -> f64 {
        let n = self.n_sites() as f64;
        (n - 2.0 * self.n_up() as f64) / n
    }

    /// H = -Σ Z_i Z_j over the north and east slot of every site.
    pub fn energy(&self) -> f64 {
        let mut e = 0.0;
        for s in 0..self.n_sites() {
            let nb = self.neighbors(s);
            for &j in &[nb[0], nb[2]] {
                e += if self.spins[s] == self.spins[j] { -1.0 } else { 1.0 };
            }
        }
        e
    }

    fn rebuild_classes(&mut self) {
        for v in &mut self.members {
            v.clear();
        }
        for s in 0..self.n_sites() {
            let c = self.misaligned(s);
            self.class_of[s] = c;
            self.pos[s] = self.members[c as usize].len() as u32;
            self.members[c as usize].push(s as u32);
        }
    }

    fn reclassify(&mut self, site: usize) {
        let new = self.misaligned(site);
        let old = self.class_of[site];
        if new == old {
            return;
        }
        let list = &mut self.members[old as usize];
        let p = self.pos[site] as usize;
        let last = *list.last().expect("site present in its class");
        list.swap_remove(p);
        if last as usize != site {
            self.pos[last as usize] = p as u32;
        }
        self.pos[site] = self.members[new as usize].len() as u32;
        self.members[new as usize].push(site as u32);
        self.class_of[site] = new;
    }

    /// Flip one spin, updating the classes of it and its neighbours.
    pub fn flip(&mut self, site: usize) {
        self.spins[site] ^= 1;
        self.reclassify(site);
        for j in self.neighbors(site) {
            self.reclassify(j);
        }
    }

    /// Whether cached classes equal a from-scratch recount.
    pub fn classes_consistent(&self) -> bool {
        let mut fresh = self.clone();
        fresh.rebuild_classes();
        if fresh.class_of != self.class_of {
            return false;
        }
        for c in 0..5 {
            let mut a = self.members[c].clone();
            let mut b = fresh.members[c].clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return false;
            }
            for (k, &s) in self.members[c].iter().enumerate() {
                if self.pos[s as usize] as usize != k {
                    return false;
                }
            }
        }
        true
    }

    /// Same configuration with every spin flipped.
    pub fn globally_flipped(&self) -> Self {
        Self::from_spins(self.m, self.spins.iter().map(|s| s ^ 1).collect())
            .expect("valid configuration")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_up_spin_classes() {
        let mut c = SpinConfig::uniform(5, 0).unwrap();
        c.flip(12);
        assert_eq!(c.class_of(12), 4);
        for j in c.neighbors(12) {
            assert_eq!(c.class_of(j), 1);
        }
        assert_eq!(c.class_counts(), [20, 4, 0, 0, 1]);
    }

    #[test]
    fn two_by_two_counts_duplicate_slots() {
        let mut c = SpinConfig::uniform(2, 0).unwrap();
        c.flip(0);
        assert_eq!(c.class_of(0), 4);
        assert_eq!(c.class_of(1), 2);
        assert_eq!(c.class_of(3), 0);
    }

    #[test]
    fn cache_survives_random_flips() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = SpinConfig::uniform(16, 0).unwrap();
        for k in 0..100_000 {
            c.flip(rng.random_range(0..256));
            if k % 25_000 == 0 {
                assert!(c.classes_consistent());
            }
        }
        assert!(c.classes_consistent());
        assert_eq!(c.class_counts().iter().sum::<usize>(), 256);
    }

    #[test]
    fn index_round_trip_and_energy() {
        for idx in [0usize, 1, 77, 511] {
            let c = SpinConfig::from_index(3, idx).unwrap();
            assert_eq!(c.index(), idx);
        }
        assert_eq!(SpinConfig::uniform(3, 1).unwrap().energy(), -18.0);
    }

    #[test]
    fn flip_energy_change_matches_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut c = SpinConfig::uniform(4, 0).unwrap();
        for _ in 0..200 {
            let s = rng.random_range(0..16);
            let n = c.class_of(s) as f64;
            let e0 = c.energy();
            c.flip(s);
            assert_eq!(c.energy() - e0, 8.0 - 4.0 * n);
        }
    }
}
