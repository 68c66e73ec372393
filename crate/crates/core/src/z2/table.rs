use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// ℤ/2 ranks by degree. Absent degrees have rank zero; zero ranks are never
/// stored, so two tables are equal exactly when they agree in every degree.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct GHTable {
    ranks: BTreeMap<i64, usize>,
}

impl GHTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (i64, usize)>>(pairs: I) -> Self {
        let mut t = Self::new();
        for (k, r) in pairs {
            t.add(k, r);
        }
        t
    }

    pub fn rank(&self, degree: i64) -> usize {
        self.ranks.get(&degree).copied().unwrap_or(0)
    }

    pub fn set(&mut self, degree: i64, rank: usize) {
        if rank == 0 {
            self.ranks.remove(&degree);
        } else {
            self.ranks.insert(degree, rank);
        }
    }

    pub fn add(&mut self, degree: i64, rank: usize) {
        let r = self.rank(degree) + rank;
        self.set(degree, r);
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    /// Nonzero entries in increasing degree.
    pub fn iter(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.ranks.iter().map(|(k, r)| (*k, *r))
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.ranks.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.ranks.keys().next_back().copied()
    }

    /// Same ranks with every degree moved by `by`.
    pub fn shifted(&self, by: i64) -> GHTable {
        GHTable::from_pairs(self.iter().map(|(k, r)| (k + by, r)))
    }

    pub fn direct_sum(&self, other: &GHTable) -> GHTable {
        let mut out = self.clone();
        for (k, r) in other.iter() {
            out.add(k, r);
        }
        out
    }

    /// Alternating sum Σ (−1)^k rank_k.
    pub fn euler_characteristic(&self) -> i64 {
        self.iter()
            .map(|(k, r)| if k.rem_euclid(2) == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }
}

impl fmt::Debug for GHTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.ranks.iter()).finish()
    }
}

impl fmt::Display for GHTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "(all ranks zero)");
        }
        writeln!(f, "{:>8}  {:>6}", "degree", "rank")?;
        for (k, r) in self.iter() {
            writeln!(f, "{k:>8}  {r:>6}")?;
        }
        Ok(())
    }
}

// JSON form: {"1": 1, "-3": 2}.
impl Serialize for GHTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        // Numeric degree order, not lexical.
        let mut map = s.serialize_map(Some(self.ranks.len()))?;
        for (k, r) in self.iter() {
            map.serialize_entry(&k.to_string(), &r)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for GHTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m: BTreeMap<String, usize> = BTreeMap::deserialize(d)?;
        let mut t = GHTable::new();
        for (k, r) in m {
            let deg: i64 = k
                .trim()
                .parse()
                .map_err(|_| serde::de::Error::custom(format!("degree key {k:?} is not an integer")))?;
            t.add(deg, r);
        }
        Ok(t)
    }
}
