use std::collections::BTreeMap;

/// A finite distribution over outcomes. Exact distributions come from
/// branch enumeration; empirical ones from counting samples.
#[derive(Clone, Debug)]
pub struct Distribution<K: Ord> {
    probs: BTreeMap<K, Acc>,
}

/// Neumaier-compensated running sum. Exhaustive runs add millions of
/// leaf weights into a few keys.
#[derive(Clone, Copy, Debug, Default)]
struct Acc {
    sum: f64,
    comp: f64,
}

impl Acc {
    fn of(p: f64) -> Self {
        Acc { sum: p, comp: 0.0 }
    }

    fn add(&mut self, p: f64) {
        let t = self.sum + p;
        if self.sum.abs() >= p.abs() {
            self.comp += (self.sum - t) + p;
        } else {
            self.comp += (p - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl<K: Ord> PartialEq for Distribution<K> {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().zip(other.iter()).all(|(a, b)| a == b)
    }
}

impl<K: Ord> Default for Distribution<K> {
    fn default() -> Self {
        Distribution {
            probs: BTreeMap::new(),
        }
    }
}

impl<K: Ord> Distribution<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point(k: K) -> Self {
        let mut d = Self::new();
        d.add(k, 1.0);
        d
    }

    pub fn add(&mut self, k: K, p: f64) {
        self.probs.entry(k).or_default().add(p);
    }

    pub fn prob(&self, k: &K) -> f64 {
        self.probs.get(k).map_or(0.0, Acc::value)
    }

    pub fn total(&self) -> f64 {
        let mut acc = Acc::default();
        for p in self.probs.values() {
            acc.add(p.value());
        }
        acc.value()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.probs.iter().map(|(k, p)| (k, p.value()))
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.probs.keys()
    }

    /// Pushes the distribution forward through `f`, merging equal images.
    pub fn map<K2: Ord>(&self, mut f: impl FnMut(&K) -> K2) -> Distribution<K2> {
        let mut out = Distribution::new();
        for (k, p) in &self.probs {
            out.add(f(k), p.value());
        }
        out
    }

    /// Probability of the event `pred`.
    pub fn mass(&self, mut pred: impl FnMut(&K) -> bool) -> f64 {
        let mut acc = Acc::default();
        for (_, p) in self.probs.iter().filter(|(k, _)| pred(k)) {
            acc.add(p.value());
        }
        acc.value()
    }

    /// Empirical distribution of `samples`.
    pub fn empirical(samples: impl IntoIterator<Item = K>) -> Self {
        let mut counts: BTreeMap<K, usize> = BTreeMap::new();
        let mut n = 0usize;
        for s in samples {
            *counts.entry(s).or_insert(0) += 1;
            n += 1;
        }
        Distribution {
            probs: counts.into_iter().map(|(k, c)| (k, Acc::of(c as f64 / n as f64))).collect(),
        }
    }
}

impl<K: Ord> FromIterator<(K, f64)> for Distribution<K> {
    fn from_iter<I: IntoIterator<Item = (K, f64)>>(iter: I) -> Self {
        let mut d = Distribution::new();
        for (k, p) in iter {
            d.add(k, p);
        }
        d
    }
}
