use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// Finitely generated abelian group `Z^free_rank ⊕ Z/d1 ⊕ ... ⊕ Z/dr` with
/// `d1 | d2 | ... | dr` and every `di ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AbelianGroupDescriptor {
    pub free_rank: usize,
    pub invariant_factors: Vec<u64>,
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl AbelianGroupDescriptor {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroupDescriptor {
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_cyclic_orders(0, &[n])
    }

    /// Normalizes an arbitrary list of cyclic orders (zeros and ones are
    /// dropped) into a divisibility chain.
    pub fn from_cyclic_orders(free_rank: usize, orders: &[u64]) -> Self {
        let mut by_prime: std::collections::BTreeMap<u64, Vec<u64>> = Default::default();
        for &d in orders {
            if d <= 1 {
                continue;
            }
            for (p, e) in factorize(d) {
                by_prime.entry(p).or_default().push(p.pow(e));
            }
        }
        let longest = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; longest];
        for powers in by_prime.values_mut() {
            powers.sort_unstable();
            let offset = longest - powers.len();
            for (i, q) in powers.iter().enumerate() {
                factors[offset + i] *= q;
            }
        }
        AbelianGroupDescriptor {
            free_rank,
            invariant_factors: factors,
        }
    }

    /// Validates the divisibility chain.
    pub fn check(&self) -> Result<()> {
        if self.invariant_factors.iter().any(|&d| d < 2) {
            return Err(Error::Internal("invariant factor below 2".into()));
        }
        if self
            .invariant_factors
            .windows(2)
            .any(|w| w[1] % w[0] != 0)
        {
            return Err(Error::Internal("invariant factors do not form a chain".into()));
        }
        Ok(())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> u128 {
        self.invariant_factors.iter().map(|&d| d as u128).product()
    }

    pub fn torsion(&self) -> AbelianGroupDescriptor {
        AbelianGroupDescriptor {
            free_rank: 0,
            invariant_factors: self.invariant_factors.clone(),
        }
    }

    pub fn direct_sum(&self, other: &AbelianGroupDescriptor) -> AbelianGroupDescriptor {
        let mut orders = self.invariant_factors.clone();
        orders.extend_from_slice(&other.invariant_factors);
        Self::from_cyclic_orders(self.free_rank + other.free_rank, &orders)
    }

    /// Cyclic orders of the `p`-primary part, ascending.
    pub fn primary_part(&self, p: u64) -> Vec<u64> {
        self.invariant_factors
            .iter()
            .filter_map(|&d| {
                let mut q = 1;
                let mut d = d;
                while d % p == 0 {
                    d /= p;
                    q *= p;
                }
                (q > 1).then_some(q)
            })
            .collect()
    }

    /// Reads off the invariant factors of an abelian group from the number
    /// of elements killed by each prime power.
    pub fn from_abelian_group(g: &FiniteGroup) -> Result<Self> {
        if !g.is_abelian() {
            return Err(Error::Precondition("group is not abelian".into()));
        }
        let mut orders = Vec::new();
        for (p, e) in factorize(g.order() as u64) {
            // killed[j] = log_p #{x : x^(p^j) = e}
            let mut killed = vec![0u32];
            for j in 1..=e {
                let pj = p.pow(j) as i64;
                let count = (0..g.order()).filter(|&x| g.pow(x, pj) == 0).count() as u64;
                killed.push(log_exact(count, p)?);
            }
            // number of cyclic factors of order >= p^j
            let at_least: Vec<u32> = (1..=e as usize).map(|j| killed[j] - killed[j - 1]).collect();
            for j in 0..at_least.len() {
                let next = at_least.get(j + 1).copied().unwrap_or(0);
                for _ in 0..at_least[j] - next {
                    orders.push(p.pow(j as u32 + 1));
                }
            }
        }
        Ok(Self::from_cyclic_orders(0, &orders))
    }
}

fn log_exact(mut n: u64, p: u64) -> Result<u32> {
    let mut e = 0;
    while n > 1 {
        if !n.is_multiple_of(p) {
            return Err(Error::Internal(format!("{n} is not a power of {p}")));
        }
        n /= p;
        e += 1;
    }
    Ok(e)
}

impl fmt::Display for AbelianGroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;

    #[test]
    fn chain_normalization() {
        let d = AbelianGroupDescriptor::from_cyclic_orders(0, &[2, 3]);
        assert_eq!(d.invariant_factors, vec![6]);
        let d = AbelianGroupDescriptor::from_cyclic_orders(1, &[4, 2, 1, 6]);
        assert_eq!(d.invariant_factors, vec![2, 2, 12]);
        assert_eq!(d.free_rank, 1);
        d.check().unwrap();
        assert_eq!(d.torsion_order(), 48);
    }

    #[test]
    fn display() {
        assert_eq!(AbelianGroupDescriptor::trivial().to_string(), "0");
        assert_eq!(AbelianGroupDescriptor::free(1).to_string(), "Z^1");
        assert_eq!(AbelianGroupDescriptor::cyclic(2).to_string(), "Z/2");
        let d = AbelianGroupDescriptor::from_cyclic_orders(6, &[2]);
        assert_eq!(d.to_string(), "Z^6 + Z/2");
    }

    #[test]
    fn from_groups() {
        let cases = [
            ("C6", vec![6]),
            ("C2xC2", vec![2, 2]),
            ("C2xC4", vec![2, 4]),
            ("C4xC6", vec![2, 12]),
            ("C1", vec![]),
        ];
        for (name, factors) in cases {
            let g = builtin(name).unwrap();
            assert_eq!(
                AbelianGroupDescriptor::from_abelian_group(&g).unwrap().invariant_factors,
                factors,
                "{name}"
            );
        }
        assert!(AbelianGroupDescriptor::from_abelian_group(&builtin("S3").unwrap()).is_err());
    }

    #[test]
    fn primary_parts() {
        let d = AbelianGroupDescriptor::from_cyclic_orders(0, &[4, 6]);
        assert_eq!(d.primary_part(2), vec![2, 4]);
        assert_eq!(d.primary_part(3), vec![3]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
    }
}
