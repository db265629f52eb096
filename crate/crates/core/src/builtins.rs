//! Named groups: `C8`, `D12`, `Q8`, `S4`, `A5`, `G64` (alias `C8:Q8`),
//! `G243`, and direct products written `AxB`.

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, DEFAULT_ORDER_CAP};
use crate::presentation::{group_from_presentation, DEFAULT_MAX_COSETS};

pub const Q8_PRESENTATION: &str = "<a,b | a^2=b^2, a*b*a^-1=b^-1>";

/// Presentation of the order-243 group with nontrivial Bogomolov multiplier.
pub const G243_PRESENTATION: &str =
    "<a,b,c | a^3=c^3, a^9, b^9, [a,b]=c^8*b^6, [b,c]=a^3, [a,c]=b^3*c^6>";

/// Names accepted by [`builtin`], for listings and tests.
pub const BUILTIN_EXAMPLES: &[&str] = &[
    "C1", "C2", "C8", "D8", "D12", "Q8", "S3", "S4", "A4", "A5", "G64", "G243", "C3xC3",
];

pub fn cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::Input("cyclic group of order 0".into()));
    }
    if n == 1 {
        return Ok(FiniteGroup::trivial());
    }
    let gen: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    FiniteGroup::from_permutations(n, &[gen], Some(vec!["a".into()]), DEFAULT_ORDER_CAP)
}

/// `C_k ⋊ H` where the `i`-th generator of `H` acts on `C_k` by raising to
/// the power `exponents[i]`. `C_k`'s generator is labelled `label`.
pub fn cyclic_extension(
    k: usize,
    label: &str,
    h: &FiniteGroup,
    exponents: &[u64],
) -> Result<FiniteGroup> {
    if exponents.len() != h.generators().len() {
        return Err(Error::Input("one exponent per generator is required".into()));
    }
    let gen: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
    let n = FiniteGroup::from_permutations(k, &[gen], Some(vec![label.into()]), DEFAULT_ORDER_CAP)?;
    let c = n.generators()[0].element;
    let mut unit = vec![0u64; h.order()];
    unit[0] = 1;
    for (x, parent, g) in h.spanning_tree() {
        unit[x] = unit[parent] * exponents[g] % k as u64;
    }
    let powers: Vec<usize> = (0..k).map(|j| n.pow(c, j as i64)).collect();
    let mut log = vec![0usize; k];
    for (j, &p) in powers.iter().enumerate() {
        log[p] = j;
    }
    let action: Vec<Vec<usize>> = unit
        .iter()
        .map(|&u| {
            (0..k)
                .map(|x| powers[(log[x] as u64 * u % k as u64) as usize])
                .collect()
        })
        .collect();
    FiniteGroup::semidirect_product(&n, h, &action)
}

/// Dihedral group of order `2k`.
pub fn dihedral(k: usize) -> Result<FiniteGroup> {
    if k == 0 {
        return Err(Error::Input("dihedral group of order 0".into()));
    }
    if k == 1 {
        return cyclic(2);
    }
    let c2 = FiniteGroup::from_permutations(2, &[vec![1, 0]], Some(vec!["b".into()]), 2)?;
    cyclic_extension(k, "a", &c2, &[k as u64 - 1])
}

pub fn symmetric(n: usize) -> Result<FiniteGroup> {
    if n <= 1 {
        return Ok(FiniteGroup::trivial());
    }
    let mut swap: Vec<usize> = (0..n).collect();
    swap.swap(0, 1);
    if n == 2 {
        return FiniteGroup::from_permutations(n, &[swap], Some(vec!["a".into()]), DEFAULT_ORDER_CAP);
    }
    let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    FiniteGroup::from_permutations(
        n,
        &[cycle, swap],
        Some(vec!["a".into(), "b".into()]),
        DEFAULT_ORDER_CAP,
    )
}

pub fn alternating(n: usize) -> Result<FiniteGroup> {
    if n <= 2 {
        return Ok(FiniteGroup::trivial());
    }
    let gens: Vec<Vec<usize>> = (2..n)
        .map(|i| {
            let mut p: Vec<usize> = (0..n).collect();
            p[0] = 1;
            p[1] = i;
            p[i] = 0;
            p
        })
        .collect();
    FiniteGroup::from_permutations(n, &gens, None, DEFAULT_ORDER_CAP)
}

pub fn quaternion() -> Result<FiniteGroup> {
    group_from_presentation(Q8_PRESENTATION, DEFAULT_MAX_COSETS)
}

/// `C8 ⋊ Q8` with `a c a^-1 = c^3` and `b c b^-1 = c^5`.
pub fn g64() -> Result<FiniteGroup> {
    cyclic_extension(8, "c", &quaternion()?, &[3, 5])
}

pub fn g243() -> Result<FiniteGroup> {
    group_from_presentation(G243_PRESENTATION, DEFAULT_MAX_COSETS)
}

fn parse_index(s: &str, name: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Input(format!("unknown builtin group `{name}`")))
}

/// Resolves a builtin group name.
pub fn builtin(name: &str) -> Result<FiniteGroup> {
    let name = name.trim();
    if name.contains('x') {
        let mut parts = name.split('x');
        let first = builtin(parts.next().unwrap_or_default())?;
        return parts.try_fold(first, |acc, p| FiniteGroup::direct_product(&acc, &builtin(p)?));
    }
    match name {
        "Q8" => return quaternion(),
        "G64" | "C8:Q8" => return g64(),
        "G243" => return g243(),
        _ => {}
    }
    let unknown = || Error::Input(format!("unknown builtin group `{name}`"));
    let (head, tail) = name.split_at(name.find(|c: char| c.is_ascii_digit()).ok_or_else(unknown)?);
    match head {
        "C" => cyclic(parse_index(tail, name)?),
        "D" => {
            let order = parse_index(tail, name)?;
            if order == 0 || order % 2 == 1 {
                return Err(Error::Input(format!("dihedral order must be even: `{name}`")));
            }
            dihedral(order / 2)
        }
        "S" | "A" => {
            let n = parse_index(tail, name)?;
            if n > 6 {
                return Err(Error::Input(format!("`{name}`: degree above 6 is not built in")));
            }
            if head == "S" {
                symmetric(n)
            } else {
                alternating(n)
            }
        }
        _ => Err(unknown()),
    }
}
