//! Named fixture models: the two-state model M, its four-state variant M′
//! that differs from it only in `q`, and finite chain models in the shape of
//! the expressivity argument.

use crate::models::{FiniteModel, StateSet};

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn set(items: &[usize]) -> StateSet {
    items.iter().copied().collect()
}

/// `s {p}` and `t {}`, linked by `a`; `b` is the identity. Designated `s`.
pub fn model_m() -> FiniteModel {
    FiniteModel::from_parts(
        names(&["p"]),
        names(&["a", "b"]),
        names(&["s", "t"]),
        vec![vec![set(&[0, 1])], vec![set(&[0]), set(&[1])]],
        vec![set(&[0])],
        Some(0),
    )
    .unwrap()
}

/// `s' {p,q}`, `t' {}`, `u' {p,q}`, `v' {q}`; `a` links s'–t' and u'–v',
/// `b` links s'–u' and t'–v'. Designated `s'`.
pub fn model_mprime() -> FiniteModel {
    FiniteModel::from_parts(
        names(&["p", "q"]),
        names(&["a", "b"]),
        names(&["sprime", "tprime", "uprime", "vprime"]),
        vec![
            vec![set(&[0, 1]), set(&[2, 3])],
            vec![set(&[0, 2]), set(&[1, 3])],
        ],
        vec![set(&[0, 2]), set(&[0, 2, 3])],
        Some(0),
    )
    .unwrap()
}

/// Chain over the integers `lo..=hi`: `a` pairs `{2i, 2i+1}`, `b` pairs
/// `{2i-1, 2i}`, `p` holds at `4i-1` and `4i`. With `wrap`, the ends are
/// glued into a cycle (requires a length divisible by 4). Designated `0`.
fn chain(lo: i64, hi: i64, wrap: bool) -> FiniteModel {
    let ints: Vec<i64> = (lo..=hi).collect();
    let len = ints.len() as i64;
    let index = |z: i64| -> Option<usize> {
        if wrap {
            Some((z - lo).rem_euclid(len) as usize)
        } else {
            (lo..=hi).contains(&z).then(|| (z - lo) as usize)
        }
    };
    let pairs = |first: fn(i64) -> i64| -> Vec<usize> {
        let mut labels = vec![usize::MAX; ints.len()];
        let mut next = 0;
        for &z in &ints {
            let i = index(z).unwrap();
            if labels[i] != usize::MAX {
                continue;
            }
            let start = first(z);
            labels[i] = next;
            for w in [start, start + 1] {
                if let Some(j) = index(w) {
                    labels[j] = next;
                }
            }
            next += 1;
        }
        labels
    };
    let a = pairs(|z| z.div_euclid(2) * 2);
    let b = pairs(|z| (z + 1).div_euclid(2) * 2 - 1);
    let p: StateSet = ints
        .iter()
        .filter(|&&z| matches!(z.rem_euclid(4), 0 | 3))
        .map(|&z| index(z).unwrap())
        .collect();
    FiniteModel::from_labels(
        names(&["p"]),
        names(&["a", "b"]),
        ints.iter().map(|z| z.to_string()).collect(),
        &[a, b],
        vec![p],
        index(0),
    )
    .unwrap()
}

/// A cyclic rendition of the infinite chain N, bisimilar to M at `0`.
/// `len` must be a positive multiple of 4.
pub fn n_chain(len: usize) -> FiniteModel {
    assert!(len >= 4 && len % 4 == 0, "chain length must be a positive multiple of 4");
    let half = (len / 2) as i64;
    chain(-half, half - 1, true)
}

/// Chain truncated at `right` on the right and at `-left` on the left.
pub fn truncated_chain(left: i64, right: i64) -> FiniteModel {
    chain(-left, right, false)
}

/// Ends `(left, right)` of a truncated chain whose nearest defect, seen
/// from `0`, first shows at modal depth exactly `gap`. A right end at an even
/// `r` is detected at depth `r + 1`, a left end at an odd `l` at depth `l + 1`;
/// the other end is placed far enough away not to interfere.
pub fn chain_ends_for_gap(gap: usize) -> (i64, i64) {
    assert!(gap >= 1, "gap must be positive");
    let near = gap as i64 - 1;
    let far = 2 * near + 8;
    if gap % 2 == 1 {
        (far, near)
    } else {
        (near, far)
    }
}

/// A truncated chain O′ whose designated state `0` is n-bisimilar to the
/// chain N exactly for `n < gap`.
pub fn o_chain(gap: usize) -> FiniteModel {
    let (left, right) = chain_ends_for_gap(gap);
    truncated_chain(left, right)
}

/// The names accepted by [`by_name`].
pub fn list() -> Vec<String> {
    let mut out = names(&["m", "mprime"]);
    out.push("n-chain".into());
    for g in 1..=8 {
        out.push(format!("o-chain-{g}"));
    }
    out
}

pub fn by_name(name: &str) -> Option<FiniteModel> {
    match name {
        "m" => Some(model_m()),
        "mprime" => Some(model_mprime()),
        "n-chain" => Some(n_chain(DEFAULT_CHAIN_LEN)),
        _ => {
            let gap: usize = name.strip_prefix("o-chain-")?.parse().ok()?;
            (1..=8).contains(&gap).then(|| o_chain(gap))
        }
    }
}

pub const DEFAULT_CHAIN_LEN: usize = 16;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_shape() {
        let n = n_chain(8);
        assert!(n.validate().is_ok());
        let zero = n.state_index("0").unwrap();
        assert!(n.atom_extension("p").contains(zero));
        let one = n.state_index("1").unwrap();
        let minus_one = n.state_index("-1").unwrap();
        assert_eq!(n.class_for("a", zero), set(&[zero, one]));
        assert_eq!(n.class_for("b", zero), set(&[minus_one, zero]));
        let o = truncated_chain(3, 4);
        assert!(o.validate().is_ok());
        let four = o.state_index("4").unwrap();
        assert_eq!(o.class_for("a", four), set(&[four]));
    }

    #[test]
    fn every_fixture_builds() {
        for name in list() {
            let m = by_name(&name).unwrap();
            assert!(m.validate().is_ok(), "{name}");
            assert!(m.designated().is_some());
        }
        assert!(by_name("o-chain-0").is_none());
        assert!(by_name("nope").is_none());
    }
}
