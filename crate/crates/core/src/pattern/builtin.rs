use super::{Pattern, MAX_PATTERN_VERTICES};
use crate::error::{Error, Result};

pub const BUILTIN_NAMES: &[&str] = &[
    "triangle",
    "k-clique",
    "k-star",
    "k-cycle",
    "k-chain",
    "5-house",
    "4-clique-2-dot",
    "3-star-2-star",
    "triangle-2-star",
    "triangle-triangle",
    "6-cycle-diagonals",
    "5-cycle-triangle",
];

pub(super) fn lookup(name: &str) -> Result<Option<Pattern>> {
    let lower = name.to_ascii_lowercase();
    let fixed: Option<(usize, Vec<(usize, usize)>)> = match lower.as_str() {
        "triangle" => Some((3, clique(3))),
        // square 0-1-2-3 with the roof apex 4 over the 0-1 side
        "5-house" => Some((5, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 4)])),
        // K4 with one pendant vertex on each of two clique vertices
        "4-clique-2-dot" => {
            let mut e = clique(4);
            e.extend([(0, 4), (1, 5)]);
            Some((6, e))
        }
        // 3-star centered at 0 and 2-star centered at 4, centers joined
        "3-star-2-star" => Some((7, vec![(0, 1), (0, 2), (0, 3), (0, 4), (4, 5), (4, 6)])),
        // triangle 0-1-2 with a 2-star centered at 3 hanging off vertex 0
        "triangle-2-star" => Some((6, vec![(0, 1), (0, 2), (1, 2), (0, 3), (3, 4), (3, 5)])),
        // two triangles sharing vertex 0
        "triangle-triangle" => Some((5, vec![(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)])),
        // hexagon with the two short diagonals 0-2 and 0-4 from one corner
        "6-cycle-diagonals" => {
            let mut e = cycle(6);
            e.extend([(0, 2), (0, 4)]);
            Some((6, e))
        }
        // pentagon 0..4 with apex 5 closing the triangle 0-1-5 and reaching 3
        "5-cycle-triangle" => {
            let mut e = cycle(5);
            e.extend([(0, 5), (1, 5), (3, 5)]);
            Some((6, e))
        }
        _ => None,
    };
    if let Some((n, edges)) = fixed {
        return Pattern::new(n, &edges).map(|p| Some(p.with_name(lower)));
    }

    let Some((k, kind)) = lower.split_once('-') else {
        return Ok(None);
    };
    let Ok(k) = k.parse::<usize>() else {
        return Ok(None);
    };
    let (n, edges) = match kind {
        "clique" => (k, clique(k)),
        "star" => (k + 1, (1..=k).map(|leaf| (0, leaf)).collect()),
        "cycle" if k >= 3 => (k, cycle(k)),
        "chain" => (k, (1..k).map(|i| (i - 1, i)).collect()),
        "cycle" => return Err(Error::InvalidPattern("a cycle needs at least 3 vertices".into())),
        _ => return Ok(None),
    };
    if n > MAX_PATTERN_VERTICES {
        return Err(Error::InvalidPattern(format!(
            "{lower} has {n} vertices; the limit is {MAX_PATTERN_VERTICES}"
        )));
    }
    Pattern::new(n, &edges).map(|p| Some(p.with_name(lower)))
}

fn clique(k: usize) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            e.push((a, b));
        }
    }
    e
}

fn cycle(k: usize) -> Vec<(usize, usize)> {
    (0..k).map(|i| (i, (i + 1) % k)).collect()
}
