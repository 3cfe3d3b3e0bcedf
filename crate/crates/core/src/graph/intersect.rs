use super::VertexId;

/// Size ratio above which the shorter list gallops through the longer one.
pub const GALLOP_RATIO: usize = 32;

#[inline]
pub fn contains(sorted: &[VertexId], v: VertexId) -> bool {
    sorted.binary_search(&v).is_ok()
}

/// Multi-way intersection of ascending lists. One input yields a copy.
pub fn intersect_sorted(lists: &[&[VertexId]]) -> Vec<VertexId> {
    let mut out = Vec::new();
    let mut tmp = Vec::new();
    intersect_into(lists, &mut out, &mut tmp);
    out
}

/// Allocation-reusing form of [`intersect_sorted`]; `tmp` is scratch space.
pub fn intersect_into(lists: &[&[VertexId]], out: &mut Vec<VertexId>, tmp: &mut Vec<VertexId>) {
    out.clear();
    match lists {
        [] => {}
        [only] => out.extend_from_slice(only),
        _ => {
            // Start from the shortest list so the running result stays small.
            let first = (0..lists.len()).min_by_key(|&i| lists[i].len()).unwrap();
            let second = (0..lists.len())
                .filter(|&i| i != first)
                .min_by_key(|&i| lists[i].len())
                .unwrap();
            intersect_pair(lists[first], lists[second], out);
            for (i, list) in lists.iter().enumerate() {
                if i == first || i == second {
                    continue;
                }
                if out.is_empty() {
                    break;
                }
                tmp.clear();
                intersect_pair(out, list, tmp);
                std::mem::swap(out, tmp);
            }
        }
    }
}

fn intersect_pair(a: &[VertexId], b: &[VertexId], out: &mut Vec<VertexId>) {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if small.is_empty() {
        return;
    }
    if large.len() / small.len() > GALLOP_RATIO {
        gallop(small, large, out);
    } else {
        merge(small, large, out);
    }
}

fn merge(a: &[VertexId], b: &[VertexId], out: &mut Vec<VertexId>) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

fn gallop(small: &[VertexId], large: &[VertexId], out: &mut Vec<VertexId>) {
    let mut base = 0;
    for &x in small {
        let rest = &large[base..];
        // exponential probe, then binary search inside the bracket
        let mut hi = 1;
        while hi < rest.len() && rest[hi] < x {
            hi *= 2;
        }
        let lo = hi / 2;
        let end = (hi + 1).min(rest.len());
        match rest[lo..end].binary_search(&x) {
            Ok(pos) => {
                out.push(x);
                base += lo + pos + 1;
            }
            Err(pos) => base += lo + pos,
        }
        if base >= large.len() {
            break;
        }
    }
}
