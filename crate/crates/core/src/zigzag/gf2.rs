//! Sparse vectors over the two-element field and a leading-term echelon.
//!
//! A vector is a strictly increasing list of the coordinates that are 1.
//! Its leading term is the largest coordinate.

use std::collections::HashMap;

pub type SparseVec = Vec<u32>;

/// `a += b` (symmetric difference of supports).
pub fn xor_into(a: &mut SparseVec, b: &[u32]) {
    if b.is_empty() {
        return;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    *a = out;
}

/// Sorts an arbitrary coordinate list and cancels repeated pairs.
pub fn normalize(mut v: Vec<u32>) -> SparseVec {
    v.sort_unstable();
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Sum of the columns selected by `combo`.
pub fn apply(columns: &[SparseVec], combo: &[u32]) -> SparseVec {
    match combo {
        [] => Vec::new(),
        [k] => columns[*k as usize].clone(),
        _ => {
            let mut acc = Vec::new();
            for &k in combo {
                xor_into(&mut acc, &columns[k as usize]);
            }
            acc
        }
    }
}

/// Rows with pairwise distinct leading terms, each carrying a tag vector
/// that is transformed alongside it.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    pivot_row: HashMap<u32, usize>,
    rows: Vec<(SparseVec, SparseVec)>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, coord: u32) -> bool {
        self.pivot_row.contains_key(&coord)
    }

    /// Eliminates leading terms until the leading term is not a pivot or `v` is zero.
    pub fn reduce(&self, v: &mut SparseVec, tag: &mut SparseVec) {
        while let Some(&top) = v.last() {
            let Some(&r) = self.pivot_row.get(&top) else {
                break;
            };
            let (row, row_tag) = &self.rows[r];
            xor_into(v, row);
            xor_into(tag, row_tag);
        }
    }

    /// Eliminates every pivot coordinate, not just the leading one.
    pub fn normal_form(&self, mut v: SparseVec) -> SparseVec {
        let mut kept = Vec::new();
        while let Some(&top) = v.last() {
            match self.pivot_row.get(&top) {
                Some(&r) => xor_into(&mut v, &self.rows[r].0),
                None => {
                    kept.push(top);
                    v.pop();
                }
            }
        }
        kept.reverse();
        kept
    }

    /// Inserts an already-reduced nonzero vector.
    pub fn insert(&mut self, v: SparseVec, tag: SparseVec) {
        let top = *v.last().expect("cannot insert the zero vector");
        debug_assert!(!self.pivot_row.contains_key(&top));
        self.pivot_row.insert(top, self.rows.len());
        self.rows.push((v, tag));
    }

    /// Reduces `v` and inserts it if it stays nonzero. Returns the tag of the
    /// dependency when `v` reduces to zero.
    pub fn add(&mut self, mut v: SparseVec, mut tag: SparseVec) -> Option<SparseVec> {
        self.reduce(&mut v, &mut tag);
        if v.is_empty() {
            Some(tag)
        } else {
            self.insert(v, tag);
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_and_normalize() {
        let mut a = vec![1, 3, 5];
        xor_into(&mut a, &[0, 3, 6]);
        assert_eq!(a, vec![0, 1, 5, 6]);
        assert_eq!(normalize(vec![4, 1, 4, 2, 1, 1]), vec![1, 2]);
    }

    #[test]
    fn echelon_detects_dependency() {
        let mut e = Echelon::new();
        assert!(e.add(vec![0, 1], vec![0]).is_none());
        assert!(e.add(vec![1, 2], vec![1]).is_none());
        // (0,1) + (1,2) = (0,2)
        assert_eq!(e.add(vec![0, 2], vec![2]), Some(vec![0, 1, 2]));
        assert_eq!(e.rank(), 2);
        assert_eq!(e.normal_form(vec![0, 1, 2, 3]), vec![0, 3]);
    }
}
