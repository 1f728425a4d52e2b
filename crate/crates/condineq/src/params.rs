//! Command-line literals: partitions (`1,3|2,4`), index sets (`2,4`) and
//! parameter grids (`k=1,2;p=3..4;h=2;l=0`).

use condineq_core::{IndexSet, Partition};

fn parse_indices(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<usize>()
                .map_err(|_| format!("'{t}' is not a positive index"))
        })
        .collect()
}

/// Pipe-separated blocks of comma-separated 1-based indices.
pub fn parse_partition(text: &str, n: usize) -> Result<Partition, String> {
    let blocks = text
        .split('|')
        .map(parse_indices)
        .collect::<Result<Vec<_>, _>>()?;
    Partition::from_blocks(&blocks, n).map_err(|e| format!("partition '{text}': {e}"))
}

pub fn parse_index_set(text: &str, n: usize) -> Result<IndexSet, String> {
    IndexSet::from_indices(&parse_indices(text)?, n).map_err(|e| format!("index set '{text}': {e}"))
}

/// Value lists for each grid key; absent keys stay empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Grid {
    pub k: Vec<usize>,
    pub p: Vec<usize>,
    pub h: Vec<usize>,
    pub l: Vec<usize>,
}

impl Grid {
    pub fn has_eigen(&self) -> bool {
        !self.h.is_empty() || !self.l.is_empty()
    }
}

fn parse_values(key: &str, text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let bad = || format!("{key}: '{part}' is not a value or range a..b");
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn parse_grid(text: &str) -> Result<Grid, String> {
    let mut grid = Grid::default();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, values) = item
            .split_once('=')
            .ok_or_else(|| format!("grid entry '{item}' is not key=values"))?;
        let key = key.trim();
        let values = parse_values(key, values)?;
        let slot = match key {
            "k" => &mut grid.k,
            "p" => &mut grid.p,
            "h" => &mut grid.h,
            "l" => &mut grid.l,
            other => {
                return Err(format!(
                    "unknown grid key '{other}' (expected k, p, h or l)"
                ))
            }
        };
        *slot = values;
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_literal() {
        let p = parse_partition("1,3|2,4", 4).unwrap();
        assert_eq!(p.to_vecs(), vec![vec![1, 3], vec![2, 4]]);
        assert!(parse_partition("1,3|2", 4).is_err());
        assert!(parse_partition("1,3|3,2,4", 4).is_err());
        assert!(parse_partition("1,a|2,3,4", 4).is_err());
    }

    #[test]
    fn grid_literal() {
        let g = parse_grid("k=2;p=3").unwrap();
        assert_eq!((g.k, g.p), (vec![2], vec![3]));
        let g = parse_grid("k=1..3; p=4,2 ; l=0").unwrap();
        assert_eq!(g.k, vec![1, 2, 3]);
        assert_eq!(g.p, vec![2, 4]);
        assert!(g.has_eigen());
        assert!(parse_grid("q=1").is_err());
        assert!(parse_grid("k").is_err());
        assert!(parse_grid("k=3..1").is_err());
    }

    #[test]
    fn index_set_literal() {
        assert_eq!(parse_index_set("2,4", 4).unwrap().to_vec(), vec![2, 4]);
        assert!(parse_index_set("5", 4).is_err());
    }
}
