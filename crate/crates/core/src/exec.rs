//! Ordered data-parallel map.
//!
//! With the `parallel` feature the work is spread over the rayon pool;
//! without it (or with [`Parallelism::Sequential`]) it runs on the calling
//! thread. Results always come back in input order, so every downstream
//! reduction sees the same sequence of terms.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    /// Whether this build can actually run in parallel.
    pub fn available() -> bool {
        cfg!(feature = "parallel")
    }
}

impl fmt::Display for Parallelism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parallelism::Sequential => f.write_str("sequential"),
            Parallelism::Parallel => f.write_str("parallel"),
        }
    }
}

impl FromStr for Parallelism {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" | "seq" => Ok(Parallelism::Sequential),
            "parallel" | "par" => Ok(Parallelism::Parallel),
            other => Err(format!("unknown parallelism mode `{other}`")),
        }
    }
}

pub fn map_ordered<T, R, F>(items: &[T], mode: Parallelism, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Like [`map_ordered`] over an index range.
pub fn map_range<R, F>(len: usize, mode: Parallelism, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => {
            use rayon::prelude::*;
            (0..len).into_par_iter().map(f).collect()
        }
        _ => (0..len).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_in_both_modes() {
        let items: Vec<u64> = (0..10_000).collect();
        let seq = map_ordered(&items, Parallelism::Sequential, |x| x * 3);
        let par = map_ordered(&items, Parallelism::Parallel, |x| x * 3);
        assert_eq!(seq, par);
        assert_eq!(map_range(100, Parallelism::Parallel, |i| i), (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn parse_modes() {
        assert_eq!("seq".parse::<Parallelism>().unwrap(), Parallelism::Sequential);
        assert!("gpu".parse::<Parallelism>().is_err());
    }
}
