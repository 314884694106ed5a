//! Order-preserving parallel map with an explicit worker count.

use rayon::prelude::*;

/// Maps `f` over `items` on `workers` threads (0 = machine parallelism).
///
/// Output order always matches input order, so any reduction over the result
/// is independent of the worker count.
pub fn map_ordered<I, O, F>(items: &[I], workers: usize, f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(usize, &I) -> O + Sync + Send,
{
    if workers == 1 || items.len() <= 1 {
        return items.iter().enumerate().map(|(i, x)| f(i, x)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build();
    match pool {
        Ok(pool) => pool.install(|| items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()),
        // Thread spawning can fail in restricted sandboxes; fall back to serial.
        Err(_) => items.iter().enumerate().map(|(i, x)| f(i, x)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_count_does_not_change_output() {
        let items: Vec<u64> = (0..257).collect();
        let serial = map_ordered(&items, 1, |i, x| x * x + i as u64);
        for w in [0, 2, 3, 8] {
            assert_eq!(map_ordered(&items, w, |i, x| x * x + i as u64), serial);
        }
    }
}
