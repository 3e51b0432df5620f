//! Replica execution.
//!
//! With the `parallel` feature replicas run on the rayon pool; otherwise
//! they run in order on the calling thread. Results always come back in
//! replica order, so aggregates do not depend on scheduling.

/// Evaluates `f(0), .., f(n - 1)`.
#[cfg(feature = "parallel")]
pub fn replicate<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn replicate<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    replicate_sequential(n, f)
}

/// Always sequential; the baseline for benchmarks.
pub fn replicate_sequential<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Maps `f` over `items`, in parallel when enabled, keeping order.
#[cfg(feature = "parallel")]
pub fn map<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Collects the first error, or all results in order.
pub fn try_replicate<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    replicate(n, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v = replicate(1000, |i| i * i);
        assert_eq!(v, replicate_sequential(1000, |i| i * i));
        assert_eq!(map(&[3, 1, 2], |x| x + 1), vec![4, 2, 3]);
    }

    #[test]
    fn first_error_wins() {
        let r: Result<Vec<usize>, usize> = try_replicate(10, |i| if i >= 4 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(4));
    }
}
