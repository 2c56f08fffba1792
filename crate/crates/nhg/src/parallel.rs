use std::ops::Range;
use std::thread;

use nhg_core::Partitioner;

/// Splits `0..len` into at most `workers` contiguous ranges and runs each on
/// its own scoped thread. Results come back in range order, so anything
/// merged from them does not depend on the worker count.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    workers: usize,
}

impl Threaded {
    pub fn new(workers: usize) -> Threaded {
        Threaded {
            workers: workers.max(1),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }
}

fn split(len: u64, parts: u64) -> Vec<Range<u64>> {
    let base = len / parts;
    let extra = len % parts;
    let mut start = 0;
    (0..parts)
        .map(|i| {
            let end = start + base + u64::from(i < extra);
            let r = start..end;
            start = end;
            r
        })
        .collect()
}

impl Partitioner for Threaded {
    fn map_ranges<T, F>(&self, len: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<u64>) -> T + Sync,
    {
        let parts = (self.workers as u64).min(len).max(1);
        if parts == 1 {
            return vec![f(0..len)];
        }
        let f = &f;
        thread::scope(|s| {
            let handles: Vec<_> = split(len, parts)
                .into_iter()
                .map(|r| s.spawn(move || f(r)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
                .collect()
        })
    }
}
