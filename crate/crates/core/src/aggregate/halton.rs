//! Halton low-discrepancy points in the unit cube.

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Van der Corput radical inverse of `j` in `base`, as the exact fraction
/// `num / den` with `den` a power of `base`.
pub fn radical_inverse(mut j: u64, base: u64) -> (u64, u64) {
    let mut num = 0u64;
    let mut den = 1u64;
    while j > 0 {
        num = num * base + j % base;
        den *= base;
        j /= base;
    }
    (num, den)
}

/// The `j`-th Halton point in `[0, 1)^dim`, bases 2, 3, 5, ...
pub fn halton(j: u64, dim: usize) -> Vec<f64> {
    halton_exact(j, dim)
        .into_iter()
        .map(|(n, d)| n as f64 / d as f64)
        .collect()
}

pub fn halton_exact(j: u64, dim: usize) -> Vec<(u64, u64)> {
    assert!(dim <= PRIMES.len(), "at most {} dimensions", PRIMES.len());
    PRIMES[..dim].iter().map(|&b| radical_inverse(j, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_points() {
        assert_eq!(radical_inverse(1, 2), (1, 2));
        assert_eq!(radical_inverse(6, 2), (3, 8)); // 110 -> 0.011
        assert_eq!(radical_inverse(5, 3), (7, 9)); // 12 -> 0.21
        assert_eq!(halton(0, 2), vec![0.0, 0.0]);
        assert_eq!(halton(3, 2), vec![0.75, 1.0 / 9.0]);
    }

    #[test]
    fn distinct_first_coordinates() {
        let mut xs: Vec<u64> = (1..=512)
            .map(|j| {
                let (n, d) = radical_inverse(j, 2);
                n * (1024 / d)
            })
            .collect();
        xs.sort_unstable();
        xs.dedup();
        assert_eq!(xs.len(), 512);
    }
}
