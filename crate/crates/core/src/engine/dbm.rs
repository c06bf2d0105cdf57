//! Difference-bound matrix over point timestamps.
//!
//! Variable 0 is the constant zero; variable `k + 1` is the timestamp of
//! point `k`. Entry `(i, j)` bounds `x_j - x_i`.

const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Dbm {
    n: usize,
    d: Vec<i64>,
}

impl Dbm {
    pub fn new() -> Self {
        Dbm { n: 1, d: vec![0] }
    }

    fn at(&self, i: usize, j: usize) -> i64 {
        self.d[i * self.n + j]
    }

    /// Upper bound on `x_j - x_i`.
    pub fn bound(&self, i: usize, j: usize) -> i64 {
        self.at(i, j)
    }

    pub fn add_var(&mut self) -> usize {
        let n = self.n + 1;
        let mut d = vec![INF; n * n];
        for i in 0..self.n {
            for j in 0..self.n {
                d[i * n + j] = self.at(i, j);
            }
        }
        d[(n - 1) * n + (n - 1)] = 0;
        self.n = n;
        self.d = d;
        n - 1
    }

    /// Adds `x_j - x_i <= c`. Returns false and leaves the matrix unusable
    /// when the system becomes inconsistent.
    pub fn constrain(&mut self, i: usize, j: usize, c: i64) -> bool {
        if self.at(j, i).saturating_add(c) < 0 {
            return false;
        }
        if self.at(i, j) <= c {
            return true;
        }
        let n = self.n;
        let col_i: Vec<i64> = (0..n).map(|a| self.at(a, i)).collect();
        let row_j: Vec<i64> = (0..n).map(|b| self.at(j, b)).collect();
        for (a, &to_i) in col_i.iter().enumerate() {
            if to_i >= INF {
                continue;
            }
            let via = to_i + c;
            for (b, &from_j) in row_j.iter().enumerate() {
                if from_j >= INF {
                    continue;
                }
                let cand = via + from_j;
                let cell = &mut self.d[a * n + b];
                if cand < *cell {
                    *cell = cand;
                }
            }
        }
        true
    }

    /// Adds `lo <= x_j - x_i <= hi`.
    pub fn constrain_range(&mut self, i: usize, j: usize, lo: i64, hi: i64) -> bool {
        self.constrain(i, j, hi) && self.constrain(j, i, -lo)
    }

    /// Earliest solution, `x_k = -min(x_0 - x_k)`.
    pub fn earliest(&self) -> Vec<i64> {
        (0..self.n).map(|k| -self.at(k, 0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_negative_cycle() {
        let mut z = Dbm::new();
        let a = z.add_var();
        let b = z.add_var();
        assert!(z.constrain_range(0, a, 0, 0));
        assert!(z.constrain(a, b, 5));
        assert!(z.constrain(b, a, -1));
        assert!(!z.constrain(b, a, -6));
    }

    #[test]
    fn earliest_respects_lower_bounds() {
        let mut z = Dbm::new();
        let a = z.add_var();
        let b = z.add_var();
        assert!(z.constrain_range(0, a, 0, 0));
        assert!(z.constrain(b, a, -1));
        assert!(z.constrain(b, 0, -61));
        assert_eq!(z.earliest(), vec![0, 0, 61]);
        assert_eq!(z.bound(a, b), INF);
    }
}
