//! Functions given as a table of samples.
//!
//! One sample per line: the point's coordinates followed by the value,
//! separated by whitespace or commas. Blank lines and `#` comments are skipped.

use anyhow::{bail, Context, Result};

/// How off-table queries are answered; recorded in reports.
pub const METHOD: &str =
    "nearest sample if exact, else affine least-squares fit on the 2d+2 nearest samples clamped to their value range; \
     nearest-neighbour fallback when the fit is degenerate";

#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    d: usize,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl Tabulated {
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut values = Vec::new();
        let mut width = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .with_context(|| format!("line {}: not a list of numbers", lineno + 1))?;
            if row.len() < 2 {
                bail!("line {}: need at least one coordinate and a value", lineno + 1);
            }
            if *width.get_or_insert(row.len()) != row.len() {
                bail!("line {}: expected {} columns, found {}", lineno + 1, width.unwrap(), row.len());
            }
            if row.iter().any(|v| !v.is_finite()) {
                bail!("line {}: non-finite entry", lineno + 1);
            }
            values.push(row[row.len() - 1]);
            points.push(row[..row.len() - 1].to_vec());
        }
        let Some(w) = width else { bail!("table has no samples") };
        let d = w - 1;
        if points.len() < 2 * d + 2 {
            bail!("table has {} samples; at least {} are needed in dimension {d}", points.len(), 2 * d + 2);
        }
        Ok(Self { d, points, values })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut order: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), i))
            .collect();
        let k = 2 * self.d + 2;
        // ties broken by index so the neighbour set is reproducible
        order.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).unwrap());
        let mut near = order[..k].to_vec();
        near.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let nearest = self.values[near[0].1];
        if near[0].0 == 0.0 {
            return nearest;
        }
        let (lo, hi) = near
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, i)| (lo.min(self.values[i]), hi.max(self.values[i])));
        match self.affine_fit(x, &near) {
            Some(v) => v.clamp(lo, hi),
            None => nearest,
        }
    }

    /// Value at `x` of the least-squares affine model through the neighbours.
    fn affine_fit(&self, x: &[f64], near: &[(f64, usize)]) -> Option<f64> {
        let m = self.d + 1;
        let mut a = vec![vec![0.0; m + 1]; m];
        for &(_, i) in near {
            let mut row = vec![1.0];
            row.extend(self.points[i].iter().zip(x).map(|(p, q)| p - q));
            for r in 0..m {
                for c in 0..m {
                    a[r][c] += row[r] * row[c];
                }
                a[r][m] += row[r] * self.values[i];
            }
        }
        let scale = (0..m).map(|r| a[r][r]).fold(0.0, f64::max);
        for col in 0..m {
            let pivot = (col..m).max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap())?;
            if a[pivot][col].abs() <= 1e-12 * scale {
                return None;
            }
            a.swap(col, pivot);
            for r in col + 1..m {
                let f = a[r][col] / a[col][col];
                let (upper, lower) = a.split_at_mut(r);
                for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= f * p;
                }
            }
        }
        let mut sol = vec![0.0; m];
        for r in (0..m).rev() {
            let tail: f64 = (r + 1..m).map(|c| a[r][c] * sol[c]).sum();
            sol[r] = (a[r][m] - tail) / a[r][r];
        }
        sol[0].is_finite().then_some(sol[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> Tabulated {
        let mut text = String::from("# x y value\n");
        for i in 0..=10 {
            for j in 0..=10 {
                let (x, y) = (i as f64 / 10.0, j as f64 / 10.0);
                text.push_str(&format!("{x}, {y}, {}\n", 2.0 * x - y + 0.5));
            }
        }
        Tabulated::parse(&text).unwrap()
    }

    #[test]
    fn reproduces_samples_and_affine_data() {
        let t = plane();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.evaluate(&[0.3, 0.4]), 2.0 * 0.3 - 0.4 + 0.5);
        let v = t.evaluate(&[0.33, 0.47]);
        assert!((v - (0.66 - 0.47 + 0.5)).abs() < 1e-12, "{v}");
    }

    #[test]
    fn degenerate_neighbours_fall_back_to_nearest() {
        let text = (0..8).map(|i| format!("0.5 0.5 {i}\n")).collect::<String>();
        let t = Tabulated::parse(&text).unwrap();
        assert!((0.0..=7.0).contains(&t.evaluate(&[0.1, 0.2])));
    }

    #[test]
    fn rejects_ragged_or_short_tables() {
        assert!(Tabulated::parse("1 2 3\n1 2\n").is_err());
        assert!(Tabulated::parse("1 2\n").is_err());
        assert!(Tabulated::parse("# nothing\n").is_err());
        assert!(Tabulated::parse("a b\n").is_err());
    }
}
