//! Dense two-phase simplex with Bland's rule, for the small linear programs
//! of the jamming check and the stability descent.
//!
//! Problems are `minimize c.x` subject to row constraints and `x >= 0`.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, Default)]
pub struct Lp {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Cmp, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal {
        x: Vec<f64>,
        value: f64,
    },
    Infeasible,
    Unbounded,
    /// Pivot budget exhausted (rounding can defeat the anti-cycling rule).
    IterationLimit,
}

const PIVOT_EPS: f64 = 1e-11;

#[derive(PartialEq)]
enum Phase {
    Optimal,
    Unbounded,
    Limit,
}

impl Lp {
    pub fn new(num_vars: usize) -> Self {
        Lp {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, cmp: Cmp, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.rows.push((coeffs, cmp, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    /// `m` rows of `cols + 1` entries; the last entry is the right-hand side.
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n: usize,
    cols: usize,
    art_start: usize,
}

impl Tableau {
    fn build(lp: &Lp) -> Self {
        let n = lp.num_vars;
        let m = lp.rows.len();
        let mut rows = Vec::with_capacity(m);
        for (c, cmp, b) in &lp.rows {
            let (mut c, mut cmp, mut b) = (c.clone(), *cmp, *b);
            if b < 0.0 {
                c.iter_mut().for_each(|x| *x = -*x);
                b = -b;
                cmp = match cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
            }
            rows.push((c, cmp, b));
        }
        let slacks = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let arts = rows.iter().filter(|r| r.1 != Cmp::Le).count();
        let art_start = n + slacks;
        let cols = art_start + arts;
        let mut a = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut t) = (n, art_start);
        for (c, cmp, b) in rows {
            let mut row = vec![0.0; cols + 1];
            row[..n].copy_from_slice(&c);
            row[cols] = b;
            match cmp {
                Cmp::Le => {
                    row[s] = 1.0;
                    basis.push(s);
                    s += 1;
                }
                Cmp::Ge => {
                    row[s] = -1.0;
                    s += 1;
                    row[t] = 1.0;
                    basis.push(t);
                    t += 1;
                }
                Cmp::Eq => {
                    row[t] = 1.0;
                    basis.push(t);
                    t += 1;
                }
            }
            a.push(row);
        }
        Tableau {
            a,
            basis,
            n,
            cols,
            art_start,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        self.a[r].iter_mut().for_each(|x| *x /= p);
        let pr = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    row.iter_mut().zip(&pr).for_each(|(x, y)| *x -= f * y);
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over columns `< limit`.
    fn optimize(&mut self, cost: &[f64], limit: usize) -> Phase {
        let rhs = self.cols;
        let budget = 50 * (self.a.len() + self.cols) + 1000;
        for _ in 0..budget {
            let mut enter = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let reduced: f64 = cost[j]
                    - self
                        .a
                        .iter()
                        .zip(&self.basis)
                        .map(|(row, &b)| cost[b] * row[j])
                        .sum::<f64>();
                if reduced < -PIVOT_EPS {
                    enter = Some(j);
                    break;
                }
            }
            let Some(j) = enter else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if row[j] > PIVOT_EPS {
                    let ratio = row[rhs] / row[j];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((l, best)) => {
                            if ratio < best - 1e-14
                                || (ratio <= best + 1e-14 && self.basis[i] < self.basis[l])
                            {
                                Some((i, ratio))
                            } else {
                                Some((l, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Phase::Unbounded;
            };
            self.pivot(r, j);
        }
        Phase::Limit
    }

    fn run(mut self, objective: &[f64]) -> LpOutcome {
        let rhs = self.cols;
        if self.art_start < self.cols {
            let mut phase1 = vec![0.0; self.cols];
            phase1[self.art_start..].iter_mut().for_each(|x| *x = 1.0);
            if self.optimize(&phase1, self.cols) == Phase::Limit {
                return LpOutcome::IterationLimit;
            }
            let infeas: f64 = self
                .a
                .iter()
                .zip(&self.basis)
                .filter(|(_, &b)| b >= self.art_start)
                .map(|(row, _)| row[rhs])
                .sum();
            let scale = 1.0 + self.a.iter().map(|r| r[rhs].abs()).fold(0.0, f64::max);
            if infeas > 1e-9 * scale {
                return LpOutcome::Infeasible;
            }
            for i in 0..self.a.len() {
                if self.basis[i] >= self.art_start {
                    if let Some(j) = (0..self.art_start).find(|&j| self.a[i][j].abs() > PIVOT_EPS) {
                        self.pivot(i, j);
                    }
                }
            }
        }
        let mut cost = vec![0.0; self.cols];
        cost[..self.n].copy_from_slice(objective);
        match self.optimize(&cost, self.art_start) {
            Phase::Optimal => {}
            Phase::Unbounded => return LpOutcome::Unbounded,
            Phase::Limit => return LpOutcome::IterationLimit,
        }
        let mut x = vec![0.0; self.n];
        for (row, &b) in self.a.iter().zip(&self.basis) {
            if b < self.n {
                x[b] = row[rhs];
            }
        }
        let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(o: LpOutcome) -> (Vec<f64>, f64) {
        match o {
            LpOutcome::Optimal { x, value } => (x, value),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = Lp::new(2);
        lp.objective = vec![-3.0, -5.0];
        lp.add_row(vec![1.0, 0.0], Cmp::Le, 4.0);
        lp.add_row(vec![0.0, 2.0], Cmp::Le, 12.0);
        lp.add_row(vec![3.0, 2.0], Cmp::Le, 18.0);
        let (x, v) = optimal(lp.solve());
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 6.0).abs() < 1e-12);
        assert!((v + 36.0).abs() < 1e-12);
    }

    #[test]
    fn phase_one_rows() {
        // min x + y, x + y >= 2, x - y = 1 -> (1.5, 0.5)
        let mut lp = Lp::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add_row(vec![1.0, 1.0], Cmp::Ge, 2.0);
        lp.add_row(vec![1.0, -1.0], Cmp::Eq, 1.0);
        let (x, v) = optimal(lp.solve());
        assert!((v - 2.0).abs() < 1e-12);
        assert!((x[0] - x[1] - 1.0).abs() < 1e-12);
        // negative right-hand side: -x <= -3
        let mut lp = Lp::new(1);
        lp.objective = vec![1.0];
        lp.add_row(vec![-1.0], Cmp::Le, -3.0);
        assert!((optimal(lp.solve()).1 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.add_row(vec![1.0], Cmp::Le, 1.0);
        lp.add_row(vec![1.0], Cmp::Ge, 2.0);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let mut lp = Lp::new(2);
        lp.objective = vec![-1.0, 0.0];
        lp.add_row(vec![1.0, -1.0], Cmp::Le, 1.0);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_does_not_cycle() {
        // Beale's cycling example.
        let mut lp = Lp::new(4);
        lp.objective = vec![-0.75, 150.0, -0.02, 6.0];
        lp.add_row(vec![0.25, -60.0, -0.04, 9.0], Cmp::Le, 0.0);
        lp.add_row(vec![0.5, -90.0, -0.02, 3.0], Cmp::Le, 0.0);
        lp.add_row(vec![0.0, 0.0, 1.0, 0.0], Cmp::Le, 1.0);
        let (_, v) = optimal(lp.solve());
        assert!((v + 0.05).abs() < 1e-12);
    }
}
