//! Exact primal simplex for covering problems `min cᵀx, Ax ≥ b, x ≥ 0`.
//!
//! Two phases with artificial variables, Bland's rule throughout (lowest
//! eligible index enters, lowest basic index leaves on ratio ties), so runs
//! are deterministic and cycling-free. The artificial block doubles as an
//! explicit basis inverse, which makes warm-started column additions cheap
//! for column generation.

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug)]
struct Column {
    coeffs: Vec<Rat>,
    cost: Rat,
    artificial: bool,
}

#[derive(Clone, Debug)]
pub struct Simplex {
    rows: usize,
    n_struct: usize,
    cols: Vec<Column>,
    rhs: Vec<Rat>,
    /// Reduced costs of the current phase.
    z: Vec<Rat>,
    basis: Vec<usize>,
    phase_two: bool,
}

impl Simplex {
    /// `columns[j]` is the coverage vector of structural variable `j`.
    /// Requires `b >= 0`.
    pub fn new(columns: &[Vec<Rat>], costs: &[Rat], b: &[Rat]) -> Simplex {
        let rows = b.len();
        assert_eq!(columns.len(), costs.len());
        let mut cols = Vec::with_capacity(columns.len() + 2 * rows);
        for (a, c) in columns.iter().zip(costs) {
            assert_eq!(a.len(), rows);
            cols.push(Column {
                coeffs: a.clone(),
                cost: c.clone(),
                artificial: false,
            });
        }
        for i in 0..rows {
            let mut coeffs = vec![Rat::zero(); rows];
            coeffs[i] = -Rat::one();
            cols.push(Column {
                coeffs,
                cost: Rat::zero(),
                artificial: false,
            });
        }
        for i in 0..rows {
            let mut coeffs = vec![Rat::zero(); rows];
            coeffs[i] = Rat::one();
            cols.push(Column {
                coeffs,
                cost: Rat::zero(),
                artificial: true,
            });
        }
        let n_struct = columns.len();
        let basis: Vec<usize> = (0..rows).map(|i| n_struct + rows + i).collect();
        // phase-one reduced costs with the all-artificial basis
        let mut z = Vec::with_capacity(cols.len());
        for col in &cols {
            let phase1_cost = if col.artificial { Rat::one() } else { Rat::zero() };
            let sum: Rat = col.coeffs.iter().sum();
            z.push(phase1_cost - sum);
        }
        Simplex {
            rows,
            n_struct,
            cols,
            rhs: b.to_vec(),
            z,
            basis,
            phase_two: false,
        }
    }

    fn surplus_col(&self, row: usize) -> usize {
        self.n_struct + row
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let piv = self.cols[j].coeffs[r].clone();
        debug_assert!(!piv.is_zero());
        let factors: Vec<Rat> = (0..self.rows)
            .map(|i| {
                if i == r {
                    Rat::zero()
                } else {
                    self.cols[j].coeffs[i].clone()
                }
            })
            .collect();
        let zf = self.z[j].clone();
        for (cidx, col) in self.cols.iter_mut().enumerate() {
            let vr = if col.coeffs[r].is_zero() {
                Rat::zero()
            } else {
                &col.coeffs[r] / &piv
            };
            col.coeffs[r] = vr.clone();
            if !vr.is_zero() {
                for (i, f) in factors.iter().enumerate() {
                    if !f.is_zero() {
                        let delta = f * &vr;
                        col.coeffs[i] -= &delta;
                    }
                }
                if !zf.is_zero() {
                    let delta = &zf * &vr;
                    self.z[cidx] -= &delta;
                }
            }
        }
        let vr = &self.rhs[r] / &piv;
        self.rhs[r] = vr.clone();
        if !vr.is_zero() {
            for (i, f) in factors.iter().enumerate() {
                if !f.is_zero() {
                    let delta = f * &vr;
                    self.rhs[i] -= &delta;
                }
            }
        }
        self.basis[r] = j;
    }

    /// One Bland step. `Ok(true)` when a pivot happened.
    fn step(&mut self) -> Result<bool> {
        let entering = (0..self.cols.len()).find(|&j| {
            !self.cols[j].artificial && self.z[j].is_negative() && !self.basis.contains(&j)
        });
        let Some(j) = entering else {
            return Ok(false);
        };
        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..self.rows {
            let a = &self.cols[j].coeffs[r];
            if a.is_positive() {
                let ratio = &self.rhs[r] / a;
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::Internal(
                "unbounded covering LP: nonnegative costs preclude this".into(),
            ));
        };
        self.pivot(r, j);
        Ok(true)
    }

    fn run(&mut self) -> Result<()> {
        while self.step()? {}
        Ok(())
    }

    /// Phase one; on success switches to phase-two reduced costs.
    /// Returns the row of a stuck artificial when the system is infeasible.
    pub fn solve(&mut self) -> std::result::Result<(), SimplexOutcome> {
        self.run().map_err(SimplexOutcome::Internal)?;
        // infeasible iff some artificial is basic at a positive value
        for r in 0..self.rows {
            if self.cols[self.basis[r]].artificial && self.rhs[r].is_positive() {
                return Err(SimplexOutcome::Infeasible { row: r });
            }
        }
        // drive basic artificials (at zero) out where possible
        for r in 0..self.rows {
            if self.cols[self.basis[r]].artificial {
                let pivot_col = (0..self.n_struct + self.rows)
                    .find(|&j| !self.cols[j].coeffs[r].is_zero() && !self.basis.contains(&j));
                if let Some(j) = pivot_col {
                    self.pivot(r, j);
                }
                // an all-zero row is redundant; its artificial stays at zero
            }
        }
        self.enter_phase_two();
        self.run().map_err(SimplexOutcome::Internal)?;
        Ok(())
    }

    fn enter_phase_two(&mut self) {
        self.phase_two = true;
        let basis_costs: Vec<Rat> = self
            .basis
            .iter()
            .map(|&j| {
                if self.cols[j].artificial {
                    Rat::zero()
                } else {
                    self.cols[j].cost.clone()
                }
            })
            .collect();
        for j in 0..self.cols.len() {
            let mut z = self.cols[j].cost.clone();
            if self.cols[j].artificial {
                z = Rat::zero();
            }
            for (i, cb) in basis_costs.iter().enumerate() {
                if !cb.is_zero() && !self.cols[j].coeffs[i].is_zero() {
                    let delta = cb * &self.cols[j].coeffs[i];
                    z -= &delta;
                }
            }
            self.z[j] = z;
        }
    }

    /// Appends a structural column and reoptimizes from the current basis.
    pub fn add_column(&mut self, coeffs: &[Rat], cost: Rat) -> Result<()> {
        assert!(self.phase_two, "columns are added after the initial solve");
        assert_eq!(coeffs.len(), self.rows);
        // tableau representation B⁻¹·a via the artificial block
        let art_base = self.n_struct + self.rows;
        let mut rep = vec![Rat::zero(); self.rows];
        for (k, ak) in coeffs.iter().enumerate() {
            if ak.is_zero() {
                continue;
            }
            for (i, r) in rep.iter_mut().enumerate() {
                let binv = &self.cols[art_base + k].coeffs[i];
                if !binv.is_zero() {
                    *r += &(binv * ak);
                }
            }
        }
        let mut z = cost.clone();
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = if self.cols[bj].artificial {
                Rat::zero()
            } else {
                self.cols[bj].cost.clone()
            };
            if !cb.is_zero() && !rep[i].is_zero() {
                let delta = &cb * &rep[i];
                z -= &delta;
            }
        }
        let column = Column {
            coeffs: rep,
            cost,
            artificial: false,
        };
        // keep structural columns contiguous: insert before the surplus block
        self.cols.insert(self.n_struct, column);
        self.z.insert(self.n_struct, z);
        for b in self.basis.iter_mut() {
            if *b >= self.n_struct {
                *b += 1;
            }
        }
        self.n_struct += 1;
        self.run()
    }

    /// Values of the structural variables.
    pub fn structural_values(&self) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); self.n_struct];
        for (r, &j) in self.basis.iter().enumerate() {
            if j < self.n_struct {
                x[j] = self.rhs[r].clone();
            }
        }
        x
    }

    pub fn objective(&self) -> Rat {
        self.basis
            .iter()
            .enumerate()
            .map(|(r, &j)| {
                if j < self.n_struct {
                    &self.cols[j].cost * &self.rhs[r]
                } else {
                    Rat::zero()
                }
            })
            .sum()
    }

    /// Dual values, read off the surplus block; nonnegative at optimality.
    pub fn duals(&self) -> Vec<Rat> {
        (0..self.rows)
            .map(|i| self.z[self.surplus_col(i)].clone())
            .collect()
    }
}

#[derive(Debug)]
pub enum SimplexOutcome {
    Infeasible { row: usize },
    Internal(Error),
}
