//! Classical fixed-step fourth-order Runge–Kutta for `i ∂ₜY = A(t)·Y`.
//!
//! Several states can share one generator source; states marked
//! [`Side::Adjoint`] evolve under `A†(t)` instead. Generator samples are
//! taken once per substep node and reused across states.

use num_complex::Complex64;

use super::grid::TimeGrid;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Components beyond this magnitude are reported as a blow-up.
pub const BLOWUP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Direct,
    Adjoint,
}

struct Node {
    direct: Matrix,
    adjoint: Option<Matrix>,
}

impl Node {
    fn new(a: Matrix, need_adjoint: bool) -> Self {
        let adjoint = need_adjoint.then(|| a.adjoint());
        Self { direct: a, adjoint }
    }

    fn get(&self, side: Side) -> &Matrix {
        match side {
            Side::Direct => &self.direct,
            Side::Adjoint => self.adjoint.as_ref().expect("adjoint requested"),
        }
    }
}

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

fn rk4_step(a0: &Matrix, am: &Matrix, a1: &Matrix, y: &Matrix, h: f64) -> Matrix {
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let k1 = a0 * y * MINUS_I;
    let k2 = am * (y + &k1 * half) * MINUS_I;
    let k3 = am * (y + &k2 * half) * MINUS_I;
    let k4 = a1 * (y + &k3 * full) * MINUS_I;
    y + (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0)
}

fn check_finite(y: &Matrix, t: f64) -> Result<()> {
    if y.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite() && z.norm() <= BLOWUP)
    {
        Ok(())
    } else {
        Err(Error::NonFiniteState { t })
    }
}

/// Integrates every state across the grid, calling `observe(k, t_k, states)`
/// at each grid time including the first.
pub fn integrate<G, O>(
    generator: G,
    mut states: Vec<(Matrix, Side)>,
    grid: &TimeGrid,
    step: f64,
    mut observe: O,
) -> Result<Vec<Matrix>>
where
    G: Fn(f64) -> Result<Matrix>,
    O: FnMut(usize, f64, &[(Matrix, Side)]) -> Result<()>,
{
    let substeps = grid.substeps(step)?;
    let need_adjoint = states.iter().any(|(_, s)| *s == Side::Adjoint);
    let times = grid.times();

    observe(0, times[0], &states)?;
    let mut start = Node::new(generator(times[0])?, need_adjoint);
    for (k, &n) in substeps.iter().enumerate() {
        let (t0, t1) = (times[k], times[k + 1]);
        let h = (t1 - t0) / n as f64;
        for i in 0..n {
            let s = t0 + h * i as f64;
            let s_end = if i + 1 == n { t1 } else { t0 + h * (i + 1) as f64 };
            let mid = Node::new(generator(s + 0.5 * h)?, need_adjoint);
            let end = Node::new(generator(s_end)?, need_adjoint);
            for (y, side) in states.iter_mut() {
                *y = rk4_step(start.get(*side), mid.get(*side), end.get(*side), y, h);
                check_finite(y, s_end)?;
            }
            start = end;
        }
        observe(k + 1, t1, &states)?;
    }
    Ok(states.into_iter().map(|(y, _)| y).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag_real};

    #[test]
    fn scalar_phase_is_fourth_order() {
        // i y' = y  ⇒  y = e^{-it}
        let grid = TimeGrid::uniform(0.0, 1.0, 2).unwrap();
        let err = |step: f64| {
            let out = integrate(
                |_| Ok(diag_real(&[1.0])),
                vec![(Matrix::from_element(1, 1, c(1.0, 0.0)), Side::Direct)],
                &grid,
                step,
                |_, _, _| Ok(()),
            )
            .unwrap();
            (out[0][(0, 0)] - Complex64::new(0.0, -1.0).exp()).norm()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn blowup_is_reported() {
        let grid = TimeGrid::uniform(0.0, 100.0, 2).unwrap();
        // i y' = 50i·y grows like e^{50 t}
        let res = integrate(
            |_| Ok(Matrix::from_element(1, 1, c(0.0, 50.0))),
            vec![(Matrix::from_element(1, 1, c(1.0, 0.0)), Side::Direct)],
            &grid,
            0.01,
            |_, _, _| Ok(()),
        );
        assert_eq!(res.unwrap_err().name(), "NonFiniteState");
    }
}
