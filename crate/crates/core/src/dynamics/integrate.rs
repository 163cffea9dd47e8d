use crate::error::Result;

/// A state that explicit Runge-Kutta stages can combine.
pub trait RkState: Clone {
    fn time(&self) -> f64;
    /// `self += dt * rate`, advancing the time by `dt`.
    fn add_scaled(&mut self, dt: f64, rate: &Self);
    /// `self = keep * self + weight * other`, times included.
    fn blend(&mut self, keep: f64, other: &Self, weight: f64);
    fn is_finite(&self) -> bool;
}

/// One step of the three-stage SSP Runge-Kutta scheme in Shu-Osher form:
///
/// ```text
/// s1 = s + dt L(s)
/// s2 = 3/4 s + 1/4 (s1 + dt L(s1))
/// s' = 1/3 s + 2/3 (s2 + dt L(s2))
/// ```
///
/// `rhs` receives the stage index (0, 1, 2) and the stage state; `filter` is
/// applied to every new stage value, including the result.
pub fn step_ssprk3<S, F, P>(s: &S, dt: f64, mut rhs: F, mut filter: P) -> Result<S>
where
    S: RkState,
    F: FnMut(usize, &S) -> Result<S>,
    P: FnMut(&mut S),
{
    let l0 = rhs(0, s)?;
    let mut s1 = s.clone();
    s1.add_scaled(dt, &l0);
    filter(&mut s1);

    let l1 = rhs(1, &s1)?;
    let mut s2 = s1;
    s2.add_scaled(dt, &l1);
    s2.blend(0.25, s, 0.75);
    filter(&mut s2);

    let l2 = rhs(2, &s2)?;
    let mut s3 = s2;
    s3.add_scaled(dt, &l2);
    s3.blend(2.0 / 3.0, s, 1.0 / 3.0);
    filter(&mut s3);
    Ok(s3)
}
