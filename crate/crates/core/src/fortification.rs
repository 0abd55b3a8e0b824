//! Compactly-supported radial bumps subtracted from a base objective at one
//! of its optima, turning identical-valued global optima into competing
//! local optima.

use crate::error::{Error, Result};
use crate::test_functions::{euclidean_distance, KnownOptimum, ObjectiveFunction};

/// One subtracted radial bump: center, width parameter and amplitude.
///
/// The kernel has compact support of radius `1/epsilon` and peaks at
/// `amplitude/e` at the center.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    pub epsilon: f64,
    pub amplitude: f64,
}

impl BumpSpec {
    pub fn support_radius(&self) -> f64 {
        1.0 / self.epsilon
    }
}

/// Bump kernel `exp(-1 / (1 - (eps*r)^2))` for `eps*r < 1`, zero otherwise.
///
/// The strict `eps*r < 1` test comes first so the reciprocal is never formed
/// at or beyond the support boundary.
pub fn bump_phi(r: f64, epsilon: f64) -> f64 {
    debug_assert!(r >= 0.0 && epsilon > 0.0);
    let u = epsilon * r;
    if u < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// A base objective with one or more bumps subtracted.
///
/// Outside every bump's support the value is bit-identical to the base; the
/// evaluation counter counts one evaluation per call regardless of whether
/// any bump fires.
#[derive(Debug)]
pub struct FortifiedFunction {
    objective: ObjectiveFunction,
    bumps: Vec<BumpSpec>,
    fortified_optimum_value: f64,
}

impl FortifiedFunction {
    pub fn bumps(&self) -> &[BumpSpec] {
        &self.bumps
    }

    /// The new global minimum value, `base(center) - amplitude/e` for the
    /// deepest bump.
    pub fn fortified_optimum_value(&self) -> f64 {
        self.fortified_optimum_value
    }

    pub fn evaluate(&mut self, x: &[f64]) -> f64 {
        self.objective.evaluate(x)
    }

    pub fn objective(&self) -> &ObjectiveFunction {
        &self.objective
    }

    pub fn objective_mut(&mut self) -> &mut ObjectiveFunction {
        &mut self.objective
    }

    /// Unwraps into the composed objective, e.g. to hand to an optimizer.
    pub fn into_objective(self) -> ObjectiveFunction {
        self.objective
    }
}

/// Subtracts a bump of the given width and amplitude at the optimum named by
/// `target_label`.
///
/// Returns the fortified function and an updated optima list in which the
/// target's value is lowered by `amplitude/e` and all others are unchanged.
/// Rejects configurations whose bump support reaches another registered
/// optimum, so fortification never perturbs the remaining optima.
pub fn fortify(
    base: ObjectiveFunction,
    optima: &[KnownOptimum],
    target_label: usize,
    epsilon: f64,
    amplitude: f64,
) -> Result<(FortifiedFunction, Vec<KnownOptimum>)> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    if !(amplitude > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "amplitude must be > 0, got {amplitude}"
        )));
    }
    let target = optima
        .iter()
        .find(|o| o.label == target_label)
        .ok_or(Error::UnknownOptimum(target_label))?;
    if !base.domain().contains(&target.location) {
        return Err(Error::OutOfDomain(format!(
            "bump center {:?} outside the domain",
            target.location
        )));
    }

    let bump = BumpSpec {
        center: target.location.clone(),
        epsilon,
        amplitude,
    };
    for other in optima.iter().filter(|o| o.label != target_label) {
        let distance = euclidean_distance(&bump.center, &other.location);
        if distance <= bump.support_radius() {
            return Err(Error::OverlappingSupport {
                target: target_label,
                other: other.label,
                radius: bump.support_radius(),
                distance,
            });
        }
    }

    let depth = amplitude * bump_phi(0.0, epsilon);
    let fortified_optimum_value = target.value - depth;
    let new_optima = optima
        .iter()
        .map(|o| {
            let mut o = o.clone();
            if o.label == target_label {
                o.value = fortified_optimum_value;
            }
            o
        })
        .collect();

    let base_eval = base.evaluator();
    let bumps = vec![bump];
    let name = format!("{}+bump{target_label}", base.name());
    let eval_bumps = bumps.clone();
    let objective = ObjectiveFunction::new(name, base.domain().clone(), move |x: &[f64]| {
        let mut v = base_eval(x);
        for b in &eval_bumps {
            let phi = bump_phi(euclidean_distance(x, &b.center), b.epsilon);
            // Subtract only a live bump term so points outside the support
            // reproduce the base value bit for bit.
            if phi > 0.0 {
                v -= b.amplitude * phi;
            }
        }
        v
    });

    Ok((
        FortifiedFunction {
            objective,
            bumps,
            fortified_optimum_value,
        },
        new_optima,
    ))
}

/// Samples `n_points` equally spaced values of `objective` along one axis,
/// the other coordinate held at `fixed_value`.
///
/// Returns `(coordinate, value)` pairs over `sweep_range` in the free
/// dimension. Only two-dimensional objectives can be sliced this way.
pub fn slice_1d(
    objective: &mut ObjectiveFunction,
    fixed_dim: usize,
    fixed_value: f64,
    sweep_range: (f64, f64),
    n_points: usize,
) -> Result<Vec<(f64, f64)>> {
    let domain = objective.domain().clone();
    if domain.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "1-D slices need a 2-D objective, got dimension {}",
            domain.dim()
        )));
    }
    if fixed_dim >= 2 {
        return Err(Error::InvalidArgument(format!(
            "fixed_dim must be 0 or 1, got {fixed_dim}"
        )));
    }
    if n_points < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 sample points, got {n_points}"
        )));
    }
    let free_dim = 1 - fixed_dim;
    let (start, end) = sweep_range;
    if !(start < end) {
        return Err(Error::InvalidArgument(format!(
            "sweep range must be increasing, got ({start}, {end})"
        )));
    }
    if start < domain.lower()[free_dim]
        || end > domain.upper()[free_dim]
        || fixed_value < domain.lower()[fixed_dim]
        || fixed_value > domain.upper()[fixed_dim]
    {
        return Err(Error::OutOfDomain(format!(
            "slice at coordinate {fixed_value} over ({start}, {end}) leaves the domain"
        )));
    }

    let step = (end - start) / (n_points - 1) as f64;
    let mut point = [0.0f64; 2];
    point[fixed_dim] = fixed_value;
    Ok((0..n_points)
        .map(|i| {
            let c = if i + 1 == n_points {
                end
            } else {
                start + i as f64 * step
            };
            point[free_dim] = c;
            (c, objective.evaluate(&point))
        })
        .collect())
}
