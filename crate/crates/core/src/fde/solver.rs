use super::{AbmWeights, FdeError, MemoryPolicy, SolverConfig, Trajectory, VectorField};
use crate::fde::gamma;
use crate::Scalar;

/// Integrates `D^α x = f(t, x)`, `x(0) = x0`, with one PECE pass per step.
///
/// Predictor (fractional Adams–Bashforth):
/// `xᴾ_{n+1} = x0 + hᵅ/Γ(α+1) · Σ_{j≤n} ((n+1−j)ᵅ − (n−j)ᵅ) f_j`.
///
/// Corrector (fractional Adams–Moulton, single iteration):
/// `x_{n+1} = x0 + hᵅ/Γ(α+2) · (f(t_{n+1}, xᴾ_{n+1}) + Σ_{j≤n} a_{j,n+1} f_j)`.
///
/// Under [`MemoryPolicy::Truncated`] both sums run over the trailing `window` nodes only.
pub fn abm_solve<T, F>(
    field: &F,
    x0: &[T],
    config: &SolverConfig<T>,
) -> Result<Trajectory<T>, FdeError>
where
    T: Scalar,
    F: VectorField<T> + ?Sized,
{
    config.validate()?;
    let dim = field.dimension();
    if x0.len() != dim {
        return Err(FdeError::DimensionMismatch {
            expected: dim,
            got: x0.len(),
        });
    }

    let steps = config.num_steps();
    let alpha = config.alpha;
    let h = config.step;
    let weights = AbmWeights::new(alpha, steps);
    let pw = weights.predictor_table();
    let cw = weights.corrector_table();
    let h_alpha = h.powf(alpha);
    let pred_scale = h_alpha / gamma(alpha + T::one());
    let corr_scale = h_alpha / gamma(alpha + T::lit(2.0));
    let window = match config.memory {
        MemoryPolicy::FullHistory => usize::MAX,
        MemoryPolicy::Truncated { window } => window,
    };

    let times: Vec<T> = (0..=steps).map(|k| T::from_index(k) * h).collect();
    let mut states = Vec::with_capacity((steps + 1) * dim);
    let mut rates = Vec::with_capacity((steps + 1) * dim);
    states.extend_from_slice(x0);
    rates.resize(dim, T::zero());
    field.eval(times[0], x0, &mut rates[..dim]);
    check_finite(&states[..dim], 0, times[0])?;
    check_finite(&rates[..dim], 0, times[0])?;

    let mut pred = vec![T::zero(); dim];
    let mut corr = vec![T::zero(); dim];
    let mut x_new = vec![T::zero(); dim];
    let mut f_new = vec![T::zero(); dim];

    for n in 0..steps {
        pred.iter_mut().for_each(|v| *v = T::zero());
        corr.iter_mut().for_each(|v| *v = T::zero());

        let lo = (n + 1).saturating_sub(window);
        for j in lo.max(1)..=n {
            let lag = n - j;
            let (bp, ac) = (pw[lag], cw[lag]);
            let fj = &rates[j * dim..(j + 1) * dim];
            for c in 0..dim {
                pred[c] = pred[c] + bp * fj[c];
                corr[c] = corr[c] + ac * fj[c];
            }
        }
        if lo == 0 {
            let (bp, ac) = (pw[n], weights.corrector_first(n));
            for c in 0..dim {
                pred[c] = pred[c] + bp * rates[c];
                corr[c] = corr[c] + ac * rates[c];
            }
        }

        let t_next = times[n + 1];
        for c in 0..dim {
            x_new[c] = x0[c] + pred_scale * pred[c];
        }
        field.eval(t_next, &x_new, &mut f_new);
        for c in 0..dim {
            x_new[c] = x0[c] + corr_scale * (f_new[c] + corr[c]);
        }
        field.eval(t_next, &x_new, &mut f_new);
        check_finite(&x_new, n + 1, t_next)?;
        check_finite(&f_new, n + 1, t_next)?;

        states.extend_from_slice(&x_new);
        rates.extend_from_slice(&f_new);
    }

    Ok(Trajectory::new(times, states, dim, alpha))
}

fn check_finite<T: Scalar>(values: &[T], step: usize, t: T) -> Result<(), FdeError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(component) => Err(FdeError::NonFinite {
            step,
            component,
            time: t.to_f64().unwrap_or(f64::NAN),
        }),
        None => Ok(()),
    }
}
