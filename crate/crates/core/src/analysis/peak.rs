use crate::analysis::curve::SusceptibilityCurve;
use crate::error::{Error, Result};
use crate::magnetics::PeakCoordinates;

const MIN_POINTS: usize = 5;

/// Empirical susceptibility maximum, refined by a parabola through the
/// largest sample and its two neighbours.
///
/// Returns `None` when the largest sample is the first or last one.
pub fn find_peak(curve: &SusceptibilityCurve) -> Result<Option<PeakCoordinates>> {
    let pts = curve.points();
    if pts.len() < MIN_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_POINTS,
            got: pts.len(),
        });
    }
    let (i, _) = pts.iter().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (k, p)| {
            if p.chi > best.1 {
                (k, p.chi)
            } else {
                best
            }
        },
    );
    if i == 0 || i == pts.len() - 1 {
        return Ok(None);
    }
    let (x0, y0) = (pts[i - 1].t, pts[i - 1].chi);
    let (x1, y1) = (pts[i].t, pts[i].chi);
    let (x2, y2) = (pts[i + 1].t, pts[i + 1].chi);

    // Newton divided differences: y = y0 + d01 (x - x0) + a (x - x0)(x - x1)
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a.is_nan() || a >= 0.0 {
        return Ok(Some(PeakCoordinates { t_max: x1, chi_max: y1 }));
    }
    let t_max = (0.5 * (x0 + x1) - d01 / (2.0 * a)).clamp(x0, x2);
    let chi_max = y0 + d01 * (t_max - x0) + a * (t_max - x0) * (t_max - x1);
    Ok(Some(PeakCoordinates { t_max, chi_max }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::curve::{temperature_grid, CurvePoint};
    use crate::analysis::model::CompositeModel;
    use crate::analysis::synth::synthesize_curve;
    use crate::magnetics::chi_peak;
    use crate::spin::DimerParams;
    use alloc::vec::Vec;

    fn pure_curve(j: f64, step: f64) -> SusceptibilityCurve {
        let grid = temperature_grid(5.0, 300.0, step).unwrap();
        let m = CompositeModel::pure(DimerParams::new(j, 2.0).unwrap()).unwrap();
        synthesize_curve(&m, &grid, 0.0, 0).unwrap()
    }

    #[test]
    fn complex_two_peak() {
        let peak = find_peak(&pure_curve(-68.0, 0.5)).unwrap().unwrap();
        assert!((peak.t_max - 84.81).abs() <= 0.2, "{peak:?}");
        let exact = chi_peak(&DimerParams::new(-68.0, 2.0).unwrap()).unwrap();
        assert!((peak.chi_max - exact.chi_max).abs() / exact.chi_max < 1e-5);
    }

    #[test]
    fn coarse_grid_within_one_spacing() {
        for step in [2.5, 5.0] {
            let peak = find_peak(&pure_curve(-68.0, step)).unwrap().unwrap();
            assert!((peak.t_max - 84.812).abs() < step);
        }
    }

    #[test]
    fn complex_one_like_peak() {
        let peak = find_peak(&pure_curve(-50.51, 1.0)).unwrap().unwrap();
        assert!((peak.t_max - 63.0).abs() < 0.1, "{peak:?}");
    }

    #[test]
    fn monotone_curve_has_no_peak() {
        let pts: Vec<_> = (1..=20)
            .map(|k| CurvePoint::new(k as f64 * 5.0, 0.375 / (k as f64 * 5.0)))
            .collect();
        let curve = SusceptibilityCurve::new(pts, "curie").unwrap();
        assert_eq!(find_peak(&curve).unwrap(), None);
    }

    #[test]
    fn too_few_points() {
        let pts: Vec<_> = (1..=4).map(|k| CurvePoint::new(k as f64, 1.0)).collect();
        let curve = SusceptibilityCurve::new(pts, "").unwrap();
        assert!(matches!(find_peak(&curve), Err(Error::InsufficientPoints { .. })));
    }
}
