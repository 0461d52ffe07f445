#![allow(dead_code)]

use snrforge::{Family, ScheduleSpec};

/// Three parameter settings for each of the nine families.
pub fn family_grid() -> Vec<ScheduleSpec> {
    let fams = [
        Family::Laplace { mu: 0.0, b: 0.5 },
        Family::Laplace { mu: 0.0, b: 1.0 },
        Family::Laplace { mu: 1.0, b: 0.25 },
        Family::Cauchy { mu: 0.0, gamma: 0.5 },
        Family::Cauchy { mu: 0.0, gamma: 1.0 },
        Family::Cauchy { mu: 1.0, gamma: 1.0 },
        Family::CosineShifted { mu: -1.0 },
        Family::CosineShifted { mu: 1.0 },
        Family::CosineShifted { mu: 2.0 },
        Family::CosineScaled { s: 1.0 / 1.3 },
        Family::CosineScaled { s: 2.0 },
        Family::CosineScaled { s: 4.0 },
        Family::CosinePoly { n: 1 },
        Family::CosinePoly { n: 2 },
        Family::CosinePoly { n: 3 },
        Family::EdmLogNormal { mean: 2.4, std: 2.4 },
        Family::EdmLogNormal { mean: 0.0, std: 1.0 },
        Family::EdmLogNormal { mean: -1.2, std: 2.0 },
        Family::FmLogitNormal { mu: 0.0, sigma: 1.0 },
        Family::FmLogitNormal { mu: 0.5, sigma: 0.8 },
        Family::FmLogitNormal { mu: -0.3, sigma: 1.5 },
    ];
    let mut out: Vec<ScheduleSpec> = fams.into_iter().map(|f| ScheduleSpec::new(f).unwrap()).collect();
    // Parameter-free families vary their clamp range instead.
    for fam in [Family::Cosine, Family::FlowMatchOt] {
        for (lo, hi) in [(-15.0, 15.0), (-10.0, 10.0), (-20.0, 20.0)] {
            out.push(ScheduleSpec::with_clamp(fam, lo, hi).unwrap());
        }
    }
    out
}

/// One representative per family.
pub fn one_per_family() -> Vec<ScheduleSpec> {
    [
        Family::Cosine,
        Family::Laplace { mu: 0.0, b: 0.5 },
        Family::Cauchy { mu: 0.0, gamma: 0.5 },
        Family::CosineShifted { mu: 1.0 },
        Family::CosineScaled { s: 2.0 },
        Family::CosinePoly { n: 2 },
        Family::EdmLogNormal { mean: 2.4, std: 2.4 },
        Family::FlowMatchOt,
        Family::FmLogitNormal { mu: 0.0, sigma: 1.0 },
    ]
    .into_iter()
    .map(|f| ScheduleSpec::new(f).unwrap())
    .collect()
}

/// Mass of the density on `[lam, upper]` by composite Simpson; does not
/// touch `survival`.
pub fn mass_by_quadrature(spec: &ScheduleSpec, lam: f64, upper: f64) -> f64 {
    let n = 200_000;
    let h = (upper - lam) / n as f64;
    let mut acc = spec.pdf(lam) + spec.pdf(upper);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * spec.pdf(lam + i as f64 * h);
    }
    acc * h / 3.0
}

/// Bisection for `survival(λ) = t` on a wide bracket.
pub fn invert_by_bisection(spec: &ScheduleSpec, t: f64) -> f64 {
    let (mut lo, mut hi) = (-60.0f64, 60.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spec.survival(mid) > t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
