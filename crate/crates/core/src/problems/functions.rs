use super::FunctionKind;

/// Value of `kind` at the transformed point `z = R (x − s)`; zero at `z = 0`.
pub(super) fn evaluate(kind: FunctionKind, z: &[f64]) -> f64 {
    match kind {
        FunctionKind::Sphere => z.iter().map(|v| v * v).sum(),
        FunctionKind::Ellipsoid => ellipsoid(z),
        FunctionKind::Rosenbrock => rosenbrock(z),
        FunctionKind::Rastrigin => rastrigin(z),
        FunctionKind::SchwefelLike => schwefel_1_2(z),
    }
}

fn ellipsoid(z: &[f64]) -> f64 {
    let n = z.len();
    let denom = (n.max(2) - 1) as f64;
    z.iter()
        .enumerate()
        .map(|(i, v)| 10f64.powf(6.0 * i as f64 / denom) * v * v)
        .sum()
}

fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| {
            let (a, b) = (w[0] + 1.0, w[1] + 1.0);
            100.0 * (a * a - b).powi(2) + (a - 1.0).powi(2)
        })
        .sum()
}

fn rastrigin(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let cos_sum: f64 = z
        .iter()
        .map(|v| (2.0 * std::f64::consts::PI * v).cos())
        .sum();
    10.0 * (n - cos_sum) + z.iter().map(|v| v * v).sum::<f64>()
}

fn schwefel_1_2(z: &[f64]) -> f64 {
    let mut partial = 0.0;
    let mut total = 0.0;
    for v in z {
        partial += v;
        total += partial * partial;
    }
    total
}
