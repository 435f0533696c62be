use core::f64::consts::{FRAC_1_SQRT_2, PI};

use super::NumericsError;

/// Standard Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn gaussian_tail_q(x: f64) -> Result<f64, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::Domain {
            op: "gaussian_tail_q",
            value: x,
        });
    }
    Ok(tail(x))
}

#[inline]
pub(crate) fn tail(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Inverse of [`gaussian_tail_q`]: returns `x` with `Q(x) = p`.
///
/// Acklam's rational approximation of the normal quantile followed by two
/// Halley steps against `erfc`.
pub fn gaussian_tail_q_inv(p: f64) -> Result<f64, NumericsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(NumericsError::Domain {
            op: "gaussian_tail_q_inv",
            value: p,
        });
    }
    Ok(tail_inv(p))
}

pub(crate) fn tail_inv(p: f64) -> f64 {
    // Q(x) = p  <=>  Phi(-x) = p
    let mut z = normal_quantile_approx(p);
    for _ in 0..2 {
        let e = 0.5 * libm::erfc(-z * FRAC_1_SQRT_2) - p;
        let u = e * libm::sqrt(2.0 * PI) * libm::exp(0.5 * z * z);
        z -= u / (1.0 + 0.5 * z * u);
    }
    -z
}

fn normal_quantile_approx(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p < P_LOW {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = libm::sqrt(-2.0 * libm::log1p(-p));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}
