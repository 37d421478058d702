//! One-dimensional quadrature rules.

use crate::scalar::Real;

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_489_0,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

/// Eight-point Gauss-Legendre rule mapped to [0, 1]: (nodes, weights).
pub const GAUSS8_UNIT: ([f64; 8], [f64; 8]) = {
    const X: [f64; 4] = [
        0.183_434_642_495_649_804_939_476_142_360_2,
        0.525_532_409_916_328_985_817_739_049_189_2,
        0.796_666_477_413_626_739_591_553_936_475_8,
        0.960_289_856_497_536_231_683_560_868_569_5,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_361_982_965_150_449_277_2,
        0.313_706_645_877_887_287_337_962_201_986_6,
        0.222_381_034_453_374_470_544_355_994_426_2,
        0.101_228_536_290_376_259_152_531_354_309_96,
    ];
    let mut nodes = [0.0; 8];
    let mut weights = [0.0; 8];
    let mut i = 0;
    while i < 4 {
        nodes[3 - i] = 0.5 - 0.5 * X[i];
        nodes[4 + i] = 0.5 + 0.5 * X[i];
        weights[3 - i] = 0.5 * W[i];
        weights[4 + i] = 0.5 * W[i];
        i += 1;
    }
    (nodes, weights)
};

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    let value = kronrod * half_len;
    let err = ((kronrod - gauss) * half_len).abs();
    (value, err)
}

/// Adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// The interval is first cut into `initial_panels` pieces, which matters for
/// oscillatory integrands. Panels are bisected until the Kronrod/Gauss
/// difference drops below `abs_tol` summed over the panels or `max_depth`
/// bisections have happened.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    abs_tol: T,
    initial_panels: usize,
) -> T {
    const MAX_DEPTH: u32 = 24;
    let panels = initial_panels.max(1);
    let width = (b - a) / T::from_count(panels);
    let tol_per_panel = abs_tol / T::from_count(panels);
    let mut total = T::zero();
    for p in 0..panels {
        let lo = a + width * T::from_count(p);
        let hi = if p + 1 == panels { b } else { lo + width };
        total = total + adapt(&f, lo, hi, tol_per_panel, MAX_DEPTH);
    }
    total
}

fn adapt<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, tol: T, depth: u32) -> T {
    let (value, err) = gk15(f, a, b);
    let floor = T::epsilon() * T::lit(50.0) * value.abs();
    if err <= tol || err <= floor || depth == 0 || !err.is_finite() {
        return value;
    }
    let mid = T::lit(0.5) * (a + b);
    let half_tol = T::lit(0.5) * tol;
    adapt(f, a, mid, half_tol, depth - 1) + adapt(f, mid, b, half_tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_and_exponentials() {
        let v = integrate(|x: f64| x * x, 0.0, 3.0, 1e-14, 1);
        assert!((v - 9.0).abs() < 1e-13);
        let e = integrate(|x: f64| x.exp(), 0.0, 1.0, 1e-14, 1);
        assert!((e - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn handles_oscillation_with_panels() {
        let v = integrate(|x: f64| (200.0 * x).cos(), 0.0, 1.0, 1e-13, 64);
        assert!((v - (200f64).sin() / 200.0).abs() < 1e-12);
    }

    #[test]
    fn gauss8_is_exact_for_degree_15() {
        let (x, w) = GAUSS8_UNIT;
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(15)).sum();
        assert!((s - 1.0 / 16.0).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
