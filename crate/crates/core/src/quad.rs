//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_904_450_516_460,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod abscissae (1, 3, 5, 7, 9).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

/// One 21-point Kronrod estimate with the QUADPACK error heuristic.
fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut res_g = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        a,
        b,
        value,
        error,
        abs: res_abs,
    }
}

/// The 21 Kronrod nodes and weights mapped onto [a, b].
pub fn gk21_rule(a: f64, b: f64) -> [(f64, f64); 21] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 21];
    for j in 0..10 {
        out[2 * j] = (center - half * XGK[j], half * WGK[j]);
        out[2 * j + 1] = (center + half * XGK[j], half * WGK[j]);
    }
    out[20] = (center, half * WGK[10]);
    out
}

/// The embedded 10-point Gauss–Legendre rule mapped onto [a, b].
pub fn gauss10_rule(a: f64, b: f64) -> [(f64, f64); 10] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 10];
    for j in 0..5 {
        let x = XGK[2 * j + 1];
        out[2 * j] = (center - half * x, half * WG[j]);
        out[2 * j + 1] = (center + half * x, half * WG[j]);
    }
    out
}

/// A single Kronrod panel with its nodes, weights and integrand samples, for
/// callers that reuse the samples against several weight functions.
#[derive(Debug, Clone)]
pub struct KronrodPanel {
    pub value: f64,
    pub error: f64,
    pub nodes: [f64; 21],
    pub weights: [f64; 21],
    pub samples: [f64; 21],
}

pub fn kronrod_panel<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> KronrodPanel {
    let rule = gk21_rule(a, b);
    let half = 0.5 * (b - a);
    let mut nodes = [0.0; 21];
    let mut weights = [0.0; 21];
    let mut samples = [0.0; 21];
    let mut kron = 0.0;
    let mut gauss = 0.0;
    for (i, &(x, w)) in rule.iter().enumerate() {
        let fx = f(x);
        nodes[i] = x;
        weights[i] = w;
        samples[i] = fx;
        kron += w * fx;
        let j = i / 2;
        if i < 20 && j % 2 == 1 {
            gauss += half * WG[j / 2] * fx;
        }
    }
    KronrodPanel {
        value: kron,
        error: (kron - gauss).abs(),
        nodes,
        weights,
        samples,
    }
}

fn adapt<F: FnMut(f64) -> f64>(mut f: F, edges: &[f64], cfg: &QuadConfig) -> Result<QuadResult> {
    let mut segs: Vec<Segment> = edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk21(&mut f, w[0], w[1]))
        .collect();
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureBudget {
                value,
                error,
                intervals: segs.len(),
            });
        }
        // Below the accumulated rounding floor further bisection cannot help.
        let floor = 100.0 * f64::EPSILON * segs.iter().map(|s| s.abs).sum::<f64>();
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()).max(floor) {
            return Ok(QuadResult {
                value,
                error,
                intervals: segs.len(),
            });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let s = segs[worst];
        let mid = 0.5 * (s.a + s.b);
        let resolvable = mid > s.a && mid < s.b && (s.b - s.a) > 1e3 * f64::EPSILON * s.a.abs().max(s.b.abs());
        if segs.len() >= cfg.max_intervals || !resolvable {
            return Err(Error::QuadratureBudget {
                value,
                error,
                intervals: segs.len(),
            });
        }
        segs[worst] = gk21(&mut f, s.a, mid);
        segs.push(gk21(&mut f, mid, s.b));
    }
}

/// ∫ₐᵇ f(x) dx on a finite interval.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    integrate_with_breakpoints(f, &[a, b], cfg)
}

/// Finite-range integral split at the given sorted breakpoints, which
/// include both endpoints. Integrable endpoint singularities are fine since
/// the Kronrod nodes never touch the interval ends.
pub fn integrate_with_breakpoints<F: FnMut(f64) -> f64>(f: F, points: &[f64], cfg: &QuadConfig) -> Result<QuadResult> {
    if points.len() < 2 || points.windows(2).any(|w| !(w[1] >= w[0])) || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter(
            "quadrature breakpoints must be finite and sorted".into(),
        ));
    }
    adapt(f, points, cfg)
}

/// ∫ₐ^∞ f(x) dx via x = a + scale·t/(1 − t). `scale` should be of the order
/// of the integrand's decay length.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(scale > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(
            "semi-infinite quadrature needs finite origin and positive scale".into(),
        ));
    }
    let g = move |t: f64| {
        let one_minus = 1.0 - t;
        let x = a + scale * t / one_minus;
        let jac = scale / (one_minus * one_minus);
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * jac
        }
    };
    adapt(g, &[0.0, 0.25, 0.5, 0.75, 1.0], cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_and_peaked() {
        let r = integrate(|x| (50.0 * x).sin(), 0.0, std::f64::consts::PI, &QuadConfig::default()).unwrap();
        assert!(r.value.abs() < 1e-11);
        let r = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, &QuadConfig::default()).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite() {
        let r = integrate_semi_infinite(|x| (-x).exp(), 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = integrate_semi_infinite(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadConfig {
            abs_tol: 0.0,
            rel_tol: 1e-15,
            max_intervals: 3,
        };
        let e = integrate(|x| (1.0 / (x + 1e-3)).sin(), 0.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(e, Error::QuadratureBudget { .. }));
    }

    #[test]
    fn panel_matches_adaptive_segment() {
        let p = kronrod_panel(|x| x.exp(), 0.0, 1.0);
        assert!((p.value - (1f64.exp() - 1.0)).abs() < 1e-15);
        assert!(p.error < 1e-12);
        let q = kronrod_panel(|x| x.powi(12), -1.0, 1.0);
        // The embedded 10-point Gauss rule is exact to degree 19 as well.
        assert!(q.error < 1e-14);
        let r = kronrod_panel(|x| (30.0 * x).cos(), 0.0, 1.0);
        assert!(r.error > 1e-6);
    }

    #[test]
    fn rule_weights_sum_to_length() {
        let w: f64 = gk21_rule(-1.0, 3.0).iter().map(|p| p.1).sum();
        assert!((w - 4.0).abs() < 1e-14);
    }
}
