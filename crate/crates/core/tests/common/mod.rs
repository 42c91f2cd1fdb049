//! Reference computations that share no code with the library.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::OnceLock;

/// 16-point Gauss–Legendre nodes and weights on [−1, 1] (positive half).
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_78,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_09,
];

/// ∫_a^b f by 16-point Gauss–Legendre on one panel.
pub fn gl16(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for (x, w) in GL16_X.iter().zip(GL16_W) {
        s += w * (f(m - r * x) + f(m + r * x));
    }
    s * r
}

/// Composite rule on `n` equal panels.
pub fn gl_panels(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|k| gl16(f, a + h * k as f64, a + h * (k + 1) as f64)).sum()
}

/// Composite rule on geometrically growing panels [a·2^k, a·2^{k+1}].
pub fn gl_geometric(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mut lo = a;
    let mut s = 0.0;
    while lo < b {
        let hi = (2.0 * lo).min(b);
        s += gl16(f, lo, hi);
        lo = hi;
    }
    s
}

/// Γ(x) for x > 0 by upward recurrence and the Stirling series.
pub fn gamma_stirling(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 1.0;
    let mut z = x;
    while z < 20.0 {
        shift *= z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    let ln = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series;
    ln.exp() / shift
}

/// C_{1,α} from the Stirling Γ.
pub fn levy_constant_oracle(alpha: f64) -> f64 {
    alpha * 2f64.powf(alpha - 1.0) * gamma_stirling((alpha + 1.0) / 2.0) / (PI.sqrt() * gamma_stirling((2.0 - alpha) / 2.0))
}

/// P(X > x) ≈ Γ(α) sin(πα/2)/π · x^{−α} for the standard symmetric law.
pub fn stable_tail_asymptote(alpha: f64, x: f64) -> f64 {
    gamma_stirling(alpha) * (PI * alpha / 2.0).sin() / PI * x.powf(-alpha)
}

/// CDF of S(α, 0, 1, 0) by Fourier inversion:
/// F(x) = 1/2 + (1/π) ∫_0^∞ exp(−k^α) sin(kx)/k dk.
pub fn stable_cdf_direct(alpha: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    let f = |k: f64| {
        if k == 0.0 {
            x
        } else {
            (-k.powf(alpha)).exp() * (k * x).sin() / k
        }
    };
    let kmax = 40f64.powf(1.0 / alpha).max(5.0);
    let panels = ((kmax * (x.abs() + 1.0)) / 0.5).ceil() as usize;
    0.5 + gl_panels(&f, 0.0, kmax, panels.max(64)) / PI
}

/// Tabulated CDF on [0, X_MAX] with the asymptotic tail beyond.
pub struct StableCdfTable {
    alpha: f64,
    step: f64,
    values: Vec<f64>,
}

pub const X_MAX: f64 = 50.0;

impl StableCdfTable {
    pub fn new(alpha: f64) -> Self {
        let step = 0.02;
        let n = (X_MAX / step).round() as usize;
        let values = (0..=n).map(|i| stable_cdf_direct(alpha, i as f64 * step)).collect();
        Self { alpha, step, values }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let ax = x.abs();
        let upper = if ax >= X_MAX {
            1.0 - stable_tail_asymptote(self.alpha, ax)
        } else {
            let i = (ax / self.step).floor() as usize;
            let t = ax / self.step - i as f64;
            (1.0 - t) * self.values[i] + t * self.values[i + 1]
        };
        if x >= 0.0 {
            upper
        } else {
            1.0 - upper
        }
    }

    /// Inverse CDF by bisection on the tabulated function.
    pub fn quantile(&self, u: f64) -> f64 {
        if u < 0.5 {
            return -self.quantile(1.0 - u);
        }
        let tail = 1.0 - u;
        if tail <= stable_tail_asymptote(self.alpha, X_MAX) {
            return (tail * PI / (gamma_stirling(self.alpha) * (PI * self.alpha / 2.0).sin())).powf(-1.0 / self.alpha);
        }
        let (mut lo, mut hi) = (0.0, X_MAX);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Cached tables, one per α used by the tests.
pub fn stable_table(alpha: f64) -> &'static StableCdfTable {
    static T100: OnceLock<StableCdfTable> = OnceLock::new();
    static T125: OnceLock<StableCdfTable> = OnceLock::new();
    static T150: OnceLock<StableCdfTable> = OnceLock::new();
    static T175: OnceLock<StableCdfTable> = OnceLock::new();
    let cell = match (alpha * 100.0).round() as u32 {
        100 => &T100,
        125 => &T125,
        150 => &T150,
        175 => &T175,
        _ => panic!("no table for alpha = {alpha}"),
    };
    cell.get_or_init(|| StableCdfTable::new(alpha))
}

/// Minimal xorshift64* generator, independent of the library's streams.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn uniform(&mut self) -> f64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        let v = self.0.wrapping_mul(0x2545_F491_4F6C_DD1D);
        ((v >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }
}

/// Draws from S(α, 0, 1, 0) by inverting the Fourier-inversion CDF.
pub fn inversion_samples(alpha: f64, n: usize, seed: u64) -> Vec<f64> {
    let table = stable_table(alpha);
    let mut g = XorShift(seed.max(1));
    (0..n).map(|_| table.quantile(g.uniform())).collect()
}

/// Brownian exit probability from (0, 1) by the eigenfunction series,
/// for dX = σ dW over horizon t.
pub fn heat_exit_probability(x: f64, sigma: f64, t: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..400 {
        let k = (2 * i + 1) as f64;
        s += 4.0 / (k * PI) * (k * PI * x).sin() * (-k * k * PI * PI * sigma * sigma * t / 2.0).exp();
    }
    1.0 - s
}

/// Two-sample KS statistic, written independently of the library.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut all: Vec<(f64, bool)> = a.iter().map(|&x| (x, true)).chain(b.iter().map(|&x| (x, false))).collect();
    all.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (mut ca, mut cb, mut d) = (0.0, 0.0, 0.0f64);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut i = 0;
    while i < all.len() {
        let x = all[i].0;
        while i < all.len() && all[i].0 == x {
            if all[i].1 {
                ca += 1.0;
            } else {
                cb += 1.0;
            }
            i += 1;
        }
        d = d.max((ca / na - cb / nb).abs());
    }
    d
}
