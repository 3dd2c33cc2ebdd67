//! Shared pieces of the dynamic programs: exact power-of-two scaling and the
//! two-sided geometric convolution.

/// `2^k` for `k ∈ [−1074, 1023]`, exactly; 0 below.
#[inline]
pub(crate) fn pow2(k: i32) -> f64 {
    if k >= -1022 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else if k >= -1074 {
        f64::from_bits(1u64 << (k + 1074))
    } else {
        0.0
    }
}

/// `m · 2^k` without intermediate overflow.
#[inline]
pub(crate) fn scale2(m: f64, k: i32) -> f64 {
    if k > 1023 {
        m * pow2(1023) * pow2(k - 1023)
    } else if k < -1022 {
        m * pow2(-1022) * pow2((k + 1022).max(-1100))
    } else {
        m * pow2(k)
    }
}

/// Binary exponent `e` with `|m| < 2^e`, or `None` for zero.
#[inline]
pub(crate) fn exponent_of(m: f64) -> Option<i32> {
    if m == 0.0 || !m.is_finite() {
        return None;
    }
    let bits = m.abs().to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i32;
    if raw == 0 {
        // subnormal: |m| = bits · 2^{−1074}
        Some(64 - bits.leading_zeros() as i32 - 1074)
    } else {
        Some(raw - 1022)
    }
}

/// `out[j] = Σ_i src[i] · x^{|(c + j) − (a + i)|}`: the source holds the values
/// at `v = a, a+1, …` and the output covers `v′ = c, c+1, …`.
///
/// Two running sums (left and right tails of the geometric kernel) make this
/// linear in the length of the combined range.
pub(crate) fn geo_conv(src: &[f64], a: i64, out: &mut [f64], c: i64, x: f64) {
    let (n, m) = (src.len() as i64, out.len() as i64);
    if m == 0 {
        return;
    }
    if n == 0 {
        out.fill(0.0);
        return;
    }
    // left tail Σ_{v ≤ v′} s(v) x^{v′−v}, first over the sources below c
    let below = (c - a).clamp(0, n);
    let mut left = src[..below as usize].iter().fold(0.0, |acc, &s| acc * x + s);
    if below > 0 {
        left *= x.powi((c - 1 - (a + below - 1)) as i32);
    }
    let (lo, hi) = ((a - c).clamp(0, m), (a + n - c).clamp(0, m));
    for o in out[..lo as usize].iter_mut() {
        left *= x;
        *o = left;
    }
    if hi > lo {
        let first = (c + lo - a) as usize;
        for (o, &s) in out[lo as usize..hi as usize].iter_mut().zip(&src[first..]) {
            left = left * x + s;
            *o = left;
        }
    }
    for o in out[hi.max(lo) as usize..].iter_mut() {
        left *= x;
        *o = left;
    }
    // right tail Σ_{v > v′} s(v) x^{v−v′}
    let out_hi = c + m - 1;
    let above = (a + n - 1 - out_hi).clamp(0, n);
    let mut right = src[(n - above) as usize..]
        .iter()
        .rev()
        .fold(0.0, |acc, &s| (acc + s) * x);
    if above > 0 {
        right *= x.powi((a + n - above - 1 - out_hi) as i32);
    }
    for o in out[hi.max(lo) as usize..].iter_mut().rev() {
        *o += right;
        right *= x;
    }
    if hi > lo {
        let first = (c + lo - a) as usize;
        let len = (hi - lo) as usize;
        let seg = &mut out[lo as usize..hi as usize];
        for (o, &s) in seg.iter_mut().rev().zip(src[first..first + len].iter().rev()) {
            *o += right;
            right = (right + s) * x;
        }
    }
    for o in out[..lo as usize].iter_mut().rev() {
        *o += right;
        right *= x;
    }
}

/// Same as [`geo_conv`], but targets outside the source range come back as
/// `out[j] · 2^{exps[j]}` so that long geometric tails do not underflow.
pub(crate) fn geo_conv_split(
    src: &[f64],
    a: i64,
    out: &mut [f64],
    exps: &mut [i32],
    c: i64,
    x: f64,
) {
    const SHIFT: i32 = 600;
    let rescale = pow2(SHIFT);
    let floor = pow2(-SHIFT);
    exps.iter_mut().for_each(|e| *e = 0);
    out.iter_mut().for_each(|o| *o = 0.0);
    if out.is_empty() || src.is_empty() {
        return;
    }
    let src_hi = a + src.len() as i64 - 1;
    let out_hi = c + out.len() as i64 - 1;
    let (lo_in, hi_in) = (c.max(a), out_hi.min(src_hi));
    if lo_in <= hi_in {
        let r = (lo_in - c) as usize..=(hi_in - c) as usize;
        geo_conv(src, a, &mut out[r], lo_in, x);
    }
    if out_hi > src_hi {
        let mut m = src.iter().fold(0.0, |acc, &s| acc * x + s);
        let mut e = 0;
        for v in src_hi + 1..=out_hi {
            m *= x;
            if m.abs() < floor && m != 0.0 {
                m *= rescale;
                e -= SHIFT;
            }
            if v >= c {
                out[(v - c) as usize] = m;
                exps[(v - c) as usize] = e;
            }
        }
    }
    if c < a {
        let mut m = src.iter().rev().fold(0.0, |acc, &s| acc * x + s);
        let mut e = 0;
        let mut v = a - 1;
        while v >= c {
            m *= x;
            if m.abs() < floor && m != 0.0 {
                m *= rescale;
                e -= SHIFT;
            }
            if v <= out_hi {
                out[(v - c) as usize] = m;
                exps[(v - c) as usize] = e;
            }
            v -= 1;
        }
    }
}

/// A double with a separate binary exponent: the value is `m · 2^e` with
/// `m ∈ [1/2, 1)` (or zero).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Ext {
    pub m: f64,
    pub e: i32,
}

impl Ext {
    pub const ZERO: Ext = Ext { m: 0.0, e: 0 };

    #[inline]
    pub fn new(m: f64, e: i32) -> Self {
        match exponent_of(m) {
            None => Ext::ZERO,
            Some(k) => Ext {
                m: m * pow2(-k),
                e: e + k,
            },
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.m == 0.0
    }

    #[inline]
    pub fn mul(self, f: f64) -> Self {
        Ext::new(self.m * f, self.e)
    }

    #[inline]
    pub fn add(self, o: Ext) -> Self {
        if o.is_zero() {
            self
        } else if self.is_zero() {
            o
        } else if self.e >= o.e {
            Ext::new(self.m + scale2(o.m, o.e - self.e), self.e)
        } else {
            Ext::new(o.m + scale2(self.m, self.e - o.e), o.e)
        }
    }

    pub fn ln(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.m.ln() + self.e as f64 * std::f64::consts::LN_2
        }
    }
}

/// `Σ_i src[i] · x^{|a + i|}` (values at `v = a, a+1, …`, range containing 0), by
/// Horner's rule from both ends so that no power of `x` is formed directly.
pub(crate) fn closing_sum(src: &[f64], a: i64, x: f64) -> Ext {
    debug_assert!(a <= 0 && a + src.len() as i64 > 0);
    let zero = (-a) as usize;
    let left = src[..=zero].iter().fold(0.0, |acc, &m| acc * x + m);
    let right = src[zero + 1..].iter().rev().fold(0.0, |acc, &m| (acc + m) * x);
    let plain = left + right;
    // anything lost to underflow is then negligible
    if plain.abs() > pow2(-800) {
        return Ext::new(plain, 0);
    }
    let mut l = Ext::ZERO;
    for &m in &src[..=zero] {
        l = l.mul(x).add(Ext::new(m, 0));
    }
    let mut r = Ext::ZERO;
    for &m in src[zero + 1..].iter().rev() {
        r = r.add(Ext::new(m, 0)).mul(x);
    }
    l.add(r)
}
