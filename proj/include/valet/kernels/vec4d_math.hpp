#pragma once

// Vectorized exp/log/acos/cos over vec4d, classical Cephes-style kernels.
// Domains are the ones the profit kernel needs: exp on [-746, 1], log on
// normal positives, acos on [-1, 1], cos on [0, pi/2]. Accuracy is a few
// ulps; the cubic-root consumer polishes with a Newton step afterwards.

#include "valet/kernels/vec4d.hpp"

namespace valet::kernels {

namespace vm {

inline vec4d c(double x) { return vec4d::broadcast(x); }

// exp(x): n = round(x/ln2), r = x - n*ln2 (split), rational kernel on r.
inline vec4d v_exp(vec4d x) {
    const vec4d log2e = c(1.4426950408889634073599);
    const vec4d ln2_hi = c(6.93145751953125e-1);
    const vec4d ln2_lo = c(1.42860682030941723212e-6);

    x = vmax(x, c(-745.0));
    vec4d n = x * log2e;
    // round to nearest via the 2^52 magic constant (|n| < 2^51 here)
    const vec4d magic = c(6755399441055744.0);  // 1.5 * 2^52
    n = (n + magic) - magic;
    vec4d r = x - n * ln2_hi;
    r = r - n * ln2_lo;

    const vec4d r2 = r * r;
    vec4d p = c(1.26177193074810590878e-4);
    p = p * r2 + c(3.02994407707441961300e-2);
    p = p * r2 + c(9.99999999999999999910e-1);
    vec4d q = c(3.00198505138664455042e-6);
    q = q * r2 + c(2.52448340349684104192e-3);
    q = q * r2 + c(2.27265548208155028766e-1);
    q = q * r2 + c(2.00000000000000000005e0);
    const vec4d e = (r * p) / (q - r * p);
    vec4d result = c(1.0) + e + e;
    result = ldexp_fast(result, n);
    // flush the clamped far tail to zero
    return blend(cmp_lt(x, c(-708.0)), c(0.0), result);
}

// log(x) for positive normal x.
inline vec4d v_log(vec4d x) {
    const vec4d sqrt_half = c(0.70710678118654752440);
    vec4d m, e;
    frexp_norm(x, m, e);
    // normalize mantissa into [sqrt(1/2), sqrt(2))
    const vec4d low = cmp_lt(m, sqrt_half);
    m = blend(low, m + m, m);
    e = blend(low, e - c(1.0), e);

    const vec4d z = m - c(1.0);
    const vec4d z2 = z * z;

    vec4d p = c(1.01875663804580931796e-4);
    p = p * z + c(4.97494994976747001425e-1);
    p = p * z + c(4.70579119878881725854e0);
    p = p * z + c(1.44989225341610930846e1);
    p = p * z + c(1.79368678507819816313e1);
    p = p * z + c(7.70838733755885391666e0);
    vec4d q = z + c(1.12873587189167450590e1);
    q = q * z + c(4.52279145837532221105e1);
    q = q * z + c(8.29875266912776603211e1);
    q = q * z + c(7.11544750618563894466e1);
    q = q * z + c(2.31251620126765340583e1);

    vec4d r = z * z2 * (p / q);
    r = r + e * c(-2.121944400546905827679e-4);
    r = r - c(0.5) * z2;
    return z + r + e * c(0.693359375);
}

// asin(a) for a in [0, 1]; both Cephes branches computed and blended.
inline vec4d v_asin_mag(vec4d a) {
    const vec4d pio4 = c(7.85398163397448309616e-1);
    const vec4d morebits = c(6.123233995736765886130e-17);

    // |a| <= 0.625: a + a * z * P(z)/Q(z) with z = a^2
    vec4d z_small = a * a;
    vec4d p = c(4.253011369004428248960e-3);
    p = p * z_small + c(-6.019598008014123785661e-1);
    p = p * z_small + c(5.444622390564711410273e0);
    p = p * z_small + c(-1.626247967210700244449e1);
    p = p * z_small + c(1.956261983317594739197e1);
    p = p * z_small + c(-8.198089802484824371615e0);
    vec4d q = z_small + c(-1.474091372988853791896e1);
    q = q * z_small + c(7.049610280856842141659e1);
    q = q * z_small + c(-1.471791292232726029859e2);
    q = q * z_small + c(1.395105614657485689735e2);
    q = q * z_small + c(-4.918853881490881290097e1);
    const vec4d small = a * (z_small * (p / q)) + a;

    // a > 0.625: pi/2 - sqrt(2*(1-a)) * (1 + R(1-a)/S(1-a)) style
    vec4d zz = c(1.0) - a;
    vec4d r = c(2.967721961301243206100e-3);
    r = r * zz + c(-5.634242780008963776856e-1);
    r = r * zz + c(6.968710824104713396794e0);
    r = r * zz + c(-2.556901049652824852289e1);
    r = r * zz + c(2.853665548261061424989e1);
    vec4d s = zz + c(-2.194779531642920639778e1);
    s = s * zz + c(8.655776679190226347053e1);
    s = s * zz + c(-1.414740494016065534600e2);
    s = s * zz + c(7.745250268776073189084e1);
    const vec4d pr = zz * (r / s);
    const vec4d sq = vsqrt(zz + zz);
    const vec4d big = (pio4 - (sq * pr - morebits + sq - pio4));

    return blend(cmp_gt(a, c(0.625)), big, small);
}

// acos(x) over [-1, 1] = pi/2 - sign(x) * asin(|x|).
inline vec4d v_acos(vec4d x) {
    const vec4d pio2 = c(1.57079632679489661923);
    const vec4d mag = v_asin_mag(vmin(vabs(x), c(1.0)));
    const vec4d neg = cmp_lt(x, c(0.0));
    return blend(neg, pio2 + mag, pio2 - mag);
}

// cos(t) for t in [0, pi/2]: direct kernel below pi/4, sin(pi/2 - t) above.
inline vec4d v_cos_quarter(vec4d t) {
    const vec4d pio4 = c(7.85398163397448309616e-1);
    const vec4d pio2 = c(1.57079632679489661923);
    const vec4d morebits = c(6.123233995736765886130e-17);

    // cos kernel, |u| <= pi/4
    const vec4d u = t;
    const vec4d u2 = u * u;
    vec4d pc = c(-1.13585365213876817300e-11);
    pc = pc * u2 + c(2.08757008419747316778e-9);
    pc = pc * u2 + c(-2.75573141792967388112e-7);
    pc = pc * u2 + c(2.48015872888517179954e-5);
    pc = pc * u2 + c(-1.38888888888730564116e-3);
    pc = pc * u2 + c(4.16666666666665929218e-2);
    const vec4d cos_direct = c(1.0) - c(0.5) * u2 + u2 * u2 * pc;

    // sin kernel at w = pi/2 - t (exact by Sterbenz for t in [pi/4, pi/2])
    const vec4d w = (pio2 - t) + morebits;
    const vec4d w2 = w * w;
    vec4d ps = c(1.58962301576546568060e-10);
    ps = ps * w2 + c(-2.50507477628578072866e-8);
    ps = ps * w2 + c(2.75573136213857245213e-6);
    ps = ps * w2 + c(-1.98412698295895385996e-4);
    ps = ps * w2 + c(8.33333333332211858878e-3);
    ps = ps * w2 + c(-1.66666666666666307295e-1);
    const vec4d sin_compl = w + w * w2 * ps;

    return blend(cmp_gt(t, pio4), sin_compl, cos_direct);
}

}  // namespace vm

}  // namespace valet::kernels
