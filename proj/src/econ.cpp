#include "valet/econ.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace valet {

namespace {

double logistic(double x) {
    // 1 / (1 + e^-x) without overflow on either tail.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// ln(e^a + e^b) shifted by the max exponent.
double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

}  // namespace

DemandPoint demand(double c_valet, const ModelParams& p) {
    DemandPoint d;
    if (std::isinf(c_valet) && c_valet > 0.0) {
        d.p_vc = 0.0;
        d.c_ev = p.c_self;
    } else {
        if (!std::isfinite(c_valet)) throw std::invalid_argument("c_valet must be finite or +inf");
        d.p_vc = logistic(p.eps2 * (p.c_self - c_valet));
        d.c_ev = -log_sum_exp(-p.eps2 * c_valet, -p.eps2 * p.c_self) / p.eps2;
    }
    d.p_ev = logistic(p.eps1 * (p.c_fuel - d.c_ev));
    d.lambda = p.tau * p.lambda0 * d.p_ev * d.p_vc;
    return d;
}

double inverse_demand(double lambda, const ModelParams& p) {
    const double sup = p.tau * p.lambda0;
    if (!(lambda > 0.0) || !(lambda < sup))
        throw std::domain_error("lambda outside the achievable demand range");

    auto f = [&](double c) { return demand(c, p).lambda - lambda; };

    // Expand a bracket around the self-charging cost; demand is strictly
    // decreasing in c_v.
    double lo = p.c_self - 200.0, hi = p.c_self + 200.0;
    double flo = f(lo), fhi = f(hi);
    for (int i = 0; i < 80 && flo < 0.0; ++i) {
        lo -= 400.0 * (1 << std::min(i, 20));
        flo = f(lo);
    }
    for (int i = 0; i < 80 && fhi > 0.0; ++i) {
        hi += 400.0 * (1 << std::min(i, 20));
        fhi = f(hi);
    }
    if (flo < 0.0 || fhi > 0.0)
        throw std::domain_error("lambda outside the achievable demand range");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;

    // Illinois variant of regula falsi.
    for (int it = 0; it < 200; ++it) {
        const double c = (hi * flo - lo * fhi) / (flo - fhi);
        const double fc = f(c);
        if (fc == 0.0 || std::abs(hi - lo) < 1e-12 * std::max(1.0, std::abs(c))) return c;
        if ((fc > 0.0) == (flo > 0.0)) {
            lo = c;
            flo = fc;
            fhi *= 0.5;
        } else {
            hi = c;
            fhi = fc;
            flo *= 0.5;
        }
    }
    return 0.5 * (lo + hi);
}

double supply(double wage, const ModelParams& p) {
    if (std::isnan(wage)) throw std::invalid_argument("wage must be a number");
    return p.n0 * logistic(p.eta * (wage - p.w_outside));
}

double inverse_supply(double n, const ModelParams& p) {
    if (!(n > 0.0) || !(n < p.n0))
        throw std::domain_error("courier count outside (0, n0)");
    return p.w_outside + std::log(n / (p.n0 - n)) / p.eta;
}

double valet_cost(double price, const QueueSolution& times, const ModelParams& p) {
    return price + p.alpha * (times.t_response + times.t_pickup) +
           p.beta * (2.0 * times.t_delivery + times.t_wait);
}

namespace {

// Adaptive Simpson on [a, b] with a relative tolerance against the whole
// integral's running scale.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double rel_tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = rel_tol * std::max(std::abs(whole), 1e-300);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double customer_surplus(double c_valet, const ModelParams& p) {
    if (std::isinf(c_valet) && c_valet > 0.0) return 0.0;
    if (!std::isfinite(c_valet)) throw std::invalid_argument("c_valet must be finite or +inf");

    auto share = [&](double c) {
        const DemandPoint d = demand(c, p);
        return d.p_ev * d.p_vc;
    };
    const double at_cv = share(c_valet);
    if (at_cv <= 0.0) return 0.0;

    // The nested-logit tail decays exponentially; cut where the remaining
    // share is a 1e-12 fraction of its value at c_valet.
    double upper = c_valet + 16.0 / p.eps2;
    while (share(upper) > 1e-12 * at_cv && upper < c_valet + 1e7) upper += 16.0 / p.eps2;

    return p.tau * p.lambda0 * integrate(share, c_valet, upper, 1e-8);
}

double courier_surplus(double wage, const ModelParams& p) {
    if (!(wage >= 0.0)) throw std::invalid_argument("wage must be nonnegative");
    const double a = p.eta * p.w_outside;
    const double num = log_sum_exp(a, p.eta * wage);
    const double den = log_sum_exp(a, 0.0);
    return p.n0 / p.eta * (num - den);
}

}  // namespace valet
