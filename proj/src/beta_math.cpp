#include "banditlab/beta_math.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace banditlab {

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_pdf(double x, double a, double b) {
    if (x <= 0.0 || x >= 1.0) {
        // Density at the endpoints only matters as a Newton slope; 0 forces
        // the quantile search to fall back to bisection there.
        return 0.0;
    }
    return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz). Converges in
// a few dozen iterations for x below the symmetry switch point.
double beta_cf(double x, double a, double b) {
    constexpr int kMaxIter = 400;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}

double reg_inc_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("reg_inc_beta: shape parameters must be positive, got a=" +
                                    std::to_string(a) + " b=" + std::to_string(b));
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument("reg_inc_beta: x must lie in [0,1], got " + std::to_string(x));
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front =
        a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(x, a, b) / a;
    }
    return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

double beta_quantile(double p, double a, double b) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("beta_quantile: p must lie strictly inside (0,1), got " +
                                    std::to_string(p));
    }
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("beta_quantile: shape parameters must be positive, got a=" +
                                    std::to_string(a) + " b=" + std::to_string(b));
    }

    double lo = 0.0, hi = 1.0;
    double x = a / (a + b);  // start at the mean
    for (int iter = 0; iter < 200; ++iter) {
        const double f = reg_inc_beta(x, a, b) - p;
        if (f > 0.0) {
            hi = x;
        } else if (f < 0.0) {
            lo = x;
        } else {
            return x;
        }
        const double pdf = beta_pdf(x, a, b);
        double next = 0.0;
        bool newton_ok = false;
        if (pdf > 0.0) {
            next = x - f / pdf;
            newton_ok = next > lo && next < hi;
        }
        if (!newton_ok) next = 0.5 * (lo + hi);  // safeguarded bisection
        if (std::fabs(next - x) <= 1e-13 * (1.0 + std::fabs(x)) || hi - lo <= 1e-13) {
            return next;
        }
        x = next;
    }
    return x;
}

}
