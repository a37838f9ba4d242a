#include "psdist/closed_forms.hpp"

#include <algorithm>
#include <cmath>

namespace psdist::closed {

namespace {

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

void check_domain(double lambda, double eta) {
    if (!(lambda >= 0.0) || lambda >= 1.0)
        throw std::invalid_argument("closed_forms: lambda must be in [0,1)");
    if (!(eta >= 0.0) || eta > 1.0)
        throw std::invalid_argument("closed_forms: eta must be in [0,1]");
}

void check_t(double t) {
    if (!(t > 0.0) || t > 1.0)
        throw std::invalid_argument("closed_forms: t must be in (0,1]");
}

}  // namespace

double en_before(double lambda, double eta) {
    check_domain(lambda, eta);
    return std::log2((1.0 + lambda) / (1.0 - lambda * (2.0 * eta - 1.0)));
}

double gaussian_nu_tilde(double lambda, double eta) {
    check_domain(lambda, eta);
    // damped-TMSS covariance (vacuum variance 1): diag blocks a*I2, off block c*Z
    const double a = eta * (1.0 + lambda * lambda) / (1.0 - lambda * lambda) + (1.0 - eta);
    const double c = eta * 2.0 * lambda / (1.0 - lambda * lambda);
    // partial transpose flips the sign of det(c*Z); the smaller symplectic
    // eigenvalue is nu^2 = (delta - sqrt(delta^2 - 4 det V))/2 with
    // delta = 2a^2 + 2c^2 and det V = (a^2 - c^2)^2, so the discriminant is
    // exactly 16 a^2 c^2 and nu = |a - c|; the direct form avoids the
    // cancellation the subtraction under the square root would cause
    return std::abs(a - c);
}

double gaussian_en(double lambda, double eta) {
    const double nu = gaussian_nu_tilde(lambda, eta);
    return std::max(0.0, -std::log2(nu));
}

double p_onoff(double lambda, double eta, double t) {
    check_domain(lambda, eta);
    check_t(t);
    const double tt = 1.0 - eta * (1.0 - t);
    const double l2 = lambda * lambda;
    return l2 * (1.0 - tt) * (1.0 - tt) * (1.0 + l2 * tt) /
           ((1.0 - l2 * tt) * (1.0 - l2 * tt * tt));
}

double en_onoff(double lambda, double eta, double t) {
    check_domain(lambda, eta);
    check_t(t);
    if (lambda == 0.0)
        throw std::invalid_argument("en_onoff: no conditional state at lambda = 0");
    const double r = 1.0 - t;
    const double tt = 1.0 - eta * r;
    const double rt = 1.0 - eta * t;
    const double l2 = lambda * lambda;
    const double t1 = (1.0 - l2) * eta * r /
                      ((1.0 - lambda * eta * t) * (1.0 - lambda * eta * t) - l2 * (1.0 - eta) * rt);
    const double t2 = rt / ((1.0 - lambda) * (1.0 - lambda * (2.0 * eta * t - 1.0))) -
                      (1.0 - eta) / ((1.0 - lambda * eta * t) * (1.0 - lambda * eta * t) -
                                     l2 * (1.0 - eta) * (1.0 - eta));
    const double t3 = (1.0 - l2 * tt) * (1.0 - l2 * tt * tt) /
                      ((1.0 - tt) * (1.0 - tt) * (1.0 + l2 * tt));
    return std::log2(t1) + std::log2(t2) + std::log2(t3);
}

double en_pure(double lambda, double t) {
    check_t(t);
    if (!(lambda > 0.0) || lambda >= 1.0)
        throw std::invalid_argument("en_pure: lambda must be in (0,1)");
    const double r = 1.0 - t;
    const double l2 = lambda * lambda;
    return std::log2((1.0 + lambda) * (1.0 - l2 * t) * (1.0 + lambda * t) /
                     ((1.0 - lambda * t) * (1.0 + l2 * t) * (1.0 - lambda * t + lambda * r)));
}

double p_pure(double lambda, double t) {
    check_domain(lambda, 1.0);
    check_t(t);
    const double l2 = lambda * lambda;
    return l2 * (1.0 - t) * (1.0 - t) * (1.0 + l2 * t) /
           ((1.0 - l2 * t) * (1.0 - l2 * t * t));
}

double tl_onoff_closed(double lambda) {
    if (!(lambda > 0.0) || lambda >= 1.0)
        throw std::invalid_argument("tl_onoff_closed: lambda must be in (0,1)");
    const double l = lambda;
    const double l2 = l * l, l3 = l2 * l, l4 = l2 * l2;
    const double xi = l2 * (l4 + 2.0 * l3 - 4.0 * l2 + 4.0 * l + 1.0);
    const double zeta = l * (l3 + 8.0 * l2 - 3.0 * l + 2.0);
    double arg = (3.0 * l3 * zeta - 2.0 * l * (l2 + l - 1.0) * xi) / (2.0 * xi * std::sqrt(xi));
    if (arg > 1.0 + 1e-12 || arg < -1.0 - 1e-12)
        throw std::domain_error("tl_onoff_closed: arccos argument out of range");
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg);
    const double pi = 3.14159265358979323846;
    return (l * (l2 + l - 1.0) + 2.0 * std::sqrt(xi) * std::sin(pi / 6.0 - theta / 3.0)) /
           (3.0 * l3);
}

double p_pnr(double lambda, double eta, double t, int l) {
    check_domain(lambda, eta);
    check_t(t);
    if (l < 1) throw std::invalid_argument("p_pnr: l must be >= 1");
    const double r = 1.0 - t;
    const double tt = 1.0 - eta * r;
    const double l2 = lambda * lambda;
    const double den = 1.0 - l2 * tt * tt;
    double s = 0.0;
    for (int k = 0; k <= l; ++k) {
        const double b = binom(l, k);
        s += b * b * std::pow(lambda * tt, 2.0 * k);
    }
    return (1.0 - l2) / den * std::pow(lambda * eta * r / den, 2.0 * l) * s;
}

double en_pnr(double lambda, double eta, double t, int l) {
    check_domain(lambda, eta);
    check_t(t);
    if (l < 1) throw std::invalid_argument("en_pnr: l must be >= 1");
    if (lambda == 0.0)
        throw std::invalid_argument("en_pnr: no conditional state at lambda = 0");
    const double r = 1.0 - t;
    const double tt = 1.0 - eta * r;
    const double t1 = (2.0 * l + 1.0) *
                      std::log2((1.0 + lambda * tt) / (1.0 - lambda * (eta * t + eta - 1.0)));
    double s2 = 0.0, s3 = 0.0;
    for (int k = 0; k <= l; ++k) {
        const double b = binom(l, k);
        s2 += b * b * std::pow(lambda - lambda * eta, 2.0 * k) *
              std::pow(1.0 - lambda * eta * t, 2.0 * (l - k));
        s3 += b * b * std::pow(lambda * tt, 2.0 * k);
    }
    return t1 + std::log2(s2) - std::log2(s3);
}

double p_mixed(double lambda, double eta, double t, int m, const SeriesTolerance& tol) {
    check_domain(lambda, eta);
    check_t(t);
    if (m < 1) throw std::invalid_argument("p_mixed: m must be >= 1");
    if (lambda == 0.0) return 0.0;
    const double r = 1.0 - t;
    const double tt = 1.0 - eta * r;
    const double l2 = lambda * lambda;
    double total = 0.0;
    int small = 0;
    for (long n = m; n < m + tol.max_terms; ++n) {
        // P(detector sees < m photons | n in the arm) for each tap, squared
        double miss = 0.0;
        for (int k = 0; k < m; ++k)
            miss += binom(static_cast<int>(n), k) * std::pow(eta * r, k) *
                    std::pow(tt, static_cast<double>(n - k));
        const double bracket = 1.0 - miss;
        const double term = std::pow(l2, static_cast<double>(n)) * bracket * bracket;
        total += term;
        if (term <= tol.term_rel_tol * total)
            ++small;
        else
            small = 0;
        if (small >= tol.consecutive_small) break;
        if (n + 1 == m + tol.max_terms)
            throw ConvergenceError("p_mixed: series did not converge within max_terms");
    }
    return (1.0 - l2) * total;
}

double f_before(double lambda, double eta) {
    check_domain(lambda, eta);
    const double le = lambda * eta;
    const double num = (1.0 + lambda) *
                       (2.0 - le * le * le + le * le * (lambda + 3.0) - le * (lambda + 4.0));
    const double den = 2.0 * (2.0 - 2.0 * le - lambda * le + le * le) * (1.0 - le) *
                       (1.0 + lambda - le);
    return num / den;
}

}  // namespace psdist::closed
