#include "psdist/blocks_analytic.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace psdist::blocks {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kLnFactTableSize = 1 << 16;

const double* ln_fact_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kLnFactTableSize);
        t[0] = 0.0;
        for (int n = 1; n < kLnFactTableSize; ++n) t[n] = t[n - 1] + std::log(double(n));
        return t;
    }();
    return table.data();
}

double ln_fact(int n) {
    if (n < kLnFactTableSize) return ln_fact_table()[n];
    return std::lgamma(double(n) + 1.0);
}

// log C(n,k); -inf outside the Pascal triangle so exp() kills the term
double lnbinom(int n, int k) {
    if (k < 0 || k > n) return kNegInf;
    return ln_fact(n) - ln_fact(k) - ln_fact(n - k);
}

// base^expo for integer exponents with the 0^0 = 1 convention
double pw(double base, long expo) {
    if (expo == 0) return 1.0;
    if (base == 0.0) return 0.0;
    return std::pow(base, double(expo));
}

double before_entry(int i, int j, int k, const ProtocolParams& p,
                    const SeriesTolerance& tol) {
    const double lam = p.lambda, eta = p.eta;
    const long n0 = std::max(0, k - i - j);
    double tot = 0.0;
    int small = 0;
    for (long t = 0; t < tol.max_terms; ++t) {
        const long n = n0 + t;
        const double w = 0.5 * (lnbinom(i + n, n) + lnbinom(j + n, n) +
                                lnbinom(i + n, i + j + n - k) +
                                lnbinom(j + n, i + j + n - k));
        const double term = (1.0 - lam * lam) * pw(lam, i + j + 2 * n) * pw(eta, k) *
                            pw(1.0 - eta, i + j + 2 * n - k) * std::exp(w);
        tot += term;
        small = (term <= tol.term_rel_tol * std::abs(tot)) ? small + 1 : 0;
        if (small >= tol.consecutive_small) return tot;
    }
    throw ConvergenceError("block_before: series did not converge within max_terms");
}

double pnr_entry(int i, int j, int k, int l, const ProtocolParams& p,
                 const SeriesTolerance& tol) {
    const double lam = p.lambda, eta = p.eta, bigT = p.t, bigR = p.r();
    const long n0 = std::max(0, k - i - j);
    double tot = 0.0;
    int small = 0;
    for (long t = 0; t < tol.max_terms; ++t) {
        const long n = n0 + t;
        const long nn = j + n + l, mm = i + n + l, ll = i + j + n - k;
        const double w = 0.5 * (lnbinom(nn, n) + lnbinom(mm, n) + lnbinom(nn, ll) +
                                lnbinom(mm, ll) + lnbinom(j + l, l) + lnbinom(i + l, l) +
                                lnbinom(k - i + l, l) + lnbinom(k - j + l, l));
        const double term = (1.0 - lam * lam) * pw(bigT, k) * pw(bigR, 2 * l) *
                            pw(eta, k + 2 * l) * pw(lam, i + j + 2 * n + 2 * l) *
                            pw(1.0 - eta, i + j + 2 * n - k) * std::exp(w);
        tot += term;
        small = (term <= tol.term_rel_tol * std::abs(tot)) ? small + 1 : 0;
        if (small >= tol.consecutive_small) return tot;
    }
    throw ConvergenceError("block_pnr: series did not converge within max_terms");
}

// lossless-channel specialization: the loss sums collapse and a single
// reflected-count sum survives
double onoff_entry_eta1(int i, int j, int k, const ProtocolParams& p,
                        const SeriesTolerance& tol) {
    const double lam = p.lambda, bigT = p.t, bigR = p.r();
    const long g0 = std::max(1, k + 1 - i - j);
    double tot = 0.0;
    int small = 0;
    for (long t = 0; t < tol.max_terms; ++t) {
        const long g = g0 + t;
        const long d = i + j + g - k;
        const double w = 0.5 * (lnbinom(j + g, g) + lnbinom(i + g, g) +
                                lnbinom(j + g, d) + lnbinom(i + g, d));
        const double term = (1.0 - lam * lam) * pw(bigT, k) * pw(bigR, g + d) *
                            pw(lam, i + j + 2 * g) * std::exp(w);
        tot += term;
        small = (term <= tol.term_rel_tol * std::abs(tot)) ? small + 1 : 0;
        if (small >= tol.consecutive_small) return tot;
    }
    throw ConvergenceError("block_onoff: series did not converge within max_terms");
}

// general case: sum over reflected counts on each tap (g, d >= 1, both
// detectors clicked) and the loss index s
double onoff_entry(int i, int j, int k, const ProtocolParams& p,
                   const SeriesTolerance& tol) {
    if (p.eta == 1.0) return onoff_entry_eta1(i, j, k, p, tol);
    const double lam = p.lambda, eta = p.eta, bigT = p.t, bigR = p.r();
    const double pref = 1.0 - lam * lam;
    double tot = 0.0;
    int gsmall = 0;
    for (long g = 1; g <= tol.max_terms; ++g) {
        double gsum = 0.0;
        int dsmall = 0;
        for (long d = 1; d <= tol.max_terms; ++d) {
            const long s0 = std::max<long>(0, k + d - i - j - g);
            double dsum = 0.0;
            int nsmall = 0;
            bool converged = false;
            for (long t = 0; t < tol.max_terms; ++t) {
                const long s = s0 + t;
                const long nn = j + s + g, mm = i + s + g, ll = i + j + s + g - d - k;
                const double w = 0.5 * (lnbinom(nn, s) + lnbinom(mm, s) +
                                        lnbinom(nn, ll) + lnbinom(mm, ll) +
                                        lnbinom(nn - s, g) + lnbinom(mm - s, g) +
                                        lnbinom(nn - ll, d) + lnbinom(mm - ll, d));
                const double term = pref * pw(bigT, k) * pw(bigR, g + d) *
                                    pw(eta, k + g + d) * pw(lam, i + j + 2 * s + 2 * g) *
                                    pw(1.0 - eta, i + j + 2 * s + g - d - k) * std::exp(w);
                dsum += term;
                const double scale = std::max(std::abs(tot + gsum + dsum), 1e-300);
                nsmall = (term <= tol.term_rel_tol * scale) ? nsmall + 1 : 0;
                if (nsmall >= tol.consecutive_small) { converged = true; break; }
            }
            if (!converged)
                throw ConvergenceError("block_onoff: inner series did not converge");
            gsum += dsum;
            const double scale = std::max(std::abs(tot + gsum), 1e-300);
            dsmall = (std::abs(dsum) <= tol.term_rel_tol * scale) ? dsmall + 1 : 0;
            if (dsmall >= tol.consecutive_small) break;
        }
        tot += gsum;
        const double scale = std::max(std::abs(tot), 1e-300);
        gsmall = (std::abs(gsum) <= tol.term_rel_tol * scale) ? gsmall + 1 : 0;
        if (gsmall >= tol.consecutive_small) return tot;
    }
    throw ConvergenceError("block_onoff: outer series did not converge");
}

Eigen::MatrixXd fill_block(int k, const std::function<double(int, int)>& entry) {
    Eigen::MatrixXd m(k + 1, k + 1);
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j) m(i, j) = entry(i, j);
    return m;
}

}  // namespace

Eigen::MatrixXd block_before(int k, const ProtocolParams& p, const SeriesTolerance& tol) {
    if (k < 0) throw std::invalid_argument("block_before: K must be >= 0");
    p.validate();
    return fill_block(k, [&](int i, int j) { return before_entry(i, j, k, p, tol); });
}

Eigen::MatrixXd block_onoff(int k, const ProtocolParams& p, const SeriesTolerance& tol) {
    if (k < 0) throw std::invalid_argument("block_onoff: K must be >= 0");
    p.validate();
    if (p.lambda == 0.0) return Eigen::MatrixXd::Zero(k + 1, k + 1);
    return fill_block(k, [&](int i, int j) { return onoff_entry(i, j, k, p, tol); });
}

Eigen::MatrixXd block_pnr(int k, int l, const ProtocolParams& p, const SeriesTolerance& tol) {
    if (k < 0) throw std::invalid_argument("block_pnr: K must be >= 0");
    if (l < 1) throw std::invalid_argument("block_pnr: photon count must be >= 1");
    p.validate();
    if (p.lambda == 0.0) return Eigen::MatrixXd::Zero(k + 1, k + 1);
    return fill_block(k, [&](int i, int j) { return pnr_entry(i, j, k, l, p, tol); });
}

BlockFamily block_family(const ProtocolParams& p, const std::optional<DetectorModel>& det,
                         double eps_k, int k_cap, const SeriesTolerance& tol) {
    p.validate();
    if (det) {
        det->validate();
        if (det->kind == DetectorKind::Threshold)
            throw std::invalid_argument(
                "block_family: threshold detectors have no analytic block series; "
                "use the fock engine");
        if (!det->ideal())
            throw std::invalid_argument(
                "block_family: detector efficiency < 1 is handled by the fock engine only");
    }
    if (!(eps_k > 0.0)) throw std::invalid_argument("block_family: eps_k must be > 0");

    BlockFamily fam;
    fam.normalized = !det.has_value();
    double cum = 0.0;
    int consec = 0;
    for (int k = 0; k <= k_cap; ++k) {
        Eigen::MatrixXd m;
        if (!det) m = block_before(k, p, tol);
        else if (det->kind == DetectorKind::OnOff) m = block_onoff(k, p, tol);
        else m = block_pnr(k, det->count, p, tol);
        const double tr = m.trace();
        fam.blocks.push_back(std::move(m));
        fam.traces.push_back(tr);
        cum += tr;
        consec = (tr <= eps_k * std::max(cum, 1e-300)) ? consec + 1 : 0;
        if (consec >= 3) {
            // geometric tail estimate from the last two traces
            const double last = fam.traces.back();
            const double prev = fam.traces[fam.traces.size() - 2];
            double ratio = (prev > 0.0) ? std::min(0.99, last / prev) : 0.0;
            fam.tail_mass = (last > 0.0) ? last * ratio / (1.0 - ratio) : 0.0;
            return fam;
        }
    }
    throw ConvergenceError("block_family: block traces still significant at the K cap");
}

}  // namespace psdist::blocks
