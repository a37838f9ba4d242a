#include "psdist/fock_engine.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace psdist::fock {

namespace {

// exact for the small arguments used here (integer-valued partial products)
double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * double(n - k + i) / double(i);
    return b;
}

double pw(double base, long expo) {
    if (expo == 0) return 1.0;
    if (base == 0.0) return 0.0;
    return std::pow(base, double(expo));
}

// single-mode conditional map on mode A: couple a vacuum ancilla through the
// beamsplitter behind xi, weight outcome k by w(k), trace the ancilla out
Eigen::MatrixXd apply_mode_a(const Eigen::MatrixXd& rho, const Eigen::MatrixXd& xi,
                             const Eigen::VectorXd& w, int n_max) {
    const int n = n_max + 1;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * n, n * n);
    for (int a = 0; a < n; ++a)
        for (int ap = 0; ap < n; ++ap) {
            const int k_hi = std::min(n_max - a, n_max - ap);
            for (int k = 0; k <= k_hi; ++k) {
                const double c = w(k) * xi(a + k, k) * xi(ap + k, k);
                if (c == 0.0) continue;
                out.block(a * n, ap * n, n, n).noalias() +=
                    c * rho.block((a + k) * n, (ap + k) * n, n, n);
            }
        }
    return out;
}

Eigen::MatrixXd swap_modes(const Eigen::MatrixXd& rho, int n_max) {
    const int n = n_max + 1;
    Eigen::MatrixXd out(n * n, n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int ap = 0; ap < n; ++ap)
                for (int bp = 0; bp < n; ++bp)
                    out(b * n + a, bp * n + ap) = rho(a * n + b, ap * n + bp);
    return out;
}

Eigen::MatrixXd apply_both_modes(const Eigen::MatrixXd& rho, const Eigen::MatrixXd& xi,
                                 const Eigen::VectorXd& wa, const Eigen::VectorXd& wb,
                                 int n_max) {
    Eigen::MatrixXd m = apply_mode_a(rho, xi, wa, n_max);
    m = swap_modes(m, n_max);
    m = apply_mode_a(m, xi, wb, n_max);
    return swap_modes(m, n_max);
}

}  // namespace

TwoModePure make_tmss(double lambda, const FockCutoff& cutoff) {
    cutoff.validate();
    if (!(lambda >= 0.0) || lambda >= 1.0)
        throw std::invalid_argument("make_tmss: lambda must be in [0,1)");
    const int n = cutoff.dim();
    TwoModePure st;
    st.cutoff = cutoff;
    st.coeff = Eigen::MatrixXd::Zero(n, n);
    const double pref = std::sqrt(1.0 - lambda * lambda);
    for (int i = 0; i < n; ++i) st.coeff(i, i) = pref * pw(lambda, i);
    st.norm_deficit = pw(lambda, 2 * (cutoff.n_max + 1));
    return st;
}

BeamsplitterCoeffs bs_coeffs(double tau, const FockCutoff& cutoff) {
    cutoff.validate();
    if (!(tau >= 0.0) || tau > 1.0)
        throw std::invalid_argument("bs_coeffs: tau must be in [0,1]");
    const int n = cutoff.dim();
    BeamsplitterCoeffs bs;
    bs.tau = tau;
    bs.xi = Eigen::MatrixXd::Zero(n, n);
    for (int nn = 0; nn < n; ++nn)
        for (int m = 0; m <= nn; ++m) {
            const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
            bs.xi(nn, m) = sgn * std::sqrt(binom(nn, m)) *
                           std::pow(tau, 0.5 * (nn - m)) * std::pow(1.0 - tau, 0.5 * m);
        }
    return bs;
}

std::vector<Eigen::MatrixXd> bs_unitary(double tau, const FockCutoff& cutoff) {
    cutoff.validate();
    if (!(tau >= 0.0) || tau > 1.0)
        throw std::invalid_argument("bs_unitary: tau must be in [0,1]");
    // theta = arctan(sqrt((1-tau)/tau)); tau = 0 is a full reflection
    const double theta = (tau > 0.0) ? std::atan(std::sqrt((1.0 - tau) / tau))
                                     : std::acos(-1.0) / 2.0;
    std::vector<Eigen::MatrixXd> out;
    out.reserve(2 * cutoff.n_max + 1);
    for (int s = 0; s <= 2 * cutoff.n_max; ++s) {
        // generator of a'b - ab' on the (s+1)-dim total-photon subspace
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(s + 1, s + 1);
        for (int k = 0; k < s; ++k) {
            g(k + 1, k) = std::sqrt(double(k + 1) * double(s - k));
            g(k, k + 1) = -std::sqrt(double(k + 1) * double(s - k));
        }
        out.push_back((theta * g).exp());
    }
    return out;
}

FockDensity lossy_channel_state(const TwoModePure& state, double eta, double max_deficit) {
    state.cutoff.validate();
    if (!(eta >= 0.0) || eta > 1.0)
        throw std::invalid_argument("lossy_channel_state: eta must be in [0,1]");
    if (state.norm_deficit > max_deficit)
        throw ConvergenceError("lossy_channel_state: cutoff too small, truncation tail " +
                               std::to_string(state.norm_deficit) + " exceeds " +
                               std::to_string(max_deficit));
    const int n_max = state.cutoff.n_max;
    const int n = n_max + 1;
    Eigen::VectorXd v(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) v(a * n + b) = state.coeff(a, b);
    FockDensity rho;
    rho.cutoff = state.cutoff;
    rho.norm_deficit = state.norm_deficit;
    rho.mat = v * v.transpose();
    if (eta < 1.0) {
        const auto bs = bs_coeffs(eta, state.cutoff);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        rho.mat = apply_both_modes(rho.mat, bs.xi, ones, ones, n_max);
    }
    return rho;
}

Eigen::VectorXd make_povm(const DetectorModel& det, const std::string& outcome,
                          const FockCutoff& cutoff) {
    det.validate();
    cutoff.validate();
    const int n = cutoff.dim();
    const double eff = det.efficiency;
    Eigen::VectorXd w(n);
    auto miss_all = [&](int k) { return pw(1.0 - eff, k); };  // no photon seen out of k
    // probability that fewer than m of k photons are seen
    auto below = [&](int k, int m) {
        double s = 0.0;
        for (int j = 0; j < m && j <= k; ++j)
            s += binom(k, j) * pw(eff, j) * pw(1.0 - eff, k - j);
        return s;
    };
    switch (det.kind) {
        case DetectorKind::OnOff:
            if (outcome == "off") {
                for (int k = 0; k < n; ++k) w(k) = miss_all(k);
            } else if (outcome == "on") {
                for (int k = 0; k < n; ++k) w(k) = 1.0 - miss_all(k);
            } else {
                throw std::invalid_argument("make_povm: on-off outcome must be on or off");
            }
            return w;
        case DetectorKind::Threshold:
            if (outcome == "off") {
                for (int k = 0; k < n; ++k) w(k) = below(k, det.count);
            } else if (outcome == "on") {
                for (int k = 0; k < n; ++k) w(k) = 1.0 - below(k, det.count);
            } else {
                throw std::invalid_argument("make_povm: threshold outcome must be on or off");
            }
            return w;
        case DetectorKind::Pnr: {
            std::size_t pos = 0;
            int count = -1;
            try {
                count = std::stoi(outcome, &pos);
            } catch (const std::exception&) {
                throw std::invalid_argument("make_povm: PNR outcome must be a photon count");
            }
            if (pos != outcome.size() || count < 0)
                throw std::invalid_argument("make_povm: PNR outcome must be a photon count");
            if (count > cutoff.n_max)
                throw std::invalid_argument("make_povm: PNR outcome exceeds the cutoff");
            for (int k = 0; k < n; ++k)
                w(k) = (k >= count) ? binom(k, count) * pw(eff, count) * pw(1.0 - eff, k - count)
                                    : 0.0;
            return w;
        }
    }
    throw std::invalid_argument("make_povm: unknown detector kind");
}

Eigen::VectorXd povm_herald(const DetectorModel& det, const FockCutoff& cutoff) {
    if (det.kind == DetectorKind::Pnr)
        return make_povm(det, std::to_string(det.count), cutoff);
    return make_povm(det, "on", cutoff);
}

std::pair<FockDensity, double> subtract_photons(const FockDensity& rho, double t,
                                                const Eigen::VectorXd& povm_a,
                                                const Eigen::VectorXd& povm_b) {
    rho.cutoff.validate();
    if (!(t > 0.0) || t > 1.0)
        throw std::invalid_argument("subtract_photons: t must be in (0,1]");
    const int n = rho.cutoff.dim();
    if (povm_a.size() != n || povm_b.size() != n)
        throw std::invalid_argument("subtract_photons: POVM length must match the cutoff");
    const auto bs = bs_coeffs(t, rho.cutoff);
    FockDensity out;
    out.cutoff = rho.cutoff;
    out.norm_deficit = rho.norm_deficit;
    out.mat = apply_both_modes(rho.mat, bs.xi, povm_a, povm_b, rho.cutoff.n_max);
    const double prob = out.mat.trace();
    return {std::move(out), prob};
}

BlockFamily partial_transpose_blocks(const FockDensity& rho, double off_block_tol) {
    const int n_max = rho.cutoff.n_max;
    const int n = n_max + 1;
    if (rho.mat.rows() != n * n || rho.mat.cols() != n * n)
        throw std::invalid_argument("partial_transpose_blocks: matrix does not match cutoff");

    double off_mass = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int ap = 0; ap < n; ++ap)
                for (int bp = 0; bp < n; ++bp)
                    if (a - ap != b - bp)
                        off_mass += std::abs(rho.mat(a * n + b, ap * n + bp));
    if (off_mass > off_block_tol)
        throw std::invalid_argument(
            "partial_transpose_blocks: state is outside the photon-number-correlated "
            "family (off-block mass " + std::to_string(off_mass) + ")");

    BlockFamily fam;
    for (int k = 0; k <= 2 * n_max; ++k) {
        const int lo = std::max(0, k - n_max), hi = std::min(k, n_max);
        Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(k + 1, k + 1);
        for (int i = lo; i <= hi; ++i)
            for (int j = lo; j <= hi; ++j)
                blk(i, j) = rho.mat(j * n + (k - i), i * n + (k - j));
        fam.traces.push_back(blk.trace());
        fam.blocks.push_back(std::move(blk));
    }
    fam.tail_mass = rho.norm_deficit;
    fam.normalized = std::abs(fam.total_trace() - 1.0) < 1e-9;
    return fam;
}

EigenNegativity negativity_eigen(const BlockFamily& family, double clamp_tol) {
    EigenNegativity out;
    double neg = 0.0, tot = 0.0, min_ev = 0.0;
    std::vector<Eigen::VectorXd> spectra;
    spectra.reserve(family.blocks.size());
    for (const auto& blk : family.blocks) {
        const double scale = std::max(1.0, blk.cwiseAbs().maxCoeff());
        if ((blk - blk.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw std::invalid_argument("negativity_eigen: block is not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            (blk + blk.transpose()) / 2.0, Eigen::EigenvaluesOnly);
        spectra.push_back(es.eigenvalues());
        tot += spectra.back().sum();
        min_ev = std::min(min_ev, spectra.back().minCoeff());
    }
    if (tot <= 0.0)
        throw std::invalid_argument("negativity_eigen: family has non-positive total trace");
    // families may be unnormalized (trace = heralding probability), so the
    // noise clamp has to scale with the total trace
    const double clamp = clamp_tol * tot;
    for (const auto& ev : spectra)
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev(i) < -clamp) neg += ev(i);
    out.negativity = -neg / tot;
    out.log_negativity = std::log2(1.0 + 2.0 * out.negativity);
    out.total_trace = tot;
    out.min_eigenvalue = min_ev;
    return out;
}

double min_eigenvalue(const FockDensity& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        (rho.mat + rho.mat.transpose()) / 2.0, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace psdist::fock
