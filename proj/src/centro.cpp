#include "psdist/centro.hpp"

#include "psdist/fock_engine.hpp"

#include <cmath>

namespace psdist::centro {

SymmetryReport check_double_symmetric(const Eigen::MatrixXd& c, double tol) {
    if (c.rows() != c.cols())
        throw std::invalid_argument("check_double_symmetric: matrix must be square");
    const Eigen::Index n = c.rows();
    double dev = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            dev = std::max(dev, std::abs(c(i, j) - c(j, i)));
            dev = std::max(dev, std::abs(c(i, j) - c(n - 1 - i, n - 1 - j)));
        }
    return {dev < tol, dev};
}

CentroSplit centro_decompose(const Eigen::MatrixXd& c, double tol) {
    const auto rep = check_double_symmetric(c, tol);
    if (!rep.ok)
        throw std::invalid_argument("centro_decompose: input is not double symmetric (dev " +
                                    std::to_string(rep.max_dev) + ")");
    const int k = static_cast<int>(c.rows()) - 1;
    const int h = (k + 1) / 2;  // rows of A and M

    Eigen::MatrixXd minus(h, h), plus(h, h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) {
            const double a = c(i, j);
            const double jm = c(k - i, j);  // J-reversed lower corner
            minus(i, j) = a - jm;
            plus(i, j) = a + jm;
        }

    CentroSplit out;
    out.minus_block = std::move(minus);
    if (k % 2 == 0) {
        // border the plus side with the central row/column
        const int m = k / 2;
        Eigen::MatrixXd bordered(h + 1, h + 1);
        bordered(0, 0) = c(m, m);
        const double rt2 = std::sqrt(2.0);
        for (int i = 0; i < h; ++i) {
            bordered(0, i + 1) = rt2 * c(i, m);
            bordered(i + 1, 0) = rt2 * c(i, m);
        }
        bordered.block(1, 1, h, h) = plus;
        out.plus_block = std::move(bordered);
    } else {
        out.plus_block = std::move(plus);
    }
    return out;
}

namespace {

// negative definiteness of `minus` and positive definiteness of `plus`,
// with eigenvalues inside (-clamp, clamp) treated as numerically zero
bool definiteness_holds(const CentroSplit& split, double clamp) {
    if (split.minus_block.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(split.minus_block,
                                                          Eigen::EigenvaluesOnly);
        if (es.eigenvalues().maxCoeff() > clamp) return false;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(split.plus_block,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > -clamp;
}

}  // namespace

SkewResult negativity_skew(const BlockFamily& family, bool check_definiteness,
                           double clamp_tol) {
    SkewResult out;
    double skew_sum = 0.0, trace_sum = 0.0;
    bool definite = true;
    const double scale = std::max(family.total_trace(), 1e-300);
    for (const auto& c : family.blocks) {
        const auto rep = check_double_symmetric(c, 1e-10 * std::max(1.0, c.cwiseAbs().maxCoeff()));
        if (!rep.ok)
            throw std::invalid_argument("negativity_skew: block is not double symmetric");
        skew_sum += c.rowwise().reverse().trace();
        trace_sum += c.trace();
        if (check_definiteness && definite) {
            // definiteness is scale invariant; check on trace-normalized blocks
            const auto split = centro_decompose(c / scale);
            definite = definiteness_holds(split, clamp_tol);
        }
    }
    if (trace_sum <= 0.0)
        throw std::invalid_argument("negativity_skew: family has non-positive total trace");

    out.total_trace = trace_sum;
    out.definiteness_ok = definite;
    const double ratio = skew_sum / trace_sum;
    out.negativity = 0.5 * (ratio - 1.0);
    out.log_negativity = std::log2(ratio);

    if (check_definiteness && !definite) {
        // premise of the shortcut failed; trust the eigen path instead
        const auto ref = fock::negativity_eigen(family);
        out.used_eigen_fallback = true;
        out.eigen_discrepancy = std::abs(out.log_negativity - ref.log_negativity);
        out.negativity = ref.negativity;
        out.log_negativity = ref.log_negativity;
    }
    return out;
}

}  // namespace psdist::centro
