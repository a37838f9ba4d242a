#include "psdist/teleport.hpp"

#include <cmath>

namespace psdist::teleport {

namespace {

double ln_fact(int n) { return std::lgamma(double(n) + 1.0); }

// sqrt(C(n,k) / 2^{n+1}) evaluated in log space; stable for large n
double half_weight(int n, int r, int c) {
    const double lnb_r = ln_fact(n) - ln_fact(r) - ln_fact(n - r);
    const double lnb_c = ln_fact(n) - ln_fact(c) - ln_fact(n - c);
    return std::exp(0.5 * (lnb_r + lnb_c) - double(n + 1) * std::log(2.0));
}

}  // namespace

Eigen::MatrixXd of_gamma_block(int k) {
    if (k < 0) throw std::invalid_argument("of_gamma_block: K must be >= 0");
    Eigen::MatrixXd m(k + 1, k + 1);
    for (int r = 0; r <= k; ++r)
        for (int c = 0; c <= k; ++c) m(r, c) = half_weight(k, r, c);
    return m;
}

double fidelity_from_blocks(const BlockFamily& family) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < family.blocks.size(); ++k) {
        const auto& blk = family.blocks[k];
        if (blk.rows() != blk.cols() || blk.rows() != Eigen::Index(k + 1))
            throw std::invalid_argument("fidelity_from_blocks: block K has wrong dimension");
        num += (blk * of_gamma_block(int(k))).trace();
        den += blk.trace();
    }
    if (den <= 0.0)
        throw std::invalid_argument("fidelity_from_blocks: family has non-positive total trace");
    return num / den;
}

double fidelity_oracle(const fock::FockDensity& rho) {
    const int n_max = rho.cutoff.n_max;
    const int n = n_max + 1;
    if (rho.mat.rows() != n * n)
        throw std::invalid_argument("fidelity_oracle: matrix does not match cutoff");
    const double tr = rho.mat.trace();
    if (tr <= 0.0)
        throw std::invalid_argument("fidelity_oracle: state has non-positive trace");
    // Tr[rho O_F] with O_F's only nonzero entries at ((i,j),(K-j,K-i))
    double num = 0.0;
    for (int k = 0; k <= 2 * n_max; ++k)
        for (int i = std::max(0, k - n_max); i <= std::min(k, n_max); ++i)
            for (int j = std::max(0, k - n_max); j <= std::min(k, n_max); ++j)
                num += half_weight(k, i, j) * rho.mat((k - j) * n + (k - i), i * n + j);
    return num / tr;
}

}  // namespace psdist::teleport
