// centro.hpp - double-symmetry checks, the orthogonal centrosymmetric split,
// and the skew-trace negativity shortcut it justifies.

#pragma once

#include "psdist/params.hpp"

namespace psdist::centro {

struct SymmetryReport {
    bool ok = false;
    double max_dev = 0.0;  // worst |C - C^T| or |C - JCJ| entry
};

// true iff C is symmetric and centrosymmetric, both within tol (entrywise)
SymmetryReport check_double_symmetric(const Eigen::MatrixXd& c, double tol);

// Orthogonal similarity of a double-symmetric (K+1)x(K+1) matrix. For K odd
// the spectrum splits into minus_block = A - JM and plus_block = A + JM; for
// K even the plus side is bordered by the central entry q and column x:
// [[q, sqrt(2) x^T], [sqrt(2) x, A + JM]]. Here A is the leading
// floor((K+1)/2) square corner and (JM)_{i,j} = C_{K-i,j}.
struct CentroSplit {
    Eigen::MatrixXd minus_block;  // empty (0x0) when K = 0
    Eigen::MatrixXd plus_block;
};

CentroSplit centro_decompose(const Eigen::MatrixXd& c, double tol = 1e-10);

struct SkewResult {
    double negativity = 0.0;
    double log_negativity = 0.0;
    double total_trace = 0.0;        // success probability when unnormalized
    bool definiteness_ok = true;     // minus-blocks negative def., complements positive def.
    bool used_eigen_fallback = false;
    double eigen_discrepancy = 0.0;  // |skew - eigen| E_N when the fallback ran
};

// Theorem-2 shortcut: negativity from skew traces, N = (sum_K Tr[J C_K] / sum_K
// Tr[C_K] - 1) / 2, E_N = log2 of the trace ratio. When the definiteness
// premise fails (checked by default), falls back to the eigen path and reports
// the discrepancy.
SkewResult negativity_skew(const BlockFamily& family, bool check_definiteness = true,
                           double clamp_tol = 1e-10);

}  // namespace psdist::centro
