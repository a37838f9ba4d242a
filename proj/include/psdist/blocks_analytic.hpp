// blocks_analytic.hpp - series evaluation of the partial-transpose blocks C_K
// of the damped two-mode squeezed state: before subtraction, conditioned on
// both taps clicking an ideal on-off detector, and conditioned on both taps
// counting exactly l photons.

#pragma once

#include "psdist/params.hpp"

namespace psdist::blocks {

// (K+1)x(K+1) block of the partially transposed state before subtraction;
// all entries are >= 0 and the family traces sum to 1
Eigen::MatrixXd block_before(int k, const ProtocolParams& p,
                             const SeriesTolerance& tol = {});

// unnormalized block after both taps click an ideal on-off detector
Eigen::MatrixXd block_onoff(int k, const ProtocolParams& p,
                            const SeriesTolerance& tol = {});

// unnormalized block after both taps count exactly l photons (ideal PNR)
Eigen::MatrixXd block_pnr(int k, int l, const ProtocolParams& p,
                          const SeriesTolerance& tol = {});

// Grow the family in K until the block trace stays below eps_k times the
// cumulative trace for three consecutive K. det = nullopt means no
// subtraction; threshold detectors and efficiency < 1 have no series here
// and are rejected (route those through the brute-force engine).
BlockFamily block_family(const ProtocolParams& p,
                         const std::optional<DetectorModel>& det,
                         double eps_k = 1e-12, int k_cap = 200,
                         const SeriesTolerance& tol = {});

}  // namespace psdist::blocks
