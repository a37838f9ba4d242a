// teleport.hpp - average coherent-state teleportation fidelity of a protocol
// state, evaluated blockwise against the partially transposed fidelity
// operator and, independently, by a direct truncated-operator trace.

#pragma once

#include "psdist/fock_engine.hpp"
#include "psdist/params.hpp"

namespace psdist::teleport {

// (K+1)x(K+1) fidelity-operator block, entries 2^{-(K+1)} sqrt(C(K,r) C(K,c));
// rank one with trace 1/2
Eigen::MatrixXd of_gamma_block(int k);

// F = sum_K Tr[C_K O(K)] / sum_K Tr[C_K]
double fidelity_from_blocks(const BlockFamily& family);

// F = Tr[rho O_F] / Tr[rho] with O_F assembled directly in the truncated
// two-mode basis; the coherent amplitude averages out and never appears
double fidelity_oracle(const fock::FockDensity& rho);

}  // namespace psdist::teleport
