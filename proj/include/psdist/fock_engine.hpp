// fock_engine.hpp - ground-truth path in a truncated Fock space: build the
// two-mode squeezed state, push it through loss and subtraction-tap
// beamsplitters, condition on detector POVMs, and read entanglement off the
// partial transpose by direct eigen-decomposition.

#pragma once

#include "psdist/params.hpp"

namespace psdist::fock {

// amplitudes c(n_a, n_b); the protocol only populates the (n, n) diagonal
struct TwoModePure {
    Eigen::MatrixXd coeff;
    FockCutoff cutoff;
    double norm_deficit = 0.0;  // analytic tail cut off by the truncation
};

// two-mode density matrix with composite row index a * dim + b
struct FockDensity {
    Eigen::MatrixXd mat;
    FockCutoff cutoff;
    double norm_deficit = 0.0;  // inherited from the state it was built from

    double trace() const { return mat.trace(); }
};

// single beamsplitter acting on |n, 0>: out = sum_m xi(n, m) |n-m, m>
struct BeamsplitterCoeffs {
    double tau = 1.0;
    Eigen::MatrixXd xi;  // xi(n, m), zero for m > n
};

TwoModePure make_tmss(double lambda, const FockCutoff& cutoff);

// xi(n, m) = (-1)^m sqrt(C(n, m)) tau^{(n-m)/2} (1-tau)^{m/2}
BeamsplitterCoeffs bs_coeffs(double tau, const FockCutoff& cutoff);

// full two-mode beamsplitter unitary, one orthogonal matrix per total photon
// number S = 0..2 n_max, each built exactly on its untruncated (S+1)-dim
// subspace; element (k, k') is <k, S-k| U |k', S-k'>
std::vector<Eigen::MatrixXd> bs_unitary(double tau, const FockCutoff& cutoff);

// send both modes through transmittance-eta loss channels (vacuum ancillas
// traced out); trace is preserved, so the deficit is the input's tail.
// Throws ConvergenceError when the input tail exceeds max_deficit.
FockDensity lossy_channel_state(const TwoModePure& state, double eta,
                                double max_deficit = 1e-6);

// diagonal POVM element for one detector outcome. Labels: "on"/"off" for
// on-off and threshold detectors, a decimal photon count for PNR.
// Efficiency < 1 thins the ideal element binomially.
Eigen::VectorXd make_povm(const DetectorModel& det, const std::string& outcome,
                          const FockCutoff& cutoff);

// the element the protocol heralds on: "on" for on-off and threshold,
// the detector's own count for PNR
Eigen::VectorXd povm_herald(const DetectorModel& det, const FockCutoff& cutoff);

// tap each mode with a transmittance-t beamsplitter, condition the taps on
// the POVM diagonals, trace the taps out; returns the unnormalized state and
// its trace (the heralding probability)
std::pair<FockDensity, double> subtract_photons(const FockDensity& rho, double t,
                                                const Eigen::VectorXd& povm_a,
                                                const Eigen::VectorXd& povm_b);

// blocks C_K of the partial transpose, K = 0..2 n_max, padded to
// (K+1)x(K+1); entries outside the truncation are zero. Throws when mass is
// found outside the photon-number-correlated family.
BlockFamily partial_transpose_blocks(const FockDensity& rho,
                                     double off_block_tol = 1e-12);

struct EigenNegativity {
    double negativity = 0.0;      // |sum of negative eigenvalues| / total trace
    double log_negativity = 0.0;  // log2(1 + 2 negativity)
    double total_trace = 0.0;
    double min_eigenvalue = 0.0;
};

// direct eigen-decomposition of every block; eigenvalues within
// clamp_tol * total_trace of zero count as zero, so the noise floor follows
// the family's (possibly small) heralding probability
EigenNegativity negativity_eigen(const BlockFamily& family, double clamp_tol = 1e-12);

// smallest eigenvalue of the full two-mode density matrix (positivity check)
double min_eigenvalue(const FockDensity& rho);

}  // namespace psdist::fock
