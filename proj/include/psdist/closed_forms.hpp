// closed_forms.hpp - analytic formulas for negativity, success probability,
// teleportation fidelity, and the distillation threshold, plus the Gaussian
// symplectic cross-check. All are truncation-free except p_mixed, whose outer
// sum is adaptive.

#pragma once

#include "psdist/params.hpp"

namespace psdist::closed {

// log-negativity of the damped two-mode squeezed state, log2[(1+l)/(1-l(2e-1))]
double en_before(double lambda, double eta);

// same quantity via the covariance matrix: build the damped-TMSS covariance,
// partially transpose, take the smaller symplectic eigenvalue nu, return
// max(0, -log2 nu)
double gaussian_en(double lambda, double eta);

// smaller symplectic eigenvalue of the partially transposed covariance matrix
double gaussian_nu_tilde(double lambda, double eta);

// heralding probability for on-off taps on both arms
double p_onoff(double lambda, double eta, double t);

// log-negativity after on-off subtraction; lambda = 0 has no conditional state
double en_onoff(double lambda, double eta, double t);

// eta = 1 specializations (algebraically identical to the general forms)
double en_pure(double lambda, double t);
double p_pure(double lambda, double t);

// minimal tap transmittance for which on-off subtraction helps, at eta = 1;
// cubic-root expression, scoped to eta = 1 (other eta are found numerically)
double tl_onoff_closed(double lambda);

// heralding probability / log-negativity when both detectors count exactly l
double p_pnr(double lambda, double eta, double t, int l);
double en_pnr(double lambda, double eta, double t, int l);

// heralding probability when both detectors see >= m photons (threshold);
// m = 1 reduces to p_onoff
double p_mixed(double lambda, double eta, double t, int m,
               const SeriesTolerance& tol = {});

// coherent-state teleportation fidelity of the state before subtraction
double f_before(double lambda, double eta);

}  // namespace psdist::closed
