// params.hpp - protocol parameters, detector models, tolerances, shared types

#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace psdist {

// Thrown when an adaptive series or block family hits its guard before
// converging; the CLI maps this to exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Max photon number per mode; every truncated tensor is (n_max+1) wide per mode.
struct FockCutoff {
    int n_max = 30;

    void validate() const {
        if (n_max < 0) throw std::invalid_argument("FockCutoff: n_max must be >= 0");
    }
    int dim() const { return n_max + 1; }
};

enum class DetectorKind { OnOff, Pnr, Threshold };

// Heralding detector on each subtraction tap. `count` is the photon count l
// for Pnr and the cutoff m for Threshold ("on" means >= m); unused for OnOff.
struct DetectorModel {
    DetectorKind kind = DetectorKind::OnOff;
    int count = 1;
    double efficiency = 1.0;

    static DetectorModel onoff(double eff = 1.0) { return {DetectorKind::OnOff, 1, eff}; }
    static DetectorModel pnr(int l, double eff = 1.0) { return {DetectorKind::Pnr, l, eff}; }
    static DetectorModel threshold(int m, double eff = 1.0) { return {DetectorKind::Threshold, m, eff}; }

    void validate() const {
        if (kind != DetectorKind::OnOff && count < 1)
            throw std::invalid_argument("DetectorModel: photon count must be >= 1");
        if (!(efficiency > 0.0) || efficiency > 1.0)
            throw std::invalid_argument("DetectorModel: efficiency must be in (0,1]");
    }

    bool ideal() const { return efficiency == 1.0; }

    std::string label() const {
        std::string s;
        switch (kind) {
            case DetectorKind::OnOff: s = "onoff"; break;
            case DetectorKind::Pnr: s = "pnr:" + std::to_string(count); break;
            case DetectorKind::Threshold: s = "threshold:" + std::to_string(count); break;
        }
        if (efficiency != 1.0) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "@%g", efficiency);
            s += buf;
        }
        return s;
    }
};

// Squeezing lambda, channel transmittance eta, subtraction-tap transmittance t.
// Derived quantities are recomputed on demand, never stored.
struct ProtocolParams {
    double lambda = 0.5;
    double eta = 1.0;
    double t = 0.95;

    double r() const { return 1.0 - t; }
    double t_tilde() const { return 1.0 - eta * r(); }
    double r_tilde() const { return 1.0 - eta * t; }

    void validate() const {
        if (!(lambda >= 0.0) || lambda >= 1.0)
            throw std::invalid_argument("ProtocolParams: lambda must be in [0,1)");
        if (!(eta >= 0.0) || eta > 1.0)
            throw std::invalid_argument("ProtocolParams: eta must be in [0,1]");
        if (!(t > 0.0) || t > 1.0)
            throw std::invalid_argument("ProtocolParams: t must be in (0,1]");
    }
};

// Adaptive-series stopping rule: quit after `consecutive_small` successive
// terms below term_rel_tol relative to the running sum; max_terms guards
// divergence bugs.
struct SeriesTolerance {
    double term_rel_tol = 1e-14;
    int consecutive_small = 3;
    long max_terms = 1000000;
};

// Partial-transpose blocks C_K, K = 0..size-1; block K is (K+1)x(K+1).
// Families from conditioned (unnormalized) states carry the success
// probability as their total trace.
struct BlockFamily {
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<double> traces;
    double tail_mass = 0.0;
    bool normalized = false;

    int max_k() const { return static_cast<int>(blocks.size()) - 1; }

    double total_trace() const {
        double s = 0.0;
        for (double v : traces) s += v;
        return s;
    }
};

// Value tagged with the formula family it came from (CLI provenance).
struct ClosedFormResult {
    double value = 0.0;
    const char* formula_id = "";
};

}  // namespace psdist
