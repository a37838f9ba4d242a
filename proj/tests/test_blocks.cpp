#include "psdist/blocks_analytic.hpp"

#include "psdist/closed_forms.hpp"
#include "psdist/fock_engine.hpp"

#include "doctest.h"

#include <cmath>
#include <functional>

using namespace psdist;

namespace {

// partial-transpose blocks of the brute-force conditioned state
BlockFamily oracle_family(const ProtocolParams& p,
                          const std::optional<DetectorModel>& det, int n_max) {
    const FockCutoff cut{n_max};
    auto rho = fock::lossy_channel_state(fock::make_tmss(p.lambda, cut), p.eta);
    if (det) {
        const auto povm = fock::povm_herald(*det, cut);
        rho = fock::subtract_photons(rho, p.t, povm, povm).first;
    }
    return fock::partial_transpose_blocks(rho);
}

double max_block_diff(const BlockFamily& oracle, int k_max,
                      const std::function<Eigen::MatrixXd(int)>& analytic) {
    double worst = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        const Eigen::MatrixXd a = analytic(k);
        worst = std::max(worst,
                         (a - oracle.blocks.at(k)).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace

TEST_CASE("undistilled blocks match the brute force entrywise") {
    const ProtocolParams p{0.5, 0.8, 0.9};
    const auto oracle = oracle_family(p, std::nullopt, 25);
    CHECK(max_block_diff(oracle, 8, [&](int k) {
              return blocks::block_before(k, p);
          }) < 1e-12);
}

TEST_CASE("on-off blocks match the brute force entrywise") {
    const ProtocolParams lossy{0.5, 0.8, 0.9};
    const auto o1 = oracle_family(lossy, DetectorModel::onoff(), 25);
    CHECK(max_block_diff(o1, 8, [&](int k) {
              return blocks::block_onoff(k, lossy);
          }) < 1e-12);

    // the lossless branch uses a separate single-series form
    const ProtocolParams pure{0.5, 1.0, 0.9};
    const auto o2 = oracle_family(pure, DetectorModel::onoff(), 25);
    CHECK(max_block_diff(o2, 8, [&](int k) {
              return blocks::block_onoff(k, pure);
          }) < 1e-12);
}

TEST_CASE("photon-counting blocks match the brute force entrywise") {
    const ProtocolParams p{0.5, 0.8, 0.9};
    for (int l : {1, 2}) {
        const auto oracle = oracle_family(p, DetectorModel::pnr(l), 25);
        CHECK(max_block_diff(oracle, 8, [&](int k) {
                  return blocks::block_pnr(k, l, p);
              }) < 1e-12);
    }
}

TEST_CASE("block families carry the right total trace") {
    const ProtocolParams p{0.5, 0.8, 0.9};
    const auto before = blocks::block_family(p, std::nullopt);
    CHECK(std::abs(before.total_trace() - 1.0) < 1e-10);
    CHECK_FALSE(before.blocks.empty());
    CHECK(before.traces.size() == before.blocks.size());

    const auto onoff = blocks::block_family(p, DetectorModel::onoff());
    CHECK(std::abs(onoff.total_trace() - closed::p_onoff(p.lambda, p.eta, p.t)) <
          1e-10);

    const auto pnr = blocks::block_family(p, DetectorModel::pnr(1));
    CHECK(std::abs(pnr.total_trace() - closed::p_pnr(p.lambda, p.eta, p.t, 1)) <
          1e-10);
}

TEST_CASE("family growth refuses to stop early") {
    const ProtocolParams p{0.9, 0.8, 0.9};
    CHECK_THROWS_AS((void)blocks::block_family(p, DetectorModel::onoff(), 1e-12, 5),
                    ConvergenceError);
}

TEST_CASE("unsupported detectors are rejected by the series path") {
    const ProtocolParams p{0.5, 0.8, 0.9};
    CHECK_THROWS_AS((void)blocks::block_family(p, DetectorModel::threshold(2)),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)blocks::block_family(p, DetectorModel::pnr(1, 0.7)),
                    std::invalid_argument);
}

TEST_CASE("zero squeezing yields empty conditioning") {
    const ProtocolParams p{0.0, 0.8, 0.9};
    CHECK(blocks::block_onoff(3, p).cwiseAbs().maxCoeff() == 0.0);
    const auto fam = blocks::block_family(p, DetectorModel::onoff());
    CHECK(fam.total_trace() == 0.0);
}
