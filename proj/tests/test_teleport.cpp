#include "psdist/teleport.hpp"

#include "psdist/blocks_analytic.hpp"
#include "psdist/closed_forms.hpp"
#include "psdist/fock_engine.hpp"

#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>

using namespace psdist;

TEST_CASE("herald-operator blocks have the closed layout") {
    const auto b0 = teleport::of_gamma_block(0);
    REQUIRE(b0.rows() == 1);
    CHECK(b0(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

    const auto b1 = teleport::of_gamma_block(1);
    REQUIRE(b1.rows() == 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            CHECK(b1(r, c) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("herald-operator blocks are rank one with trace one half") {
    for (int k = 0; k <= 20; ++k) {
        const auto m = teleport::of_gamma_block(k);
        CHECK(std::abs(m.trace() - 0.5) < 1e-13);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        CHECK(es.eigenvalues()(k) > 0.0);
        for (int i = 0; i < k; ++i)
            CHECK(std::abs(es.eigenvalues()(i)) < 1e-13);
    }
}

TEST_CASE("block fidelity reproduces the undistilled closed form") {
    const ProtocolParams p{0.5, 0.5, 0.95};
    const auto fam = blocks::block_family(p, std::nullopt);
    CHECK(std::abs(teleport::fidelity_from_blocks(fam) - 0.6) < 1e-10);
}

TEST_CASE("brute-force fidelity reproduces the undistilled closed form") {
    const auto rho =
        fock::lossy_channel_state(fock::make_tmss(0.5, FockCutoff{30}), 0.5);
    CHECK(std::abs(teleport::fidelity_oracle(rho) - 0.6) < 1e-9);
}

TEST_CASE("block and brute-force fidelities agree after subtraction") {
    const ProtocolParams p{0.5, 0.5, 0.95};
    const auto det = DetectorModel::pnr(1);
    const auto fam = blocks::block_family(p, det);
    const double f_blocks = teleport::fidelity_from_blocks(fam);

    const FockCutoff cut{30};
    const auto rho = fock::lossy_channel_state(fock::make_tmss(p.lambda, cut), p.eta);
    const auto povm = fock::povm_herald(det, cut);
    const auto cond = fock::subtract_photons(rho, p.t, povm, povm).first;
    const double f_oracle = teleport::fidelity_oracle(cond);

    CHECK(std::abs(f_blocks - f_oracle) < 1e-9);
    CHECK(f_blocks == doctest::Approx(0.621271).epsilon(1e-4));
    CHECK(f_blocks > closed::f_before(p.lambda, p.eta));
}

TEST_CASE("subtraction raises the fidelity at moderate squeezing") {
    const ProtocolParams p{0.3, 0.5, 0.95};
    const auto fam = blocks::block_family(p, DetectorModel::pnr(1));
    CHECK(teleport::fidelity_from_blocks(fam) > closed::f_before(p.lambda, p.eta));
}

TEST_CASE("fidelity rejects malformed families") {
    BlockFamily fam;
    fam.blocks.push_back(Eigen::MatrixXd::Ones(2, 2));  // wrong size for K = 0
    fam.traces = {2.0};
    CHECK_THROWS_AS((void)teleport::fidelity_from_blocks(fam), std::invalid_argument);

    BlockFamily empty;
    CHECK_THROWS_AS((void)teleport::fidelity_from_blocks(empty), std::invalid_argument);
}
