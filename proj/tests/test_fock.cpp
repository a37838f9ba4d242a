#include "psdist/fock_engine.hpp"

#include "psdist/closed_forms.hpp"
#include "psdist/teleport.hpp"

#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>

using namespace psdist;

TEST_CASE("squeezed-vacuum amplitudes and truncation deficit") {
    const FockCutoff cut{10};
    const auto s = fock::make_tmss(0.5, cut);
    CHECK(s.coeff(0, 0) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
    CHECK(s.coeff(3, 3) ==
          doctest::Approx(std::sqrt(0.75) * std::pow(0.5, 3)).epsilon(1e-14));
    CHECK(s.coeff(2, 3) == 0.0);
    CHECK(s.norm_deficit == doctest::Approx(std::pow(0.5, 22)).epsilon(1e-10));
    CHECK_THROWS_AS((void)fock::make_tmss(1.0, cut), std::invalid_argument);
    CHECK_THROWS_AS((void)fock::make_tmss(-0.2, cut), std::invalid_argument);
}

TEST_CASE("lossless squeezed vacuum has the known entanglement") {
    const auto s = fock::make_tmss(0.5, FockCutoff{40});
    const auto rho = fock::lossy_channel_state(s, 1.0);
    const auto fam = fock::partial_transpose_blocks(rho);
    const auto neg = fock::negativity_eigen(fam);
    CHECK(std::abs(neg.log_negativity - std::log2(3.0)) < 1e-9);
    CHECK(teleport::fidelity_oracle(rho) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("beamsplitter coefficients match their formula") {
    const double tau = 0.7;
    const auto bs = fock::bs_coeffs(tau, FockCutoff{6});
    CHECK(bs.xi(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bs.xi(1, 1) == doctest::Approx(-std::sqrt(1.0 - tau)).epsilon(1e-14));
    CHECK(bs.xi(3, 1) ==
          doctest::Approx(-std::sqrt(3.0) * tau * std::sqrt(1.0 - tau)).epsilon(1e-14));
    CHECK(bs.xi(2, 3) == 0.0);  // cannot reflect more photons than present
}

TEST_CASE("beamsplitter unitary is orthogonal and reproduces the coefficients") {
    const double tau = 0.7;
    const FockCutoff cut{6};
    const auto blocks = fock::bs_unitary(tau, cut);
    REQUIRE(blocks.size() == 13);  // one per total photon number
    for (const auto& u : blocks) {
        const Eigen::MatrixXd gram = u.transpose() * u;
        const double dev =
            (gram - Eigen::MatrixXd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
        CHECK(dev < 1e-12);
    }
    // acting on |n, 0>, column n of the total-photon-n block gives xi(n, m)
    const auto bs = fock::bs_coeffs(tau, cut);
    const int n = 4;
    for (int m = 0; m <= n; ++m)
        CHECK(blocks[n](n - m, n) == doctest::Approx(bs.xi(n, m)).epsilon(1e-12));
}

TEST_CASE("detector elements are complete") {
    const FockCutoff cut{12};
    const auto on = fock::make_povm(DetectorModel::onoff(0.6), "on", cut);
    const auto off = fock::make_povm(DetectorModel::onoff(0.6), "off", cut);
    CHECK(((on + off).array() - 1.0).abs().maxCoeff() < 1e-12);

    DetectorModel pnr = DetectorModel::pnr(1);
    pnr.efficiency = 0.7;
    Eigen::VectorXd total = Eigen::VectorXd::Zero(cut.dim());
    for (int c = 0; c <= cut.n_max; ++c)
        total += fock::make_povm(pnr, std::to_string(c), cut);
    CHECK((total.array() - 1.0).abs().maxCoeff() < 1e-12);

    DetectorModel thr = DetectorModel::threshold(2);
    thr.efficiency = 0.8;
    const auto ton = fock::make_povm(thr, "on", cut);
    const auto toff = fock::make_povm(thr, "off", cut);
    CHECK(((ton + toff).array() - 1.0).abs().maxCoeff() < 1e-12);

    // threshold at one photon is the on-off detector
    DetectorModel thr1 = DetectorModel::threshold(1);
    thr1.efficiency = 0.9;
    const auto a = fock::make_povm(thr1, "on", cut);
    const auto b = fock::make_povm(DetectorModel::onoff(0.9), "on", cut);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS((void)fock::make_povm(DetectorModel::pnr(1), "99", cut),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)fock::make_povm(DetectorModel::pnr(1), "x", cut),
                    std::invalid_argument);
}

TEST_CASE("loss keeps the state physical and photon-number correlated") {
    const auto s = fock::make_tmss(0.6, FockCutoff{25});
    const auto rho = fock::lossy_channel_state(s, 0.7);
    CHECK(rho.trace() == doctest::Approx(1.0 - s.norm_deficit).epsilon(1e-12));
    CHECK(fock::min_eigenvalue(rho) > -1e-10);
    CHECK_NOTHROW((void)fock::partial_transpose_blocks(rho));

    // too aggressive a truncation is refused rather than silently wrong
    const auto heavy = fock::make_tmss(0.9, FockCutoff{10});
    CHECK_THROWS_AS((void)fock::lossy_channel_state(heavy, 0.7), ConvergenceError);
}

TEST_CASE("subtraction heralding probability matches the closed form") {
    const FockCutoff cut{30};
    const auto pure = fock::lossy_channel_state(fock::make_tmss(0.5, cut), 1.0);
    const auto povm = fock::povm_herald(DetectorModel::onoff(), cut);
    const auto [cond, p] = fock::subtract_photons(pure, 0.5, povm, povm);
    CHECK(p == doctest::Approx(3.0 / 35.0).epsilon(1e-9));
    CHECK(cond.trace() == doctest::Approx(p).epsilon(1e-12));
    CHECK(fock::min_eigenvalue(cond) > -1e-10);

    // a fully transmitting tap never fires the detector
    const auto [empty, p0] = fock::subtract_photons(pure, 1.0, povm, povm);
    CHECK(p0 == 0.0);
    CHECK_THROWS_AS((void)fock::subtract_photons(pure, 0.0, povm, povm),
                    std::invalid_argument);
}

TEST_CASE("threshold-one conditioning equals on-off conditioning") {
    const FockCutoff cut{20};
    const auto rho = fock::lossy_channel_state(fock::make_tmss(0.6, cut), 0.8);
    const auto povm_a = fock::povm_herald(DetectorModel::onoff(), cut);
    const auto povm_b = fock::povm_herald(DetectorModel::threshold(1), cut);
    const auto [ca, pa] = fock::subtract_photons(rho, 0.9, povm_a, povm_a);
    const auto [cb, pb] = fock::subtract_photons(rho, 0.9, povm_b, povm_b);
    CHECK(std::abs(pa - pb) < 1e-15);
    CHECK((ca.mat - cb.mat).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("entanglement converges under deeper truncation") {
    auto en_at = [](int n_max) {
        const FockCutoff cut{n_max};
        const auto rho = fock::lossy_channel_state(fock::make_tmss(0.7, cut), 0.5);
        const auto povm = fock::povm_herald(DetectorModel::onoff(), cut);
        const auto cond = fock::subtract_photons(rho, 0.9, povm, povm).first;
        return fock::negativity_eigen(fock::partial_transpose_blocks(cond))
            .log_negativity;
    };
    // the conditional trace is ~1e-3 here, so the truncation tail is
    // amplified by 1/p; what matters is that the error shrinks fast
    const double d25 = std::abs(en_at(25) - en_at(35));
    const double d30 = std::abs(en_at(30) - en_at(35));
    CHECK(d30 < d25);
    CHECK(d30 < 1e-6);
}
