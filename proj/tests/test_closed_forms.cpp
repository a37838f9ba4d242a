#include "psdist/closed_forms.hpp"

#include "doctest.h"

#include <cmath>

using namespace psdist;

namespace {
bool near(double x, double v, double tol) { return std::abs(x - v) < tol; }
}  // namespace

TEST_CASE("undistilled entanglement reference values") {
    CHECK(near(closed::en_before(0.5, 0.5), 0.5849625007211562, 1e-15));
    CHECK(near(closed::en_before(0.5, 1.0), std::log2(3.0), 1e-15));
    CHECK(closed::en_before(0.0, 0.7) == 0.0);
}

TEST_CASE("undistilled entanglement equals the covariance-matrix value") {
    for (double lam : {0.05, 0.3, 0.55, 0.8, 0.95})
        for (double eta : {0.05, 0.4, 0.75, 1.0})
            CHECK(near(closed::en_before(lam, eta), closed::gaussian_en(lam, eta),
                       1e-12));
}

TEST_CASE("symplectic eigenvalue stays below one for entangled inputs") {
    CHECK(closed::gaussian_nu_tilde(0.5, 0.7) < 1.0);
    CHECK(near(closed::gaussian_nu_tilde(0.5, 1.0), 1.0 / 3.0, 1e-14));
}

TEST_CASE("lossless on-off forms reduce to the pure-state forms") {
    for (double lam : {0.2, 0.5, 0.8})
        for (double t : {0.5, 0.9}) {
            CHECK(near(closed::en_onoff(lam, 1.0, t), closed::en_pure(lam, t), 1e-14));
            CHECK(near(closed::p_onoff(lam, 1.0, t), closed::p_pure(lam, t), 1e-14));
        }
}

TEST_CASE("pure-state reference values") {
    CHECK(near(closed::en_pure(0.5, 0.9), 2.0599639376493042, 1e-13));
    CHECK(near(closed::p_pure(0.5, 0.5), 3.0 / 35.0, 1e-15));
    CHECK(near(closed::en_pure(0.99999, 0.9), 3.32199983227464, 1e-3));
    CHECK(near(closed::en_pure(0.999, 0.9), 3.32892911367349, 1e-12));
}

TEST_CASE("photon-counting reference values") {
    CHECK(near(closed::p_pnr(0.5, 0.5, 0.95, 1), 3.2736240024956085e-4, 1e-16));
    CHECK(near(closed::en_pnr(0.5, 0.5, 0.95, 1), 0.7222151676176603, 1e-13));
}

TEST_CASE("teleportation fidelity of the undistilled state") {
    CHECK(near(closed::f_before(0.5, 0.5), 0.6, 1e-15));
    CHECK(near(closed::f_before(0.5, 1.0), 0.75, 1e-15));
    CHECK(near(closed::f_before(0.0, 0.5), 0.5, 1e-15));  // vacuum benchmark
}

TEST_CASE("closed-form distillation threshold values") {
    CHECK(near(closed::tl_onoff_closed(0.5), 0.748228107591009, 1e-12));
    CHECK(near(closed::tl_onoff_closed(0.9), 0.960225535167047, 1e-12));
    CHECK(near(closed::tl_onoff_closed(0.001), 0.500375250070234, 1e-8));
    CHECK(near(closed::tl_onoff_closed(0.999), 0.999633661342661, 1e-10));
    CHECK(closed::tl_onoff_closed(0.3) < closed::tl_onoff_closed(0.5));
    CHECK(closed::tl_onoff_closed(0.5) < closed::tl_onoff_closed(0.7));
}

TEST_CASE("mixed-strategy probability reduces to on-off at threshold one") {
    for (double lam : {0.1, 0.5, 0.9})
        for (double eta : {0.5, 1.0})
            for (double t : {0.7, 0.95})
                CHECK(near(closed::p_mixed(lam, eta, t, 1),
                           closed::p_onoff(lam, eta, t), 1e-12));
}

TEST_CASE("mixed-strategy probability reference values") {
    CHECK(near(closed::p_mixed(0.99, 0.5, 0.95, 1), 0.39504797787159659, 1e-12));
    // the series has to hold up even where it needs ~1e5 terms
    CHECK(near(closed::p_mixed(0.9999, 0.5, 0.95, 1),
               closed::p_onoff(0.9999, 0.5, 0.95), 1e-9));
    CHECK(closed::p_mixed(0.9999, 0.5, 0.95, 1) > 0.98);
    const double m1 = closed::p_mixed(0.8, 0.7, 0.9, 1);
    const double m2 = closed::p_mixed(0.8, 0.7, 0.9, 2);
    const double m3 = closed::p_mixed(0.8, 0.7, 0.9, 3);
    CHECK(m1 > m2);
    CHECK(m2 > m3);
}

TEST_CASE("closed forms reject out-of-domain parameters") {
    CHECK_THROWS_AS((void)closed::en_before(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)closed::en_before(-0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)closed::en_before(0.5, 1.5), std::invalid_argument);
    CHECK_THROWS_AS((void)closed::en_onoff(0.0, 0.5, 0.9), std::invalid_argument);
    CHECK_THROWS_AS((void)closed::p_onoff(0.5, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)closed::p_pnr(0.5, 0.5, 0.95, -1), std::invalid_argument);
    CHECK_THROWS_AS((void)closed::p_mixed(0.5, 0.5, 0.95, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)closed::tl_onoff_closed(0.0), std::invalid_argument);
}
