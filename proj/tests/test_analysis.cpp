#include "psdist/analysis.hpp"

#include "psdist/closed_forms.hpp"

#include "doctest.h"

#include <cmath>

using namespace psdist;
using analysis::Path;

TEST_CASE("path parsing") {
    CHECK(analysis::parse_path("analytic") == Path::Analytic);
    CHECK(analysis::parse_path("oracle") == Path::Oracle);
    CHECK(analysis::parse_path("both") == Path::Both);
    CHECK_THROWS_AS((void)analysis::parse_path("fast"), std::invalid_argument);
}

TEST_CASE("automatic cutoff grows with squeezing") {
    analysis::EvalOptions opt;
    opt.cutoff.n_max = 0;
    CHECK(analysis::resolve_cutoff(opt, 0.5) == 30);
    CHECK(analysis::resolve_cutoff(opt, 0.9) == 44);
    opt.cutoff.n_max = 35;
    CHECK(analysis::resolve_cutoff(opt, 0.9) == 35);
}

TEST_CASE("analytic point evaluation fills the closed-form values") {
    const ProtocolParams p{0.5, 0.8, 0.9};
    const auto r =
        analysis::evaluate_point(p, DetectorModel::onoff(), Path::Analytic, {});
    CHECK(r.error.empty());
    CHECK(r.path == "analytic");
    CHECK(std::abs(r.en_before - closed::en_before(0.5, 0.8)) < 1e-14);
    CHECK(std::abs(r.en_after - closed::en_onoff(0.5, 0.8, 0.9)) < 1e-14);
    CHECK(std::abs(r.p_succ - closed::p_onoff(0.5, 0.8, 0.9)) < 1e-14);
    CHECK(r.fidelity > 0.5);
    CHECK(r.k_used > 0);
    CHECK(r.cutoff == -1);  // the brute-force path never ran
}

TEST_CASE("both paths agree and report their largest gap") {
    const ProtocolParams p{0.5, 0.8, 0.9};
    const auto r = analysis::evaluate_point(p, DetectorModel::onoff(), Path::Both, {});
    CHECK(r.error.empty());
    CHECK(r.path == "both");
    CHECK(std::isfinite(r.en_after_alt));
    CHECK(std::isfinite(r.p_succ_alt));
    CHECK(std::isfinite(r.fidelity_alt));
    CHECK(r.max_path_diff < 1e-6);
    CHECK(r.cutoff == 30);
}

TEST_CASE("undistilled rows carry unit probability and the input fidelity") {
    const ProtocolParams p{0.5, 0.7, 0.95};
    const auto a = analysis::evaluate_point(p, std::nullopt, Path::Analytic, {});
    CHECK(a.p_succ == 1.0);
    CHECK(std::abs(a.fidelity - closed::f_before(0.5, 0.7)) < 1e-14);
    CHECK(a.en_after == a.en_before);

    const auto o = analysis::evaluate_point(p, std::nullopt, Path::Oracle, {});
    CHECK(o.error.empty());
    CHECK(o.p_succ == 1.0);
    CHECK(std::abs(o.en_after - a.en_before) < 1e-6);
    CHECK(std::abs(o.fidelity - a.fidelity) < 1e-8);
}

TEST_CASE("detectors without a series route to the brute force") {
    const ProtocolParams p{0.4, 0.8, 0.9};
    const auto thr = analysis::evaluate_point(p, DetectorModel::threshold(1),
                                              Path::Analytic, {});
    CHECK(thr.path == "oracle");
    CHECK(thr.error.empty());
    CHECK(std::abs(thr.en_after - closed::en_onoff(0.4, 0.8, 0.9)) < 1e-6);

    const auto lossy_det = analysis::evaluate_point(
        p, DetectorModel::pnr(1, 0.8), Path::Analytic, {});
    CHECK(lossy_det.path == "oracle");
    CHECK(lossy_det.error.empty());
    CHECK(lossy_det.p_succ > 0.0);
    const auto ideal_det =
        analysis::evaluate_point(p, DetectorModel::pnr(1), Path::Oracle, {});
    CHECK(lossy_det.p_succ < ideal_det.p_succ);  // thinning loses heralds
}

TEST_CASE("zero squeezing with a detector is a domain error") {
    const ProtocolParams p{0.0, 0.8, 0.9};
    const auto r =
        analysis::evaluate_point(p, DetectorModel::onoff(), Path::Analytic, {});
    CHECK(r.error_kind == analysis::PointError::Domain);
    CHECK_FALSE(r.error.empty());
    CHECK(r.p_succ == 0.0);
}

TEST_CASE("threshold search matches the closed form") {
    const auto r = analysis::find_tl(0.5, 1.0, DetectorModel::onoff());
    CHECK(r.found);
    CHECK(r.method == "bisection");
    CHECK(std::abs(r.tl - closed::tl_onoff_closed(0.5)) < 1e-6);
    CHECK(r.bracket_lo < r.tl);
    CHECK(r.tl < r.bracket_hi);
    CHECK(r.residual < 1e-9);
}

TEST_CASE("threshold search for photon counting at low squeezing") {
    const auto r1 = analysis::find_tl(0.01, 1.0, DetectorModel::pnr(1));
    const auto r2 = analysis::find_tl(0.01, 1.0, DetectorModel::pnr(2));
    const auto r3 = analysis::find_tl(0.01, 1.0, DetectorModel::pnr(3));
    REQUIRE(r1.found);
    REQUIRE(r2.found);
    REQUIRE(r3.found);
    CHECK(std::abs(r1.tl - 0.5012688212919447) < 1e-6);
    CHECK(std::abs(r2.tl - 0.3344618326149741) < 1e-6);
    CHECK(std::abs(r3.tl - 0.25095244912592973) < 1e-6);
}

TEST_CASE("optimal squeezing search finds the interior peak") {
    const auto r = analysis::find_lambda_opt(1.0, 0.9, DetectorModel::onoff());
    CHECK_FALSE(r.plateau);
    CHECK(std::abs(r.lambda_opt - 0.959707430632042) < 5e-5);
    CHECK(std::abs(r.en_max - 3.43233296157128) < 1e-6);
    CHECK(r.en_max > closed::en_onoff(0.999, 1.0, 0.9));
}

TEST_CASE("search guards reject bad requests") {
    CHECK_THROWS_AS((void)analysis::find_tl(0.0, 1.0, DetectorModel::onoff()),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)analysis::find_lambda_opt(1.0, 1.0, DetectorModel::onoff()),
                    std::invalid_argument);
}

TEST_CASE("sweeps are ordered and deterministic") {
    analysis::SweepSpec spec;
    spec.lambdas = {0.2, 0.5};
    spec.etas = {0.8};
    spec.ts = {0.9};
    spec.detectors = {DetectorModel::onoff(), DetectorModel::pnr(1)};
    const auto rows = analysis::sweep(spec);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].det->label() == "onoff");
    CHECK(rows[0].params.lambda == 0.2);
    CHECK(rows[1].params.lambda == 0.5);
    CHECK(rows[2].det->label() == "pnr:1");

    const auto again = analysis::sweep(spec);
    CHECK(io::to_csv(analysis::points_table(rows)) ==
          io::to_csv(analysis::points_table(again)));

    analysis::SweepSpec empty;
    CHECK_THROWS_AS((void)analysis::sweep(empty), std::invalid_argument);
}

TEST_CASE("bundled figure datasets have the frozen shapes") {
    const auto f2 = analysis::figure_table("fig2");
    CHECK(f2.columns.front() == "kind");
    CHECK(f2.rows.size() == 5 * 99 + 90);

    const auto f4 = analysis::figure_table("fig4");
    CHECK(f4.rows.size() == 4 * 99);

    const auto f5 = analysis::figure_table("fig5");
    CHECK(f5.rows.size() == 5 * (99 + 41));

    CHECK_THROWS_AS((void)analysis::figure_table("fig7"), std::invalid_argument);
}
