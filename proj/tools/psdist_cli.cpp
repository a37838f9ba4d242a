// psdist_cli.cpp - command-line front end: single-point evaluations, grid
// sweeps, threshold and optimal-squeezing searches, figure datasets, and the
// built-in validation suite. Output is byte-deterministic CSV or JSON.

#include "psdist/acceptance.hpp"
#include "psdist/analysis.hpp"
#include "psdist/closed_forms.hpp"
#include "psdist/params.hpp"
#include "psdist/table_io.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace psdist;

struct CommonOpts {
    double lambda = 0.5;
    double eta = 1.0;
    double t = 0.95;
    std::string detector = "onoff";
    double det_eff = 1.0;
    int cutoff = 30;  // 0 picks the smallest adequate cutoff
    int kmax = 200;
    double tol = 1e-14;
    std::string path = "analytic";
    std::string out = "csv";
    std::string output;  // empty writes to stdout
};

int parse_count(const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("detector: bad count '" + s + "'");
    }
    if (used != s.size() || v < 0)
        throw std::invalid_argument("detector: bad count '" + s + "'");
    return v;
}

std::optional<DetectorModel> parse_detector(const std::string& s, double eff) {
    if (s == "none") return std::nullopt;
    DetectorModel det;
    if (s == "onoff") det = DetectorModel::onoff();
    else if (s.rfind("pnr:", 0) == 0) det = DetectorModel::pnr(parse_count(s.substr(4)));
    else if (s.rfind("threshold:", 0) == 0)
        det = DetectorModel::threshold(parse_count(s.substr(10)));
    else
        throw std::invalid_argument(
            "detector must be onoff, pnr:<count>, threshold:<count>, or none");
    det.efficiency = eff;
    det.validate();
    return det;
}

// "a,b,c" with range tokens "start:stop:count" (count evenly spaced values,
// endpoints included)
std::vector<double> parse_grid(const std::string& s, const std::string& flag) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = std::min(s.find(',', pos), s.size());
        const std::string tok = s.substr(pos, comma - pos);
        pos = comma + 1;
        if (tok.empty())
            throw std::invalid_argument(flag + ": empty grid entry");
        const std::size_t c1 = tok.find(':');
        try {
            if (c1 == std::string::npos) {
                std::size_t used = 0;
                out.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
                continue;
            }
            const std::size_t c2 = tok.find(':', c1 + 1);
            if (c2 == std::string::npos) throw std::invalid_argument(tok);
            const double lo = std::stod(tok.substr(0, c1));
            const double hi = std::stod(tok.substr(c1 + 1, c2 - c1 - 1));
            const int n = parse_count(tok.substr(c2 + 1));
            if (n < 1) throw std::invalid_argument(tok);
            if (n == 1) {
                out.push_back(lo);
                continue;
            }
            for (int i = 0; i < n; ++i)
                out.push_back(lo + (hi - lo) * double(i) / double(n - 1));
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument(flag + ": bad grid entry '" + tok +
                                        "' (want value or start:stop:count)");
        }
    }
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = std::min(s.find(',', pos), s.size());
        out.push_back(s.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

analysis::EvalOptions make_options(const CommonOpts& c) {
    analysis::EvalOptions o;
    o.cutoff = FockCutoff{c.cutoff};
    o.k_cap = c.kmax;
    o.series.term_rel_tol = c.tol;
    return o;
}

using Meta = std::vector<std::pair<std::string, io::Cell>>;

Meta base_meta(const std::string& command, const CommonOpts& c) {
    Meta m;
    m.emplace_back("command", command);
    m.emplace_back("version", std::string("1.0.0"));
    m.emplace_back("path", c.path);
    m.emplace_back("cutoff", static_cast<long long>(c.cutoff));
    m.emplace_back("kmax", static_cast<long long>(c.kmax));
    m.emplace_back("tol", c.tol);
    return m;
}

void emit(const io::Table& tbl, const Meta& meta, const CommonOpts& c) {
    const std::string text =
        (c.out == "json") ? io::to_json(tbl, meta) : io::to_csv(tbl);
    if (c.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f) throw std::invalid_argument("output: cannot open " + c.output);
    f << text;
}

// exit code for single-point commands: bad requests beat convergence trouble
int point_exit(const analysis::PointResult& r) {
    if (r.error_kind == analysis::PointError::Domain) {
        std::cerr << "error: " << r.error << "\n";
        return 2;
    }
    if (r.error_kind == analysis::PointError::Convergence) {
        std::cerr << "error: " << r.error << "\n";
        return 3;
    }
    return 0;
}

int run_point(const std::string& command, const CommonOpts& c, bool with_det) {
    const auto det = with_det ? parse_detector(c.detector, c.det_eff)
                              : std::optional<DetectorModel>{};
    const ProtocolParams p{c.lambda, c.eta, c.t};
    const auto r =
        analysis::evaluate_point(p, det, analysis::parse_path(c.path), make_options(c));
    auto meta = base_meta(command, c);
    meta.emplace_back("lambda", c.lambda);
    meta.emplace_back("eta", c.eta);
    if (with_det) {
        meta.emplace_back("t", c.t);
        meta.emplace_back("detector", det ? det->label() : std::string("none"));
    }
    emit(analysis::points_table({r}), meta, c);
    return point_exit(r);
}

int run_fidelity(const CommonOpts& c) {
    const auto det = parse_detector(c.detector, c.det_eff);
    const ProtocolParams p{c.lambda, c.eta, c.t};
    const auto r =
        analysis::evaluate_point(p, det, analysis::parse_path(c.path), make_options(c));
    io::Table tbl;
    tbl.columns = {"lambda", "eta", "t", "detector", "path",
                   "f_before", "f_after", "p_succ", "error"};
    auto num = [](double v) -> io::Cell {
        if (std::isnan(v)) return std::monostate{};
        return v;
    };
    tbl.rows.push_back({c.lambda, c.eta, c.t,
                        det ? det->label() : std::string("none"), r.path,
                        num(closed::f_before(c.lambda, c.eta)), num(r.fidelity),
                        num(r.p_succ),
                        r.error.empty() ? io::Cell{std::monostate{}}
                                        : io::Cell{r.error}});
    auto meta = base_meta("fidelity", c);
    meta.emplace_back("lambda", c.lambda);
    meta.emplace_back("eta", c.eta);
    meta.emplace_back("t", c.t);
    meta.emplace_back("detector", det ? det->label() : std::string("none"));
    emit(tbl, meta, c);
    return point_exit(r);
}

int run_sweep(const CommonOpts& c, const std::string& lambdas,
              const std::string& etas, const std::string& ts,
              const std::string& detectors) {
    analysis::SweepSpec spec;
    spec.lambdas = parse_grid(lambdas, "--lambda");
    spec.etas = parse_grid(etas, "--eta");
    spec.ts = parse_grid(ts, "--t");
    for (const auto& name : split_list(detectors))
        spec.detectors.push_back(parse_detector(name, c.det_eff));
    spec.path = analysis::parse_path(c.path);
    spec.options = make_options(c);
    const auto points = analysis::sweep(spec);
    auto meta = base_meta("sweep", c);
    meta.emplace_back("lambda", lambdas);
    meta.emplace_back("eta", etas);
    meta.emplace_back("t", ts);
    meta.emplace_back("detector", detectors);
    meta.emplace_back("rows", static_cast<long long>(points.size()));
    emit(analysis::points_table(points), meta, c);
    return 0;
}

int run_tl(const CommonOpts& c) {
    const auto det = parse_detector(c.detector, c.det_eff);
    if (!det) throw std::invalid_argument("tl: a detector is required");
    const auto r = analysis::find_tl(c.lambda, c.eta, *det, make_options(c));
    io::Table tbl;
    tbl.columns = {"lambda", "eta",      "detector",   "tl",   "method",
                   "bracket_lo", "bracket_hi", "residual", "found", "note"};
    auto num = [](double v) -> io::Cell {
        if (std::isnan(v)) return std::monostate{};
        return v;
    };
    tbl.rows.push_back({c.lambda, c.eta, det->label(), num(r.tl), r.method,
                        num(r.bracket_lo), num(r.bracket_hi), num(r.residual),
                        static_cast<long long>(r.found ? 1 : 0),
                        r.note.empty() ? io::Cell{std::monostate{}}
                                       : io::Cell{r.note}});
    auto meta = base_meta("tl", c);
    meta.emplace_back("lambda", c.lambda);
    meta.emplace_back("eta", c.eta);
    meta.emplace_back("detector", det->label());
    emit(tbl, meta, c);
    return 0;
}

int run_lambda_opt(const CommonOpts& c) {
    const auto det = parse_detector(c.detector, c.det_eff);
    if (!det) throw std::invalid_argument("lambda-opt: a detector is required");
    const auto r = analysis::find_lambda_opt(c.eta, c.t, *det, make_options(c));
    io::Table tbl;
    tbl.columns = {"eta", "t", "detector", "lambda_opt", "en_max", "plateau"};
    tbl.rows.push_back({c.eta, c.t, det->label(), r.lambda_opt, r.en_max,
                        static_cast<long long>(r.plateau ? 1 : 0)});
    auto meta = base_meta("lambda-opt", c);
    meta.emplace_back("eta", c.eta);
    meta.emplace_back("t", c.t);
    meta.emplace_back("detector", det->label());
    emit(tbl, meta, c);
    return 0;
}

int run_figure(const CommonOpts& c, const std::string& name) {
    const auto tbl = analysis::figure_table(name, make_options(c));
    auto meta = base_meta("figure", c);
    meta.emplace_back("figure", name);
    meta.emplace_back("rows", static_cast<long long>(tbl.rows.size()));
    emit(tbl, meta, c);
    return 0;
}

int run_validate(double tighten) {
    const auto checks = acceptance::run_acceptance({tighten});
    int failed = 0;
    for (const auto& r : checks) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  ("
                  << r.detail << ")\n";
        if (!r.pass) ++failed;
    }
    std::cout << (checks.size() - failed) << "/" << checks.size()
              << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

void add_output_flags(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--out", c.out, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", c.output, "write to this file instead of stdout");
}

void add_numeric_flags(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--cutoff", c.cutoff,
                    "max photon number per mode for the brute-force path; 0 auto")
        ->check(CLI::Range(0, 60));
    sub->add_option("--kmax", c.kmax, "photon-pair block cap")
        ->check(CLI::Range(1, 2000));
    sub->add_option("--tol", c.tol, "series term tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--path", c.path, "computation path")
        ->check(CLI::IsMember({"analytic", "oracle", "both"}));
}

void add_detector_flags(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--detector", c.detector,
                    "onoff, pnr:<count>, or threshold:<count>");
    sub->add_option("--det-eff", c.det_eff, "detector efficiency")
        ->check(CLI::Range(0.0, 1.0));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "entanglement distillation of lossy two-mode squeezed vacuum by "
        "photon subtraction: entanglement, success probability, and "
        "teleportation fidelity through closed forms and a brute-force "
        "Fock-space check"};
    app.require_subcommand(1);

    CommonOpts c;
    std::string sweep_lambdas = "0.1:0.9:9";
    std::string sweep_etas = "1";
    std::string sweep_ts = "0.95";
    std::string sweep_dets = "onoff";
    std::string figure_name;
    double tighten = 1.0;

    auto* before = app.add_subcommand(
        "before", "entanglement and fidelity of the lossy state, no subtraction");
    before->add_option("--lambda", c.lambda, "squeezing parameter tanh(r)");
    before->add_option("--eta", c.eta, "channel transmittance");
    add_numeric_flags(before, c);
    add_output_flags(before, c);

    auto* distill = app.add_subcommand(
        "distill", "one distillation point: entanglement, probability, fidelity");
    distill->add_option("--lambda", c.lambda, "squeezing parameter tanh(r)");
    distill->add_option("--eta", c.eta, "channel transmittance");
    distill->add_option("--t", c.t, "subtraction tap transmittance");
    add_detector_flags(distill, c);
    add_numeric_flags(distill, c);
    add_output_flags(distill, c);

    auto* fidelity = app.add_subcommand(
        "fidelity", "coherent-state teleportation fidelity before and after");
    fidelity->add_option("--lambda", c.lambda, "squeezing parameter tanh(r)");
    fidelity->add_option("--eta", c.eta, "channel transmittance");
    fidelity->add_option("--t", c.t, "subtraction tap transmittance");
    add_detector_flags(fidelity, c);
    add_numeric_flags(fidelity, c);
    add_output_flags(fidelity, c);

    auto* sweep = app.add_subcommand("sweep", "evaluate a full parameter grid");
    sweep->add_option("--lambda", sweep_lambdas,
                      "squeezing grid: list and/or start:stop:count");
    sweep->add_option("--eta", sweep_etas, "transmittance grid");
    sweep->add_option("--t", sweep_ts, "tap transmittance grid");
    sweep->add_option("--detector", sweep_dets,
                      "comma list of onoff, pnr:<count>, threshold:<count>, none");
    sweep->add_option("--det-eff", c.det_eff, "detector efficiency")
        ->check(CLI::Range(0.0, 1.0));
    add_numeric_flags(sweep, c);
    add_output_flags(sweep, c);

    auto* tl = app.add_subcommand(
        "tl", "smallest tap transmittance where subtraction still helps");
    tl->add_option("--lambda", c.lambda, "squeezing parameter tanh(r)");
    tl->add_option("--eta", c.eta, "channel transmittance");
    add_detector_flags(tl, c);
    add_numeric_flags(tl, c);
    add_output_flags(tl, c);

    auto* lopt = app.add_subcommand(
        "lambda-opt", "squeezing that maximizes the distilled entanglement");
    lopt->add_option("--eta", c.eta, "channel transmittance");
    lopt->add_option("--t", c.t, "subtraction tap transmittance");
    add_detector_flags(lopt, c);
    add_numeric_flags(lopt, c);
    add_output_flags(lopt, c);

    auto* figure = app.add_subcommand("figure", "one of the bundled datasets");
    figure->add_option("name", figure_name, "fig2|fig3|fig4|fig5|fig6|fig8")
        ->required();
    add_numeric_flags(figure, c);
    add_output_flags(figure, c);

    auto* validate =
        app.add_subcommand("validate", "run the built-in validation suite");
    validate->add_option("--tighten", tighten,
                         "scale factor on every quantitative tolerance")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (before->parsed()) return run_point("before", c, false);
        if (distill->parsed()) return run_point("distill", c, true);
        if (fidelity->parsed()) return run_fidelity(c);
        if (sweep->parsed())
            return run_sweep(c, sweep_lambdas, sweep_etas, sweep_ts, sweep_dets);
        if (tl->parsed()) return run_tl(c);
        if (lopt->parsed()) return run_lambda_opt(c);
        if (figure->parsed()) return run_figure(c, figure_name);
        if (validate->parsed()) return run_validate(tighten);
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
