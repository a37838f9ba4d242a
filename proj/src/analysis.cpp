#include "psdist/analysis.hpp"

#include "psdist/blocks_analytic.hpp"
#include "psdist/closed_forms.hpp"
#include "psdist/fock_engine.hpp"
#include "psdist/teleport.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace psdist::analysis {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool needs_oracle(const DetectorModel& det) {
    return det.kind == DetectorKind::Threshold || !det.ideal();
}

double en_after_closed(const ProtocolParams& p, const DetectorModel& det) {
    if (det.kind == DetectorKind::OnOff) return closed::en_onoff(p.lambda, p.eta, p.t);
    if (det.kind == DetectorKind::Pnr) return closed::en_pnr(p.lambda, p.eta, p.t, det.count);
    throw std::invalid_argument("en_after_closed: no closed form for this detector");
}

double p_succ_closed(const ProtocolParams& p, const DetectorModel& det) {
    if (det.kind == DetectorKind::OnOff) return closed::p_onoff(p.lambda, p.eta, p.t);
    if (det.kind == DetectorKind::Pnr) return closed::p_pnr(p.lambda, p.eta, p.t, det.count);
    throw std::invalid_argument("p_succ_closed: no closed form for this detector");
}

struct OracleOut {
    double en = kNaN, p = kNaN, fid = kNaN;
    long long cutoff = -1;
    double deficit = kNaN;
    long long k_used = -1;
    std::string note;  // nonempty marks a numerically empty heralding branch
};

OracleOut run_oracle(const ProtocolParams& p, const std::optional<DetectorModel>& det,
                     const EvalOptions& opt) {
    if (det && p.lambda == 0.0)
        throw std::invalid_argument("no conditional state at lambda = 0");
    const FockCutoff cut{resolve_cutoff(opt, p.lambda)};
    OracleOut out;
    out.cutoff = cut.n_max;
    auto rho = fock::lossy_channel_state(fock::make_tmss(p.lambda, cut), p.eta,
                                         opt.max_deficit);
    out.deficit = rho.norm_deficit;
    if (det) {
        const auto povm = fock::povm_herald(*det, cut);
        auto [cond, prob] = fock::subtract_photons(rho, p.t, povm, povm);
        out.p = prob;
        if (prob < opt.prob_floor) {
            out.note = "heralding branch numerically empty";
            return out;
        }
        rho = std::move(cond);
    } else {
        out.p = 1.0;
    }
    const auto fam = fock::partial_transpose_blocks(rho);
    out.k_used = fam.max_k();
    out.en = fock::negativity_eigen(fam).log_negativity;
    out.fid = teleport::fidelity_oracle(rho);
    return out;
}

void record_error(PointResult& r, const std::string& what, PointError kind) {
    if (r.error.empty()) r.error = what;
    else r.error += "; " + what;
    if (kind == PointError::Convergence || r.error_kind == PointError::None)
        r.error_kind = kind;
}

double nan_max(double a, double b) {
    if (std::isnan(a)) return b;
    if (std::isnan(b)) return a;
    return std::max(a, b);
}

}  // namespace

Path parse_path(const std::string& s) {
    if (s == "analytic") return Path::Analytic;
    if (s == "oracle") return Path::Oracle;
    if (s == "both") return Path::Both;
    throw std::invalid_argument("path must be analytic, oracle, or both");
}

const char* path_name(Path p) {
    switch (p) {
        case Path::Analytic: return "analytic";
        case Path::Oracle: return "oracle";
        case Path::Both: return "both";
    }
    return "";
}

int resolve_cutoff(const EvalOptions& opt, double lambda) {
    if (opt.cutoff.n_max > 0) return opt.cutoff.n_max;
    if (lambda <= 0.0) return 30;
    // smallest n_max with lambda^{2(n_max+1)} <= max_deficit, within bounds
    const double need = std::log(opt.max_deficit) / (2.0 * std::log(lambda));
    const int n = int(std::ceil(need)) - 1;
    return std::clamp(n, 30, 44);
}

PointResult evaluate_point(const ProtocolParams& p, const std::optional<DetectorModel>& det,
                           Path path, const EvalOptions& opt) {
    PointResult r;
    r.params = p;
    r.det = det;
    r.path = path_name(path);
    try {
        p.validate();
        if (det) det->validate();
    } catch (const std::exception& e) {
        record_error(r, e.what(), PointError::Domain);
        return r;
    }

    // threshold detectors and lossy detectors only exist on the oracle path
    Path effective = path;
    if (det && needs_oracle(*det) && path != Path::Oracle) effective = Path::Oracle;
    r.path = path_name(effective);

    r.en_before = closed::en_before(p.lambda, p.eta);

    const bool want_analytic = effective != Path::Oracle;
    const bool want_oracle = effective != Path::Analytic;

    if (want_analytic) {
        if (!det) {
            r.en_after = r.en_before;
            r.p_succ = 1.0;
            r.fidelity = closed::f_before(p.lambda, p.eta);
        } else {
            try {
                r.p_succ = p_succ_closed(p, *det);
                r.en_after = en_after_closed(p, *det);
            } catch (const ConvergenceError& e) {
                record_error(r, e.what(), PointError::Convergence);
            } catch (const std::exception& e) {
                record_error(r, e.what(), PointError::Domain);
            }
            // fidelity has no closed form after subtraction; use the blocks
            try {
                const auto fam = blocks::block_family(p, det, opt.eps_k, opt.k_cap,
                                                      opt.series);
                r.k_used = fam.max_k();
                r.tail_mass = fam.tail_mass;
                r.fidelity = teleport::fidelity_from_blocks(fam);
            } catch (const ConvergenceError& e) {
                record_error(r, e.what(), PointError::Convergence);
            } catch (const std::exception& e) {
                record_error(r, e.what(), PointError::Domain);
            }
        }
    }

    if (want_oracle) {
        try {
            const auto o = run_oracle(p, det, opt);
            r.cutoff = o.cutoff;
            r.norm_deficit = o.deficit;
            if (effective == Path::Both) {
                r.en_after_alt = o.en;
                r.p_succ_alt = o.p;
                r.fidelity_alt = o.fid;
            } else {
                r.en_after = o.en;
                r.p_succ = o.p;
                r.fidelity = o.fid;
                r.k_used = o.k_used;
            }
            if (!o.note.empty()) record_error(r, o.note, PointError::Convergence);
        } catch (const ConvergenceError& e) {
            record_error(r, e.what(), PointError::Convergence);
        } catch (const std::exception& e) {
            record_error(r, e.what(), PointError::Domain);
        }
    }

    if (effective == Path::Both) {
        double d = kNaN;
        if (!std::isnan(r.en_after) && !std::isnan(r.en_after_alt))
            d = nan_max(d, std::abs(r.en_after - r.en_after_alt));
        if (!std::isnan(r.p_succ) && !std::isnan(r.p_succ_alt))
            d = nan_max(d, std::abs(r.p_succ - r.p_succ_alt));
        if (!std::isnan(r.fidelity) && !std::isnan(r.fidelity_alt))
            d = nan_max(d, std::abs(r.fidelity - r.fidelity_alt));
        r.max_path_diff = d;
    }
    return r;
}

BoundResult find_tl(double lambda, double eta, const DetectorModel& det,
                    const EvalOptions& opt) {
    if (!(lambda > 0.0) || lambda >= 1.0)
        throw std::invalid_argument("find_tl: lambda must be in (0,1)");
    if (!(eta >= 0.0) || eta > 1.0)
        throw std::invalid_argument("find_tl: eta must be in [0,1]");
    det.validate();

    const double target = closed::en_before(lambda, eta);
    auto gain = [&](double t) {
        ProtocolParams q{lambda, eta, t};
        if (!needs_oracle(det)) return en_after_closed(q, det) - target;
        const auto o = run_oracle(q, det, opt);
        if (!o.note.empty())
            throw ConvergenceError("find_tl: " + o.note);
        return o.en - target;
    };

    BoundResult out;
    out.method = "bisection";

    const double t_floor = 0.05, t_hi = 0.999999;
    const int n_coarse = 20;
    std::vector<double> ts(n_coarse), gs(n_coarse);
    for (int i = 0; i < n_coarse; ++i) {
        ts[i] = t_floor + (t_hi - t_floor) * double(i) / double(n_coarse - 1);
        gs[i] = gain(ts[i]);
    }
    for (int i = 0; i + 1 < n_coarse; ++i)
        if (gs[i + 1] < gs[i] - 1e-12) {
            out.note = "gain not monotone on the coarse grid; using first crossing";
            break;
        }

    int cross = -1;
    for (int i = 0; i + 1 < n_coarse; ++i)
        if (gs[i] < 0.0 && gs[i + 1] >= 0.0) { cross = i; break; }
    if (cross < 0) {
        if (gs[0] >= 0.0) {
            out.note = "gain positive down to the bracketing floor; bound below " +
                       io::format_double(t_floor);
        } else {
            out.note = "no distillation window";
        }
        return out;
    }

    double a = ts[cross], b = ts[cross + 1];
    out.bracket_lo = a;
    out.bracket_hi = b;
    const double width = needs_oracle(det) ? 1e-7 : 1e-12;
    for (int it = 0; it < 200 && (b - a) > width; ++it) {
        const double mid = 0.5 * (a + b);
        if (gain(mid) < 0.0) a = mid;
        else b = mid;
    }
    out.tl = 0.5 * (a + b);
    out.residual = std::abs(gain(out.tl));
    out.found = true;
    return out;
}

LambdaOptResult find_lambda_opt(double eta, double t, const DetectorModel& det,
                                const EvalOptions& opt) {
    if (!(eta >= 0.0) || eta > 1.0)
        throw std::invalid_argument("find_lambda_opt: eta must be in [0,1]");
    if (!(t > 0.0) || t >= 1.0)
        throw std::invalid_argument("find_lambda_opt: t must be in (0,1)");
    det.validate();

    auto value = [&](double lam) {
        ProtocolParams q{lam, eta, t};
        if (!needs_oracle(det)) return en_after_closed(q, det);
        const auto o = run_oracle(q, det, opt);
        if (!o.note.empty())
            throw ConvergenceError("find_lambda_opt: " + o.note);
        return o.en;
    };

    // coarse grid over (0,1), endpoints excluded
    const int n = 64;
    int best = 0;
    std::vector<double> ls(n), vs(n);
    for (int i = 0; i < n; ++i) {
        ls[i] = double(i + 1) / double(n + 1);
        vs[i] = value(ls[i]);
        if (vs[i] > vs[best]) best = i;
    }

    LambdaOptResult out;
    const double spread = *std::max_element(vs.begin(), vs.end()) -
                          *std::min_element(vs.begin(), vs.end());
    if (spread < 1e-12) {
        out.plateau = true;
        out.plateau_lo = ls.front();
        out.plateau_hi = ls.back();
        out.lambda_opt = ls.front();  // ties resolve toward smaller lambda
        out.en_max = vs.front();
        return out;
    }

    double lo = (best > 0) ? ls[best - 1] : 0.5 * ls[0];
    double hi = (best + 1 < n) ? ls[best + 1] : 0.5 * (ls[n - 1] + 1.0);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    while (hi - lo > 1e-5) {
        if (f1 >= f2) {  // ties shrink toward smaller lambda
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = value(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = value(x2);
        }
    }
    out.lambda_opt = 0.5 * (lo + hi);
    out.en_max = value(out.lambda_opt);
    return out;
}

void SweepSpec::validate() const {
    if (lambdas.empty() || etas.empty() || ts.empty() || detectors.empty())
        throw std::invalid_argument("sweep: every grid axis must be non-empty");
    for (double l : lambdas)
        if (!(l >= 0.0) || l >= 1.0)
            throw std::invalid_argument("sweep: lambda values must be in [0,1)");
    for (double e : etas)
        if (!(e >= 0.0) || e > 1.0)
            throw std::invalid_argument("sweep: eta values must be in [0,1]");
    for (double t : ts)
        if (!(t > 0.0) || t > 1.0)
            throw std::invalid_argument("sweep: t values must be in (0,1]");
    for (const auto& d : detectors)
        if (d) d->validate();
}

std::vector<PointResult> sweep(const SweepSpec& spec) {
    spec.validate();
    struct Point {
        std::optional<DetectorModel> det;
        ProtocolParams p;
    };
    std::vector<Point> grid;
    for (const auto& det : spec.detectors)
        for (double eta : spec.etas)
            for (double t : spec.ts)
                for (double lambda : spec.lambdas)
                    grid.push_back({det, ProtocolParams{lambda, eta, t}});

    std::vector<PointResult> results(grid.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < grid.size(); i += stride)
            results[i] = evaluate_point(grid[i].p, grid[i].det, spec.path, spec.options);
    };
    const std::size_t n_threads =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                              grid.size());
    if (n_threads <= 1) {
        work(0, 1);
    } else {
        // strided ownership; slot-per-index assembly keeps output order fixed
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t)
            pool.emplace_back(work, t, n_threads);
        for (auto& th : pool) th.join();
    }
    return results;
}

io::Table points_table(const std::vector<PointResult>& points) {
    io::Table tbl;
    tbl.columns = {"lambda", "eta", "t", "detector", "path", "en_before", "en_after",
                   "p_succ", "fidelity", "en_after_alt", "p_succ_alt", "fidelity_alt",
                   "max_path_diff", "k_used", "tail_mass", "cutoff", "norm_deficit",
                   "error"};
    auto num = [](double v) -> io::Cell {
        if (std::isnan(v)) return std::monostate{};
        return v;
    };
    auto count = [](long long v) -> io::Cell {
        if (v < 0) return std::monostate{};
        return v;
    };
    for (const auto& r : points) {
        std::vector<io::Cell> row;
        row.emplace_back(r.params.lambda);
        row.emplace_back(r.params.eta);
        row.emplace_back(r.params.t);
        row.emplace_back(r.det ? r.det->label() : std::string("none"));
        row.emplace_back(r.path);
        row.emplace_back(num(r.en_before));
        row.emplace_back(num(r.en_after));
        row.emplace_back(num(r.p_succ));
        row.emplace_back(num(r.fidelity));
        row.emplace_back(num(r.en_after_alt));
        row.emplace_back(num(r.p_succ_alt));
        row.emplace_back(num(r.fidelity_alt));
        row.emplace_back(num(r.max_path_diff));
        row.emplace_back(count(r.k_used));
        row.emplace_back(num(r.tail_mass));
        row.emplace_back(count(r.cutoff));
        row.emplace_back(num(r.norm_deficit));
        row.emplace_back(r.error.empty() ? io::Cell{std::monostate{}} : io::Cell{r.error});
        tbl.rows.push_back(std::move(row));
    }
    return tbl;
}

namespace {

io::Cell num_cell(double v) {
    if (std::isnan(v)) return std::monostate{};
    return v;
}

// entanglement and success-probability curves plus the optimal-squeezing
// locus for on-off subtraction at fixed channel transmittance
io::Table figure_curves_onoff(double eta) {
    io::Table tbl;
    tbl.columns = {"kind", "t", "lambda", "en_before", "en_after", "p_succ",
                   "lambda_opt", "en_max", "error"};
    const std::vector<double> t_panels = {0.10, 0.50, 0.70, 0.90, 0.99};
    for (double t : t_panels)
        for (int i = 1; i <= 99; ++i) {
            const double lam = double(i) / 100.0;
            std::vector<io::Cell> row{std::string("curve"), t, lam};
            try {
                row.emplace_back(closed::en_before(lam, eta));
                row.emplace_back(closed::en_onoff(lam, eta, t));
                row.emplace_back(closed::p_onoff(lam, eta, t));
                row.emplace_back(std::monostate{});
                row.emplace_back(std::monostate{});
                row.emplace_back(std::monostate{});
            } catch (const std::exception& e) {
                row.resize(3);
                row.insert(row.end(), 5, std::monostate{});
                row.emplace_back(std::string(e.what()));
            }
            tbl.rows.push_back(std::move(row));
        }
    for (int j = 0; j <= 89; ++j) {
        const double t = 0.10 + 0.01 * double(j);
        std::vector<io::Cell> row{std::string("optimum"), t, std::monostate{},
                                  std::monostate{}, std::monostate{}, std::monostate{}};
        try {
            const auto r = find_lambda_opt(eta, t, DetectorModel::onoff());
            row.emplace_back(r.lambda_opt);
            row.emplace_back(r.en_max);
            row.emplace_back(std::monostate{});
        } catch (const std::exception& e) {
            row.emplace_back(std::monostate{});
            row.emplace_back(std::monostate{});
            row.emplace_back(std::string(e.what()));
        }
        tbl.rows.push_back(std::move(row));
    }
    return tbl;
}

// distillation threshold vs squeezing for on-off subtraction
io::Table figure_tl_onoff() {
    io::Table tbl;
    tbl.columns = {"eta", "lambda", "tl", "found", "note"};
    for (double eta : {0.01, 0.1, 0.5, 1.0})
        for (int i = 1; i <= 99; ++i) {
            const double lam = double(i) / 100.0;
            const auto r = find_tl(lam, eta, DetectorModel::onoff());
            tbl.rows.push_back({eta, lam, num_cell(r.tl),
                                static_cast<long long>(r.found ? 1 : 0),
                                r.note.empty() ? io::Cell{std::monostate{}}
                                               : io::Cell{r.note}});
        }
    return tbl;
}

// photon-counting curves at eta = 1/2, t = 0.95, including the
// high-squeezing window where the success probability peaks
io::Table figure_curves_pnr() {
    io::Table tbl;
    tbl.columns = {"detector", "lambda", "r", "en_before", "en_after", "p_succ",
                   "error"};
    std::vector<DetectorModel> dets{DetectorModel::onoff()};
    for (int l = 1; l <= 4; ++l) dets.push_back(DetectorModel::pnr(l));
    const double eta = 0.5, t = 0.95;
    auto push = [&](const DetectorModel& det, double lam, double r) {
        std::vector<io::Cell> row{det.label(), lam, r};
        try {
            const ProtocolParams p{lam, eta, t};
            row.emplace_back(closed::en_before(lam, eta));
            row.emplace_back(en_after_closed(p, det));
            row.emplace_back(p_succ_closed(p, det));
            row.emplace_back(std::monostate{});
        } catch (const std::exception& e) {
            row.resize(3);
            row.insert(row.end(), 3, std::monostate{});
            row.emplace_back(std::string(e.what()));
        }
        tbl.rows.push_back(std::move(row));
    };
    for (const auto& det : dets)
        for (int i = 1; i <= 99; ++i) {
            const double lam = double(i) / 100.0;
            push(det, lam, std::atanh(lam));
        }
    for (const auto& det : dets)
        for (int i = 0; i <= 40; ++i) {
            const double r = 3.0 + 0.05 * double(i);
            push(det, std::tanh(r), r);
        }
    return tbl;
}

// distillation threshold vs squeezing for photon counting
io::Table figure_tl_pnr() {
    io::Table tbl;
    tbl.columns = {"detector", "eta", "lambda", "tl", "found", "note"};
    for (int l = 1; l <= 4; ++l)
        for (double eta : {0.01, 0.1, 0.5, 1.0})
            for (int i = 0; i <= 48; ++i) {
                const double lam = 0.01 + 0.02 * double(i);
                const auto det = DetectorModel::pnr(l);
                const auto r = find_tl(lam, eta, det);
                tbl.rows.push_back({det.label(), eta, lam, num_cell(r.tl),
                                    static_cast<long long>(r.found ? 1 : 0),
                                    r.note.empty() ? io::Cell{std::monostate{}}
                                                   : io::Cell{r.note}});
            }
    return tbl;
}

// teleportation fidelity before and after photon counting at eta = 1/2,
// t = 0.95; block families deepen fast as lambda -> 1 (the count-3 family
// already needs ~170 blocks at lambda = 0.9), so the grid stops there and
// the K cap is raised accordingly
io::Table figure_fidelity(const EvalOptions& opt) {
    io::Table tbl;
    tbl.columns = {"detector", "lambda", "f_before", "f_after", "error"};
    const double eta = 0.5, t = 0.95;
    const int k_cap = std::max(opt.k_cap, 400);
    for (int l = 1; l <= 3; ++l)
        for (int i = 1; i <= 90; ++i) {
            const double lam = double(i) / 100.0;
            const auto det = DetectorModel::pnr(l);
            std::vector<io::Cell> row{det.label(), lam,
                                      num_cell(closed::f_before(lam, eta))};
            try {
                const ProtocolParams p{lam, eta, t};
                const auto fam = blocks::block_family(p, det, opt.eps_k, k_cap,
                                                      opt.series);
                row.emplace_back(teleport::fidelity_from_blocks(fam));
                row.emplace_back(std::monostate{});
            } catch (const std::exception& e) {
                row.emplace_back(std::monostate{});
                row.emplace_back(std::string(e.what()));
            }
            tbl.rows.push_back(std::move(row));
        }
    return tbl;
}

}  // namespace

io::Table figure_table(const std::string& name, const EvalOptions& opt) {
    if (name == "fig2") return figure_curves_onoff(1.0);
    if (name == "fig3") return figure_curves_onoff(0.5);
    if (name == "fig4") return figure_tl_onoff();
    if (name == "fig5") return figure_curves_pnr();
    if (name == "fig6") return figure_tl_pnr();
    if (name == "fig8") return figure_fidelity(opt);
    throw std::invalid_argument(
        "figure must be one of fig2, fig3, fig4, fig5, fig6, fig8");
}

}  // namespace psdist::analysis
