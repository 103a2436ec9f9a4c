#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tractscope/be.hpp"
#include "tractscope/critpoints.hpp"
#include "tractscope/pipeline.hpp"
#include "tractscope/poisson.hpp"
#include "tractscope/render.hpp"

using namespace tractscope;
using ordered_json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void parse_window(const std::string& s, AnalyzeOptions& opt) {
    double a, b, c, d;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf", &a, &b, &c, &d) != 4)
        throw UsageError("--window expects X0,X1,Y0,Y1");
    opt.x0 = a; opt.x1 = b; opt.y0 = c; opt.y1 = d;
}

void parse_channels(const std::string& s, AnalyzeOptions& opt) {
    double rmin = 0, rmax = 0;
    int n = 16;
    int got = std::sscanf(s.c_str(), "%lf,%lf,%d", &rmin, &rmax, &n);
    if (got < 1) throw UsageError("--channels expects RMIN[,RMAX,N]");
    opt.r_min = rmin;
    if (got >= 2) opt.r_max = rmax;
    if (got >= 3) opt.n_radii = n;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << text;
}

PoissonModel parse_model(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw UsageError(std::string("malformed model JSON: ") + e.what());
    }
    PoissonModel m;
    try {
        m.R = j.value("R", 1.0);
        m.theta = j.value("theta", 0.0);
        for (const auto& z : j.at("singularities"))
            m.zeta.push_back(Complex(z.at(0).get<double>(), z.at(1).get<double>()));
        for (const auto& c : j.at("weights")) m.c.push_back(c.get<double>());
    } catch (const std::exception& e) {
        throw UsageError(std::string("malformed model JSON: ") + e.what());
    }
    if (!m.valid())
        throw UsageError("invalid model: need unit-modulus distinct singularities "
                         "and positive weights of equal count");
    return m;
}

HalfPlaneDensity parse_density(const std::string& text, double c) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw UsageError(std::string("malformed density JSON: ") + e.what());
    }
    HalfPlaneDensity d;
    d.c = c;
    for (const auto& iv : j) {
        double a = iv.at(0).get<double>(), b = iv.at(1).get<double>();
        double w = iv.at(2).get<double>();
        if (!(a < b) || w < 0) throw UsageError("density intervals need a < b, w >= 0");
        d.intervals.push_back({a, b, w});
    }
    return d;
}

ordered_json model_critpoints_json(const PoissonModel& m) {
    auto cp = model_critical_points(m);
    ordered_json out;
    out["n"] = m.n();
    out["nominal_degree"] = cp.nominal_degree;
    out["actual_degree"] = cp.actual_degree;
    out["degree_drop"] = cp.degree_drop();
    out["roots"] = ordered_json::array();
    for (size_t k = 0; k < cp.roots.size(); ++k)
        out["roots"].push_back({{"re", cp.roots[k].real()},
                                {"im", cp.roots[k].imag()},
                                {"in_disc", static_cast<bool>(cp.in_disc[k])}});
    out["in_disc_count"] = cp.in_disc_count();
    out["bound_n_minus_1_ok"] = cp.in_disc_count() <= static_cast<int>(m.n()) - 1;
    out["reflection_pairing"] = check_reflection_pairing(m, cp);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tractscope: numerical identification, classification and "
                 "rendering of direct and logarithmic tracts of entire functions"};
    app.require_subcommand(1);

    AnalyzeOptions opt;
    std::string window_str = "-3,3,-3,3", channels_str, out_path;
    std::string critpoints_str = "on";
    int res = 601;

    auto add_field_flags = [&](CLI::App* cmd) {
        cmd->add_option("--expr", opt.expr_text, "expression in z")->required();
        cmd->add_option("--R", opt.R, "boundary modulus R (default 1)");
        cmd->add_option("--window", window_str, "window X0,X1,Y0,Y1");
        cmd->add_option("--res", res, "samples per axis (default 601)");
        cmd->add_option("--out", out_path, "output path (default stdout)");
    };

    auto* analyze = app.add_subcommand("analyze", "full tract analysis report");
    add_field_flags(analyze);
    analyze->add_option("--channels", channels_str, "channel radii RMIN[,RMAX,N]");
    analyze->add_option("--critpoints", critpoints_str, "critical point counting on|off");

    auto* render = app.add_subcommand("render", "render the tract image");
    add_field_flags(render);
    std::string format = "ppm";
    render->add_option("--format", format, "image format (ppm)");

    auto* model = app.add_subcommand("model", "exactly solvable Poisson-kernel models");
    std::string model_str, w_str = "2.718281828459045,0", density_str = "[]";
    double rj = 1.0, dens_c = 1.0, level = 0.0;
    int jmax = 3;
    model->add_option("--model", model_str,
                      "model JSON {R, theta, singularities:[[re,im]..], weights:[..]}");
    auto* mc = model->add_subcommand("critpoints", "critical points, pairing, n-1 bound");
    auto* mf = model->add_subcommand("fibers", "covering fibers of w (n = 1)");
    mf->add_option("--w", w_str, "target point RE,IM");
    mf->add_option("--jmax", jmax, "fiber branches -jmax..jmax");
    auto* mh = model->add_subcommand("horodisc", "horodisc geometry for Rj");
    mh->add_option("--Rj", rj, "horodisc level");
    auto* mm = model->add_subcommand("monotone", "half-plane monotonicity threshold");
    mm->add_option("--density", density_str, "intervals JSON [[a,b,w],...]");
    mm->add_option("--c", dens_c, "linear coefficient c > 0");
    mm->add_option("--level", level, "also trace the level curve U = level");
    model->add_option("--out", out_path, "output path (default stdout)");
    model->require_subcommand(1);

    auto* bev = app.add_subcommand("be-verify", "Bergweiler-Eremenko example evidence");
    int nmax = 2, samples = 64;
    double eps = 0.125, be_r = std::exp(10.0);
    std::string be_window = "0,250,0,250";
    int be_res = 1001;
    bool skip_tracts = false;
    bev->add_option("--nmax", nmax, "largest tree level (<= 4)");
    bev->add_option("--eps", eps, "tree parameter, 0 < eps <= 1/8");
    bev->add_option("--samples", samples, "samples per tree segment");
    bev->add_option("--window", be_window, "tract-check window X0,X1,Y0,Y1");
    bev->add_option("--res", be_res, "tract-check samples per axis");
    bev->add_option("--R", be_r, "tract-check boundary modulus");
    bev->add_flag("--skip-tracts", skip_tracts, "skip the windowed tract check");
    bev->add_option("--out", out_path, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze || *render) {
            parse_window(window_str, opt);
            opt.nx = opt.ny = res;
            if (!channels_str.empty()) parse_channels(channels_str, opt);
            if (critpoints_str == "off") opt.critpoints = false;
            else if (critpoints_str != "on")
                throw UsageError("--critpoints expects on|off");
            if (*analyze) {
                emit(run_analysis(opt), out_path);
            } else {
                if (format != "ppm") throw UsageError("--format supports only ppm");
                if (out_path.empty()) throw UsageError("render requires --out");
                write_ppm(analysis_field(opt), out_path);
            }
        } else if (*model) {
            if (model_str.empty() && !*mm) throw UsageError("model requires --model");
            ordered_json out;
            if (*mc) {
                out = model_critpoints_json(parse_model(model_str));
            } else if (*mf) {
                PoissonModel m = parse_model(model_str);
                double wr, wi;
                if (std::sscanf(w_str.c_str(), "%lf,%lf", &wr, &wi) != 2)
                    throw UsageError("--w expects RE,IM");
                Complex w(wr, wi);
                auto fibers = fiber_enumerate(m, w, -jmax, jmax);
                out["w"] = {wr, wi};
                out["fibers"] = ordered_json::array();
                bool all_in_disc = true;
                for (int j = -jmax; j <= jmax; ++j) {
                    const Complex& t = fibers[j + jmax];
                    double residual = std::abs(model_eval(m, t).value() - w) / std::abs(w);
                    all_in_disc = all_in_disc && std::abs(t) < 1.0;
                    out["fibers"].push_back({{"j", j}, {"re", t.real()}, {"im", t.imag()},
                                             {"abs", std::abs(t)}, {"residual", residual}});
                }
                out["all_in_disc"] = all_in_disc;
            } else if (*mh) {
                PoissonModel m = parse_model(model_str);
                Horodisc h = horodisc_geometry(m.c.at(0), rj);
                out = {{"c", h.c}, {"Rj", h.Rj}, {"center", h.center},
                       {"radius", h.radius}, {"tangency", h.center + h.radius}};
            } else if (*mm) {
                if (dens_c <= 0) throw UsageError("--c must be positive");
                HalfPlaneDensity d = parse_density(density_str, dens_c);
                out["x0"] = monotonicity_threshold(d);
                if (level > 0.0) {
                    OmegaCurve curve = omega_single_curve(d, level);
                    out["level"] = level;
                    out["single_curve"] = curve.single;
                    out["curve_points"] = curve.points.size();
                }
            }
            emit(out.dump(2) + "\n", out_path);
        } else if (*bev) {
            if (nmax > 4) throw UsageError("--nmax above 4 exceeds the double-range guard");
            if (nmax < 1) throw UsageError("--nmax must be at least 1");
            if (!(eps > 0.0 && eps <= 0.125)) throw UsageError("eps must satisfy 0 < eps <= 1/8");
            ordered_json out;
            out["eps"] = eps;
            out["nmax"] = nmax;
            ordered_json segs = ordered_json::array();
            bool all_ok = true;
            for (int n = 1; n <= nmax; ++n)
                for (int j = 0; j < (1 << n); ++j)
                    for (auto kind : {TreeSegment::Kind::B, TreeSegment::Kind::CPlus,
                                      TreeSegment::Kind::CMinus}) {
                        TreeSegment seg{kind, n, j, eps};
                        auto r = verify_tree_bound(seg, samples);
                        const char* kname = kind == TreeSegment::Kind::B ? "B"
                                          : kind == TreeSegment::Kind::CPlus ? "C+" : "C-";
                        segs.push_back({{"kind", kname}, {"n", n}, {"j", j},
                                        {"ok", r.ok}, {"margin", r.margin},
                                        {"max_re_g", r.max_re_g}, {"bound", r.bound}});
                        all_ok = all_ok && r.ok;
                    }
            out["tree_bound"] = {{"pass", all_ok}, {"segments", std::move(segs)}};
            out["winding"] = ordered_json::array();
            for (double r : {5.0, 10.0}) {
                auto wr = winding_of_g(r, 1024);
                out["winding"].push_back({{"r", r}, {"dominant", wr.dominant},
                                          {"index_n", wr.index_n}, {"winding", wr.winding},
                                          {"arg_monotone", wr.arg_monotone}});
            }
            if (!skip_tracts) {
                AnalyzeOptions w_opt;
                parse_window(be_window, w_opt);
                Window window{w_opt.x0, w_opt.x1, w_opt.y0, w_opt.y1, be_res, be_res};
                auto rep = verify_single_curve_tracts(window, be_r, eps);
                out["single_curve"] = {
                    {"tracts", rep.tracts},
                    {"complete_tracts", rep.complete_tracts},
                    {"complete_m1", rep.complete_m1},
                    {"pass", rep.all_complete_m1},
                    {"tree_intersections", rep.tree_intersections},
                    {"critical_count", rep.critical_count},
                    {"max_u", rep.max_u},
                };
            }
            emit(out.dump(2) + "\n", out_path);
        }
    } catch (const ParseError& e) {
        ordered_json err = {{"error", {{"type", "parse"}, {"message", e.what()},
                                       {"offset", e.offset}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const UsageError& e) {
        ordered_json err = {{"error", {{"type", "usage"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        ordered_json err = {{"error", {{"type", "numeric"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 0;
}
