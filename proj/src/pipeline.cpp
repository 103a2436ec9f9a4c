#include "tractscope/pipeline.hpp"

#include <json.hpp>

#include "tractscope/critpoints.hpp"

namespace tractscope {

using ordered_json = nlohmann::ordered_json;

ScalarField analysis_field(const AnalyzeOptions& opt) {
    Expr f = parse(opt.expr_text);
    Window window{opt.x0, opt.x1, opt.y0, opt.y1, opt.nx, opt.ny};
    return sample_field(f, window, opt.R);
}

static const char* verdict_name(VerdictKind k) {
    switch (k) {
        case VerdictKind::ContainsLogarithmicTract: return "contains_logarithmic_tract";
        case VerdictKind::AsymptoticValue: return "asymptotic_value";
        default: return "undetermined";
    }
}

static const char* label_name(TractReport::Label l) {
    switch (l) {
        case TractReport::Label::Logarithmic: return "logarithmic";
        case TractReport::Label::Degenerate: return "degenerate";
        default: return "direct";
    }
}

std::string run_analysis(const AnalyzeOptions& opt) {
    Expr f = parse(opt.expr_text);
    Expr d = f.derivative().strip_nonvanishing_factors();
    Window window{opt.x0, opt.x1, opt.y0, opt.y1, opt.nx, opt.ny};

    ScalarField field = sample_field(f, window, opt.R);
    auto contours = extract_contours(field);
    auto labels = label_components(field, true);
    auto tracts = build_tracts(field, contours, labels, opt.R);

    ordered_json report;
    report["schema_version"] = "1.0";
    report["tool"] = "tractscope";
    report["expression"] = opt.expr_text;
    report["R"] = opt.R;
    report["window"] = {{"x_min", opt.x0}, {"x_max", opt.x1},
                        {"y_min", opt.y0}, {"y_max", opt.y1}};
    report["resolution"] = {{"nx", opt.nx}, {"ny", opt.ny}};
    report["tolerances"] = {
        {"winding_residual", 0.05},
        {"asymptotic_modulus_rel", 0.05},
        {"pinch_dip_fraction", 0.05},
        {"profile_slack_rel", 0.05},
        {"newton_position", 1e-8},
        {"channel_u_floor", 10.0},
    };

    size_t positive_cells = 0;
    for (size_t k = 0; k < field.values.size(); ++k)
        if (!field.mask[k] && field.values[k] > 0.0) ++positive_cells;
    int open_total = 0, closed_total = 0;
    for (const auto& c : contours) (c.closed ? closed_total : open_total)++;
    report["stats"] = {
        {"cells", field.values.size()},
        {"positive_cells", positive_cells},
        {"contours", contours.size()},
        {"open_contours", open_total},
        {"closed_contours", closed_total},
        {"tracts", tracts.size()},
    };

    report["tracts"] = ordered_json::array();
    for (const TractRegion& t : tracts) {
        ordered_json jt;
        jt["id"] = t.id;
        jt["cells"] = t.cell_count;
        jt["max_u"] = t.max_u;
        jt["open_contours"] = t.open_contours;
        jt["closed_contours"] = t.closed_contours;
        jt["edge_runs"] = t.edge_runs.size();
        jt["pinches"] = t.pinch_count;
        jt["m"] = t.m;
        jt["truncated"] = t.truncated;
        jt["truncation_presumed_unbounded"] = t.truncated && !t.complete;
        jt["complete"] = t.complete;
        jt["degenerate"] = t.degenerate;

        auto channels = detect_channels(t, field, labels, opt.r_min, opt.r_max,
                                        opt.n_radii);
        std::vector<ChannelVerdict> verdicts;
        jt["channels"] = ordered_json::array();
        for (const Channel& ch : channels) {
            ChannelVerdict v = classify_channel(ch, field, f, opt.R);
            ordered_json jc;
            jc["direction"] = ch.direction;
            jc["arc"] = {ch.arc_lo, ch.arc_hi};
            jc["r_min"] = ch.r_min;
            jc["r_max"] = ch.r_max;
            jc["cells"] = ch.cells.size();
            jc["max_u_profile"] = v.profile;
            jc["verdict"] = verdict_name(v.kind);
            if (v.kind == VerdictKind::AsymptoticValue)
                jc["alpha"] = {v.alpha.real(), v.alpha.imag()};
            if (v.level > 0.0) {
                jc["omega_level"] = v.level;
                jc["omega_open_contours"] = v.omega_open_contours;
            }
            jt["channels"].push_back(std::move(jc));
            verdicts.push_back(std::move(v));
        }

        int crit = -1;
        if (opt.critpoints && !t.degenerate) {
            try {
                crit = tract_critical_count(t, field, labels, f, d);
            } catch (const CritError& e) {
                jt["critical_count_error"] = e.what();
            }
        }
        TractReport tr = classify_tract(t, verdicts, crit);
        jt["critical_count"] = crit;
        jt["label"] = label_name(tr.label);
        if (crit >= 0) {
            jt["bound_ok"] = !tr.bound_violation;
            jt["bound_violation"] = tr.bound_violation;
        }
        report["tracts"].push_back(std::move(jt));
    }

    return report.dump(2) + "\n";
}

} // namespace tractscope
