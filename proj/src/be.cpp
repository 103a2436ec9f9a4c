#include "tractscope/be.hpp"

#include <algorithm>
#include <cmath>

#include "tractscope/critpoints.hpp"

namespace tractscope {

Complex eval_g(const Complex& z, double tol) { return eval_beseries(z, 0, tol); }

std::vector<Complex> tree_points(const TreeSegment& seg, int samples) {
    if (samples < 2) throw std::invalid_argument("need at least 2 samples");
    std::vector<Complex> pts;
    pts.reserve(samples);
    double base = seg.base_angle();
    double half_step = M_PI / std::pow(2.0, seg.n + 1);
    for (int k = 0; k < samples; ++k) {
        double t = static_cast<double>(k) / (samples - 1);
        double r, angle;
        if (seg.kind == TreeSegment::Kind::B) {
            r = seg.r_n() + t * (seg.rp_n() - seg.r_n());
            angle = base;
        } else {
            r = seg.rp_n() + t * (seg.r_next() - seg.rp_n());
            double offset = (r - seg.rp_n()) / (seg.r_next() - seg.rp_n()) * half_step;
            angle = base + (seg.kind == TreeSegment::Kind::CPlus ? offset : -offset);
        }
        pts.push_back(std::polar(r, angle));
    }
    return pts;
}

TreeBoundResult verify_tree_bound(const TreeSegment& seg, int samples) {
    TreeBoundResult out;
    out.bound = -std::pow(2.0, std::pow(2.0, seg.n));
    out.max_re_g = -1e300;
    for (const Complex& z : tree_points(seg, samples))
        out.max_re_g = std::max(out.max_re_g, eval_g(z).real());
    out.margin = out.bound - out.max_re_g;
    out.ok = out.max_re_g < out.bound;
    return out;
}

WindingResult winding_of_g(double r, int samples) {
    WindingResult out;
    if (r <= 0.0 || samples < 8) return out;

    // dominance: the largest term must strictly majorize the sum of the rest
    int K = 1;
    while ((1 << (K + 1)) < 2.0 * r) ++K;
    K += 4;  // a few tail terms, they only help the majorized side
    std::vector<double> terms;
    for (int k = 1; k <= K; ++k)
        terms.push_back(std::pow(r / std::pow(2.0, k), std::pow(2.0, k)));
    size_t kmax = std::max_element(terms.begin(), terms.end()) - terms.begin();
    double others = 0.0;
    for (size_t k = 0; k < terms.size(); ++k)
        if (k != kmax) others += terms[k];
    if (!(terms[kmax] > others)) return out;  // between regimes: no verdict
    out.dominant = true;
    out.index_n = static_cast<int>(kmax) + 1;

    // continued argument around the circle, locally refined where needed
    out.arg_monotone = true;
    double total = 0.0;
    double prev_arg = std::arg(eval_g(Complex(r, 0.0)));
    for (int k = 1; k <= samples; ++k) {
        double th = 2.0 * M_PI * k / samples;
        double cur_arg = std::arg(eval_g(std::polar(r, th)));
        double step = std::remainder(cur_arg - prev_arg, 2.0 * M_PI);
        if (std::abs(step) >= M_PI / 2.0) {
            // refine this arc
            double th0 = 2.0 * M_PI * (k - 1) / samples;
            step = 0.0;
            double a = prev_arg;
            const int sub = 64;
            for (int s = 1; s <= sub; ++s) {
                double b = std::arg(eval_g(std::polar(r, th0 + (th - th0) * s / sub)));
                step += std::remainder(b - a, 2.0 * M_PI);
                a = b;
            }
        }
        if (step <= 0.0) out.arg_monotone = false;
        total += step;
        prev_arg = cur_arg;
    }
    out.winding = static_cast<int>(std::lround(total / (2.0 * M_PI)));
    return out;
}

SingleCurveReport verify_single_curve_tracts(const Window& window, double R,
                                             double eps) {
    SingleCurveReport rep;
    Expr h(make_fn(NodeKind::Exp, make_beseries(make_var(), 0)));
    Expr d = h.derivative().strip_nonvanishing_factors();  // g'

    ScalarField field = sample_field(h, window, R);
    auto contours = extract_contours(field);
    auto labels = label_components(field, true);
    auto tracts = build_tracts(field, contours, labels, R);

    rep.tracts = static_cast<int>(tracts.size());
    rep.all_complete_m1 = true;
    for (const TractRegion& t : tracts) {
        rep.max_u = std::max(rep.max_u, t.max_u);
        if (!t.complete) continue;
        ++rep.complete_tracts;
        if (t.m == 1) ++rep.complete_m1;
        else rep.all_complete_m1 = false;
    }

    // sampled tree T against the positive set
    double reach = window.circumradius();
    for (int n = 1; (1.0 + eps) * std::pow(2.0, n + 1) <= reach; ++n) {
        for (int j = 0; j < (1 << n); ++j) {
            for (auto kind : {TreeSegment::Kind::B, TreeSegment::Kind::CPlus,
                              TreeSegment::Kind::CMinus}) {
                TreeSegment seg{kind, n, j, eps};
                for (const Complex& z : tree_points(seg, 64)) {
                    if (z.real() < window.x_min || z.real() > window.x_max ||
                        z.imag() < window.y_min || z.imag() > window.y_max)
                        continue;
                    int i = static_cast<int>(std::lround((z.real() - window.x_min) / window.dx()));
                    int jj = static_cast<int>(std::lround((z.imag() - window.y_min) / window.dy()));
                    i = std::clamp(i, 0, window.nx - 1);
                    jj = std::clamp(jj, 0, window.ny - 1);
                    if (labels.at(i, jj, window.nx) >= 0) ++rep.tree_intersections;
                }
            }
        }
    }

    for (const TractRegion& t : tracts)
        rep.critical_count += tract_critical_count(t, field, labels, h, d);
    return rep;
}

} // namespace tractscope
