#include "tractscope/tracts.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace tractscope {

namespace {

// Window-border nodes in circular order: bottom left-to-right, right
// bottom-to-top, top right-to-left, left top-to-bottom.
std::vector<std::pair<int, int>> border_nodes(const Window& w) {
    std::vector<std::pair<int, int>> nodes;
    nodes.reserve(2 * (w.nx + w.ny) - 4);
    for (int i = 0; i < w.nx; ++i) nodes.push_back({i, 0});
    for (int j = 1; j < w.ny; ++j) nodes.push_back({w.nx - 1, j});
    for (int i = w.nx - 2; i >= 0; --i) nodes.push_back({i, w.ny - 1});
    for (int j = w.ny - 2; j >= 1; --j) nodes.push_back({0, j});
    return nodes;
}

template <typename Pred>
std::vector<std::vector<std::pair<int, int>>> border_runs(const Window& w, Pred in_set) {
    auto nodes = border_nodes(w);
    std::vector<std::vector<std::pair<int, int>>> runs;
    for (const auto& n : nodes) {
        if (!in_set(n.first, n.second)) {
            if (!runs.empty() && !runs.back().empty()) runs.push_back({});
            continue;
        }
        if (runs.empty()) runs.push_back({});
        runs.back().push_back(n);
    }
    if (!runs.empty() && runs.back().empty()) runs.pop_back();
    // circular wraparound: merge last run into the first
    if (runs.size() > 1 && in_set(nodes.front().first, nodes.front().second) &&
        in_set(nodes.back().first, nodes.back().second)) {
        auto& first = runs.front();
        auto& last = runs.back();
        last.insert(last.end(), first.begin(), first.end());
        first = std::move(last);
        runs.pop_back();
    }
    return runs;
}

// Strict interior local minima of u along a run dipping below 5% of the
// run maximum.
std::vector<int> find_pinches(const ScalarField& field,
                              const std::vector<std::pair<int, int>>& run) {
    std::vector<int> out;
    if (run.size() < 3) return out;
    double run_max = -1e300;
    std::vector<double> u(run.size());
    for (size_t k = 0; k < run.size(); ++k) {
        u[k] = field.at(run[k].first, run[k].second);
        run_max = std::max(run_max, u[k]);
    }
    double cutoff = 0.05 * run_max;
    for (size_t k = 1; k + 1 < run.size(); ++k)
        if (u[k] < u[k - 1] && u[k] < u[k + 1] && u[k] < cutoff)
            out.push_back(static_cast<int>(k));
    return out;
}

} // namespace

int contour_component(const Contour& contour, const ScalarField& field,
                      const ComponentLabels& labels, double level) {
    const Window& w = field.window;
    std::map<int32_t, int> votes;
    size_t npts = contour.points.size();
    for (size_t p = 0; p + 1 < npts; ++p) {
        Complex mid = 0.5 * (contour.points[p] + contour.points[p + 1]);
        int i = std::clamp(static_cast<int>((mid.real() - w.x_min) / w.dx()), 0, w.nx - 2);
        int j = std::clamp(static_cast<int>((mid.imag() - w.y_min) / w.dy()), 0, w.ny - 2);
        for (int dj = 0; dj <= 1; ++dj)
            for (int di = 0; di <= 1; ++di) {
                int ci = i + di, cj = j + dj;
                if (field.masked(ci, cj) || field.at(ci, cj) <= level) continue;
                int32_t lab = labels.at(ci, cj, w.nx);
                if (lab >= 0) ++votes[lab];
            }
    }
    int best = -1, best_votes = 0;
    for (const auto& [lab, v] : votes)
        if (v > best_votes) { best = lab; best_votes = v; }
    return best;
}

std::vector<TractRegion> build_tracts(const ScalarField& field,
                                      const std::vector<Contour>& contours,
                                      const ComponentLabels& labels,
                                      double R) {
    const Window& w = field.window;
    std::vector<TractRegion> tracts(labels.count);
    for (int c = 0; c < labels.count; ++c) {
        tracts[c].id = c;
        tracts[c].R = R;
    }
    for (int j = 0; j < w.ny; ++j)
        for (int i = 0; i < w.nx; ++i) {
            int32_t lab = labels.at(i, j, w.nx);
            if (lab < 0) continue;
            TractRegion& t = tracts[lab];
            ++t.cell_count;
            t.max_u = std::max(t.max_u, field.at(i, j));
            if (i == 0 || j == 0 || i == w.nx - 1 || j == w.ny - 1) t.truncated = true;
        }
    for (size_t c = 0; c < contours.size(); ++c) {
        int lab = contour_component(contours[c], field, labels);
        if (lab < 0) continue;
        tracts[lab].boundary.push_back(static_cast<int>(c));
        if (contours[c].closed) ++tracts[lab].closed_contours;
        else ++tracts[lab].open_contours;
    }
    for (TractRegion& t : tracts) {
        auto runs = border_runs(w, [&](int i, int j) { return labels.at(i, j, w.nx) == t.id; });
        for (auto& run : runs) {
            EdgeRun er;
            er.pinches = find_pinches(field, run);
            er.nodes = std::move(run);
            t.pinch_count += static_cast<int>(er.pinches.size());
            t.edge_runs.push_back(std::move(er));
        }
        t.m = t.open_contours + t.pinch_count;
        t.degenerate = (t.open_contours == 0 && t.edge_runs.empty());
        t.complete = (t.edge_runs.size() == 1 && t.pinch_count == 0);
    }
    return tracts;
}

std::vector<Channel> detect_channels(const TractRegion& tract,
                                     const ScalarField& field,
                                     const ComponentLabels& labels,
                                     double r_min, double r_max, int n_radii) {
    const Window& w = field.window;
    if (r_min <= 0.0)
        r_min = 0.25 * 0.5 * std::min(w.x_max - w.x_min, w.y_max - w.y_min);
    if (r_max <= 0.0) r_max = 0.95 * w.circumradius();
    if (!(r_min < r_max)) throw std::invalid_argument("window too small relative to r_min");
    if (n_radii < 2) n_radii = 2;

    auto radius_of = [&](int i, int j) { return std::abs(w.point(i, j)); };
    auto in_set = [&](int i, int j) {
        return labels.at(i, j, w.nx) == tract.id && radius_of(i, j) > r_min;
    };

    // components of tract ∩ {|z| > r_min}
    std::vector<int32_t> comp(static_cast<size_t>(w.nx) * w.ny, -1);
    auto cidx = [&](int i, int j) { return i + static_cast<size_t>(w.nx) * j; };
    int ncomp = 0;
    {
        std::vector<std::pair<int, int>> stack;
        for (int j = 0; j < w.ny; ++j)
            for (int i = 0; i < w.nx; ++i) {
                if (comp[cidx(i, j)] >= 0 || !in_set(i, j)) continue;
                int32_t lab = ncomp++;
                comp[cidx(i, j)] = lab;
                stack.push_back({i, j});
                while (!stack.empty()) {
                    auto [ci, cj] = stack.back();
                    stack.pop_back();
                    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                    for (int d = 0; d < 4; ++d) {
                        int ni = ci + di[d], nj = cj + dj[d];
                        if (ni < 0 || nj < 0 || ni >= w.nx || nj >= w.ny) continue;
                        if (comp[cidx(ni, nj)] >= 0 || !in_set(ni, nj)) continue;
                        comp[cidx(ni, nj)] = lab;
                        stack.push_back({ni, nj});
                    }
                }
            }
    }

    std::vector<Channel> channels;
    for (int c = 0; c < ncomp; ++c) {
        auto runs = border_runs(w, [&](int i, int j) { return comp[cidx(i, j)] == c; });
        if (runs.empty()) continue;  // interior remnant, no access to the border

        // one access per run segment between pinches
        std::vector<std::vector<std::pair<int, int>>> accesses;
        for (const auto& run : runs) {
            auto pinches = find_pinches(field, run);
            size_t start = 0;
            for (int p : pinches) {
                if (static_cast<size_t>(p) > start)
                    accesses.emplace_back(run.begin() + start, run.begin() + p);
                start = static_cast<size_t>(p) + 1;  // the neck node joins neither side
            }
            if (start < run.size())
                accesses.emplace_back(run.begin() + start, run.end());
        }
        if (accesses.empty()) continue;

        // partition the component among its accesses by multi-source BFS
        std::vector<int32_t> chan(comp.size(), -1);
        std::deque<std::pair<int, int>> queue;
        for (size_t a = 0; a < accesses.size(); ++a)
            for (const auto& n : accesses[a]) {
                if (comp[cidx(n.first, n.second)] != c) continue;
                if (chan[cidx(n.first, n.second)] >= 0) continue;
                chan[cidx(n.first, n.second)] = static_cast<int32_t>(a);
                queue.push_back(n);
            }
        while (!queue.empty()) {
            auto [ci, cj] = queue.front();
            queue.pop_front();
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                int ni = ci + di[d], nj = cj + dj[d];
                if (ni < 0 || nj < 0 || ni >= w.nx || nj >= w.ny) continue;
                if (comp[cidx(ni, nj)] != c || chan[cidx(ni, nj)] >= 0) continue;
                chan[cidx(ni, nj)] = chan[cidx(ci, cj)];
                queue.push_back({ni, nj});
            }
        }

        std::vector<Channel> local(accesses.size());
        for (auto& ch : local) {
            ch.tract_id = tract.id;
            ch.r_min = r_min;
            ch.r_max = r_max;
            ch.radii.resize(n_radii);
            for (int k = 0; k < n_radii; ++k)
                ch.radii[k] = r_min * std::pow(r_max / r_min, (k + 1.0) / n_radii);
            ch.max_u.assign(n_radii, 0.0);
            ch.ring_filled.assign(n_radii, 0);
            ch.ring_argmax.assign(n_radii, {-1, -1});
        }
        double log_span = std::log(r_max / r_min);
        for (int j = 0; j < w.ny; ++j)
            for (int i = 0; i < w.nx; ++i) {
                int32_t a = (comp[cidx(i, j)] == c) ? chan[cidx(i, j)] : -1;
                if (a < 0) continue;
                Channel& ch = local[a];
                ch.cells.push_back({i, j});
                double u = field.at(i, j);
                if (ch.peak_cell.first < 0 || u > ch.peak_u) {
                    ch.peak_u = u;
                    ch.peak_cell = {i, j};
                }
                double r = radius_of(i, j);
                if (r > r_max) continue;
                int ring = static_cast<int>(std::ceil(n_radii * std::log(r / r_min) / log_span));
                ring = std::clamp(ring, 1, n_radii) - 1;
                if (!ch.ring_filled[ring] || u > ch.max_u[ring]) {
                    ch.ring_filled[ring] = 1;
                    ch.max_u[ring] = u;
                    ch.ring_argmax[ring] = {i, j};
                }
            }

        for (Channel& ch : local) {
            if (ch.cells.empty()) continue;
            // direction: circular mean over the outermost filled ring's cells
            int outer = -1, inner = -1;
            for (int k = 0; k < n_radii; ++k)
                if (ch.ring_filled[k]) { if (inner < 0) inner = k; outer = k; }
            if (outer >= 0) {
                double lo = (outer == 0) ? r_min : ch.radii[outer - 1];
                double sx = 0, sy = 0;
                for (const auto& [i, j] : ch.cells) {
                    double r = radius_of(i, j);
                    if (r <= lo || r > ch.radii[outer]) continue;
                    Complex z = w.point(i, j);
                    sx += z.real() / r;
                    sy += z.imag() / r;
                }
                ch.direction = std::atan2(sy, sx);
                if (ch.direction < 0) ch.direction += 2.0 * M_PI;
            }
            if (inner >= 0) {
                double lo = (inner == 0) ? r_min : ch.radii[inner - 1];
                double dev_lo = 0, dev_hi = 0;
                for (const auto& [i, j] : ch.cells) {
                    double r = radius_of(i, j);
                    if (r <= lo || r > ch.radii[inner]) continue;
                    Complex z = w.point(i, j);
                    double d = std::remainder(std::atan2(z.imag(), z.real()) - ch.direction,
                                              2.0 * M_PI);
                    dev_lo = std::min(dev_lo, d);
                    dev_hi = std::max(dev_hi, d);
                }
                ch.arc_lo = ch.direction + dev_lo;
                ch.arc_hi = ch.direction + dev_hi;
            }
            channels.push_back(std::move(ch));
        }
    }
    return channels;
}

ChannelVerdict classify_channel(const Channel& channel, const ScalarField& field,
                                const Expr& expr, double R) {
    ChannelVerdict v;
    std::vector<double> prof;
    std::vector<std::pair<int, int>> prof_argmax;
    for (size_t k = 0; k < channel.max_u.size(); ++k)
        if (channel.ring_filled[k]) {
            prof.push_back(channel.max_u[k]);
            prof_argmax.push_back(channel.ring_argmax[k]);
        }
    v.profile = prof;
    if (prof.size() < 2) return v;

    double m_first = prof.front();
    auto slack = [&](double m) { return std::max(0.05 * std::abs(m), 1e-9); };
    size_t kmax = 0;
    for (size_t k = 1; k < prof.size(); ++k)
        if (prof[k] > prof[kmax]) kmax = k;
    double m_peak = prof[kmax];

    // Increasing up to the peak, peak at (or next to) the outer end. The
    // very last ring may clip the window corners and dip, so it is exempt.
    bool increasing = kmax + 2 >= prof.size();
    for (size_t k = 0; k < kmax && increasing; ++k)
        if (prof[k + 1] < prof[k] - slack(prof[k])) increasing = false;

    if (increasing && m_peak > std::max(2.0 * m_first, 10.0)) {
        // Unbounded branch: pick R2 with log(R2/R) = M(r_max)/2 and test
        // whether the high-level component over the channel's peak, taken
        // inside the channel, is bounded by a single unbounded curve.
        v.level = 0.5 * m_peak;
        ScalarField restricted = field;
        std::fill(restricted.mask.begin(), restricted.mask.end(), 1);
        for (const auto& [i, j] : channel.cells)
            restricted.mask[i + static_cast<size_t>(field.window.nx) * j] =
                field.mask[i + static_cast<size_t>(field.window.nx) * j];
        auto lvl_contours = extract_contours(restricted, v.level);
        auto lvl_labels = label_components(restricted, true, v.level);
        int omega = lvl_labels.at(channel.peak_cell.first, channel.peak_cell.second,
                                  field.window.nx);
        if (omega >= 0) {
            int open = 0;
            for (const auto& ct : lvl_contours) {
                if (ct.closed) continue;
                if (contour_component(ct, restricted, lvl_labels, v.level) == omega) ++open;
            }
            v.omega_open_contours = open;
            if (open == 1) v.kind = VerdictKind::ContainsLogarithmicTract;
        }
        return v;
    }

    // Bounded branch: u must stay small across the profile and settle
    // towards 0 over the outer rings.
    bool settling = prof.back() < 0.5 && m_peak < 2.0;
    for (size_t k = std::max(kmax, prof.size() / 2); k + 1 < prof.size() && settling; ++k)
        if (prof[k + 1] > prof[k] + slack(prof[k])) settling = false;

    if (settling) {
        // Bounded branch: f approaches a finite value of modulus R along
        // the channel; estimate it at the three outermost rings.
        Complex sum{};
        int n = 0;
        for (size_t k = prof.size(); k-- > 0 && n < 3;) {
            auto [i, j] = prof_argmax[k];
            try {
                sum += expr.eval(field.window.point(i, j));
                ++n;
            } catch (const EvalError&) {}
        }
        if (n > 0) {
            Complex alpha = sum / static_cast<double>(n);
            if (std::abs(std::abs(alpha) - R) / R < 0.05) {
                v.kind = VerdictKind::AsymptoticValue;
                v.alpha = alpha;
            }
        }
        return v;
    }
    return v;
}

TractReport classify_tract(const TractRegion& tract,
                           const std::vector<ChannelVerdict>&,
                           int critical_count) {
    TractReport rep;
    if (tract.degenerate) {
        rep.label = TractReport::Label::Degenerate;
        return rep;
    }
    rep.label = (tract.m == 1 && tract.complete) ? TractReport::Label::Logarithmic
                                                 : TractReport::Label::Direct;
    if (critical_count >= 0 && tract.m >= 1 && critical_count > tract.m - 1)
        rep.bound_violation = true;
    return rep;
}

} // namespace tractscope
