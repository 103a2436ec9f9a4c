#include "tractscope/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

namespace tractscope {

double Window::circumradius() const {
    double r = 0.0;
    for (double cx : {x_min, x_max})
        for (double cy : {y_min, y_max})
            r = std::max(r, std::hypot(cx, cy));
    return r;
}

double Window::inradius() const {
    // distance from the origin to the nearest window edge; 0 if the origin
    // is outside the window
    if (x_min > 0 || x_max < 0 || y_min > 0 || y_max < 0) return 0.0;
    return std::min({x_max, -x_min, y_max, -y_min});
}

int worker_thread_count() {
    if (const char* env = std::getenv("TRACTSCOPE_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return std::min(n, 64);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

ScalarField sample_field(const Expr& expr, const Window& window, double R) {
    if (!window.valid()) throw std::invalid_argument("degenerate window");
    if (!(R > 0.0)) throw std::invalid_argument("boundary value R must be positive");
    const double log_r = std::log(R);
    ScalarField field;
    field.window = window;
    field.values.assign(static_cast<size_t>(window.nx) * window.ny, 0.0);
    field.mask.assign(field.values.size(), 0);

    auto sample_rows = [&](int j0, int j1) {
        for (int j = j0; j < j1; ++j) {
            for (int i = 0; i < window.nx; ++i) {
                size_t idx = i + static_cast<size_t>(window.nx) * j;
                try {
                    LogComplex lc = expr.eval_log(window.point(i, j));
                    double u = lc.log_mod - log_r;
                    if (lc.is_zero || !std::isfinite(u)) field.mask[idx] = 1;
                    else field.values[idx] = u;
                } catch (const EvalError&) {
                    field.mask[idx] = 1;
                }
            }
        }
    };

    int nthreads = std::min(worker_thread_count(), window.ny);
    if (nthreads <= 1) {
        sample_rows(0, window.ny);
    } else {
        std::vector<std::thread> workers;
        int chunk = (window.ny + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            int j0 = t * chunk, j1 = std::min(window.ny, j0 + chunk);
            if (j0 >= j1) break;
            workers.emplace_back(sample_rows, j0, j1);
        }
        for (auto& w : workers) w.join();
    }
    return field;
}

// ---------------------------------------------------------------------------
// Marching squares
// ---------------------------------------------------------------------------

namespace {

// Grid-edge identifier: horizontal edge (i,j)-(i+1,j) or vertical (i,j)-(i,j+1).
struct EdgeKey {
    bool horizontal;
    int i, j;
    auto operator<=>(const EdgeKey&) const = default;
};

struct Segment {
    EdgeKey e1, e2;
    bool used = false;
};

Complex crossing_point(const ScalarField& f, const EdgeKey& e, double level) {
    const Window& w = f.window;
    double u1, u2, x1, y1, x2, y2;
    if (e.horizontal) {
        u1 = f.at(e.i, e.j); u2 = f.at(e.i + 1, e.j);
        x1 = w.x(e.i); x2 = w.x(e.i + 1);
        y1 = y2 = w.y(e.j);
    } else {
        u1 = f.at(e.i, e.j); u2 = f.at(e.i, e.j + 1);
        x1 = x2 = w.x(e.i);
        y1 = w.y(e.j); y2 = w.y(e.j + 1);
    }
    double t = (u2 == u1) ? 0.5 : (level - u1) / (u2 - u1);
    t = std::clamp(t, 0.0, 1.0);
    return Complex(x1 + t * (x2 - x1), y1 + t * (y2 - y1));
}

bool on_border(const EdgeKey& e, const Window& w, WindowEdge* which) {
    if (e.horizontal) {
        if (e.j == 0) { *which = WindowEdge::Bottom; return true; }
        if (e.j == w.ny - 1) { *which = WindowEdge::Top; return true; }
    } else {
        if (e.i == 0) { *which = WindowEdge::Left; return true; }
        if (e.i == w.nx - 1) { *which = WindowEdge::Right; return true; }
    }
    return false;
}

} // namespace

std::vector<Contour> extract_contours(const ScalarField& field, double level) {
    const Window& w = field.window;
    std::vector<Segment> segments;
    segments.reserve(1024);

    for (int j = 0; j + 1 < w.ny; ++j) {
        for (int i = 0; i + 1 < w.nx; ++i) {
            if (field.masked(i, j) || field.masked(i + 1, j) ||
                field.masked(i, j + 1) || field.masked(i + 1, j + 1))
                continue;
            bool a = field.at(i, j) > level;          // bottom-left
            bool b = field.at(i + 1, j) > level;      // bottom-right
            bool c = field.at(i + 1, j + 1) > level;  // top-right
            bool d = field.at(i, j + 1) > level;      // top-left
            int code = (a ? 1 : 0) | (b ? 2 : 0) | (c ? 4 : 0) | (d ? 8 : 0);
            if (code == 0 || code == 15) continue;

            EdgeKey bottom{true, i, j}, top{true, i, j + 1};
            EdgeKey left{false, i, j}, right{false, i + 1, j};

            auto emit = [&](EdgeKey p, EdgeKey q) { segments.push_back({p, q}); };
            switch (code) {
                case 1: case 14: emit(left, bottom); break;
                case 2: case 13: emit(bottom, right); break;
                case 3: case 12: emit(left, right); break;
                case 4: case 11: emit(right, top); break;
                case 6: case 9: emit(bottom, top); break;
                case 7: case 8: emit(left, top); break;
                case 5: case 10: {
                    // saddle: pair by the cell-center sample sign
                    double center = 0.25 * (field.at(i, j) + field.at(i + 1, j) +
                                            field.at(i + 1, j + 1) + field.at(i, j + 1));
                    bool center_pos = center > level;
                    bool connect_a_c = (code == 5) == center_pos;
                    if (connect_a_c) { emit(left, top); emit(bottom, right); }
                    else { emit(left, bottom); emit(right, top); }
                    break;
                }
            }
        }
    }

    // edge -> indices of incident segments (at most 2)
    std::map<EdgeKey, std::vector<int>> incident;
    for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
        incident[segments[s].e1].push_back(s);
        incident[segments[s].e2].push_back(s);
    }

    std::vector<Contour> contours;
    auto walk = [&](int start_seg, EdgeKey start_edge, bool expect_closed) {
        Contour contour;
        contour.points.push_back(crossing_point(field, start_edge, level));
        int seg = start_seg;
        EdgeKey edge = start_edge;
        while (true) {
            segments[seg].used = true;
            edge = (segments[seg].e1 == edge) ? segments[seg].e2 : segments[seg].e1;
            Complex p = crossing_point(field, edge, level);
            if (contour.points.empty() || p != contour.points.back())
                contour.points.push_back(p);
            int next = -1;
            for (int s : incident[edge])
                if (!segments[s].used) { next = s; break; }
            if (next < 0) break;
            seg = next;
        }
        contour.closed = expect_closed;
        if (expect_closed && contour.points.front() != contour.points.back())
            contour.points.push_back(contour.points.front());
        if (!expect_closed) {
            WindowEdge which;
            if (on_border(start_edge, w, &which)) contour.exits.push_back(which);
            if (on_border(edge, w, &which)) contour.exits.push_back(which);
        }
        if (contour.points.size() >= 3) contours.push_back(std::move(contour));
    };

    // open contours first: start at edges incident to exactly one segment
    for (const auto& [edge, segs] : incident) {
        if (segs.size() != 1) continue;
        if (!segments[segs[0]].used) walk(segs[0], edge, false);
    }
    // remaining segments form closed loops
    for (int s = 0; s < static_cast<int>(segments.size()); ++s)
        if (!segments[s].used) walk(s, segments[s].e1, true);

    return contours;
}

ComponentLabels label_components(const ScalarField& field, bool positive, double level) {
    const Window& w = field.window;
    ComponentLabels out;
    out.labels.assign(static_cast<size_t>(w.nx) * w.ny, -1);
    auto in_set = [&](int i, int j) {
        if (field.masked(i, j)) return false;
        double u = field.at(i, j);
        return positive ? (u > level) : (u < level);
    };
    std::vector<std::pair<int, int>> stack;
    for (int j = 0; j < w.ny; ++j) {
        for (int i = 0; i < w.nx; ++i) {
            size_t idx = i + static_cast<size_t>(w.nx) * j;
            if (out.labels[idx] >= 0 || !in_set(i, j)) continue;
            int32_t lab = out.count++;
            stack.push_back({i, j});
            out.labels[idx] = lab;
            while (!stack.empty()) {
                auto [ci, cj] = stack.back();
                stack.pop_back();
                const int di[4] = {1, -1, 0, 0};
                const int dj[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    int ni = ci + di[d], nj = cj + dj[d];
                    if (ni < 0 || nj < 0 || ni >= w.nx || nj >= w.ny) continue;
                    size_t nidx = ni + static_cast<size_t>(w.nx) * nj;
                    if (out.labels[nidx] >= 0 || !in_set(ni, nj)) continue;
                    out.labels[nidx] = lab;
                    stack.push_back({ni, nj});
                }
            }
        }
    }
    return out;
}

} // namespace tractscope
