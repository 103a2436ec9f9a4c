#include "tractscope/critpoints.hpp"

#include <algorithm>
#include <cmath>

namespace tractscope {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

LogComplex eval_nonzero(const Expr& d, const Complex& z) {
    LogComplex lc = d.eval_log(z);
    if (lc.is_zero)
        throw CritError(CritError::Kind::BoundaryZero, "zero of f' on integration path");
    return lc;
}

// Principal-value argument increment from a to b, refined until each step
// is below pi/2. Exhausting the depth budget means the argument turns too
// fast to resolve, which in practice is a zero sitting on the path.
double delta_arg(const Expr& d, const Complex& a, const Complex& b,
                 const LogComplex& la, const LogComplex& lb, int depth) {
    double step = std::remainder(lb.arg - la.arg, kTwoPi);
    if (std::abs(step) < M_PI / 2.0) return step;
    if (depth <= 0)
        throw CritError(CritError::Kind::BoundaryZero,
                        "argument continuation failed to converge");
    Complex m = 0.5 * (a + b);
    LogComplex lm = eval_nonzero(d, m);
    return delta_arg(d, a, m, la, lm, depth - 1) +
           delta_arg(d, m, b, lm, lb, depth - 1);
}

// Total argument change along the polyline a -> b with an initial
// subdivision guarding against aliasing over long segments.
double delta_arg_segment(const Expr& d, const Complex& a, const Complex& b,
                         int initial_pieces) {
    double total = 0.0;
    Complex prev = a;
    LogComplex lprev = eval_nonzero(d, prev);
    for (int k = 1; k <= initial_pieces; ++k) {
        Complex next = a + (b - a) * (static_cast<double>(k) / initial_pieces);
        LogComplex lnext = eval_nonzero(d, next);
        total += delta_arg(d, prev, next, lprev, lnext, 48);
        prev = next;
        lprev = lnext;
    }
    return total;
}

int winding_to_count(double total) {
    double turns = total / kTwoPi;
    long n = std::lround(turns);
    if (std::abs(turns - n) >= 0.05)
        throw CritError(CritError::Kind::Residual,
                        "non-integer winding residual " + std::to_string(turns - n));
    if (n < 0)
        throw CritError(CritError::Kind::Residual,
                        "negative winding (pole on contour?)");
    return static_cast<int>(n);
}

int count_zeros_once(const Expr& d, const Rect& r) {
    Complex c00(r.x0, r.y0), c10(r.x1, r.y0), c11(r.x1, r.y1), c01(r.x0, r.y1);
    double total = delta_arg_segment(d, c00, c10, 16) +
                   delta_arg_segment(d, c10, c11, 16) +
                   delta_arg_segment(d, c11, c01, 16) +
                   delta_arg_segment(d, c01, c00, 16);
    return winding_to_count(total);
}

// Zeros inside the circle |z - c| = radius.
int count_zeros_circle(const Expr& d, const Complex& c, double radius) {
    double total = 0.0;
    const int pieces = 64;
    Complex prev = c + Complex(radius, 0.0);
    LogComplex lprev = eval_nonzero(d, prev);
    for (int k = 1; k <= pieces; ++k) {
        double th = kTwoPi * k / pieces;
        Complex next = c + std::polar(radius, th);
        LogComplex lnext = eval_nonzero(d, next);
        total += delta_arg(d, prev, next, lprev, lnext, 48);
        prev = next;
        lprev = lnext;
    }
    return winding_to_count(total);
}

} // namespace

int count_zeros(const Expr& d, const Rect& rect, bool allow_perturb) {
    // deterministic translation offsets, in units of 1e-3 * min extent
    static const double kOffsets[4][2] = {{0, 0}, {0.5, 0.5}, {-0.5, 1.0}, {1.0, -0.5}};
    double delta = 1e-3 * std::min(rect.width(), rect.height());
    int tries = allow_perturb ? 4 : 1;
    for (int t = 0; t < tries; ++t) {
        Rect r{rect.x0 + kOffsets[t][0] * delta, rect.y0 + kOffsets[t][1] * delta,
               rect.x1 + kOffsets[t][0] * delta, rect.y1 + kOffsets[t][1] * delta};
        try {
            return count_zeros_once(d, r);
        } catch (const CritError&) {
            if (t + 1 == tries) throw;
        }
    }
    throw CritError(CritError::Kind::BoundaryZero, "unreachable");
}

namespace {

// Plain Newton, then multiplicity-accelerated polishing once the local
// winding has fixed the multiplicity.
Complex newton(const Expr& d, const Expr& dd, Complex z, int iters, int mult) {
    for (int k = 0; k < iters; ++k) {
        LogComplex num = d.eval_log(z);
        if (num.is_zero) return z;
        LogComplex den = dd.eval_log(z);
        if (den.is_zero) return z;
        Complex step = lc_div(num, den).value();
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return z;
        z -= static_cast<double>(mult) * step;
    }
    return z;
}

struct Locator {
    const Expr& d;
    Expr dd;
    std::vector<LocatedZero> out;

    void refine_leaf(const Rect& r, int n) {
        Complex z = newton(d, dd, r.center(), 60, 1);
        bool ok = std::isfinite(z.real()) && std::isfinite(z.imag()) &&
                  r.contains(z, 0.25 * r.diag());
        int mult = 0;
        if (ok) {
            try {
                mult = count_zeros_circle(d, z, 1e-3);
            } catch (const CritError&) {
                ok = false;
            }
        }
        // mult > n happens when a subdivision cut ran through a multiple
        // zero and its winding was shared between sibling leaves; each leaf
        // then converges to the same point, deduplicated by the caller.
        if (ok && mult >= n) {
            if (mult > 1) z = newton(d, dd, z, 40, mult);
            out.push_back({z, mult, true});
            return;
        }
        if (r.diag() > 2e-3) {
            split(r, n);
            return;
        }
        out.push_back({r.center(), n, false});
    }

    void split(const Rect& r, int n) {
        // fraction sequence keeps subdivision lines off zeros deterministically
        static const double kFracs[4][2] = {{0.5, 0.5}, {0.47, 0.53}, {0.53, 0.47}, {0.41, 0.61}};
        for (int t = 0; t < 4; ++t) {
            double xm = r.x0 + kFracs[t][0] * r.width();
            double ym = r.y0 + kFracs[t][1] * r.height();
            Rect quads[4] = {{r.x0, r.y0, xm, ym},
                             {xm, r.y0, r.x1, ym},
                             {r.x0, ym, xm, r.y1},
                             {xm, ym, r.x1, r.y1}};
            int counts[4];
            int sum = 0;
            try {
                for (int q = 0; q < 4; ++q) {
                    counts[q] = count_zeros(d, quads[q], false);
                    sum += counts[q];
                }
            } catch (const CritError&) {
                continue;
            }
            if (sum != n) continue;  // a zero straddles a cut; try other fractions
            for (int q = 0; q < 4; ++q)
                if (counts[q] > 0) recurse(quads[q], counts[q]);
            return;
        }
        throw CritError(CritError::Kind::BoundaryZero,
                        "could not subdivide around boundary zeros");
    }

    void recurse(const Rect& r, int n) {
        if (n == 0) return;
        if (r.diag() <= 0.05) refine_leaf(r, n);
        else split(r, n);
    }
};

} // namespace

std::vector<LocatedZero> locate_zeros(const Expr& d, const Rect& rect,
                                      int target_count) {
    Locator loc{d, d.derivative(), {}};
    loc.recurse(rect, target_count);
    // merge duplicates from cut-straddling zeros; genuinely distinct zeros
    // closer than 1e-4 are below the resolver's separation anyway
    std::vector<LocatedZero> dedup;
    for (const LocatedZero& z : loc.out) {
        bool merged = false;
        for (LocatedZero& e : dedup)
            if (e.resolved && z.resolved && std::abs(e.z - z.z) < 1e-4) {
                e.multiplicity = std::max(e.multiplicity, z.multiplicity);
                merged = true;
                break;
            }
        if (!merged) dedup.push_back(z);
    }
    return dedup;
}

int tract_critical_count(const TractRegion& tract, const ScalarField& field,
                         const ComponentLabels& labels, const Expr& f,
                         const Expr& d) {
    const Window& w = field.window;
    int i0 = w.nx, i1 = -1, j0 = w.ny, j1 = -1;
    for (int j = 0; j < w.ny; ++j)
        for (int i = 0; i < w.nx; ++i)
            if (labels.at(i, j, w.nx) == tract.id) {
                i0 = std::min(i0, i); i1 = std::max(i1, i);
                j0 = std::min(j0, j); j1 = std::max(j1, j);
            }
    if (i1 < 0) return 0;

    const int kTile = 16;  // grid cells per tile side
    const double jitter = 0.37;  // keeps tile lines off grid nodes (and off
                                 // symmetric zero locations like the axes)
    double dx = w.dx(), dy = w.dy();
    double tile_w = kTile * dx, tile_h = kTile * dy;
    double x_base = w.x(i0) - (1.0 - jitter) * dx;
    double y_base = w.y(j0) - (1.0 - jitter) * dy;
    int na = static_cast<int>(std::ceil((w.x(i1) - x_base) / tile_w));
    int nb = static_cast<int>(std::ceil((w.y(j1) - y_base) / tile_h));

    double log_r = std::log(tract.R);
    auto member = [&](const Complex& z) {
        LogComplex lc = f.eval_log(z);
        if (lc.is_zero || lc.log_mod - log_r <= 0.0) return false;
        int ci = std::clamp(static_cast<int>(std::lround((z.real() - w.x_min) / dx)), 0, w.nx - 1);
        int cj = std::clamp(static_cast<int>(std::lround((z.imag() - w.y_min) / dy)), 0, w.ny - 1);
        if (labels.at(ci, cj, w.nx) == tract.id) return true;
        // fall back to the surrounding cell corners
        int bi = std::clamp(static_cast<int>((z.real() - w.x_min) / dx), 0, w.nx - 2);
        int bj = std::clamp(static_cast<int>((z.imag() - w.y_min) / dy), 0, w.ny - 2);
        for (int dj2 = 0; dj2 <= 1; ++dj2)
            for (int di2 = 0; di2 <= 1; ++di2)
                if (labels.at(bi + di2, bj + dj2, w.nx) == tract.id) return true;
        return false;
    };

    int total = 0;
    for (int b = 0; b < nb; ++b)
        for (int a = 0; a < na; ++a) {
            Rect tile{x_base + a * tile_w, y_base + b * tile_h,
                      x_base + (a + 1) * tile_w, y_base + (b + 1) * tile_h};
            int gi0 = std::max(i0, static_cast<int>(std::ceil((tile.x0 - w.x_min) / dx)));
            int gi1 = std::min(i1, static_cast<int>(std::floor((tile.x1 - w.x_min) / dx)));
            int gj0 = std::max(j0, static_cast<int>(std::ceil((tile.y0 - w.y_min) / dy)));
            int gj1 = std::min(j1, static_cast<int>(std::floor((tile.y1 - w.y_min) / dy)));
            bool has_tract = false, has_other = false;
            for (int j = gj0; j <= gj1; ++j)
                for (int i = gi0; i <= gi1; ++i)
                    (labels.at(i, j, w.nx) == tract.id ? has_tract : has_other) = true;
            if (!has_tract) continue;
            int n = count_zeros(d, tile);
            if (n == 0) continue;
            if (!has_other) {
                total += n;
                continue;
            }
            for (const LocatedZero& zc : locate_zeros(d, tile, n))
                if (member(zc.z)) total += zc.multiplicity;
        }
    return total;
}

} // namespace tractscope
