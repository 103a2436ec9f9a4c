#include "tractscope/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace tractscope {

bool PoissonModel::valid() const {
    if (zeta.empty() || zeta.size() != c.size() || R <= 0.0) return false;
    for (size_t k = 0; k < zeta.size(); ++k) {
        if (std::abs(std::abs(zeta[k]) - 1.0) >= 1e-12) return false;
        if (c[k] <= 0.0) return false;
        for (size_t j = 0; j < k; ++j)
            if (zeta[j] == zeta[k]) return false;
    }
    return true;
}

static void require_in_disc(const Complex& t) {
    if (std::abs(t) >= 1.0)
        throw std::domain_error("model evaluation requires |t| < 1");
}

double model_u(const PoissonModel& m, const Complex& t) {
    require_in_disc(t);
    double u = 0.0;
    for (size_t k = 0; k < m.n(); ++k)
        u += m.c[k] * ((m.zeta[k] + t) / (m.zeta[k] - t)).real();
    return u;
}

LogComplex model_eval(const PoissonModel& m, const Complex& t) {
    require_in_disc(t);
    Complex s{};
    for (size_t k = 0; k < m.n(); ++k)
        s += m.c[k] * ((m.zeta[k] + t) / (m.zeta[k] - t));
    return LogComplex{std::log(m.R) + s.real(), m.theta + s.imag(), false};
}

namespace {

// coefficient-vector product, ascending powers
std::vector<Complex> poly_mul(const std::vector<Complex>& a,
                              const std::vector<Complex>& b) {
    std::vector<Complex> out(a.size() + b.size() - 1, Complex{});
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

std::vector<Complex> companion_roots(std::vector<Complex> p) {
    // p ascending, leading coefficient nonzero
    int deg = static_cast<int>(p.size()) - 1;
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -p[i] / p[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    std::vector<Complex> roots(deg);
    for (int i = 0; i < deg; ++i) roots[i] = solver.eigenvalues()(i);
    // Newton polish against the polynomial itself: eigenvalues of the
    // companion matrix are good starting points but can carry 1e-7-level
    // error when roots cluster.
    for (Complex& r : roots) {
        for (int it = 0; it < 8; ++it) {
            Complex val{}, der{};
            for (int i = deg; i >= 0; --i) {
                der = der * r + val;
                val = val * r + p[i];
            }
            if (der == Complex{}) break;
            Complex step = val / der;
            r -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
        }
    }
    // deterministic ordering for reproducible reports
    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

} // namespace

int ModelCriticalPoints::in_disc_count() const {
    int n = 0;
    for (bool b : in_disc) n += b ? 1 : 0;
    return n;
}

ModelCriticalPoints model_critical_points(const PoissonModel& m) {
    ModelCriticalPoints out;
    size_t n = m.n();
    out.nominal_degree = static_cast<int>(2 * n) - 2;
    if (n == 1) return out;  // u' never vanishes in the disc for one kernel

    // P(t) = sum_k 2 c_k zeta_k prod_{j != k} (zeta_j - t)^2
    std::vector<Complex> p(2 * n - 1, Complex{});
    for (size_t k = 0; k < n; ++k) {
        std::vector<Complex> prod{Complex(1.0, 0.0)};
        for (size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            std::vector<Complex> factor{m.zeta[j], Complex(-1.0, 0.0)};
            prod = poly_mul(prod, poly_mul(factor, factor));
        }
        for (size_t i = 0; i < prod.size(); ++i)
            p[i] += 2.0 * m.c[k] * m.zeta[k] * prod[i];
    }

    double max_coef = 0.0;
    for (const Complex& coef : p) max_coef = std::max(max_coef, std::abs(coef));
    int deg = static_cast<int>(p.size()) - 1;
    while (deg > 0 && std::abs(p[deg]) < 1e-10 * max_coef) --deg;
    out.actual_degree = deg;
    if (deg == 0) return out;

    p.resize(deg + 1);
    out.roots = companion_roots(std::move(p));
    out.in_disc.reserve(out.roots.size());
    for (const Complex& r : out.roots) out.in_disc.push_back(std::abs(r) < 1.0);
    return out;
}

bool check_reflection_pairing(const PoissonModel&, const ModelCriticalPoints& cp,
                              double tol) {
    // targets: finite roots plus degree_drop copies of "infinity"
    std::vector<Complex> roots = cp.roots;
    int inf_budget = cp.degree_drop();
    std::vector<bool> used(roots.size(), false);
    int zero_like = 0;
    for (const Complex& r : roots) {
        if (std::abs(r) < tol) {
            // reflection is infinity; must consume one degree-drop slot
            ++zero_like;
            continue;
        }
        Complex mirror = 1.0 / std::conj(r);
        double best = 1e300;
        int best_idx = -1;
        for (size_t s = 0; s < roots.size(); ++s) {
            if (used[s]) continue;
            double dist = std::abs(roots[s] - mirror);
            if (dist < best) { best = dist; best_idx = static_cast<int>(s); }
        }
        if (best_idx < 0 || best > tol * std::max(1.0, std::abs(mirror))) return false;
        used[best_idx] = true;
    }
    // every zero-root needs an infinity partner and vice versa
    return zero_like == inf_budget;
}

std::vector<Complex> fiber_enumerate(const PoissonModel& m, const Complex& w,
                                     int j_min, int j_max) {
    if (m.n() != 1)
        throw std::domain_error("fiber enumeration is closed-form only for n = 1");
    if (std::abs(w) <= m.R)
        throw std::domain_error("fiber target must satisfy |w| > R");
    double c = m.c[0];
    Complex base = std::log(w / m.R) - Complex(0.0, m.theta);
    std::vector<Complex> out;
    out.reserve(j_max - j_min + 1);
    for (int j = j_min; j <= j_max; ++j) {
        Complex s = base + Complex(0.0, 2.0 * M_PI * j);
        out.push_back(m.zeta[0] * (s - c) / (s + c));
    }
    return out;
}

Horodisc horodisc_geometry(double c, double Rj) {
    if (c <= 0.0 || Rj <= 0.0) throw std::domain_error("horodisc needs c, Rj > 0");
    // cP(t,1) > Rj  <=>  |t - Rj/(Rj+c)| < c/(Rj+c)
    return Horodisc{c, Rj, Rj / (Rj + c), c / (Rj + c)};
}

double halfplane_U(const HalfPlaneDensity& d, double x, double y) {
    if (x <= 0.0) throw std::domain_error("U is defined on the right half-plane");
    double u = d.c * x;
    for (const auto& iv : d.intervals)
        u += iv.w * (std::atan((iv.b - y) / x) - std::atan((iv.a - y) / x));
    return u;
}

double monotonicity_threshold(const HalfPlaneDensity& d) {
    double mass = 0.0;
    for (const auto& iv : d.intervals) mass += iv.w * (iv.b - iv.a);
    return std::sqrt(2.0 * mass / d.c);
}

OmegaCurve omega_single_curve(const HalfPlaneDensity& d, double level,
                              double y_lo, double y_hi, int ny) {
    if (y_lo >= y_hi) {
        // default: cover the support of the density with a generous margin
        double lo = -1.0, hi = 1.0;
        for (const auto& iv : d.intervals) {
            lo = std::min(lo, iv.a);
            hi = std::max(hi, iv.b);
        }
        double margin = 2.0 * (hi - lo) + 2.0;
        y_lo = lo - margin;
        y_hi = hi + margin;
    }
    double x0 = monotonicity_threshold(d);
    double x_lo = std::max(x0, 1e-12);
    double x_hi = level / d.c + 1.0;  // U >= c x, so U(x_hi) >= level + c

    OmegaCurve out;
    out.single = true;
    out.points.reserve(ny);
    for (int k = 0; k < ny; ++k) {
        double y = y_lo + (y_hi - y_lo) * k / (ny - 1);
        if (halfplane_U(d, x_lo, y) >= level)
            throw std::domain_error("level set escapes the monotone half-plane");
        double a = x_lo, b = x_hi;
        if (halfplane_U(d, b, y) <= level) {
            out.single = false;
            continue;
        }
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (a + b);
            (halfplane_U(d, mid, y) < level ? a : b) = mid;
        }
        out.points.push_back({y, 0.5 * (a + b)});
    }
    return out;
}

} // namespace tractscope
