#pragma once

#include <vector>

#include "tractscope/log_complex.hpp"

namespace tractscope {

// Positive harmonic sum of Poisson kernels on the unit disc:
// u(t) = sum c_k Re((zeta_k + t)/(zeta_k - t)), |zeta_k| = 1, c_k > 0,
// the exactly solvable tract model f(phi(t)) = R e^{i theta} exp(sum ...).
struct PoissonModel {
    double R = 1.0;
    double theta = 0.0;
    std::vector<Complex> zeta;
    std::vector<double> c;

    size_t n() const { return zeta.size(); }
    bool valid() const;
};

double model_u(const PoissonModel& m, const Complex& t);
LogComplex model_eval(const PoissonModel& m, const Complex& t);

struct ModelCriticalPoints {
    std::vector<Complex> roots;     // finite roots of sum c_k 2 zeta_k / (zeta_k - t)^2
    std::vector<bool> in_disc;
    int nominal_degree = 0;         // 2n - 2
    int actual_degree = 0;          // after leading-coefficient cancellation
    int degree_drop() const { return nominal_degree - actual_degree; }
    int in_disc_count() const;
};

ModelCriticalPoints model_critical_points(const PoissonModel& m);

// Multiset invariance of the roots under t -> 1/conj(t); degree-drop roots
// pair with infinity (whose reflection is 0).
bool check_reflection_pairing(const PoissonModel& m, const ModelCriticalPoints& cp,
                              double tol = 1e-8);

// Covering fibers for the n = 1 model: all preimages t_j of w with |w| > R,
// one per branch of the logarithm.
std::vector<Complex> fiber_enumerate(const PoissonModel& m, const Complex& w,
                                     int j_min, int j_max);

struct Horodisc {
    double c = 0.0, Rj = 0.0;
    double center = 0.0, radius = 0.0;  // disc {|t - center| < radius}, tangent at 1
};

Horodisc horodisc_geometry(double c, double Rj);

// Transfer of the model to the right half-plane: U(x+iy) = c x plus a
// piecewise-constant density on the imaginary axis.
struct HalfPlaneDensity {
    struct Interval { double a, b, w; };  // [a, b] with density w >= 0
    std::vector<Interval> intervals;
    double c = 1.0;
};

double halfplane_U(const HalfPlaneDensity& d, double x, double y);

// x0 beyond which dU/dx > 0 for every y: x0 = sqrt(2 * total mass / c).
double monotonicity_threshold(const HalfPlaneDensity& d);

struct OmegaCurve {
    bool single = false;
    std::vector<std::pair<double, double>> points;  // (y, X(y))
};

// Solve U(x, y) = level for x on a y-grid by bisection in the monotone
// half-plane x > x0. Throws if the level set escapes it.
OmegaCurve omega_single_curve(const HalfPlaneDensity& d, double level,
                              double y_lo = 0.0, double y_hi = 0.0, int ny = 201);

} // namespace tractscope
