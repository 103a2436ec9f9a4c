#pragma once

#include "tractscope/tracts.hpp"

namespace tractscope {

struct Rect {
    double x0, y0, x1, y1;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double diag() const { return std::hypot(width(), height()); }
    Complex center() const { return Complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)); }
    bool contains(const Complex& z, double margin = 0.0) const {
        return z.real() >= x0 - margin && z.real() <= x1 + margin &&
               z.imag() >= y0 - margin && z.imag() <= y1 + margin;
    }
};

struct CritError : std::runtime_error {
    enum class Kind { BoundaryZero, Residual };
    Kind kind;
    CritError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// Winding number of d along the rectangle boundary = number of zeros inside,
// with multiplicity. Argument continuation is adaptive: steps are halved
// until each principal-value increment is below pi/2, and the final total
// must sit within 0.05 of an integer multiple of 2*pi. A zero detected on
// the boundary triggers a deterministic translation retry (when allowed).
int count_zeros(const Expr& d, const Rect& rect, bool allow_perturb = true);

struct LocatedZero {
    Complex z;
    int multiplicity = 0;
    bool resolved = true;  // false: Newton failed, position is a cell center
};

// Quadtree refinement of count_zeros down to isolated zeros, polished by
// Newton iteration; multiplicity read off a winding circle of radius 1e-3.
std::vector<LocatedZero> locate_zeros(const Expr& d, const Rect& rect,
                                      int target_count);

// Zeros of d inside the window portion of the tract: the tract bounding box
// is tiled (tiles jittered off the sample grid), tiles without tract cells
// are skipped, interior tiles are counted wholesale, and tiles straddling
// the boundary have each located zero tested for membership (u > 0 at the
// zero, against the original expression f).
int tract_critical_count(const TractRegion& tract, const ScalarField& field,
                         const ComponentLabels& labels, const Expr& f,
                         const Expr& d);

} // namespace tractscope
