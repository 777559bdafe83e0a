#ifndef TRANSOBS_QUADRATURE_HPP
#define TRANSOBS_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "transobs/geometry.hpp"
#include "transobs/vec.hpp"

namespace transobs {

/// Gauss-Legendre nodes/weights on [-1, 1].
struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point rule, cached. Nodes by Newton iteration on P_n, accurate to
/// ~1e-15; exact for polynomials of degree 2n-1.
const Rule1D& gauss_legendre(int n);

/// Rule mapped to [a, b].
struct Grid1D {
    std::vector<double> x;
    std::vector<double> w;
};
Grid1D gauss_grid(double a, double b, int n);

/// Volume quadrature over the domain. Intervals and boxes use tensor
/// Gauss-Legendre; balls use a polar product rule with the r Jacobian.
struct SpaceGrid {
    std::vector<Vec> x;
    std::vector<double> w;
    int dim{1};
};
SpaceGrid volume_grid(const SpatialDomain& domain, int nodes_per_axis);

/// Surface quadrature over the boundary: the two endpoints (interval,
/// unit weights), Gauss-Legendre along each edge (box), or nodes in the
/// angle with arclength weights (ball).
struct SurfaceGrid {
    std::vector<BoundaryPoint> p;  // weight carried on the point
};
SurfaceGrid surface_grid(const SpatialDomain& domain, int nodes_per_axis);

/// Refinement ladder: nodes per axis at level L.
inline int nodes_per_axis(int level) { return 8 << level; }

/// Compensated-summation quadrature over a grid. Throws on a non-finite
/// integrand value, reporting the node.
double integrate(const SpaceGrid& grid, const std::function<double(const Vec&)>& f);
double integrate(const SurfaceGrid& grid, const std::function<double(const BoundaryPoint&)>& f);
/// Tensor space-time integral, time-major accumulation order.
double integrate(const Grid1D& time, const SpaceGrid& space,
                 const std::function<double(const Vec&, double)>& f);

}  // namespace transobs

#endif
