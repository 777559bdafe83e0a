#ifndef TRANSOBS_TRANSPORT_HPP
#define TRANSOBS_TRANSPORT_HPP

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "transobs/field.hpp"
#include "transobs/geometry.hpp"
#include "transobs/quadrature.hpp"
#include "transobs/testfunction.hpp"

namespace transobs {

/// Exact solution of du/dt + H . grad u = 0: u(x,t) = u0(x - X(t)).
double evaluate_solution(const SpatialProfile& u0, const VectorField& field, const Vec& x, double t);
Vec solution_gradient(const SpatialProfile& u0, const VectorField& field, const Vec& x, double t);
double solution_time_derivative(const SpatialProfile& u0, const VectorField& field, const Vec& x,
                                double t);

/// A solution paired with its (possibly reflected) field.
struct Solution {
    SpatialProfile u0;
    VectorField field;

    double value(const Vec& x, double t) const { return evaluate_solution(u0, field, x, t); }
};

/// Even time extension: the solution driven by the odd-reflected field,
/// defined on [-T, T] and even in t (the flow map is even). Requires a
/// degenerate-admissible field.
Solution extend_even(const SpatialProfile& u0, const VectorField& field);

/// Sampled lateral-boundary data g on a (boundary x time) grid.
struct BoundaryTrace {
    SurfaceGrid surface;
    Grid1D time;
    std::vector<double> values;  // values[k * n_surface + i]
    std::string provenance;
    bool flagged{false};
    std::string flag_reason;

    double& at(std::size_t time_idx, std::size_t surf_idx) {
        return values[time_idx * surface.p.size() + surf_idx];
    }
    double at(std::size_t time_idx, std::size_t surf_idx) const {
        return values[time_idx * surface.p.size() + surf_idx];
    }
};

/// Samples g = u on the (boundary x time) grid. Throws when a grid node
/// is off the domain boundary.
BoundaryTrace boundary_trace(const SpatialProfile& u0, const VectorField& field,
                             const SpatialDomain& domain, const SurfaceGrid& surface,
                             const Grid1D& time);

/// Trace squared L^2(Sigma) norm using the grid's own weights.
double trace_norm_squared(const BoundaryTrace& trace);

/// Grid-interpolated continuation of an ingested trace: nearest boundary
/// node, piecewise linear in time.
double trace_interpolate(const BoundaryTrace& trace, const Vec& boundary_x, double t);

/// Closed-form boundary data used for reconstruction.
using TraceFunction = std::function<double(const Vec&, double)>;
TraceFunction closed_form_trace(const SpatialProfile& u0, const VectorField& field);
TraceFunction interpolated_trace(const BoundaryTrace& trace);

struct Reconstruction {
    bool covered{false};
    double value{0.0};
    double sigma{0.0};  // crossing parameter when covered
    Vec exit_point;
};

/// Follows the characteristic through (x, t) over sigma in [lo, hi]
/// (defaults to the field window) and reads the trace where it first
/// meets the boundary. `uncovered` (covered=false) is a valid outcome.
Reconstruction reconstruct_from_trace(const TraceFunction& g, const VectorField& field,
                                      const SpatialDomain& domain, const Vec& x, double t);

/// Fraction of an interior space-time lattice whose characteristics meet
/// the lateral boundary within the window.
double coverage_fraction(const VectorField& field, const SpatialDomain& domain, int space_samples,
                         int time_samples);

/// CSV schema: header "boundary coords..., t, value"; 17 significant
/// digits; exact round-trip.
void export_trace_csv(std::ostream& os, const BoundaryTrace& trace, const SpatialDomain& domain);
BoundaryTrace import_trace_csv(std::istream& is, const SpatialDomain& domain);

}  // namespace transobs

#endif
