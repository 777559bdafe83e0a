#ifndef TRANSOBS_GEOMETRY_HPP
#define TRANSOBS_GEOMETRY_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "transobs/vec.hpp"

namespace transobs {

/// Classification tolerance in domain length units.
inline constexpr double kBoundaryTol = 1e-12;
/// Parameter tolerance for boundary-crossing bisection.
inline constexpr double kCrossingTol = 1e-10;

enum class Region { interior, boundary, exterior };
enum class DomainKind { interval, box, ball };

struct BoundaryPoint {
    Vec x;          ///< coordinates on the boundary
    Vec normal;     ///< outward unit normal
    double weight;  ///< surface-measure quadrature weight
};

/// Bounded domain with the origin in its interior: an interval (d=1), an
/// axis-aligned box, or a ball. All geometric queries are closed-form.
class SpatialDomain {
  public:
    static SpatialDomain interval(double lo, double hi);
    static SpatialDomain box(const Vec& lo, const Vec& hi);
    static SpatialDomain ball(const Vec& center, double radius);

    DomainKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Vec& lower() const { return lo_; }
    const Vec& upper() const { return hi_; }
    const Vec& center() const { return center_; }
    double radius() const { return radius_; }

    /// Signed boundary gauge: negative inside, zero on the boundary,
    /// positive outside; in length units near the boundary.
    double boundary_gauge(const Vec& x) const;

    Region classify(const Vec& x) const;

    /// Outward unit normal at a boundary point. Accepts points within
    /// `tol` of the boundary (crossing results carry O(1e-10) slack).
    Vec outward_normal(const Vec& x, double tol = 1e-8) const;

    double diameter() const;

    /// inf_{x in Omega} |x - x0| for exterior x0.
    double exterior_distance(const Vec& x0) const;

    /// (min, max) of |x - x0|^2 over the closure, for exterior x0.
    std::pair<double, double> radius_extrema(const Vec& x0) const;

    std::string describe() const;

  private:
    SpatialDomain() = default;
    void validate() const;

    DomainKind kind_{DomainKind::interval};
    int dim_{1};
    Vec lo_, hi_;      // interval/box bounds
    Vec center_;       // ball center
    double radius_{0};
};

struct Crossing {
    double sigma;
    BoundaryPoint point;
};

/// All parameters in [lo, hi] where the continuous path crosses the
/// boundary, located by a sign scan plus bisection to kCrossingTol.
/// Tangential touches below the scan resolution are not detected.
std::vector<Crossing> boundary_crossings(const SpatialDomain& domain,
                                         const std::function<Vec(double)>& path, double lo, double hi,
                                         int scan_samples = 2048);

/// Deterministic sample of the closed domain (interior lattice plus the
/// boundary) with at least `target` points; used by minimum/maximum
/// scans over the closure.
std::vector<Vec> closure_sample_points(const SpatialDomain& domain, int target);

}  // namespace transobs

#endif
