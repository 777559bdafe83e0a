#ifndef TRANSOBS_CERTIFICATE_HPP
#define TRANSOBS_CERTIFICATE_HPP

#include <string>
#include <tuple>
#include <vector>

#include "transobs/field.hpp"
#include "transobs/geometry.hpp"
#include "transobs/vec.hpp"

namespace transobs {

/// Full admissibility certificate: the geometric quantities behind the
/// observability threshold T0 < t1 plus the proof parameters beta,
/// kappa, epsilon selected when the threshold holds.
struct AdmissibilityCertificate {
    Mode mode{Mode::degenerate};
    double c0{0.0};
    double eta{0.0};
    double rho{0.0};
    double T1{0.0};
    double t1{0.0};
    bool t1_constraint_holds_at_t1{false};
    Vec theta0;
    double R{0.0};
    Vec x0;
    double angle_margin{0.0};
    double delta{0.0};
    double d_m{0.0};
    double d_M{0.0};
    double T0{0.0};
    bool feasible{false};
    double beta{0.0};
    double kappa{0.0};
    double epsilon{0.0};
    std::vector<std::string> diagnostics;

    double margin() const { return t1 - T0; }
};

/// x0 = -R theta0 with theta0 the initial direction (H'(0)/|H'(0)| in
/// degenerate mode, H(0)/|H(0)| otherwise) and
/// R = (1+eta) (1+c0)/(1-c0) diam(Omega). Returns (x0, R, theta0).
std::tuple<Vec, double, Vec> select_observation_point(const SpatialDomain& domain,
                                                      const VectorField& field, double c0, Mode mode,
                                                      double eta);

/// min over a product grid (>=200 x >=10^3 samples) of the direction
/// cosine between H'(t) (or H(t)) and x - x0, minus (2 c0^2 - 1).
/// Nonnegative return certifies the angle bound.
double verify_angle_bound(const SpatialDomain& domain, const VectorField& field, const Vec& x0,
                          double c0, double window_hi, Mode mode, int time_samples = 256,
                          int space_samples = 1024);

/// Runs the full chain. Admissibility failures (positivity, undefined
/// direction, T0 >= t1, negative angle margin) yield feasible=false with
/// reasons in `diagnostics`; they do not throw. Structural errors
/// (dimension mismatch, bad c0) throw.
AdmissibilityCertificate build_certificate(const SpatialDomain& domain, const VectorField& field,
                                           double c0, Mode mode, double eta);

/// Energy continuity composition: C2 = sqrt(C1^2 + C_energy).
double combine_constants(double c1, double c_energy);

/// Checks every invariant on a feasible certificate; throws on violation.
/// With a domain, additionally checks the open bound
/// R > (1+c0)/(1-c0) diam(Omega) and that x0 is exterior.
void audit_certificate(const AdmissibilityCertificate& cert, const SpatialDomain* domain = nullptr);

}  // namespace transobs

#endif
