#ifndef TRANSOBS_CARLEMAN_HPP
#define TRANSOBS_CARLEMAN_HPP

#include <optional>
#include <vector>

#include "transobs/certificate.hpp"
#include "transobs/field.hpp"
#include "transobs/geometry.hpp"
#include "transobs/numerics.hpp"
#include "transobs/quadrature.hpp"
#include "transobs/testfunction.hpp"

namespace transobs {

/// Carleman weight phi = |x-x0|^2 - beta t^2 (degenerate, two-sided
/// window) or psi = |x-x0|^2 - beta t (non-degenerate). `shift` is the
/// normalization Lambda subtracted inside every exponential; it cancels
/// homogeneously and defaults to d_M so shifted exponents stay <= 0.
struct CarlemanWeight {
    Mode mode{Mode::degenerate};
    Vec x0;
    double beta{0.0};
    double shift{0.0};
};

struct WeightEval {
    double value;    // phi or psi, raw
    double shifted;  // value - shift
    double A;        // A phi / A psi
    double A2;       // A^2 phi / A^2 psi
};

WeightEval weight_eval(const CarlemanWeight& weight, const VectorField& field, const Vec& x, double t);

/// Tensor quadrature over the space-time cylinder Omega x (t_lo, t_hi):
/// volume, lateral boundary, and the two endpoint slices share the same
/// refinement level (8 * 2^L nodes per axis).
struct CylinderGrids {
    SpaceGrid space;
    SurfaceGrid surface;
    Grid1D time;
    std::vector<double> xs, ys;  // flattened space coordinates (ys empty in d=1)
    std::vector<double> sw;     // space weights
    double t_lo{0.0}, t_hi{0.0};
    int level{0};
};

CylinderGrids cylinder_grids(const SpatialDomain& domain, double t_lo, double t_hi, int level);

/// One integral accumulated two ways: plain compensated summation and,
/// when requested, signed log-domain accumulation for large s.
struct TermValue {
    double direct{0.0};
    SignedLog logv;
};

/// All raw integrals the identity and inequality checks need, computed in
/// one sweep (shared exponential weights). Every entry carries the factor
/// e^{2s(weight - shift)}.
struct CarlemanTerms {
    TermValue vol_w2;       // int_Q w^2
    TermValue vol_Aw2;      // int_Q (Aw)^2
    TermValue vol_A2w2;     // int_Q (A^2 phi) w^2
    TermValue vol_Asq_w2;   // int_Q (A phi)^2 w^2
    TermValue vol_ibp_lhs;  // int_Q 2 (Aw + s (A phi) w)(-s (A phi)) w
    TermValue sigma_flux;   // int_Sigma (A phi)(H.nu) w^2
    TermValue end_hi;       // int_Omega (A phi) w^2 at t_hi
    TermValue end_lo;       // int_Omega (A phi) w^2 at t_lo
};

CarlemanTerms carleman_terms(const TestFunction& w, const VectorField& field,
                             const CarlemanWeight& weight, const CylinderGrids& grids, double s,
                             bool log_domain, int workers);

/// Relative residual of the exact integration-by-parts identity
///   2(Az, -s(Aphi) z) = s int A2phi |z|^2 - s int_Sigma Aphi (H.nu)|z|^2
///                       - s int_Omega [Aphi |z|^2]
/// with z = e^{s(phi-shift)} w. Converges to 0 under refinement.
double ibp_identity_residual(const TestFunction& w, const VectorField& field,
                             const CarlemanWeight& weight, const CylinderGrids& grids, double s,
                             int workers);

enum class SlackForm {
    degenerate_sharp,     // 2(delta-beta) s |z|^2 vs RHS (driven by A^2 phi positivity)
    nondegenerate_exact,  // s^2 (Apsi)^2 + s A^2 psi vs RHS (exact chain)
    nondegenerate_final,  // ((2 delta - beta)^2 / 2) s^2 vs RHS, valid for s >= s_*
};

struct SlackBreakdown {
    double s{0.0};
    int level{0};
    bool log_domain{false};
    double lhs{0.0};
    double rhs_volume{0.0};
    double rhs_sigma{0.0};
    double rhs_endpoint{0.0};
    double slack{0.0};
    double tol_quad{0.0};
    SignedLog slack_log, tol_log;
    bool pass{false};
};

/// Sharp-constant inequality slack (RHS - LHS), with the quadrature
/// tolerance from comparing the level-L and level-(L+1) term values.
/// Degenerate form runs on (-t1, t1) with the reflected field.
SlackBreakdown carleman_slack(const TestFunction& w, const VectorField& base_field,
                              const AdmissibilityCertificate& cert, const SpatialDomain& domain,
                              double s, int level, SlackForm form, int workers,
                              std::optional<double> shift_override = std::nullopt,
                              std::optional<bool> log_domain_override = std::nullopt);

/// Whether log-domain accumulation turns on automatically at this s.
bool log_domain_needed(const AdmissibilityCertificate& cert, double s);

/// max |A^2 psi| over the closed cylinder, sampled on a dense grid that
/// includes the boundary and both endpoint times.
double max_abs_A2(const CarlemanWeight& weight, const VectorField& field, const SpatialDomain& domain,
                  double t_lo, double t_hi);

/// s_* = 2 M / (2 delta - beta)^2 for the non-degenerate final form.
double s_star(const AdmissibilityCertificate& cert, const VectorField& field,
              const SpatialDomain& domain);

/// | d/dt ||u(.,t)||^2 + int_boundary (H.nu) g^2 |, the energy identity
/// residual with an order-2 central difference in t.
double energy_residual(const SpatialProfile& u0, const VectorField& field, const SpatialDomain& domain,
                       double t, double h, int level);

/// C_E = max_{[0,T]} |H| (bounds |H.nu|).
double energy_bound_constant(const VectorField& field);

/// min over the closed cylinder of H'(t).(x-x0) - delta (degenerate, on
/// [-t1,t1] with the reflected field) or H(t).(x-x0) - delta. Must be
/// >= -1e-9 on feasible certificates.
double pointwise_bound_margin(const AdmissibilityCertificate& cert, const VectorField& base_field,
                              const SpatialDomain& domain, double window_hi);

}  // namespace transobs

#endif
