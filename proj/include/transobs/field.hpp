#ifndef TRANSOBS_FIELD_HPP
#define TRANSOBS_FIELD_HPP

#include <string>
#include <utility>
#include <vector>

#include "transobs/vec.hpp"

namespace transobs {

enum class Mode { degenerate, nondegenerate };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);

/// One closed-form term of a field component: a polynomial in t, or a
/// sinusoid a*sin(w t) / b*cos(w t). Terms carry exact derivatives and
/// antiderivatives, so flow maps stay oracle-exact.
struct FieldTerm {
    enum class Kind { poly, sine, cosine };
    Kind kind{Kind::poly};
    std::vector<double> coef;  // poly: c0 + c1 t + ... + ck t^k
    double amp{0.0};           // sine/cosine amplitude
    double omega{0.0};         // angular frequency

    double value(double t) const;
    double deriv(double t) const;
    double antideriv(double t) const;  // primitive with value 0 at t=0
};

struct ComponentFn {
    std::vector<FieldTerm> terms;
    std::string source;  // descriptor text it was parsed from

    double value(double t) const;
    double deriv(double t) const;
    double antideriv(double t) const;
};

/// Parses a component descriptor, e.g. "poly:0,1" or
/// "poly:1,0,2 + sin:0.5,3 + cos:-1,2". Malformed input raises
/// std::invalid_argument with the character position.
ComponentFn parse_component(const std::string& text);

/// Time-dependent coefficient H(t) with exact derivative and flow map
/// X(t) = int_0^t H. Immutable after construction. A reflected field
/// (from reflect_extend) is defined on [-T, T] with H(t) = -H(-t) for
/// t < 0.
class VectorField {
  public:
    VectorField(std::vector<ComponentFn> components, double horizon, double c1_horizon);

    int dim() const { return static_cast<int>(components_.size()); }
    double horizon() const { return horizon_; }        // T
    double c1_horizon() const { return c1_horizon_; }  // T1
    bool reflected() const { return reflected_; }
    double lower_time() const { return reflected_ ? -horizon_ : 0.0; }

    Vec value(double t) const;       // H(t)
    Vec derivative(double t) const;  // H'(t), |t| <= T1
    Vec flow(double t) const;        // X(t), X(0) = 0

    /// (H(t), H'(t)) with range checks per the C^1 declaration.
    std::pair<Vec, Vec> sample(double t) const;

    bool is_degenerate(double tol = 1e-12) const;

    /// Odd reflection H(t) := -H(-t) on [-T, 0]; requires H(0)=0.
    VectorField reflect_extend() const;

    const std::string& component_source(int i) const { return components_[i].source; }

  private:
    void check_time(double t, double lo, double hi, const char* what) const;

    std::vector<ComponentFn> components_;
    double horizon_;
    double c1_horizon_;
    bool reflected_{false};
};

/// Largest tau <= T1 with unit-direction dot product against the t=0
/// direction >= c0 on [0, tau] (H' in degenerate mode, H otherwise).
/// Scan (10^4 samples) + bisection to 1e-9; returns T1 when the bound
/// never fails.
double direction_persistence_time(const VectorField& field, double c0, Mode mode);

/// Whether the direction constraint still holds at the returned time
/// itself (the sup may or may not be attained).
bool direction_constraint_holds_at(const VectorField& field, double c0, Mode mode, double t);

/// min |H'| (degenerate) or min |H| (nondegenerate) over [lo, hi],
/// dense scan + golden-section refinement; throws when the positivity
/// assumption fails (result <= 1e-12).
double modulus_lower_bound(const VectorField& field, Mode mode, double lo, double hi);

/// All t in [0, T] with |H(t)| <= 1e-10 (reporting only).
std::vector<double> degenerate_instants(const VectorField& field);

}  // namespace transobs

#endif
