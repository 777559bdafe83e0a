#ifndef TRANSOBS_TESTFUNCTION_HPP
#define TRANSOBS_TESTFUNCTION_HPP

#include <array>
#include <string>
#include <vector>

#include "transobs/geometry.hpp"
#include "transobs/rng.hpp"
#include "transobs/vec.hpp"

namespace transobs {

/// Polynomial in (x, t), total degree <= 4.
struct PolyXT {
    struct Term {
        double coef;
        std::array<int, kMaxDim> px;  // spatial exponents
        int pt;                       // time exponent
    };
    std::vector<Term> terms;
    int dim{1};

    double value(const Vec& x, double t) const;
    double dxi(const Vec& x, double t, int i) const;
    double dt(const Vec& x, double t) const;
};

/// One product term: coef * exp(-a|x-p|^2) * exp(-b(t-q)^2) * P(x,t).
/// Any factor may be absent.
struct TFTerm {
    double coef{1.0};
    bool has_space_gauss{false};
    double ga{0.0};
    Vec gp;
    bool has_time_gauss{false};
    double gb{0.0};
    double gq{0.0};
    bool has_poly{false};
    PolyXT poly;
};

struct TFEval {
    double value;
    Vec grad;
    double dt;
};

/// Closed-form scalar field w(x, t) from the registry (sums of product
/// terms), with exact spatial gradient and time derivative. Derivative
/// descriptors are checked against finite differences at construction.
class TestFunction {
  public:
    TestFunction(int dim, std::vector<TFTerm> terms, std::string label = {});

    int dim() const { return dim_; }
    const std::string& label() const { return label_; }

    double value(const Vec& x, double t) const;
    Vec gradient(const Vec& x, double t) const;
    double time_derivative(const Vec& x, double t) const;
    TFEval eval(const Vec& x, double t) const;

    /// Transport operator applied to w for a given field value H(t).
    double apply_transport(const Vec& x, double t, const Vec& H) const;

    static TestFunction zero(int dim);
    static TestFunction constant(int dim, double c);
    static TestFunction gaussian(int dim, double a, const Vec& p, double b, double q);
    static TestFunction polynomial(int dim, PolyXT poly);

  private:
    int dim_;
    std::vector<TFTerm> terms_;
    std::string label_;
};

/// Spatial-only profile u0(x) used to generate exact solutions
/// u(x,t) = u0(x - X(t)). Defined on all of R^d.
class SpatialProfile {
  public:
    SpatialProfile(TestFunction f, std::string label = {});

    int dim() const { return f_.dim(); }
    const std::string& label() const { return label_.empty() ? f_.label() : label_; }
    double value(const Vec& x) const { return f_.value(x, 0.0); }
    Vec gradient(const Vec& x) const { return f_.gradient(x, 0.0); }

    static SpatialProfile gaussian(int dim, double a, const Vec& p);
    static SpatialProfile constant(int dim, double c);
    static SpatialProfile zero(int dim);
    /// (1 - |x|^2 / R^2)-style polynomial vanishing on the boundary of
    /// intervals/balls centered appropriately; used by diagnostics.
    static SpatialProfile vanishing_bump(const SpatialDomain& domain);

  private:
    TestFunction f_;
    std::string label_;
};

/// Deterministic random registry draws (seeded, allocator-free RNG).
TestFunction random_test_function(SplitMix64& rng, const SpatialDomain& domain, double t_lo, double t_hi,
                                  const std::string& label);
SpatialProfile random_profile(SplitMix64& rng, const SpatialDomain& domain, const std::string& label);

std::vector<TestFunction> make_test_ensemble(int count, std::uint64_t seed, const SpatialDomain& domain,
                                             double t_lo, double t_hi);
std::vector<SpatialProfile> make_profile_ensemble(int count, std::uint64_t seed,
                                                  const SpatialDomain& domain);

}  // namespace transobs

#endif
