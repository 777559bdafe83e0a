#include "transobs/testfunction.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace transobs {

namespace {

double ipow(double x, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= x;
    return v;
}

}  // namespace

double PolyXT::value(const Vec& x, double t) const {
    double s = 0.0;
    for (const auto& term : terms) {
        double v = term.coef * ipow(t, term.pt);
        for (int i = 0; i < dim; ++i) v *= ipow(x[i], term.px[i]);
        s += v;
    }
    return s;
}

double PolyXT::dxi(const Vec& x, double t, int i) const {
    double s = 0.0;
    for (const auto& term : terms) {
        if (term.px[i] == 0) continue;
        double v = term.coef * term.px[i] * ipow(x[i], term.px[i] - 1) * ipow(t, term.pt);
        for (int j = 0; j < dim; ++j)
            if (j != i) v *= ipow(x[j], term.px[j]);
        s += v;
    }
    return s;
}

double PolyXT::dt(const Vec& x, double t) const {
    double s = 0.0;
    for (const auto& term : terms) {
        if (term.pt == 0) continue;
        double v = term.coef * term.pt * ipow(t, term.pt - 1);
        for (int i = 0; i < dim; ++i) v *= ipow(x[i], term.px[i]);
        s += v;
    }
    return s;
}

namespace {

struct TermEval {
    double value;
    Vec grad;
    double dt;
};

TermEval eval_term(const TFTerm& term, const Vec& x, double t, int dim) {
    double gs = 1.0;
    double gt = 1.0;
    if (term.has_space_gauss) {
        double r2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            double d = x[i] - term.gp[i];
            r2 += d * d;
        }
        gs = std::exp(-term.ga * r2);
    }
    if (term.has_time_gauss) {
        double dtq = t - term.gq;
        gt = std::exp(-term.gb * dtq * dtq);
    }
    double pv = term.has_poly ? term.poly.value(x, t) : 1.0;

    TermEval out;
    out.grad = Vec::zero(dim);
    double base = term.coef * gs * gt;
    out.value = base * pv;
    for (int i = 0; i < dim; ++i) {
        // product rule: base * (-2a(x_i-p_i) P + dP/dx_i)
        double d = 0.0;
        if (term.has_space_gauss) d += -2.0 * term.ga * (x[i] - term.gp[i]) * pv;
        if (term.has_poly) d += term.poly.dxi(x, t, i);
        out.grad[i] = base * d;
    }
    double dtv = 0.0;
    if (term.has_time_gauss) dtv += -2.0 * term.gb * (t - term.gq) * pv;
    if (term.has_poly) dtv += term.poly.dt(x, t);
    out.dt = base * dtv;
    return out;
}

void validate_total_degree(const PolyXT& poly) {
    for (const auto& term : poly.terms) {
        int total = term.pt;
        for (int i = 0; i < poly.dim; ++i) {
            if (term.px[i] < 0 || term.pt < 0)
                throw std::invalid_argument("polynomial: negative exponent");
            total += term.px[i];
        }
        if (total > 4) throw std::invalid_argument("polynomial: total degree must be <= 4");
    }
}

// Order-2 finite-difference check that the analytic derivatives match the
// value descriptor; runs once per construction.
void validate_derivatives(const TestFunction& f) {
    const double probes[3] = {0.1337, -0.417, 0.733};
    Vec x = Vec::zero(f.dim());
    for (int i = 0; i < f.dim(); ++i) x[i] = probes[i];
    double t = 0.391;
    auto fd_error = [&](double h) {
        double worst = 0.0;
        for (int i = 0; i < f.dim(); ++i) {
            Vec xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            double fd = (f.value(xp, t) - f.value(xm, t)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - f.gradient(x, t)[i]));
        }
        double fd_t = (f.value(x, t + h) - f.value(x, t - h)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd_t - f.time_derivative(x, t)));
        return worst;
    };
    double e1 = fd_error(1e-3);
    double e2 = fd_error(1e-4);
    // e1 ~ C h^2: accept either an order-2 decay or errors at rounding level
    if (e1 > 1e-12 && !(e2 < e1 * 0.05 || e2 < 1e-10))
        throw std::logic_error("test function: analytic derivatives disagree with finite differences");
}

}  // namespace

TestFunction::TestFunction(int dim, std::vector<TFTerm> terms, std::string label)
    : dim_(dim), terms_(std::move(terms)), label_(std::move(label)) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("test function: bad dimension");
    for (const auto& term : terms_) {
        if (term.has_space_gauss && term.gp.dim() != dim)
            throw std::invalid_argument("test function: gaussian center dimension mismatch");
        if (term.has_poly) {
            if (term.poly.dim != dim)
                throw std::invalid_argument("test function: polynomial dimension mismatch");
            validate_total_degree(term.poly);
        }
    }
    if (!terms_.empty()) validate_derivatives(*this);
}

double TestFunction::value(const Vec& x, double t) const {
    double s = 0.0;
    for (const auto& term : terms_) s += eval_term(term, x, t, dim_).value;
    return s;
}

Vec TestFunction::gradient(const Vec& x, double t) const {
    Vec g = Vec::zero(dim_);
    for (const auto& term : terms_) g += eval_term(term, x, t, dim_).grad;
    return g;
}

double TestFunction::time_derivative(const Vec& x, double t) const {
    double s = 0.0;
    for (const auto& term : terms_) s += eval_term(term, x, t, dim_).dt;
    return s;
}

TFEval TestFunction::eval(const Vec& x, double t) const {
    TFEval out{0.0, Vec::zero(dim_), 0.0};
    for (const auto& term : terms_) {
        TermEval e = eval_term(term, x, t, dim_);
        out.value += e.value;
        out.grad += e.grad;
        out.dt += e.dt;
    }
    return out;
}

double TestFunction::apply_transport(const Vec& x, double t, const Vec& H) const {
    TFEval e = eval(x, t);
    return e.dt + dot(H, e.grad);
}

TestFunction TestFunction::zero(int dim) { return TestFunction(dim, {}, "zero"); }

TestFunction TestFunction::constant(int dim, double c) {
    PolyXT poly;
    poly.dim = dim;
    poly.terms.push_back({c, {0, 0, 0}, 0});
    TFTerm term;
    term.has_poly = true;
    term.poly = poly;
    return TestFunction(dim, {term}, "const");
}

TestFunction TestFunction::gaussian(int dim, double a, const Vec& p, double b, double q) {
    TFTerm term;
    term.has_space_gauss = true;
    term.ga = a;
    term.gp = p;
    if (b != 0.0) {
        term.has_time_gauss = true;
        term.gb = b;
        term.gq = q;
    }
    return TestFunction(dim, {term}, "gaussian");
}

TestFunction TestFunction::polynomial(int dim, PolyXT poly) {
    TFTerm term;
    term.has_poly = true;
    term.poly = std::move(poly);
    term.poly.dim = dim;
    return TestFunction(dim, {term}, "poly");
}

SpatialProfile::SpatialProfile(TestFunction f, std::string label) : f_(std::move(f)), label_(std::move(label)) {}

SpatialProfile SpatialProfile::gaussian(int dim, double a, const Vec& p) {
    return SpatialProfile(TestFunction::gaussian(dim, a, p, 0.0, 0.0), "gaussian");
}

SpatialProfile SpatialProfile::constant(int dim, double c) {
    return SpatialProfile(TestFunction::constant(dim, c), "const");
}

SpatialProfile SpatialProfile::zero(int dim) { return SpatialProfile(TestFunction::zero(dim), "zero"); }

SpatialProfile SpatialProfile::vanishing_bump(const SpatialDomain& domain) {
    PolyXT poly;
    poly.dim = domain.dim();
    if (domain.kind() == DomainKind::interval) {
        double lo = domain.lower()[0], hi = domain.upper()[0];
        // (x - lo)(hi - x) normalized to peak 1 at the midpoint
        double mid = 0.5 * (lo + hi);
        double peak = (mid - lo) * (hi - mid);
        poly.terms.push_back({-lo * hi / peak, {0, 0, 0}, 0});
        poly.terms.push_back({(lo + hi) / peak, {1, 0, 0}, 0});
        poly.terms.push_back({-1.0 / peak, {2, 0, 0}, 0});
    } else if (domain.kind() == DomainKind::ball) {
        double R2 = domain.radius() * domain.radius();
        const Vec& c = domain.center();
        // 1 - |x - c|^2 / R^2
        poly.terms.push_back({1.0 - norm2(c) / R2, {0, 0, 0}, 0});
        for (int i = 0; i < 2; ++i) {
            std::array<int, kMaxDim> e{0, 0, 0};
            e[i] = 1;
            poly.terms.push_back({2.0 * c[i] / R2, e, 0});
            e[i] = 2;
            poly.terms.push_back({-1.0 / R2, e, 0});
        }
    } else {
        // box: product (x-lo)(hi-x) per axis, degree 4 in d=2
        double lo0 = domain.lower()[0], hi0 = domain.upper()[0];
        double lo1 = domain.lower()[1], hi1 = domain.upper()[1];
        double peak = (0.5 * (hi0 - lo0)) * (0.5 * (hi0 - lo0)) * (0.5 * (hi1 - lo1)) * (0.5 * (hi1 - lo1));
        // expand (x-lo0)(hi0-x)(y-lo1)(hi1-y)
        const double a0 = -lo0 * hi0, a1 = lo0 + hi0, a2 = -1.0;
        const double b0 = -lo1 * hi1, b1 = lo1 + hi1, b2 = -1.0;
        const double ax[3] = {a0, a1, a2};
        const double by[3] = {b0, b1, b2};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                std::array<int, kMaxDim> e{i, j, 0};
                poly.terms.push_back({ax[i] * by[j] / peak, e, 0});
            }
    }
    return SpatialProfile(TestFunction::polynomial(domain.dim(), poly), "vanishing-bump");
}

namespace {

Vec random_point_in(SplitMix64& rng, const SpatialDomain& domain) {
    Vec p = Vec::zero(domain.dim());
    if (domain.kind() == DomainKind::ball) {
        double r = domain.radius() * 0.8 * std::sqrt(rng.uniform());
        double th = rng.uniform(0.0, 2.0 * std::acos(-1.0));
        p = domain.center() + Vec::of(r * std::cos(th), r * std::sin(th));
    } else {
        for (int i = 0; i < domain.dim(); ++i) {
            double lo = domain.lower()[i], hi = domain.upper()[i];
            double pad = 0.1 * (hi - lo);
            p[i] = rng.uniform(lo + pad, hi - pad);
        }
    }
    return p;
}

PolyXT random_poly(SplitMix64& rng, int dim) {
    PolyXT poly;
    poly.dim = dim;
    int nterms = rng.uniform_int(1, 3);
    for (int k = 0; k < nterms; ++k) {
        PolyXT::Term term{};
        term.coef = rng.uniform(-1.0, 1.0);
        int budget = rng.uniform_int(0, 2);
        term.pt = rng.uniform_int(0, budget);
        budget -= term.pt;
        for (int i = 0; i < dim && budget > 0; ++i) {
            term.px[i] = rng.uniform_int(0, budget);
            budget -= term.px[i];
        }
        poly.terms.push_back(term);
    }
    // keep the function clearly nonzero
    poly.terms.push_back({rng.uniform(0.5, 1.5), {0, 0, 0}, 0});
    return poly;
}

}  // namespace

TestFunction random_test_function(SplitMix64& rng, const SpatialDomain& domain, double t_lo, double t_hi,
                                  const std::string& label) {
    int dim = domain.dim();
    int nterms = rng.uniform_int(1, 2);
    std::vector<TFTerm> terms;
    for (int k = 0; k < nterms; ++k) {
        TFTerm term;
        term.coef = rng.uniform(0.3, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        term.has_space_gauss = true;
        term.ga = rng.uniform(0.5, 3.0);
        term.gp = random_point_in(rng, domain);
        term.has_time_gauss = true;
        term.gb = rng.uniform(0.05, 0.5);
        term.gq = rng.uniform(t_lo, t_hi);
        if (rng.uniform() < 0.4) {
            term.has_poly = true;
            term.poly = random_poly(rng, dim);
        }
        terms.push_back(term);
    }
    return TestFunction(dim, std::move(terms), label);
}

SpatialProfile random_profile(SplitMix64& rng, const SpatialDomain& domain, const std::string& label) {
    int dim = domain.dim();
    TFTerm term;
    term.coef = rng.uniform(0.5, 1.5);
    term.has_space_gauss = true;
    term.ga = rng.uniform(1.0, 4.0);
    term.gp = random_point_in(rng, domain);
    return SpatialProfile(TestFunction(dim, {term}, label), label);
}

std::vector<TestFunction> make_test_ensemble(int count, std::uint64_t seed, const SpatialDomain& domain,
                                             double t_lo, double t_hi) {
    SplitMix64 rng(seed);
    std::vector<TestFunction> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        std::ostringstream label;
        label << "w" << (k < 10 ? "0" : "") << k;
        out.push_back(random_test_function(rng, domain, t_lo, t_hi, label.str()));
    }
    return out;
}

std::vector<SpatialProfile> make_profile_ensemble(int count, std::uint64_t seed,
                                                  const SpatialDomain& domain) {
    SplitMix64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<SpatialProfile> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        std::ostringstream label;
        label << "u" << (k < 10 ? "0" : "") << k;
        out.push_back(random_profile(rng, domain, label.str()));
    }
    return out;
}

}  // namespace transobs
