#include "transobs/field.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "transobs/numerics.hpp"

namespace transobs {

std::string mode_name(Mode m) { return m == Mode::degenerate ? "degenerate" : "non-degenerate"; }

Mode parse_mode(const std::string& s) {
    if (s == "degenerate") return Mode::degenerate;
    if (s == "non-degenerate" || s == "nondegenerate") return Mode::nondegenerate;
    throw std::invalid_argument("mode must be 'degenerate' or 'non-degenerate', got '" + s + "'");
}

double FieldTerm::value(double t) const {
    switch (kind) {
        case Kind::poly: {
            double v = 0.0;
            for (std::size_t k = coef.size(); k-- > 0;) v = v * t + coef[k];
            return v;
        }
        case Kind::sine:
            return amp * std::sin(omega * t);
        case Kind::cosine:
            return amp * std::cos(omega * t);
    }
    return 0.0;
}

double FieldTerm::deriv(double t) const {
    switch (kind) {
        case Kind::poly: {
            double v = 0.0;
            for (std::size_t k = coef.size(); k-- > 1;) v = v * t + coef[k] * static_cast<double>(k);
            return v;
        }
        case Kind::sine:
            return amp * omega * std::cos(omega * t);
        case Kind::cosine:
            return -amp * omega * std::sin(omega * t);
    }
    return 0.0;
}

double FieldTerm::antideriv(double t) const {
    switch (kind) {
        case Kind::poly: {
            double v = 0.0;
            for (std::size_t k = coef.size(); k-- > 0;) v = v * t + coef[k] / static_cast<double>(k + 1);
            return v * t;
        }
        case Kind::sine:
            if (omega == 0.0) return 0.0;
            return (amp / omega) * (1.0 - std::cos(omega * t));
        case Kind::cosine:
            if (omega == 0.0) return amp * t;  // cos(0)=1, a constant term
            return (amp / omega) * std::sin(omega * t);
    }
    return 0.0;
}

double ComponentFn::value(double t) const {
    double v = 0.0;
    for (const auto& term : terms) v += term.value(t);
    return v;
}

double ComponentFn::deriv(double t) const {
    double v = 0.0;
    for (const auto& term : terms) v += term.deriv(t);
    return v;
}

double ComponentFn::antideriv(double t) const {
    double v = 0.0;
    for (const auto& term : terms) v += term.antideriv(t);
    return v;
}

namespace {

[[noreturn]] void parse_fail(const std::string& text, std::size_t pos, const std::string& why) {
    throw std::invalid_argument("descriptor '" + text + "': " + why + " at position " +
                                std::to_string(pos));
}

std::vector<double> parse_number_list(const std::string& text, std::size_t start, std::size_t end) {
    std::vector<double> out;
    std::size_t pos = start;
    while (pos < end) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos || comma > end) comma = end;
        std::string tok = text.substr(pos, comma - pos);
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            parse_fail(text, pos, "expected a number, got '" + tok + "'");
        }
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        if (used != tok.size()) parse_fail(text, pos + used, "trailing characters in number '" + tok + "'");
        out.push_back(v);
        pos = comma + 1;
    }
    if (out.empty()) parse_fail(text, start, "empty number list");
    return out;
}

}  // namespace

ComponentFn parse_component(const std::string& text) {
    ComponentFn fn;
    fn.source = text;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos >= text.size()) break;
        std::size_t colon = text.find(':', pos);
        if (colon == std::string::npos) parse_fail(text, pos, "expected 'name:args' term");
        std::string name = text.substr(pos, colon - pos);
        while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
        std::size_t term_end = text.find('+', colon);
        if (term_end == std::string::npos) term_end = text.size();
        std::size_t args_end = term_end;
        while (args_end > colon + 1 && std::isspace(static_cast<unsigned char>(text[args_end - 1])))
            --args_end;
        std::vector<double> nums = parse_number_list(text, colon + 1, args_end);

        FieldTerm term;
        if (name == "poly") {
            term.kind = FieldTerm::Kind::poly;
            term.coef = nums;
        } else if (name == "sin" || name == "cos") {
            if (nums.size() != 2)
                parse_fail(text, colon + 1, name + " takes exactly 2 arguments (amplitude, omega)");
            term.kind = name == "sin" ? FieldTerm::Kind::sine : FieldTerm::Kind::cosine;
            term.amp = nums[0];
            term.omega = nums[1];
        } else {
            parse_fail(text, pos, "unknown term '" + name + "' (expected poly, sin, or cos)");
        }
        fn.terms.push_back(std::move(term));
        pos = term_end + 1;
    }
    if (fn.terms.empty()) parse_fail(text, 0, "empty descriptor");
    return fn;
}

VectorField::VectorField(std::vector<ComponentFn> components, double horizon, double c1_horizon)
    : components_(std::move(components)), horizon_(horizon), c1_horizon_(c1_horizon) {
    if (components_.empty() || static_cast<int>(components_.size()) > kMaxDim)
        throw std::invalid_argument("field: dimension must be between 1 and " + std::to_string(kMaxDim));
    if (!(horizon_ > 0.0)) throw std::invalid_argument("field: horizon T must be positive");
    if (!(c1_horizon_ > 0.0) || c1_horizon_ > horizon_)
        throw std::invalid_argument("field: T1 must lie in (0, T]");
}

void VectorField::check_time(double t, double lo, double hi, const char* what) const {
    if (t < lo - 1e-12 || t > hi + 1e-12)
        throw std::out_of_range(std::string(what) + ": t=" + std::to_string(t) + " outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

Vec VectorField::value(double t) const {
    check_time(t, lower_time(), horizon_, "field value");
    Vec h(dim());
    if (reflected_ && t < 0.0) {
        for (int i = 0; i < dim(); ++i) h[i] = -components_[i].value(-t);
    } else {
        for (int i = 0; i < dim(); ++i) h[i] = components_[i].value(t);
    }
    return h;
}

Vec VectorField::derivative(double t) const {
    check_time(t, reflected_ ? -c1_horizon_ : 0.0, c1_horizon_, "field derivative");
    Vec h(dim());
    double ta = (reflected_ && t < 0.0) ? -t : t;  // H'(-t) = H'(t) after odd reflection
    for (int i = 0; i < dim(); ++i) h[i] = components_[i].deriv(ta);
    return h;
}

Vec VectorField::flow(double t) const {
    check_time(t, lower_time(), horizon_, "flow");
    Vec x(dim());
    double ta = (reflected_ && t < 0.0) ? -t : t;  // X is even for reflected fields
    for (int i = 0; i < dim(); ++i) x[i] = components_[i].antideriv(ta);
    return x;
}

std::pair<Vec, Vec> VectorField::sample(double t) const { return {value(t), derivative(t)}; }

bool VectorField::is_degenerate(double tol) const {
    Vec h0 = value(0.0);
    return norm(h0) <= tol;
}

VectorField VectorField::reflect_extend() const {
    if (reflected_) return *this;
    if (!is_degenerate())
        throw std::invalid_argument(
            "reflect_extend: H(0) != 0, the odd reflection would be discontinuous");
    VectorField r(*this);
    r.reflected_ = true;
    return r;
}

namespace {

constexpr int kScanSamples = 10000;
constexpr double kRootTol = 1e-9;
// guard against chatter at tangential touches: a touch counts as violation
constexpr double kTouchTol = 1e-12;

Vec reference_direction(const VectorField& field, Mode mode) {
    Vec d = mode == Mode::degenerate ? field.derivative(0.0) : field.value(0.0);
    double len = norm(d);
    if (len <= kTouchTol)
        throw std::invalid_argument(mode == Mode::degenerate
                                        ? "direction undefined: |H'(0)| = 0"
                                        : "direction undefined: |H(0)| = 0");
    return (1.0 / len) * d;
}

}  // namespace

double direction_persistence_time(const VectorField& field, double c0, Mode mode) {
    if (!(c0 > 1.0 / std::sqrt(2.0) && c0 < 1.0))
        throw std::invalid_argument("c0 must lie in (1/sqrt(2), 1)");
    Vec u0 = reference_direction(field, mode);
    double T1 = field.c1_horizon();
    auto gap = [&](double t) {
        Vec d = mode == Mode::degenerate ? field.derivative(t) : field.value(t);
        double len = norm(d);
        if (len <= kTouchTol) return -1.0;  // undefined direction counts as violation
        return dot(d, u0) / len - c0;
    };
    double prev = 0.0;
    for (int k = 1; k <= kScanSamples; ++k) {
        double t = T1 * static_cast<double>(k) / kScanSamples;
        if (gap(t) < kTouchTol) {
            // first violated sample: bisect gap(t) - kTouchTol on [prev, t]
            double a = prev, b = t;
            while (b - a > kRootTol) {
                double mid = 0.5 * (a + b);
                if (gap(mid) < kTouchTol)
                    b = mid;
                else
                    a = mid;
            }
            return 0.5 * (a + b);
        }
        prev = t;
    }
    return T1;
}

bool direction_constraint_holds_at(const VectorField& field, double c0, Mode mode, double t) {
    Vec u0 = reference_direction(field, mode);
    Vec d = mode == Mode::degenerate ? field.derivative(t) : field.value(t);
    double len = norm(d);
    if (len <= kTouchTol) return false;
    return dot(d, u0) / len >= c0;
}

double modulus_lower_bound(const VectorField& field, Mode mode, double lo, double hi) {
    if (!(hi > lo)) throw std::invalid_argument("modulus_lower_bound: empty window");
    auto modulus = [&](double t) {
        Vec d = mode == Mode::degenerate ? field.derivative(t) : field.value(t);
        return norm(d);
    };
    int arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kScanSamples; ++k) {
        double t = lo + (hi - lo) * static_cast<double>(k) / kScanSamples;
        double v = modulus(t);
        if (v < best) {
            best = v;
            arg = k;
        }
    }
    double step = (hi - lo) / kScanSamples;
    double a = std::max(lo, lo + (arg - 1) * step);
    double b = std::min(hi, lo + (arg + 1) * step);
    double tmin = golden_min(modulus, a, b, kRootTol);
    double rho = std::min(best, modulus(tmin));
    if (rho <= 1e-12)
        throw std::invalid_argument(mode == Mode::degenerate
                                        ? "positivity assumption fails: min |H'| vanishes on the window"
                                        : "positivity assumption fails: min |H| vanishes on the window");
    return rho;
}

std::vector<double> degenerate_instants(const VectorField& field) {
    const double tol = 1e-10;
    auto modulus = [&](double t) { return norm(field.value(t)); };
    double T = field.horizon();
    std::vector<double> zeros;
    auto push = [&](double t) {
        for (double z : zeros)
            if (std::abs(z - t) < 1e-8) return;
        zeros.push_back(t);
    };
    const int n = 2 * kScanSamples;
    std::vector<double> vals(n + 1);
    for (int k = 0; k <= n; ++k) vals[k] = modulus(T * static_cast<double>(k) / n);
    for (int k = 0; k <= n; ++k) {
        bool local_min = (k == 0 || vals[k] <= vals[k - 1]) && (k == n || vals[k] <= vals[k + 1]);
        if (!local_min) continue;
        double step = T / n;
        double a = std::max(0.0, (k - 1) * step);
        double b = std::min(T, (k + 1) * step);
        double tmin = golden_min(modulus, a, b, 1e-12);
        if (modulus(tmin) <= tol) push(tmin);
    }
    std::sort(zeros.begin(), zeros.end());
    return zeros;
}

}  // namespace transobs
