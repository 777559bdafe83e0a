#include "transobs/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace transobs {

double evaluate_solution(const SpatialProfile& u0, const VectorField& field, const Vec& x, double t) {
    return u0.value(x - field.flow(t));
}

Vec solution_gradient(const SpatialProfile& u0, const VectorField& field, const Vec& x, double t) {
    return u0.gradient(x - field.flow(t));
}

double solution_time_derivative(const SpatialProfile& u0, const VectorField& field, const Vec& x,
                                double t) {
    return -dot(field.value(t), u0.gradient(x - field.flow(t)));
}

Solution extend_even(const SpatialProfile& u0, const VectorField& field) {
    return Solution{u0, field.reflect_extend()};
}

BoundaryTrace boundary_trace(const SpatialProfile& u0, const VectorField& field,
                             const SpatialDomain& domain, const SurfaceGrid& surface,
                             const Grid1D& time) {
    for (const auto& bp : surface.p)
        if (std::abs(domain.boundary_gauge(bp.x)) > 1e-9)
            throw std::invalid_argument("boundary_trace: grid node off the boundary at x=" +
                                        std::to_string(bp.x[0]));
    BoundaryTrace trace;
    trace.surface = surface;
    trace.time = time;
    trace.provenance = u0.label();
    trace.values.resize(surface.p.size() * time.x.size());
    for (std::size_t k = 0; k < time.x.size(); ++k) {
        Vec shift = field.flow(time.x[k]);
        for (std::size_t i = 0; i < surface.p.size(); ++i)
            trace.at(k, i) = u0.value(surface.p[i].x - shift);
    }
    return trace;
}

double trace_norm_squared(const BoundaryTrace& trace) {
    double s = 0.0;
    for (std::size_t k = 0; k < trace.time.x.size(); ++k)
        for (std::size_t i = 0; i < trace.surface.p.size(); ++i) {
            double g = trace.at(k, i);
            s += trace.time.w[k] * trace.surface.p[i].weight * g * g;
        }
    return s;
}

double trace_interpolate(const BoundaryTrace& trace, const Vec& boundary_x, double t) {
    if (trace.surface.p.empty() || trace.time.x.empty())
        throw std::invalid_argument("trace_interpolate: empty trace");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace.surface.p.size(); ++i) {
        double d = norm2(trace.surface.p[i].x - boundary_x);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    const auto& tx = trace.time.x;
    if (t <= tx.front()) return trace.at(0, best);
    if (t >= tx.back()) return trace.at(tx.size() - 1, best);
    auto it = std::upper_bound(tx.begin(), tx.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - tx.begin());
    std::size_t lo = hi - 1;
    double lam = (t - tx[lo]) / (tx[hi] - tx[lo]);
    return (1.0 - lam) * trace.at(lo, best) + lam * trace.at(hi, best);
}

TraceFunction closed_form_trace(const SpatialProfile& u0, const VectorField& field) {
    return [&u0, &field](const Vec& x, double t) { return evaluate_solution(u0, field, x, t); };
}

TraceFunction interpolated_trace(const BoundaryTrace& trace) {
    return [&trace](const Vec& x, double t) { return trace_interpolate(trace, x, t); };
}

Reconstruction reconstruct_from_trace(const TraceFunction& g, const VectorField& field,
                                      const SpatialDomain& domain, const Vec& x, double t) {
    if (domain.classify(x) != Region::interior)
        throw std::invalid_argument("reconstruct_from_trace: x must be interior");
    double lo = field.lower_time();
    double hi = field.horizon();
    if (t < lo || t > hi) throw std::out_of_range("reconstruct_from_trace: t outside the window");
    Vec xt = field.flow(t);
    auto path = [&](double sigma) { return x + field.flow(sigma) - xt; };
    std::vector<Crossing> crossings = boundary_crossings(domain, path, lo, hi);
    Reconstruction r;
    if (crossings.empty()) return r;  // uncovered: a first-class outcome
    const Crossing& c = crossings.front();
    r.covered = true;
    r.sigma = c.sigma;
    r.exit_point = c.point.x;
    r.value = g(c.point.x, c.sigma);
    return r;
}

double coverage_fraction(const VectorField& field, const SpatialDomain& domain, int space_samples,
                         int time_samples) {
    double T = field.horizon();
    double lo_t = field.lower_time();
    std::vector<Vec> pts;
    switch (domain.kind()) {
        case DomainKind::interval: {
            double a = domain.lower()[0], b = domain.upper()[0];
            for (int i = 0; i < space_samples; ++i)
                pts.push_back(Vec::of(a + (b - a) * (i + 0.5) / space_samples));
            break;
        }
        case DomainKind::box: {
            int n = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(space_samples))));
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    pts.push_back(Vec::of(
                        domain.lower()[0] + (domain.upper()[0] - domain.lower()[0]) * (i + 0.5) / n,
                        domain.lower()[1] + (domain.upper()[1] - domain.lower()[1]) * (j + 0.5) / n));
            break;
        }
        case DomainKind::ball: {
            int n = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(space_samples))));
            const double two_pi = 2.0 * std::acos(-1.0);
            for (int i = 0; i < n; ++i) {
                double r = domain.radius() * (i + 0.5) / n;
                for (int j = 0; j < n; ++j) {
                    double th = two_pi * j / n;
                    pts.push_back(domain.center() + Vec::of(r * std::cos(th), r * std::sin(th)));
                }
            }
            break;
        }
    }
    long covered = 0, total = 0;
    for (int k = 0; k < time_samples; ++k) {
        double t = lo_t + (T - lo_t) * (k + 0.5) / time_samples;
        Vec xt = field.flow(t);
        for (const Vec& x : pts) {
            auto path = [&](double sigma) { return x + field.flow(sigma) - xt; };
            ++total;
            if (!boundary_crossings(domain, path, lo_t, T).empty()) ++covered;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
}

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void export_trace_csv(std::ostream& os, const BoundaryTrace& trace, const SpatialDomain& domain) {
    int d = domain.dim();
    os << "# transobs trace schema v1\n";
    for (int i = 0; i < d; ++i) os << "x" << (i + 1) << ",";
    os << "t,value\n";
    for (std::size_t k = 0; k < trace.time.x.size(); ++k)
        for (std::size_t i = 0; i < trace.surface.p.size(); ++i) {
            for (int c = 0; c < d; ++c) os << fmt17(trace.surface.p[i].x[c]) << ",";
            os << fmt17(trace.time.x[k]) << "," << fmt17(trace.at(k, i)) << "\n";
        }
}

BoundaryTrace import_trace_csv(std::istream& is, const SpatialDomain& domain) {
    int d = domain.dim();
    BoundaryTrace trace;
    std::string line;
    long lineno = 0;
    bool header_seen = false;
    std::vector<Vec> points;
    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // column names line
            continue;
        }
        std::istringstream ss(line);
        std::string tok;
        std::vector<double> nums;
        while (std::getline(ss, tok, ',')) {
            try {
                nums.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw std::invalid_argument("trace csv line " + std::to_string(lineno) +
                                            ": bad number '" + tok + "'");
            }
        }
        if (static_cast<int>(nums.size()) != d + 2)
            throw std::invalid_argument("trace csv line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(d + 2) + " columns");
        Vec x = Vec::zero(d);
        for (int i = 0; i < d; ++i) x[i] = nums[i];
        if (!std::isfinite(nums[d + 1]))
            throw std::invalid_argument("trace csv line " + std::to_string(lineno) +
                                        ": non-finite value");
        points.push_back(x);
        times.push_back(nums[d]);
        values.push_back(nums[d + 1]);
    }
    if (points.empty()) throw std::invalid_argument("trace csv: no data rows");

    // rebuild the (surface x time) structure: rows are grouped by time
    std::vector<double> unique_times;
    for (double t : times)
        if (unique_times.empty() || t != unique_times.back()) unique_times.push_back(t);
    std::size_t ns = points.size() / unique_times.size();
    if (ns * unique_times.size() != points.size())
        throw std::invalid_argument("trace csv: rows do not form a (surface x time) grid");

    trace.time.x = unique_times;
    trace.time.w.assign(unique_times.size(), 0.0);
    for (std::size_t k = 0; k < unique_times.size(); ++k) {
        // midpoint weights; imported traces are interpolation sources, the
        // weights only matter if someone integrates them
        double lo = k == 0 ? unique_times[0] : 0.5 * (unique_times[k - 1] + unique_times[k]);
        double hi = k + 1 == unique_times.size() ? unique_times.back()
                                                 : 0.5 * (unique_times[k] + unique_times[k + 1]);
        trace.time.w[k] = hi - lo;
    }
    for (std::size_t i = 0; i < ns; ++i) {
        BoundaryPoint bp;
        bp.x = points[i];
        double gauge = domain.boundary_gauge(bp.x);
        if (std::abs(gauge) > 1e-9) {
            trace.flagged = true;
            trace.flag_reason = "node off the boundary by " + fmt17(gauge);
            bp.normal = Vec::zero(d);
        } else {
            bp.normal = domain.outward_normal(bp.x, 1e-8);
        }
        bp.weight = 1.0;
        trace.surface.p.push_back(bp);
    }
    trace.values = values;
    trace.provenance = "imported";
    return trace;
}

}  // namespace transobs
