#include "transobs/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "transobs/numerics.hpp"

namespace transobs {

namespace {

Rule1D compute_gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    Rule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = std::acos(-1.0);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n(x)
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
    static std::map<int, Rule1D> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

Grid1D gauss_grid(double a, double b, int n) {
    const Rule1D& rule = gauss_legendre(n);
    Grid1D g;
    g.x.resize(n);
    g.w.resize(n);
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        g.x[i] = mid + half * rule.nodes[i];
        g.w[i] = half * rule.weights[i];
    }
    return g;
}

SpaceGrid volume_grid(const SpatialDomain& domain, int nodes_per_axis) {
    SpaceGrid grid;
    grid.dim = domain.dim();
    switch (domain.kind()) {
        case DomainKind::interval: {
            Grid1D g = gauss_grid(domain.lower()[0], domain.upper()[0], nodes_per_axis);
            grid.x.reserve(g.x.size());
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                grid.x.push_back(Vec::of(g.x[i]));
                grid.w.push_back(g.w[i]);
            }
            break;
        }
        case DomainKind::box: {
            Grid1D gx = gauss_grid(domain.lower()[0], domain.upper()[0], nodes_per_axis);
            Grid1D gy = gauss_grid(domain.lower()[1], domain.upper()[1], nodes_per_axis);
            grid.x.reserve(gx.x.size() * gy.x.size());
            for (std::size_t j = 0; j < gy.x.size(); ++j)
                for (std::size_t i = 0; i < gx.x.size(); ++i) {
                    grid.x.push_back(Vec::of(gx.x[i], gy.x[j]));
                    grid.w.push_back(gx.w[i] * gy.w[j]);
                }
            break;
        }
        case DomainKind::ball: {
            const double two_pi = 2.0 * std::acos(-1.0);
            Grid1D gr = gauss_grid(0.0, domain.radius(), nodes_per_axis);
            Grid1D gt = gauss_grid(0.0, two_pi, nodes_per_axis);
            grid.x.reserve(gr.x.size() * gt.x.size());
            for (std::size_t j = 0; j < gt.x.size(); ++j) {
                double ct = std::cos(gt.x[j]);
                double st = std::sin(gt.x[j]);
                for (std::size_t i = 0; i < gr.x.size(); ++i) {
                    double r = gr.x[i];
                    grid.x.push_back(domain.center() + Vec::of(r * ct, r * st));
                    grid.w.push_back(gr.w[i] * gt.w[j] * r);  // polar Jacobian
                }
            }
            break;
        }
    }
    return grid;
}

namespace {

[[noreturn]] void nonfinite_node(const Vec& x, double t, bool has_t) {
    std::ostringstream os;
    os << "integrate: non-finite integrand at node (x=" << x[0];
    for (int i = 1; i < x.dim(); ++i) os << "," << x[i];
    if (has_t) os << ", t=" << t;
    os << ")";
    throw std::runtime_error(os.str());
}

}  // namespace

double integrate(const SpaceGrid& grid, const std::function<double(const Vec&)>& f) {
    NeumaierSum acc;
    for (std::size_t i = 0; i < grid.x.size(); ++i) {
        double v = f(grid.x[i]);
        if (!std::isfinite(v)) nonfinite_node(grid.x[i], 0.0, false);
        acc.add(grid.w[i] * v);
    }
    return acc.value();
}

double integrate(const SurfaceGrid& grid, const std::function<double(const BoundaryPoint&)>& f) {
    NeumaierSum acc;
    for (const auto& bp : grid.p) {
        double v = f(bp);
        if (!std::isfinite(v)) nonfinite_node(bp.x, 0.0, false);
        acc.add(bp.weight * v);
    }
    return acc.value();
}

double integrate(const Grid1D& time, const SpaceGrid& space,
                 const std::function<double(const Vec&, double)>& f) {
    NeumaierSum acc;
    for (std::size_t k = 0; k < time.x.size(); ++k)
        for (std::size_t i = 0; i < space.x.size(); ++i) {
            double v = f(space.x[i], time.x[k]);
            if (!std::isfinite(v)) nonfinite_node(space.x[i], time.x[k], true);
            acc.add(time.w[k] * space.w[i] * v);
        }
    return acc.value();
}

SurfaceGrid surface_grid(const SpatialDomain& domain, int nodes_per_axis) {
    SurfaceGrid grid;
    switch (domain.kind()) {
        case DomainKind::interval: {
            // d=1: the boundary is two points with counting measure
            BoundaryPoint left{Vec::of(domain.lower()[0]), Vec::of(-1.0), 1.0};
            BoundaryPoint right{Vec::of(domain.upper()[0]), Vec::of(1.0), 1.0};
            grid.p.push_back(left);
            grid.p.push_back(right);
            break;
        }
        case DomainKind::box: {
            const Vec lo = domain.lower();
            const Vec hi = domain.upper();
            Grid1D gx = gauss_grid(lo[0], hi[0], nodes_per_axis);
            Grid1D gy = gauss_grid(lo[1], hi[1], nodes_per_axis);
            for (std::size_t i = 0; i < gx.x.size(); ++i) {  // bottom, top
                grid.p.push_back({Vec::of(gx.x[i], lo[1]), Vec::of(0.0, -1.0), gx.w[i]});
                grid.p.push_back({Vec::of(gx.x[i], hi[1]), Vec::of(0.0, 1.0), gx.w[i]});
            }
            for (std::size_t j = 0; j < gy.x.size(); ++j) {  // left, right
                grid.p.push_back({Vec::of(lo[0], gy.x[j]), Vec::of(-1.0, 0.0), gy.w[j]});
                grid.p.push_back({Vec::of(hi[0], gy.x[j]), Vec::of(1.0, 0.0), gy.w[j]});
            }
            break;
        }
        case DomainKind::ball: {
            const double two_pi = 2.0 * std::acos(-1.0);
            Grid1D gt = gauss_grid(0.0, two_pi, nodes_per_axis);
            double R = domain.radius();
            for (std::size_t j = 0; j < gt.x.size(); ++j) {
                Vec nu = Vec::of(std::cos(gt.x[j]), std::sin(gt.x[j]));
                grid.p.push_back({domain.center() + R * nu, nu, R * gt.w[j]});
            }
            break;
        }
    }
    return grid;
}

}  // namespace transobs
