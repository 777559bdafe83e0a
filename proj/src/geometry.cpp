#include "transobs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace transobs {

SpatialDomain SpatialDomain::interval(double lo, double hi) {
    SpatialDomain d;
    d.kind_ = DomainKind::interval;
    d.dim_ = 1;
    d.lo_ = Vec::of(lo);
    d.hi_ = Vec::of(hi);
    d.validate();
    return d;
}

SpatialDomain SpatialDomain::box(const Vec& lo, const Vec& hi) {
    if (lo.dim() != hi.dim()) throw std::invalid_argument("box: corner dimensions differ");
    if (lo.dim() != 2) throw std::invalid_argument("box: only d=2 boxes are supported");
    SpatialDomain d;
    d.kind_ = DomainKind::box;
    d.dim_ = lo.dim();
    d.lo_ = lo;
    d.hi_ = hi;
    d.validate();
    return d;
}

SpatialDomain SpatialDomain::ball(const Vec& center, double radius) {
    if (center.dim() != 2) throw std::invalid_argument("ball: only d=2 balls are supported");
    SpatialDomain d;
    d.kind_ = DomainKind::ball;
    d.dim_ = center.dim();
    d.center_ = center;
    d.radius_ = radius;
    d.validate();
    return d;
}

void SpatialDomain::validate() const {
    switch (kind_) {
        case DomainKind::interval:
        case DomainKind::box:
            for (int i = 0; i < dim_; ++i)
                if (!(lo_[i] < hi_[i]))
                    throw std::invalid_argument("domain: bounds must be strictly ordered per axis");
            break;
        case DomainKind::ball:
            if (!(radius_ > 0.0)) throw std::invalid_argument("ball: radius must be positive");
            break;
    }
    if (!(std::isfinite(diameter()) && diameter() > 0.0))
        throw std::invalid_argument("domain: diameter must be finite and positive");
    if (classify(Vec::zero(dim_)) != Region::interior)
        throw std::invalid_argument("domain: the origin must lie in the open interior");
}

double SpatialDomain::boundary_gauge(const Vec& x) const {
    check_dim(x, dim_, "boundary_gauge");
    switch (kind_) {
        case DomainKind::interval:
            return std::max(lo_[0] - x[0], x[0] - hi_[0]);
        case DomainKind::box: {
            double g = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < dim_; ++i) g = std::max(g, std::max(lo_[i] - x[i], x[i] - hi_[i]));
            return g;
        }
        case DomainKind::ball:
            return norm(x - center_) - radius_;
    }
    return 0.0;
}

Region SpatialDomain::classify(const Vec& x) const {
    double g = boundary_gauge(x);
    if (std::abs(g) <= kBoundaryTol) return Region::boundary;
    return g < 0.0 ? Region::interior : Region::exterior;
}

Vec SpatialDomain::outward_normal(const Vec& x, double tol) const {
    check_dim(x, dim_, "outward_normal");
    if (std::abs(boundary_gauge(x)) > tol)
        throw std::invalid_argument("outward_normal: point is not on the boundary");
    switch (kind_) {
        case DomainKind::interval:
            return Vec::of(std::abs(x[0] - hi_[0]) < std::abs(x[0] - lo_[0]) ? 1.0 : -1.0);
        case DomainKind::box: {
            // nearest face wins; corners resolve to the most-violated axis
            int best = 0;
            double best_gap = -std::numeric_limits<double>::infinity();
            double best_sign = 1.0;
            for (int i = 0; i < dim_; ++i) {
                if (x[i] - hi_[i] > best_gap) {
                    best_gap = x[i] - hi_[i];
                    best = i;
                    best_sign = 1.0;
                }
                if (lo_[i] - x[i] > best_gap) {
                    best_gap = lo_[i] - x[i];
                    best = i;
                    best_sign = -1.0;
                }
            }
            Vec nu = Vec::zero(dim_);
            nu[best] = best_sign;
            return nu;
        }
        case DomainKind::ball: {
            Vec r = x - center_;
            double len = norm(r);
            if (len == 0.0) throw std::invalid_argument("outward_normal: degenerate radial direction");
            return (1.0 / len) * r;
        }
    }
    return Vec::zero(dim_);
}

double SpatialDomain::diameter() const {
    switch (kind_) {
        case DomainKind::interval:
            return hi_[0] - lo_[0];
        case DomainKind::box:
            return norm(hi_ - lo_);
        case DomainKind::ball:
            return 2.0 * radius_;
    }
    return 0.0;
}

double SpatialDomain::exterior_distance(const Vec& x0) const {
    check_dim(x0, dim_, "exterior_distance");
    if (classify(x0) != Region::exterior)
        throw std::invalid_argument("exterior_distance: point is not exterior");
    switch (kind_) {
        case DomainKind::interval:
        case DomainKind::box: {
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) {
                double d = std::max({lo_[i] - x0[i], x0[i] - hi_[i], 0.0});
                s += d * d;
            }
            return std::sqrt(s);
        }
        case DomainKind::ball:
            return norm(x0 - center_) - radius_;
    }
    return 0.0;
}

std::pair<double, double> SpatialDomain::radius_extrema(const Vec& x0) const {
    check_dim(x0, dim_, "radius_extrema");
    if (classify(x0) != Region::exterior)
        throw std::invalid_argument("radius_extrema: point is not exterior");
    switch (kind_) {
        case DomainKind::interval:
        case DomainKind::box: {
            // separable: nearest clamp per axis for the min, farthest bound
            // for the max (attained at a corner)
            double mn = 0.0, mx = 0.0;
            for (int i = 0; i < dim_; ++i) {
                double near = std::max({lo_[i] - x0[i], x0[i] - hi_[i], 0.0});
                double far = std::max(std::abs(lo_[i] - x0[i]), std::abs(hi_[i] - x0[i]));
                mn += near * near;
                mx += far * far;
            }
            return {mn, mx};
        }
        case DomainKind::ball: {
            double c = norm(x0 - center_);
            double mn = c - radius_;
            double mx = c + radius_;
            return {mn * mn, mx * mx};
        }
    }
    return {0.0, 0.0};
}

std::string SpatialDomain::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case DomainKind::interval:
            os << "interval(" << lo_[0] << ", " << hi_[0] << ")";
            break;
        case DomainKind::box:
            os << "box([" << lo_[0] << "," << lo_[1] << "] x [" << hi_[0] << "," << hi_[1] << "])";
            break;
        case DomainKind::ball:
            os << "ball(center=(" << center_[0] << "," << center_[1] << "), r=" << radius_ << ")";
            break;
    }
    return os.str();
}

std::vector<Vec> closure_sample_points(const SpatialDomain& domain, int target) {
    std::vector<Vec> pts;
    switch (domain.kind()) {
        case DomainKind::interval: {
            double lo = domain.lower()[0], hi = domain.upper()[0];
            for (int i = 0; i <= target; ++i)
                pts.push_back(Vec::of(lo + (hi - lo) * static_cast<double>(i) / target));
            break;
        }
        case DomainKind::box: {
            int n = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(target))));
            for (int j = 0; j <= n; ++j)
                for (int i = 0; i <= n; ++i)
                    pts.push_back(Vec::of(
                        domain.lower()[0] + (domain.upper()[0] - domain.lower()[0]) * i / n,
                        domain.lower()[1] + (domain.upper()[1] - domain.lower()[1]) * j / n));
            break;
        }
        case DomainKind::ball: {
            int n = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(target))));
            const double two_pi = 2.0 * std::acos(-1.0);
            pts.push_back(domain.center());
            for (int i = 1; i <= n; ++i) {
                double r = domain.radius() * static_cast<double>(i) / n;  // outermost ring on the boundary
                for (int j = 0; j < n; ++j) {
                    double th = two_pi * j / n;
                    pts.push_back(domain.center() + Vec::of(r * std::cos(th), r * std::sin(th)));
                }
            }
            break;
        }
    }
    return pts;
}

std::vector<Crossing> boundary_crossings(const SpatialDomain& domain,
                                         const std::function<Vec(double)>& path, double lo, double hi,
                                         int scan_samples) {
    std::vector<Crossing> out;
    if (!(hi > lo) || scan_samples < 2) return out;
    double prev_sigma = lo;
    double prev_g = domain.boundary_gauge(path(lo));
    for (int k = 1; k <= scan_samples; ++k) {
        double sigma = lo + (hi - lo) * static_cast<double>(k) / scan_samples;
        double g = domain.boundary_gauge(path(sigma));
        bool crossed = (prev_g < 0.0 && g >= 0.0) || (prev_g >= 0.0 && g < 0.0);
        if (crossed) {
            double a = prev_sigma, b = sigma, ga = prev_g;
            while (b - a > kCrossingTol) {
                double mid = 0.5 * (a + b);
                double gm = domain.boundary_gauge(path(mid));
                if ((gm < 0.0) == (ga < 0.0)) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            double sstar = 0.5 * (a + b);
            Vec px = path(sstar);
            BoundaryPoint bp;
            bp.x = px;
            bp.normal = domain.outward_normal(px, 1e-6);
            bp.weight = 1.0;
            out.push_back({sstar, bp});
        }
        prev_sigma = sigma;
        prev_g = g;
    }
    return out;
}

}  // namespace transobs
