#include "transobs/certificate.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "transobs/quadrature.hpp"

namespace transobs {

namespace {

void require_c0(double c0) {
    if (!(c0 > 1.0 / std::sqrt(2.0) && c0 < 1.0))
        throw std::invalid_argument("c0 must lie in (1/sqrt(2), 1)");
}

}  // namespace

std::tuple<Vec, double, Vec> select_observation_point(const SpatialDomain& domain,
                                                      const VectorField& field, double c0, Mode mode,
                                                      double eta) {
    require_c0(c0);
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive (R bound is strict)");
    Vec ref = mode == Mode::degenerate ? field.derivative(0.0) : field.value(0.0);
    double len = norm(ref);
    if (len <= 1e-12)
        throw std::invalid_argument(mode == Mode::degenerate
                                        ? "observation direction undefined: |H'(0)| = 0"
                                        : "observation direction undefined: |H(0)| = 0");
    Vec theta0 = (1.0 / len) * ref;
    double R = (1.0 + eta) * ((1.0 + c0) / (1.0 - c0)) * domain.diameter();
    Vec x0 = -R * theta0;
    if (domain.classify(x0) != Region::exterior)
        throw std::logic_error("select_observation_point: x0 unexpectedly not exterior");
    return {x0, R, theta0};
}

double verify_angle_bound(const SpatialDomain& domain, const VectorField& field, const Vec& x0,
                          double c0, double window_hi, Mode mode, int time_samples, int space_samples) {
    require_c0(c0);
    if (domain.classify(x0) != Region::exterior)
        throw std::invalid_argument("verify_angle_bound: x0 must be exterior");
    std::vector<Vec> pts = closure_sample_points(domain, space_samples);
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= time_samples; ++k) {
        double t = window_hi * static_cast<double>(k) / time_samples;
        Vec d = mode == Mode::degenerate ? field.derivative(t) : field.value(t);
        double dlen = norm(d);
        if (dlen <= 1e-12)
            throw std::invalid_argument("verify_angle_bound: field modulus vanishes inside the window");
        for (const Vec& x : pts) {
            Vec r = x - x0;
            double c = dot(d, r) / (dlen * norm(r));
            if (c < m) m = c;
        }
    }
    return m - (2.0 * c0 * c0 - 1.0);
}

AdmissibilityCertificate build_certificate(const SpatialDomain& domain, const VectorField& field,
                                           double c0, Mode mode, double eta) {
    require_c0(c0);
    AdmissibilityCertificate cert;
    cert.mode = mode;
    cert.c0 = c0;
    cert.eta = eta;
    cert.T1 = field.c1_horizon();

    auto fail = [&](const std::string& why) {
        cert.feasible = false;
        cert.diagnostics.push_back(why);
        return cert;
    };

    if (mode == Mode::degenerate && !field.is_degenerate())
        return fail("degenerate mode requires H(0) = 0");

    try {
        cert.rho = modulus_lower_bound(field, mode, 0.0, cert.T1);
    } catch (const std::invalid_argument& e) {
        return fail(e.what());
    }
    try {
        cert.t1 = direction_persistence_time(field, c0, mode);
        cert.t1_constraint_holds_at_t1 = direction_constraint_holds_at(field, c0, mode, cert.t1);
    } catch (const std::invalid_argument& e) {
        return fail(e.what());
    }
    try {
        std::tie(cert.x0, cert.R, cert.theta0) = select_observation_point(domain, field, c0, mode, eta);
    } catch (const std::invalid_argument& e) {
        return fail(e.what());
    }
    try {
        cert.angle_margin = verify_angle_bound(domain, field, cert.x0, c0, cert.t1, mode);
    } catch (const std::invalid_argument& e) {
        return fail(e.what());
    }
    double dist = domain.exterior_distance(cert.x0);
    cert.delta = cert.rho * (2.0 * c0 * c0 - 1.0) * dist;
    std::tie(cert.d_m, cert.d_M) = domain.radius_extrema(cert.x0);
    double gap = cert.d_M - cert.d_m;
    cert.T0 = mode == Mode::degenerate ? std::sqrt(gap / cert.delta) : gap / cert.delta;

    if (cert.angle_margin < 0.0) {
        std::ostringstream os;
        os << "angle bound violated: margin " << cert.angle_margin << " < 0";
        return fail(os.str());
    }
    if (!(cert.T0 < cert.t1)) {
        std::ostringstream os;
        os << "threshold not met: T0 = " << cert.T0 << " >= t1 = " << cert.t1
           << " (margin " << cert.margin() << "); no admissible x0 rescue attempted";
        return fail(os.str());
    }

    // beta from the midpoint of the admissible interval, kappa the exact
    // negativity gap, epsilon half its admissible bound (capped)
    if (mode == Mode::degenerate) {
        double lo = gap / (cert.t1 * cert.t1);
        double hi = cert.delta;
        cert.beta = 0.5 * (lo + hi);
        cert.kappa = cert.beta * cert.t1 * cert.t1 - gap;
        cert.epsilon = std::min(0.5 * std::sqrt(std::min(cert.d_m, cert.kappa) / cert.beta), 0.9 * cert.t1);
    } else {
        double lo = gap / cert.t1;
        double hi = 2.0 * cert.delta;
        cert.beta = 0.5 * (lo + hi);
        cert.kappa = cert.beta * cert.t1 - gap;
        cert.epsilon = std::min(0.5 * std::min(cert.d_m, cert.kappa) / cert.beta, 0.9 * cert.t1);
    }
    cert.feasible = true;
    audit_certificate(cert, &domain);
    return cert;
}

double combine_constants(double c1, double c_energy) {
    if (c1 < 0.0 || c_energy < 0.0) throw std::invalid_argument("combine_constants: negative input");
    return std::sqrt(c1 * c1 + c_energy);
}

void audit_certificate(const AdmissibilityCertificate& cert, const SpatialDomain* domain) {
    if (!cert.feasible) return;
    auto check = [](bool ok, const char* what) {
        if (!ok) throw std::logic_error(std::string("certificate self-audit failed: ") + what);
    };
    if (domain) {
        double bound = (1.0 + cert.c0) / (1.0 - cert.c0) * domain->diameter();
        check(cert.R > bound, "R below the open bound (1+c0)/(1-c0) diam");
        check(domain->classify(cert.x0) == Region::exterior, "x0 not exterior");
    }
    check(std::abs(norm(cert.theta0) - 1.0) <= 1e-12, "theta0 not unit");
    check(cert.x0 == -cert.R * cert.theta0 || norm(cert.x0 + cert.R * cert.theta0) <= 1e-12 * cert.R,
          "x0 != -R theta0");
    check(cert.delta > 0.0, "delta <= 0");
    check(cert.d_m < cert.d_M, "d_m >= d_M");
    check(cert.angle_margin >= 0.0, "angle margin negative");
    check(cert.T0 < cert.t1, "T0 >= t1");
    double gap = cert.d_M - cert.d_m;
    if (cert.mode == Mode::degenerate) {
        check(cert.beta > 0.0 && cert.beta < cert.delta, "beta outside (0, delta)");
        check(gap - cert.beta * cert.t1 * cert.t1 <= -cert.kappa && cert.kappa > 0.0,
              "negativity gap kappa");
        check(cert.d_m - cert.beta * cert.epsilon * cert.epsilon > 0.0, "d_m - beta eps^2 <= 0");
        check(cert.kappa - cert.beta * cert.epsilon * cert.epsilon > 0.0, "kappa - beta eps^2 <= 0");
        check(cert.epsilon > 0.0 && cert.epsilon < cert.t1, "epsilon outside (0, t1)");
    } else {
        check(cert.beta > 0.0 && cert.beta < 2.0 * cert.delta, "beta outside (0, 2 delta)");
        check(gap - cert.beta * cert.t1 <= -cert.kappa && cert.kappa > 0.0, "negativity gap kappa");
        check(cert.d_m - cert.beta * cert.epsilon > 0.0, "d_m - beta eps <= 0");
        check(cert.kappa - cert.beta * cert.epsilon > 0.0, "kappa - beta eps <= 0");
        check(cert.epsilon > 0.0 && cert.epsilon < cert.t1, "epsilon outside (0, t1')");
    }
}

}  // namespace transobs
