#include "transobs/carleman.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "transobs/parallel.hpp"
#include "transobs/simd.hpp"

namespace transobs {

WeightEval weight_eval(const CarlemanWeight& weight, const VectorField& field, const Vec& x, double t) {
    Vec r = x - weight.x0;
    double r2 = norm2(r);
    Vec H = field.value(t);
    WeightEval out;
    if (weight.mode == Mode::degenerate) {
        Vec Hp = field.derivative(t);
        out.value = r2 - weight.beta * t * t;
        out.A = -2.0 * weight.beta * t + 2.0 * dot(H, r);
        out.A2 = -2.0 * weight.beta + 2.0 * dot(Hp, r) + 2.0 * norm2(H);
    } else {
        Vec Hp = field.derivative(t);
        out.value = r2 - weight.beta * t;
        out.A = -weight.beta + 2.0 * dot(H, r);
        out.A2 = 2.0 * dot(Hp, r) + 2.0 * norm2(H);
    }
    out.shifted = out.value - weight.shift;
    return out;
}

CylinderGrids cylinder_grids(const SpatialDomain& domain, double t_lo, double t_hi, int level) {
    if (!(t_hi > t_lo)) throw std::invalid_argument("cylinder_grids: empty time window");
    CylinderGrids g;
    g.level = level;
    g.t_lo = t_lo;
    g.t_hi = t_hi;
    int n = nodes_per_axis(level);
    g.space = volume_grid(domain, n);
    g.surface = surface_grid(domain, n);
    g.time = gauss_grid(t_lo, t_hi, n);
    std::size_t ns = g.space.x.size();
    g.xs.resize(ns);
    g.sw = g.space.w;
    if (domain.dim() >= 2) g.ys.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        g.xs[i] = g.space.x[i][0];
        if (domain.dim() >= 2) g.ys[i] = g.space.x[i][1];
    }
    return g;
}

namespace {

struct SliceScratch {
    std::vector<double> expw, hdot, aphi, a2phi, wv, awv, ew, wsq, tmp, buf;
    explicit SliceScratch(std::size_t n)
        : expw(n), hdot(n), aphi(n), a2phi(n), wv(n), awv(n), ew(n), wsq(n), tmp(n), buf(n) {}
};

constexpr int kVol_w2 = 0;
constexpr int kVol_Aw2 = 1;
constexpr int kVol_A2w2 = 2;
constexpr int kVol_Asq_w2 = 3;
constexpr int kVol_ibp = 4;
constexpr int kNumVolTerms = 5;

}  // namespace

CarlemanTerms carleman_terms(const TestFunction& w, const VectorField& field,
                             const CarlemanWeight& weight, const CylinderGrids& grids, double s,
                             bool log_domain, int workers) {
    const auto& K = simd::kernels();
    const std::size_t ns = grids.xs.size();
    const std::size_t nt = grids.time.x.size();
    const int dim = grids.space.dim;
    const bool deg = weight.mode == Mode::degenerate;
    const double beta = weight.beta;
    const double shift = weight.shift;

    // |x - x0|^2 per space node; t-independent
    std::vector<double> r2(ns);
    if (dim == 1)
        K.sq_dist1(grids.xs.data(), weight.x0[0], r2.data(), ns);
    else
        K.sq_dist2(grids.xs.data(), grids.ys.data(), weight.x0[0], weight.x0[1], r2.data(), ns);

    std::vector<double> log_sw;
    if (log_domain) {
        log_sw.resize(ns);
        for (std::size_t i = 0; i < ns; ++i) log_sw[i] = std::log(grids.sw[i]);
    }

    std::vector<std::array<double, kNumVolTerms>> partial(nt);
    std::vector<std::array<SignedLogAccumulator, kNumVolTerms>> partial_log(log_domain ? nt : 0);

    parallel_for(nt, workers, [&](std::size_t k0, std::size_t k1) {
        SliceScratch sc(ns);
        for (std::size_t k = k0; k < k1; ++k) {
            const double t = grids.time.x[k];
            const Vec H = field.value(t);
            const Vec Hp = field.derivative(t);
            const double h2 = norm2(H);

            // exponent argument: 2s(r2 - beta*t(^2) - shift) = a*r2 + b
            const double poly_t = deg ? beta * t * t : beta * t;
            const double exp_b = -2.0 * s * (poly_t + shift);
            K.exp_affine(r2.data(), 2.0 * s, exp_b, sc.expw.data(), ns);

            // A(phi) = 2 H.(x-x0) - 2 beta t   /  A(psi) = 2 H.(x-x0) - beta
            if (dim == 1)
                K.dot_shift1(grids.xs.data(), H[0], weight.x0[0], sc.hdot.data(), ns);
            else
                K.dot_shift2(grids.xs.data(), grids.ys.data(), H[0], H[1], weight.x0[0], weight.x0[1],
                             sc.hdot.data(), ns);
            const double aphi_b = deg ? -2.0 * beta * t : -beta;
            K.affine(sc.hdot.data(), 2.0, aphi_b, sc.aphi.data(), ns);

            // A^2(phi) = 2 H'.(x-x0) - 2 beta + 2|H|^2  /  A^2(psi) = 2 H'.(x-x0) + 2|H|^2
            if (dim == 1)
                K.dot_shift1(grids.xs.data(), Hp[0], weight.x0[0], sc.tmp.data(), ns);
            else
                K.dot_shift2(grids.xs.data(), grids.ys.data(), Hp[0], Hp[1], weight.x0[0], weight.x0[1],
                             sc.tmp.data(), ns);
            const double a2_b = deg ? (-2.0 * beta + 2.0 * h2) : (2.0 * h2);
            K.affine(sc.tmp.data(), 2.0, a2_b, sc.a2phi.data(), ns);

            for (std::size_t i = 0; i < ns; ++i) {
                TFEval e = w.eval(grids.space.x[i], t);
                sc.wv[i] = e.value;
                sc.awv[i] = e.dt + dot(H, e.grad);
            }

            K.mul(sc.expw.data(), grids.sw.data(), sc.ew.data(), ns);
            K.mul(sc.wv.data(), sc.wv.data(), sc.wsq.data(), ns);

            auto reduce_into = [&](int term, const double* values) {
                NeumaierSum acc;
                for (std::size_t i = 0; i < ns; ++i) {
                    if (!std::isfinite(values[i])) {
                        std::ostringstream os;
                        os << "integrate: non-finite integrand at node (t=" << t
                           << ", x=" << grids.space.x[i][0];
                        if (dim > 1) os << "," << grids.space.x[i][1];
                        os << "), term " << term
                           << "; if this is exponent overflow, enable log-domain accumulation or "
                              "raise the shift";
                        throw std::runtime_error(os.str());
                    }
                    acc.add(values[i]);
                }
                partial[k][term] = acc.value();
            };

            K.mul(sc.ew.data(), sc.wsq.data(), sc.buf.data(), ns);
            reduce_into(kVol_w2, sc.buf.data());
            K.mul_sq(sc.ew.data(), sc.awv.data(), sc.buf.data(), ns);
            reduce_into(kVol_Aw2, sc.buf.data());
            K.mul3(sc.ew.data(), sc.wsq.data(), sc.a2phi.data(), sc.buf.data(), ns);
            reduce_into(kVol_A2w2, sc.buf.data());
            K.mul(sc.aphi.data(), sc.aphi.data(), sc.tmp.data(), ns);
            K.mul3(sc.ew.data(), sc.wsq.data(), sc.tmp.data(), sc.buf.data(), ns);
            reduce_into(kVol_Asq_w2, sc.buf.data());
            {
                for (std::size_t i = 0; i < ns; ++i) {
                    double cross = 2.0 * (sc.awv[i] + s * sc.aphi[i] * sc.wv[i]) * (-s * sc.aphi[i]) * sc.wv[i];
                    sc.buf[i] = sc.ew[i] * cross;
                }
                reduce_into(kVol_ibp, sc.buf.data());
            }

            if (log_domain) {
                const double log_tw = std::log(grids.time.w[k]);
                for (std::size_t i = 0; i < ns; ++i) {
                    double lw = 2.0 * s * r2[i] + exp_b + log_sw[i] + log_tw;
                    double w2 = sc.wsq[i];
                    partial_log[k][kVol_w2].add_term(lw, w2);
                    partial_log[k][kVol_Aw2].add_term(lw, sc.awv[i] * sc.awv[i]);
                    partial_log[k][kVol_A2w2].add_term(lw, sc.a2phi[i] * w2);
                    partial_log[k][kVol_Asq_w2].add_term(lw, sc.aphi[i] * sc.aphi[i] * w2);
                    double cross = 2.0 * (sc.awv[i] + s * sc.aphi[i] * sc.wv[i]) * (-s * sc.aphi[i]) * sc.wv[i];
                    partial_log[k][kVol_ibp].add_term(lw, cross);
                }
            }
        }
    });

    CarlemanTerms out;
    {
        std::array<NeumaierSum, kNumVolTerms> total;
        for (std::size_t k = 0; k < nt; ++k)
            for (int term = 0; term < kNumVolTerms; ++term) total[term].add(partial[k][term] * grids.time.w[k]);
        out.vol_w2.direct = total[kVol_w2].value();
        out.vol_Aw2.direct = total[kVol_Aw2].value();
        out.vol_A2w2.direct = total[kVol_A2w2].value();
        out.vol_Asq_w2.direct = total[kVol_Asq_w2].value();
        out.vol_ibp_lhs.direct = total[kVol_ibp].value();
        if (log_domain) {
            std::array<SignedLogAccumulator, kNumVolTerms> tl;
            for (std::size_t k = 0; k < nt; ++k)
                for (int term = 0; term < kNumVolTerms; ++term) tl[term].merge(partial_log[k][term]);
            out.vol_w2.logv = tl[kVol_w2].value();
            out.vol_Aw2.logv = tl[kVol_Aw2].value();
            out.vol_A2w2.logv = tl[kVol_A2w2].value();
            out.vol_Asq_w2.logv = tl[kVol_Asq_w2].value();
            out.vol_ibp_lhs.logv = tl[kVol_ibp].value();
        }
    }

    // lateral boundary: few nodes, sequential
    {
        NeumaierSum acc;
        SignedLogAccumulator lacc;
        for (std::size_t k = 0; k < nt; ++k) {
            const double t = grids.time.x[k];
            const Vec H = field.value(t);
            for (const auto& bp : grids.surface.p) {
                WeightEval we = weight_eval(weight, field, bp.x, t);
                double g = w.value(bp.x, t);
                double hn = dot(H, bp.normal);
                double factor = we.A * hn * g * g * bp.weight * grids.time.w[k];
                double earg = 2.0 * s * we.shifted;
                double node = std::exp(earg) * factor;
                if (!std::isfinite(node)) {
                    std::ostringstream os;
                    os << "integrate: non-finite boundary integrand at (t=" << t << ", x=" << bp.x[0]
                       << ")";
                    throw std::runtime_error(os.str());
                }
                acc.add(node);
                if (log_domain) lacc.add_term(earg, factor);
            }
        }
        out.sigma_flux.direct = acc.value();
        if (log_domain) out.sigma_flux.logv = lacc.value();
    }

    // endpoint slices
    auto endpoint_slice = [&](double t, TermValue& tv) {
        NeumaierSum acc;
        SignedLogAccumulator lacc;
        for (std::size_t i = 0; i < ns; ++i) {
            WeightEval we = weight_eval(weight, field, grids.space.x[i], t);
            double g = w.value(grids.space.x[i], t);
            double factor = we.A * g * g * grids.sw[i];
            double earg = 2.0 * s * we.shifted;
            double node = std::exp(earg) * factor;
            if (!std::isfinite(node)) {
                std::ostringstream os;
                os << "integrate: non-finite endpoint integrand at (t=" << t
                   << ", x=" << grids.space.x[i][0] << ")";
                throw std::runtime_error(os.str());
            }
            acc.add(node);
            if (log_domain) lacc.add_term(earg, factor);
        }
        tv.direct = acc.value();
        if (log_domain) tv.logv = lacc.value();
    };
    endpoint_slice(grids.t_hi, out.end_hi);
    endpoint_slice(grids.t_lo, out.end_lo);
    return out;
}

double ibp_identity_residual(const TestFunction& w, const VectorField& field,
                             const CarlemanWeight& weight, const CylinderGrids& grids, double s,
                             int workers) {
    if (!(s > 0.0)) throw std::invalid_argument("ibp_identity_residual: s must be positive");
    CarlemanTerms terms = carleman_terms(w, field, weight, grids, s, false, workers);
    double lhs = terms.vol_ibp_lhs.direct;
    double rhs = s * terms.vol_A2w2.direct - s * terms.sigma_flux.direct -
                 s * (terms.end_hi.direct - terms.end_lo.direct);
    const double tiny = 1e-300;
    return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + tiny);
}

bool log_domain_needed(const AdmissibilityCertificate& cert, double s) {
    double range = cert.d_M - cert.d_m;
    double tau = cert.t1;
    range += cert.mode == Mode::degenerate ? cert.beta * tau * tau : cert.beta * tau;
    return 2.0 * s * range > 600.0;
}

namespace {

struct FormTerms {
    double lhs, rhs_volume, rhs_sigma, rhs_endpoint;
    SignedLog lhs_log, rhs_volume_log, rhs_sigma_log, rhs_endpoint_log;
};

FormTerms assemble_form(const CarlemanTerms& t, const AdmissibilityCertificate& cert, double s,
                        SlackForm form, bool log_domain) {
    FormTerms f{};
    auto scale_log = [](const SignedLog& v, double factor) {
        if (factor == 0.0) return SignedLog::zero();
        SignedLog r = v.scaled(std::log(std::abs(factor)));
        if (factor < 0.0) r.sign = -r.sign;
        return r;
    };
    switch (form) {
        case SlackForm::degenerate_sharp: {
            double c = 2.0 * (cert.delta - cert.beta) * s;
            f.lhs = c * t.vol_w2.direct;
            if (log_domain) f.lhs_log = scale_log(t.vol_w2.logv, c);
            break;
        }
        case SlackForm::nondegenerate_exact: {
            f.lhs = s * s * t.vol_Asq_w2.direct + s * t.vol_A2w2.direct;
            if (log_domain)
                f.lhs_log = signed_log_add(scale_log(t.vol_Asq_w2.logv, s * s), scale_log(t.vol_A2w2.logv, s));
            break;
        }
        case SlackForm::nondegenerate_final: {
            double two_delta_beta = 2.0 * cert.delta - cert.beta;
            double c = 0.5 * two_delta_beta * two_delta_beta * s * s;
            f.lhs = c * t.vol_w2.direct;
            if (log_domain) f.lhs_log = scale_log(t.vol_w2.logv, c);
            break;
        }
    }
    f.rhs_volume = t.vol_Aw2.direct;
    f.rhs_sigma = s * t.sigma_flux.direct;
    f.rhs_endpoint = s * (t.end_hi.direct - t.end_lo.direct);
    if (log_domain) {
        f.rhs_volume_log = t.vol_Aw2.logv;
        f.rhs_sigma_log = scale_log(t.sigma_flux.logv, s);
        f.rhs_endpoint_log = scale_log(signed_log_sub(t.end_hi.logv, t.end_lo.logv), s);
    }
    return f;
}

}  // namespace

SlackBreakdown carleman_slack(const TestFunction& w, const VectorField& base_field,
                              const AdmissibilityCertificate& cert, const SpatialDomain& domain,
                              double s, int level, SlackForm form, int workers,
                              std::optional<double> shift_override,
                              std::optional<bool> log_domain_override) {
    if (!(s > 0.0)) throw std::invalid_argument("carleman_slack: s must be positive");
    bool want_deg = form == SlackForm::degenerate_sharp;
    if (want_deg != (cert.mode == Mode::degenerate))
        throw std::invalid_argument("carleman_slack: form does not match certificate mode");
    if (!(cert.beta > 0.0)) throw std::invalid_argument("carleman_slack: certificate carries no beta");

    VectorField field = cert.mode == Mode::degenerate ? base_field.reflect_extend() : base_field;
    double tau = cert.t1;
    double t_lo = cert.mode == Mode::degenerate ? -tau : 0.0;

    CarlemanWeight weight{cert.mode, cert.x0, cert.beta, shift_override.value_or(cert.d_M)};
    bool log_domain = log_domain_override.value_or(log_domain_needed(cert, s));

    CylinderGrids gL = cylinder_grids(domain, t_lo, tau, level);
    CylinderGrids gL1 = cylinder_grids(domain, t_lo, tau, level + 1);
    CarlemanTerms tL = carleman_terms(w, field, weight, gL, s, log_domain, workers);
    CarlemanTerms tL1 = carleman_terms(w, field, weight, gL1, s, log_domain, workers);

    FormTerms fL = assemble_form(tL, cert, s, form, log_domain);
    FormTerms fL1 = assemble_form(tL1, cert, s, form, log_domain);

    SlackBreakdown out;
    out.s = s;
    out.level = level;
    out.log_domain = log_domain;
    out.lhs = fL.lhs;
    out.rhs_volume = fL.rhs_volume;
    out.rhs_sigma = fL.rhs_sigma;
    out.rhs_endpoint = fL.rhs_endpoint;
    out.slack = fL.rhs_volume + fL.rhs_sigma + fL.rhs_endpoint - fL.lhs;
    out.tol_quad = 10.0 * (std::abs(fL.lhs - fL1.lhs) + std::abs(fL.rhs_volume - fL1.rhs_volume) +
                           std::abs(fL.rhs_sigma - fL1.rhs_sigma) +
                           std::abs(fL.rhs_endpoint - fL1.rhs_endpoint));
    if (log_domain) {
        SignedLog rhs = signed_log_add(signed_log_add(fL.rhs_volume_log, fL.rhs_sigma_log), fL.rhs_endpoint_log);
        out.slack_log = signed_log_sub(rhs, fL.lhs_log);
        SignedLog tol = SignedLog::zero();
        tol = signed_log_add(tol, signed_log_sub(fL.lhs_log, fL1.lhs_log));
        tol.sign = std::abs(tol.sign);
        auto add_abs = [&tol](const SignedLog& a, const SignedLog& b) {
            SignedLog d = signed_log_sub(a, b);
            d.sign = std::abs(d.sign);
            tol = signed_log_add(tol, d);
        };
        add_abs(fL.rhs_volume_log, fL1.rhs_volume_log);
        add_abs(fL.rhs_sigma_log, fL1.rhs_sigma_log);
        add_abs(fL.rhs_endpoint_log, fL1.rhs_endpoint_log);
        out.tol_log = tol.scaled(std::log(10.0));
        out.pass = out.slack_log.sign >= 0 ||
                   (out.tol_log.sign > 0 && out.slack_log.log_mag <= out.tol_log.log_mag);
        // keep the direct fields meaningful when they stayed finite
        if (!std::isfinite(out.slack)) out.slack = out.slack_log.value();
        if (!std::isfinite(out.tol_quad)) out.tol_quad = out.tol_log.value();
    } else {
        out.pass = out.slack >= -out.tol_quad;
    }
    return out;
}

double max_abs_A2(const CarlemanWeight& weight, const VectorField& field, const SpatialDomain& domain,
                  double t_lo, double t_hi) {
    std::vector<Vec> pts = closure_sample_points(domain, 1024);
    const int nt = 512;
    double m = 0.0;
    for (int k = 0; k <= nt; ++k) {
        double t = t_lo + (t_hi - t_lo) * static_cast<double>(k) / nt;
        for (const Vec& x : pts) m = std::max(m, std::abs(weight_eval(weight, field, x, t).A2));
    }
    return m;
}

double s_star(const AdmissibilityCertificate& cert, const VectorField& field,
              const SpatialDomain& domain) {
    if (cert.mode != Mode::nondegenerate)
        throw std::invalid_argument("s_star: defined for the non-degenerate form");
    if (!cert.feasible) throw std::invalid_argument("s_star: certificate is infeasible");
    CarlemanWeight weight{cert.mode, cert.x0, cert.beta, cert.d_M};
    double M = max_abs_A2(weight, field, domain, 0.0, cert.t1);
    double denom = 2.0 * cert.delta - cert.beta;
    return 2.0 * M / (denom * denom);
}

double energy_residual(const SpatialProfile& u0, const VectorField& field, const SpatialDomain& domain,
                       double t, double h, int level) {
    if (!(h > 0.0)) throw std::invalid_argument("energy_residual: h must be positive");
    double lo = field.lower_time();
    if (t - h < lo || t + h > field.horizon())
        throw std::out_of_range("energy_residual: t +/- h leaves the window");
    int n = nodes_per_axis(level);
    SpaceGrid space = volume_grid(domain, n);
    SurfaceGrid surf = surface_grid(domain, n);
    auto energy = [&](double theta) {
        Vec shift = field.flow(theta);
        return integrate(space, [&](const Vec& x) {
            double u = u0.value(x - shift);
            return u * u;
        });
    };
    double dE = (energy(t + h) - energy(t - h)) / (2.0 * h);
    Vec H = field.value(t);
    Vec shift = field.flow(t);
    double flux = integrate(surf, [&](const BoundaryPoint& bp) {
        double g = u0.value(bp.x - shift);
        return dot(H, bp.normal) * g * g;
    });
    return std::abs(dE + flux);
}

double energy_bound_constant(const VectorField& field) {
    const int n = 10000;
    double T = field.horizon();
    double best = 0.0;
    int arg = 0;
    for (int k = 0; k <= n; ++k) {
        double t = T * static_cast<double>(k) / n;
        double v = norm(field.value(t));
        if (v > best) {
            best = v;
            arg = k;
        }
    }
    double step = T / n;
    double a = std::max(0.0, (arg - 1) * step);
    double b = std::min(T, (arg + 1) * step);
    double tmax = golden_min([&](double t) { return -norm(field.value(t)); }, a, b, 1e-10);
    return std::max(best, norm(field.value(tmax)));
}

double pointwise_bound_margin(const AdmissibilityCertificate& cert, const VectorField& base_field,
                              const SpatialDomain& domain, double window_hi) {
    VectorField field = cert.mode == Mode::degenerate ? base_field.reflect_extend() : base_field;
    double t_lo = cert.mode == Mode::degenerate ? -window_hi : 0.0;
    std::vector<Vec> pts = closure_sample_points(domain, 1024);
    const int nt = 512;
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= nt; ++k) {
        double t = t_lo + (window_hi - t_lo) * static_cast<double>(k) / nt;
        Vec d = cert.mode == Mode::degenerate ? field.derivative(t) : field.value(t);
        for (const Vec& x : pts) m = std::min(m, dot(d, x - cert.x0));
    }
    return m - cert.delta;
}

}  // namespace transobs
