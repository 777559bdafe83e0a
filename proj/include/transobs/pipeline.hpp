#ifndef TRANSOBS_PIPELINE_HPP
#define TRANSOBS_PIPELINE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "transobs/carleman.hpp"
#include "transobs/certificate.hpp"
#include "transobs/scenario.hpp"

namespace transobs {

struct CertifyOutcome {
    AdmissibilityCertificate cert;
    std::vector<double> degenerate_times;  // zeros of |H| (reporting only)
    double s_star_value{0.0};              // non-degenerate feasible only
    std::vector<std::string> notes;        // e.g. box domains beyond the stated hypotheses
};

CertifyOutcome run_certify(const Scenario& sc);

/// The scenario's initial-profile ensemble (seeded registry draws and/or
/// the boundary-vanishing bump, per `ensemble.profiles`).
std::vector<SpatialProfile> scenario_profiles(const Scenario& sc);

struct CheckRow {
    std::string check;     // slack_sharp | slack_exact | slack_final | ibp_identity | pointwise_bound | angle_window
    std::string function;  // ensemble member label, or "-"
    double s{0.0};
    int level{0};
    bool log_domain{false};
    double lhs{0.0}, rhs_volume{0.0}, rhs_sigma{0.0}, rhs_endpoint{0.0};
    double slack{0.0};  // slack, residual, or margin depending on the check
    double tol{0.0};
    bool pass{false};
};

struct EnergyRow {
    std::string check;  // identity | decay_ratio | bound
    std::string profile;
    double t{0.0}, h{0.0};
    int level{0};
    double value{0.0};
    double bound{0.0};
    bool pass{false};
};

struct VerificationReport {
    std::string scenario;
    bool diagnostic{false};  // forced run on an infeasible certificate
    std::vector<CheckRow> checks;
    std::vector<EnergyRow> energy;
    bool all_pass() const;
};

/// Carleman slack sweep (ensemble x s grid, levels L/L+1), identity
/// residuals, energy identity/bound sweep, pointwise lower bound.
/// Requires a feasible certificate unless `force` (diagnostic mode).
VerificationReport run_verify(const Scenario& sc, const CertifyOutcome& outcome, int workers,
                              bool force);

struct ObsRow {
    std::string profile;
    int level{0};
    double ratio{0.0};
    double t_at_max{0.0};
    double norm_g{0.0};
    bool skipped{false};
    bool unbounded{false};
};

struct ObservabilityReport {
    std::string scenario;
    bool diagnostic{false};
    std::vector<ObsRow> rows;  // per profile, levels L then L+1
    double c_obs_lo{0.0};      // at level L
    double c_obs_hi{0.0};      // at level L+1
    double stability_rel{0.0};
    double c_local{0.0};
    double c_e{0.0};
    double c2{0.0};
    bool any_unbounded{false};
    bool anomaly{false};  // zero trace for a nonzero solution under a feasible certificate
};

ObservabilityReport run_observe(const Scenario& sc, const CertifyOutcome& outcome, int workers);

/// CSV writers. Byte-deterministic: fixed row order, %.17g numbers,
/// RFC-4180 quoting. First line is a versioned schema comment.
void write_certify_csv(std::ostream& os, const Scenario& sc, const CertifyOutcome& outcome);
void write_carleman_csv(std::ostream& os, const Scenario& sc, const VerificationReport& report);
void write_energy_csv(std::ostream& os, const Scenario& sc, const VerificationReport& report);
void write_observability_csv(std::ostream& os, const Scenario& sc, const ObservabilityReport& report);

std::string certify_summary(const Scenario& sc, const CertifyOutcome& outcome);
std::string verify_summary(const Scenario& sc, const VerificationReport& report);
std::string observe_summary(const Scenario& sc, const ObservabilityReport& report);

/// Creates the directory if needed and writes content atomically enough
/// for reruns (truncate + write).
void write_file(const std::string& dir, const std::string& name, const std::string& content);

std::string format17(double v);
std::string csv_escape(const std::string& s);

}  // namespace transobs

#endif
