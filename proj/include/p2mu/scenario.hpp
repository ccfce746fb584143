#pragma once

#include "p2mu/approx.hpp"
#include "p2mu/witness.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace p2mu {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TargetEntry {
    std::string name;
    enum class Kind { IndicatorCarrier, IndicatorResidual, IndicatorArcs, Coeff } kind;
    std::vector<Arc> arcs;                             // IndicatorArcs
    std::vector<std::pair<long, Complex>> coeffs;      // Coeff
};

struct AnnihilatorSpec {
    Arc interval;
    long n_max = 200;
};

struct VariationAuditSpec {
    int families = 50;
    int max_arcs = 50;
    std::vector<double> rs{0.0, 0.9, 0.99, 0.999};
};

struct Scenario {
    std::string name;
    mpfr_prec_t precision_bits = 128;
    std::uint64_t seed = 1;
    MeasureSpec mu;
    std::vector<TargetEntry> targets;
    std::vector<long> profile_N;        // degrees for the distance profile
    std::vector<Rat> witness_N;         // witness family parameters
    std::optional<AnnihilatorSpec> annihilator;
    std::optional<VariationAuditSpec> variation;
    std::string source_json;            // re-serialized, for sweep overrides
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

/// Resolve a TargetEntry into an approx::TargetSpec against the measure.
TargetSpec resolve_target(const Scenario& sc, const TargetEntry& t);

struct RunOptions {
    std::string out_dir = "out";
    std::optional<mpfr_prec_t> precision_override;
    std::optional<std::uint64_t> seed_override;
    std::string format = "csv";  // csv | json
};

struct RunReport {
    int exit_code = 0;  // 0 ok, 2 verdict failures, 3 precision exhaustion
    std::string report_json;  // serialized RunReport (deterministic)
    std::vector<std::string> files_written;
};

/// Full pipeline: weights classification -> prediction -> distance profiles ->
/// witness families -> annihilator/certificates; writes CSV/JSON artifacts
/// into out_dir. Deterministic for fixed (scenario, precision, seed).
RunReport run_scenario(const Scenario& sc, const RunOptions& opt);

struct SweepPoint {
    std::string value;
    int exit_code;
    std::string dir;
};
struct SweepReport {
    int exit_code;
    std::vector<SweepPoint> points;
};
/// Grid sweep over one scenario parameter (JSON pointer-ish path, e.g.
/// "disk.c"). Each point runs in its own subdirectory; failures are recorded
/// and the sweep continues. A combined CSV collects per-point summaries.
SweepReport run_sweep(const std::string& base_json, const std::string& param,
                      const std::vector<std::string>& values, const RunOptions& opt);

}  // namespace p2mu
