#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hitrun/chains.hpp"
#include "hitrun/diagnostics.hpp"
#include "hitrun/geometry.hpp"
#include "hitrun/targets.hpp"

namespace hitrun::cli {

using json = nlohmann::json;

/// Malformed, unknown or out-of-range configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct BodyConfig {
    /// ball | box | cube | isotropic_cube | simplex | hpolytope | ellipsoid
    std::string kind = "box";
    int dim = 2;
    std::vector<double> center;    ///< ball, ellipsoid
    double radius = 1.0;           ///< ball
    std::vector<double> lower;     ///< box
    std::vector<double> upper;     ///< box
    double half_width = 1.0;       ///< cube
    double scale = 1.0;            ///< simplex
    std::vector<double> rows;      ///< hpolytope, row-major, offsets.size() rows
    std::vector<double> offsets;   ///< hpolytope
    std::vector<double> interior;  ///< hpolytope
    std::vector<double> shape;     ///< ellipsoid, row-major dim x dim
    std::optional<double> r_inscribed;
    std::optional<double> R_circum;

    bool operator==(const BodyConfig&) const = default;
};

struct TargetConfig {
    std::string kind = "uniform";  ///< uniform | truncated_gaussian
    std::vector<double> beta;
    double m = 1.0;

    bool operator==(const TargetConfig&) const = default;
};

struct ChainSection {
    std::string kind = "hit_and_run";  ///< hit_and_run | ball_walk | exact_resample
    double delta = 0.1;
    bool lazy = false;
    int max_chord_retries = 16;

    bool operator==(const ChainSection&) const = default;
};

struct SampleSection {
    std::uint64_t n_steps = 1000;
    std::uint64_t thin = 1;
    std::vector<double> init;  ///< empty: body center

    bool operator==(const SampleSection&) const = default;
};

struct OneDSection {
    std::string density = "uniform";  ///< uniform | gaussian | laplace
    std::uint64_t cells = 4096;
    double alpha = 1.0;
    double sigma2 = 1.0;
    std::uint64_t n_paths = 40;
    std::uint64_t n_steps = 1000;

    bool operator==(const OneDSection&) const = default;
};

struct SLSection {
    std::string mode = "body";  ///< body | one_d
    double T = 4.0;
    std::optional<double> h;  ///< default min(1/64, T/256)
    std::uint64_t n_paths = 16;
    std::uint64_t inner_budget = 256;
    std::uint64_t inner_burn_in = 64;
    std::vector<double> checkpoints;  ///< default {T}
    int event_axis = 0;
    std::optional<double> event_threshold;  ///< default: body center along event_axis
    OneDSection one_d;

    bool operator==(const SLSection&) const = default;
};

struct PartitionConfig {
    std::vector<double> normal;  ///< empty: first coordinate axis
    std::optional<double> offset;  ///< default: normal . body center

    bool operator==(const PartitionConfig&) const = default;
};

struct MixSection {
    std::vector<std::uint64_t> checkpoints = {0, 1, 2, 4, 8, 16, 32, 64};
    std::uint64_t n_replicas = 1000;
    std::string init = "warm";  ///< warm | center
    double warm_M = 2.0;
    double epsilon = 0.1;
    int n_bins = 20;
    std::uint64_t n_bootstrap = 100;
    std::uint64_t conductance_samples = 0;  ///< 0 leaves phi_s empty
    double s = 0.1;
    PartitionConfig partition;

    bool operator==(const MixSection&) const = default;
};

struct ConductanceSection {
    PartitionConfig partition;
    double s = 0.1;
    std::uint64_t n_samples = 2000;
    double M = 2.0;  ///< warm-start constant for the reported bound
    double N = 1000.0;  ///< step count for the reported bound

    bool operator==(const ConductanceSection&) const = default;
};

struct LogconcaveSection {
    std::vector<double> deltas = {0.05, 0.1, 0.3};
    double t_max = 10.0;
    double t_step = 0.25;

    bool operator==(const LogconcaveSection&) const = default;
};

struct VerifySection {
    std::uint64_t kernel_samples = 200'000;
    int kernel_grid = 20;
    double cov_m = 4.0;
    std::uint64_t cov_steps = 100'000;
    std::uint64_t sl_paths = 100;
    double sl_T = 1.0;
    std::uint64_t ct_paths = 200;
    std::uint64_t f_u_points = 10;
    std::uint64_t f_u_samples = 2000;
    double k_r_radius = 0.05;
    std::uint64_t k_r_samples = 2000;
    std::uint64_t lipschitz_pairs = 1000;
    std::uint64_t grid_cells = 4096;
    std::map<std::string, double> bounds;  ///< per-check bound overrides

    bool operator==(const VerifySection&) const = default;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    BodyConfig body;
    TargetConfig target;
    ChainSection chain;
    SampleSection sample;
    SLSection sl;
    MixSection mix;
    ConductanceSection conductance;
    LogconcaveSection logconcave;
    VerifySection verify;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Check ids accepted in verify.bounds.
const std::vector<std::string>& verify_check_ids();

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// ConfigError naming the offending path.
ExperimentConfig parse_config(const json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Every field with defaults filled in; parse_config inverts it.
json to_json(const ExperimentConfig& config);

ConvexBody build_body(const BodyConfig& body);
Target build_target(const ExperimentConfig& config, std::shared_ptr<const ConvexBody> body);
ChainConfig build_chain(const ChainSection& chain);
PartitionSpec build_partition(const PartitionConfig& partition, const ConvexBody& body);

}  // namespace hitrun::cli
