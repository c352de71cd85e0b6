#pragma once

#include <nsnpeak/core_model.hpp>
#include <nsnpeak/integrator.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsnpeak::cli {

inline constexpr const char* kToolVersion = "1.0.0";

/// File system failure (missing config, unwritable output directory).
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct OutputFormats {
  bool csv{true};
  bool json{true};
  bool svg{true};
};

/// Everything a run depends on. Defaults reproduce the reference scenario
/// (beta = 0.21, gamma = 0.07, I0 = 1e-6, S0 = 1 - I0, Q = 28).
struct RunConfig {
  EpidemicParams params{};
  InitialCondition init{};
  double q{28.0};
  IntegratorConfig integrator{};
  std::filesystem::path out_dir{"out"};
  OutputFormats formats{};
  std::uint64_t seed{1};

  // simulate
  std::string policy{"nsn"};
  std::optional<double> level{};
  double constant_u{0.5};
  double duration{71.4};

  // sweep
  double q_min{0.0};
  double q_max{1e6};
  int n_points{61};
  bool log_q{true};

  // mischoice
  std::vector<double> deviations{-0.10, -0.05, -0.01, 0.01, 0.05, 0.10};

  // verify
  std::size_t trials{1000};

  // compare
  std::vector<double> durations{5, 10, 20, 40, 71.4, 100, 150, 200, 300};

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Sets one field from its textual key/value form. Throws ValidationError on
/// unknown keys or malformed values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key = value` file; `#` starts a comment. Unknown keys are errors.
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);

[[nodiscard]] OutputFormats parse_formats(const std::string& list);
[[nodiscard]] std::vector<double> parse_number_list(const std::string& list);

/// Canonical echo of the configuration, used in run manifests.
[[nodiscard]] nlohmann::json config_to_json(const RunConfig& cfg);

} // namespace nsnpeak::cli
