#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ebrus/error.hpp"
#include "ebrus/integrate.hpp"
#include "ebrus/model.hpp"
#include "ebrus/spectral.hpp"

namespace ebrus {

struct ModeValue {
  int component = 0;  ///< 0..5 in (u, v, phi, w, z, psi) order
  int mode = 0;       ///< 0-based sorted mode index
  double value = 0.0;
  bool operator==(const ModeValue&) const = default;
};

enum class InitialKind { Random, Modes, Checkpoint };

struct InitialSpec {
  InitialKind kind = InitialKind::Random;
  double radius = 10.0;  ///< random data: |g0| drawn in (0, radius]
  std::vector<ModeValue> modes;
  std::string checkpoint;
  bool operator==(const InitialSpec&) const = default;
};

struct RunConfig {
  DomainSpec domain;
  int modes = 32;  ///< per axis
  Coefficients coefficients;
  IntegratorConfig integrator{0.01, Scheme::IfRk2, 50.0, 10, 0, true, 0.1};
  InitialSpec initial;

  int ensemble = 1;
  double tail_fraction = 0.4;
  double tol_rel = 0.05;
  int m_max = 24;
  int renorm_every = 10;
  double discard_time = 10.0;
  double qstar = 1.0;
  std::size_t embedding_samples = 1000;
  double scale_bounds = 1.0;  ///< negative control: multiplies every bound
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::string out_dir = "out";
  std::uint64_t seed = 20240601;

  /// Strictly validated parameters.
  Parameters parameters() const { return Parameters(coefficients); }
  bool operator==(const RunConfig&) const = default;
};

/// All problems found while parsing, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// INI text with sections [domain], [parameters], [integrator], [analysis].
/// Missing keys take the RunConfig defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical INI text; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& cfg);
void validate(const RunConfig& cfg);

/// Every key accepted in `section` (for diagnostics and docs).
const std::vector<std::string>& config_keys(const std::string& section);

}  // namespace ebrus
