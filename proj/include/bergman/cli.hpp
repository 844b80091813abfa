#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bergman/spectra.hpp"

namespace bergman::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNumerical = 2,
  kRefused = 3,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "BERGSPEC_OUT_DIR";

struct RunConfig {
  std::string subcommand;
  std::string symbol;
  std::size_t n = 120;
  std::size_t n2 = 16;
  std::size_t q_r = 64;
  std::size_t q_theta = 256;
  bool quadrature_given = false;
  GridSpec grid{};
  bool grid_given = false;
  double eps = 1e-3;
  std::size_t m_theta = 64;
  bool m_theta_given = false;
  std::size_t m_boundary = 512;
  bool adaptive = true;
  bool two_d = false;
  bool force_quadrature = false;
  bool estimate = false;
  bool winding = false;
  std::vector<cplx> probes;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 1;
  std::size_t threads = 0;

  /// Throws std::invalid_argument when a parameter leaves its documented cap.
  void validate() const;
};

/// Runs one subcommand. Artifacts go to --out (plus a sidecar
/// <stem>.meta.json), to $BERGSPEC_OUT_DIR/<subcommand>.<format>, or to `out`.
/// Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bergman::cli
