#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "symcurv/rational.hpp"

namespace symcurv {

/// Malformed configuration; line() is 1-based, 0 when no line applies.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class Command {
  CheckConditionC,
  CheckConditionQ,
  CheckCone,
  VerifyConcavity,
  VerifyGuan,
  Solve,
  Homotopy,
  BarrierCheck,
};

std::string_view command_name(Command c);

struct OperatorParams {
  int n = 0;
  int k = 0;
  std::vector<Rational> alphas;
};

struct PsiParams {
  std::string family;  ///< constant | radial | anisotropic | ellipsoid
  double c = 1.0;
  double p = 0.0;
  double eps = 0.0;
  Eigen::Vector3d axis{0.0, 0.0, 1.0};
  Eigen::Vector3d axes{1.0, 1.0, 1.0};
  double r_inner = 0.0;
  double r_outer = 0.0;
};

struct RunConfig {
  Command command = Command::CheckConditionC;
  std::uint64_t seed = 1;
  long trials = 0;  ///< 0 selects the command's default
  std::string output_dir = "symcurv_out";

  // continuation / Newton
  int steps = 20;
  double homotopy_eps = 1e-2;
  double min_step = 1e-4;
  int max_iter = 30;
  double newton_tol = 0.0;
  double monitor_z = 1.0;

  std::optional<OperatorParams> op;
  std::optional<PsiParams> psi;

  int n_lon = 32;
  int n_lat = 16;
  double initial_radius = 1.0;

  // [verify]
  double tol = 1e-9;
  double hessian_tol = 1e-6;
  long hessian_trials = 0;  ///< 0 selects trials / 10
  std::string field = "root-q";
  int l = -1;  ///< -1 selects k - 1
  double delta = 1.0;

  long effective_trials() const;
  long effective_hessian_trials() const;
  int effective_l() const;

  /// Every setting in effect, as (section.key, value) pairs.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// INI-style text: [run] [operator] [psi] [grid] [verify] sections, key=value
/// pairs (several per line allowed), comma-separated lists, # comments.
RunConfig parse_config(std::string_view text);

}  // namespace symcurv
