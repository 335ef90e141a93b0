#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>

namespace cpdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Kernel estimator families. The cp_* methods operate on contour-projected
// predictors (robust scatter, unit-sphere projection); sir/save/dr are the
// classical moment-based baselines on mean/covariance-standardized predictors.
enum class Method { cp_sir, cp_save, cp_dr, sir, save, dr };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::cp_sir: return "cp-sir";
    case Method::cp_save: return "cp-save";
    case Method::cp_dr: return "cp-dr";
    case Method::sir: return "sir";
    case Method::save: return "save";
    case Method::dr: return "dr";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "cp-sir" || s == "cp_sir") return Method::cp_sir;
  if (s == "cp-save" || s == "cp_save") return Method::cp_save;
  if (s == "cp-dr" || s == "cp_dr") return Method::cp_dr;
  if (s == "sir") return Method::sir;
  if (s == "save") return Method::save;
  if (s == "dr") return Method::dr;
  return std::nullopt;
}

inline bool is_contour_method(Method m) {
  return m == Method::cp_sir || m == Method::cp_save || m == Method::cp_dr;
}

}  // namespace cpdr
