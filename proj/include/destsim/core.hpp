#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace destsim {

using Index = Eigen::Index;

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Co-search counts are exact integers; 64 bits so products with the user
// count stay exact when folded into the measure formulas.
using CountMatrix = MatrixX<std::int64_t>;
using CountVector = VectorX<std::int64_t>;

/// A stream or file could not be read or written. Maps to exit code 2.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input content is structurally wrong (bad header, too many malformed
/// rows). Carries the first offending line when known. Exit code 2.
class format_error : public std::runtime_error {
 public:
  explicit format_error(const std::string& what, long line = -1)
      : std::runtime_error(what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Unknown destination code or measure tag. Maps to exit code 3.
class domain_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Measure { pearson, cosine, jaccard, kulsinski, ccs, ccs_norm, pccs };

inline constexpr std::array<Measure, 7> kAllMeasures = {
    Measure::pearson, Measure::cosine,   Measure::jaccard, Measure::kulsinski,
    Measure::ccs,     Measure::ccs_norm, Measure::pccs};

inline std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::pearson:   return "pearson";
    case Measure::cosine:    return "cosine";
    case Measure::jaccard:   return "jaccard";
    case Measure::kulsinski: return "kulsinski";
    case Measure::ccs:       return "ccs";
    case Measure::ccs_norm:  return "ccs_norm";
    case Measure::pccs:      return "pccs";
  }
  return "?";
}

inline Measure parse_measure(std::string_view tag) {
  for (Measure m : kAllMeasures) {
    if (tag == to_string(m)) return m;
  }
  throw domain_error("unknown measure: " + std::string(tag));
}

}  // namespace destsim
