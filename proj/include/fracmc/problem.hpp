#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracmc/stable.hpp"

namespace fracmc {

/// Scalar field on R^d, used for both the initial datum phi and the forcing g.
using Field = std::function<double(std::span<const double>)>;

/// kappa * |x|^eta (Euclidean norm); closed-form references and automatic
/// forcing bounds are available exactly for fields of this shape.
struct PowerForm {
  double kappa = 1.0;
  double eta = 0.0;
};

/// Full FPDE instance.  phi and g are opaque callbacks with declared
/// regularity metadata; the engine never inspects them beyond evaluation.
/// An empty g means the forcing is identically zero and the path-free
/// unbiased estimator applies.
struct ProblemSpec {
  SubordinatorSpec sub;
  StableSpec stable;
  TimeWindow win;
  std::vector<double> x;  // start point, size d

  Field phi;
  Field g;

  double gamma = 0.5;       // Hoelder exponent of g, in (0, beta/2)
  double lip = 0.0;         // Hoelder constant L, >= 0
  double phi_growth = 0.0;  // p with |phi(x)| = O(|x|^p); bounds only

  // Set when phi / g are catalog power laws; enables closed-form references.
  std::optional<PowerForm> phi_form;
  std::optional<PowerForm> g_form;

  bool has_forcing() const { return static_cast<bool>(g); }

  void validate() const {
    sub.validate();
    stable.validate();
    win.validate();
    if (static_cast<int>(x.size()) != stable.d)
      throw std::invalid_argument("ProblemSpec: x must have dimension d");
    if (!phi) throw std::invalid_argument("ProblemSpec: phi is required");
    if (has_forcing()) {
      if (!(gamma > 0.0 && gamma < stable.beta / 2.0))
        throw std::invalid_argument(
            "ProblemSpec: gamma must satisfy 0 < gamma < beta/2");
      if (!(lip >= 0.0))
        throw std::invalid_argument("ProblemSpec: lip must be >= 0");
    }
    if (!(phi_growth >= 0.0))
      throw std::invalid_argument("ProblemSpec: phi_growth must be >= 0");
  }
};

/// Raised when phi or g evaluates to a non-finite value; carries the state
/// at which evaluation failed and, once known, the offending sample index.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::vector<double> state,
                 std::int64_t sample_index = -1)
      : std::runtime_error(what),
        state_(std::move(state)),
        sample_index_(sample_index) {}
  const std::vector<double>& state() const { return state_; }
  std::int64_t sample_index() const { return sample_index_; }
  void set_sample_index(std::int64_t k) { sample_index_ = k; }

 private:
  std::vector<double> state_;
  std::int64_t sample_index_;
};

}  // namespace fracmc
