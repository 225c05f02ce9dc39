#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reebflow {

using RealMap = std::function<double(double)>;

struct InvertOptions {
  double bracket_growth = 2.0;
  double tol = 1e-12;
  int max_expansions = 128;
};

/// An increasing self-homeomorphism of the real line given by an evaluable
/// forward map and, optionally, a closed-form inverse. The hint is only
/// trusted after its output is verified against the forward map.
class Homeo1D {
 public:
  Homeo1D() = default;
  explicit Homeo1D(RealMap forward, std::optional<RealMap> inverse_hint = std::nullopt,
                   std::string name = {});

  double evaluate(double x) const;
  double operator()(double x) const { return evaluate(x); }

  /// Solves forward(x) = z. Uses the inverse hint when present and accurate,
  /// otherwise expands a bracket geometrically around z and bisects.
  double invert(double z, const InvertOptions& opts = {}) const;

  /// n-fold composition; negative n iterates the inverse.
  double iterate(long n, double x, const InvertOptions& opts = {}) const;

  /// The inverse homeomorphism (forward and hint swapped).
  Homeo1D inverse(const InvertOptions& opts = {}) const;

  bool has_inverse_hint() const { return inverse_.has_value(); }
  const std::string& name() const { return name_; }

 private:
  RealMap forward_;
  std::optional<RealMap> inverse_;
  std::string name_;
};

/// Free-function spellings of the member operations.
double evaluate(const Homeo1D& h, double x);
double invert(const Homeo1D& h, double z, double bracket_growth, double tol);
double iterate(const Homeo1D& h, long n, double x);

/// Grid lower bound of sup_{|x|<=K} |g(x)-h(x)| + |g^-1(x)-h^-1(x)|.
double dist_K(const Homeo1D& g, const Homeo1D& h, double K, int grid = 512);

/// Knot table with linear interpolation between knots and affine
/// continuation with the end slopes outside the knot span.
class PiecewiseMonotoneInterpolant {
 public:
  PiecewiseMonotoneInterpolant(std::vector<double> inputs, std::vector<double> outputs);

  double operator()(double x) const;
  double inverse(double y) const;

  bool in_span(double x) const { return x >= inputs_.front() && x <= inputs_.back(); }
  std::span<const double> inputs() const { return inputs_; }
  std::span<const double> outputs() const { return outputs_; }
  std::size_t size() const { return inputs_.size(); }

  /// Wraps the table as a Homeo1D with its exact piecewise-linear inverse.
  Homeo1D as_homeo(std::string name = {}) const;

 private:
  static double lookup(std::span<const double> from, std::span<const double> to, double v);

  std::vector<double> inputs_;
  std::vector<double> outputs_;
};

// Builtin maps used throughout the tests and the CLI.
Homeo1D translation(double shift);
/// x -> (x^3 + shift)^(1/3), the time-`shift` map of the cube-coordinate flow.
Homeo1D cubic_shift(double shift);

}  // namespace reebflow
