#include "reebflow/homeo1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reebflow/bisection.hpp"
#include "reebflow/error.hpp"

namespace reebflow {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite argument to ") + what);
}

}  // namespace

Homeo1D::Homeo1D(RealMap forward, std::optional<RealMap> inverse_hint, std::string name)
    : forward_(std::move(forward)), inverse_(std::move(inverse_hint)), name_(std::move(name)) {
  if (!forward_) throw DomainError("Homeo1D requires a forward map");
}

double Homeo1D::evaluate(double x) const {
  require_finite(x, "evaluate");
  return forward_(x);
}

double Homeo1D::invert(double z, const InvertOptions& opts) const {
  require_finite(z, "invert");
  if (!(opts.tol > 0.0)) throw DomainError("invert: tolerance must be positive");
  if (inverse_) {
    const double x = (*inverse_)(z);
    if (std::isfinite(x) && std::abs(forward_(x) - z) <= opts.tol) return x;
  }
  // Expand [z - w/2, z + w/2] until it straddles the preimage.
  double half = 0.5;
  double lo = z - half;
  double hi = z + half;
  int expansions = 0;
  while (forward_(lo) > z) {
    if (++expansions > opts.max_expansions) throw NumericalError("inversion bracket failure");
    half *= opts.bracket_growth;
    lo = z - half;
  }
  half = 0.5;
  while (forward_(hi) < z) {
    if (++expansions > opts.max_expansions) throw NumericalError("inversion bracket failure");
    half *= opts.bracket_growth;
    hi = z + half;
  }
  return bisect_increasing([&](double x) { return forward_(x) - z; }, lo, hi, opts.tol).root;
}

double Homeo1D::iterate(long n, double x, const InvertOptions& opts) const {
  require_finite(x, "iterate");
  for (long i = 0; i < n; ++i) x = forward_(x);
  for (long i = 0; i > n; --i) x = invert(x, opts);
  return x;
}

Homeo1D Homeo1D::inverse(const InvertOptions& opts) const {
  auto self = std::make_shared<const Homeo1D>(*this);
  RealMap fwd = inverse_ ? *inverse_ : RealMap([self, opts](double z) { return self->invert(z, opts); });
  return Homeo1D(std::move(fwd), forward_, name_.empty() ? std::string{} : name_ + "^-1");
}

double evaluate(const Homeo1D& h, double x) { return h.evaluate(x); }

double invert(const Homeo1D& h, double z, double bracket_growth, double tol) {
  InvertOptions opts;
  opts.bracket_growth = bracket_growth;
  opts.tol = tol;
  return h.invert(z, opts);
}

double iterate(const Homeo1D& h, long n, double x) { return h.iterate(n, x); }

double dist_K(const Homeo1D& g, const Homeo1D& h, double K, int grid) {
  if (!(K > 0.0)) throw DomainError("dist_K: K must be positive");
  if (grid < 2) throw DomainError("dist_K: grid must have at least 2 points");
  double worst = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = -K + 2.0 * K * i / (grid - 1);
    const double d = std::abs(g(x) - h(x)) + std::abs(g.invert(x) - h.invert(x));
    worst = std::max(worst, d);
  }
  return worst;
}

PiecewiseMonotoneInterpolant::PiecewiseMonotoneInterpolant(std::vector<double> inputs,
                                                           std::vector<double> outputs)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
  if (inputs_.size() != outputs_.size() || inputs_.size() < 2)
    throw DomainError("interpolant needs at least two (input, output) knots");
  for (std::size_t i = 1; i < inputs_.size(); ++i) {
    if (!(inputs_[i] > inputs_[i - 1])) throw InvariantViolation("knot inputs", "not strictly increasing");
    if (!(outputs_[i] > outputs_[i - 1]))
      throw InvariantViolation("knot outputs", "not strictly increasing at knot " + std::to_string(i));
  }
}

double PiecewiseMonotoneInterpolant::lookup(std::span<const double> from, std::span<const double> to,
                                            double v) {
  std::size_t i;
  if (v <= from.front())
    i = 0;
  else if (v >= from.back())
    i = from.size() - 2;
  else
    i = static_cast<std::size_t>(std::upper_bound(from.begin(), from.end(), v) - from.begin()) - 1;
  const double w = (v - from[i]) / (from[i + 1] - from[i]);
  return to[i] + w * (to[i + 1] - to[i]);
}

double PiecewiseMonotoneInterpolant::operator()(double x) const {
  require_finite(x, "interpolant");
  return lookup(inputs_, outputs_, x);
}

double PiecewiseMonotoneInterpolant::inverse(double y) const {
  require_finite(y, "interpolant inverse");
  return lookup(outputs_, inputs_, y);
}

Homeo1D PiecewiseMonotoneInterpolant::as_homeo(std::string name) const {
  auto table = std::make_shared<const PiecewiseMonotoneInterpolant>(*this);
  return Homeo1D([table](double x) { return (*table)(x); },
                 RealMap([table](double y) { return table->inverse(y); }), std::move(name));
}

Homeo1D translation(double shift) {
  return Homeo1D([shift](double x) { return x + shift; }, RealMap([shift](double z) { return z - shift; }),
                 "translation");
}

Homeo1D cubic_shift(double shift) {
  return Homeo1D([shift](double x) { return std::cbrt(x * x * x + shift); },
                 RealMap([shift](double z) { return std::cbrt(z * z * z - shift); }), "cubic");
}

}  // namespace reebflow
