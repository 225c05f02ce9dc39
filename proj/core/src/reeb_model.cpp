#include "reebflow/reeb_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "reebflow/bisection.hpp"
#include "reebflow/error.hpp"

namespace reebflow {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite ") + what);
}

double clamp_theta(double theta) { return std::clamp(theta, 0.5, 2.0); }

}  // namespace

QuadrantPoint QuadrantPoint::from_xy(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
    throw DomainError("quadrant point needs finite positive coordinates");
  return from_logs(std::log(x), std::log(y));
}

QuadrantPoint QuadrantPoint::from_logs(double lx, double ly) {
  require_finite(lx, "log x");
  require_finite(ly, "log y");
  return QuadrantPoint(lx + ly, lx);
}

QuadrantPoint QuadrantPoint::on_leaf(double leaf_log, double lx) {
  require_finite(leaf_log, "leaf log");
  require_finite(lx, "log x");
  return QuadrantPoint(leaf_log, lx);
}

double QuadrantPoint::x() const { return std::exp(lx_); }
double QuadrantPoint::y() const { return std::exp(ly()); }

BoundaryPoint BoundaryPoint::on_delta(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("boundary coordinate must be positive");
  return {Side::delta, y};
}

BoundaryPoint BoundaryPoint::on_delta_prime(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("boundary coordinate must be positive");
  return {Side::delta_prime, x};
}

const char* side_name(Side s) { return s == Side::delta ? "delta" : "delta_prime"; }

BetaProfile::BetaProfile(double bump_amplitude) : amplitude_(bump_amplitude) {
  if (!(bump_amplitude > 0.0) || !std::isfinite(bump_amplitude))
    throw DomainError("beta amplitude must be positive");
  if (bump_amplitude != kDefaultAmplitude) {
    const double slope = min_h_slope(bump_amplitude);
    if (!(slope > 0.75)) {
      std::ostringstream os;
      os << "beta amplitude " << bump_amplitude << " gives min h' = " << slope << " <= 3/4";
      throw DomainError(os.str());
    }
  }
}

double BetaProfile::h(double theta) const {
  if (!(theta >= 0.5 && theta <= 1.0)) throw DomainError("h: theta outside [1/2, 1]");
  if (theta <= 0.75) return theta;
  const double u = theta - 0.75;
  const double v = 1.0 - theta;
  return theta - amplitude_ * u * u * v * v;
}

double BetaProfile::operator()(double theta) const {
  if (!(theta >= 0.5 && theta <= 2.0)) throw DomainError("beta: theta outside [1/2, 2]");
  if (theta > 1.0) theta *= 0.5;
  if (theta <= 0.75) return 1.0;
  return theta / h(theta);
}

double BetaProfile::solve_sq_ratio(double target) const {
  if (!(target >= 0.5 && target <= 2.0)) throw DomainError("sector ratio outside [1/2, 2]");
  // theta / beta^2 fixes [1/2, 3/4] and [1, 3/2] pointwise and maps
  // [3/4, 1] and [3/2, 2] onto themselves.
  if (target <= 0.75 || (target >= 1.0 && target <= 1.5)) return target;
  const double lo = target < 1.0 ? 0.75 : 1.5;
  const double hi = target < 1.0 ? 1.0 : 2.0;
  auto g = [&](double th) {
    const double b = (*this)(th);
    return th / (b * b) - target;
  };
  return bisect_increasing(g, lo, hi, 0.0).root;
}

double BetaProfile::min_h_slope(double amplitude, int grid) {
  const BetaProfile probe = [&] {
    // Bypass the constructor's own check.
    BetaProfile p(kDefaultAmplitude);
    p.amplitude_ = amplitude;
    return p;
  }();
  double worst = std::numeric_limits<double>::infinity();
  const double step = 0.5 / grid;
  for (int i = 0; i < grid; ++i) {
    const double a = 0.5 + step * i;
    const double b = i + 1 == grid ? 1.0 : a + step;
    worst = std::min(worst, (probe.h(b) - probe.h(a)) / (b - a));
  }
  return worst;
}

double beta(const BetaProfile& profile, double theta) { return profile(theta); }

void CounterexampleParams::validate() const {
  auto fail = [](const std::string& what) { throw DomainError("counterexample parameters: " + what); };
  for (double v : {a, b, delta, c, d})
    if (!(v > 0.0) || !std::isfinite(v)) fail("all parameters must be finite and positive");
  if (!(delta > 1.0)) fail("delta > 1");
  const double ba = b / a;
  const double d2 = delta * delta;
  if (!(ba < 0.75 && 0.75 < d2 * ba)) fail("b/a < 3/4 < delta^2 b/a");
  if (!(std::abs(d2 * ba - ba) < 0.01)) fail("|delta^2 b/a - b/a| < 1/100");
  if (!(c > a)) fail("c > a");
  if (!(d < b)) fail("d < b");
  const std::pair<const char*, double> ratios[] = {
      {"d/c", d / c}, {"delta^2 d/c", d2 * d / c}, {"d/a", d / a},
      {"delta^2 d/a", d2 * d / a}, {"b/c", b / c}, {"delta^2 b/c", d2 * b / c}};
  for (const auto& [name, r] : ratios)
    if (!(r > 0.5 && r < ba)) fail(std::string(name) + " must lie in (1/2, b/a)");
}

bool in_sector(const QuadrantPoint& p) {
  const double r = p.log_ratio();
  return r >= -kLn2 && r < kLn2;
}

QuadrantPoint apply_g(const QuadrantPoint& p) { return QuadrantPoint::on_leaf(p.leaf_log(), p.lx() + kLn2); }

QuadrantPoint apply_g_inverse(const QuadrantPoint& p) {
  return QuadrantPoint::on_leaf(p.leaf_log(), p.lx() - kLn2);
}

QuadrantPoint apply_k(const QuadrantPoint& p, const BetaProfile& profile) {
  if (!in_sector(p)) throw DomainError("sector error: k is defined only for 1/2 <= y/x < 2");
  const double b = profile(clamp_theta(std::exp(p.log_ratio())));
  if (b == 1.0) return p;
  return QuadrantPoint::on_leaf(p.leaf_log(), p.lx() + std::log(b));
}

QuadrantPoint apply_k_inverse(const QuadrantPoint& p, const BetaProfile& profile) {
  if (!in_sector(p)) throw DomainError("sector error: k is defined only for 1/2 <= y/x < 2");
  const double target = clamp_theta(std::exp(p.log_ratio()));
  const double theta = profile.solve_sq_ratio(target);
  if (theta == target) return p;
  // Same leaf, ratio theta: 2 lx = leaf_log - ln theta.
  return QuadrantPoint::on_leaf(p.leaf_log(), 0.5 * (p.leaf_log() - std::log(theta)));
}

QuadrantPoint apply_f(const QuadrantPoint& p, const BetaProfile& profile) {
  return apply_g(in_sector(p) ? apply_k(p, profile) : p);
}

QuadrantPoint apply_f_inverse(const QuadrantPoint& p, const BetaProfile& profile) {
  const QuadrantPoint q = apply_g_inverse(p);
  return in_sector(q) ? apply_k_inverse(q, profile) : q;
}

BoundaryPoint apply_f(const BoundaryPoint& p, const BetaProfile&) {
  return p.side == Side::delta ? BoundaryPoint{Side::delta, 0.5 * p.coord}
                               : BoundaryPoint{Side::delta_prime, 2.0 * p.coord};
}

ReebHomeo ReebHomeo::hyperbolic_g() { return ReebHomeo(Kind::hyperbolic_g, BetaProfile{}); }

ReebHomeo ReebHomeo::counterexample(BetaProfile profile) { return ReebHomeo(Kind::counterexample, profile); }

ReebHomeo ReebHomeo::composite(std::vector<ReebHomeo> parts) {
  if (parts.empty()) throw DomainError("composite needs at least one part");
  ReebHomeo h(Kind::composite, BetaProfile{});
  h.parts_ = std::make_shared<const std::vector<ReebHomeo>>(std::move(parts));
  return h;
}

std::string ReebHomeo::name() const {
  switch (kind_) {
    case Kind::hyperbolic_g:
      return "hyperbolic_g";
    case Kind::counterexample:
      return "counterexample";
    case Kind::composite: {
      std::string s = "composite(";
      for (std::size_t i = 0; i < parts_->size(); ++i) s += (i ? "," : "") + (*parts_)[i].name();
      return s + ")";
    }
  }
  return "unknown";
}

QuadrantPoint ReebHomeo::forward(const QuadrantPoint& p) const {
  switch (kind_) {
    case Kind::hyperbolic_g:
      return apply_g(p);
    case Kind::counterexample:
      return apply_f(p, profile_);
    case Kind::composite: {
      QuadrantPoint q = p;
      for (const auto& part : *parts_) q = part.forward(q);
      return q;
    }
  }
  return p;
}

QuadrantPoint ReebHomeo::backward(const QuadrantPoint& p) const {
  switch (kind_) {
    case Kind::hyperbolic_g:
      return apply_g_inverse(p);
    case Kind::counterexample:
      return apply_f_inverse(p, profile_);
    case Kind::composite: {
      QuadrantPoint q = p;
      for (auto it = parts_->rbegin(); it != parts_->rend(); ++it) q = it->backward(q);
      return q;
    }
  }
  return p;
}

BoundaryPoint ReebHomeo::forward(const BoundaryPoint& p) const {
  if (kind_ == Kind::composite) {
    BoundaryPoint q = p;
    for (const auto& part : *parts_) q = part.forward(q);
    return q;
  }
  return apply_f(p, profile_);
}

BoundaryPoint ReebHomeo::backward(const BoundaryPoint& p) const {
  if (kind_ == Kind::composite) {
    BoundaryPoint q = p;
    for (auto it = parts_->rbegin(); it != parts_->rend(); ++it) q = it->backward(q);
    return q;
  }
  return p.side == Side::delta ? BoundaryPoint{Side::delta, 2.0 * p.coord}
                               : BoundaryPoint{Side::delta_prime, 0.5 * p.coord};
}

QuadrantPoint ReebHomeo::iterate(QuadrantPoint p, long n) const {
  for (long i = 0; i < n; ++i) p = forward(p);
  for (long i = 0; i > n; --i) p = backward(p);
  return p;
}

BoundaryPoint ReebHomeo::iterate(BoundaryPoint p, long n) const {
  for (long i = 0; i < n; ++i) p = forward(p);
  for (long i = 0; i > n; --i) p = backward(p);
  return p;
}

ClosedFormIterate iterate_closed_form_detail(const QuadrantPoint& x0, long n, const BetaProfile& profile) {
  if (n < 0) throw DomainError("closed form needs n >= 0");
  ClosedFormIterate out{x0, std::nullopt, 0.0, 1.0};
  const double r = x0.log_ratio();
  // Each g step lowers ln(y/x) by 2 ln 2; the orbit meets the sector at the
  // first step p where the ratio drops below 2.
  if (r >= -kLn2) {
    long p = r < kLn2 ? 0 : static_cast<long>(std::floor((r - kLn2) / (2.0 * kLn2))) + 1;
    while (r - 2.0 * kLn2 * static_cast<double>(p) >= kLn2) ++p;
    while (p > 0 && r - 2.0 * kLn2 * static_cast<double>(p - 1) < kLn2) --p;
    if (p < n) {
      const double theta = clamp_theta(std::exp(r - 2.0 * kLn2 * static_cast<double>(p)));
      const double b = profile(theta);
      const double after = std::log(theta) - 2.0 * std::log(b) - 2.0 * kLn2;
      if (!(after < -kLn2)) throw DomainError("closed form inapplicable: orbit re-enters the sector");
      out.crossing_step = p;
      out.crossing_theta = theta;
      out.beta = b;
    }
  }
  const double shift = static_cast<double>(n) * kLn2 + std::log(out.beta);
  out.point = QuadrantPoint::on_leaf(x0.leaf_log(), x0.lx() + shift);
  return out;
}

QuadrantPoint iterate_closed_form(const QuadrantPoint& x0, long n, const BetaProfile& profile) {
  return iterate_closed_form_detail(x0, n, profile).point;
}

PlanePoint strip_leaf(double u, double t) {
  if (!(std::abs(t) < 1.0)) throw DomainError("strip leaf: |t| must be < 1");
  return {u - 1.0 / std::cos(0.5 * std::numbers::pi * t), t};
}

}  // namespace reebflow
