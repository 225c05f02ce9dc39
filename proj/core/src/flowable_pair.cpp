#include "reebflow/flowable_pair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "reebflow/bisection.hpp"
#include "reebflow/error.hpp"
#include "reebflow/parallel.hpp"

namespace reebflow {

namespace {

std::string fmt_point(std::initializer_list<double> v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  bool first = true;
  for (double d : v) {
    if (!first) os << ", ";
    os << d;
    first = false;
  }
  os << ')';
  return os.str();
}

}  // namespace

EquivClassMap::EquivClassMap(PhiMap phi, std::string name) : phi_(std::move(phi)), name_(std::move(name)) {
  if (!phi_) throw DomainError("EquivClassMap requires a phi map");
}

EquivClassMap translation_relation() {
  return EquivClassMap([](double x, double xp, double y) { return y + (xp - x); }, "translation");
}

EquivClassMap cubic_relation() {
  return EquivClassMap(
      [](double x, double xp, double y) { return std::cbrt(y * y * y + (xp * xp * xp - x * x * x)); }, "cubic");
}

FlowablePair::FlowablePair(EquivClassMap relation, Homeo1D f, const PairCheckOptions& opts)
    : relation_(std::move(relation)), f_(std::move(f)) {
  const auto& s = opts.samples;
  if (s.size() < 4) throw DomainError("FlowablePair: need at least four sample points");
  const auto& phi = relation_;

  int sign = 0;
  for (double x : s) {
    const double d = f_(x) - x;
    const int here = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (here == 0 || (sign != 0 && here != sign))
      throw InvariantViolation("fixed-point free", "f(x) - x changes sign or vanishes at x = " + fmt_point({x}));
    sign = here;
  }
  orientation_ = sign;
  generator_ = sign > 0 ? f_ : f_.inverse();

  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = s[i];
    const double xp = s[(i + 1) % n];
    double y = s[(i + 2) % n];
    double z = s[(i + 3) % n];
    if (y > z) std::swap(y, z);

    if (std::abs(phi(x, xp, x) - xp) > opts.tol)
      throw InvariantViolation("reflexivity", "phi(x, x', x) != x' at " + fmt_point({x, xp}));
    if (!(phi(x, xp, y) < phi(x, xp, z)))
      throw InvariantViolation("relation not increasing in the third slot", "at " + fmt_point({x, xp, y, z}));
    if (!(phi(y, xp, x) > phi(z, xp, x)))
      throw InvariantViolation("relation not order-reversing in the first slot",
                               "input is not a flowable pair, at " + fmt_point({y, z, xp, x}));
    const double fx = f_(x);
    const double fy = f_(y);
    if (std::abs(phi(x, fx, y) - fy) > opts.tol)
      throw InvariantViolation("step invariance (x, f(x)) ~ (y, f(y))", "fails at " + fmt_point({x, y}));
    if (std::abs(phi(x, y, fx) - fy) > opts.tol)
      throw InvariantViolation("f-equivariance (x, y) ~ (f(x), f(y))", "fails at " + fmt_point({x, y}));
  }
}

FlowablePair translation_pair() { return FlowablePair(translation_relation(), translation(1.0)); }

FlowablePair cubic_pair() { return FlowablePair(cubic_relation(), cubic_shift(1.0)); }

double sqrt_point(const EquivClassMap& relation, double x, double f_x, const SqrtOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("sqrt: tolerance must be positive");
  // gamma(u) = phi(u, f_x, x) is order reversing, so gamma(u) - u is
  // strictly decreasing with its zero between x and f_x.
  const double lo = std::min(x, f_x) - opts.bracket_pad;
  const double hi = std::max(x, f_x) + opts.bracket_pad;
  auto excess = [&](double u) { return relation(u, f_x, x) - u; };
  const double at_lo = excess(lo);
  const double at_hi = excess(hi);
  if (lo == hi) return lo;
  // Deep halving levels move points by amounts comparable to the rounding
  // noise of phi; a sign miss within that noise is not a structural failure.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                       std::max({1.0, std::abs(x), std::abs(f_x)});
  if (at_lo < 0.0 && at_lo >= -noise && at_hi <= noise) return lo + 0.5 * (hi - lo);
  if (at_hi > 0.0 && at_hi <= noise && at_lo >= -noise) return lo + 0.5 * (hi - lo);
  if (!(at_lo >= 0.0 && at_hi <= 0.0))
    throw InvariantViolation("relation not order-reversing",
                             "input is not a flowable pair (fixed-point bracket does not straddle at x = " +
                                 fmt_point({x}) + ")");
  return bisect_increasing([&](double u) { return -excess(u); }, lo, hi, opts.tol).root;
}

namespace {

// s^-1(z) = phi(s(z), z, z): from (w, z) ~ (z, s(z)) and symmetry.
Homeo1D on_demand_root(const EquivClassMap& rel, std::shared_ptr<const Homeo1D> parent, SqrtOptions sopts,
                       std::string name) {
  auto forward = [rel, parent, sopts](double x) { return sqrt_point(rel, x, (*parent)(x), sopts); };
  auto inverse = [rel, forward](double z) { return rel(forward(z), z, z); };
  return Homeo1D(forward, RealMap(inverse), std::move(name));
}

PiecewiseMonotoneInterpolant tabulated_root(const EquivClassMap& rel, const Homeo1D& parent,
                                            const HalvingOptions& opts) {
  if (opts.knots < 2 || !(opts.window_hi > opts.window_lo))
    throw DomainError("sqrt: window must be non-degenerate with at least two knots");
  const auto n = static_cast<std::size_t>(opts.knots);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i)
    xs[i] = opts.window_lo + (opts.window_hi - opts.window_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  const SqrtOptions sopts{opts.tol, opts.bracket_pad};
  auto ys = parallel_map<double>(n, [&](std::size_t i) { return sqrt_point(rel, xs[i], parent(xs[i]), sopts); });
  return PiecewiseMonotoneInterpolant(std::move(xs), std::move(ys));
}

Homeo1D make_root(const EquivClassMap& rel, const Homeo1D& parent, const HalvingOptions& opts, std::string name) {
  if (opts.storage == LevelStorage::tabulated) return tabulated_root(rel, parent, opts).as_homeo(std::move(name));
  return on_demand_root(rel, std::make_shared<const Homeo1D>(parent), SqrtOptions{opts.tol, opts.bracket_pad},
                        std::move(name));
}

}  // namespace

Homeo1D sqrt_of(const FlowablePair& p, const HalvingOptions& opts) {
  return make_root(p.relation(), p.f(), opts, "sqrt");
}

double Dyadic::value() const { return std::ldexp(static_cast<double>(numerator), -exponent); }

std::optional<Dyadic> Dyadic::from_double(double t, int max_exponent) {
  if (!std::isfinite(t)) return std::nullopt;
  for (int e = 0; e <= std::min(max_exponent, 62); ++e) {
    const double scaled = std::ldexp(t, e);
    if (std::abs(scaled) >= 9.0e18) return std::nullopt;
    if (scaled == std::floor(scaled)) return Dyadic{static_cast<std::int64_t>(scaled), e};
  }
  return std::nullopt;
}

HalvingSequence::HalvingSequence(FlowablePair pair, int depth, HalvingOptions opts)
    : pair_(std::move(pair)), opts_(opts) {
  if (depth < 0) throw DomainError("halving sequence depth must be non-negative");
  maps_.reserve(static_cast<std::size_t>(depth) + 1);
  maps_.push_back(pair_.generator());
  for (int k = 1; k <= depth; ++k) {
    try {
      // Tabulated levels share one knot grid, so each parent lookup is exact.
      maps_.push_back(make_root(pair_.relation(), maps_.back(), opts_, "f_" + std::to_string(k)));
    } catch (const InvariantViolation& e) {
      throw InvariantViolation(e.invariant(), std::string(e.what()) + " [halving level " + std::to_string(k) + "]");
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " [halving level " + std::to_string(k) + "]");
    }
  }
}

double HalvingSequence::flow_dyadic(Dyadic t, double x) const {
  if (t.exponent < 0) throw DomainError("dyadic exponent must be non-negative");
  if (t.exponent > depth()) throw DomainError("dyadic depth exceeded");
  const std::int64_t num = t.numerator * orientation();
  const std::int64_t scale = std::int64_t{1} << t.exponent;
  std::int64_t whole = num / scale;
  std::int64_t rest = num % scale;
  if (rest < 0) {
    rest += scale;
    --whole;
  }
  double v = maps_[0].iterate(whole, x);
  for (int k = 1; k <= t.exponent; ++k) {
    if ((rest >> (t.exponent - k)) & 1) v = maps_[static_cast<std::size_t>(k)](v);
  }
  return v;
}

FlowEvaluation HalvingSequence::flow(double t, double x, const FlowOptions& opts) const {
  if (!std::isfinite(t) || std::abs(t) > opts.horizon) throw DomainError("flow time outside the configured horizon");
  if (auto d = Dyadic::from_double(t, depth())) return {flow_dyadic(*d, x), 0, 0.0};
  const double tg = t * orientation();
  const double whole = std::floor(tg);
  double frac = tg - whole;
  double lo = maps_[0].iterate(static_cast<long>(whole), x);
  double gap = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= depth(); ++k) {
    frac *= 2.0;
    const auto& step = maps_[static_cast<std::size_t>(k)];
    if (frac >= 1.0) {
      frac -= 1.0;
      lo = step(lo);
    }
    const double hi = step(lo);
    gap = std::abs(hi - lo);
    if (gap < opts.tol) return {lo + 0.5 * (hi - lo), k, gap};
  }
  std::ostringstream os;
  os.precision(6);
  os << "flow resolution failure: gap " << gap << " after depth " << depth();
  throw NumericalError(os.str());
}

HalvingSequence halving_sequence(const FlowablePair& p, int depth, const HalvingOptions& opts) {
  return HalvingSequence(p, depth, opts);
}

double flow_dyadic(const HalvingSequence& hs, Dyadic t, double x) { return hs.flow_dyadic(t, x); }

FlowEvaluation flow(const HalvingSequence& hs, double t, double x, const FlowOptions& opts) {
  return hs.flow(t, x, opts);
}

GenerationReport verify_generates(const HalvingSequence& hs, std::span<const GenerationSample> samples, double tol,
                                  const FlowOptions& flow_opts) {
  GenerationReport report;
  report.tol = tol;
  const auto& phi = hs.pair().relation();
  report.residuals = parallel_map<double>(samples.size(), [&](std::size_t i) {
    const auto& s = samples[i];
    const double fx = hs.flow(s.t, s.x, flow_opts).value;
    const double fy = hs.flow(s.t, s.y, flow_opts).value;
    return std::abs(phi(fx, fy, s.x) - s.y);
  });
  for (double r : report.residuals) {
    report.max_residual = std::max(report.max_residual, r);
    if (!(r <= tol)) ++report.failures;
  }
  return report;
}

}  // namespace reebflow
