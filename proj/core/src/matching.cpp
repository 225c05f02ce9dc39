#include "reebflow/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "reebflow/bisection.hpp"
#include "reebflow/error.hpp"
#include "reebflow/parallel.hpp"

namespace reebflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_side(BoundaryPoint p, Side side, const char* what) {
  if (p.side != side)
    throw DomainError(std::string(what) + " must lie on " + (side == Side::delta ? "Delta" : "Delta'"));
  if (!(p.coord > 0.0) || !std::isfinite(p.coord)) throw DomainError(std::string(what) + " needs a positive coordinate");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Tracks the three-gap Cauchy rule over the warm terms of a sequence.
class CauchyTracker {
 public:
  explicit CauchyTracker(double tol) : tol_(tol) {}

  // Returns true once three consecutive gaps are below tol.
  bool push(double term, bool warm) {
    if (!warm) {
      have_prev_ = false;
      run_ = 0;
      return false;
    }
    if (have_prev_) {
      gap_ = std::abs(term - prev_);
      gaps_.push_back(gap_);
      run_ = gap_ < tol_ ? run_ + 1 : 0;
    }
    prev_ = term;
    have_prev_ = true;
    return run_ >= 3;
  }

  double gap() const { return gap_; }
  std::vector<double> take_gaps() { return std::move(gaps_); }

 private:
  double tol_;
  double prev_ = 0.0;
  double gap_ = kInf;
  bool have_prev_ = false;
  int run_ = 0;
  std::vector<double> gaps_;
};

WitnessSolution solve_witness_seeded(const ReebHomeo& f, int k, BoundaryPoint x, BoundaryPoint x_prime, double tol,
                                     const MatchingOptions& opts, double shear, double seed) {
  if (k < 1) throw DomainError("solve_witness needs k >= 1");
  require_side(x, Side::delta, "witness anchor x");
  require_side(x_prime, Side::delta_prime, "witness target x'");
  Transversal gamma = Transversal::at(x, shear);
  const double target = std::log(x_prime.coord);
  WitnessSolution w;
  w.k = k;
  auto F = [&](double ls) {
    ++w.evaluations;
    return f.iterate(gamma.point(ls), k).lx() - target;
  };

  // Expand a bracket around the seed; the upper end is capped by the
  // transversal extent, which doubles whenever the cap binds.
  double width = 1.0;
  double lo = seed - width;
  double hi = std::min(seed + width, std::log(gamma.extent));
  double f_lo = F(lo);
  double f_hi = F(hi);
  int budget = opts.bracket_budget;
  while (!(f_lo <= 0.0 && f_hi >= 0.0)) {
    if (budget-- <= 0 || !std::isfinite(f_lo) || !std::isfinite(f_hi))
      throw NumericalError("witness bracket failure: k = " + std::to_string(k) + ", x = " + fmt(x.coord) +
                           ", x' = " + fmt(x_prime.coord));
    width *= 2.0;
    if (f_lo > 0.0) {
      lo = seed - width;
      f_lo = F(lo);
    }
    if (f_hi < 0.0) {
      if (seed + width > std::log(gamma.extent)) gamma.extent *= 2.0;
      hi = std::min(seed + width, std::log(gamma.extent));
      f_hi = F(hi);
    }
  }

  // Verify monotonicity on a few probes; fall back to a scan for the first
  // sign change when the pattern is not monotone.
  bool monotone = true;
  double last = f_lo;
  for (int i = 1; i <= opts.monotone_probes; ++i) {
    const double v = F(lo + (hi - lo) * i / (opts.monotone_probes + 1));
    if (v < last) monotone = false;
    last = v;
  }
  if (!monotone || last > f_hi) {
    w.scanned = true;
    const int n = std::max(2, opts.scan_points);
    double prev_p = lo;
    double prev_v = f_lo;
    for (int i = 1; i <= n; ++i) {
      const double p = lo + (hi - lo) * i / n;
      const double v = i == n ? f_hi : F(p);
      if (prev_v <= 0.0 && v >= 0.0) {
        lo = prev_p;
        hi = p;
        break;
      }
      prev_p = p;
      prev_v = v;
    }
  }

  const double ls = bisect_increasing(F, lo, hi, 0.0).root;
  w.log_param = ls;
  w.start = gamma.point(ls);
  w.image = f.iterate(w.start, k);
  w.residual = std::abs(w.image.lx() - target);
  if (tol > 0.0 && w.residual > tol)
    throw NumericalError("witness residual " + fmt(w.residual) + " above tolerance at k = " + std::to_string(k));
  return w;
}

}  // namespace

double matching_threshold(const MatchingOptions& opts) { return std::max(10.0 * opts.tol, 1e-8); }

Transversal Transversal::at(BoundaryPoint anchor, double shear) {
  if (!(anchor.coord > 0.0)) throw DomainError("transversal anchor needs a positive coordinate");
  return {anchor, anchor.coord, shear};
}

QuadrantPoint Transversal::point(double log_param) const {
  const double s = std::exp(log_param);
  if (anchor.side == Side::delta) return QuadrantPoint::from_logs(log_param, std::log(anchor.coord + shear * s));
  return QuadrantPoint::from_logs(std::log(anchor.coord + shear * s), log_param);
}

WitnessSolution solve_witness(const ReebHomeo& f, int k, BoundaryPoint x, BoundaryPoint x_prime, double tol,
                              const MatchingOptions& opts, double shear) {
  const double seed = std::log(x_prime.coord) - k * kLn2;
  return solve_witness_seeded(f, k, x, x_prime, tol, opts, shear, seed);
}

struct TransferMap::Cache {
  std::mutex mutex;
  std::vector<std::unique_ptr<WitnessSolution>> witnesses;
};

TransferMap::TransferMap(ReebHomeo f, BoundaryPoint x, BoundaryPoint x_prime, MatchingOptions opts, double shear)
    : f_(std::move(f)), x_(x), x_prime_(x_prime), opts_(opts), shear_(shear), cache_(std::make_shared<Cache>()) {
  require_side(x, Side::delta, "transfer anchor x");
  require_side(x_prime, Side::delta_prime, "transfer anchor x'");
  if (opts_.k_max < 1) throw DomainError("k_max must be at least 1");
}

const WitnessSolution& TransferMap::witness(int k) const {
  if (k < 1 || k > opts_.k_max) throw DomainError("witness index outside [1, k_max]");
  const auto idx = static_cast<std::size_t>(k);
  double seed = std::log(x_prime_.coord) - k * kLn2;
  {
    std::lock_guard lock(cache_->mutex);
    if (cache_->witnesses.size() <= idx) cache_->witnesses.resize(idx + 1);
    if (cache_->witnesses[idx]) return *cache_->witnesses[idx];
    if (cache_->witnesses[idx - 1]) seed = cache_->witnesses[idx - 1]->log_param - kLn2;
  }
  // Solved outside the lock; a concurrent duplicate computes the same value.
  auto w = std::make_unique<WitnessSolution>(
      solve_witness_seeded(f_, k, x_, x_prime_, 0.0, opts_, shear_, seed));
  std::lock_guard lock(cache_->mutex);
  if (!cache_->witnesses[idx]) cache_->witnesses[idx] = std::move(w);
  return *cache_->witnesses[idx];
}

LimitResult TransferMap::forward_limit(double y) const {
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("transfer input needs a positive coordinate");
  const double ly = std::log(y);
  const double margin = std::log(opts_.boundary_margin);
  CauchyTracker cauchy(opts_.tol);
  LimitResult out;
  double term = 0.0;
  for (int k = 1; k <= opts_.k_max; ++k) {
    const WitnessSolution& w = witness(k);
    const double lc = w.start.leaf_log();
    const QuadrantPoint p0 = QuadrantPoint::on_leaf(lc, lc - ly);
    const QuadrantPoint p = f_.iterate(p0, k);
    term = p.lx();
    const bool warm = w.start.log_ratio() >= margin && w.image.log_ratio() <= -margin &&
                      p0.log_ratio() >= margin && p.log_ratio() <= -margin;
    out.k = k;
    if (cauchy.push(term, warm)) {
      out.converged = true;
      break;
    }
  }
  out.value = std::exp(term);
  out.gap = cauchy.gap();
  out.gaps = cauchy.take_gaps();
  return out;
}

LimitResult TransferMap::reverse_limit(double y_prime) const {
  if (!(y_prime > 0.0) || !std::isfinite(y_prime)) throw DomainError("transfer input needs a positive coordinate");
  const double lx = std::log(y_prime);
  const double margin = std::log(opts_.boundary_margin);
  CauchyTracker cauchy(opts_.tol);
  LimitResult out;
  double term = 0.0;
  for (int k = 1; k <= opts_.k_max; ++k) {
    const WitnessSolution& w = witness(k);
    const QuadrantPoint q0 = QuadrantPoint::on_leaf(w.image.leaf_log(), lx);
    const QuadrantPoint q = f_.iterate(q0, -k);
    term = q.ly();
    const bool warm = w.start.log_ratio() >= margin && w.image.log_ratio() <= -margin &&
                      q0.log_ratio() <= -margin && q.log_ratio() >= margin;
    out.k = k;
    if (cauchy.push(term, warm)) {
      out.converged = true;
      break;
    }
  }
  out.value = std::exp(term);
  out.gap = cauchy.gap();
  out.gaps = cauchy.take_gaps();
  return out;
}

namespace {

[[noreturn]] void throw_divergence(const char* which, double input, const LimitResult& r) {
  throw NumericalError(std::string("limit divergence: ") + which + " limit at " + fmt(input) +
                       " not Cauchy by k = " + std::to_string(r.k) + " (last gap " + fmt(r.gap) + ")");
}

}  // namespace

double TransferMap::forward(double y) const {
  const LimitResult r = forward_limit(y);
  if (!r.converged) throw_divergence("forward", y, r);
  return r.value;
}

double TransferMap::reverse(double y_prime) const {
  const LimitResult r = reverse_limit(y_prime);
  if (!r.converged) throw_divergence("reverse", y_prime, r);
  return r.value;
}

double TransferMap::inverse(double y_prime) const {
  if (!(y_prime > 0.0) || !std::isfinite(y_prime)) throw DomainError("transfer input needs a positive coordinate");
  const double target = std::log(y_prime);
  double seed = std::log(x_.coord * x_prime_.coord / y_prime);
  const LimitResult rev = reverse_limit(y_prime);
  if (rev.converged) {
    seed = std::log(rev.value);
    if (std::abs(std::log(forward(rev.value)) - target) <= opts_.inverse_tol) return rev.value;
  }
  // G(l) = log alpha(e^l) - log y' is decreasing: larger heights on Delta
  // meet Delta' further left.
  auto G = [&](double l) { return std::log(forward(std::exp(l))) - target; };
  double width = 1e-6;
  double lo = seed - width;
  double hi = seed + width;
  double g_lo = G(lo);
  double g_hi = G(hi);
  for (int i = 0; !(g_lo >= 0.0 && g_hi <= 0.0); ++i) {
    if (i >= opts_.bracket_budget) throw NumericalError("transfer inverse bracket failure at " + fmt(y_prime));
    width *= 2.0;
    if (g_lo < 0.0) g_lo = G(lo = seed - width);
    if (g_hi > 0.0) g_hi = G(hi = seed + width);
  }
  return std::exp(bisect_increasing([&](double l) { return -G(l); }, lo, hi, opts_.inverse_tol).root);
}

BoundaryPoint alpha(const ReebHomeo& f, BoundaryPoint x, BoundaryPoint x_prime, BoundaryPoint y,
                    const MatchingOptions& opts) {
  require_side(y, Side::delta, "alpha input y");
  return BoundaryPoint::on_delta_prime(TransferMap(f, x, x_prime, opts).forward(y.coord));
}

BoundaryPoint reverse_alpha(const ReebHomeo& f, BoundaryPoint x, BoundaryPoint x_prime, BoundaryPoint y_prime,
                            const MatchingOptions& opts) {
  require_side(y_prime, Side::delta_prime, "reverse alpha input y'");
  return BoundaryPoint::on_delta(TransferMap(f, x, x_prime, opts).reverse(y_prime.coord));
}

BoundaryPoint beta_transfer(const ReebHomeo& f, BoundaryPoint x1, BoundaryPoint x2, BoundaryPoint y1,
                            BoundaryPoint x_prime, const MatchingOptions& opts) {
  require_side(y1, Side::delta, "beta transfer input y1");
  const double y_prime1 = TransferMap(f, x1, x_prime, opts).forward(y1.coord);
  return BoundaryPoint::on_delta(TransferMap(f, x2, x_prime, opts).inverse(y_prime1));
}

std::vector<Triple> default_four_point_grid(int n, double lo, double hi) {
  if (n < 1 || !(lo > 0.0) || !(hi >= lo)) throw DomainError("four-point grid needs n >= 1 and 0 < lo <= hi");
  std::vector<double> axis(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    axis[static_cast<std::size_t>(i)] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  std::vector<Triple> grid;
  grid.reserve(axis.size() * axis.size() * axis.size());
  for (double x : axis)
    for (double xp : axis)
      for (double y : axis) grid.push_back({x, xp, y});
  return grid;
}

MatchingReport check_four_point(const ReebHomeo& f, std::span<const Triple> grid, const MatchingOptions& opts) {
  MatchingReport report;
  report.check = "four_point";
  report.tol = opts.tol;
  report.threshold = matching_threshold(opts);

  // One pair of transfer maps per distinct (x, x'), in grid order.
  struct Anchors {
    double x, xp;
    std::shared_ptr<TransferMap> plain, shifted;
  };
  std::vector<Anchors> anchors;
  std::vector<std::size_t> anchor_of(grid.size());
  std::map<std::pair<double, double>, std::size_t> index;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto key = std::make_pair(grid[i].x, grid[i].x_prime);
    auto [it, fresh] = index.emplace(key, anchors.size());
    if (fresh) {
      try {
        const auto x = BoundaryPoint::on_delta(grid[i].x);
        const auto xp = BoundaryPoint::on_delta_prime(grid[i].x_prime);
        anchors.push_back({key.first, key.second, std::make_shared<TransferMap>(f, x, xp, opts),
                           std::make_shared<TransferMap>(f, x, xp, opts, 1.0)});
      } catch (const Error&) {
        anchors.push_back({key.first, key.second, nullptr, nullptr});
      }
    }
    anchor_of[i] = it->second;
  }

  report.cases = parallel_map<CaseRecord>(grid.size(), [&](std::size_t i) {
    const Triple& t = grid[i];
    CaseRecord rec;
    rec.values = {{"x", t.x}, {"x_prime", t.x_prime}, {"y", t.y}};
    rec.residual = kInf;
    const Anchors& a = anchors[anchor_of[i]];
    try {
      if (!a.plain) throw DomainError("anchors need positive coordinates");
      const LimitResult fwd = a.plain->forward_limit(t.y);
      rec.k_depth = fwd.k;
      rec.cauchy_gap = fwd.gap;
      if (!fwd.converged) throw_divergence("forward", t.y, fwd);
      const double back = a.plain->reverse(fwd.value);
      const double shifted = a.shifted->forward(t.y);
      rec.values["y_prime"] = fwd.value;
      rec.values["y_round_trip"] = back;
      rec.values["y_prime_shifted"] = shifted;
      rec.residual = std::max(std::abs(back - t.y), std::abs(shifted - fwd.value));
      rec.passed = rec.residual <= report.threshold;
      if (!rec.passed) rec.failure = "residual above threshold";
    } catch (const Error& e) {
      rec.failure = e.what();
    }
    return rec;
  });

  report.passed = true;
  for (const auto& c : report.cases) {
    report.max_residual = std::max(report.max_residual, c.residual);
    report.passed = report.passed && c.passed;
  }
  report.residual = report.max_residual;
  report.diagnostics["cases"] = static_cast<double>(report.cases.size());
  report.diagnostics["anchor_pairs"] = static_cast<double>(anchors.size());
  return report;
}

MatchingReport check_eight_point(const ReebHomeo& f, const EightPointTuple& t, const MatchingOptions& opts) {
  MatchingReport report;
  report.check = "eight_point";
  report.tol = opts.tol;
  report.threshold = matching_threshold(opts);
  CaseRecord rec;
  rec.values = {{"x1", t.x1}, {"y1", t.y1}, {"x2", t.x2}, {"y2", t.y2}, {"x_prime1", t.x_prime1},
                {"x_prime2", t.x_prime2}};
  if (t.y_prime1) rec.values["y_prime1_given"] = *t.y_prime1;
  if (t.y_prime2) rec.values["y_prime2_given"] = *t.y_prime2;
  rec.residual = kInf;
  try {
    const auto d1 = BoundaryPoint::on_delta(t.x1);
    const auto d2 = BoundaryPoint::on_delta(t.x2);
    const auto p1 = BoundaryPoint::on_delta_prime(t.x_prime1);
    const auto p2 = BoundaryPoint::on_delta_prime(t.x_prime2);
    const TransferMap t11(f, d1, p1, opts), t12(f, d1, p2, opts), t21(f, d2, p1, opts), t22(f, d2, p2, opts);

    const double y_prime1 = t11.forward(t.y1);
    const double y_prime2 = t12.forward(t.y1);
    // Three conditions (x1,x'1), (x1,x'2), (x2,x'2) fix y'1, y'2 and y2; the
    // fourth, (x2,x'1) ~ (y2,y'1), is then tested at y'1.
    const double y2_a = t22.inverse(y_prime2);
    const double closing = t21.forward(y2_a);
    const double residual_a = std::abs(closing - y_prime1);
    // Same three-of-four test with the roles of x'1 and x'2 exchanged.
    const double y2_b = t21.inverse(y_prime1);
    const double closing_b = t22.forward(y2_b);
    const double residual_b = std::abs(closing_b - y_prime2);

    rec.values["y_prime1"] = y_prime1;
    rec.values["y_prime2"] = y_prime2;
    rec.values["y2_from_x_prime2"] = y2_a;
    rec.values["y2_from_x_prime1"] = y2_b;
    rec.values["closing_at_x_prime1"] = closing;
    rec.values["closing_at_x_prime2"] = closing_b;
    rec.residual = residual_a;
    for (const auto& lim : {t11.forward_limit(t.y1), t12.forward_limit(t.y1), t21.forward_limit(y2_a),
                            t22.forward_limit(y2_b)}) {
      rec.k_depth = std::max(rec.k_depth, lim.k);
      rec.cauchy_gap = std::max(rec.cauchy_gap, lim.gap);
    }
    report.diagnostics["residual_at_x_prime1"] = residual_a;
    report.diagnostics["residual_at_x_prime2"] = residual_b;
    report.max_residual = std::max(residual_a, residual_b);
    report.residual = residual_a;
    // The given y2 against the transfers it should satisfy.
    report.diagnostics["given_y2_at_x_prime2"] = std::abs(t22.forward(t.y2) - y_prime2);
    report.diagnostics["given_y2_at_x_prime1"] = std::abs(t21.forward(t.y2) - y_prime1);
    rec.passed = residual_a <= report.threshold && residual_b <= report.threshold;
    if (!rec.passed) rec.failure = "eight point matching fails";
  } catch (const Error& e) {
    rec.failure = e.what();
    report.residual = report.max_residual = kInf;
  }
  report.passed = rec.passed;
  report.cases.push_back(std::move(rec));
  return report;
}

EightPointTuple counterexample_eight_points(const CounterexampleParams& p) {
  p.validate();
  EightPointTuple t;
  t.x1 = p.b;
  t.y1 = p.delta * p.b;
  t.x_prime1 = p.a;
  t.y_prime1 = p.a / p.delta;
  t.x2 = p.d;
  t.y2 = p.delta * p.d;
  t.x_prime2 = p.c;
  t.y_prime2 = p.c / p.delta;
  return t;
}

Section6Table reproduce_section6(const BetaProfile& profile, const CounterexampleParams& params,
                                 const MatchingOptions& opts) {
  params.validate();
  const ReebHomeo f = ReebHomeo::counterexample(profile);
  const double ld = std::log(params.delta);
  const double margin = std::log(opts.boundary_margin);
  struct Spec {
    const char* x_name;
    double X;
    const char* y_name;
    double Y;
    int e;
  };
  const Spec specs[] = {{"c", params.c, "d", params.d, 0}, {"c", params.c, "d", params.d, 1},
                        {"a", params.a, "d", params.d, 0}, {"a", params.a, "d", params.d, 1},
                        {"c", params.c, "b", params.b, 0}, {"c", params.c, "b", params.b, 1},
                        {"a", params.a, "b", params.b, 0}, {"a", params.a, "b", params.b, 1}};

  Section6Table table;
  table.rows = parallel_map<Section6Row>(std::size(specs), [&](std::size_t i) {
    const Spec& s = specs[i];
    Section6Row row;
    row.X = s.X;
    row.Y = s.Y;
    row.shifted = s.e;
    row.label = s.e ? std::string("f^{2n}(") + s.x_name + "/(delta 4^n), delta " + s.y_name + ")"
                    : std::string("f^{2n}(") + s.x_name + "/4^n, " + s.y_name + ")";
    const double scale = std::exp(s.e * ld);
    row.ratio = scale * scale * s.Y / s.X;
    row.nominal = s.X / scale;
    row.closed_form = profile(row.ratio) * row.nominal;

    CauchyTracker cauchy(opts.tol);
    double term = 0.0;
    bool converged = false;
    for (int n = 1; 2 * n <= opts.k_max; ++n) {
      const QuadrantPoint p0 =
          QuadrantPoint::from_logs(std::log(s.X) - s.e * ld - 2.0 * n * kLn2, s.e * ld + std::log(s.Y));
      const QuadrantPoint p = f.iterate(p0, 2L * n);
      term = p.lx();
      row.n = n;
      if (cauchy.push(term, p0.log_ratio() >= margin && p.log_ratio() <= -margin)) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NumericalError("limit divergence: section 6 row " + std::to_string(i + 1));
    row.direct = std::exp(term);
    row.gap = cauchy.gap();
    row.via_alpha = alpha(f, BoundaryPoint::on_delta(s.Y), BoundaryPoint::on_delta_prime(s.X),
                          BoundaryPoint::on_delta(scale * s.Y), opts)
                        .coord;
    return row;
  });
  const Section6Row& last = table.rows.back();
  table.residual = last.direct - last.nominal;
  table.expected_residual = (profile(params.delta * params.delta * params.b / params.a) - 1.0) * params.a / params.delta;
  return table;
}

}  // namespace reebflow
