#include "hypsel/games.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "hypsel/entropy_player.hpp"
#include "hypsel/simplex_lp.hpp"

namespace hypsel {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double linf(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

void append_vector(std::string& out, const std::vector<double>& v) {
  char buf[32];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, " %.12g", x);
    out += buf;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Primal game.
// ---------------------------------------------------------------------------

bool validate_primal_move(const DistanceVector& u_k, const TestDirection& h_k,
                          const DistanceVector& u_next, double eps,
                          const HypothesisClass& Q) {
  if (u_k.size() != u_next.size() || u_k.size() != Q.size()) return false;
  for (std::size_t i = 0; i < u_k.size(); ++i) {
    if (u_next[i] < u_k[i] - 1e-12) return false;
  }
  GameValueResult sm = support_min(h_k, Q, 1.0);
  const double pos = dot(h_k.weights(), u_next.values);
  return pos >= sm.value - 0.5 * eps - 1e-9;
}

PrimalTranscript run_primal_game(const HypothesisClass& Q, double eps,
                                 const PrimalPlayer& player,
                                 const PrimalAdversary& adversary,
                                 std::size_t max_rounds,
                                 SupportCache* cache) {
  if (max_rounds < 1) {
    throw std::invalid_argument("run_primal_game: max_rounds must be >= 1");
  }
  SupportCache local;
  SupportCache& pool = cache ? *cache : local;
  const double tau = eps / 8.0;

  PrimalTranscript t;
  t.eps = eps;
  DistanceVector u = DistanceVector::zeros(Q.size());
  t.points.push_back(u);

  for (std::size_t k = 0; k < max_rounds; ++k) {
    ViolatedTestResult vt =
        violated_test_value(MarginQuery(u, eps), Q, tau / 4.0, &pool);
    if (!(vt.value > eps + tau)) {
      t.terminated = true;
      break;
    }
    TestDirection h = player(PrimalPlayerContext{k, u, vt});
    if (!(margin(h, MarginQuery(u, eps), Q) > eps - 1e-9)) {
      throw std::runtime_error("run_primal_game: illegal player move in round " +
                               std::to_string(k) +
                               " (test not violated at the margin)");
    }
    DistanceVector u_next = adversary(k, u, h);
    if (!validate_primal_move(u, h, u_next, eps, Q)) {
      throw std::runtime_error(
          "run_primal_game: illegal adversary move in round " +
          std::to_string(k));
    }
    t.tests.push_back(h);
    u = u_next;
    t.points.push_back(u);
    t.rounds = k + 1;
  }
  if (!t.terminated) {
    // Re-check in case the loop ended exactly at the cap.
    ViolatedTestResult vt =
        violated_test_value(MarginQuery(u, eps), Q, tau / 4.0, &pool);
    t.terminated = !(vt.value > eps + tau);
  }
  return t;
}

PrimalPlayer max_entropy_primal_player(const HypothesisClass& Q, double eps,
                                       SupportCache* cache) {
  auto pool = std::make_shared<SupportCache>();
  SupportCache* use = cache ? cache : pool.get();
  return [&Q, eps, use, pool](const PrimalPlayerContext& ctx) {
    const double tol =
        std::min(eps / 8.0, 0.5 * (ctx.violated.value - eps));
    EntropySolution es =
        max_entropy_test(ctx.u, eps, Q, std::max(tol, 1e-12), use);
    return es.h;
  };
}

PrimalAdversary progress_adversary(const HypothesisClass& Q,
                                   SampleOracle& oracle, double alpha,
                                   double beta, SupportCache* cache) {
  return [&Q, &oracle, alpha, beta, cache](std::size_t, const DistanceVector& u,
                                           const TestDirection& h) {
    ProgressOutput po = progress_step(u, h, alpha, beta, oracle, Q, cache);
    std::vector<double> next(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      next[i] = std::max(u[i], po.z[i]);
    }
    return DistanceVector(std::move(next));
  };
}

// ---------------------------------------------------------------------------
// Dual game.
// ---------------------------------------------------------------------------

bool DualUniverse::contains(const std::vector<double>& h, double tol) const {
  if (h.size() != n) return false;
  double sum = 0.0;
  for (double v : h) {
    if (v < -tol) return false;
    sum += v;
  }
  if (std::fabs(sum - 1.0) > tol) return false;
  for (const DualCut& c : cuts) {
    if (dot(c.normal, h) > c.offset + tol) return false;
  }
  return true;
}

bool cut_is_legal(const DualCut& cut, const std::vector<double>& h,
                  double eps) {
  // Kept side {w.h <= b} misses the l1 ball around h iff the ball's minimum
  // of w.h stays above b.
  const double min_on_ball = dot(cut.normal, h) - eps * linf(cut.normal);
  return min_on_ball >= cut.offset - 1e-9;
}

namespace {

struct UniverseState {
  lp::MarginResult margin;
  bool empty() const {
    return margin.status != lp::Status::optimal || margin.margin < 0.0;
  }
};

UniverseState universe_state(const DualUniverse& u) {
  std::vector<std::vector<double>> normals;
  std::vector<double> offsets;
  normals.reserve(u.cuts.size());
  for (const DualCut& c : u.cuts) {
    normals.push_back(c.normal);
    offsets.push_back(c.offset);
  }
  UniverseState st;
  st.margin = lp::max_margin_point(u.n, normals, offsets);
  return st;
}

}  // namespace

DualTranscript run_dual_game(std::size_t n, double eps,
                             const DualPlayer& player,
                             const DualAdversary& adversary,
                             std::size_t max_rounds) {
  if (max_rounds < 1) {
    throw std::invalid_argument("run_dual_game: max_rounds must be >= 1");
  }
  DualUniverse universe{n, eps, {}};
  DualTranscript t;
  t.n = n;
  t.eps = eps;

  for (std::size_t k = 0; k < max_rounds; ++k) {
    UniverseState st = universe_state(universe);
    if (st.empty()) break;
    std::vector<double> h = player(
        DualPlayerContext{universe, k, st.margin.point, st.margin.margin});
    if (!universe.contains(h)) {
      throw std::runtime_error("run_dual_game: illegal player move in round " +
                               std::to_string(k) + " (pick outside universe)");
    }
    std::optional<DualCut> cut =
        adversary(DualAdversaryContext{universe, k, h, st.margin.point});
    t.picks.push_back(h);
    t.cuts.push_back(cut);
    t.rounds = k + 1;
    if (!cut.has_value()) break;  // adversary declared the empty set
    if (!cut_is_legal(*cut, h, eps)) {
      throw std::runtime_error(
          "run_dual_game: illegal adversary cut in round " +
          std::to_string(k) + " (l1 ball around the pick not excluded)");
    }
    universe.cuts.push_back(*cut);
  }
  return t;
}

DualPlayer max_entropy_dual_player() {
  auto warm = std::make_shared<std::vector<double>>();
  return [warm](const DualPlayerContext& ctx) {
    std::vector<std::vector<double>> normals;
    std::vector<double> offsets;
    normals.reserve(ctx.universe.cuts.size());
    for (const DualCut& c : ctx.universe.cuts) {
      normals.push_back(c.normal);
      offsets.push_back(c.offset);
    }
    PolytopeEntropyResult pe = max_entropy_over_polytope(
        ctx.universe.n, normals, offsets, &ctx.interior, warm.get());
    if (!pe.feasible) {
      throw std::runtime_error("max_entropy_dual_player: empty universe");
    }
    return pe.h;
  };
}

std::vector<double> arbitrary_test_player(const DualPlayerContext& ctx) {
  const std::size_t n = ctx.universe.n;
  if (ctx.interior_margin < 0.0) {
    throw std::runtime_error("arbitrary_test_player: empty universe");
  }
  // Vertex-biased scan: vertices first, then edge midpoints, then uniform.
  std::vector<double> cand(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(cand.begin(), cand.end(), 0.0);
    cand[i] = 1.0;
    if (ctx.universe.contains(cand)) return cand;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::fill(cand.begin(), cand.end(), 0.0);
      cand[i] = 0.5;
      cand[j] = 0.5;
      if (ctx.universe.contains(cand)) return cand;
    }
  }
  std::fill(cand.begin(), cand.end(), 1.0 / static_cast<double>(n));
  if (ctx.universe.contains(cand)) return cand;
  return ctx.interior;
}

namespace {

double side_margin(const DualUniverse& universe, const DualCut& extra) {
  std::vector<std::vector<double>> normals;
  std::vector<double> offsets;
  normals.reserve(universe.cuts.size() + 1);
  for (const DualCut& c : universe.cuts) {
    normals.push_back(c.normal);
    offsets.push_back(c.offset);
  }
  normals.push_back(extra.normal);
  offsets.push_back(extra.offset);
  lp::MarginResult r = lp::max_margin_point(universe.n, normals, offsets);
  if (r.status != lp::Status::optimal) return -1.0;
  return r.margin;
}

/// Kept side choice shared by the built-in adversaries: keep the side with
/// the deeper slack inside the current universe, which is what delays the
/// player longest.
std::optional<DualCut> side_cut(const std::vector<double>& g,
                                const std::vector<double>& pick,
                                const DualUniverse& universe, double eps) {
  const double scale = linf(g);
  if (scale <= 0.0) return std::nullopt;
  const std::size_t n = g.size();
  const double at_pick = dot(g, pick);

  // Side A keeps {g.h >= at_pick + eps*scale}; side B keeps the mirror.
  DualCut a{std::vector<double>(n), -(at_pick + eps * scale)};
  for (std::size_t i = 0; i < n; ++i) a.normal[i] = -g[i];
  DualCut b{g, at_pick - eps * scale};

  const double ma = side_margin(universe, a);
  const double mb = side_margin(universe, b);
  return ma > mb ? a : b;
}

}  // namespace

DualAdversary greedy_diameter_adversary() {
  return [](const DualAdversaryContext& ctx) -> std::optional<DualCut> {
    const std::vector<double>& h = ctx.pick;
    std::size_t imax = 0, imin = 0;
    for (std::size_t i = 1; i < h.size(); ++i) {
      if (h[i] > h[imax]) imax = i;
      if (h[i] < h[imin]) imin = i;
    }
    if (imax == imin) imin = (imax + 1) % h.size();  // flat pick, any pair
    std::vector<double> g(h.size(), 0.0);
    g[imax] = 1.0;
    g[imin] = -1.0;
    std::optional<DualCut> cut =
        side_cut(g, h, ctx.universe, ctx.universe.eps);
    if (cut && !cut_is_legal(*cut, h, ctx.universe.eps)) return std::nullopt;
    return cut;
  };
}

DualAdversary random_direction_adversary(std::uint64_t seed) {
  auto rng = std::make_shared<SplitMix64>(seed);
  return [rng](const DualAdversaryContext& ctx) -> std::optional<DualCut> {
    std::vector<double> g(ctx.universe.n);
    for (double& v : g) v = (rng->next_u64() & 1) ? 1.0 : -1.0;
    std::optional<DualCut> cut =
        side_cut(g, ctx.pick, ctx.universe, ctx.universe.eps);
    if (cut && !cut_is_legal(*cut, ctx.pick, ctx.universe.eps)) {
      return std::nullopt;
    }
    return cut;
  };
}

DualAdversary primal_induced_adversary(const HypothesisClass& Q,
                                       const Distribution& target,
                                       double primal_eps) {
  // Pre-run an exact-oracle primal game and replay its update directions as
  // halfspace cuts through the dual picks.
  auto oracle =
      std::make_shared<SampleOracle>(SampleOracle::make_exact(target));
  auto cache = std::make_shared<SupportCache>();
  PrimalTranscript pt = run_primal_game(
      Q, primal_eps, max_entropy_primal_player(Q, primal_eps, cache.get()),
      progress_adversary(Q, *oracle, primal_eps / 2.0, 0.5, cache.get()),
      10000, cache.get());
  auto deltas = std::make_shared<std::vector<std::vector<double>>>();
  for (std::size_t k = 0; k + 1 < pt.points.size(); ++k) {
    std::vector<double> d(pt.points[k].size());
    double norm = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = pt.points[k + 1][i] - pt.points[k][i];
      norm = std::max(norm, std::fabs(d[i]));
    }
    if (norm > 1e-12) deltas->push_back(std::move(d));
  }
  auto next = std::make_shared<std::size_t>(0);
  return [deltas, next](const DualAdversaryContext& ctx)
             -> std::optional<DualCut> {
    if (ctx.universe.n != ctx.pick.size()) return std::nullopt;
    while (*next < deltas->size()) {
      const std::vector<double>& w = (*deltas)[(*next)++];
      if (w.size() != ctx.universe.n) return std::nullopt;
      DualCut cut{w, dot(w, ctx.pick) - ctx.universe.eps * linf(w)};
      if (cut_is_legal(cut, ctx.pick, ctx.universe.eps)) return cut;
    }
    return std::nullopt;
  };
}

std::size_t dual_round_bound(std::size_t n, double eps) {
  if (n < 2 || !(eps > 0.0)) {
    throw std::invalid_argument("dual_round_bound: need n >= 2 and eps > 0");
  }
  return static_cast<std::size_t>(
      std::ceil(8.0 * std::log(static_cast<double>(n)) / (eps * eps)));
}

// ---------------------------------------------------------------------------
// Transcript serialization.
// ---------------------------------------------------------------------------

std::string serialize_transcript(const PrimalTranscript& t) {
  std::string out;
  char head[96];
  std::snprintf(head, sizeof head, "primal %zu %.12g %d\n", t.rounds, t.eps,
                t.terminated ? 1 : 0);
  out += head;
  for (std::size_t k = 0; k < t.points.size(); ++k) {
    out += std::to_string(k) + " adversary";
    append_vector(out, t.points[k].values);
    out += '\n';
    if (k < t.tests.size()) {
      out += std::to_string(k) + " player";
      append_vector(out, t.tests[k].weights());
      out += '\n';
    }
  }
  return out;
}

PrimalTranscript parse_primal_transcript(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  PrimalTranscript t;
  int term = 0;
  in >> tag >> t.rounds >> t.eps >> term;
  if (tag != "primal") {
    throw std::invalid_argument("parse_primal_transcript: bad header");
  }
  t.terminated = term != 0;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t round;
    std::string role;
    ls >> round >> role;
    std::vector<double> vals;
    double x;
    while (ls >> x) vals.push_back(x);
    if (role == "adversary") {
      t.points.emplace_back(std::move(vals));
    } else if (role == "player") {
      t.tests.emplace_back(std::move(vals));
    } else {
      throw std::invalid_argument("parse_primal_transcript: bad role " + role);
    }
  }
  return t;
}

std::string serialize_transcript(const DualTranscript& t) {
  std::string out;
  char head[96];
  std::snprintf(head, sizeof head, "dual %zu %zu %.12g\n", t.n, t.rounds,
                t.eps);
  out += head;
  for (std::size_t k = 0; k < t.picks.size(); ++k) {
    out += std::to_string(k) + " player";
    append_vector(out, t.picks[k]);
    out += '\n';
    out += std::to_string(k) + " adversary";
    if (t.cuts[k].has_value()) {
      append_vector(out, t.cuts[k]->normal);
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.12g", t.cuts[k]->offset);
      out += buf;
    } else {
      out += " empty";
    }
    out += '\n';
  }
  return out;
}

DualTranscript parse_dual_transcript(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  DualTranscript t;
  in >> tag >> t.n >> t.rounds >> t.eps;
  if (tag != "dual") {
    throw std::invalid_argument("parse_dual_transcript: bad header");
  }
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t round;
    std::string role;
    ls >> round >> role;
    if (role == "player") {
      std::vector<double> vals;
      double x;
      while (ls >> x) vals.push_back(x);
      t.picks.push_back(std::move(vals));
    } else {
      std::string rest;
      std::getline(ls, rest);
      std::istringstream rs(rest);
      std::vector<double> vals;
      std::string tok;
      bool empty = false;
      while (rs >> tok) {
        if (tok == "empty") {
          empty = true;
          break;
        }
        vals.push_back(std::stod(tok));
      }
      if (empty) {
        t.cuts.emplace_back(std::nullopt);
      } else {
        DualCut c;
        c.offset = vals.back();
        vals.pop_back();
        c.normal = std::move(vals);
        t.cuts.emplace_back(std::move(c));
      }
    }
  }
  return t;
}

}  // namespace hypsel
