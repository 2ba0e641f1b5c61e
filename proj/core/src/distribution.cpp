#include "hypsel/distribution.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hypsel {

namespace {

void check_probability_vector(const std::vector<double>& v, const char* what) {
  if (v.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty vector");
  }
  double sum = 0.0;
  for (double p : v) {
    if (!(p >= 0.0)) {
      throw std::invalid_argument(std::string(what) +
                                  ": negative or NaN entry " +
                                  std::to_string(p));
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kNormalizationTol) {
    throw std::invalid_argument(std::string(what) + ": entries sum to " +
                                std::to_string(sum) + ", expected 1");
  }
}

}  // namespace

Distribution::Distribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  check_probability_vector(probs_, "Distribution");
}

Distribution Distribution::point_mass(std::size_t domain_size, std::size_t x) {
  std::vector<double> v(domain_size, 0.0);
  v.at(x) = 1.0;
  return Distribution(std::move(v));
}

Distribution Distribution::uniform(std::size_t domain_size) {
  return Distribution(
      std::vector<double>(domain_size, 1.0 / static_cast<double>(domain_size)));
}

HypothesisClass::HypothesisClass(std::vector<Distribution> hypotheses)
    : hypotheses_(std::move(hypotheses)) {
  if (hypotheses_.empty()) {
    throw std::invalid_argument("HypothesisClass: need at least one hypothesis");
  }
  const std::size_t d = hypotheses_.front().size();
  for (const auto& q : hypotheses_) {
    if (q.size() != d) {
      throw std::invalid_argument("HypothesisClass: domain sizes differ");
    }
  }
}

DistanceVector::DistanceVector(std::vector<double> v) : values(std::move(v)) {
  for (double u : values) {
    if (!(u >= -kNormalizationTol && u <= 1.0 + kNormalizationTol)) {
      throw std::invalid_argument("DistanceVector: entry outside [0,1]: " +
                                  std::to_string(u));
    }
  }
}

TestDirection::TestDirection(std::vector<double> weights)
    : weights_(std::move(weights)) {
  check_probability_vector(weights_, "TestDirection");
}

TestDirection TestDirection::uniform(std::size_t n) {
  return TestDirection(
      std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

TestDirection TestDirection::point_mass(std::size_t n, std::size_t i) {
  std::vector<double> v(n, 0.0);
  v.at(i) = 1.0;
  return TestDirection(std::move(v));
}

double tv_distance(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("tv_distance: domain mismatch");
  }
  double acc = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    acc += std::fabs(a[x] - b[x]);
  }
  return 0.5 * acc;
}

DistanceVector distance_vector(const Distribution& p,
                               const HypothesisClass& Q) {
  std::vector<double> v;
  v.reserve(Q.size());
  for (std::size_t i = 0; i < Q.size(); ++i) {
    v.push_back(tv_distance(p, Q[i]));
  }
  return DistanceVector(std::move(v));
}

std::pair<std::size_t, double> opt_index(const Distribution& p,
                                         const HypothesisClass& Q) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < Q.size(); ++i) {
    const double d = tv_distance(p, Q[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return {best, best_d};
}

double entropy(std::span<const double> w) {
  double acc = 0.0;
  for (double x : w) {
    if (x > 0.0) acc -= x * std::log(x);
  }
  return acc;
}

double entropy(const TestDirection& h) { return entropy(h.weights()); }

double kl_divergence(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    if (b[i] == 0.0) return std::numeric_limits<double>::infinity();
    acc += a[i] * std::log(a[i] / b[i]);
  }
  // Rounding can leave a tiny negative value when a == b.
  return acc < 0.0 && acc > -1e-12 ? 0.0 : acc;
}

double kl_divergence(const TestDirection& a, const TestDirection& b) {
  return kl_divergence(std::span<const double>(a.weights()),
                       std::span<const double>(b.weights()));
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::fabs(a[i] - b[i]);
  }
  return acc;
}

}  // namespace hypsel
