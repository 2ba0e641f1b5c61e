#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace hypsel {

/// Tolerance used when validating that probability vectors sum to one.
/// Inputs outside this tolerance are rejected, never silently renormalized.
inline constexpr double kNormalizationTol = 1e-9;

/// A probability distribution over the finite domain {0, ..., size()-1},
/// stored densely. Immutable after construction.
class Distribution {
 public:
  /// Validates nonnegativity and normalization; throws std::invalid_argument.
  explicit Distribution(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t x) const { return probs_[x]; }
  const std::vector<double>& probs() const { return probs_; }

  /// Point mass on a single domain element.
  static Distribution point_mass(std::size_t domain_size, std::size_t x);
  static Distribution uniform(std::size_t domain_size);

  bool operator==(const Distribution& other) const = default;

 private:
  std::vector<double> probs_;
};

/// An ordered list of n hypotheses over a shared domain.
class HypothesisClass {
 public:
  explicit HypothesisClass(std::vector<Distribution> hypotheses);

  std::size_t size() const { return hypotheses_.size(); }
  std::size_t domain_size() const { return hypotheses_.front().size(); }
  const Distribution& operator[](std::size_t i) const { return hypotheses_[i]; }
  const std::vector<Distribution>& hypotheses() const { return hypotheses_; }

 private:
  std::vector<Distribution> hypotheses_;
};

/// A point of [0,1]^n recording one distance per hypothesis.
struct DistanceVector {
  std::vector<double> values;

  DistanceVector() = default;
  /// Validates every entry lies in [0,1] (within kNormalizationTol).
  explicit DistanceVector(std::vector<double> v);

  static DistanceVector zeros(std::size_t n) {
    return DistanceVector(std::vector<double>(n, 0.0));
  }
  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// A direction in the n-simplex, used as a weighting over hypotheses.
class TestDirection {
 public:
  /// Validates simplex membership within kNormalizationTol.
  explicit TestDirection(std::vector<double> weights);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

  static TestDirection uniform(std::size_t n);
  static TestDirection point_mass(std::size_t n, std::size_t i);

 private:
  std::vector<double> weights_;
};

/// Total variation distance: half the l1 distance of the probability vectors.
/// Throws on domain mismatch.
double tv_distance(const Distribution& a, const Distribution& b);

/// The vector of distances from p to every member of Q.
DistanceVector distance_vector(const Distribution& p, const HypothesisClass& Q);

/// Index and value of the closest hypothesis; ties break to the lowest index.
/// Throws on an empty class or domain mismatch.
std::pair<std::size_t, double> opt_index(const Distribution& p,
                                         const HypothesisClass& Q);

/// Shannon entropy in nats, with 0 ln 0 = 0.
double entropy(const TestDirection& h);
double entropy(std::span<const double> weights);

/// KL divergence in nats; +infinity when support(a) is not contained in
/// support(b).
double kl_divergence(const TestDirection& a, const TestDirection& b);
double kl_divergence(std::span<const double> a, std::span<const double> b);

/// l1 distance between two weight vectors of equal length.
double l1_distance(std::span<const double> a, std::span<const double> b);

}  // namespace hypsel
