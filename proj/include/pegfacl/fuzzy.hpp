#pragma once

// Grid-partitioned Takagi-Sugeno inference with triangular membership functions
// and scalar rule consequents.

#include <cstddef>
#include <span>
#include <vector>

#include "pegfacl/geometry.hpp"

namespace pegfacl {

class LayoutMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Triangle with feet at left/right and apex at peak. A shouldered side holds 1
/// beyond the peak instead of falling to 0.
struct TriangularMF {
  double left = 0.0;
  double peak = 0.0;
  double right = 0.0;
  bool left_shoulder = false;
  bool right_shoulder = false;

  double operator()(double x) const noexcept {
    if (x == peak) return 1.0;
    if (x < peak) {
      if (left_shoulder) return 1.0;
      if (x <= left) return 0.0;
      return (x - left) / (peak - left);
    }
    if (right_shoulder) return 1.0;
    if (x >= right) return 0.0;
    return (right - x) / (right - peak);
  }
};

class InputPartition {
 public:
  InputPartition() = default;
  InputPartition(double lo, double hi, std::vector<TriangularMF> mfs) : lo_(lo), hi_(hi), mfs_(std::move(mfs)) {
    if (!(lo < hi)) throw std::invalid_argument("InputPartition: empty domain");
    if (mfs_.empty()) throw std::invalid_argument("InputPartition: no membership functions");
    for (const auto& mf : mfs_)
      if (!(mf.left <= mf.peak && mf.peak <= mf.right))
        throw std::invalid_argument("InputPartition: triangle must satisfy left <= peak <= right");
  }

  /// `count` evenly spaced peaks over [lo, hi]; each triangle's feet sit on the
  /// neighbouring peaks and the two outer sets are shouldered.
  static InputPartition evenly_spaced(double lo, double hi, std::size_t count) {
    if (count < 2) throw std::invalid_argument("InputPartition: need at least two sets");
    const double step = (hi - lo) / static_cast<double>(count - 1);
    std::vector<double> peaks(count);
    for (std::size_t k = 0; k < count; ++k) peaks[k] = lo + step * static_cast<double>(k);
    peaks.back() = hi;
    std::vector<TriangularMF> mfs;
    mfs.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      TriangularMF mf;
      mf.peak = peaks[k];
      mf.left = k == 0 ? peaks[k] : peaks[k - 1];
      mf.right = k + 1 == count ? peaks[k] : peaks[k + 1];
      mf.left_shoulder = k == 0;
      mf.right_shoulder = k + 1 == count;
      mfs.push_back(mf);
    }
    return InputPartition(lo, hi, std::move(mfs));
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  std::size_t size() const noexcept { return mfs_.size(); }
  const std::vector<TriangularMF>& sets() const noexcept { return mfs_; }

  std::vector<double> peaks() const {
    std::vector<double> p;
    p.reserve(mfs_.size());
    for (const auto& mf : mfs_) p.push_back(mf.peak);
    return p;
  }

  double clamp(double x) const noexcept { return std::clamp(x, lo_, hi_); }

  void memberships(double x, std::span<double> out) const noexcept {
    x = clamp(x);
    for (std::size_t k = 0; k < mfs_.size(); ++k) out[k] = mfs_[k](x);
  }

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<TriangularMF> mfs_;
};

/// Normalized rule firing strengths; sums to 1.
struct FiringVector {
  std::vector<double> phi;

  std::size_t size() const noexcept { return phi.size(); }
  double operator[](std::size_t l) const noexcept { return phi[l]; }
  std::span<const double> view() const noexcept { return phi; }
};

/// Full grid rule base over N inputs. Rule index is row-major with input 0 the
/// most significant digit.
template <std::size_t N>
class RuleBase {
 public:
  static constexpr std::size_t kInputs = N;
  using Input = std::array<double, N>;

  explicit RuleBase(std::array<InputPartition, N> partitions) : partitions_(std::move(partitions)) {
    rules_ = 1;
    for (const auto& p : partitions_) rules_ *= p.size();
  }

  std::size_t rule_count() const noexcept { return rules_; }
  const std::array<InputPartition, N>& partitions() const noexcept { return partitions_; }
  const InputPartition& partition(std::size_t i) const noexcept { return partitions_[i]; }

  /// Membership-set index of input i used by rule l.
  std::size_t set_index(std::size_t rule, std::size_t input) const noexcept {
    for (std::size_t i = N; i-- > input + 1;) rule /= partitions_[i].size();
    return rule % partitions_[input].size();
  }

  /// phi_l = prod_i mu_i(x_i) / sum_l prod_i mu_i(x_i). Inputs are clamped to their domains.
  FiringVector fire(const Input& x) const {
    FiringVector out;
    fire_into(x, out);
    return out;
  }

  void fire_into(const Input& x, FiringVector& out) const {
    // Memberships once per input, then expand the product grid digit by digit.
    out.phi.assign(rules_, 0.0);
    out.phi[0] = 1.0;
    std::size_t filled = 1;
    std::vector<double> mu;
    for (std::size_t i = 0; i < N; ++i) {
      const auto& part = partitions_[i];
      const std::size_t m = part.size();
      mu.resize(m);
      part.memberships(x[i], mu);
      for (std::size_t r = filled; r-- > 0;) {
        const double base = out.phi[r];
        for (std::size_t k = 0; k < m; ++k) out.phi[r * m + k] = base * mu[k];
      }
      filled *= m;
    }
    double total = 0.0;
    for (double v : out.phi) total += v;
    if (!(total >= 1e-300)) throw DomainError("fire: no rule is active (degenerate normalizer)");
    for (double& v : out.phi) v /= total;
  }

 private:
  std::array<InputPartition, N> partitions_;
  std::size_t rules_ = 1;
};

/// sum_l phi_l * params_l.
inline double infer(const FiringVector& phi, std::span<const double> params) {
  if (phi.size() != params.size()) throw LayoutMismatch("infer: firing vector and parameter lengths differ");
  double s = 0.0;
  for (std::size_t l = 0; l < params.size(); ++l) s += phi.phi[l] * params[l];
  return s;
}

inline constexpr std::size_t kAgentInputs = 4;
inline constexpr std::size_t kSetsPerInput = 5;
using AgentRuleBase = RuleBase<kAgentInputs>;

/// Input layout [distance to opponent, angle to opponent, distance to obstacle, angle to obstacle].
inline AgentRuleBase build_default_partitions(double dist_lo = 0.0, double dist_hi = 35.0,
                                              double angle_lo = -std::numbers::pi,
                                              double angle_hi = std::numbers::pi) {
  const auto d = InputPartition::evenly_spaced(dist_lo, dist_hi, kSetsPerInput);
  const auto a = InputPartition::evenly_spaced(angle_lo, angle_hi, kSetsPerInput);
  return AgentRuleBase({d, a, d, a});
}

/// Shannon entropy of the firing vector (nats).
inline double firing_entropy(const FiringVector& phi) noexcept {
  double h = 0.0;
  for (double p : phi.phi)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

}  // namespace pegfacl
