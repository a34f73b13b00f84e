#include "igo/core/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace igo {

WeightScheme WeightScheme::truncation(double q0) {
  if (!(q0 > 0.0 && q0 <= 1.0)) throw InvalidInput("truncation quantile must lie in (0, 1]");
  WeightScheme s;
  s.kind_ = Kind::truncation;
  s.q0_ = q0;
  return s;
}

WeightScheme WeightScheme::table(std::vector<std::pair<double, double>> nodes) {
  if (nodes.empty()) throw InvalidInput("weight table needs at least one node");
  double prev_q = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto [q, v] = nodes[k];
    if (!std::isfinite(q) || !std::isfinite(v)) throw InvalidInput("weight table node not finite");
    if (q <= prev_q) throw InvalidInput("weight table quantiles must be strictly increasing in (0, 1]");
    if (k > 0 && v > nodes[k - 1].second) throw InvalidInput("weight table values must be non-increasing");
    prev_q = q;
  }
  if (nodes.back().first != 1.0) throw InvalidInput("last weight table quantile must be 1");
  WeightScheme s;
  s.kind_ = Kind::table;
  s.nodes_ = std::move(nodes);
  s.q0_ = s.nodes_.front().first;
  return s;
}

WeightScheme WeightScheme::signed_median() {
  WeightScheme s;
  s.kind_ = Kind::signed_median;
  s.q0_ = 0.5;
  return s;
}

WeightScheme WeightScheme::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) throw InvalidInput("weight scale must be finite and >= 0");
  WeightScheme s = *this;
  s.scale_ *= factor;
  s.offset_ *= factor;
  return s;
}

WeightScheme WeightScheme::shifted(double constant) const {
  if (!std::isfinite(constant)) throw InvalidInput("weight shift must be finite");
  WeightScheme s = *this;
  s.offset_ += constant;
  return s;
}

double WeightScheme::operator()(double q) const {
  double base = 0.0;
  switch (kind_) {
    case Kind::truncation:
      base = q <= q0_ ? 1.0 : 0.0;
      break;
    case Kind::signed_median:
      base = q < 0.5 ? 1.0 : (q > 0.5 ? -1.0 : 0.0);
      break;
    case Kind::table: {
      auto it = std::lower_bound(nodes_.begin(), nodes_.end(), q,
                                 [](const auto& node, double x) { return node.first < x; });
      base = it == nodes_.end() ? nodes_.back().second : it->second;
      break;
    }
  }
  return scale_ * base + offset_;
}

double WeightScheme::base_integral(double a, double b) const {
  switch (kind_) {
    case Kind::truncation:
      return std::min(b, q0_) - std::min(a, q0_);
    case Kind::signed_median:
      return (std::min(b, 0.5) - std::min(a, 0.5)) - (std::max(b, 0.5) - std::max(a, 0.5));
    case Kind::table: {
      double total = 0.0;
      double lo = 0.0;
      for (const auto& [q, v] : nodes_) {
        const double left = std::max(a, lo);
        const double right = std::min(b, q);
        if (right > left) total += (right - left) * v;
        lo = q;
        if (lo >= b) break;
      }
      return total;
    }
  }
  return 0.0;
}

double WeightScheme::base_square_integral() const {
  switch (kind_) {
    case Kind::truncation:
      return q0_;
    case Kind::signed_median:
      return 1.0;
    case Kind::table: {
      double total = 0.0;
      double lo = 0.0;
      for (const auto& [q, v] : nodes_) {
        total += (q - lo) * v * v;
        lo = q;
      }
      return total;
    }
  }
  return 0.0;
}

double WeightScheme::integral(double a, double b) const {
  if (!(a >= 0.0 && b <= 1.0 && a <= b)) throw InvalidInput("integration range must satisfy 0 <= a <= b <= 1");
  return scale_ * base_integral(a, b) + offset_ * (b - a);
}

double WeightScheme::variance() const {
  const double m1 = base_integral(0.0, 1.0);
  const double m2 = scale_ * scale_ * base_square_integral() + 2.0 * scale_ * offset_ * m1 +
                    offset_ * offset_;
  const double mean = scale_ * m1 + offset_;
  return std::max(0.0, m2 - mean * mean);
}

double WeightScheme::bound() const {
  auto mag = [this](double base) { return std::abs(scale_ * base + offset_); };
  switch (kind_) {
    case Kind::truncation:
      return q0_ < 1.0 ? std::max(mag(1.0), mag(0.0)) : mag(1.0);
    case Kind::signed_median:
      return std::max(mag(1.0), mag(-1.0));
    case Kind::table: {
      double b = 0.0;
      for (const auto& node : nodes_) b = std::max(b, mag(node.second));
      return b;
    }
  }
  return 0.0;
}

std::vector<Index> rank_order(std::span<const double> values) {
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return values[i] < values[j]; });
  return order;
}

namespace {

void check_values(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("at least one objective value is required");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidInput("objective value is not finite");
}

}  // namespace

RankedWeights compute_quantile_weights(std::span<const double> values, const WeightScheme& scheme,
                                       QuantileRule rule) {
  check_values(values);
  const auto n = static_cast<Index>(values.size());
  const double dn = static_cast<double>(n);
  const auto order = rank_order(values);

  RankedWeights out;
  out.weights = Vector::Zero(n);
  Index start = 0;
  while (start < n) {
    Index stop = start + 1;
    while (stop < n && values[order[stop]] == values[order[start]]) ++stop;
    // Tie group occupies rank positions [start, stop): rk- = start, rk+ = stop.
    double w = 0.0;
    if (rule == QuantileRule::cell_integral) {
      w = scheme.integral(static_cast<double>(start) / dn, static_cast<double>(stop) / dn) /
          static_cast<double>(stop - start);
    } else {
      for (Index k = start; k < stop; ++k) w += scheme((static_cast<double>(k) + 0.5) / dn) / dn;
      w /= static_cast<double>(stop - start);
    }
    std::vector<Index> group(order.begin() + start, order.begin() + stop);
    std::sort(group.begin(), group.end());
    for (Index i : group) out.weights(i) = w;
    out.tie_groups.push_back(std::move(group));
    start = stop;
  }
  return out;
}

RankedWeights rank_position_weights(std::span<const double> values,
                                    std::span<const double> rank_weights) {
  check_values(values);
  const auto order = rank_order(values);
  RankedWeights out;
  out.weights = Vector::Zero(static_cast<Index>(values.size()));
  for (std::size_t j = 0; j < order.size() && j < rank_weights.size(); ++j)
    out.weights(order[j]) = rank_weights[j];
  // Ranking is strict here, so every sample is its own group.
  for (Index i : order) out.tie_groups.push_back({i});
  return out;
}

std::vector<double> pbil_rank_weights(std::size_t mu, double learning_rate) {
  if (mu == 0) throw InvalidInput("PBIL needs mu >= 1");
  std::vector<double> w(mu);
  double v = 1.0;
  for (std::size_t j = 0; j < mu; ++j) {
    w[j] = v;
    v *= 1.0 - learning_rate;
  }
  return w;
}

}  // namespace igo
