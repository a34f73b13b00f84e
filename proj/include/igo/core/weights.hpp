#pragma once

#include <span>
#include <utility>
#include <vector>

#include "igo/core/types.hpp"

namespace igo {

/// Non-increasing selection function w on [0, 1].
///
/// Three shapes are supported: truncation (1 up to the selection quantile q0,
/// then 0), a piecewise-constant table, and the signed median (+1 below 1/2,
/// -1 above). Every shape can be rescaled and shifted, w -> scale * w + offset,
/// with scale >= 0 so monotonicity is preserved.
class WeightScheme {
 public:
  enum class Kind { truncation, table, signed_median };

  /// w(q) = 1 for q <= q0, 0 otherwise.
  static WeightScheme truncation(double q0);

  /// Step function: node (q_k, v_k) means w(q) = v_k on (q_{k-1}, q_k].
  /// Nodes must be sorted by quantile, values non-increasing, last quantile 1.
  static WeightScheme table(std::vector<std::pair<double, double>> nodes);

  /// w(q) = +1 for q < 1/2, -1 for q > 1/2 (0 at exactly 1/2).
  static WeightScheme signed_median();

  WeightScheme scaled(double factor) const;
  WeightScheme shifted(double constant) const;

  Kind kind() const { return kind_; }
  double selection_quantile() const { return q0_; }
  const std::vector<std::pair<double, double>>& nodes() const { return nodes_; }
  double scale() const { return scale_; }
  double offset() const { return offset_; }

  double operator()(double q) const;

  /// Integral of w over [a, b] (0 <= a <= b <= 1), in closed form.
  double integral(double a, double b) const;

  double mean() const { return integral(0.0, 1.0); }

  /// Var_[0,1] w = int w^2 - (int w)^2.
  double variance() const;

  /// max |w|.
  double bound() const;

 private:
  WeightScheme() = default;

  double base_integral(double a, double b) const;
  double base_square_integral() const;

  Kind kind_ = Kind::truncation;
  double q0_ = 0.5;
  std::vector<std::pair<double, double>> nodes_;
  double scale_ = 1.0;
  double offset_ = 0.0;
};

/// How tied or ungridded ranks are turned into weights.
enum class QuantileRule {
  /// w integrated over the quantile cells of the tie group, shared equally.
  cell_integral,
  /// (1/N) w((k + 1/2)/N) averaged over the tie group's rank positions k.
  midpoint,
};

/// Per-sample weights derived from the ranks of the objective values.
struct RankedWeights {
  Vector weights;
  /// Groups of sample indices with equal objective value, ordered from best to worst.
  std::vector<std::vector<Index>> tie_groups;

  double sum() const { return weights.sum(); }
  Index size() const { return weights.size(); }
};

/// Quantile-based sample weights for a minimization problem.
///
/// With rk- = #{j : f_j < f_i} and rk+ = #{j : f_j <= f_i}, the cell-integral
/// rule gives w_i = (1 / (rk+ - rk-)) * int_{rk-/N}^{rk+/N} w. Throws
/// InvalidInput on empty input or non-finite values.
RankedWeights compute_quantile_weights(std::span<const double> values, const WeightScheme& scheme,
                                       QuantileRule rule = QuantileRule::cell_integral);

/// Weights attached to rank positions: the j-th best sample (stable index
/// tie-break) gets rank_weights[j]; positions beyond the table get 0.
RankedWeights rank_position_weights(std::span<const double> values,
                                    std::span<const double> rank_weights);

/// Sample indices sorted from best to worst, ties broken by index.
std::vector<Index> rank_order(std::span<const double> values);

/// PBIL schedule towards the mu best samples: (1 - lr)^(j-1) for j <= mu.
std::vector<double> pbil_rank_weights(std::size_t mu, double learning_rate);

}  // namespace igo
