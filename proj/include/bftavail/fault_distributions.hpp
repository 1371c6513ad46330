#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bftavail {

struct UniformParams {
  int a = 0;
  int b = 0;
};

// Poisson(lambda) restricted to {0..N} and renormalized.
struct TruncatedPoissonParams {
  double lambda = 1.0;
};

struct BinomialParams {
  int n = 0;
  double q = 0.5;
};

struct DegenerateParams {
  int x0 = 0;
};

using DistributionParams =
    std::variant<UniformParams, TruncatedPoissonParams, BinomialParams, DegenerateParams>;

/// Probability mass function for the number of Byzantine nodes f on [0, N].
///
/// Masses are evaluated once at construction in log-space (log-gamma for the
/// factorials, max-shifted before exponentiation) and renormalized, so every
/// parameter on the supported grid yields finite values summing to one.
class FaultDistribution {
 public:
  // Throws DomainError for invalid parameters or a support bound below zero.
  FaultDistribution(DistributionParams params, int support_max);

  static FaultDistribution uniform(int a, int b, int support_max);
  static FaultDistribution truncated_poisson(double lambda, int support_max);
  static FaultDistribution binomial(int n, double q, int support_max);
  static FaultDistribution degenerate(int x0, int support_max);

  const DistributionParams& params() const { return params_; }
  int support_max() const { return support_max_; }

  // p(f); throws DomainError for f outside [0, N].
  double pmf(int f) const;
  const std::vector<double>& masses() const { return masses_; }

  // Moments by direct summation over the support.
  double mean() const;
  double variance() const;

  // e.g. "binomial(n=12, q=0.166667)"
  std::string describe() const;

 private:
  DistributionParams params_;
  int support_max_;
  std::vector<double> masses_;
};

// How non-integral locations (N/6, N/2) become an integer x0.
enum class LocationRounding { kFloor, kNearest };

// Named parameterizations used for the distribution comparison tables.
// fig3_*: mean N/6 (uniform keeps a=0, b=N); fig4_*: mean N/2.
// Names: fig3_uniform, fig3_poisson, fig3_binomial, fig3_degenerate,
// fig4_uniform, fig4_poisson, fig4_binomial, fig4_degenerate.
FaultDistribution paper_preset(std::string_view name, int n,
                               LocationRounding rounding = LocationRounding::kFloor);

const std::vector<std::string>& preset_names();

}  // namespace bftavail
