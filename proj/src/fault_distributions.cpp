#include "bftavail/fault_distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bftavail/errors.hpp"

namespace bftavail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

// Unnormalized log-masses for each f in [0, N]; -inf marks zero mass.
std::vector<double> log_weights(const DistributionParams& params, int support_max) {
  std::vector<double> logs(static_cast<std::size_t>(support_max) + 1, kNegInf);
  std::visit(
      Overloaded{
          [&](const UniformParams& u) {
            for (int f = u.a; f <= u.b; ++f) logs[static_cast<std::size_t>(f)] = 0.0;
          },
          [&](const TruncatedPoissonParams& p) {
            const double log_lambda = std::log(p.lambda);
            for (int f = 0; f <= support_max; ++f) {
              logs[static_cast<std::size_t>(f)] = f * log_lambda - log_factorial(f);
            }
          },
          [&](const BinomialParams& b) {
            if (b.q == 0.0) {
              logs[0] = 0.0;
              return;
            }
            if (b.q == 1.0) {
              logs[static_cast<std::size_t>(b.n)] = 0.0;
              return;
            }
            const double log_q = std::log(b.q);
            const double log_not_q = std::log1p(-b.q);
            for (int f = 0; f <= b.n; ++f) {
              logs[static_cast<std::size_t>(f)] = log_factorial(b.n) - log_factorial(f) -
                                                  log_factorial(b.n - f) + f * log_q +
                                                  (b.n - f) * log_not_q;
            }
          },
          [&](const DegenerateParams& d) { logs[static_cast<std::size_t>(d.x0)] = 0.0; },
      },
      params);
  return logs;
}

void validate(const DistributionParams& params, int support_max) {
  if (support_max < 0) throw DomainError(fmt::format("support bound {} is negative", support_max));
  std::visit(
      Overloaded{
          [&](const UniformParams& u) {
            if (u.a < 0 || u.b < u.a || u.b > support_max) {
              throw DomainError(fmt::format("uniform needs 0 <= a <= b <= {}, got a={} b={}",
                                            support_max, u.a, u.b));
            }
          },
          [&](const TruncatedPoissonParams& p) {
            if (!std::isfinite(p.lambda) || p.lambda <= 0.0) {
              throw DomainError(fmt::format("Poisson rate must be positive, got {}", p.lambda));
            }
          },
          [&](const BinomialParams& b) {
            if (b.n < 0 || b.n > support_max) {
              throw DomainError(fmt::format("binomial n={} outside [0, {}]", b.n, support_max));
            }
            if (!(b.q >= 0.0 && b.q <= 1.0)) {
              throw DomainError(fmt::format("binomial q={} outside [0, 1]", b.q));
            }
          },
          [&](const DegenerateParams& d) {
            if (d.x0 < 0 || d.x0 > support_max) {
              throw DomainError(fmt::format("degenerate location {} outside [0, {}]", d.x0, support_max));
            }
          },
      },
      params);
}

int locate(double value, LocationRounding rounding) {
  return static_cast<int>(rounding == LocationRounding::kFloor ? std::floor(value)
                                                               : std::floor(value + 0.5));
}

}  // namespace

FaultDistribution::FaultDistribution(DistributionParams params, int support_max)
    : params_(params), support_max_(support_max) {
  validate(params_, support_max_);
  const auto logs = log_weights(params_, support_max_);
  const double shift = *std::max_element(logs.begin(), logs.end());

  masses_.resize(logs.size());
  double total = 0.0;
  for (std::size_t f = 0; f < logs.size(); ++f) {
    masses_[f] = logs[f] == kNegInf ? 0.0 : std::exp(logs[f] - shift);
    total += masses_[f];
  }
  for (double& m : masses_) m /= total;
}

FaultDistribution FaultDistribution::uniform(int a, int b, int support_max) {
  return FaultDistribution(UniformParams{a, b}, support_max);
}

FaultDistribution FaultDistribution::truncated_poisson(double lambda, int support_max) {
  return FaultDistribution(TruncatedPoissonParams{lambda}, support_max);
}

FaultDistribution FaultDistribution::binomial(int n, double q, int support_max) {
  return FaultDistribution(BinomialParams{n, q}, support_max);
}

FaultDistribution FaultDistribution::degenerate(int x0, int support_max) {
  return FaultDistribution(DegenerateParams{x0}, support_max);
}

double FaultDistribution::pmf(int f) const {
  if (f < 0 || f > support_max_) {
    throw DomainError(fmt::format("f={} outside support [0, {}]", f, support_max_));
  }
  return masses_[static_cast<std::size_t>(f)];
}

double FaultDistribution::mean() const {
  double total = 0.0;
  for (std::size_t f = 0; f < masses_.size(); ++f) total += static_cast<double>(f) * masses_[f];
  return total;
}

double FaultDistribution::variance() const {
  const double mu = mean();
  double total = 0.0;
  for (std::size_t f = 0; f < masses_.size(); ++f) {
    const double d = static_cast<double>(f) - mu;
    total += d * d * masses_[f];
  }
  return total;
}

std::string FaultDistribution::describe() const {
  return std::visit(
      Overloaded{
          [](const UniformParams& u) { return fmt::format("uniform(a={}, b={})", u.a, u.b); },
          [this](const TruncatedPoissonParams& p) {
            return fmt::format("right_truncated_poisson(lambda={:g}, N={})", p.lambda, support_max_);
          },
          [](const BinomialParams& b) { return fmt::format("binomial(n={}, q={:g})", b.n, b.q); },
          [](const DegenerateParams& d) { return fmt::format("degenerate(x0={})", d.x0); },
      },
      params_);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "fig3_uniform", "fig3_poisson", "fig3_binomial", "fig3_degenerate",
      "fig4_uniform", "fig4_poisson", "fig4_binomial", "fig4_degenerate"};
  return names;
}

FaultDistribution paper_preset(std::string_view name, int n, LocationRounding rounding) {
  if (n < 4) throw DomainError(fmt::format("preset requires N >= 4, got {}", n));
  const double nd = static_cast<double>(n);

  if (name == "fig3_uniform" || name == "fig4_uniform") return FaultDistribution::uniform(0, n, n);
  if (name == "fig3_poisson") return FaultDistribution::truncated_poisson(nd / 6.0, n);
  if (name == "fig3_binomial") return FaultDistribution::binomial(n, 1.0 / 6.0, n);
  if (name == "fig3_degenerate") return FaultDistribution::degenerate(locate(nd / 6.0, rounding), n);
  if (name == "fig4_poisson") return FaultDistribution::truncated_poisson(nd / 2.0, n);
  if (name == "fig4_binomial") return FaultDistribution::binomial(n, 0.5, n);
  if (name == "fig4_degenerate") return FaultDistribution::degenerate(locate(nd / 2.0, rounding), n);
  throw DomainError(fmt::format("unknown distribution preset '{}'", name));
}

}  // namespace bftavail
