#include "symcurv/cones.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "symcurv/combop.hpp"
#include "symcurv/rng.hpp"
#include "symcurv/symfun.hpp"

namespace symcurv {
namespace {

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

constexpr std::array<double, 9> kBlendParameters = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

}  // namespace

void ConeSpec::validate() const {
  if (n < 1 || k < 1 || k > n) throw DomainError("ConeSpec: need 1 <= k <= n");
  if (!(alpha >= 0.0)) throw DomainError("ConeSpec: alpha must be nonnegative");
  if (!(tol >= 0.0)) throw DomainError("ConeSpec: tol must be nonnegative");
}

bool ConeSpec::contains(std::span<const double> x) const { return cone_margin(*this, x) > tol; }

std::string ConeSpec::describe() const {
  std::ostringstream out;
  if (kind == ConeKind::GardingGamma) {
    out << "Gamma_" << k << " (n=" << n << ")";
  } else {
    out << "Gamma~_" << k << "(alpha=" << alpha << ", n=" << n << ")";
  }
  return out.str();
}

void VerificationReport::record(double value, const std::optional<EigenvalueVector>& point,
                                const std::optional<EigenvalueVector>& aux) {
  if (trials == 0 || value < worst_value) {
    worst_value = value;
    witness = point;
    witness_aux = aux;
  }
  ++trials;
}

VerificationReport merge_reports(std::string property, const std::vector<VerificationReport>& parts) {
  VerificationReport merged;
  merged.property = std::move(property);
  bool first = true;
  for (const auto& p : parts) {
    if (first || p.worst_value < merged.worst_value) {
      merged.worst_value = p.worst_value;
      merged.witness = p.witness;
      merged.witness_aux = p.witness_aux;
      merged.tol = p.tol;
      merged.seed = p.seed;
    }
    first = false;
    merged.trials += p.trials;
    merged.passed = merged.passed && p.passed;
  }
  return merged;
}

double cone_margin(const ConeSpec& spec, std::span<const double> x) {
  spec.validate();
  if (static_cast<int>(x.size()) != spec.n) throw DomainError("cone_margin: dimension mismatch");
  const int n = spec.n;
  const double m_abs = max_abs(x);
  const auto sig = elem_sym_all(x, spec.k);

  auto normalized = [&](int m) {
    const double scale = binomial<double>(n, m) * std::pow(m_abs, m);
    return scale > 0.0 ? sig[m] / scale : 0.0;
  };

  double margin = std::numeric_limits<double>::infinity();
  const int last_plain = spec.kind == ConeKind::GardingGamma ? spec.k : spec.k - 1;
  for (int m = 1; m <= last_plain; ++m) margin = std::min(margin, normalized(m));

  if (spec.kind == ConeKind::TildeGamma) {
    const int k = spec.k;
    const double value = spec.alpha * sig[k - 1] + sig[k];
    const double scale = spec.alpha * binomial<double>(n, k - 1) * std::pow(m_abs, k - 1) +
                         binomial<double>(n, k) * std::pow(m_abs, k);
    margin = std::min(margin, scale > 0.0 ? value / scale : 0.0);
  }
  return margin;
}

bool in_gamma_k(std::span<const double> x, int k, double tol) {
  return ConeSpec::gamma(static_cast<int>(x.size()), k, tol).contains(x);
}

bool in_gamma_tilde(std::span<const double> x, int k, double alpha, double tol) {
  return ConeSpec::tilde(static_cast<int>(x.size()), k, alpha, tol).contains(x);
}

EigenvalueVector sample_cone_point(const ConeSpec& spec, CounterRng& rng, long max_attempts) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.n);
  std::vector<double> x(n);
  std::vector<double> z(n);
  for (long attempt = 0; attempt < max_attempts; ++attempt) {
    for (auto& v : x) v = rng.log_uniform(-2.0, 2.0);
    z = x;
    if (rng.uniform() >= 0.25) {
      const auto j = rng.index(n);
      const double negative = -rng.log_uniform(-2.0, 2.0);
      const double t = rng.uniform();
      z[j] = (1.0 - t) * x[j] + t * negative;
    }
    if (spec.contains(z)) return EigenvalueVector(z);
  }
  throw SamplingError("sample_cone: more than 99.9% of draws rejected for " + spec.describe());
}

std::vector<EigenvalueVector> sample_cone(const ConeSpec& spec, long count, std::uint64_t seed) {
  if (count < 1) throw DomainError("sample_cone: count must be at least 1");
  std::vector<EigenvalueVector> points;
  points.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    points.push_back(sample_cone_point(spec, rng));
  }
  return points;
}

double segment_margin(const ConeSpec& spec, std::span<const double> a, std::span<const double> b,
                      std::span<const double> ts) {
  std::vector<double> blend(a.size());
  double worst = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    for (std::size_t i = 0; i < a.size(); ++i) blend[i] = t * a[i] + (1.0 - t) * b[i];
    worst = std::min(worst, cone_margin(spec, blend));
  }
  return worst;
}

VerificationReport segment_convexity_check(const ConeSpec& spec, long trials, std::uint64_t seed) {
  VerificationReport report;
  report.property = "convexity of " + spec.describe();
  report.seed = seed;
  report.tol = spec.tol;
  for (long i = 0; i < trials; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    const auto a = sample_cone_point(spec, rng);
    const auto b = sample_cone_point(spec, rng);
    report.record(segment_margin(spec, a, b, kBlendParameters), a, b);
  }
  report.finalize();
  return report;
}

double ellipticity_check(const OperatorSpec& op, std::span<const double> x) {
  const auto g = q_grad(op, x);
  return *std::min_element(g.begin(), g.end());
}

VerificationReport ellipticity_scan(const OperatorSpec& op, long trials, std::uint64_t seed,
                                    double tol) {
  const ConeSpec cone = op.admissible_cone();
  VerificationReport report;
  report.property = "ellipticity of " + op.describe() + " on " + cone.describe();
  report.seed = seed;
  report.tol = tol;
  const int n = op.n();
  for (long i = 0; i < trials; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    const auto x = sample_cone_point(cone, rng);
    const double m_abs = max_abs(x);
    double scale = 0.0;
    for (int s = 1; s <= op.k(); ++s) {
      scale += op.alphas()[static_cast<std::size_t>(s)] * binomial<double>(n - 1, s - 1) *
               std::pow(m_abs, s - 1);
    }
    report.record(ellipticity_check(op, x) / scale, x);
  }
  report.finalize();
  return report;
}

}  // namespace symcurv
