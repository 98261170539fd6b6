#include "mcde/synthdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "mcde/error.hpp"
#include "mcde/parallel.hpp"

namespace mcde {

namespace {

[[noreturn]] void bad_params(const std::string& what) {
  throw Error(ErrorCode::InvalidParams, what);
}

double gamma_pdf(double x, double shape, double scale) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    if (shape < 1.0) return std::numeric_limits<double>::infinity();
    return shape == 1.0 ? 1.0 / scale : 0.0;
  }
  return std::exp((shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) -
                  shape * std::log(scale));
}

std::vector<double> parse_numbers(std::string_view text, std::string_view whole) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view field = text.substr(0, comma);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      bad_params("bad number '" + std::string(field) + "' in distribution '" +
                 std::string(whole) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

DistributionSpec parse_simple(std::string_view text, std::string_view whole) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    bad_params("distribution '" + std::string(whole) + "' needs parameters after ':'");
  }
  const std::string_view name = text.substr(0, colon);
  const auto p = parse_numbers(text.substr(colon + 1), whole);
  auto arity = [&](std::size_t k) {
    if (p.size() != k) {
      bad_params("distribution '" + std::string(name) + "' takes " + std::to_string(k) +
                 " parameter(s), got " + std::to_string(p.size()));
    }
  };
  if (name == "normal") {
    arity(2);
    return DistributionSpec::normal(p[0], p[1]);
  }
  if (name == "chisq" || name == "chi2") {
    arity(1);
    return DistributionSpec::chi_squared(p[0]);
  }
  if (name == "exp" || name == "exponential") {
    arity(1);
    return DistributionSpec::exponential(p[0]);
  }
  if (name == "gamma") {
    arity(1);
    return DistributionSpec::gamma(p[0]);
  }
  if (name == "loglaplace") {
    arity(2);
    return DistributionSpec::log_laplace(p[0], p[1]);
  }
  bad_params("unknown distribution family '" + std::string(name) + "'");
}

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

} // namespace

// ---------------------------------------------------------------- construction

DistributionSpec DistributionSpec::normal(double mean, double variance) {
  DistributionSpec s;
  s.family = DistributionFamily::normal;
  s.p1 = mean;
  s.p2 = variance;
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::chi_squared(double df) {
  DistributionSpec s;
  s.family = DistributionFamily::chi_squared;
  s.p1 = df;
  s.p2 = 0.0;
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::exponential(double rate) {
  DistributionSpec s;
  s.family = DistributionFamily::exponential;
  s.p1 = rate;
  s.p2 = 0.0;
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::gamma(double shape) {
  DistributionSpec s;
  s.family = DistributionFamily::gamma;
  s.p1 = shape;
  s.p2 = 0.0;
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::log_laplace(double location, double scale) {
  DistributionSpec s;
  s.family = DistributionFamily::log_laplace;
  s.p1 = location;
  s.p2 = scale;
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::mixture(std::vector<DistributionSpec> components,
                                           std::vector<double> weights) {
  DistributionSpec s;
  s.family = DistributionFamily::mixture;
  s.p1 = 0.0;
  s.p2 = 0.0;
  if (weights.empty() && !components.empty()) {
    weights.assign(components.size(), 1.0 / static_cast<double>(components.size()));
  }
  s.components = std::move(components);
  s.weights = std::move(weights);
  s.validate();
  return s;
}

void DistributionSpec::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  switch (family) {
    case DistributionFamily::normal:
      if (!finite(p1) || !(p2 > 0.0) || !finite(p2)) bad_params("normal needs variance > 0");
      return;
    case DistributionFamily::chi_squared:
      if (!(p1 > 0.0) || !finite(p1)) bad_params("chi-squared needs df > 0");
      return;
    case DistributionFamily::exponential:
      if (!(p1 > 0.0) || !finite(p1)) bad_params("exponential needs rate > 0");
      return;
    case DistributionFamily::gamma:
      if (!(p1 > 0.0) || !finite(p1)) bad_params("gamma needs shape > 0");
      return;
    case DistributionFamily::log_laplace:
      if (!finite(p1) || !(p2 > 0.0) || !finite(p2)) bad_params("log-Laplace needs scale > 0");
      return;
    case DistributionFamily::mixture: {
      if (components.empty()) bad_params("mixture needs at least one component");
      if (weights.size() != components.size()) bad_params("one weight per mixture component");
      double total = 0.0;
      for (double w : weights) {
        if (!(w >= 0.0) || !finite(w)) bad_params("mixture weights must be non-negative");
        total += w;
      }
      if (std::abs(total - 1.0) > 1e-12) bad_params("mixture weights must sum to 1");
      for (const auto& c : components) c.validate();
      return;
    }
  }
}

// ---------------------------------------------------------------- text form

DistributionSpec parse_distribution(std::string_view text) {
  if (text.starts_with("mix:")) {
    std::string_view rest = text.substr(4);
    std::vector<DistributionSpec> parts;
    while (true) {
      const auto plus = rest.find('+');
      parts.push_back(parse_simple(rest.substr(0, plus), text));
      if (plus == std::string_view::npos) break;
      rest.remove_prefix(plus + 1);
    }
    return DistributionSpec::mixture(std::move(parts));
  }
  return parse_simple(text, text);
}

std::string to_string(const DistributionSpec& spec) {
  switch (spec.family) {
    case DistributionFamily::normal: return "normal:" + number(spec.p1) + "," + number(spec.p2);
    case DistributionFamily::chi_squared: return "chisq:" + number(spec.p1);
    case DistributionFamily::exponential: return "exp:" + number(spec.p1);
    case DistributionFamily::gamma: return "gamma:" + number(spec.p1);
    case DistributionFamily::log_laplace:
      return "loglaplace:" + number(spec.p1) + "," + number(spec.p2);
    case DistributionFamily::mixture: {
      std::string out = "mix:";
      for (std::size_t i = 0; i < spec.components.size(); ++i) {
        if (i > 0) out += '+';
        out += to_string(spec.components[i]);
      }
      return out;
    }
  }
  return "unknown";
}

// ---------------------------------------------------------------- densities

double pdf_1d(const DistributionSpec& spec, double x) {
  switch (spec.family) {
    case DistributionFamily::normal: {
      const double z = x - spec.p1;
      return std::exp(-0.5 * z * z / spec.p2) / std::sqrt(2.0 * std::numbers::pi * spec.p2);
    }
    case DistributionFamily::chi_squared: return gamma_pdf(x, 0.5 * spec.p1, 2.0);
    case DistributionFamily::exponential: return x < 0.0 ? 0.0 : spec.p1 * std::exp(-spec.p1 * x);
    case DistributionFamily::gamma: return gamma_pdf(x, spec.p1, 1.0);
    case DistributionFamily::log_laplace: {
      if (!(x > 0.0)) return 0.0;
      const double s = spec.p2;
      return std::exp(-std::abs(std::log(x) - spec.p1) / s) / (2.0 * s * x);
    }
    case DistributionFamily::mixture: {
      double f = 0.0;
      for (std::size_t i = 0; i < spec.components.size(); ++i) {
        f += spec.weights[i] * pdf_1d(spec.components[i], x);
      }
      return f;
    }
  }
  return 0.0;
}

double mean_1d(const DistributionSpec& spec) {
  switch (spec.family) {
    case DistributionFamily::normal: return spec.p1;
    case DistributionFamily::chi_squared: return spec.p1;
    case DistributionFamily::exponential: return 1.0 / spec.p1;
    case DistributionFamily::gamma: return spec.p1;
    case DistributionFamily::log_laplace:
      if (spec.p2 >= 1.0) return std::numeric_limits<double>::infinity();
      return std::exp(spec.p1) / (1.0 - spec.p2 * spec.p2);
    case DistributionFamily::mixture: {
      double m = 0.0;
      for (std::size_t i = 0; i < spec.components.size(); ++i) {
        m += spec.weights[i] * mean_1d(spec.components[i]);
      }
      return m;
    }
  }
  return 0.0;
}

double variance_1d(const DistributionSpec& spec) {
  switch (spec.family) {
    case DistributionFamily::normal: return spec.p2;
    case DistributionFamily::chi_squared: return 2.0 * spec.p1;
    case DistributionFamily::exponential: return 1.0 / (spec.p1 * spec.p1);
    case DistributionFamily::gamma: return spec.p1;
    case DistributionFamily::log_laplace: {
      const double s = spec.p2;
      if (s >= 0.5) return std::numeric_limits<double>::infinity();
      const double e2 = std::exp(2.0 * spec.p1);
      const double a = 1.0 - s * s;
      return e2 * (1.0 / (1.0 - 4.0 * s * s) - 1.0 / (a * a));
    }
    case DistributionFamily::mixture: {
      const double m = mean_1d(spec);
      double second = 0.0;
      for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const double mi = mean_1d(spec.components[i]);
        second += spec.weights[i] * (variance_1d(spec.components[i]) + mi * mi);
      }
      return second - m * m;
    }
  }
  return 0.0;
}

double draw_1d(const DistributionSpec& spec, CounterRng& rng) {
  switch (spec.family) {
    case DistributionFamily::normal: return spec.p1 + std::sqrt(spec.p2) * rng.normal();
    case DistributionFamily::chi_squared: return 2.0 * rng.gamma(0.5 * spec.p1);
    case DistributionFamily::exponential: return rng.exponential() / spec.p1;
    case DistributionFamily::gamma: return rng.gamma(spec.p1);
    case DistributionFamily::log_laplace: {
      const double u = rng.uniform_open();
      const double y = u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
      return std::exp(spec.p1 + spec.p2 * y);
    }
    case DistributionFamily::mixture: {
      const double u = rng.uniform();
      double acc = 0.0;
      std::size_t pick = spec.components.size() - 1;
      for (std::size_t i = 0; i < spec.components.size(); ++i) {
        acc += spec.weights[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
      return draw_1d(spec.components[pick], rng);
    }
  }
  return 0.0;
}

double pdf_eval(const DistributionSpec& spec, std::span<const double> x) {
  double f = 1.0;
  for (double xk : x) f *= pdf_1d(spec, xk);
  return f;
}

// ---------------------------------------------------------------- sampling

Sample sample_product(const DistributionSpec& spec, std::size_t n, std::size_t d,
                      std::uint64_t seed) {
  if (n < 1 || d < 1) bad_params("sample_product needs n >= 1 and d >= 1");
  spec.validate();
  Sample out(n, d);
  parallel_for(n, [&](std::size_t i) {
    CounterRng rng(seed, i);
    auto x = out.point(i);
    for (std::size_t k = 0; k < d; ++k) x[k] = draw_1d(spec, rng);
  });
  return out;
}

std::size_t LabeledSample::outlier_count() const {
  std::size_t c = 0;
  for (bool l : labels) c += l ? 1 : 0;
  return c;
}

LabeledSample sample_mixture(const DistributionSpec& fin, const DistributionSpec& fout,
                             std::size_t n_in, std::size_t n_out, std::size_t d,
                             std::uint64_t seed) {
  if (n_in < 1 || n_out < 1) bad_params("sample_mixture needs n_in >= 1 and n_out >= 1");
  const Sample in = sample_product(fin, n_in, d, derive_seed(seed, 1));
  const Sample out = sample_product(fout, n_out, d, derive_seed(seed, 2));
  const std::size_t n = n_in + n_out;
  const auto order = shuffled_indices(n, derive_seed(seed, 3));

  LabeledSample result;
  result.points = Sample(n, d);
  result.labels.assign(n, false);
  result.inlier = fin;
  result.outlier = fout;
  result.seed = seed;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t src = order[r];
    const bool is_out = src >= n_in;
    const auto from = is_out ? out.point(src - n_in) : in.point(src);
    std::copy(from.begin(), from.end(), result.points.point(r).begin());
    result.labels[r] = is_out;
  }
  return result;
}

OutlierDatasetSpec outlier_dataset(int id) {
  switch (id) {
    case 1:
      return {"dataset1", DistributionSpec::normal(4.0, 0.5), DistributionSpec::log_laplace(2.0, 1.0),
              450, 50};
    case 2:
      return {"dataset2", DistributionSpec::exponential(1.0), DistributionSpec::normal(5.0, 1.0),
              180, 20};
    case 3:
      return {"dataset3", DistributionSpec::gamma(2.0), DistributionSpec::gamma(12.0), 950, 50};
    default:
      bad_params("unknown outlier dataset " + std::to_string(id) + " (expected 1, 2 or 3)");
  }
}

} // namespace mcde
