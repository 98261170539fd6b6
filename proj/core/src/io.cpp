#include "mcde/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mcde/error.hpp"

namespace mcde {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- text helpers

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

bool blank(std::string_view line) { return trim(line).empty(); }

// ---------------------------------------------------------------- JSON writer

bool scalar(const json& j) { return !j.is_array() && !j.is_object(); }

void write_json(const json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        out += format_double(v);
      } else {
        out += '"' + format_double(v) + '"';
      }
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const auto& e : j) flat = flat && scalar(e);
      if (flat) {
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i > 0) out += ", ";
          write_json(j[i], out, depth + 1);
        }
        out += ']';
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += inner;
        write_json(j[i], out, depth + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + ']';
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += inner + json(it.key()).dump() + ": ";
        write_json(it.value(), out, depth + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + '}';
      return;
    }
    default: out += j.dump(); return;
  }
}

std::string dump(const json& j) {
  std::string out;
  write_json(j, out, 0);
  out += '\n';
  return out;
}

json number_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ---------------------------------------------------------------- JSON reader

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(line, column, "invalid JSON");
  }
}

[[noreturn]] void bad_config(const std::string& what) {
  throw Error(ErrorCode::InvalidParams, what);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                std::string_view where) {
  if (!obj.is_object()) bad_config(std::string(where) + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) bad_config("unknown key '" + it.key() + "' in " + std::string(where));
  }
}

double get_double(const json& j, std::string_view key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  bad_config("'" + std::string(key) + "' must be a number");
}

std::size_t get_count(const json& j, std::string_view key) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return j.get<std::size_t>();
  bad_config("'" + std::string(key) + "' must be a non-negative integer");
}

std::uint64_t get_seed(const json& j, std::string_view key) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return j.get<std::uint64_t>();
  bad_config("'" + std::string(key) + "' must be a non-negative integer");
}

bool get_bool(const json& j, std::string_view key) {
  if (!j.is_boolean()) bad_config("'" + std::string(key) + "' must be true or false");
  return j.get<bool>();
}

std::string get_string(const json& j, std::string_view key) {
  if (!j.is_string()) bad_config("'" + std::string(key) + "' must be a string");
  return j.get<std::string>();
}

std::vector<std::size_t> get_counts(const json& j, std::string_view key) {
  if (!j.is_array()) bad_config("'" + std::string(key) + "' must be an array");
  std::vector<std::size_t> out;
  for (const auto& e : j) out.push_back(get_count(e, key));
  return out;
}

std::vector<double> get_doubles(const json& j, std::string_view key) {
  if (!j.is_array()) bad_config("'" + std::string(key) + "' must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(get_double(e, key));
  return out;
}

// ---------------------------------------------------------------- config objects

FitConfig fit_config_from(const json& j, FitConfig c) {
  check_keys(j,
             {"kernel", "b", "variant", "h_grid", "interpolation", "mc_samples", "seed",
              "optimizer", "folds"},
             "fit config");
  if (j.contains("kernel")) c.model.kernel = Kernel(parse_kernel_family(get_string(j["kernel"], "kernel")));
  if (j.contains("b")) c.model.b = get_double(j["b"], "b");
  if (j.contains("variant")) c.model.variant = parse_variant(get_string(j["variant"], "variant"));
  if (j.contains("interpolation")) {
    c.model.interpolation = parse_interpolation(get_string(j["interpolation"], "interpolation"));
  }
  if (j.contains("mc_samples")) c.model.mc_samples = get_count(j["mc_samples"], "mc_samples");
  if (j.contains("seed")) c.seed = get_seed(j["seed"], "seed");
  if (j.contains("optimizer")) c.optimizer = parse_optimizer(get_string(j["optimizer"], "optimizer"));
  if (j.contains("folds")) c.folds = get_count(j["folds"], "folds");
  if (j.contains("h_grid")) {
    const json& g = j["h_grid"];
    check_keys(g, {"min", "max", "count", "log", "scale_by_sqrt_n"}, "h_grid");
    if (g.contains("min")) c.grid.min_raw = get_double(g["min"], "h_grid.min");
    if (g.contains("max")) c.grid.max_raw = get_double(g["max"], "h_grid.max");
    if (g.contains("count")) c.grid.count = get_count(g["count"], "h_grid.count");
    if (g.contains("log")) c.grid.log_spaced = get_bool(g["log"], "h_grid.log");
    if (g.contains("scale_by_sqrt_n")) {
      c.grid.n_scaling = get_bool(g["scale_by_sqrt_n"], "h_grid.scale_by_sqrt_n");
    }
  }
  check_bias(c.model.b);
  return c;
}

json fit_config_json(const FitConfig& c) {
  json j;
  j["kernel"] = std::string(to_string(c.model.kernel.family()));
  j["b"] = c.model.b;
  j["variant"] = std::string(to_string(c.model.variant));
  j["interpolation"] = std::string(to_string(c.model.interpolation));
  j["mc_samples"] = c.model.mc_samples;
  j["seed"] = c.seed;
  j["optimizer"] = std::string(to_string(c.optimizer));
  j["folds"] = c.folds;
  j["h_grid"] = {{"min", c.grid.min_raw},
                 {"max", c.grid.max_raw},
                 {"count", c.grid.count},
                 {"log", c.grid.log_spaced},
                 {"scale_by_sqrt_n", c.grid.n_scaling}};
  return j;
}

std::string_view method_name(InterpolationMethod m) {
  return m == InterpolationMethod::piecewise_linear_1d ? "piecewise_linear_1d" : "nearest_neighbor";
}

InterpolationMethod parse_method(std::string_view s) {
  if (s == "piecewise_linear_1d") return InterpolationMethod::piecewise_linear_1d;
  if (s == "nearest_neighbor") return InterpolationMethod::nearest_neighbor;
  bad_config("unknown interpolation method '" + std::string(s) + "'");
}

std::string_view transform_name(VariableTransform t) {
  return t == VariableTransform::log ? "log" : "logit";
}

json rows_json(const Sample& s) {
  json rows = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto p = s.point(i);
    rows.push_back(std::vector<double>(p.begin(), p.end()));
  }
  return rows;
}

Sample rows_sample(const json& j, std::string_view key) {
  if (!j.is_array() || j.empty()) bad_config("'" + std::string(key) + "' must be a non-empty array");
  const std::size_t d = j[0].is_array() ? j[0].size() : 0;
  if (d == 0) bad_config("'" + std::string(key) + "' rows must be non-empty arrays");
  Sample s(j.size(), d);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row = get_doubles(j[i], key);
    if (row.size() != d) bad_config("'" + std::string(key) + "' rows differ in length");
    std::copy(row.begin(), row.end(), s.point(i).begin());
  }
  return s;
}

json curve_json(const LossCurve& curve) {
  json points = json::array();
  for (const auto& p : curve.points) {
    json e = {{"h", p.h}, {"loss", p.loss}, {"failed", p.failed}};
    if (p.failed) e["failure"] = p.failure;
    points.push_back(std::move(e));
  }
  return {{"points", points}, {"argmin", curve.argmin}};
}

LossCurve curve_from(const json& j) {
  LossCurve c;
  c.argmin = get_count(j.at("argmin"), "argmin");
  for (const auto& e : j.at("points")) {
    LossPoint p;
    p.h = get_double(e.at("h"), "h");
    p.loss = get_double(e.at("loss"), "loss");
    p.failed = get_bool(e.at("failed"), "failed");
    if (e.contains("failure")) p.failure = get_string(e["failure"], "failure");
    c.points.push_back(std::move(p));
  }
  return c;
}

json report_json(const OutlierReport& r) {
  json j;
  j["k"] = r.k;
  j["scores"] = r.scores;
  j["h_star"] = r.h_star;
  j["degenerate"] = r.degenerate;
  if (r.auc) j["auc"] = *r.auc;
  return j;
}

} // namespace

// ---------------------------------------------------------------- formatting and files

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidParams, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidParams, "cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::InvalidParams, "failed writing '" + path + "'");
}

// ---------------------------------------------------------------- CSV

Sample parse_csv(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<double> values;
  std::size_t d = 0;
  std::size_t n = 0;
  bool first = true;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    if (blank(lines[li])) continue;
    const auto fields = split_fields(lines[li]);
    std::vector<double> row(fields.size());
    std::size_t bad = 0;
    for (std::size_t f = 0; f < fields.size() && bad == 0; ++f) {
      if (!parse_number(fields[f], row[f])) bad = f + 1;
    }
    if (first) {
      first = false;
      d = fields.size();
      if (bad != 0) continue;  // header row
    }
    if (fields.size() != d) {
      throw ParseError(line_no, std::min(fields.size(), d) + 1,
                       "expected " + std::to_string(d) + " fields, found " +
                           std::to_string(fields.size()));
    }
    if (bad != 0) {
      throw ParseError(line_no, bad,
                       "'" + std::string(trim(fields[bad - 1])) + "' is not a finite number");
    }
    values.insert(values.end(), row.begin(), row.end());
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::EmptySample, "CSV contains no data rows");
  return Sample(n, d, std::move(values));
}

Sample load_csv(const std::string& path) { return parse_csv(read_file(path)); }

std::vector<bool> parse_labels(std::string_view text, std::size_t n) {
  const auto lines = split_lines(text);
  std::vector<bool> labels;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto s = trim(lines[li]);
    if (s.empty()) continue;
    if (s == "0") {
      labels.push_back(false);
    } else if (s == "1") {
      labels.push_back(true);
    } else {
      throw ParseError(li + 1, 1, "label '" + std::string(s) + "' is not 0 or 1");
    }
  }
  if (labels.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(labels.size()) + " labels for " +
                                                  std::to_string(n) + " points");
  }
  return labels;
}

std::vector<bool> load_labels(const std::string& path, std::size_t n) {
  return parse_labels(read_file(path), n);
}

// ---------------------------------------------------------------- configs

FitConfig fit_config_from_json(std::string_view text, const FitConfig& base) {
  return fit_config_from(parse_json(text), base);
}

std::string fit_config_to_json(const FitConfig& config) { return dump(fit_config_json(config)); }

DEExperimentConfig de_config_from_json(std::string_view text, const DEExperimentConfig& base) {
  const json j = parse_json(text);
  check_keys(j,
             {"distribution", "dims", "sizes", "realizations", "training_repeats",
              "mcde_optimizer", "seed", "fit"},
             "density experiment config");
  DEExperimentConfig c = base;
  if (j.contains("distribution")) c.spec = parse_distribution(get_string(j["distribution"], "distribution"));
  if (j.contains("dims")) c.dims = get_counts(j["dims"], "dims");
  if (j.contains("sizes")) c.sizes = get_counts(j["sizes"], "sizes");
  if (j.contains("realizations")) c.realizations = get_count(j["realizations"], "realizations");
  if (j.contains("training_repeats")) {
    c.training_repeats = get_count(j["training_repeats"], "training_repeats");
  }
  if (j.contains("mcde_optimizer")) {
    c.mcde_selection = parse_mcde_selection(get_string(j["mcde_optimizer"], "mcde_optimizer"));
  }
  if (j.contains("seed")) c.seed = get_seed(j["seed"], "seed");
  if (j.contains("fit")) c.fit = fit_config_from(j["fit"], c.fit);
  c.validate();
  return c;
}

OutlierExperimentConfig outlier_config_from_json(std::string_view text,
                                                 const OutlierExperimentConfig& base) {
  const json j = parse_json(text);
  check_keys(j, {"datasets", "dims", "ks", "realizations", "seed", "whiten", "fit"},
             "outlier experiment config");
  OutlierExperimentConfig c = base;
  if (j.contains("datasets")) {
    if (!j["datasets"].is_array()) bad_config("'datasets' must be an array");
    c.datasets.clear();
    for (const auto& e : j["datasets"]) {
      if (e.is_number_integer()) {
        c.datasets.push_back(outlier_dataset(e.get<int>()));
        continue;
      }
      check_keys(e, {"name", "inlier", "outlier", "n_in", "n_out"}, "dataset");
      OutlierDatasetSpec ds;
      ds.name = e.contains("name") ? get_string(e["name"], "name") : "custom";
      ds.inlier = parse_distribution(get_string(e.at("inlier"), "inlier"));
      ds.outlier = parse_distribution(get_string(e.at("outlier"), "outlier"));
      ds.n_in = get_count(e.at("n_in"), "n_in");
      ds.n_out = get_count(e.at("n_out"), "n_out");
      c.datasets.push_back(std::move(ds));
    }
  }
  if (j.contains("dims")) c.dims = get_counts(j["dims"], "dims");
  if (j.contains("ks")) c.ks = get_counts(j["ks"], "ks");
  if (j.contains("realizations")) c.realizations = get_count(j["realizations"], "realizations");
  if (j.contains("seed")) c.seed = get_seed(j["seed"], "seed");
  if (j.contains("whiten")) c.detect.whiten = get_bool(j["whiten"], "whiten");
  if (j.contains("fit")) c.detect.fit = fit_config_from(j["fit"], c.detect.fit);
  c.validate();
  return c;
}

// ---------------------------------------------------------------- models

std::string model_to_json(const PersistedModel& p) {
  const DensityModel& m = p.model;
  json j;
  j["format"] = "mcde-model";
  j["version"] = 1;
  j["variant"] = std::string(to_string(m.variant));
  j["kernel"] = std::string(to_string(m.options.kernel.family()));
  j["b"] = m.options.b;
  j["h_star"] = m.h_star;
  j["normalization_constant"] = m.normalization_constant;
  j["integral"] = m.integral;
  j["integral_std_error"] = m.integral_std_error;
  j["mc_samples"] = m.mc_samples;
  j["mc_seed"] = m.mc_seed;
  j["anchors"] = rows_json(m.anchors);
  j["pointwise"] = m.pointwise.values;
  j["pointwise_raw"] = m.pointwise.raw;
  j["clamped"] = m.pointwise.clamped;
  j["domain"] = {{"lo", m.domain.lo}, {"hi", m.domain.hi}};
  j["interpolation"] = m.interpolant ? json(std::string(method_name(m.interpolant->method())))
                                     : json(nullptr);
  j["config"] = fit_config_json(p.config);
  if (m.whitening) {
    j["whitening"] = {{"mean", m.whitening->mean},
                      {"transform", m.whitening->transform},
                      {"inverse", m.whitening->inverse},
                      {"log_abs_det", m.whitening->log_abs_det}};
  } else {
    j["whitening"] = nullptr;
  }
  j["preprocessing"] = {
      {"whiten", p.preprocessing.whiten},
      {"reflect_lower", number_or_null(p.preprocessing.reflect_lower)},
      {"transform", p.preprocessing.transform
                        ? json(std::string(transform_name(*p.preprocessing.transform)))
                        : json(nullptr)}};
  j["loss_curve"] = p.curve ? curve_json(*p.curve) : json(nullptr);
  return dump(j);
}

PersistedModel model_from_json(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object() || j.value("format", "") != "mcde-model") {
    bad_config("not an MCDE model file");
  }
  try {
    PersistedModel p;
    p.config = fit_config_from(j.at("config"), FitConfig{});
    DensityModel& m = p.model;
    m.options = p.config.model;
    m.options.kernel = Kernel(parse_kernel_family(get_string(j.at("kernel"), "kernel")));
    m.options.b = get_double(j.at("b"), "b");
    m.variant = parse_variant(get_string(j.at("variant"), "variant"));
    m.options.variant = m.variant;
    m.h_star = get_double(j.at("h_star"), "h_star");
    m.normalization_constant = get_double(j.at("normalization_constant"), "normalization_constant");
    m.integral = get_double(j.at("integral"), "integral");
    m.integral_std_error = get_double(j.at("integral_std_error"), "integral_std_error");
    m.mc_samples = get_count(j.at("mc_samples"), "mc_samples");
    m.mc_seed = get_seed(j.at("mc_seed"), "mc_seed");
    m.anchors = rows_sample(j.at("anchors"), "anchors");

    PointwiseEstimate& pw = m.pointwise;
    pw.values = get_doubles(j.at("pointwise"), "pointwise");
    pw.raw = get_doubles(j.at("pointwise_raw"), "pointwise_raw");
    pw.clamped = get_count(j.at("clamped"), "clamped");
    pw.h = m.h_star;
    pw.b = m.options.b;
    pw.kernel = m.options.kernel;
    pw.dim = m.anchors.dim();
    if (pw.values.size() != m.anchors.size() || pw.raw.size() != m.anchors.size()) {
      bad_config("model has " + std::to_string(pw.values.size()) + " values for " +
                 std::to_string(m.anchors.size()) + " anchors");
    }

    if (m.variant == Variant::f2) {
      m.interpolant.emplace(m.anchors, pw.values,
                            parse_method(get_string(j.at("interpolation"), "interpolation")));
      m.domain = m.interpolant->domain();
    } else {
      m.domain.lo = get_doubles(j.at("domain").at("lo"), "domain.lo");
      m.domain.hi = get_doubles(j.at("domain").at("hi"), "domain.hi");
    }

    const json& w = j.at("whitening");
    if (!w.is_null()) {
      WhiteningTransform t;
      t.mean = get_doubles(w.at("mean"), "whitening.mean");
      t.transform = get_doubles(w.at("transform"), "whitening.transform");
      t.inverse = get_doubles(w.at("inverse"), "whitening.inverse");
      t.log_abs_det = get_double(w.at("log_abs_det"), "whitening.log_abs_det");
      const std::size_t d = t.mean.size();
      if (d != m.anchors.dim() || t.transform.size() != d * d || t.inverse.size() != d * d) {
        bad_config("whitening transform does not match the anchors' dimension");
      }
      m.whitening = std::move(t);
      m.anchors.set_provenance(Provenance::whitened);
    }

    const json& pre = j.at("preprocessing");
    p.preprocessing.whiten = get_bool(pre.at("whiten"), "preprocessing.whiten");
    if (!pre.at("reflect_lower").is_null()) {
      p.preprocessing.reflect_lower = get_double(pre["reflect_lower"], "reflect_lower");
    }
    if (!pre.at("transform").is_null()) {
      const auto t = get_string(pre["transform"], "transform");
      if (t == "log") {
        p.preprocessing.transform = VariableTransform::log;
      } else if (t == "logit") {
        p.preprocessing.transform = VariableTransform::logit;
      } else {
        bad_config("unknown transform '" + t + "'");
      }
    }
    if (j.contains("loss_curve") && !j["loss_curve"].is_null()) p.curve = curve_from(j["loss_curve"]);
    return p;
  } catch (const json::exception& e) {
    bad_config(std::string("malformed model file: ") + e.what());
  }
}

Sample to_model_space(const PersistedModel& p, const Sample& raw) {
  if (raw.dim() != p.model.anchors.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "query points have D = " + std::to_string(raw.dim()) +
                                                  ", model has D = " +
                                                  std::to_string(p.model.anchors.dim()));
  }
  Sample x = p.preprocessing.transform ? transform_variable(raw, *p.preprocessing.transform) : raw;
  if (p.model.whitening) x = p.model.whitening->apply(x);
  return x;
}

// ---------------------------------------------------------------- reports

std::string eval_report_to_json(const PersistedModel& p, const Sample& raw_queries) {
  const Sample y = to_model_space(p, raw_queries);
  std::vector<double> unnormalized(y.size());
  std::vector<double> model_density(y.size());
  std::vector<double> density(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    unnormalized[i] = p.model.unnormalized(y.point(i));
    model_density[i] = p.model.normalization_constant * unnormalized[i];
    density[i] = p.model.whitening ? p.model.whitening->raw_density(model_density[i])
                                   : model_density[i];
  }
  json j;
  j["n"] = y.size();
  j["dim"] = y.dim();
  j["h_star"] = p.model.h_star;
  j["normalization_constant"] = p.model.normalization_constant;
  j["unnormalized"] = unnormalized;
  j["density_model_space"] = model_density;
  j["density"] = density;
  return dump(j);
}

std::string outlier_reports_to_json(const std::vector<OutlierReport>& reports) {
  if (reports.size() == 1) return dump(report_json(reports.front()));
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return dump(json{{"reports", arr}});
}

std::string de_report_to_json(const DEReport& report) {
  const auto& c = report.config;
  json cfg = {{"distribution", to_string(c.spec)},
              {"dims", c.dims},
              {"sizes", c.sizes},
              {"realizations", c.realizations},
              {"training_repeats", c.training_repeats},
              {"mcde_optimizer", std::string(to_string(c.mcde_selection))},
              {"seed", c.seed},
              {"fit", fit_config_json(c.fit)}};
  json cells = json::array();
  for (const auto& cell : report.cells) {
    json e;
    e["dim"] = cell.dim;
    e["n"] = cell.n;
    e["failure"] = cell.failure ? json(*cell.failure) : json(nullptr);
    if (!cell.failure) {
      e["h_mcde"] = cell.h_mcde;
      e["h_kde"] = cell.h_kde;
      e["emse_mcde"] = cell.emse_mcde;
      e["emse_kde"] = cell.emse_kde;
      e["avg_emse_mcde"] = cell.avg_emse_mcde;
      e["avg_emse_kde"] = cell.avg_emse_kde;
      e["half_width_mcde"] = number_or_null(cell.half_width_mcde);
      e["half_width_kde"] = number_or_null(cell.half_width_kde);
      e["performance_ratio"] = cell.performance_ratio;
      e["scaled_emse_mcde"] = number_or_null(cell.scaled_emse_mcde);
      e["scaled_emse_kde"] = number_or_null(cell.scaled_emse_kde);
      e["scaled_half_width_mcde"] = number_or_null(cell.scaled_half_width_mcde);
      e["scaled_half_width_kde"] = number_or_null(cell.scaled_half_width_kde);
    }
    cells.push_back(std::move(e));
  }
  return dump(json{{"config", cfg}, {"cells", cells}});
}

std::string outlier_experiment_to_json(const OutlierExperimentReport& report) {
  const auto& c = report.config;
  json datasets = json::array();
  for (const auto& ds : c.datasets) {
    datasets.push_back({{"name", ds.name},
                        {"inlier", to_string(ds.inlier)},
                        {"outlier", to_string(ds.outlier)},
                        {"n_in", ds.n_in},
                        {"n_out", ds.n_out}});
  }
  json cfg = {{"datasets", datasets},
              {"dims", c.dims},
              {"ks", c.ks},
              {"realizations", c.realizations},
              {"seed", c.seed},
              {"whiten", c.detect.whiten},
              {"fit", fit_config_json(c.detect.fit)}};
  json cells = json::array();
  for (const auto& cell : report.cells) {
    json e;
    e["dataset"] = cell.dataset;
    e["dim"] = cell.dim;
    e["k"] = cell.k;
    e["below_locality"] = cell.below_locality;
    e["failure"] = cell.failure ? json(*cell.failure) : json(nullptr);
    if (!cell.failure) {
      e["aucs"] = cell.aucs;
      e["mean_auc"] = cell.mean_auc;
      e["half_width"] = number_or_null(cell.half_width);
    }
    cells.push_back(std::move(e));
  }
  return dump(json{{"config", cfg}, {"cells", cells}});
}

} // namespace mcde
