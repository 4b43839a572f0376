#include "condmeta/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "condmeta/features.hpp"
#include "condmeta/meta.hpp"

namespace condmeta {

using json = nlohmann::ordered_json;

std::string method_name(Method m) {
  switch (m) {
    case Method::Itl: return "itl";
    case Method::Uncond: return "uncond";
    case Method::MeanOracle: return "mean";
    case Method::CondMeanInputs: return "cond_mean_inputs";
    case Method::CondXyOuter: return "cond_xy_outer";
    case Method::CondCircle: return "cond_circle";
    case Method::CondRff: return "cond_rff";
  }
  throw std::logic_error("method_name: unknown method");
}

static Method method_from_name(const std::string& name) {
  for (Method m : {Method::Itl, Method::Uncond, Method::MeanOracle,
                   Method::CondMeanInputs, Method::CondXyOuter,
                   Method::CondCircle, Method::CondRff})
    if (method_name(m) == name) return m;
  throw std::invalid_argument("unknown method: " + name);
}

std::vector<double> GridSpec::values() const {
  if (!explicit_values.empty()) return explicit_values;
  if (count < 1 || !(min_value > 0) || !(max_value >= min_value))
    throw std::invalid_argument("GridSpec: invalid log range");
  std::vector<double> vals;
  if (count == 1) {
    vals.push_back(min_value);
    return vals;
  }
  const double lo = std::log10(min_value);
  const double hi = std::log10(max_value);
  for (int i = 0; i < count; ++i)
    vals.push_back(std::pow(10.0, lo + i * (hi - lo) / (count - 1)));
  return vals;
}

void ExperimentConfig::validate() const {
  // an empty method list is allowed and produces header-only outputs
  if (lambda_grid.values().empty() || gamma_grid.values().empty())
    throw std::invalid_argument("config: empty hyperparameter grid");
  if (T_tr < 1 || T_va < 0 || T_te < 1)
    throw std::invalid_argument("config: invalid task split sizes");
  if (!(within_train_fraction > 0) || !(within_train_fraction < 1))
    throw std::invalid_argument("config: within_train_fraction must be in (0,1)");
  if (seeds.empty()) throw std::invalid_argument("config: empty seed list");
  for (int t : checkpoints)
    if (t < 1 || t > T_tr)
      throw std::invalid_argument("config: checkpoints must lie in [1, T_tr]");
  if (env_kind == EnvKind::Csv && csv_path.empty())
    throw std::invalid_argument("config: csv environment needs a path");
  if (rff_k < 1 || !(rff_sigma > 0))
    throw std::invalid_argument("config: invalid rff parameters");
}

std::vector<int> ExperimentConfig::resolved_checkpoints() const {
  if (!checkpoints.empty()) {
    std::vector<int> out = checkpoints;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  const int lo = std::min(10, T_tr);
  std::vector<int> out;
  for (int i = 0; i < 10; ++i) {
    const double f = i / 9.0;
    const double v =
        std::pow(10.0, std::log10(double(lo)) +
                           f * (std::log10(double(T_tr)) - std::log10(double(lo))));
    out.push_back(std::max(1, std::min(T_tr, int(std::lround(v)))));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Config file parsing: [section] key = value, '#' comments.

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

using KvMap = std::map<std::string, std::string>;

double kv_double(const KvMap& kv, const std::string& key, double fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stod(it->second);
}

int kv_int(const KvMap& kv, const std::string& key, int fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stoi(it->second);
}

std::string kv_str(const KvMap& kv, const std::string& key,
                   const std::string& fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

// "8" replicates a scalar across d; "1,2,3" gives explicit components.
Vec parse_vector(const std::string& text, int d) {
  const auto parts = split_list(text);
  Vec v(d);
  if (parts.size() == 1) {
    v.setConstant(std::stod(parts[0]));
  } else if (static_cast<int>(parts.size()) == d) {
    for (int i = 0; i < d; ++i) v[i] = std::stod(parts[i]);
  } else {
    throw std::invalid_argument("config: vector '" + text +
                                "' must have 1 or d components");
  }
  return v;
}

GridSpec parse_grid(const KvMap& kv, const std::string& prefix) {
  GridSpec grid;
  grid.count = kv_int(kv, prefix + "_count", grid.count);
  grid.min_value = kv_double(kv, prefix + "_min", grid.min_value);
  grid.max_value = kv_double(kv, prefix + "_max", grid.max_value);
  const std::string vals = kv_str(kv, prefix + "_values", "");
  for (const auto& v : split_list(vals))
    grid.explicit_values.push_back(std::stod(v));
  return grid;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);

  std::map<std::string, KvMap> sections;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not 'key = value'");
    sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  ExperimentConfig cfg;
  const KvMap& env = sections["environment"];
  const std::string kind = kv_str(env, "kind", "clusters");
  const int d = kv_int(env, "d", 20);
  if (kind == "clusters") {
    cfg.env_kind = EnvKind::Clusters;
    ClusterEnvSpec& c = cfg.clusters;
    c.m = kv_int(env, "m", 1);
    c.d = d;
    c.sigma_w = kv_double(env, "sigma_w", 1.0);
    c.sigma_x = kv_double(env, "sigma_x", 1.0);
    c.n_tot = kv_int(env, "n_tot", 20);
    c.T_tot = kv_int(env, "T_tot", 480);
    c.snr = kv_double(env, "snr", 1.0);
    c.w_centers = Mat::Zero(c.m, d);
    c.x_centers = Mat::Zero(c.m, d);
    for (int i = 0; i < c.m; ++i) {
      const std::string wkey = "w_center_" + std::to_string(i + 1);
      const std::string xkey = "x_center_" + std::to_string(i + 1);
      if (env.count(wkey)) c.w_centers.row(i) = parse_vector(env.at(wkey), d).transpose();
      if (env.count(xkey)) c.x_centers.row(i) = parse_vector(env.at(xkey), d).transpose();
    }
  } else if (kind == "circle") {
    cfg.env_kind = EnvKind::Circle;
    CircleEnvSpec& c = cfg.circle;
    c.r = kv_double(env, "r", 8.0);
    c.sigma = kv_double(env, "sigma", 1.0);
    c.d = d;
    c.n_tot = kv_int(env, "n_tot", 20);
    c.T_tot = kv_int(env, "T_tot", 480);
    c.snr = kv_double(env, "snr", 1.0);
    if (env.count("c")) c.c = parse_vector(env.at("c"), d);
  } else if (kind == "csv") {
    cfg.env_kind = EnvKind::Csv;
    cfg.csv_path = kv_str(env, "path", "");
    const std::string schema = kv_str(env, "schema", "generic");
    if (schema == "lenk") cfg.csv_schema = CsvSchema::Lenk;
    else if (schema == "schools") cfg.csv_schema = CsvSchema::Schools;
    else if (schema == "generic") cfg.csv_schema = CsvSchema::Generic;
    else throw std::invalid_argument("config: unknown csv schema " + schema);
  } else {
    throw std::invalid_argument("config: unknown environment kind " + kind);
  }

  const KvMap& methods = sections["methods"];
  for (const auto& name : split_list(kv_str(methods, "list", "")))
    cfg.methods.push_back(method_from_name(name));
  cfg.rff_k = kv_int(methods, "rff_k", cfg.rff_k);
  cfg.rff_sigma = kv_double(methods, "rff_sigma", cfg.rff_sigma);

  const KvMap& grids = sections["grids"];
  cfg.lambda_grid = parse_grid(grids, "lambda");
  cfg.gamma_grid = parse_grid(grids, "gamma");

  const KvMap& splits = sections["splits"];
  cfg.T_tr = kv_int(splits, "T_tr", cfg.T_tr);
  cfg.T_va = kv_int(splits, "T_va", cfg.T_va);
  cfg.T_te = kv_int(splits, "T_te", cfg.T_te);
  cfg.within_train_fraction =
      kv_double(splits, "within_train_fraction", cfg.within_train_fraction);

  const KvMap& run = sections["run"];
  cfg.seeds.clear();
  for (const auto& s : split_list(kv_str(run, "seeds", "0")))
    cfg.seeds.push_back(std::stoull(s));
  const std::string mode = kv_str(run, "inner_mode", "online");
  if (mode == "online") cfg.inner_mode = InnerMode::Online;
  else if (mode == "batch") cfg.inner_mode = InnerMode::Batch;
  else throw std::invalid_argument("config: unknown inner_mode " + mode);
  cfg.output_dir = kv_str(run, "output_dir", cfg.output_dir);
  for (const auto& c : split_list(kv_str(run, "checkpoints", "")))
    cfg.checkpoints.push_back(std::stoi(c));

  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Experiment protocol.

double evaluate_method(const ConditioningFn& model,
                       const std::vector<TaskInstance>& tasks, const Loss& loss,
                       double lambda, InnerMode inner_mode) {
  if (tasks.empty()) throw std::invalid_argument("evaluate_method: no tasks");
  double acc = 0.0;
  int counted = 0;
  for (const auto& task : tasks) {
    if (task.test.empty()) continue;
    const Vec theta = model(task.side);
    Vec w;
    if (inner_mode == InnerMode::Batch) {
      InnerConfig cfg;
      cfg.lambda = lambda;
      w = solve_batch(task.train, theta, loss, cfg).w_out;
    } else {
      w = solve_online(task.train, theta, loss, lambda).w_out;
    }
    acc += loss_eval(loss, w, task.test);
    ++counted;
  }
  if (counted == 0)
    throw std::runtime_error("evaluate_method: every task had an empty test split");
  return acc / counted;
}

namespace {

bool method_uses_gamma(Method m) {
  return m != Method::Itl && m != Method::MeanOracle;
}

bool method_needs_targets(Method m) { return m == Method::MeanOracle; }

FeatureMap method_feature_map(Method m, const ExperimentConfig& cfg,
                              const std::vector<TaskInstance>& tasks,
                              std::uint64_t seed) {
  const int d = tasks.front().train.dim();
  const bool scalar_side = tasks.front().side.kind == SideInfo::Kind::Scalar;
  switch (m) {
    case Method::CondMeanInputs: return FeatureMap::mean_inputs(d);
    case Method::CondXyOuter: return FeatureMap::xy_outer(d);
    case Method::CondCircle: return FeatureMap::circle();
    case Method::CondRff:
      return rff_new(cfg.rff_k, cfg.rff_sigma, scalar_side ? 1 : d,
                     seed * 7919 + 13);
    default: return FeatureMap::zero();
  }
}

struct TrainedModel {
  ConditioningParams params;
  FeatureMap feature_map;

  ConditioningFn fn() const {
    ConditioningParams p = params;
    FeatureMap fm = feature_map;
    return [p, fm](const SideInfo& side) { return apply_tau(p, fm.apply(side)); };
  }
};

TrainedModel train_method(Method m, const std::vector<TaskInstance>& train_tasks,
                          int T, double lambda, double gamma,
                          const FeatureMap& fm, InnerMode inner_mode) {
  const int d = train_tasks.front().train.dim();
  TrainedModel model;
  model.feature_map = fm;
  if (m == Method::Itl) {
    model.params = ConditioningParams::zeros(d, 0);
    model.feature_map = FeatureMap::zero();
    return model;
  }
  if (m == Method::MeanOracle) {
    std::vector<TaskInstance> head(train_tasks.begin(), train_tasks.begin() + T);
    model.params = ConditioningParams{Mat::Zero(d, 0), unconditional_mean(head)};
    model.feature_map = FeatureMap::zero();
    return model;
  }
  MetaConfig mc;
  mc.gamma = gamma;
  mc.lambda = lambda;
  mc.inner_mode = inner_mode;
  mc.T = T;
  mc.feature_map = fm;
  mc.loss = Loss::absolute();
  model.params = train_meta(train_tasks, mc).avg_params;
  return model;
}

std::vector<TaskInstance> generate_tasks(const ExperimentConfig& cfg,
                                         std::uint64_t seed) {
  switch (cfg.env_kind) {
    case EnvKind::Clusters: {
      ClusterEnvSpec spec = cfg.clusters;
      spec.seed = seed;
      return gen_clusters(spec);
    }
    case EnvKind::Circle: {
      CircleEnvSpec spec = cfg.circle;
      spec.seed = seed;
      return gen_circle(spec);
    }
    case EnvKind::Csv:
      return load_csv_env(cfg.csv_path, cfg.csv_schema);
  }
  throw std::logic_error("generate_tasks: unknown environment kind");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Loss loss = Loss::absolute();
  const std::vector<double> lambdas = cfg.lambda_grid.values();
  const std::vector<double> gammas = cfg.gamma_grid.values();
  const std::vector<int> checkpoints = cfg.resolved_checkpoints();

  ExperimentResult result;
  for (const std::uint64_t seed : cfg.seeds) {
    const std::vector<TaskInstance> all_tasks = generate_tasks(cfg, seed);
    const TaskSplit split =
        split_tasks(all_tasks, cfg.T_tr, cfg.T_va, cfg.T_te,
                    cfg.within_train_fraction, seed + 0x9e3779b97f4a7c15ULL);
    const bool have_targets =
        !all_tasks.empty() && all_tasks.front().target.has_value();

    FeatureMap diag_fm = FeatureMap::zero();
    for (Method m : cfg.methods)
      if (method_uses_gamma(m) && m != Method::Uncond) {
        diag_fm = method_feature_map(m, cfg, all_tasks, seed);
        break;
      }
    if (have_targets) {
      DiagnosticsRow row;
      row.seed = seed;
      row.report = gap_report(all_tasks, diag_fm);
      result.diagnostics.push_back(row);
    }

    for (Method m : cfg.methods) {
      if (method_needs_targets(m) && !have_targets) {
        result.warnings.push_back("seed " + std::to_string(seed) + ": method " +
                                  method_name(m) +
                                  " skipped (no ground-truth targets)");
        continue;
      }
      const FeatureMap fm = method_feature_map(m, cfg, all_tasks, seed);
      const std::vector<double> method_gammas =
          method_uses_gamma(m) ? gammas : std::vector<double>{0.0};

      // Hyperparameter selection on the validation tasks at T = T_tr.
      double best_err = std::numeric_limits<double>::infinity();
      double best_lambda = lambdas.front();
      double best_gamma = method_gammas.front();
      for (const double lambda : lambdas) {
        for (const double gamma : method_gammas) {
          double err;
          try {
            const TrainedModel model = train_method(
                m, split.train, cfg.T_tr, lambda, gamma, fm, cfg.inner_mode);
            err = evaluate_method(model.fn(), split.val, loss, lambda,
                                  cfg.inner_mode);
          } catch (const std::invalid_argument&) {
            // numerically degenerate cell (e.g. diverged meta iterates)
            err = std::numeric_limits<double>::infinity();
          }
          if (err < best_err) {
            best_err = err;
            best_lambda = lambda;
            best_gamma = gamma;
          }
        }
      }

      // Learning curve on the test tasks with the selected pair.
      for (const int T : checkpoints) {
        const TrainedModel model = train_method(
            m, split.train, T, best_lambda, best_gamma, fm, cfg.inner_mode);
        const double err = evaluate_method(model.fn(), split.test, loss,
                                           best_lambda, cfg.inner_mode);
        result.rows.push_back(CurveRow{method_name(m), seed, T, best_lambda,
                                       best_gamma, err});
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Outputs.

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_outputs: cannot write " + path.string());
  return out;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  switch (cfg.env_kind) {
    case EnvKind::Clusters: {
      const ClusterEnvSpec& c = cfg.clusters;
      j["environment"] = {{"kind", "clusters"}, {"m", c.m}, {"d", c.d},
                          {"sigma_w", c.sigma_w}, {"sigma_x", c.sigma_x},
                          {"n_tot", c.n_tot}, {"T_tot", c.T_tot}, {"snr", c.snr}};
      for (int i = 0; i < c.m; ++i) {
        j["environment"]["w_center_" + std::to_string(i + 1)] =
            std::vector<double>(c.w_centers.row(i).begin(), c.w_centers.row(i).end());
        j["environment"]["x_center_" + std::to_string(i + 1)] =
            std::vector<double>(c.x_centers.row(i).begin(), c.x_centers.row(i).end());
      }
      break;
    }
    case EnvKind::Circle: {
      const CircleEnvSpec& c = cfg.circle;
      j["environment"] = {{"kind", "circle"}, {"r", c.r}, {"sigma", c.sigma},
                          {"d", c.d}, {"n_tot", c.n_tot}, {"T_tot", c.T_tot},
                          {"snr", c.snr}};
      break;
    }
    case EnvKind::Csv:
      j["environment"] = {{"kind", "csv"}, {"path", cfg.csv_path}};
      break;
  }
  std::vector<std::string> names;
  for (Method m : cfg.methods) names.push_back(method_name(m));
  j["methods"] = names;
  j["rff"] = {{"k", cfg.rff_k}, {"sigma", cfg.rff_sigma}};
  j["grids"] = {{"lambda", cfg.lambda_grid.values()},
                {"gamma", cfg.gamma_grid.values()}};
  j["splits"] = {{"T_tr", cfg.T_tr}, {"T_va", cfg.T_va}, {"T_te", cfg.T_te},
                 {"within_train_fraction", cfg.within_train_fraction}};
  j["checkpoints"] = cfg.resolved_checkpoints();
  j["seeds"] = cfg.seeds;
  j["inner_mode"] = cfg.inner_mode == InnerMode::Online ? "online" : "batch";
  j["notes"] = {
      "noise level per task: std(noiseless outputs) / snr",
      "circle environment inputs are drawn from a standard Gaussian",
      "hyperparameters validated once at T = T_tr and reused at all checkpoints",
      "rff matrix entries are i.i.d. N(0, sigma^2)",
  };
  return j;
}

// Palette reused in legend and polylines, keyed by method order.
const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2"};

void write_svg(std::ofstream& out,
               const std::vector<std::string>& methods,
               const std::map<std::string, std::map<int, double>>& curves) {
  const double width = 720, height = 460;
  const double left = 70, right = 40, top = 30, bottom = 50;

  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& [name, curve] : curves) {
    for (const auto& [t, err] : curve) {
      x_min = std::min(x_min, double(t));
      x_max = std::max(x_max, double(t));
      y_min = std::min(y_min, err);
      y_max = std::max(y_max, err);
    }
  }
  if (x_min > x_max) { x_min = 1; x_max = 10; y_min = 0; y_max = 1; }
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const auto x_of = [&](double t) {
    return left + (std::log10(t) - std::log10(x_min)) /
                      (std::log10(x_max) - std::log10(x_min)) *
                      (width - left - right);
  };
  const auto y_of = [&](double e) {
    return height - bottom - (e - y_min) / (y_max - y_min) *
                                 (height - top - bottom);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\""
      << width - right << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">training tasks T (log)"
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << (top + height - bottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << (top + height - bottom) / 2 << ")\">test error</text>\n";
  // axis extents
  out << "<text x=\"" << left << "\" y=\"" << height - bottom + 16
      << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt6(x_min)
      << "</text>\n";
  out << "<text x=\"" << width - right << "\" y=\"" << height - bottom + 16
      << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt6(x_max)
      << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << y_of(y_min) + 4
      << "\" font-size=\"11\" text-anchor=\"end\">" << fmt6(y_min) << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << y_of(y_max) + 4
      << "\" font-size=\"11\" text-anchor=\"end\">" << fmt6(y_max) << "</text>\n";

  int idx = 0;
  for (const auto& name : methods) {
    const auto it = curves.find(name);
    if (it == curves.end()) { ++idx; continue; }
    const char* color = kPalette[idx % 7];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (const auto& [t, err] : it->second)
      out << fmt6(x_of(t)) << ',' << fmt6(y_of(err)) << ' ';
    out << "\"/>\n";
    // legend
    const double ly = top + 18.0 * idx + 8;
    out << "<line x1=\"" << width - right - 150 << "\" y1=\"" << ly
        << "\" x2=\"" << width - right - 125 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << width - right - 118 << "\" y=\"" << ly + 4
        << "\" font-size=\"12\">" << name << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

}  // namespace

void emit_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("emit_outputs: cannot create " + dir.string());

  {
    auto out = open_out(dir / "curves.csv");
    out << "method,seed,T,lambda,gamma,test_error\n";
    for (const auto& row : result.rows)
      out << row.method << ',' << row.seed << ',' << row.T << ','
          << fmt(row.lambda) << ',' << fmt(row.gamma) << ','
          << fmt(row.test_error) << "\n";
  }

  {
    auto out = open_out(dir / "diagnostics.csv");
    out << "seed,var_itl,var_uncond,var_best_linear,gap_uncond_vs_linear,"
           "gap_itl_vs_uncond\n";
    for (const auto& row : result.diagnostics)
      out << row.seed << ',' << fmt(row.report.var_itl) << ','
          << fmt(row.report.var_uncond) << ',' << fmt(row.report.var_best_linear)
          << ',' << fmt(row.report.gap_uncond_vs_linear) << ','
          << fmt(row.report.gap_itl_vs_uncond) << "\n";
  }

  {
    json meta = config_to_json(cfg);
    meta["warnings"] = result.warnings;
    auto out = open_out(dir / "run_meta.json");
    out << meta.dump(2) << "\n";
  }

  {
    // Seed-averaged curves, one line per method.
    std::map<std::string, std::map<int, std::pair<double, int>>> acc;
    for (const auto& row : result.rows) {
      auto& cell = acc[row.method][row.T];
      cell.first += row.test_error;
      cell.second += 1;
    }
    std::map<std::string, std::map<int, double>> curves;
    for (const auto& [name, curve] : acc)
      for (const auto& [t, cell] : curve)
        curves[name][t] = cell.first / cell.second;
    std::vector<std::string> names;
    for (Method m : cfg.methods) names.push_back(method_name(m));
    auto out = open_out(dir / "curves.svg");
    write_svg(out, names, curves);
  }
}

}  // namespace condmeta
