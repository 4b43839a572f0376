#include "condmeta/environments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace condmeta {

namespace {

Vec sample_gaussian(std::mt19937_64& rng, const Vec& mean, double sigma) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(mean.size());
  for (int i = 0; i < v.size(); ++i) v[i] = mean[i] + sigma * gauss(rng);
  return v;
}

// Inputs ~ N(x_center, sigma_x^2 I), y = <x, w> + noise with the noise level
// set per task so that std(noiseless outputs) / sigma_noise equals snr.
Dataset sample_dataset(std::mt19937_64& rng, const Vec& w, const Vec& x_center,
                       double sigma_x, int n, double snr) {
  const int d = static_cast<int>(w.size());
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = x_center[j] + sigma_x * gauss(rng);
  Vec clean = x * w;
  const double mean = clean.mean();
  const double sd = std::sqrt((clean.array() - mean).square().sum() / n);
  const double sigma_noise = sd / snr;
  Vec y = clean;
  for (int i = 0; i < n; ++i) y[i] += sigma_noise * gauss(rng);
  return Dataset(std::move(x), std::move(y));
}

}  // namespace

void ClusterEnvSpec::validate() const {
  if (m < 1 || d < 1) throw std::invalid_argument("ClusterEnvSpec: m, d >= 1");
  if (w_centers.rows() != m || w_centers.cols() != d || x_centers.rows() != m ||
      x_centers.cols() != d)
    throw std::invalid_argument("ClusterEnvSpec: center dimensions mismatch");
  if (!(sigma_w > 0) || !(sigma_x > 0))
    throw std::invalid_argument("ClusterEnvSpec: scatter must be > 0");
  if (n_tot < 1 || T_tot < 1)
    throw std::invalid_argument("ClusterEnvSpec: n_tot, T_tot >= 1");
  if (!(snr > 0)) throw std::invalid_argument("ClusterEnvSpec: snr > 0");
}

void CircleEnvSpec::validate() const {
  if (d < 2) throw std::invalid_argument("CircleEnvSpec: d >= 2 required");
  if (!(r > 0)) throw std::invalid_argument("CircleEnvSpec: r > 0 required");
  if (!(sigma > 0)) throw std::invalid_argument("CircleEnvSpec: sigma > 0");
  if (c.size() != 0 && c.size() != d)
    throw std::invalid_argument("CircleEnvSpec: center dimension mismatch");
  if (n_tot < 1 || T_tot < 1)
    throw std::invalid_argument("CircleEnvSpec: n_tot, T_tot >= 1");
  if (!(snr > 0)) throw std::invalid_argument("CircleEnvSpec: snr > 0");
}

std::vector<TaskInstance> gen_clusters(const ClusterEnvSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> pick(0, spec.m - 1);
  std::vector<TaskInstance> tasks;
  tasks.reserve(spec.T_tot);
  for (int t = 0; t < spec.T_tot; ++t) {
    const int j = pick(rng);
    const Vec w = sample_gaussian(rng, spec.w_centers.row(j).transpose(), spec.sigma_w);
    TaskInstance task;
    task.train = sample_dataset(rng, w, spec.x_centers.row(j).transpose(),
                                spec.sigma_x, spec.n_tot, spec.snr);
    task.side = SideInfo::from_inputs(task.train.inputs);
    task.target = w;
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::vector<TaskInstance> gen_circle(const CircleEnvSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Vec center = spec.c.size() == 0 ? Vec(Vec::Zero(spec.d)) : spec.c;
  std::vector<TaskInstance> tasks;
  tasks.reserve(spec.T_tot);
  for (int t = 0; t < spec.T_tot; ++t) {
    const double s = uniform(rng);
    Vec h = center;
    h[0] += spec.r * std::cos(2.0 * M_PI * s);
    h[1] += spec.r * std::sin(2.0 * M_PI * s);
    const Vec w = sample_gaussian(rng, h, spec.sigma);
    TaskInstance task;
    task.train =
        sample_dataset(rng, w, Vec::Zero(spec.d), 1.0, spec.n_tot, spec.snr);
    task.side = SideInfo::from_scalar(s);
    task.target = w;
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::vector<TaskInstance> gen_planted_linear(const ConditioningParams& star,
                                             const FeatureMap& feature_map,
                                             double noise,
                                             const PlantedEnvSpec& spec) {
  if (spec.d != star.dim())
    throw std::invalid_argument("gen_planted_linear: dimension mismatch");
  if (noise < 0) throw std::invalid_argument("gen_planted_linear: noise >= 0");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<TaskInstance> tasks;
  tasks.reserve(spec.T_tot);
  for (int t = 0; t < spec.T_tot; ++t) {
    const double s = uniform(rng);
    const SideInfo side = SideInfo::from_scalar(s);
    const Vec mean = apply_tau(star, feature_map.apply(side));
    const Vec w = noise > 0 ? sample_gaussian(rng, mean, noise) : mean;
    TaskInstance task;
    task.train =
        sample_dataset(rng, w, Vec::Zero(spec.d), 1.0, spec.n_tot, spec.snr);
    task.side = side;
    task.target = w;
    tasks.push_back(std::move(task));
  }
  return tasks;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

std::vector<TaskInstance> load_csv_env(const std::string& path, CsvSchema schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv_env: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_csv_env: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_row(line);
  if (header.size() < 3 || header[0] != "task_id" || header[1] != "y")
    throw std::runtime_error("load_csv_env: header must be task_id,y,x_1..x_d");
  const int d = static_cast<int>(header.size()) - 2;
  if (schema == CsvSchema::Lenk && d != 13)
    throw std::runtime_error("load_csv_env: lenk schema expects d = 13");
  if (schema == CsvSchema::Schools && d != 26)
    throw std::runtime_error("load_csv_env: schools schema expects d = 26");

  // task id -> rows, in first-appearance order
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<Vec, double>>> groups;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_row(line);
    if (static_cast<int>(cells.size()) != d + 2)
      throw std::runtime_error("load_csv_env: ragged row " + std::to_string(row_no));
    Vec x(d);
    double y;
    try {
      y = std::stod(cells[1]);
      for (int j = 0; j < d; ++j) x[j] = std::stod(cells[j + 2]);
    } catch (const std::exception&) {
      throw std::runtime_error("load_csv_env: bad number in row " +
                               std::to_string(row_no));
    }
    if (groups.find(cells[0]) == groups.end()) order.push_back(cells[0]);
    groups[cells[0]].emplace_back(std::move(x), y);
  }
  if (order.empty()) throw std::runtime_error("load_csv_env: no data rows");

  std::vector<TaskInstance> tasks;
  tasks.reserve(order.size());
  for (const auto& id : order) {
    const auto& rows = groups[id];
    Mat x(rows.size(), d);
    Vec y(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      x.row(i) = rows[i].first.transpose();
      y[i] = rows[i].second;
    }
    TaskInstance task;
    task.train = Dataset(std::move(x), std::move(y));
    task.side = schema == CsvSchema::Lenk
                    ? SideInfo::from_datapoints(task.train.inputs, task.train.outputs)
                    : SideInfo::from_inputs(task.train.inputs);
    tasks.push_back(std::move(task));
  }
  return tasks;
}

void save_csv_env(const std::string& path, const std::vector<TaskInstance>& tasks) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv_env: cannot open " + path);
  if (tasks.empty()) throw std::invalid_argument("save_csv_env: no tasks");
  const int d = tasks.front().train.dim();
  out << "task_id,y";
  for (int j = 1; j <= d; ++j) out << ",x_" << j;
  out << "\n";
  char buf[64];
  for (size_t t = 0; t < tasks.size(); ++t) {
    const Dataset& data = tasks[t].train;
    for (int i = 0; i < data.n(); ++i) {
      out << t;
      std::snprintf(buf, sizeof(buf), "%.17g", data.outputs[i]);
      out << ',' << buf;
      for (int j = 0; j < d; ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", data.inputs(i, j));
        out << ',' << buf;
      }
      out << "\n";
    }
  }
}

namespace {

// Rebuild collection side info from the train split only.
SideInfo side_from_train(const SideInfo& original, const Dataset& train) {
  switch (original.kind) {
    case SideInfo::Kind::Scalar:
      return original;
    case SideInfo::Kind::Inputs:
      return SideInfo::from_inputs(train.inputs);
    case SideInfo::Kind::Datapoints:
      return SideInfo::from_datapoints(train.inputs, train.outputs);
  }
  throw std::logic_error("side_from_train: unknown side kind");
}

TaskInstance cut_task(const TaskInstance& task, double fraction, bool keep_test) {
  const int n = task.train.n();
  int n_tr = static_cast<int>(std::floor(fraction * n));
  n_tr = std::max(1, std::min(n_tr, n - 1));
  TaskInstance out;
  out.train = task.train.slice(0, n_tr);
  if (keep_test) out.test = task.train.slice(n_tr, n - n_tr);
  out.side = side_from_train(task.side, out.train);
  out.target = task.target;
  return out;
}

}  // namespace

TaskSplit split_tasks(const std::vector<TaskInstance>& tasks, int T_tr, int T_va,
                      int T_te, double within_train_fraction, std::uint64_t seed) {
  if (T_tr < 0 || T_va < 0 || T_te < 0 ||
      static_cast<size_t>(T_tr + T_va + T_te) > tasks.size())
    throw std::invalid_argument("split_tasks: partition exceeds task count");
  if (!(within_train_fraction > 0.0) || !(within_train_fraction < 1.0))
    throw std::invalid_argument("split_tasks: fraction must lie in (0,1)");

  std::vector<size_t> idx(tasks.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  TaskSplit split;
  int pos = 0;
  for (int i = 0; i < T_tr; ++i)
    split.train.push_back(cut_task(tasks[idx[pos++]], within_train_fraction, false));
  for (int i = 0; i < T_va; ++i)
    split.val.push_back(cut_task(tasks[idx[pos++]], within_train_fraction, true));
  for (int i = 0; i < T_te; ++i)
    split.test.push_back(cut_task(tasks[idx[pos++]], within_train_fraction, true));
  return split;
}

}  // namespace condmeta
