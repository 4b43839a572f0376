#include "condmeta/model_io.hpp"

#include <fstream>

#include "json.hpp"

namespace condmeta {

namespace {

using json = nlohmann::ordered_json;

json vec_to_json(const Vec& v) {
  return std::vector<double>(v.begin(), v.end());
}

Vec vec_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(data.data(), static_cast<Eigen::Index>(data.size()));
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Mat mat_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  Mat m(rows, cols);
  const json& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows)
    throw std::invalid_argument("model file: matrix row count mismatch");
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = data[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("model file: matrix column count mismatch");
    m.row(i) = Eigen::Map<const Vec>(row.data(), cols).transpose();
  }
  return m;
}

const char* feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Zero: return "zero";
    case FeatureKind::MeanInputs: return "mean_inputs";
    case FeatureKind::XyOuter: return "xy_outer";
    case FeatureKind::Circle: return "circle";
    case FeatureKind::Rff: return "rff";
  }
  throw std::logic_error("feature_kind_name: unknown kind");
}

FeatureKind feature_kind_from_name(const std::string& name) {
  for (FeatureKind k : {FeatureKind::Zero, FeatureKind::MeanInputs,
                        FeatureKind::XyOuter, FeatureKind::Circle,
                        FeatureKind::Rff})
    if (name == feature_kind_name(k)) return k;
  throw std::invalid_argument("model file: unknown feature kind " + name);
}

json feature_map_to_json(const FeatureMap& fm) {
  json j{{"kind", feature_kind_name(fm.kind)},
         {"k", fm.k},
         {"bound_K", fm.bound_K}};
  if (fm.kind == FeatureKind::Rff) {
    j["rff_sigma"] = fm.rff_sigma;
    j["rff_seed"] = fm.rff_seed;
    j["rff_u"] = mat_to_json(fm.rff_u);
    j["rff_v"] = vec_to_json(fm.rff_v);
  }
  return j;
}

FeatureMap feature_map_from_json(const json& j) {
  FeatureMap fm;
  fm.kind = feature_kind_from_name(j.at("kind").get<std::string>());
  fm.k = j.at("k").get<int>();
  fm.bound_K = j.at("bound_K").get<double>();
  if (fm.kind == FeatureKind::Rff) {
    fm.rff_sigma = j.at("rff_sigma").get<double>();
    fm.rff_seed = j.at("rff_seed").get<std::uint64_t>();
    fm.rff_u = mat_from_json(j.at("rff_u"));
    fm.rff_v = vec_from_json(j.at("rff_v"));
    if (fm.rff_u.rows() != fm.k || fm.rff_v.size() != fm.k)
      throw std::invalid_argument("model file: rff parameter shape mismatch");
  }
  return fm;
}

json side_to_json(const SideInfo& side) {
  switch (side.kind) {
    case SideInfo::Kind::Scalar:
      return json{{"kind", "scalar"}, {"scalar", side.scalar}};
    case SideInfo::Kind::Inputs:
      return json{{"kind", "inputs"}, {"points", mat_to_json(side.points)}};
    case SideInfo::Kind::Datapoints:
      return json{{"kind", "datapoints"},
                  {"points", mat_to_json(side.points)},
                  {"outputs", vec_to_json(side.outputs)}};
  }
  throw std::logic_error("side_to_json: unknown side kind");
}

SideInfo side_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "scalar") return SideInfo::from_scalar(j.at("scalar").get<double>());
  if (kind == "inputs") return SideInfo::from_inputs(mat_from_json(j.at("points")));
  if (kind == "datapoints")
    return SideInfo::from_datapoints(mat_from_json(j.at("points")),
                                     vec_from_json(j.at("outputs")));
  throw std::invalid_argument("model file: unknown side kind " + kind);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("model file: cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("model file: cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

void save_model(const std::string& path, const SavedModel& model) {
  json j{{"format", "condmeta-model"},
         {"M", mat_to_json(model.params.M)},
         {"b", vec_to_json(model.params.b)},
         {"feature_map", feature_map_to_json(model.feature_map)}};
  write_json_file(path, j);
}

SavedModel load_model(const std::string& path) {
  const json j = read_json_file(path);
  if (j.value("format", "") != "condmeta-model")
    throw std::invalid_argument("model file: not a condmeta model: " + path);
  SavedModel model;
  model.params.M = mat_from_json(j.at("M"));
  model.params.b = vec_from_json(j.at("b"));
  model.feature_map = feature_map_from_json(j.at("feature_map"));
  if (model.params.M.rows() != model.params.b.size() ||
      model.params.M.cols() != model.feature_map.k)
    throw std::invalid_argument("model file: parameter shape mismatch");
  return model;
}

void save_kernel_model(const std::string& path, const KernelModel& model) {
  json j{{"format", "condmeta-kernel-model"},
         {"gamma", model.gamma},
         {"lambda", model.lambda},
         {"b", vec_to_json(model.b)},
         {"weights", model.weights}};
  if (model.kernel.kind == KernelFn::Kind::Gaussian) {
    j["kernel"] = json{{"kind", "gaussian"}, {"bandwidth", model.kernel.bandwidth}};
  } else {
    j["kernel"] = json{{"kind", "linear"},
                       {"features", feature_map_to_json(model.kernel.features)}};
  }
  json sides = json::array();
  json grads = json::array();
  for (const auto& s : model.sides) sides.push_back(side_to_json(s));
  for (const auto& g : model.grads) grads.push_back(vec_to_json(g));
  j["sides"] = sides;
  j["grads"] = grads;
  write_json_file(path, j);
}

KernelModel load_kernel_model(const std::string& path) {
  const json j = read_json_file(path);
  if (j.value("format", "") != "condmeta-kernel-model")
    throw std::invalid_argument("model file: not a condmeta kernel model: " + path);
  KernelModel model;
  model.gamma = j.at("gamma").get<double>();
  model.lambda = j.at("lambda").get<double>();
  model.b = vec_from_json(j.at("b"));
  model.weights = j.at("weights").get<std::vector<double>>();
  const json& k = j.at("kernel");
  if (k.at("kind") == "gaussian")
    model.kernel = KernelFn::gaussian(k.at("bandwidth").get<double>());
  else
    model.kernel = KernelFn::linear(feature_map_from_json(k.at("features")));
  for (const auto& s : j.at("sides")) model.sides.push_back(side_from_json(s));
  for (const auto& g : j.at("grads")) model.grads.push_back(vec_from_json(g));
  if (model.sides.size() != model.grads.size() ||
      model.sides.size() != model.weights.size())
    throw std::invalid_argument("model file: kernel history length mismatch");
  return model;
}

}  // namespace condmeta
