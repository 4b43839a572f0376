#include "condmeta/core.hpp"

#include <cmath>

namespace condmeta {

Dataset::Dataset(Mat x, Vec y) : inputs(std::move(x)), outputs(std::move(y)) {
  if (inputs.rows() != outputs.size())
    throw std::invalid_argument("Dataset: inputs and outputs length mismatch");
  if (inputs.rows() > 0 && inputs.cols() < 1)
    throw std::invalid_argument("Dataset: input dimension must be >= 1");
}

double Dataset::input_radius() const {
  double r = 0.0;
  for (int i = 0; i < n(); ++i) r = std::max(r, inputs.row(i).norm());
  return r;
}

Dataset Dataset::slice(int begin, int count) const {
  if (begin < 0 || count < 0 || begin + count > n())
    throw std::invalid_argument("Dataset::slice: range out of bounds");
  return Dataset(inputs.middleRows(begin, count), outputs.segment(begin, count));
}

Loss Loss::squared(double lipschitz_bound) {
  if (!(lipschitz_bound > 0))
    throw std::invalid_argument("Loss::squared: lipschitz bound must be > 0");
  return Loss{LossKind::Squared, lipschitz_bound};
}

double Loss::value(double pred, double y) const {
  const double r = pred - y;
  return kind == LossKind::Absolute ? std::abs(r) : 0.5 * r * r;
}

double Loss::subgradient(double pred, double y) const {
  const double r = pred - y;
  if (kind == LossKind::Squared) return r;
  if (r > 0) return 1.0;
  if (r < 0) return -1.0;
  return 0.0;
}

SideInfo SideInfo::from_scalar(double s) {
  SideInfo side;
  side.kind = Kind::Scalar;
  side.scalar = s;
  return side;
}

SideInfo SideInfo::from_inputs(Mat x) {
  if (x.rows() == 0)
    throw std::invalid_argument("SideInfo: input collection must be non-empty");
  SideInfo side;
  side.kind = Kind::Inputs;
  side.points = std::move(x);
  return side;
}

SideInfo SideInfo::from_datapoints(Mat x, Vec y) {
  if (x.rows() == 0)
    throw std::invalid_argument("SideInfo: datapoint collection must be non-empty");
  if (x.rows() != y.size())
    throw std::invalid_argument("SideInfo: datapoint collection length mismatch");
  SideInfo side;
  side.kind = Kind::Datapoints;
  side.points = std::move(x);
  side.outputs = std::move(y);
  return side;
}

ConditioningParams ConditioningParams::zeros(int d, int k) {
  if (d < 1 || k < 0)
    throw std::invalid_argument("ConditioningParams: need d >= 1, k >= 0");
  return ConditioningParams{Mat::Zero(d, k), Vec::Zero(d)};
}

Vec apply_tau(const ConditioningParams& params, const Vec& phi_s) {
  if (phi_s.size() != params.M.cols())
    throw std::invalid_argument("apply_tau: feature vector length != k");
  return params.M * phi_s + params.b;
}

double loss_eval(const Loss& loss, const Vec& w, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("loss_eval: empty dataset");
  if (w.size() != data.dim())
    throw std::invalid_argument("loss_eval: weight dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < data.n(); ++i)
    acc += loss.value(data.inputs.row(i).dot(w), data.outputs[i]);
  return acc / data.n();
}

}  // namespace condmeta
