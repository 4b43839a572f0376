#ifndef CONDMETA_MODEL_IO_HPP
#define CONDMETA_MODEL_IO_HPP

#include <string>

#include "condmeta/core.hpp"
#include "condmeta/features.hpp"
#include "condmeta/kernels.hpp"

namespace condmeta {

/// Explicit model: conditioning parameters plus the feature map they were
/// trained with.  Stored as JSON text; doubles round-trip exactly.
struct SavedModel {
  ConditioningParams params;
  FeatureMap feature_map;
};

void save_model(const std::string& path, const SavedModel& model);
SavedModel load_model(const std::string& path);

void save_kernel_model(const std::string& path, const KernelModel& model);
KernelModel load_kernel_model(const std::string& path);

}  // namespace condmeta

#endif
