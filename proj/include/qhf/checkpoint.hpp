#pragma once

#include <map>
#include <string>

#include "qhf/tensor.hpp"

namespace qhf {

/// Self-describing binary state container: magic + version header, layout
/// block, per-site tensor blocks as little-endian IEEE-754 doubles with
/// interleaved re/im, then a key=value manifest of run/policy settings.
void save_state(const std::string& path, const TensorTrainState& state,
                const std::map<std::string, std::string>& manifest);

TensorTrainState load_state(const std::string& path, std::map<std::string, std::string>* manifest);

}  // namespace qhf
