#pragma once

#include <string>

#include "semguide/denoiser.hpp"
#include "semguide/score_net.hpp"

namespace semguide {

/// Versioned JSON checkpoints. Parameter values round-trip bit-exactly;
/// loading validates layer shapes and the model_kind tag.
void save_denoiser(const std::string& path, const Denoiser& model);
Denoiser load_denoiser(const std::string& path);

void save_score_net(const std::string& path, const ScoreNet& model);
ScoreNet load_score_net(const std::string& path);

}  // namespace semguide
