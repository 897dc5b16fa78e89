#pragma once

#include <filesystem>

#include "winpred/ensemble.hpp"

namespace winpred {

inline constexpr int kModelFormatVersion = 1;

// Versioned JSON with every fitted table and parameter; doubles round-trip
// exactly.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace winpred
