#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "oven/harmonic.hpp"
#include "oven/modes.hpp"
#include "oven/orchestrator.hpp"
#include "oven/spectrum.hpp"
#include "oven/thermal.hpp"

namespace oven {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = kFnvOffset);
std::uint64_t fnv1a64(const std::string& text);

// First line of every output file.
std::string output_header(std::uint64_t config_hash);

void write_modes_csv(const std::filesystem::path& path, const std::vector<TmMode>& modes,
                     std::uint64_t hash);
std::string modes_csv(const std::vector<TmMode>& modes, std::uint64_t hash);

void write_spectrum_csv(const std::filesystem::path& path, const std::vector<SpectrumPoint>& s,
                        std::uint64_t hash);
void write_peaks_csv(const std::filesystem::path& path, const std::vector<Peak>& peaks,
                     std::uint64_t hash);

// t_s, target_K, measured_K, power_W, then the load statistics.
void write_run_summary(const std::filesystem::path& path, const std::vector<SeriesRow>& rows,
                       std::uint64_t hash);

void write_snapshot_csv(const std::filesystem::path& path, const ThermalModel& model,
                        const ThermalState& state, std::uint64_t hash);
void write_snapshot_vtk(const std::filesystem::path& path, const ThermalModel& model,
                        const ThermalState& state, std::uint64_t hash);

// Load cells only for the CSV; the VTK file covers the whole EM grid.
void write_power_csv(const std::filesystem::path& path, const PowerMap& map,
                     const std::vector<std::uint8_t>& load_mask, std::uint64_t hash);
void write_power_vtk(const std::filesystem::path& path, const PowerMap& map, std::uint64_t hash);
void write_voxel_vtk(const std::filesystem::path& path, const VoxelModel& model, std::uint64_t hash);

// File name stem for a snapshot at time t, e.g. snapshot_005.000.
std::string snapshot_stem(double t);

}  // namespace oven
