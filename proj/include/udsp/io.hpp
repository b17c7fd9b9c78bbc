#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "udsp/kernels.hpp"
#include "udsp/signals.hpp"

namespace udsp {

inline constexpr const char *kVersion = "0.1.0";

// Shortest form with 17 significant digits, '.' decimal regardless of locale.
[[nodiscard]] auto format_double(double v) -> std::string;

// Writes to a sibling temporary file, then renames over the target.
void atomic_write(const std::filesystem::path &path, const std::string &content);

[[nodiscard]] auto samples_csv(const SampledSignal &x) -> std::string;
[[nodiscard]] auto kernel_csv(const Kernel &k) -> std::string;

void write_csv(const std::filesystem::path &path, const SampledSignal &x);
void write_csv(const std::filesystem::path &path, const Kernel &k);
void write_json(const std::filesystem::path &path, const nlohmann::json &j);

[[nodiscard]] auto read_text(const std::filesystem::path &path) -> std::string;
[[nodiscard]] auto read_json(const std::filesystem::path &path) -> nlohmann::json;
[[nodiscard]] auto read_signal(const std::filesystem::path &path) -> SymbolicSignal;
// CSV with header t,re,im on a uniform grid.
[[nodiscard]] auto read_sampled_csv(const std::filesystem::path &path) -> SampledSignal;

} // namespace udsp
