#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace clothtrack::cli {

// Exit codes: 0 success, 1 validation error, 2 numerical failure.
int run(int argc, const char* const* argv);

int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out_dir,
                 std::optional<uint64_t> seed_override);
int cmd_track(const std::filesystem::path& config, const std::filesystem::path& measurements,
              const std::filesystem::path& forces, const std::string& model,
              const std::string& force_mode, const std::filesystem::path& out_dir);
int cmd_tune(const std::filesystem::path& config, const std::filesystem::path& reference,
             const std::filesystem::path& forces, const std::filesystem::path& out_dir);
int cmd_report(const std::filesystem::path& predicted, const std::filesystem::path& measurements,
               const std::filesystem::path& out_dir);

}  // namespace clothtrack::cli
