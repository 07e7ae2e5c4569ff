#pragma once

// The four command-line workflows. Each returns a process exit code and
// writes its tables into `out`, which is created when missing.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include "wgqed/fit.hpp"
#include "wgqed/reconstruct.hpp"

namespace wgqed::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kDataError = 3,
  kSpanError = 4,
  kNotConverged = 5,
};

/// Runs `body`, reporting any exception on `err` and mapping it to an exit code.
int guarded(const std::function<int()>& body, std::ostream& err);
int exit_code_for(const std::exception& e);

int cmd_simulate(const std::filesystem::path& config, std::uint64_t seed, const std::filesystem::path& out,
                 std::ostream& log);
int cmd_fit(const std::filesystem::path& data, const std::filesystem::path& config, const std::filesystem::path& out,
            std::ostream& log);
int cmd_reconstruct(const std::filesystem::path& data, const std::filesystem::path& params,
                    const std::filesystem::path& out, std::ostream& log,
                    reconstruct::Combination combination = reconstruct::Combination::exact);
int cmd_predict(const std::filesystem::path& config, const std::string& toggles, const std::filesystem::path& out,
                std::ostream& log);

/// Parameter file written by `fit` (and by `simulate` for the truth).
void write_params(const std::filesystem::path& path, const fit::FitResult& result);
fit::ModelParams read_params(const std::filesystem::path& path);

}  // namespace wgqed::cli
