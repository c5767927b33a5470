#pragma once

#include <filesystem>
#include <iosfwd>

#include "config.hpp"
#include "pairdeg/types.hpp"

namespace pairdeg::cli {

struct CommandContext {
    RunConfig config;
    std::filesystem::path out_dir;
    int threads = 1;
    OutputMeta meta;
    std::ostream* log = nullptr;
};

/// Each command writes its files under out_dir and returns the exit code.
/// Numeric failures propagate as NumericFailure.
int cmd_atlas(const CommandContext& ctx);
int cmd_sweep(const CommandContext& ctx);
int cmd_encircle(const CommandContext& ctx);
int cmd_cut(const CommandContext& ctx);
int cmd_selftest(const CommandContext& ctx);

}  // namespace pairdeg::cli
