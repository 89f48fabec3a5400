// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "run_config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace fscs::cli
{

enum ExitCode
{
    exit_ok = 0,
    exit_internal = 1,
    exit_config = 2,
    exit_dataset = 3,
    exit_all_failed = 4,
};

/// Maps an error code to the process exit code.
int exit_code_for(ErrorCode code);

int cmd_sample(const RunConfig& config, std::ostream& out);
int cmd_run(const RunConfig& config, std::ostream& out);
int cmd_render(const RunConfig& config, const std::string& episode_id, std::ostream& out);
/// Reads transcripts from `transcripts_dir`, or `<output>/transcripts` when empty.
int cmd_eval(const RunConfig& config, const std::filesystem::path& transcripts_dir, std::ostream& out);

} // namespace fscs::cli
