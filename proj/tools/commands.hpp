#pragma once

#include <CLI11.hpp>

namespace qscope::cli {

// Registers `topics fit|report|questions|ngrams` under `app`.
void add_topics_command(CLI::App& app, const std::uint64_t& seed);

}  // namespace qscope::cli
