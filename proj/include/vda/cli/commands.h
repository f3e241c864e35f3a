#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "vda/cli/run_config.h"

namespace vda::cli {

// Every command reads its settings from the resolved config, writes its
// artifacts under run.out and persists <command>.resolved.ini there.
// Problems with user input surface as UserError or std::invalid_argument.

// <out>/wav/*.wav and <out>/manifest.csv.
void cmd_gen_data(const RunConfig& cfg, std::ostream& log);
// <out>/components.wav (original then components) and <out>/bands.json.
void cmd_decompose(const RunConfig& cfg, std::ostream& log);
// <out>/checkpoint.bin and <out>/train_log.csv.
void cmd_train(const RunConfig& cfg, std::ostream& log);
// <out>/frames.csv and, for dual models, <out>/sequences.csv.
void cmd_embed(const RunConfig& cfg, std::ostream& log);
// <out>/eval.json; also returned.
nlohmann::json cmd_eval(const RunConfig& cfg, std::ostream& log);
// <out>/traversal.csv.
void cmd_traverse(const RunConfig& cfg, std::ostream& log);
// <out>/pca_<factor>.svg and/or <out>/loss_curves.svg.
void cmd_plot(const RunConfig& cfg, std::ostream& log);

// Parses arguments (without the program name) and dispatches. Returns 0 on
// success, 1 for user errors and 2 for internal failures; messages go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vda::cli
