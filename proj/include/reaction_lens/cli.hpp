#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace reaction_lens {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitFormat = 4;
inline constexpr int kExitDegenerate = 5;

// Runs `reaction-lens <command> [flags]`. `args` excludes the program name.
// `in` feeds `predict` when no --input is given; `out` receives command output
// not sent to a file, `err` diagnostics.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace reaction_lens
