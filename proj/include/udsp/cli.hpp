#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace udsp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitDivergence = 2;

// args excludes the program name. Results that are not written to a file go
// to `out`; diagnostics and usage go to `err`.
[[nodiscard]] auto run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    -> int;
[[nodiscard]] auto run(int argc, char **argv) -> int;

} // namespace udsp::cli
