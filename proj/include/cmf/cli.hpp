#pragma once

#include <iosfwd>

namespace cmf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `cmf` tool. Subcommands follow the design workflow:
/// lint, recommend, render, catalog list, serve.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cmf
