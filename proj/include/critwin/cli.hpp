// cli.hpp -- command-line entry point.  Maps subcommands onto the library
// modules, embeds the run configuration in every output file, and keeps all
// data on stdout (or the --out file) with diagnostics on stderr.

#pragma once

namespace critwin {
namespace cli {

// Runs the tool: exit 0 on success, 1 on computation failure, 2 on usage
// error.  argv follows main() conventions.
int run(int argc, const char* const* argv);

}  // namespace cli
}  // namespace critwin
