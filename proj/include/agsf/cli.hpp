#pragma once

namespace agsf {

// Entry point behind the agsf binary; factored out so tests can drive
// the command surface in-process. Exit codes: 0 success, 1 config or
// usage error, 2 when some filter diverged on every seed.
int cli_main(int argc, const char* const* argv);

}  // namespace agsf
