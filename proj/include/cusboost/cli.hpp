#pragma once

namespace cusboost {

// Entry point of the command-line tool. Exit codes: 0 success, 1 usage or
// configuration error, 2 data error, 3 training failure.
int cli_main(int argc, const char* const* argv);

} // namespace cusboost
