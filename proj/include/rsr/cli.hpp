#pragma once

namespace rsr {

/// Entry point of the `rsr` tool. Exit codes: 0 success, 1 bad arguments or
/// configuration, 2 unreadable or unwritable files, 3 internal consistency failure.
int run(int argc, const char* const* argv);

} // namespace rsr
