#pragma once

namespace bihartree {

/// Command-line entry point. Returns 0 on success, 2 for usage errors and
/// 1 for runtime failures.
int cli_main(int argc, char** argv);

}  // namespace bihartree
