#pragma once

#include <string>
#include <vector>

namespace policybound {

// Parse and run one CLI invocation (program name excluded). Returns the
// process exit code: 0 success, 1 usage error, 2 data or validation
// error. All file outputs are deterministic given inputs and seeds.
// A --config FILE argument anywhere pulls defaults from a flat key=value
// file whose keys mirror the subcommand's long flags; explicit flags win.
int dispatch(const std::vector<std::string>& raw_args);

// Worker count actually used: `requested` (0 = hardware concurrency)
// capped by the POLICYBOUND_THREADS environment variable, never below 1.
int resolve_workers(int requested);

}  // namespace policybound
