#pragma once

namespace hybridnet {

/// Entry point behind the hybridnet binary. Returns 0 on success, 1 on I/O
/// failure, 2 on a usage error.
int cli_main(int argc, const char* const* argv);

}  // namespace hybridnet
