#pragma once

#include "qwork/config.hpp"

namespace qwork {

// Exit statuses shared with the CLI front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitNoConvergedPoint = 4;

int cmd_optimize(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_rapid_drive(const RunConfig& config);
int cmd_validate(const RunConfig& config);

}  // namespace qwork
