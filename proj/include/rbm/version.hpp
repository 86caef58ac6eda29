#pragma once

namespace rbm {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "rbmkpz-report/1";

}  // namespace rbm
