//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string_view>

namespace motifdiff {

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr std::string_view kEncodedFormat = "motifdiff-encoded v1";
inline constexpr std::string_view kTrajectoryFormat = "motifdiff-trajectory v1";
inline constexpr std::string_view kMarginalsFormat = "motifdiff-marginals v1";

}  // namespace motifdiff
