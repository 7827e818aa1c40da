// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#include "percor/opcount.hpp"

namespace percor::num::detail {

thread_local OpCounter* active = nullptr;

}  // namespace percor::num::detail
