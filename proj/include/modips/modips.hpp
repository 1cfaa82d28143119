// Copyright 2026 The modips Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header.

#include "modips/budget.hpp"
#include "modips/dp_verifier.hpp"
#include "modips/error.hpp"
#include "modips/inference.hpp"
#include "modips/io.hpp"
#include "modips/mechanisms.hpp"
#include "modips/models.hpp"
#include "modips/random.hpp"
#include "modips/release.hpp"
#include "modips/simulation.hpp"
#include "modips/stats.hpp"
