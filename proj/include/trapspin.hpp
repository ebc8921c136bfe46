// Copyright 2026 The trapspin Authors
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

#include "trapspin/analysis.hpp"
#include "trapspin/config.hpp"
#include "trapspin/couplings.hpp"
#include "trapspin/crystal.hpp"
#include "trapspin/errors.hpp"
#include "trapspin/fullsim.hpp"
#include "trapspin/linalg.hpp"
#include "trapspin/modes.hpp"
#include "trapspin/rng.hpp"
#include "trapspin/serialize.hpp"
#include "trapspin/spinsim.hpp"
#include "trapspin/types.hpp"
