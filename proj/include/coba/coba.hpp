// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "coba/allocator.hpp"
#include "coba/errors.hpp"
#include "coba/pass_rate.hpp"
#include "coba/passrate_store.hpp"
#include "coba/rng.hpp"
#include "coba/sim_io.hpp"
#include "coba/simulator.hpp"
#include "coba/value_core.hpp"
