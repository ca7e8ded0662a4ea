// Copyright 2026 The cotune Authors
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

#include "cotune/configspace.hpp"
#include "cotune/cost.hpp"
#include "cotune/dataset.hpp"
#include "cotune/oracle.hpp"
#include "cotune/pipeline.hpp"
#include "cotune/rrs.hpp"
#include "cotune/surrogate.hpp"
#include "cotune/util.hpp"
