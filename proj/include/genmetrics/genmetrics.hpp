// Copyright 2026 The genmetrics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include "genmetrics/conditional.hpp"
#include "genmetrics/csv.hpp"
#include "genmetrics/embeddings.hpp"
#include "genmetrics/error.hpp"
#include "genmetrics/fidelity.hpp"
#include "genmetrics/gaussian.hpp"
#include "genmetrics/image.hpp"
#include "genmetrics/kid.hpp"
#include "genmetrics/leaderboard.hpp"
#include "genmetrics/manifest.hpp"
#include "genmetrics/parallel.hpp"
#include "genmetrics/prdc.hpp"
#include "genmetrics/privacy.hpp"
#include "genmetrics/random.hpp"
#include "genmetrics/report.hpp"
#include "genmetrics/summation.hpp"
