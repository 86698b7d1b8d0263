// Copyright 2026 The polnli Authors
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

#include "polnli/analytic_signals.hpp"
#include "polnli/ellipse_fit.hpp"
#include "polnli/errors.hpp"
#include "polnli/estimation.hpp"
#include "polnli/figures.hpp"
#include "polnli/interferometer.hpp"
#include "polnli/io.hpp"
#include "polnli/least_squares.hpp"
#include "polnli/mode_algebra.hpp"
#include "polnli/optical_elements.hpp"
#include "polnli/scan_experiment.hpp"
#include "polnli/scan_schedule.hpp"
