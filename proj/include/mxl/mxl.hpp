// SPDX-License-Identifier: Apache-2.0
//
// mxl-mac: matrix exponential learning for the Gaussian vector MAC
// Copyright (C) 2026 The mxl-mac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MXL_MXL_HPP
#define MXL_MXL_HPP

#include "mxl/estimation.hpp"
#include "mxl/hermitian.hpp"
#include "mxl/learners.hpp"
#include "mxl/metrics.hpp"
#include "mxl/mimo_model.hpp"
#include "mxl/oracle.hpp"
#include "mxl/plots.hpp"
#include "mxl/random.hpp"
#include "mxl/scenario.hpp"
#include "mxl/simulation.hpp"
#include "mxl/trace.hpp"
#include "mxl/waterfilling.hpp"

#endif  // MXL_MXL_HPP
