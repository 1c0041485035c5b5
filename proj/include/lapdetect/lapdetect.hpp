//
// Copyright 2026 The lapdetect Authors
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
//

#ifndef LAPDETECT_LAPDETECT_HPP_
#define LAPDETECT_LAPDETECT_HPP_

#include "lapdetect/detector.hpp"
#include "lapdetect/divergence.hpp"
#include "lapdetect/io.hpp"
#include "lapdetect/laplace.hpp"
#include "lapdetect/mechanism.hpp"
#include "lapdetect/montecarlo.hpp"
#include "lapdetect/quadrature.hpp"
#include "lapdetect/rng.hpp"

#endif  // LAPDETECT_LAPDETECT_HPP_
