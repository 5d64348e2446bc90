// Copyright 2026 The sphere_langevin Authors
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

#include "sphere_langevin/brownian.hpp"
#include "sphere_langevin/errors.hpp"
#include "sphere_langevin/geometry.hpp"
#include "sphere_langevin/langevin.hpp"
#include "sphere_langevin/maxcut.hpp"
#include "sphere_langevin/random.hpp"
#include "sphere_langevin/theory.hpp"
#include "sphere_langevin/validation.hpp"
#include "sphere_langevin/wright_fisher.hpp"
