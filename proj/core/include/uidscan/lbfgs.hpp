//------------------------------------------------------------------------------
//
//   Copyright 2026 The uidscan Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace uidscan {

/// Writes the gradient into the second argument and returns the objective value.
using Objective = std::function<double(std::span<double const>, std::span<double>)>;

struct LbfgsOptions
{
  std::size_t max_iterations = 10000;
  double      gradient_tol   = 1e-6;  // stop when max |g_i| falls below this
  std::size_t history        = 10;
  double      armijo_c1      = 1e-4;
  double      backtrack      = 0.5;
  std::size_t max_backtracks = 60;
};

struct LbfgsResult
{
  std::vector<double> x;
  double              value      = 0.0;
  double              grad_norm  = 0.0;  // max-abs norm at x
  std::size_t         iterations = 0;
  bool                converged  = false;
  std::vector<double> history;  // objective at x0 and after every accepted step
};

/// Limited-memory BFGS with a backtracking Armijo line search. Every accepted
/// step strictly decreases the objective, so `history` is non-increasing. When
/// the quasi-Newton direction is not a descent direction the memory is dropped
/// and the step falls back to steepest descent. Deterministic.
LbfgsResult minimize_lbfgs(Objective const &objective, std::vector<double> x0,
                           LbfgsOptions const &options = {});

}  // namespace uidscan
