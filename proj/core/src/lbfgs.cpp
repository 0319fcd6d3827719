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
#include "uidscan/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "uidscan/error.hpp"

namespace uidscan {

namespace {

double dot(std::span<double const> a, std::span<double const> b)
{
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(std::span<double const> v)
{
  double m = 0.0;
  for (double x : v)
  {
    m = std::max(m, std::abs(x));
  }
  return m;
}

struct CurvaturePair
{
  std::vector<double> s;
  std::vector<double> y;
  double              rho;
};

// Two-loop recursion: returns -H * g.
std::vector<double> search_direction(std::deque<CurvaturePair> const &memory,
                                     std::span<double const>          g)
{
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(memory.size());
  for (std::size_t k = memory.size(); k-- > 0;)
  {
    auto const &p = memory[k];
    alpha[k]      = p.rho * dot(p.s, q);
    for (std::size_t i = 0; i < q.size(); ++i)
    {
      q[i] -= alpha[k] * p.y[i];
    }
  }
  if (!memory.empty())
  {
    auto const  &last  = memory.back();
    double const gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double &v : q)
    {
      v *= gamma;
    }
  }
  for (std::size_t k = 0; k < memory.size(); ++k)
  {
    auto const  &p    = memory[k];
    double const beta = p.rho * dot(p.y, q);
    for (std::size_t i = 0; i < q.size(); ++i)
    {
      q[i] += (alpha[k] - beta) * p.s[i];
    }
  }
  for (double &v : q)
  {
    v = -v;
  }
  return q;
}

}  // namespace

LbfgsResult minimize_lbfgs(Objective const &objective, std::vector<double> x0,
                           LbfgsOptions const &options)
{
  std::size_t const   n = x0.size();
  LbfgsResult         result;
  std::vector<double> g(n);
  double              f = objective(x0, g);
  if (!std::isfinite(f))
  {
    throw Error("objective is not finite at the starting point");
  }
  result.x = std::move(x0);
  result.history.push_back(f);

  std::deque<CurvaturePair> memory;
  std::vector<double>       x_new(n);
  std::vector<double>       g_new(n);

  while (true)
  {
    result.grad_norm = max_abs(g);
    if (result.grad_norm < options.gradient_tol)
    {
      result.converged = true;
      break;
    }
    if (result.iterations >= options.max_iterations)
    {
      break;
    }

    auto   d     = search_direction(memory, g);
    double slope = dot(g, d);
    if (!(slope < 0.0))
    {
      memory.clear();
      d     = search_direction(memory, g);
      slope = dot(g, d);
    }

    // Unit steps are well scaled once curvature is known; the very first step
    // is normalized instead.
    double step = memory.empty() ? std::min(1.0, 1.0 / std::sqrt(dot(g, g))) : 1.0;

    bool   accepted = false;
    double f_new    = f;
    for (std::size_t k = 0; k < options.max_backtracks; ++k)
    {
      for (std::size_t i = 0; i < n; ++i)
      {
        x_new[i] = result.x[i] + step * d[i];
      }
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + options.armijo_c1 * step * slope && f_new < f)
      {
        accepted = true;
        break;
      }
      step *= options.backtrack;
    }

    if (!accepted)
    {
      if (!memory.empty())
      {
        memory.clear();
        continue;
      }
      // No decrease available along steepest descent at working precision.
      break;
    }

    CurvaturePair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i)
    {
      pair.s[i] = x_new[i] - result.x[i];
      pair.y[i] = g_new[i] - g[i];
    }
    double const sy = dot(pair.s, pair.y);
    if (sy > 1e-12 * std::sqrt(dot(pair.s, pair.s) * dot(pair.y, pair.y)))
    {
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (memory.size() > options.history)
      {
        memory.pop_front();
      }
    }

    std::swap(result.x, x_new);
    std::swap(g, g_new);
    f = f_new;
    ++result.iterations;
    result.history.push_back(f);
  }

  result.value = f;
  return result;
}

}  // namespace uidscan
