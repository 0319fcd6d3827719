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
#include "uidscan/matrix.hpp"

#include <algorithm>
#include <string>

#include "uidscan/error.hpp"

namespace uidscan {

Matrix Matrix::from_rows(std::vector<std::vector<double>> const &rows)
{
  if (rows.empty())
  {
    return {};
  }
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
  {
    if (rows[r].size() != m.cols())
    {
      throw DimensionError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                           " columns, expected " + std::to_string(m.cols()));
    }
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

}  // namespace uidscan
