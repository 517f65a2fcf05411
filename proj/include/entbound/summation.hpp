#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The entbound Authors
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

#include <cmath>

namespace entbound {

/// Neumaier's variant of Kahan summation. Terms must be added in a fixed order
/// for results to be reproducible.
template <typename T = double>
class CompensatedSum
{
public:
  void add(T x) noexcept
  {
    T const t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
    {
      comp_ += (sum_ - t) + x;
    }
    else
    {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum &operator+=(T x) noexcept
  {
    add(x);
    return *this;
  }

  T value() const noexcept
  {
    return sum_ + comp_;
  }

private:
  T sum_{0};
  T comp_{0};
};

}  // namespace entbound
