// Copyright 2026 The phrprobe Authors.
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

#ifndef PHRPROBE_SRC_LITTLE_ENDIAN_H_
#define PHRPROBE_SRC_LITTLE_ENDIAN_H_

#include <algorithm>
#include <array>
#include <bit>

namespace phrprobe::internal {

// Converts between host and little-endian byte order (an involution).
template <typename T>
T little_endian(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return value;
}

}  // namespace phrprobe::internal

#endif  // PHRPROBE_SRC_LITTLE_ENDIAN_H_
