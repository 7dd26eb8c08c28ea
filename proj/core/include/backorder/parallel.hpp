/*
 * Copyright 2026 The Backorder Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BACKORDER_PARALLEL_HPP_
#define BACKORDER_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace backorder {

// 0 means "all hardware threads".
std::size_t resolve_threads(std::size_t requested);

// Runs task(i) for i in [0, n) on up to `threads` workers. Tasks must write to
// disjoint output slots. If any task throws, the exception of the lowest
// failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& task);

}  // namespace backorder

#endif  // BACKORDER_PARALLEL_HPP_
