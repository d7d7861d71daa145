/*
   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstddef>
#include <functional>

namespace rankdiff {

// Runs body(i) for i = 0..count-1 on up to `workers` threads.  Work items
// must write only to their own output slots; the schedule is then free to
// vary without changing results.  The first exception thrown by any item
// is rethrown on the calling thread after all threads join.
void parallel_for_index(std::size_t count, int workers,
                        const std::function<void(std::size_t)>& body);

} // namespace rankdiff
