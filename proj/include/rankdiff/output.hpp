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

#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>

namespace rankdiff {

// 17 significant digits: round-trip exact for 64-bit floats.
std::string format_g17(double value);

std::string hex_digest(std::uint64_t value);

// Buffers everything in memory and renames a temporary into place on
// commit(); a file that fails validation mid-write never appears.
class AtomicFile {
public:
    explicit AtomicFile(std::filesystem::path final_path);
    ~AtomicFile();

    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;

    std::ostream& stream() { return buffer_; }
    void commit();

private:
    std::filesystem::path final_path_;
    std::ostringstream buffer_;
    bool committed_ = false;
};

// First line of every output file: config digest and seed for exact replay.
void write_replay_header(std::ostream& os, std::uint64_t digest,
                         std::uint64_t seed);

} // namespace rankdiff
