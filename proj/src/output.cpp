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

#include "rankdiff/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rankdiff {

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string hex_digest(std::uint64_t value) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(value));
    return buf;
}

AtomicFile::AtomicFile(std::filesystem::path final_path)
    : final_path_(std::move(final_path)) {}

AtomicFile::~AtomicFile() = default;

void AtomicFile::commit() {
    if (committed_) return;
    std::filesystem::create_directories(final_path_.parent_path());
    std::filesystem::path tmp = final_path_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << buffer_.str();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path_);
    committed_ = true;
}

void write_replay_header(std::ostream& os, std::uint64_t digest,
                         std::uint64_t seed) {
    os << "# config=" << hex_digest(digest) << " seed=" << seed << "\n";
}

} // namespace rankdiff
