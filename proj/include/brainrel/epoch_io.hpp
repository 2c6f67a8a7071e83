// Copyright 2026 The brainrel Authors
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

#include <filesystem>
#include <string>
#include <vector>

#include "brainrel/eeg.hpp"

namespace brainrel::eeg {

struct EpochSet {
    std::string participant;
    double fs = 0.0;
    std::vector<std::string> channels;
    std::vector<Epoch> epochs;
};

// Binary epoch container, all integers and floats little-endian:
//
//   char[8]  magic "BREPOCH1"
//   u32      version (1)
//   str      participant id        (str = u32 byte length + UTF-8 bytes)
//   f64      sampling rate, Hz
//   u32      channel count m, then m × str channel names
//   u32      samples per epoch s
//   u64      epoch count n
//   n × { i32 block, u8 label (0 irrelevant, 1 relevant, 2 unlabeled),
//         str word, f32[m*s] µV row-major (channel × sample) }
//
// Payloads are stored as float32; a write/read/write cycle is bit-exact.
void write_epochs(const std::filesystem::path& path, const EpochSet& set);
EpochSet read_epochs(const std::filesystem::path& path);

std::string encode_epochs(const EpochSet& set);
EpochSet decode_epochs(const std::string& bytes, const std::string& source = "<memory>");

}  // namespace brainrel::eeg
