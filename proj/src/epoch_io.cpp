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

#include "brainrel/epoch_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include "brainrel/error.hpp"
#include "brainrel/io.hpp"

namespace brainrel::eeg {

namespace {

constexpr char kMagic[8] = {'B', 'R', 'E', 'P', 'O', 'C', 'H', '1'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "epoch files assume a little-endian host");

class Writer {
public:
    template <typename T>
    void put(T v) {
        char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        out_.append(buf, sizeof(T));
    }
    void put_str(const std::string& s) {
        put(static_cast<std::uint32_t>(s.size()));
        out_.append(s);
    }
    void raw(const char* p, std::size_t n) { out_.append(p, n); }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    Reader(const std::string& bytes, const std::string& source) : b_(bytes), source_(source) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, b_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::string get_str() {
        const auto n = get<std::uint32_t>();
        need(n);
        std::string s = b_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    void raw(char* dst, std::size_t n) {
        need(n);
        std::memcpy(dst, b_.data() + pos_, n);
        pos_ += n;
    }
    bool done() const { return pos_ == b_.size(); }
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(source_ + ": " + what + " at byte " + std::to_string(pos_));
    }

private:
    void need(std::size_t n) const {
        if (b_.size() - pos_ < n) fail("truncated epoch file");
    }
    const std::string& b_;
    std::string source_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string encode_epochs(const EpochSet& set) {
    Writer w;
    w.raw(kMagic, sizeof(kMagic));
    w.put(kVersion);
    w.put_str(set.participant);
    w.put(set.fs);
    w.put(static_cast<std::uint32_t>(set.channels.size()));
    for (const auto& c : set.channels) w.put_str(c);
    const std::size_t s = set.epochs.empty() ? epoch_samples(set.fs) : set.epochs.front().n_samples;
    w.put(static_cast<std::uint32_t>(s));
    w.put(static_cast<std::uint64_t>(set.epochs.size()));
    std::vector<float> buf;
    for (const auto& e : set.epochs) {
        if (e.n_channels != set.channels.size() || e.n_samples != s || e.data.size() != e.n_channels * s) {
            throw Error("write_epochs: epoch shape does not match the header");
        }
        w.put(static_cast<std::int32_t>(e.block));
        w.put(static_cast<std::uint8_t>(e.label));
        w.put_str(e.word);
        buf.assign(e.data.begin(), e.data.end());
        w.raw(reinterpret_cast<const char*>(buf.data()), buf.size() * sizeof(float));
    }
    return w.take();
}

EpochSet decode_epochs(const std::string& bytes, const std::string& source) {
    Reader r(bytes, source);
    char magic[8];
    r.raw(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) r.fail("bad magic, not an epoch file");
    if (r.get<std::uint32_t>() != kVersion) r.fail("unsupported epoch file version");
    EpochSet set;
    set.participant = r.get_str();
    set.fs = r.get<double>();
    const auto m = r.get<std::uint32_t>();
    for (std::uint32_t c = 0; c < m; ++c) set.channels.push_back(r.get_str());
    const auto s = r.get<std::uint32_t>();
    const auto n = r.get<std::uint64_t>();
    std::vector<float> buf(static_cast<std::size_t>(m) * s);
    for (std::uint64_t k = 0; k < n; ++k) {
        Epoch e;
        e.n_channels = m;
        e.n_samples = s;
        e.block = r.get<std::int32_t>();
        const auto lab = r.get<std::uint8_t>();
        if (lab > 2) r.fail("bad label code in record " + std::to_string(k));
        e.label = static_cast<Label>(lab);
        e.word = r.get_str();
        r.raw(reinterpret_cast<char*>(buf.data()), buf.size() * sizeof(float));
        e.data.assign(buf.begin(), buf.end());
        set.epochs.push_back(std::move(e));
    }
    if (!r.done()) r.fail("trailing bytes after last record");
    return set;
}

void write_epochs(const std::filesystem::path& path, const EpochSet& set) {
    io::write_file_atomic(path, encode_epochs(set));
}

EpochSet read_epochs(const std::filesystem::path& path) {
    return decode_epochs(io::read_file(path), path.string());
}

}  // namespace brainrel::eeg
