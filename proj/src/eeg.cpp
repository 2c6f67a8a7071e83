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

#include "brainrel/eeg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "brainrel/error.hpp"
#include "brainrel/kernels.hpp"
#include "brainrel/stats.hpp"

namespace brainrel::eeg {

const char* label_name(Label l) {
    switch (l) {
        case Label::irrelevant:
            return "irrelevant";
        case Label::relevant:
            return "relevant";
        case Label::unlabeled:
            return "unlabeled";
    }
    return "unknown";
}

void Recording::validate() const {
    if (!(fs > 0.0)) throw Error("recording: sampling rate must be positive");
    if (traces.size() != channels.size()) throw Error("recording: channel names and traces differ in count");
    if (traces.empty()) throw Error("recording: no channels");
    const std::size_t n = traces.front().size();
    for (std::size_t c = 0; c < traces.size(); ++c) {
        if (traces[c].size() != n) throw Error("recording: trace '" + channels[c] + "' has a different length");
    }
    for (const auto& e : events) {
        if (e.sample >= n) throw Error("recording: event '" + e.word + "' outside the trace");
    }
}

std::size_t epoch_samples(double fs) {
    return static_cast<std::size_t>(std::lround((kEpochEndMs - kEpochStartMs) * fs / 1000.0));
}

std::size_t prestimulus_samples(double fs) {
    return static_cast<std::size_t>(std::lround(-kEpochStartMs * fs / 1000.0));
}

// ---------------------------------------------------------------------------

std::vector<double> design_lowpass(double fs, double cutoff_hz, std::size_t order) {
    if (order == 0 || order % 2 != 0) throw Error("FIR order must be even and positive");
    if (!(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0)) throw Error("FIR cutoff outside (0, fs/2)");
    const std::size_t n = order + 1;
    const double fc = cutoff_hz / fs;
    const double half = static_cast<double>(order) / 2.0;
    std::vector<double> h(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = static_cast<double>(k) - half;
        const double sinc = x == 0.0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * x) / (std::numbers::pi * x);
        const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(order));
        h[k] = sinc * w;
    }
    double s = 0.0;
    for (double v : h) s += v;
    for (double& v : h) v /= s;
    return h;
}

std::vector<double> design_highpass(double fs, double cutoff_hz, std::size_t order) {
    auto h = design_lowpass(fs, cutoff_hz, order);
    for (double& v : h) v = -v;
    h[order / 2] += 1.0;
    return h;
}

std::size_t lowpass_order(double fs) {
    auto o = static_cast<std::size_t>(std::ceil(100.0 * fs / 200.0));
    return o + (o % 2);
}

std::size_t highpass_order(double fs, double cutoff_hz) {
    auto o = static_cast<std::size_t>(std::ceil(3.3 * fs / cutoff_hz));
    return o + (o % 2);
}

namespace {

// Odd reflection about each edge; beyond one signal length the edge value repeats.
std::vector<double> odd_extend(std::span<const double> x, std::size_t pad) {
    const std::size_t n = x.size();
    std::vector<double> ext(n + 2 * pad);
    for (std::size_t k = 1; k <= pad; ++k) {
        const std::size_t li = std::min(k, n - 1);
        const std::size_t ri = n - 1 - std::min(k, n - 1);
        ext[pad - k] = 2.0 * x[0] - x[li];
        ext[pad + n - 1 + k] = 2.0 * x[n - 1] - x[ri];
    }
    std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
    return ext;
}

std::vector<double> zero_phase_pass(std::span<const double> x, std::span<const double> taps) {
    const std::size_t half = (taps.size() - 1) / 2;
    const auto ext = odd_extend(x, half);
    std::vector<double> y(x.size());
    kernels::correlate_valid(ext, taps, y);
    return y;
}

}  // namespace

std::vector<double> filtfilt(std::span<const double> x, std::span<const double> taps) {
    if (taps.size() % 2 != 1) throw Error("filtfilt: symmetric filter needs an odd tap count");
    if (x.size() < 2) return {x.begin(), x.end()};
    // A centred symmetric FIR is already zero phase; two passes give the
    // squared magnitude response of forward-backward filtering.
    auto once = zero_phase_pass(x, taps);
    return zero_phase_pass(once, taps);
}

Recording filter(const Recording& rec, const FilterDesign& design) {
    rec.validate();
    if (rec.fs < 80.0) throw Error("filter: sampling rate " + std::to_string(rec.fs) + " Hz is below 80 Hz");
    if (!(rec.fs > 2.0 * design.lowpass_hz)) throw Error("filter: sampling rate too low for the low-pass cutoff");
    const auto lp = design_lowpass(rec.fs, design.lowpass_hz, lowpass_order(rec.fs));
    const auto hp = design_highpass(rec.fs, design.highpass_hz, highpass_order(rec.fs, design.highpass_hz));
    Recording out = rec;
    for (auto& trace : out.traces) trace = filtfilt(filtfilt(trace, lp), hp);
    return out;
}

// ---------------------------------------------------------------------------

void baseline_correct(Epoch& epoch, std::size_t prestimulus) {
    if (prestimulus == 0 || prestimulus > epoch.n_samples) throw Error("baseline: bad pre-stimulus length");
    for (std::size_t c = 0; c < epoch.n_channels; ++c) {
        auto ch = epoch.channel(c);
        const double m = kernels::mean(ch.first(prestimulus));
        for (double& v : ch) v -= m;
    }
}

CutResult cut_epochs(const Recording& rec) {
    rec.validate();
    const std::size_t pre = prestimulus_samples(rec.fs);
    const std::size_t len = epoch_samples(rec.fs);
    const std::size_t total = rec.length();
    CutResult res;
    for (const auto& e : rec.events) {
        if (e.kind == StimulusKind::separator) continue;
        if (e.sample < pre || e.sample - pre + len > total) {
            res.warnings.push_back("event '" + e.word + "' at sample " + std::to_string(e.sample) +
                                   " (block " + std::to_string(e.block) + ") lacks a full epoch; skipped");
            continue;
        }
        Epoch ep;
        ep.n_channels = rec.traces.size();
        ep.n_samples = len;
        ep.data.resize(ep.n_channels * len);
        ep.word = e.word;
        ep.block = e.block;
        ep.label = e.label;
        const std::size_t start = e.sample - pre;
        for (std::size_t c = 0; c < ep.n_channels; ++c) {
            std::copy_n(rec.traces[c].begin() + static_cast<std::ptrdiff_t>(start), len,
                        ep.data.begin() + static_cast<std::ptrdiff_t>(c * len));
        }
        baseline_correct(ep, pre);
        res.epochs.push_back(std::move(ep));
    }
    return res;
}

bool channel_invalid(std::span<const double> trace, const RejectionCriteria& criteria) {
    if (kernels::variance(trace) < criteria.min_variance) return true;
    const auto r = kernels::min_max(trace);
    return r.hi - r.lo > criteria.max_peak_to_peak;
}

RejectionResult reject_artifacts(std::span<const Epoch> epochs, const RejectionCriteria& criteria) {
    RejectionResult res;
    auto& rep = res.report;
    rep.epochs_in = epochs.size();
    if (epochs.empty()) return res;
    const std::size_t m = epochs.front().n_channels;
    for (const auto& e : epochs) {
        if (e.n_channels != m || e.n_samples != epochs.front().n_samples) {
            throw Error("reject_artifacts: epochs differ in shape");
        }
    }
    rep.channels_in = m;

    // Pass 1: per (epoch, channel) validity and per-channel invalid counts.
    std::vector<std::uint8_t> invalid(epochs.size() * m, 0);
    rep.invalid_per_channel.assign(m, 0);
    for (std::size_t k = 0; k < epochs.size(); ++k) {
        for (std::size_t c = 0; c < m; ++c) {
            if (channel_invalid(epochs[k].channel(c), criteria)) {
                invalid[k * m + c] = 1;
                ++rep.invalid_per_channel[c];
            }
        }
    }
    const double limit = criteria.max_invalid_fraction * static_cast<double>(epochs.size());
    for (std::size_t c = 0; c < m; ++c) {
        if (static_cast<double>(rep.invalid_per_channel[c]) > limit) {
            rep.removed_channels.push_back(c);
        } else {
            rep.kept_channels.push_back(c);
        }
    }
    if (rep.kept_channels.empty()) throw Error("no usable channels");

    // Pass 2: drop epochs still invalid on any kept channel.
    for (std::size_t k = 0; k < epochs.size(); ++k) {
        const bool bad = std::any_of(rep.kept_channels.begin(), rep.kept_channels.end(),
                                     [&](std::size_t c) { return invalid[k * m + c] != 0; });
        if (bad) {
            ++rep.epochs_rejected;
            continue;
        }
        const auto& src = epochs[k];
        Epoch e;
        e.n_channels = rep.kept_channels.size();
        e.n_samples = src.n_samples;
        e.word = src.word;
        e.block = src.block;
        e.label = src.label;
        e.data.reserve(e.n_channels * e.n_samples);
        for (std::size_t c : rep.kept_channels) {
            auto ch = src.channel(c);
            e.data.insert(e.data.end(), ch.begin(), ch.end());
        }
        if (e.label == Label::relevant) ++rep.relevant_accepted;
        if (e.label == Label::irrelevant) ++rep.irrelevant_accepted;
        res.epochs.push_back(std::move(e));
    }
    rep.epochs_accepted = res.epochs.size();
    return res;
}

// ---------------------------------------------------------------------------

std::pair<std::size_t, std::size_t> window_samples(double fs, double from_ms, double to_ms) {
    // Sample n sits at kEpochStartMs + n * 1000 / fs.
    auto first_at_or_after = [fs](double ms) {
        const double pos = (ms - kEpochStartMs) * fs / 1000.0;
        return static_cast<std::size_t>(std::max(0.0, std::ceil(pos - 1e-9)));
    };
    return {first_at_or_after(from_ms), first_at_or_after(to_ms)};
}

std::vector<double> epoch_features(const Epoch& epoch, double fs) {
    std::vector<double> f;
    f.reserve(epoch.n_channels * kFeatureWindows);
    for (std::size_t c = 0; c < epoch.n_channels; ++c) {
        const auto ch = epoch.channel(c);
        for (int w = 0; w < kFeatureWindows; ++w) {
            const double from = kFeatureStartMs + w * kFeatureWindowMs;
            const auto [a, b] = window_samples(fs, from, from + kFeatureWindowMs);
            if (b > ch.size() || a >= b) throw Error("extract_features: epoch too short for feature windows");
            f.push_back(kernels::mean(ch.subspan(a, b - a)));
        }
    }
    return f;
}

FeatureMatrix extract_features(std::span<const Epoch> epochs, double fs) {
    FeatureMatrix fm;
    if (epochs.empty()) return fm;
    const std::size_t m = epochs.front().n_channels;
    fm.x.resize(static_cast<Eigen::Index>(epochs.size()), static_cast<Eigen::Index>(m * kFeatureWindows));
    fm.labels.reserve(epochs.size());
    for (std::size_t k = 0; k < epochs.size(); ++k) {
        if (epochs[k].n_channels != m) throw Error("extract_features: epochs differ in channel count");
        const auto f = epoch_features(epochs[k], fs);
        for (std::size_t c = 0; c < f.size(); ++c) {
            fm.x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = f[c];
        }
        fm.labels.push_back(epochs[k].label);
    }
    return fm;
}

Erp grand_average(std::span<const Epoch> epochs, Label condition) {
    Erp avg;
    std::size_t n = 0;
    for (const auto& e : epochs) {
        if (e.label != condition) continue;
        if (n == 0) {
            avg.n_channels = e.n_channels;
            avg.n_samples = e.n_samples;
            avg.data.assign(e.data.size(), 0.0);
        } else if (e.n_channels != avg.n_channels || e.n_samples != avg.n_samples) {
            throw Error("grand_average: epochs differ in shape");
        }
        kernels::axpy(1.0, e.data, avg.data);
        ++n;
    }
    if (n == 0) throw Error(std::string("grand_average: no epochs labeled ") + label_name(condition));
    for (double& v : avg.data) v /= static_cast<double>(n);
    return avg;
}

Erp grand_average(std::span<const Erp> averages) {
    if (averages.empty()) throw Error("grand_average: no participant averages");
    Erp avg = averages.front();
    std::fill(avg.data.begin(), avg.data.end(), 0.0);
    for (const auto& a : averages) {
        if (a.n_channels != avg.n_channels || a.n_samples != avg.n_samples) {
            throw Error("grand_average: averages differ in shape");
        }
        kernels::axpy(1.0, a.data, avg.data);
    }
    for (double& v : avg.data) v /= static_cast<double>(averages.size());
    return avg;
}

Erp difference_wave(const Erp& a, const Erp& b) {
    if (a.n_channels != b.n_channels || a.n_samples != b.n_samples) throw Error("difference_wave: shape mismatch");
    Erp d = a;
    kernels::axpy(-1.0, b.data, d.data);
    return d;
}

double window_mean(const Erp& erp, std::size_t channel, double fs, double from_ms, double to_ms) {
    if (channel >= erp.n_channels) throw Error("window_mean: channel out of range");
    const auto [a, b] = window_samples(fs, from_ms, to_ms);
    if (b > erp.n_samples || a >= b) throw Error("window_mean: window outside the epoch");
    return kernels::mean(erp.channel(channel).subspan(a, b - a));
}

TTest interval_test(std::span<const double> relevant, std::span<const double> irrelevant) {
    const auto r = stats::paired_t_test(relevant, irrelevant);
    return {r.statistic, r.p, relevant.size() - 1};
}

}  // namespace brainrel::eeg
