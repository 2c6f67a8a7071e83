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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace brainrel::eeg {

enum class Label : std::uint8_t { irrelevant = 0, relevant = 1, unlabeled = 2 };

const char* label_name(Label l);

enum class StimulusKind : std::uint8_t { word = 0, separator = 1 };

// Epoch window relative to word onset.
inline constexpr double kEpochStartMs = -250.0;
inline constexpr double kEpochEndMs = 1000.0;

// Seven 100 ms feature windows covering [250, 950) ms.
inline constexpr int kFeatureWindows = 7;
inline constexpr double kFeatureStartMs = 250.0;
inline constexpr double kFeatureWindowMs = 100.0;

struct Event {
    std::size_t sample = 0;
    std::string word;
    int block = 0;
    StimulusKind kind = StimulusKind::word;
    Label label = Label::unlabeled;
};

struct Recording {
    std::vector<std::string> channels;
    double fs = 0.0;
    std::vector<std::vector<double>> traces;  // one per channel, µV
    std::vector<Event> events;

    std::size_t length() const { return traces.empty() ? 0 : traces.front().size(); }
    // Throws brainrel::Error on ragged traces or out-of-range events.
    void validate() const;
};

/// One word-locked segment; data is channel-major (row = channel), µV.
struct Epoch {
    std::size_t n_channels = 0;
    std::size_t n_samples = 0;
    std::vector<double> data;
    std::string word;
    int block = 0;
    Label label = Label::unlabeled;

    std::span<const double> channel(std::size_t c) const {
        return {data.data() + c * n_samples, n_samples};
    }
    std::span<double> channel(std::size_t c) { return {data.data() + c * n_samples, n_samples}; }
};

std::size_t epoch_samples(double fs);
std::size_t prestimulus_samples(double fs);

// ---------------------------------------------------------------------------
// Filtering
// ---------------------------------------------------------------------------

struct FilterDesign {
    double lowpass_hz = 35.0;
    double highpass_hz = 0.5;
};

/// Hamming-windowed sinc low-pass, `order + 1` taps, unit DC gain.
std::vector<double> design_lowpass(double fs, double cutoff_hz, std::size_t order);
/// Spectral inversion of design_lowpass; DC gain is exactly zero up to rounding.
std::vector<double> design_highpass(double fs, double cutoff_hz, std::size_t order);

/// Order 100 at 200 Hz, scaled with fs, rounded up to even.
std::size_t lowpass_order(double fs);
/// Transition band roughly as wide as the cutoff itself: 3.3 * fs / cutoff.
std::size_t highpass_order(double fs, double cutoff_hz);

/// Zero-phase (forward-backward) application of a symmetric FIR filter with
/// odd-reflection edge padding. Length is preserved.
std::vector<double> filtfilt(std::span<const double> x, std::span<const double> taps);

/// Band-limits every trace to the design passband. Requires fs >= 80 Hz.
Recording filter(const Recording& rec, const FilterDesign& design = {});

// ---------------------------------------------------------------------------
// Epoching and cleaning
// ---------------------------------------------------------------------------

struct CutResult {
    std::vector<Epoch> epochs;
    std::vector<std::string> warnings;
};

/// One baseline-corrected epoch per word event; separators are skipped and
/// events too close to either edge produce a warning instead of an epoch.
CutResult cut_epochs(const Recording& rec);

/// Subtracts each channel's pre-stimulus mean.
void baseline_correct(Epoch& epoch, std::size_t prestimulus);

struct RejectionCriteria {
    double min_variance = 0.5;          // µV², below counts as flat
    double max_peak_to_peak = 40.0;     // µV
    double max_invalid_fraction = 0.10;  // per channel, of all epochs
};

struct RejectionReport {
    std::size_t epochs_in = 0;
    std::size_t epochs_accepted = 0;
    std::size_t epochs_rejected = 0;
    std::size_t relevant_accepted = 0;
    std::size_t irrelevant_accepted = 0;
    std::size_t channels_in = 0;
    std::vector<std::size_t> kept_channels;
    std::vector<std::size_t> removed_channels;
    std::vector<std::size_t> invalid_per_channel;  // first-pass counts
};

struct RejectionResult {
    std::vector<Epoch> epochs;  // restricted to kept channels
    RejectionReport report;
};

/// Two-pass heuristic: channels that alone invalidate more than the allowed
/// fraction of epochs are dropped, then epochs invalid on any remaining
/// channel are dropped. Throws "no usable channels" if every channel goes.
RejectionResult reject_artifacts(std::span<const Epoch> epochs, const RejectionCriteria& criteria = {});

bool channel_invalid(std::span<const double> trace, const RejectionCriteria& criteria);

// ---------------------------------------------------------------------------
// Features and averages
// ---------------------------------------------------------------------------

struct FeatureMatrix {
    Eigen::MatrixXd x;  // n epochs × (channels · 7), channel-major columns
    std::vector<Label> labels;
};

/// Sample index range [first, last) whose times fall in [from_ms, to_ms).
std::pair<std::size_t, std::size_t> window_samples(double fs, double from_ms, double to_ms);

std::vector<double> epoch_features(const Epoch& epoch, double fs);
FeatureMatrix extract_features(std::span<const Epoch> epochs, double fs);

struct Erp {
    std::size_t n_channels = 0;
    std::size_t n_samples = 0;
    std::vector<double> data;

    std::span<const double> channel(std::size_t c) const {
        return {data.data() + c * n_samples, n_samples};
    }
};

/// Pointwise mean over the epochs carrying `condition`.
Erp grand_average(std::span<const Epoch> epochs, Label condition);
/// Pointwise mean of per-participant averages.
Erp grand_average(std::span<const Erp> averages);
Erp difference_wave(const Erp& a, const Erp& b);

/// Mean amplitude of one channel over [from_ms, to_ms).
double window_mean(const Erp& erp, std::size_t channel, double fs, double from_ms, double to_ms);

struct TTest {
    double t = 0.0;
    double p = 1.0;
    std::size_t df = 0;
};

/// Paired two-sided t-test on per-participant interval means.
TTest interval_test(std::span<const double> relevant, std::span<const double> irrelevant);

}  // namespace brainrel::eeg
