#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <vector>

namespace seqjde {

// Pull interface over a stream of raw real-valued samples.
class SampleSource {
public:
    virtual ~SampleSource() = default;

    // Next sample, or nullopt once the stream is exhausted.
    virtual std::optional<double> next() = 0;
};

// Zero-mean Gaussian samples with a fixed variance.
class GaussianSource final : public SampleSource {
public:
    GaussianSource(double variance, std::uint64_t seed);

    std::optional<double> next() override;

private:
    double stddev_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// Replays an in-memory sample vector.
class VectorSource final : public SampleSource {
public:
    explicit VectorSource(std::vector<double> samples) : samples_(std::move(samples)) {}

    std::optional<double> next() override;

    std::size_t consumed() const noexcept { return pos_; }

private:
    std::vector<double> samples_;
    std::size_t pos_ = 0;
};

// Multiplies every sample of an underlying source by a constant.
class ScaledSource final : public SampleSource {
public:
    ScaledSource(SampleSource& inner, double factor) : inner_(inner), factor_(factor) {}

    std::optional<double> next() override;

private:
    SampleSource& inner_;
    double factor_;
};

// Plain text file, one finite decimal per line. Blank lines are skipped;
// anything else that does not parse as a finite number raises FormatError.
class FileSource final : public SampleSource {
public:
    explicit FileSource(const std::filesystem::path& path);

    std::optional<double> next() override;

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
};

}  // namespace seqjde
