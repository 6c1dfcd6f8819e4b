#include "seqjde/sample_source.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "seqjde/errors.hpp"

namespace seqjde {

GaussianSource::GaussianSource(double variance, std::uint64_t seed)
    : stddev_(std::sqrt(variance)), rng_(seed) {
    if (!(variance >= 0.0) || !std::isfinite(variance))
        throw DomainError("GaussianSource: variance must be finite and >= 0");
}

std::optional<double> GaussianSource::next() { return stddev_ * normal_(rng_); }

std::optional<double> VectorSource::next() {
    if (pos_ >= samples_.size()) return std::nullopt;
    return samples_[pos_++];
}

std::optional<double> ScaledSource::next() {
    auto v = inner_.next();
    if (!v) return std::nullopt;
    return *v * factor_;
}

FileSource::FileSource(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw FormatError("cannot open sample file: " + path.string());
}

std::optional<double> FileSource::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const char* begin = line.data() + first;
        const char* end = line.data() + last + 1;
        if (*begin == '+') ++begin;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
            throw FormatError(path_.string() + ":" + std::to_string(line_no_) +
                              ": not a finite decimal: '" + line + "'");
        }
        return value;
    }
    return std::nullopt;
}

}  // namespace seqjde
