#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace qkemp {

/// Probabilities of a lattice law on offset, offset+1, ..., offset+size-1.
/// `captured_mass` is the sum of the stored entries; anything short of 1 is
/// mass that was truncated away.
class PmfTable {
public:
    /// Throws ParameterError on negative or non-finite entries, an empty
    /// table, or a total above 1 + 1e-12.
    PmfTable(std::int64_t offset, std::vector<double> probs);

    static PmfTable point_mass(std::int64_t x);

    std::int64_t offset() const noexcept { return offset_; }
    std::int64_t lo() const noexcept { return offset_; }
    std::int64_t hi() const noexcept { return offset_ + static_cast<std::int64_t>(probs_.size()) - 1; }
    std::size_t size() const noexcept { return probs_.size(); }
    std::span<const double> probs() const noexcept { return probs_; }
    double captured_mass() const noexcept { return captured_mass_; }
    double uncaptured_mass() const noexcept { return captured_mass_ < 1.0 ? 1.0 - captured_mass_ : 0.0; }

    /// P(X = x); 0 off the stored support.
    double at(std::int64_t x) const noexcept;

    /// Moments of the stored entries (brute force over the table).
    double mean() const;
    double variance() const;

    /// Columns x,p with a header row; probabilities at 17 significant digits.
    std::string to_csv() const;
    static PmfTable from_csv(const std::string& text);

    /// {"offset": ..., "probs": [...], "captured_mass": ...}
    nlohmann::json to_json() const;
    static PmfTable from_json(const nlohmann::json& doc);

    friend bool operator==(const PmfTable& a, const PmfTable& b) noexcept {
        return a.offset_ == b.offset_ && a.probs_ == b.probs_ && a.captured_mass_ == b.captured_mass_;
    }

private:
    std::int64_t offset_;
    std::vector<double> probs_;
    double captured_mass_;
};

}  // namespace qkemp
