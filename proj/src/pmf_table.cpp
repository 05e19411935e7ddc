#include "qkemp/pmf_table.hpp"

#include <cstdlib>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "qkemp/error.hpp"
#include "qkemp/format.hpp"

namespace qkemp {

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

PmfTable::PmfTable(std::int64_t offset, std::vector<double> probs)
    : offset_(offset), probs_(std::move(probs)), captured_mass_(0.0) {
    if (probs_.empty()) throw ParameterError("PmfTable: empty support");
    long double total = 0.0L;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ParameterError("PmfTable: entries must be finite and >= 0");
        total += p;
    }
    captured_mass_ = static_cast<double>(total);
    if (captured_mass_ > 1.0 + 1e-12) {
        throw ParameterError("PmfTable: total mass " + format_real(captured_mass_) + " exceeds 1");
    }
}

PmfTable PmfTable::point_mass(std::int64_t x) {
    return PmfTable(x, {1.0});
}

double PmfTable::at(std::int64_t x) const noexcept {
    if (x < lo() || x > hi()) return 0.0;
    return probs_[static_cast<std::size_t>(x - offset_)];
}

double PmfTable::mean() const {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += static_cast<long double>(offset_ + static_cast<std::int64_t>(i)) * probs_[i];
    }
    return static_cast<double>(acc / captured_mass_);
}

double PmfTable::variance() const {
    const long double mu = mean();
    long double acc = 0.0L;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        const long double d = static_cast<long double>(offset_ + static_cast<std::int64_t>(i)) - mu;
        acc += d * d * probs_[i];
    }
    return static_cast<double>(acc / captured_mass_);
}

std::string PmfTable::to_csv() const {
    std::string out = "x,p\n";
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        out += std::to_string(offset_ + static_cast<std::int64_t>(i));
        out += ',';
        out += format_real(probs_[i]);
        out += '\n';
    }
    return out;
}

PmfTable PmfTable::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "x,p") throw ParameterError("PmfTable CSV: expected header 'x,p'");
    std::int64_t offset = 0;
    std::vector<double> probs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParameterError("PmfTable CSV: malformed row '" + line + "'");
        std::int64_t x = 0;
        double p = 0.0;
        try {
            x = std::stoll(line.substr(0, comma));
            const std::string cell = line.substr(comma + 1);
            char* end = nullptr;
            p = std::strtod(cell.c_str(), &end);  // accepts subnormals, unlike stod
            if (cell.empty() || end != cell.c_str() + cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ParameterError("PmfTable CSV: malformed row '" + line + "'");
        }
        if (probs.empty()) {
            offset = x;
        } else if (x != offset + static_cast<std::int64_t>(probs.size())) {
            throw ParameterError("PmfTable CSV: support must be consecutive integers");
        }
        probs.push_back(p);
    }
    return PmfTable(offset, std::move(probs));
}

nlohmann::json PmfTable::to_json() const {
    return {{"offset", offset_}, {"probs", probs_}, {"captured_mass", captured_mass_}};
}

PmfTable PmfTable::from_json(const nlohmann::json& doc) {
    try {
        PmfTable t(doc.at("offset").get<std::int64_t>(), doc.at("probs").get<std::vector<double>>());
        if (doc.contains("captured_mass")) {
            const double declared = doc.at("captured_mass").get<double>();
            if (std::fabs(declared - t.captured_mass_) > 1e-12) {
                throw ParameterError("PmfTable JSON: captured_mass disagrees with the entries");
            }
            t.captured_mass_ = declared;
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("PmfTable JSON: ") + e.what());
    }
}

}  // namespace qkemp
