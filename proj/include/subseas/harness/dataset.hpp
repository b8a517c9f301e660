#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subseas/metrics.hpp"
#include "subseas/series.hpp"

namespace subseas::harness {

/// Raised when an input file cannot be read or parsed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SeriesRecord {
    SeasonalSeries series;  // training segment
    std::vector<double> test;
    int horizon = 0;
};

struct Dataset {
    metrics::FrequencyClass frequency_class = metrics::FrequencyClass::Quarterly;
    std::vector<SeriesRecord> records;
    std::vector<std::string> warnings;
    int skipped = 0;
};

namespace detail {

inline std::vector<double> number_array(const nlohmann::json& j, const char* field, const std::string& where) {
    if (!j.contains(field)) throw std::invalid_argument(where + ": missing \"" + field + "\"");
    const auto& arr = j.at(field);
    if (!arr.is_array()) throw std::invalid_argument(where + ": \"" + field + "\" must be an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) {
            throw std::invalid_argument(where + ": \"" + field + "\"[" + std::to_string(i) + "] is not a number");
        }
        out.push_back(arr[i].get<double>());
    }
    return out;
}

inline int int_field(const nlohmann::json& j, const char* field, int fallback, const std::string& where) {
    if (!j.contains(field)) return fallback;
    if (!j.at(field).is_number_integer()) throw std::invalid_argument(where + ": \"" + field + "\" must be an integer");
    return j.at(field).get<int>();
}

}  // namespace detail

/// Builds a dataset from the parsed JSON document. Records that violate an
/// invariant are skipped and reported in `warnings`; a malformed document
/// throws IoError.
inline Dataset parse_dataset(const nlohmann::json& doc) {
    if (!doc.is_object()) throw IoError("dataset: top level must be an object");
    Dataset ds;
    try {
        ds.frequency_class = metrics::parse_frequency_class(doc.value("frequency_class", std::string{}));
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("dataset: ") + e.what());
    }
    if (!doc.contains("series") || !doc.at("series").is_array()) throw IoError("dataset: \"series\" array missing");

    const auto& arr = doc.at("series");
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const auto& rec = arr[k];
        std::string where = "series record " + std::to_string(k);
        try {
            if (!rec.is_object()) throw std::invalid_argument(where + ": not an object");
            if (!rec.contains("id") || !rec.at("id").is_string()) throw std::invalid_argument(where + ": missing string \"id\"");
            SeriesRecord r;
            r.series.id = rec.at("id").get<std::string>();
            where += " (" + r.series.id + ")";
            r.series.frequency = detail::int_field(rec, "frequency", metrics::default_frequency(ds.frequency_class), where);
            r.series.start_phase = detail::int_field(rec, "start_phase", 1, where);
            r.horizon = detail::int_field(rec, "horizon", metrics::default_horizon(ds.frequency_class), where);
            if (rec.contains("category") && rec.at("category").is_string()) {
                r.series.category = rec.at("category").get<std::string>();
            }
            r.series.values = detail::number_array(rec, "train", where);
            r.test = detail::number_array(rec, "test", where);

            auto errors = validate_series(r.series);
            for (std::size_t i = 0; i < r.test.size(); ++i) {
                if (!std::isfinite(r.test[i])) errors.push_back("non-finite test value at index " + std::to_string(i + 1));
            }
            if (r.horizon < 1) errors.emplace_back("horizon must be >= 1");
            if (static_cast<int>(r.test.size()) != r.horizon) {
                errors.push_back("test length " + std::to_string(r.test.size()) + " differs from horizon " +
                                 std::to_string(r.horizon));
            }
            if (errors.empty() && static_cast<long>(r.series.size()) < r.series.frequency + 2L) {
                errors.emplace_back("train shorter than two seasonal differences");
            }
            if (!errors.empty()) {
                std::string msg = where + ": ";
                for (std::size_t i = 0; i < errors.size(); ++i) msg += (i ? "; " : "") + errors[i];
                throw std::invalid_argument(msg);
            }
            ds.records.push_back(std::move(r));
        } catch (const std::invalid_argument& e) {
            ds.warnings.emplace_back(std::string("skipped ") + e.what());
            ++ds.skipped;
        } catch (const nlohmann::json::exception& e) {
            ds.warnings.push_back("skipped " + where + ": " + e.what());
            ++ds.skipped;
        }
    }
    return ds;
}

inline Dataset ingest_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("dataset " + path.string() + ": " + e.what());
    }
    return parse_dataset(doc);
}

/// Reads a `timestamp,demand` CSV. Timestamps are carried through untouched;
/// rows must already be in time order.
inline std::vector<double> read_load_csv(const std::filesystem::path& path, std::vector<std::string>* timestamps = nullptr) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open load csv " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,demand") throw IoError(path.string() + ":1: expected header 'timestamp,demand'");
    std::vector<double> values;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError(path.string() + ":" + std::to_string(lineno) + ": missing comma");
        const std::string field = line.substr(comma + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(field, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != field.size() || !std::isfinite(v)) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad demand value '" + field + "'");
        }
        values.push_back(v);
        if (timestamps) timestamps->push_back(line.substr(0, comma));
    }
    return values;
}

}  // namespace subseas::harness
