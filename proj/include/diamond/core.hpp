#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace diamond {

enum class Aggregator { Count, Sum };

inline const char* to_string(Aggregator a) {
    return a == Aggregator::Count ? "count" : "sum";
}

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data (ragged rows, unparseable measures, bad headers).
struct IngestError : Error {
    using Error::Error;
};

// Unknown dimension index or attribute id.
struct LookupError : Error {
    using Error::Error;
};

// Union of cubes that disagree on a shared cell's measure.
struct IncompatibleRestriction : Error {
    using Error::Error;
};

// Argument outside the operation's domain (d <= 1, s <= 1, negative carats, ...).
struct DomainError : Error {
    using Error::Error;
};

struct BudgetExceeded : Error {
    using Error::Error;
};

// I/O or other failure while a multi-pass run is in flight.
struct RunError : Error {
    using Error::Error;
};

/// Per-dimension thresholds k_1..k_d.
struct CaratVector {
    std::vector<double> k;

    CaratVector() = default;
    explicit CaratVector(std::vector<double> values) : k(std::move(values)) { validate(); }

    static CaratVector uniform(std::size_t d, double value) {
        return CaratVector(std::vector<double>(d, value));
    }

    std::size_t size() const { return k.size(); }
    double operator[](std::size_t i) const { return k[i]; }
    double max() const;
    bool all_zero() const;
    bool integral() const;

    void validate() const;                      // k_i >= 0, finite
    void validate_for(Aggregator agg) const;    // COUNT additionally requires integers
};

}  // namespace diamond
