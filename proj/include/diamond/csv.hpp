#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace diamond::csv {

/// Incremental RFC-4180 reader. Quoted fields may contain commas, doubled
/// quotes and embedded line breaks. Accepts both LF and CRLF input.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Reads one record into `fields`. Returns false at end of input.
    bool next(std::vector<std::string>& fields);

    /// 1-based number of the record most recently returned.
    std::size_t record_number() const { return record_; }

private:
    std::istream& in_;
    std::size_t record_ = 0;
};

void write_record(std::ostream& out, const std::vector<std::string>& fields);

std::string format_double(double v);  // shortest round-trip form
double parse_double(const std::string& s, std::size_t record, const std::string& column);

}  // namespace diamond::csv
