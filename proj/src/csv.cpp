#include "diamond/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "diamond/core.hpp"

namespace diamond::csv {

bool Reader::next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    // skip a bare trailing newline so files ending in "\n" do not yield an
    // extra empty record
    if (c == std::char_traits<char>::eof()) return false;

    ++record_;
    std::string field;
    bool quoted = false;
    for (;;) {
        if (quoted) {
            if (c == std::char_traits<char>::eof())
                throw IngestError("unterminated quoted field in record " + std::to_string(record_));
            if (c == '"') {
                int peek = in_.peek();
                if (peek == '"') {
                    field.push_back('"');
                    in_.get();
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(static_cast<char>(c));
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == std::char_traits<char>::eof()) {
            break;
        } else if (c == '\r') {
            if (in_.peek() == '\n') {
                in_.get();
                break;
            }
            field.push_back('\r');
        } else {
            field.push_back(static_cast<char>(c));
        }
        c = in_.get();
    }
    fields.push_back(std::move(field));
    return true;
}

static bool needs_quoting(const std::string& s) {
    for (char c : s)
        if (c == ',' || c == '"' || c == '\n' || c == '\r') return true;
    return false;
}

void write_record(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        const std::string& f = fields[i];
        if (needs_quoting(f)) {
            out.put('"');
            for (char c : f) {
                if (c == '"') out.put('"');
                out.put(c);
            }
            out.put('"');
        } else {
            out.write(f.data(), static_cast<std::streamsize>(f.size()));
        }
    }
    out.put('\n');
}

std::string format_double(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& s, std::size_t record, const std::string& column) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    // tolerate surrounding blanks
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
    auto r = std::from_chars(first, last, v);
    if (r.ec != std::errc() || r.ptr != last)
        throw IngestError("record " + std::to_string(record) + ": cannot parse '" + s +
                          "' as a measure (column " + column + ")");
    return v;
}

}  // namespace diamond::csv
